"""Supply-chain partner simulation and analysis toolkit.

Firms are agents on a directed supplier-to-customer network. Each turn
every agent plans, searches for candidates, sends partnership requests,
and answers the requests it received; the network then commits all
accepted and terminated edges at once. On top of the simulator sit
performance metrics, forecast extenders for firm features, per-firm
attribution of predicted performance, agreement scoring across repeated
runs, and a session service that tracks branching what-if timelines.
"""

from .errors import ScsimError
from .ingest import load_dataset, write_dataset
from .model import Dataset, TemporalNetwork, Timeline

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "ScsimError",
    "TemporalNetwork",
    "Timeline",
    "__version__",
    "load_dataset",
    "write_dataset",
]
