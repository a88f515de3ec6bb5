"""Scoring simulated partner decisions against the observed network.

The harness replays history up to a cutoff, lets a focal firm act for
one turn, and compares the outcome with what actually happened next.
Binary confusion metrics cover who ended up partnered; edge dynamics
(add, remove, keep) across repeated runs feed Gwet's AC1 and per-slot
consistency ratios.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import AbstractSet, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateChance, InsufficientHistory, InvalidConfig, TooFewSamples
from .model import CompanyId, Dataset, Edge, Timeline, partners_in
from .protocol.engine import TurnConfig, run_turn
from .protocol.policy import AgentPolicy

log = logging.getLogger(__name__)


class EdgeDecision(Enum):
    ADD = "add"
    REMOVE = "remove"
    KEEP = "keep"


DECISION_ORDER = (EdgeDecision.ADD, EdgeDecision.REMOVE, EdgeDecision.KEEP)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def metrics(self) -> tuple[float, float, float, float]:
        """(accuracy, precision, recall, f1); empty denominators give 0."""
        acc = (self.tp + self.tn) / self.total if self.total else 0.0
        precision = self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0
        recall = self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0
        f1 = (
            2 * precision * recall / (precision + recall) if precision + recall else 0.0
        )
        return acc, precision, recall, f1


def confusion_counts(
    predicted: AbstractSet[Hashable],
    observed: AbstractSet[Hashable],
    universe: AbstractSet[Hashable],
) -> ConfusionCounts:
    if not predicted <= universe or not observed <= universe:
        raise InvalidConfig("predicted and observed sets must lie inside the universe")
    tp = len(predicted & observed)
    fp = len(predicted - observed)
    fn = len(observed - predicted)
    tn = len(universe) - tp - fp - fn
    return ConfusionCounts(tp, fp, fn, tn)


def confusion_metrics(
    predicted: AbstractSet[Hashable],
    observed: AbstractSet[Hashable],
    universe: AbstractSet[Hashable],
) -> tuple[float, float, float, float]:
    """Binary (accuracy, precision, recall, f1) over a fixed universe."""
    return confusion_counts(predicted, observed, universe).metrics()


def edge_dynamics(
    prev_edges: AbstractSet[Edge],
    next_edges: AbstractSet[Edge],
    slot_universe: Iterable[Edge],
) -> dict[Edge, EdgeDecision]:
    """Classify each slot's transition; absent-in-both slots are dropped."""
    out: dict[Edge, EdgeDecision] = {}
    for slot in slot_universe:
        before = slot in prev_edges
        after = slot in next_edges
        if before and after:
            out[slot] = EdgeDecision.KEEP
        elif before:
            out[slot] = EdgeDecision.REMOVE
        elif after:
            out[slot] = EdgeDecision.ADD
    return out


def decision_matrix(
    run_decisions: Mapping[Hashable, Sequence[EdgeDecision]],
    categories: Sequence[EdgeDecision] = DECISION_ORDER,
) -> np.ndarray:
    """Item-by-category count matrix from per-slot decision sequences.

    Every slot must carry the same number of decisions (one per run).
    """
    if not run_decisions:
        raise TooFewSamples("no decision slots")
    widths = {len(v) for v in run_decisions.values()}
    if len(widths) != 1:
        raise InvalidConfig(f"uneven rater counts per slot: {sorted(widths)}")
    index = {cat: j for j, cat in enumerate(categories)}
    m = np.zeros((len(run_decisions), len(categories)), dtype=float)
    for i, slot in enumerate(sorted(run_decisions, key=repr)):
        for decision in run_decisions[slot]:
            m[i, index[decision]] += 1
    return m


def gwet_ac1(m: np.ndarray) -> float:
    """Gwet's AC1 chance-corrected agreement for an item x category
    count matrix with a constant rater count per item.

    With N items, R raters, and r_ik raters putting item i in category
    k: Pa = mean_i sum_k r_ik(r_ik - 1) / (R(R - 1)); pi_k = mean_i
    r_ik / R; Pe = sum_k pi_k(1 - pi_k) / (K - 1); AC1 = (Pa - Pe) /
    (1 - Pe).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 2:
        raise TooFewSamples(f"need an N x K matrix with K >= 2, got shape {m.shape}")
    row_sums = m.sum(axis=1)
    r = row_sums[0]
    if not np.all(row_sums == r):
        raise InvalidConfig("every item needs the same number of raters")
    if r < 2:
        raise TooFewSamples("at least two raters per item")
    n, k = m.shape
    pa = float(np.sum(m * (m - 1)) / (r * (r - 1)) / n)
    pi = m.sum(axis=0) / (n * r)
    pe = float(np.sum(pi * (1 - pi)) / (k - 1))
    if pe == 1.0:
        raise DegenerateChance("chance agreement is 1; AC1 undefined")
    return (pa - pe) / (1 - pe)


CR_BANDS = ("High", "Medium", "Low")


def cr_band(cr: float) -> str:
    """High above 0.8; Medium above 0.6 up to and including 0.8."""
    if cr > 0.8:
        return "High"
    if cr > 0.6:
        return "Medium"
    return "Low"


def consistency_ratios(
    run_decisions: Mapping[Hashable, Sequence[EdgeDecision]],
) -> dict[Hashable, float]:
    """Per slot, the share of runs agreeing on the modal decision."""
    out = {}
    for slot, decisions in run_decisions.items():
        if len(decisions) < 2:
            raise TooFewSamples(f"slot {slot!r} has fewer than two runs")
        counts: dict[EdgeDecision, int] = {}
        for d in decisions:
            counts[d] = counts.get(d, 0) + 1
        out[slot] = max(counts.values()) / len(decisions)
    return out


def band_shares(values: Iterable[float]) -> dict[str, float]:
    values = list(values)
    shares = dict.fromkeys(CR_BANDS, 0.0)
    if not values:
        return shares
    for v in values:
        shares[cr_band(v)] += 1
    return {k: v / len(values) for k, v in shares.items()}


@dataclass(frozen=True)
class EvalReport:
    acc: float
    precision: float
    recall: float
    f1: float
    ac1: float | None
    cr_band_shares: Mapping[str, float]
    firm_mean_cr: Mapping[CompanyId, float] = field(default_factory=dict)
    n_slots: int = 0
    runs_per_focal: int = 0
    cr_scope: str = "slot"

    def to_doc(self) -> dict:
        return {
            "acc": self.acc,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "ac1": self.ac1,
            "crBandShares": dict(self.cr_band_shares),
            "firmMeanCr": dict(sorted(self.firm_mean_cr.items())),
            "nSlots": self.n_slots,
            "runsPerFocal": self.runs_per_focal,
            "crScope": self.cr_scope,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["ACC", "Precision", "Recall", "F1", "AC1", "HighCR", "MediumCR", "LowCR"]
        )
        writer.writerow(
            [
                f"{self.acc:.4f}",
                f"{self.precision:.4f}",
                f"{self.recall:.4f}",
                f"{self.f1:.4f}",
                "" if self.ac1 is None else f"{self.ac1:.4f}",
                f"{self.cr_band_shares['High']:.4f}",
                f"{self.cr_band_shares['Medium']:.4f}",
                f"{self.cr_band_shares['Low']:.4f}",
            ]
        )
        return buf.getvalue()


PolicyFactory = Callable[[int], "AgentPolicy | Mapping[CompanyId, AgentPolicy]"]


def _slots_for(focal: CompanyId, edge_sets: Iterable[AbstractSet[Edge]]) -> set[Edge]:
    slots: set[Edge] = set()
    for edges in edge_sets:
        slots.update(e for e in edges if focal in e)
    return slots


def run_experiment(
    dataset: Dataset,
    policy_factory: PolicyFactory,
    focal_ids: Sequence[CompanyId],
    history_len: int = 4,
    runs: int = 80,
    seed_base: int = 0,
    config: TurnConfig | None = None,
    cr_scope: str = "slot",
) -> EvalReport:
    """Score one-step simulations of the focal firms against history.

    ``runs`` is the total run count and must split evenly over the
    focal firms. Each run feeds ``history_len`` observed steps to the
    engine with only the focal firm acting, simulates one turn, and
    compares the focal firm's partners with the observed next step.
    Confusion counts pool over every (focal, run) pair; agreement and
    consistency treat the runs of one focal firm as its raters.
    """
    if not focal_ids:
        raise InvalidConfig("at least one focal firm")
    if len(set(focal_ids)) != len(focal_ids):
        raise InvalidConfig("duplicate focal ids")
    if runs < len(focal_ids) or runs % len(focal_ids) != 0:
        raise InvalidConfig(
            f"{runs} runs cannot be split evenly over {len(focal_ids)} focal firms"
        )
    if cr_scope not in ("slot", "firm"):
        raise InvalidConfig(f"cr_scope must be 'slot' or 'firm', not {cr_scope!r}")
    n_steps = len(dataset.network.edges_by_t)
    if history_len < 1 or n_steps < history_len + 1:
        raise InsufficientHistory(
            f"need {history_len + 1} observed steps, dataset has {n_steps}"
        )
    for focal in focal_ids:
        dataset.company(focal)

    per_focal = runs // len(focal_ids)
    base_config = config or TurnConfig(reference_length=history_len)
    universe = frozenset(dataset.company_ids)
    prev_edges = dataset.network.edges_by_t[history_len - 1]
    observed_next = dataset.network.edges_by_t[history_len]

    pooled = ConfusionCounts()
    all_run_decisions: dict[tuple[CompanyId, Edge], list[EdgeDecision]] = {}
    per_firm_crs: dict[CompanyId, list[float]] = {}
    firm_bands: dict[CompanyId, float] = {}

    for fi, focal in enumerate(sorted(focal_ids)):
        turn_config = TurnConfig(
            reference_length=base_config.reference_length,
            performance_metric=base_config.performance_metric,
            candidate_k=base_config.candidate_k,
            active_agents=frozenset({focal}),
            max_workers=base_config.max_workers,
        )
        next_sets: list[frozenset[Edge]] = []
        for run_index in range(per_focal):
            seed = seed_base + fi * per_focal + run_index
            timeline = Timeline.from_dataset_prefix(dataset, history_len)
            built = policy_factory(seed)
            policies = (
                dict(built)
                if isinstance(built, Mapping)
                else {cid: built for cid in dataset.company_ids}
            )
            next_edges, _ = run_turn(timeline, policies, turn_config, seed=seed)
            next_sets.append(next_edges)
            predicted = partners_in(next_edges, focal)
            observed = partners_in(observed_next, focal)
            pooled = pooled + confusion_counts(
                predicted, observed, universe - {focal}
            )

        slots = _slots_for(focal, [prev_edges, *next_sets])
        run_decisions: dict[Edge, list[EdgeDecision]] = {s: [] for s in sorted(slots)}
        for next_edges in next_sets:
            for slot in run_decisions:
                before = slot in prev_edges
                after = slot in next_edges
                if before and not after:
                    run_decisions[slot].append(EdgeDecision.REMOVE)
                elif after and not before:
                    run_decisions[slot].append(EdgeDecision.ADD)
                else:
                    # untouched in this run counts as keeping the status quo
                    run_decisions[slot].append(EdgeDecision.KEEP)
        for slot, decisions in run_decisions.items():
            all_run_decisions[(focal, slot)] = decisions

        if run_decisions and per_focal >= 2:
            crs = consistency_ratios(run_decisions)
            per_firm_crs[focal] = list(crs.values())
            if cr_scope == "firm":
                counts: dict[EdgeDecision, int] = {}
                for decisions in run_decisions.values():
                    for d in decisions:
                        counts[d] = counts.get(d, 0) + 1
                firm_bands[focal] = max(counts.values()) / sum(counts.values())
        else:
            log.info("focal %s produced no edge slots", focal)

    acc, precision, recall, f1 = pooled.metrics()

    ac1: float | None = None
    if all_run_decisions and per_focal >= 2:
        ac1 = gwet_ac1(decision_matrix(all_run_decisions))

    if cr_scope == "firm":
        shares = band_shares(firm_bands.values())
    else:
        shares = band_shares(
            cr for crs in per_firm_crs.values() for cr in crs
        ) if per_focal >= 2 else dict.fromkeys(CR_BANDS, 0.0)

    firm_mean = {
        focal: float(np.mean(crs)) for focal, crs in per_firm_crs.items() if crs
    } if per_focal >= 2 else {}

    return EvalReport(
        acc=acc,
        precision=precision,
        recall=recall,
        f1=f1,
        ac1=ac1,
        cr_band_shares=shares,
        firm_mean_cr=firm_mean,
        n_slots=len(all_run_decisions),
        runs_per_focal=per_focal,
        cr_scope=cr_scope,
    )
