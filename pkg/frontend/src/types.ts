/**
 * Payload shapes of the session service, mirrored field by field.
 *
 * The client never derives analytics; if a number is not in one of these
 * documents it does not appear on screen. Regenerate the fixture
 * snapshots with scripts/make_fixtures.py whenever these change.
 */

export type NodeStatus = "Historical" | "Simulated" | "Active";

export interface TreeNode {
  nodeId: string;
  parent: string | null;
  t: number;
  label: string;
  status: NodeStatus;
  runId: string | null;
  adjustedFrom: string | null;
  hasStaged: boolean;
}

export interface TreeDoc {
  sessionId: string;
  active: string;
  nodes: TreeNode[];
}

export interface SessionConfigDoc {
  performanceMetric: string;
  explainModelKind: string;
  horizonModelKind: string;
  agentPolicyKind: string;
  llm: Record<string, string> | null;
  referenceLength: number;
  simulationTurns: number;
  candidateK: number;
  lam: number | null;
  seed: number;
  maxWorkers: number | null;
}

export interface RunDoc {
  runId: string;
  status: "running" | "done" | "failed";
  nodes: string[];
  error: string | null;
}

// --- global view ------------------------------------------------------------

export interface GlobalPoint {
  companyId: string;
  x: number;
  y: number;
}

export interface GlobalPanel {
  t: number;
  label: string;
  simulated: boolean;
  points: GlobalPoint[];
  edges: [string, string][];
  performance: Record<string, number>;
}

export interface GlobalView {
  version: string;
  degenerate: boolean;
  industries: Record<string, string>;
  panels: GlobalPanel[];
}

// --- focus view -------------------------------------------------------------

export type Lifecycle = "initiate" | "maintain" | "terminate";

export interface Berry {
  companyId: string;
  /** performance, min-max normalized per timestamp, in [0, 1] */
  vertical: number;
  /** signed attribution offset in [-1, 1]; +1 sits nearest the focal glyph */
  horizontal: number;
  lifecycle: Lifecycle;
  missingAttribution: boolean;
}

export interface Soil {
  meanPerformance: number;
  focalContribution: number;
  magnitude: number;
}

export interface BerryGroup {
  side: "supplier" | "customer";
  industry: string;
  berries: Berry[];
  soil: Soil;
}

export interface FocalGlyph {
  xPosition: number;
  performanceRadius: number;
  featureArcs: Record<string, number>;
}

export interface FocusPanel {
  companyId: string;
  t: number;
  label: string;
  focal: FocalGlyph;
  supplierGroups: BerryGroup[];
  customerGroups: BerryGroup[];
  missingAttribution: boolean;
}

export interface SharedSupplierLink {
  t: number;
  focalA: string;
  focalB: string;
  supplierId: string;
}

export interface FocusView {
  version: string;
  industries: Record<string, string>;
  panels: FocusPanel[];
  sharedSupplierLinks: SharedSupplierLink[];
}

// --- adjustment view --------------------------------------------------------

export interface PlanDoc {
  description: string;
  reason: string;
  seek_collaboration: boolean;
  seek_suppliers: boolean;
}

export interface ConstraintDoc {
  industry_set: string[];
  weighted_scores: [string, number][];
}

export interface RequestDoc {
  plan_index: number;
  target: string;
  kind: "add_as_supplier" | "add_as_customer" | "terminate";
  chosen: boolean;
  reason: string;
  extra_info: string;
}

export interface ReplyDoc {
  requester: string;
  direction: string;
  accepted: boolean;
  reason: string;
  synthetic: boolean;
}

export interface CandidateDoc {
  companyId: string;
  score: number;
}

export interface OutgoingGroup {
  planIndex: number;
  plan: PlanDoc;
  constraint: ConstraintDoc;
  candidates: CandidateDoc[];
  requests: RequestDoc[];
}

export interface IncomingEntry {
  requester: string;
  request: RequestDoc;
  reply: ReplyDoc | null;
}

export interface TargetRefDoc {
  kind: "plan" | "request" | "reply";
  companyId: string;
  planIndex?: number;
  requestTarget?: string;
  requester?: string;
  direction?: string;
}

export interface AdjustmentDoc {
  action: "negate" | "add" | "delete";
  target: TargetRefDoc;
  payload?: Record<string, unknown>;
  author?: string;
}

export interface AdjustmentView {
  companyId: string;
  knowledge: string;
  outgoing: OutgoingGroup[];
  incoming: IncomingEntry[];
  replies: ReplyDoc[];
  failedStages: string[];
  staged: Required<AdjustmentDoc>[];
}

// --- control panel ----------------------------------------------------------

export interface BoxDoc {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
}

export interface SelectionReportDoc {
  kinds: string[];
  folds: number;
  n_samples: Record<string, number>;
  box: Record<string, { error: BoxDoc; runtime: BoxDoc }>;
  skipped: Record<string, string>;
}

export interface CompanySeriesDoc {
  companyId: string;
  knowledge: string;
  features: Record<string, number[]>;
}

export interface ControlPanelView {
  config: SessionConfigDoc;
  metrics: string[];
  modelKinds: string[];
  policyKinds: string[];
  labels: string[];
  historyLength: number;
  globalKnowledge: string;
  selection: SelectionReportDoc;
  company: CompanySeriesDoc | null;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
