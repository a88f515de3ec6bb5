/**
 * Row model for the per-firm reasoning inspector: one section per plan
 * with its constraint, candidates and requests, then incoming requests
 * with the replies given. Rows that a staged adjustment touches carry
 * that action so the renderer can show pending edits before they are
 * applied server-side.
 */

import type {
  AdjustmentDoc,
  AdjustmentView,
  IncomingEntry,
  OutgoingGroup,
  TargetRefDoc,
} from "./types.js";

export type RowStaged = "none" | "negate" | "delete";

export interface InspectorRow {
  key: string;
  /** indent level, 0 = section heading */
  depth: number;
  text: string;
  detail: string;
  /** present when the row is an adjustable target */
  target?: TargetRefDoc;
  staged: RowStaged;
}

export interface InspectorSection {
  title: string;
  rows: InspectorRow[];
}

export interface InspectorModel {
  companyId: string;
  knowledge: string;
  failedStages: string[];
  sections: InspectorSection[];
  staged: AdjustmentDoc[];
  /** add-type staged adjustments, which have no existing row to land on */
  stagedAdds: AdjustmentDoc[];
}

export function targetsEqual(a: TargetRefDoc, b: TargetRefDoc): boolean {
  return (
    a.kind === b.kind &&
    a.companyId === b.companyId &&
    (a.planIndex ?? null) === (b.planIndex ?? null) &&
    (a.requestTarget ?? null) === (b.requestTarget ?? null) &&
    (a.requester ?? null) === (b.requester ?? null) &&
    (a.direction ?? null) === (b.direction ?? null)
  );
}

function stagedFor(target: TargetRefDoc, staged: readonly AdjustmentDoc[]): RowStaged {
  for (const doc of staged) {
    if (doc.action !== "add" && targetsEqual(doc.target, target)) {
      return doc.action;
    }
  }
  return "none";
}

function planRows(group: OutgoingGroup, view: AdjustmentView): InspectorRow[] {
  const cid = view.companyId;
  const rows: InspectorRow[] = [];
  const planTarget: TargetRefDoc = { kind: "plan", companyId: cid, planIndex: group.planIndex };
  rows.push({
    key: `plan:${group.planIndex}`,
    depth: 0,
    text: group.plan.description,
    detail: group.plan.reason,
    target: planTarget,
    staged: stagedFor(planTarget, view.staged),
  });

  const filters =
    group.constraint.industry_set.length > 0
      ? group.constraint.industry_set.join(", ")
      : "any industry";
  const weights = group.constraint.weighted_scores
    .map(([feature, weight]) => `${feature} x ${weight}`)
    .join(", ");
  rows.push({
    key: `constraint:${group.planIndex}`,
    depth: 1,
    text: `query: ${filters}`,
    detail: weights || "no weighted features",
    staged: "none",
  });
  for (const cand of group.candidates) {
    rows.push({
      key: `candidate:${group.planIndex}:${cand.companyId}`,
      depth: 2,
      text: cand.companyId,
      detail: `score ${cand.score.toFixed(4)}`,
      staged: "none",
    });
  }
  for (const req of group.requests) {
    const target: TargetRefDoc = {
      kind: "request",
      companyId: cid,
      requestTarget: req.target,
    };
    rows.push({
      key: `request:${group.planIndex}:${req.target}`,
      depth: 1,
      text: `${req.kind.replace(/_/g, " ")} -> ${req.target}${req.chosen ? "" : " (not sent)"}`,
      detail: req.reason,
      target,
      staged: stagedFor(target, view.staged),
    });
  }
  return rows;
}

function incomingRows(entry: IncomingEntry, view: AdjustmentView): InspectorRow[] {
  const rows: InspectorRow[] = [];
  rows.push({
    key: `incoming:${entry.requester}`,
    depth: 0,
    text: `${entry.requester}: ${entry.request.kind.replace(/_/g, " ")}`,
    detail: entry.request.extra_info || entry.request.reason,
    staged: "none",
  });
  if (entry.reply) {
    const target: TargetRefDoc = {
      kind: "reply",
      companyId: view.companyId,
      requester: entry.requester,
      direction: entry.reply.direction,
    };
    rows.push({
      key: `reply:${entry.requester}`,
      depth: 1,
      text: entry.reply.accepted ? "accepted" : "declined",
      detail: entry.reply.synthetic ? `${entry.reply.reason} (synthesized)` : entry.reply.reason,
      target,
      staged: stagedFor(target, view.staged),
    });
  }
  return rows;
}

export function buildInspectorModel(view: AdjustmentView): InspectorModel {
  const sections: InspectorSection[] = [];
  if (view.outgoing.length > 0) {
    sections.push({
      title: "plans and requests",
      rows: view.outgoing.flatMap((group) => planRows(group, view)),
    });
  }
  if (view.incoming.length > 0) {
    sections.push({
      title: "incoming requests",
      rows: view.incoming.flatMap((entry) => incomingRows(entry, view)),
    });
  }
  if (view.failedStages.length > 0) {
    sections.push({
      title: "failed stages",
      rows: view.failedStages.map((stage) => ({
        key: `failed:${stage}`,
        depth: 0,
        text: `${stage} failed; the firm sat this turn out`,
        detail: "",
        staged: "none" as const,
      })),
    });
  }
  return {
    companyId: view.companyId,
    knowledge: view.knowledge,
    failedStages: view.failedStages,
    sections,
    staged: view.staged,
    stagedAdds: view.staged.filter((doc) => doc.action === "add"),
  };
}

// --- staged-adjustment documents -------------------------------------------

export function negate(
  target: TargetRefDoc,
  payload: { note?: string; force?: boolean; accepted?: boolean } = {},
  author = "",
): AdjustmentDoc {
  return { action: "negate", target, payload, author };
}

export function remove(target: TargetRefDoc, author = ""): AdjustmentDoc {
  return { action: "delete", target, payload: {}, author };
}

export function addPlan(
  companyId: string,
  payload: {
    description: string;
    reason: string;
    seek_collaboration?: boolean;
    seek_suppliers?: boolean;
  },
  author = "",
): AdjustmentDoc {
  return { action: "add", target: { kind: "plan", companyId }, payload, author };
}

/** the new request's target and kind ride in the payload, per the server contract */
export function addRequest(
  companyId: string,
  requestTarget: string,
  kind: "add_as_supplier" | "add_as_customer" | "terminate",
  extra: { reason?: string; extra_info?: string; plan_index?: number } = {},
  author = "",
): AdjustmentDoc {
  return {
    action: "add",
    target: { kind: "request", companyId, requestTarget },
    payload: { target: requestTarget, kind, ...extra },
    author,
  };
}

export function describeAdjustment(doc: AdjustmentDoc): string {
  const t = doc.target;
  const what =
    t.kind === "plan"
      ? `plan ${t.planIndex ?? "new"} of ${t.companyId}`
      : t.kind === "request"
        ? `request ${t.companyId} -> ${t.requestTarget}`
        : `reply of ${t.companyId} to ${t.requester}`;
  return `${doc.action} ${what}`;
}
