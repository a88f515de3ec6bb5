/**
 * Path view: the session tree with timestamps as columns. Nodes keep the
 * server-reported status (Historical, Simulated, Active); the active node
 * gets a halo, staged-but-unapplied work an orange badge, and adjusted
 * siblings a dashed provenance link back to the node they branched from.
 */

import { STAGED, STATUS_COLOR } from "./colors.js";
import { bowedPath } from "./scene.js";
import type { Mark, Scene } from "./scene.js";
import type { TreeDoc, TreeNode } from "./types.js";

export const PATH_DEFAULTS = {
  colStep: 96,
  rowStep: 56,
  marginX: 46,
  marginY: 36,
  nodeRadius: 13,
  badgeRadius: 4.5,
};

/** depth-first rows: leaves claim successive rows, parents center on children */
export function assignRows(tree: TreeDoc): Map<string, number> {
  const children = new Map<string, TreeNode[]>();
  const roots: TreeNode[] = [];
  for (const node of tree.nodes) {
    if (node.parent === null) {
      roots.push(node);
    } else {
      const sibs = children.get(node.parent) ?? [];
      sibs.push(node);
      children.set(node.parent, sibs);
    }
  }
  const rows = new Map<string, number>();
  let next = 0;
  const place = (node: TreeNode): number => {
    const kids = children.get(node.nodeId) ?? [];
    if (kids.length === 0) {
      rows.set(node.nodeId, next);
      next += 1;
      return rows.get(node.nodeId)!;
    }
    const placed = kids.map(place);
    const row = (placed[0] + placed[placed.length - 1]) / 2;
    rows.set(node.nodeId, row);
    return row;
  };
  roots.forEach(place);
  return rows;
}

export function buildPathScene(tree: TreeDoc): Scene {
  const C = PATH_DEFAULTS;
  const rows = assignRows(tree);
  const byId = new Map(tree.nodes.map((n) => [n.nodeId, n]));
  const x = (node: TreeNode) => C.marginX + node.t * C.colStep;
  const y = (node: TreeNode) => C.marginY + (rows.get(node.nodeId) ?? 0) * C.rowStep;

  const marks: Mark[] = [];

  for (const node of tree.nodes) {
    const parent = node.parent === null ? undefined : byId.get(node.parent);
    if (parent) {
      marks.push({
        kind: "line",
        key: `link:${parent.nodeId}>${node.nodeId}`,
        cls: "tree-link",
        x1: x(parent) + C.nodeRadius,
        y1: y(parent),
        x2: x(node) - C.nodeRadius,
        y2: y(node),
        stroke: "#adb5bd",
        strokeWidth: 1.4,
      });
    }
    if (node.adjustedFrom !== null) {
      const origin = byId.get(node.adjustedFrom);
      if (origin) {
        marks.push({
          kind: "path",
          key: `adjusted:${node.adjustedFrom}>${node.nodeId}`,
          cls: "adjusted-link",
          d: bowedPath(x(origin), y(origin) + C.nodeRadius, x(node), y(node) - C.nodeRadius, 18),
          fill: "none",
          stroke: STAGED,
          strokeWidth: 1.2,
          dashed: true,
        });
      }
    }
  }

  for (const node of tree.nodes) {
    const cx = x(node);
    const cy = y(node);
    const active = node.nodeId === tree.active;
    if (active) {
      marks.push({
        kind: "circle",
        key: `halo:${node.nodeId}`,
        cls: "active-halo",
        cx,
        cy,
        r: C.nodeRadius + 4,
        fill: "none",
        stroke: STATUS_COLOR.Active,
        strokeWidth: 2,
      });
    }
    marks.push({
      kind: "circle",
      key: `node:${node.nodeId}`,
      cls: `tree-node status-${node.status.toLowerCase()}${active ? " active" : ""}`,
      cx,
      cy,
      r: C.nodeRadius,
      fill: STATUS_COLOR[node.status],
      stroke: "#ffffff",
      strokeWidth: 1.5,
      data: {
        node: node.nodeId,
        t: String(node.t),
        status: node.status,
        run: node.runId ?? "",
      },
    });
    marks.push({
      kind: "text",
      key: `node-label:${node.nodeId}`,
      cls: "tree-node-label",
      x: cx,
      y: cy + C.nodeRadius + 14,
      text: node.label,
      fill: "#495057",
      fontSize: 10,
      anchor: "middle",
    });
    if (node.hasStaged) {
      marks.push({
        kind: "circle",
        key: `staged-badge:${node.nodeId}`,
        cls: "staged-badge",
        cx: cx + C.nodeRadius - 2,
        cy: cy - C.nodeRadius + 2,
        r: C.badgeRadius,
        fill: STAGED,
        stroke: "#ffffff",
        strokeWidth: 1,
      });
    }
  }

  const maxT = Math.max(0, ...tree.nodes.map((n) => n.t));
  const maxRow = Math.max(0, ...tree.nodes.map((n) => rows.get(n.nodeId) ?? 0));
  return {
    width: 2 * C.marginX + maxT * C.colStep,
    height: 2 * C.marginY + maxRow * C.rowStep + 20,
    marks,
  };
}
