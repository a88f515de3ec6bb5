/**
 * Global view: one scatter panel per timestamp, companies as dots at the
 * server-projected coordinates, supply edges drawn underneath.
 *
 * Every coordinate is a linear map of a payload field: the panel rect is
 * fixed by layout constants and a point lands at
 *   cx = panelX + point.x * innerWidth
 *   cy = panelY + (1 - point.y) * innerHeight   (payload y grows upward)
 */

import { industryColor } from "./colors.js";
import type { Mark, Scene } from "./scene.js";
import type { GlobalView } from "./types.js";

export interface GlobalOptions {
  panelWidth?: number;
  panelHeight?: number;
  gap?: number;
  margin?: number;
  /** company ids to emphasize and connect across panels */
  selection?: readonly string[];
}

export const GLOBAL_DEFAULTS = {
  panelWidth: 260,
  panelHeight: 220,
  gap: 18,
  margin: 12,
  labelBand: 22,
  pointRadius: 3.5,
  selectedRadius: 5.5,
};

export function buildGlobalScene(view: GlobalView, opts: GlobalOptions = {}): Scene {
  const panelWidth = opts.panelWidth ?? GLOBAL_DEFAULTS.panelWidth;
  const panelHeight = opts.panelHeight ?? GLOBAL_DEFAULTS.panelHeight;
  const gap = opts.gap ?? GLOBAL_DEFAULTS.gap;
  const margin = opts.margin ?? GLOBAL_DEFAULTS.margin;
  const selected = new Set(opts.selection ?? []);
  const industryOrder = [...new Set(Object.values(view.industries))].sort();

  const marks: Mark[] = [];
  // per-panel screen position of every company, for edges and trails
  const located: Map<string, { cx: number; cy: number }>[] = [];

  view.panels.forEach((panel, col) => {
    const px = margin + col * (panelWidth + gap);
    const py = margin;
    const innerY = py + GLOBAL_DEFAULTS.labelBand;
    const innerH = panelHeight - GLOBAL_DEFAULTS.labelBand;

    marks.push({
      kind: "rect",
      key: `frame:${panel.t}`,
      cls: panel.simulated ? "panel-frame simulated" : "panel-frame",
      x: px,
      y: innerY,
      width: panelWidth,
      height: innerH,
      fill: panel.simulated ? "#f3f7fb" : "#ffffff",
      stroke: panel.simulated ? "#4e79a7" : "#ced4da",
    });
    marks.push({
      kind: "text",
      key: `panel-label:${panel.t}`,
      cls: "panel-label",
      x: px + panelWidth / 2,
      y: py + 14,
      text: panel.simulated ? `${panel.label} (simulated)` : panel.label,
      fill: "#495057",
      fontSize: 12,
      anchor: "middle",
    });

    const at = new Map<string, { cx: number; cy: number }>();
    for (const point of panel.points) {
      at.set(point.companyId, {
        cx: px + point.x * panelWidth,
        cy: innerY + (1 - point.y) * innerH,
      });
    }
    located.push(at);

    for (const [supplier, customer] of panel.edges) {
      const a = at.get(supplier);
      const b = at.get(customer);
      if (!a || !b) continue;
      const hot = selected.has(supplier) || selected.has(customer);
      marks.push({
        kind: "line",
        key: `edge:${supplier}>${customer}:${panel.t}`,
        cls: hot ? "edge selected" : "edge",
        x1: a.cx,
        y1: a.cy,
        x2: b.cx,
        y2: b.cy,
        stroke: hot ? "#4e79a7" : "#dee2e6",
        strokeWidth: hot ? 1.6 : 0.8,
      });
    }

    for (const point of panel.points) {
      const pos = at.get(point.companyId)!;
      const hot = selected.has(point.companyId);
      marks.push({
        kind: "circle",
        key: `point:${point.companyId}:${panel.t}`,
        cls: hot ? "company-point selected" : "company-point",
        cx: pos.cx,
        cy: pos.cy,
        r: hot ? GLOBAL_DEFAULTS.selectedRadius : GLOBAL_DEFAULTS.pointRadius,
        fill: industryColor(view.industries[point.companyId] ?? "", industryOrder),
        stroke: hot ? "#212529" : "#ffffff",
        strokeWidth: hot ? 1.5 : 0.6,
        data: { company: point.companyId, t: String(panel.t) },
      });
    }
  });

  // dashed identity trails so a selected firm can be followed across time
  for (const companyId of selected) {
    for (let col = 0; col + 1 < view.panels.length; col += 1) {
      const a = located[col].get(companyId);
      const b = located[col + 1].get(companyId);
      if (!a || !b) continue;
      marks.push({
        kind: "line",
        key: `trail:${companyId}:${view.panels[col].t}`,
        cls: "trail",
        x1: a.cx,
        y1: a.cy,
        x2: b.cx,
        y2: b.cy,
        stroke: "#868e96",
        strokeWidth: 1,
        dashed: true,
      });
    }
  }

  if (view.degenerate) {
    marks.push({
      kind: "text",
      key: "degenerate-note",
      cls: "degenerate-note",
      x: margin,
      y: margin + panelHeight + 16,
      text: "projection is degenerate: identical feature rows, all positions zeroed",
      fill: "#e03131",
      fontSize: 11,
      anchor: "start",
    });
  }

  const n = Math.max(1, view.panels.length);
  return {
    width: 2 * margin + n * panelWidth + (n - 1) * gap,
    height: 2 * margin + panelHeight + (view.degenerate ? 22 : 0),
    marks,
  };
}
