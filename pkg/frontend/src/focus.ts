/**
 * Focus view: one berry-orchard panel per (focal firm, timestamp), firms
 * as rows and timestamps as columns. All geometry is a linear map of
 * payload numbers; nothing is computed from raw data on this side.
 *
 * Panel-local mapping, for a panel at origin (ox, oy) with width W and
 * height H and the constants in FOCUS_DEFAULTS:
 *
 *   focal center   cx = ox + focal.xPosition * W
 *                  cy = oy + topPad + roseInner + roseSpan
 *   feature arc i of k (names sorted): equal sectors starting at twelve
 *                  o'clock, outer radius roseInner + value * roseSpan
 *   core radius    3 + performanceRadius * (roseInner - 3)
 *
 *   supplier region  [ox + sidePad, ox + W/2 - centerGap/2]
 *   customer region  [ox + W/2 + centerGap/2, ox + W - sidePad]
 *   group slice      region split evenly, payload order preserved
 *
 *   soil rect      x = sliceX0 + soilPad, width = sliceW - 2 * soilPad
 *                  y = oy + H - soilHeight, height = soilHeight
 *   berry center   cx = sliceCenter + sideSign * horizontal * halfSpan
 *                      halfSpan = sliceW / 2 - berryRadius - 2
 *                      sideSign = +1 suppliers, -1 customers
 *                      (so horizontal = +1 always leans toward the focal)
 *                  cy = berryBase - vertical * berrySpan
 *                      berryBase = oy + H - soilHeight - berryGap
 *                      berrySpan = H - topPad - focalHeadroom
 *                                    - soilHeight - berryGap
 */

import { berryColor, FOCAL_FILL, SHARED_SUPPLIER, soilColor, lerpColor } from "./colors.js";
import { bowedPath, sectorPath } from "./scene.js";
import type { Mark, Scene } from "./scene.js";
import type { BerryGroup, FocusPanel, FocusView } from "./types.js";

export interface FocusOptions {
  panelWidth?: number;
  panelHeight?: number;
}

export const FOCUS_DEFAULTS = {
  panelWidth: 460,
  panelHeight: 240,
  gapX: 28,
  gapY: 30,
  marginLeft: 90,
  marginTop: 34,
  marginRight: 12,
  marginBottom: 12,
  topPad: 28,
  focalHeadroom: 40,
  soilHeight: 12,
  soilPad: 3,
  berryGap: 10,
  berryRadius: 7,
  centerGap: 90,
  sidePad: 8,
  roseInner: 10,
  roseSpan: 26,
  arcGap: 0.05,
  linkBend: 26,
};

export function buildFocusScene(view: FocusView, opts: FocusOptions = {}): Scene {
  const C = FOCUS_DEFAULTS;
  const W = opts.panelWidth ?? C.panelWidth;
  const H = opts.panelHeight ?? C.panelHeight;

  const cols: number[] = [];
  const rows: string[] = [];
  for (const panel of view.panels) {
    if (!cols.includes(panel.t)) cols.push(panel.t);
    if (!rows.includes(panel.companyId)) rows.push(panel.companyId);
  }

  const originX = (t: number) => C.marginLeft + cols.indexOf(t) * (W + C.gapX);
  const originY = (cid: string) => C.marginTop + rows.indexOf(cid) * (H + C.gapY);

  const marks: Mark[] = [];
  const berryAt = new Map<string, { cx: number; cy: number }>();

  for (const t of cols) {
    const panel = view.panels.find((p) => p.t === t)!;
    marks.push({
      kind: "text",
      key: `col-label:${t}`,
      cls: "col-label",
      x: originX(t) + W / 2,
      y: C.marginTop - 12,
      text: panel.label,
      fill: "#495057",
      fontSize: 12,
      anchor: "middle",
    });
  }
  for (const cid of rows) {
    marks.push({
      kind: "text",
      key: `row-label:${cid}`,
      cls: "row-label",
      x: C.marginLeft - 10,
      y: originY(cid) + H / 2,
      text: cid,
      fill: "#495057",
      fontSize: 12,
      anchor: "end",
    });
  }

  for (const panel of view.panels) {
    renderPanel(panel, originX(panel.t), originY(panel.companyId), W, H, marks, berryAt);
  }

  for (const link of view.sharedSupplierLinks) {
    const a = berryAt.get(`berry:${link.focalA}:${link.t}:${link.supplierId}`);
    const b = berryAt.get(`berry:${link.focalB}:${link.t}:${link.supplierId}`);
    if (!a || !b) continue;
    marks.push({
      kind: "path",
      key: `shared:${link.t}:${link.focalA}:${link.focalB}:${link.supplierId}`,
      cls: "shared-supplier",
      d: bowedPath(a.cx, a.cy, b.cx, b.cy, C.linkBend),
      fill: "none",
      stroke: SHARED_SUPPLIER,
      strokeWidth: 1.4,
      dashed: true,
      data: { supplier: link.supplierId, t: String(link.t) },
    });
  }

  return {
    width:
      C.marginLeft + cols.length * W + Math.max(0, cols.length - 1) * C.gapX + C.marginRight,
    height:
      C.marginTop + rows.length * H + Math.max(0, rows.length - 1) * C.gapY + C.marginBottom,
    marks,
  };
}

function renderPanel(
  panel: FocusPanel,
  ox: number,
  oy: number,
  W: number,
  H: number,
  marks: Mark[],
  berryAt: Map<string, { cx: number; cy: number }>,
): void {
  const key = `${panel.companyId}:${panel.t}`;

  marks.push({
    kind: "rect",
    key: `focus-frame:${key}`,
    cls: "focus-frame",
    x: ox,
    y: oy,
    width: W,
    height: H,
    fill: "#ffffff",
    stroke: "#dee2e6",
    rx: 6,
  });
  marks.push({
    kind: "text",
    key: `focus-label:${key}`,
    cls: "focus-panel-label",
    x: ox + 10,
    y: oy + 17,
    text: `${panel.companyId} — ${panel.label}`,
    fill: "#343a40",
    fontSize: 12,
    anchor: "start",
  });
  if (panel.missingAttribution) {
    marks.push({
      kind: "text",
      key: `missing-badge:${key}`,
      cls: "missing-badge",
      x: ox + W - 10,
      y: oy + 17,
      text: "no attribution model",
      fill: "#e03131",
      fontSize: 11,
      anchor: "end",
    });
  }

  renderSide(panel.supplierGroups, +1, panel, ox, oy, W, H, marks, berryAt);
  renderSide(panel.customerGroups, -1, panel, ox, oy, W, H, marks, berryAt);
  renderFocal(panel, ox, oy, W, marks);
}

function renderSide(
  groups: readonly BerryGroup[],
  sideSign: 1 | -1,
  panel: FocusPanel,
  ox: number,
  oy: number,
  W: number,
  H: number,
  marks: Mark[],
  berryAt: Map<string, { cx: number; cy: number }>,
): void {
  const C = FOCUS_DEFAULTS;
  if (groups.length === 0) return;
  const regionX0 = sideSign > 0 ? ox + C.sidePad : ox + W / 2 + C.centerGap / 2;
  const regionX1 = sideSign > 0 ? ox + W / 2 - C.centerGap / 2 : ox + W - C.sidePad;
  const sliceW = (regionX1 - regionX0) / groups.length;
  const groundY = oy + H - C.soilHeight;
  const berryBase = groundY - C.berryGap;
  const berrySpan = H - C.topPad - C.focalHeadroom - C.soilHeight - C.berryGap;

  groups.forEach((group, gi) => {
    const sliceX0 = regionX0 + gi * sliceW;
    const gkey = `${panel.companyId}:${panel.t}:${group.side}:${group.industry}`;

    marks.push({
      kind: "rect",
      key: `soil:${gkey}`,
      cls: `soil ${group.side}`,
      x: sliceX0 + C.soilPad,
      y: groundY,
      width: sliceW - 2 * C.soilPad,
      height: C.soilHeight,
      fill: soilColor(group.soil.meanPerformance),
      stroke: lerpColor("#ced4da", "#495057", Math.min(1, Math.abs(group.soil.magnitude))),
      data: {
        industry: group.industry,
        meanPerformance: String(group.soil.meanPerformance),
        focalContribution: String(group.soil.focalContribution),
        magnitude: String(group.soil.magnitude),
      },
    });
    marks.push({
      kind: "text",
      key: `soil-label:${gkey}`,
      cls: "soil-label",
      x: sliceX0 + sliceW / 2,
      y: groundY + C.soilHeight - 2,
      text: group.industry,
      fill: "#495057",
      fontSize: 9,
      anchor: "middle",
    });

    const center = sliceX0 + sliceW / 2;
    const halfSpan = sliceW / 2 - C.berryRadius - 2;
    for (const berry of group.berries) {
      const cx = center + sideSign * berry.horizontal * halfSpan;
      const cy = berryBase - berry.vertical * berrySpan;
      const color = berryColor(group.side as "supplier" | "customer", berry.lifecycle);
      const id = `berry:${panel.companyId}:${panel.t}:${berry.companyId}`;
      berryAt.set(id, { cx, cy });
      marks.push({
        kind: "circle",
        key: id,
        cls: berry.missingAttribution
          ? `berry ${group.side} ${berry.lifecycle} missing`
          : `berry ${group.side} ${berry.lifecycle}`,
        cx,
        cy,
        r: C.berryRadius,
        // hollow when no attribution backs the offset
        fill: berry.missingAttribution ? "none" : color,
        stroke: berry.missingAttribution ? color : "#ffffff",
        strokeWidth: berry.missingAttribution ? 1.8 : 1,
        data: {
          company: berry.companyId,
          vertical: String(berry.vertical),
          horizontal: String(berry.horizontal),
          lifecycle: berry.lifecycle,
        },
      });
    }
  });
}

function renderFocal(panel: FocusPanel, ox: number, oy: number, W: number, marks: Mark[]): void {
  const C = FOCUS_DEFAULTS;
  const cx = ox + panel.focal.xPosition * W;
  const cy = oy + C.topPad + C.roseInner + C.roseSpan;
  const key = `${panel.companyId}:${panel.t}`;
  const names = Object.keys(panel.focal.featureArcs).sort();
  const step = (2 * Math.PI) / Math.max(1, names.length);

  names.forEach((name, i) => {
    const a0 = -Math.PI / 2 + i * step + C.arcGap / 2;
    const a1 = -Math.PI / 2 + (i + 1) * step - C.arcGap / 2;
    const value = panel.focal.featureArcs[name];
    marks.push({
      kind: "path",
      key: `feature-arc:${key}:${name}`,
      cls: "feature-arc",
      d: sectorPath(cx, cy, C.roseInner, C.roseInner + value * C.roseSpan, a0, a1),
      fill: FOCAL_FILL,
      stroke: "#ffffff",
      strokeWidth: 0.8,
      data: { feature: name, value: String(value) },
    });
  });

  marks.push({
    kind: "circle",
    key: `focal-ring:${key}`,
    cls: "focal-ring",
    cx,
    cy,
    r: C.roseInner,
    fill: "#ffffff",
    stroke: "#adb5bd",
    strokeWidth: 0.8,
  });
  marks.push({
    kind: "circle",
    key: `focal-core:${key}`,
    cls: "focal-core",
    cx,
    cy,
    r: 3 + panel.focal.performanceRadius * (C.roseInner - 3),
    fill: FOCAL_FILL,
    data: {
      company: panel.companyId,
      performanceRadius: String(panel.focal.performanceRadius),
      xPosition: String(panel.focal.xPosition),
    },
  });
}
