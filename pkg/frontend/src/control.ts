/**
 * Control panel scene: session configuration, the model-selection report
 * as box glyphs, and the selected firm's feature series with the
 * history/forecast boundary marked. Feature values live on the fixed
 * 0..100 scale, so the chart needs no data-driven axis.
 */

import { CATEGORICAL } from "./colors.js";
import type { Mark, Scene } from "./scene.js";
import type { BoxDoc, ControlPanelView } from "./types.js";

export const CONTROL_DEFAULTS = {
  width: 560,
  pad: 14,
  lineHeight: 18,
  boxRowHeight: 26,
  boxGlyphWidth: 170,
  chartHeight: 150,
  chartTopGap: 26,
};

function configLines(view: ControlPanelView): string[] {
  const c = view.config;
  return [
    `metric ${c.performanceMetric} | policy ${c.agentPolicyKind}`,
    `explain ${c.explainModelKind} | horizon ${c.horizonModelKind}` +
      (c.lam === null ? "" : ` (lam ${c.lam})`),
    `reference ${c.referenceLength} | turns ${c.simulationTurns} | k ${c.candidateK} | seed ${c.seed}`,
  ];
}

function boxGlyph(
  marks: Mark[],
  keyBase: string,
  cls: string,
  box: BoxDoc,
  x0: number,
  cy: number,
  width: number,
  lo: number,
  hi: number,
): void {
  const span = hi > lo ? hi - lo : 1;
  const sx = (v: number) => x0 + ((v - lo) / span) * width;
  marks.push({
    kind: "line",
    key: `${keyBase}:whisker`,
    cls: `${cls} whisker`,
    x1: sx(box.min),
    y1: cy,
    x2: sx(box.max),
    y2: cy,
    stroke: "#868e96",
    strokeWidth: 1,
  });
  marks.push({
    kind: "rect",
    key: `${keyBase}:iqr`,
    cls: `${cls} iqr`,
    x: sx(box.q1),
    y: cy - 6,
    width: Math.max(1, sx(box.q3) - sx(box.q1)),
    height: 12,
    fill: "#dbe4ee",
    stroke: "#4e79a7",
  });
  marks.push({
    kind: "line",
    key: `${keyBase}:median`,
    cls: `${cls} median`,
    x1: sx(box.median),
    y1: cy - 6,
    x2: sx(box.median),
    y2: cy + 6,
    stroke: "#1c3d5a",
    strokeWidth: 1.6,
  });
}

export function buildControlScene(view: ControlPanelView): Scene {
  const C = CONTROL_DEFAULTS;
  const marks: Mark[] = [];
  let y = C.pad + 4;

  marks.push({
    kind: "text",
    key: "config-title",
    cls: "section-title",
    x: C.pad,
    y,
    text: "session",
    fill: "#212529",
    fontSize: 13,
    anchor: "start",
  });
  y += C.lineHeight;
  for (const [i, line] of configLines(view).entries()) {
    marks.push({
      kind: "text",
      key: `config-line:${i}`,
      cls: "config-line",
      x: C.pad,
      y,
      text: line,
      fill: "#495057",
      fontSize: 11,
      anchor: "start",
    });
    y += C.lineHeight - 3;
  }

  y += 10;
  marks.push({
    kind: "text",
    key: "selection-title",
    cls: "section-title",
    x: C.pad,
    y,
    text: `model selection (${view.selection.folds} folds)`,
    fill: "#212529",
    fontSize: 13,
    anchor: "start",
  });
  y += C.lineHeight;

  const boxes = view.selection.box;
  const kinds = view.selection.kinds.filter((k) => k in boxes);
  const all = (pick: (b: { error: BoxDoc; runtime: BoxDoc }) => BoxDoc) =>
    kinds.map((k) => pick(boxes[k]));
  const domain = (docs: BoxDoc[]): [number, number] => [
    Math.min(0, ...docs.map((b) => b.min)),
    Math.max(1e-9, ...docs.map((b) => b.max)),
  ];
  const [errLo, errHi] = domain(all((b) => b.error));
  const [runLo, runHi] = domain(all((b) => b.runtime));
  const glyphX = C.pad + 74;

  for (const kind of kinds) {
    const cy = y + C.boxRowHeight / 2 - 6;
    marks.push({
      kind: "text",
      key: `model-label:${kind}`,
      cls: "model-label",
      x: C.pad,
      y: cy + 4,
      text: kind,
      fill: "#343a40",
      fontSize: 11,
      anchor: "start",
    });
    boxGlyph(marks, `box-error:${kind}`, "box-error", boxes[kind].error, glyphX, cy, C.boxGlyphWidth, errLo, errHi);
    boxGlyph(
      marks,
      `box-runtime:${kind}`,
      "box-runtime",
      boxes[kind].runtime,
      glyphX + C.boxGlyphWidth + 24,
      cy,
      C.boxGlyphWidth,
      runLo,
      runHi,
    );
    y += C.boxRowHeight;
  }
  for (const [kind, reason] of Object.entries(view.selection.skipped)) {
    marks.push({
      kind: "text",
      key: `model-skipped:${kind}`,
      cls: "model-skipped",
      x: C.pad,
      y: y + 8,
      text: `${kind}: ${reason}`,
      fill: "#adb5bd",
      fontSize: 10,
      anchor: "start",
    });
    y += C.lineHeight - 2;
  }

  y += C.chartTopGap;
  if (view.company) {
    const names = Object.keys(view.company.features).sort();
    const chartX = C.pad + 4;
    const chartW = C.width - 2 * C.pad - 8;
    const chartY = y + 8;

    marks.push({
      kind: "text",
      key: "company-title",
      cls: "section-title",
      x: C.pad,
      y,
      text: `${view.company.companyId} features`,
      fill: "#212529",
      fontSize: 13,
      anchor: "start",
    });
    marks.push({
      kind: "rect",
      key: "chart-frame",
      cls: "chart-frame",
      x: chartX,
      y: chartY,
      width: chartW,
      height: C.chartHeight,
      fill: "#f8f9fa",
      stroke: "#dee2e6",
    });

    const nT = Math.max(2, ...names.map((n) => view.company!.features[n].length));
    const px = (t: number) => chartX + (t / (nT - 1)) * chartW;
    const py = (v: number) => chartY + C.chartHeight - (v / 100) * C.chartHeight;

    // everything right of this line is forecast, not history
    const splitT = view.historyLength - 1;
    if (splitT >= 0 && splitT < nT) {
      marks.push({
        kind: "line",
        key: "history-split",
        cls: "history-split",
        x1: px(splitT),
        y1: chartY,
        x2: px(splitT),
        y2: chartY + C.chartHeight,
        stroke: "#868e96",
        strokeWidth: 1,
        dashed: true,
      });
    }

    names.forEach((name, i) => {
      const series = view.company!.features[name];
      const d = series
        .map((v, t) => `${t === 0 ? "M" : "L"}${px(t).toFixed(3)},${py(v).toFixed(3)}`)
        .join(" ");
      marks.push({
        kind: "path",
        key: `feature-series:${name}`,
        cls: "feature-series",
        d,
        fill: "none",
        stroke: CATEGORICAL[i % CATEGORICAL.length],
        strokeWidth: 1.6,
        data: { feature: name },
      });
      marks.push({
        kind: "text",
        key: `feature-legend:${name}`,
        cls: "feature-legend",
        x: chartX + 8 + i * 110,
        y: chartY + C.chartHeight + 16,
        text: name,
        fill: CATEGORICAL[i % CATEGORICAL.length],
        fontSize: 10,
        anchor: "start",
      });
    });
    y = chartY + C.chartHeight + 34;
  } else {
    marks.push({
      kind: "text",
      key: "company-empty",
      cls: "company-empty",
      x: C.pad,
      y,
      text: "select a firm to see its feature series",
      fill: "#868e96",
      fontSize: 11,
      anchor: "start",
    });
    y += C.lineHeight;
  }

  return { width: C.width, height: y + C.pad, marks };
}
