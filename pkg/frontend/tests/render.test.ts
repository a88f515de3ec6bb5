import { describe, expect, it } from "vitest";

import { buildControlScene, CONTROL_DEFAULTS } from "../src/control.js";
import { markToSvg, sceneToSvg } from "../src/render.js";
import { marksByClass } from "../src/scene.js";
import type { LineMark, PathMark, Scene } from "../src/scene.js";
import type { ControlPanelView } from "../src/types.js";
import controlFixture from "./fixtures/controlpanel.json";

const view = controlFixture as unknown as ControlPanelView;

describe("svg serialization", () => {
  it("renders each mark kind with its geometry and data attributes", () => {
    expect(
      markToSvg({
        kind: "circle",
        key: "k",
        cls: "berry supplier",
        cx: 10,
        cy: 20,
        r: 7,
        fill: "#fff",
        data: { companyId: "C1" },
      }),
    ).toBe(
      '<circle class="berry supplier" data-key="k" data-company-id="C1" cx="10" cy="20" r="7" fill="#fff"/>',
    );
    expect(
      markToSvg({
        kind: "line",
        key: "l",
        cls: "trail",
        x1: 0,
        y1: 1,
        x2: 2,
        y2: 3,
        stroke: "#000",
        dashed: true,
      }),
    ).toContain('stroke-dasharray="5 4"');
  });

  it("escapes text content and attribute values", () => {
    const svg = markToSvg({
      kind: "text",
      key: "t",
      cls: "label",
      x: 0,
      y: 0,
      text: 'Mills & Sons <"steel">',
      fill: "#000",
      fontSize: 10,
      anchor: "start",
    });
    expect(svg).toContain("Mills &amp; Sons &lt;&quot;steel&quot;&gt;");
    expect(svg).not.toContain("<\"");
  });

  it("wraps marks in a sized svg element", () => {
    const scene: Scene = {
      width: 300,
      height: 100,
      marks: [
        { kind: "rect", key: "r", cls: "frame", x: 0, y: 0, width: 10, height: 10, fill: "#eee" },
      ],
    };
    const svg = sceneToSvg(scene);
    expect(svg).toMatch(/^<svg xmlns="http:\/\/www\.w3\.org\/2000\/svg" viewBox="0 0 300 100"/);
    expect(svg).toContain('data-key="r"');
    expect(svg.trim().endsWith("</svg>")).toBe(true);
  });
});

describe("control panel scene", () => {
  const scene = buildControlScene(view);

  it("shows one error and one runtime box per surviving model kind", () => {
    const kinds = view.selection.kinds.filter((k) => k in view.selection.box);
    expect(kinds.length).toBeGreaterThan(0);
    const iqrs = scene.marks.filter((m) => m.cls.includes("iqr"));
    expect(iqrs.length).toBe(2 * kinds.length);
    for (const kind of kinds) {
      expect(scene.marks.some((m) => m.key === `box-error:${kind}:median`)).toBe(true);
      expect(scene.marks.some((m) => m.key === `box-runtime:${kind}:median`)).toBe(true);
    }
  });

  it("lists skipped model kinds with the server's reason", () => {
    for (const [kind, reason] of Object.entries(view.selection.skipped)) {
      const note = scene.marks.find((m) => m.key === `model-skipped:${kind}`);
      expect(note).toBeDefined();
      expect((note as { text: string }).text).toContain(reason);
    }
  });

  it("draws the firm's feature series split at the history boundary", () => {
    expect(view.company).not.toBeNull();
    const series = marksByClass(scene, "feature-series") as PathMark[];
    expect(series.length).toBe(Object.keys(view.company!.features).length);

    const nT = Math.max(...Object.values(view.company!.features).map((s) => s.length));
    for (const path of series) {
      expect(path.d.split("L").length).toBe(nT);
    }

    const split = scene.marks.find((m) => m.key === "history-split") as LineMark;
    expect(split).toBeDefined();
    expect(split.dashed).toBe(true);
    const chartX = CONTROL_DEFAULTS.pad + 4;
    const chartW = CONTROL_DEFAULTS.width - 2 * CONTROL_DEFAULTS.pad - 8;
    expect(split.x1).toBeCloseTo(
      chartX + ((view.historyLength - 1) / (nT - 1)) * chartW,
      6,
    );
  });

  it("points out when no firm is selected", () => {
    const empty = buildControlScene({ ...view, company: null });
    expect(empty.marks.some((m) => m.key === "company-empty")).toBe(true);
    expect(marksByClass(empty, "feature-series").length).toBe(0);
  });
});
