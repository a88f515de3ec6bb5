import { describe, expect, it } from "vitest";

import { buildGlobalScene, GLOBAL_DEFAULTS } from "../src/global.js";
import { marksByClass } from "../src/scene.js";
import type { CircleMark, LineMark } from "../src/scene.js";
import type { GlobalView } from "../src/types.js";
import globalFixture from "./fixtures/global.json";

const view = globalFixture as unknown as GlobalView;

describe("global view scene", () => {
  it("draws exactly one mark per company and timestamp", () => {
    const companies = new Set(
      view.panels.flatMap((panel) => panel.points.map((p) => p.companyId)),
    );
    expect(companies.size).toBe(35);
    expect(view.panels.length).toBe(8);

    const scene = buildGlobalScene(view);
    const points = marksByClass(scene, "company-point");
    expect(points.length).toBe(companies.size * view.panels.length);
    expect(points.length).toBe(280);

    // no duplicates hiding behind the count
    const keys = new Set(points.map((m) => m.key));
    expect(keys.size).toBe(points.length);
  });

  it("maps every coordinate linearly from the payload", () => {
    const scene = buildGlobalScene(view);
    const D = GLOBAL_DEFAULTS;
    const byKey = new Map(scene.marks.map((m) => [m.key, m]));

    view.panels.forEach((panel, col) => {
      const px = D.margin + col * (D.panelWidth + D.gap);
      const innerY = D.margin + D.labelBand;
      const innerH = D.panelHeight - D.labelBand;
      for (const point of panel.points) {
        const mark = byKey.get(`point:${point.companyId}:${panel.t}`) as CircleMark;
        expect(mark).toBeDefined();
        expect(mark.cx).toBeCloseTo(px + point.x * D.panelWidth, 9);
        expect(mark.cy).toBeCloseTo(innerY + (1 - point.y) * innerH, 9);
      }
    });
  });

  it("draws the payload edges between the projected endpoints", () => {
    const scene = buildGlobalScene(view);
    const byKey = new Map(scene.marks.map((m) => [m.key, m]));
    for (const panel of view.panels) {
      for (const [supplier, customer] of panel.edges) {
        const edge = byKey.get(`edge:${supplier}>${customer}:${panel.t}`) as LineMark;
        const a = byKey.get(`point:${supplier}:${panel.t}`) as CircleMark;
        const b = byKey.get(`point:${customer}:${panel.t}`) as CircleMark;
        expect(edge).toBeDefined();
        expect(edge.x1).toBe(a.cx);
        expect(edge.y1).toBe(a.cy);
        expect(edge.x2).toBe(b.cx);
        expect(edge.y2).toBe(b.cy);
      }
    }
  });

  it("marks simulated panels apart from historical ones", () => {
    // the fixture is all history; which panels are simulated is the
    // server's call, so flip the flag locally to probe the rendering
    const mixed: GlobalView = {
      ...view,
      panels: view.panels.map((p, i) =>
        i >= view.panels.length - 2 ? { ...p, simulated: true } : p,
      ),
    };
    const scene = buildGlobalScene(mixed);
    const frames = marksByClass(scene, "simulated");
    expect(frames.map((m) => m.key).sort()).toEqual(
      mixed.panels.filter((p) => p.simulated).map((p) => `frame:${p.t}`).sort(),
    );
    const labels = scene.marks.filter(
      (m) => m.kind === "text" && m.cls === "panel-label" && m.text.includes("simulated"),
    );
    expect(labels.length).toBe(2);
  });

  it("selection adds trails and emphasis without touching other marks", () => {
    const cid = view.panels[0].points[0].companyId;
    const plain = buildGlobalScene(view);
    const picked = buildGlobalScene(view, { selection: [cid] });

    const trails = marksByClass(picked, "trail");
    expect(trails.length).toBe(view.panels.length - 1);
    expect(marksByClass(plain, "trail").length).toBe(0);

    const selected = marksByClass(picked, "company-point").filter((m) =>
      m.cls.includes("selected"),
    );
    expect(selected.map((m) => m.key)).toEqual(
      view.panels.map((p) => `point:${cid}:${p.t}`),
    );

    // emphasis must not move anyone
    for (const mark of marksByClass(picked, "company-point")) {
      const twin = plain.marks.find((m) => m.key === mark.key) as CircleMark;
      expect((mark as CircleMark).cx).toBe(twin.cx);
      expect((mark as CircleMark).cy).toBe(twin.cy);
    }
  });

  it("is a pure function of payload and options", () => {
    const before = JSON.stringify(view);
    const a = buildGlobalScene(view, { selection: ["C1047"] });
    const b = buildGlobalScene(view, { selection: ["C1047"] });
    expect(JSON.stringify(view)).toBe(before);
    expect(b).toEqual(a);
  });
});
