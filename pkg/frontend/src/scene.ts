/**
 * Renderer-agnostic scene graph.
 *
 * View builders turn server payloads into flat mark lists with absolute
 * pixel coordinates; render.ts serializes marks to SVG. Keeping the two
 * apart lets the test suite assert on geometry without a DOM.
 */

export interface BaseMark {
  /** stable identity for hit testing and tests, e.g. "point:C1047:4" */
  key: string;
  /** css class hook; renderer copies it onto the SVG element */
  cls: string;
  /** free-form payload echoed into data-* attributes */
  data?: Record<string, string>;
}

export interface CircleMark extends BaseMark {
  kind: "circle";
  cx: number;
  cy: number;
  r: number;
  fill: string;
  stroke?: string;
  strokeWidth?: number;
  dashed?: boolean;
}

export interface LineMark extends BaseMark {
  kind: "line";
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  stroke: string;
  strokeWidth?: number;
  dashed?: boolean;
}

export interface RectMark extends BaseMark {
  kind: "rect";
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
  stroke?: string;
  rx?: number;
}

export interface TextMark extends BaseMark {
  kind: "text";
  x: number;
  y: number;
  text: string;
  fill: string;
  fontSize: number;
  anchor: "start" | "middle" | "end";
}

export interface PathMark extends BaseMark {
  kind: "path";
  d: string;
  fill: string;
  stroke?: string;
  strokeWidth?: number;
  dashed?: boolean;
}

export type Mark = CircleMark | LineMark | RectMark | TextMark | PathMark;

export interface Scene {
  width: number;
  height: number;
  marks: Mark[];
}

export function marksByClass(scene: Scene, cls: string): Mark[] {
  return scene.marks.filter((m) => m.cls.split(" ").includes(cls));
}

export function markByKey(scene: Scene, key: string): Mark | undefined {
  return scene.marks.find((m) => m.key === key);
}

/** d attribute for a circular arc sector (annulus slice), angles in radians. */
export function sectorPath(
  cx: number,
  cy: number,
  rInner: number,
  rOuter: number,
  a0: number,
  a1: number,
): string {
  const p = (r: number, a: number) =>
    `${(cx + r * Math.cos(a)).toFixed(3)},${(cy + r * Math.sin(a)).toFixed(3)}`;
  const large = a1 - a0 > Math.PI ? 1 : 0;
  return [
    `M${p(rOuter, a0)}`,
    `A${rOuter.toFixed(3)},${rOuter.toFixed(3)} 0 ${large} 1 ${p(rOuter, a1)}`,
    `L${p(rInner, a1)}`,
    `A${rInner.toFixed(3)},${rInner.toFixed(3)} 0 ${large} 0 ${p(rInner, a0)}`,
    "Z",
  ].join(" ");
}

/** quadratic bezier between two points, bowed sideways by `bend` pixels. */
export function bowedPath(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  bend: number,
): string {
  const mx = (x1 + x2) / 2;
  const my = (y1 + y2) / 2;
  const dx = x2 - x1;
  const dy = y2 - y1;
  const len = Math.hypot(dx, dy) || 1;
  // unit normal, pointing left of travel direction
  const nx = -dy / len;
  const ny = dx / len;
  const qx = mx + nx * bend;
  const qy = my + ny * bend;
  return `M${x1.toFixed(3)},${y1.toFixed(3)} Q${qx.toFixed(3)},${qy.toFixed(3)} ${x2.toFixed(3)},${y2.toFixed(3)}`;
}
