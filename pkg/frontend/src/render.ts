/**
 * Scene serialization. Marks become SVG markup via plain string
 * building, so rendering stays testable without a browser; mount()
 * is the only DOM touch point.
 */

import type { Mark, Scene } from "./scene.js";

const DASH = "5 4";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attrs(pairs: Record<string, string | number | undefined>): string {
  return Object.entries(pairs)
    .filter(([, value]) => value !== undefined && value !== "")
    .map(([name, value]) => `${name}="${esc(String(value))}"`)
    .join(" ");
}

function dataAttrs(mark: Mark): Record<string, string> {
  const out: Record<string, string> = {};
  for (const [name, value] of Object.entries(mark.data ?? {})) {
    out[`data-${name.replace(/[A-Z]/g, (c) => `-${c.toLowerCase()}`)}`] = value;
  }
  return out;
}

export function markToSvg(mark: Mark): string {
  const common = {
    class: mark.cls,
    "data-key": mark.key,
    ...dataAttrs(mark),
  };
  switch (mark.kind) {
    case "circle":
      return `<circle ${attrs({
        ...common,
        cx: mark.cx,
        cy: mark.cy,
        r: mark.r,
        fill: mark.fill,
        stroke: mark.stroke,
        "stroke-width": mark.strokeWidth,
        "stroke-dasharray": mark.dashed ? DASH : undefined,
      })}/>`;
    case "line":
      return `<line ${attrs({
        ...common,
        x1: mark.x1,
        y1: mark.y1,
        x2: mark.x2,
        y2: mark.y2,
        stroke: mark.stroke,
        "stroke-width": mark.strokeWidth,
        "stroke-dasharray": mark.dashed ? DASH : undefined,
      })}/>`;
    case "rect":
      return `<rect ${attrs({
        ...common,
        x: mark.x,
        y: mark.y,
        width: mark.width,
        height: mark.height,
        fill: mark.fill,
        stroke: mark.stroke,
        rx: mark.rx,
      })}/>`;
    case "text":
      return `<text ${attrs({
        ...common,
        x: mark.x,
        y: mark.y,
        fill: mark.fill,
        "font-size": mark.fontSize,
        "text-anchor": mark.anchor,
      })}>${esc(mark.text)}</text>`;
    case "path":
      return `<path ${attrs({
        ...common,
        d: mark.d,
        fill: mark.fill,
        stroke: mark.stroke,
        "stroke-width": mark.strokeWidth,
        "stroke-dasharray": mark.dashed ? DASH : undefined,
      })}/>`;
  }
}

export function sceneToSvg(scene: Scene): string {
  const body = scene.marks.map(markToSvg).join("\n  ");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${scene.width} ${scene.height}" ` +
    `width="${scene.width}" height="${scene.height}">\n  ${body}\n</svg>`
  );
}

/** replace `el`'s content with the scene; browser-only entry point */
export function mount(el: Element, scene: Scene): void {
  el.innerHTML = sceneToSvg(scene);
}
