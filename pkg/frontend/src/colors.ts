/** Shared palettes. Suppliers read warm, customers cool, throughout. */

import type { Lifecycle, NodeStatus } from "./types.js";

export const CATEGORICAL = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#76b7b2",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
];

export function industryColor(industry: string, order: string[]): string {
  const i = order.indexOf(industry);
  return CATEGORICAL[(i >= 0 ? i : order.length) % CATEGORICAL.length];
}

// light to dark along initiate -> maintain -> terminate
const SUPPLIER_LIFECYCLE: Record<Lifecycle, string> = {
  initiate: "#fdd0a2",
  maintain: "#fd8d3c",
  terminate: "#a63603",
};

const CUSTOMER_LIFECYCLE: Record<Lifecycle, string> = {
  initiate: "#c6dbef",
  maintain: "#4292c6",
  terminate: "#08519c",
};

export function berryColor(side: "supplier" | "customer", lifecycle: Lifecycle): string {
  return side === "supplier" ? SUPPLIER_LIFECYCLE[lifecycle] : CUSTOMER_LIFECYCLE[lifecycle];
}

export const STATUS_COLOR: Record<NodeStatus, string> = {
  Historical: "#9ca3af",
  Simulated: "#4e79a7",
  Active: "#2f9e44",
};

export const SHARED_SUPPLIER = "#d62728";
export const FOCAL_FILL = "#5e548e";
export const STAGED = "#e8590c";

function lerpChannel(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

/** linear blend between two #rrggbb colors, t in [0, 1] */
export function lerpColor(from: string, to: string, t: number): string {
  const u = Math.min(1, Math.max(0, t));
  const hex = (s: string, i: number) => parseInt(s.slice(i, i + 2), 16);
  const ch = (i: number) =>
    lerpChannel(hex(from.slice(1), i), hex(to.slice(1), i), u)
      .toString(16)
      .padStart(2, "0");
  return `#${ch(0)}${ch(2)}${ch(4)}`;
}

/** soil tint: pale for weak mean performance, saturated for strong */
export function soilColor(meanPerformance: number): string {
  return lerpColor("#f1f3f5", "#74b816", meanPerformance);
}
