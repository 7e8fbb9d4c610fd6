/** Correspondence palettes: a 5-step single-hue intensity ramp for ordinal
 * recency (darkest = most recent) and 8 distinct hues for categorical. */

import type { EncodingToken } from "./protocol.js";

export const ORDINAL_RAMP = [
  "#08306b", // level 0, most recent
  "#2171b5",
  "#4292c6",
  "#6baed6",
  "#c6dbef",
];

export const CATEGORICAL_HUES = [
  "#4c78a8",
  "#f58518",
  "#54a24b",
  "#e45756",
  "#72b7b2",
  "#eeca3b",
  "#b279a2",
  "#9d755d",
];

export function ordinalColor(level: number): string {
  const idx = Math.min(Math.max(level, 0), ORDINAL_RAMP.length - 1);
  return ORDINAL_RAMP[idx];
}

export function categoricalColor(level: number): string {
  return CATEGORICAL_HUES[((level % 8) + 8) % 8];
}

export function encodingColor(token: EncodingToken | null): string {
  if (!token) return "#555555";
  return token.scheme === "categorical"
    ? categoricalColor(token.level)
    : ordinalColor(token.level);
}

/** Relative luminance, used to verify "darkest = most recent". */
export function luminance(hex: string): number {
  const n = parseInt(hex.slice(1), 16);
  const r = (n >> 16) & 0xff;
  const g = (n >> 8) & 0xff;
  const b = n & 0xff;
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}
