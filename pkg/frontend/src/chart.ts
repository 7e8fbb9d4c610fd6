/** Tiny SVG line charts drawn from response series. */

export interface ChartOptions {
  width: number;
  height: number;
  pad?: number;
  color?: string;
  yDomain?: [number, number];
}

export function seriesPath(
  series: [number, number][], opts: ChartOptions,
): string {
  const pad = opts.pad ?? 6;
  const [yLo, yHi] = opts.yDomain ?? [0, 100];
  const xs = series.map((p) => p[0]);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const spanX = xHi - xLo || 1;
  const spanY = yHi - yLo || 1;
  const w = opts.width - 2 * pad;
  const h = opts.height - 2 * pad;
  return series
    .map(([x, y], i) => {
      const px = pad + ((x - xLo) / spanX) * w;
      const py = pad + h - ((y - yLo) / spanY) * h;
      return `${i === 0 ? "M" : "L"}${px.toFixed(1)},${py.toFixed(1)}`;
    })
    .join("");
}

export function polyline(
  series: [number, number][], opts: ChartOptions,
): string {
  const color = opts.color ?? "#333";
  return `<path d="${seriesPath(series, opts)}" fill="none" ` +
    `stroke="${color}" stroke-width="2"/>`;
}

export function miniChart(
  series: [number, number][], opts: ChartOptions,
): string {
  return `<svg width="${opts.width}" height="${opts.height}" ` +
    `viewBox="0 0 ${opts.width} ${opts.height}">${polyline(series, opts)}</svg>`;
}
