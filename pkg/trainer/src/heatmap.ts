/** Heatmap figures from aggregated sweep CSVs.
 *
 * One SVG panel per method: frequency cutoff on x, measurement count on y,
 * cell color = mean Pearson r. The color map is two-scale: gray from 0 to
 * 0.9, then a blue-to-red ramp over the detail region 0.9 to 1 (boundary
 * rule: r >= 0.9 is colored). A dashed overlay marks the Nyquist count
 * m = n. Pure string SVG, no plotting dependencies.
 */

export class SchemaError extends Error {}

export const AGGREGATE_HEADER = "nu,m,noise,method,mean_r,std_r,count,undefined";

export interface AggregateRow {
  nu: number;
  m: number;
  noise: number;
  method: string;
  meanR: number;
  stdR: number;
  count: number;
  undefinedCount: number;
}

export function parseAggregateCsv(text: string): AggregateRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() !== AGGREGATE_HEADER) {
    throw new SchemaError(
      `bad aggregate header: ${JSON.stringify(lines[0] ?? "")}, expected ${AGGREGATE_HEADER}`,
    );
  }
  return lines.slice(1).filter((line) => line.trim() !== "").map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== 8) {
      throw new SchemaError(`row ${i + 2}: ${parts.length} fields, expected 8`);
    }
    return {
      nu: Number(parts[0]),
      m: Number(parts[1]),
      noise: Number(parts[2]),
      method: parts[3],
      meanR: Number(parts[4]),
      stdR: Number(parts[5]),
      count: Number(parts[6]),
      undefinedCount: Number(parts[7]),
    };
  });
}

function clamp01(x: number): number {
  return Math.min(1, Math.max(0, x));
}

function hex2(v: number): string {
  return Math.round(clamp01(v) * 255).toString(16).padStart(2, "0");
}

/**
 * Two-scale color map. r < 0.9: gray ramp from black toward light gray.
 * r >= 0.9: blue through magenta to red across the detail region.
 * Undefined (NaN) cells render white.
 */
export function cellColor(r: number): string {
  if (!Number.isFinite(r)) return "#ffffff";
  if (r < 0.9) {
    const v = clamp01(r / 0.9) * 0.82; // keep clearly below the color scale
    return `#${hex2(v)}${hex2(v)}${hex2(v)}`;
  }
  const t = clamp01((r - 0.9) / 0.1);
  return `#${hex2(t)}${hex2(0.15)}${hex2(1 - t)}`;
}

export interface HeatmapOptions {
  /** pixel count n defining the Nyquist measurement count (default 784) */
  nyquist?: number;
  /** render only rows at this noise level (default 0) */
  noise?: number;
  cellSize?: number;
}

export interface Panel {
  method: string;
  svg: string;
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function renderPanel(
  method: string,
  rows: AggregateRow[],
  nus: number[],
  ms: number[],
  options: Required<HeatmapOptions>,
): string {
  const cs = options.cellSize;
  const left = 58;
  const top = 34;
  const width = left + nus.length * cs + 20;
  const height = top + ms.length * cs + 40;
  const byKey = new Map(rows.map((r) => [`${r.nu}|${r.m}`, r]));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(`<text x="${left}" y="18" font-size="13">${method}</text>`);

  // cells: m ascending upward, nu ascending rightward
  for (let yi = 0; yi < ms.length; yi++) {
    const m = ms[yi];
    const y = top + (ms.length - 1 - yi) * cs;
    for (let xi = 0; xi < nus.length; xi++) {
      const nu = nus[xi];
      const row = byKey.get(`${nu}|${m}`);
      const fill = row ? cellColor(row.meanR) : "#ffffff";
      parts.push(
        `<rect x="${left + xi * cs}" y="${y}" width="${cs}" height="${cs}" ` +
          `fill="${fill}" stroke="#cccccc" stroke-width="0.5" ` +
          `data-nu="${nu}" data-m="${m}" ` +
          `data-r="${row && Number.isFinite(row.meanR) ? row.meanR : "nan"}"/>`,
      );
    }
    parts.push(
      `<text x="${left - 6}" y="${y + cs / 2 + 4}" text-anchor="end">${m}</text>`,
    );
  }
  for (let xi = 0; xi < nus.length; xi++) {
    parts.push(
      `<text x="${left + xi * cs + cs / 2}" y="${top + ms.length * cs + 14}" ` +
        `text-anchor="middle">${nus[xi]}</text>`,
    );
  }
  parts.push(
    `<text x="${left + (nus.length * cs) / 2}" y="${top + ms.length * cs + 30}" ` +
      `text-anchor="middle">frequency cutoff</text>`,
  );

  // Nyquist overlay: vertical position by interpolation in row-index space
  // over the sorted m values (extrapolated past the ends, clamped to the
  // panel), because the row axis is categorical.
  const n = options.nyquist;
  let rowPos: number;
  if (ms.length === 1) {
    rowPos = n <= ms[0] ? 0 : 1;
  } else {
    let k = 0;
    while (k < ms.length - 1 && ms[k + 1] < n) k++;
    const lo = ms[k];
    const hi = ms[Math.min(k + 1, ms.length - 1)];
    const frac = hi === lo ? 0 : (n - lo) / (hi - lo);
    rowPos = k + frac;
  }
  const yN = top + (ms.length - 0.5 - rowPos) * cs;
  const yClamped = Math.min(Math.max(yN, top - 8), top + ms.length * cs);
  parts.push(
    `<line x1="${left}" y1="${yClamped}" x2="${left + nus.length * cs}" y2="${yClamped}" ` +
      `stroke="#0a7d36" stroke-width="1.5" stroke-dasharray="6 3" class="nyquist"/>`,
  );
  parts.push(
    `<text x="${left + nus.length * cs + 4}" y="${yClamped + 4}" fill="#0a7d36">` +
      `m=${n}</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n");
}

/** Render one panel per method present in the rows. */
export function renderHeatmaps(rows: AggregateRow[], options: HeatmapOptions = {}): Panel[] {
  const opts: Required<HeatmapOptions> = {
    nyquist: options.nyquist ?? 784,
    noise: options.noise ?? 0,
    cellSize: options.cellSize ?? 34,
  };
  const selected = rows.filter((r) => r.noise === opts.noise);
  if (selected.length === 0) {
    throw new SchemaError(`no rows at noise level ${opts.noise}`);
  }
  const methods = [...new Set(selected.map((r) => r.method))].sort();
  const nus = uniqueSorted(selected.map((r) => r.nu));
  const ms = uniqueSorted(selected.map((r) => r.m));
  return methods.map((method) => ({
    method,
    svg: renderPanel(method, selected.filter((r) => r.method === method), nus, ms, opts),
  }));
}
