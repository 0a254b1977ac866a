import { describe, expect, it } from "vitest";

import {
  AGGREGATE_HEADER,
  SchemaError,
  cellColor,
  parseAggregateCsv,
  renderHeatmaps,
} from "../src/index.js";

function csv(rows: string[]): string {
  return [AGGREGATE_HEADER, ...rows].join("\n") + "\n";
}

describe("parseAggregateCsv", () => {
  it("parses well-formed rows", () => {
    const rows = parseAggregateCsv(csv([
      "0.1,10,0,bp,0.5,0.01,10,0",
      "0.3,40,0.05,gan,nan,nan,10,10",
    ]));
    expect(rows).toHaveLength(2);
    expect(rows[0]).toMatchObject({ nu: 0.1, m: 10, noise: 0, method: "bp", meanR: 0.5 });
    expect(rows[1].method).toBe("gan");
    expect(Number.isNaN(rows[1].meanR)).toBe(true);
    expect(rows[1].undefinedCount).toBe(10);
  });

  it("rejects a wrong header", () => {
    expect(() => parseAggregateCsv("nu,m,noise\n0.1,10,0\n")).toThrow(SchemaError);
    expect(() => parseAggregateCsv("nu,m,noise\n0.1,10,0\n")).toThrow(/header/);
  });

  it("rejects rows with missing fields", () => {
    expect(() => parseAggregateCsv(csv(["0.1,10,0,bp,0.5,0.01,10"]))).toThrow(/fields/);
  });
});

describe("cellColor", () => {
  it("uses the gray scale strictly below 0.9 and color at or above", () => {
    const gray = cellColor(0.8999);
    expect(gray.slice(1, 3)).toBe(gray.slice(3, 5));
    expect(gray.slice(3, 5)).toBe(gray.slice(5, 7));
    expect(cellColor(0.9)).toBe("#0026ff"); // boundary lands on the color scale
    expect(cellColor(1)).toBe("#ff2600");
    expect(cellColor(0)).toBe("#000000");
    expect(cellColor(Number.NaN)).toBe("#ffffff");
  });

  it("orders the detail ramp from blue toward red", () => {
    const lo = parseInt(cellColor(0.91).slice(1, 3), 16);
    const hi = parseInt(cellColor(0.99).slice(1, 3), 16);
    expect(hi).toBeGreaterThan(lo);
  });
});

describe("renderHeatmaps", () => {
  const threeMethods = csv([
    "0.1,10,0,bp,0.5,0.01,10,0",
    "0.1,40,0,bp,0.9,0.01,10,0",
    "0.3,10,0,bp,0.7,0.01,10,0",
    "0.3,40,0,bp,0.95,0.01,10,0",
    "0.1,10,0,bpdn,0.55,0.01,10,0",
    "0.1,40,0,bpdn,0.85,0.01,10,0",
    "0.3,10,0,bpdn,0.72,0.01,10,0",
    "0.3,40,0,bpdn,0.96,0.01,10,0",
    "0.1,10,0,gan,0.6,0.01,10,0",
    "0.1,40,0,gan,0.88,0.01,10,0",
    "0.3,10,0,gan,0.74,0.01,10,0",
    "0.3,40,0,gan,nan,nan,10,10",
  ]);

  it("renders one panel per method, sorted", () => {
    const panels = renderHeatmaps(parseAggregateCsv(threeMethods));
    expect(panels.map((p) => p.method)).toEqual(["bp", "bpdn", "gan"]);
    for (const panel of panels) {
      expect(panel.svg).toContain("<svg");
      expect(panel.svg).toContain(`>${panel.method}</text>`);
    }
  });

  it("colors the 0.9 boundary cell and whitens undefined cells", () => {
    const panels = renderHeatmaps(parseAggregateCsv(threeMethods));
    const bp = panels[0].svg;
    const boundary = bp.split("\n").find((l) => l.includes('data-r="0.9"'));
    expect(boundary).toBeDefined();
    expect(boundary).toContain('fill="#0026ff"');
    const gan = panels[2].svg;
    const undef = gan.split("\n").find((l) => l.includes('data-r="nan"') && l.includes("rect"));
    expect(undef).toBeDefined();
    expect(undef).toContain('fill="#ffffff"');
  });

  it("renders a uniform top color when every mean is one", () => {
    const panels = renderHeatmaps(parseAggregateCsv(csv([
      "0.1,10,0,bp,1,0,10,0",
      "0.1,40,0,bp,1,0,10,0",
      "0.3,10,0,bp,1,0,10,0",
      "0.3,40,0,bp,1,0,10,0",
    ])));
    const fills = panels[0].svg.split("\n")
      .filter((l) => l.includes("data-nu="))
      .map((l) => /fill="([^"]+)"/.exec(l)?.[1]);
    expect(fills).toHaveLength(4);
    expect(new Set(fills)).toEqual(new Set(["#ff2600"]));
  });

  it("filters by noise level and rejects an empty selection", () => {
    const rows = parseAggregateCsv(csv(["0.1,10,0.05,bp,0.5,0.01,10,0"]));
    expect(renderHeatmaps(rows, { noise: 0.05 })).toHaveLength(1);
    expect(() => renderHeatmaps(rows)).toThrow(SchemaError);
    expect(() => renderHeatmaps(rows)).toThrow(/noise/);
  });

  it("draws the Nyquist overlay with its label", () => {
    const rows = parseAggregateCsv(threeMethods);
    const svg = renderHeatmaps(rows)[0].svg;
    expect(svg).toContain('class="nyquist"');
    expect(svg).toContain("m=784</text>");
    const custom = renderHeatmaps(rows, { nyquist: 49 })[0].svg;
    expect(custom).toContain("m=49</text>");
  });
});
