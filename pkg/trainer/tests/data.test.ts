import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { gzipSync } from "node:zlib";

import { describe, expect, it } from "vitest";

import {
  IdxFormatError,
  TRAIN_FILES,
  loadIdxImages,
  loadIdxLabels,
  loadTrainSplit,
  syntheticImages,
} from "../src/index.js";

function packImages(count: number, rows: number, cols: number, pixels: number[]): Buffer {
  const buf = Buffer.alloc(16 + pixels.length);
  buf.writeUInt32BE(2051, 0);
  buf.writeUInt32BE(count, 4);
  buf.writeUInt32BE(rows, 8);
  buf.writeUInt32BE(cols, 12);
  Buffer.from(pixels).copy(buf, 16);
  return buf;
}

function packLabels(labels: number[]): Buffer {
  const buf = Buffer.alloc(8 + labels.length);
  buf.writeUInt32BE(2049, 0);
  buf.writeUInt32BE(labels.length, 4);
  Buffer.from(labels).copy(buf, 8);
  return buf;
}

const PIXELS = [0, 255, 128, 64, 32, 16, 250, 5, 90, 180, 200, 7];

describe("loadIdxImages", () => {
  it("reads a hand-packed file and scales bytes to [-1, 1]", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    const path = join(dir, "imgs");
    writeFileSync(path, packImages(2, 2, 3, PIXELS));
    const set = loadIdxImages(path);
    expect([set.count, set.rows, set.cols]).toEqual([2, 2, 3]);
    const expected = Float32Array.from(PIXELS, (v) => v / 127.5 - 1.0);
    expect(Array.from(set.images)).toEqual(Array.from(expected));
    expect(set.images[0]).toBe(-1);
    expect(set.images[1]).toBe(1);
  });

  it("transparently reads gzipped data at the plain path", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    const path = join(dir, "imgs");
    writeFileSync(path, gzipSync(packImages(2, 2, 3, PIXELS)));
    expect(Array.from(loadIdxImages(path).images)).toEqual(
      Array.from(Float32Array.from(PIXELS, (v) => v / 127.5 - 1.0)),
    );
  });

  it("falls back to a .gz sibling when the plain path is missing", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    writeFileSync(join(dir, "imgs.gz"), gzipSync(packImages(2, 2, 3, PIXELS)));
    expect(loadIdxImages(join(dir, "imgs")).count).toBe(2);
  });

  it("rejects a bad magic", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    const bytes = packImages(2, 2, 3, PIXELS);
    bytes.writeUInt32BE(2052, 0);
    const path = join(dir, "imgs");
    writeFileSync(path, bytes);
    expect(() => loadIdxImages(path)).toThrow(IdxFormatError);
    expect(() => loadIdxImages(path)).toThrow(/magic/);
  });

  it("rejects truncated pixel data and truncated headers", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    const whole = packImages(2, 2, 3, PIXELS);
    const short = join(dir, "short");
    writeFileSync(short, whole.subarray(0, whole.length - 1));
    expect(() => loadIdxImages(short)).toThrow(IdxFormatError);
    const stub = join(dir, "stub");
    writeFileSync(stub, whole.subarray(0, 10));
    expect(() => loadIdxImages(stub)).toThrow(/truncated/);
  });
});

describe("loadIdxLabels", () => {
  it("reads labels", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    const path = join(dir, "labels");
    writeFileSync(path, packLabels([7, 1, 2]));
    expect(Array.from(loadIdxLabels(path))).toEqual([7, 1, 2]);
  });

  it("rejects an image magic on a label file and bad lengths", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    const wrong = join(dir, "wrong");
    writeFileSync(wrong, packImages(1, 1, 1, [3]));
    expect(() => loadIdxLabels(wrong)).toThrow(/magic/);
    const bad = packLabels([1, 2, 3]);
    bad.writeUInt32BE(5, 4); // claims five labels, carries three
    const mism = join(dir, "mismatch");
    writeFileSync(mism, bad);
    expect(() => loadIdxLabels(mism)).toThrow(IdxFormatError);
  });
});

describe("loadTrainSplit", () => {
  it("loads the conventional training image filename from a directory", () => {
    const dir = mkdtempSync(join(tmpdir(), "idx-"));
    writeFileSync(join(dir, TRAIN_FILES.images), packImages(2, 2, 3, PIXELS));
    expect(loadTrainSplit(dir).count).toBe(2);
  });
});

describe("syntheticImages", () => {
  it("produces deterministic two-level stroke images", () => {
    const a = syntheticImages(11, 16);
    const b = syntheticImages(11, 16);
    expect(Array.from(a.images)).toEqual(Array.from(b.images));
    expect([a.count, a.rows, a.cols]).toEqual([16, 28, 28]);
    for (const v of a.images) {
      expect(v === -1 || v === 1).toBe(true);
    }
    // every image carries some stroke
    for (let i = 0; i < a.count; i++) {
      const img = a.images.subarray(i * 784, (i + 1) * 784);
      const lit = img.reduce((acc, v) => acc + (v > 0 ? 1 : 0), 0);
      expect(lit).toBeGreaterThan(8);
      expect(lit).toBeLessThan(784 / 2);
    }
  });
});
