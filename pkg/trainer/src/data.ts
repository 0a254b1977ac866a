/** IDX image/label files (the classic digit-dataset format), gzip transparent.
 *
 * Images come back as float32 scaled to [-1, 1], the range the generator's
 * tanh output lives in.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { gunzipSync } from "node:zlib";

import { mulberry32 } from "./prng.js";

export class IdxFormatError extends Error {}

const IMAGE_MAGIC = 2051;
const LABEL_MAGIC = 2049;

export const TRAIN_FILES = {
  images: "train-images-idx3-ubyte",
  labels: "train-labels-idx1-ubyte",
} as const;

function readMaybeGzipped(path: string): Buffer {
  let raw: Buffer;
  try {
    raw = readFileSync(path);
  } catch {
    raw = readFileSync(path + ".gz");
  }
  if (raw.length >= 2 && raw[0] === 0x1f && raw[1] === 0x8b) {
    return gunzipSync(raw);
  }
  return raw;
}

export interface ImageSet {
  /** [count, rows, cols], values in [-1, 1] */
  images: Float32Array;
  count: number;
  rows: number;
  cols: number;
}

export function loadIdxImages(path: string): ImageSet {
  const buf = readMaybeGzipped(path);
  if (buf.length < 16) throw new IdxFormatError(`${path}: truncated header`);
  const magic = buf.readUInt32BE(0);
  if (magic !== IMAGE_MAGIC) {
    throw new IdxFormatError(`${path}: bad magic ${magic}, expected ${IMAGE_MAGIC}`);
  }
  const count = buf.readUInt32BE(4);
  const rows = buf.readUInt32BE(8);
  const cols = buf.readUInt32BE(12);
  const expected = 16 + count * rows * cols;
  if (buf.length !== expected) {
    throw new IdxFormatError(`${path}: ${buf.length} bytes, expected ${expected}`);
  }
  const images = new Float32Array(count * rows * cols);
  for (let i = 0; i < images.length; i++) {
    images[i] = buf[16 + i] / 127.5 - 1.0;
  }
  return { images, count, rows, cols };
}

export function loadIdxLabels(path: string): Uint8Array {
  const buf = readMaybeGzipped(path);
  if (buf.length < 8) throw new IdxFormatError(`${path}: truncated header`);
  const magic = buf.readUInt32BE(0);
  if (magic !== LABEL_MAGIC) {
    throw new IdxFormatError(`${path}: bad magic ${magic}, expected ${LABEL_MAGIC}`);
  }
  const count = buf.readUInt32BE(4);
  if (buf.length !== 8 + count) {
    throw new IdxFormatError(`${path}: ${buf.length} bytes, expected ${8 + count}`);
  }
  return new Uint8Array(buf.subarray(8));
}

/** Load the training split from a dataset directory. */
export function loadTrainSplit(dir: string): ImageSet {
  return loadIdxImages(join(dir, TRAIN_FILES.images));
}

/**
 * Synthetic stand-in for smoke tests: stroke-like sparse images in [-1, 1].
 * Shares nothing with real digits except the value range and rough sparsity.
 */
export function syntheticImages(seed: number, count: number, side = 28): ImageSet {
  const rng = mulberry32(seed);
  const images = new Float32Array(count * side * side).fill(-1);
  for (let i = 0; i < count; i++) {
    const base = i * side * side;
    // one random thick diagonal stroke per image
    const y0 = Math.floor(rng() * side * 0.6) + Math.floor(side * 0.2);
    const x0 = Math.floor(rng() * side * 0.6) + Math.floor(side * 0.2);
    const dy = rng() < 0.5 ? 1 : -1;
    const len = 6 + Math.floor(rng() * 10);
    for (let t = 0; t < len; t++) {
      const y = y0 + dy * Math.floor(t / 2);
      const x = x0 + t - Math.floor(len / 2);
      for (let oy = -1; oy <= 1; oy++) {
        for (let ox = -1; ox <= 1; ox++) {
          const yy = y + oy;
          const xx = x + ox;
          if (yy >= 0 && yy < side && xx >= 0 && xx < side) {
            images[base + yy * side + xx] = 1.0;
          }
        }
      }
    }
  }
  return { images, count, rows: side, cols: side };
}
