/** GGW1 weight export.
 *
 * File layout: 4-byte magic "GGW1", u32 little-endian header length, UTF-8
 * JSON header {format_version, latent_dim, layers: [{kind, params,
 * tensor_shapes}]}, then every tensor as little-endian float32, contiguous,
 * in declaration order. Batch-norm layers are folded into per-channel
 * affines using the moving statistics, so the exported file contains only
 * the six inference layer kinds the reconstruction runtime knows.
 */

import { writeFileSync } from "node:fs";
import { endianness } from "node:os";

import * as tf from "@tensorflow/tfjs";

export class ExportError extends Error {}

export const GGW_MAGIC = "GGW1";
export const GGW_FORMAT_VERSION = 1;

interface LayerEntry {
  kind: string;
  params: Record<string, unknown>;
  tensors: Float32Array[];
}

function tensorData(t: tf.Tensor): Float32Array {
  const data = t.dataSync();
  if (!(data instanceof Float32Array)) {
    throw new ExportError(`expected float32 weights, got ${t.dtype}`);
  }
  return data;
}

/** scale = gamma / sqrt(var + eps), shift = beta - mean * scale */
export function foldBatchNorm(
  gamma: Float32Array,
  beta: Float32Array,
  movingMean: Float32Array,
  movingVariance: Float32Array,
  epsilon: number,
): { scale: Float32Array; shift: Float32Array } {
  const channels = gamma.length;
  const scale = new Float32Array(channels);
  const shift = new Float32Array(channels);
  for (let c = 0; c < channels; c++) {
    scale[c] = gamma[c] / Math.sqrt(movingVariance[c] + epsilon);
    shift[c] = beta[c] - movingMean[c] * scale[c];
  }
  return { scale, shift };
}

function foldBnLayer(layer: tf.layers.Layer): LayerEntry {
  const [gamma, beta, mean, variance] = layer.getWeights().map(tensorData);
  const epsilon = (layer.getConfig().epsilon as number) ?? 1e-3;
  const { scale, shift } = foldBatchNorm(gamma, beta, mean, variance, epsilon);
  return {
    kind: "affine_channel",
    params: { channels: gamma.length },
    tensors: [scale, shift],
  };
}

function strideOf(layer: tf.layers.Layer): number {
  const strides = layer.getConfig().strides as number | number[];
  const s = Array.isArray(strides) ? strides[0] : strides;
  if (Array.isArray(strides) && strides[1] !== s) {
    throw new ExportError(`anisotropic strides ${strides} are not exportable`);
  }
  return s;
}

function activationOf(layer: tf.layers.Layer): string {
  const activation = layer.getConfig().activation as { identifier?: string } | string | undefined;
  if (activation == null) return "linear";
  if (typeof activation === "string") return activation;
  return activation.identifier ?? "linear";
}

/**
 * Validate the layer pattern (dense, reshape, then three BN + leaky ReLU +
 * transposed-conv stages, tanh on the last conv) and produce the folded
 * inference layer list. Architecture drift raises ExportError.
 */
export function foldGenerator(model: tf.LayersModel): {
  latentDim: number;
  entries: LayerEntry[];
} {
  const layers = model.layers.filter((l) => l.getClassName() !== "InputLayer");
  const names = layers.map((l) => l.getClassName());
  const expected = [
    "Dense", "Reshape",
    "BatchNormalization", "LeakyReLU", "Conv2DTranspose",
    "BatchNormalization", "LeakyReLU", "Conv2DTranspose",
    "BatchNormalization", "LeakyReLU", "Conv2DTranspose",
  ];
  if (names.length !== expected.length || names.some((n, i) => n !== expected[i])) {
    throw new ExportError(
      `generator layers [${names.join(", ")}] do not match the exportable pattern`,
    );
  }

  const entries: LayerEntry[] = [];
  const dense = layers[0];
  const [kernel, bias] = dense.getWeights();
  const [denseIn, denseOut] = kernel.shape;
  entries.push({
    kind: "dense",
    params: { in: denseIn, out: denseOut },
    tensors: [tensorData(kernel), tensorData(bias)],
  });

  const targetShape = layers[1].getConfig().targetShape as number[];
  entries.push({ kind: "reshape", params: { shape: targetShape }, tensors: [] });

  for (let stage = 0; stage < 3; stage++) {
    const bn = layers[2 + stage * 3];
    const leaky = layers[3 + stage * 3];
    const conv = layers[4 + stage * 3];

    entries.push(foldBnLayer(bn));
    entries.push({
      kind: "leaky_relu",
      params: { alpha: leaky.getConfig().alpha as number },
      tensors: [],
    });

    if (conv.getConfig().useBias) {
      throw new ExportError("transposed-conv bias is not representable; train with useBias: false");
    }
    const [convKernel] = conv.getWeights();
    const [kh, kw, outCh, inCh] = convKernel.shape; // tfjs stores (K, K, out, in)
    if (kh !== kw) throw new ExportError(`non-square kernel ${convKernel.shape}`);
    const activation = activationOf(conv);
    const isLast = stage === 2;
    if (isLast && activation !== "tanh") {
      throw new ExportError(`final conv must end in tanh, got ${activation}`);
    }
    if (!isLast && activation !== "linear") {
      throw new ExportError(`inner conv must be linear, got ${activation}`);
    }
    entries.push({
      kind: "conv2d_transpose",
      params: { kernel: kh, stride: strideOf(conv), in_ch: inCh, out_ch: outCh },
      tensors: [tensorData(convKernel)],
    });
  }
  entries.push({ kind: "tanh", params: {}, tensors: [] });

  const latentDim = model.layers[0].batchInputShape?.[1];
  if (typeof latentDim !== "number") {
    throw new ExportError("could not determine the latent dimension from the input shape");
  }
  return { latentDim, entries };
}

function tensorShape(entry: LayerEntry): number[][] {
  if (entry.kind === "dense") {
    const [w, b] = entry.tensors;
    const out = b.length;
    return [[w.length / out, out], [out]];
  }
  if (entry.kind === "affine_channel") {
    return [[entry.tensors[0].length], [entry.tensors[1].length]];
  }
  if (entry.kind === "conv2d_transpose") {
    const p = entry.params as { kernel: number; in_ch: number; out_ch: number };
    return [[p.kernel, p.kernel, p.out_ch, p.in_ch]];
  }
  return [];
}

/** Serialize folded entries to GGW1 bytes. */
export function encodeGgw(latentDim: number, entries: LayerEntry[]): Buffer {
  if (endianness() !== "LE") {
    throw new ExportError("GGW1 export requires a little-endian host");
  }
  const header = {
    format_version: GGW_FORMAT_VERSION,
    latent_dim: latentDim,
    layers: entries.map((e) => ({
      kind: e.kind,
      params: e.params,
      tensor_shapes: tensorShape(e),
    })),
  };
  const headerBytes = Buffer.from(JSON.stringify(header), "utf-8");
  const lenField = Buffer.alloc(4);
  lenField.writeUInt32LE(headerBytes.length, 0);
  const chunks: Uint8Array[] = [Buffer.from(GGW_MAGIC, "ascii"), lenField, headerBytes];
  for (const entry of entries) {
    for (const tensor of entry.tensors) {
      chunks.push(Buffer.from(tensor.buffer, tensor.byteOffset, tensor.byteLength));
    }
  }
  return Buffer.concat(chunks);
}

/** Fold batch norms and write the generator as a GGW1 file. */
export function foldAndExport(model: tf.LayersModel, path: string): Buffer {
  const { latentDim, entries } = foldGenerator(model);
  const bytes = encodeGgw(latentDim, entries);
  writeFileSync(path, bytes);
  return bytes;
}

/** Parse just the header of a GGW1 buffer (for tests and inspection). */
export function readGgwHeader(data: Buffer): {
  header: { format_version: number; latent_dim: number; layers: unknown[] };
  payloadBytes: number;
} {
  if (data.subarray(0, 4).toString("ascii") !== GGW_MAGIC) {
    throw new ExportError(`bad magic ${data.subarray(0, 4).toString("ascii")}`);
  }
  const headerLen = data.readUInt32LE(4);
  const header = JSON.parse(data.subarray(8, 8 + headerLen).toString("utf-8"));
  return { header, payloadBytes: data.length - 8 - headerLen };
}
