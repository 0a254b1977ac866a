/** Generator and discriminator architectures.
 *
 * The generator follows the standard DCGAN recipe: a dense projection to a
 * 7x7 feature stack, then three transposed convolutions (strides 1, 2, 2)
 * with batch norm and leaky ReLU between them, ending in a 28x28 tanh image.
 * The exporter in ggw.ts folds the batch norms and writes exactly this layer
 * pattern, which is what the reconstruction runtime expects to load.
 */

import * as tf from "@tensorflow/tfjs";

import { mulberry32, nextOpSeed, type Rng } from "./prng.js";

export const IMAGE_SIDE = 28;
export const LEAKY_ALPHA = 0.3;
export const KERNEL = 5;

function glorot(rng: Rng) {
  return tf.initializers.glorotNormal({ seed: nextOpSeed(rng) });
}

export function buildGenerator(
  latentDim: number,
  channels: [number, number, number],
  seed: number,
): tf.Sequential {
  const rng = mulberry32(seed ^ 0x9e3779b9);
  const [c0, c1, c2] = channels;
  const model = tf.sequential({ name: "generator" });
  model.add(tf.layers.dense({
    inputShape: [latentDim],
    units: 7 * 7 * c0,
    useBias: true,
    kernelInitializer: glorot(rng),
    biasInitializer: "zeros",
  }));
  model.add(tf.layers.reshape({ targetShape: [7, 7, c0] }));
  model.add(tf.layers.batchNormalization({}));
  model.add(tf.layers.leakyReLU({ alpha: LEAKY_ALPHA }));
  model.add(tf.layers.conv2dTranspose({
    filters: c1, kernelSize: KERNEL, strides: 1, padding: "same",
    useBias: false, kernelInitializer: glorot(rng),
  }));
  model.add(tf.layers.batchNormalization({}));
  model.add(tf.layers.leakyReLU({ alpha: LEAKY_ALPHA }));
  model.add(tf.layers.conv2dTranspose({
    filters: c2, kernelSize: KERNEL, strides: 2, padding: "same",
    useBias: false, kernelInitializer: glorot(rng),
  }));
  model.add(tf.layers.batchNormalization({}));
  model.add(tf.layers.leakyReLU({ alpha: LEAKY_ALPHA }));
  model.add(tf.layers.conv2dTranspose({
    filters: 1, kernelSize: KERNEL, strides: 2, padding: "same",
    useBias: false, activation: "tanh", kernelInitializer: glorot(rng),
  }));
  return model;
}

/**
 * Two strided convolutions and a linear head emitting one logit per image:
 * positive favors "real", negative favors "generated". No dropout, so a
 * fixed seed reproduces training runs exactly on the deterministic backend.
 */
export function buildDiscriminator(seed: number, baseFilters = 64): tf.Sequential {
  const rng = mulberry32(seed ^ 0x7f4a7c15);
  const model = tf.sequential({ name: "discriminator" });
  model.add(tf.layers.conv2d({
    inputShape: [IMAGE_SIDE, IMAGE_SIDE, 1],
    filters: baseFilters, kernelSize: KERNEL, strides: 2, padding: "same",
    kernelInitializer: glorot(rng),
  }));
  model.add(tf.layers.leakyReLU({ alpha: LEAKY_ALPHA }));
  model.add(tf.layers.conv2d({
    filters: baseFilters * 2, kernelSize: KERNEL, strides: 2, padding: "same",
    kernelInitializer: glorot(rng),
  }));
  model.add(tf.layers.leakyReLU({ alpha: LEAKY_ALPHA }));
  model.add(tf.layers.flatten());
  model.add(tf.layers.dense({ units: 1, kernelInitializer: glorot(rng) }));
  return model;
}
