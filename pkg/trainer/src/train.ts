/** Adversarial training loop.
 *
 * Standard non-saturating GAN: the discriminator emits one logit per image
 * (positive favors real, negative favors generated). Per batch, one Adam
 * step on the discriminator with loss bce(real, 1) + bce(fake, 0), then one
 * on the generator with loss bce(D(G(z)), 1). All randomness flows from the
 * config seed, so runs on the deterministic CPU backend reproduce exactly.
 * A non-finite epoch loss aborts and rolls both nets back to the end of the
 * last finite epoch.
 */

import { join } from "node:path";

import * as tf from "@tensorflow/tfjs";

import type { TrainConfig } from "./config.js";
import type { ImageSet } from "./data.js";
import { foldAndExport } from "./ggw.js";
import { buildDiscriminator, buildGenerator } from "./model.js";
import { mulberry32, nextOpSeed, shuffledIndices } from "./prng.js";

export interface EpochLog {
  epoch: number;
  gLoss: number;
  dLoss: number;
}

export interface TrainResult {
  generator: tf.Sequential;
  discriminator: tf.Sequential;
  log: EpochLog[];
  /** true when training stopped early on a non-finite loss */
  aborted: boolean;
}

export interface TrainOptions {
  /** write a folded generator checkpoint after every epoch */
  checkpointDir?: string;
  onEpoch?: (log: EpochLog) => void;
}

/** Numerically stable mean binary cross-entropy from logits:
 * mean(relu(x) - x*t + log(1 + exp(-|x|))). */
export function bceFromLogits(logits: tf.Tensor, target: 0 | 1): tf.Scalar {
  return tf.tidy(() => {
    const x = logits;
    const loss = tf.relu(x).sub(x.mul(target)).add(tf.log1p(tf.exp(tf.neg(tf.abs(x)))));
    return loss.mean() as tf.Scalar;
  });
}

// LayerVariable.val is typed protected but is the documented way to reach the
// backing Variable for variableGrads; read() would copy instead.
function trainableVars(model: tf.LayersModel): tf.Variable[] {
  return model.trainableWeights.map(
    (w) => (w as unknown as { val: tf.Variable }).val,
  );
}

type GradMap = Parameters<ReturnType<typeof tf.train.adam>["applyGradients"]>[0];

function snapshot(model: tf.LayersModel): tf.Tensor[] {
  return model.getWeights().map((w) => w.clone());
}

function restore(model: tf.LayersModel, saved: tf.Tensor[]): void {
  model.setWeights(saved);
}

function disposeAll(tensors: tf.Tensor[]): void {
  for (const t of tensors) t.dispose();
}

export async function trainGan(
  config: TrainConfig,
  data: ImageSet,
  options: TrainOptions = {},
): Promise<TrainResult> {
  const { count, rows, cols } = data;
  if (rows !== 28 || cols !== 28) {
    throw new Error(`expected 28x28 images, got ${rows}x${cols}`);
  }
  const generator = buildGenerator(config.latentDim, config.channels, config.seed);
  const discriminator = buildDiscriminator(config.seed, Math.max(8, config.channels[2]));
  const gOpt = tf.train.adam(config.learningRate, 0.9, 0.999, 1e-8);
  const dOpt = tf.train.adam(config.learningRate, 0.9, 0.999, 1e-8);
  const gVars = trainableVars(generator);
  const dVars = trainableVars(discriminator);

  const all = tf.tensor4d(data.images, [count, 28, 28, 1]);
  const rng = mulberry32(config.seed ^ 0x5bf03635);

  const log: EpochLog[] = [];
  let aborted = false;
  let gSaved = snapshot(generator);
  let dSaved = snapshot(discriminator);

  for (let epoch = 0; epoch < config.epochs; epoch++) {
    const order = shuffledIndices(count, rng);
    let gSum = 0;
    let dSum = 0;
    let batches = 0;
    for (let start = 0; start < count; start += config.batchSize) {
      const idx = order.subarray(start, Math.min(start + config.batchSize, count));
      const real = tf.tidy(() => all.gather(tf.tensor1d(idx, "int32")));
      const b = idx.length;

      const dSeed = nextOpSeed(rng);
      const dGrads = tf.variableGrads(() => {
        const z = tf.randomNormal([b, config.latentDim], 0, 1, "float32", dSeed);
        const fake = generator.apply(z, { training: true }) as tf.Tensor;
        const realLogits = discriminator.apply(real, { training: true }) as tf.Tensor;
        const fakeLogits = discriminator.apply(fake, { training: true }) as tf.Tensor;
        return bceFromLogits(realLogits, 1).add(bceFromLogits(fakeLogits, 0)) as tf.Scalar;
      }, dVars);
      dOpt.applyGradients(dGrads.grads as unknown as GradMap);
      dSum += dGrads.value.dataSync()[0];
      dGrads.value.dispose();
      disposeAll(Object.values(dGrads.grads));

      const gSeed = nextOpSeed(rng);
      const gGrads = tf.variableGrads(() => {
        const z = tf.randomNormal([b, config.latentDim], 0, 1, "float32", gSeed);
        const fake = generator.apply(z, { training: true }) as tf.Tensor;
        const fakeLogits = discriminator.apply(fake, { training: true }) as tf.Tensor;
        return bceFromLogits(fakeLogits, 1) as tf.Scalar; // non-saturating
      }, gVars);
      gOpt.applyGradients(gGrads.grads as unknown as GradMap);
      gSum += gGrads.value.dataSync()[0];
      gGrads.value.dispose();
      disposeAll(Object.values(gGrads.grads));

      real.dispose();
      batches++;
    }

    const entry: EpochLog = { epoch, gLoss: gSum / batches, dLoss: dSum / batches };
    if (!Number.isFinite(entry.gLoss) || !Number.isFinite(entry.dLoss)) {
      restore(generator, gSaved);
      restore(discriminator, dSaved);
      aborted = true;
      break;
    }
    log.push(entry);
    options.onEpoch?.(entry);

    disposeAll(gSaved);
    disposeAll(dSaved);
    gSaved = snapshot(generator);
    dSaved = snapshot(discriminator);
    if (options.checkpointDir) {
      foldAndExport(generator, join(options.checkpointDir, `generator_epoch${epoch}.ggw`));
    }
  }

  disposeAll(gSaved);
  disposeAll(dSaved);
  all.dispose();
  return { generator, discriminator, log, aborted };
}
