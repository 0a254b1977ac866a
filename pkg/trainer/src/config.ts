/** Training configuration. */

export interface TrainConfig {
  /** images per gradient step */
  batchSize: number;
  /** Adam learning rate, shared by generator and discriminator */
  learningRate: number;
  /** full-parity runs use 1000; the desk-scale default is 50 */
  epochs: number;
  /** generator input dimension */
  latentDim: number;
  /** master seed for init, shuffles, and sampled latents */
  seed: number;
  /**
   * Channel widths of the three up-convolution stages. The production
   * generator is [256, 128, 64]; tests shrink this to keep the pure-JS
   * backend fast. The exported weights file records actual shapes, and the
   * runtime loader accepts any consistent widths.
   */
  channels: [number, number, number];
}

export const DEFAULT_CONFIG: TrainConfig = {
  batchSize: 256,
  learningRate: 1e-4,
  epochs: 50,
  latentDim: 100,
  seed: 0,
  channels: [256, 128, 64],
};

export function makeConfig(overrides: Partial<TrainConfig> = {}): TrainConfig {
  const config = { ...DEFAULT_CONFIG, ...overrides };
  if (!Number.isInteger(config.batchSize) || config.batchSize < 1) {
    throw new Error(`batchSize must be a positive integer, got ${config.batchSize}`);
  }
  if (!(config.learningRate > 0)) {
    throw new Error(`learningRate must be > 0, got ${config.learningRate}`);
  }
  if (!Number.isInteger(config.epochs) || config.epochs < 1) {
    throw new Error(`epochs must be a positive integer, got ${config.epochs}`);
  }
  if (!Number.isInteger(config.latentDim) || config.latentDim < 1) {
    throw new Error(`latentDim must be a positive integer, got ${config.latentDim}`);
  }
  return config;
}
