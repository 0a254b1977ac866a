export { DEFAULT_CONFIG, makeConfig, type TrainConfig } from "./config.js";
export {
  IdxFormatError,
  TRAIN_FILES,
  loadIdxImages,
  loadIdxLabels,
  loadTrainSplit,
  syntheticImages,
  type ImageSet,
} from "./data.js";
export {
  ExportError,
  GGW_FORMAT_VERSION,
  GGW_MAGIC,
  encodeGgw,
  foldAndExport,
  foldBatchNorm,
  foldGenerator,
  readGgwHeader,
} from "./ggw.js";
export {
  AGGREGATE_HEADER,
  SchemaError,
  cellColor,
  parseAggregateCsv,
  renderHeatmaps,
  type AggregateRow,
  type HeatmapOptions,
  type Panel,
} from "./heatmap.js";
export { IMAGE_SIDE, KERNEL, LEAKY_ALPHA, buildDiscriminator, buildGenerator } from "./model.js";
export { bceFromLogits, trainGan, type EpochLog, type TrainOptions, type TrainResult } from "./train.js";
