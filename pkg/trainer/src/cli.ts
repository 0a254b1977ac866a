/** Command line: train-and-export, and heatmap rendering.
 *
 *   node dist/cli.js train --dataset-dir data --out generator.ggw
 *       [--epochs 50 --batch 256 --lr 1e-4 --latent 100 --seed 0
 *        --subset N --channels 256,128,64 --checkpoint-dir ckpt]
 *   node dist/cli.js heatmap --csv aggregate.csv --out-dir figs
 *       [--noise 0 --nyquist 784]
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";

import { makeConfig } from "./config.js";
import { loadTrainSplit } from "./data.js";
import { foldAndExport } from "./ggw.js";
import { parseAggregateCsv, renderHeatmaps } from "./heatmap.js";
import { trainGan } from "./train.js";

async function cmdTrain(argv: string[]): Promise<number> {
  const { values } = parseArgs({
    args: argv,
    options: {
      "dataset-dir": { type: "string" },
      out: { type: "string" },
      epochs: { type: "string" },
      batch: { type: "string" },
      lr: { type: "string" },
      latent: { type: "string" },
      seed: { type: "string" },
      subset: { type: "string" },
      channels: { type: "string" },
      "checkpoint-dir": { type: "string" },
    },
  });
  if (!values["dataset-dir"] || !values.out) {
    console.error("train requires --dataset-dir and --out");
    return 2;
  }
  const config = makeConfig({
    ...(values.epochs ? { epochs: Number(values.epochs) } : {}),
    ...(values.batch ? { batchSize: Number(values.batch) } : {}),
    ...(values.lr ? { learningRate: Number(values.lr) } : {}),
    ...(values.latent ? { latentDim: Number(values.latent) } : {}),
    ...(values.seed ? { seed: Number(values.seed) } : {}),
    ...(values.channels
      ? { channels: values.channels.split(",").map(Number) as [number, number, number] }
      : {}),
  });

  let data = loadTrainSplit(values["dataset-dir"]);
  if (values.subset) {
    const keep = Math.min(Number(values.subset), data.count);
    data = {
      ...data,
      count: keep,
      images: data.images.subarray(0, keep * data.rows * data.cols),
    };
  }
  console.error(`training on ${data.count} images, ${config.epochs} epochs`);

  if (values["checkpoint-dir"]) mkdirSync(values["checkpoint-dir"], { recursive: true });
  const result = await trainGan(config, data, {
    checkpointDir: values["checkpoint-dir"],
    onEpoch: (log) =>
      console.error(
        `epoch ${log.epoch}: g_loss=${log.gLoss.toFixed(4)} d_loss=${log.dLoss.toFixed(4)}`,
      ),
  });

  const logCsv = ["epoch,g_loss,d_loss"]
    .concat(result.log.map((l) => `${l.epoch},${l.gLoss},${l.dLoss}`))
    .join("\n") + "\n";
  writeFileSync(values.out + ".train_log.csv", logCsv);

  if (result.aborted) {
    console.error("training diverged (non-finite loss); exporting the last good checkpoint");
  }
  foldAndExport(result.generator, values.out);
  console.error(`wrote ${values.out}`);
  return result.aborted ? 4 : 0;
}

function cmdHeatmap(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      csv: { type: "string" },
      "out-dir": { type: "string" },
      noise: { type: "string" },
      nyquist: { type: "string" },
    },
  });
  if (!values.csv || !values["out-dir"]) {
    console.error("heatmap requires --csv and --out-dir");
    return 2;
  }
  const rows = parseAggregateCsv(readFileSync(values.csv, "utf-8"));
  const panels = renderHeatmaps(rows, {
    noise: values.noise ? Number(values.noise) : 0,
    nyquist: values.nyquist ? Number(values.nyquist) : 784,
  });
  mkdirSync(values["out-dir"], { recursive: true });
  for (const panel of panels) {
    const path = join(values["out-dir"], `heatmap_${panel.method}.svg`);
    writeFileSync(path, panel.svg);
    console.error(`wrote ${path}`);
  }
  return 0;
}

async function main(): Promise<number> {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "train") return await cmdTrain(rest);
    if (command === "heatmap") return cmdHeatmap(rest);
    console.error("usage: cli.js <train|heatmap> [options]");
    return 2;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
