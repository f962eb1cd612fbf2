/**
 * CLI: `train` fits the model on exported graphs + labeled instances,
 * `predict` writes prediction files for a directory of graphs.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { DEFAULT_CONFIG } from './model.js';
import { DEFAULT_OPTIM } from './optim.js';
import {
  TrainConfig,
  loadDataset,
  loadWeights,
  saveWeights,
  trainModel,
  writeTrainLog,
} from './train.js';
import { predictDirectory } from './predict.js';

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith('--') || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near ${key}`);
    }
    out.set(key.slice(2), argv[i + 1]);
  }
  return out;
}

function need(args: Map<string, string>, key: string): string {
  const v = args.get(key);
  if (v === undefined) throw new Error(`missing required flag --${key}`);
  return v;
}

function num(args: Map<string, string>, key: string, fallback: number): number {
  const v = args.get(key);
  return v === undefined ? fallback : Number(v);
}

function cmdTrain(args: Map<string, string>): void {
  const cfg: TrainConfig = {
    model: {
      cEnc: num(args, 'enc', DEFAULT_CONFIG.cEnc),
      cLstm: num(args, 'lstm', DEFAULT_CONFIG.cLstm),
      cDec: num(args, 'dec', DEFAULT_CONFIG.cDec),
      kMax: num(args, 'k-max', DEFAULT_CONFIG.kMax),
    },
    optim: {
      ...DEFAULT_OPTIM,
      lrInitial: num(args, 'lr', DEFAULT_OPTIM.lrInitial),
      lrMin: num(args, 'lr-min', DEFAULT_OPTIM.lrMin),
      weightDecay: num(args, 'weight-decay', DEFAULT_OPTIM.weightDecay),
    },
    epochs: num(args, 'epochs', 20),
    batchSize: num(args, 'batch', 16),
    seed: num(args, 'seed', 1),
    valFraction: num(args, 'val-fraction', 0.1),
    limit: args.has('limit') ? num(args, 'limit', 0) : undefined,
  };
  const outDir = need(args, 'out');
  fs.mkdirSync(outDir, { recursive: true });

  const dataset = loadDataset(
    need(args, 'manifest'),
    need(args, 'graphs'),
    cfg.model.kMax,
    cfg.seed,
    cfg.valFraction,
    cfg.limit,
  );
  console.log(
    `training on ${dataset.train.length} instances (${dataset.val.length} validation), ` +
      `positive-class weight ${dataset.posWeight.toFixed(3)}`,
  );
  const { model, log } = trainModel(dataset, cfg, (e) =>
    console.log(
      `epoch ${e.epoch}/${cfg.epochs}  loss ${e.loss.toFixed(4)}  val ${e.valLoss.toFixed(4)}  lr ${e.lr.toFixed(5)}`,
    ),
  );
  saveWeights(path.join(outDir, 'weights.json'), model, cfg.seed, dataset.posWeight);
  writeTrainLog(path.join(outDir, 'train_log.csv'), log);
  console.log(`wrote ${path.join(outDir, 'weights.json')}`);
}

function cmdPredict(args: Map<string, string>): void {
  const model = loadWeights(need(args, 'weights'));
  const count = predictDirectory(model, need(args, 'graphs'), need(args, 'out'));
  console.log(`wrote ${count} prediction files to ${args.get('out')}`);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const args = parseArgs(rest);
    if (command === 'train') cmdTrain(args);
    else if (command === 'predict') cmdPredict(args);
    else throw new Error(`unknown command ${command ?? '(none)'}; use train or predict`);
    return 0;
  } catch (err) {
    console.error(JSON.stringify({ error: (err as Error).message }));
    return 1;
  }
}

process.exitCode = main(process.argv.slice(2));
