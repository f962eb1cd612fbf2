/**
 * Training pipeline: loads graphs exported by the assignment harness plus the
 * exact-solver labels from the instance files, builds edge-indicator targets,
 * and fits the model with AdamW and a cosine-annealed learning rate.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { Batch, Graph, batchGraphs, normalizeGraph, readGraphFile, targetsFromLabels } from './graph.js';
import { columnMask, positiveClassWeight, weightedBceFromLogits } from './loss.js';
import { Mat } from './mat.js';
import { Model, ModelConfig } from './model.js';
import { AdamW, DEFAULT_OPTIM, OptimConfig, cosineLr } from './optim.js';
import { Rng } from './rng.js';

export interface ManifestInstance {
  id: string;
  path: string;
  nu_s: number;
  vartheta: number;
  requested_k: number;
}

export interface Manifest {
  seed: number;
  k_max: number;
  instances: ManifestInstance[];
}

export interface TrainConfig {
  model: ModelConfig;
  optim: OptimConfig;
  epochs: number;
  batchSize: number;
  seed: number;
  valFraction: number;
  limit?: number;
}

export interface Example {
  graph: Graph;
  targets: Mat;
  labelCount: number;
}

export interface Dataset {
  train: Example[];
  val: Example[];
  posWeight: number;
  kMax: number;
}

export function readManifest(manifestPath: string): Manifest {
  const data = JSON.parse(fs.readFileSync(manifestPath, 'utf-8')) as Manifest;
  if (!Array.isArray(data.instances)) throw new Error('manifest has no instances');
  return data;
}

function readLabels(instancePath: string): number[][] {
  const data = JSON.parse(fs.readFileSync(instancePath, 'utf-8')) as {
    labels?: number[][];
  };
  if (!data.labels) throw new Error(`instance ${instancePath} carries no labels`);
  return data.labels;
}

/**
 * Assemble the training and validation splits. Graphs are normalized here;
 * instances whose label width exceeds the model's kMax are rejected.
 */
export function loadDataset(
  manifestPath: string,
  graphsDir: string,
  kMax: number,
  seed: number,
  valFraction: number,
  limit?: number,
): Dataset {
  const manifest = readManifest(manifestPath);
  if (manifest.k_max > kMax) {
    throw new Error(`dataset k_max ${manifest.k_max} exceeds model k_max ${kMax}`);
  }
  const root = path.dirname(manifestPath);
  let instances = manifest.instances;
  if (limit !== undefined) instances = instances.slice(0, limit);

  const examples: Example[] = [];
  for (const inst of instances) {
    const graph = normalizeGraph(readGraphFile(path.join(graphsDir, `${inst.id}.json`)));
    const labels = readLabels(path.join(root, inst.path));
    const { y, labelCount } = targetsFromLabels(graph, labels, kMax);
    examples.push({ graph, targets: y, labelCount });
  }

  const order = [...examples.keys()];
  new Rng(seed).shuffle(order);
  const valCount = Math.max(1, Math.floor(valFraction * examples.length));
  const val = order.slice(0, valCount).map((i) => examples[i]);
  const train = order.slice(valCount).map((i) => examples[i]);
  const posWeight = positiveClassWeight(
    train.map((e) => ({ y: e.targets, labelCount: e.labelCount })),
  );
  return { train, val, posWeight, kMax };
}

function batchTargets(batch: Batch, members: Example[], kMax: number): { y: Mat; mask: Mat } {
  const ne = batch.merged.edgeSrc.length;
  const y = new Mat(ne, kMax);
  const mask = new Mat(ne, kMax);
  members.forEach((ex, i) => {
    const { start } = batch.edgeOffsets[i];
    y.data.set(ex.targets.data, start * kMax);
    mask.data.set(columnMask(ex.graph.edgeSrc.length, kMax, ex.labelCount).data, start * kMax);
  });
  return { y, mask };
}

export interface EpochLog {
  epoch: number;
  loss: number;
  valLoss: number;
  lr: number;
}

export function evaluateLoss(model: Model, examples: Example[], posWeight: number): number {
  let total = 0;
  let entries = 0;
  for (const ex of examples) {
    const logits = model.forward(ex.graph);
    const mask = columnMask(ex.graph.edgeSrc.length, model.config.kMax, ex.labelCount);
    const r = weightedBceFromLogits(logits, ex.targets, mask, posWeight);
    total += r.loss * r.entries;
    entries += r.entries;
  }
  return total / entries;
}

export function trainModel(
  dataset: Dataset,
  cfg: TrainConfig,
  onEpoch?: (log: EpochLog) => void,
): { model: Model; log: EpochLog[] } {
  const model = new Model(cfg.model, cfg.seed);
  const optimizer = new AdamW(model.store, cfg.optim);
  const rng = new Rng(cfg.seed + 1);
  const log: EpochLog[] = [];

  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    optimizer.lr = cosineLr(cfg.optim, epoch, cfg.epochs);
    const order = [...dataset.train.keys()];
    rng.shuffle(order);

    let total = 0;
    let entries = 0;
    for (let at = 0; at < order.length; at += cfg.batchSize) {
      const members = order.slice(at, at + cfg.batchSize).map((i) => dataset.train[i]);
      const batch = batchGraphs(members.map((m) => m.graph));
      const { y, mask } = batchTargets(batch, members, cfg.model.kMax);

      const logits = model.forward(batch.merged);
      const r = weightedBceFromLogits(logits, y, mask, dataset.posWeight);
      model.store.zeroGrads();
      model.backward(r.dLogits);
      optimizer.update(model.store);

      total += r.loss * r.entries;
      entries += r.entries;
    }

    const entry: EpochLog = {
      epoch: epoch + 1,
      loss: total / entries,
      valLoss: dataset.val.length ? evaluateLoss(model, dataset.val, dataset.posWeight) : NaN,
      lr: optimizer.lr,
    };
    log.push(entry);
    onEpoch?.(entry);
  }
  return { model, log };
}

export interface WeightsFile {
  config: ModelConfig;
  seed: number;
  posWeight: number;
  params: Record<string, { rows: number; cols: number; w: number[] }>;
}

export function saveWeights(filePath: string, model: Model, seed: number, posWeight: number): void {
  const payload: WeightsFile = {
    config: model.config,
    seed,
    posWeight,
    params: model.store.toJSON(),
  };
  fs.writeFileSync(filePath, JSON.stringify(payload), 'utf-8');
}

export function loadWeights(filePath: string): Model {
  const payload = JSON.parse(fs.readFileSync(filePath, 'utf-8')) as WeightsFile;
  const model = new Model(payload.config, payload.seed);
  model.store.loadJSON(payload.params);
  return model;
}

export function writeTrainLog(filePath: string, log: EpochLog[]): void {
  const lines = ['epoch,loss,val_loss,lr'];
  for (const e of log) {
    lines.push(`${e.epoch},${e.loss.toFixed(6)},${e.valLoss.toFixed(6)},${e.lr.toFixed(6)}`);
  }
  fs.writeFileSync(filePath, lines.join('\n') + '\n', 'utf-8');
}
