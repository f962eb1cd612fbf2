/**
 * Inference: run the trained model over exported graphs and write prediction
 * files in the harness interchange format (rows in canonical edge order,
 * paired to instances by shared id).
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { normalizeGraph, readGraphFile } from './graph.js';
import type { Model } from './model.js';

export function predictToFile(model: Model, graphPath: string, outDir: string): string {
  const graph = normalizeGraph(readGraphFile(graphPath));
  const scores = model.predict(graph);
  const values: number[][] = [];
  for (let e = 0; e < scores.rows; e++) {
    const row: number[] = [];
    for (let t = 0; t < scores.cols; t++) row.push(scores.get(e, t));
    values.push(row);
  }
  const payload = { id: graph.id, k_max: model.config.kMax, values };
  const outPath = path.join(outDir, `${graph.id}.json`);
  fs.writeFileSync(outPath, JSON.stringify(payload), 'utf-8');
  return outPath;
}

export function predictDirectory(model: Model, graphsDir: string, outDir: string): number {
  fs.mkdirSync(outDir, { recursive: true });
  const files = fs
    .readdirSync(graphsDir)
    .filter((f) => f.endsWith('.json'))
    .sort();
  for (const f of files) predictToFile(model, path.join(graphsDir, f), outDir);
  return files.length;
}
