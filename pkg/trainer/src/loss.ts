/**
 * Class-weighted binary cross-entropy on logits with per-entry masking.
 * The positive class is weighted by (#zeros / #ones) over the training
 * targets to counter label sparsity; columns beyond an instance's available
 * ranked solutions are masked out entirely.
 */

import { Mat, sigmoid } from './mat.js';

export interface LossResult {
  loss: number;
  dLogits: Mat;
  entries: number;
}

function softplus(x: number): number {
  // ln(1 + e^x) without overflow
  return x > 0 ? x + Math.log1p(Math.exp(-x)) : Math.log1p(Math.exp(x));
}

export function weightedBceFromLogits(
  logits: Mat,
  targets: Mat,
  mask: Mat,
  posWeight: number,
): LossResult {
  if (
    logits.rows !== targets.rows ||
    logits.cols !== targets.cols ||
    mask.rows !== logits.rows ||
    mask.cols !== logits.cols
  ) {
    throw new Error('loss: shape mismatch');
  }
  let total = 0;
  let entries = 0;
  const dLogits = new Mat(logits.rows, logits.cols);
  for (let i = 0; i < logits.data.length; i++) {
    if (mask.data[i] === 0) continue;
    entries++;
    const u = logits.data[i];
    const y = targets.data[i];
    // y=1: -ln sigma(u) = softplus(-u);  y=0: -ln(1-sigma(u)) = softplus(u)
    total += posWeight * y * softplus(-u) + (1 - y) * softplus(u);
    const p = sigmoid(u);
    dLogits.data[i] = posWeight * y * (p - 1) + (1 - y) * p;
  }
  if (entries === 0) throw new Error('loss: everything is masked');
  for (let i = 0; i < dLogits.data.length; i++) dLogits.data[i] /= entries;
  return { loss: total / entries, dLogits, entries };
}

/** Mask matrix for one instance: ones in the first labelCount columns. */
export function columnMask(rows: number, kMax: number, labelCount: number): Mat {
  const m = new Mat(rows, kMax);
  for (let r = 0; r < rows; r++) {
    for (let t = 0; t < labelCount; t++) m.data[r * kMax + t] = 1;
  }
  return m;
}

/** (#zeros / #ones) over unmasked target entries; 1.0 when degenerate. */
export function positiveClassWeight(pairs: { y: Mat; labelCount: number }[]): number {
  let ones = 0;
  let zeros = 0;
  for (const { y, labelCount } of pairs) {
    for (let r = 0; r < y.rows; r++) {
      for (let t = 0; t < labelCount; t++) {
        if (y.data[r * y.cols + t] === 1) ones++;
        else zeros++;
      }
    }
  }
  if (ones === 0 || zeros === 0) return 1;
  return zeros / ones;
}
