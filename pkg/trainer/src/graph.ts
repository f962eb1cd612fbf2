/**
 * Bipartite graph input: loading the harness's graph files, [0,1] min-max
 * normalization (same rule as the exporter: per graph, each of the five
 * feature dimensions scaled over the union of both node sides, edge
 * attributes scaled over all edges, constant dimensions pinned to zero),
 * label-to-target conversion, and block-diagonal batching.
 */

import * as fs from 'node:fs';

import { Mat } from './mat.js';

export const FEATURE_DIM = 5;

export interface Graph {
  id: string;
  numSource: number;
  numTarget: number;
  sourceFeatures: Mat; // (numSource, 5)
  targetFeatures: Mat; // (numTarget, 5)
  edgeSrc: Int32Array;
  edgeTgt: Int32Array;
  edgeAttr: Float64Array;
}

export interface GraphFile {
  id: string;
  num_source: number;
  num_target: number;
  source_features: number[][];
  target_features: number[][];
  edges: [number, number][];
  edge_attrs: number[];
}

function toMat(rows: number[][], cols: number): Mat {
  const out = new Mat(rows.length, cols);
  for (let r = 0; r < rows.length; r++) {
    if (rows[r].length !== cols) throw new Error('feature row has wrong width');
    for (let c = 0; c < cols; c++) out.set(r, c, rows[r][c]);
  }
  return out;
}

export function readGraphFile(path: string): Graph {
  const raw = JSON.parse(fs.readFileSync(path, 'utf-8')) as GraphFile;
  const e = raw.edges.length;
  const edgeSrc = new Int32Array(e);
  const edgeTgt = new Int32Array(e);
  for (let i = 0; i < e; i++) {
    edgeSrc[i] = raw.edges[i][0];
    edgeTgt[i] = raw.edges[i][1];
  }
  if (raw.edge_attrs.length !== e) throw new Error(`graph ${raw.id}: attr/edge mismatch`);
  return {
    id: raw.id,
    numSource: raw.num_source,
    numTarget: raw.num_target,
    sourceFeatures: toMat(raw.source_features, FEATURE_DIM),
    targetFeatures: toMat(raw.target_features, FEATURE_DIM),
    edgeSrc,
    edgeTgt,
    edgeAttr: Float64Array.from(raw.edge_attrs),
  };
}

function minMaxInPlace(values: Float64Array, index: number[], stride: number): void {
  let lo = Infinity;
  let hi = -Infinity;
  for (const i of index) {
    const v = values[i * stride];
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const span = hi - lo;
  for (const i of index) {
    values[i * stride] = span === 0 ? 0 : (values[i * stride] - lo) / span;
  }
}

/** Per-graph min-max scaling of node features and edge attrs into [0,1]. */
export function normalizeGraph(g: Graph): Graph {
  const src = g.sourceFeatures.copy();
  const tgt = g.targetFeatures.copy();
  for (let d = 0; d < FEATURE_DIM; d++) {
    let lo = Infinity;
    let hi = -Infinity;
    for (let r = 0; r < src.rows; r++) {
      const v = src.get(r, d);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    for (let r = 0; r < tgt.rows; r++) {
      const v = tgt.get(r, d);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    const span = hi - lo;
    for (let r = 0; r < src.rows; r++) {
      src.set(r, d, span === 0 ? 0 : (src.get(r, d) - lo) / span);
    }
    for (let r = 0; r < tgt.rows; r++) {
      tgt.set(r, d, span === 0 ? 0 : (tgt.get(r, d) - lo) / span);
    }
  }
  const attr = g.edgeAttr.slice();
  minMaxInPlace(attr, [...attr.keys()], 1);
  return { ...g, sourceFeatures: src, targetFeatures: tgt, edgeAttr: attr };
}

export interface Targets {
  /** (numEdges, kMax) 0/1 indicators; column t is the t-th ranked assignment. */
  y: Mat;
  /** Number of labelled columns; columns >= labelCount are masked from the loss. */
  labelCount: number;
}

/**
 * Edge-indicator targets from ranked column-vector labels. labels[t][r] is
 * the column assigned to row r by the t-th best assignment.
 */
export function targetsFromLabels(g: Graph, labels: number[][], kMax: number): Targets {
  if (labels.length > kMax) {
    throw new Error(
      `graph ${g.id}: ${labels.length} label columns exceed model k_max ${kMax}`,
    );
  }
  const index = new Map<string, number>();
  for (let e = 0; e < g.edgeSrc.length; e++) {
    index.set(`${g.edgeSrc[e]},${g.edgeTgt[e]}`, e);
  }
  const y = new Mat(g.edgeSrc.length, kMax);
  for (let t = 0; t < labels.length; t++) {
    const cols = labels[t];
    if (cols.length !== g.numSource) throw new Error(`graph ${g.id}: bad label width`);
    for (let r = 0; r < cols.length; r++) {
      const e = index.get(`${r},${cols[r]}`);
      if (e === undefined) {
        throw new Error(`graph ${g.id}: label references missing edge (${r},${cols[r]})`);
      }
      y.set(e, t, 1);
    }
  }
  return { y, labelCount: labels.length };
}

export interface Batch {
  graphs: Graph[];
  merged: Graph;
  /** Edge-range [start, end) of each member graph inside the merged graph. */
  edgeOffsets: { start: number; end: number }[];
}

/** Concatenate graphs block-diagonally; no edges cross member boundaries. */
export function batchGraphs(graphs: Graph[]): Batch {
  let ns = 0;
  let nt = 0;
  let ne = 0;
  for (const g of graphs) {
    ns += g.numSource;
    nt += g.numTarget;
    ne += g.edgeSrc.length;
  }
  const src = new Mat(ns, FEATURE_DIM);
  const tgt = new Mat(nt, FEATURE_DIM);
  const edgeSrc = new Int32Array(ne);
  const edgeTgt = new Int32Array(ne);
  const edgeAttr = new Float64Array(ne);
  const edgeOffsets: { start: number; end: number }[] = [];

  let sOff = 0;
  let tOff = 0;
  let eOff = 0;
  for (const g of graphs) {
    src.data.set(g.sourceFeatures.data, sOff * FEATURE_DIM);
    tgt.data.set(g.targetFeatures.data, tOff * FEATURE_DIM);
    for (let e = 0; e < g.edgeSrc.length; e++) {
      edgeSrc[eOff + e] = g.edgeSrc[e] + sOff;
      edgeTgt[eOff + e] = g.edgeTgt[e] + tOff;
      edgeAttr[eOff + e] = g.edgeAttr[e];
    }
    edgeOffsets.push({ start: eOff, end: eOff + g.edgeSrc.length });
    sOff += g.numSource;
    tOff += g.numTarget;
    eOff += g.edgeSrc.length;
  }

  return {
    graphs,
    merged: {
      id: `batch(${graphs.map((g) => g.id).join(',')})`,
      numSource: ns,
      numTarget: nt,
      sourceFeatures: src,
      targetFeatures: tgt,
      edgeSrc,
      edgeTgt,
      edgeAttr,
    },
    edgeOffsets,
  };
}
