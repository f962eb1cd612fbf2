/** Shared test helpers: synthetic graphs shaped like the harness exports. */

import { Graph, FEATURE_DIM } from '../src/graph.js';
import { Mat } from '../src/mat.js';
import { Rng } from '../src/rng.js';

/**
 * Random bipartite graph with the association-matrix structure: targets are
 * nz measurement columns plus one always-present misdetection column per
 * source; detected edges survive with probability keepProb.
 */
export function randomGraph(rng: Rng, ns: number, nz: number, keepProb = 0.7, id = 'g'): Graph {
  const edges: [number, number][] = [];
  for (let i = 0; i < ns; i++) {
    for (let j = 0; j < nz; j++) {
      if (rng.float() < keepProb) edges.push([i, j]);
    }
    edges.push([i, nz + i]);
  }
  edges.sort((a, b) => (a[0] - b[0]) || (a[1] - b[1]));

  const nt = nz + ns;
  const src = new Mat(ns, FEATURE_DIM);
  const tgt = new Mat(nt, FEATURE_DIM);
  for (let i = 0; i < src.data.length; i++) src.data[i] = rng.float();
  for (let i = 0; i < tgt.data.length; i++) tgt.data[i] = rng.float();

  return {
    id,
    numSource: ns,
    numTarget: nt,
    sourceFeatures: src,
    targetFeatures: tgt,
    edgeSrc: Int32Array.from(edges.map((e) => e[0])),
    edgeTgt: Int32Array.from(edges.map((e) => e[1])),
    edgeAttr: Float64Array.from(edges.map(() => rng.float())),
  };
}

/**
 * Up to `count` distinct valid ranked labels for a graph: the all-misdetected
 * assignment plus variants that route one row through one of its detected
 * edges. Every referenced pair is a real edge and columns stay distinct.
 */
export function simpleLabels(g: Graph, count: number): number[][] {
  const nz = g.numTarget - g.numSource;
  const base = Array.from({ length: g.numSource }, (_, r) => nz + r);
  const labels: number[][] = [base];
  for (let e = 0; e < g.edgeSrc.length && labels.length < count; e++) {
    if (g.edgeTgt[e] < nz) {
      const variant = base.slice();
      variant[g.edgeSrc[e]] = g.edgeTgt[e];
      labels.push(variant);
    }
  }
  return labels;
}
