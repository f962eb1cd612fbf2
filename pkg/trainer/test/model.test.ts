import { describe, expect, it } from 'vitest';

import { Graph, batchGraphs, normalizeGraph } from '../src/graph.js';
import { Model, ModelConfig } from '../src/model.js';
import { Rng } from '../src/rng.js';
import { randomGraph } from './util.js';

const TINY: ModelConfig = { cEnc: 4, cLstm: 6, cDec: 4, kMax: 3 };

describe('shapes', () => {
  it('emits (numEdges, kMax) scores in (0,1) on 50 varied graphs', () => {
    const model = new Model(TINY, 7);
    const rng = new Rng(2);
    for (let i = 0; i < 50; i++) {
      const g = normalizeGraph(randomGraph(rng, 1 + rng.int(6), 1 + rng.int(7), 0.6, `g${i}`));
      const scores = model.predict(g);
      expect(scores.rows).toBe(g.edgeSrc.length);
      expect(scores.cols).toBe(TINY.kMax);
      for (const v of scores.data) {
        expect(v).toBeGreaterThan(0);
        expect(v).toBeLessThan(1);
      }
    }
  });
});

describe('batching', () => {
  it('matches unbatched outputs within 1e-5', () => {
    const model = new Model(TINY, 9);
    const rng = new Rng(3);
    const graphs = [
      normalizeGraph(randomGraph(rng, 2, 3, 0.7, 'a')),
      normalizeGraph(randomGraph(rng, 4, 5, 0.5, 'b')),
      normalizeGraph(randomGraph(rng, 1, 2, 0.9, 'c')),
    ];
    const batch = batchGraphs(graphs);
    const batched = model.predict(batch.merged);
    graphs.forEach((g, i) => {
      const single = model.predict(g);
      const { start } = batch.edgeOffsets[i];
      for (let e = 0; e < g.edgeSrc.length; e++) {
        for (let t = 0; t < TINY.kMax; t++) {
          expect(Math.abs(batched.get(start + e, t) - single.get(e, t))).toBeLessThan(1e-5);
        }
      }
    });
  });
});

describe('determinism', () => {
  it('same seed, same graph, same scores', () => {
    const rng = new Rng(4);
    const g = normalizeGraph(randomGraph(rng, 3, 4, 0.6));
    const a = new Model(TINY, 42).predict(g);
    const b = new Model(TINY, 42).predict(g);
    expect(Array.from(a.data)).toEqual(Array.from(b.data));
  });
});

function permuteTargets(g: Graph, perm: number[]): Graph {
  // perm[j] = new index of old target j; edges re-sorted canonically
  const nt = g.numTarget;
  const tgt = g.targetFeatures.copy();
  for (let j = 0; j < nt; j++) {
    for (let d = 0; d < 5; d++) tgt.set(perm[j], d, g.targetFeatures.get(j, d));
  }
  const triples = Array.from({ length: g.edgeSrc.length }, (_, e) => ({
    s: g.edgeSrc[e],
    t: perm[g.edgeTgt[e]],
    a: g.edgeAttr[e],
  }));
  triples.sort((x, y) => (x.s - y.s) || (x.t - y.t));
  return {
    ...g,
    targetFeatures: tgt,
    edgeSrc: Int32Array.from(triples.map((x) => x.s)),
    edgeTgt: Int32Array.from(triples.map((x) => x.t)),
    edgeAttr: Float64Array.from(triples.map((x) => x.a)),
  };
}

describe('permutation consistency', () => {
  it('permuting target nodes permutes outputs with them', () => {
    const model = new Model(TINY, 11);
    const rng = new Rng(6);
    const g = normalizeGraph(randomGraph(rng, 3, 4, 0.7));
    const perm = [...Array(g.numTarget).keys()];
    rng.shuffle(perm);
    const permuted = permuteTargets(g, perm);

    const base = model.predict(g);
    const moved = model.predict(permuted);

    const movedIndex = new Map<string, number>();
    for (let e = 0; e < permuted.edgeSrc.length; e++) {
      movedIndex.set(`${permuted.edgeSrc[e]},${permuted.edgeTgt[e]}`, e);
    }
    for (let e = 0; e < g.edgeSrc.length; e++) {
      const me = movedIndex.get(`${g.edgeSrc[e]},${perm[g.edgeTgt[e]]}`)!;
      for (let t = 0; t < TINY.kMax; t++) {
        expect(Math.abs(base.get(e, t) - moved.get(me, t))).toBeLessThan(1e-9);
      }
    }
  });
});
