/**
 * Trainable layers with explicit forward/backward passes. Each layer caches
 * what its backward needs; a forward call must be paired with one backward
 * before the next forward (the training loop and gradient check both do).
 */

import {
  Mat,
  accumBiasGrad,
  addBiasInPlace,
  leakyRelu,
  leakyReluGrad,
  matmul,
  matmulTA,
  matmulTB,
} from './mat.js';
import type { Graph } from './graph.js';
import { Rng } from './rng.js';

export class Param {
  readonly name: string;
  readonly rows: number;
  readonly cols: number;
  readonly w: Float64Array;
  readonly g: Float64Array;

  constructor(name: string, rows: number, cols: number) {
    this.name = name;
    this.rows = rows;
    this.cols = cols;
    this.w = new Float64Array(rows * cols);
    this.g = new Float64Array(rows * cols);
  }

  asMat(): Mat {
    return new Mat(this.rows, this.cols, this.w);
  }

  gradMat(): Mat {
    return new Mat(this.rows, this.cols, this.g);
  }
}

export class ParamStore {
  readonly params = new Map<string, Param>();
  private readonly rng: Rng;

  constructor(seed: number) {
    this.rng = new Rng(seed);
  }

  /** Glorot-uniform weight matrix. */
  weight(name: string, rows: number, cols: number): Param {
    const p = this.alloc(name, rows, cols);
    const limit = Math.sqrt(6 / (rows + cols));
    for (let i = 0; i < p.w.length; i++) p.w[i] = this.rng.uniform(-limit, limit);
    return p;
  }

  /** Zero-initialized parameter (biases, attention vectors get small init). */
  alloc(name: string, rows: number, cols: number): Param {
    if (this.params.has(name)) throw new Error(`duplicate param ${name}`);
    const p = new Param(name, rows, cols);
    this.params.set(name, p);
    return p;
  }

  vector(name: string, cols: number): Param {
    const p = this.alloc(name, 1, cols);
    const limit = Math.sqrt(6 / (1 + cols));
    for (let i = 0; i < cols; i++) p.w[i] = this.rng.uniform(-limit, limit);
    return p;
  }

  zeroGrads(): void {
    for (const p of this.params.values()) p.g.fill(0);
  }

  toJSON(): Record<string, { rows: number; cols: number; w: number[] }> {
    const out: Record<string, { rows: number; cols: number; w: number[] }> = {};
    for (const [name, p] of this.params) {
      out[name] = { rows: p.rows, cols: p.cols, w: Array.from(p.w) };
    }
    return out;
  }

  loadJSON(data: Record<string, { rows: number; cols: number; w: number[] }>): void {
    for (const [name, p] of this.params) {
      const saved = data[name];
      if (!saved) throw new Error(`weights file is missing parameter ${name}`);
      if (saved.rows !== p.rows || saved.cols !== p.cols) {
        throw new Error(`parameter ${name} has shape ${saved.rows}x${saved.cols}, expected ${p.rows}x${p.cols}`);
      }
      p.w.set(saved.w);
    }
  }
}

/** One message-passing direction: sender side A, receiver side B. */
export interface Adjacency {
  numA: number;
  numB: number;
  edgeA: Int32Array;
  edgeB: Int32Array;
  attr: Float64Array;
  /** GCN aggregation coefficient attr / sqrt(degA * degB) per edge. */
  coef: Float64Array;
  /** Edge indices grouped by receiver (for attention softmax). */
  groups: Int32Array[];
}

function buildDirection(
  numA: number,
  numB: number,
  edgeA: Int32Array,
  edgeB: Int32Array,
  attr: Float64Array,
): Adjacency {
  const degA = new Float64Array(numA);
  const degB = new Float64Array(numB);
  for (let e = 0; e < edgeA.length; e++) {
    degA[edgeA[e]]++;
    degB[edgeB[e]]++;
  }
  const coef = new Float64Array(edgeA.length);
  for (let e = 0; e < edgeA.length; e++) {
    coef[e] = attr[e] / Math.sqrt(degA[edgeA[e]] * degB[edgeB[e]]);
  }
  const lists: number[][] = Array.from({ length: numB }, () => []);
  for (let e = 0; e < edgeA.length; e++) lists[edgeB[e]].push(e);
  return {
    numA,
    numB,
    edgeA,
    edgeB,
    attr,
    coef,
    groups: lists.map((l) => Int32Array.from(l)),
  };
}

export interface GraphAdjacency {
  toTarget: Adjacency; // messages source -> target
  toSource: Adjacency; // mirrored: target -> source
}

export function buildAdjacency(g: Graph): GraphAdjacency {
  return {
    toTarget: buildDirection(g.numSource, g.numTarget, g.edgeSrc, g.edgeTgt, g.edgeAttr),
    toSource: buildDirection(g.numTarget, g.numSource, g.edgeTgt, g.edgeSrc, g.edgeAttr),
  };
}

export class Linear {
  readonly W: Param;
  readonly b: Param;
  private x: Mat | null = null;

  constructor(store: ParamStore, name: string, inDim: number, outDim: number) {
    this.W = store.weight(`${name}.W`, inDim, outDim);
    this.b = store.alloc(`${name}.b`, 1, outDim);
  }

  forward(x: Mat): Mat {
    this.x = x;
    const y = matmul(x, this.W.asMat());
    addBiasInPlace(y, this.b.w);
    return y;
  }

  backward(dy: Mat): Mat {
    const x = this.x!;
    matmulTA(x, dy, this.W.gradMat());
    accumBiasGrad(dy, this.b.g);
    return matmulTB(dy, this.W.asMat());
  }
}

/**
 * Graph-convolution update of one node side: receivers combine an
 * attr-weighted, degree-normalized sum of sender features with their own
 * features, followed by leaky ReLU.
 */
export class GcnSide {
  readonly W: Param; // aggregated-neighbor projection
  readonly U: Param; // self projection
  readonly b: Param;
  private cache: { adj: Adjacency; xA: Mat; agg: Mat; xB: Mat; pre: Mat } | null = null;

  constructor(store: ParamStore, name: string, inDim: number, outDim: number) {
    this.W = store.weight(`${name}.W`, inDim, outDim);
    this.U = store.weight(`${name}.U`, inDim, outDim);
    this.b = store.alloc(`${name}.b`, 1, outDim);
  }

  forward(adj: Adjacency, xA: Mat, xB: Mat): Mat {
    const agg = new Mat(adj.numB, xA.cols);
    for (let e = 0; e < adj.edgeA.length; e++) {
      const a = adj.edgeA[e];
      const bNode = adj.edgeB[e];
      const c = adj.coef[e];
      for (let d = 0; d < xA.cols; d++) {
        agg.data[bNode * xA.cols + d] += c * xA.data[a * xA.cols + d];
      }
    }
    const pre = matmul(agg, this.W.asMat());
    const self = matmul(xB, this.U.asMat());
    for (let i = 0; i < pre.data.length; i++) pre.data[i] += self.data[i];
    addBiasInPlace(pre, this.b.w);
    this.cache = { adj, xA, agg, xB, pre };
    return leakyRelu(pre);
  }

  /** Returns [dxA, dxB]. */
  backward(dy: Mat): [Mat, Mat] {
    const { adj, xA, agg, xB, pre } = this.cache!;
    const dpre = leakyReluGrad(pre, dy);
    matmulTA(agg, dpre, this.W.gradMat());
    matmulTA(xB, dpre, this.U.gradMat());
    accumBiasGrad(dpre, this.b.g);
    const dagg = matmulTB(dpre, this.W.asMat());
    const dxB = matmulTB(dpre, this.U.asMat());
    const dxA = new Mat(adj.numA, xA.cols);
    for (let e = 0; e < adj.edgeA.length; e++) {
      const a = adj.edgeA[e];
      const bNode = adj.edgeB[e];
      const c = adj.coef[e];
      for (let d = 0; d < xA.cols; d++) {
        dxA.data[a * xA.cols + d] += c * dagg.data[bNode * xA.cols + d];
      }
    }
    return [dxA, dxB];
  }
}

const ATTENTION_SLOPE = 0.2;

/**
 * Graph-attention update of one node side (single head). Attention logits
 * combine projected sender and receiver features with an edge-attribute term;
 * softmax runs over each receiver's incoming edges. A root weight keeps the
 * receiver's own features in its output (bipartite graphs have no self
 * loops, so without it a node's identity would wash out of the encoding).
 */
export class GatSide {
  readonly Wsrc: Param;
  readonly Wdst: Param;
  readonly Wself: Param;
  readonly aSrc: Param;
  readonly aDst: Param;
  readonly wAttr: Param;
  readonly b: Param;
  private cache: {
    adj: Adjacency;
    xA: Mat;
    xB: Mat;
    HA: Mat;
    HB: Mat;
    pre: Float64Array;
    alpha: Float64Array;
  } | null = null;

  constructor(store: ParamStore, name: string, inDim: number, outDim: number) {
    this.Wsrc = store.weight(`${name}.Wsrc`, inDim, outDim);
    this.Wdst = store.weight(`${name}.Wdst`, inDim, outDim);
    this.Wself = store.weight(`${name}.Wself`, inDim, outDim);
    this.aSrc = store.vector(`${name}.aSrc`, outDim);
    this.aDst = store.vector(`${name}.aDst`, outDim);
    this.wAttr = store.vector(`${name}.wAttr`, 1);
    this.b = store.alloc(`${name}.b`, 1, outDim);
  }

  forward(adj: Adjacency, xA: Mat, xB: Mat): Mat {
    const HA = matmul(xA, this.Wsrc.asMat());
    const HB = matmul(xB, this.Wdst.asMat());
    const out = HA.cols;
    const ne = adj.edgeA.length;

    const pre = new Float64Array(ne);
    for (let e = 0; e < ne; e++) {
      const a = adj.edgeA[e];
      const bNode = adj.edgeB[e];
      let s = this.wAttr.w[0] * adj.attr[e];
      for (let d = 0; d < out; d++) {
        s += this.aSrc.w[d] * HA.data[a * out + d] + this.aDst.w[d] * HB.data[bNode * out + d];
      }
      pre[e] = s;
    }

    const alpha = new Float64Array(ne);
    for (const group of adj.groups) {
      if (group.length === 0) continue;
      let max = -Infinity;
      for (const e of group) {
        const act = pre[e] > 0 ? pre[e] : ATTENTION_SLOPE * pre[e];
        if (act > max) max = act;
      }
      let sum = 0;
      for (const e of group) {
        const act = pre[e] > 0 ? pre[e] : ATTENTION_SLOPE * pre[e];
        const v = Math.exp(act - max);
        alpha[e] = v;
        sum += v;
      }
      for (const e of group) alpha[e] /= sum;
    }

    const y = matmul(xB, this.Wself.asMat());
    for (let e = 0; e < ne; e++) {
      const a = adj.edgeA[e];
      const bNode = adj.edgeB[e];
      const w = alpha[e];
      for (let d = 0; d < out; d++) {
        y.data[bNode * out + d] += w * HA.data[a * out + d];
      }
    }
    addBiasInPlace(y, this.b.w);
    this.cache = { adj, xA, xB, HA, HB, pre, alpha };
    return y;
  }

  /** Returns [dxA, dxB]. */
  backward(dy: Mat): [Mat, Mat] {
    const { adj, xA, xB, HA, HB, pre, alpha } = this.cache!;
    const out = HA.cols;
    const ne = adj.edgeA.length;
    accumBiasGrad(dy, this.b.g);

    const dHA = new Mat(HA.rows, out);
    const dHB = new Mat(HB.rows, out);
    const dAlpha = new Float64Array(ne);
    for (let e = 0; e < ne; e++) {
      const a = adj.edgeA[e];
      const bNode = adj.edgeB[e];
      let s = 0;
      for (let d = 0; d < out; d++) {
        const g = dy.data[bNode * out + d];
        s += g * HA.data[a * out + d];
        dHA.data[a * out + d] += alpha[e] * g;
      }
      dAlpha[e] = s;
    }

    const dPre = new Float64Array(ne);
    for (const group of adj.groups) {
      if (group.length === 0) continue;
      let inner = 0;
      for (const e of group) inner += dAlpha[e] * alpha[e];
      for (const e of group) {
        const dAct = alpha[e] * (dAlpha[e] - inner);
        dPre[e] = pre[e] > 0 ? dAct : ATTENTION_SLOPE * dAct;
      }
    }

    for (let e = 0; e < ne; e++) {
      const a = adj.edgeA[e];
      const bNode = adj.edgeB[e];
      const g = dPre[e];
      this.wAttr.g[0] += g * adj.attr[e];
      for (let d = 0; d < out; d++) {
        dHA.data[a * out + d] += g * this.aSrc.w[d];
        dHB.data[bNode * out + d] += g * this.aDst.w[d];
        this.aSrc.g[d] += g * HA.data[a * out + d];
        this.aDst.g[d] += g * HB.data[bNode * out + d];
      }
    }

    matmulTA(xA, dHA, this.Wsrc.gradMat());
    matmulTA(xB, dHB, this.Wdst.gradMat());
    matmulTA(xB, dy, this.Wself.gradMat());
    const dxB = matmulTB(dHB, this.Wdst.asMat());
    const dxBself = matmulTB(dy, this.Wself.asMat());
    for (let i = 0; i < dxB.data.length; i++) dxB.data[i] += dxBself.data[i];
    return [matmulTB(dHA, this.Wsrc.asMat()), dxB];
  }
}

/** Standard LSTM unrolled over a fixed number of steps (batch = rows). */
export class Lstm {
  readonly W: Param; // (in, 4H) gate order [i, f, g, o]
  readonly U: Param; // (H, 4H)
  readonly b: Param; // (1, 4H)
  readonly hidden: number;
  private cache:
    | {
        steps: Mat[];
        i: Mat[];
        f: Mat[];
        g: Mat[];
        o: Mat[];
        c: Mat[];
        tc: Mat[];
        h: Mat[];
      }
    | null = null;

  constructor(store: ParamStore, name: string, inDim: number, hidden: number) {
    this.W = store.weight(`${name}.W`, inDim, 4 * hidden);
    this.U = store.weight(`${name}.U`, hidden, 4 * hidden);
    this.b = store.alloc(`${name}.b`, 1, 4 * hidden);
    // forget-gate bias starts at 1 so early training does not flush state
    for (let d = hidden; d < 2 * hidden; d++) this.b.w[d] = 1;
    this.hidden = hidden;
  }

  forward(steps: Mat[]): Mat[] {
    const H = this.hidden;
    const n = steps[0].rows;
    let h = new Mat(n, H);
    let c = new Mat(n, H);
    const cache = {
      steps,
      i: [] as Mat[],
      f: [] as Mat[],
      g: [] as Mat[],
      o: [] as Mat[],
      c: [] as Mat[],
      tc: [] as Mat[],
      h: [new Mat(n, H)] as Mat[], // h_0
    };
    const outputs: Mat[] = [];
    for (const x of steps) {
      const z = matmul(x, this.W.asMat());
      const rec = matmul(h, this.U.asMat());
      for (let idx = 0; idx < z.data.length; idx++) z.data[idx] += rec.data[idx];
      addBiasInPlace(z, this.b.w);

      const gi = new Mat(n, H);
      const gf = new Mat(n, H);
      const gg = new Mat(n, H);
      const go = new Mat(n, H);
      const cNew = new Mat(n, H);
      const tc = new Mat(n, H);
      const hNew = new Mat(n, H);
      for (let r = 0; r < n; r++) {
        const zOff = r * 4 * H;
        const off = r * H;
        for (let d = 0; d < H; d++) {
          const iv = 1 / (1 + Math.exp(-z.data[zOff + d]));
          const fv = 1 / (1 + Math.exp(-z.data[zOff + H + d]));
          const gv = Math.tanh(z.data[zOff + 2 * H + d]);
          const ov = 1 / (1 + Math.exp(-z.data[zOff + 3 * H + d]));
          const cv = fv * c.data[off + d] + iv * gv;
          const tcv = Math.tanh(cv);
          gi.data[off + d] = iv;
          gf.data[off + d] = fv;
          gg.data[off + d] = gv;
          go.data[off + d] = ov;
          cNew.data[off + d] = cv;
          tc.data[off + d] = tcv;
          hNew.data[off + d] = ov * tcv;
        }
      }
      cache.i.push(gi);
      cache.f.push(gf);
      cache.g.push(gg);
      cache.o.push(go);
      cache.c.push(cNew);
      cache.tc.push(tc);
      cache.h.push(hNew);
      outputs.push(hNew);
      h = hNew;
      c = cNew;
    }
    this.cache = cache;
    return outputs;
  }

  backward(dOutputs: Mat[]): Mat[] {
    const { steps, i, f, g, o, c, tc, h } = this.cache!;
    const H = this.hidden;
    const n = steps[0].rows;
    const T = steps.length;
    const dxs: Mat[] = new Array(T);
    let dhCarry = new Mat(n, H);
    let dcCarry = new Mat(n, H);

    for (let t = T - 1; t >= 0; t--) {
      const dz = new Mat(n, 4 * H);
      const cPrev = t > 0 ? c[t - 1] : new Mat(n, H);
      const dcPrev = new Mat(n, H);
      for (let r = 0; r < n; r++) {
        const off = r * H;
        const zOff = r * 4 * H;
        for (let d = 0; d < H; d++) {
          const dh = dOutputs[t].data[off + d] + dhCarry.data[off + d];
          const ov = o[t].data[off + d];
          const tcv = tc[t].data[off + d];
          const dO = dh * tcv;
          const dc = dcCarry.data[off + d] + dh * ov * (1 - tcv * tcv);
          const iv = i[t].data[off + d];
          const fv = f[t].data[off + d];
          const gv = g[t].data[off + d];
          const dF = dc * cPrev.data[off + d];
          const dI = dc * gv;
          const dG = dc * iv;
          dcPrev.data[off + d] = dc * fv;
          dz.data[zOff + d] = dI * iv * (1 - iv);
          dz.data[zOff + H + d] = dF * fv * (1 - fv);
          dz.data[zOff + 2 * H + d] = dG * (1 - gv * gv);
          dz.data[zOff + 3 * H + d] = dO * ov * (1 - ov);
        }
      }
      matmulTA(steps[t], dz, this.W.gradMat());
      matmulTA(h[t], dz, this.U.gradMat()); // h[t] is h_{t-1} (cache.h holds h_0..h_T)
      accumBiasGrad(dz, this.b.g);
      dxs[t] = matmulTB(dz, this.W.asMat());
      dhCarry = matmulTB(dz, this.U.asMat());
      dcCarry = dcPrev;
    }
    return dxs;
  }
}
