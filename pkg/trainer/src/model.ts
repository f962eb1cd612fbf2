/**
 * Encoder-decoder network predicting ranked assignments as edge scores.
 *
 * Encoder: two mirrored graph-convolution blocks (feature dim 5 -> cEnc ->
 * cEnc*kMax) and two mirrored graph-attention blocks at width cEnc*kMax; a
 * parallel two-layer linear stack lifts the scalar edge attribute to the
 * same width. Source/target encodings are gathered per edge and combined by
 * element-wise product.
 *
 * Decoder: two LSTMs (one over the node product, one over the encoded edge
 * features) receive the full encoded vector as the first-step input and are
 * unrolled for kMax steps on their own hidden state, yielding one feature
 * set per ranked solution; their outputs are multiplied, activated, and
 * passed through per-step linear groups, where group 2 at step t >= 2 sees
 * the concatenation of group 1's step-t output with group 2's previous
 * output. A per-step linear head emits one logit per edge; sigmoid turns
 * logits into scores, so the output is (numEdges, kMax).
 */

import type { Graph } from './graph.js';
import {
  GatSide,
  GcnSide,
  GraphAdjacency,
  Linear,
  Lstm,
  ParamStore,
  buildAdjacency,
} from './layers.js';
import { Mat, concatCols, leakyRelu, leakyReluGrad, elementwiseMul, sigmoid } from './mat.js';

export interface ModelConfig {
  cEnc: number;
  cLstm: number;
  cDec: number;
  kMax: number;
}

export const DEFAULT_CONFIG: ModelConfig = { cEnc: 32, cLstm: 128, cDec: 32, kMax: 10 };

function addInPlace(a: Mat, b: Mat): void {
  for (let i = 0; i < a.data.length; i++) a.data[i] += b.data[i];
}

export class Model {
  readonly config: ModelConfig;
  readonly store: ParamStore;

  private readonly gcn1s: GcnSide;
  private readonly gcn1t: GcnSide;
  private readonly gcn2s: GcnSide;
  private readonly gcn2t: GcnSide;
  private readonly gat1s: GatSide;
  private readonly gat1t: GatSide;
  private readonly gat2s: GatSide;
  private readonly gat2t: GatSide;
  private readonly edgeLin1: Linear;
  private readonly edgeLin2: Linear;
  private readonly lstmX: Lstm;
  private readonly lstmE: Lstm;
  private readonly group1: Linear[];
  private readonly group2: Linear[];
  private readonly heads: Linear[];

  private cache: {
    graph: Graph;
    adj: GraphAdjacency;
    xs3raw: Mat;
    xt3raw: Mat;
    xs4: Mat;
    xt4: Mat;
    e1pre: Mat;
    xMul: Mat;
    zPre: Mat[];
    hx: Mat[];
    he: Mat[];
    g1pre: Mat[];
    g1: Mat[];
    g2pre: Mat[];
    g2: Mat[];
  } | null = null;

  constructor(config: ModelConfig, seed = 1) {
    this.config = config;
    const { cEnc, cLstm, cDec, kMax } = config;
    const wide = cEnc * kMax;
    const store = new ParamStore(seed);
    this.store = store;

    this.gcn1s = new GcnSide(store, 'enc.gcn1.src', 5, cEnc);
    this.gcn1t = new GcnSide(store, 'enc.gcn1.tgt', 5, cEnc);
    this.gcn2s = new GcnSide(store, 'enc.gcn2.src', cEnc, wide);
    this.gcn2t = new GcnSide(store, 'enc.gcn2.tgt', cEnc, wide);
    this.gat1s = new GatSide(store, 'enc.gat1.src', wide, wide);
    this.gat1t = new GatSide(store, 'enc.gat1.tgt', wide, wide);
    this.gat2s = new GatSide(store, 'enc.gat2.src', wide, wide);
    this.gat2t = new GatSide(store, 'enc.gat2.tgt', wide, wide);
    this.edgeLin1 = new Linear(store, 'enc.edge1', 1, cEnc);
    this.edgeLin2 = new Linear(store, 'enc.edge2', cEnc, wide);

    this.lstmX = new Lstm(store, 'dec.lstmX', wide, cLstm);
    this.lstmE = new Lstm(store, 'dec.lstmE', wide, cLstm);
    this.group1 = [];
    this.group2 = [];
    this.heads = [];
    for (let t = 0; t < kMax; t++) {
      this.group1.push(new Linear(store, `dec.g1.${t}`, cLstm, cDec));
      this.group2.push(new Linear(store, `dec.g2.${t}`, t === 0 ? cDec : 2 * cDec, cDec));
      this.heads.push(new Linear(store, `dec.head.${t}`, cDec, 1));
    }
  }

  /** Raw logits of shape (numEdges, kMax); apply sigmoid for scores. */
  forward(graph: Graph): Mat {
    const { cEnc, kMax } = this.config;
    const adj = buildAdjacency(graph);
    const xs0 = graph.sourceFeatures;
    const xt0 = graph.targetFeatures;

    // Mirrored blocks: both sides update in parallel from the block input.
    const xs1 = this.gcn1s.forward(adj.toSource, xt0, xs0);
    const xt1 = this.gcn1t.forward(adj.toTarget, xs0, xt0);
    const xs2 = this.gcn2s.forward(adj.toSource, xt1, xs1);
    const xt2 = this.gcn2t.forward(adj.toTarget, xs1, xt1);
    // Residual connections around both attention blocks (widths match).
    const xs3raw = this.gat1s.forward(adj.toSource, xt2, xs2);
    const xt3raw = this.gat1t.forward(adj.toTarget, xs2, xt2);
    const xs3 = leakyRelu(xs3raw);
    const xt3 = leakyRelu(xt3raw);
    addInPlace(xs3, xs2);
    addInPlace(xt3, xt2);
    const xs4 = this.gat2s.forward(adj.toSource, xt3, xs3);
    const xt4 = this.gat2t.forward(adj.toTarget, xs3, xt3);
    addInPlace(xs4, xs3);
    addInPlace(xt4, xt3);

    const ne = graph.edgeSrc.length;
    const attrMat = new Mat(ne, 1, Float64Array.from(graph.edgeAttr));
    const e1pre = this.edgeLin1.forward(attrMat);
    const eFtr = this.edgeLin2.forward(leakyRelu(e1pre));

    const wide = cEnc * kMax;
    const xMul = new Mat(ne, wide);
    for (let e = 0; e < ne; e++) {
      const s = graph.edgeSrc[e] * wide;
      const t = graph.edgeTgt[e] * wide;
      for (let d = 0; d < wide; d++) {
        xMul.data[e * wide + d] = xs4.data[s + d] * xt4.data[t + d];
      }
    }

    // The encoded vectors enter at step 1; later steps run on hidden state.
    const stepsX: Mat[] = [xMul];
    const stepsE: Mat[] = [eFtr];
    for (let t = 1; t < kMax; t++) {
      stepsX.push(new Mat(ne, wide));
      stepsE.push(new Mat(ne, wide));
    }
    const hx = this.lstmX.forward(stepsX);
    const he = this.lstmE.forward(stepsE);

    const zPre: Mat[] = [];
    const g1pre: Mat[] = [];
    const g1: Mat[] = [];
    const g2pre: Mat[] = [];
    const g2: Mat[] = [];
    const logits = new Mat(ne, kMax);
    for (let t = 0; t < kMax; t++) {
      const pre = elementwiseMul(hx[t], he[t]);
      zPre.push(pre);
      const z = leakyRelu(pre);
      const p1 = this.group1[t].forward(z);
      g1pre.push(p1);
      g1.push(leakyRelu(p1));
      const input = t === 0 ? g1[0] : concatCols(g1[t], g2[t - 1]);
      const p2 = this.group2[t].forward(input);
      g2pre.push(p2);
      g2.push(leakyRelu(p2));
      const col = this.heads[t].forward(g2[t]);
      for (let e = 0; e < ne; e++) logits.data[e * kMax + t] = col.data[e];
    }

    this.cache = { graph, adj, xs3raw, xt3raw, xs4, xt4, e1pre, xMul, zPre, hx, he, g1pre, g1, g2pre, g2 };
    return logits;
  }

  /** Accumulate parameter gradients for dLogits (matching the last forward). */
  backward(dLogits: Mat): void {
    const { cEnc, cDec, kMax } = this.config;
    const cache = this.cache!;
    const graph = cache.graph;
    const ne = graph.edgeSrc.length;
    const wide = cEnc * kMax;

    const dG1: Mat[] = Array.from({ length: kMax }, () => new Mat(ne, cDec));
    const dG2acc: Mat[] = Array.from({ length: kMax }, () => new Mat(ne, cDec));
    for (let t = 0; t < kMax; t++) {
      const col = new Mat(ne, 1);
      for (let e = 0; e < ne; e++) col.data[e] = dLogits.data[e * kMax + t];
      addInPlace(dG2acc[t], this.heads[t].backward(col));
    }
    for (let t = kMax - 1; t >= 0; t--) {
      const dP2 = leakyReluGrad(cache.g2pre[t], dG2acc[t]);
      const dIn = this.group2[t].backward(dP2);
      if (t === 0) {
        addInPlace(dG1[0], dIn);
      } else {
        for (let e = 0; e < ne; e++) {
          for (let d = 0; d < cDec; d++) {
            dG1[t].data[e * cDec + d] += dIn.data[e * 2 * cDec + d];
            dG2acc[t - 1].data[e * cDec + d] += dIn.data[e * 2 * cDec + cDec + d];
          }
        }
      }
    }
    const dHx: Mat[] = [];
    const dHe: Mat[] = [];
    for (let t = 0; t < kMax; t++) {
      const dP1 = leakyReluGrad(cache.g1pre[t], dG1[t]);
      const dzAct = this.group1[t].backward(dP1);
      const dzPre = leakyReluGrad(cache.zPre[t], dzAct);
      dHx.push(elementwiseMul(dzPre, cache.he[t]));
      dHe.push(elementwiseMul(dzPre, cache.hx[t]));
    }

    const dStepsX = this.lstmX.backward(dHx);
    const dStepsE = this.lstmE.backward(dHe);
    // Only step 1 carried real input; gradients at the zero steps vanish.
    const dXMul = dStepsX[0];
    const dEFtr = dStepsE[0];

    const dE1act = this.edgeLin2.backward(dEFtr);
    this.edgeLin1.backward(leakyReluGrad(cache.e1pre, dE1act));

    const dXs4 = new Mat(cache.xs4.rows, wide);
    const dXt4 = new Mat(cache.xt4.rows, wide);
    for (let e = 0; e < ne; e++) {
      const s = graph.edgeSrc[e] * wide;
      const t = graph.edgeTgt[e] * wide;
      for (let d = 0; d < wide; d++) {
        const g = dXMul.data[e * wide + d];
        dXs4.data[s + d] += g * cache.xt4.data[t + d];
        dXt4.data[t + d] += g * cache.xs4.data[s + d];
      }
    }

    const [dXt3a, dXs3a] = this.gat2s.backward(dXs4);
    const [dXs3b, dXt3b] = this.gat2t.backward(dXt4);
    const dXs3 = dXs3a;
    addInPlace(dXs3, dXs3b);
    addInPlace(dXs3, dXs4); // gat2 residual
    const dXt3 = dXt3a;
    addInPlace(dXt3, dXt3b);
    addInPlace(dXt3, dXt4);

    const dXs3raw = leakyReluGrad(cache.xs3raw, dXs3);
    const dXt3raw = leakyReluGrad(cache.xt3raw, dXt3);

    const [dXt2a, dXs2a] = this.gat1s.backward(dXs3raw);
    const [dXs2b, dXt2b] = this.gat1t.backward(dXt3raw);
    const dXs2 = dXs2a;
    addInPlace(dXs2, dXs2b);
    addInPlace(dXs2, dXs3); // gat1 residual
    const dXt2 = dXt2a;
    addInPlace(dXt2, dXt2b);
    addInPlace(dXt2, dXt3);

    const [dXt1a, dXs1a] = this.gcn2s.backward(dXs2);
    const [dXs1b, dXt1b] = this.gcn2t.backward(dXt2);
    const dXs1 = dXs1a;
    addInPlace(dXs1, dXs1b);
    const dXt1 = dXt1a;
    addInPlace(dXt1, dXt1b);

    this.gcn1s.backward(dXs1);
    this.gcn1t.backward(dXt1);
  }

  /** Sigmoid scores in (0,1), shape (numEdges, kMax). */
  predict(graph: Graph): Mat {
    const logits = this.forward(graph);
    const out = new Mat(logits.rows, logits.cols);
    for (let i = 0; i < logits.data.length; i++) out.data[i] = sigmoid(logits.data[i]);
    return out;
  }
}
