/**
 * AdamW (decoupled weight decay) with cosine-annealed learning rate.
 */

import type { ParamStore } from './layers.js';

export interface OptimConfig {
  lrInitial: number;
  lrMin: number;
  weightDecay: number;
  beta1: number;
  beta2: number;
  eps: number;
}

export const DEFAULT_OPTIM: OptimConfig = {
  lrInitial: 0.001,
  lrMin: 0.0001,
  weightDecay: 0.001,
  beta1: 0.9,
  beta2: 0.999,
  eps: 1e-8,
};

export function cosineLr(cfg: OptimConfig, epoch: number, totalEpochs: number): number {
  if (totalEpochs <= 1) return cfg.lrInitial;
  const t = epoch / (totalEpochs - 1);
  return cfg.lrMin + 0.5 * (cfg.lrInitial - cfg.lrMin) * (1 + Math.cos(Math.PI * t));
}

export class AdamW {
  private readonly cfg: OptimConfig;
  private readonly m = new Map<string, Float64Array>();
  private readonly v = new Map<string, Float64Array>();
  private step = 0;
  lr: number;

  constructor(store: ParamStore, cfg: OptimConfig = DEFAULT_OPTIM) {
    this.cfg = cfg;
    this.lr = cfg.lrInitial;
    for (const [name, p] of store.params) {
      this.m.set(name, new Float64Array(p.w.length));
      this.v.set(name, new Float64Array(p.w.length));
    }
  }

  update(store: ParamStore): void {
    this.step++;
    const { beta1, beta2, eps, weightDecay } = this.cfg;
    const bc1 = 1 - Math.pow(beta1, this.step);
    const bc2 = 1 - Math.pow(beta2, this.step);
    for (const [name, p] of store.params) {
      const m = this.m.get(name)!;
      const v = this.v.get(name)!;
      for (let i = 0; i < p.w.length; i++) {
        const g = p.g[i];
        m[i] = beta1 * m[i] + (1 - beta1) * g;
        v[i] = beta2 * v[i] + (1 - beta2) * g * g;
        const mHat = m[i] / bc1;
        const vHat = v[i] / bc2;
        p.w[i] -= this.lr * (mHat / (Math.sqrt(vHat) + eps) + weightDecay * p.w[i]);
      }
    }
  }
}
