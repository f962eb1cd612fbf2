/**
 * Dense row-major float64 matrices and the handful of ops the network needs.
 * Everything is explicit loops over Float64Array: float64 precision is what
 * lets the finite-difference gradient check agree to 1e-4 relative.
 */

export class Mat {
  readonly rows: number;
  readonly cols: number;
  readonly data: Float64Array;

  constructor(rows: number, cols: number, data?: Float64Array) {
    this.rows = rows;
    this.cols = cols;
    this.data = data ?? new Float64Array(rows * cols);
    if (this.data.length !== rows * cols) {
      throw new Error(`Mat: data length ${this.data.length} != ${rows}x${cols}`);
    }
  }

  get(r: number, c: number): number {
    return this.data[r * this.cols + c];
  }

  set(r: number, c: number, v: number): void {
    this.data[r * this.cols + c] = v;
  }

  copy(): Mat {
    return new Mat(this.rows, this.cols, this.data.slice());
  }

  fill(v: number): void {
    this.data.fill(v);
  }

  /** Columns [c0, c1) as a new matrix. */
  sliceCols(c0: number, c1: number): Mat {
    const out = new Mat(this.rows, c1 - c0);
    for (let r = 0; r < this.rows; r++) {
      for (let c = c0; c < c1; c++) {
        out.data[r * out.cols + (c - c0)] = this.data[r * this.cols + c];
      }
    }
    return out;
  }

  /** Rows [r0, r1) as a new matrix. */
  sliceRows(r0: number, r1: number): Mat {
    return new Mat(r1 - r0, this.cols, this.data.slice(r0 * this.cols, r1 * this.cols));
  }
}

/** C = A (m,k) x B (k,n). */
export function matmul(a: Mat, b: Mat): Mat {
  if (a.cols !== b.rows) throw new Error(`matmul: ${a.cols} != ${b.rows}`);
  const out = new Mat(a.rows, b.cols);
  const { data: ad } = a;
  const { data: bd } = b;
  const od = out.data;
  for (let i = 0; i < a.rows; i++) {
    const aOff = i * a.cols;
    const oOff = i * b.cols;
    for (let k = 0; k < a.cols; k++) {
      const av = ad[aOff + k];
      if (av === 0) continue;
      const bOff = k * b.cols;
      for (let j = 0; j < b.cols; j++) {
        od[oOff + j] += av * bd[bOff + j];
      }
    }
  }
  return out;
}

/** C = A^T (k,m) x B (k,n) -> (m,n); accumulates into `into` when given. */
export function matmulTA(a: Mat, b: Mat, into?: Mat): Mat {
  if (a.rows !== b.rows) throw new Error(`matmulTA: ${a.rows} != ${b.rows}`);
  const out = into ?? new Mat(a.cols, b.cols);
  for (let k = 0; k < a.rows; k++) {
    const aOff = k * a.cols;
    const bOff = k * b.cols;
    for (let i = 0; i < a.cols; i++) {
      const av = a.data[aOff + i];
      if (av === 0) continue;
      const oOff = i * b.cols;
      for (let j = 0; j < b.cols; j++) {
        out.data[oOff + j] += av * b.data[bOff + j];
      }
    }
  }
  return out;
}

/** C = A (m,k) x B^T (n,k) -> (m,n). */
export function matmulTB(a: Mat, b: Mat): Mat {
  if (a.cols !== b.cols) throw new Error(`matmulTB: ${a.cols} != ${b.cols}`);
  const out = new Mat(a.rows, b.rows);
  for (let i = 0; i < a.rows; i++) {
    const aOff = i * a.cols;
    const oOff = i * b.rows;
    for (let j = 0; j < b.rows; j++) {
      const bOff = j * b.cols;
      let acc = 0;
      for (let k = 0; k < a.cols; k++) {
        acc += a.data[aOff + k] * b.data[bOff + k];
      }
      out.data[oOff + j] = acc;
    }
  }
  return out;
}

/** y += rowvec b broadcast over rows. */
export function addBiasInPlace(y: Mat, b: Float64Array): void {
  if (b.length !== y.cols) throw new Error('addBias: size mismatch');
  for (let r = 0; r < y.rows; r++) {
    const off = r * y.cols;
    for (let c = 0; c < y.cols; c++) y.data[off + c] += b[c];
  }
}

/** Column sums of dy accumulated into db. */
export function accumBiasGrad(dy: Mat, db: Float64Array): void {
  for (let r = 0; r < dy.rows; r++) {
    const off = r * dy.cols;
    for (let c = 0; c < dy.cols; c++) db[c] += dy.data[off + c];
  }
}

export function elementwiseMul(a: Mat, b: Mat): Mat {
  const out = new Mat(a.rows, a.cols);
  for (let i = 0; i < a.data.length; i++) out.data[i] = a.data[i] * b.data[i];
  return out;
}

export const LEAKY_SLOPE = 0.01;

export function leakyRelu(x: Mat, slope = LEAKY_SLOPE): Mat {
  const out = new Mat(x.rows, x.cols);
  for (let i = 0; i < x.data.length; i++) {
    const v = x.data[i];
    out.data[i] = v > 0 ? v : slope * v;
  }
  return out;
}

/** dx for y = leakyRelu(x) given dy and the forward input x. */
export function leakyReluGrad(x: Mat, dy: Mat, slope = LEAKY_SLOPE): Mat {
  const out = new Mat(x.rows, x.cols);
  for (let i = 0; i < x.data.length; i++) {
    out.data[i] = x.data[i] > 0 ? dy.data[i] : slope * dy.data[i];
  }
  return out;
}

export function sigmoid(v: number): number {
  return v >= 0 ? 1 / (1 + Math.exp(-v)) : Math.exp(v) / (1 + Math.exp(v));
}

export function concatCols(a: Mat, b: Mat): Mat {
  if (a.rows !== b.rows) throw new Error('concatCols: row mismatch');
  const out = new Mat(a.rows, a.cols + b.cols);
  for (let r = 0; r < a.rows; r++) {
    out.data.set(a.data.subarray(r * a.cols, (r + 1) * a.cols), r * out.cols);
    out.data.set(b.data.subarray(r * b.cols, (r + 1) * b.cols), r * out.cols + a.cols);
  }
  return out;
}
