import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';
import { afterAll, describe, expect, it } from 'vitest';

import { readTensor } from '../src/container';
import { readManifest } from '../src/manifest';
import { dmolLogLik, dmolMean, exportArLogliks, exportArResiduals } from '../src/dmol';

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'dmol-'));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

/** Tiny model mapping (n, d) inputs to (n, d, 3K) mixture parameters. */
function toyModel(d: number, k: number): tf.LayersModel {
  const x = tf.input({ shape: [d] });
  const h = tf.layers.dense({ units: d * 3 * k }).apply(x);
  const out = tf.layers.reshape({ targetShape: [d, 3 * k] }).apply(h) as tf.SymbolicTensor;
  return tf.model({ inputs: x, outputs: out });
}

function toyData(n: number, d: number, seed = 3): Float32Array {
  const out = new Float32Array(n * d);
  let s = seed;
  for (let i = 0; i < out.length; i++) {
    s = (s * 48271) % 2147483647;
    out[i] = Math.round((s % 256)) / 255;
  }
  return out;
}

describe('dmolMean', () => {
  it('returns the single component mean, clipped to [0, 1]', () => {
    // K = 1: params are [logit, mean, log scale] per position
    const params = tf.tensor3d(
      [
        [
          [0, 0.25, 0],
          [5, 1.7, -1],
          [-2, -0.5, 2],
        ],
      ],
      [1, 3, 3],
    );
    const mean = dmolMean(params).arraySync() as number[][];
    expect(mean[0][0]).toBeCloseTo(0.25, 6);
    expect(mean[0][1]).toBe(1); // clipped from 1.7
    expect(mean[0][2]).toBe(0); // clipped from -0.5
  });

  it('weights components by the softmax of the logits', () => {
    // K = 2 with equal logits: mean is the average of the two means
    const params = tf.tensor3d([[[1, 1, 0.2, 0.6, 0, 0]]], [1, 1, 6]);
    const mean = dmolMean(params).arraySync() as number[][];
    expect(mean[0][0]).toBeCloseTo(0.4, 6);
  });

  it('rejects a last dimension that is not a multiple of three', () => {
    expect(() => dmolMean(tf.zeros([1, 2, 5]))).toThrow(/3K/);
  });
});

describe('dmolLogLik', () => {
  it('assigns total probability one across all 256 pixel levels', () => {
    // d = 1, K = 1, mean 0.4, unit scale: the discretized bins plus the
    // two edge bins must form a proper distribution
    const levels = new Float32Array(256);
    for (let v = 0; v < 256; v++) levels[v] = v / 255;
    const params = tf.tile(tf.tensor3d([[[0, 0.4, 0]]], [1, 1, 3]), [256, 1, 1]) as tf.Tensor3D;
    const ll = dmolLogLik(params, tf.tensor2d(levels, [256, 1])).arraySync() as number[];
    const total = ll.reduce((acc, v) => acc + Math.exp(v), 0);
    expect(total).toBeCloseTo(1, 4);
  });

  it('prefers pixels near the mixture mean', () => {
    const mk = (x: number) =>
      (dmolLogLik(tf.tensor3d([[[0, 0.5, -3]]], [1, 1, 3]), tf.tensor2d([[x]])).arraySync() as number[])[0];
    expect(mk(0.5)).toBeGreaterThan(mk(0.9));
    expect(mk(0.5)).toBeGreaterThan(mk(0.1));
  });
});

describe('autoregressive exports', () => {
  const D = 6;
  const model = toyModel(D, 2);
  const train = toyData(50, D, 11);
  const data = toyData(20, D, 22);

  it('writes normalized residuals with unit per-position train scale', () => {
    const outTrain = path.join(tmp, 'resid-train.oodt');
    exportArResiduals(model, 'toy-ar', train, 50, train, 50, outTrain);
    const t = readTensor(outTrain);
    expect(t.shape).toEqual([50, D]);
    expect(Array.from(t.data).every(Number.isFinite)).toBe(true);
    // the scale is the centered std of the training residuals, so the
    // normalized training residuals have unit variance per position
    for (let j = 0; j < D; j++) {
      let sum = 0;
      for (let i = 0; i < 50; i++) sum += t.data[i * D + j];
      const mean = sum / 50;
      let sq = 0;
      for (let i = 0; i < 50; i++) sq += (t.data[i * D + j] - mean) ** 2;
      expect(sq / 50).toBeCloseTo(1, 3);
    }
    const m = readManifest(outTrain + '.manifest');
    expect(m['model']).toBe('toy-ar');
    expect(m['kind']).toBe('ar-residual');
  });

  it('is deterministic for a fixed model', () => {
    const p1 = path.join(tmp, 'r1.oodt');
    const p2 = path.join(tmp, 'r2.oodt');
    exportArResiduals(model, 'toy-ar', data, 20, train, 50, p1);
    exportArResiduals(model, 'toy-ar', data, 20, train, 50, p2);
    expect(fs.readFileSync(p1).equals(fs.readFileSync(p2))).toBe(true);
  });

  it('writes finite per-sample log-likelihoods', () => {
    const out = path.join(tmp, 'll.oodt');
    exportArLogliks(model, 'toy-ar', data, 20, out);
    const t = readTensor(out);
    expect(t.shape).toEqual([20]);
    expect(Array.from(t.data).every(Number.isFinite)).toBe(true);
    // log-probability of a discrete pixel value never exceeds zero
    expect(Array.from(t.data).every((v) => v <= 1e-6)).toBe(true);
    expect(readManifest(out + '.manifest')['kind']).toBe('ar-loglik');
  });
});
