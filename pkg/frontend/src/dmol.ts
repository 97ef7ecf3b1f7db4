/**
 * Autoregressive residual export for models with a discretized
 * mixture-of-logistics output head.
 *
 * The model maps a flattened [0, 1] image (n, d) to per-position
 * mixture parameters (n, d, 3K): K logits, K means, K log scales. The
 * residual is x minus the mixture mean clipped to [0, 1] (the
 * discretization assigns out-of-range mass to the edge bins, so the
 * predictive mean is clipped the same way), normalized per position by
 * the empirical residual standard deviation over the inlier training
 * set.
 */

import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

import { writeTensor } from './container';
import { Manifest, writeManifest } from './manifest';

/** Clipped mixture-of-logistics mean for (n, d, 3K) parameters. */
export function dmolMean(params: tf.Tensor3D): tf.Tensor2D {
  return tf.tidy(() => {
    const k = params.shape[2] / 3;
    if (!Number.isInteger(k)) throw new Error(`last dim ${params.shape[2]} is not 3K`);
    const logits = params.slice([0, 0, 0], [-1, -1, k]);
    const means = params.slice([0, 0, k], [-1, -1, k]);
    const weights = tf.softmax(logits, 2);
    return weights.mul(means).sum(2).clipByValue(0, 1) as tf.Tensor2D;
  });
}

/**
 * Per-sample log-likelihood (nats) of 8-bit data under the discretized
 * mixture of logistics, with edge bins absorbing out-of-range mass.
 */
export function dmolLogLik(params: tf.Tensor3D, x: tf.Tensor2D): tf.Tensor1D {
  return tf.tidy(() => {
    const k = params.shape[2] / 3;
    const logits = params.slice([0, 0, 0], [-1, -1, k]);
    const means = params.slice([0, 0, k], [-1, -1, k]);
    const logScales = params.slice([0, 0, 2 * k], [-1, -1, k]).maximum(tf.scalar(-7));
    const invS = logScales.neg().exp();
    const xe = x.expandDims(2);
    const half = 1 / 255 / 2; // half of one 8-bit bin in [0, 1] units
    const cdfHi = xe.add(half).sub(means).mul(invS).sigmoid();
    const cdfLo = xe.sub(half).sub(means).mul(invS).sigmoid();
    const isTop = xe.greater(1 - half);
    const isBottom = xe.less(half);
    const prob = tf.where(
      isTop.logicalOr(isBottom),
      tf.where(isTop, tf.scalar(1).sub(cdfLo), cdfHi),
      cdfHi.sub(cdfLo),
    );
    const logMix = tf.logSumExp(tf.logSoftmax(logits, 2).add(prob.maximum(1e-12).log()), 2);
    return logMix.sum(1) as tf.Tensor1D;
  });
}

function predictParams(model: tf.LayersModel, data: Float32Array, n: number, d: number) {
  const X = tf.tensor2d(data, [n, d]);
  const params = model.predict(X) as tf.Tensor3D;
  X.dispose();
  return params;
}

/**
 * Normalized autoregressive residuals as an (n, d) float32 container.
 * The per-position scale comes from inlier training residuals.
 */
export function exportArResiduals(
  model: tf.LayersModel,
  modelId: string,
  data: Float32Array,
  n: number,
  train: Float32Array,
  nTrain: number,
  outPath: string,
): Manifest {
  const d = model.inputs[0].shape![1] as number;
  const resid = tf.tidy(() => {
    const mkResid = (flat: Float32Array, count: number) => {
      const params = predictParams(model, flat, count, d);
      const mean = dmolMean(params);
      params.dispose();
      return tf.tensor2d(flat, [count, d]).sub(mean) as tf.Tensor2D;
    };
    const trainResid = mkResid(train, nTrain);
    const std = trainResid.sub(trainResid.mean(0)).square().mean(0).sqrt().maximum(1e-6);
    return mkResid(data, n).div(std).dataSync() as Float32Array;
  });
  writeTensor(outPath, { dtype: 'float32', shape: [n, d], data: resid });
  const manifest: Manifest = {
    model: modelId,
    kind: 'ar-residual',
    normalization: 'empirical per-position std over inlier training residuals',
    n: String(n),
    output: path.basename(outPath),
  };
  writeManifest(outPath + '.manifest', manifest);
  return manifest;
}

/** Per-sample DMOL log-likelihood (nats) as an (n,) float32 container. */
export function exportArLogliks(
  model: tf.LayersModel,
  modelId: string,
  data: Float32Array,
  n: number,
  outPath: string,
): Manifest {
  const d = model.inputs[0].shape![1] as number;
  const ll = tf.tidy(() => {
    const params = predictParams(model, data, n, d);
    return dmolLogLik(params, tf.tensor2d(data, [n, d])).dataSync() as Float32Array;
  });
  writeTensor(outPath, { dtype: 'float32', shape: [n], data: ll });
  const manifest: Manifest = {
    model: modelId,
    kind: 'ar-loglik',
    units: 'nats',
    n: String(n),
    output: path.basename(outPath),
  };
  writeManifest(outPath + '.manifest', manifest);
  return manifest;
}
