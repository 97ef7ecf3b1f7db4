/**
 * Small dense VAE used to produce reconstruction residuals and ELBO
 * log-likelihood exports at desk scale. Inputs live in [0, 1]; the
 * decoder is Bernoulli (sigmoid + cross-entropy).
 *
 * Exports are deterministic: the latent is the posterior mean, no
 * sampling happens at export time.
 */

import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

import { writeTensor } from './container';
import { saveModel, loadModel } from './checkpoint';
import { Manifest, writeManifest } from './manifest';

export interface Vae {
  encoder: tf.LayersModel; // x -> [mu, logVar]
  decoder: tf.LayersModel; // z -> reconstruction in [0, 1]
  inputDim: number;
  latentDim: number;
}

export function buildVae(inputDim: number, latentDim: number, hidden = 64): Vae {
  const x = tf.input({ shape: [inputDim] });
  const h = tf.layers.dense({ units: hidden, activation: 'relu' }).apply(x);
  const mu = tf.layers.dense({ units: latentDim }).apply(h) as tf.SymbolicTensor;
  const logVar = tf.layers.dense({ units: latentDim }).apply(h) as tf.SymbolicTensor;
  const encoder = tf.model({ inputs: x, outputs: [mu, logVar] });

  const z = tf.input({ shape: [latentDim] });
  const hd = tf.layers.dense({ units: hidden, activation: 'relu' }).apply(z);
  const out = tf.layers.dense({ units: inputDim, activation: 'sigmoid' }).apply(hd) as tf.SymbolicTensor;
  const decoder = tf.model({ inputs: z, outputs: out });
  return { encoder, decoder, inputDim, latentDim };
}

function bernoulliLogProb(x: tf.Tensor2D, recon: tf.Tensor2D): tf.Tensor1D {
  const eps = 1e-6;
  const clipped = recon.clipByValue(eps, 1 - eps);
  return x
    .mul(clipped.log())
    .add(tf.scalar(1).sub(x).mul(tf.scalar(1).sub(clipped).log()))
    .sum(1) as tf.Tensor1D;
}

function klToStandardNormal(mu: tf.Tensor2D, logVar: tf.Tensor2D): tf.Tensor1D {
  return tf
    .scalar(-0.5)
    .mul(tf.scalar(1).add(logVar).sub(mu.square()).sub(logVar.exp()).sum(1)) as tf.Tensor1D;
}

export async function trainVae(
  vae: Vae,
  data: Float32Array,
  opts: { epochs?: number; batchSize?: number; learningRate?: number } = {},
): Promise<number> {
  const { epochs = 20, batchSize = 64, learningRate = 1e-3 } = opts;
  const n = data.length / vae.inputDim;
  const X = tf.tensor2d(data, [n, vae.inputDim]);
  const optimizer = tf.train.adam(learningRate);
  let lastLoss = NaN;
  for (let epoch = 0; epoch < epochs; epoch++) {
    for (let start = 0; start < n; start += batchSize) {
      const xb = X.slice([start, 0], [Math.min(batchSize, n - start), vae.inputDim]) as tf.Tensor2D;
      const loss = optimizer.minimize(() => {
        const [mu, logVar] = vae.encoder.apply(xb) as tf.Tensor2D[];
        const z = mu.add(logVar.mul(0.5).exp().mul(tf.randomNormal(mu.shape))) as tf.Tensor2D;
        const recon = vae.decoder.apply(z) as tf.Tensor2D;
        const nll = bernoulliLogProb(xb, recon).neg();
        return nll.add(klToStandardNormal(mu, logVar)).mean() as tf.Scalar;
      }, true);
      lastLoss = (await loss!.data())[0];
      loss!.dispose();
      xb.dispose();
    }
  }
  X.dispose();
  optimizer.dispose();
  return lastLoss;
}

/** Deterministic reconstruction through the posterior mean. */
export function reconstruct(vae: Vae, data: Float32Array, n: number): Float32Array {
  return tf.tidy(() => {
    const X = tf.tensor2d(data, [n, vae.inputDim]);
    const [mu] = vae.encoder.apply(X) as tf.Tensor2D[];
    const recon = vae.decoder.apply(mu) as tf.Tensor2D;
    return recon.dataSync() as Float32Array;
  });
}

/** Residuals x - reconstruction as an (n, d) float32 container. */
export function exportVaeResiduals(
  vae: Vae,
  data: Float32Array,
  n: number,
  outPath: string,
): Manifest {
  const recon = reconstruct(vae, data, n);
  const resid = new Float32Array(data.length);
  for (let i = 0; i < data.length; i++) resid[i] = data[i] - recon[i];
  writeTensor(outPath, { dtype: 'float32', shape: [n, vae.inputDim], data: resid });
  const manifest: Manifest = {
    model: `vae-dense-z${vae.latentDim}`,
    kind: 'vae-residual',
    n: String(n),
    output: path.basename(outPath),
  };
  writeManifest(outPath + '.manifest', manifest);
  return manifest;
}

/** Per-sample ELBO (nats) as an (n,) float32 container. */
export function exportVaeLogliks(
  vae: Vae,
  data: Float32Array,
  n: number,
  outPath: string,
): Manifest {
  const elbo = tf.tidy(() => {
    const X = tf.tensor2d(data, [n, vae.inputDim]);
    const [mu, logVar] = vae.encoder.apply(X) as tf.Tensor2D[];
    const recon = vae.decoder.apply(mu) as tf.Tensor2D;
    return bernoulliLogProb(X, recon).sub(klToStandardNormal(mu, logVar)).dataSync() as Float32Array;
  });
  writeTensor(outPath, { dtype: 'float32', shape: [n], data: elbo });
  const manifest: Manifest = {
    model: `vae-dense-z${vae.latentDim}`,
    kind: 'vae-elbo',
    units: 'nats',
    n: String(n),
    output: path.basename(outPath),
  };
  writeManifest(outPath + '.manifest', manifest);
  return manifest;
}

export async function saveVae(vae: Vae, dir: string): Promise<void> {
  await saveModel(vae.encoder, path.join(dir, 'encoder'));
  await saveModel(vae.decoder, path.join(dir, 'decoder'));
}

export async function loadVae(dir: string): Promise<Vae> {
  const encoder = await loadModel(path.join(dir, 'encoder'));
  const decoder = await loadModel(path.join(dir, 'decoder'));
  const inputDim = encoder.inputs[0].shape![1] as number;
  const latentDim = decoder.inputs[0].shape![1] as number;
  return { encoder, decoder, inputDim, latentDim };
}
