/**
 * Dataset converters: SVHN MAT archives, directories of PNG images
 * (CelebA-style), and the CIFAR-100 subset with vehicle/creature
 * superclasses removed. Every converter emits a uint8 container of
 * shape (n, 32, 32, 3) in channel-last order plus a provenance
 * manifest.
 */

import * as fs from 'fs';
import * as path from 'path';

import { Tensor, writeTensor } from './container';
import { Manifest, sha256File, writeManifest } from './manifest';
import { readMat } from './matfile';
import { centerCropResize, decodePng } from './png';

export const IMAGE_SIZE = 32;

/** Superclasses removed from CIFAR-100 (coarse label byte values). */
export const CIFAR100_EXCLUDED_SUPERCLASSES = new Set([
  1, 2, 9, 12, 13, 14, 15, 16, 17, 19, 20,
]);

export type SourceKind = 'svhn-mat' | 'celeba-images' | 'cifar100-subset';

export interface ConvertOptions {
  /** Refuse the conversion when a source file hash differs. */
  expectedSha256?: Record<string, string>;
}

function checkAndHash(paths: string[], opts: ConvertOptions): Record<string, string> {
  const hashes: Record<string, string> = {};
  for (const p of paths) {
    if (!fs.existsSync(p)) throw new Error(`source file missing: ${p}`);
    if (fs.statSync(p).isDirectory()) continue; // image directories are hashed per file elsewhere
    const h = sha256File(p);
    const expected = opts.expectedSha256?.[path.basename(p)] ?? opts.expectedSha256?.[p];
    if (expected && expected !== h) {
      throw new Error(`checksum mismatch for ${p}: expected ${expected}, got ${h}`);
    }
    hashes[path.basename(p)] = h;
  }
  return hashes;
}

function svhnToChannelLast(matPath: string): Uint8Array {
  const arrays = readMat(matPath);
  const X = arrays['X'];
  if (!X) throw new Error(`${matPath}: no variable named X`);
  const [h, w, c, n] = X.dims;
  if (h !== 32 || w !== 32 || c !== 3) {
    throw new Error(`${matPath}: expected 32x32x3xn image tensor, got ${X.dims}`);
  }
  // MATLAB column-major (row, col, channel, sample) -> (n, h, w, c)
  const out = new Uint8Array(n * h * w * c);
  for (let s = 0; s < n; s++) {
    for (let i = 0; i < h; i++) {
      for (let j = 0; j < w; j++) {
        for (let ch = 0; ch < c; ch++) {
          out[((s * h + i) * w + j) * c + ch] = X.data[i + h * (j + w * (ch + c * s))];
        }
      }
    }
  }
  return out;
}

function pngDirToChannelLast(dir: string): { data: Uint8Array; n: number; files: string[] } {
  const files = fs
    .readdirSync(dir)
    .filter((f) => f.toLowerCase().endsWith('.png'))
    .sort();
  if (files.length === 0) throw new Error(`no .png files in ${dir}`);
  const per = IMAGE_SIZE * IMAGE_SIZE * 3;
  const out = new Uint8Array(files.length * per);
  files.forEach((f, idx) => {
    const img = centerCropResize(decodePng(fs.readFileSync(path.join(dir, f))), IMAGE_SIZE);
    out.set(img.data, idx * per);
  });
  return { data: out, n: files.length, files };
}

function cifar100Subset(paths: string[]): { data: Uint8Array; n: number } {
  const RECORD = 3074; // coarse label, fine label, 3072 planar pixels
  const kept: Uint8Array[] = [];
  for (const p of paths) {
    const buf = fs.readFileSync(p);
    if (buf.length === 0 || buf.length % RECORD !== 0) {
      throw new Error(`${p}: length ${buf.length} is not a multiple of ${RECORD}`);
    }
    for (let off = 0; off < buf.length; off += RECORD) {
      const coarse = buf[off];
      if (CIFAR100_EXCLUDED_SUPERCLASSES.has(coarse)) continue;
      const planar = buf.subarray(off + 2, off + RECORD);
      const hwc = new Uint8Array(3072);
      for (let i = 0; i < 32; i++) {
        for (let j = 0; j < 32; j++) {
          for (let c = 0; c < 3; c++) {
            hwc[3 * (32 * i + j) + c] = planar[1024 * c + 32 * i + j];
          }
        }
      }
      kept.push(hwc);
    }
  }
  const out = new Uint8Array(kept.length * 3072);
  kept.forEach((img, i) => out.set(img, i * 3072));
  return { data: out, n: kept.length };
}

/** Convert a source dataset into a (n, 32, 32, 3) uint8 container. */
export function convertDataset(
  source: SourceKind,
  sourcePaths: string[],
  outPath: string,
  opts: ConvertOptions = {},
): Manifest {
  const hashes = checkAndHash(sourcePaths, opts);
  let data: Uint8Array;
  let n: number;
  let preprocessing: string;
  if (source === 'svhn-mat') {
    if (sourcePaths.length !== 1) throw new Error('svhn-mat takes a single archive path');
    data = svhnToChannelLast(sourcePaths[0]);
    n = data.length / (IMAGE_SIZE * IMAGE_SIZE * 3);
    preprocessing = 'column-major to channel-last transpose';
  } else if (source === 'celeba-images') {
    if (sourcePaths.length !== 1) throw new Error('celeba-images takes a single directory path');
    const res = pngDirToChannelLast(sourcePaths[0]);
    data = res.data;
    n = res.n;
    preprocessing = `center-crop to square, bilinear resize to ${IMAGE_SIZE}x${IMAGE_SIZE}`;
  } else if (source === 'cifar100-subset') {
    const res = cifar100Subset(sourcePaths);
    data = res.data;
    n = res.n;
    preprocessing = `planar to channel-last; superclasses ${[...CIFAR100_EXCLUDED_SUPERCLASSES].join(',')} removed`;
  } else {
    throw new Error(`unknown source kind ${source}`);
  }
  const tensor: Tensor = { dtype: 'uint8', shape: [n, IMAGE_SIZE, IMAGE_SIZE, 3], data };
  writeTensor(outPath, tensor);
  const manifest: Manifest = {
    source,
    n: String(n),
    output: path.basename(outPath),
    preprocessing,
  };
  for (const [name, h] of Object.entries(hashes)) manifest[`sha256.${name}`] = h;
  writeManifest(outPath + '.manifest', manifest);
  return manifest;
}
