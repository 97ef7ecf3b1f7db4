/**
 * OODT tensor container format, bit-compatible with the core pipeline.
 *
 * Layout: magic "OODT", u32 version = 1, u8 dtype (0 = uint8,
 * 1 = float32), u8 ndim, ndim x u64 shape, then the row-major
 * little-endian payload.
 */

import * as fs from 'fs';

export type Dtype = 'uint8' | 'float32';

export interface Tensor {
  dtype: Dtype;
  shape: number[];
  /** Row-major payload; length = product(shape). */
  data: Uint8Array | Float32Array;
}

const MAGIC = Buffer.from('OODT', 'ascii');
const VERSION = 1;
const DTYPE_CODE: Record<Dtype, number> = { uint8: 0, float32: 1 };

export function numElements(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function encodeTensor(t: Tensor): Buffer {
  if (t.data.length !== numElements(t.shape)) {
    throw new Error(`payload length ${t.data.length} does not match shape [${t.shape}]`);
  }
  const header = Buffer.alloc(10 + 8 * t.shape.length);
  MAGIC.copy(header, 0);
  header.writeUInt32LE(VERSION, 4);
  header.writeUInt8(DTYPE_CODE[t.dtype], 8);
  header.writeUInt8(t.shape.length, 9);
  t.shape.forEach((s, i) => header.writeBigUInt64LE(BigInt(s), 10 + 8 * i));
  let payload: Buffer;
  if (t.dtype === 'uint8') {
    payload = Buffer.from(t.data as Uint8Array);
  } else {
    const f = t.data as Float32Array;
    payload = Buffer.alloc(4 * f.length);
    for (let i = 0; i < f.length; i++) payload.writeFloatLE(f[i], 4 * i);
  }
  return Buffer.concat([header, payload]);
}

export function decodeTensor(buf: Buffer): Tensor {
  if (buf.length < 10 || !buf.subarray(0, 4).equals(MAGIC)) {
    throw new Error('bad container magic');
  }
  const version = buf.readUInt32LE(4);
  if (version !== VERSION) throw new Error(`unsupported container version ${version}`);
  const dtypeCode = buf.readUInt8(8);
  const ndim = buf.readUInt8(9);
  if (buf.length < 10 + 8 * ndim) throw new Error('truncated container header');
  const shape: number[] = [];
  for (let i = 0; i < ndim; i++) shape.push(Number(buf.readBigUInt64LE(10 + 8 * i)));
  const payload = buf.subarray(10 + 8 * ndim);
  const n = numElements(shape);
  if (dtypeCode === 0) {
    if (payload.length !== n) throw new Error(`payload length ${payload.length}, expected ${n}`);
    return { dtype: 'uint8', shape, data: new Uint8Array(payload) };
  }
  if (dtypeCode === 1) {
    if (payload.length !== 4 * n) {
      throw new Error(`payload length ${payload.length}, expected ${4 * n}`);
    }
    const data = new Float32Array(n);
    for (let i = 0; i < n; i++) data[i] = payload.readFloatLE(4 * i);
    return { dtype: 'float32', shape, data };
  }
  throw new Error(`unknown dtype code ${dtypeCode}`);
}

export function writeTensor(path: string, t: Tensor): void {
  fs.writeFileSync(path, encodeTensor(t));
}

export function readTensor(path: string): Tensor {
  return decodeTensor(fs.readFileSync(path));
}
