/**
 * Minimal MAT-file (level 5) support: numeric arrays only, enough to
 * read SVHN archives (uint8 image tensors plus label vectors), with
 * zlib-compressed elements handled transparently. A writer for
 * uncompressed arrays is included for fixtures and round-trip tests.
 */

import * as fs from 'fs';
import * as zlib from 'zlib';

const MI_INT8 = 1;
const MI_UINT8 = 2;
const MI_INT16 = 3;
const MI_UINT16 = 4;
const MI_INT32 = 5;
const MI_UINT32 = 6;
const MI_DOUBLE = 9;
const MI_COMPRESSED = 15;
const MI_MATRIX = 14;

const MX_DOUBLE_CLASS = 6;
const MX_UINT8_CLASS = 9;

export interface MatArray {
  name: string;
  /** MATLAB dimensions (column-major layout in `data`). */
  dims: number[];
  data: Float64Array;
}

interface Element {
  type: number;
  data: Buffer;
}

function readElement(buf: Buffer, offset: number): { el: Element; next: number } {
  const typeField = buf.readUInt32LE(offset);
  // small data element format: nonzero upper 16 bits hold the byte count
  const smallSize = typeField >>> 16;
  if (smallSize !== 0) {
    const type = typeField & 0xffff;
    const data = buf.subarray(offset + 4, offset + 4 + smallSize);
    return { el: { type, data }, next: offset + 8 };
  }
  const type = typeField;
  const size = buf.readUInt32LE(offset + 4);
  const data = buf.subarray(offset + 8, offset + 8 + size);
  const padded = size % 8 === 0 ? size : size + (8 - (size % 8));
  return { el: { type, data }, next: offset + 8 + padded };
}

function numericData(type: number, data: Buffer): Float64Array {
  const readers: Record<number, [number, (o: number) => number]> = {
    [MI_INT8]: [1, (o) => data.readInt8(o)],
    [MI_UINT8]: [1, (o) => data.readUInt8(o)],
    [MI_INT16]: [2, (o) => data.readInt16LE(o)],
    [MI_UINT16]: [2, (o) => data.readUInt16LE(o)],
    [MI_INT32]: [4, (o) => data.readInt32LE(o)],
    [MI_UINT32]: [4, (o) => data.readUInt32LE(o)],
    [MI_DOUBLE]: [8, (o) => data.readDoubleLE(o)],
  };
  const entry = readers[type];
  if (!entry) throw new Error(`unsupported MAT numeric type ${type}`);
  const [width, read] = entry;
  const out = new Float64Array(data.length / width);
  for (let i = 0; i < out.length; i++) out[i] = read(i * width);
  return out;
}

function parseMatrix(data: Buffer): MatArray {
  let off = 0;
  const flags = readElement(data, off);
  off = flags.next;
  const dimsEl = readElement(data, off);
  off = dimsEl.next;
  const nameEl = readElement(data, off);
  off = nameEl.next;
  const realEl = readElement(data, off);

  const dims: number[] = [];
  for (let i = 0; i < dimsEl.el.data.length; i += 4) dims.push(dimsEl.el.data.readInt32LE(i));
  const name = nameEl.el.data.toString('ascii');
  return { name, dims, data: numericData(realEl.el.type, realEl.el.data) };
}

/** Parse every numeric array in a MAT 5 file, keyed by variable name. */
export function readMat(path: string): Record<string, MatArray> {
  const buf = fs.readFileSync(path);
  if (buf.length < 128) throw new Error(`${path}: too short for a MAT 5 file`);
  if (buf.readUInt16LE(124) !== 0x0100) throw new Error(`${path}: not a little-endian MAT 5 file`);
  const out: Record<string, MatArray> = {};
  let off = 128;
  while (off + 8 <= buf.length) {
    const { el, next } = readElement(buf, off);
    off = next;
    let payload = el;
    if (el.type === MI_COMPRESSED) {
      const inflated = zlib.inflateSync(el.data);
      payload = readElement(inflated, 0).el;
    }
    if (payload.type !== MI_MATRIX) continue;
    const arr = parseMatrix(payload.data);
    out[arr.name] = arr;
  }
  return out;
}

function paddedElement(type: number, data: Buffer): Buffer {
  const header = Buffer.alloc(8);
  header.writeUInt32LE(type, 0);
  header.writeUInt32LE(data.length, 4);
  const pad = data.length % 8 === 0 ? 0 : 8 - (data.length % 8);
  return Buffer.concat([header, data, Buffer.alloc(pad)]);
}

/** Write numeric arrays as an uncompressed little-endian MAT 5 file. */
export function writeMat(
  path: string,
  arrays: { name: string; dims: number[]; data: Float64Array | Uint8Array }[],
  compress = false,
): void {
  const header = Buffer.alloc(128);
  header.write('MATLAB 5.0 MAT-file, adapter fixture', 0, 'ascii');
  header.writeUInt16LE(0x0100, 124);
  header.write('IM', 126, 'ascii');

  const elements = arrays.map(({ name, dims, data }) => {
    const isU8 = data instanceof Uint8Array;
    const flags = Buffer.alloc(8);
    flags.writeUInt32LE(isU8 ? MX_UINT8_CLASS : MX_DOUBLE_CLASS, 0);
    const dimsBuf = Buffer.alloc(4 * dims.length);
    dims.forEach((d, i) => dimsBuf.writeInt32LE(d, 4 * i));
    const nameBuf = Buffer.from(name, 'ascii');
    let dataBuf: Buffer;
    if (isU8) {
      dataBuf = Buffer.from(data as Uint8Array);
    } else {
      dataBuf = Buffer.alloc(8 * data.length);
      (data as Float64Array).forEach((v, i) => dataBuf.writeDoubleLE(v, 8 * i));
    }
    const body = Buffer.concat([
      paddedElement(MI_UINT32, flags),
      paddedElement(MI_INT32, dimsBuf),
      paddedElement(MI_INT8, nameBuf),
      paddedElement(isU8 ? MI_UINT8 : MI_DOUBLE, dataBuf),
    ]);
    const matrix = paddedElement(MI_MATRIX, body);
    return compress ? paddedElement(MI_COMPRESSED, zlib.deflateSync(matrix)) : matrix;
  });
  fs.writeFileSync(path, Buffer.concat([header, ...elements]));
}
