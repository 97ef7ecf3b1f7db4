/**
 * Minimal PNG codec for image-directory sources: 8-bit depth,
 * grayscale / RGB / RGBA, non-interlaced. The encoder (filter type 0)
 * exists for fixtures and round-trip tests.
 */

import * as zlib from 'zlib';

export interface RgbImage {
  width: number;
  height: number;
  /** Row-major RGB triples. */
  data: Uint8Array;
}

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
const CHANNELS: Record<number, number> = { 0: 1, 2: 3, 4: 2, 6: 4 };

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

export function decodePng(buf: Buffer): RgbImage {
  if (!buf.subarray(0, 8).equals(SIGNATURE)) throw new Error('not a PNG file');
  let off = 8;
  let width = 0;
  let height = 0;
  let colorType = -1;
  const idat: Buffer[] = [];
  while (off + 8 <= buf.length) {
    const len = buf.readUInt32BE(off);
    const type = buf.subarray(off + 4, off + 8).toString('ascii');
    const data = buf.subarray(off + 8, off + 8 + len);
    off += 12 + len; // skip CRC
    if (type === 'IHDR') {
      width = data.readUInt32BE(0);
      height = data.readUInt32BE(4);
      const bitDepth = data.readUInt8(8);
      colorType = data.readUInt8(9);
      if (bitDepth !== 8) throw new Error(`unsupported bit depth ${bitDepth}`);
      if (!(colorType in CHANNELS)) throw new Error(`unsupported color type ${colorType}`);
      if (data.readUInt8(12) !== 0) throw new Error('interlaced PNG not supported');
    } else if (type === 'IDAT') {
      idat.push(data);
    } else if (type === 'IEND') {
      break;
    }
  }
  const nch = CHANNELS[colorType];
  const raw = zlib.inflateSync(Buffer.concat(idat));
  const stride = width * nch;
  const pixels = new Uint8Array(height * stride);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)];
    const row = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    for (let x = 0; x < stride; x++) {
      const left = x >= nch ? pixels[y * stride + x - nch] : 0;
      const up = y > 0 ? pixels[(y - 1) * stride + x] : 0;
      const upLeft = y > 0 && x >= nch ? pixels[(y - 1) * stride + x - nch] : 0;
      let v = row[x];
      if (filter === 1) v += left;
      else if (filter === 2) v += up;
      else if (filter === 3) v += (left + up) >> 1;
      else if (filter === 4) v += paeth(left, up, upLeft);
      else if (filter !== 0) throw new Error(`unsupported filter ${filter}`);
      pixels[y * stride + x] = v & 0xff;
    }
  }
  // normalize to RGB
  const rgb = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    if (nch === 1 || nch === 2) {
      rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = pixels[nch * i];
    } else {
      rgb[3 * i] = pixels[nch * i];
      rgb[3 * i + 1] = pixels[nch * i + 1];
      rgb[3 * i + 2] = pixels[nch * i + 2];
    }
  }
  return { width, height, data: rgb };
}

function chunk(type: string, data: Buffer): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(data.length, 0);
  head.write(type, 4, 'ascii');
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(Buffer.concat([head.subarray(4), data])), 0);
  return Buffer.concat([head, data, crc]);
}

let CRC_TABLE: Uint32Array | null = null;

function crc32(buf: Buffer): number {
  if (!CRC_TABLE) {
    CRC_TABLE = new Uint32Array(256);
    for (let n = 0; n < 256; n++) {
      let c = n;
      for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
      CRC_TABLE[n] = c >>> 0;
    }
  }
  let c = 0xffffffff;
  for (const b of buf) c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

export function encodePng(img: RgbImage): Buffer {
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(img.width, 0);
  ihdr.writeUInt32BE(img.height, 4);
  ihdr.writeUInt8(8, 8); // bit depth
  ihdr.writeUInt8(2, 9); // RGB
  const stride = img.width * 3;
  const raw = Buffer.alloc(img.height * (stride + 1));
  for (let y = 0; y < img.height; y++) {
    raw[y * (stride + 1)] = 0; // filter: none
    Buffer.from(img.data.subarray(y * stride, (y + 1) * stride)).copy(raw, y * (stride + 1) + 1);
  }
  return Buffer.concat([
    SIGNATURE,
    chunk('IHDR', ihdr),
    chunk('IDAT', zlib.deflateSync(raw)),
    chunk('IEND', Buffer.alloc(0)),
  ]);
}

/** Center-crop to a square, then bilinear-resize to size x size RGB. */
export function centerCropResize(img: RgbImage, size: number): RgbImage {
  const side = Math.min(img.width, img.height);
  const x0 = Math.floor((img.width - side) / 2);
  const y0 = Math.floor((img.height - side) / 2);
  const out = new Uint8Array(size * size * 3);
  const scale = side / size;
  for (let y = 0; y < size; y++) {
    const sy = Math.min((y + 0.5) * scale - 0.5, side - 1);
    const y1 = Math.max(0, Math.floor(sy));
    const y2 = Math.min(side - 1, y1 + 1);
    const fy = sy - y1;
    for (let x = 0; x < size; x++) {
      const sx = Math.min((x + 0.5) * scale - 0.5, side - 1);
      const x1 = Math.max(0, Math.floor(sx));
      const x2 = Math.min(side - 1, x1 + 1);
      const fx = sx - x1;
      for (let c = 0; c < 3; c++) {
        const at = (yy: number, xx: number) =>
          img.data[3 * ((y0 + yy) * img.width + (x0 + xx)) + c];
        const v =
          at(y1, x1) * (1 - fy) * (1 - fx) +
          at(y1, x2) * (1 - fy) * fx +
          at(y2, x1) * fy * (1 - fx) +
          at(y2, x2) * fy * fx;
        out[3 * (y * size + x) + c] = Math.round(v);
      }
    }
  }
  return { width: size, height: size, data: out };
}
