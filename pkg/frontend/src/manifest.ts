/**
 * Adapter manifest: plain key=value provenance record written next to
 * every produced container (source checksum, preprocessing, model id).
 */

import * as crypto from 'crypto';
import * as fs from 'fs';

export type Manifest = Record<string, string>;

export function sha256File(path: string): string {
  return crypto.createHash('sha256').update(fs.readFileSync(path)).digest('hex');
}

export function writeManifest(path: string, manifest: Manifest): void {
  const lines = Object.keys(manifest)
    .sort()
    .map((k) => `${k}=${manifest[k]}`);
  fs.writeFileSync(path, lines.join('\n') + '\n');
}

export function readManifest(path: string): Manifest {
  const manifest: Manifest = {};
  for (const line of fs.readFileSync(path, 'utf8').split('\n')) {
    const trimmed = line.trim();
    if (!trimmed || trimmed.startsWith('#')) continue;
    const i = trimmed.indexOf('=');
    if (i < 0) throw new Error(`malformed manifest line: ${trimmed}`);
    manifest[trimmed.slice(0, i)] = trimmed.slice(i + 1);
  }
  return manifest;
}
