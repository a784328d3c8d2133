/**
 * Minimal MATLAB Level-5 MAT-file reader/writer.
 *
 * Covers what the exported iEEG recordings need: little-endian files,
 * 2-D numeric matrices (double/single/int16/uint16/int32), char row vectors,
 * zlib-compressed elements (miCOMPRESSED), and the small-data-element
 * encoding. The writer emits the same subset and exists so tests can build
 * source fixtures without MATLAB.
 */

import { deflateSync, inflateSync } from "node:zlib";

// MAT data types
const miINT8 = 1;
const miUINT8 = 2;
const miINT16 = 3;
const miUINT16 = 4;
const miINT32 = 5;
const miUINT32 = 6;
const miSINGLE = 7;
const miDOUBLE = 9;
const miMATRIX = 14;
const miCOMPRESSED = 15;
const miUTF8 = 16;

// array classes
const mxCHAR = 4;
const mxDOUBLE = 6;
const mxSINGLE = 7;
const mxINT16 = 10;
const mxUINT16 = 11;
const mxINT32 = 12;

export interface MatVariable {
  name: string;
  dims: number[];
  /** column-major numeric payload, or the decoded string for char arrays */
  data: Float64Array | string;
}

export class MatFormatError extends Error {}

function typeBytes(type: number): number {
  switch (type) {
    case miINT8:
    case miUINT8:
    case miUTF8:
      return 1;
    case miINT16:
    case miUINT16:
      return 2;
    case miINT32:
    case miUINT32:
    case miSINGLE:
      return 4;
    case miDOUBLE:
      return 8;
    default:
      throw new MatFormatError(`unsupported MAT data type ${type}`);
  }
}

function readNumeric(view: DataView, offset: number, type: number, count: number): Float64Array {
  const out = new Float64Array(count);
  for (let i = 0; i < count; i++) {
    switch (type) {
      case miINT8:
        out[i] = view.getInt8(offset + i);
        break;
      case miUINT8:
      case miUTF8:
        out[i] = view.getUint8(offset + i);
        break;
      case miINT16:
        out[i] = view.getInt16(offset + 2 * i, true);
        break;
      case miUINT16:
        out[i] = view.getUint16(offset + 2 * i, true);
        break;
      case miINT32:
        out[i] = view.getInt32(offset + 4 * i, true);
        break;
      case miUINT32:
        out[i] = view.getUint32(offset + 4 * i, true);
        break;
      case miSINGLE:
        out[i] = view.getFloat32(offset + 4 * i, true);
        break;
      case miDOUBLE:
        out[i] = view.getFloat64(offset + 8 * i, true);
        break;
    }
  }
  return out;
}

interface Element {
  type: number;
  /** payload offset within the buffer */
  offset: number;
  bytes: number;
  /** offset just past this element, 8-byte aligned */
  next: number;
}

function readElement(view: DataView, offset: number): Element {
  const word = view.getUint32(offset, true);
  const small = word >>> 16;
  if (small !== 0) {
    // small data element: 16-bit type + 16-bit byte count, payload in-word
    return { type: word & 0xffff, offset: offset + 4, bytes: small, next: offset + 8 };
  }
  const bytes = view.getUint32(offset + 4, true);
  const next = offset + 8 + Math.ceil(bytes / 8) * 8;
  return { type: word, offset: offset + 8, bytes, next };
}

function parseMatrix(buf: Uint8Array, start: number, end: number): MatVariable {
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  // array flags
  const flags = readElement(view, start);
  if (flags.type !== miUINT32 || flags.bytes < 8) {
    throw new MatFormatError("matrix: malformed array-flags subelement");
  }
  const klass = view.getUint32(flags.offset, true) & 0xff;
  // dimensions
  const dimEl = readElement(view, flags.next);
  if (dimEl.type !== miINT32) throw new MatFormatError("matrix: malformed dimensions");
  const dims = Array.from(readNumeric(view, dimEl.offset, miINT32, dimEl.bytes / 4));
  // name
  const nameEl = readElement(view, dimEl.next);
  if (nameEl.type !== miINT8) throw new MatFormatError("matrix: malformed name");
  const name = new TextDecoder().decode(buf.subarray(nameEl.offset, nameEl.offset + nameEl.bytes));
  // real part (MATLAB may store doubles with a narrower type when lossless)
  const dataEl = readElement(view, nameEl.next);
  if (dataEl.next > end + 8) throw new MatFormatError("matrix: data subelement overruns element");
  const count = dims.reduce((a, b) => a * b, 1);
  const width = typeBytes(dataEl.type);
  if (dataEl.bytes < count * width) {
    throw new MatFormatError(
      `matrix '${name}': expected ${count} values, payload holds ${dataEl.bytes / width}`,
    );
  }
  const values = readNumeric(view, dataEl.offset, dataEl.type, count);
  if (klass === mxCHAR) {
    return { name, dims, data: String.fromCharCode(...values) };
  }
  return { name, dims, data: values };
}

/** Parse every top-level variable of a little-endian Level-5 MAT file. */
export function readMat(buf: Uint8Array): Map<string, MatVariable> {
  if (buf.length < 128) throw new MatFormatError("file shorter than the 128-byte MAT header");
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const version = view.getUint16(124, true);
  const e1 = buf[126];
  const e2 = buf[127];
  if (e1 === 0x4d && e2 === 0x49) {
    throw new MatFormatError("big-endian MAT files are not supported");
  }
  if (e1 !== 0x49 || e2 !== 0x4d || version !== 0x0100) {
    throw new MatFormatError("not a Level-5 MAT file (bad version/endian marker)");
  }
  const vars = new Map<string, MatVariable>();
  let offset = 128;
  while (offset + 8 <= buf.length) {
    const el = readElement(view, offset);
    if (el.offset + el.bytes > buf.length) {
      throw new MatFormatError("truncated MAT element");
    }
    if (el.type === miCOMPRESSED) {
      const inflated = new Uint8Array(inflateSync(buf.subarray(el.offset, el.offset + el.bytes)));
      const innerView = new DataView(inflated.buffer, inflated.byteOffset, inflated.byteLength);
      const inner = readElement(innerView, 0);
      if (inner.type !== miMATRIX) throw new MatFormatError("compressed element is not a matrix");
      const v = parseMatrix(inflated, inner.offset, inner.offset + inner.bytes);
      vars.set(v.name, v);
    } else if (el.type === miMATRIX) {
      const v = parseMatrix(buf, el.offset, el.offset + el.bytes);
      vars.set(v.name, v);
    }
    // other top-level element types are skipped
    offset = el.next;
  }
  return vars;
}

// ---------------------------------------------------------------------------
// writer (fixtures + golden files)

function pad8(n: number): number {
  return Math.ceil(n / 8) * 8;
}

export type MatWritable =
  | { name: string; dims: [number, number]; data: Float64Array; kind: "double" }
  | { name: string; dims: [number, number]; data: Int16Array; kind: "int16" }
  | { name: string; data: string; kind: "char" };

function buildMatrixElement(v: MatWritable): Uint8Array {
  let klass: number;
  let dataType: number;
  let dims: [number, number];
  let payload: Uint8Array;
  if (v.kind === "char") {
    klass = mxCHAR;
    dataType = miUINT16;
    dims = [1, v.data.length];
    payload = new Uint8Array(v.data.length * 2);
    const dv = new DataView(payload.buffer);
    for (let i = 0; i < v.data.length; i++) dv.setUint16(2 * i, v.data.charCodeAt(i), true);
  } else if (v.kind === "int16") {
    klass = mxINT16;
    dataType = miINT16;
    dims = v.dims;
    payload = new Uint8Array(v.data.buffer.slice(v.data.byteOffset, v.data.byteOffset + v.data.byteLength));
  } else {
    klass = mxDOUBLE;
    dataType = miDOUBLE;
    dims = v.dims;
    payload = new Uint8Array(v.data.buffer.slice(v.data.byteOffset, v.data.byteOffset + v.data.byteLength));
  }
  const nameBytes = new TextEncoder().encode(v.name);
  const total =
    16 + // array flags
    16 + // dims (2 x int32 + tag)
    8 + pad8(nameBytes.length) +
    8 + pad8(payload.length);
  const out = new Uint8Array(8 + total);
  const dv = new DataView(out.buffer);
  let o = 0;
  dv.setUint32(o, miMATRIX, true);
  dv.setUint32(o + 4, total, true);
  o += 8;
  dv.setUint32(o, miUINT32, true);
  dv.setUint32(o + 4, 8, true);
  dv.setUint32(o + 8, klass, true);
  dv.setUint32(o + 12, 0, true);
  o += 16;
  dv.setUint32(o, miINT32, true);
  dv.setUint32(o + 4, 8, true);
  dv.setInt32(o + 8, dims[0], true);
  dv.setInt32(o + 12, dims[1], true);
  o += 16;
  dv.setUint32(o, miINT8, true);
  dv.setUint32(o + 4, nameBytes.length, true);
  out.set(nameBytes, o + 8);
  o += 8 + pad8(nameBytes.length);
  dv.setUint32(o, dataType, true);
  dv.setUint32(o + 4, payload.length, true);
  out.set(payload, o + 8);
  return out;
}

/** Serialize variables into a Level-5 MAT file (optionally zlib-compressed elements). */
export function writeMat(vars: MatWritable[], compress = false): Uint8Array {
  const header = new Uint8Array(128);
  const text = "MATLAB 5.0 MAT-file, written by the hdseizure converter fixture writer";
  header.set(new TextEncoder().encode(text).subarray(0, 116));
  const hv = new DataView(header.buffer);
  hv.setUint16(124, 0x0100, true);
  header[126] = 0x49; // 'I'
  header[127] = 0x4d; // 'M'

  const parts: Uint8Array[] = [header];
  for (const v of vars) {
    let el = buildMatrixElement(v);
    if (compress) {
      const deflated = new Uint8Array(deflateSync(el));
      const wrapped = new Uint8Array(8 + pad8(deflated.length));
      const dv = new DataView(wrapped.buffer);
      dv.setUint32(0, miCOMPRESSED, true);
      dv.setUint32(4, deflated.length, true);
      wrapped.set(deflated, 8);
      el = wrapped;
    } else if (el.length % 8 !== 0) {
      const padded = new Uint8Array(pad8(el.length));
      padded.set(el);
      el = padded;
    }
    parts.push(el);
  }
  const total = parts.reduce((a, p) => a + p.length, 0);
  const out = new Uint8Array(total);
  let o = 0;
  for (const p of parts) {
    out.set(p, o);
    o += p.length;
  }
  return out;
}
