/**
 * MAT-file recording -> HDSR v1 conversion.
 *
 * Expected source variables (one recording per file, per the exported
 * dataset's layout):
 *   eeg / data / EEG : channels x samples numeric matrix (column-major in
 *                      the file; the smaller dimension is taken as channels)
 *   fs               : scalar sampling rate
 *   onset_idx / offset_idx : ictal bounds in samples (1-based, MATLAB style)
 *     or onset_s / offset_s : the same in seconds
 *   patient_id       : optional char row vector
 *
 * Amplitudes are scaled and clamped to the 16-bit range; the scale factor is
 * recorded as a "|scale=<value>" suffix on the patient id so the
 * quantization error can be bounded after inverse scaling.
 */

import { MatFormatError, MatVariable, readMat } from "./matfile.js";
import { HdsrRecording, writeHdsr } from "./hdsr.js";

export class ConversionError extends Error {}

const MATRIX_NAMES = ["eeg", "data", "EEG"];

function pick(vars: Map<string, MatVariable>, names: string[]): MatVariable | undefined {
  for (const n of names) {
    const v = vars.get(n);
    if (v) return v;
  }
  return undefined;
}

function scalar(vars: Map<string, MatVariable>, name: string): number | undefined {
  const v = vars.get(name);
  if (!v || typeof v.data === "string") return undefined;
  if (v.data.length !== 1) throw new ConversionError(`variable '${name}' must be scalar`);
  return v.data[0];
}

export interface ConvertOptions {
  /** "auto" fits the full int16 range with headroom; a number is used as-is */
  scale?: "auto" | number;
  /** fallback patient id when the file carries none (usually the file stem) */
  defaultPatientId?: string;
}

export function convertMat(buf: Uint8Array, opts: ConvertOptions = {}): Uint8Array {
  let vars: Map<string, MatVariable>;
  try {
    vars = readMat(buf);
  } catch (e) {
    if (e instanceof MatFormatError) throw new ConversionError(`unreadable source: ${e.message}`);
    throw e;
  }

  const matrix = pick(vars, MATRIX_NAMES);
  if (!matrix || typeof matrix.data === "string") {
    throw new ConversionError(
      `missing signal matrix (looked for ${MATRIX_NAMES.join(", ")})`,
    );
  }
  if (matrix.dims.length !== 2) {
    throw new ConversionError("signal matrix must be 2-D (channels x samples)");
  }
  const fs = scalar(vars, "fs");
  if (fs === undefined || !Number.isFinite(fs) || fs <= 0 || Math.round(fs) !== fs) {
    throw new ConversionError("missing or invalid 'fs' (positive integer scalar)");
  }

  const [rows, cols] = matrix.dims;
  // channels are the smaller dimension; the file stores column-major
  const transposed = rows > cols;
  const nElectrodes = transposed ? cols : rows;
  const nSamples = transposed ? rows : cols;
  if (nElectrodes < 1) throw new ConversionError("no channels in signal matrix");

  // annotations: sample indices win over seconds; MATLAB indices are 1-based
  let onset = scalar(vars, "onset_idx");
  let offset = scalar(vars, "offset_idx");
  if (onset !== undefined && offset !== undefined) {
    onset = Math.round(onset) - 1;
    offset = Math.round(offset); // 1-based inclusive end == 0-based exclusive
  } else {
    const onsetS = scalar(vars, "onset_s");
    const offsetS = scalar(vars, "offset_s");
    if (onsetS === undefined || offsetS === undefined) {
      throw new ConversionError(
        "missing annotations: need onset_idx/offset_idx or onset_s/offset_s",
      );
    }
    onset = Math.round(onsetS * fs);
    offset = Math.round(offsetS * fs);
  }
  if (!(onset > 0 && onset < offset && offset <= nSamples)) {
    throw new ConversionError(
      `annotations out of range: onset=${onset}, offset=${offset}, samples=${nSamples}`,
    );
  }

  const pidVar = vars.get("patient_id");
  const basePid =
    pidVar && typeof pidVar.data === "string" && pidVar.data.length
      ? pidVar.data
      : opts.defaultPatientId ?? "UNKNOWN";

  const src = matrix.data;
  let peak = 0;
  for (let i = 0; i < src.length; i++) {
    const a = Math.abs(src[i]);
    if (!Number.isFinite(a)) throw new ConversionError("signal contains non-finite samples");
    if (a > peak) peak = a;
  }
  let scale: number;
  if (opts.scale === undefined || opts.scale === "auto") {
    scale = peak === 0 ? 1 : peak <= 32000 && allIntegral(src) ? 1 : 32000 / peak;
  } else {
    if (!(opts.scale > 0)) throw new ConversionError("--scale must be positive");
    scale = opts.scale;
  }

  // column-major (dim0 fastest) -> channel-major rows
  const samples = new Int16Array(nElectrodes * nSamples);
  for (let ch = 0; ch < nElectrodes; ch++) {
    for (let t = 0; t < nSamples; t++) {
      const srcIdx = transposed ? ch * nSamples + t : t * nElectrodes + ch;
      let v = Math.round(src[srcIdx] * scale);
      if (v > 32767) v = 32767;
      if (v < -32768) v = -32768;
      samples[ch * nSamples + t] = v;
    }
  }

  const rec: HdsrRecording = {
    patientId: `${basePid}|scale=${formatScale(scale)}`,
    fs,
    nElectrodes,
    nSamples,
    onsetIdx: onset,
    offsetIdx: offset,
    samples,
  };
  return writeHdsr(rec);
}

function allIntegral(x: Float64Array): boolean {
  for (let i = 0; i < x.length; i++) {
    if (!Number.isInteger(x[i])) return false;
  }
  return true;
}

/** Deterministic scale rendering so re-conversion is byte-identical. */
export function formatScale(scale: number): string {
  return scale.toPrecision(12).replace(/\.?0+$/, "").replace(/\.?0+e/, "e");
}

/** Parse the scale factor back out of a converted patient id. */
export function parseScaleSuffix(patientId: string): { base: string; scale: number } {
  const m = /^(.*)\|scale=([0-9.eE+-]+)$/.exec(patientId);
  if (!m) throw new ConversionError(`patient id carries no scale suffix: ${patientId}`);
  return { base: m[1], scale: Number(m[2]) };
}
