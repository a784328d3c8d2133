/**
 * HDSR v1 writer: the native recording format of the detection pipeline.
 *
 * Little-endian layout: magic "HDSR", version u16, fs_in u32, n_electrodes
 * u16, n_samples u64, onset_idx u64, offset_idx u64, patient_id u16 length +
 * UTF-8 bytes, then samples as i16, channel-major.
 */

export interface HdsrRecording {
  patientId: string;
  fs: number;
  nElectrodes: number;
  nSamples: number;
  onsetIdx: number;
  offsetIdx: number;
  /** channel-major i16 samples, length nElectrodes * nSamples */
  samples: Int16Array;
}

export class HdsrError extends Error {}

export function writeHdsr(rec: HdsrRecording): Uint8Array {
  const { nElectrodes, nSamples, onsetIdx, offsetIdx } = rec;
  if (nElectrodes < 1 || nElectrodes > 1024) {
    throw new HdsrError(`n_electrodes must be in [1, 1024], got ${nElectrodes}`);
  }
  if (!(onsetIdx > 0 && onsetIdx < offsetIdx && offsetIdx <= nSamples)) {
    throw new HdsrError(
      `need 0 < onset < offset <= ${nSamples}, got ${onsetIdx}, ${offsetIdx}`,
    );
  }
  if (rec.samples.length !== nElectrodes * nSamples) {
    throw new HdsrError("sample buffer does not match n_electrodes * n_samples");
  }
  const pid = new TextEncoder().encode(rec.patientId);
  if (pid.length > 0xffff) throw new HdsrError("patient_id longer than 65535 bytes");

  const headerLen = 4 + 2 + 4 + 2 + 8 + 8 + 8 + 2 + pid.length;
  const out = new Uint8Array(headerLen + rec.samples.length * 2);
  const dv = new DataView(out.buffer);
  let o = 0;
  out.set([0x48, 0x44, 0x53, 0x52], o); // "HDSR"
  o += 4;
  dv.setUint16(o, 1, true);
  o += 2;
  dv.setUint32(o, rec.fs, true);
  o += 4;
  dv.setUint16(o, nElectrodes, true);
  o += 2;
  dv.setBigUint64(o, BigInt(nSamples), true);
  o += 8;
  dv.setBigUint64(o, BigInt(onsetIdx), true);
  o += 8;
  dv.setBigUint64(o, BigInt(offsetIdx), true);
  o += 8;
  dv.setUint16(o, pid.length, true);
  o += 2;
  out.set(pid, o);
  o += pid.length;
  for (let i = 0; i < rec.samples.length; i++) {
    dv.setInt16(o + 2 * i, rec.samples[i], true);
  }
  return out;
}
