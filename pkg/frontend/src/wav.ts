/** Minimal reader for mono 32-bit float RIFF WAV files. */

export interface WavData {
  sampleRate: number;
  samples: Float32Array;
}

export function parseWav(buffer: Buffer): WavData {
  if (buffer.length < 12 || buffer.toString("ascii", 0, 4) !== "RIFF" ||
      buffer.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error("not a RIFF/WAVE file");
  }
  let offset = 12;
  let sampleRate = 0;
  let format = 0;
  let channels = 0;
  let bitsPerSample = 0;
  let data: Buffer | null = null;
  while (offset + 8 <= buffer.length) {
    const id = buffer.toString("ascii", offset, offset + 4);
    const size = buffer.readUInt32LE(offset + 4);
    const body = offset + 8;
    if (id === "fmt ") {
      format = buffer.readUInt16LE(body);
      channels = buffer.readUInt16LE(body + 2);
      sampleRate = buffer.readUInt32LE(body + 4);
      bitsPerSample = buffer.readUInt16LE(body + 14);
    } else if (id === "data") {
      data = buffer.subarray(body, body + size);
    }
    offset = body + size + (size % 2); // chunks are word-aligned
  }
  if (data === null || sampleRate === 0) {
    throw new Error("missing fmt or data chunk");
  }
  if (format !== 3 || bitsPerSample !== 32) {
    throw new Error(`expected 32-bit float samples, got format ${format}/${bitsPerSample} bit`);
  }
  if (channels !== 1) {
    throw new Error(`expected mono audio, got ${channels} channels`);
  }
  // copy: the data chunk offset inside the Buffer may not be 4-byte aligned
  const samples = new Float32Array(data.length / 4);
  for (let i = 0; i < samples.length; i++) {
    samples[i] = data.readFloatLE(i * 4);
  }
  return { sampleRate, samples };
}
