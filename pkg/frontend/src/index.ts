/**
 * Batch RIR generation for data-loader pipelines.
 *
 * The only interface to the core is its command line: each worker process
 * runs `frarir generate --seeds ...` into a temporary directory and the WAV
 * files are read back as Float32Array rows. Work happens in child processes,
 * so the Node event loop stays free while a batch is computing.
 */
import { execFile } from "node:child_process";
import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { promisify } from "node:util";

import { parseWav } from "./wav.js";

const execFileAsync = promisify(execFile);

export const VERSION = "0.1.0";

const MAX_SEED = (1n << 64n) - 1n;

/** Flat config mirroring the core's field names; all fields optional. */
export interface SimulationConfig {
  sample_rate?: number;
  high_rate_factor?: number;
  mid_rate_factor?: number;
  t60_range?: [number, number];
  room_stat_range?: [number, number];
  direct_range?: [number, number];
  alpha?: number;
  beta?: number;
  perturb_range?: [number, number];
  shrink_tau?: number;
  sound_velocity?: number;
  num_images?: number;
  early_window_ms?: [number, number];
}

export function makeConfig(fields: SimulationConfig = {}): SimulationConfig {
  return { ...fields };
}

export interface BatchRequest {
  config?: SimulationConfig;
  seeds: Array<number | bigint>;
  emitEarly?: boolean;
}

export interface FilterMetadata {
  seed: bigint;
  t60: number;
  room_stat: number;
  reflection_coeff: number;
  direct_dist: number;
  direct_index: number;
  /** true (un-padded) sample count of this row */
  length: number;
  elapsed_seconds: number;
}

export interface BatchResult {
  /** one row per seed, zero-padded to the longest filter */
  full: Float32Array[];
  early?: Float32Array[];
  metadata: FilterMetadata[];
  sampleRate: number;
}

export interface BatchOptions {
  /** worker process count; defaults to 1 */
  threads?: number;
  /** core executable; defaults to `frarir` on PATH or $FRARIR_CLI */
  cliPath?: string;
}

function cliPathOf(options?: BatchOptions): string {
  return options?.cliPath ?? process.env.FRARIR_CLI ?? "frarir";
}

function normalizeSeed(seed: number | bigint): bigint {
  const value = typeof seed === "bigint" ? seed : BigInt(seed);
  if (value < 0n || value > MAX_SEED) {
    throw new Error(`seed must be a 64-bit unsigned integer, got ${value}`);
  }
  return value;
}

function rethrowCoreError(error: unknown): never {
  // the CLI prints one JSON line {"error", "message"} on stderr
  const stderr = (error as { stderr?: string }).stderr;
  if (stderr) {
    const lines = stderr.trim().split("\n");
    try {
      const parsed = JSON.parse(lines[lines.length - 1]);
      throw new Error(`${parsed.error}: ${parsed.message}`);
    } catch (inner) {
      if (inner instanceof Error && !(inner instanceof SyntaxError)) throw inner;
    }
  }
  throw error;
}

interface ManifestRecord {
  file: string;
  early_file?: string;
  seed: number;
  t60: number;
  room_stat: number;
  reflection_coeff: number;
  direct_dist: number;
  direct_index: number;
  length: number;
  elapsed_seconds: number;
}

async function runChunk(
  cli: string,
  seeds: bigint[],
  configPath: string | null,
  outDir: string,
  emitEarly: boolean,
): Promise<{ records: ManifestRecord[]; sampleRate: number; dir: string }> {
  const argv = ["generate", "--seeds", seeds.join(","), "--out", outDir,
    "--threads", "1"];
  if (configPath) argv.push("--config", configPath);
  if (emitEarly) argv.push("--emit-early");
  try {
    await execFileAsync(cli, argv, { maxBuffer: 1 << 20 });
  } catch (error) {
    rethrowCoreError(error);
  }
  const manifest = JSON.parse(
    await readFile(path.join(outDir, "manifest.json"), "utf8"));
  return { records: manifest.filters, sampleRate: manifest.sample_rate, dir: outDir };
}

function padRows(rows: Float32Array[]): Float32Array[] {
  const width = Math.max(...rows.map((r) => r.length));
  return rows.map((row) => {
    if (row.length === width) return row;
    const padded = new Float32Array(width);
    padded.set(row);
    return padded;
  });
}

/** Generate one filter per seed; rows are bit-identical to the core output. */
export async function generateBatch(
  request: BatchRequest,
  options?: BatchOptions,
): Promise<BatchResult> {
  if (!request.seeds || request.seeds.length === 0) {
    throw new Error("seeds must be non-empty");
  }
  const seeds = request.seeds.map(normalizeSeed);
  const threads = Math.max(1, Math.min(options?.threads ?? 1, seeds.length));
  const cli = cliPathOf(options);
  const emitEarly = request.emitEarly ?? false;

  const workDir = await mkdtemp(path.join(tmpdir(), "frarir-batch-"));
  try {
    let configPath: string | null = null;
    if (request.config && Object.keys(request.config).length > 0) {
      configPath = path.join(workDir, "config.json");
      await writeFile(configPath, JSON.stringify(request.config));
    }

    // contiguous chunks, one worker process each
    const chunkSize = Math.ceil(seeds.length / threads);
    const chunks: Array<{ seeds: bigint[]; start: number }> = [];
    for (let start = 0; start < seeds.length; start += chunkSize) {
      chunks.push({ seeds: seeds.slice(start, start + chunkSize), start });
    }
    const results = await Promise.all(chunks.map((chunk, i) =>
      runChunk(cli, chunk.seeds, configPath, path.join(workDir, `chunk${i}`),
        emitEarly)));

    const full: Float32Array[] = new Array(seeds.length);
    const early: Float32Array[] = emitEarly ? new Array(seeds.length) : [];
    const metadata: FilterMetadata[] = new Array(seeds.length);
    let sampleRate = 0;
    for (const [i, result] of results.entries()) {
      sampleRate = result.sampleRate;
      for (const [j, record] of result.records.entries()) {
        const row = chunks[i].start + j;
        const wav = parseWav(await readFile(path.join(result.dir, record.file)));
        full[row] = wav.samples;
        if (emitEarly && record.early_file) {
          early[row] = parseWav(
            await readFile(path.join(result.dir, record.early_file))).samples;
        }
        metadata[row] = {
          // taken from the request: JSON numbers lose 64-bit precision
          seed: chunks[i].seeds[j],
          t60: record.t60,
          room_stat: record.room_stat,
          reflection_coeff: record.reflection_coeff,
          direct_dist: record.direct_dist,
          direct_index: record.direct_index,
          length: record.length,
          elapsed_seconds: record.elapsed_seconds,
        };
      }
    }
    const result: BatchResult = {
      full: padRows(full),
      metadata,
      sampleRate,
    };
    if (emitEarly) result.early = padRows(early);
    return result;
  } finally {
    await rm(workDir, { recursive: true, force: true });
  }
}

/** Version of the core CLI this package talks to. */
export async function coreVersion(options?: BatchOptions): Promise<string> {
  const { stdout } = await execFileAsync(cliPathOf(options), ["--version"]);
  return stdout.trim();
}
