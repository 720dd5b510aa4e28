/* tslint:disable */
/* eslint-disable */

/**
 * Direct closed-loop FRF `(G S_RR - C* S_VV) / (S_RR + |C|^2 S_VV)` for a
 * second-order resonant plant and a proportional controller with a
 * one-sample delay, for each noise-to-reference ratio in `ratios`.
 */
export function closed_loop_mixture(resonance: number, damping: number, controller_gain: number, ratios: Float64Array): string;

/**
 * Random-phase multisine for the given grid.
 */
export function design_multisine(n_samples: number, sample_rate: number, f_min: number, f_max: number, kind: string, rms: number, seed: bigint): string;

/**
 * Measures the hardening Duffing oscillator at one RMS level and returns the
 * distortion classification and the robust-method BLA.
 */
export function duffing_analysis(rms: number, k_cubic: number, noise_std: number, realizations: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly closed_loop_mixture: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly design_multisine: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: bigint) => [number, number, number, number];
    readonly duffing_analysis: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
