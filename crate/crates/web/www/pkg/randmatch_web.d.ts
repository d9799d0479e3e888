/* tslint:disable */
/* eslint-disable */

export function chain_trace(graph: string, log2_lambda: number, steps: bigint, seed: bigint): string;

export function generate_graph(family: string, n: number, p: number, d: number, seed: bigint): string;

export function gibbs_profile(graph: string, x_min: number, x_max: number, points: number): string;

export function mixing_curve(graph: string, log2_lambda: number, horizon: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly chain_trace: (a: number, b: number, c: number, d: bigint, e: bigint) => [number, number, number, number];
    readonly generate_graph: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
    readonly gibbs_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly mixing_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
