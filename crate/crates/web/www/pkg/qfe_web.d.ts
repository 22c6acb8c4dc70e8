/* tslint:disable */
/* eslint-disable */

export class SurrogateComparison {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly evolutions: number;
    readonly points: Float64Array;
    readonly quantum: Float64Array;
    readonly rmse: number;
    readonly surrogate: Float64Array;
}

export function annealTrajectory(x: Float64Array, coupling: number, steps: number, total_time: number, cd: boolean): Float64Array;

export function compareSurrogate(n: number, feature: number, res: number, m: number, lift: string, lift_param: number, lambda: number, seed: bigint): SurrogateComparison;

export function featureMap(n: number, feature: number, res: number, coupling: number, steps: number, cd: boolean): Float64Array;

export function featureNames(n: number): string[];

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_surrogatecomparison_free: (a: number, b: number) => void;
    readonly annealTrajectory: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly compareSurrogate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
    readonly featureMap: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly featureNames: (a: number) => [number, number, number, number];
    readonly surrogatecomparison_evolutions: (a: number) => number;
    readonly surrogatecomparison_points: (a: number) => [number, number];
    readonly surrogatecomparison_quantum: (a: number) => [number, number];
    readonly surrogatecomparison_rmse: (a: number) => number;
    readonly surrogatecomparison_surrogate: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
