/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_surrogatecomparison_free: (a: number, b: number) => void;
export const annealTrajectory: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const compareSurrogate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
export const featureMap: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const featureNames: (a: number) => [number, number, number, number];
export const surrogatecomparison_evolutions: (a: number) => number;
export const surrogatecomparison_points: (a: number) => [number, number];
export const surrogatecomparison_quantum: (a: number) => [number, number];
export const surrogatecomparison_rmse: (a: number) => number;
export const surrogatecomparison_surrogate: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
