/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_crashdemo_free: (a: number, b: number) => void;
export const __wbg_fitdemo_free: (a: number, b: number) => void;
export const __wbg_gpdcurve_free: (a: number, b: number) => void;
export const crashDemo: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const crashdemo_betaHat: (a: number) => [number, number];
export const crashdemo_expectedLoss: (a: number) => [number, number];
export const crashdemo_fitted: (a: number) => [number, number];
export const crashdemo_percentiles: (a: number) => [number, number];
export const crashdemo_truth: (a: number) => [number, number];
export const crashdemo_xiHat: (a: number) => number;
export const fitdemo_aic: (a: number) => number;
export const fitdemo_betaHat: (a: number) => [number, number];
export const fitdemo_betaTrue: (a: number) => [number, number];
export const fitdemo_bic: (a: number) => number;
export const fitdemo_converged: (a: number) => number;
export const fitdemo_df: (a: number) => number;
export const fitdemo_hyperparameter: (a: number) => number;
export const fitdemo_testRmse: (a: number) => number;
export const fitdemo_xiHat: (a: number) => number;
export const fitdemo_xiTrue: (a: number) => number;
export const gpdCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const gpdcurve_density: (a: number) => [number, number];
export const gpdcurve_mean: (a: number) => number;
export const gpdcurve_survival: (a: number) => [number, number];
export const gpdcurve_y: (a: number) => [number, number];
export const simulateAndFit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
