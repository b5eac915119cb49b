/* tslint:disable */
/* eslint-disable */

/**
 * Fitted against true crash probabilities along a swept volatility covariate.
 */
export class CrashDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly betaHat: Float64Array;
    readonly expectedLoss: Float64Array;
    readonly fitted: Float64Array;
    readonly percentiles: Float64Array;
    readonly truth: Float64Array;
    readonly xiHat: number;
}

/**
 * One simulate-then-fit run.
 */
export class FitDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly aic: number;
    readonly betaHat: Float64Array;
    readonly betaTrue: Float64Array;
    readonly bic: number;
    readonly converged: boolean;
    readonly df: number;
    /**
     * `NaN` for families without one.
     */
    readonly hyperparameter: number;
    readonly testRmse: number;
    readonly xiHat: number;
    readonly xiTrue: number;
}

/**
 * Density and survival function on an even grid.
 */
export class GpdCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly density: Float64Array;
    /**
     * `NaN` when `xi >= 1`.
     */
    readonly mean: number;
    readonly survival: Float64Array;
    readonly y: Float64Array;
}

/**
 * Simulates `n` loss days above a 2% threshold with scale
 * `exp(b0 + vol_effect * z)`, fits the Cauchy-prior model and sweeps `z`
 * from its 5th to 95th percentile.
 */
export function crashDemo(n: number, vol_effect: number, xi: number, y0: number, seed: number): CrashDemo;

/**
 * Evaluates the GPD on `points` values from `mu` to `mu + span` (clipped at a
 * finite upper endpoint).
 */
export function gpdCurve(mu: number, sigma: number, xi: number, span: number, points: number): GpdCurve;

/**
 * Draws `beta ~ N(0, 1)` for `p` covariates, simulates `n` rows, fits
 * `prior` on 80% of them (cross-validating the hyperparameter when
 * `hyper <= 0`) and scores the rest.
 */
export function simulateAndFit(n: number, p: number, xi: number, prior: string, hyper: number, seed: number): FitDemo;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_crashdemo_free: (a: number, b: number) => void;
    readonly __wbg_fitdemo_free: (a: number, b: number) => void;
    readonly __wbg_gpdcurve_free: (a: number, b: number) => void;
    readonly crashDemo: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly crashdemo_betaHat: (a: number) => [number, number];
    readonly crashdemo_expectedLoss: (a: number) => [number, number];
    readonly crashdemo_fitted: (a: number) => [number, number];
    readonly crashdemo_percentiles: (a: number) => [number, number];
    readonly crashdemo_truth: (a: number) => [number, number];
    readonly crashdemo_xiHat: (a: number) => number;
    readonly fitdemo_aic: (a: number) => number;
    readonly fitdemo_betaHat: (a: number) => [number, number];
    readonly fitdemo_betaTrue: (a: number) => [number, number];
    readonly fitdemo_bic: (a: number) => number;
    readonly fitdemo_converged: (a: number) => number;
    readonly fitdemo_df: (a: number) => number;
    readonly fitdemo_hyperparameter: (a: number) => number;
    readonly fitdemo_testRmse: (a: number) => number;
    readonly fitdemo_xiHat: (a: number) => number;
    readonly fitdemo_xiTrue: (a: number) => number;
    readonly gpdCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly gpdcurve_density: (a: number) => [number, number];
    readonly gpdcurve_mean: (a: number) => number;
    readonly gpdcurve_survival: (a: number) => [number, number];
    readonly gpdcurve_y: (a: number) => [number, number];
    readonly simulateAndFit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
