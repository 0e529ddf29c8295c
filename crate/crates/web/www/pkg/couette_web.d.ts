/* tslint:disable */
/* eslint-disable */

/**
 * A running nonlinear simulation from a random real perturbation.
 */
export class Annulus {
    free(): void;
    [Symbol.dispose](): void;
    constructor(nu: number, a: number, b: number, aspect: number, k_max: number, n: number, amplitude: number, seed: number);
    radii(): Float64Array;
    step(steps: number): void;
    vorticity(m: number): Float64Array;
    readonly dt: number;
    /**
     * `‖ω_≠‖ + ‖ρ_≠‖` over the nonzero modes.
     */
    readonly perturbation_norm: number;
    readonly time: number;
}

/**
 * `‖f(t)‖` for the unforced linear problem started from a smooth bump.
 */
export class DecayCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    norms(): Float64Array;
    times(): Float64Array;
    readonly psi: number;
    /**
     * Fitted tail rate over the second half of the run.
     */
    readonly rate: number;
}

/**
 * Sampled `σ_min(𝓛 - iλ)` with its minimum `Ψ`.
 */
export class GapCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    lambdas(): Float64Array;
    sigmas(): Float64Array;
    readonly argmin: number;
    readonly psi: number;
}

export function decay_curve(nu: number, b: number, aspect: number, k: number, n: number, horizon_psi: number, steps: number): DecayCurve;

export function gap_curve(nu: number, b: number, aspect: number, k: number, n: number, steps: number): GapCurve;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_annulus_free: (a: number, b: number) => void;
    readonly __wbg_decaycurve_free: (a: number, b: number) => void;
    readonly __wbg_gapcurve_free: (a: number, b: number) => void;
    readonly annulus_dt: (a: number) => number;
    readonly annulus_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly annulus_perturbation_norm: (a: number) => number;
    readonly annulus_radii: (a: number) => [number, number];
    readonly annulus_step: (a: number, b: number) => [number, number];
    readonly annulus_time: (a: number) => number;
    readonly annulus_vorticity: (a: number, b: number) => [number, number, number, number];
    readonly decay_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly decaycurve_norms: (a: number) => [number, number];
    readonly decaycurve_psi: (a: number) => number;
    readonly decaycurve_rate: (a: number) => number;
    readonly decaycurve_times: (a: number) => [number, number];
    readonly gap_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly gapcurve_argmin: (a: number) => number;
    readonly gapcurve_lambdas: (a: number) => [number, number];
    readonly gapcurve_psi: (a: number) => number;
    readonly gapcurve_sigmas: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
