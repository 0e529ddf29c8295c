/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_annulus_free: (a: number, b: number) => void;
export const __wbg_decaycurve_free: (a: number, b: number) => void;
export const __wbg_gapcurve_free: (a: number, b: number) => void;
export const annulus_dt: (a: number) => number;
export const annulus_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const annulus_perturbation_norm: (a: number) => number;
export const annulus_radii: (a: number) => [number, number];
export const annulus_step: (a: number, b: number) => [number, number];
export const annulus_time: (a: number) => number;
export const annulus_vorticity: (a: number, b: number) => [number, number, number, number];
export const decay_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const decaycurve_norms: (a: number) => [number, number];
export const decaycurve_psi: (a: number) => number;
export const decaycurve_rate: (a: number) => number;
export const decaycurve_times: (a: number) => [number, number];
export const gap_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const gapcurve_argmin: (a: number) => number;
export const gapcurve_lambdas: (a: number) => [number, number];
export const gapcurve_psi: (a: number) => number;
export const gapcurve_sigmas: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
