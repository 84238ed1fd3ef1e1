/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_stepper_free: (a: number, b: number) => void;
export const convergence_csv: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const stepper_energy: (a: number) => number;
export const stepper_modified_energy: (a: number) => number;
export const stepper_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const stepper_render: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const stepper_step: (a: number, b: number) => [number, number];
export const stepper_symmetry: (a: number) => [number, number];
export const stepper_time: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
