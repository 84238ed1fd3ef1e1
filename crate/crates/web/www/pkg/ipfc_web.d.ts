/* tslint:disable */
/* eslint-disable */

/**
 * A dodecagonal run that the page advances a few steps at a time.
 */
export class Stepper {
    free(): void;
    [Symbol.dispose](): void;
    energy(): number;
    modified_energy(): number;
    /**
     * Seeds the two-ring dodecagonal star on `n⁴` modes.
     */
    constructor(n: number, length_scales: number, amplitude: number, tau: number);
    /**
     * RGBA pixels of the morphology on `[0, extent]²`, first row at the top.
     */
    render(width: number, height: number, extent: number): Uint8Array;
    /**
     * Advances `count` SAV/CN steps.
     */
    step(count: number): void;
    /**
     * Rotational symmetry of the current spectrum, e.g. `"12-fold"`.
     */
    symmetry(): string;
    time(): number;
}

/**
 * Temporal convergence table of the `sin x` benchmark on `modes` Fourier
 * modes, as CSV.
 */
export function convergence_csv(modes: number, t_end: number, steps: Uint32Array, reference: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_stepper_free: (a: number, b: number) => void;
    readonly convergence_csv: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly stepper_energy: (a: number) => number;
    readonly stepper_modified_energy: (a: number) => number;
    readonly stepper_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly stepper_render: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly stepper_step: (a: number, b: number) => [number, number];
    readonly stepper_symmetry: (a: number) => [number, number];
    readonly stepper_time: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
