/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Rows `[t̃, spontaneous, seed only, spin only, uncorrelated sum, total]`
     * at phase difference `delta_phi`.
     */
    curves(delta_phi: number): Float64Array;
    /**
     * Rows `[Δφ, total]` over `points` phases in [0, 2π).
     */
    fringe(points: number): Float64Array;
    constructor(n: number, delay_us: number);
    /**
     * Phase offset φ₀ at the end of the pulse; NaN when there is no fringe.
     */
    phase_offset(): number;
    /**
     * Rows `[η, visibility, seed, spin wave]` for η over [0, 2].
     */
    visibility_sweep(points: number): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_curves: (a: number, b: number) => [number, number];
    readonly demo_fringe: (a: number, b: number) => [number, number];
    readonly demo_new: (a: number, b: number) => [number, number, number];
    readonly demo_phase_offset: (a: number) => number;
    readonly demo_visibility_sweep: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
