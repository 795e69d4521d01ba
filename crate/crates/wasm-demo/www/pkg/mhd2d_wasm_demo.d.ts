/* tslint:disable */
/* eslint-disable */

export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * The block `Δ_q` of a field.
     */
    band(name: string, q: number): Float64Array;
    band_norms(name: string): Float64Array;
    energy(): number;
    field(name: string): Float64Array;
    grid_n(): number;
    mass(): number;
    constructor(scenario: string, n: number, dt: number, seed: number);
    q_max(): number;
    q_min(): number;
    step(count: number): void;
    time(): number;
}

/**
 * See [`partition_rows`].
 */
export function partition_curves(q_min: number, q_max: number, samples: number, r_max: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly partition_curves: (a: number, b: number, c: number, d: number) => [number, number];
    readonly simulation_band: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly simulation_band_norms: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulation_energy: (a: number) => number;
    readonly simulation_field: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulation_grid_n: (a: number) => number;
    readonly simulation_mass: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly simulation_q_max: (a: number) => number;
    readonly simulation_q_min: (a: number) => number;
    readonly simulation_step: (a: number, b: number) => [number, number];
    readonly simulation_time: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
