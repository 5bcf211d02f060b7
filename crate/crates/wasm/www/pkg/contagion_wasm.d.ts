/* tslint:disable */
/* eslint-disable */

/**
 * A two-dimensional epidemic advanced a batch of events at a time.
 */
export class EpidemicDemo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * One byte of flags per site, row-major with `x` fastest.
     */
    cells(): Uint8Array;
    contaminated(): number;
    events(): bigint;
    extinct(): boolean;
    infected(): number;
    /**
     * `gamma` may be `Infinity` (no contamination).
     */
    constructor(side: number, k: number, lambda: number, gamma: number, seed: bigint);
    side(): number;
    /**
     * Executes up to `events` events; stops early once nothing can
     * happen. Returns the number executed.
     */
    step(events: number): number;
    time(): number;
}

export class PercolationSample {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * One code per site, row-major.
     */
    cells(): Uint8Array;
    /**
     * Site percolation on an `n x n` box; `eight` selects diagonal
     * adjacency. Grids from one seed are nested in `p`.
     */
    constructor(n: number, p: number, eight: boolean, seed: bigint);
    spanning(): boolean;
}

/**
 * Offspring bound at `points` recovery rates spaced geometrically over
 * `[lambda_min, lambda_max]`, as `[lambda0, bound0, lambda1, bound1, ...]`.
 * Invalid parameters give an empty curve.
 */
export function bounds_curve(d: number, k: number, m_bar: number, gamma: number, lambda_min: number, lambda_max: number, points: number): Float64Array;

/**
 * Smallest recovery rate certified subcritical; `NaN` when the
 * parameters are invalid, 0 when `gamma` is infinite.
 */
export function subcritical_threshold(gamma: number, d: number, k: number, m_bar: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_epidemicdemo_free: (a: number, b: number) => void;
    readonly __wbg_percolationsample_free: (a: number, b: number) => void;
    readonly bounds_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly epidemicdemo_cells: (a: number) => [number, number];
    readonly epidemicdemo_contaminated: (a: number) => number;
    readonly epidemicdemo_events: (a: number) => bigint;
    readonly epidemicdemo_extinct: (a: number) => number;
    readonly epidemicdemo_infected: (a: number) => number;
    readonly epidemicdemo_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly epidemicdemo_side: (a: number) => number;
    readonly epidemicdemo_step: (a: number, b: number) => number;
    readonly epidemicdemo_time: (a: number) => number;
    readonly percolationsample_cells: (a: number) => [number, number];
    readonly percolationsample_new: (a: number, b: number, c: number, d: bigint) => number;
    readonly percolationsample_spanning: (a: number) => number;
    readonly subcritical_threshold: (a: number, b: number, c: number, d: number) => number;
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
