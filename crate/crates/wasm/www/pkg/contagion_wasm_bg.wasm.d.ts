/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_epidemicdemo_free: (a: number, b: number) => void;
export const __wbg_percolationsample_free: (a: number, b: number) => void;
export const bounds_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
export const epidemicdemo_cells: (a: number) => [number, number];
export const epidemicdemo_contaminated: (a: number) => number;
export const epidemicdemo_events: (a: number) => bigint;
export const epidemicdemo_extinct: (a: number) => number;
export const epidemicdemo_infected: (a: number) => number;
export const epidemicdemo_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const epidemicdemo_side: (a: number) => number;
export const epidemicdemo_step: (a: number, b: number) => number;
export const epidemicdemo_time: (a: number) => number;
export const percolationsample_cells: (a: number) => [number, number];
export const percolationsample_new: (a: number, b: number, c: number, d: bigint) => number;
export const percolationsample_spanning: (a: number) => number;
export const subcritical_threshold: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
