/* tslint:disable */
/* eslint-disable */

/**
 * Classification report for one point, as JSON.
 */
export function classify_point(d: number, z: number, rbar: number): string;

/**
 * Verdict bytes for an `n × n` grid of the `d = 3` facet or the `d = 4`
 * cross-section (0 separable, 1 bound entangled, 2 NPT, 3 entangled with
 * unresolved PPT, 4 unknown).
 */
export function phase_map(d: number, n: number): Uint8Array;

/**
 * Schmidt-number lower and upper bounds for one point, as JSON.
 */
export function schmidt_window(d: number, z: number, rbar: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly classify_point: (a: number, b: number, c: number) => [number, number, number, number];
    readonly phase_map: (a: number, b: number) => [number, number, number, number];
    readonly schmidt_window: (a: number, b: number, c: number) => [number, number, number, number];
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
