/* tslint:disable */
/* eslint-disable */

export class ConstantResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly branch: string;
    value: number;
}

export function normConstant(dim: number, m: number, s: number): ConstantResult;

/**
 * Flat `[x..., field..., direct..., spectral...]`, each block `count` long.
 */
export function operatorProfile(field: string, m: number, s: number, lo: number, hi: number, count: number): Float64Array;

export function stencilWeights(m: number): string[];

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_constantresult_free: (a: number, b: number) => void;
    readonly __wbg_get_constantresult_value: (a: number) => number;
    readonly __wbg_set_constantresult_value: (a: number, b: number) => void;
    readonly constantresult_branch: (a: number) => [number, number];
    readonly normConstant: (a: number, b: number, c: number) => [number, number, number];
    readonly operatorProfile: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly stencilWeights: (a: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
