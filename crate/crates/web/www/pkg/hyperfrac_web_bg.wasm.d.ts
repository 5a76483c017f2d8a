/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_constantresult_free: (a: number, b: number) => void;
export const __wbg_get_constantresult_value: (a: number) => number;
export const __wbg_set_constantresult_value: (a: number, b: number) => void;
export const constantresult_branch: (a: number) => [number, number];
export const normConstant: (a: number, b: number, c: number) => [number, number, number];
export const operatorProfile: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const stencilWeights: (a: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
