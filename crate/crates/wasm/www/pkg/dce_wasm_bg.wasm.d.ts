/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const phenom: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
export const self_energy: (a: number, b: number, c: number) => [number, number, number, number];
export const sweep: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
