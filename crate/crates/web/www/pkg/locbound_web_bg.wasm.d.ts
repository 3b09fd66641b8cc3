/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const lattice_partition: (a: number, b: number, c: number) => [number, number];
export const overhead: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
export const werner_bracket: (a: number, b: number, c: number, d: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
