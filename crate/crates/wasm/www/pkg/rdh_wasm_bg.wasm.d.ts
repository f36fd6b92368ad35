/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_get_roundtrip_changed_pixels: (a: number) => number;
export const __wbg_get_roundtrip_cross_t_n: (a: number) => number;
export const __wbg_get_roundtrip_cross_t_p: (a: number) => number;
export const __wbg_get_roundtrip_dot_t_n: (a: number) => number;
export const __wbg_get_roundtrip_dot_t_p: (a: number) => number;
export const __wbg_get_roundtrip_image_ok: (a: number) => number;
export const __wbg_get_roundtrip_payload_bits: (a: number) => number;
export const __wbg_get_roundtrip_payload_ok: (a: number) => number;
export const __wbg_get_roundtrip_psnr_db: (a: number) => number;
export const __wbg_roundtrip_free: (a: number, b: number) => void;
export const __wbg_set_roundtrip_changed_pixels: (a: number, b: number) => void;
export const __wbg_set_roundtrip_cross_t_n: (a: number, b: number) => void;
export const __wbg_set_roundtrip_cross_t_p: (a: number, b: number) => void;
export const __wbg_set_roundtrip_dot_t_n: (a: number, b: number) => void;
export const __wbg_set_roundtrip_dot_t_p: (a: number, b: number) => void;
export const __wbg_set_roundtrip_image_ok: (a: number, b: number) => void;
export const __wbg_set_roundtrip_payload_bits: (a: number, b: number) => void;
export const __wbg_set_roundtrip_payload_ok: (a: number, b: number) => void;
export const __wbg_set_roundtrip_psnr_db: (a: number, b: number) => void;
export const demo_cols: (a: number) => number;
export const demo_complexity_maps: (a: number) => [number, number, number, number];
export const demo_cover_pixels: (a: number) => [number, number];
export const demo_from_pgm: (a: number, b: number) => [number, number, number];
export const demo_from_rgba: (a: number, b: number, c: number, d: number) => [number, number, number];
export const demo_has_weights: (a: number) => number;
export const demo_load_weights: (a: number, b: number, c: number, d: number) => [number, number];
export const demo_marked_pixels: (a: number) => [number, number];
export const demo_predictor: (a: number) => [number, number];
export const demo_psnr_curve: (a: number, b: number, c: number) => [number, number];
export const demo_roundtrip: (a: number, b: number, c: bigint) => [number, number, number];
export const demo_rows: (a: number) => number;
export const demo_set_predictor: (a: number, b: number, c: number) => [number, number];
export const demo_synthetic: (a: number, b: number, c: bigint) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
