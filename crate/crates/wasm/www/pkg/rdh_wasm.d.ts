/* tslint:disable */
/* eslint-disable */

export class Demo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    cols(): number;
    /**
     * Two greyscale maps of the Dot pixels, back to back: the reference
     * complexity computed from the cover itself, then the complexity the
     * current predictor estimates from the Cross pixels alone.
     */
    complexity_maps(): Uint8Array;
    cover_pixels(): Uint8Array;
    static from_pgm(bytes: Uint8Array): Demo;
    /**
     * Canvas pixels converted to grey; an odd-by-odd picture loses its last column.
     */
    static from_rgba(rgba: Uint8Array, width: number, height: number): Demo;
    has_weights(): boolean;
    /**
     * Installs a trained weight file, enabling the CNN predictors.
     */
    load_weights(bytes: Uint8Array, leaky_slope: number): void;
    /**
     * Marked image from the last roundtrip, empty before the first one.
     */
    marked_pixels(): Uint8Array;
    predictor(): string;
    /**
     * PSNR of the marked image for each capacity; NaN where it does not fit.
     */
    psnr_curve(capacities: Uint32Array): Float64Array;
    /**
     * Embeds `bits` pseudo-random bits under `key`, extracts them again and
     * keeps the marked image for display.
     */
    roundtrip(bits: number, key: bigint): Roundtrip;
    rows(): number;
    /**
     * `icnnp`, `cnnp-lv` or `rhombus`.
     */
    set_predictor(name: string): void;
    /**
     * A deterministic synthetic test picture.
     */
    static synthetic(rows: number, cols: number, seed: bigint): Demo;
}

/**
 * Outcome of one embed/extract cycle.
 */
export class Roundtrip {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    changed_pixels: number;
    cross_t_n: number;
    cross_t_p: number;
    dot_t_n: number;
    dot_t_p: number;
    /**
     * Recovered image equals the cover.
     */
    image_ok: boolean;
    payload_bits: number;
    /**
     * Recovered payload equals the embedded one.
     */
    payload_ok: boolean;
    psnr_db: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_get_roundtrip_changed_pixels: (a: number) => number;
    readonly __wbg_get_roundtrip_cross_t_n: (a: number) => number;
    readonly __wbg_get_roundtrip_cross_t_p: (a: number) => number;
    readonly __wbg_get_roundtrip_dot_t_n: (a: number) => number;
    readonly __wbg_get_roundtrip_dot_t_p: (a: number) => number;
    readonly __wbg_get_roundtrip_image_ok: (a: number) => number;
    readonly __wbg_get_roundtrip_payload_bits: (a: number) => number;
    readonly __wbg_get_roundtrip_payload_ok: (a: number) => number;
    readonly __wbg_get_roundtrip_psnr_db: (a: number) => number;
    readonly __wbg_roundtrip_free: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_changed_pixels: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_cross_t_n: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_cross_t_p: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_dot_t_n: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_dot_t_p: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_image_ok: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_payload_bits: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_payload_ok: (a: number, b: number) => void;
    readonly __wbg_set_roundtrip_psnr_db: (a: number, b: number) => void;
    readonly demo_cols: (a: number) => number;
    readonly demo_complexity_maps: (a: number) => [number, number, number, number];
    readonly demo_cover_pixels: (a: number) => [number, number];
    readonly demo_from_pgm: (a: number, b: number) => [number, number, number];
    readonly demo_from_rgba: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demo_has_weights: (a: number) => number;
    readonly demo_load_weights: (a: number, b: number, c: number, d: number) => [number, number];
    readonly demo_marked_pixels: (a: number) => [number, number];
    readonly demo_predictor: (a: number) => [number, number];
    readonly demo_psnr_curve: (a: number, b: number, c: number) => [number, number];
    readonly demo_roundtrip: (a: number, b: number, c: bigint) => [number, number, number];
    readonly demo_rows: (a: number) => number;
    readonly demo_set_predictor: (a: number, b: number, c: number) => [number, number];
    readonly demo_synthetic: (a: number, b: number, c: bigint) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
