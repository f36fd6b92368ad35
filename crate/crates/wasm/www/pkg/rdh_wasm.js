/* @ts-self-types="./rdh_wasm.d.ts" */

export class Demo {
    static __wrap(ptr) {
        const obj = Object.create(Demo.prototype);
        obj.__wbg_ptr = ptr;
        DemoFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        DemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_demo_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    cols() {
        const ret = wasm.demo_cols(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Two greyscale maps of the Dot pixels, back to back: the reference
     * complexity computed from the cover itself, then the complexity the
     * current predictor estimates from the Cross pixels alone.
     * @returns {Uint8Array}
     */
    complexity_maps() {
        const ret = wasm.demo_complexity_maps(this.__wbg_ptr);
        if (ret[3]) {
            throw takeFromExternrefTable0(ret[2]);
        }
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {Uint8Array}
     */
    cover_pixels() {
        const ret = wasm.demo_cover_pixels(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @param {Uint8Array} bytes
     * @returns {Demo}
     */
    static from_pgm(bytes) {
        const ptr0 = passArray8ToWasm0(bytes, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.demo_from_pgm(ptr0, len0);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        return Demo.__wrap(ret[0]);
    }
    /**
     * Canvas pixels converted to grey; an odd-by-odd picture loses its last column.
     * @param {Uint8Array} rgba
     * @param {number} width
     * @param {number} height
     * @returns {Demo}
     */
    static from_rgba(rgba, width, height) {
        const ptr0 = passArray8ToWasm0(rgba, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.demo_from_rgba(ptr0, len0, width, height);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        return Demo.__wrap(ret[0]);
    }
    /**
     * @returns {boolean}
     */
    has_weights() {
        const ret = wasm.demo_has_weights(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * Installs a trained weight file, enabling the CNN predictors.
     * @param {Uint8Array} bytes
     * @param {number} leaky_slope
     */
    load_weights(bytes, leaky_slope) {
        const ptr0 = passArray8ToWasm0(bytes, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.demo_load_weights(this.__wbg_ptr, ptr0, len0, leaky_slope);
        if (ret[1]) {
            throw takeFromExternrefTable0(ret[0]);
        }
    }
    /**
     * Marked image from the last roundtrip, empty before the first one.
     * @returns {Uint8Array}
     */
    marked_pixels() {
        const ret = wasm.demo_marked_pixels(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {string}
     */
    predictor() {
        let deferred1_0;
        let deferred1_1;
        try {
            const ret = wasm.demo_predictor(this.__wbg_ptr);
            deferred1_0 = ret[0];
            deferred1_1 = ret[1];
            return getStringFromWasm0(ret[0], ret[1]);
        } finally {
            wasm.__wbindgen_free(deferred1_0, deferred1_1, 1);
        }
    }
    /**
     * PSNR of the marked image for each capacity; NaN where it does not fit.
     * @param {Uint32Array} capacities
     * @returns {Float64Array}
     */
    psnr_curve(capacities) {
        const ptr0 = passArray32ToWasm0(capacities, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.demo_psnr_curve(this.__wbg_ptr, ptr0, len0);
        var v2 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v2;
    }
    /**
     * Embeds `bits` pseudo-random bits under `key`, extracts them again and
     * keeps the marked image for display.
     * @param {number} bits
     * @param {bigint} key
     * @returns {Roundtrip}
     */
    roundtrip(bits, key) {
        const ret = wasm.demo_roundtrip(this.__wbg_ptr, bits, key);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        return Roundtrip.__wrap(ret[0]);
    }
    /**
     * @returns {number}
     */
    rows() {
        const ret = wasm.demo_rows(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * `icnnp`, `cnnp-lv` or `rhombus`.
     * @param {string} name
     */
    set_predictor(name) {
        const ptr0 = passStringToWasm0(name, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.demo_set_predictor(this.__wbg_ptr, ptr0, len0);
        if (ret[1]) {
            throw takeFromExternrefTable0(ret[0]);
        }
    }
    /**
     * A deterministic synthetic test picture.
     * @param {number} rows
     * @param {number} cols
     * @param {bigint} seed
     * @returns {Demo}
     */
    static synthetic(rows, cols, seed) {
        const ret = wasm.demo_synthetic(rows, cols, seed);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        return Demo.__wrap(ret[0]);
    }
}
if (Symbol.dispose) Demo.prototype[Symbol.dispose] = Demo.prototype.free;

/**
 * Outcome of one embed/extract cycle.
 */
export class Roundtrip {
    static __wrap(ptr) {
        const obj = Object.create(Roundtrip.prototype);
        obj.__wbg_ptr = ptr;
        RoundtripFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        RoundtripFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_roundtrip_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get changed_pixels() {
        const ret = wasm.__wbg_get_roundtrip_changed_pixels(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get cross_t_n() {
        const ret = wasm.__wbg_get_roundtrip_cross_t_n(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get cross_t_p() {
        const ret = wasm.__wbg_get_roundtrip_cross_t_p(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get dot_t_n() {
        const ret = wasm.__wbg_get_roundtrip_dot_t_n(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get dot_t_p() {
        const ret = wasm.__wbg_get_roundtrip_dot_t_p(this.__wbg_ptr);
        return ret;
    }
    /**
     * Recovered image equals the cover.
     * @returns {boolean}
     */
    get image_ok() {
        const ret = wasm.__wbg_get_roundtrip_image_ok(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get payload_bits() {
        const ret = wasm.__wbg_get_roundtrip_payload_bits(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Recovered payload equals the embedded one.
     * @returns {boolean}
     */
    get payload_ok() {
        const ret = wasm.__wbg_get_roundtrip_payload_ok(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get psnr_db() {
        const ret = wasm.__wbg_get_roundtrip_psnr_db(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set changed_pixels(arg0) {
        wasm.__wbg_set_roundtrip_changed_pixels(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set cross_t_n(arg0) {
        wasm.__wbg_set_roundtrip_cross_t_n(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set cross_t_p(arg0) {
        wasm.__wbg_set_roundtrip_cross_t_p(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set dot_t_n(arg0) {
        wasm.__wbg_set_roundtrip_dot_t_n(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set dot_t_p(arg0) {
        wasm.__wbg_set_roundtrip_dot_t_p(this.__wbg_ptr, arg0);
    }
    /**
     * Recovered image equals the cover.
     * @param {boolean} arg0
     */
    set image_ok(arg0) {
        wasm.__wbg_set_roundtrip_image_ok(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set payload_bits(arg0) {
        wasm.__wbg_set_roundtrip_payload_bits(this.__wbg_ptr, arg0);
    }
    /**
     * Recovered payload equals the embedded one.
     * @param {boolean} arg0
     */
    set payload_ok(arg0) {
        wasm.__wbg_set_roundtrip_payload_ok(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set psnr_db(arg0) {
        wasm.__wbg_set_roundtrip_psnr_db(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) Roundtrip.prototype[Symbol.dispose] = Roundtrip.prototype.free;
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_generic_0000000000000001: function(arg0, arg1) {
            // Cast intrinsic for `Ref(String) -> Externref`.
            const ret = getStringFromWasm0(arg0, arg1);
            return ret;
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./rdh_wasm_bg.js": import0,
    };
}

const DemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_demo_free(ptr, 1));
const RoundtripFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_roundtrip_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

function getArrayU8FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint8ArrayMemory0().subarray(ptr / 1, ptr / 1 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint32ArrayMemory0 = null;
function getUint32ArrayMemory0() {
    if (cachedUint32ArrayMemory0 === null || cachedUint32ArrayMemory0.byteLength === 0) {
        cachedUint32ArrayMemory0 = new Uint32Array(wasm.memory.buffer);
    }
    return cachedUint32ArrayMemory0;
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passArray32ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 4, 4) >>> 0;
    getUint32ArrayMemory0().set(arg, ptr / 4);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function passArray8ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 1, 1) >>> 0;
    getUint8ArrayMemory0().set(arg, ptr / 1);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function passStringToWasm0(arg, malloc, realloc) {
    if (realloc === undefined) {
        const buf = cachedTextEncoder.encode(arg);
        const ptr = malloc(buf.length, 1) >>> 0;
        getUint8ArrayMemory0().subarray(ptr, ptr + buf.length).set(buf);
        WASM_VECTOR_LEN = buf.length;
        return ptr;
    }

    let len = arg.length;
    let ptr = malloc(len, 1) >>> 0;

    const mem = getUint8ArrayMemory0();

    let offset = 0;

    for (; offset < len; offset++) {
        const code = arg.charCodeAt(offset);
        if (code > 0x7F) break;
        mem[ptr + offset] = code;
    }
    if (offset !== len) {
        if (offset !== 0) {
            arg = arg.slice(offset);
        }
        ptr = realloc(ptr, len, len = offset + arg.length * 3, 1) >>> 0;
        const view = getUint8ArrayMemory0().subarray(ptr + offset, ptr + len);
        const ret = cachedTextEncoder.encodeInto(arg, view);

        offset += ret.written;
        ptr = realloc(ptr, len, offset, 1) >>> 0;
    }

    WASM_VECTOR_LEN = offset;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

const cachedTextEncoder = new TextEncoder();

if (!('encodeInto' in cachedTextEncoder)) {
    cachedTextEncoder.encodeInto = function (arg, view) {
        const buf = cachedTextEncoder.encode(arg);
        view.set(buf);
        return {
            read: arg.length,
            written: buf.length
        };
    };
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint32ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('rdh_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
