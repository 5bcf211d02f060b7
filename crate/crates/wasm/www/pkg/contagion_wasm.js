/* @ts-self-types="./contagion_wasm.d.ts" */

/**
 * A two-dimensional epidemic advanced a batch of events at a time.
 */
export class EpidemicDemo {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        EpidemicDemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_epidemicdemo_free(ptr, 0);
    }
    /**
     * One byte of flags per site, row-major with `x` fastest.
     * @returns {Uint8Array}
     */
    cells() {
        const ret = wasm.epidemicdemo_cells(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * @returns {number}
     */
    contaminated() {
        const ret = wasm.epidemicdemo_contaminated(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {bigint}
     */
    events() {
        const ret = wasm.epidemicdemo_events(this.__wbg_ptr);
        return BigInt.asUintN(64, ret);
    }
    /**
     * @returns {boolean}
     */
    extinct() {
        const ret = wasm.epidemicdemo_extinct(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    infected() {
        const ret = wasm.epidemicdemo_infected(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * `gamma` may be `Infinity` (no contamination).
     * @param {number} side
     * @param {number} k
     * @param {number} lambda
     * @param {number} gamma
     * @param {bigint} seed
     */
    constructor(side, k, lambda, gamma, seed) {
        const ret = wasm.epidemicdemo_new(side, k, lambda, gamma, seed);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        this.__wbg_ptr = ret[0];
        EpidemicDemoFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * @returns {number}
     */
    side() {
        const ret = wasm.epidemicdemo_side(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * Executes up to `events` events; stops early once nothing can
     * happen. Returns the number executed.
     * @param {number} events
     * @returns {number}
     */
    step(events) {
        const ret = wasm.epidemicdemo_step(this.__wbg_ptr, events);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    time() {
        const ret = wasm.epidemicdemo_time(this.__wbg_ptr);
        return ret;
    }
}
if (Symbol.dispose) EpidemicDemo.prototype[Symbol.dispose] = EpidemicDemo.prototype.free;

export class PercolationSample {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        PercolationSampleFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_percolationsample_free(ptr, 0);
    }
    /**
     * One code per site, row-major.
     * @returns {Uint8Array}
     */
    cells() {
        const ret = wasm.percolationsample_cells(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * Site percolation on an `n x n` box; `eight` selects diagonal
     * adjacency. Grids from one seed are nested in `p`.
     * @param {number} n
     * @param {number} p
     * @param {boolean} eight
     * @param {bigint} seed
     */
    constructor(n, p, eight, seed) {
        const ret = wasm.percolationsample_new(n, p, eight, seed);
        this.__wbg_ptr = ret;
        PercolationSampleFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * @returns {boolean}
     */
    spanning() {
        const ret = wasm.percolationsample_spanning(this.__wbg_ptr);
        return ret !== 0;
    }
}
if (Symbol.dispose) PercolationSample.prototype[Symbol.dispose] = PercolationSample.prototype.free;

/**
 * Offspring bound at `points` recovery rates spaced geometrically over
 * `[lambda_min, lambda_max]`, as `[lambda0, bound0, lambda1, bound1, ...]`.
 * Invalid parameters give an empty curve.
 * @param {number} d
 * @param {number} k
 * @param {number} m_bar
 * @param {number} gamma
 * @param {number} lambda_min
 * @param {number} lambda_max
 * @param {number} points
 * @returns {Float64Array}
 */
export function bounds_curve(d, k, m_bar, gamma, lambda_min, lambda_max, points) {
    const ret = wasm.bounds_curve(d, k, m_bar, gamma, lambda_min, lambda_max, points);
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * Smallest recovery rate certified subcritical; `NaN` when the
 * parameters are invalid, 0 when `gamma` is infinite.
 * @param {number} gamma
 * @param {number} d
 * @param {number} k
 * @param {number} m_bar
 * @returns {number}
 */
export function subcritical_threshold(gamma, d, k, m_bar) {
    const ret = wasm.subcritical_threshold(gamma, d, k, m_bar);
    return ret;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
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
        "./contagion_wasm_bg.js": import0,
    };
}

const EpidemicDemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_epidemicdemo_free(ptr, 1));
const PercolationSampleFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_percolationsample_free(ptr, 1));

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

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
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

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
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
        module_or_path = new URL('contagion_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
