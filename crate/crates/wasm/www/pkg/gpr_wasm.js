/* @ts-self-types="./gpr_wasm.d.ts" */

/**
 * Fitted against true crash probabilities along a swept volatility covariate.
 */
export class CrashDemo {
    static __wrap(ptr) {
        const obj = Object.create(CrashDemo.prototype);
        obj.__wbg_ptr = ptr;
        CrashDemoFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CrashDemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_crashdemo_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get betaHat() {
        const ret = wasm.crashdemo_betaHat(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get expectedLoss() {
        const ret = wasm.crashdemo_expectedLoss(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get fitted() {
        const ret = wasm.crashdemo_fitted(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get percentiles() {
        const ret = wasm.crashdemo_percentiles(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get truth() {
        const ret = wasm.crashdemo_truth(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get xiHat() {
        const ret = wasm.crashdemo_xiHat(this.__wbg_ptr);
        return ret;
    }
}
if (Symbol.dispose) CrashDemo.prototype[Symbol.dispose] = CrashDemo.prototype.free;

/**
 * One simulate-then-fit run.
 */
export class FitDemo {
    static __wrap(ptr) {
        const obj = Object.create(FitDemo.prototype);
        obj.__wbg_ptr = ptr;
        FitDemoFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        FitDemoFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_fitdemo_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get aic() {
        const ret = wasm.fitdemo_aic(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get betaHat() {
        const ret = wasm.fitdemo_betaHat(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get betaTrue() {
        const ret = wasm.fitdemo_betaTrue(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get bic() {
        const ret = wasm.fitdemo_bic(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {boolean}
     */
    get converged() {
        const ret = wasm.fitdemo_converged(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get df() {
        const ret = wasm.fitdemo_df(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * `NaN` for families without one.
     * @returns {number}
     */
    get hyperparameter() {
        const ret = wasm.fitdemo_hyperparameter(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get testRmse() {
        const ret = wasm.fitdemo_testRmse(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get xiHat() {
        const ret = wasm.fitdemo_xiHat(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get xiTrue() {
        const ret = wasm.fitdemo_xiTrue(this.__wbg_ptr);
        return ret;
    }
}
if (Symbol.dispose) FitDemo.prototype[Symbol.dispose] = FitDemo.prototype.free;

/**
 * Density and survival function on an even grid.
 */
export class GpdCurve {
    static __wrap(ptr) {
        const obj = Object.create(GpdCurve.prototype);
        obj.__wbg_ptr = ptr;
        GpdCurveFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        GpdCurveFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_gpdcurve_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get density() {
        const ret = wasm.gpdcurve_density(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * `NaN` when `xi >= 1`.
     * @returns {number}
     */
    get mean() {
        const ret = wasm.gpdcurve_mean(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get survival() {
        const ret = wasm.gpdcurve_survival(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get y() {
        const ret = wasm.gpdcurve_y(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) GpdCurve.prototype[Symbol.dispose] = GpdCurve.prototype.free;

/**
 * Simulates `n` loss days above a 2% threshold with scale
 * `exp(b0 + vol_effect * z)`, fits the Cauchy-prior model and sweeps `z`
 * from its 5th to 95th percentile.
 * @param {number} n
 * @param {number} vol_effect
 * @param {number} xi
 * @param {number} y0
 * @param {number} seed
 * @returns {CrashDemo}
 */
export function crashDemo(n, vol_effect, xi, y0, seed) {
    const ret = wasm.crashDemo(n, vol_effect, xi, y0, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return CrashDemo.__wrap(ret[0]);
}

/**
 * Evaluates the GPD on `points` values from `mu` to `mu + span` (clipped at a
 * finite upper endpoint).
 * @param {number} mu
 * @param {number} sigma
 * @param {number} xi
 * @param {number} span
 * @param {number} points
 * @returns {GpdCurve}
 */
export function gpdCurve(mu, sigma, xi, span, points) {
    const ret = wasm.gpdCurve(mu, sigma, xi, span, points);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return GpdCurve.__wrap(ret[0]);
}

/**
 * Draws `beta ~ N(0, 1)` for `p` covariates, simulates `n` rows, fits
 * `prior` on 80% of them (cross-validating the hyperparameter when
 * `hyper <= 0`) and scores the rest.
 * @param {number} n
 * @param {number} p
 * @param {number} xi
 * @param {string} prior
 * @param {number} hyper
 * @param {number} seed
 * @returns {FitDemo}
 */
export function simulateAndFit(n, p, xi, prior, hyper, seed) {
    const ptr0 = passStringToWasm0(prior, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
    const len0 = WASM_VECTOR_LEN;
    const ret = wasm.simulateAndFit(n, p, xi, ptr0, len0, hyper, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return FitDemo.__wrap(ret[0]);
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
        "./gpr_wasm_bg.js": import0,
    };
}

const CrashDemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_crashdemo_free(ptr, 1));
const FitDemoFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_fitdemo_free(ptr, 1));
const GpdCurveFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_gpdcurve_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
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
        module_or_path = new URL('gpr_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
