/* @ts-self-types="./couette_web.d.ts" */

/**
 * A running nonlinear simulation from a random real perturbation.
 */
export class Annulus {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        AnnulusFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_annulus_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get dt() {
        const ret = wasm.annulus_dt(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} nu
     * @param {number} a
     * @param {number} b
     * @param {number} aspect
     * @param {number} k_max
     * @param {number} n
     * @param {number} amplitude
     * @param {number} seed
     */
    constructor(nu, a, b, aspect, k_max, n, amplitude, seed) {
        const ret = wasm.annulus_new(nu, a, b, aspect, k_max, n, amplitude, seed);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        this.__wbg_ptr = ret[0];
        AnnulusFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * `‖ω_≠‖ + ‖ρ_≠‖` over the nonzero modes.
     * @returns {number}
     */
    get perturbation_norm() {
        const ret = wasm.annulus_perturbation_norm(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    radii() {
        const ret = wasm.annulus_radii(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {number} steps
     */
    step(steps) {
        const ret = wasm.annulus_step(this.__wbg_ptr, steps);
        if (ret[1]) {
            throw takeFromExternrefTable0(ret[0]);
        }
    }
    /**
     * @returns {number}
     */
    get time() {
        const ret = wasm.annulus_time(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} m
     * @returns {Float64Array}
     */
    vorticity(m) {
        const ret = wasm.annulus_vorticity(this.__wbg_ptr, m);
        if (ret[3]) {
            throw takeFromExternrefTable0(ret[2]);
        }
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) Annulus.prototype[Symbol.dispose] = Annulus.prototype.free;

/**
 * `‖f(t)‖` for the unforced linear problem started from a smooth bump.
 */
export class DecayCurve {
    static __wrap(ptr) {
        const obj = Object.create(DecayCurve.prototype);
        obj.__wbg_ptr = ptr;
        DecayCurveFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        DecayCurveFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_decaycurve_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    norms() {
        const ret = wasm.decaycurve_norms(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get psi() {
        const ret = wasm.decaycurve_psi(this.__wbg_ptr);
        return ret;
    }
    /**
     * Fitted tail rate over the second half of the run.
     * @returns {number}
     */
    get rate() {
        const ret = wasm.decaycurve_rate(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    times() {
        const ret = wasm.decaycurve_times(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) DecayCurve.prototype[Symbol.dispose] = DecayCurve.prototype.free;

/**
 * Sampled `σ_min(𝓛 - iλ)` with its minimum `Ψ`.
 */
export class GapCurve {
    static __wrap(ptr) {
        const obj = Object.create(GapCurve.prototype);
        obj.__wbg_ptr = ptr;
        GapCurveFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        GapCurveFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_gapcurve_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get argmin() {
        const ret = wasm.gapcurve_argmin(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    lambdas() {
        const ret = wasm.gapcurve_lambdas(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get psi() {
        const ret = wasm.gapcurve_psi(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    sigmas() {
        const ret = wasm.gapcurve_sigmas(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) GapCurve.prototype[Symbol.dispose] = GapCurve.prototype.free;

/**
 * @param {number} nu
 * @param {number} b
 * @param {number} aspect
 * @param {number} k
 * @param {number} n
 * @param {number} horizon_psi
 * @param {number} steps
 * @returns {DecayCurve}
 */
export function decay_curve(nu, b, aspect, k, n, horizon_psi, steps) {
    const ret = wasm.decay_curve(nu, b, aspect, k, n, horizon_psi, steps);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return DecayCurve.__wrap(ret[0]);
}

/**
 * @param {number} nu
 * @param {number} b
 * @param {number} aspect
 * @param {number} k
 * @param {number} n
 * @param {number} steps
 * @returns {GapCurve}
 */
export function gap_curve(nu, b, aspect, k, n, steps) {
    const ret = wasm.gap_curve(nu, b, aspect, k, n, steps);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return GapCurve.__wrap(ret[0]);
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
        "./couette_web_bg.js": import0,
    };
}

const AnnulusFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_annulus_free(ptr, 1));
const DecayCurveFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_decaycurve_free(ptr, 1));
const GapCurveFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_gapcurve_free(ptr, 1));

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
        module_or_path = new URL('couette_web_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
