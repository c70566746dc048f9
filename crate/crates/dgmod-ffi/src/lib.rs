//! C ABI for the dgmod library. Documents cross the boundary as JSON strings;
//! the only stateful object is an opaque context that stores the last error.
//! Every entry point returns a status code: 0 success, 1 mathematical failure,
//! 2 input error, 3 internal error. Returned strings are freed with
//! `dgmod_string_free`.

use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dgmod::duality::is_dualizable;
use dgmod::json::{self, DocError};
use dgmod::limits::lazard_factorize;
use dgmod::module::{dual, hom_a, tensor_a, ModuleError};

pub const DGMOD_OK: c_int = 0;
pub const DGMOD_MATH_FAILURE: c_int = 1;
pub const DGMOD_INPUT_ERROR: c_int = 2;
pub const DGMOD_INTERNAL_ERROR: c_int = 3;

/// Opaque context: owns the last error message.
pub struct DgmodCtx {
    last_error: CString,
}

#[no_mangle]
pub extern "C" fn dgmod_ctx_new() -> *mut DgmodCtx {
    Box::into_raw(Box::new(DgmodCtx { last_error: CString::default() }))
}

/// # Safety
/// `ctx` must be a pointer returned by `dgmod_ctx_new` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn dgmod_ctx_free(ctx: *mut DgmodCtx) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// The message of the most recent failure on this context. Valid until the
/// next call on the same context.
///
/// # Safety
/// `ctx` must be a live context pointer.
#[no_mangle]
pub unsafe extern "C" fn dgmod_last_error(ctx: *const DgmodCtx) -> *const c_char {
    if ctx.is_null() {
        return std::ptr::null();
    }
    (*ctx).last_error.as_ptr()
}

/// # Safety
/// `s` must be a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn dgmod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

enum Failure {
    Math(String),
    Input(String),
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Failure {
        match e {
            DocError::Malformed(m) => Failure::Input(m),
            DocError::Math(m) => Failure::Math(m),
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Input("null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Input("argument is not UTF-8".into()))
}

fn parse_doc(text: &str) -> Result<serde_json::Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("not valid JSON: {e}")))
}

/// Runs `f`, stores any error on the context, and writes the produced string
/// through `out` when non-null.
unsafe fn entry(
    ctx: *mut DgmodCtx,
    out: *mut *mut c_char,
    f: impl FnOnce() -> Result<String, Failure>,
) -> c_int {
    if ctx.is_null() {
        return DGMOD_INPUT_ERROR;
    }
    let set_err = |ctx: *mut DgmodCtx, msg: &str| {
        let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
        (*ctx).last_error = CString::new(cleaned).unwrap_or_default();
    };
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(text)) => {
            set_err(ctx, "");
            if !out.is_null() {
                match CString::new(text.replace('\0', "")) {
                    Ok(c) => *out = c.into_raw(),
                    Err(_) => return DGMOD_INTERNAL_ERROR,
                }
            }
            DGMOD_OK
        }
        Ok(Err(Failure::Math(m))) => {
            set_err(ctx, &m);
            DGMOD_MATH_FAILURE
        }
        Ok(Err(Failure::Input(m))) => {
            set_err(ctx, &m);
            DGMOD_INPUT_ERROR
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".into());
            set_err(ctx, &msg);
            DGMOD_INTERNAL_ERROR
        }
    }
}

fn load_module(text: &str) -> Result<dgmod::module::DGModule, Failure> {
    let m = json::module_from_doc(&parse_doc(text)?)?;
    let rep = m.validate();
    if !rep.all_pass() {
        return Err(Failure::Math(format!("module fails validation:\n{rep}")));
    }
    Ok(m)
}

/// Validates an algebra, module, map, presentation, or system document and
/// returns the text report; status 1 when a check fails.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_validate(
    ctx: *mut DgmodCtx,
    doc_json: *const c_char,
    report_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, report_out, || {
        let doc = parse_doc(read_str(doc_json)?)?;
        let kind = json::document_kind(&doc)?.to_string();
        let rep = match kind.as_str() {
            "algebra" => {
                let (field, payload) = json::unwrap(&doc, "algebra")?;
                json::algebra_presentation_from_payload(field, payload)?.validate()
            }
            "module" => json::module_from_doc(&doc)?.validate(),
            "map" => {
                let f = json::map_from_doc(&doc)?;
                let mut rep = f.source.validate();
                for c in f.target.validate().checks {
                    rep.checks.push(c);
                }
                rep.record(
                    "map-is-a-module-map",
                    (!f.is_valid()).then(|| "not a degree-0 A-linear chain map".into()),
                );
                rep
            }
            "presentation" => json::presentation_from_doc(&doc)?.validate(),
            "system" => json::system_from_doc(&doc)?.validate(),
            other => {
                return Err(Failure::Input(format!("cannot validate kind {other:?}")));
            }
        };
        if rep.all_pass() {
            Ok(format!("{rep}"))
        } else {
            Err(Failure::Math(format!("{rep}")))
        }
    })
}

/// Decides dualizability; returns the verdict document. Status 1 when the
/// module is not dualizable.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_dualizable(
    ctx: *mut DgmodCtx,
    module_json: *const c_char,
    verdict_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, verdict_out, || {
        let m = load_module(read_str(module_json)?)?;
        let v = is_dualizable(&m);
        let doc = json::wrap(
            m.field(),
            "verdict",
            serde_json::json!({
                "dualizable": v.dualizable,
                "failed_condition": v.failed_condition,
            }),
        );
        if v.dualizable {
            Ok(json::render(&doc))
        } else {
            Err(Failure::Math(json::render(&doc)))
        }
    })
}

/// dim Ext^1(X, Y), written to `dim_out`.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_ext1(
    ctx: *mut DgmodCtx,
    x_json: *const c_char,
    y_json: *const c_char,
    dim_out: *mut i64,
) -> c_int {
    entry(ctx, std::ptr::null_mut(), || {
        let x = load_module(read_str(x_json)?)?;
        let y = load_module(read_str(y_json)?)?;
        if x.algebra.carrier != y.algebra.carrier {
            return Err(Failure::Input("arguments live over different algebras".into()));
        }
        let n = dgmod::ext::ext1(&x, &y) as i64;
        if !dim_out.is_null() {
            *dim_out = n;
        }
        Ok(String::new())
    })
}

/// Y (x)_A X as a module document (or a complex document when no action
/// survives).
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_tensor(
    ctx: *mut DgmodCtx,
    y_json: *const c_char,
    x_json: *const c_char,
    result_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, result_out, || {
        let y = load_module(read_str(y_json)?)?;
        let x = load_module(read_str(x_json)?)?;
        if !y.has_right() || !x.has_left() {
            return Err(Failure::Input("tensor needs a right module then a left module".into()));
        }
        let t = tensor_a(&y, &x);
        Ok(match &t.module {
            Some(m) => json::render(&json::module_to_doc(m)),
            None => {
                let dims: serde_json::Map<String, serde_json::Value> = t
                    .complex
                    .dims()
                    .iter()
                    .map(|(n, d)| (n.to_string(), serde_json::Value::from(*d)))
                    .collect();
                json::render(&json::wrap(
                    y.field(),
                    "complex",
                    serde_json::json!({ "dims": dims }),
                ))
            }
        })
    })
}

/// hom_A(X, Y) as a module or complex document.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_hom(
    ctx: *mut DgmodCtx,
    x_json: *const c_char,
    y_json: *const c_char,
    result_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, result_out, || {
        let x = load_module(read_str(x_json)?)?;
        let y = load_module(read_str(y_json)?)?;
        let same = (x.has_left() && y.has_left()) || (x.has_right() && y.has_right());
        if !same {
            return Err(Failure::Input("hom needs two modules on the same side".into()));
        }
        let h = hom_a(&x, &y);
        Ok(match &h.module {
            Some(m) => json::render(&json::module_to_doc(m)),
            None => {
                let dims: serde_json::Map<String, serde_json::Value> = h
                    .complex
                    .dims()
                    .iter()
                    .map(|(n, d)| (n.to_string(), serde_json::Value::from(*d)))
                    .collect();
                json::render(&json::wrap(
                    x.field(),
                    "complex",
                    serde_json::json!({ "dims": dims }),
                ))
            }
        })
    })
}

/// X* = hom_A(X, A) as a module document.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_dual(
    ctx: *mut DgmodCtx,
    x_json: *const c_char,
    result_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, result_out, || {
        let x = load_module(read_str(x_json)?)?;
        Ok(json::render(&json::module_to_doc(&dual(&x).module)))
    })
}

/// Lazard factorization of `u` through a free module, certified exactly.
/// Status 1 when the target is not flat on this test.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_factorize(
    ctx: *mut DgmodCtx,
    u_json: *const c_char,
    presentation_json: *const c_char,
    result_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, result_out, || {
        let u = json::map_from_doc(&parse_doc(read_str(u_json)?)?)?;
        if !u.is_valid() {
            return Err(Failure::Math("u is not a module map".into()));
        }
        let pres = json::presentation_from_doc(&parse_doc(read_str(presentation_json)?)?)?;
        let rep = pres.validate();
        if !rep.all_pass() {
            return Err(Failure::Math(format!("presentation fails validation:\n{rep}")));
        }
        match lazard_factorize(&u, &pres) {
            Ok(fact) => Ok(json::render(&json::factorization_to_doc(&fact, &u))),
            Err(ModuleError::Usage(msg)) if msg.contains("not flat") => Err(Failure::Math(msg)),
            Err(e) => Err(Failure::Input(e.to_string())),
        }
    })
}

/// Independently rechecks a factorization document; status 1 when it does not
/// certify.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_verify(
    ctx: *mut DgmodCtx,
    factorization_json: *const c_char,
    report_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, report_out, || {
        let fact = json::factorization_from_doc(&parse_doc(read_str(factorization_json)?)?)?;
        let mut rep = dgmod::report::ValidationReport::default();
        rep.record("u-is-a-module-map", (!fact.u.is_valid()).then(|| "invalid".into()));
        rep.record("v-is-a-module-map", (!fact.v.is_valid()).then(|| "invalid".into()));
        rep.record("w-is-a-module-map", (!fact.w.is_valid()).then(|| "invalid".into()));
        rep.record(
            "endpoints-line-up",
            (fact.v.source.carrier != fact.u.source.carrier
                || fact.w.target.carrier != fact.u.target.carrier
                || fact.v.target.carrier != fact.w.source.carrier)
                .then(|| "v and w do not connect the source of u to its target".into()),
        );
        if rep.all_pass() {
            let mut mismatch = None;
            for n in fact.u.source.carrier.support() {
                let wv = fact.w.map.comp(n).mul(&fact.v.map.comp(n));
                if wv != fact.u.map.comp(n) {
                    mismatch = Some(format!("w . v differs from u in degree {n}"));
                    break;
                }
            }
            rep.record("composite-equals-u", mismatch);
        }
        if rep.all_pass() {
            Ok(format!("{rep}"))
        } else {
            Err(Failure::Math(format!("{rep}")))
        }
    })
}

/// Runs the frozen theorem suite for a named corpus and returns the text
/// report; status 1 when a law fails, 2 for an unknown name.
///
/// # Safety
/// Pointer arguments follow the conventions above.
#[no_mangle]
pub unsafe extern "C" fn dgmod_suite(
    ctx: *mut DgmodCtx,
    corpus_name: *const c_char,
    report_out: *mut *mut c_char,
) -> c_int {
    entry(ctx, report_out, || {
        let name = read_str(corpus_name)?;
        let c = dgmod::instances::corpus(name).map_err(|e| Failure::Input(e.to_string()))?;
        let rep = dgmod::instances::run_theorem_suite(&c);
        let text = rep.render();
        if rep.pass() {
            Ok(text)
        } else {
            Err(Failure::Math(text))
        }
    })
}
