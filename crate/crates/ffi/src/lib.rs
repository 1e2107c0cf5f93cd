//! C ABI over the `linunion` library.
//!
//! Families are opaque [`LuFamily`] handles created by a loader or generator
//! and released with [`lu_family_free`]. Every fallible call returns an
//! [`LuStatus`]; on failure [`lu_last_error`] gives a message for the calling
//! thread. Strings handed out by the library are freed with [`lu_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use linunion::charging::{ordering_violations, verify_claims, CurveArrangement};
use linunion::depth::{depth_profile, union_complexity};
use linunion::family::{
    gen_common_point_discs, gen_lines_parabolas, gen_random_curves, gen_random_discs, load_family,
    GeneratorParams,
};
use linunion::geom::Point;
use linunion::graph::{build_graph, clique_number, corollary_report, graph_stats, theorem1_report, StatsSummary};
use linunion::{Error, Family, Kind};
use serde_json::json;

/// Opaque family handle.
pub struct LuFamily(Family);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LuStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parameter = 3,
    Format = 4,
    Validation = 5,
    Kind = 6,
    Tangency = 7,
    Coincident = 8,
    Generation = 9,
    Io = 10,
    BudgetExceeded = 11,
    Degeneracy = 12,
    CertificateFailure = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LuKind {
    Discs = 0,
    Curves = 1,
}

/// Summary of the charging certificate at one k.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LuCertificate {
    pub k: usize,
    pub n: usize,
    pub qualifying_count: usize,
    /// `2 (k - 1) n`.
    pub bound: usize,
    /// `k - 1`.
    pub per_color_limit: usize,
    pub max_red: usize,
    pub max_blue: usize,
    pub ordering_violations: usize,
    /// 1 when every curve stays within the per-color limit and no charge
    /// contradicts the curve ordering.
    pub pass: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LuStatus {
    match e {
        Error::Tangency { .. } => LuStatus::Tangency,
        Error::Coincident { .. } => LuStatus::Coincident,
        Error::Parameter(_) => LuStatus::Parameter,
        Error::Generation { .. } => LuStatus::Generation,
        Error::Io(_) => LuStatus::Io,
        Error::Format(_) => LuStatus::Format,
        Error::Validation(_) => LuStatus::Validation,
        Error::Kind { .. } => LuStatus::Kind,
        Error::BudgetExceeded { .. } => LuStatus::BudgetExceeded,
        Error::Degeneracy(_) => LuStatus::Degeneracy,
        Error::CertificateFailure(_) => LuStatus::CertificateFailure,
    }
}

struct Fail(LuStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LuStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> LuStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LuStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LuStatus::Panic
        }
    }
}

unsafe fn family<'a>(f: *const LuFamily) -> Result<&'a Family, Fail> {
    f.as_ref().map(|h| &h.0).ok_or_else(|| null("family"))
}

unsafe fn out_ref<'a, T>(out: *mut T) -> Result<&'a mut T, Fail> {
    out.as_mut().ok_or_else(|| null("output pointer"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(LuStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn give_family(out: &mut *mut LuFamily, f: Family) {
    *out = Box::into_raw(Box::new(LuFamily(f)));
}

fn give_string(out: &mut *mut c_char, s: String) {
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn lu_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a family from JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_family_from_json(json: *const c_char, out: *mut *mut LuFamily) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        let text = str_arg(json, "json")?;
        give_family(out, Family::from_json(text)?);
        Ok(())
    })
}

/// Loads a family file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_family_load(path: *const c_char, out: *mut *mut LuFamily) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        let path = str_arg(path, "path")?;
        give_family(out, load_family(path)?);
        Ok(())
    })
}

/// Random discs in `[0, 10]^2` with radii in `[0.5, 2]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_generate_random_discs(n: usize, seed: u64, out: *mut *mut LuFamily) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        give_family(out, gen_random_discs(&GeneratorParams::new(n, seed))?);
        Ok(())
    })
}

/// Discs that all contain `(ox, oy)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_generate_common_point_discs(
    n: usize,
    seed: u64,
    ox: f64,
    oy: f64,
    out: *mut *mut LuFamily,
) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        give_family(out, gen_common_point_discs(&GeneratorParams::new(n, seed), Point::new(ox, oy))?);
        Ok(())
    })
}

/// `k - 1` horizontal lines below `n - k + 1` unit parabolas.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_generate_lines_parabolas(n: usize, k: usize, out: *mut *mut LuFamily) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        give_family(out, gen_lines_parabolas(n, k)?);
        Ok(())
    })
}

/// Random curves `y = a x^2 + b x + c`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_generate_random_curves(n: usize, seed: u64, out: *mut *mut LuFamily) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        give_family(out, gen_random_curves(&GeneratorParams::new(n, seed))?);
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lu_family_free(f: *mut LuFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_family_len(f: *const LuFamily, out: *mut usize) -> LuStatus {
    guard(|| {
        *out_ref(out)? = family(f)?.len();
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_family_kind(f: *const LuFamily, out: *mut LuKind) -> LuStatus {
    guard(|| {
        *out_ref(out)? = match family(f)?.kind() {
            Kind::Discs => LuKind::Discs,
            Kind::Curves => LuKind::Curves,
        };
        Ok(())
    })
}

/// Family file JSON. Free with [`lu_string_free`].
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_family_to_json(f: *const LuFamily, out: *mut *mut c_char) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        give_string(out, family(f)?.to_json());
        Ok(())
    })
}

/// Number of depth-2 crossings (discs only).
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_union_complexity(f: *const LuFamily, out: *mut usize) -> LuStatus {
    guard(|| {
        *out_ref(out)? = union_complexity(family(f)?)?;
        Ok(())
    })
}

/// Clique number of the intersection graph (discs only).
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_clique_number(f: *const LuFamily, out: *mut usize) -> LuStatus {
    guard(|| {
        *out_ref(out)? = clique_number(&build_graph(family(f)?)?)?;
        Ok(())
    })
}

/// Writes `g(F, k)` into `buf[k]` for `k = 0..len`, where entries 0 and 1 are
/// zero. `*len` always receives the required length; if `cap` is smaller the
/// buffer is left untouched and `BufferTooSmall` is returned. `buf` may be NULL
/// when `cap` is 0.
///
/// # Safety
/// `f` must be a live handle; `buf` must hold `cap` entries; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_depth_profile(
    f: *const LuFamily,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> LuStatus {
    guard(|| {
        let len = out_ref(len)?;
        let profile = depth_profile(family(f)?)?;
        let need = profile.g.keys().next_back().map_or(0, |&k| k + 1);
        *len = need;
        if cap < need {
            return Err(Fail(LuStatus::BufferTooSmall, format!("profile needs {need} entries, got {cap}")));
        }
        if need > 0 {
            if buf.is_null() {
                return Err(null("buffer"));
            }
            let slice = std::slice::from_raw_parts_mut(buf, need);
            slice.fill(0);
            for (&k, &g) in &profile.g {
                slice[k] = g;
            }
        }
        Ok(())
    })
}

/// Charging certificate for curves at `k` (`2 <= k <= n`). A failing
/// certificate is reported through `out->pass`, not the status.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_charge_certificate(f: *const LuFamily, k: usize, out: *mut LuCertificate) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        let fam = family(f)?;
        let ledger = CurveArrangement::new(fam)?.ledger(k)?;
        let cert = verify_claims(&ledger, fam)?;
        let ordering = ordering_violations(&ledger, fam)?.len();
        *out = LuCertificate {
            k: cert.k,
            n: cert.n,
            qualifying_count: cert.qualifying_count,
            bound: cert.bound,
            per_color_limit: cert.per_color_limit,
            max_red: cert.max_red,
            max_blue: cert.max_blue,
            ordering_violations: ordering,
            pass: u8::from(cert.pass && ordering == 0),
        };
        Ok(())
    })
}

/// Analysis summary as JSON: graph statistics and edge/coloring verdicts for
/// discs with union-complexity constant `c`, certificates for every k for
/// curves. Free with [`lu_string_free`].
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lu_analyze_json(f: *const LuFamily, c: f64, out: *mut *mut c_char) -> LuStatus {
    guard(|| {
        let out = out_ref(out)?;
        let fam = family(f)?;
        let value = match fam.kind() {
            Kind::Discs => {
                let stats = graph_stats(&build_graph(fam)?)?;
                let thm1 = theorem1_report(&stats, c);
                let cor = corollary_report(&stats);
                json!({
                    "kind": "discs",
                    "stats": StatsSummary::new(&stats, &thm1, &cor),
                    "union_complexity": union_complexity(fam)?,
                    "depth_profile": depth_profile(fam)?,
                })
            }
            Kind::Curves => {
                let arr = CurveArrangement::new(fam)?;
                let certs = (2..=fam.len())
                    .map(|k| verify_claims(&arr.ledger(k)?, fam))
                    .collect::<Result<Vec<_>, Error>>()?;
                json!({ "kind": "curves", "n": fam.len(), "certificates": certs })
            }
        };
        give_string(out, serde_json::to_string(&value).expect("report serializes"));
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lu_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
