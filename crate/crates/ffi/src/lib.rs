//! C ABI for casimir-lab.
//!
//! Configurations are opaque heap handles created by `*_new` functions and
//! released by the matching `*_free`. Every fallible call returns a
//! [`CasimirStatus`]; on failure the message is available from
//! [`casimir_last_error`] on the same thread. Tensors are written as 16
//! doubles in row-major `T^{mu nu}` order.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use casimir_lab::minkowski::{validate_cutoff, Boost, CutoffConfig, MinkVec3};
use casimir_lab::plates::closed::{pressure, pressure_energy_residual, stress_closed};
use casimir_lab::plates::oracle::{stress_oracle, OracleSpec};
use casimir_lab::plates::printed::{pressure_printed, stress_printed_full, stress_printed_subtracted};
use casimir_lab::plates::{PlateGeometry, StressTensor};
use casimir_lab::sphere::{
    delta_e_closed_derived, delta_e_closed_printed, delta_e_direct, delta_e_integral, e_sigma, SphereConfig,
};
use casimir_lab::Error;

/// Status codes; `CASIMIR_STATUS_OK` is zero, every error is positive and stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasimirStatus {
    Ok = 0,
    NullPointer = 1,
    NonTimelike = 2,
    NegativeTimeComponent = 3,
    SigmaTooLarge = 4,
    NegativeSigma = 5,
    BadDirection = 6,
    NonFinite = 7,
    NoConvergence = 8,
    DegenerateInput = 9,
    NearPole = 10,
    TailTooFat = 11,
    InvalidGeometry = 12,
    InvalidConfig = 13,
    Panic = 14,
}

impl From<&Error> for CasimirStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonTimelike { .. } => CasimirStatus::NonTimelike,
            Error::NegativeTimeComponent { .. } => CasimirStatus::NegativeTimeComponent,
            Error::SigmaTooLarge { .. } => CasimirStatus::SigmaTooLarge,
            Error::NegativeSigma(_) => CasimirStatus::NegativeSigma,
            Error::BadDirection { .. } => CasimirStatus::BadDirection,
            Error::NonFinite(_) => CasimirStatus::NonFinite,
            Error::NoConvergence { .. } => CasimirStatus::NoConvergence,
            Error::DegenerateInput(_) => CasimirStatus::DegenerateInput,
            Error::NearPole { .. } => CasimirStatus::NearPole,
            Error::TailTooFat { .. } => CasimirStatus::TailTooFat,
            Error::InvalidGeometry(_) => CasimirStatus::InvalidGeometry,
            Error::InvalidConfig(_) => CasimirStatus::InvalidConfig,
        }
    }
}

/// Methods for the sphere energy shift.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CasimirSphereMethod {
    Integral = 0,
    Direct = 1,
    ClosedPrinted = 2,
    ClosedDerived = 3,
}

/// Vector and scalar cutoff.
pub struct CasimirCutoff(CutoffConfig);

/// Plate separation.
pub struct CasimirPlates(PlateGeometry);

/// Sphere radius, cutoffs and series controls.
pub struct CasimirSphere(SphereConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), CasimirStatusError>) -> CasimirStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CasimirStatus::Ok,
        Ok(Err(CasimirStatusError::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            CasimirStatus::NullPointer
        }
        Ok(Err(CasimirStatusError::Lab(e))) => {
            set_last_error(e.to_string());
            CasimirStatus::from(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CasimirStatus::Panic
        }
    }
}

enum CasimirStatusError {
    Null(&'static str),
    Lab(Error),
}

impl From<Error> for CasimirStatusError {
    fn from(e: Error) -> Self {
        CasimirStatusError::Lab(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, CasimirStatusError> {
    p.as_ref().ok_or(CasimirStatusError::Null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, CasimirStatusError> {
    p.as_mut().ok_or(CasimirStatusError::Null(what))
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> Result<(), CasimirStatusError> {
    let slot = out_ref(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_tensor(out: *mut f64, t: &StressTensor) -> Result<(), CasimirStatusError> {
    if out.is_null() {
        return Err(CasimirStatusError::Null("tensor output"));
    }
    let dst = std::slice::from_raw_parts_mut(out, 16);
    for m in 0..4 {
        for n in 0..4 {
            dst[4 * m + n] = t.get(m, n);
        }
    }
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn casimir_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn casimir_status_name(status: CasimirStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        CasimirStatus::Ok => b"ok\0",
        CasimirStatus::NullPointer => b"null pointer\0",
        CasimirStatus::NonTimelike => b"non-timelike cutoff\0",
        CasimirStatus::NegativeTimeComponent => b"negative time component\0",
        CasimirStatus::SigmaTooLarge => b"scalar cutoff too large\0",
        CasimirStatus::NegativeSigma => b"negative scalar cutoff\0",
        CasimirStatus::BadDirection => b"bad boost direction\0",
        CasimirStatus::NonFinite => b"non-finite input\0",
        CasimirStatus::NoConvergence => b"no convergence\0",
        CasimirStatus::DegenerateInput => b"degenerate input\0",
        CasimirStatus::NearPole => b"near pole\0",
        CasimirStatus::TailTooFat => b"series tail too long\0",
        CasimirStatus::InvalidGeometry => b"invalid geometry\0",
        CasimirStatus::InvalidConfig => b"invalid configuration\0",
        CasimirStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn casimir_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Cutoff from the vector `(t, x, y)` and scalar `sigma_scalar`.
#[no_mangle]
pub unsafe extern "C" fn casimir_cutoff_new(
    t: f64,
    x: f64,
    y: f64,
    sigma_scalar: f64,
    out: *mut *mut CasimirCutoff,
) -> CasimirStatus {
    guard(|| write_handle(out, CasimirCutoff(validate_cutoff(MinkVec3::new(t, x, y), sigma_scalar)?)))
}

/// Rest-frame cutoff with `Sigma = ratio * sigma_bar`.
#[no_mangle]
pub unsafe extern "C" fn casimir_cutoff_rest(sigma_bar: f64, ratio: f64, out: *mut *mut CasimirCutoff) -> CasimirStatus {
    guard(|| write_handle(out, CasimirCutoff(CutoffConfig::rest(sigma_bar, ratio)?)))
}

/// New handle with the vector cutoff boosted along the unit direction `(dx, dy)`.
#[no_mangle]
pub unsafe extern "C" fn casimir_cutoff_boosted(
    cutoff: *const CasimirCutoff,
    rapidity: f64,
    dx: f64,
    dy: f64,
    out: *mut *mut CasimirCutoff,
) -> CasimirStatus {
    guard(|| {
        let c = deref(cutoff, "cutoff")?;
        let b = Boost::new(rapidity, [dx, dy])?;
        write_handle(out, CasimirCutoff(c.0.boosted(&b)?))
    })
}

/// Reads back `sigma^mu` (3 doubles), `Sigma` and `sigma_bar`; any output may be NULL.
#[no_mangle]
pub unsafe extern "C" fn casimir_cutoff_get(
    cutoff: *const CasimirCutoff,
    vector: *mut f64,
    sigma_scalar: *mut f64,
    sigma_bar: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let c = deref(cutoff, "cutoff")?;
        if !vector.is_null() {
            std::slice::from_raw_parts_mut(vector, 3).copy_from_slice(&c.0.vector().components());
        }
        if let Some(s) = sigma_scalar.as_mut() {
            *s = c.0.scalar();
        }
        if let Some(s) = sigma_bar.as_mut() {
            *s = c.0.sigma_bar();
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn casimir_cutoff_free(cutoff: *mut CasimirCutoff) {
    if !cutoff.is_null() {
        drop(Box::from_raw(cutoff));
    }
}

#[no_mangle]
pub unsafe extern "C" fn casimir_plates_new(a: f64, out: *mut *mut CasimirPlates) -> CasimirStatus {
    guard(|| write_handle(out, CasimirPlates(PlateGeometry::new(a)?)))
}

#[no_mangle]
pub unsafe extern "C" fn casimir_plates_free(plates: *mut CasimirPlates) {
    if !plates.is_null() {
        drop(Box::from_raw(plates));
    }
}

/// Exact tensor; `subtract` drops the separation-independent part.
#[no_mangle]
pub unsafe extern "C" fn casimir_stress_closed(
    plates: *const CasimirPlates,
    cutoff: *const CasimirCutoff,
    subtract: bool,
    out: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let (p, c) = (deref(plates, "plates")?, deref(cutoff, "cutoff")?);
        write_tensor(out, &stress_closed(&p.0, &c.0, subtract)?)
    })
}

/// Tensor from the published expansion.
#[no_mangle]
pub unsafe extern "C" fn casimir_stress_printed(
    plates: *const CasimirPlates,
    cutoff: *const CasimirCutoff,
    subtract: bool,
    out: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let (p, c) = (deref(plates, "plates")?, deref(cutoff, "cutoff")?);
        let t = if subtract { stress_printed_subtracted(&p.0, &c.0)? } else { stress_printed_full(&p.0, &c.0)? };
        write_tensor(out, &t)
    })
}

/// Unsubtracted tensor by momentum quadrature at relative tolerance
/// `quad_tol`; `abs_error` (16 doubles) may be NULL.
#[no_mangle]
pub unsafe extern "C" fn casimir_stress_oracle(
    plates: *const CasimirPlates,
    cutoff: *const CasimirCutoff,
    quad_tol: f64,
    out: *mut f64,
    abs_error: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let (p, c) = (deref(plates, "plates")?, deref(cutoff, "cutoff")?);
        let o = stress_oracle(&p.0, &c.0, &OracleSpec::default().with_tol(quad_tol))?;
        write_tensor(out, &o.tensor)?;
        if !abs_error.is_null() {
            write_tensor(abs_error, &o.abs_error)?;
        }
        Ok(())
    })
}

/// Subtracted `T^33`, exact (`printed = false`) or from the published expansion.
#[no_mangle]
pub unsafe extern "C" fn casimir_pressure(
    plates: *const CasimirPlates,
    cutoff: *const CasimirCutoff,
    printed: bool,
    out: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let (p, c) = (deref(plates, "plates")?, deref(cutoff, "cutoff")?);
        let v = if printed { pressure_printed(&p.0, &c.0) } else { pressure(&p.0, &c.0)? };
        *out_ref(out, "out")? = v;
        Ok(())
    })
}

/// `T^33 + d(a T^00)/da` by central difference with step `da`.
#[no_mangle]
pub unsafe extern "C" fn casimir_residual(
    plates: *const CasimirPlates,
    cutoff: *const CasimirCutoff,
    da: f64,
    out: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let (p, c) = (deref(plates, "plates")?, deref(cutoff, "cutoff")?);
        *out_ref(out, "out")? = pressure_energy_residual(&p.0, &c.0, da)?;
        Ok(())
    })
}

/// Sphere with default contour angle, term cap and tolerance.
#[no_mangle]
pub unsafe extern "C" fn casimir_sphere_new(
    a: f64,
    sigma: f64,
    sigma_scalar: f64,
    out: *mut *mut CasimirSphere,
) -> CasimirStatus {
    guard(|| write_handle(out, CasimirSphere(SphereConfig::new(a, sigma, sigma_scalar)?)))
}

#[no_mangle]
pub unsafe extern "C" fn casimir_sphere_new_full(
    a: f64,
    sigma: f64,
    sigma_scalar: f64,
    phi: f64,
    l_max: usize,
    tol: f64,
    out: *mut *mut CasimirSphere,
) -> CasimirStatus {
    guard(|| write_handle(out, CasimirSphere(SphereConfig::with_all(a, sigma, sigma_scalar, phi, l_max, tol)?)))
}

#[no_mangle]
pub unsafe extern "C" fn casimir_sphere_free(sphere: *mut CasimirSphere) {
    if !sphere.is_null() {
        drop(Box::from_raw(sphere));
    }
}

/// Energy shift by the chosen method; `abs_error` may be NULL and is zero
/// for the closed forms.
#[no_mangle]
pub unsafe extern "C" fn casimir_sphere_delta_e(
    sphere: *const CasimirSphere,
    method: CasimirSphereMethod,
    out: *mut f64,
    abs_error: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let s = &deref(sphere, "sphere")?.0;
        let (v, e) = match method {
            CasimirSphereMethod::Integral => {
                let q = delta_e_integral(s)?;
                (q.value, q.abs_error_estimate)
            }
            CasimirSphereMethod::Direct => {
                let q = delta_e_direct(s)?;
                (q.value, q.abs_error_estimate)
            }
            CasimirSphereMethod::ClosedPrinted => (delta_e_closed_printed(s), 0.0),
            CasimirSphereMethod::ClosedDerived => (delta_e_closed_derived(s), 0.0),
        };
        *out_ref(out, "out")? = v;
        if let Some(e_out) = abs_error.as_mut() {
            *e_out = e;
        }
        Ok(())
    })
}

/// Cutoff-dependent sphere energy, with or without the secondary cutoff.
#[no_mangle]
pub unsafe extern "C" fn casimir_sphere_e_sigma(
    sphere: *const CasimirSphere,
    with_secondary: bool,
    out: *mut f64,
    abs_error: *mut f64,
) -> CasimirStatus {
    guard(|| {
        let q = e_sigma(&deref(sphere, "sphere")?.0, with_secondary)?;
        *out_ref(out, "out")? = q.value;
        if let Some(e_out) = abs_error.as_mut() {
            *e_out = q.abs_error_estimate;
        }
        Ok(())
    })
}
