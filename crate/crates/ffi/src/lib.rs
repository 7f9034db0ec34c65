//! C ABI for mechlab.
//!
//! Every fallible call returns a [`MechlabStatus`]; on failure a message is
//! kept per thread and can be read with [`mechlab_last_error`]. Mechanisms
//! are opaque handles created by [`mechlab_mechanism_new`] and released with
//! [`mechlab_mechanism_free`]. Strings handed out by the library must be
//! released with [`mechlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mechlab::characterization::lp_residuals;
use mechlab::harness::json::to_pretty_json;
use mechlab::{CheckConfig, Error, MechanismSpec, Point, Profile, Property, SpaceConfig};

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MechlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Parse = 4,
    Unsupported = 5,
    Io = 6,
    Panic = 7,
}

impl From<&Error> for MechlabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => MechlabStatus::DimensionMismatch,
            Error::InvalidMechanism { .. }
            | Error::UnknownProperty(_)
            | Error::Parse { .. }
            | Error::Json(_) => MechlabStatus::Parse,
            Error::Unsupported(_) => MechlabStatus::Unsupported,
            Error::File { .. } | Error::Io(_) | Error::Csv(_) => MechlabStatus::Io,
            _ => MechlabStatus::InvalidArgument,
        }
    }
}

/// Opaque mechanism bound to a space.
pub struct MechlabMechanism {
    spec: MechanismSpec,
    space: SpaceConfig,
}

/// Sampling options for [`mechlab_check`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MechlabCheckOptions {
    pub box_lo: f64,
    pub box_hi: f64,
    pub num_profiles: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Agents per profile; 0 picks the mechanism's default.
    pub agents: usize,
}

impl From<MechlabCheckOptions> for CheckConfig {
    fn from(o: MechlabCheckOptions) -> Self {
        CheckConfig {
            box_lo: o.box_lo,
            box_hi: o.box_hi,
            num_profiles: o.num_profiles,
            seed: o.seed,
            tolerance: o.tolerance,
            agents: (o.agents > 0).then_some(o.agents),
            ..CheckConfig::default()
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(MechlabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(MechlabStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MechlabStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MechlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MechlabStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MechlabStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller passes a NUL-terminated string.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| Failure(MechlabStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: caller guarantees `len` readable doubles at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn point_arg(p: *const f64, m: usize, what: &str) -> Result<Point, Failure> {
    Ok(Point::new(unsafe { slice_arg(p, m, what) }?.to_vec())?)
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: caller passes a valid, writable pointer or null.
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mechlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses `spec` (e.g. `"c2:1.5"`, `"median"`) for the space of dimension
/// `m` and exponent `p`, storing a new handle in `*out`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_mechanism_new(
    spec: *const c_char,
    m: usize,
    p: f64,
    out: *mut *mut MechlabMechanism,
) -> MechlabStatus {
    guard(|| {
        let out = unsafe { out_arg(out, "out") }?;
        *out = ptr::null_mut();
        let spec: MechanismSpec = unsafe { str_arg(spec, "spec") }?.parse()?;
        let space = SpaceConfig::new(m, p)?;
        if let Some(fixed) = spec.fixed_dimension() {
            if fixed != m {
                return Err(Error::Unsupported(format!("{spec} is defined only for m = {fixed}")).into());
            }
        }
        *out = Box::into_raw(Box::new(MechlabMechanism { spec, space }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `mech` must come from [`mechlab_mechanism_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mechlab_mechanism_free(mech: *mut MechlabMechanism) {
    if !mech.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(mech) });
    }
}

/// Dimension of the handle's space, or 0 for null.
///
/// # Safety
/// `mech` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mechlab_mechanism_dimension(mech: *const MechlabMechanism) -> usize {
    unsafe { mech.as_ref() }.map_or(0, |h| h.space.m())
}

/// Evaluates the mechanism on `n_agents` row-major points of the handle's
/// dimension `m`, writing the facility's `m` coordinates to `out`.
///
/// # Safety
/// `coords` must hold `n_agents * m` doubles and `out` must hold `m`.
#[no_mangle]
pub unsafe extern "C" fn mechlab_mechanism_evaluate(
    mech: *const MechlabMechanism,
    coords: *const f64,
    n_agents: usize,
    out: *mut f64,
) -> MechlabStatus {
    guard(|| {
        let h = unsafe { mech.as_ref() }.ok_or_else(|| null("mechanism"))?;
        let m = h.space.m();
        let len = n_agents
            .checked_mul(m)
            .ok_or_else(|| Failure(MechlabStatus::InvalidArgument, "agent count overflows".into()))?;
        let flat = unsafe { slice_arg(coords, len, "coords") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let agents =
            flat.chunks_exact(m).map(|row| Point::new(row.to_vec())).collect::<Result<Vec<_>, _>>()?;
        let w = h.spec.evaluate(&Profile::new(agents)?, &h.space)?;
        // SAFETY: caller provides room for m doubles.
        unsafe { std::slice::from_raw_parts_mut(out, m) }.copy_from_slice(w.coords());
        Ok(())
    })
}

/// L_p distance between two `m`-dimensional points.
///
/// # Safety
/// `a` and `b` must hold `m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_lp_distance(
    a: *const f64,
    b: *const f64,
    m: usize,
    p: f64,
    out: *mut f64,
) -> MechlabStatus {
    guard(|| {
        let space = SpaceConfig::new(m, p)?;
        let a = unsafe { point_arg(a, m, "a") }?;
        let b = unsafe { point_arg(b, m, "b") }?;
        *unsafe { out_arg(out, "out") }? = mechlab::lp_distance(&a, &b, &space)?;
        Ok(())
    })
}

/// First-order residuals of facility `w` for agents `a`, `b` in L_p.
///
/// # Safety
/// `a`, `b`, `w` must hold `m` doubles; `r_g` and `r_h` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_lp_residuals(
    a: *const f64,
    b: *const f64,
    w: *const f64,
    m: usize,
    p: f64,
    r_g: *mut f64,
    r_h: *mut f64,
) -> MechlabStatus {
    guard(|| {
        let space = SpaceConfig::new(m, p)?;
        let (a, b, w) = unsafe { (point_arg(a, m, "a")?, point_arg(b, m, "b")?, point_arg(w, m, "w")?) };
        let (r_g, r_h) = unsafe { (out_arg(r_g, "r_g")?, out_arg(r_h, "r_h")?) };
        let r = lp_residuals(&a, &b, &w, &space)?;
        (*r_g, *r_h) = (r.r_g, r.r_h);
        Ok(())
    })
}

/// Default sampling options.
#[no_mangle]
pub extern "C" fn mechlab_check_options_default() -> MechlabCheckOptions {
    let d = CheckConfig::default();
    MechlabCheckOptions {
        box_lo: d.box_lo,
        box_hi: d.box_hi,
        num_profiles: d.num_profiles,
        seed: d.seed,
        tolerance: d.tolerance,
        agents: 0,
    }
}

/// Runs one property check and stores the JSON report in `*json_out`
/// (free with [`mechlab_string_free`]). `*passed` receives 1 or 0.
///
/// # Safety
/// `mech` must be a live handle, `property` a NUL-terminated string, and
/// `passed`, `json_out` writable. `options` may be null for defaults.
#[no_mangle]
pub unsafe extern "C" fn mechlab_check(
    mech: *const MechlabMechanism,
    property: *const c_char,
    options: *const MechlabCheckOptions,
    passed: *mut i32,
    json_out: *mut *mut c_char,
) -> MechlabStatus {
    guard(|| {
        let h = unsafe { mech.as_ref() }.ok_or_else(|| null("mechanism"))?;
        let json_out = unsafe { out_arg(json_out, "json_out") }?;
        *json_out = ptr::null_mut();
        let passed = unsafe { out_arg(passed, "passed") }?;
        let property: Property = unsafe { str_arg(property, "property") }?.parse()?;
        let cfg = match unsafe { options.as_ref() } {
            Some(o) => CheckConfig::from(*o),
            None => CheckConfig::default(),
        };
        let report = mechlab::run_check(property, &h.spec, &h.space, &cfg)?;
        let text = to_pretty_json(&report).map_err(Error::from)?;
        *passed = i32::from(report.verdict == mechlab::Verdict::Pass);
        *json_out = CString::new(text).expect("JSON has no NULs").into_raw();
        Ok(())
    })
}

/// Frees a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mechlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}
