//! C ABI over the `nearfield` library.
//!
//! A scenario is created once with [`nf_scenario_new`] and passed back as an
//! opaque handle. Every fallible call returns an [`NfStatus`]; on failure the
//! message is kept per thread and can be copied out with
//! [`nf_last_error_message`]. Positions are `double[3]` in meters.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nearfield::array::{channel_vector_with, clamp_db, FocusedBeam, PowerReference};
use nearfield::em::{green_exact, kernel_far, kernel_near, FieldEvaluator};
use nearfield::multiaccess::{heuristic_select_with_model, UserSet};
use nearfield::sim::Scenario;
use nearfield::{fraunhofer_distance, normalized_power_db, Error, Medium, Model, TxArray, Vec3};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NfStatus {
    Ok = 0,
    NullPointer = 1,
    /// Invalid scenario or argument; exit code 2 in the CLI.
    InvalidConfig = 2,
    /// Singular geometry or null channel; exit code 3 in the CLI.
    DomainError = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NfModel {
    Exact = 0,
    Near = 1,
    Far = 2,
}

impl From<NfModel> for Model {
    fn from(m: NfModel) -> Self {
        match m {
            NfModel::Exact => Model::Exact,
            NfModel::Near => Model::Near,
            NfModel::Far => Model::Far,
        }
    }
}

/// Plain-data scenario description. Fill it with
/// [`nf_scenario_default_config`] and override fields as needed.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NfScenarioConfig {
    pub frequency_hz: f64,
    pub nx: usize,
    pub ny: usize,
    pub element_side_over_lambda: f64,
    pub spacing_over_lambda: f64,
    pub quadrature_order: usize,
}

/// Opaque scenario handle.
pub struct NfScenario {
    scenario: Scenario,
    medium: Medium,
    array: TxArray,
    reference: Option<PowerReference>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> NfStatus {
    if err.is_domain() {
        NfStatus::DomainError
    } else {
        NfStatus::InvalidConfig
    }
}

/// Runs `f`, records any error message, and maps panics to
/// [`NfStatus::Panic`].
fn guard<F: FnOnce() -> Result<(), NfStatus>>(f: F) -> NfStatus {
    set_error(String::new());
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NfStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic".into());
            NfStatus::Panic
        }
    }
}

fn fail(err: Error) -> NfStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> NfStatus {
    set_error(format!("null pointer: {what}"));
    NfStatus::NullPointer
}

unsafe fn read_vec3(p: *const f64, what: &str) -> Result<Vec3, NfStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    let v = std::slice::from_raw_parts(p, 3);
    Ok(Vec3::new(v[0], v[1], v[2]))
}

unsafe fn handle<'a>(h: *const NfScenario) -> Result<&'a NfScenario, NfStatus> {
    h.as_ref().ok_or_else(|| null("scenario"))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), NfStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

/// Writes the reference configuration (30 GHz, 20 × 200 half-wavelength
/// patches, order-8 quadrature) into `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nf_scenario_default_config(out: *mut NfScenarioConfig) -> NfStatus {
    guard(|| {
        let s = Scenario::default();
        write_out(
            out,
            NfScenarioConfig {
                frequency_hz: s.frequency_hz,
                nx: s.nx,
                ny: s.ny,
                element_side_over_lambda: s.element_side_over_lambda,
                spacing_over_lambda: s.spacing_over_lambda,
                quadrature_order: s.quadrature_order,
            },
            "out",
        )
    })
}

/// Validates `config`, builds the array and stores a new handle in `*out`.
/// Free it with [`nf_scenario_free`].
///
/// # Safety
/// `config` must be null or point to a valid config; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nf_scenario_new(config: *const NfScenarioConfig, out: *mut *mut NfScenario) -> NfStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let scenario = Scenario {
            frequency_hz: cfg.frequency_hz,
            nx: cfg.nx,
            ny: cfg.ny,
            element_side_over_lambda: cfg.element_side_over_lambda,
            spacing_over_lambda: cfg.spacing_over_lambda,
            model: Model::Near,
            quadrature_order: cfg.quadrature_order,
        };
        scenario.validate().map_err(fail)?;
        let medium = scenario.medium().map_err(fail)?;
        let array = scenario.array().map_err(fail)?;
        let boxed = Box::new(NfScenario {
            scenario,
            medium,
            array,
            reference: None,
        });
        out.write(Box::into_raw(boxed));
        Ok(())
    })
}

/// Releases a handle. Null is a no-op.
///
/// # Safety
/// `h` must be null or a handle from [`nf_scenario_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nf_scenario_free(h: *mut NfScenario) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of array elements N, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nf_scenario_element_count(h: *const NfScenario) -> usize {
    h.as_ref().map_or(0, |s| s.array.len())
}

/// Wavelength in meters, or NaN for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nf_scenario_wavelength(h: *const NfScenario) -> f64 {
    h.as_ref().map_or(f64::NAN, |s| s.medium.wavelength)
}

/// Near-field kernel between receiver `r` and source `s`.
///
/// # Safety
/// `h` must be a live handle, `r` and `s` readable `double[3]`, and the
/// outputs writable.
#[no_mangle]
pub unsafe extern "C" fn nf_kernel_near(
    h: *const NfScenario,
    r: *const f64,
    s: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NfStatus {
    guard(|| {
        let sc = handle(h)?;
        let v = kernel_near(&read_vec3(r, "r")?, &read_vec3(s, "s")?, &sc.medium).map_err(fail)?;
        write_out(out_re, v.re, "out_re")?;
        write_out(out_im, v.im, "out_im")
    })
}

/// Far-field kernel between receiver `r` and source `s`.
///
/// # Safety
/// As for [`nf_kernel_near`].
#[no_mangle]
pub unsafe extern "C" fn nf_kernel_far(
    h: *const NfScenario,
    r: *const f64,
    s: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NfStatus {
    guard(|| {
        let sc = handle(h)?;
        let v = kernel_far(&read_vec3(r, "r")?, &read_vec3(s, "s")?, &sc.medium).map_err(fail)?;
        write_out(out_re, v.re, "out_re")?;
        write_out(out_im, v.im, "out_im")
    })
}

/// Full Green's dyad at displacement `x`, written row-major as interleaved
/// `(re, im)` pairs into `out[18]`.
///
/// # Safety
/// `x` readable `double[3]`, `out` writable `double[18]`.
#[no_mangle]
pub unsafe extern "C" fn nf_green_exact(h: *const NfScenario, x: *const f64, out: *mut f64) -> NfStatus {
    guard(|| {
        let sc = handle(h)?;
        let g = green_exact(&read_vec3(x, "x")?, &sc.medium).map_err(fail)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, 18);
        for i in 0..3 {
            for j in 0..3 {
                let c = g[(i, j)];
                dst[2 * (3 * i + j)] = c.re;
                dst[2 * (3 * i + j) + 1] = c.im;
            }
        }
        Ok(())
    })
}

/// Channel vector at `r` into `out_re[len]`, `out_im[len]`. `len` must be
/// at least N; entries follow the array's row-major, x-fastest order.
///
/// # Safety
/// Output buffers must be writable for `len` doubles each.
#[no_mangle]
pub unsafe extern "C" fn nf_channel_vector(
    h: *const NfScenario,
    model: NfModel,
    r: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
    len: usize,
) -> NfStatus {
    guard(|| {
        let sc = handle(h)?;
        let r = read_vec3(r, "r")?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null("out"));
        }
        if len < sc.array.len() {
            set_error(format!("buffer holds {len} entries, need {}", sc.array.len()));
            return Err(NfStatus::BufferTooSmall);
        }
        let eval = FieldEvaluator::new(sc.medium, model.into(), sc.scenario.quadrature_order).map_err(fail)?;
        let g = channel_vector_with(&sc.array, &r, &eval).map_err(fail)?;
        let re = std::slice::from_raw_parts_mut(out_re, len);
        let im = std::slice::from_raw_parts_mut(out_im, len);
        for (n, v) in g.entries.iter().enumerate() {
            re[n] = v.re;
            im[n] = v.im;
        }
        Ok(())
    })
}

/// Received power at `eval` with a matched filter focused at `focus`.
///
/// # Safety
/// `focus`, `eval` readable `double[3]`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nf_beam_power(
    h: *const NfScenario,
    model: NfModel,
    focus: *const f64,
    eval: *const f64,
    out: *mut f64,
) -> NfStatus {
    guard(|| {
        let sc = handle(h)?;
        let focus = read_vec3(focus, "focus")?;
        let eval_at = read_vec3(eval, "eval")?;
        let ev = FieldEvaluator::new(sc.medium, model.into(), sc.scenario.quadrature_order).map_err(fail)?;
        let p = FocusedBeam::new(&sc.array, &focus, ev)
            .and_then(|b| b.power_at(&eval_at))
            .map_err(fail)?;
        write_out(out, p, "out")
    })
}

/// Power in dB relative to the near-model power at `(0, 0, 0.1)` m. The
/// result is clamped at -200 dB; `*out_floored` is set to 1 when clamped.
///
/// # Safety
/// `h` must be a live, exclusively borrowed handle (the reference power is
/// cached on first use); outputs writable.
#[no_mangle]
pub unsafe extern "C" fn nf_normalized_power_db(
    h: *mut NfScenario,
    power: f64,
    out_db: *mut f64,
    out_floored: *mut i32,
) -> NfStatus {
    guard(|| {
        let sc = h.as_mut().ok_or_else(|| null("scenario"))?;
        let reference = match sc.reference {
            Some(r) => r,
            None => {
                let r = PowerReference::near_field(&sc.array, &sc.medium).map_err(fail)?;
                sc.reference = Some(r);
                r
            }
        };
        let (db, floored) = clamp_db(normalized_power_db(power, &reference));
        write_out(out_db, db, "out_db")?;
        write_out(out_floored, i32::from(floored), "out_floored")
    })
}

/// Aperture diagonal D and Fraunhofer distance 2D²/λ, both in meters.
///
/// # Safety
/// Outputs writable.
#[no_mangle]
pub unsafe extern "C" fn nf_fraunhofer(
    h: *const NfScenario,
    out_diagonal: *mut f64,
    out_distance: *mut f64,
) -> NfStatus {
    guard(|| {
        let sc = handle(h)?;
        let f = fraunhofer_distance(&sc.array, &sc.medium);
        write_out(out_diagonal, f.aperture_diagonal, "out_diagonal")?;
        write_out(out_distance, f.distance, "out_distance")
    })
}

/// Greedy SIR-constrained user selection.
///
/// `positions` holds `k` receivers as `k × 3` doubles. Selected indices are
/// written nearest first into `out_indices[capacity]` and their number into
/// `*out_count`. When `capacity` is too small, `*out_count` still receives
/// the required size and [`NfStatus::BufferTooSmall`] is returned.
///
/// # Safety
/// `positions` readable for `3·k` doubles; `out_indices` writable for
/// `capacity` entries; `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn nf_schedule(
    h: *const NfScenario,
    model: NfModel,
    positions: *const f64,
    k: usize,
    gamma_db: f64,
    out_indices: *mut usize,
    capacity: usize,
    out_count: *mut usize,
) -> NfStatus {
    guard(|| {
        let sc = handle(h)?;
        if positions.is_null() {
            return Err(null("positions"));
        }
        let flat = std::slice::from_raw_parts(positions, 3 * k);
        let users = UserSet::new(flat.chunks_exact(3).map(|p| Vec3::new(p[0], p[1], p[2])).collect()).map_err(fail)?;
        let res = heuristic_select_with_model(&users, gamma_db, &sc.array, &sc.medium, model.into()).map_err(fail)?;
        write_out(out_count, res.selected.len(), "out_count")?;
        if capacity < res.selected.len() {
            set_error(format!("buffer holds {capacity} indices, need {}", res.selected.len()));
            return Err(NfStatus::BufferTooSmall);
        }
        if out_indices.is_null() {
            return Err(null("out_indices"));
        }
        ptr::copy_nonoverlapping(res.selected.as_ptr(), out_indices, res.selected.len());
        Ok(())
    })
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to fit, into `buf[len]`. Returns the full message length in
/// bytes, excluding the terminator; 0 means no error.
///
/// # Safety
/// `buf` must be null or writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn nf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(v) => v,
    Err(_) => panic!("version string"),
};

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nf_version() -> *const c_char {
    VERSION.as_ptr()
}
