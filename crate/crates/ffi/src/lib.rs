//! C ABI for the sphere-substrate Casimir calculator.
//!
//! Systems are opaque handles created by the `casimir_system_new_*`
//! constructors and released with [`casimir_system_free`]. Every fallible
//! call returns a status code (see the `CASIMIR_STATUS_*` constants in the
//! header) and writes results through out-pointers; the message behind the
//! most recent failure on the calling thread is available via
//! [`casimir_last_error_message`]. The committed header
//! `include/casimir_spectral.h` is maintained by hand and kept in sync by
//! the `header_in_sync` test.
//!
//! Panics never cross the boundary; they are caught and reported as
//! `CASIMIR_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, c_uint, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use casimir_spectral::dos::{dos_interaction_energy, QuadratureSpec};
use casimir_spectral::materials::{DielectricModel, MaterialLibrary};
use casimir_spectral::modes::{force, interaction_energy, mode_frequencies, DerivativeMethod};
use casimir_spectral::pfa::{pfa_force, PfaVariant};
use casimir_spectral::system::SystemSpec;
use casimir_spectral::Error;

pub const CASIMIR_ABI_VERSION: c_uint = 1;

pub const CASIMIR_STATUS_OK: c_int = 0;
pub const CASIMIR_STATUS_NULL_ARGUMENT: c_int = 1;
pub const CASIMIR_STATUS_VALIDATION: c_int = 2;
pub const CASIMIR_STATUS_NUMERICAL: c_int = 3;
pub const CASIMIR_STATUS_IO: c_int = 4;
pub const CASIMIR_STATUS_INTERNAL: c_int = 5;

/// Opaque sphere-over-substrate configuration.
pub struct CasimirSystem {
    spec: SystemSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(message: &str) {
    LAST_ERROR.with(|slot| {
        let mut slot = slot.borrow_mut();
        slot.clear();
        slot.extend_from_slice(message.as_bytes());
        slot.push(0);
    });
}

fn status_of(err: &Error) -> c_int {
    match err.exit_code() {
        3 => CASIMIR_STATUS_NUMERICAL,
        4 => CASIMIR_STATUS_IO,
        _ => CASIMIR_STATUS_VALIDATION,
    }
}

fn fail(err: Error) -> c_int {
    let code = status_of(&err);
    set_last_error(&err.to_string());
    code
}

fn guarded(body: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => {
            set_last_error("internal panic");
            CASIMIR_STATUS_INTERNAL
        }
    }
}

/// ABI version of this library; bump on any breaking header change.
#[no_mangle]
pub extern "C" fn casimir_abi_version() -> c_uint {
    CASIMIR_ABI_VERSION
}

/// Copy the last error message on this thread into `buffer` (NUL-terminated,
/// truncated to `capacity`). Returns the full message length in bytes
/// excluding the NUL, or 0 when no error has occurred yet.
///
/// # Safety
/// `buffer` must point to at least `capacity` writable bytes, or be null
/// (in which case only the length is returned).
#[no_mangle]
pub unsafe extern "C" fn casimir_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        if slot.is_empty() {
            return 0;
        }
        let message_len = slot.len() - 1;
        if !buffer.is_null() && capacity > 0 {
            let n = message_len.min(capacity - 1);
            std::ptr::copy_nonoverlapping(slot.as_ptr() as *const c_char, buffer, n);
            *buffer.add(n) = 0;
        }
        message_len
    })
}

fn new_system(spec: Result<SystemSpec, Error>, out: *mut *mut CasimirSystem) -> c_int {
    if out.is_null() {
        set_last_error("out pointer is null");
        return CASIMIR_STATUS_NULL_ARGUMENT;
    }
    match spec {
        Ok(spec) => {
            let handle = Box::new(CasimirSystem { spec });
            unsafe { *out = Box::into_raw(handle) };
            CASIMIR_STATUS_OK
        }
        Err(err) => fail(err),
    }
}

/// Drude sphere over a real-constant substrate.
///
/// # Safety
/// `out` must be a valid pointer to a `CasimirSystem*`.
#[no_mangle]
pub unsafe extern "C" fn casimir_system_new_drude(
    radius_nm: c_double,
    gap_nm: c_double,
    sphere_omega_p_ev: c_double,
    sphere_damping_ratio: c_double,
    substrate_epsilon: c_double,
    ambient_epsilon: c_double,
    out: *mut *mut CasimirSystem,
) -> c_int {
    guarded(|| {
        let spec =
            DielectricModel::drude(sphere_omega_p_ev, sphere_damping_ratio).and_then(|sphere| {
                DielectricModel::constant(substrate_epsilon).and_then(|substrate| {
                    SystemSpec::new(radius_nm, gap_nm, sphere, substrate, ambient_epsilon)
                })
            });
        new_system(spec, out)
    })
}

/// Drude sphere over a perfectly conducting substrate.
///
/// # Safety
/// `out` must be a valid pointer to a `CasimirSystem*`.
#[no_mangle]
pub unsafe extern "C" fn casimir_system_new_drude_over_conductor(
    radius_nm: c_double,
    gap_nm: c_double,
    sphere_omega_p_ev: c_double,
    sphere_damping_ratio: c_double,
    ambient_epsilon: c_double,
    out: *mut *mut CasimirSystem,
) -> c_int {
    guarded(|| {
        let spec =
            DielectricModel::drude(sphere_omega_p_ev, sphere_damping_ratio).and_then(|sphere| {
                SystemSpec::new(
                    radius_nm,
                    gap_nm,
                    sphere,
                    DielectricModel::PerfectConductor,
                    ambient_epsilon,
                )
            });
        new_system(spec, out)
    })
}

/// System from preset material names (case-insensitive): spheres K, Au, Ag,
/// Al; substrates Inf, Al2O3, TiO2.
///
/// # Safety
/// `sphere_name` and `substrate_name` must be NUL-terminated strings; `out`
/// must be a valid pointer to a `CasimirSystem*`.
#[no_mangle]
pub unsafe extern "C" fn casimir_system_new_named(
    sphere_name: *const c_char,
    substrate_name: *const c_char,
    radius_nm: c_double,
    gap_nm: c_double,
    out: *mut *mut CasimirSystem,
) -> c_int {
    guarded(|| {
        if sphere_name.is_null() || substrate_name.is_null() {
            set_last_error("material name is null");
            return CASIMIR_STATUS_NULL_ARGUMENT;
        }
        let parse = |ptr: *const c_char| -> Result<String, c_int> {
            match CStr::from_ptr(ptr).to_str() {
                Ok(s) => Ok(s.to_string()),
                Err(_) => {
                    set_last_error("material name is not valid UTF-8");
                    Err(CASIMIR_STATUS_VALIDATION)
                }
            }
        };
        let sphere = match parse(sphere_name) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let substrate = match parse(substrate_name) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let library = MaterialLibrary::standard();
        let spec = library.resolve(&sphere).and_then(|(_, sphere_model)| {
            library
                .resolve(&substrate)
                .and_then(|(_, substrate_model)| {
                    SystemSpec::new(radius_nm, gap_nm, *sphere_model, *substrate_model, 1.0)
                })
        });
        new_system(spec, out)
    })
}

/// Release a system handle; null is a no-op.
///
/// # Safety
/// `system` must be a pointer returned by a constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn casimir_system_free(system: *mut CasimirSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

unsafe fn with_system<T>(
    system: *const CasimirSystem,
    out: *mut T,
    body: impl FnOnce(&SystemSpec) -> Result<T, Error>,
) -> c_int {
    if system.is_null() || out.is_null() {
        set_last_error("null argument");
        return CASIMIR_STATUS_NULL_ARGUMENT;
    }
    match body(&(*system).spec) {
        Ok(value) => {
            *out = value;
            CASIMIR_STATUS_OK
        }
        Err(err) => fail(err),
    }
}

/// Substrate contrast factor of the system.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn casimir_contrast_factor(
    system: *const CasimirSystem,
    out: *mut c_double,
) -> c_int {
    guarded(|| with_system(system, out, |spec| spec.contrast_factor()))
}

/// Eigenvalues of the interaction matrix (in-plane pair and surface normal).
///
/// # Safety
/// `system` must be a live handle; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn casimir_eigenvalues(
    system: *const CasimirSystem,
    out_parallel: *mut c_double,
    out_perpendicular: *mut c_double,
) -> c_int {
    guarded(|| {
        if out_perpendicular.is_null() {
            set_last_error("null argument");
            return CASIMIR_STATUS_NULL_ARGUMENT;
        }
        with_system(system, out_parallel, |spec| {
            let d = spec.decomposition()?;
            *out_perpendicular = d.n_perpendicular();
            Ok(d.n_parallel())
        })
    })
}

/// Proper-mode frequencies in eV: in-plane, surface-normal, and the
/// z-to-infinity reference mode.
///
/// # Safety
/// `system` must be a live handle; all out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn casimir_mode_frequencies_ev(
    system: *const CasimirSystem,
    out_parallel: *mut c_double,
    out_perpendicular: *mut c_double,
    out_reference: *mut c_double,
) -> c_int {
    guarded(|| {
        if out_perpendicular.is_null() || out_reference.is_null() {
            set_last_error("null argument");
            return CASIMIR_STATUS_NULL_ARGUMENT;
        }
        with_system(system, out_parallel, |spec| {
            let spectrum = mode_frequencies(&spec.decomposition()?, &spec.sphere)?;
            *out_perpendicular = spectrum.omega_perpendicular_ev();
            *out_reference = spectrum.reference_omega_ev;
            Ok(spectrum.omega_parallel_ev())
        })
    })
}

/// Mode-sum interaction energy in eV.
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn casimir_interaction_energy_ev(
    system: *const CasimirSystem,
    out: *mut c_double,
) -> c_int {
    guarded(|| with_system(system, out, |spec| Ok(interaction_energy(spec)?.energy_ev)))
}

/// Force in eV/nm and pN; negative values point toward the substrate.
/// `use_central_difference` = 0 selects the analytic derivative.
///
/// # Safety
/// `system` must be a live handle; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn casimir_force(
    system: *const CasimirSystem,
    use_central_difference: c_int,
    out_ev_per_nm: *mut c_double,
    out_pn: *mut c_double,
) -> c_int {
    guarded(|| {
        if out_pn.is_null() {
            set_last_error("null argument");
            return CASIMIR_STATUS_NULL_ARGUMENT;
        }
        with_system(system, out_ev_per_nm, |spec| {
            let method = if use_central_difference == 0 {
                DerivativeMethod::Analytic
            } else {
                DerivativeMethod::CentralDifference
            };
            let result = force(spec, method)?;
            *out_pn = result.force_pn;
            Ok(result.force_ev_per_nm)
        })
    })
}

/// Density-of-states interaction energy in eV; requires a damped Drude
/// sphere. `rel_tol` <= 0 selects the default tolerance (1e-8).
///
/// # Safety
/// `system` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn casimir_dos_interaction_energy_ev(
    system: *const CasimirSystem,
    rel_tol: c_double,
    out: *mut c_double,
) -> c_int {
    guarded(|| {
        with_system(system, out, |spec| {
            let omega_p = match spec.sphere {
                DielectricModel::Drude { omega_p_ev, .. } => omega_p_ev,
                ref other => {
                    return Err(Error::UnsupportedSphereModel {
                        model: other.label(),
                    })
                }
            };
            let mut quad = QuadratureSpec::for_plasma_frequency(omega_p);
            if rel_tol > 0.0 {
                quad.rel_tol = rel_tol;
            }
            Ok(dos_interaction_energy(spec, &quad)?.energy_ev)
        })
    })
}

/// Proximity-theorem force in pN. `variant` 0 = ideal retarded,
/// 1 = Hamaker non-retarded (then `hamaker_ev` must be > 0).
///
/// # Safety
/// `out_pn` must be writable.
#[no_mangle]
pub unsafe extern "C" fn casimir_pfa_force_pn(
    radius_nm: c_double,
    gap_nm: c_double,
    variant: c_int,
    hamaker_ev: c_double,
    out_pn: *mut c_double,
) -> c_int {
    guarded(|| {
        if out_pn.is_null() {
            set_last_error("null argument");
            return CASIMIR_STATUS_NULL_ARGUMENT;
        }
        let (variant, hamaker) = match variant {
            0 => (PfaVariant::IdealRetarded, None),
            1 => (PfaVariant::HamakerNonRetarded, Some(hamaker_ev)),
            other => {
                set_last_error(&format!("unknown PFA variant {other}"));
                return CASIMIR_STATUS_VALIDATION;
            }
        };
        match pfa_force(radius_nm, gap_nm, variant, hamaker) {
            Ok(result) => {
                *out_pn = result.force_pn;
                CASIMIR_STATUS_OK
            }
            Err(err) => fail(err),
        }
    })
}
