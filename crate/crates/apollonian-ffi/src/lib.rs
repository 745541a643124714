//! C ABI over the apollonian crate.
//!
//! Every function returns an [`AcpStatus`]; results come back through out
//! pointers. A packing is an opaque handle created by [`acp_packing_new`] or
//! [`acp_packing_from_name`] and released with [`acp_packing_free`]. All
//! functions are safe to call from multiple threads on distinct handles;
//! read-only functions may share a handle.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use apollonian::densities;
use apollonian::enumerate::{self, TraversalOptions};
use apollonian::error::Error;
use apollonian::localglobal;
use apollonian::orbits;
use apollonian::primestats;
use apollonian::quadruple::{reduce_to_root, PackingDescriptor, Quadruple};

/// Result of every FFI call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AcpStatus {
    Ok = 0,
    /// Bad argument: unparsable root, invalid range, wrong buffer length.
    InvalidArgument = 1,
    /// The request exceeds a memory or state budget.
    Capacity = 2,
    ArithmeticOverflow = 3,
    /// The quadruple does not describe a bounded primitive packing.
    UnsupportedPacking = 4,
    NullPointer = 5,
    /// The output buffer is smaller than the result; the count out
    /// parameter carries the required size.
    BufferTooSmall = 6,
    /// An internal invariant failed.
    Panic = 7,
}

/// Opaque validated packing handle.
pub struct AcpPacking {
    inner: PackingDescriptor,
}

/// Prime statistics for curvatures below a bound.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AcpPrimeStats {
    /// Circle count including the bounding circle.
    pub circles: u64,
    /// Circles of prime curvature, with multiplicity.
    pub prime_count: u64,
    /// Sum of log p over prime curvatures.
    pub psi: f64,
    /// Sum of log p * log q over tangent prime pairs.
    pub psi2: f64,
}

fn status_of(err: &Error) -> AcpStatus {
    match err {
        Error::Capacity { .. } => AcpStatus::Capacity,
        Error::ArithmeticOverflow => AcpStatus::ArithmeticOverflow,
        Error::UnboundedPacking { .. }
        | Error::NotDescartes { .. }
        | Error::Imprimitive { .. }
        | Error::WrongParity { .. }
        | Error::NotRoot { .. } => AcpStatus::UnsupportedPacking,
        _ => AcpStatus::InvalidArgument,
    }
}

fn guarded(f: impl FnOnce() -> AcpStatus) -> AcpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(AcpStatus::Panic)
}

fn opts(threads: u32) -> TraversalOptions {
    TraversalOptions {
        threads: threads.max(1) as usize,
        ..TraversalOptions::default()
    }
}

unsafe fn packing<'a>(handle: *const AcpPacking) -> Option<&'a PackingDescriptor> {
    handle.as_ref().map(|h| &h.inner)
}

/// Creates a packing handle from four curvatures. Any quadruple of the
/// packing is accepted; it is reduced to the root first.
///
/// # Safety
/// `out` must be a valid pointer. The handle must be released with
/// [`acp_packing_free`].
#[no_mangle]
pub unsafe extern "C" fn acp_packing_new(
    v1: i64,
    v2: i64,
    v3: i64,
    v4: i64,
    out: *mut *mut AcpPacking,
) -> AcpStatus {
    if out.is_null() {
        return AcpStatus::NullPointer;
    }
    guarded(|| {
        let built = reduce_to_root(&Quadruple::new(v1, v2, v3, v4))
            .and_then(|root| PackingDescriptor::new(root, None));
        match built {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AcpPacking { inner }));
                AcpStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Creates a packing handle from a preset name ("bugeye", "coins") or a
/// comma-separated quadruple such as "-1,2,2,3".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acp_packing_from_name(
    name: *const c_char,
    out: *mut *mut AcpPacking,
) -> AcpStatus {
    if name.is_null() || out.is_null() {
        return AcpStatus::NullPointer;
    }
    guarded(|| {
        let text = match std::ffi::CStr::from_ptr(name).to_str() {
            Ok(t) => t,
            Err(_) => return AcpStatus::InvalidArgument,
        };
        match PackingDescriptor::parse(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AcpPacking { inner }));
                AcpStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a handle. A null pointer is a no-op.
///
/// # Safety
/// `handle` must come from a packing constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn acp_packing_free(handle: *mut AcpPacking) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Writes the four root curvatures, bounding circle first.
///
/// # Safety
/// `out` must point to at least four writable i64 values.
#[no_mangle]
pub unsafe extern "C" fn acp_packing_root(
    handle: *const AcpPacking,
    out: *mut i64,
) -> AcpStatus {
    if out.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    let entries = p.root().entries();
    std::ptr::copy_nonoverlapping(entries.as_ptr(), out, 4);
    AcpStatus::Ok
}

/// Number of circles of curvature below `bound`, bounding circle included.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acp_count_circles(
    handle: *const AcpPacking,
    bound: u64,
    threads: u32,
    out: *mut u64,
) -> AcpStatus {
    if out.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    guarded(|| match enumerate::count_circles(p, bound, &opts(threads)) {
        Ok(n) => {
            *out = n;
            AcpStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Number of unordered tangent pairs with both curvatures below `bound`;
/// requires `bound` above the largest root entry.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acp_tangent_pair_count(
    handle: *const AcpPacking,
    bound: u64,
    threads: u32,
    out: *mut u64,
) -> AcpStatus {
    if out.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    guarded(
        || match enumerate::count_tangent_pairs(p, bound, &opts(threads)) {
            Ok(n) => {
                *out = n;
                AcpStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Fills `out_counts` with exact multiplicities for curvatures in
/// `[lo, hi)`. `len` must equal `hi - lo`.
///
/// # Safety
/// `out_counts` must point to at least `len` writable u32 values.
#[no_mangle]
pub unsafe extern "C" fn acp_histogram_counts(
    handle: *const AcpPacking,
    lo: u64,
    hi: u64,
    threads: u32,
    out_counts: *mut u32,
    len: usize,
) -> AcpStatus {
    if out_counts.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    if hi <= lo || len as u64 != hi - lo {
        return AcpStatus::InvalidArgument;
    }
    guarded(|| match enumerate::histogram(p, lo, hi, &opts(threads)) {
        Ok(hist) => {
            std::ptr::copy_nonoverlapping(hist.counts().as_ptr(), out_counts, len);
            AcpStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Size of the orbit of the root quadruple modulo `modulus`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acp_orbit_size(
    handle: *const AcpPacking,
    modulus: u32,
    out: *mut u64,
) -> AcpStatus {
    if out.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    guarded(|| match orbits::orbit_mod(p, modulus) {
        Ok(orbit) => {
            *out = orbit.size();
            AcpStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Bitmask of admissible residues mod 24: bit n is set when some curvature
/// of the packing is congruent to n.
///
/// # Safety
/// `out_bitmask` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acp_admissible_residues(
    handle: *const AcpPacking,
    out_bitmask: *mut u32,
) -> AcpStatus {
    if out_bitmask.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    guarded(|| match orbits::admissible_residues(p) {
        Ok(residues) => {
            *out_bitmask = residues.iter().fold(0u32, |mask, &n| mask | 1 << n);
            AcpStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Exact proportion of orbit coordinates congruent to `residue` mod 24,
/// returned as a reduced fraction.
///
/// # Safety
/// `out_numerator` and `out_denominator` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acp_gamma(
    handle: *const AcpPacking,
    residue: u32,
    out_numerator: *mut i64,
    out_denominator: *mut i64,
) -> AcpStatus {
    if out_numerator.is_null() || out_denominator.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    if residue >= 24 {
        return AcpStatus::InvalidArgument;
    }
    guarded(|| match orbits::gamma_profile(p) {
        Ok(profile) => {
            let gamma = profile.gamma(residue as u8);
            *out_numerator = *gamma.numer();
            *out_denominator = *gamma.denom();
            AcpStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Circle count and prime statistics for curvatures below `bound`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acp_prime_stats(
    handle: *const AcpPacking,
    bound: u64,
    threads: u32,
    out: *mut AcpPrimeStats,
) -> AcpStatus {
    if out.is_null() {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    guarded(|| {
        let o = opts(threads);
        match primestats::ratio_series(p, bound, 2, &o) {
            Ok(series) => {
                let last = series.last();
                *out = AcpPrimeStats {
                    circles: last.circles,
                    prime_count: last.prime_count,
                    psi: last.psi,
                    psi2: last.psi2,
                };
                AcpStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Admissible integers in `[lo, hi)` that never occur as curvatures.
///
/// `out_count` always receives the total number found. Up to `capacity`
/// values are written to `out_buf`; when the buffer is too small the status
/// is `BufferTooSmall`. Call with a null buffer and zero capacity to query
/// the count first.
///
/// # Safety
/// `out_buf` must point to `capacity` writable u64 values (or be null with
/// zero capacity) and `out_count` must be valid.
#[no_mangle]
pub unsafe extern "C" fn acp_find_exceptions(
    handle: *const AcpPacking,
    lo: u64,
    hi: u64,
    threads: u32,
    out_buf: *mut u64,
    capacity: usize,
    out_count: *mut usize,
) -> AcpStatus {
    if out_count.is_null() || (out_buf.is_null() && capacity > 0) {
        return AcpStatus::NullPointer;
    }
    let Some(p) = packing(handle) else {
        return AcpStatus::NullPointer;
    };
    guarded(
        || match localglobal::find_exceptions(p, lo, hi, None, &opts(threads)) {
            Ok(report) => {
                *out_count = report.exceptions.len();
                let take = report.exceptions.len().min(capacity);
                if take > 0 {
                    std::ptr::copy_nonoverlapping(report.exceptions.as_ptr(), out_buf, take);
                }
                if report.exceptions.len() > capacity {
                    AcpStatus::BufferTooSmall
                } else {
                    AcpStatus::Ok
                }
            }
            Err(e) => status_of(&e),
        },
    )
}

/// The Dirichlet L-value at 2 for the nontrivial character mod 4, to within
/// `tolerance` (at least 1e-14).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acp_catalan_l2chi4(tolerance: f64, out: *mut f64) -> AcpStatus {
    if out.is_null() {
        return AcpStatus::NullPointer;
    }
    guarded(|| match densities::catalan_l2chi4(tolerance) {
        Ok(v) => {
            *out = v;
            AcpStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// The kissing-prime product constant, as the midpoint of a rigorous
/// enclosure together with its half-width.
///
/// # Safety
/// `out_value` and `out_half_width` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn acp_kissing_constant(
    prime_bound: u64,
    out_value: *mut f64,
    out_half_width: *mut f64,
) -> AcpStatus {
    if out_value.is_null() || out_half_width.is_null() {
        return AcpStatus::NullPointer;
    }
    guarded(|| match densities::kissing_constant_c(prime_bound) {
        Ok(enclosure) => {
            *out_value = enclosure.value();
            *out_half_width = enclosure.half_width();
            AcpStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Growth exponent of the circle count (the limit-set Hausdorff dimension).
#[no_mangle]
pub extern "C" fn acp_growth_exponent() -> f64 {
    densities::GROWTH_EXPONENT
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn acp_status_message(status: AcpStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        AcpStatus::Ok => b"ok\0",
        AcpStatus::InvalidArgument => b"invalid argument\0",
        AcpStatus::Capacity => b"capacity exceeded\0",
        AcpStatus::ArithmeticOverflow => b"arithmetic overflow\0",
        AcpStatus::UnsupportedPacking => b"unsupported packing\0",
        AcpStatus::NullPointer => b"null pointer\0",
        AcpStatus::BufferTooSmall => b"buffer too small\0",
        AcpStatus::Panic => b"internal error\0",
    };
    text.as_ptr() as *const c_char
}
