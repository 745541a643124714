#ifndef APOLLONIAN_H
#define APOLLONIAN_H

/* Generated by cbindgen from the apollonian-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every FFI call.
typedef enum {
  ACP_STATUS_OK = 0,
  // Bad argument: unparsable root, invalid range, wrong buffer length.
  ACP_STATUS_INVALID_ARGUMENT = 1,
  // The request exceeds a memory or state budget.
  ACP_STATUS_CAPACITY = 2,
  ACP_STATUS_ARITHMETIC_OVERFLOW = 3,
  // The quadruple does not describe a bounded primitive packing.
  ACP_STATUS_UNSUPPORTED_PACKING = 4,
  ACP_STATUS_NULL_POINTER = 5,
  // The output buffer is smaller than the result; the count out
  // parameter carries the required size.
  ACP_STATUS_BUFFER_TOO_SMALL = 6,
  // An internal invariant failed.
  ACP_STATUS_PANIC = 7,
} AcpStatus;

// Opaque validated packing handle.
typedef struct AcpPacking AcpPacking;

// Prime statistics for curvatures below a bound.
typedef struct {
  // Circle count including the bounding circle.
  uint64_t circles;
  // Circles of prime curvature, with multiplicity.
  uint64_t prime_count;
  // Sum of log p over prime curvatures.
  double psi;
  // Sum of log p * log q over tangent prime pairs.
  double psi2;
} AcpPrimeStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a packing handle from four curvatures. Any quadruple of the
// packing is accepted; it is reduced to the root first.
//
// # Safety
// `out` must be a valid pointer. The handle must be released with
// [`acp_packing_free`].
AcpStatus acp_packing_new(int64_t v1, int64_t v2, int64_t v3, int64_t v4, AcpPacking **out);

// Creates a packing handle from a preset name ("bugeye", "coins") or a
// comma-separated quadruple such as "-1,2,2,3".
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
AcpStatus acp_packing_from_name(const char *name, AcpPacking **out);

// Releases a handle. A null pointer is a no-op.
//
// # Safety
// `handle` must come from a packing constructor and not be freed twice.
void acp_packing_free(AcpPacking *handle);

// Writes the four root curvatures, bounding circle first.
//
// # Safety
// `out` must point to at least four writable i64 values.
AcpStatus acp_packing_root(const AcpPacking *handle, int64_t *out);

// Number of circles of curvature below `bound`, bounding circle included.
//
// # Safety
// `out` must be a valid pointer.
AcpStatus acp_count_circles(const AcpPacking *handle,
                            uint64_t bound,
                            uint32_t threads,
                            uint64_t *out);

// Number of unordered tangent pairs with both curvatures below `bound`;
// requires `bound` above the largest root entry.
//
// # Safety
// `out` must be a valid pointer.
AcpStatus acp_tangent_pair_count(const AcpPacking *handle,
                                 uint64_t bound,
                                 uint32_t threads,
                                 uint64_t *out);

// Fills `out_counts` with exact multiplicities for curvatures in
// `[lo, hi)`. `len` must equal `hi - lo`.
//
// # Safety
// `out_counts` must point to at least `len` writable u32 values.
AcpStatus acp_histogram_counts(const AcpPacking *handle,
                               uint64_t lo,
                               uint64_t hi,
                               uint32_t threads,
                               uint32_t *out_counts,
                               uintptr_t len);

// Size of the orbit of the root quadruple modulo `modulus`.
//
// # Safety
// `out` must be a valid pointer.
AcpStatus acp_orbit_size(const AcpPacking *handle, uint32_t modulus, uint64_t *out);

// Bitmask of admissible residues mod 24: bit n is set when some curvature
// of the packing is congruent to n.
//
// # Safety
// `out_bitmask` must be a valid pointer.
AcpStatus acp_admissible_residues(const AcpPacking *handle, uint32_t *out_bitmask);

// Exact proportion of orbit coordinates congruent to `residue` mod 24,
// returned as a reduced fraction.
//
// # Safety
// `out_numerator` and `out_denominator` must be valid pointers.
AcpStatus acp_gamma(const AcpPacking *handle,
                    uint32_t residue,
                    int64_t *out_numerator,
                    int64_t *out_denominator);

// Circle count and prime statistics for curvatures below `bound`.
//
// # Safety
// `out` must be a valid pointer.
AcpStatus acp_prime_stats(const AcpPacking *handle,
                          uint64_t bound,
                          uint32_t threads,
                          AcpPrimeStats *out);

// Admissible integers in `[lo, hi)` that never occur as curvatures.
//
// `out_count` always receives the total number found. Up to `capacity`
// values are written to `out_buf`; when the buffer is too small the status
// is `BufferTooSmall`. Call with a null buffer and zero capacity to query
// the count first.
//
// # Safety
// `out_buf` must point to `capacity` writable u64 values (or be null with
// zero capacity) and `out_count` must be valid.
AcpStatus acp_find_exceptions(const AcpPacking *handle,
                              uint64_t lo,
                              uint64_t hi,
                              uint32_t threads,
                              uint64_t *out_buf,
                              uintptr_t capacity,
                              uintptr_t *out_count);

// The Dirichlet L-value at 2 for the nontrivial character mod 4, to within
// `tolerance` (at least 1e-14).
//
// # Safety
// `out` must be a valid pointer.
AcpStatus acp_catalan_l2chi4(double tolerance, double *out);

// The kissing-prime product constant, as the midpoint of a rigorous
// enclosure together with its half-width.
//
// # Safety
// `out_value` and `out_half_width` must be valid pointers.
AcpStatus acp_kissing_constant(uint64_t prime_bound, double *out_value, double *out_half_width);

// Growth exponent of the circle count (the limit-set Hausdorff dimension).
double acp_growth_exponent(void);

// Static description of a status code.
const char *acp_status_message(AcpStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APOLLONIAN_H */
