//! Deterministic numeric formatting for CSV output.

/// Formats with 12 significant digits in scientific notation.
pub(crate) fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}
