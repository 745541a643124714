//! Exception scans and frequency statistics for admissible curvatures.
//!
//! An exception is an integer whose residue mod 24 is admissible for the
//! packing yet occurs zero times as a curvature in the scanned interval.
//! Chunked scanning is complete: a curvature n is produced by a traversal
//! pruned at any bound above n, so no curvature inside a chunk can be missed
//! by pruning at the chunk's upper end.

use std::collections::BTreeMap;

use crate::enumerate::{count_circles, histogram, TraversalOptions};
use crate::error::{invalid_argument, Result};
use crate::histogram::CurvatureHistogram;
use crate::orbits::gamma_profile;
use crate::quadruple::{PackingDescriptor, Quadruple};

/// Admissible integers without any occurrence, over one interval.
#[derive(Clone, Debug)]
pub struct ExceptionReport {
    pub root: Quadruple,
    pub lo: u64,
    pub hi: u64,
    pub residue_filter: Option<u8>,
    /// Sorted exceptional integers.
    pub exceptions: Vec<u64>,
    /// The same integers grouped by residue class mod 24.
    pub by_residue: BTreeMap<u8, Vec<u64>>,
}

/// Scans a finished histogram for admissible integers of multiplicity zero.
pub fn scan_exceptions(
    hist: &CurvatureHistogram,
    residue_filter: Option<u8>,
) -> Result<ExceptionReport> {
    if let Some(r) = residue_filter {
        if r >= 24 {
            return Err(invalid_argument(format!("residue {r} not in 0..24")));
        }
    }
    let packing = PackingDescriptor::new(hist.root(), None)?;
    let profile = gamma_profile(&packing)?;
    let mut exceptions = Vec::new();
    let mut by_residue: BTreeMap<u8, Vec<u64>> = BTreeMap::new();
    for (offset, &count) in hist.counts().iter().enumerate() {
        let n = hist.lo() + offset as u64;
        let residue = (n % 24) as u8;
        if let Some(r) = residue_filter {
            if residue != r {
                continue;
            }
        }
        if count == 0 && profile.is_admissible(n) {
            exceptions.push(n);
            by_residue.entry(residue).or_default().push(n);
        }
    }
    Ok(ExceptionReport {
        root: hist.root(),
        lo: hist.lo(),
        hi: hist.hi(),
        residue_filter,
        exceptions,
        by_residue,
    })
}

/// Enumerates curvatures in `[lo, hi)` and reports the admissible integers
/// that never occur. Intervals beyond the memory budget are rejected with a
/// hint to scan in chunks.
pub fn find_exceptions(
    packing: &PackingDescriptor,
    lo: u64,
    hi: u64,
    residue_filter: Option<u8>,
    opts: &TraversalOptions,
) -> Result<ExceptionReport> {
    let hist = histogram(packing, lo, hi, opts)?;
    scan_exceptions(&hist, residue_filter)
}

/// How often each multiplicity occurs among the integers of one residue
/// class in an interval.
#[derive(Clone, Debug)]
pub struct FrequencyDistribution {
    pub residue: u8,
    pub lo: u64,
    pub hi: u64,
    /// multiplicity -> number of integers in the class with that multiplicity
    pub delta: BTreeMap<u32, u64>,
    /// Exact number of integers in `[lo, hi)` congruent to `residue` mod 24.
    pub members: u64,
    pub mean: f64,
    /// Population variance of the multiplicities.
    pub variance: f64,
}

fn congruent_below(bound: u64, residue: u64) -> u64 {
    // #{x : 0 <= x < bound, x = residue mod 24}
    if bound <= residue {
        0
    } else {
        (bound - 1 - residue) / 24 + 1
    }
}

/// Tabulates multiplicity frequencies for one residue class of a histogram.
pub fn frequency_distribution(
    hist: &CurvatureHistogram,
    residue: u8,
) -> Result<FrequencyDistribution> {
    if residue >= 24 {
        return Err(invalid_argument(format!("residue {residue} not in 0..24")));
    }
    let members =
        congruent_below(hist.hi(), residue as u64) - congruent_below(hist.lo(), residue as u64);
    let mut delta: BTreeMap<u32, u64> = BTreeMap::new();
    let mut total = 0u64;
    let mut weighted = 0u128;
    let mut weighted_sq = 0u128;
    for (_, count) in hist.class_iter(residue) {
        *delta.entry(count).or_insert(0) += 1;
        total += 1;
        weighted += count as u128;
        weighted_sq += (count as u128) * (count as u128);
    }
    debug_assert_eq!(total, members);
    let mean = if members == 0 {
        0.0
    } else {
        weighted as f64 / members as f64
    };
    let variance = if members == 0 {
        0.0
    } else {
        weighted_sq as f64 / members as f64 - mean * mean
    };
    Ok(FrequencyDistribution {
        residue,
        lo: hist.lo(),
        hi: hist.hi(),
        delta,
        members,
        mean,
        variance,
    })
}

/// How the expected multiplicity is obtained.
#[derive(Clone, Copy, Debug)]
pub enum MeanMode {
    /// From measured circle counts at the interval ends.
    Measured { circles_lo: u64, circles_hi: u64 },
    /// From the growth law `N(x) = c_p * x^delta`.
    Asymptotic { c_p: f64, delta: f64 },
}

/// Expected mean multiplicity of integers congruent to `residue` mod 24 in
/// `[lo, hi)`: `24 * gamma(residue) * (N(hi) - N(lo)) / (hi - lo)`.
pub fn predicted_mean(
    packing: &PackingDescriptor,
    residue: u8,
    lo: u64,
    hi: u64,
    mode: MeanMode,
) -> Result<f64> {
    if residue >= 24 {
        return Err(invalid_argument(format!("residue {residue} not in 0..24")));
    }
    if lo >= hi {
        return Err(invalid_argument(format!("empty interval [{lo}, {hi})")));
    }
    let gamma = gamma_profile(packing)?.gamma(residue);
    let gamma = *gamma.numer() as f64 / *gamma.denom() as f64;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let growth = match mode {
        MeanMode::Measured {
            circles_lo,
            circles_hi,
        } => {
            if circles_hi < circles_lo {
                return Err(invalid_argument(
                    "measured circle counts must be non-decreasing".to_string(),
                ));
            }
            (circles_hi - circles_lo) as f64
        }
        MeanMode::Asymptotic { c_p, delta } => {
            if !(c_p > 0.0) || !delta.is_finite() {
                return Err(invalid_argument(
                    "asymptotic mode needs c_p > 0 and a finite exponent".to_string(),
                ));
            }
            c_p * ((hi as f64).powf(delta) - (lo as f64).powf(delta))
        }
    };
    Ok(24.0 * gamma * growth / (hi - lo) as f64)
}

/// Least-squares estimate of the growth law from `(x, N(x))` samples.
#[derive(Clone, Copy, Debug)]
pub struct GrowthFit {
    pub delta_hat: f64,
    pub c_hat: f64,
}

/// Fits `log N = delta * log x + log c` over at least three samples.
pub fn fit_growth(samples: &[(u64, u64)]) -> Result<GrowthFit> {
    if samples.len() < 3 {
        return Err(invalid_argument(format!(
            "growth fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(x, n)| x < 1 || n < 1) {
        return Err(invalid_argument("samples must be positive".to_string()));
    }
    let logs: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(x, n)| ((x as f64).ln(), (n as f64).ln()))
        .collect();
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx < 1e-12 {
        return Err(invalid_argument(
            "degenerate samples: x values must be spread out".to_string(),
        ));
    }
    let delta_hat = sxy / sxx;
    let c_hat = (mean_y - delta_hat * mean_x).exp();
    Ok(GrowthFit { delta_hat, c_hat })
}

/// Measures `N(x)` at each requested bound.
pub fn growth_samples(
    packing: &PackingDescriptor,
    bounds: &[u64],
    opts: &TraversalOptions,
) -> Result<Vec<(u64, u64)>> {
    bounds
        .iter()
        .map(|&x| Ok((x, count_circles(packing, x, opts)?)))
        .collect()
}
