//! Prime-curvature and kissing-prime statistics.
//!
//! `psi` sums log p over circles of prime curvature (primes only, with
//! multiplicity), `pi` counts them, and `psi2` sums log p * log q over
//! unordered tangent pairs with both curvatures prime. A single traversal
//! accumulates all statistics into geometric checkpoint buckets; prefix sums
//! then yield the cumulative series. Sums use compensated accumulation so
//! billion-term runs stay accurate.

use std::io::Write;

use crate::enumerate::{drive, NodeVisit, TraversalConfig, TraversalOptions};
use crate::error::{invalid_argument, Result};
use crate::numfmt::sig12;
use crate::primes::PrimalityBackend;
use crate::quadruple::PackingDescriptor;
use crate::sums::CompensatedSum;

/// Cumulative statistics for circles of curvature below `x`.
#[derive(Clone, Copy, Debug)]
pub struct Checkpoint {
    pub x: u64,
    /// Circle count including the bounding circle.
    pub circles: u64,
    pub psi: f64,
    pub prime_count: u64,
    pub psi2: f64,
}

impl Checkpoint {
    pub fn ratio_psi(&self) -> f64 {
        self.psi / self.circles as f64
    }

    pub fn ratio_psi2_over_3n(&self) -> f64 {
        self.psi2 / (3.0 * self.circles as f64)
    }
}

/// Checkpointed series of N, psi, pi, psi2 and their ratios.
#[derive(Clone, Debug)]
pub struct PrimeStatSeries {
    checkpoints: Vec<Checkpoint>,
}

impl PrimeStatSeries {
    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("series is never empty")
    }

    /// Emits `x,N,psi,pi,psi2,ratio_psi,ratio_psi2_over_3N`, one row per
    /// checkpoint, reals with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,N,psi,pi,psi2,ratio_psi,ratio_psi2_over_3N")?;
        for c in &self.checkpoints {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                c.x,
                c.circles,
                sig12(c.psi),
                c.prime_count,
                sig12(c.psi2),
                sig12(c.ratio_psi()),
                sig12(c.ratio_psi2_over_3n())
            )?;
        }
        Ok(())
    }
}

/// Per-checkpoint-bucket partial statistics for one traversal region.
struct StatsAccumulator<'a> {
    checkpoints: &'a [u64],
    backend: &'a PrimalityBackend,
    visits: Vec<u64>,
    psi: Vec<CompensatedSum>,
    prime_count: Vec<u64>,
    psi2: Vec<CompensatedSum>,
}

impl<'a> StatsAccumulator<'a> {
    fn new(checkpoints: &'a [u64], backend: &'a PrimalityBackend) -> Self {
        let k = checkpoints.len();
        StatsAccumulator {
            checkpoints,
            backend,
            visits: vec![0; k],
            psi: vec![CompensatedSum::new(); k],
            prime_count: vec![0; k],
            psi2: vec![CompensatedSum::new(); k],
        }
    }

    /// Index of the first checkpoint exceeding `n`.
    #[inline]
    fn bucket(&self, n: u64) -> usize {
        self.checkpoints.partition_point(|&c| c <= n)
    }

    #[inline]
    fn record(&mut self, visit: &NodeVisit) {
        let n = visit.new_curvature as u64;
        let b = self.bucket(n);
        self.visits[b] += 1;
        if self.backend.is_prime(n) {
            let log_n = (n as f64).ln();
            self.psi[b].add(log_n);
            self.prime_count[b] += 1;
            // the three tangent parents are the other quadruple entries,
            // all at most the new curvature
            let entries = visit.quadruple.entries();
            for (idx, &m) in entries.iter().enumerate() {
                if idx + 1 != visit.generator_used && m >= 2 {
                    debug_assert!(m <= visit.new_curvature);
                    if self.backend.is_prime(m as u64) {
                        self.psi2[b].add(log_n * (m as f64).ln());
                    }
                }
            }
        }
    }

    fn merge(&mut self, other: &StatsAccumulator<'_>) {
        for i in 0..self.visits.len() {
            self.visits[i] += other.visits[i];
            self.psi[i].merge(&other.psi[i]);
            self.prime_count[i] += other.prime_count[i];
            self.psi2[i].merge(&other.psi2[i]);
        }
    }
}

fn series_at_checkpoints(
    packing: &PackingDescriptor,
    checkpoints: &[u64],
    opts: &TraversalOptions,
) -> Result<PrimeStatSeries> {
    let x_max = *checkpoints.last().expect("at least one checkpoint");
    TraversalConfig::to_bound(x_max)?;
    let backend = PrimalityBackend::choose(x_max, opts.memory_budget)?;

    let (_, accs) = drive(
        packing,
        x_max,
        opts.threads,
        opts.check_invariants,
        || StatsAccumulator::new(checkpoints, &backend),
        |acc, visit| acc.record(visit),
    )?;
    let mut total = accs.into_iter().reduce(|mut a, b| {
        a.merge(&b);
        a
    });
    let total = total.take().expect("at least the base accumulator");

    // seeds from the four root circles and their six tangent pairs
    let k = checkpoints.len();
    let mut circle_seed = vec![0u64; k];
    let mut psi_seed = vec![0f64; k];
    let mut pi_seed = vec![0u64; k];
    let mut psi2_seed = vec![0f64; k];
    circle_seed[0] += 1; // the bounding circle has negative curvature
    let bucket = |n: u64| checkpoints.partition_point(|&c| c <= n);
    let root = packing.root().entries();
    for &v in &root[1..] {
        let v = v as u64;
        if v < x_max {
            let b = bucket(v);
            circle_seed[b] += 1;
            if backend.is_prime(v) {
                psi_seed[b] += (v as f64).ln();
                pi_seed[b] += 1;
            }
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let (a, b) = (root[i], root[j]);
            if a >= 2 && b >= 2 && (a as u64) < x_max && (b as u64) < x_max {
                let (a, b) = (a as u64, b as u64);
                if backend.is_prime(a) && backend.is_prime(b) {
                    psi2_seed[bucket(a.max(b))] += (a as f64).ln() * (b as f64).ln();
                }
            }
        }
    }

    let mut rows = Vec::with_capacity(k);
    let mut circles = 0u64;
    let mut prime_count = 0u64;
    let mut psi = CompensatedSum::new();
    let mut psi2 = CompensatedSum::new();
    for i in 0..k {
        circles += circle_seed[i] + total.visits[i];
        prime_count += pi_seed[i] + total.prime_count[i];
        psi.add(psi_seed[i]);
        psi.merge(&total.psi[i]);
        psi2.add(psi2_seed[i]);
        psi2.merge(&total.psi2[i]);
        rows.push(Checkpoint {
            x: checkpoints[i],
            circles,
            psi: psi.total(),
            prime_count,
            psi2: psi2.total(),
        });
    }
    Ok(PrimeStatSeries { checkpoints: rows })
}

fn stats_at(
    packing: &PackingDescriptor,
    x: u64,
    opts: &TraversalOptions,
) -> Result<Checkpoint> {
    if x < 2 {
        return Err(invalid_argument(format!("prime statistics need x >= 2, got {x}")));
    }
    let series = series_at_checkpoints(packing, &[x], opts)?;
    Ok(*series.last())
}

/// Sum of log a over circles of prime curvature a < x, with multiplicity.
pub fn psi(packing: &PackingDescriptor, x: u64, opts: &TraversalOptions) -> Result<f64> {
    Ok(stats_at(packing, x, opts)?.psi)
}

/// Number of circles of prime curvature below x, with multiplicity.
pub fn pi_count(packing: &PackingDescriptor, x: u64, opts: &TraversalOptions) -> Result<u64> {
    Ok(stats_at(packing, x, opts)?.prime_count)
}

/// Sum of log a * log b over unordered tangent pairs with both curvatures
/// prime and below x.
pub fn psi2(packing: &PackingDescriptor, x: u64, opts: &TraversalOptions) -> Result<f64> {
    Ok(stats_at(packing, x, opts)?.psi2)
}

/// Runs one traversal up to `x_max` and reports all statistics at
/// `checkpoint_count` geometrically spaced cut points.
pub fn ratio_series(
    packing: &PackingDescriptor,
    x_max: u64,
    checkpoint_count: usize,
    opts: &TraversalOptions,
) -> Result<PrimeStatSeries> {
    if x_max < 2 {
        return Err(invalid_argument(format!("x_max must be at least 2, got {x_max}")));
    }
    if checkpoint_count < 2 {
        return Err(invalid_argument(format!(
            "need at least 2 checkpoints, got {checkpoint_count}"
        )));
    }
    let k = checkpoint_count as f64;
    let mut checkpoints: Vec<u64> = (1..=checkpoint_count)
        .map(|j| ((x_max as f64).powf(j as f64 / k)).round().max(2.0) as u64)
        .collect();
    checkpoints.push(x_max);
    checkpoints.sort_unstable();
    checkpoints.dedup();
    while *checkpoints.last().unwrap() > x_max {
        checkpoints.pop();
    }
    series_at_checkpoints(packing, &checkpoints, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::histogram;
    use crate::primes::BitSieve;

    fn bugeye() -> PackingDescriptor {
        PackingDescriptor::bugeye()
    }

    fn opts() -> TraversalOptions {
        TraversalOptions::default()
    }

    #[test]
    fn psi_small_values() {
        let ln2 = 2f64.ln();
        let ln3 = 3f64.ln();
        // prime curvatures below 10: 2, 2, 3, 3
        let v = psi(&bugeye(), 10, &opts()).unwrap();
        assert!((v - (2.0 * ln2 + 2.0 * ln3)).abs() < 1e-12);
        assert_eq!(psi(&bugeye(), 2, &opts()).unwrap(), 0.0);
        assert!(psi(&bugeye(), 1, &opts()).is_err());
    }

    #[test]
    fn pi_small_values() {
        assert_eq!(pi_count(&bugeye(), 10, &opts()).unwrap(), 4);
        assert_eq!(pi_count(&coins_packing(), 22, &opts()).unwrap(), 0);
        assert_eq!(pi_count(&bugeye(), 2, &opts()).unwrap(), 0);
    }

    fn coins_packing() -> PackingDescriptor {
        PackingDescriptor::coins()
    }

    #[test]
    fn psi2_small_values() {
        let ln2 = 2f64.ln();
        let ln3 = 3f64.ln();
        // pairs below 10: (2,2) once, (2,3) four times
        let v = psi2(&bugeye(), 10, &opts()).unwrap();
        assert!((v - (ln2 * ln2 + 4.0 * ln2 * ln3)).abs() < 1e-12, "got {v}");
        // only the root pair (2,2) lies below 3
        let v = psi2(&bugeye(), 3, &opts()).unwrap();
        assert!((v - ln2 * ln2).abs() < 1e-12);
        assert_eq!(psi2(&bugeye(), 2, &opts()).unwrap(), 0.0);
    }

    #[test]
    fn psi_matches_histogram_weighting() {
        let x = 100_000u64;
        let hist = histogram(&bugeye(), 1, x, &opts()).unwrap();
        let sieve = BitSieve::new(x).unwrap();
        let mut expected = 0.0;
        let mut expected_pi = 0u64;
        for p in sieve.primes().take_while(|&p| p < x) {
            let count = hist.count(p) as f64;
            expected += count * (p as f64).ln();
            expected_pi += hist.count(p) as u64;
        }
        let got = psi(&bugeye(), x, &opts()).unwrap();
        assert!((got - expected).abs() <= 1e-9 * expected.abs());
        assert_eq!(pi_count(&bugeye(), x, &opts()).unwrap(), expected_pi);
    }

    // recursive re-enumeration collecting explicit tangent pairs
    fn tangency_pairs(packing: &PackingDescriptor, bound: i64) -> Vec<(i64, i64)> {
        fn expand(q: [i64; 4], skip: usize, bound: i64, pairs: &mut Vec<(i64, i64)>) {
            let total: i64 = q.iter().sum();
            for i in 0..4 {
                if i == skip {
                    continue;
                }
                let nc = 2 * total - 3 * q[i];
                if nc < bound {
                    let mut child = q;
                    child[i] = nc;
                    for (j, &m) in child.iter().enumerate() {
                        if j != i {
                            pairs.push((nc, m));
                        }
                    }
                    expand(child, i, bound, pairs);
                }
            }
        }
        let root = packing.root().entries();
        let mut pairs = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                pairs.push((root[i], root[j]));
            }
        }
        let total: i64 = root.iter().sum();
        for i in 0..4 {
            let nc = 2 * total - 3 * root[i];
            if nc < bound {
                let mut child = root;
                child[i] = nc;
                for (j, &m) in child.iter().enumerate() {
                    if j != i {
                        pairs.push((nc, m));
                    }
                }
                expand(child, i, bound, &mut pairs);
            }
        }
        pairs
    }

    #[test]
    fn psi2_matches_explicit_tangency_list() {
        let x = 1000u64;
        for packing in [bugeye(), coins_packing()] {
            let sieve = BitSieve::new(x).unwrap();
            let brute: f64 = tangency_pairs(&packing, x as i64)
                .into_iter()
                .filter(|&(a, b)| {
                    a >= 2 && b >= 2 && sieve.is_prime(a as u64) && sieve.is_prime(b as u64)
                })
                .map(|(a, b)| (a as f64).ln() * (b as f64).ln())
                .sum();
            let streamed = psi2(&packing, x, &opts()).unwrap();
            assert!(
                (streamed - brute).abs() <= 1e-9 * brute.abs().max(1.0),
                "root {}: streamed {streamed} brute {brute}",
                packing.root()
            );
        }
    }

    #[test]
    fn series_is_monotone_and_finite() {
        let series = ratio_series(&bugeye(), 50_000, 12, &opts()).unwrap();
        let rows = series.checkpoints();
        assert!(rows.len() >= 2);
        for w in rows.windows(2) {
            assert!(w[0].x < w[1].x);
            assert!(w[0].circles <= w[1].circles);
            assert!(w[0].psi <= w[1].psi);
            assert!(w[0].prime_count <= w[1].prime_count);
            assert!(w[0].psi2 <= w[1].psi2);
        }
        assert_eq!(rows.last().unwrap().x, 50_000);
        for c in rows {
            assert!(c.psi.is_finite() && c.psi2.is_finite());
            // psi <= pi * log x, hence ratio_psi <= log(x) * pi / N
            assert!(c.psi <= c.prime_count as f64 * (c.x as f64).ln() + 1e-9);
        }
        assert!(ratio_series(&bugeye(), 1000, 1, &opts()).is_err());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let one = ratio_series(&bugeye(), 100_000, 8, &opts()).unwrap();
        let four = ratio_series(
            &bugeye(),
            100_000,
            8,
            &TraversalOptions {
                threads: 4,
                ..opts()
            },
        )
        .unwrap();
        for (a, b) in one.checkpoints().iter().zip(four.checkpoints()) {
            assert_eq!(a.x, b.x);
            assert_eq!(a.circles, b.circles);
            assert_eq!(a.prime_count, b.prime_count);
            assert_eq!(a.psi.to_bits(), b.psi.to_bits(), "psi at x={}", a.x);
            assert_eq!(a.psi2.to_bits(), b.psi2.to_bits(), "psi2 at x={}", a.x);
        }
    }

    #[test]
    fn miller_rabin_backend_agrees_with_sieve() {
        let x = 10_000u64;
        let with_sieve = psi(&bugeye(), x, &opts()).unwrap();
        let tiny_budget = TraversalOptions {
            memory_budget: 64, // too small for a sieve, forces Miller-Rabin
            ..opts()
        };
        let with_mr = psi(&bugeye(), x, &tiny_budget).unwrap();
        assert_eq!(with_sieve.to_bits(), with_mr.to_bits());
    }

    #[test]
    fn csv_shape() {
        let series = ratio_series(&bugeye(), 1000, 4, &opts()).unwrap();
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "x,N,psi,pi,psi2,ratio_psi,ratio_psi2_over_3N"
        );
        for line in lines {
            assert_eq!(line.split(',').count(), 7);
        }
    }
}
