//! Pruned LIFO-stack traversal of the quadruple tree.
//!
//! Starting from the root quadruple, each generator produces a child whose
//! new coordinate is the curvature of a freshly inscribed circle. A child is
//! pushed only while its new curvature stays below the pruning bound, which
//! is sound because below the root every step strictly increases the
//! rewritten coordinate. The root generates children with all four
//! generators; a root child whose quadruple equals the root (the generator
//! fixes the root vector) is still a distinct circle and its subtree is
//! explored like any other.

use rayon::prelude::*;

use crate::error::{invalid_argument, Error, Result};
use crate::histogram::CurvatureHistogram;
use crate::quadruple::{descartes_form_i128, PackingDescriptor, Quadruple};

/// Traversal bounds are capped so that no intermediate value (at most six
/// times the bound) can overflow the quadratic form in 64-bit arithmetic.
pub const MAX_BOUND: u64 = 1 << 31;

/// Default memory budget for dense histograms: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Bound and recording window for one traversal.
#[derive(Clone, Copy, Debug)]
pub struct TraversalConfig {
    bound: u64,
    record_lo: u64,
    record_hi: u64,
    check_invariants: bool,
}

impl TraversalConfig {
    /// Count every circle of curvature below `bound`.
    pub fn to_bound(bound: u64) -> Result<Self> {
        if bound == 0 || bound > MAX_BOUND {
            return Err(invalid_argument(format!(
                "traversal bound must be in 1..={MAX_BOUND}, got {bound}"
            )));
        }
        Ok(TraversalConfig {
            bound,
            record_lo: 1,
            record_hi: bound,
            check_invariants: false,
        })
    }

    /// Record only curvatures in `[lo, hi)`; pruning still uses `hi`.
    pub fn window(lo: u64, hi: u64) -> Result<Self> {
        if !(0 < lo && lo < hi && hi <= MAX_BOUND) {
            return Err(invalid_argument(format!(
                "recording window must satisfy 0 < lo < hi <= {MAX_BOUND}, got [{lo}, {hi})"
            )));
        }
        Ok(TraversalConfig {
            bound: hi,
            record_lo: lo,
            record_hi: hi,
            check_invariants: false,
        })
    }

    /// Enable per-node Descartes and primitivity assertions.
    pub fn with_checks(mut self, on: bool) -> Self {
        self.check_invariants = on;
        self
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn record_lo(&self) -> u64 {
        self.record_lo
    }

    pub fn record_hi(&self) -> u64 {
        self.record_hi
    }
}

/// Thread count and memory budget for the heavier enumeration entry points.
#[derive(Clone, Copy, Debug)]
pub struct TraversalOptions {
    pub threads: usize,
    pub memory_budget: u64,
    pub check_invariants: bool,
}

impl Default for TraversalOptions {
    fn default() -> Self {
        TraversalOptions {
            threads: 1,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            check_invariants: false,
        }
    }
}

/// One circle discovered by the traversal.
#[derive(Clone, Copy, Debug)]
pub struct NodeVisit {
    /// The quadruple after the generator was applied.
    pub quadruple: Quadruple,
    /// Generator index 1..=4 that produced this circle.
    pub generator_used: usize,
    /// The rewritten coordinate; always the maximal entry of `quadruple`.
    pub new_curvature: i64,
    pub is_root_child: bool,
}

fn validate_traversable(packing: &PackingDescriptor) -> Result<[i64; 4]> {
    let root = packing.root().entries();
    if root.iter().any(|v| v.unsigned_abs() > MAX_BOUND) {
        return Err(invalid_argument(format!(
            "root entries of ({}) exceed the 2^31 traversal cap",
            packing.root()
        )));
    }
    Ok(root)
}

#[inline]
fn check_node(q: &[i64; 4]) {
    let quad = Quadruple::from_entries(*q);
    assert!(
        matches!(descartes_form_i128(&quad), Ok(0)),
        "traversal produced a non-Descartes quadruple ({quad})"
    );
    assert!(
        quad.is_primitive(),
        "traversal produced an imprimitive quadruple ({quad})"
    );
}

/// Expands the subtree rooted at an already-visited node.
///
/// Children are generated with the three generators other than the one that
/// created the node; a child whose new curvature does not strictly exceed
/// the value it replaces indicates a bug.
fn run_subtree<F: FnMut(&NodeVisit)>(
    start: ([i64; 4], u8),
    bound: i64,
    check: bool,
    sink: &mut F,
) -> u64 {
    let mut visits = 0u64;
    let mut stack: Vec<([i64; 4], u8)> = vec![start];
    while let Some((q, g)) = stack.pop() {
        if check {
            check_node(&q);
        }
        let total: i64 = q.iter().sum();
        for i in 0..4 {
            if i == g as usize {
                continue;
            }
            let nc = 2 * total - 3 * q[i];
            assert!(
                nc > q[i],
                "child curvature {nc} does not exceed replaced entry {} in ({})",
                q[i],
                Quadruple::from_entries(q)
            );
            if nc < bound {
                let mut child = q;
                child[i] = nc;
                visits += 1;
                sink(&NodeVisit {
                    quadruple: Quadruple::from_entries(child),
                    generator_used: i + 1,
                    new_curvature: nc,
                    is_root_child: false,
                });
                stack.push((child, i as u8));
            }
        }
    }
    visits
}

/// Generates the four root children, feeding visits below `bound` to `sink`
/// and returning the pushed nodes.
fn root_children<F: FnMut(&NodeVisit)>(
    root: [i64; 4],
    bound: i64,
    sink: &mut F,
) -> (u64, Vec<([i64; 4], u8)>) {
    let mut visits = 0u64;
    let mut pushed = Vec::with_capacity(4);
    let total: i64 = root.iter().sum();
    for i in 0..4 {
        let nc = 2 * total - 3 * root[i];
        debug_assert!(nc >= root[i], "root condition violated");
        if nc < bound {
            let mut child = root;
            child[i] = nc;
            visits += 1;
            sink(&NodeVisit {
                quadruple: Quadruple::from_entries(child),
                generator_used: i + 1,
                new_curvature: nc,
                is_root_child: true,
            });
            pushed.push((child, i as u8));
        }
    }
    (visits, pushed)
}

/// Visits every circle of the packing (other than the four root circles)
/// with curvature below the configured bound exactly once, in LIFO order.
/// Returns the number of visits.
pub fn traverse<F: FnMut(&NodeVisit)>(
    packing: &PackingDescriptor,
    config: &TraversalConfig,
    mut visitor: F,
) -> Result<u64> {
    let root = validate_traversable(packing)?;
    let bound = config.bound as i64;
    let check = config.check_invariants;
    let (mut visits, mut stack) = root_children(root, bound, &mut visitor);
    while let Some(node) = stack.pop() {
        visits += run_subtree(node, bound, check, &mut visitor);
    }
    Ok(visits)
}

/// Partitions the tree below the root into per-subtree work items and runs
/// them on a thread pool.
///
/// Returns the total visit count and the accumulators in a deterministic
/// order (the sequential prefix first, then one per frontier node in
/// generation order), so merged results do not depend on the thread count.
pub(crate) fn drive<A, M, R>(
    packing: &PackingDescriptor,
    bound: u64,
    threads: usize,
    check: bool,
    make: M,
    record: R,
) -> Result<(u64, Vec<A>)>
where
    A: Send,
    M: Fn() -> A + Sync,
    R: Fn(&mut A, &NodeVisit) + Sync,
{
    let root = validate_traversable(packing)?;
    let bound = bound as i64;
    let threads = threads.max(1);
    let mut base = make();
    let (mut visits, mut level) = root_children(root, bound, &mut |v| record(&mut base, v));

    // Expand breadth-first until there is enough work to share out.
    let target = threads * 8;
    while !level.is_empty() && level.len() < target {
        let mut next = Vec::with_capacity(level.len() * 3);
        for &(q, g) in &level {
            if check {
                check_node(&q);
            }
            let total: i64 = q.iter().sum();
            for i in 0..4 {
                if i == g as usize {
                    continue;
                }
                let nc = 2 * total - 3 * q[i];
                assert!(nc > q[i], "child curvature did not increase");
                if nc < bound {
                    let mut child = q;
                    child[i] = nc;
                    visits += 1;
                    record(
                        &mut base,
                        &NodeVisit {
                            quadruple: Quadruple::from_entries(child),
                            generator_used: i + 1,
                            new_curvature: nc,
                            is_root_child: false,
                        },
                    );
                    next.push((child, i as u8));
                }
            }
        }
        level = next;
    }

    let run_one = |&node: &([i64; 4], u8)| -> (u64, A) {
        let mut acc = make();
        let n = run_subtree(node, bound, check, &mut |v| record(&mut acc, v));
        (n, acc)
    };

    let results: Vec<(u64, A)> = if threads == 1 {
        level.iter().map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| invalid_argument(format!("thread pool: {e}")))?;
        pool.install(|| level.par_iter().map(run_one).collect())
    };

    let mut accs = Vec::with_capacity(results.len() + 1);
    accs.push(base);
    for (n, acc) in results {
        visits += n;
        accs.push(acc);
    }
    Ok((visits, accs))
}

fn count_visits(packing: &PackingDescriptor, x: u64, opts: &TraversalOptions) -> Result<u64> {
    let config = TraversalConfig::to_bound(x)?;
    let (visits, _) = drive(
        packing,
        config.bound(),
        opts.threads,
        opts.check_invariants,
        || (),
        |_, _| {},
    )?;
    Ok(visits)
}

/// Number of circles of curvature below `x`, counting multiplicity and the
/// bounding circle.
pub fn count_circles(
    packing: &PackingDescriptor,
    x: u64,
    opts: &TraversalOptions,
) -> Result<u64> {
    let visits = count_visits(packing, x, opts)?;
    let root = packing.root().entries();
    let in_range = root[1..].iter().filter(|&&v| (v as u64) < x).count() as u64;
    Ok(1 + in_range + visits)
}

/// Circle counts split by the coordinate index that received each circle's
/// curvature. The positive root circles count toward their own indices; the
/// bounding circle is excluded, so the four counts sum to `N_P(x) - 1`.
pub fn per_coordinate_counts(
    packing: &PackingDescriptor,
    x: u64,
    opts: &TraversalOptions,
) -> Result<[u64; 4]> {
    let config = TraversalConfig::to_bound(x)?;
    let (_, accs) = drive(
        packing,
        config.bound(),
        opts.threads,
        opts.check_invariants,
        || [0u64; 4],
        |acc, visit| acc[visit.generator_used - 1] += 1,
    )?;
    let mut counts = [0u64; 4];
    for acc in accs {
        for (slot, v) in counts.iter_mut().zip(acc) {
            *slot += v;
        }
    }
    let root = packing.root().entries();
    for i in 1..4 {
        if (root[i] as u64) < x {
            counts[i] += 1;
        }
    }
    Ok(counts)
}

/// Number of unordered tangent pairs with both curvatures below `x`.
///
/// Each visited circle is tangent to exactly the three other circles of its
/// quadruple, all of smaller or equal curvature, so the count is six root
/// pairs plus three per visit; equivalently `3 * N_P(x) - 6`.
pub fn count_tangent_pairs(
    packing: &PackingDescriptor,
    x: u64,
    opts: &TraversalOptions,
) -> Result<u64> {
    if x <= packing.max_root_entry() as u64 {
        return Err(invalid_argument(format!(
            "tangent-pair count needs x > {} (largest root entry), got {x}",
            packing.max_root_entry()
        )));
    }
    let visits = count_visits(packing, x, opts)?;
    Ok(6 + 3 * visits)
}

/// Exact multiplicity histogram of curvatures in `[lo, hi)`.
///
/// The traversal is pruned at `hi`; this loses nothing because every circle
/// with curvature in the window has all ancestors below it. Intervals beyond
/// the memory budget are rejected with a hint to scan in chunks.
pub fn histogram(
    packing: &PackingDescriptor,
    lo: u64,
    hi: u64,
    opts: &TraversalOptions,
) -> Result<CurvatureHistogram> {
    let config = TraversalConfig::window(lo, hi)?.with_checks(opts.check_invariants);
    let len = hi - lo;
    let threads = opts.threads.max(1);
    let bytes = len * 4;
    let required = if threads > 1 { bytes * 2 } else { bytes };
    if required > opts.memory_budget {
        return Err(Error::Capacity {
            required,
            budget: opts.memory_budget,
            unit: "bytes",
            hint: "scan the interval in smaller chunks; each chunk re-enumerates the tree",
        });
    }

    let counts: Vec<u32> = if threads == 1 {
        let mut counts = vec![0u32; len as usize];
        traverse(packing, &config, |visit| {
            let nc = visit.new_curvature as u64;
            if (lo..hi).contains(&nc) {
                counts[(nc - lo) as usize] += 1;
            }
        })?;
        counts
    } else {
        use std::sync::atomic::{AtomicU32, Ordering};
        let shared: Vec<AtomicU32> = (0..len).map(|_| AtomicU32::new(0)).collect();
        drive(
            packing,
            config.bound(),
            threads,
            opts.check_invariants,
            || (),
            |_, visit| {
                let nc = visit.new_curvature as u64;
                if (lo..hi).contains(&nc) {
                    shared[(nc - lo) as usize].fetch_add(1, Ordering::Relaxed);
                }
            },
        )?;
        shared.into_iter().map(AtomicU32::into_inner).collect()
    };

    let mut hist = CurvatureHistogram::from_counts(packing.root(), lo, hi, counts);
    for &v in &packing.root().entries()[1..] {
        if v > 0 && (lo..hi).contains(&(v as u64)) {
            hist.bump(v as u64);
        }
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bugeye() -> PackingDescriptor {
        PackingDescriptor::bugeye()
    }

    fn coins() -> PackingDescriptor {
        PackingDescriptor::coins()
    }

    fn depth_one_curvatures(packing: &PackingDescriptor, bound: u64) -> Vec<i64> {
        let mut out = Vec::new();
        traverse(
            packing,
            &TraversalConfig::to_bound(bound).unwrap(),
            |visit| {
                if visit.is_root_child {
                    out.push(visit.new_curvature);
                }
            },
        )
        .unwrap();
        out.sort_unstable();
        out
    }

    #[test]
    fn bugeye_depth_one() {
        assert_eq!(depth_one_curvatures(&bugeye(), 16), vec![3, 6, 6, 15]);
        assert_eq!(depth_one_curvatures(&bugeye(), 3), Vec::<i64>::new());
    }

    #[test]
    fn coins_depth_one() {
        assert_eq!(depth_one_curvatures(&coins(), 62), vec![40, 52, 61]);
    }

    #[test]
    fn bound_three_visits_nothing() {
        let n = traverse(&bugeye(), &TraversalConfig::to_bound(3).unwrap(), |_| {}).unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn bugeye_small_counts() {
        let opts = TraversalOptions::default();
        // circles below 10: -1, 2, 2, 3, 3, 6, 6, 6, 6
        assert_eq!(count_circles(&bugeye(), 10, &opts).unwrap(), 9);
        assert_eq!(count_circles(&bugeye(), 4, &opts).unwrap(), 5);
        assert_eq!(count_circles(&coins(), 25, &opts).unwrap(), 3);
    }

    #[test]
    fn tangent_pairs_small() {
        let opts = TraversalOptions::default();
        assert_eq!(count_tangent_pairs(&bugeye(), 10, &opts).unwrap(), 21);
        assert_eq!(count_tangent_pairs(&bugeye(), 4, &opts).unwrap(), 9);
        // just above the largest root entry only the six root pairs exist
        assert_eq!(count_tangent_pairs(&coins(), 29, &opts).unwrap(), 6);
        assert!(count_tangent_pairs(&coins(), 28, &opts).is_err());
    }

    #[test]
    fn tangent_pair_identity() {
        let opts = TraversalOptions::default();
        for packing in [bugeye(), coins()] {
            for x in [40u64, 100, 1000, 5000] {
                if x <= packing.max_root_entry() as u64 {
                    continue;
                }
                let pairs = count_tangent_pairs(&packing, x, &opts).unwrap();
                let n = count_circles(&packing, x, &opts).unwrap();
                assert_eq!(pairs, 3 * n - 6, "packing {} at {x}", packing.root());
            }
        }
    }

    #[test]
    fn per_coordinate_attribution() {
        let opts = TraversalOptions::default();
        let counts = per_coordinate_counts(&bugeye(), 10, &opts).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 9 - 1);
        assert_eq!(counts, [0, 3, 3, 2]);

        // at x = 4 the duplicate curvature-3 circle is created by S4
        let counts = per_coordinate_counts(&bugeye(), 4, &opts).unwrap();
        assert_eq!(counts, [0, 1, 1, 2]);
        assert_eq!(counts.iter().sum::<u64>(), 5 - 1);
    }

    #[test]
    fn histogram_small_values() {
        let opts = TraversalOptions::default();
        let hist = histogram(&bugeye(), 1, 10, &opts).unwrap();
        let expect = |n: u64| match n {
            2 | 3 => 2,
            6 => 4,
            _ => 0,
        };
        for n in 1..10 {
            assert_eq!(hist.count(n), expect(n), "curvature {n}");
        }

        let hist = histogram(&coins(), 1, 30, &opts).unwrap();
        assert_eq!(hist.count(24), 1);
        assert_eq!(hist.count(25), 0);
        // below the smallest positive root entry everything is zero
        let hist = histogram(&coins(), 1, 21, &opts).unwrap();
        assert_eq!(hist.total(), 0);
    }

    #[test]
    fn histogram_capacity_error_mentions_chunking() {
        let opts = TraversalOptions {
            memory_budget: 1024,
            ..TraversalOptions::default()
        };
        match histogram(&bugeye(), 1, 1 << 20, &opts) {
            Err(Error::Capacity { hint, .. }) => assert!(hint.contains("chunk")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn histogram_sum_matches_count_circles() {
        let opts = TraversalOptions::default();
        for x in [10u64, 100, 1000] {
            let hist = histogram(&bugeye(), 1, x, &opts).unwrap();
            let n = count_circles(&bugeye(), x, &opts).unwrap();
            assert_eq!(hist.total() + 1, n);
        }
    }

    #[test]
    fn count_circles_monotone() {
        let opts = TraversalOptions::default();
        let mut prev = 0;
        for x in [1u64, 2, 3, 4, 10, 50, 200, 1000] {
            let n = count_circles(&bugeye(), x, &opts).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        for packing in [bugeye(), coins()] {
            let seq = histogram(&packing, 1, 10_000, &TraversalOptions::default()).unwrap();
            let par = histogram(
                &packing,
                1,
                10_000,
                &TraversalOptions {
                    threads: 4,
                    ..TraversalOptions::default()
                },
            )
            .unwrap();
            assert_eq!(seq.counts(), par.counts());
        }
    }

    #[test]
    fn checked_mode_runs_clean() {
        let config = TraversalConfig::to_bound(2_000).unwrap().with_checks(true);
        let n = traverse(&bugeye(), &config, |_| {}).unwrap();
        assert!(n > 0);
    }

    #[test]
    fn window_validation() {
        assert!(TraversalConfig::window(0, 10).is_err());
        assert!(TraversalConfig::window(10, 10).is_err());
        assert!(TraversalConfig::window(1, MAX_BOUND + 1).is_err());
        assert!(TraversalConfig::to_bound(0).is_err());
    }
}
