//! Closed-form local densities, their brute-force finite-field oracles, and
//! the limit constants entering the prime-count predictions.
//!
//! `beta(p)` is the proportion of orbit states mod p with a fixed coordinate
//! congruent to zero, `g(p)` the proportion with two fixed coordinates zero.
//! Both have closed forms depending on p mod 4; the brute variants recompute
//! them literally over the orbit so the formulas can be cross-checked.

use num_rational::Ratio;

use crate::error::{invalid_argument, Result};
use crate::orbits::orbit_mod;
use crate::primes::{is_prime_u64, BitSieve};
use crate::quadruple::PackingDescriptor;
use crate::sums::CompensatedSum;

/// Growth exponent of the circle count, the Hausdorff dimension of the
/// packing's limit set. Taken as a fixed constant, not computed here.
pub const GROWTH_EXPONENT: f64 = 1.30568;

const MAX_BRUTE_PRIME: u64 = 50;

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(invalid_argument(
            "p = 2 is coordinate-dependent; use beta_two".to_string(),
        ));
    }
    if !is_prime_u64(p) {
        return Err(invalid_argument(format!("{p} is not prime")));
    }
    Ok(())
}

/// Closed form for the zero-coordinate density at an odd prime.
pub fn beta_formula(p: u64) -> Result<Ratio<i64>> {
    require_odd_prime(p)?;
    let p = p as i64;
    Ok(match (p, p % 4) {
        (3, _) => Ratio::new(2, 5),
        (_, 1) => Ratio::new(1, p + 1),
        _ => Ratio::new(p + 1, p * p + 1),
    })
}

/// Density at p = 2 for one coordinate: 1 when that coordinate is even
/// throughout the orbit, 0 otherwise. The group is trivial mod 2, so the
/// root's parity decides.
pub fn beta_two(packing: &PackingDescriptor, j: usize) -> Result<u8> {
    if !(1..=4).contains(&j) {
        return Err(crate::error::Error::GeneratorIndex(j));
    }
    Ok((packing.root().entries()[j - 1] % 2 == 0) as u8)
}

/// Literal zero-coordinate count over the orbit mod p.
pub fn beta_brute(packing: &PackingDescriptor, p: u64, j: usize) -> Result<Ratio<i64>> {
    require_odd_prime(p)?;
    if p > MAX_BRUTE_PRIME {
        return Err(invalid_argument(format!(
            "brute-force density limited to p <= {MAX_BRUTE_PRIME}"
        )));
    }
    if !(1..=4).contains(&j) {
        return Err(crate::error::Error::GeneratorIndex(j));
    }
    let orbit = orbit_mod(packing, p as u32)?;
    let zeros = orbit.states().iter().filter(|s| s[j - 1] == 0).count();
    Ok(Ratio::new(zeros as i64, orbit.size() as i64))
}

/// Closed form for the two-coordinate zero density at an odd prime.
pub fn g_formula(p: u64) -> Result<Ratio<i64>> {
    require_odd_prime(p)?;
    let p = p as i64;
    Ok(match (p, p % 4) {
        (3, _) => Ratio::new(1, 10),
        (_, 1) => Ratio::new(1, (p + 1) * (p + 1)),
        _ => Ratio::new(1, p * p + 1),
    })
}

/// Literal two-coordinate zero count over the orbit mod p.
pub fn g_brute(packing: &PackingDescriptor, p: u64, i: usize, j: usize) -> Result<Ratio<i64>> {
    require_odd_prime(p)?;
    if p > MAX_BRUTE_PRIME {
        return Err(invalid_argument(format!(
            "brute-force density limited to p <= {MAX_BRUTE_PRIME}"
        )));
    }
    for idx in [i, j] {
        if !(1..=4).contains(&idx) {
            return Err(crate::error::Error::GeneratorIndex(idx));
        }
    }
    if i == j {
        return Err(invalid_argument("coordinate pair must be distinct".to_string()));
    }
    let orbit = orbit_mod(packing, p as u32)?;
    let zeros = orbit
        .states()
        .iter()
        .filter(|s| s[i - 1] == 0 && s[j - 1] == 0)
        .count();
    Ok(Ratio::new(zeros as i64, orbit.size() as i64))
}

/// Number of nonzero solutions of the Descartes form over F_p in four
/// variables, or with one variable fixed to zero (`arity` 3).
pub fn cone_count(p: u64, arity: u8) -> Result<u64> {
    if p <= 3 || !is_prime_u64(p) {
        return Err(invalid_argument(format!("need a prime p > 3, got {p}")));
    }
    let p = p as u128;
    let value = match arity {
        3 => p * p - 1,
        4 => {
            if p % 4 == 1 {
                p * p * p + p * p - p - 1
            } else {
                p * p * p - p * p + p - 1
            }
        }
        _ => return Err(invalid_argument(format!("arity must be 3 or 4, got {arity}"))),
    };
    u64::try_from(value).map_err(|_| crate::error::Error::ArithmeticOverflow)
}

/// Partial sums of the alternating series, repeatedly averaged. Each
/// averaging pass halves the error, so 64 terms reach the double-precision
/// floor.
fn averaged_alternating(terms: usize) -> f64 {
    let mut partials = Vec::with_capacity(terms);
    let mut sum = 0.0f64;
    let mut sign = 1.0f64;
    for k in 0..terms {
        let d = (2 * k + 1) as f64;
        sum += sign / (d * d);
        sign = -sign;
        partials.push(sum);
    }
    while partials.len() > 1 {
        for i in 0..partials.len() - 1 {
            partials[i] = 0.5 * (partials[i] + partials[i + 1]);
        }
        partials.pop();
    }
    partials[0]
}

/// The Dirichlet L-value at 2 for the nontrivial character mod 4,
/// `sum_{k>=0} (-1)^k / (2k+1)^2 = 0.915965594177219...`, to within
/// `tolerance`.
pub fn catalan_l2chi4(tolerance: f64) -> Result<f64> {
    if !(tolerance >= 1e-14) {
        return Err(invalid_argument(format!(
            "tolerance {tolerance} below the 1e-14 double-precision floor"
        )));
    }
    let mut prev = averaged_alternating(8);
    for terms in [16usize, 24, 32, 48, 64] {
        let next = averaged_alternating(terms);
        if (next - prev).abs() <= 0.25 * tolerance {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// A value known to lie inside `[lower, upper]`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantEnclosure {
    pub lower: f64,
    pub upper: f64,
}

impl ConstantEnclosure {
    /// Midpoint of the enclosure.
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Distance from the enclosure to `x`; zero when contained.
    pub fn distance_to(&self, x: f64) -> f64 {
        if x < self.lower {
            self.lower - x
        } else if x > self.upper {
            x - self.upper
        } else {
            0.0
        }
    }
}

/// The kissing-prime constant `2 * prod_{p = 3 mod 4} (1 - 2/(p (p-1)^2))`.
///
/// The product over primes up to `prime_bound` overestimates the limit; the
/// omitted tail factor lies between `exp(-3/(2 B^2))` and 1 because
/// `sum_{p > B} 2/(p (p-1)^2) < sum_{n > B} 3/n^3 < 3/(2 B^2)`. The
/// truncation is therefore returned as an explicit enclosure.
pub fn kissing_constant_c(prime_bound: u64) -> Result<ConstantEnclosure> {
    if prime_bound < 1_000 {
        return Err(invalid_argument(format!(
            "prime bound must be at least 1000, got {prime_bound}"
        )));
    }
    let sieve = BitSieve::new(prime_bound)?;
    let mut log_sum = CompensatedSum::new();
    for p in sieve.primes() {
        if p % 4 == 3 {
            let p = p as f64;
            log_sum.add((-2.0 / (p * (p - 1.0) * (p - 1.0))).ln_1p());
        }
    }
    let upper = 2.0 * log_sum.total().exp();
    let b = prime_bound as f64;
    let tail = 1.5 / (b * b);
    let lower = upper * (-tail).exp();
    Ok(ConstantEnclosure { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CATALAN: f64 = 0.915_965_594_177_219;
    // limit of the kissing product, frozen from runs at bounds 1e6 and 1e7
    const KISSING_C: f64 = 1.649_337_689_1;

    fn bugeye() -> PackingDescriptor {
        PackingDescriptor::bugeye()
    }

    fn coins() -> PackingDescriptor {
        PackingDescriptor::coins()
    }

    #[test]
    fn beta_formula_values() {
        assert_eq!(beta_formula(5).unwrap(), Ratio::new(1, 6));
        assert_eq!(beta_formula(7).unwrap(), Ratio::new(4, 25));
        assert_eq!(beta_formula(3).unwrap(), Ratio::new(2, 5));
        assert!(beta_formula(2).is_err());
        assert!(beta_formula(9).is_err());
    }

    #[test]
    fn beta_two_parities() {
        assert_eq!(
            (1..=4)
                .map(|j| beta_two(&bugeye(), j).unwrap())
                .collect::<Vec<_>>(),
            vec![0, 1, 1, 0]
        );
        assert_eq!(
            (1..=4)
                .map(|j| beta_two(&coins(), j).unwrap())
                .collect::<Vec<_>>(),
            vec![0, 0, 1, 1]
        );
        for packing in [bugeye(), coins()] {
            let ones: u8 = (1..=4).map(|j| beta_two(&packing, j).unwrap()).sum();
            assert_eq!(ones, 2);
        }
    }

    #[test]
    fn beta_brute_examples() {
        for j in 1..=4 {
            assert_eq!(beta_brute(&bugeye(), 5, j).unwrap(), Ratio::new(1, 6));
            assert_eq!(beta_brute(&bugeye(), 3, j).unwrap(), Ratio::new(2, 5));
            assert_eq!(beta_brute(&coins(), 7, j).unwrap(), Ratio::new(4, 25));
        }
    }

    #[test]
    fn g_formula_values() {
        assert_eq!(g_formula(5).unwrap(), Ratio::new(1, 36));
        assert_eq!(g_formula(7).unwrap(), Ratio::new(1, 50));
        assert_eq!(g_formula(3).unwrap(), Ratio::new(1, 10));
        assert!(g_formula(2).is_err());
    }

    #[test]
    fn formulas_match_brute_force() {
        for packing in [bugeye(), coins()] {
            for p in [3u64, 5, 7, 11, 13] {
                let beta = beta_formula(p).unwrap();
                for j in 1..=4 {
                    assert_eq!(
                        beta_brute(&packing, p, j).unwrap(),
                        beta,
                        "beta p={p} j={j} root={}",
                        packing.root()
                    );
                }
                let g = g_formula(p).unwrap();
                for i in 1..=4 {
                    for j in 1..=4 {
                        if i == j {
                            continue;
                        }
                        assert_eq!(
                            g_brute(&packing, p, i, j).unwrap(),
                            g,
                            "g p={p} pair=({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn g_brute_rejects_equal_pair() {
        assert!(g_brute(&bugeye(), 5, 2, 2).is_err());
    }

    #[test]
    fn cone_counts() {
        assert_eq!(cone_count(5, 4).unwrap(), 144);
        assert_eq!(cone_count(7, 4).unwrap(), 300);
        assert_eq!(cone_count(7, 3).unwrap(), 48);
        assert!(cone_count(3, 4).is_err());
        assert!(cone_count(5, 2).is_err());
    }

    fn literal_cone_count(p: u64, arity: u8) -> u64 {
        let p = p as i64;
        let form = |v: [i64; 4]| -> i64 {
            let s: i64 = v.iter().sum();
            (2 * v.iter().map(|x| x * x).sum::<i64>() - s * s).rem_euclid(p)
        };
        let mut count = 0;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    if arity == 3 {
                        if (a, b, c) != (0, 0, 0) && form([a, b, c, 0]) == 0 {
                            count += 1;
                        }
                        continue;
                    }
                    for d in 0..p {
                        if (a, b, c, d) != (0, 0, 0, 0) && form([a, b, c, d]) == 0 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn cone_formula_matches_literal_count() {
        for p in [5u64, 7, 11, 13] {
            assert_eq!(cone_count(p, 4).unwrap(), literal_cone_count(p, 4), "p={p}");
            assert_eq!(cone_count(p, 3).unwrap(), literal_cone_count(p, 3), "p={p}");
        }
    }

    #[test]
    fn orbit_size_equals_cone_count_for_primes_over_three() {
        for p in [5u64, 7, 11, 13] {
            let orbit = orbit_mod(&bugeye(), p as u32).unwrap();
            assert_eq!(orbit.size(), cone_count(p, 4).unwrap());
        }
    }

    #[test]
    fn beta_is_multiplicative_on_squarefree_moduli() {
        // brute count over the orbit mod d versus the product of the
        // per-prime formulas, for d coprime to 6
        for (d, factors) in [(35u32, vec![5u64, 7]), (55, vec![5, 11]), (77, vec![7, 11])] {
            let orbit = orbit_mod(&bugeye(), d).unwrap();
            let expected: Ratio<i64> = factors
                .iter()
                .map(|&p| beta_formula(p).unwrap())
                .product();
            for j in 0..4 {
                let zeros = orbit.states().iter().filter(|s| s[j] == 0).count();
                assert_eq!(
                    Ratio::new(zeros as i64, orbit.size() as i64),
                    expected,
                    "d={d} j={j}"
                );
            }
        }
    }

    #[test]
    fn catalan_value() {
        let x = catalan_l2chi4(1e-6).unwrap();
        assert!((x - CATALAN).abs() <= 1e-6);
        let x = catalan_l2chi4(1e-12).unwrap();
        assert!((x - CATALAN).abs() <= 1e-12, "got {x}");
        assert!(catalan_l2chi4(1e-15).is_err());
        assert!(catalan_l2chi4(f64::NAN).is_err());
    }

    #[test]
    fn alternating_partial_sums_bracket_the_limit() {
        let two_terms = 1.0 - 1.0 / 9.0;
        let three_terms = two_terms + 1.0 / 25.0;
        assert!(two_terms < CATALAN && CATALAN < three_terms);
    }

    #[test]
    fn kissing_constant_enclosure() {
        let c = kissing_constant_c(1_000_000).unwrap();
        assert!(c.lower <= c.upper);
        assert!(c.half_width() < 1e-10);
        assert!((c.value() - KISSING_C).abs() < 1e-6, "got {}", c.value());

        let coarse = kissing_constant_c(1_000).unwrap();
        assert!((coarse.value() - c.value()).abs() < 1e-5);
        // every factor is below one, so the first alone bounds from above
        assert!(c.upper <= 2.0 * (5.0 / 6.0));
        assert!(kissing_constant_c(999).is_err());
    }
}
