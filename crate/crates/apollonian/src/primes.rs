//! Primality backends: a bit sieve over odd numbers for dense lookups and a
//! deterministic Miller-Rabin test for sparse or memory-constrained use.

use crate::error::{invalid_argument, Result};

/// Composite flags for odd numbers, one bit each; about `limit / 16` bytes.
pub struct BitSieve {
    limit: u64,
    composite: Vec<u64>,
}

impl BitSieve {
    /// Marks composites among odd numbers up to and including `limit`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit > crate::enumerate::MAX_BOUND {
            return Err(invalid_argument(format!(
                "sieve limit {limit} exceeds the 2^31 cap"
            )));
        }
        // bit k represents the odd number 2k + 1
        let nbits = (limit / 2 + 1) as usize;
        let mut composite = vec![0u64; nbits / 64 + 1];
        let mut p = 3u64;
        while p * p <= limit {
            if composite[(p / 2) as usize / 64] >> ((p / 2) % 64) & 1 == 0 {
                let mut m = p * p;
                while m <= limit {
                    let bit = (m / 2) as usize;
                    composite[bit / 64] |= 1 << (bit % 64);
                    m += 2 * p;
                }
            }
            p += 2;
        }
        Ok(BitSieve { limit, composite })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Sieve memory in bytes for a given limit.
    pub fn memory_bytes(limit: u64) -> u64 {
        (limit / 2 + 1) / 64 * 8 + 8
    }

    pub fn is_prime(&self, n: u64) -> bool {
        debug_assert!(n <= self.limit, "sieve lookup beyond limit");
        if n < 2 {
            return false;
        }
        if n % 2 == 0 {
            return n == 2;
        }
        let bit = (n / 2) as usize;
        self.composite[bit / 64] >> (bit % 64) & 1 == 0
    }

    /// Ascending primes up to the sieve limit.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(2)
            .chain((3..=self.limit).step_by(2))
            .filter(move |&n| self.is_prime(n))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The first twelve primes witness correctly for every 64-bit integer.
const MILLER_RABIN_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MILLER_RABIN_WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let trailing = (n - 1).trailing_zeros();
    let odd = (n - 1) >> trailing;
    'witness: for a in MILLER_RABIN_WITNESSES {
        let mut x = pow_mod(a, odd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..trailing {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Dense sieve when the bound and memory budget allow, Miller-Rabin
/// otherwise.
pub enum PrimalityBackend {
    Sieve(BitSieve),
    MillerRabin,
}

impl PrimalityBackend {
    pub fn choose(bound: u64, memory_budget: u64) -> Result<Self> {
        if bound <= crate::enumerate::MAX_BOUND && BitSieve::memory_bytes(bound) <= memory_budget {
            Ok(PrimalityBackend::Sieve(BitSieve::new(bound)?))
        } else {
            Ok(PrimalityBackend::MillerRabin)
        }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        match self {
            PrimalityBackend::Sieve(s) => s.is_prime(n),
            PrimalityBackend::MillerRabin => is_prime_u64(n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PrimalityBackend::Sieve(_) => "sieve",
            PrimalityBackend::MillerRabin => "miller-rabin",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = BitSieve::new(50).unwrap().primes().collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
        );
    }

    #[test]
    fn backends_agree_below_one_million() {
        let sieve = BitSieve::new(1_000_000).unwrap();
        for n in 0..1_000_000u64 {
            assert_eq!(sieve.is_prime(n), is_prime_u64(n), "disagreement at {n}");
        }
    }

    #[test]
    fn miller_rabin_strong_pseudoprimes() {
        // strong pseudoprimes to small bases must still be rejected
        for n in [2047u64, 3277, 4033, 4681, 8321, 3_215_031_751] {
            assert!(!is_prime_u64(n), "{n} is composite");
        }
        for n in [2u64, 3, 999_983, 4_294_967_291, 18_446_744_073_709_551_557] {
            assert!(is_prime_u64(n), "{n} is prime");
        }
    }

    #[test]
    fn backend_choice_respects_budget() {
        assert!(matches!(
            PrimalityBackend::choose(1_000_000, 1 << 30).unwrap(),
            PrimalityBackend::Sieve(_)
        ));
        assert!(matches!(
            PrimalityBackend::choose(1_000_000, 1024).unwrap(),
            PrimalityBackend::MillerRabin
        ));
    }
}
