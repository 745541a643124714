//! Orbit of the group action modulo d, admissible residues, and the
//! per-residue proportions that govern curvature densities.
//!
//! States are ordered residue quadruples; coordinates are never sorted,
//! since distinct orderings are distinct vertices of the orbit graph.

use std::collections::HashMap;

use num_rational::Ratio;

use crate::error::{invalid_argument, Error, Result};
use crate::quadruple::{gcd, PackingDescriptor};

/// Largest supported modulus.
pub const MAX_ORBIT_MODULUS: u32 = 10_000;

/// Default cap on the number of orbit states held in memory.
pub const DEFAULT_STATE_BUDGET: u64 = 20_000_000;

/// The finite set of residue quadruples reachable from the root mod d,
/// with generator adjacency.
pub struct OrbitModD {
    modulus: u32,
    states: Vec<[u16; 4]>,
    successors: Vec<[u32; 4]>,
}

fn apply_gen_mod(state: [u16; 4], i: usize, d: u32) -> [u16; 4] {
    let d = d as u64;
    let sum: u64 = state.iter().map(|&v| v as u64).sum();
    let others = sum - state[i] as u64;
    // 2 * others - v_i, kept nonnegative before reduction
    let nc = (2 * others + 2 * d - state[i] as u64) % d;
    let mut out = state;
    out[i] = nc as u16;
    out
}

impl OrbitModD {
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn size(&self) -> u64 {
        self.states.len() as u64
    }

    /// States in lexicographic order.
    pub fn states(&self) -> &[[u16; 4]] {
        &self.states
    }

    /// Index of the state reached by applying generator `i` (1-based).
    pub fn successor(&self, state_index: usize, i: usize) -> Result<usize> {
        if !(1..=4).contains(&i) {
            return Err(Error::GeneratorIndex(i));
        }
        Ok(self.successors[state_index][i - 1] as usize)
    }

    pub fn contains(&self, state: [u16; 4]) -> bool {
        self.states.binary_search(&state).is_ok()
    }

    /// For each residue n mod `modulus`, the exact fraction of coordinate
    /// slots over all states that equal n. Nonzero entries only.
    pub fn coordinate_residue_proportions(&self) -> Vec<(u32, Ratio<i64>)> {
        let mut counts = vec![0u64; self.modulus as usize];
        for state in &self.states {
            for &v in state {
                counts[v as usize] += 1;
            }
        }
        let denom = 4 * self.states.len() as i64;
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(n, &c)| (n as u32, Ratio::new(c as i64, denom)))
            .collect()
    }
}

/// Closure of the root quadruple mod `d` under the four generators.
pub fn orbit_mod(packing: &PackingDescriptor, d: u32) -> Result<OrbitModD> {
    orbit_mod_budgeted(packing, d, DEFAULT_STATE_BUDGET)
}

pub fn orbit_mod_budgeted(
    packing: &PackingDescriptor,
    d: u32,
    state_budget: u64,
) -> Result<OrbitModD> {
    if !(2..=MAX_ORBIT_MODULUS).contains(&d) {
        return Err(invalid_argument(format!(
            "orbit modulus must be in 2..={MAX_ORBIT_MODULUS}, got {d}"
        )));
    }
    // the orbit is contained in the cone mod d, whose size is below 2 d^3
    let estimate = 2 * (d as u64).pow(3);
    if estimate > state_budget {
        return Err(Error::Capacity {
            required: estimate,
            budget: state_budget,
            unit: "orbit states",
            hint: "raise the state budget or use a smaller modulus",
        });
    }

    let root = packing.root().entries();
    let start: [u16; 4] = std::array::from_fn(|i| root[i].rem_euclid(d as i64) as u16);

    let mut index: HashMap<[u16; 4], u32> = HashMap::new();
    let mut states: Vec<[u16; 4]> = Vec::new();
    let mut successors: Vec<[u32; 4]> = Vec::new();
    index.insert(start, 0);
    states.push(start);

    let mut cursor = 0usize;
    while cursor < states.len() {
        let state = states[cursor];
        let mut succ = [0u32; 4];
        for (i, slot) in succ.iter_mut().enumerate() {
            let next = apply_gen_mod(state, i, d);
            let next_idx = *index.entry(next).or_insert_with(|| {
                states.push(next);
                (states.len() - 1) as u32
            });
            *slot = next_idx;
        }
        successors.push(succ);
        cursor += 1;
    }

    // lexicographic state order, successors remapped accordingly
    let mut order: Vec<u32> = (0..states.len() as u32).collect();
    order.sort_unstable_by_key(|&i| states[i as usize]);
    let mut rank = vec![0u32; states.len()];
    for (new_idx, &old_idx) in order.iter().enumerate() {
        rank[old_idx as usize] = new_idx as u32;
    }
    let sorted_states: Vec<[u16; 4]> = order.iter().map(|&i| states[i as usize]).collect();
    let sorted_succ: Vec<[u32; 4]> = order
        .iter()
        .map(|&i| successors[i as usize].map(|s| rank[s as usize]))
        .collect();

    Ok(OrbitModD {
        modulus: d,
        states: sorted_states,
        successors: sorted_succ,
    })
}

/// The gamma proportions mod 24 and the admissible residue set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueProfile {
    gamma: [Ratio<i64>; 24],
}

impl ResidueProfile {
    /// Exact proportion of coordinates in the orbit mod 24 congruent to `n`.
    pub fn gamma(&self, n: u8) -> Ratio<i64> {
        self.gamma[n as usize % 24]
    }

    /// Residues n with gamma(n) > 0, ascending.
    pub fn admissible(&self) -> Vec<u8> {
        (0u8..24).filter(|&n| !self.is_zero(n)).collect()
    }

    pub fn is_admissible(&self, value: u64) -> bool {
        !self.is_zero((value % 24) as u8)
    }

    fn is_zero(&self, n: u8) -> bool {
        *self.gamma[n as usize].numer() == 0
    }
}

/// Computes gamma(n) = sum_i #{w : w_i = n} / (4 |O_24|) exactly.
pub fn gamma_profile(packing: &PackingDescriptor) -> Result<ResidueProfile> {
    let orbit = orbit_mod(packing, 24)?;
    let mut gamma = [Ratio::new(0, 1); 24];
    for (n, value) in orbit.coordinate_residue_proportions() {
        gamma[n as usize] = value;
    }
    Ok(ResidueProfile { gamma })
}

/// Residue classes mod 24 attained by curvatures of the packing.
pub fn admissible_residues(packing: &PackingDescriptor) -> Result<Vec<u8>> {
    Ok(gamma_profile(packing)?.admissible())
}

/// Outcome of checking that the orbit mod d1*d2 is the product of the
/// orbits mod d1 and d2.
#[derive(Clone, Debug)]
pub struct ProductStructureReport {
    pub d1: u32,
    pub d2: u32,
    pub product_size: u64,
    pub d1_size: u64,
    pub d2_size: u64,
    pub size_multiplicative: bool,
    /// States of the factor orbit not hit by the projection (first few).
    pub missing_in_d1: Vec<[u16; 4]>,
    pub missing_in_d2: Vec<[u16; 4]>,
}

impl ProductStructureReport {
    pub fn passed(&self) -> bool {
        self.size_multiplicative && self.missing_in_d1.is_empty() && self.missing_in_d2.is_empty()
    }
}

fn orbit_state_set(packing: &PackingDescriptor, d: u32) -> Result<Vec<[u16; 4]>> {
    if d == 1 {
        return Ok(vec![[0, 0, 0, 0]]);
    }
    Ok(orbit_mod(packing, d)?.states().to_vec())
}

/// Checks |O_{d1 d2}| = |O_d1| * |O_d2| and that projection onto each factor
/// is onto, for coprime d1, d2.
pub fn verify_product_structure(
    packing: &PackingDescriptor,
    d1: u32,
    d2: u32,
) -> Result<ProductStructureReport> {
    if d1 == 0 || d2 == 0 {
        return Err(invalid_argument("moduli must be positive".to_string()));
    }
    if gcd(d1 as i64, d2 as i64) != 1 {
        return Err(invalid_argument(format!("{d1} and {d2} are not coprime")));
    }
    let product = d1
        .checked_mul(d2)
        .filter(|&p| p <= MAX_ORBIT_MODULUS)
        .ok_or_else(|| {
            invalid_argument(format!("product {d1}*{d2} exceeds {MAX_ORBIT_MODULUS}"))
        })?;
    if product == 1 {
        return Err(invalid_argument("product modulus must exceed 1".to_string()));
    }

    let product_states = orbit_state_set(packing, product)?;
    let d1_states = orbit_state_set(packing, d1)?;
    let d2_states = orbit_state_set(packing, d2)?;

    let project = |states: &[[u16; 4]], m: u32| -> Vec<[u16; 4]> {
        let mut set: Vec<[u16; 4]> = states
            .iter()
            .map(|s| s.map(|v| (v as u32 % m) as u16))
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    };
    let image_d1 = project(&product_states, d1);
    let image_d2 = project(&product_states, d2);
    let missing = |factor: &[[u16; 4]], image: &[[u16; 4]]| -> Vec<[u16; 4]> {
        factor
            .iter()
            .filter(|s| image.binary_search(s).is_err())
            .take(8)
            .copied()
            .collect()
    };

    Ok(ProductStructureReport {
        d1,
        d2,
        product_size: product_states.len() as u64,
        d1_size: d1_states.len() as u64,
        d2_size: d2_states.len() as u64,
        size_multiplicative: product_states.len() == d1_states.len() * d2_states.len(),
        missing_in_d1: missing(&d1_states, &image_d1),
        missing_in_d2: missing(&d2_states, &image_d2),
    })
}
