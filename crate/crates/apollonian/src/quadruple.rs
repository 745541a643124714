//! Exact integer algebra of Descartes quadruples and the group action on them.
//!
//! A quadruple holds the curvatures (reciprocal radii) of four mutually
//! tangent circles. The four involutions `S1..S4` each replace one
//! coordinate by the second root of the Descartes equation in that
//! coordinate; together they generate the group whose orbit is the packing.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid_argument, Error, Result};

/// An ordered quadruple of integer curvatures.
///
/// Coordinate identity matters: traversal and orbit computations never sort
/// entries. Sorting happens only when normalizing to a root quadruple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quadruple {
    entries: [i64; 4],
}

impl Quadruple {
    pub const fn new(v1: i64, v2: i64, v3: i64, v4: i64) -> Self {
        Quadruple {
            entries: [v1, v2, v3, v4],
        }
    }

    pub const fn from_entries(entries: [i64; 4]) -> Self {
        Quadruple { entries }
    }

    pub const fn entries(&self) -> [i64; 4] {
        self.entries
    }

    /// Greatest common divisor of the absolute values of the entries.
    pub fn content(&self) -> i64 {
        self.entries.iter().fold(0, |g, &v| gcd(g, v.abs()))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Exactly two even and two odd entries.
    pub fn has_packing_parity(&self) -> bool {
        self.entries.iter().filter(|v| *v % 2 == 0).count() == 2
    }

    /// Replaces coordinate `i` (1-based) by `2*(sum of the others) - v_i`.
    ///
    /// Each generator is an involution, so applying it twice returns the
    /// original quadruple.
    pub fn apply_generator(&self, i: usize) -> Result<Quadruple> {
        if !(1..=4).contains(&i) {
            return Err(Error::GeneratorIndex(i));
        }
        let idx = i - 1;
        let v = self.entries;
        let sum_others = checked_sum_others(&v, idx)?;
        let replaced = sum_others
            .checked_mul(2)
            .and_then(|s| s.checked_sub(v[idx] as i128))
            .ok_or(Error::ArithmeticOverflow)?;
        let replaced = i64::try_from(replaced).map_err(|_| Error::ArithmeticOverflow)?;
        let mut out = v;
        out[idx] = replaced;
        Ok(Quadruple { entries: out })
    }
}

fn checked_sum_others(v: &[i64; 4], idx: usize) -> Result<i128> {
    let mut sum: i128 = 0;
    for (j, &e) in v.iter().enumerate() {
        if j != idx {
            sum = sum.checked_add(e as i128).ok_or(Error::ArithmeticOverflow)?;
        }
    }
    Ok(sum)
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Evaluates `F(v) = 2*(v1^2 + v2^2 + v3^2 + v4^2) - (v1 + v2 + v3 + v4)^2`.
///
/// Zero exactly when the entries are curvatures of four mutually tangent
/// circles. Overflow is reported, never wrapped.
pub fn descartes_form(q: &Quadruple) -> Result<i64> {
    let f = descartes_form_i128(q)?;
    i64::try_from(f).map_err(|_| Error::ArithmeticOverflow)
}

pub(crate) fn descartes_form_i128(q: &Quadruple) -> Result<i128> {
    let mut sum_sq: i128 = 0;
    let mut sum: i128 = 0;
    for &v in &q.entries {
        let v = v as i128;
        sum_sq = v
            .checked_mul(v)
            .and_then(|sq| sum_sq.checked_add(sq))
            .ok_or(Error::ArithmeticOverflow)?;
        sum = sum.checked_add(v).ok_or(Error::ArithmeticOverflow)?;
    }
    sum_sq
        .checked_mul(2)
        .and_then(|d| sum.checked_mul(sum).map(|s| (d, s)))
        .and_then(|(d, s)| d.checked_sub(s))
        .ok_or(Error::ArithmeticOverflow)
}

/// True when `F(q) = 0` and no intermediate overflows.
pub fn is_descartes(q: &Quadruple) -> bool {
    matches!(descartes_form_i128(q), Ok(0))
}

/// Walks a quadruple down to the root of its packing.
///
/// Repeatedly applies the generator that strictly decreases the maximal
/// coordinate; every such step strictly decreases the entry sum, so the walk
/// terminates. The result is sorted with the negative (bounding) curvature
/// first and the rest ascending.
pub fn reduce_to_root(q: &Quadruple) -> Result<Quadruple> {
    let form = descartes_form(q)?;
    if form != 0 {
        return Err(Error::NotDescartes {
            quadruple: *q,
            form,
        });
    }
    let mut cur = q.entries;
    loop {
        let (idx, _) = cur
            .iter()
            .enumerate()
            .max_by_key(|(_, v)| **v)
            .expect("nonempty");
        let sum_others = checked_sum_others(&cur, idx)?;
        let candidate = sum_others
            .checked_mul(2)
            .and_then(|s| s.checked_sub(cur[idx] as i128))
            .ok_or(Error::ArithmeticOverflow)?;
        let candidate = i64::try_from(candidate).map_err(|_| Error::ArithmeticOverflow)?;
        if candidate >= cur[idx] {
            break;
        }
        cur[idx] = candidate;
    }
    let mut sorted = cur;
    sorted.sort_unstable();
    let root = Quadruple { entries: sorted };
    if sorted.contains(&0) || sorted[0] >= 0 {
        return Err(Error::UnboundedPacking { quadruple: root });
    }
    Ok(root)
}

/// A validated bounded packing, identified by its reduced root quadruple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingDescriptor {
    root: Quadruple,
    name: Option<String>,
}

impl PackingDescriptor {
    /// Checks the Descartes equation, primitivity, parity, boundedness and
    /// the root condition, and returns the descriptor on success.
    pub fn new(root: Quadruple, name: Option<String>) -> Result<Self> {
        let form = descartes_form(&root)?;
        if form != 0 {
            return Err(Error::NotDescartes {
                quadruple: root,
                form,
            });
        }
        let content = root.content();
        if content != 1 {
            return Err(Error::Imprimitive {
                quadruple: root,
                gcd: content,
            });
        }
        if !root.has_packing_parity() {
            return Err(Error::WrongParity { quadruple: root });
        }
        let [v1, v2, v3, v4] = root.entries();
        if root.entries().contains(&0) || v1 >= 0 {
            return Err(Error::UnboundedPacking { quadruple: root });
        }
        if v2 < 0 || v3 < 0 || v4 < 0 {
            return Err(Error::UnboundedPacking { quadruple: root });
        }
        if !(v2 <= v3 && v3 <= v4) {
            return Err(Error::NotRoot {
                quadruple: root,
                reason: "positive entries must be ascending",
            });
        }
        if v1 + v2 + v3 < v4 {
            return Err(Error::NotRoot {
                quadruple: root,
                reason: "a generator decreases the maximal entry",
            });
        }
        Ok(PackingDescriptor { root, name })
    }

    /// The Bugeye packing, rooted at (-1, 2, 2, 3).
    pub fn bugeye() -> Self {
        PackingDescriptor::new(Quadruple::new(-1, 2, 2, 3), Some("bugeye".into()))
            .expect("preset root is valid")
    }

    /// The Coins packing, rooted at (-11, 21, 24, 28).
    pub fn coins() -> Self {
        PackingDescriptor::new(Quadruple::new(-11, 21, 24, 28), Some("coins".into()))
            .expect("preset root is valid")
    }

    /// Parses a preset name ("bugeye", "coins") or a comma-separated
    /// quadruple. A non-root quadruple is reduced to its root first.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.trim().to_ascii_lowercase().as_str() {
            "bugeye" => return Ok(PackingDescriptor::bugeye()),
            "coins" => return Ok(PackingDescriptor::coins()),
            _ => {}
        }
        let q: Quadruple = spec.parse()?;
        let root = reduce_to_root(&q)?;
        PackingDescriptor::new(root, None)
    }

    pub fn root(&self) -> Quadruple {
        self.root
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The negative curvature of the outer circle.
    pub fn bounding_curvature(&self) -> i64 {
        self.root.entries()[0]
    }

    /// Largest root entry; traversal below this value yields no new circles.
    pub fn max_root_entry(&self) -> i64 {
        self.root.entries()[3]
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "{a},{b},{c},{d}")
    }
}

impl fmt::Debug for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quadruple({self})")
    }
}

impl FromStr for Quadruple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(invalid_argument(format!(
                "expected four comma-separated curvatures, got {:?}",
                s
            )));
        }
        let mut entries = [0i64; 4];
        for (slot, part) in entries.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|e| invalid_argument(format!("bad curvature {part:?}: {e}")))?;
        }
        Ok(Quadruple { entries })
    }
}
