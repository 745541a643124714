//! Exact curvature multiplicity counts and their on-disk "ACPH" format.
//!
//! The file layout is fixed and byte-exact: the magic bytes `ACPH`, a 32-bit
//! version (currently 1), the four signed 64-bit root entries, unsigned
//! 64-bit `lo` and `hi`, then `hi - lo` little-endian 32-bit counts.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadruple::Quadruple;

const ACPH_MAGIC: [u8; 4] = *b"ACPH";
const ACPH_VERSION: u32 = 1;

/// Multiplicities of every curvature in `[lo, hi)` for one packing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureHistogram {
    root: Quadruple,
    lo: u64,
    hi: u64,
    counts: Vec<u32>,
}

impl CurvatureHistogram {
    pub(crate) fn from_counts(root: Quadruple, lo: u64, hi: u64, counts: Vec<u32>) -> Self {
        debug_assert_eq!(counts.len() as u64, hi - lo);
        CurvatureHistogram {
            root,
            lo,
            hi,
            counts,
        }
    }

    pub(crate) fn bump(&mut self, curvature: u64) {
        let idx = (curvature - self.lo) as usize;
        self.counts[idx] = self.counts[idx].checked_add(1).expect("count overflow");
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn root(&self) -> Quadruple {
        self.root
    }

    /// The negative curvature of the packing's outer circle.
    pub fn bounding_curvature(&self) -> i64 {
        self.root.entries()[0]
    }

    /// Exact number of circles of this curvature in the packing.
    ///
    /// Panics when the curvature lies outside `[lo, hi)`.
    pub fn count(&self, curvature: u64) -> u32 {
        assert!(
            (self.lo..self.hi).contains(&curvature),
            "curvature {curvature} outside histogram range [{}, {})",
            self.lo,
            self.hi
        );
        self.counts[(curvature - self.lo) as usize]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Total number of circles recorded in the window.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Total count over curvatures congruent to `residue` mod 24.
    pub fn class_total(&self, residue: u8) -> u64 {
        self.class_iter(residue).map(|(_, c)| c as u64).sum()
    }

    /// Iterates `(curvature, count)` over one residue class mod 24.
    pub fn class_iter(&self, residue: u8) -> impl Iterator<Item = (u64, u32)> + '_ {
        let first = match self.lo % 24 {
            r if r <= residue as u64 => self.lo + residue as u64 - r,
            r => self.lo + 24 + residue as u64 - r,
        };
        (first..self.hi)
            .step_by(24)
            .map(move |n| (n, self.counts[(n - self.lo) as usize]))
    }

    /// Elementwise addition; both sides must describe the same packing and
    /// window.
    pub fn merge(&mut self, other: &CurvatureHistogram) -> Result<()> {
        if self.root != other.root || self.lo != other.lo || self.hi != other.hi {
            return Err(Error::InvalidArgument(
                "histogram merge requires identical root and window".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a = a.checked_add(*b).expect("count overflow");
        }
        Ok(())
    }

    pub fn write_acph<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&ACPH_MAGIC)?;
        w.write_all(&ACPH_VERSION.to_le_bytes())?;
        for v in self.root.entries() {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi.to_le_bytes())?;
        let mut buf = Vec::with_capacity(4 * 4096);
        for chunk in self.counts.chunks(4096) {
            buf.clear();
            for c in chunk {
                buf.extend_from_slice(&c.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_acph<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != ACPH_MAGIC {
            return Err(Error::FileFormat("bad magic, not an ACPH file".into()));
        }
        let mut w32 = [0u8; 4];
        r.read_exact(&mut w32)?;
        let version = u32::from_le_bytes(w32);
        if version != ACPH_VERSION {
            return Err(Error::FileFormat(format!(
                "unsupported ACPH version {version}"
            )));
        }
        let mut w64 = [0u8; 8];
        let mut root = [0i64; 4];
        for slot in &mut root {
            r.read_exact(&mut w64)?;
            *slot = i64::from_le_bytes(w64);
        }
        r.read_exact(&mut w64)?;
        let lo = u64::from_le_bytes(w64);
        r.read_exact(&mut w64)?;
        let hi = u64::from_le_bytes(w64);
        if !(0 < lo && lo < hi && hi <= crate::enumerate::MAX_BOUND) {
            return Err(Error::FileFormat(format!("bad window [{lo}, {hi})")));
        }
        let len = (hi - lo) as usize;
        let mut counts = vec![0u32; len];
        let mut buf = vec![0u8; 4 * 4096];
        let mut filled = 0usize;
        while filled < len {
            let take = (len - filled).min(4096);
            r.read_exact(&mut buf[..4 * take])?;
            for i in 0..take {
                counts[filled + i] =
                    u32::from_le_bytes(buf[4 * i..4 * i + 4].try_into().expect("chunk"));
            }
            filled += take;
        }
        Ok(CurvatureHistogram {
            root: Quadruple::from_entries(root),
            lo,
            hi,
            counts,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_acph(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_acph(BufReader::new(File::open(path)?))
    }
}
