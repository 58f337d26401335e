//! Integer encoding of subsets of `{1, …, p}`.
//!
//! A subset `u` is identified with `h(u) = Σ_{i∈u} 2^{i-1}`: bit `i-1` is set
//! exactly when input `i` belongs to `u`. Elements are 1-based labels.

use std::fmt;

use crate::{Error, Result, LATTICE_CAP};

/// Largest dimension representable by a `SubsetId` (bits of a `u64`).
pub const MAX_DIM: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetId {
    value: u64,
    p: usize,
}

impl SubsetId {
    pub fn new(value: u64, p: usize) -> Result<Self> {
        if p > MAX_DIM {
            return Err(Error::Subset(format!("dimension {p} exceeds {MAX_DIM}")));
        }
        if value >> p != 0 {
            return Err(Error::Subset(format!(
                "id {value} out of range for p = {p} (must be < 2^{p})"
            )));
        }
        Ok(Self { value, p })
    }

    pub fn empty(p: usize) -> Self {
        Self { value: 0, p }
    }

    pub fn full(p: usize) -> Self {
        Self {
            value: full_mask(p),
            p,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn index(self) -> usize {
        self.value as usize
    }

    pub fn dim(self) -> usize {
        self.p
    }

    /// `h(u)` for a set of 1-based labels. Duplicates are rejected.
    pub fn encode(u: &[usize], p: usize) -> Result<Self> {
        let mut value = 0u64;
        for &i in u {
            if i == 0 || i > p {
                return Err(Error::Subset(format!("element {i} outside 1..={p}")));
            }
            let bit = 1u64 << (i - 1);
            if value & bit != 0 {
                return Err(Error::Subset(format!("duplicate element {i}")));
            }
            value |= bit;
        }
        Self::new(value, p)
    }

    /// Sorted 1-based labels of the subset.
    pub fn decode(self) -> Vec<usize> {
        elements(self.value)
    }

    /// Membership of the 1-based label `i`. Equivalent to
    /// `floor(h(u) / 2^{i-1})` being odd.
    pub fn contains(self, i: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.p);
        (self.value >> (i - 1)) & 1 == 1
    }

    /// `h(u ∪ {i}) = h(u) + 2^{i-1}`, defined only when `i ∉ u`.
    pub fn with_element(self, i: usize) -> Result<Self> {
        if i == 0 || i > self.p {
            return Err(Error::Subset(format!("element {i} outside 1..={}", self.p)));
        }
        if self.contains(i) {
            return Err(Error::Subset(format!("element {i} already in subset")));
        }
        Ok(Self {
            value: self.value + (1u64 << (i - 1)),
            p: self.p,
        })
    }

    pub fn cardinality(self) -> usize {
        self.value.count_ones() as usize
    }

    pub fn is_subset_of(self, other: SubsetId) -> bool {
        self.value & !other.value == 0
    }

    /// All supersets of this subset within `{1, …, p}`, each exactly once.
    /// Iteration order is unspecified.
    pub fn supersets(self) -> Supersets {
        Supersets::new(self.value, full_mask(self.p))
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let elems: Vec<String> = self.decode().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", elems.join(","))
    }
}

pub fn full_mask(p: usize) -> u64 {
    if p >= 64 {
        u64::MAX
    } else {
        (1u64 << p) - 1
    }
}

/// 1-based labels of the bits set in `mask`.
pub fn elements(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let tz = m.trailing_zeros() as usize;
        out.push(tz + 1);
        m &= m - 1;
    }
    out
}

/// Fails when a `2^p` lattice would exceed [`LATTICE_CAP`].
pub fn check_lattice_dim(p: usize) -> Result<()> {
    if p > LATTICE_CAP {
        Err(Error::CapExceeded {
            p,
            cap: LATTICE_CAP,
        })
    } else {
        Ok(())
    }
}

/// Enumerates `base | s` for every `s ⊆ universe \ base`, via the
/// `s = (s - 1) & comp` walk over submasks of the complement.
#[derive(Debug, Clone)]
pub struct Supersets {
    base: u64,
    comp: u64,
    next: Option<u64>,
}

impl Supersets {
    fn new(base: u64, universe: u64) -> Self {
        let comp = universe & !base;
        Self {
            base,
            comp,
            next: Some(comp),
        }
    }
}

impl Iterator for Supersets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let s = self.next?;
        self.next = if s == 0 {
            None
        } else {
            Some((s - 1) & self.comp)
        };
        Some(self.base | s)
    }
}
