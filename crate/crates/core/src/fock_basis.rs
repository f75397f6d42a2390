//! Photon-number configurations: occupation vectors, binary input patterns,
//! and the ordered bases used to lay out amplitude matrices.
//!
//! Every basis is ordered lexicographically *descending* on its entries, so
//! for three modes and two photons the order is
//! `(2,0,0), (1,1,0), (1,0,1), (0,2,0), (0,1,1), (0,0,2)`.
//! Matrix layouts built from these bases are therefore identical across runs.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of modes accepted by interferometer-level APIs.
pub const MAX_MODES: usize = 16;

/// Largest argument for which [`factorial`] is exact in `u64`.
pub const MAX_EXACT_FACTORIAL: usize = 20;

/// Exact factorial. Panics above [`MAX_EXACT_FACTORIAL`].
pub fn factorial(n: usize) -> u64 {
    assert!(n <= MAX_EXACT_FACTORIAL, "factorial({n}) overflows u64");
    (1..=n as u64).product()
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Photon counts per mode.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `prod_j n_j!`, exact.
    pub fn factorial_weight(&self) -> u64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    /// Returns `(n1, n_2, ..., n_N)`: this vector with `n1` prepended as mode 1.
    pub fn with_leading(&self, n1: usize) -> Self {
        let mut counts = Vec::with_capacity(self.0.len() + 1);
        counts.push(n1);
        counts.extend_from_slice(&self.0);
        Self(counts)
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for OccupationVector {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// Which input channels carry a photon.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct InputPattern(Vec<u8>);

impl InputPattern {
    /// Fails if any entry is not 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "input pattern entries must be 0 or 1, found {b}"
            )));
        }
        Ok(Self(bits))
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self(bits.iter().map(|&b| u8::from(b)).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    pub fn is_set(&self, i: usize) -> bool {
        self.0.get(i).is_some_and(|&b| b == 1)
    }

    /// Indices of the occupied channels, ascending.
    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i)
    }

    /// The same pattern with bit `i` set; used to undo [`clear_one`].
    pub fn with_set(&self, i: usize) -> Result<Self> {
        if i >= self.0.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.0.len(),
            });
        }
        let mut bits = self.0.clone();
        bits[i] = 1;
        Ok(Self(bits))
    }

    pub fn as_occupation(&self) -> OccupationVector {
        OccupationVector(self.0.iter().map(|&b| b as usize).collect())
    }
}

impl fmt::Debug for InputPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s")?;
        fmt::Debug::fmt(&self.as_occupation(), f)
    }
}

impl TryFrom<Vec<u8>> for InputPattern {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits)
    }
}

impl From<InputPattern> for Vec<u8> {
    fn from(p: InputPattern) -> Self {
        p.0
    }
}

/// An ordered list of basis vectors with a reverse lookup.
#[derive(Clone, Debug)]
pub struct BasisIndex<T> {
    items: Vec<T>,
    lookup: HashMap<T, usize>,
}

impl<T: Clone + Eq + Hash> BasisIndex<T> {
    fn from_items(items: Vec<T>) -> Self {
        let lookup = items.iter().cloned().enumerate().map(|(k, v)| (v, k)).collect();
        Self { items, lookup }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&T> {
        self.items.get(k)
    }

    pub fn index_of(&self, v: &T) -> Option<usize> {
        self.lookup.get(v).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.items
    }
}

impl<'a, T> IntoIterator for &'a BasisIndex<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

fn fill_descending(
    prefix: &mut Vec<usize>,
    modes_left: usize,
    remaining: usize,
    cap: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if modes_left == 1 {
        if remaining <= cap {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    for first in (0..=remaining.min(cap)).rev() {
        prefix.push(first);
        fill_descending(prefix, modes_left - 1, remaining - first, cap, out);
        prefix.pop();
    }
}

fn descending_vectors(modes: usize, total: usize, cap: usize) -> Vec<Vec<usize>> {
    if modes == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    fill_descending(&mut Vec::with_capacity(modes), modes, total, cap, &mut out);
    out
}

/// All occupation vectors over `modes` modes holding `total` photons,
/// `C(total + modes - 1, modes - 1)` of them.
pub fn enumerate_occupations(modes: usize, total: usize) -> BasisIndex<OccupationVector> {
    BasisIndex::from_items(
        descending_vectors(modes, total, total)
            .into_iter()
            .map(OccupationVector)
            .collect(),
    )
}

/// All binary patterns over `modes` channels with `weight` ones, `C(modes, weight)` of them.
///
/// A weight larger than `modes` yields an empty index; callers check
/// [`BasisIndex::is_empty`].
pub fn enumerate_patterns(modes: usize, weight: usize) -> BasisIndex<InputPattern> {
    if weight > modes {
        return BasisIndex::from_items(Vec::new());
    }
    BasisIndex::from_items(
        descending_vectors(modes, weight, 1)
            .into_iter()
            .map(|v| InputPattern(v.into_iter().map(|b| b as u8).collect()))
            .collect(),
    )
}

/// Returns `s` with the photon in channel `i` removed.
pub fn clear_one(s: &InputPattern, i: usize) -> Result<InputPattern> {
    if i >= s.modes() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: s.modes(),
        });
    }
    if s.0[i] == 0 {
        return Err(Error::BitNotSet { index: i });
    }
    let mut bits = s.0.clone();
    bits[i] = 0;
    Ok(InputPattern(bits))
}
