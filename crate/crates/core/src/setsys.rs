//! Set systems over a ground set of at most 32 points.
//!
//! A block is an `n`-bit mask: bit `i` set means coordinate `i + 1` is in the
//! subset. The same [`SetSystem`] type serves as an asymmetric covering code,
//! a covering design, or a partial search state.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_N: usize = 32;

/// Largest ground set for which whole-cube checks (2^n entries) are allowed.
pub const MAX_CUBE_N: usize = 24;

pub type Mask = u32;

#[inline]
pub fn weight(mask: Mask) -> u32 {
    mask.count_ones()
}

#[inline]
pub fn full_mask(n: usize) -> Mask {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All `k`-subsets of an `n`-set as masks, in ascending numeric order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Mask> {
    assert!(n <= MAX_N);
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binomial(n as u64, k as u64) as usize);
    let limit: u64 = 1u64 << n;
    let mut x: u64 = (1u64 << k) - 1;
    while x < limit {
        out.push(x as Mask);
        // Gosper's hack
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Applies a coordinate permutation: `perm[i]` is the image of coordinate `i`.
#[inline]
pub fn permute_mask(mask: Mask, perm: &[usize]) -> Mask {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= 1 << perm[i];
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SetSystem {
    n: usize,
    blocks: Vec<Mask>,
}

impl SetSystem {
    /// Builds a system, sorting and removing duplicates.
    pub fn new(n: usize, blocks: impl IntoIterator<Item = Mask>) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::Size(n));
        }
        let full = full_mask(n);
        let mut blocks: Vec<Mask> = blocks.into_iter().collect();
        if let Some(&b) = blocks.iter().find(|&&b| b & !full != 0) {
            return Err(Error::Parameter(format!(
                "block {b:#x} does not fit a ground set of size {n}"
            )));
        }
        blocks.sort_unstable();
        blocks.dedup();
        Ok(SetSystem { n, blocks })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    /// Parses blocks written as bitstrings, coordinate 1 leftmost.
    pub fn from_bitstrings(n: usize, rows: &[&str]) -> Result<Self> {
        let mut blocks = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            blocks.push(parse_bitstring(n, r).map_err(|msg| Error::Parse { line: i + 1, msg })?);
        }
        Self::new(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Mask] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, mask: Mask) -> bool {
        self.blocks.binary_search(&mask).is_ok()
    }

    pub fn without(&self, mask: Mask) -> SetSystem {
        SetSystem {
            n: self.n,
            blocks: self.blocks.iter().copied().filter(|&b| b != mask).collect(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> SetSystem {
        assert_eq!(perm.len(), self.n);
        let mut blocks: Vec<Mask> = self.blocks.iter().map(|&b| permute_mask(b, perm)).collect();
        blocks.sort_unstable();
        SetSystem { n: self.n, blocks }
    }

    /// Blocks of weight `w`.
    pub fn layer(&self, w: u32) -> SetSystem {
        SetSystem {
            n: self.n,
            blocks: self.blocks.iter().copied().filter(|&b| weight(b) == w).collect(),
        }
    }

    pub fn to_bitstrings(&self) -> Vec<String> {
        self.blocks.iter().map(|&b| bitstring(self.n, b)).collect()
    }
}

impl fmt::Display for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", bitstring(self.n, b))?;
        }
        write!(f, "}}")
    }
}

/// Renders a mask as an `n`-character bitstring, coordinate 1 first.
pub fn bitstring(n: usize, mask: Mask) -> String {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(n: usize, s: &str) -> std::result::Result<Mask, String> {
    let s = s.trim();
    if s.len() != n {
        return Err(format!("expected {n} binary digits, found {:?}", s));
    }
    let mut m = 0;
    for (i, c) in s.chars().enumerate() {
        match c {
            '1' => m |= 1 << i,
            '0' => {}
            _ => return Err(format!("invalid binary digit {c:?}")),
        }
    }
    Ok(m)
}

/// `counts[w]` is the number of blocks of weight `w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightCounts {
    pub counts: Vec<usize>,
}

impl WeightCounts {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn weight_counts(d: &SetSystem) -> WeightCounts {
    let mut counts = vec![0; d.n + 1];
    for &b in &d.blocks {
        counts[weight(b) as usize] += 1;
    }
    WeightCounts { counts }
}

/// Calls `f` on every subset of `u` obtained by deleting at most `r` elements.
fn for_each_shrink(u: Mask, r: u32, f: &mut impl FnMut(Mask)) {
    fn rec(cur: Mask, rest: Mask, r: u32, f: &mut impl FnMut(Mask)) {
        f(cur);
        if r == 0 {
            return;
        }
        let mut m = rest;
        while m != 0 {
            let bit = m & m.wrapping_neg();
            m &= m - 1;
            // only delete bits above `bit` afterwards, so each subset is produced once
            rec(cur & !bit, m, r - 1, f);
        }
    }
    rec(u, u, r, f);
}

fn check_cube(n: usize) -> Result<()> {
    if n == 0 || n > MAX_CUBE_N {
        Err(Error::Size(n))
    } else {
        Ok(())
    }
}

/// Every subset `v` of the ground set lies in some block `u` with
/// `|u| - |v| <= r`.
pub fn is_asym_cover(d: &SetSystem, r: u32) -> Result<bool> {
    check_cube(d.n)?;
    if r == 0 {
        return Err(Error::Parameter("covering radius must be at least 1".into()));
    }
    let mut covered = vec![false; 1usize << d.n];
    for &u in &d.blocks {
        for_each_shrink(u, r, &mut |v| covered[v as usize] = true);
    }
    Ok(covered.iter().all(|&c| c))
}

/// Every `t`-subset lies in some block. Blocks of weight other than `k` make
/// the answer `false`.
pub fn is_cover_design(d: &SetSystem, k: usize, t: usize) -> Result<bool> {
    if t >= k || k > d.n {
        return Err(Error::Parameter(format!(
            "need 0 <= t < k <= n, got n={}, k={k}, t={t}",
            d.n
        )));
    }
    if d.blocks.iter().any(|&b| weight(b) as usize != k) {
        return Ok(false);
    }
    let targets = k_subsets(d.n, t);
    let mut covered: HashSet<Mask> = HashSet::with_capacity(targets.len());
    for &b in &d.blocks {
        for_each_t_subset(b, t, &mut |s| {
            covered.insert(s);
        });
    }
    Ok(targets.iter().all(|s| covered.contains(s)))
}

fn for_each_t_subset(b: Mask, t: usize, f: &mut impl FnMut(Mask)) {
    let bits: Vec<u32> = (0..32).filter(|&i| b >> i & 1 == 1).collect();
    let w = bits.len();
    for sel in k_subsets(w, t) {
        let mut s = 0;
        for (j, &bit) in bits.iter().enumerate() {
            if sel >> j & 1 == 1 {
                s |= 1 << bit;
            }
        }
        f(s);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoverMode {
    Asym(u32),
    Design { k: usize, t: usize },
}

impl CoverMode {
    pub fn check(&self, d: &SetSystem) -> Result<bool> {
        match *self {
            CoverMode::Asym(r) => is_asym_cover(d, r),
            CoverMode::Design { k, t } => is_cover_design(d, k, t),
        }
    }
}

/// A covering from which no block can be dropped.
pub fn is_minimal_cover(d: &SetSystem, mode: CoverMode) -> Result<bool> {
    if !mode.check(d)? {
        return Err(Error::NotACover);
    }
    for &b in &d.blocks {
        if mode.check(&d.without(b))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every vector of odd co-weight is covered by a block exactly one weight
/// higher.
pub fn is_banded(d: &SetSystem) -> bool {
    first_unbanded(d).is_none()
}

/// An odd co-weight vector that is not covered one weight up, if any.
pub fn first_unbanded(d: &SetSystem) -> Option<Mask> {
    let n = d.n;
    assert!(n <= MAX_CUBE_N, "ground set too large for a cube scan");
    let mut ok = vec![false; 1usize << n];
    for &u in &d.blocks {
        let mut m = u;
        while m != 0 {
            let bit = m & m.wrapping_neg();
            m &= m - 1;
            ok[(u & !bit) as usize] = true;
        }
    }
    (0..(1u32 << n)).find(|&v| (n as u32 - weight(v)) % 2 == 1 && !ok[v as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq2a() -> SetSystem {
        SetSystem::from_bitstrings(3, &["111", "110", "001"]).unwrap()
    }

    #[test]
    fn bitstring_convention() {
        assert_eq!(parse_bitstring(3, "100").unwrap(), 1);
        assert_eq!(bitstring(4, 0b1000), "0001");
        assert!(parse_bitstring(3, "10").is_err());
    }

    #[test]
    fn k_subsets_counts() {
        assert_eq!(k_subsets(10, 4).len(), 210);
        assert_eq!(k_subsets(5, 0), vec![0]);
        assert_eq!(k_subsets(3, 2), vec![0b011, 0b101, 0b110]);
    }

    #[test]
    fn eq2a_is_asym_cover() {
        assert!(is_asym_cover(&eq2a(), 1).unwrap());
        assert!(is_minimal_cover(&eq2a(), CoverMode::Asym(1)).unwrap());
        assert!(is_banded(&eq2a()));
        assert_eq!(weight_counts(&eq2a()).counts, vec![0, 1, 1, 1]);
    }

    #[test]
    fn full_set_covers_within_n() {
        for n in 1..8 {
            let d = SetSystem::new(n, [full_mask(n)]).unwrap();
            assert!(is_asym_cover(&d, n as u32).unwrap());
        }
    }

    #[test]
    fn design_examples() {
        let d = SetSystem::from_bitstrings(4, &["1100", "0011"]).unwrap();
        assert!(is_cover_design(&d, 2, 1).unwrap());
        let d = SetSystem::from_bitstrings(4, &["1100", "0110"]).unwrap();
        assert!(!is_cover_design(&d, 2, 1).unwrap());
        let all = SetSystem::new(6, k_subsets(6, 3)).unwrap();
        for t in 0..3 {
            assert!(is_cover_design(&all, 3, t).unwrap());
        }
        assert!(!is_minimal_cover(&all, CoverMode::Design { k: 3, t: 2 }).unwrap());
        assert!(is_cover_design(&all, 3, 3).is_err());
        assert!(is_cover_design(&all, 7, 2).is_err());
    }

    #[test]
    fn mixed_weights_are_not_a_design() {
        let d = SetSystem::from_bitstrings(4, &["1100", "0111"]).unwrap();
        assert_eq!(is_cover_design(&d, 2, 1), Ok(false));
    }

    #[test]
    fn minimality_requires_cover() {
        let d = SetSystem::from_bitstrings(3, &["110"]).unwrap();
        assert_eq!(is_minimal_cover(&d, CoverMode::Asym(1)), Err(Error::NotACover));
    }

    #[test]
    fn empty_counts() {
        assert_eq!(weight_counts(&SetSystem::empty(4).unwrap()).counts, vec![0; 5]);
    }

    #[test]
    fn size_errors() {
        assert!(SetSystem::empty(33).is_err());
        assert!(SetSystem::new(3, [0b1000]).is_err());
        let big = SetSystem::new(30, [full_mask(30)]).unwrap();
        assert_eq!(is_asym_cover(&big, 1), Err(Error::Size(30)));
    }

    #[test]
    fn shrink_enumeration_is_exact() {
        let mut seen = Vec::new();
        for_each_shrink(0b1111, 2, &mut |v| seen.push(v));
        seen.sort();
        let mut expect: Vec<Mask> = (0..16u32).filter(|&v| weight(v) >= 2).collect();
        expect.sort();
        assert_eq!(seen, expect);
    }
}
