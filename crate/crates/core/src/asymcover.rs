//! Asymmetric coverings `D(n,1)`: exact search with side constraints, the
//! banded lift/puncture correspondence with unions of covering designs, the
//! composite value `C(n)`, and classification of minimal coverings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};

use crate::covdesign::{cover_number, DesignConfig};
use crate::error::{Error, Result};
use crate::exactlp::{continuous_bound_e, int, Rational};
use crate::isocanon::{canonical_form, MAX_CANON_N};
use crate::lpsolve::{solve_lp, Incidence, LinearProgram, LpStatus, Relation, VarBound};
use crate::search::{enumerate_minimal_covers, CoverSolver, Group, Problem, ProofStatus, Shape, SolveOptions};
use crate::setsys::{binomial, bitstring, first_unbanded, full_mask, is_asym_cover, is_banded, is_cover_design, weight, Mask, SetSystem};

/// Largest `n` the asymmetric search accepts (`2^n` targets).
pub const MAX_ASYM_SEARCH_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideConstraint {
    FixIn(Mask),
    FixOut(Mask),
    /// At most `limit` blocks of weight `w`.
    WeightClassMax { w: u32, limit: u32 },
    /// At least `limit` blocks of weight `w`.
    WeightClassMin { w: u32, limit: u32 },
}

#[derive(Clone, Debug)]
pub struct AsymResult {
    pub n: usize,
    pub value: Option<u64>,
    pub witness: Option<SetSystem>,
    pub status: ProofStatus,
    /// Optimum of the symmetrized LP under the weight-class constraints.
    pub lp_bound: Option<Rational>,
    pub nodes: u64,
}

/// Candidate order: descending weight, then ascending mask.
pub fn asym_candidates(n: usize) -> Vec<Mask> {
    let mut c: Vec<Mask> = (0..=full_mask(n)).collect();
    c.sort_by_key(|&m| (std::cmp::Reverse(weight(m)), m));
    c
}

fn check_constraints(n: usize, cons: &[SideConstraint]) -> Result<()> {
    let top = full_mask(n);
    for c in cons {
        match *c {
            SideConstraint::FixIn(m) | SideConstraint::FixOut(m) if m > top => {
                return Err(Error::Parameter(format!("mask {m:#x} does not fit n = {n}")));
            }
            SideConstraint::WeightClassMax { w, .. } | SideConstraint::WeightClassMin { w, .. } if w as usize > n => {
                return Err(Error::Parameter(format!("weight class {w} exceeds n = {n}")));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Per weight `(min, max)` implied by the constraints.
fn class_limits(cons: &[SideConstraint]) -> BTreeMap<u32, (u32, Option<u32>)> {
    let mut lim: BTreeMap<u32, (u32, Option<u32>)> = BTreeMap::new();
    for c in cons {
        match *c {
            SideConstraint::WeightClassMax { w, limit } => {
                let e = lim.entry(w).or_insert((0, None));
                e.1 = Some(e.1.map_or(limit, |m| m.min(limit)));
            }
            SideConstraint::WeightClassMin { w, limit } => {
                let e = lim.entry(w).or_insert((0, None));
                e.0 = e.0.max(limit);
            }
            _ => {}
        }
    }
    lim
}

pub fn asym_problem(n: usize, cons: &[SideConstraint]) -> Result<Problem> {
    if n == 0 || n > MAX_ASYM_SEARCH_N {
        return Err(Error::Size(n));
    }
    check_constraints(n, cons)?;
    let cands = asym_candidates(n);
    let index = |m: Mask| cands.iter().position(|&c| c == m).unwrap();
    let mut p = Problem::new(
        Shape::Asym { n },
        (0..=full_mask(n)).collect(),
        cands.clone(),
        Incidence::WithinRadius(1),
    );
    for c in cons {
        match *c {
            SideConstraint::FixIn(m) => p.fixed_in.push(index(m)),
            SideConstraint::FixOut(m) => p.fixed_out.push(index(m)),
            _ => {}
        }
    }
    for (w, (min, max)) in class_limits(cons) {
        p.groups.push(Group {
            members: (0..cands.len()).filter(|&i| weight(cands[i]) == w).collect(),
            min,
            max,
        });
    }
    Ok(p)
}

/// The symmetrized LP: variables `A_0..A_n` (mass per weight),
/// `A_j + (j+1) A_{j+1} >= C(n,j)`, `0 <= A_j <= C(n,j)`, plus weight-class limits.
pub fn symmetrized_lp(n: usize, cons: &[SideConstraint]) -> LinearProgram {
    let m = n + 1;
    let mut lp = LinearProgram::new(vec![Rational::one(); m]);
    for j in 0..m {
        let c = int(binomial(n as u64, j as u64) as i64);
        lp.bounds[j] = VarBound {
            lo: Rational::zero(),
            hi: Some(c.clone()),
        };
        let mut row = vec![Rational::zero(); m];
        row[j] = Rational::one();
        if j + 1 < m {
            row[j + 1] = int(j as i64 + 1);
        }
        lp.add(row, Relation::Ge, c);
    }
    for (w, (min, max)) in class_limits(cons) {
        let mut row = vec![Rational::zero(); m];
        row[w as usize] = Rational::one();
        if min > 0 {
            lp.add(row.clone(), Relation::Ge, int(min as i64));
        }
        if let Some(mx) = max {
            lp.add(row, Relation::Le, int(mx as i64));
        }
    }
    lp
}

/// Optimum of [`symmetrized_lp`]; the closed form `E(n)` when there are no
/// weight-class limits, `None` if infeasible.
pub fn symmetrized_lp_bound(n: usize, cons: &[SideConstraint]) -> Result<Option<Rational>> {
    if class_limits(cons).is_empty() {
        return continuous_bound_e(n as i64).map(Some);
    }
    let lp = symmetrized_lp(n, cons);
    let sol = solve_lp(&lp)?;
    Ok((sol.status == LpStatus::Optimal).then_some(sol.objective))
}

/// Minimum asymmetric covering `D(n,1)` under side constraints.
pub fn solve_asym(n: usize, cons: &[SideConstraint], solver: &dyn CoverSolver, opts: &SolveOptions) -> Result<AsymResult> {
    let mut p = asym_problem(n, cons)?;
    let infeasible = |lp_bound| AsymResult {
        n,
        value: None,
        witness: None,
        status: ProofStatus::Infeasible,
        lp_bound,
        nodes: 0,
    };
    let Some(lp) = symmetrized_lp_bound(n, cons)? else {
        return Ok(infeasible(None));
    };
    p.root_bound = lp.ceil().to_integer().try_into().unwrap_or(0);
    let out = match solver.solve(&p, opts) {
        Err(Error::Infeasible(_)) => return Ok(infeasible(Some(lp))),
        r => r?,
    };
    let witness = match &out.solution {
        Some(sol) => {
            let d = SetSystem::new(n, sol.iter().map(|&c| p.candidates[c as usize]))?;
            if !is_asym_cover(&d, 1)? {
                return Err(Error::Internal("search returned a non-cover".into()));
            }
            Some(d)
        }
        None => None,
    };
    Ok(AsymResult {
        n,
        value: witness.as_ref().map(|d| d.len() as u64),
        witness,
        status: out.status,
        lp_bound: Some(lp),
        nodes: out.nodes,
    })
}

/// Layers of a lifted banded covering: layer `i` lives on `n + 1` points
/// and holds blocks of weight `n + 1 - 2i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandedDecomposition {
    pub n: usize,
    pub layers: Vec<SetSystem>,
}

impl BandedDecomposition {
    /// Builds the layers from blocks on `n + 1` points, grouping by weight.
    pub fn from_blocks(n: usize, blocks: &SetSystem) -> Result<Self> {
        if blocks.n() != n + 1 {
            return Err(Error::Parameter("blocks must live on n + 1 points".into()));
        }
        let layers = (0..=n / 2)
            .map(|i| blocks.layer((n + 1 - 2 * i) as u32))
            .collect();
        let d = BandedDecomposition { n, layers };
        if d.layers.iter().map(|l| l.len()).sum::<usize>() != blocks.len() {
            return Err(Error::Parameter("some block has odd co-weight".into()));
        }
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.layers.len() != n / 2 + 1 {
            return Err(Error::Parameter(format!("expected {} layers", n / 2 + 1)));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            let k = n + 1 - 2 * i;
            if layer.n() != n + 1 || layer.blocks().iter().any(|&b| weight(b) as usize != k) {
                return Err(Error::Parameter(format!("layer {i} must hold {k}-subsets of {} points", n + 1)));
            }
            if !is_cover_design(layer, k, k - 1)? {
                return Err(Error::Parameter(format!(
                    "layer {i} is not a C({},{k},{})",
                    n + 1,
                    k - 1
                )));
            }
        }
        Ok(())
    }

    pub fn blocks(&self) -> SetSystem {
        SetSystem::new(
            self.n + 1,
            self.layers.iter().flat_map(|l| l.blocks().iter().copied()),
        )
        .expect("layers share the ground set")
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Deletes `coordinate` (1-based) from a mask on `len` points.
pub fn delete_coordinate(mask: Mask, coordinate: usize) -> Mask {
    let bit = coordinate - 1;
    let low = mask & ((1u32 << bit) - 1);
    let high = (mask >> 1) & !((1u32 << bit) - 1);
    low | high
}

/// Punctures the union of layers at `coordinate` (1-based, `1..=n+1`).
pub fn puncture_to_banded(d: &BandedDecomposition, coordinate: usize) -> Result<SetSystem> {
    d.validate()?;
    if coordinate == 0 || coordinate > d.n + 1 {
        return Err(Error::Parameter(format!("coordinate must be in 1..={}", d.n + 1)));
    }
    SetSystem::new(
        d.n,
        d.blocks().blocks().iter().map(|&b| delete_coordinate(b, coordinate)),
    )
}

/// Appends coordinate `n + 1` so that every co-weight becomes even.
pub fn lift_banded(d: &SetSystem) -> Result<BandedDecomposition> {
    let n = d.n();
    if n + 1 > crate::setsys::MAX_N {
        return Err(Error::Size(n));
    }
    if !is_asym_cover(d, 1)? {
        return Err(Error::NotACover);
    }
    if let Some(v) = first_unbanded(d) {
        return Err(Error::Parameter(format!(
            "not banded: {} has odd co-weight and no cover one weight higher",
            bitstring(n, v)
        )));
    }
    let extra = 1u32 << n;
    let lifted = SetSystem::new(
        n + 1,
        d.blocks().iter().map(|&b| {
            if (n as u32 - weight(b)) % 2 == 0 {
                b | extra
            } else {
                b
            }
        }),
    )?;
    let out = BandedDecomposition::from_blocks(n, &lifted)?;
    out.validate()?;
    Ok(out)
}

/// Provenance of one covering number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed { optimal: bool },
    Known(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Computed { optimal: true } => write!(f, "computed"),
            Provenance::Computed { optimal: false } => write!(f, "computed (unproven)"),
            Provenance::Known(s) => write!(f, "known: {s}"),
        }
    }
}

/// Entry of a known-values table: exact value or a `lo..hi` range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnownEntry {
    pub lo: u64,
    pub hi: u64,
    pub source: String,
}

impl KnownEntry {
    pub fn exact(&self) -> Option<u64> {
        (self.lo == self.hi).then_some(self.lo)
    }
}

/// Covering numbers `C(n,k,k-1)` read from a tab-separated table with
/// columns `n k t value source`; `value` is an integer or `lo..hi`.
#[derive(Clone, Debug, Default)]
pub struct KnownValues {
    map: BTreeMap<(usize, usize), KnownEntry>,
}

const BUNDLED: &str = include_str!("../data/known_covering_numbers.tsv");

impl KnownValues {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled table parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.split('\t').map(str::trim).collect();
            if f.len() < 5 {
                return Err(bad("expected 5 tab-separated fields: n k t value source"));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| bad(&format!("bad number {s:?}")));
            let (n, k, t) = (num(f[0])?, num(f[1])?, num(f[2])?);
            if t + 1 != k || k > n {
                return Err(bad("only C(n,k,k-1) entries with k <= n are allowed"));
            }
            let (lo, hi) = match f[3].split_once("..") {
                Some((a, b)) => (num(a)?, num(b)?),
                None => (num(f[3])?, num(f[3])?),
            };
            if lo > hi {
                return Err(bad("empty range"));
            }
            map.insert(
                (n as usize, k as usize),
                KnownEntry {
                    lo,
                    hi,
                    source: f[4].to_string(),
                },
            );
        }
        Ok(KnownValues { map })
    }

    pub fn get(&self, n: usize, k: usize) -> Option<&KnownEntry> {
        self.map.get(&(n, k))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Where the summands of `C(n)` come from.
pub enum CoverSource<'a> {
    Computed {
        solver: &'a dyn CoverSolver,
        cfg: &'a DesignConfig,
    },
    Known(&'a KnownValues),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub n: usize,
    pub k: usize,
    pub value: Option<u64>,
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug)]
pub struct BandedValue {
    pub n: usize,
    /// The sum, when every summand is known exactly.
    pub value: Option<u64>,
    pub summands: Vec<Summand>,
}

impl BandedValue {
    pub fn missing(&self) -> Vec<(usize, usize)> {
        self.summands
            .iter()
            .filter(|s| s.value.is_none())
            .map(|s| (s.n, s.k))
            .collect()
    }
}

/// `C(n) = sum_{i=0}^{floor(n/2)} C(n+1, n+1-2i, n-2i)`.
pub fn banded_value(n: usize, source: CoverSource<'_>) -> Result<BandedValue> {
    if n == 0 || n + 1 > crate::setsys::MAX_N {
        return Err(Error::Size(n));
    }
    let mut summands = Vec::new();
    for i in 0..=n / 2 {
        let k = n + 1 - 2 * i;
        let (value, provenance) = match &source {
            CoverSource::Computed { solver, cfg } => {
                let r = cover_number(n + 1, k, *solver, cfg)?;
                let opt = r.is_optimal();
                (opt.then_some(r.value), Some(Provenance::Computed { optimal: opt }))
            }
            CoverSource::Known(table) => match (k, table.get(n + 1, k)) {
                (_, Some(e)) => (e.exact(), Some(Provenance::Known(e.source.clone()))),
                (1, None) => (Some(1), Some(Provenance::Known("trivial".into()))),
                _ if k == n + 1 => (Some(1), Some(Provenance::Known("trivial".into()))),
                _ => (None, None),
            },
        };
        summands.push(Summand {
            n: n + 1,
            k,
            value,
            provenance,
        });
    }
    let value = summands.iter().map(|s| s.value).sum::<Option<u64>>();
    Ok(BandedValue { n, value, summands })
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub n: usize,
    pub size: usize,
    /// One representative per class with its banded flag, in canonical order.
    pub classes: Vec<(SetSystem, bool)>,
    /// Isomorphism classes among the lifts of the banded classes; coverings
    /// that differ only in the punctured coordinate share a lift.
    pub lifted_classes: usize,
    pub complete: bool,
}

/// All minimal asymmetric coverings of exactly `size` blocks, up to isomorphism.
pub fn classify_minimal_asym(n: usize, size: usize, opts: &SolveOptions) -> Result<Classification> {
    if n > MAX_CANON_N.min(MAX_ASYM_SEARCH_N) {
        return Err(Error::Capability(format!(
            "classification supports n <= {}",
            MAX_CANON_N.min(MAX_ASYM_SEARCH_N)
        )));
    }
    let p = asym_problem(n, &[])?;
    let out = enumerate_minimal_covers(&p, n, size, opts)?;
    let mut classes = Vec::new();
    let mut lifts = std::collections::BTreeSet::new();
    for (s, list) in &out.classes {
        if *s != size {
            continue;
        }
        for (_, wit) in list {
            let d = SetSystem::new(n, wit.iter().map(|&c| p.candidates[c as usize]))?;
            let b = is_banded(&d);
            if b {
                lifts.insert(canonical_form(&lift_banded(&d)?.blocks())?.canonical_blocks);
            }
            classes.push((d, b));
        }
    }
    Ok(Classification {
        n,
        size,
        classes,
        lifted_classes: lifts.len(),
        complete: out.complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::rat;
    use crate::search::{FewestCoverersSolver, LpGuidedSolver};

    #[test]
    fn small_asym_values() {
        let opts = SolveOptions::default();
        for (n, v) in [(1, 1), (2, 2), (3, 3), (4, 6), (5, 10)] {
            for s in [&FewestCoverersSolver as &dyn CoverSolver, &LpGuidedSolver] {
                let r = solve_asym(n, &[], s, &opts).unwrap();
                assert_eq!(r.value, Some(v), "n={n} {}", s.name());
                assert_eq!(r.status, ProofStatus::Optimal);
                assert!(r.witness.unwrap().contains(full_mask(n)));
            }
        }
    }

    #[test]
    fn side_constraints() {
        let opts = SolveOptions::default();
        // forbidding the weight-2 class at n = 3 forces a bigger cover
        let r = solve_asym(3, &[SideConstraint::WeightClassMax { w: 2, limit: 0 }], &FewestCoverersSolver, &opts).unwrap();
        assert!(r.value.unwrap() > 3);
        let r = solve_asym(
            3,
            &[SideConstraint::FixIn(0b010), SideConstraint::FixOut(0b010)],
            &FewestCoverersSolver,
            &opts,
        )
        .unwrap();
        assert_eq!(r.status, ProofStatus::Infeasible);
        let r = solve_asym(3, &[SideConstraint::FixOut(0b111)], &FewestCoverersSolver, &opts).unwrap();
        assert_eq!(r.status, ProofStatus::Infeasible);
        assert!(solve_asym(3, &[SideConstraint::FixIn(0b1000)], &FewestCoverersSolver, &opts).is_err());
    }

    #[test]
    fn lp_bound_with_limits() {
        assert_eq!(symmetrized_lp_bound(5, &[]).unwrap(), Some(rat(17, 2)));
        let lim = symmetrized_lp_bound(5, &[SideConstraint::WeightClassMax { w: 4, limit: 1 }]).unwrap().unwrap();
        assert!(lim >= rat(17, 2));
    }

    #[test]
    fn lift_and_puncture_eq2a() {
        let d = SetSystem::from_bitstrings(3, &["111", "110", "001"]).unwrap();
        let l = lift_banded(&d).unwrap();
        assert_eq!(l.layers[0], SetSystem::from_bitstrings(4, &["1111"]).unwrap());
        assert_eq!(l.layers[1], SetSystem::from_bitstrings(4, &["1100", "0011"]).unwrap());
        assert_eq!(puncture_to_banded(&l, 4).unwrap(), d);
    }

    #[test]
    fn lift_n1() {
        let d = SetSystem::from_bitstrings(1, &["1"]).unwrap();
        let l = lift_banded(&d).unwrap();
        assert_eq!(l.layers, vec![SetSystem::from_bitstrings(2, &["11"]).unwrap()]);
    }

    #[test]
    fn known_table() {
        let t = KnownValues::bundled();
        assert_eq!(t.get(9, 5).unwrap().exact(), Some(30));
        assert_eq!(t.get(11, 6).unwrap().exact(), None);
        assert!(KnownValues::parse("9\t5\t4\tx\ty").is_err());
        assert!(KnownValues::parse("9\t5\t3\t1\ty").is_err());
    }

    #[test]
    fn classify_tiny() {
        let opts = SolveOptions::default();
        let c = classify_minimal_asym(1, 1, &opts).unwrap();
        assert_eq!(c.classes.len(), 1);
        assert_eq!(c.classes[0].0.blocks(), &[1]);
        let c = classify_minimal_asym(3, 3, &opts).unwrap();
        assert_eq!(c.classes.len(), 1);
        assert!(c.classes[0].1);
    }
}
