//! Lower bounds for covering a target set `T` with candidates `U`.
//!
//! Any `w: T -> Q>=0` whose column sums over every candidate are at most one
//! gives `|C| >= ceil(sum w)` for every covering `C ⊆ U`. The greedy bound is
//! the special case `w(x) = 1 / max_{y ⊃ x} |{x' in T : x' ⊂ y}|`; the LP dual
//! gives the best such `w`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::simplex::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::error::{Error, Result};
use crate::exactlp::Rational;
use crate::setsys::{weight, Mask};

/// How a target relates to a candidate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Incidence {
    /// `x ⊆ y` as sets.
    Subset,
    /// `x ⊆ y` and `|y| - |x| <= r` (asymmetric covering at radius `r`).
    WithinRadius(u32),
}

impl Incidence {
    #[inline]
    pub fn covers(self, y: Mask, x: Mask) -> bool {
        if x & !y != 0 {
            return false;
        }
        match self {
            Incidence::Subset => true,
            Incidence::WithinRadius(r) => weight(y) - weight(x) <= r,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoverInstance {
    pub targets: Vec<Mask>,
    pub candidates: Vec<Mask>,
    pub incidence: Incidence,
}

impl CoverInstance {
    pub fn new(targets: Vec<Mask>, candidates: Vec<Mask>, incidence: Incidence) -> Self {
        CoverInstance {
            targets,
            candidates,
            incidence,
        }
    }

    /// All `(k-1)`-subsets against all `k`-subsets of an `n`-set.
    pub fn full_design(n: usize, k: usize) -> Self {
        use crate::setsys::k_subsets;
        assert!(k >= 1);
        CoverInstance::new(k_subsets(n, k - 1), k_subsets(n, k), Incidence::Subset)
    }

    /// Every vector of `F_2^n` against every vector, radius one.
    pub fn full_asym(n: usize) -> Self {
        let all: Vec<Mask> = (0..1u32 << n).collect();
        CoverInstance::new(all.clone(), all, Incidence::WithinRadius(1))
    }

    /// `covered_by[i]` lists candidate indices covering target `i`.
    pub fn covered_by(&self) -> Vec<Vec<usize>> {
        self.targets
            .iter()
            .map(|&x| {
                (0..self.candidates.len())
                    .filter(|&j| self.incidence.covers(self.candidates[j], x))
                    .collect()
            })
            .collect()
    }

    /// `covers[j]` lists target indices covered by candidate `j`.
    pub fn covers(&self) -> Vec<Vec<usize>> {
        self.candidates
            .iter()
            .map(|&y| {
                (0..self.targets.len())
                    .filter(|&i| self.incidence.covers(y, self.targets[i]))
                    .collect()
            })
            .collect()
    }

    pub fn is_feasible(&self) -> bool {
        self.covered_by().iter().all(|c| !c.is_empty())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoverBound {
    Finite(u64),
    /// Some target has no covering candidate.
    Infeasible,
}

impl CoverBound {
    pub fn finite(self) -> Option<u64> {
        match self {
            CoverBound::Finite(v) => Some(v),
            CoverBound::Infeasible => None,
        }
    }
}

fn ceil_u64(r: &Rational) -> u64 {
    r.ceil().to_integer().to_u64().expect("bound fits in u64")
}

/// The weights the greedy bound implicitly uses; `None` if infeasible.
pub fn greedy_weights(inst: &CoverInstance) -> Option<BTreeMap<Mask, Rational>> {
    let covers = inst.covers();
    let by = inst.covered_by();
    let mut w = BTreeMap::new();
    for (i, &x) in inst.targets.iter().enumerate() {
        let best = by[i].iter().map(|&j| covers[j].len()).max()?;
        w.insert(x, Rational::new(BigInt::one(), BigInt::from(best)));
    }
    Some(w)
}

pub fn greedy_bound(inst: &CoverInstance) -> CoverBound {
    match greedy_weights(inst) {
        None => CoverBound::Infeasible,
        Some(w) => CoverBound::Finite(ceil_u64(&w.values().sum())),
    }
}

/// `ceil(sum w)` after checking `w >= 0` and every candidate's column sum `<= 1`.
pub fn lemma_bound(inst: &CoverInstance, w: &BTreeMap<Mask, Rational>) -> Result<u64> {
    for (&x, v) in w {
        if v.is_negative() {
            return Err(Error::InvalidWeights {
                candidate: x,
                sum: v.to_string(),
            });
        }
    }
    let one = Rational::one();
    for &y in &inst.candidates {
        let sum: Rational = inst
            .targets
            .iter()
            .filter(|&&x| inst.incidence.covers(y, x))
            .filter_map(|x| w.get(x))
            .sum();
        if sum > one {
            return Err(Error::InvalidWeights {
                candidate: y,
                sum: sum.to_string(),
            });
        }
    }
    let total: Rational = inst.targets.iter().filter_map(|x| w.get(x)).sum();
    Ok(ceil_u64(&total))
}

/// Covering LP `min sum x_y` s.t. every target covered at least once, `x >= 0`.
///
/// Upper bounds `x <= 1` are implied: lowering any `x_y > 1` to one keeps
/// every row satisfied, so the optimum is unchanged and no bound multipliers
/// leak into the target duals.
pub fn relaxation(inst: &CoverInstance) -> LinearProgram {
    let m = inst.candidates.len();
    let mut p = LinearProgram::new(vec![Rational::one(); m]);
    for cands in inst.covered_by() {
        let mut row = vec![Rational::zero(); m];
        for j in cands {
            row[j] = Rational::one();
        }
        p.add(row, Relation::Ge, Rational::one());
    }
    p
}

/// Exact LP duals, rescaled by `max(1, max column sum)` so they always
/// satisfy the packing condition.
pub fn safe_dual_weights(inst: &CoverInstance) -> Result<BTreeMap<Mask, Rational>> {
    if inst.targets.is_empty() {
        return Ok(BTreeMap::new());
    }
    if !inst.is_feasible() {
        return Err(Error::Infeasible("a target has no covering candidate".into()));
    }
    if inst.candidates.is_empty() {
        return Err(Error::Infeasible("no candidates".into()));
    }
    let sol = solve_lp(&relaxation(inst))?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Infeasible(format!("relaxation is {:?}", sol.status)));
    }
    let y: Vec<Rational> = sol
        .dual
        .iter()
        .map(|v| if v.is_negative() { Rational::zero() } else { v.clone() })
        .collect();
    let mut max_sigma = Rational::one();
    for col in inst.covers() {
        let s: Rational = col.iter().map(|&i| &y[i]).sum();
        if s > max_sigma {
            max_sigma = s;
        }
    }
    Ok(inst
        .targets
        .iter()
        .zip(y)
        .map(|(&x, v)| (x, v / &max_sigma))
        .collect())
}
