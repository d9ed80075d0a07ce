//! Branch-and-bound over generic covering instances.
//!
//! A [`Problem`] is a target list, a candidate list and an incidence relation,
//! plus optional side constraints. Solvers implement [`CoverSolver`] and are
//! looked up by name in the [`crate::registry`].
//!
//! Parallelism: a frontier of subtrees is generated sequentially, then solved
//! by a worker pool. The incumbent is a single atomic word holding the best
//! size and the index of the subtree that found it; ties go to the lower
//! index, which makes the reported witness independent of the worker count.

mod census;
mod ctx;
mod procedures;

use std::time::Duration;

use crate::error::{Error, Result};
use crate::lpsolve::Incidence;
use crate::setsys::Mask;

use ctx::Ctx;
use procedures::{FewestCoverers, LpGuided};

/// Cardinality limits on a set of candidates. Groups must be disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub members: Vec<usize>,
    pub min: u32,
    pub max: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Design { n: usize, k: usize },
    Asym { n: usize },
    Generic,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub shape: Shape,
    pub targets: Vec<Mask>,
    pub candidates: Vec<Mask>,
    pub incidence: Incidence,
    pub fixed_in: Vec<usize>,
    pub fixed_out: Vec<usize>,
    pub groups: Vec<Group>,
    /// A lower bound on the optimum known in advance.
    pub root_bound: u64,
}

/// Largest target or candidate count the bitset engine accepts.
pub const MAX_ITEMS: usize = 1024;

impl Problem {
    pub fn new(shape: Shape, targets: Vec<Mask>, candidates: Vec<Mask>, incidence: Incidence) -> Self {
        Problem {
            shape,
            targets,
            candidates,
            incidence,
            fixed_in: Vec::new(),
            fixed_out: Vec::new(),
            groups: Vec::new(),
            root_bound: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let width = self.targets.len().max(self.candidates.len());
        if width > MAX_ITEMS {
            return Err(Error::Capability(format!(
                "search supports at most {MAX_ITEMS} targets and candidates, got {width}"
            )));
        }
        let nc = self.candidates.len();
        let mut seen = vec![false; nc];
        for g in &self.groups {
            for &m in &g.members {
                if m >= nc || std::mem::replace(&mut seen[m], true) {
                    return Err(Error::Parameter(format!("group member {m} invalid or shared")));
                }
            }
            if g.max.is_some_and(|mx| mx < g.min) {
                return Err(Error::Infeasible(format!(
                    "group minimum {} exceeds maximum {}",
                    g.min,
                    g.max.unwrap()
                )));
            }
        }
        if let Some(&c) = self.fixed_in.iter().chain(&self.fixed_out).find(|&&c| c >= nc) {
            return Err(Error::Parameter(format!("candidate index {c} out of range")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget {
            max_nodes: Some(n),
            max_time: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub budget: Budget,
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofStatus {
    Optimal,
    /// Budget ran out: the optimum lies in `lo..=hi` (`hi` unknown if no cover was found).
    Bounds { lo: u64, hi: Option<u64> },
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Sorted candidate indices of the best cover found.
    pub solution: Option<Vec<u32>>,
    pub status: ProofStatus,
    pub nodes: u64,
}

impl SearchOutcome {
    fn infeasible(nodes: u64) -> Self {
        SearchOutcome {
            solution: None,
            status: ProofStatus::Infeasible,
            nodes,
        }
    }

    pub fn value(&self) -> Option<u64> {
        self.solution.as_ref().map(|s| s.len() as u64)
    }
}

#[derive(Clone, Debug, Default)]
pub struct CensusOutcome {
    /// Per size: `(canonical blocks, witness candidate indices)`, sorted by canonical form.
    pub classes: Vec<(usize, Vec<(Vec<Mask>, Vec<u32>)>)>,
    pub complete: bool,
    pub nodes: u64,
}

impl CensusOutcome {
    fn default_complete() -> Self {
        CensusOutcome {
            complete: true,
            ..Default::default()
        }
    }
}

pub(crate) fn pool(opts: &SolveOptions) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if opts.threads > 0 {
        b = b.num_threads(opts.threads);
    }
    b.build().expect("thread pool")
}

macro_rules! with_width {
    ($len:expr, $body:ident) => {{
        let len = $len;
        if len <= 64 {
            $body!(1)
        } else if len <= 128 {
            $body!(2)
        } else if len <= 256 {
            $body!(4)
        } else if len <= 512 {
            $body!(8)
        } else {
            $body!(16)
        }
    }};
}

/// Solves `p` with the named branching rule.
fn run_procedure(p: &Problem, opts: &SolveOptions, lp: bool) -> Result<SearchOutcome> {
    p.validate()?;
    macro_rules! go {
        ($w:literal) => {{
            let ctx = Ctx::<$w>::new(p);
            if lp {
                procedures::run::<$w, LpGuided>(&ctx, opts)
            } else {
                procedures::run::<$w, FewestCoverers>(&ctx, opts)
            }
        }};
    }
    Ok(with_width!(p.targets.len().max(p.candidates.len()), go))
}

/// All minimal covers of size at most `max_size`, one per isomorphism class
/// of the ground set `{0..n}`.
pub fn enumerate_minimal_covers(
    p: &Problem,
    n: usize,
    max_size: usize,
    opts: &SolveOptions,
) -> Result<CensusOutcome> {
    p.validate()?;
    if n > crate::isocanon::MAX_CANON_N {
        return Err(Error::Capability(format!(
            "census needs canonical labeling, which supports n <= {}",
            crate::isocanon::MAX_CANON_N
        )));
    }
    if !p.groups.is_empty() {
        return Err(Error::Capability("census does not take group constraints".into()));
    }
    macro_rules! go {
        ($w:literal) => {{
            let ctx = Ctx::<$w>::new(p);
            census::enumerate::<$w>(&ctx, n, max_size, opts)
        }};
    }
    Ok(with_width!(p.targets.len().max(p.candidates.len()), go))
}

/// Greedy heuristic cover: most new targets first, ties to the lowest index.
pub fn greedy_cover(p: &Problem) -> Result<Option<Vec<u32>>> {
    p.validate()?;
    macro_rules! go {
        ($w:literal) => {{
            ctx::greedy_cover(&Ctx::<$w>::new(p))
        }};
    }
    Ok(with_width!(p.targets.len().max(p.candidates.len()), go))
}

/// A branch-and-bound procedure selectable by name.
pub trait CoverSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn solve(&self, p: &Problem, opts: &SolveOptions) -> Result<SearchOutcome>;
}

/// Branches on the uncovered target with fewest coverers; greedy bound.
pub struct FewestCoverersSolver;

impl CoverSolver for FewestCoverersSolver {
    fn name(&self) -> &'static str {
        "greedy"
    }
    fn summary(&self) -> &'static str {
        "branch on the target with fewest coverers, prune with the greedy bound"
    }
    fn solve(&self, p: &Problem, opts: &SolveOptions) -> Result<SearchOutcome> {
        run_procedure(p, opts, false)
    }
}

/// Branches in/out on the candidate with LP value nearest 1/2; dual-weight bound.
pub struct LpGuidedSolver;

impl CoverSolver for LpGuidedSolver {
    fn name(&self) -> &'static str {
        "lp_guided"
    }
    fn summary(&self) -> &'static str {
        "branch on the LP variable nearest 1/2, prune with discretized dual weights"
    }
    fn solve(&self, p: &Problem, opts: &SolveOptions) -> Result<SearchOutcome> {
        run_procedure(p, opts, true)
    }
}

/// Picks a procedure from the instance shape.
pub struct AutoSolver;

impl AutoSolver {
    pub fn prefers_lp(shape: &Shape) -> bool {
        match *shape {
            Shape::Design { n, k } => n >= 9 && k >= 4 && k + 4 <= n,
            Shape::Asym { .. } => false,
            Shape::Generic => false,
        }
    }
}

impl CoverSolver for AutoSolver {
    fn name(&self) -> &'static str {
        "auto"
    }
    fn summary(&self) -> &'static str {
        "lp_guided for designs with n >= 9 and 4 <= k <= n-4, greedy otherwise"
    }
    fn solve(&self, p: &Problem, opts: &SolveOptions) -> Result<SearchOutcome> {
        run_procedure(p, opts, Self::prefers_lp(&p.shape))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsys::k_subsets;

    fn design(n: usize, k: usize) -> Problem {
        Problem::new(
            Shape::Design { n, k },
            k_subsets(n, k - 1),
            k_subsets(n, k),
            Incidence::Subset,
        )
    }

    #[test]
    fn small_designs_both_procedures() {
        for (n, k, v) in [(4, 2, 2), (5, 3, 4), (6, 3, 6), (6, 4, 6), (5, 2, 3)] {
            for s in [&FewestCoverersSolver as &dyn CoverSolver, &LpGuidedSolver] {
                let out = s.solve(&design(n, k), &SolveOptions::default()).unwrap();
                assert_eq!(out.status, ProofStatus::Optimal, "{} {n} {k}", s.name());
                assert_eq!(out.value(), Some(v), "{} {n} {k}", s.name());
            }
        }
    }

    #[test]
    fn infeasible_and_budget() {
        let mut p = design(4, 2);
        p.fixed_out = (0..6).collect();
        let out = FewestCoverersSolver.solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, ProofStatus::Infeasible);

        let opts = SolveOptions {
            budget: Budget::nodes(1),
            threads: 1,
        };
        let out = FewestCoverersSolver.solve(&design(7, 4), &opts).unwrap();
        assert!(matches!(out.status, ProofStatus::Bounds { .. }));
    }

    #[test]
    fn groups_respected() {
        // cover {0,1,2} singletons by pairs, but at most one pair containing 0
        let p = Problem {
            groups: vec![Group {
                members: vec![0, 1],
                min: 0,
                max: Some(1),
            }],
            ..Problem::new(
                Shape::Generic,
                vec![0b001, 0b010, 0b100],
                vec![0b011, 0b101, 0b110],
                Incidence::Subset,
            )
        };
        let out = FewestCoverersSolver.solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(out.value(), Some(2));
        let sol = out.solution.unwrap();
        assert!(sol.contains(&2));
    }

    #[test]
    fn census_small() {
        let out = enumerate_minimal_covers(&design(4, 2), 4, 6, &SolveOptions::default()).unwrap();
        let sizes: Vec<(usize, usize)> = out.classes.iter().map(|(s, c)| (*s, c.len())).collect();
        assert_eq!(sizes, vec![(2, 1), (3, 1)]);
        assert!(out.complete);
    }
}
