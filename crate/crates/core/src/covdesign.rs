//! Covering numbers `C(n,k,k-1)`, census of minimal covering designs, and
//! Turán numbers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::isocanon::{canonical_form, MAX_CANON_N};
use crate::lpsolve::Incidence;
use crate::search::{
    enumerate_minimal_covers, CensusOutcome, CoverSolver, Problem, ProofStatus, Shape, SolveOptions,
};
use crate::setsys::{binomial, is_cover_design, k_subsets, is_minimal_cover, CoverMode, Mask, SetSystem};

/// Search configuration for [`cover_number`].
#[derive(Clone, Debug)]
pub struct DesignConfig {
    pub opts: SolveOptions,
    /// Fix the first block to `{1..k}`.
    pub symmetry_breaking: bool,
    /// Use `ceil(n * C(n-1,k-1,k-2) / k)` as a root bound, solving the
    /// smaller instance recursively.
    pub degree_bound: bool,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            opts: SolveOptions::default(),
            symmetry_breaking: true,
            degree_bound: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoverResult {
    pub n: usize,
    pub k: usize,
    /// Size of the best cover found.
    pub value: u64,
    pub witness: SetSystem,
    pub status: ProofStatus,
    pub root_bound: u64,
    pub nodes: u64,
}

impl CoverResult {
    pub fn is_optimal(&self) -> bool {
        self.status == ProofStatus::Optimal
    }

    /// Proven lower bound on `C(n,k,k-1)`.
    pub fn lower(&self) -> u64 {
        match self.status {
            ProofStatus::Bounds { lo, .. } => lo,
            _ => self.value,
        }
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 || n > crate::setsys::MAX_N {
        return Err(Error::Size(n));
    }
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("need 1 <= k <= n, got n={n} k={k}")));
    }
    Ok(())
}

pub fn design_problem(n: usize, k: usize) -> Result<Problem> {
    check_nk(n, k)?;
    Ok(Problem::new(
        Shape::Design { n, k },
        k_subsets(n, k - 1),
        k_subsets(n, k),
        Incidence::Subset,
    ))
}

/// `C(n,k,k-1)` by branch-and-bound.
pub fn cover_number(n: usize, k: usize, solver: &dyn CoverSolver, cfg: &DesignConfig) -> Result<CoverResult> {
    check_nk(n, k)?;
    let mut p = design_problem(n, k)?;
    if k == n || k == 1 {
        let witness = SetSystem::new(n, [p.candidates[0]])?;
        return Ok(CoverResult {
            n,
            k,
            value: 1,
            witness,
            status: ProofStatus::Optimal,
            root_bound: 1,
            nodes: 0,
        });
    }
    if cfg.degree_bound && k >= 2 {
        let sub = cover_number(n - 1, k - 1, solver, cfg)?;
        p.root_bound = (n as u64 * sub.lower()).div_ceil(k as u64);
    }
    if cfg.symmetry_breaking {
        p.fixed_in = vec![0];
    }
    let out = solver.solve(&p, &cfg.opts)?;
    let Some(sol) = out.solution else {
        return Err(Error::Internal(format!(
            "no cover of C({n},{k},{}) found within budget",
            k - 1
        )));
    };
    let witness = SetSystem::new(n, sol.iter().map(|&c| p.candidates[c as usize]))?;
    if !is_cover_design(&witness, k, k - 1)? {
        return Err(Error::Internal("search returned a non-cover".into()));
    }
    Ok(CoverResult {
        n,
        k,
        value: witness.len() as u64,
        witness,
        status: out.status,
        root_bound: p.root_bound,
        nodes: out.nodes,
    })
}

/// `T(v,k,t) = C(v, v-t, v-k)`; only the family `k = t + 1` is supported.
pub fn turan_number(v: usize, k: usize, t: usize, solver: &dyn CoverSolver, cfg: &DesignConfig) -> Result<CoverResult> {
    if k == 0 || k > v || t >= v {
        return Err(Error::Parameter(format!(
            "need 0 < k <= v and t < v, got v={v} k={k} t={t}"
        )));
    }
    if k != t + 1 {
        return Err(Error::Capability(format!(
            "T({v},{k},{t}) maps to C({v},{},{}); only k = t + 1 (covering numbers C(n,m,m-1)) is supported",
            v - t,
            v - k
        )));
    }
    cover_number(v, v - t, solver, cfg)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub count: usize,
    /// The whole size range was searched exhaustively.
    pub complete: bool,
    /// One representative per isomorphism class, in canonical order.
    pub witnesses: Vec<SetSystem>,
}

#[derive(Clone, Debug)]
pub struct Census {
    pub n: usize,
    pub k: usize,
    pub max_size: usize,
    pub entries: Vec<CensusEntry>,
    pub complete: bool,
    pub nodes: u64,
}

impl Census {
    pub fn count(&self, size: usize) -> usize {
        self.entries
            .iter()
            .find(|e| e.size == size)
            .map_or(0, |e| e.count)
    }

    /// `(size, count)` pairs with nonzero count.
    pub fn profile(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|e| (e.size, e.count)).collect()
    }

    fn from_classes(n: usize, k: usize, max_size: usize, classes: BTreeMap<usize, Vec<SetSystem>>, complete: bool, nodes: u64) -> Self {
        let entries = classes
            .into_iter()
            .filter(|(s, c)| *s <= max_size && !c.is_empty())
            .map(|(size, witnesses)| CensusEntry {
                n,
                k,
                size,
                count: witnesses.len(),
                complete,
                witnesses,
            })
            .collect();
        Census {
            n,
            k,
            max_size,
            entries,
            complete,
            nodes,
        }
    }
}

/// Largest possible size of a minimal `C(n,k,k-1)`: one private target per block.
pub fn natural_max_size(n: usize, k: usize) -> usize {
    binomial(n as u64, k as u64 - 1) as usize
}

/// A way of producing the census of minimal designs.
pub trait CensusStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn enumerate(&self, n: usize, k: usize, max_size: usize, opts: &SolveOptions) -> Result<Census>;
}

fn collect(n: usize, p: &Problem, out: CensusOutcome) -> Result<(BTreeMap<usize, Vec<SetSystem>>, bool, u64)> {
    let mut classes = BTreeMap::new();
    for (size, list) in out.classes {
        let mut v = Vec::with_capacity(list.len());
        for (_, wit) in list {
            v.push(SetSystem::new(n, wit.iter().map(|&c| p.candidates[c as usize]))?);
        }
        classes.insert(size, v);
    }
    Ok((classes, out.complete, out.nodes))
}

fn census_checks(n: usize, k: usize) -> Result<()> {
    check_nk(n, k)?;
    if k < 2 {
        return Err(Error::Parameter("census needs k >= 2".into()));
    }
    if n > MAX_CANON_N {
        return Err(Error::Capability(format!("census supports n <= {MAX_CANON_N}")));
    }
    Ok(())
}

/// Branches over all minimal designs containing the block `{1..k}`.
pub struct DirectCensus;

impl CensusStrategy for DirectCensus {
    fn name(&self) -> &'static str {
        "direct"
    }
    fn summary(&self) -> &'static str {
        "branch over minimal designs through a fixed first block, dedup canonically"
    }
    fn enumerate(&self, n: usize, k: usize, max_size: usize, opts: &SolveOptions) -> Result<Census> {
        census_checks(n, k)?;
        let mut p = design_problem(n, k)?;
        // every class has a member containing {1..k}
        p.fixed_in = vec![0];
        let out = enumerate_minimal_covers(&p, n, max_size, opts)?;
        let (classes, complete, nodes) = collect(n, &p, out)?;
        Ok(Census::from_classes(n, k, max_size, classes, complete, nodes))
    }
}

/// Builds the census from minimal `C(n-1,k-1,k-2)` bases: a design of size
/// `M` has a point of degree at most `floor(kM/n)`, whose derived design
/// contains a minimal base of at most that size.
pub struct ExtensionCensus;

impl CensusStrategy for ExtensionCensus {
    fn name(&self) -> &'static str {
        "extension"
    }
    fn summary(&self) -> &'static str {
        "extend every minimal C(n-1,k-1,k-2) of size <= floor(kM/n) through the last point"
    }
    fn enumerate(&self, n: usize, k: usize, max_size: usize, opts: &SolveOptions) -> Result<Census> {
        census_checks(n, k)?;
        if k < 3 {
            return DirectCensus.enumerate(n, k, max_size, opts);
        }
        let base_max = (k * max_size / n).min(natural_max_size(n - 1, k - 1));
        let bases = self.enumerate(n - 1, k - 1, base_max, opts)?;
        let mut complete = bases.complete;
        let mut nodes = bases.nodes;
        let mut seen: BTreeMap<Vec<Mask>, SetSystem> = BTreeMap::new();
        for entry in &bases.entries {
            for base in &entry.witnesses {
                let ext = extend_minimal(base, n, k, max_size, opts)?;
                complete &= ext.complete;
                nodes += ext.nodes;
                for d in ext.designs {
                    let key = canonical_form(&d)?.canonical_blocks;
                    seen.entry(key).or_insert(d);
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<SetSystem>> = BTreeMap::new();
        for (_, d) in seen {
            classes.entry(d.len()).or_default().push(d);
        }
        // canonical order within each size
        for v in classes.values_mut() {
            v.sort_by_cached_key(|d| canonical_form(d).map(|c| c.canonical_blocks).unwrap_or_default());
        }
        Ok(Census::from_classes(n, k, max_size, classes, complete, nodes))
    }
}

pub struct Extension {
    pub designs: Vec<SetSystem>,
    pub complete: bool,
    pub nodes: u64,
}

fn extend_minimal(base: &SetSystem, n: usize, k: usize, max_size: usize, opts: &SolveOptions) -> Result<Extension> {
    let p_mask = 1u32 << (n - 1);
    let mut p = design_problem(n, k)?;
    p.fixed_in = base
        .blocks()
        .iter()
        .map(|&b| {
            let m = b | p_mask;
            p.candidates.iter().position(|&c| c == m).unwrap()
        })
        .collect();
    let out = enumerate_minimal_covers(&p, n, max_size, opts)?;
    let complete = out.complete;
    let nodes = out.nodes;
    let (classes, _, _) = collect(n, &p, out)?;
    Ok(Extension {
        designs: classes.into_values().flatten().collect(),
        complete,
        nodes,
    })
}

/// Minimal coverings `C(n,k,k-1)` of size at most `max_size` whose derived
/// design at point `n` contains `base`, one per isomorphism class.
pub fn extend_from_base(base: &SetSystem, n: usize, k: usize, max_size: usize, opts: &SolveOptions) -> Result<Vec<SetSystem>> {
    check_nk(n, k)?;
    if k < 2 || base.n() != n - 1 {
        return Err(Error::Parameter(format!(
            "base must live on {} points with k >= 2",
            n - 1
        )));
    }
    let mode = CoverMode::Design { k: k - 1, t: k - 2 };
    let valid = base.blocks().iter().all(|&b| b.count_ones() as usize == k - 1)
        && !base.is_empty()
        && mode.check(base)?
        && is_minimal_cover(base, mode)?;
    if !valid {
        return Err(Error::Parameter(format!(
            "base is not a minimal C({},{},{})",
            n - 1,
            k - 1,
            k - 2
        )));
    }
    Ok(extend_minimal(base, n, k, max_size, opts)?.designs)
}

/// Census of minimal `C(n,k,k-1)` up to isomorphism, sizes `<= max_size`.
pub fn enumerate_minimal(n: usize, k: usize, max_size: usize, strategy: &dyn CensusStrategy, opts: &SolveOptions) -> Result<Census> {
    strategy.enumerate(n, k, max_size, opts)
}
