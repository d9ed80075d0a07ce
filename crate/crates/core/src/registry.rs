//! Name lookup for solvers, census strategies and lower-bound strategies.

use num_traits::{One, ToPrimitive};

use crate::covdesign::{CensusStrategy, DirectCensus, ExtensionCensus};
use crate::error::{Error, Result};
use crate::exactlp::{continuous_bound_e, Rational};
use crate::lpsolve::{greedy_bound, lemma_bound, safe_dual_weights, CoverInstance};
use crate::search::{AutoSolver, CoverSolver, FewestCoverersSolver, LpGuidedSolver};

/// The instance a bound is computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundTarget {
    /// `C(n,k,k-1)`.
    Design { n: usize, k: usize },
    /// `D(n,1)`.
    Asym { n: usize },
}

impl BoundTarget {
    pub fn instance(self) -> Result<CoverInstance> {
        match self {
            BoundTarget::Design { n, k } => {
                if k == 0 || k > n || n > crate::setsys::MAX_N {
                    return Err(Error::Parameter(format!("need 1 <= k <= n <= {}", crate::setsys::MAX_N)));
                }
                Ok(CoverInstance::full_design(n, k))
            }
            BoundTarget::Asym { n } => {
                if n == 0 || n > 16 {
                    return Err(Error::Capability("asymmetric instances support 1 <= n <= 16".into()));
                }
                Ok(CoverInstance::full_asym(n))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    /// Integer lower bound.
    pub value: u64,
    /// The fractional quantity behind it, when there is one.
    pub fractional: Option<Rational>,
}

pub trait BoundStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn bound(&self, target: BoundTarget) -> Result<BoundReport>;
}

fn infeasible() -> Error {
    Error::Infeasible("a target has no covering candidate".into())
}

pub struct GreedyBound;

impl BoundStrategy for GreedyBound {
    fn name(&self) -> &'static str {
        "greedy"
    }
    fn summary(&self) -> &'static str {
        "sum over targets of 1 / (largest coverage of a candidate covering it)"
    }
    fn bound(&self, target: BoundTarget) -> Result<BoundReport> {
        let inst = target.instance()?;
        let value = greedy_bound(&inst).finite().ok_or_else(infeasible)?;
        Ok(BoundReport { value, fractional: None })
    }
}

/// Uniform weights `1 / max coverage`; the packing condition holds trivially.
pub struct UniformLemmaBound;

impl BoundStrategy for UniformLemmaBound {
    fn name(&self) -> &'static str {
        "lemma"
    }
    fn summary(&self) -> &'static str {
        "weight lemma with uniform weights 1 / (largest candidate coverage)"
    }
    fn bound(&self, target: BoundTarget) -> Result<BoundReport> {
        let inst = target.instance()?;
        if inst.targets.is_empty() {
            return Ok(BoundReport { value: 0, fractional: None });
        }
        let max = inst.covers().iter().map(Vec::len).max().unwrap_or(0);
        if max == 0 {
            return Err(infeasible());
        }
        let w = Rational::one() / Rational::from_integer(max.into());
        let weights = inst.targets.iter().map(|&x| (x, w.clone())).collect();
        let value = lemma_bound(&inst, &weights)?;
        Ok(BoundReport {
            value,
            fractional: Some(w * Rational::from_integer(inst.targets.len().into())),
        })
    }
}

/// Exact LP duals of the covering relaxation fed to the weight lemma.
pub struct LpDualBound;

impl BoundStrategy for LpDualBound {
    fn name(&self) -> &'static str {
        "lp"
    }
    fn summary(&self) -> &'static str {
        "weight lemma with exact optimal duals of the covering LP"
    }
    fn bound(&self, target: BoundTarget) -> Result<BoundReport> {
        let inst = target.instance()?;
        let w = safe_dual_weights(&inst)?;
        let value = lemma_bound(&inst, &w)?;
        Ok(BoundReport {
            value,
            fractional: Some(w.values().sum()),
        })
    }
}

/// The closed-form optimum of the symmetrized LP; asymmetric targets only.
pub struct ContinuousBound;

impl BoundStrategy for ContinuousBound {
    fn name(&self) -> &'static str {
        "E"
    }
    fn summary(&self) -> &'static str {
        "exact continuous bound E(n) for asymmetric coverings"
    }
    fn bound(&self, target: BoundTarget) -> Result<BoundReport> {
        let BoundTarget::Asym { n } = target else {
            return Err(Error::Parameter("bound E applies to asymmetric coverings only (omit --k)".into()));
        };
        if n == 0 {
            return Err(Error::Size(n));
        }
        let e = continuous_bound_e(n as i64)?;
        let value = e
            .ceil()
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Capability(format!("E({n}) does not fit in 64 bits")))?;
        Ok(BoundReport {
            value,
            fractional: Some(e),
        })
    }
}

pub fn solvers() -> Vec<&'static dyn CoverSolver> {
    vec![&FewestCoverersSolver, &LpGuidedSolver, &AutoSolver]
}

pub fn census_strategies() -> Vec<&'static dyn CensusStrategy> {
    vec![&DirectCensus, &ExtensionCensus]
}

pub fn bound_strategies() -> Vec<&'static dyn BoundStrategy> {
    vec![&GreedyBound, &UniformLemmaBound, &LpDualBound, &ContinuousBound]
}

fn find<T: ?Sized>(kind: &str, name: &str, all: Vec<&'static T>, key: impl Fn(&T) -> &'static str) -> Result<&'static T> {
    let names: Vec<&str> = all.iter().map(|s| key(s)).collect();
    all.into_iter()
        .find(|s| key(s).eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Parameter(format!("unknown {kind} {name:?}; expected one of {}", names.join(", "))))
}

pub fn solver(name: &str) -> Result<&'static dyn CoverSolver> {
    find("procedure", name, solvers(), |s| s.name())
}

pub fn census_strategy(name: &str) -> Result<&'static dyn CensusStrategy> {
    find("census strategy", name, census_strategies(), |s| s.name())
}

pub fn bound_strategy(name: &str) -> Result<&'static dyn BoundStrategy> {
    find("bound", name, bound_strategies(), |s| s.name())
}
