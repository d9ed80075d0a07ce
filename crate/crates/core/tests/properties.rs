//! Randomized invariants, each checked against an independent oracle.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use covering::asymcover::{classify_minimal_asym, lift_banded, puncture_to_banded, BandedDecomposition};
use covering::covdesign::{CensusStrategy, DirectCensus};
use covering::exactlp::{factorial, partial_sum_r, Rational};
use covering::isocanon::{are_isomorphic, automorphism_order, canonical_form};
use covering::lpsolve::{
    greedy_bound, lemma_bound, safe_dual_weights, solve_lp, CoverBound, CoverInstance, Incidence,
    LinearProgram, LpStatus, Relation,
};
use covering::search::{enumerate_minimal_covers, Problem, Shape, SolveOptions};
use covering::setsys::{
    is_asym_cover, is_banded, is_cover_design, is_minimal_cover, k_subsets, permute_mask, CoverMode, Mask,
    SetSystem,
};

fn popcount(x: Mask) -> u32 {
    x.count_ones()
}

/// Every vector of the cube has a block containing it at most one weight up.
fn asym_oracle(n: usize, blocks: &[Mask]) -> bool {
    (0..1u32 << n).all(|v| {
        blocks
            .iter()
            .any(|&b| b & v == v && popcount(b) - popcount(v) <= 1)
    })
}

/// Every odd co-weight vector lies in a block exactly one weight up.
fn banded_oracle(n: usize, blocks: &[Mask]) -> bool {
    (0..1u32 << n)
        .filter(|&v| (n as u32 - popcount(v)) % 2 == 1)
        .all(|v| blocks.iter().any(|&b| b & v == v && popcount(b) == popcount(v) + 1))
}

fn random_perm(n: usize, rng: &mut StdRng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

fn random_system(n: usize, rng: &mut StdRng, density: f64) -> SetSystem {
    let blocks: Vec<Mask> = (0..1u32 << n).filter(|_| rng.gen_bool(density)).collect();
    SetSystem::new(n, blocks).unwrap()
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(p: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if p.len() == used.len() {
            out.push(p.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                p.push(i);
                rec(p, used, out);
                p.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn asym_cover_matches_double_loop(n in 1usize..=10, seed in any::<u64>(), density in 0.05f64..0.6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_system(n, &mut rng, density);
        prop_assert_eq!(is_asym_cover(&d, 1).unwrap(), asym_oracle(n, d.blocks()));
        prop_assert_eq!(is_banded(&d), banded_oracle(n, d.blocks()));
    }

    #[test]
    fn predicates_invariant_under_relabeling(n in 2usize..=8, seed in any::<u64>(), density in 0.1f64..0.7) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_system(n, &mut rng, density);
        let p = d.permuted(&random_perm(n, &mut rng));
        prop_assert_eq!(is_asym_cover(&d, 1).unwrap(), is_asym_cover(&p, 1).unwrap());
        prop_assert_eq!(is_banded(&d), is_banded(&p));
        let k = rng.gen_range(1..=n);
        let layer_d = SetSystem::new(n, k_subsets(n, k).into_iter().filter(|m| d.contains(*m))).unwrap();
        let layer_p = layer_d.permuted(&random_perm(n, &mut rng));
        prop_assert_eq!(is_cover_design(&layer_d, k, k - 1).unwrap(), is_cover_design(&layer_p, k, k - 1).unwrap());
    }

    #[test]
    fn minimal_covers_lose_coverage_without_any_block(n in 2usize..=6, seed in any::<u64>()) {
        // strip a random full cover down to an irredundant one
        let mut rng = StdRng::seed_from_u64(seed);
        let mut blocks: Vec<Mask> = (0..1u32 << n).collect();
        blocks.shuffle(&mut rng);
        let mut d = SetSystem::new(n, blocks.clone()).unwrap();
        for b in blocks {
            let t = d.without(b);
            if asym_oracle(n, t.blocks()) {
                d = t;
            }
        }
        prop_assert!(is_minimal_cover(&d, CoverMode::Asym(1)).unwrap());
        for &b in d.blocks() {
            prop_assert!(!asym_oracle(n, d.without(b).blocks()));
        }
    }

    #[test]
    fn canonical_form_invariant(n in 1usize..=9, seed in any::<u64>(), density in 0.05f64..0.5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_system(n, &mut rng, density);
        let p = d.permuted(&random_perm(n, &mut rng));
        let (cd, cp) = (canonical_form(&d).unwrap(), canonical_form(&p).unwrap());
        prop_assert_eq!(&cd.canonical_blocks, &cp.canonical_blocks);
        prop_assert_eq!(cd.aut_order, cp.aut_order);
        prop_assert!(are_isomorphic(&d, &p).unwrap());
    }

    #[test]
    fn isomorphism_is_an_equivalence(n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_system(n, &mut rng, 0.3);
        let b = if rng.gen_bool(0.5) { a.permuted(&random_perm(n, &mut rng)) } else { random_system(n, &mut rng, 0.3) };
        let c = if rng.gen_bool(0.5) { b.permuted(&random_perm(n, &mut rng)) } else { random_system(n, &mut rng, 0.3) };
        let iso = |x: &SetSystem, y: &SetSystem| are_isomorphic(x, y).unwrap();
        // brute-force oracle
        let perms = all_perms(n);
        let brute = |x: &SetSystem, y: &SetSystem| perms.iter().any(|p| x.permuted(p) == *y);
        prop_assert!(iso(&a, &a));
        prop_assert_eq!(iso(&a, &b), iso(&b, &a));
        prop_assert_eq!(iso(&a, &b), brute(&a, &b));
        if iso(&a, &b) && iso(&b, &c) {
            prop_assert!(iso(&a, &c));
        }
    }

    #[test]
    fn orbit_stabilizer(n in 1usize..=6, seed in any::<u64>(), density in 0.05f64..0.5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = random_system(n, &mut rng, density);
        let perms = all_perms(n);
        let images: std::collections::BTreeSet<Vec<Mask>> =
            perms.iter().map(|p| d.permuted(p).blocks().to_vec()).collect();
        prop_assert_eq!(images.len() as u64 * automorphism_order(&d).unwrap(), perms.len() as u64);
    }

    #[test]
    fn partial_sum_increments(n in 1i64..=30, num in -20i64..=20, den in 1i64..=7) {
        let x = Rational::new(num.into(), den.into());
        let diff = partial_sum_r(n, &x).unwrap() - partial_sum_r(n - 1, &x).unwrap();
        let mut pow = Rational::from_integer(1.into());
        for _ in 0..n {
            pow *= -x.clone();
        }
        prop_assert_eq!(diff, pow / Rational::from_integer(factorial(n as usize)));
    }

    #[test]
    fn strong_duality(seed in any::<u64>()) {
        // random covering-type LPs: min c.x, A x >= b, x >= 0, with every row coverable
        let mut rng = StdRng::seed_from_u64(seed);
        let m = rng.gen_range(1..=6);
        let rows = rng.gen_range(1..=6);
        let obj: Vec<Rational> = (0..m).map(|_| Rational::from_integer(rng.gen_range(1..=5).into())).collect();
        let mut lp = LinearProgram::new(obj.clone());
        for _ in 0..rows {
            let mut row: Vec<Rational> = (0..m).map(|_| Rational::from_integer(rng.gen_range(0..=3).into())).collect();
            let j = rng.gen_range(0..m);
            row[j] = Rational::from_integer(rng.gen_range(1..=3).into());
            lp.add(row, Relation::Ge, Rational::from_integer(rng.gen_range(0..=4).into()));
        }
        let sol = solve_lp(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let primal: Rational = obj.iter().zip(&sol.primal).map(|(c, x)| c * x).sum();
        prop_assert_eq!(&primal, &sol.objective);
        prop_assert_eq!(sol.dual_objective(&lp), sol.objective);
    }
}

/// A random instance with at most 12 candidates on `n <= 6` points.
fn random_instance(rng: &mut StdRng) -> CoverInstance {
    let n = rng.gen_range(2..=6);
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(1..=n);
        let mut targets = k_subsets(n, k - 1);
        targets.retain(|_| rng.gen_bool(0.7));
        let mut cands = k_subsets(n, k);
        cands.shuffle(rng);
        cands.truncate(rng.gen_range(1..=12));
        CoverInstance::new(targets, cands, Incidence::Subset)
    } else {
        let mut targets: Vec<Mask> = (0..1u32 << n).collect();
        targets.retain(|_| rng.gen_bool(0.5));
        let mut cands: Vec<Mask> = (0..1u32 << n).collect();
        cands.shuffle(rng);
        cands.truncate(rng.gen_range(1..=12));
        CoverInstance::new(targets, cands, Incidence::WithinRadius(1))
    }
}

/// Minimum cover size by trying every candidate subset; `None` if infeasible.
fn exhaustive_min(inst: &CoverInstance) -> Option<u32> {
    let cov: Vec<u128> = inst
        .candidates
        .iter()
        .map(|&y| {
            inst.targets
                .iter()
                .enumerate()
                .filter(|(_, &x)| x & !y == 0 && (inst.incidence == Incidence::Subset || popcount(y) - popcount(x) <= 1))
                .fold(0u128, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let all: u128 = if inst.targets.len() == 128 { !0 } else { (1u128 << inst.targets.len()) - 1 };
    (0u32..1 << cov.len())
        .filter(|s| {
            let mut acc = 0;
            for (j, c) in cov.iter().enumerate() {
                if s >> j & 1 == 1 {
                    acc |= c;
                }
            }
            acc == all
        })
        .map(|s| s.count_ones())
        .min()
}

#[test]
fn bounds_never_exceed_exhaustive_minimum() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut feasible = 0;
    for _ in 0..1000 {
        let inst = random_instance(&mut rng);
        let exact = exhaustive_min(&inst);
        let g = greedy_bound(&inst);
        match exact {
            None => {
                assert_eq!(g, CoverBound::Infeasible);
                assert!(safe_dual_weights(&inst).is_err());
            }
            Some(m) => {
                feasible += 1;
                assert!(g.finite().unwrap() <= m as u64, "greedy {g:?} > {m} on {inst:?}");
                let w = safe_dual_weights(&inst).unwrap();
                let l = lemma_bound(&inst, &w).unwrap();
                assert!(l <= m as u64, "lemma {l} > {m} on {inst:?}");
            }
        }
    }
    assert!(feasible > 300, "too few feasible instances: {feasible}");
}

#[test]
fn optimal_duals_dominate_greedy_on_full_instances() {
    for n in 2..=7 {
        for k in 1..=n {
            let inst = CoverInstance::full_design(n, k);
            let l = lemma_bound(&inst, &safe_dual_weights(&inst).unwrap()).unwrap();
            assert!(l >= greedy_bound(&inst).finite().unwrap(), "({n},{k})");
        }
    }
    for n in 1..=5 {
        let inst = CoverInstance::full_asym(n);
        let l = lemma_bound(&inst, &safe_dual_weights(&inst).unwrap()).unwrap();
        assert!(l >= greedy_bound(&inst).finite().unwrap(), "asym {n}");
    }
}

#[test]
fn census_counts_survive_relabeling() {
    let mut rng = StdRng::seed_from_u64(7);
    for (n, k, max) in [(5, 3, 10), (6, 3, 12), (6, 4, 15), (5, 2, 10)] {
        let reference = DirectCensus.enumerate(n, k, max, &SolveOptions::default()).unwrap();
        for _ in 0..3 {
            let perm = random_perm(n, &mut rng);
            let relabel = |v: Vec<Mask>| {
                let mut v: Vec<Mask> = v.into_iter().map(|m| permute_mask(m, &perm)).collect();
                v.shuffle(&mut rng.clone());
                v
            };
            let p = Problem::new(
                Shape::Generic,
                relabel(k_subsets(n, k - 1)),
                relabel(k_subsets(n, k)),
                Incidence::Subset,
            );
            let out = enumerate_minimal_covers(&p, n, max, &SolveOptions::default()).unwrap();
            let counts: BTreeMap<usize, usize> = out.classes.iter().map(|(s, c)| (*s, c.len())).collect();
            let expect: BTreeMap<usize, usize> = reference.profile().into_iter().collect();
            assert_eq!(counts, expect, "({n},{k}) under {perm:?}");
        }
    }
}

#[test]
fn lift_then_puncture_is_identity() {
    for (n, size) in [(1, 1), (2, 2), (3, 3), (4, 6), (5, 10), (6, 18)] {
        let c = classify_minimal_asym(n, size, &SolveOptions::default()).unwrap();
        let mut banded = 0;
        for (d, b) in &c.classes {
            if !b {
                assert!(lift_banded(d).is_err());
                continue;
            }
            banded += 1;
            let lifted = lift_banded(d).unwrap();
            assert_eq!(&puncture_to_banded(&lifted, n + 1).unwrap(), d);
        }
        assert!(banded > 0, "n={n}");
    }
}

/// Random covering design: shuffle the k-subsets, keep those that cover
/// something new, then add a few extras.
fn random_design(v: usize, k: usize, rng: &mut StdRng) -> Vec<Mask> {
    let mut cands = k_subsets(v, k);
    cands.shuffle(rng);
    let targets = k_subsets(v, k.saturating_sub(1));
    let mut chosen: Vec<Mask> = Vec::new();
    for &c in &cands {
        let uncovered = targets.iter().any(|&t| t & !c == 0 && !chosen.iter().any(|&b| t & !b == 0));
        if uncovered || rng.gen_bool(0.1) {
            chosen.push(c);
        }
    }
    chosen
}

#[test]
fn punctured_unions_of_designs_are_banded_covers() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in 1..=5 {
        for _ in 0..40 {
            let blocks: Vec<Mask> = (0..=n / 2)
                .flat_map(|i| random_design(n + 1, n + 1 - 2 * i, &mut rng))
                .collect();
            let u = SetSystem::new(n + 1, blocks).unwrap();
            let dec = BandedDecomposition::from_blocks(n, &u).unwrap();
            let coord = rng.gen_range(1..=n + 1);
            let d = puncture_to_banded(&dec, coord).unwrap();
            assert!(asym_oracle(n, d.blocks()), "n={n}");
            assert!(banded_oracle(n, d.blocks()), "n={n}");
        }
    }
}
