//! The two branching procedures and the frontier-parallel driver.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::lpsolve::fast::{discretize, PackingLp};

use super::ctx::{greedy_cover, Ctx, Node, Shared};
use super::{ProofStatus, SearchOutcome, SolveOptions};

pub(crate) enum Expansion<const W: usize> {
    Done,
    Branch(Vec<Node<W>>),
}

pub(crate) trait Explorer<const W: usize>: Send {
    fn expand(&mut self, ctx: &Ctx<W>, node: Node<W>, sh: &Shared, owner: u32) -> Expansion<W>;
}

/// Branches on the uncovered target with fewest available coverers.
#[derive(Default)]
pub(crate) struct FewestCoverers {
    cnt: Vec<u32>,
}

impl FewestCoverers {
    fn branch<const W: usize>(ctx: &Ctx<W>, node: &Node<W>, target: usize, lb: u64) -> Vec<Node<W>> {
        let coverers: Vec<usize> = ctx.by[target].and(&node.avail).iter().collect();
        let mut children = Vec::with_capacity(coverers.len());
        let mut base = node.clone();
        base.lb = lb;
        for &c in &coverers {
            let mut child = base.clone();
            if ctx.choose(&mut child, c) {
                children.push(child);
            }
            base.avail.remove(c);
        }
        children
    }
}

impl<const W: usize> Explorer<W> for FewestCoverers {
    fn expand(&mut self, ctx: &Ctx<W>, node: Node<W>, sh: &Shared, owner: u32) -> Expansion<W> {
        if node.uncovered.is_empty() {
            if let Some(sol) = ctx.complete(&node) {
                sh.offer(sol, owner);
            }
            return Expansion::Done;
        }
        let Some(deficit) = ctx.deficit(&node) else {
            return Expansion::Done;
        };
        let Some(g) = ctx.greedy(&node, &mut self.cnt) else {
            return Expansion::Done;
        };
        let lb = ctx.node_bound(&node, g.bound, deficit);
        if sh.prunes(lb, owner) {
            return Expansion::Done;
        }
        Expansion::Branch(Self::branch(ctx, &node, g.target, lb))
    }
}

/// Branches on the candidate whose LP value is nearest one half.
#[derive(Default)]
pub(crate) struct LpGuided {
    lp: PackingLp,
    greedy: FewestCoverers,
    rows: Vec<Vec<usize>>,
    row_cand: Vec<usize>,
    col_of: Vec<usize>,
}

const INTEGRAL_EPS: f64 = 1e-6;

impl LpGuided {
    /// Includes every candidate that is the last coverer of some target.
    fn propagate<const W: usize>(ctx: &Ctx<W>, node: &mut Node<W>) -> bool {
        loop {
            let mut forced = None;
            for t in node.uncovered.iter() {
                let avail = ctx.by[t].and(&node.avail);
                match avail.count() {
                    0 => return false,
                    1 => {
                        forced = avail.first();
                        break;
                    }
                    _ => {}
                }
            }
            match forced {
                Some(c) => {
                    if !ctx.choose(node, c) {
                        return false;
                    }
                }
                None => return true,
            }
        }
    }
}

impl<const W: usize> Explorer<W> for LpGuided {
    fn expand(&mut self, ctx: &Ctx<W>, mut node: Node<W>, sh: &Shared, owner: u32) -> Expansion<W> {
        if !Self::propagate(ctx, &mut node) {
            return Expansion::Done;
        }
        if node.uncovered.is_empty() {
            if let Some(sol) = ctx.complete(&node) {
                sh.offer(sol, owner);
            }
            return Expansion::Done;
        }
        let Some(deficit) = ctx.deficit(&node) else {
            return Expansion::Done;
        };

        self.col_of.clear();
        self.col_of.resize(ctx.nt, usize::MAX);
        let mut ncols = 0;
        for t in node.uncovered.iter() {
            self.col_of[t] = ncols;
            ncols += 1;
        }
        self.rows.clear();
        self.row_cand.clear();
        for c in node.avail.iter() {
            let hit = ctx.cov[c].and(&node.uncovered);
            if !hit.is_empty() {
                self.rows.push(hit.iter().map(|t| self.col_of[t]).collect());
                self.row_cand.push(c);
            }
        }
        let Some(sol) = self.lp.solve(&self.rows, ncols) else {
            return self.greedy.expand(ctx, node, sh, owner);
        };
        let lb = ctx.node_bound(&node, discretize(&sol.w, &self.rows), deficit);
        if sh.prunes(lb, owner) {
            return Expansion::Done;
        }

        let integral = sol
            .x
            .iter()
            .all(|&v| v < INTEGRAL_EPS || v > 1.0 - INTEGRAL_EPS);
        if integral {
            let mut leaf = node.clone();
            let mut ok = true;
            for (r, &v) in sol.x.iter().enumerate() {
                if v > 0.5 && !ctx.choose(&mut leaf, self.row_cand[r]) {
                    ok = false;
                    break;
                }
            }
            if ok && leaf.uncovered.is_empty() {
                if let Some(s) = ctx.complete(&leaf) {
                    let size = s.len() as u64;
                    sh.offer(s, owner);
                    if size <= lb || sh.prunes(lb, owner) {
                        return Expansion::Done;
                    }
                }
            }
        }

        let mut pick: Option<(f64, u32, usize)> = None;
        for (r, &v) in sol.x.iter().enumerate() {
            if v < INTEGRAL_EPS || v > 1.0 - INTEGRAL_EPS {
                continue;
            }
            let c = self.row_cand[r];
            let key = ((v - 0.5).abs(), ctx.cand_masks[c]);
            if pick.is_none_or(|(d, m, _)| key < (d, m)) {
                pick = Some((key.0, key.1, c));
            }
        }
        let Some((_, _, c)) = pick else {
            // integral but not a usable leaf: fall back to target branching
            let mut g = self.greedy.expand(ctx, node, sh, owner);
            if let Expansion::Branch(children) = &mut g {
                for ch in children.iter_mut() {
                    ch.lb = ch.lb.max(lb);
                }
            }
            return g;
        };
        node.lb = lb;
        let mut out = node.clone();
        out.avail.remove(c);
        let mut children = Vec::with_capacity(2);
        if ctx.choose(&mut node, c) {
            children.push(node);
        }
        children.push(out);
        Expansion::Branch(children)
    }
}

fn dfs<const W: usize, E: Explorer<W>>(e: &mut E, ctx: &Ctx<W>, node: Node<W>, sh: &Shared, owner: u32) -> bool {
    if !sh.tick() {
        return false;
    }
    match e.expand(ctx, node, sh, owner) {
        Expansion::Done => true,
        Expansion::Branch(children) => {
            for child in children {
                if !dfs(e, ctx, child, sh, owner) {
                    return false;
                }
            }
            true
        }
    }
}

/// Number of subtrees handed to the worker pool.
pub(crate) const FRONTIER: usize = 64;

pub(crate) fn frontier<const W: usize, E: Explorer<W>>(
    e: &mut E,
    ctx: &Ctx<W>,
    root: Node<W>,
    sh: &Shared,
) -> Option<Vec<Node<W>>> {
    let mut queue = VecDeque::from([root]);
    while queue.len() < FRONTIER {
        let Some(node) = queue.pop_front() else { break };
        if !sh.tick() {
            queue.push_front(node);
            return None;
        }
        if let Expansion::Branch(children) = e.expand(ctx, node, sh, 0) {
            queue.extend(children);
        }
    }
    Some(queue.into())
}

pub(crate) fn run<const W: usize, E: Explorer<W> + Default>(ctx: &Ctx<W>, opts: &SolveOptions) -> SearchOutcome {
    let sh = Shared::new(opts);
    let Some(root) = ctx.root() else {
        return SearchOutcome::infeasible(0);
    };
    if let Some(g) = greedy_cover(ctx) {
        sh.offer(g, 0);
    }
    let root_lb = root.lb;
    let mut e = E::default();
    let (tasks, mut open_lb) = match frontier(&mut e, ctx, root.clone(), &sh) {
        Some(t) => (t, Vec::new()),
        None => (Vec::new(), vec![root_lb]),
    };

    let results: Vec<(bool, u64)> = super::pool(opts).install(|| {
        tasks
            .into_par_iter()
            .enumerate()
            .map(|(i, node)| {
                let lb = node.lb;
                let mut e = E::default();
                (dfs(&mut e, ctx, node, &sh, i as u32 + 1), lb)
            })
            .collect()
    });
    open_lb.extend(results.iter().filter(|r| !r.0).map(|r| r.1));

    let nodes = sh.nodes();
    let Some(sol) = sh.take_best() else {
        return if open_lb.is_empty() {
            SearchOutcome::infeasible(nodes)
        } else {
            SearchOutcome {
                solution: None,
                status: ProofStatus::Bounds {
                    lo: open_lb.into_iter().min().unwrap(),
                    hi: None,
                },
                nodes,
            }
        };
    };
    let hi = sol.len() as u64;
    debug_assert!(ctx.is_cover(&sol));
    let status = match open_lb.into_iter().min() {
        Some(lo) if lo.max(root_lb) < hi => ProofStatus::Bounds {
            lo: lo.max(root_lb),
            hi: Some(hi),
        },
        _ => ProofStatus::Optimal,
    };
    SearchOutcome {
        solution: Some(sol),
        status,
        nodes,
    }
}
