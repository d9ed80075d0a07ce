//! Enumeration of minimal covers up to isomorphism.
//!
//! Branching is the fewest-coverers rule. Every chosen block keeps its set of
//! private targets (covered by no other chosen block); a node dies when one
//! becomes empty, and a candidate is dropped when adding it would swallow
//! some block's private set. Every leaf is therefore a minimal cover, reached
//! exactly once.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;

use crate::bits::Bits;
use crate::isocanon::canonical_tagged;

use super::ctx::{Ctx, Node, Shared};
use super::{CensusOutcome, SolveOptions};

#[derive(Clone)]
struct CNode<const W: usize> {
    node: Node<W>,
    privs: Vec<Bits<W>>,
}

/// Canonical block list to the witness found first.
type Found = HashMap<Vec<u32>, Vec<u32>>;

struct Census<'a, const W: usize> {
    ctx: &'a Ctx<W>,
    n: usize,
    max_size: usize,
    cnt: Vec<u32>,
    found: Found,
}

enum Step<const W: usize> {
    Done,
    Branch(Vec<CNode<W>>),
}

fn add<const W: usize>(ctx: &Ctx<W>, cn: &mut CNode<W>, c: usize) -> bool {
    let fresh = ctx.cov[c].and(&cn.node.uncovered);
    if fresh.is_empty() {
        return false;
    }
    for p in cn.privs.iter_mut() {
        *p = p.and_not(&ctx.cov[c]);
        if p.is_empty() {
            return false;
        }
    }
    if !ctx.choose(&mut cn.node, c) {
        return false;
    }
    cn.privs.push(fresh);
    true
}

impl<const W: usize> Census<'_, W> {
    fn expand(&mut self, mut cn: CNode<W>) -> Step<W> {
        if cn.node.uncovered.is_empty() {
            self.record(&cn.node.chosen);
            return Step::Done;
        }
        if cn.node.chosen.len() >= self.max_size {
            return Step::Done;
        }
        let avail = cn.node.avail;
        for y in avail.iter() {
            let cov = &self.ctx.cov[y];
            if cn.privs.iter().any(|p| p.is_subset(cov)) || !cov.intersects(&cn.node.uncovered) {
                cn.node.avail.remove(y);
            }
        }
        let Some(g) = self.ctx.greedy(&cn.node, &mut self.cnt) else {
            return Step::Done;
        };
        if cn.node.chosen.len() as u64 + g.bound > self.max_size as u64 {
            return Step::Done;
        }
        let coverers: Vec<usize> = self.ctx.by[g.target].and(&cn.node.avail).iter().collect();
        let mut children = Vec::with_capacity(coverers.len());
        for &c in &coverers {
            let mut child = cn.clone();
            if add(self.ctx, &mut child, c) {
                children.push(child);
            }
            cn.node.avail.remove(c);
        }
        Step::Branch(children)
    }

    fn record(&mut self, chosen: &[u32]) {
        let items: Vec<(u8, u32)> = chosen
            .iter()
            .map(|&c| (0u8, self.ctx.cand_masks[c as usize]))
            .collect();
        let canon = canonical_tagged(self.n, &items).expect("ground set checked by caller");
        let key: Vec<u32> = canon.items.into_iter().map(|(_, m)| m).collect();
        self.found.entry(key).or_insert_with(|| {
            let mut w: Vec<u32> = chosen.to_vec();
            w.sort_unstable();
            w
        });
    }

    fn dfs(&mut self, cn: CNode<W>, sh: &Shared) -> bool {
        if !sh.tick() {
            return false;
        }
        match self.expand(cn) {
            Step::Done => true,
            Step::Branch(children) => children.into_iter().all(|c| self.dfs(c, sh)),
        }
    }
}

pub(crate) fn enumerate<const W: usize>(
    ctx: &Ctx<W>,
    n: usize,
    max_size: usize,
    opts: &SolveOptions,
) -> CensusOutcome {
    let sh = Shared::new(opts);
    let mut root = CNode {
        node: match ctx.root() {
            Some(r) => Node { chosen: Vec::new(), ..r },
            None => return CensusOutcome::default_complete(),
        },
        privs: Vec::new(),
    };
    // redo fixed inclusions so private sets are tracked
    root.node.uncovered = Bits::full(ctx.nt);
    root.node.gcount.iter_mut().for_each(|g| *g = 0);
    for &c in &ctx.fixed_in {
        if !add(ctx, &mut root, c) {
            return CensusOutcome::default_complete();
        }
    }

    let mut seq = Census {
        ctx,
        n,
        max_size,
        cnt: Vec::new(),
        found: Found::new(),
    };
    let mut queue = VecDeque::from([root]);
    let mut complete = true;
    while queue.len() < super::procedures::FRONTIER {
        let Some(cn) = queue.pop_front() else { break };
        if !sh.tick() {
            complete = false;
            queue.clear();
            break;
        }
        if let Step::Branch(children) = seq.expand(cn) {
            queue.extend(children);
        }
    }
    let tasks: Vec<CNode<W>> = queue.into();
    let results: Vec<(bool, Found)> = super::pool(opts).install(|| {
        tasks
            .into_par_iter()
            .map(|cn| {
                let mut c = Census {
                    ctx,
                    n,
                    max_size,
                    cnt: Vec::new(),
                    found: Found::new(),
                };
                let ok = c.dfs(cn, &sh);
                (ok, c.found)
            })
            .collect()
    });

    // task order decides which witness survives a canonical collision
    let mut merged: BTreeMap<usize, BTreeMap<Vec<u32>, Vec<u32>>> = BTreeMap::new();
    let mut ordered: Vec<Found> = vec![seq.found];
    for (ok, f) in results {
        complete &= ok;
        ordered.push(f);
    }
    for f in ordered {
        for (key, wit) in f {
            merged.entry(key.len()).or_default().entry(key).or_insert(wit);
        }
    }
    CensusOutcome {
        classes: merged
            .into_iter()
            .map(|(size, m)| (size, m.into_iter().collect()))
            .collect(),
        complete: complete && !sh.aborted(),
        nodes: sh.nodes(),
    }
}
