use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::bits::Bits;

use super::{Problem, SolveOptions};

/// Bitset view of a [`Problem`] for a fixed word count.
pub(crate) struct Ctx<const W: usize> {
    pub nt: usize,
    pub nc: usize,
    /// Targets covered by each candidate.
    pub cov: Vec<Bits<W>>,
    /// Candidates covering each target.
    pub by: Vec<Bits<W>>,
    pub cand_masks: Vec<u32>,
    pub group_of: Vec<Option<usize>>,
    pub groups: Vec<GroupCtx<W>>,
    pub root_bound: u64,
    pub fixed_in: Vec<usize>,
    pub fixed_out: Vec<usize>,
    lcm: u64,
}

pub(crate) struct GroupCtx<const W: usize> {
    pub members: Bits<W>,
    pub min: u32,
    pub max: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct Node<const W: usize> {
    pub chosen: Vec<u32>,
    pub avail: Bits<W>,
    pub uncovered: Bits<W>,
    pub gcount: Vec<u32>,
    /// Lower bound on any cover in this subtree.
    pub lb: u64,
}

pub(crate) struct GreedyInfo {
    pub bound: u64,
    pub target: usize,
}

fn lcm_upto(m: u64) -> u64 {
    (1..=m.max(1)).fold(1u64, |acc, i| acc / num_integer::gcd(acc, i) * i)
}

impl<const W: usize> Ctx<W> {
    pub fn new(p: &Problem) -> Self {
        let nt = p.targets.len();
        let nc = p.candidates.len();
        let mut cov = vec![Bits::<W>::empty(); nc];
        let mut by = vec![Bits::<W>::empty(); nt];
        for (j, &y) in p.candidates.iter().enumerate() {
            for (i, &x) in p.targets.iter().enumerate() {
                if p.incidence.covers(y, x) {
                    cov[j].insert(i);
                    by[i].insert(j);
                }
            }
        }
        let mut group_of = vec![None; nc];
        let mut groups = Vec::new();
        for (g, grp) in p.groups.iter().enumerate() {
            for &m in &grp.members {
                group_of[m] = Some(g);
            }
            groups.push(GroupCtx {
                members: Bits::from_indices(grp.members.iter().copied()),
                min: grp.min,
                max: grp.max.unwrap_or(u32::MAX),
            });
        }
        let max_cov = cov.iter().map(|c| c.count()).max().unwrap_or(1) as u64;
        Ctx {
            nt,
            nc,
            cov,
            by,
            cand_masks: p.candidates.clone(),
            group_of,
            groups,
            root_bound: p.root_bound,
            fixed_in: p.fixed_in.clone(),
            fixed_out: p.fixed_out.clone(),
            lcm: lcm_upto(max_cov),
        }
    }

    /// Root node with fixed inclusions applied; `None` if they conflict.
    pub fn root(&self) -> Option<Node<W>> {
        let mut node = Node {
            chosen: Vec::new(),
            avail: Bits::full(self.nc),
            uncovered: Bits::full(self.nt),
            gcount: vec![0; self.groups.len()],
            lb: self.root_bound,
        };
        for &c in &self.fixed_out {
            node.avail.remove(c);
        }
        for &c in &self.fixed_in {
            if !node.avail.contains(c) || !self.choose(&mut node, c) {
                return None;
            }
        }
        Some(node)
    }

    /// Adds candidate `c`; false when a group maximum would be exceeded.
    pub fn choose(&self, node: &mut Node<W>, c: usize) -> bool {
        node.avail.remove(c);
        if let Some(g) = self.group_of[c] {
            node.gcount[g] += 1;
            if node.gcount[g] > self.groups[g].max {
                return false;
            }
            if node.gcount[g] == self.groups[g].max {
                node.avail = node.avail.and_not(&self.groups[g].members);
            }
        }
        node.chosen.push(c as u32);
        node.uncovered = node.uncovered.and_not(&self.cov[c]);
        true
    }

    /// Blocks still needed to meet group minimums; `None` if unreachable.
    pub fn deficit(&self, node: &Node<W>) -> Option<u64> {
        let mut total = 0;
        for (g, grp) in self.groups.iter().enumerate() {
            let need = grp.min.saturating_sub(node.gcount[g]);
            if need > 0 {
                if grp.members.and_count(&node.avail) < need {
                    return None;
                }
                total += need as u64;
            }
        }
        Some(total)
    }

    /// Completes a node whose targets are all covered by filling group minimums.
    pub fn complete(&self, node: &Node<W>) -> Option<Vec<u32>> {
        debug_assert!(node.uncovered.is_empty());
        let mut sol = node.chosen.clone();
        for (g, grp) in self.groups.iter().enumerate() {
            let need = grp.min.saturating_sub(node.gcount[g]) as usize;
            let extra: Vec<usize> = grp.members.and(&node.avail).iter().take(need).collect();
            if extra.len() < need {
                return None;
            }
            sol.extend(extra.into_iter().map(|c| c as u32));
        }
        sol.sort_unstable();
        Some(sol)
    }

    /// Greedy lower bound on blocks still needed, and the uncovered target
    /// with fewest available coverers. `None` if some target is uncoverable.
    pub fn greedy(&self, node: &Node<W>, cnt: &mut Vec<u32>) -> Option<GreedyInfo> {
        cnt.clear();
        cnt.resize(self.nc, 0);
        for c in node.avail.iter() {
            cnt[c] = self.cov[c].and_count(&node.uncovered);
        }
        let mut sum = 0u64;
        let mut best = (u32::MAX, usize::MAX);
        for t in node.uncovered.iter() {
            let avail = self.by[t].and(&node.avail);
            let mut m = 0;
            let mut k = 0;
            for c in avail.iter() {
                m = m.max(cnt[c]);
                k += 1;
            }
            if k == 0 {
                return None;
            }
            if k < best.0 {
                best = (k, t);
            }
            sum += self.lcm / m as u64;
        }
        Some(GreedyInfo {
            bound: sum.div_ceil(self.lcm),
            target: best.1,
        })
    }

    /// Lower bound for `node` given the remaining-cover bound `need`.
    pub fn node_bound(&self, node: &Node<W>, need: u64, deficit: u64) -> u64 {
        (node.chosen.len() as u64 + need.max(deficit))
            .max(self.root_bound)
            .max(node.lb)
    }

    pub fn is_cover(&self, sol: &[u32]) -> bool {
        let mut unc = Bits::<W>::full(self.nt);
        for &c in sol {
            unc = unc.and_not(&self.cov[c as usize]);
        }
        unc.is_empty()
    }
}

/// Repeatedly takes the candidate covering most uncovered targets, ties to
/// the lowest index, then fills group minimums.
pub(crate) fn greedy_cover<const W: usize>(ctx: &Ctx<W>) -> Option<Vec<u32>> {
    let mut node = ctx.root()?;
    while !node.uncovered.is_empty() {
        let mut best = (0u32, usize::MAX);
        for c in node.avail.iter() {
            let k = ctx.cov[c].and_count(&node.uncovered);
            if k > best.0 {
                best = (k, c);
            }
        }
        if best.0 == 0 || !ctx.choose(&mut node, best.1) {
            return None;
        }
    }
    ctx.complete(&node)
}

/// State shared by all workers: the packed incumbent and the budget.
pub(crate) struct Shared {
    /// `(size << 32) | owner`, owner 0 for sequential phases and `i + 1` for task `i`.
    inc: AtomicU64,
    best: Mutex<(u64, Vec<u32>)>,
    nodes: AtomicU64,
    abort: AtomicBool,
    max_nodes: u64,
    deadline: Option<Instant>,
}

const NONE: u64 = u64::MAX;

impl Shared {
    pub fn new(opts: &SolveOptions) -> Self {
        Shared {
            inc: AtomicU64::new(NONE),
            best: Mutex::new((NONE, Vec::new())),
            nodes: AtomicU64::new(0),
            abort: AtomicBool::new(false),
            max_nodes: opts.budget.max_nodes.unwrap_or(u64::MAX),
            deadline: opts.budget.max_time.map(|d| Instant::now() + d),
        }
    }

    pub fn offer(&self, sol: Vec<u32>, owner: u32) {
        let key = (sol.len() as u64) << 32 | owner as u64;
        if key < self.inc.fetch_min(key, Ordering::AcqRel) {
            let mut best = self.best.lock().unwrap();
            if key < best.0 {
                *best = (key, sol);
            }
        }
    }

    /// True when a subtree with bound `lb` cannot beat the incumbent for `owner`.
    pub fn prunes(&self, lb: u64, owner: u32) -> bool {
        lb << 32 | owner as u64 >= self.inc.load(Ordering::Acquire)
    }


    pub fn take_best(&self) -> Option<Vec<u32>> {
        let best = self.best.lock().unwrap();
        (best.0 != NONE).then(|| best.1.clone())
    }

    /// Counts a node; false once the budget is exhausted.
    pub fn tick(&self) -> bool {
        if self.abort.load(Ordering::Relaxed) {
            return false;
        }
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over = n > self.max_nodes
            || (n % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d));
        if over {
            self.abort.store(true, Ordering::Relaxed);
        }
        !over
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub fn aborted(&self) -> bool {
        self.abort.load(Ordering::Relaxed)
    }
}
