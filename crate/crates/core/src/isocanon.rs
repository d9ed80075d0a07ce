//! Canonical labeling of set systems under coordinate permutations.
//!
//! Individualization and refinement: coordinates are split into an ordered
//! partition by how they meet the blocks (per block tag and weight, then per
//! cell counts), the residual symmetry is searched by individualizing one
//! coordinate at a time, and the canonical form is the least sorted block
//! list over all leaves of that tree. Automorphisms found at equal leaves
//! prune sibling subtrees in the same orbit and give the group order as the
//! product of orbit sizes along the first path.
//!
//! Blocks may carry a small tag (`u8`) that permutations preserve; the search
//! engine uses tags to canonicalize "chosen" and "excluded" blocks together.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::setsys::{permute_mask, Mask, SetSystem};

/// Largest ground set handled by the canonicalizer.
pub const MAX_CANON_N: usize = 16;

pub type Item = (u8, Mask);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalForm {
    pub n: usize,
    pub canonical_blocks: Vec<Mask>,
    pub aut_order: u64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TaggedCanon {
    pub items: Vec<Item>,
    pub aut_order: u64,
    /// `labeling[v]` is the new position of coordinate `v`.
    pub labeling: Vec<usize>,
}

pub fn canonical_form(d: &SetSystem) -> Result<CanonicalForm> {
    let items: Vec<Item> = d.blocks().iter().map(|&b| (0, b)).collect();
    let c = canonical_tagged(d.n(), &items)?;
    Ok(CanonicalForm {
        n: d.n(),
        canonical_blocks: c.items.into_iter().map(|(_, m)| m).collect(),
        aut_order: c.aut_order,
    })
}

pub fn are_isomorphic(a: &SetSystem, b: &SetSystem) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::Parameter(format!(
            "ground sets differ: {} vs {}",
            a.n(),
            b.n()
        )));
    }
    if a.len() != b.len() {
        return Ok(false);
    }
    Ok(canonical_form(a)?.canonical_blocks == canonical_form(b)?.canonical_blocks)
}

pub fn automorphism_order(d: &SetSystem) -> Result<u64> {
    Ok(canonical_form(d)?.aut_order)
}

pub fn canonical_tagged(n: usize, items: &[Item]) -> Result<TaggedCanon> {
    if n == 0 || n > MAX_CANON_N {
        return Err(Error::Capability(format!(
            "canonical labeling supports 1 <= n <= {MAX_CANON_N}, got {n}"
        )));
    }
    let mut items: Vec<Item> = items.to_vec();
    items.sort_unstable();
    items.dedup();
    let mut s = Search {
        n,
        items: &items,
        first: None,
        best: None,
        generators: Vec::new(),
        orbit_sizes: Vec::new(),
        scratch: Vec::with_capacity(items.len()),
    };
    let root = s.refine(vec![(0..n).collect()]);
    s.search(root, &mut Vec::new(), true, 0);
    let (cert, labeling) = s.best.take().unwrap();
    let aut_order = s.orbit_sizes.iter().product();
    Ok(TaggedCanon {
        items: cert,
        aut_order,
        labeling,
    })
}

type Partition = Vec<Vec<usize>>;

enum Flow {
    Continue,
    /// Unwind to the first-path node at this depth.
    Jump(usize),
}

struct Search<'a> {
    n: usize,
    items: &'a [Item],
    first: Option<(Vec<Item>, Vec<usize>)>,
    best: Option<(Vec<Item>, Vec<usize>)>,
    generators: Vec<Vec<usize>>,
    orbit_sizes: Vec<u64>,
    scratch: Vec<u128>,
}

impl Search<'_> {
    fn refine(&mut self, mut part: Partition) -> Partition {
        let n = self.n;
        loop {
            if part.len() == n {
                return part;
            }
            let cell_masks: Vec<Mask> = part
                .iter()
                .map(|c| c.iter().fold(0, |m, &v| m | 1 << v))
                .collect();
            self.scratch.clear();
            for &(tag, m) in self.items {
                let mut key = tag as u128;
                for cm in &cell_masks {
                    key = key << 5 | (m & cm).count_ones() as u128;
                }
                self.scratch.push(key);
            }
            let mut sigs: Vec<Vec<u128>> = vec![Vec::new(); n];
            for (i, &(_, m)) in self.items.iter().enumerate() {
                let mut bits = m;
                while bits != 0 {
                    let v = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    sigs[v].push(self.scratch[i]);
                }
            }
            for s in sigs.iter_mut() {
                s.sort_unstable();
            }
            let mut next: Partition = Vec::with_capacity(part.len());
            let mut split = false;
            for cell in &part {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut members = cell.clone();
                members.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]).then(a.cmp(&b)));
                let mut start = 0;
                for i in 1..=members.len() {
                    if i == members.len() || sigs[members[i]] != sigs[members[start]] {
                        let mut piece = members[start..i].to_vec();
                        piece.sort_unstable();
                        next.push(piece);
                        start = i;
                    }
                }
                if next.len() > 0 && members.len() != next.last().unwrap().len() {
                    split = true;
                }
            }
            if !split && next.len() == part.len() {
                return next;
            }
            part = next;
        }
    }

    fn certificate(&self, part: &Partition) -> (Vec<Item>, Vec<usize>) {
        let mut pos = vec![0usize; self.n];
        for (i, cell) in part.iter().enumerate() {
            pos[cell[0]] = i;
        }
        let mut cert: Vec<Item> = self
            .items
            .iter()
            .map(|&(t, m)| (t, permute_mask(m, &pos)))
            .collect();
        cert.sort_unstable();
        (cert, pos)
    }

    /// `a^{-1} ∘ b`: maps `v` to the vertex placed where `b` places `v`.
    fn automorphism(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; self.n];
        for (v, &p) in a.iter().enumerate() {
            inv[p] = v;
        }
        (0..self.n).map(|v| inv[b[v]]).collect()
    }

    fn orbit_roots(&self, prefix: &[usize]) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &self.generators {
            if prefix.iter().any(|&v| g[v] != v) {
                continue;
            }
            for v in 0..self.n {
                let (a, b) = (find(&mut parent, v), find(&mut parent, g[v]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..self.n).map(|v| find(&mut parent, v)).collect()
    }

    fn search(&mut self, part: Partition, prefix: &mut Vec<usize>, on_first: bool, anchor: usize) -> Flow {
        let depth = prefix.len();
        if part.len() == self.n {
            let (cert, pos) = self.certificate(&part);
            let Some((first_cert, first_pos)) = &self.first else {
                self.first = Some((cert.clone(), pos.clone()));
                self.best = Some((cert, pos));
                return Flow::Continue;
            };
            if &cert == first_cert {
                let g = self.automorphism(first_pos, &pos);
                self.generators.push(g);
                return Flow::Jump(anchor);
            }
            let (best_cert, best_pos) = self.best.as_ref().unwrap();
            match cert.cmp(best_cert) {
                Ordering::Equal => {
                    let g = self.automorphism(best_pos, &pos);
                    self.generators.push(g);
                }
                Ordering::Less => self.best = Some((cert, pos)),
                Ordering::Greater => {}
            }
            return Flow::Continue;
        }

        // smallest non-singleton cell, earliest on ties
        let target = (0..part.len())
            .filter(|&i| part[i].len() > 1)
            .min_by_key(|&i| (part[i].len(), i))
            .unwrap();
        let children = part[target].clone();
        let mut explored: Vec<usize> = Vec::new();
        for (ci, &w) in children.iter().enumerate() {
            if !explored.is_empty() {
                let roots = self.orbit_roots(prefix);
                if explored.iter().any(|&e| roots[e] == roots[w]) {
                    continue;
                }
            }
            let mut child = Vec::with_capacity(part.len() + 1);
            for (i, cell) in part.iter().enumerate() {
                if i == target {
                    child.push(vec![w]);
                    child.push(cell.iter().copied().filter(|&v| v != w).collect());
                } else {
                    child.push(cell.clone());
                }
            }
            let child = self.refine(child);
            let child_first = on_first && ci == 0;
            let child_anchor = if on_first && ci > 0 { depth } else { anchor };
            prefix.push(w);
            let flow = self.search(child, prefix, child_first, child_anchor);
            prefix.pop();
            explored.push(w);
            if let Flow::Jump(level) = flow {
                if level < depth {
                    return Flow::Jump(level);
                }
            }
        }
        if on_first {
            let roots = self.orbit_roots(prefix);
            let r = roots[children[0]];
            let size = children.iter().filter(|&&v| roots[v] == r).count() as u64;
            self.orbit_sizes.push(size);
        }
        Flow::Continue
    }
}
