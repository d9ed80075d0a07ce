//! Floating-point packing LP used to guide the search.
//!
//! Solves `max sum_t w_t` s.t. `sum_{t in cov(c)} w_t <= 1` for every
//! candidate `c`, `w >= 0`. The slack basis is feasible, so there is no phase
//! one. The covering primal `x_c` is read off the slack reduced costs.
//!
//! Nothing here is trusted for pruning directly: [`discretize`] turns `w`
//! into integer weights that satisfy the packing condition exactly.

const EPS: f64 = 1e-9;

#[derive(Default)]
pub struct PackingLp {
    tab: Vec<f64>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

pub struct PackingSolution {
    /// Weight per target column.
    pub w: Vec<f64>,
    /// Covering LP value per candidate row.
    pub x: Vec<f64>,
    pub value: f64,
}

impl PackingLp {
    /// `rows[c]` lists the target columns candidate `c` covers.
    pub fn solve(&mut self, rows: &[Vec<usize>], ncols: usize) -> Option<PackingSolution> {
        let nr = rows.len();
        let width = ncols + nr;
        self.tab.clear();
        self.tab.resize(nr * width, 0.0);
        self.rhs.clear();
        self.rhs.resize(nr, 1.0);
        self.obj.clear();
        self.obj.resize(width, 0.0);
        self.basis.clear();
        for (r, cols) in rows.iter().enumerate() {
            for &c in cols {
                self.tab[r * width + c] = 1.0;
            }
            self.tab[r * width + ncols + r] = 1.0;
            self.basis.push(ncols + r);
        }
        for c in 0..ncols {
            self.obj[c] = -1.0;
        }
        let max_iter = 50 * (nr + ncols) + 100;
        let mut degenerate = 0usize;
        let mut iter = 0;
        loop {
            iter += 1;
            if iter > max_iter {
                return None;
            }
            let bland = degenerate > 30;
            let mut enter = None;
            let mut best = -EPS;
            for j in 0..width {
                let d = self.obj[j];
                if d < -EPS {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if d < best {
                        best = d;
                        enter = Some(j);
                    }
                }
            }
            let Some(col) = enter else { break };
            let mut leave = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..nr {
                let a = self.tab[r * width + col];
                if a > EPS {
                    let ratio = self.rhs[r] / a;
                    if ratio < best_ratio - EPS
                        || (ratio < best_ratio + EPS
                            && leave.map_or(true, |l: usize| self.basis[r] < self.basis[l]))
                    {
                        best_ratio = ratio;
                        leave = Some(r);
                    }
                }
            }
            let r = leave?;
            if best_ratio < EPS {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let piv = self.tab[r * width + col];
            for j in 0..width {
                self.tab[r * width + j] /= piv;
            }
            self.rhs[r] /= piv;
            let (before, rest) = self.tab.split_at_mut(r * width);
            let (prow, after) = rest.split_at_mut(width);
            for (i, row) in before
                .chunks_mut(width)
                .chain(after.chunks_mut(width))
                .enumerate()
            {
                let i = if i < r { i } else { i + 1 };
                let f = row[col];
                if f.abs() > 0.0 {
                    for j in 0..width {
                        row[j] -= f * prow[j];
                    }
                    self.rhs[i] -= f * self.rhs[r];
                }
            }
            let f = self.obj[col];
            for j in 0..width {
                self.obj[j] -= f * prow[j];
            }
            self.basis[r] = col;
        }
        let mut w = vec![0.0; ncols];
        for r in 0..nr {
            if self.basis[r] < ncols {
                w[self.basis[r]] = self.rhs[r].max(0.0);
            }
        }
        let x = (0..nr).map(|r| self.obj[ncols + r].max(0.0)).collect();
        let value = w.iter().sum();
        Some(PackingSolution { w, x, value })
    }
}

/// Integer scale of discretized weights.
pub const SCALE: u64 = 1 << 20;

/// Rounds `w` down to multiples of `1/SCALE` and rescales so that every row
/// sum is at most `SCALE`. Returns the exact bound `ceil(sum / SCALE)`.
pub fn discretize(w: &[f64], rows: &[Vec<usize>]) -> u64 {
    let mut wi: Vec<u64> = w
        .iter()
        .map(|&v| if v > 0.0 { (v * SCALE as f64).floor() as u64 } else { 0 })
        .collect();
    let max_row = rows
        .iter()
        .map(|cols| cols.iter().map(|&c| wi[c]).sum::<u64>())
        .max()
        .unwrap_or(0);
    if max_row > SCALE {
        for v in wi.iter_mut() {
            *v = ((*v as u128 * SCALE as u128) / max_row as u128) as u64;
        }
    }
    let total: u64 = wi.iter().sum();
    total.div_ceil(SCALE)
}
