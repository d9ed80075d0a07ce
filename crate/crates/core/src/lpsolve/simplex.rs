//! Dense two-phase simplex over exact rationals.
//!
//! Dantzig pricing with a switch to Bland's rule after a run of degenerate
//! pivots; ties in the ratio test go to the lowest basic column. Bland mode
//! guarantees termination.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlp::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug)]
pub struct VarBound {
    pub lo: Rational,
    /// `None` is `+inf`.
    pub hi: Option<Rational>,
}

impl VarBound {
    pub fn nonneg() -> Self {
        VarBound {
            lo: Rational::zero(),
            hi: None,
        }
    }

    pub fn unit() -> Self {
        VarBound {
            lo: Rational::zero(),
            hi: Some(Rational::one()),
        }
    }
}

/// `minimize objective · x` subject to the constraints and per-variable bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>) -> Self {
        let m = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBound::nonneg(); m],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    fn validate(&self) -> Result<()> {
        let m = self.num_vars();
        if m == 0 {
            return Err(Error::Parameter("linear program has no variables".into()));
        }
        if self.bounds.len() != m {
            return Err(Error::Parameter(format!(
                "{} bounds for {m} variables",
                self.bounds.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != m {
                return Err(Error::Parameter(format!(
                    "constraint {i} has {} coefficients, expected {m}",
                    c.coeffs.len()
                )));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let Some(hi) = &b.hi {
                if hi < &b.lo {
                    return Err(Error::Parameter(format!("variable {j}: lo > hi")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    /// One multiplier per constraint; `>= 0` on `Ge` rows and `<= 0` on `Le` rows.
    pub dual: Vec<Rational>,
    /// Multipliers of the finite upper bounds (`<= 0`), zero where `hi` is `None`.
    pub bound_dual: Vec<Rational>,
    pub objective: Rational,
}

impl LpSolution {
    fn status_only(status: LpStatus, m: usize, rows: usize) -> Self {
        LpSolution {
            status,
            primal: vec![Rational::zero(); m],
            dual: vec![Rational::zero(); rows],
            bound_dual: vec![Rational::zero(); m],
            objective: Rational::zero(),
        }
    }

    /// Dual objective `sum y_i b_i + sum z_j hi_j + reduced-cost terms at the
    /// lower bounds`; equals [`LpSolution::objective`] at an optimum.
    pub fn dual_objective(&self, p: &LinearProgram) -> Rational {
        let mut total = Rational::zero();
        for (c, y) in p.constraints.iter().zip(&self.dual) {
            total += y * &c.rhs;
        }
        for (j, b) in p.bounds.iter().enumerate() {
            if let Some(hi) = &b.hi {
                total += &self.bound_dual[j] * hi;
            }
            // reduced cost of x_j paid at its lower bound
            let mut d = p.objective[j].clone();
            for (c, y) in p.constraints.iter().zip(&self.dual) {
                d -= y * &c.coeffs[j];
            }
            d -= &self.bound_dual[j];
            total += d * &b.lo;
        }
        total
    }
}

const DEGENERATE_SWITCH: usize = 50;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    obj: Vec<Rational>,
    obj_val: Rational,
    basis: Vec<usize>,
    blocked: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        let nz: Vec<usize> = (0..self.rows[r].len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        for &j in &nz {
            self.rows[r][j] *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                let t = &f * &prow[j];
                self.rows[i][j] -= t;
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            for &j in &nz {
                let t = &f * &prow[j];
                self.obj[j] -= t;
            }
            self.obj_val -= &f * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    /// Runs the simplex on the current objective row; `Ok(false)` on unbounded.
    fn optimize(&mut self) -> bool {
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= DEGENERATE_SWITCH;
            let mut enter = None;
            let mut best: Option<&Rational> = None;
            for (j, d) in self.obj.iter().enumerate() {
                if self.blocked[j] || !d.is_negative() {
                    continue;
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                if best.map_or(true, |b| d < b) {
                    best = Some(d);
                    enter = Some(j);
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return false };
            if ratio.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }

    fn reset_objective(&mut self, costs: &[Rational]) {
        self.obj = costs.to_vec();
        self.obj_val = Rational::zero();
        for i in 0..self.rows.len() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.obj.len() {
                if !self.rows[i][j].is_zero() {
                    let t = cb * &self.rows[i][j];
                    self.obj[j] -= t;
                }
            }
            self.obj_val -= cb * &self.rhs[i];
        }
    }
}

/// Exact simplex. Returns primal, duals and objective with no rounding.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    p.validate()?;
    let m = p.num_vars();
    let ncons = p.constraints.len();

    // Shift x = lo + x', upper bounds become extra rows.
    struct Row {
        coeffs: Vec<Rational>,
        rel: Relation,
        rhs: Rational,
        flipped: bool,
    }
    let mut rows: Vec<Row> = Vec::new();
    for c in &p.constraints {
        let mut rhs = c.rhs.clone();
        for j in 0..m {
            rhs -= &c.coeffs[j] * &p.bounds[j].lo;
        }
        rows.push(Row {
            coeffs: c.coeffs.clone(),
            rel: c.relation,
            rhs,
            flipped: false,
        });
    }
    let mut bound_row = vec![None; m];
    for (j, b) in p.bounds.iter().enumerate() {
        if let Some(hi) = &b.hi {
            let mut coeffs = vec![Rational::zero(); m];
            coeffs[j] = Rational::one();
            bound_row[j] = Some(rows.len());
            rows.push(Row {
                coeffs,
                rel: Relation::Le,
                rhs: hi - &b.lo,
                flipped: false,
            });
        }
    }
    for r in rows.iter_mut() {
        if r.rhs.is_negative() {
            r.flipped = true;
            r.rhs = -r.rhs.clone();
            for c in r.coeffs.iter_mut() {
                *c = -c.clone();
            }
            r.rel = match r.rel {
                Relation::Ge => Relation::Le,
                Relation::Le => Relation::Ge,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let nrows = rows.len();
    if nrows == 0 {
        // only lower bounds: optimal at lo unless some cost is negative
        if p.objective.iter().any(|c| c.is_negative()) {
            return Ok(LpSolution::status_only(LpStatus::Unbounded, m, ncons));
        }
        let primal: Vec<Rational> = p.bounds.iter().map(|b| b.lo.clone()).collect();
        let objective = primal.iter().zip(&p.objective).map(|(x, c)| x * c).sum();
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            primal,
            dual: vec![],
            bound_dual: vec![Rational::zero(); m],
            objective,
        });
    }

    // Columns: structural | one aux per Ge/Le row | one artificial per Ge/Eq row.
    let mut aux_col = vec![None; nrows];
    let mut ident_col = vec![0usize; nrows];
    let mut ncols = m;
    for (i, r) in rows.iter().enumerate() {
        if r.rel != Relation::Eq {
            aux_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let mut artificial = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        match r.rel {
            Relation::Le => ident_col[i] = aux_col[i].unwrap(),
            Relation::Ge | Relation::Eq => {
                ident_col[i] = ncols;
                artificial.push(ncols);
                ncols += 1;
            }
        }
    }
    let mut t = Tableau {
        rows: Vec::with_capacity(nrows),
        rhs: Vec::with_capacity(nrows),
        obj: vec![],
        obj_val: Rational::zero(),
        basis: ident_col.clone(),
        blocked: vec![false; ncols],
    };
    for (i, r) in rows.iter().enumerate() {
        let mut row = vec![Rational::zero(); ncols];
        row[..m].clone_from_slice(&r.coeffs);
        if let Some(a) = aux_col[i] {
            row[a] = if r.rel == Relation::Ge {
                -Rational::one()
            } else {
                Rational::one()
            };
        }
        row[ident_col[i]] = Rational::one();
        t.rows.push(row);
        t.rhs.push(r.rhs.clone());
    }

    if !artificial.is_empty() {
        let mut costs = vec![Rational::zero(); ncols];
        for &a in &artificial {
            costs[a] = Rational::one();
        }
        t.reset_objective(&costs);
        t.optimize();
        if !(-t.obj_val.clone()).is_zero() {
            return Ok(LpSolution::status_only(LpStatus::Infeasible, m, ncons));
        }
        let is_art = |c: usize| artificial.binary_search(&c).is_ok();
        for i in 0..nrows {
            if is_art(t.basis[i]) {
                if let Some(j) = (0..ncols).find(|&j| !is_art(j) && !t.rows[i][j].is_zero()) {
                    t.pivot(i, j);
                }
            }
        }
        for &a in &artificial {
            t.blocked[a] = true;
        }
    }

    let mut costs = vec![Rational::zero(); ncols];
    costs[..m].clone_from_slice(&p.objective);
    t.reset_objective(&costs);
    if !t.optimize() {
        return Ok(LpSolution::status_only(LpStatus::Unbounded, m, ncons));
    }

    let mut xs = vec![Rational::zero(); ncols];
    for i in 0..nrows {
        xs[t.basis[i]] = t.rhs[i].clone();
    }
    let primal: Vec<Rational> = (0..m).map(|j| &p.bounds[j].lo + &xs[j]).collect();
    // y_i = c_ident - d_ident with c_ident = 0 in phase 2
    let y: Vec<Rational> = (0..nrows)
        .map(|i| {
            let v = -t.obj[ident_col[i]].clone();
            if rows[i].flipped {
                -v
            } else {
                v
            }
        })
        .collect();
    let dual = y[..ncons].to_vec();
    let bound_dual = (0..m)
        .map(|j| bound_row[j].map_or_else(Rational::zero, |r| y[r].clone()))
        .collect();
    let objective = primal.iter().zip(&p.objective).map(|(x, c)| x * c).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        bound_dual,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::{int, rat};

    #[test]
    fn single_variable() {
        let mut p = LinearProgram::new(vec![int(1)]);
        p.bounds[0] = VarBound {
            lo: int(0),
            hi: Some(int(2)),
        };
        p.add(vec![int(1)], Relation::Ge, int(1));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, int(1));
        assert_eq!(s.dual, vec![int(1)]);
        assert_eq!(s.dual_objective(&p), s.objective);
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
        let mut p = LinearProgram::new(vec![int(-3), int(-5)]);
        p.add(vec![int(1), int(0)], Relation::Le, int(4));
        p.add(vec![int(0), int(2)], Relation::Le, int(12));
        p.add(vec![int(3), int(2)], Relation::Le, int(18));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.objective, int(-36));
        assert_eq!(s.primal, vec![int(2), int(6)]);
        assert_eq!(s.dual, vec![int(0), rat(-3, 2), int(-1)]);
        assert_eq!(s.dual_objective(&p), s.objective);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LinearProgram::new(vec![int(1)]);
        p.add(vec![int(1)], Relation::Ge, int(3));
        p.add(vec![int(1)], Relation::Le, int(2));
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);

        let mut p = LinearProgram::new(vec![int(-1), int(0)]);
        p.add(vec![int(1), int(-1)], Relation::Le, int(1));
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn shifted_bounds_and_equalities() {
        // min x + y, x in [1, 5], y in [-2, 3], x + y = 2, x - y >= 2
        let mut p = LinearProgram::new(vec![int(1), int(1)]);
        p.bounds[0] = VarBound {
            lo: int(1),
            hi: Some(int(5)),
        };
        p.bounds[1] = VarBound {
            lo: int(-2),
            hi: Some(int(3)),
        };
        p.add(vec![int(1), int(1)], Relation::Eq, int(2));
        p.add(vec![int(1), int(-1)], Relation::Ge, int(2));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, int(2));
        assert_eq!(s.dual_objective(&p), s.objective);
    }

    #[test]
    fn dimension_mismatch() {
        let mut p = LinearProgram::new(vec![int(1), int(1)]);
        p.add(vec![int(1)], Relation::Ge, int(1));
        assert!(matches!(solve_lp(&p), Err(Error::Parameter(_))));
    }
}
