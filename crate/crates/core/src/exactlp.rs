//! Exact closed forms for the continuous relaxation of the asymmetric
//! covering problem: the partial exponential sums `R_n(x)`, the optimal value
//! `E(n)`, the primal and dual weight-enumerator witnesses, and the banded
//! relaxation value `2^(n+1)/(n+2)`.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

static FACTORIALS: RwLock<Vec<BigInt>> = RwLock::new(Vec::new());

/// `n!`, memoised across calls.
pub fn factorial(n: usize) -> BigInt {
    if let Some(f) = FACTORIALS.read().unwrap().get(n) {
        return f.clone();
    }
    let mut cache = FACTORIALS.write().unwrap();
    if cache.is_empty() {
        cache.push(BigInt::one());
    }
    while cache.len() <= n {
        let next = cache.last().unwrap() * BigInt::from(cache.len());
        cache.push(next);
    }
    cache[n].clone()
}

fn binom(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Polynomial with rational coefficients, `coeffs[w]` multiplying `z^w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightPoly {
    pub coeffs: Vec<Rational>,
}

impl WeightPoly {
    pub fn zero(degree: usize) -> Self {
        WeightPoly {
            coeffs: vec![Rational::zero(); degree + 1],
        }
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `(z+1)^n`
    pub fn binomial_power(n: usize) -> Self {
        WeightPoly {
            coeffs: (0..=n).map(|w| Rational::from_integer(binom(n, w))).collect(),
        }
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn at_one(&self) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |a, c| a + c)
    }

    pub fn derivative(&self) -> Self {
        let mut coeffs = vec![Rational::zero(); self.coeffs.len()];
        for w in 1..self.coeffs.len() {
            coeffs[w - 1] = &self.coeffs[w] * Rational::from_integer(BigInt::from(w));
        }
        WeightPoly { coeffs }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        WeightPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let len = self.coeffs.len().max(o.coeffs.len());
        let zero = Rational::zero();
        WeightPoly {
            coeffs: (0..len)
                .map(|i| f(self.coeffs.get(i).unwrap_or(&zero), o.coeffs.get(i).unwrap_or(&zero)))
                .collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Single monomial `c z^w` padded to `degree`.
    pub fn monomial(degree: usize, w: usize, c: Rational) -> Self {
        let mut p = Self::zero(degree);
        p.coeffs[w] = c;
        p
    }
}

/// Degree-`n` partial sum of `e^{-x}`: `sum_{k=0}^n (-x)^k / k!`.
pub fn partial_sum_r(n: i64, x: &Rational) -> Result<Rational> {
    if n < 0 {
        return Err(Error::Parameter(format!("partial sum degree must be >= 0, got {n}")));
    }
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    let neg_x = -x.clone();
    for k in 0..=n as usize {
        if k > 0 {
            term = term * &neg_x / Rational::from_integer(BigInt::from(k));
        }
        sum += &term;
    }
    Ok(sum)
}

fn sign_factorial(n: usize) -> Rational {
    let f = Rational::from_integer(factorial(n));
    if n % 2 == 1 {
        -f
    } else {
        f
    }
}

/// Optimal value of the continuous relaxation,
/// `E(n) = (-1)^n n! { R_n(2) - R_n(1) R_{n-1}(1) }`.
pub fn continuous_bound_e(n: i64) -> Result<Rational> {
    if n < 1 {
        return Err(Error::Parameter(format!("E(n) needs n >= 1, got {n}")));
    }
    let one = Rational::one();
    let two = int(2);
    let inner = partial_sum_r(n, &two)? - partial_sum_r(n, &one)? * partial_sum_r(n - 1, &one)?;
    Ok(sign_factorial(n as usize) * inner)
}

/// Coefficients of `R_m(z)` as a polynomial of degree bound `deg`.
fn r_poly(m: usize, deg: usize) -> WeightPoly {
    let mut p = WeightPoly::zero(deg);
    for k in 0..=m {
        let c = Rational::new(BigInt::one(), factorial(k));
        p.coeffs[k] = if k % 2 == 1 { -c } else { c };
    }
    p
}

/// Coefficients of `R_m(z + 1)`.
fn r_shift_poly(m: usize, deg: usize) -> WeightPoly {
    let mut p = WeightPoly::zero(deg);
    for k in 0..=m {
        let base = Rational::new(BigInt::one(), factorial(k));
        let base = if k % 2 == 1 { -base } else { base };
        for j in 0..=k {
            p.coeffs[j] += &base * Rational::from_integer(binom(k, j));
        }
    }
    p
}

/// Primal `A(z)` and dual `B(z)` weight enumerators certifying `E(n)`.
pub fn witness_polys(n: usize) -> Result<(WeightPoly, WeightPoly)> {
    if n < 1 {
        return Err(Error::Parameter("witness polynomials need n >= 1".into()));
    }
    let one = Rational::one();
    let s = sign_factorial(n);
    let rn1 = partial_sum_r(n as i64, &one)?;
    let rn1m = partial_sum_r(n as i64 - 1, &one)?;
    let shift = r_shift_poly(n, n);
    let primal = shift.sub(&r_poly(n - 1, n).scale(&rn1)).scale(&s);
    let dual = shift.sub(&r_poly(n, n).scale(&rn1m)).scale(&s);
    Ok((primal, dual))
}

/// Outcome of the exact feasibility check of the symmetrized LP witnesses.
#[derive(Clone, Debug)]
pub struct SymmetrizedLpReport {
    pub n: usize,
    pub primal: WeightPoly,
    pub dual: WeightPoly,
    /// `A + A' - (z+1)^n`
    pub primal_slack: WeightPoly,
    /// `(z+1)^n - B - B'`
    pub dual_slack: WeightPoly,
    pub value: Rational,
}

/// Verifies, coefficient by coefficient, that `A` is primal feasible, `B`
/// dual feasible, and `A(1) = B(1)`.
pub fn verify_symmetrized_lp(n: usize) -> Result<SymmetrizedLpReport> {
    let (a, b) = witness_polys(n)?;
    let one = Rational::one();
    let target = WeightPoly::binomial_power(n);
    let primal_slack = a.add(&a.derivative()).sub(&target);
    let dual_slack = target.sub(&b.add(&b.derivative()));

    let nn = Rational::from_integer(BigInt::from(n));
    let expect_primal =
        WeightPoly::monomial(n, n - 1, partial_sum_r(n as i64, &one)? * nn);
    let expect_dual = WeightPoly::monomial(n, n, partial_sum_r(n as i64 - 1, &one)?);

    let fail = |what: &str| Err(Error::Internal(format!("n={n}: {what}")));
    if primal_slack != expect_primal {
        return fail("A + A' - (z+1)^n is not R_n(1) n z^(n-1)");
    }
    if dual_slack != expect_dual {
        return fail("(z+1)^n - B - B' is not R_(n-1)(1) z^n");
    }
    if !primal_slack.is_nonnegative() || !dual_slack.is_nonnegative() {
        return fail("negative slack");
    }
    if !a.is_nonnegative() || !b.is_nonnegative() {
        return fail("negative witness coefficient");
    }
    let value = a.at_one();
    if value != b.at_one() {
        return fail("A(1) != B(1)");
    }
    if value != continuous_bound_e(n as i64)? {
        return fail("A(1) != E(n)");
    }
    Ok(SymmetrizedLpReport {
        n,
        primal: a,
        dual: b,
        primal_slack,
        dual_slack,
        value,
    })
}

/// Value of the banded relaxation, `2^(n+1) / (n+2)`.
pub fn banded_lp_value(n: usize) -> Rational {
    Rational::new(BigInt::one() << (n + 1), BigInt::from(n + 2))
}

/// `n^3 | E(n)/2^(n+1) - (1/n - 3/n^2) |`, the scaled remainder of the
/// two-term asymptotic expansion.
pub fn asymptotic_gap(n: usize) -> Result<Rational> {
    if n < 4 {
        return Err(Error::Parameter(format!("asymptotic gap needs n >= 4, got {n}")));
    }
    let e = continuous_bound_e(n as i64)?;
    let scaled = e / Rational::from_integer(BigInt::one() << (n + 1));
    let nn = int(n as i64);
    let approx = nn.recip() - int(3) / (&nn * &nn);
    Ok((scaled - approx).abs() * &nn * &nn * &nn)
}

/// Renders a rational as a mixed fraction (`47 23/40`).
pub fn mixed(r: &Rational) -> String {
    let whole = r.to_integer();
    let frac = r - Rational::from_integer(whole.clone());
    if frac.is_zero() {
        whole.to_string()
    } else {
        format!("{} {}", whole, frac)
    }
}
