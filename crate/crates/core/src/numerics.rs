//! Scalar root finding and minimization.
//!
//! Both boosting equations that need a numeric solve (the hyperbolic
//! equation for the cost-sensitive goodness and the class-dependent
//! polynomial) have cheap evaluations and a guaranteed bracket, so plain
//! bisection is used throughout.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Upper end of the bracket expansion in [`positive_poly_root`].
pub const POLY_ROOT_LIMIT: f64 = 1e6;

/// Interval with a sign change of the target function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Evaluates `f` at both ends and checks that a sign change is enclosed.
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        Self::from_values(lo, hi, f(lo), f(hi))
    }

    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Input(format!("bracket requires lo < hi, got [{lo}, {hi}]")));
        }
        if f_lo.is_nan() || f_hi.is_nan() || f_lo * f_hi > 0.0 {
            return Err(Error::Input(format!(
                "no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}"
            )));
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }
}

/// Bisection until the bracket is narrower than `tol` or an exact zero is hit.
pub fn bisect<F: Fn(f64) -> f64>(f: F, bracket: Bracket, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let Bracket { mut lo, mut hi, f_lo, f_hi } = bracket;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if hi - lo < tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = lo + 0.5 * (hi - lo);
    if hi - lo < tol {
        Ok(mid)
    } else {
        Err(Error::NonConvergence { iterations: max_iter, best: mid })
    }
}

/// `x^n` by repeated squaring.
pub fn int_pow(x: f64, mut n: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

/// Sparse polynomial with non-negative integer exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<u32, f64>,
}

impl Polynomial {
    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed and zero coefficients dropped.
    pub fn from_terms(terms: &[(u32, f64)]) -> Self {
        let mut map = BTreeMap::new();
        for &(exp, coef) in terms {
            *map.entry(exp).or_insert(0.0) += coef;
        }
        map.retain(|_, c| *c != 0.0);
        Self { terms: map }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|(&e, &c)| c * int_pow(x, e)).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Number of sign changes in the coefficient sequence ordered by exponent.
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<bool> = self.terms.values().map(|c| *c > 0.0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Unique positive root of a polynomial whose coefficients change sign once.
///
/// The bracket is grown over `[0, 1], [1, 2], [2, 4], ...` up to
/// [`POLY_ROOT_LIMIT`] and then bisected to an absolute width of `1e-12`.
pub fn positive_poly_root(terms: &[(u32, f64)]) -> Result<f64> {
    let poly = Polynomial::from_terms(terms);
    let lowest = poly
        .terms()
        .next()
        .ok_or_else(|| Error::Input("polynomial has no non-zero terms".into()))?;
    // sign of p just above zero
    let sign_at_zero = lowest.1.signum();
    let f = |x: f64| poly.eval(x);

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut f_hi = f(hi);
    while f_hi * sign_at_zero > 0.0 {
        if hi >= POLY_ROOT_LIMIT {
            return Err(Error::NoRoot { limit: POLY_ROOT_LIMIT });
        }
        lo = hi;
        hi = (hi * 2.0).min(POLY_ROOT_LIMIT);
        f_hi = f(hi);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let f_lo = if lo == 0.0 { sign_at_zero } else { f(lo) };
    let bracket = Bracket::from_values(lo, hi, f_lo, f_hi)?;
    bisect(f, bracket, 1e-12, 200)
}

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_minimize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    const MAX_ITER: usize = 10_000;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while b - a > tol && iter < MAX_ITER {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    0.5 * (a + b)
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_linear() {
        let f = |x: f64| x - 1.0;
        let x = bisect(f, Bracket::new(f, 0.0, 2.0).unwrap(), 1e-12, 200).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_sqrt_two() {
        let f = |x: f64| x * x - 2.0;
        let x = bisect(f, Bracket::new(f, 0.0, 2.0).unwrap(), 1e-12, 200).unwrap();
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn bisect_reports_non_convergence() {
        let f = |x: f64| x - 0.3;
        let err = bisect(f, Bracket::new(f, 0.0, 1.0).unwrap(), 1e-12, 5).unwrap_err();
        match err {
            Error::NonConvergence { iterations, best } => {
                assert_eq!(iterations, 5);
                assert!((best - 0.3).abs() < 0.05);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bisect_is_stable_past_convergence() {
        let f = |x: f64| x.exp() - 3.0;
        let b = Bracket::new(f, 0.0, 4.0).unwrap();
        let a = bisect(f, b, 1e-12, 60).unwrap();
        let c = bisect(f, b, 1e-12, 10_000).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn bracket_rejects_same_sign() {
        assert!(Bracket::new(|x| x * x + 1.0, -1.0, 1.0).is_err());
        assert!(Bracket::new(|x| x, 1.0, -1.0).is_err());
    }

    #[test]
    fn poly_root_sqrt_three() {
        let r = positive_poly_root(&[(2, 1.0), (0, -3.0)]).unwrap();
        assert!((r - 3f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn poly_root_requires_sign_change() {
        assert!(matches!(
            positive_poly_root(&[(2, 1.0), (0, 3.0)]),
            Err(Error::NoRoot { .. })
        ));
    }

    #[test]
    fn int_pow_matches_powi() {
        for n in 0..40 {
            let x = 1.0 + n as f64 / 17.0;
            let rel = (int_pow(x, n) - x.powi(n as i32)).abs() / x.powi(n as i32);
            assert!(rel < 1e-13, "n={n}");
        }
    }

    #[test]
    fn golden_quadratic() {
        let x = golden_minimize(|x| (x - 2.0) * (x - 2.0), 0.0, 5.0, 1e-10);
        assert!((x - 2.0).abs() < 1e-8);
    }

    #[test]
    fn golden_symmetric_exponential_loss() {
        // eps * e^a + (1 - eps) * e^-a with eps = 0.25
        let x = golden_minimize(|a| 0.25 * a.exp() + 0.75 * (-a).exp(), 0.0, 5.0, 1e-10);
        assert!((x - 0.5 * 3f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 10_000));
        let s = compensated_sum(v.iter().copied());
        assert!((s - (1.0 + 1e-12)).abs() < 1e-15);
    }
}
