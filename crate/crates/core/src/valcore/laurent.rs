//! Laurent polynomials in `t` over the base field, with Gauss valuations.

use std::collections::BTreeMap;
use std::fmt;

use super::rational::{q, Q};
use super::scalar::{FieldMode, Scalar, Val};
use crate::error::{Error, Result};

/// Which derivation a matrix of action refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    /// `d/dt`
    Ddt,
    /// `t d/dt`
    TDdt,
}

impl Derivation {
    pub fn name(&self) -> &'static str {
        match self {
            Derivation::Ddt => "ddt",
            Derivation::TDdt => "t_ddt",
        }
    }
}

/// Finite sum `Σ c_n t^n`; no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Scalar>,
}

impl LaurentPoly {
    pub fn new(terms: BTreeMap<i64, Scalar>) -> Self {
        LaurentPoly { terms: terms.into_iter().filter(|(_, c)| !c.is_exact_zero()).collect() }
    }

    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Scalar, n: i64) -> Self {
        Self::new(BTreeMap::from([(n, c)]))
    }

    pub fn t_pow(n: i64) -> Self {
        Self::monomial(Scalar::one(), n)
    }

    pub fn from_q(c: Q) -> Self {
        Self::constant(Scalar::Rat(c))
    }

    /// From `(exponent, rational)` pairs.
    pub fn from_rationals(pairs: &[(i64, Q)]) -> Self {
        let mut p = LaurentPoly::zero();
        for (n, c) in pairs {
            p = p.add(&LaurentPoly::monomial(Scalar::Rat(c.clone()), *n));
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<i64, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, n: i64) -> Scalar {
        self.terms.get(&n).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some coefficient is known to be nonzero.
    pub fn is_known_nonzero(&self) -> bool {
        self.terms.values().any(|c| !c.is_indeterminate())
    }

    pub fn is_zero_checked(&self) -> Result<bool> {
        if self.is_known_nonzero() {
            return Ok(false);
        }
        if self.terms.is_empty() {
            return Ok(true);
        }
        Err(Error::PrecisionExhausted("zero test on a polynomial with only O(u^n) coefficients".into()))
    }

    pub fn lowest(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn highest(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|n| *n == 0)
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.lowest().map_or(false, |n| n < 0)
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut t = self.terms.clone();
        for (n, c) in &o.terms {
            let v = match t.get(n) {
                Some(a) => a.add(c),
                None => c.clone(),
            };
            t.insert(*n, v);
        }
        LaurentPoly::new(t)
    }

    pub fn sub(&self, o: &LaurentPoly) -> LaurentPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(n, c)| (*n, c.neg())).collect() }
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut t: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                let prod = a.mul(b);
                let v = match t.get(&(i + j)) {
                    Some(x) => x.add(&prod),
                    None => prod,
                };
                t.insert(i + j, v);
            }
        }
        LaurentPoly::new(t)
    }

    pub fn scale(&self, c: &Scalar) -> LaurentPoly {
        LaurentPoly::new(self.terms.iter().map(|(n, x)| (*n, x.mul(c))).collect())
    }

    pub fn scale_q(&self, c: &Q) -> LaurentPoly {
        LaurentPoly::new(self.terms.iter().map(|(n, x)| (*n, x.scale(c))).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(n, c)| (n + k, c.clone())).collect() }
    }

    pub fn derive(&self, d: Derivation) -> LaurentPoly {
        let off = match d {
            Derivation::Ddt => -1,
            Derivation::TDdt => 0,
        };
        LaurentPoly::new(self.terms.iter().map(|(n, c)| (n + off, c.scale(&q(*n)))).collect())
    }

    /// `w_r(f) = min_n (val(c_n) + n r)`; `Inf` iff `f = 0`.
    pub fn gauss_val(&self, r: &Q, mode: &FieldMode) -> Result<Val> {
        let mut known = Val::Inf;
        let mut unknown = Val::Inf;
        for (n, c) in &self.terms {
            let shift = r * q(*n);
            if c.is_indeterminate() {
                unknown = unknown.min(c.val_lb(mode).shift(&shift));
            } else {
                known = known.min(c.val(mode)?.shift(&shift));
            }
        }
        if unknown < known {
            return Err(Error::PrecisionExhausted(format!(
                "Gauss valuation at r = {} is below the known precision",
                Val::Fin(r.clone())
            )));
        }
        Ok(known)
    }

    /// Lower bound for `w_r` that never fails.
    pub fn gauss_val_lb(&self, r: &Q, mode: &FieldMode) -> Val {
        self.terms
            .iter()
            .map(|(n, c)| c.val_lb(mode).shift(&(r * q(*n))))
            .min()
            .unwrap_or(Val::Inf)
    }

    /// Minimum of `w_r` over `[r1, r2]`, attained at an endpoint by log-convexity.
    pub fn interval_gauss_val(&self, r1: &Q, r2: &Q, mode: &FieldMode) -> Result<Val> {
        if r1 > r2 {
            return Err(Error::IntervalOrder { r1: Val::Fin(r1.clone()).to_string(), r2: Val::Fin(r2.clone()).to_string() });
        }
        Ok(self.gauss_val(r1, mode)?.min(self.gauss_val(r2, mode)?))
    }

    /// The unique term attaining `w_r`, if there is exactly one.
    pub fn dominant_term(&self, r: &Q, mode: &FieldMode) -> Result<Option<(i64, Scalar)>> {
        let w = self.gauss_val(r, mode)?;
        let mut hit = None;
        for (n, c) in &self.terms {
            if c.is_indeterminate() {
                if c.val_lb(mode).shift(&(r * q(*n))) <= w {
                    return Ok(None);
                }
                continue;
            }
            if c.val(mode)?.shift(&(r * q(*n))) == w {
                if hit.is_some() {
                    return Ok(None);
                }
                hit = Some((*n, c.clone()));
            }
        }
        Ok(hit)
    }

    /// Drops every part of Gauss valuation (at `r`) at least `bound`.
    pub fn round_gauss(&self, r: &Q, bound: &Q, mode: &FieldMode) -> LaurentPoly {
        let mut t = BTreeMap::new();
        for (n, c) in &self.terms {
            let b = bound - r * q(*n);
            let c2 = c.round(mode, &b);
            if !c2.is_exact_zero() && !c2.is_indeterminate() {
                t.insert(*n, c2);
            }
        }
        LaurentPoly::new(t)
    }

    /// Drops terms with exponent at least `n` (t-adic truncation).
    pub fn truncate_t(&self, n: i64) -> LaurentPoly {
        LaurentPoly { terms: self.terms.range(..n).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// Exact quotient `self / d`; fails if `d` does not divide `self`.
    pub fn exact_div(&self, d: &LaurentPoly, mode: &FieldMode) -> Result<LaurentPoly> {
        if d.is_zero() {
            return Err(Error::DegenerateInput("division by the zero polynomial".into()));
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        let (dl, dh) = (d.lowest().unwrap(), d.highest().unwrap());
        if dl == dh {
            let inv = d.terms[&dl].inv(mode)?;
            return Ok(self.scale(&inv).shift(-dl));
        }
        // Divide from whichever end has an exactly invertible coefficient.
        let top = d.terms[&dh].is_exact() || !d.terms[&dl].is_exact();
        let (lead_exp, lead_inv) = if top {
            (dh, d.terms[&dh].inv(mode)?)
        } else {
            (dl, d.terms[&dl].inv(mode)?)
        };
        let (sl, sh) = (self.lowest().unwrap(), self.highest().unwrap());
        let (qlo, qhi) = (sl - dl, sh - dh);
        if qlo > qhi {
            return Err(Error::DegenerateInput("inexact polynomial division".into()));
        }
        let mut rem = self.clone();
        let mut quo = BTreeMap::new();
        let steps: Box<dyn Iterator<Item = i64>> = if top {
            Box::new((qlo..=qhi).rev())
        } else {
            Box::new(qlo..=qhi)
        };
        for k in steps {
            let c = rem.coeff(k + lead_exp);
            if c.is_exact_zero() {
                continue;
            }
            let qc = c.mul(&lead_inv);
            rem = rem.sub(&d.scale(&qc).shift(k));
            rem.terms.remove(&(k + lead_exp));
            quo.insert(k, qc);
        }
        if rem.is_known_nonzero() {
            return Err(Error::DegenerateInput("inexact polynomial division".into()));
        }
        Ok(LaurentPoly::new(quo))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> LaurentPoly {
        LaurentPoly::new(self.terms.iter().map(|(n, c)| (*n, f(c))).collect())
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(0)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(|c| c.is_exact())
    }

    pub fn all_rational(&self) -> bool {
        self.terms.values().all(|c| matches!(c, Scalar::Rat(_)))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(n, c)| {
                let c = match c {
                    Scalar::Ser(_) => format!("({c})"),
                    _ => c.to_string(),
                };
                match *n {
                    0 => c,
                    1 => format!("{c}*t"),
                    n => format!("{c}*t^{n}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valcore::rational::qf;

    fn lp(pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_rationals(&pairs.iter().map(|(n, c)| (*n, q(*c))).collect::<Vec<_>>())
    }

    #[test]
    fn gauss_valuation_examples() {
        let m = FieldMode::padic(2).unwrap();
        assert_eq!(lp(&[(0, 1), (1, 2)]).gauss_val(&q(0), &m).unwrap(), Val::Fin(q(0)));
        assert_eq!(lp(&[(-1, 1)]).gauss_val(&qf(3, 2), &m).unwrap(), Val::Fin(qf(-3, 2)));
        assert_eq!(lp(&[(0, 2), (1, 1)]).gauss_val(&q(2), &m).unwrap(), Val::Fin(q(1)));
        assert_eq!(LaurentPoly::zero().gauss_val(&q(1), &m).unwrap(), Val::Inf);
    }

    #[test]
    fn interval_examples() {
        let m = FieldMode::padic(2).unwrap();
        assert_eq!(lp(&[(1, 1)]).interval_gauss_val(&q(0), &q(1), &m).unwrap(), Val::Fin(q(0)));
        assert_eq!(lp(&[(-1, 1)]).interval_gauss_val(&q(0), &q(1), &m).unwrap(), Val::Fin(q(-1)));
        assert_eq!(lp(&[(0, 2), (1, 1)]).interval_gauss_val(&q(0), &q(2), &m).unwrap(), Val::Fin(q(0)));
        assert!(matches!(lp(&[(0, 1)]).interval_gauss_val(&q(1), &q(0), &m), Err(Error::IntervalOrder { .. })));
    }

    #[test]
    fn derive_examples() {
        assert_eq!(lp(&[(2, 1)]).derive(Derivation::Ddt), lp(&[(1, 2)]));
        assert_eq!(lp(&[(-1, 1)]).derive(Derivation::TDdt), lp(&[(-1, -1)]));
        assert!(lp(&[(0, 1)]).derive(Derivation::Ddt).is_zero());
        assert!(lp(&[(0, 1)]).derive(Derivation::TDdt).is_zero());
    }

    #[test]
    fn exact_division() {
        let m = FieldMode::padic(3).unwrap();
        let a = lp(&[(-1, 1), (0, 2), (3, -5)]);
        let b = lp(&[(0, 1), (2, 7)]);
        let c = a.mul(&b);
        assert_eq!(c.exact_div(&b, &m).unwrap(), a);
        assert_eq!(c.exact_div(&a, &m).unwrap(), b);
        assert!(a.exact_div(&b, &m).is_err());
    }
}
