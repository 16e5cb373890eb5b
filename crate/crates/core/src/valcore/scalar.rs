//! Base-field models and their valued scalars.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::rational::{ceil_i64, fmt_q, is_prime, padic_round, q, qf, val_q, Q};
use crate::error::{Error, Result};

/// A valuation: a rational or `+∞` (the valuation of zero).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(Q),
    Inf,
}

impl Val {
    pub fn fin(&self) -> Option<&Q> {
        match self {
            Val::Fin(x) => Some(x),
            Val::Inf => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }

    pub fn shift(&self, by: &Q) -> Val {
        match self {
            Val::Fin(x) => Val::Fin(x + by),
            Val::Inf => Val::Inf,
        }
    }

    pub fn plus(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }

    pub fn min(self, other: Val) -> Val {
        std::cmp::min(self, other)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(x) => write!(f, "{}", fmt_q(x)),
            Val::Inf => write!(f, "inf"),
        }
    }
}

/// The two concrete base fields: `Q` with a p-adic valuation, or `Q((u))` with the
/// u-adic valuation and series truncated at relative precision `prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldMode {
    PAdic { p: u64 },
    EqualChar0 { prec: u32 },
}

impl FieldMode {
    pub fn padic(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FieldMode::PAdic { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn eqchar0(prec: u32) -> Result<Self> {
        if prec == 0 {
            return Err(Error::Parameter("precision must be positive".into()));
        }
        Ok(FieldMode::EqualChar0 { prec })
    }

    pub fn p(&self) -> Option<u64> {
        match self {
            FieldMode::PAdic { p } => Some(*p),
            FieldMode::EqualChar0 { .. } => None,
        }
    }

    /// `−log ω`: `1/(p−1)` for p-adic fields, `0` in residue characteristic 0.
    pub fn c_omega(&self) -> Q {
        match self {
            FieldMode::PAdic { p } => qf(1, *p as i64 - 1),
            FieldMode::EqualChar0 { .. } => Q::zero(),
        }
    }

    pub fn require_padic(&self, what: &str) -> Result<u64> {
        self.p().ok_or_else(|| Error::Mode(format!("{what} needs a p-adic field")))
    }

    pub fn require_eqchar0(&self, what: &str) -> Result<u32> {
        match self {
            FieldMode::EqualChar0 { prec } => Ok(*prec),
            _ => Err(Error::Mode(format!("{what} needs residue characteristic 0"))),
        }
    }
}

/// Truncated Laurent series in `u`: known terms below `prec` (absolute), exact when
/// `prec` is `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct USeries {
    terms: BTreeMap<i64, Q>,
    prec: Option<i64>,
}

impl USeries {
    pub fn new(terms: BTreeMap<i64, Q>, prec: Option<i64>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(k, c)| !c.is_zero() && prec.map_or(true, |n| *k < n))
            .collect();
        USeries { terms, prec }
    }

    pub fn exact(terms: BTreeMap<i64, Q>) -> Self {
        Self::new(terms, None)
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Q, k: i64) -> Self {
        Self::exact(BTreeMap::from([(k, c)]))
    }

    pub fn terms(&self) -> &BTreeMap<i64, Q> {
        &self.terms
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn lowest(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Lower bound for the valuation; `None` for an exact zero.
    pub fn val_lb(&self) -> Option<i64> {
        match (self.lowest(), self.prec) {
            (Some(k), _) => Some(k),
            (None, p) => p,
        }
    }

    fn add(&self, o: &USeries) -> USeries {
        let prec = min_opt(self.prec, o.prec);
        let mut t = self.terms.clone();
        for (k, c) in &o.terms {
            let e = t.entry(*k).or_insert_with(Q::zero);
            *e += c;
        }
        USeries::new(t, prec)
    }

    fn neg(&self) -> USeries {
        USeries { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(), prec: self.prec }
    }

    fn mul(&self, o: &USeries) -> USeries {
        let (va, vb) = match (self.val_lb(), o.val_lb()) {
            (Some(a), Some(b)) => (a, b),
            _ => return USeries::exact(BTreeMap::new()),
        };
        let prec = min_opt(self.prec.map(|n| n + vb), o.prec.map(|n| n + va));
        let mut t: BTreeMap<i64, Q> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                if prec.map_or(true, |n| i + j < n) {
                    let e = t.entry(i + j).or_insert_with(Q::zero);
                    *e += a * b;
                }
            }
        }
        USeries::new(t, prec)
    }

    fn scale(&self, c: &Q) -> USeries {
        if c.is_zero() {
            return USeries::exact(BTreeMap::new());
        }
        USeries { terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(), prec: self.prec }
    }

    /// Inverse to relative precision `rel` (exact for exact monomials).
    fn inv(&self, rel: i64) -> Result<USeries> {
        let v = self
            .lowest()
            .ok_or_else(|| Error::PrecisionExhausted("inverse of a series with no known terms".into()))?;
        if self.is_exact() && self.terms.len() == 1 {
            return Ok(USeries::monomial(self.terms[&v].recip(), -v));
        }
        let known = self.prec.map_or(rel, |n| n - v);
        let r = rel.min(known);
        let c0inv = self.terms[&v].recip();
        let coef = |i: i64| self.terms.get(&(v + i)).cloned().unwrap_or_else(Q::zero);
        let mut b: Vec<Q> = vec![c0inv.clone()];
        for k in 1..r {
            let mut s = Q::zero();
            for i in 1..=k {
                let ci = coef(i);
                if !ci.is_zero() {
                    s += ci * &b[(k - i) as usize];
                }
            }
            b.push(-(s * &c0inv));
        }
        let terms = b.into_iter().enumerate().map(|(k, c)| (k as i64 - v, c)).collect();
        Ok(USeries::new(terms, Some(r - v)))
    }

    pub fn truncate(&self, n: i64) -> USeries {
        USeries::new(self.terms.clone(), min_opt(self.prec, Some(n)))
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// An element of the base field: an exact rational, or a u-series in residue
/// characteristic 0. Rationals are constants in both models.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rat(Q),
    Ser(USeries),
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a == b,
            _ => self.to_series() == other.to_series(),
        }
    }
}

impl Eq for Scalar {}

impl From<Q> for Scalar {
    fn from(x: Q) -> Self {
        Scalar::Rat(x)
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Q::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Q::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rat(q(n))
    }

    pub fn to_series(&self) -> USeries {
        match self {
            Scalar::Rat(x) => USeries::constant(x.clone()),
            Scalar::Ser(s) => s.clone(),
        }
    }

    /// The rational value if this scalar is an exact constant.
    pub fn as_rational(&self) -> Option<Q> {
        match self {
            Scalar::Rat(x) => Some(x.clone()),
            Scalar::Ser(s) if s.is_exact() && s.terms.keys().all(|k| *k == 0) => {
                Some(s.terms.get(&0).cloned().unwrap_or_else(Q::zero))
            }
            Scalar::Ser(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Scalar::Rat(_) => true,
            Scalar::Ser(s) => s.is_exact(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Ser(s) => s.is_exact() && s.terms.is_empty(),
        }
    }

    /// True for an inexact series with no known terms (zero to known precision).
    pub fn is_indeterminate(&self) -> bool {
        matches!(self, Scalar::Ser(s) if !s.is_exact() && s.terms.is_empty())
    }

    /// Decides whether this scalar is zero; fails when the known terms cannot tell.
    pub fn is_zero_checked(&self) -> Result<bool> {
        if self.is_indeterminate() {
            return Err(Error::PrecisionExhausted("zero test on a series known only to be small".into()));
        }
        Ok(self.is_exact_zero())
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => Scalar::Ser(self.to_series().add(&o.to_series())),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Ser(s) => Scalar::Ser(s.neg()),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Rat(a), Scalar::Ser(s)) | (Scalar::Ser(s), Scalar::Rat(a)) => Scalar::Ser(s.scale(a)),
            (Scalar::Ser(a), Scalar::Ser(b)) => Scalar::Ser(a.mul(b)),
        }
    }

    pub fn scale(&self, c: &Q) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(a * c),
            Scalar::Ser(s) => Scalar::Ser(s.scale(c)),
        }
    }

    pub fn inv(&self, mode: &FieldMode) -> Result<Scalar> {
        match self {
            Scalar::Rat(a) => {
                if a.is_zero() {
                    Err(Error::DegenerateInput("division by zero".into()))
                } else {
                    Ok(Scalar::Rat(a.recip()))
                }
            }
            Scalar::Ser(s) => {
                if s.is_exact() && s.terms.is_empty() {
                    return Err(Error::DegenerateInput("division by zero".into()));
                }
                let rel = match mode {
                    FieldMode::EqualChar0 { prec } => *prec as i64,
                    FieldMode::PAdic { .. } => return Err(Error::Mode("u-series in a p-adic field".into())),
                };
                Ok(Scalar::Ser(s.inv(rel)?))
            }
        }
    }

    /// Exact valuation; `Inf` for zero.
    pub fn val(&self, mode: &FieldMode) -> Result<Val> {
        match (self, mode) {
            (Scalar::Rat(a), _) if a.is_zero() => Ok(Val::Inf),
            (Scalar::Rat(a), FieldMode::PAdic { p }) => Ok(Val::Fin(q(val_q(a, *p)))),
            (Scalar::Rat(_), FieldMode::EqualChar0 { .. }) => Ok(Val::Fin(Q::zero())),
            (Scalar::Ser(_), FieldMode::PAdic { .. }) => Err(Error::Mode("u-series in a p-adic field".into())),
            (Scalar::Ser(s), FieldMode::EqualChar0 { .. }) => match (s.lowest(), s.prec) {
                (Some(k), _) => Ok(Val::Fin(q(k))),
                (None, None) => Ok(Val::Inf),
                (None, Some(n)) => Err(Error::PrecisionExhausted(format!("valuation of O(u^{n})"))),
            },
        }
    }

    /// Lower bound on the valuation that never fails (`O(u^n)` gives `n`).
    pub fn val_lb(&self, mode: &FieldMode) -> Val {
        match self {
            Scalar::Ser(s) if s.terms.is_empty() => s.prec.map_or(Val::Inf, |n| Val::Fin(q(n))),
            _ => self.val(mode).unwrap_or(Val::Inf),
        }
    }

    /// Drops the part of valuation at least `bound` (p-adic digits or u-terms).
    pub fn round(&self, mode: &FieldMode, bound: &Q) -> Scalar {
        let n = ceil_i64(bound);
        match (self, mode) {
            (Scalar::Rat(a), FieldMode::PAdic { p }) => Scalar::Rat(padic_round(a, *p, n)),
            (_, FieldMode::EqualChar0 { .. }) => {
                if n > 0 && self.as_rational().is_some() {
                    self.clone()
                } else {
                    Scalar::Ser(self.to_series().truncate(n))
                }
            }
            (Scalar::Ser(_), FieldMode::PAdic { .. }) => self.clone(),
        }
    }

    pub fn is_negative_rational(&self) -> bool {
        matches!(self, Scalar::Rat(a) if a.is_negative())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(a) => write!(f, "{}", fmt_q(a)),
            Scalar::Ser(s) => {
                let mut parts: Vec<String> = s
                    .terms
                    .iter()
                    .map(|(k, c)| match *k {
                        0 => fmt_q(c),
                        1 => format!("{}*u", fmt_q(c)),
                        k => format!("{}*u^{}", fmt_q(c), k),
                    })
                    .collect();
                if let Some(n) = s.prec {
                    parts.push(format!("O(u^{n})"));
                }
                if parts.is_empty() {
                    parts.push("0".into());
                }
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ser(terms: &[(i64, i64)], prec: Option<i64>) -> Scalar {
        Scalar::Ser(USeries::new(terms.iter().map(|(k, c)| (*k, q(*c))).collect(), prec))
    }

    #[test]
    fn padic_valuation() {
        let m = FieldMode::padic(2).unwrap();
        assert_eq!(Scalar::Rat(qf(1, 4)).val(&m).unwrap(), Val::Fin(q(-2)));
        assert_eq!(Scalar::zero().val(&m).unwrap(), Val::Inf);
        assert_eq!(m.c_omega(), q(1));
        assert_eq!(FieldMode::padic(4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn series_precision_propagates() {
        let m = FieldMode::eqchar0(6).unwrap();
        let a = ser(&[(1, 1), (2, 3)], Some(5));
        let b = ser(&[(-1, 2)], None);
        let c = a.mul(&b);
        assert_eq!(c, ser(&[(0, 2), (1, 6)], Some(4)));
        assert_eq!(c.val(&m).unwrap(), Val::Fin(q(0)));
        let z = a.sub(&a);
        assert!(z.is_indeterminate());
        assert!(z.val(&m).is_err());
        assert!(z.is_zero_checked().is_err());
    }

    #[test]
    fn series_inverse() {
        let m = FieldMode::eqchar0(5).unwrap();
        let a = ser(&[(0, 1), (1, 1)], None);
        let b = a.inv(&m).unwrap();
        assert_eq!(b, ser(&[(0, 1), (1, -1), (2, 1), (3, -1), (4, 1)], Some(5)));
        let prod = a.mul(&b);
        assert_eq!(prod, ser(&[(0, 1)], Some(5)));
        let mono = ser(&[(2, 3)], None).inv(&m).unwrap();
        assert_eq!(mono, Scalar::Ser(USeries::monomial(qf(1, 3), -2)));
    }

    #[test]
    fn mixed_equality() {
        assert_eq!(Scalar::Rat(q(3)), ser(&[(0, 3)], None));
        assert_ne!(Scalar::Rat(q(3)), ser(&[(0, 3)], Some(4)));
    }
}
