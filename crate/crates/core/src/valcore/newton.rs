//! Newton polygons of polynomials with Laurent-polynomial coefficients, and
//! factorization by slopes.

use num_traits::One;

use super::laurent::LaurentPoly;
use super::rational::{ceil_i64, fmt_q, q, Q};
use super::scalar::{FieldMode, Val};
use crate::error::{Error, Result};

/// Root valuations with multiplicities, strictly increasing. Zero roots carry `Inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<(Val, usize)>,
}

impl NewtonPolygon {
    /// Lower convex hull of `(i, vals[i])`; `vals[i]` is the valuation of the coefficient of `T^i`.
    pub fn from_vals(vals: &[Val]) -> Result<Self> {
        let n = vals.len().checked_sub(1).ok_or_else(|| Error::DegenerateInput("empty polynomial".into()))?;
        if vals.iter().all(|v| v.is_inf()) {
            return Err(Error::DegenerateInput("zero polynomial".into()));
        }
        if vals[n].is_inf() {
            return Err(Error::DegenerateInput("leading coefficient vanishes".into()));
        }
        let pts: Vec<(i64, Q)> = vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.fin().map(|x| (i as i64, x.clone())))
            .collect();
        let slope = |a: &(i64, Q), b: &(i64, Q)| (&b.1 - &a.1) / q(b.0 - a.0);
        let mut hull: Vec<(i64, Q)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 && slope(&hull[hull.len() - 2], &hull[hull.len() - 1]) >= slope(&hull[hull.len() - 1], &p) {
                hull.pop();
            }
            hull.push(p);
        }
        let mut segments: Vec<(Val, usize)> = hull
            .windows(2)
            .map(|w| (Val::Fin(-slope(&w[0], &w[1])), (w[1].0 - w[0].0) as usize))
            .collect();
        segments.reverse();
        if hull[0].0 > 0 {
            segments.push((Val::Inf, hull[0].0 as usize));
        }
        Ok(NewtonPolygon { segments })
    }

    pub fn degree(&self) -> usize {
        self.segments.iter().map(|s| s.1).sum()
    }

    /// Multiplicity of root valuations strictly above `cut`.
    pub fn mult_above(&self, cut: &Q) -> usize {
        self.segments.iter().filter(|(v, _)| *v > Val::Fin(cut.clone())).map(|s| s.1).sum()
    }

    pub fn mult_below(&self, cut: &Q) -> usize {
        self.segments.iter().filter(|(v, _)| *v < Val::Fin(cut.clone())).map(|s| s.1).sum()
    }

    /// Multiset union.
    pub fn union(&self, o: &NewtonPolygon) -> NewtonPolygon {
        let mut all: Vec<(Val, usize)> = self.segments.iter().chain(o.segments.iter()).cloned().collect();
        all.sort_by(|a, b| a.0.cmp(&b.0));
        let mut segments: Vec<(Val, usize)> = Vec::new();
        for (v, m) in all {
            match segments.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => segments.push((v, m)),
            }
        }
        NewtonPolygon { segments }
    }
}

/// Newton polygon of `Σ a_i T^i` at the Gauss point `r`.
pub fn newton_polygon(coeffs: &[LaurentPoly], r: &Q, mode: &FieldMode) -> Result<NewtonPolygon> {
    let vals = coeffs.iter().map(|a| a.gauss_val(r, mode)).collect::<Result<Vec<_>>>()?;
    NewtonPolygon::from_vals(&vals)
}

/// Monic factors of a slope factorization, with the certified residual.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeSplit {
    /// Monic factor whose roots have valuation `< cut`.
    pub low: Vec<LaurentPoly>,
    /// Monic factor whose roots have valuation `> cut`.
    pub high: Vec<LaurentPoly>,
    /// `min_i w_r` of the coefficients of `input − low·high`.
    pub residual: Val,
    pub iterations: usize,
}

pub(crate) fn tpoly_mul(a: &[LaurentPoly], b: &[LaurentPoly]) -> Vec<LaurentPoly> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![LaurentPoly::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn tpoly_sub(a: &[LaurentPoly], b: &[LaurentPoly]) -> Vec<LaurentPoly> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            match b.get(i) {
                Some(y) => x.sub(y),
                None => x,
            }
        })
        .collect()
}

fn weighted_val(p: &[LaurentPoly], r: &Q, cut: &Q, mode: &FieldMode) -> Result<Val> {
    let mut best = Val::Inf;
    for (i, c) in p.iter().enumerate() {
        best = best.min(c.gauss_val(r, mode)?.shift(&(cut * q(i as i64))));
    }
    Ok(best)
}

/// Approximate inverse of a coefficient with a unique dominant term at `r`,
/// accurate to relative Gauss valuation `rel`.
fn dominant_inverse(a: &LaurentPoly, r: &Q, rel: &Q, mode: &FieldMode) -> Result<LaurentPoly> {
    let (d, c) = a
        .dominant_term(r, mode)?
        .ok_or_else(|| Error::Normalization("vertex coefficient has no dominant monomial at r".into()))?;
    let lead_inv = LaurentPoly::monomial(c.inv(mode)?, -d);
    let eps = a.sub(&LaurentPoly::monomial(c, d)).mul(&lead_inv);
    let w_eps = eps.gauss_val(r, mode)?;
    let Some(we) = w_eps.fin().cloned() else {
        return Ok(lead_inv);
    };
    let terms = ceil_i64(&(rel / &we)).max(1);
    let neg_eps = eps.neg();
    let mut sum = LaurentPoly::one();
    let mut power = LaurentPoly::one();
    for _ in 0..terms {
        power = power.mul(&neg_eps).round_gauss(r, rel, mode);
        sum = sum.add(&power);
    }
    Ok(sum.mul(&lead_inv))
}

/// Splits a monic polynomial `Σ coeffs[i] T^i` at the Gauss point `r` into monic factors
/// with root valuations below and above `cut`, lifting until the residual exceeds the
/// dominant valuation by `precision`.
pub fn split_by_slope(
    coeffs: &[LaurentPoly],
    r: &Q,
    cut: &Q,
    precision: &Q,
    mode: &FieldMode,
) -> Result<SlopeSplit> {
    let n = coeffs.len().checked_sub(1).ok_or_else(|| Error::DegenerateInput("empty polynomial".into()))?;
    if coeffs[n] != LaurentPoly::one() {
        return Err(Error::Normalization("leading coefficient must be exactly 1".into()));
    }
    let np = newton_polygon(coeffs, r, mode)?;
    if np.segments.iter().any(|(v, _)| *v == Val::Fin(cut.clone())) {
        return Err(Error::SlopeCollision(fmt_q(cut)));
    }
    let k = np.mult_above(cut);
    let one = vec![LaurentPoly::one()];
    if k == 0 {
        return Ok(SlopeSplit { low: coeffs.to_vec(), high: one, residual: Val::Inf, iterations: 0 });
    }
    if k == n {
        return Ok(SlopeSplit { low: one, high: coeffs.to_vec(), residual: Val::Inf, iterations: 0 });
    }
    let ak = &coeffs[k];
    let w_ak = ak.gauss_val(r, mode)?.fin().cloned().expect("vertex coefficient is nonzero");
    let k_cut = cut * q(k as i64);
    let base = &w_ak + &k_cut;
    let target = &base + precision;
    let inv = dominant_inverse(ak, r, &(precision + Q::one()), mode)?;

    let mut low: Vec<LaurentPoly> = coeffs[k..].to_vec();
    let mut high: Vec<LaurentPoly> = vec![LaurentPoly::zero(); k + 1];
    high[k] = LaurentPoly::one();
    let max_iter = 64 + 16 * ceil_i64(precision).max(1) as usize * (n + 1);
    let mut iterations = 0;
    loop {
        let err = tpoly_sub(coeffs, &tpoly_mul(&low, &high));
        let ve = weighted_val(&err, r, cut, mode)?;
        if ve >= Val::Fin(target.clone()) {
            break;
        }
        if iterations >= max_iter {
            return Err(Error::BudgetExhausted(format!("slope lifting stalled after {iterations} steps")));
        }
        iterations += 1;
        for i in 0..k {
            let bound = &target - &w_ak - cut * q(i as i64) + Q::one();
            let dx = err[i].mul(&inv);
            high[i] = high[i].add(&dx).round_gauss(r, &bound, mode);
        }
        for i in k..n {
            let j = i - k;
            let bound = &target - &k_cut - cut * q(j as i64) + Q::one();
            low[j] = low[j].add(&err[i]).round_gauss(r, &bound, mode);
        }
    }
    let err = tpoly_sub(coeffs, &tpoly_mul(&low, &high));
    let mut residual = Val::Inf;
    for c in &err {
        residual = residual.min(c.gauss_val(r, mode)?);
    }
    Ok(SlopeSplit { low, high, residual, iterations })
}

/// Coefficient list of `Π (T − root_i)` for scalar roots; used by tests and examples.
pub fn from_roots(roots: &[LaurentPoly]) -> Vec<LaurentPoly> {
    let mut p = vec![LaurentPoly::one()];
    for root in roots {
        p = tpoly_mul(&p, &[root.neg(), LaurentPoly::one()]);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valcore::rational::qf;

    fn c(x: i64) -> LaurentPoly {
        LaurentPoly::from_q(q(x))
    }

    fn fin(x: Q) -> Val {
        Val::Fin(x)
    }

    #[test]
    fn polygon_examples() {
        let m = FieldMode::padic(2).unwrap();
        let np = newton_polygon(&[c(-2), c(1)], &q(0), &m).unwrap();
        assert_eq!(np.segments, vec![(fin(q(1)), 1)]);
        let np = newton_polygon(&[c(-2), c(0), c(1)], &q(0), &m).unwrap();
        assert_eq!(np.segments, vec![(fin(qf(1, 2)), 2)]);
        let np = newton_polygon(&[LaurentPoly::from_q(qf(-1, 4)), c(1)], &q(0), &m).unwrap();
        assert_eq!(np.segments, vec![(fin(q(-2)), 1)]);
        assert!(newton_polygon(&[c(0), c(0)], &q(0), &m).is_err());
    }

    #[test]
    fn zero_roots_have_infinite_valuation() {
        let m = FieldMode::padic(3).unwrap();
        let np = newton_polygon(&[c(0), c(3), c(1)], &q(0), &m).unwrap();
        assert_eq!(np.segments, vec![(fin(q(1)), 1), (Val::Inf, 1)]);
    }

    #[test]
    fn split_constant_roots() {
        let m = FieldMode::padic(2).unwrap();
        let p = from_roots(&[c(2), c(1)]);
        let s = split_by_slope(&p, &q(0), &qf(1, 2), &q(20), &m).unwrap();
        assert!(s.residual >= fin(q(20)));
        let d_low = s.low[0].add(&c(1)).gauss_val(&q(0), &m).unwrap();
        let d_high = s.high[0].add(&c(2)).gauss_val(&q(0), &m).unwrap();
        assert!(d_low >= fin(q(19)) && d_high >= fin(q(19)));
        assert_eq!(s.low[1], LaurentPoly::one());
        assert_eq!(s.high[1], LaurentPoly::one());
    }

    #[test]
    fn split_collision_and_normalization() {
        let m = FieldMode::padic(2).unwrap();
        let p = vec![c(-2), c(0), c(1)];
        assert!(matches!(split_by_slope(&p, &q(0), &qf(1, 2), &q(8), &m), Err(Error::SlopeCollision(_))));
        let p = vec![c(-2), c(0), c(2)];
        assert!(matches!(split_by_slope(&p, &q(0), &q(0), &q(8), &m), Err(Error::Normalization(_))));
    }

    #[test]
    fn split_laurent_roots() {
        let m = FieldMode::padic(3).unwrap();
        let big = LaurentPoly::t_pow(-1);
        let small = LaurentPoly::from_rationals(&[(1, q(3))]);
        let p = from_roots(&[big.clone(), small.clone()]);
        let s = split_by_slope(&p, &q(0), &qf(1, 2), &q(8), &m).unwrap();
        assert!(s.residual >= fin(q(8)));
        let e_low = s.low[0].add(&big).gauss_val(&q(0), &m).unwrap();
        let e_high = s.high[0].add(&small).gauss_val(&q(0), &m).unwrap();
        assert!(e_low >= fin(q(7)), "{e_low}");
        assert!(e_high >= fin(q(7)), "{e_high}");
        let np_low = newton_polygon(&s.low, &q(0), &m).unwrap();
        let np_high = newton_polygon(&s.high, &q(0), &m).unwrap();
        assert_eq!(np_low.union(&np_high), newton_polygon(&p, &q(0), &m).unwrap());
    }
}
