use num_traits::Zero;

use crate::diffmod::DiffModule;
use crate::error::{Error, Result};
use crate::linalg::{self, PolyMat};
use crate::valcore::rational::{q, val_factorial, Q};
use crate::valcore::{Derivation, FieldMode, Val};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleStep {
    pub k: usize,
    pub lower: Q,
    pub upper: Q,
}

/// Bracket for the top irlog computed from the matrices `N_k` of `D^k` on the basis.
///
/// `upper` is a rigorous bound from `|D^k| ≤ max_i |k!/i!| ρ^{i−k} |N_i|`; `lower` is
/// the running maximum of `(val(k!) − w_r(N_k))/k − r`, which converges to the true
/// value but carries no certificate at finite `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub lower: Q,
    pub upper: Q,
    pub schedule: Vec<OracleStep>,
}

impl OracleReport {
    pub fn gap(&self) -> Q {
        &self.upper - &self.lower
    }

    pub fn estimate(&self) -> &Q {
        &self.lower
    }

    pub fn brackets(&self, x: &Q) -> bool {
        &self.lower <= x && x <= &self.upper
    }
}

fn mat_val(a: &PolyMat, r: &Q, mode: &FieldMode) -> Result<Val> {
    let mut best = Val::Inf;
    for row in a {
        for x in row {
            best = best.min(x.gauss_val(r, mode)?);
        }
    }
    Ok(best)
}

fn fact_val(k: usize, mode: &FieldMode) -> Q {
    match mode {
        FieldMode::PAdic { p } => q(val_factorial(k as u64, *p)),
        FieldMode::EqualChar0 { .. } => Q::zero(),
    }
}

pub fn spectral_radius_oracle(m: &DiffModule, r: &Q, k_max: usize) -> Result<OracleReport> {
    if k_max == 0 {
        return Err(Error::Parameter("k_max must be at least 1".into()));
    }
    m.require_interior(r)?;
    let m = m.with_derivation(Derivation::Ddt);
    let mode = m.mode;
    let cw = mode.c_omega();
    let mut nk = linalg::identity(m.rank());
    // w_r(N_i) for i = 0..k
    let mut ws: Vec<Val> = vec![Val::Fin(Q::zero())];
    let mut lower = Q::zero();
    let mut upper: Option<Q> = None;
    let mut schedule = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        nk = linalg::mat_add(&linalg::mat_derive(&nk, Derivation::Ddt), &linalg::mat_mul(&m.matrix, &nk));
        let w = mat_val(&nk, r, &mode)?;
        ws.push(w.clone());
        let kq = q(k as i64);
        let fk = fact_val(k, &mode);
        if let Val::Fin(w) = &w {
            let g = (&fk - w) / &kq - r;
            if g > lower {
                lower = g;
            }
        }
        let mut a_k: Option<Q> = None;
        for (i, wi) in ws.iter().enumerate() {
            if let Val::Fin(wi) = wi {
                let term = &fk - fact_val(i, &mode) - q((k - i) as i64) * r + wi;
                if a_k.as_ref().map_or(true, |a| term < *a) {
                    a_k = Some(term);
                }
            }
        }
        let ub = &cw - r - a_k.expect("i = 0 term is finite") / &kq;
        upper = Some(match upper {
            Some(u) if u <= ub => u,
            _ => ub,
        });
        schedule.push(OracleStep { k, lower: lower.clone(), upper: upper.clone().unwrap() });
    }
    Ok(OracleReport { lower, upper: upper.unwrap(), schedule })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::{test_module, Interval};
    use crate::valcore::rational::qf;
    use crate::valcore::{LaurentPoly, Scalar};

    #[test]
    fn constant_rank_one() {
        let mode = FieldMode::padic(2).unwrap();
        let m = DiffModule::new(mode, Derivation::Ddt, Interval::disc(q(0)), vec![vec![LaurentPoly::from_q(qf(1, 4))]]).unwrap();
        let rep = spectral_radius_oracle(&m, &q(0), 32).unwrap();
        assert_eq!(rep.upper, q(3));
        assert_eq!(rep.lower, q(3) - qf(1, 32));
        assert!(rep.brackets(&q(3)));
        assert!(rep.gap() <= qf(1, 8));
    }

    #[test]
    fn trivial_module_bracket() {
        let mode = FieldMode::padic(3).unwrap();
        let m = DiffModule::new(mode, Derivation::Ddt, Interval::disc(q(0)), linalg::zeros(2, 2)).unwrap();
        let rep = spectral_radius_oracle(&m, &q(0), 16).unwrap();
        assert_eq!(rep.lower, q(0));
        assert!(rep.brackets(&q(0)));
    }

    #[test]
    fn gap_is_monotone() {
        let mode = FieldMode::padic(2).unwrap();
        let m = test_module(&Scalar::Rat(qf(1, 8)), 1, 2, 1, mode, Interval::closed(q(-1), q(1)).unwrap()).unwrap();
        let rep = spectral_radius_oracle(&m, &q(0), 24).unwrap();
        for w in rep.schedule.windows(2) {
            assert!(&w[1].upper - &w[1].lower <= &w[0].upper - &w[0].lower);
        }
    }
}
