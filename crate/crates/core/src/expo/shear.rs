use num_traits::{Signed, Zero};

use super::liouville::{prepared, ExponentMultiset};
use crate::diffmod::DiffModule;
use crate::error::{Error, Result};
use crate::linalg::{self, PolyMat, QMat};
use crate::valcore::{Derivation, FieldMode, LaurentPoly, Scalar, Q};

/// Direction in which the extreme eigenvalue of each integer class moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShearTarget {
    /// Lower the largest eigenvalue of each class by 1 per step.
    Down,
    /// Raise the smallest eigenvalue of each class by 1 per step.
    Up,
}

#[derive(Clone, Debug)]
pub struct ShearResult {
    pub module: DiffModule,
    /// Columns give the new basis in terms of the old one.
    pub gauge: PolyMat,
    pub steps: usize,
}

fn require_regular(m: &DiffModule) -> Result<()> {
    if m.derivation != Derivation::TDdt {
        return Err(Error::Parameter("expected the t d/dt derivation".into()));
    }
    if !m.interval.contains_origin() {
        return Err(Error::Parameter("the interval does not contain the origin".into()));
    }
    if m.matrix.iter().flatten().any(LaurentPoly::has_negative_exponents) {
        return Err(Error::Irregular("matrix has negative powers of t".into()));
    }
    Ok(())
}

/// Constant term `N_0` as a rational matrix.
pub(crate) fn residue_matrix(m: &DiffModule) -> Result<QMat> {
    m.matrix
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.coeff(0).as_rational().ok_or_else(|| Error::UnsupportedSpectrum(format!("residue entry {} is not rational", x.coeff(0)))))
                .collect()
        })
        .collect()
}

/// Eigenvalues of a rational matrix with multiplicity, if they are all rational.
pub(crate) fn rational_spectrum(a: &QMat) -> Result<Vec<Q>> {
    let s: Vec<Vec<Scalar>> = a.iter().map(|r| r.iter().cloned().map(Scalar::Rat).collect()).collect();
    let cp: Vec<Q> = linalg::charpoly(&s).iter().map(|c| c.as_rational().expect("rational charpoly")).collect();
    linalg::rational_roots(&cp).ok_or_else(|| Error::UnsupportedSpectrum("characteristic polynomial does not split over Q".into()))
}

/// Exponent of a regular module: the eigenvalues of `t d/dt` on `M/tM`.
pub fn residue_exponent(m: &DiffModule) -> Result<ExponentMultiset> {
    require_regular(m)?;
    let spec = rational_spectrum(&residue_matrix(m)?)?;
    ExponentMultiset::exact(&spec, &m.mode)
}

fn pow_minus(a: &QMat, lambda: &Q, k: usize) -> QMat {
    let n = a.len();
    let mut b = a.clone();
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut out = linalg::qmat_identity(n);
    for _ in 0..k {
        out = linalg::qmat_mul(&out, &b);
    }
    out
}

/// Sum of generalized eigenspaces for `eigs`, as column vectors.
fn generalized_eigenspace(a: &QMat, eigs: &[Q]) -> Vec<Vec<Q>> {
    let n = a.len();
    let mut prod = linalg::qmat_identity(n);
    for l in eigs {
        prod = linalg::qmat_mul(&prod, &pow_minus(a, l, n));
    }
    linalg::kernel(&prod)
}

/// Eigenvalues to move in one step: the extreme value of each class mod `Z` that
/// still holds another value.
fn shift_set(spec: &[Q], target: ShearTarget) -> Vec<Q> {
    let mut out = Vec::new();
    for x in spec {
        let class: Vec<&Q> = spec.iter().filter(|y| (x - *y).is_integer()).collect();
        let extreme = match target {
            ShearTarget::Down => class.iter().max(),
            ShearTarget::Up => class.iter().min(),
        };
        if class.iter().any(|y| *y != x) && extreme == Some(&x) && !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

pub fn is_prepared_spectrum(spec: &[Q]) -> bool {
    let mode = FieldMode::EqualChar0 { prec: 1 };
    prepared(&ExponentMultiset::exact(spec, &mode).expect("exact rationals"), &mode)
}

/// Shears a regular module at 0 until the eigenvalues of `N_0` are prepared.
pub fn shear(m: &DiffModule, target: ShearTarget) -> Result<ShearResult> {
    require_regular(m)?;
    let n = m.rank();
    let mut cur = m.clone();
    let mut gauge = linalg::identity(n);
    let mut steps = 0;
    let initial = rational_spectrum(&residue_matrix(m)?)?;
    // each step shrinks the spread of some class, so the total spread bounds the count
    let bound: Q = initial.iter().flat_map(|x| initial.iter().map(move |y| (x - y).abs())).fold(Q::zero(), |a, b| a + b);
    loop {
        let n0 = residue_matrix(&cur)?;
        let spec = rational_spectrum(&n0)?;
        if is_prepared_spectrum(&spec) {
            return Ok(ShearResult { module: cur, gauge, steps });
        }
        if Q::from_integer(steps.into()) > bound {
            return Err(Error::Chain("shearing did not terminate".into()));
        }
        let moved = shift_set(&spec, target);
        let rest: Vec<Q> = spec.iter().filter(|x| !moved.contains(x)).cloned().collect();
        let mut cols = generalized_eigenspace(&n0, &moved);
        let k = cols.len();
        cols.extend(generalized_eigenspace(&n0, &rest));
        debug_assert_eq!(cols.len(), n);
        let power = match target {
            ShearTarget::Down => -1,
            ShearTarget::Up => 1,
        };
        let u: PolyMat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = &cols[j][i];
                        if c.is_zero() {
                            LaurentPoly::zero()
                        } else {
                            LaurentPoly::monomial(Scalar::Rat(c.clone()), if j < k { power } else { 0 })
                        }
                    })
                    .collect()
            })
            .collect();
        cur = cur.change_basis(&u)?;
        gauge = linalg::mat_mul(&gauge, &u);
        steps += 1;
        if cur.matrix.iter().flatten().any(LaurentPoly::has_negative_exponents) {
            return Err(Error::Chain("shearing produced a pole".into()));
        }
    }
}

/// Inverse of a gauge built from rational columns and powers of `t`.
pub fn invert_gauge(u: &PolyMat, mode: &FieldMode) -> Result<PolyMat> {
    let d = linalg::det(u, mode)?;
    if d.is_zero() || d.len() != 1 {
        return Err(Error::SingularGauge(format!("determinant {d} is not a monomial")));
    }
    let adj = linalg::adjugate(u, mode)?;
    adj.iter().map(|row| row.iter().map(|x| x.exact_div(&d, mode)).collect()).collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::Interval;
    use crate::valcore::rational::{q, qf};

    fn module(entries: Vec<Vec<Vec<(i64, Q)>>>) -> DiffModule {
        let mode = FieldMode::eqchar0(8).unwrap();
        DiffModule::new(mode, Derivation::TDdt, Interval::disc(q(0)), crate::diffmod::poly_matrix(entries)).unwrap()
    }

    fn spectrum(m: &DiffModule) -> Vec<Q> {
        rational_spectrum(&residue_matrix(m).unwrap()).unwrap()
    }

    #[test]
    fn integer_gap_closes() {
        let m = module(vec![vec![vec![], vec![(1, q(1))]], vec![vec![(1, q(2))], vec![(0, q(1))]]]);
        let s = shear(&m, ShearTarget::Down).unwrap();
        assert_eq!(spectrum(&s.module), vec![q(0), q(0)]);
        assert_eq!(s.steps, 1);
        assert_eq!(m.change_basis(&s.gauge).unwrap().matrix, s.module.matrix);
        let back = invert_gauge(&s.gauge, &m.mode).unwrap();
        assert_eq!(s.module.change_basis(&back).unwrap().matrix, m.matrix);
    }

    #[test]
    fn half_integers() {
        let m = module(vec![vec![vec![(0, qf(1, 2))], vec![(0, q(1))]], vec![vec![], vec![(0, qf(3, 2))]]]);
        let s = shear(&m, ShearTarget::Down).unwrap();
        assert_eq!(spectrum(&s.module), vec![qf(1, 2), qf(1, 2)]);
        let up = shear(&m, ShearTarget::Up).unwrap();
        assert_eq!(spectrum(&up.module), vec![qf(3, 2), qf(3, 2)]);
    }

    #[test]
    fn zero_residue_is_untouched() {
        let m = module(vec![vec![vec![(1, q(1))], vec![]], vec![vec![], vec![(2, q(3))]]]);
        let s = shear(&m, ShearTarget::Down).unwrap();
        assert_eq!(s.steps, 0);
        assert_eq!(s.module.matrix, m.matrix);
    }

    #[test]
    fn exponents_at_zero() {
        let m = module(vec![vec![vec![(0, qf(2, 5)), (1, q(1))]]]);
        assert_eq!(residue_exponent(&m).unwrap().entries, vec![super::super::Exponent::Exact(qf(2, 5))]);
        let pole = module(vec![vec![vec![(-1, q(1))]]]);
        assert!(matches!(residue_exponent(&pole), Err(Error::Irregular(_))));
        let rot = module(vec![vec![vec![], vec![(0, q(1))]], vec![vec![(0, q(-1))], vec![]]]);
        assert!(matches!(residue_exponent(&rot), Err(Error::UnsupportedSpectrum(_))));
    }
}
