//! Dense matrices over Laurent polynomials, base-field scalars and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::valcore::rational::{q, Q};
use crate::valcore::{Derivation, FieldMode, LaurentPoly, Scalar};

pub type PolyMat = Vec<Vec<LaurentPoly>>;
pub type ScalarMat = Vec<Vec<Scalar>>;
pub type QMat = Vec<Vec<Q>>;

pub fn identity(n: usize) -> PolyMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { LaurentPoly::one() } else { LaurentPoly::zero() }).collect())
        .collect()
}

pub fn zeros(n: usize, m: usize) -> PolyMat {
    vec![vec![LaurentPoly::zero(); m]; n]
}

pub fn mat_mul(a: &PolyMat, b: &PolyMat) -> PolyMat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = zeros(n, m);
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] = out[i][j].add(&aik.mul(&b[k][j]));
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &PolyMat, v: &[LaurentPoly]) -> Vec<LaurentPoly> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).fold(LaurentPoly::zero(), |acc, (x, y)| {
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    acc.add(&x.mul(y))
                }
            })
        })
        .collect()
}

pub fn mat_add(a: &PolyMat, b: &PolyMat) -> PolyMat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.add(v)).collect()).collect()
}

pub fn mat_sub(a: &PolyMat, b: &PolyMat) -> PolyMat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.sub(v)).collect()).collect()
}

pub fn mat_map(a: &PolyMat, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> PolyMat {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

pub fn transpose(a: &PolyMat) -> PolyMat {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn mat_derive(a: &PolyMat, d: Derivation) -> PolyMat {
    mat_map(a, |x| x.derive(d))
}

/// Kronecker product, index `(i1, i2) ↦ i1·n2 + i2`.
pub fn kron(a: &PolyMat, b: &PolyMat) -> PolyMat {
    let (n1, n2) = (a.len(), b.len());
    let mut out = zeros(n1 * n2, n1 * n2);
    for i1 in 0..n1 {
        for j1 in 0..n1 {
            if a[i1][j1].is_zero() {
                continue;
            }
            for i2 in 0..n2 {
                for j2 in 0..n2 {
                    if !b[i2][j2].is_zero() {
                        out[i1 * n2 + i2][j1 * n2 + j2] = a[i1][j1].mul(&b[i2][j2]);
                    }
                }
            }
        }
    }
    out
}

fn find_pivot(m: &PolyMat, k: usize, rows: std::ops::Range<usize>) -> Result<Option<usize>> {
    let mut indeterminate = false;
    for i in rows {
        if m[i][k].is_known_nonzero() {
            return Ok(Some(i));
        }
        if !m[i][k].is_zero() {
            indeterminate = true;
        }
    }
    if indeterminate {
        return Err(Error::PrecisionExhausted("pivot cannot be certified nonzero".into()));
    }
    Ok(None)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &PolyMat, mode: &FieldMode) -> Result<LaurentPoly> {
    let n = a.len();
    if n == 0 {
        return Ok(LaurentPoly::one());
    }
    let mut m = a.clone();
    let mut prev = LaurentPoly::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = find_pivot(&m, k, k..n)? else {
            return Ok(LaurentPoly::zero());
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.exact_div(&prev, mode)?;
            }
            m[i][k] = LaurentPoly::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(if negate { prev.neg() } else { prev })
}

/// Solves `a x = b` without fractions: returns numerators `y` and a common denominator
/// `d` (a nonzero multiple of `det a`) with `x = y / d`, or `None` if `a` is singular.
pub fn solve_fraction_free(a: &PolyMat, b: &[LaurentPoly], mode: &FieldMode) -> Result<Option<(Vec<LaurentPoly>, LaurentPoly)>> {
    let n = a.len();
    if n == 0 {
        return Ok(Some((Vec::new(), LaurentPoly::one())));
    }
    let mut m: PolyMat = a.iter().zip(b).map(|(row, x)| row.iter().cloned().chain([x.clone()]).collect()).collect();
    let mut prev = LaurentPoly::one();
    for k in 0..n {
        let Some(p) = find_pivot(&m, k, k..n)? else {
            return Ok(None);
        };
        m.swap(p, k);
        for i in 0..n {
            if i == k {
                continue;
            }
            let mik = m[i][k].clone();
            for j in 0..=n {
                if j == k {
                    continue;
                }
                if j < k && j != i {
                    continue;
                }
                let mut v = m[k][k].mul(&m[i][j]);
                if !mik.is_zero() && !m[k][j].is_zero() {
                    v = v.sub(&mik.mul(&m[k][j]));
                }
                m[i][j] = v.exact_div(&prev, mode)?;
            }
            m[i][k] = LaurentPoly::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(Some((m.iter().map(|row| row[n].clone()).collect(), prev)))
}

/// Adjugate by cofactors.
pub fn adjugate(a: &PolyMat, mode: &FieldMode) -> Result<PolyMat> {
    let n = a.len();
    if n == 1 {
        return Ok(vec![vec![LaurentPoly::one()]]);
    }
    let mut out = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor: PolyMat = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c].clone()).collect())
                .collect();
            let d = det(&minor, mode)?;
            out[i][j] = if (i + j) % 2 == 1 { d.neg() } else { d };
        }
    }
    Ok(out)
}

// ---- scalar matrices ----

/// Characteristic polynomial `det(T − A)` by Faddeev–LeVerrier; coefficients `c_0..c_n`.
pub fn charpoly(a: &ScalarMat) -> Vec<Scalar> {
    let n = a.len();
    let mut c = vec![Scalar::zero(); n + 1];
    c[n] = Scalar::one();
    let mut mk: ScalarMat = vec![vec![Scalar::zero(); n]; n];
    for k in 1..=n {
        let mut next = smat_mul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].add(&c[n - k + 1]);
        }
        mk = next;
        let am = smat_mul(a, &mk);
        let mut tr = Scalar::zero();
        for (i, row) in am.iter().enumerate() {
            tr = tr.add(&row[i]);
        }
        c[n - k] = tr.scale(&(-Q::one() / q(k as i64)));
    }
    c
}

pub fn smat_mul(a: &ScalarMat, b: &ScalarMat) -> ScalarMat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Scalar::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_exact_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].add(&aik.mul(&b[k][j]));
            }
        }
    }
    out
}

/// Solves `a x = b` over the base field by Gaussian elimination.
pub fn solve_scalar(a: &ScalarMat, b: &[Scalar], mode: &FieldMode) -> Result<Option<Vec<Scalar>>> {
    let n = a.len();
    let mut m: ScalarMat = a.iter().zip(b).map(|(row, x)| row.iter().cloned().chain([x.clone()]).collect()).collect();
    for k in 0..n {
        let mut piv = None;
        let mut indeterminate = false;
        for (i, row) in m.iter().enumerate().skip(k) {
            if row[k].is_indeterminate() {
                indeterminate = true;
            } else if !row[k].is_exact_zero() {
                // prefer exact pivots to keep precision
                if piv.is_none() || row[k].is_exact() {
                    piv = Some(i);
                    if row[k].is_exact() {
                        break;
                    }
                }
            }
        }
        let Some(p) = piv else {
            if indeterminate {
                return Err(Error::PrecisionExhausted("pivot cannot be certified nonzero".into()));
            }
            return Ok(None);
        };
        m.swap(p, k);
        let inv = m[k][k].inv(mode)?;
        for j in k..=n {
            m[k][j] = m[k][j].mul(&inv);
        }
        for i in 0..n {
            if i != k && !m[i][k].is_exact_zero() {
                let f = m[i][k].clone();
                for j in k..=n {
                    let v = m[i][j].sub(&f.mul(&m[k][j]));
                    m[i][j] = v;
                }
            }
        }
    }
    Ok(Some(m.into_iter().map(|row| row[n].clone()).collect()))
}

// ---- rational matrices ----

pub fn qmat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * &b[k][j];
            }
        }
    }
    out
}

pub fn qmat_identity(n: usize) -> QMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

/// Reduced row echelon form; returns pivot columns.
pub fn rref(a: &mut QMat) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the null space (column vectors).
pub fn kernel(a: &QMat) -> Vec<Vec<Q>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        out.push(v);
    }
    out
}

/// Basis of the column space.
pub fn image(a: &QMat) -> Vec<Vec<Q>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    pivots.iter().map(|&c| a.iter().map(|row| row[c].clone()).collect()).collect()
}

pub fn qmat_inverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().cloned().chain((0..n).map(|j| if i == j { Q::one() } else { Q::zero() })).collect())
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn divisors(n: &BigInt, limit: u64) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let small = n.to_u64()?;
    if small > limit.saturating_mul(limit) {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// All roots of a rational polynomial (coefficients `c_0..c_n`) if it splits over `Q`.
pub fn rational_roots(coeffs: &[Q]) -> Option<Vec<Q>> {
    let mut c: Vec<Q> = coeffs.to_vec();
    while c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
    let deg = c.len().checked_sub(1)?;
    let mut roots = Vec::new();
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        roots.push(Q::zero());
    }
    if c.len() == 1 {
        return Some(roots);
    }
    let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let num_div = divisors(&ints[0], 1_000_000)?;
    let den_div = divisors(ints.last().unwrap(), 1_000_000)?;
    let mut poly: Vec<Q> = ints.iter().map(|x| Q::from_integer(x.clone())).collect();
    let mut candidates = Vec::new();
    for a in &num_div {
        for b in &den_div {
            let x = Q::new(a.clone(), b.clone());
            candidates.push(x.clone());
            candidates.push(-x);
        }
    }
    candidates.sort();
    candidates.dedup();
    for x in candidates {
        loop {
            if poly.len() <= 1 {
                break;
            }
            let (quo, rem) = synthetic_div(&poly, &x);
            if !rem.is_zero() {
                break;
            }
            poly = quo;
            roots.push(x.clone());
        }
    }
    if roots.len() == deg {
        roots.sort();
        Some(roots)
    } else {
        None
    }
}

fn synthetic_div(p: &[Q], x: &Q) -> (Vec<Q>, Q) {
    let n = p.len() - 1;
    let mut quo = vec![Q::zero(); n];
    let mut acc = Q::zero();
    for i in (0..=n).rev() {
        acc = &acc * x + &p[i];
        if i > 0 {
            quo[i - 1] = acc.clone();
        }
    }
    (quo, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valcore::rational::qf;

    fn lp(pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_rationals(&pairs.iter().map(|(n, c)| (*n, q(*c))).collect::<Vec<_>>())
    }

    #[test]
    fn bareiss_determinant() {
        let m = FieldMode::padic(2).unwrap();
        let a = vec![vec![lp(&[(0, 1), (1, 1)]), lp(&[(-1, 2)])], vec![lp(&[(1, 3)]), lp(&[(0, 1)])]];
        // (1+t)·1 − 2t^{-1}·3t = 1 + t − 6
        assert_eq!(det(&a, &m).unwrap(), lp(&[(0, -5), (1, 1)]));
        let sing = vec![vec![lp(&[(0, 1)]), lp(&[(1, 1)])], vec![lp(&[(-1, 1)]), lp(&[(0, 1)])]];
        assert!(det(&sing, &m).unwrap().is_zero());
    }

    #[test]
    fn fraction_free_solve() {
        let m = FieldMode::padic(3).unwrap();
        let a = vec![
            vec![lp(&[(0, 1)]), lp(&[(1, 1)]), lp(&[(0, 2)])],
            vec![lp(&[(-1, 1)]), lp(&[(0, 3)]), lp(&[(2, 1)])],
            vec![lp(&[(0, 5)]), lp(&[(0, 1)]), lp(&[(0, 1), (1, 1)])],
        ];
        let b = vec![lp(&[(0, 1)]), lp(&[(3, 2)]), lp(&[(-2, 1)])];
        let (y, d) = solve_fraction_free(&a, &b, &m).unwrap().unwrap();
        let ay = mat_vec(&a, &y);
        for (l, r) in ay.iter().zip(&b) {
            assert_eq!(*l, r.mul(&d));
        }
        let dd = det(&a, &m).unwrap();
        assert!(d == dd || d == dd.neg());
    }

    #[test]
    fn charpoly_and_roots() {
        let a: ScalarMat = vec![vec![Scalar::int(2), Scalar::int(1)], vec![Scalar::int(0), Scalar::Rat(qf(1, 2))]];
        let c = charpoly(&a);
        let cq: Vec<Q> = c.iter().map(|x| x.as_rational().unwrap()).collect();
        assert_eq!(cq, vec![q(1), qf(-5, 2), q(1)]);
        assert_eq!(rational_roots(&cq).unwrap(), vec![qf(1, 2), q(2)]);
        assert!(rational_roots(&[q(-2), q(0), q(1)]).is_none());
        assert_eq!(rational_roots(&[q(0), q(0), q(1)]).unwrap(), vec![q(0), q(0)]);
    }

    #[test]
    fn kernels_and_inverse() {
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        let k = kernel(&a);
        assert_eq!(k, vec![vec![q(-2), q(1)]]);
        assert!(qmat_inverse(&a).is_none());
        let b = vec![vec![q(1), q(2)], vec![q(3), q(4)]];
        let bi = qmat_inverse(&b).unwrap();
        assert_eq!(qmat_mul(&b, &bi), qmat_identity(2));
    }
}
