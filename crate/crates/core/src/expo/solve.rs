use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::shear::{rational_spectrum, residue_matrix};
use crate::diffmod::DiffModule;
use crate::error::{Error, Result};
use crate::linalg::{self, PolyMat, ScalarMat};
use crate::valcore::rational::{ceil_i64, q};
use crate::valcore::{Derivation, FieldMode, LaurentPoly, Scalar, USeries, Val, Q};

// ---- polynomials over Q, coefficients c_0..c_n ----

type QPoly = Vec<Q>;

fn trim(mut a: QPoly) -> QPoly {
    while a.last().map_or(false, Zero::is_zero) {
        a.pop();
    }
    a
}

fn poly_mul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = vec![Q::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

fn poly_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let b = trim(b.clone());
    let mut r = trim(a.clone());
    let lead = b.last().expect("nonzero divisor").clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![Q::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (i, x) in b.iter().enumerate() {
            r[i + shift] -= &c * x;
        }
        quo[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(quo), r)
}

/// `a(T − j)`.
fn poly_shift(a: &QPoly, j: &Q) -> QPoly {
    let mut out: QPoly = Vec::new();
    for c in a.iter().rev() {
        out = poly_mul(&out, &vec![-j.clone(), Q::one()]);
        out = poly_sub(&out, &vec![-c.clone()]);
    }
    out
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
fn poly_inverse_mod(a: &QPoly, m: &QPoly) -> Option<QPoly> {
    let (mut r0, mut r1) = (trim(m.clone()), poly_divrem(a, m).1);
    let (mut s0, mut s1): (QPoly, QPoly) = (Vec::new(), vec![Q::one()]);
    while !r1.is_empty() {
        let (quo, rem) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&quo, &s1));
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].recip();
    Some(poly_divrem(&s0.iter().map(|x| x * &c).collect(), m).1)
}

// ---- matrices over truncated power series ----

fn truncate_vec(v: &[LaurentPoly], order: i64) -> Vec<LaurentPoly> {
    v.iter().map(|x| x.truncate_t(order)).collect()
}

fn truncate_mat(a: &PolyMat, order: i64) -> PolyMat {
    linalg::mat_map(a, |x| x.truncate_t(order))
}

/// `(I + W)^{-1}` modulo `t^order` for `W ≡ 0 mod t`.
fn neumann_inverse_t(w: &PolyMat, order: i64) -> PolyMat {
    let n = w.len();
    let mut acc = linalg::identity(n);
    let mut term = linalg::identity(n);
    for _ in 1..order.max(1) {
        term = truncate_mat(&linalg::mat_mul(&term, w), order);
        term = linalg::mat_map(&term, LaurentPoly::neg);
        if term.iter().flatten().all(LaurentPoly::is_zero) {
            break;
        }
        acc = linalg::mat_add(&acc, &term);
    }
    acc
}

/// Basis produced by the Fuchs iteration, with the matrix of `D` on it.
#[derive(Clone, Debug)]
pub struct FuchsBasis {
    /// Columns are the new basis vectors, modulo `t^order`.
    pub basis: PolyMat,
    /// Matrix of `D` on the new basis, modulo `t^order`.
    pub matrix: PolyMat,
    pub order: i64,
    pub steps: usize,
}

impl FuchsBasis {
    /// True if the matrix of `D` has no positive powers of `t` below the order.
    pub fn is_constant(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.terms().keys().all(|k| *k == 0))
    }

    /// True if every entry of the matrix has nonnegative valuation.
    pub fn is_integral(&self, mode: &FieldMode) -> bool {
        self.matrix.iter().flatten().all(|x| x.terms().iter().all(|(k, c)| *k >= 0 && c.val_lb(mode) >= Val::Fin(Q::zero())))
    }
}

/// Runs `e_{i,m} = Π_{j ≤ m} P(D−j) Q_j(D) e_i` to t-adic order `t_order`, where
/// `P` is the characteristic polynomial of `N_0` and `Q_j P(T−j) ≡ 1 mod P`.
pub fn fuchs_basis(m: &DiffModule, t_order: i64, step_budget: usize) -> Result<FuchsBasis> {
    m.mode.require_eqchar0("the Fuchs iteration")?;
    if m.derivation != Derivation::TDdt {
        return Err(Error::Parameter("expected the t d/dt derivation".into()));
    }
    if !m.interval.contains_origin() {
        return Err(Error::Parameter("the interval does not contain the origin".into()));
    }
    if m.matrix.iter().flatten().any(LaurentPoly::has_negative_exponents) {
        return Err(Error::Irregular("matrix has negative powers of t".into()));
    }
    if t_order < 1 {
        return Err(Error::Parameter("t_order must be positive".into()));
    }
    let n0 = residue_matrix(m)?;
    let s: ScalarMat = n0.iter().map(|r| r.iter().cloned().map(Scalar::Rat).collect()).collect();
    let p: QPoly = linalg::charpoly(&s).iter().map(|c| c.as_rational().expect("rational charpoly")).collect();
    let n = m.rank();

    let mut ops: Vec<QPoly> = Vec::new();
    for j in 1..t_order {
        let shifted = poly_shift(&p, &q(j));
        let qj = poly_inverse_mod(&shifted, &p).ok_or_else(|| {
            Error::PreparednessViolation(format!("P(T − {j}) is not invertible modulo P(T): two eigenvalues differ by {j}"))
        })?;
        ops.push(poly_mul(&shifted, &qj));
    }

    let mut steps = 0usize;
    let mut cols: Vec<Vec<LaurentPoly>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<LaurentPoly> = (0..n).map(|k| if k == i { LaurentPoly::one() } else { LaurentPoly::zero() }).collect();
        for op in &ops {
            // Horner: op(D) v
            let mut acc: Vec<LaurentPoly> = vec![LaurentPoly::zero(); n];
            for c in op.iter().rev() {
                acc = truncate_vec(&m.apply(&acc), t_order);
                steps += 1;
                if steps > step_budget {
                    return Err(Error::BudgetExhausted(format!("Fuchs iteration exceeded {step_budget} applications of D")));
                }
                for (a, x) in acc.iter_mut().zip(&v) {
                    *a = a.add(&x.scale_q(c));
                }
            }
            v = acc;
        }
        cols.push(v);
    }
    let basis: PolyMat = (0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect();
    let w = linalg::mat_sub(&basis, &linalg::identity(n));
    let inv = neumann_inverse_t(&w, t_order);
    let nu = linalg::mat_add(&linalg::mat_mul(&m.matrix, &basis), &linalg::mat_derive(&basis, Derivation::TDdt));
    let matrix = truncate_mat(&linalg::mat_mul(&inv, &truncate_mat(&nu, t_order)), t_order);
    Ok(FuchsBasis { basis, matrix, order: t_order, steps })
}

// ---- constant-basis iteration ----

#[derive(Clone, Debug)]
pub struct ConstantBasis {
    /// Accumulated gauge `U`; columns are the new basis.
    pub basis: PolyMat,
    /// Matrix of `D` on the new basis, with parts of Gauss valuation at least the cap dropped.
    pub matrix: PolyMat,
    /// Lower bounds for the interval Gauss valuation of `N_l − N_{l,0}` after each iteration.
    pub residuals: Vec<Val>,
    pub gap: Q,
    pub cap: Q,
}

impl ConstantBasis {
    pub fn residual(&self) -> Val {
        self.residuals.last().cloned().unwrap_or(Val::Inf)
    }
}

/// Exact truncation of a scalar: drops u-terms of valuation at least `bound`.
fn drop_scalar(c: &Scalar, bound: &Q) -> Scalar {
    match c {
        Scalar::Rat(x) => {
            if bound > &Q::zero() {
                Scalar::Rat(x.clone())
            } else {
                Scalar::zero()
            }
        }
        Scalar::Ser(s) => {
            let n = ceil_i64(bound);
            let terms: BTreeMap<i64, Q> = s.terms().range(..n).map(|(k, x)| (*k, x.clone())).collect();
            Scalar::Ser(USeries::new(terms, s.prec()))
        }
    }
}

/// Drops the part of `f` whose Gauss valuation on `[r1, r2]` is at least `cap`.
fn drop_above(f: &LaurentPoly, r1: &Q, r2: &Q, cap: &Q) -> LaurentPoly {
    let mut out = BTreeMap::new();
    for (k, c) in f.terms() {
        let kq = q(*k);
        let shift = (&kq * r1).min(&kq * r2);
        let c2 = drop_scalar(c, &(cap - shift));
        if !c2.is_exact_zero() {
            out.insert(*k, c2);
        }
    }
    LaurentPoly::new(out)
}

fn drop_mat(a: &PolyMat, r1: &Q, r2: &Q, cap: &Q) -> PolyMat {
    linalg::mat_map(a, |x| drop_above(x, r1, r2, cap))
}

/// `a·b` with every term of valuation at least `cap` on `[r1, r2]` discarded.
fn mul_capped(a: &PolyMat, b: &PolyMat, r1: &Q, r2: &Q, cap: &Q, mode: &FieldMode) -> PolyMat {
    let bound = |k: i64, c: &Scalar| -> Option<Q> {
        let kq = q(k);
        c.val_lb(mode).fin().map(|v| v + (&kq * r1).min(&kq * r2))
    };
    let lbs = |m: &PolyMat| -> Vec<Vec<Vec<(i64, Scalar, Q)>>> {
        m.iter()
            .map(|row| {
                row.iter()
                    .map(|f| f.terms().iter().filter_map(|(k, c)| bound(*k, c).map(|v| (*k, c.clone(), v))).collect())
                    .collect()
            })
            .collect()
    };
    let (la, lb) = (lbs(a), lbs(b));
    let (n, m, l) = (a.len(), b.first().map_or(0, Vec::len), b.len());
    let mut out = linalg::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            let mut acc: BTreeMap<i64, Scalar> = BTreeMap::new();
            for k in 0..l {
                for (ka, ca, va) in &la[i][k] {
                    for (kb, cb, vb) in &lb[k][j] {
                        if &(va + vb) >= cap {
                            continue;
                        }
                        let e = acc.entry(ka + kb).or_insert_with(Scalar::zero);
                        *e = e.add(&ca.mul(cb));
                    }
                }
            }
            out[i][j] = drop_above(&LaurentPoly::new(acc), r1, r2, cap);
        }
    }
    out
}

fn nonconstant_part(a: &PolyMat) -> PolyMat {
    linalg::mat_map(a, |x| LaurentPoly::new(x.terms().iter().filter(|(k, _)| **k != 0).map(|(k, c)| (*k, c.clone())).collect()))
}

fn mat_gauss_val(a: &PolyMat, r1: &Q, r2: &Q, mode: &FieldMode) -> Result<Val> {
    let mut v = Val::Inf;
    for x in a.iter().flatten() {
        v = v.min(x.interval_gauss_val(r1, r2, mode)?);
    }
    Ok(v)
}

/// The u-constant part of a scalar, used as the exact residue of `N_0`.
fn reduce_constant(c: &Scalar) -> Result<Scalar> {
    match c {
        Scalar::Ser(s) => {
            if s.prec().is_some_and(|p| p <= 0) || s.lowest().is_some_and(|k| k < 0) {
                return Err(Error::PrecisionExhausted(format!("residue of {c} is not known")));
            }
            Ok(Scalar::Rat(s.terms().get(&0).cloned().unwrap_or_else(Q::zero)))
        }
        _ => Ok(c.clone()),
    }
}

/// Solves `A X − X A + i X = R` entrywise over the base field.
fn sylvester(a: &[Vec<Scalar>], i: i64, rhs: &[Vec<Scalar>], mode: &FieldMode) -> Result<Option<Vec<Vec<Scalar>>>> {
    let n = a.len();
    let idx = |r: usize, c: usize| r * n + c;
    let mut sys: ScalarMat = vec![vec![Scalar::zero(); n * n]; n * n];
    for r in 0..n {
        for c in 0..n {
            let row = idx(r, c);
            for k in 0..n {
                // (A X)_{rc} = Σ A_{rk} X_{kc}
                sys[row][idx(k, c)] = sys[row][idx(k, c)].add(&a[r][k]);
                // (X A)_{rc} = Σ X_{rk} A_{kc}
                sys[row][idx(r, k)] = sys[row][idx(r, k)].sub(&a[k][c]);
            }
            sys[row][row] = sys[row][row].add(&Scalar::int(i));
        }
    }
    let b: Vec<Scalar> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| rhs[r][c].clone()).collect();
    Ok(linalg::solve_scalar(&sys, &b, mode)?.map(|x| (0..n).map(|r| x[r * n..(r + 1) * n].to_vec()).collect()))
}

/// Iterates `U ← U(I + X)` where `N_0 X − X N_0 + t dX/dt = −(N − N_0)`, so that the
/// non-constant part of the matrix shrinks on the working interval.
pub fn constant_basis(m: &DiffModule, iterations: u32) -> Result<ConstantBasis> {
    m.mode.require_eqchar0("the constant-basis iteration")?;
    if m.derivation != Derivation::TDdt {
        return Err(Error::Parameter("expected the t d/dt derivation".into()));
    }
    let (r1, r2) = match (&m.interval.r_min, &m.interval.r_max) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::Parameter("the constant-basis iteration needs a closed annulus".into())),
    };
    let mode = m.mode;
    let n = m.rank();
    for x in m.matrix.iter().flatten() {
        let c = x.coeff(0);
        if c.val_lb(&mode) < Val::Fin(Q::zero()) {
            return Err(Error::Hypothesis(format!("residue entry {c} has negative valuation")));
        }
    }
    let eps = match mat_gauss_val(&nonconstant_part(&m.matrix), &r1, &r2, &mode)? {
        Val::Inf => {
            return Ok(ConstantBasis {
                basis: linalg::identity(n),
                matrix: m.matrix.clone(),
                residuals: vec![Val::Inf],
                gap: Q::zero(),
                cap: Q::zero(),
            })
        }
        Val::Fin(e) if e > Q::zero() => e,
        Val::Fin(e) => return Err(Error::Hypothesis(format!("gap {e} between N and its constant term is not positive"))),
    };
    let cap = &eps * (q(1i64 << iterations.min(62)) + q(1));
    let mut u = linalg::identity(n);
    let mut nl = m.matrix.clone();
    let mut residuals = Vec::new();
    for _ in 0..iterations {
        let rest = nonconstant_part(&nl);
        if rest.iter().flatten().all(LaurentPoly::is_zero) {
            break;
        }
        let a: Vec<Vec<Scalar>> =
            nl.iter().map(|row| row.iter().map(|x| reduce_constant(&x.coeff(0))).collect::<Result<_>>()).collect::<Result<_>>()?;
        let modes: std::collections::BTreeSet<i64> = rest.iter().flatten().flat_map(|x| x.terms().keys().copied()).collect();
        let mut x = linalg::zeros(n, n);
        for i in modes {
            let rhs: Vec<Vec<Scalar>> = rest.iter().map(|row| row.iter().map(|f| f.coeff(i).neg()).collect()).collect();
            let sol = sylvester(&a, i, &rhs, &mode)?
                .ok_or_else(|| Error::PreparednessViolation(format!("Sylvester operator is singular in mode {i}")))?;
            for (rr, row) in sol.iter().enumerate() {
                for (cc, v) in row.iter().enumerate() {
                    if !v.is_exact_zero() {
                        x[rr][cc] = x[rr][cc].add(&LaurentPoly::monomial(v.clone(), i));
                    }
                }
            }
        }
        x = drop_mat(&x, &r1, &r2, &cap);
        let ix = linalg::mat_add(&linalg::identity(n), &x);
        // (I + X)^{-1} = Σ (−X)^k, truncated at the cap since |X| ≥ ε
        let mut inv = linalg::identity(n);
        let mut term = linalg::identity(n);
        let bound = ceil_i64(&(&cap / &eps)) + 1;
        for k in 0.. {
            term = linalg::mat_map(&mul_capped(&term, &x, &r1, &r2, &cap, &mode), LaurentPoly::neg);
            if term.iter().flatten().all(LaurentPoly::is_zero) {
                break;
            }
            if k > bound {
                return Err(Error::PrecisionExhausted("the inverse of the gauge does not converge below the cap".into()));
            }
            inv = linalg::mat_add(&inv, &term);
        }
        let nu = linalg::mat_add(&mul_capped(&nl, &ix, &r1, &r2, &cap, &mode), &linalg::mat_derive(&x, Derivation::TDdt));
        nl = mul_capped(&inv, &nu, &r1, &r2, &cap, &mode);
        u = mul_capped(&u, &ix, &r1, &r2, &cap, &mode);
        let res = match mat_gauss_val(&nonconstant_part(&nl), &r1, &r2, &mode)? {
            Val::Fin(v) if v < cap => Val::Fin(v),
            Val::Fin(_) => Val::Fin(cap.clone()),
            Val::Inf => Val::Inf,
        };
        residuals.push(res);
    }
    if residuals.is_empty() {
        residuals.push(Val::Inf);
    }
    Ok(ConstantBasis { basis: u, matrix: nl, residuals, gap: eps, cap })
}

/// Spectrum check used by callers that shear before solving.
pub fn residue_is_prepared(m: &DiffModule) -> Result<bool> {
    let spec = rational_spectrum(&residue_matrix(m)?)?;
    Ok(super::shear::is_prepared_spectrum(&spec))
}
