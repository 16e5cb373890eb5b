//! Differential modules given by a matrix of action on a basis.
//!
//! Convention: column `j` of the matrix holds the coordinates of `D(e_j)`, so for a
//! coordinate vector `v` the action is `D(v) = d(v) + N v`.

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, PolyMat};
use crate::valcore::newton::NewtonPolygon;
use crate::valcore::rational::{fmt_q, q, qf, Q};
use crate::valcore::{Derivation, FieldMode, LaurentPoly, Scalar, Val};

/// Log-radius interval `[r_min, r_max]`; `None` stands for `−∞` / `+∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub r_min: Option<Q>,
    pub r_max: Option<Q>,
}

impl Interval {
    pub fn new(r_min: Option<Q>, r_max: Option<Q>) -> Result<Self> {
        if let (Some(a), Some(b)) = (&r_min, &r_max) {
            if a > b {
                return Err(Error::IntervalOrder { r1: fmt_q(a), r2: fmt_q(b) });
            }
        }
        Ok(Interval { r_min, r_max })
    }

    pub fn everything() -> Self {
        Interval { r_min: None, r_max: None }
    }

    /// The closed disc of radius `p^{-r0}`.
    pub fn disc(r0: Q) -> Self {
        Interval { r_min: Some(r0), r_max: None }
    }

    pub fn closed(a: Q, b: Q) -> Result<Self> {
        Self::new(Some(a), Some(b))
    }

    pub fn point(r: Q) -> Self {
        Interval { r_min: Some(r.clone()), r_max: Some(r) }
    }

    pub fn contains(&self, r: &Q) -> bool {
        self.r_min.as_ref().map_or(true, |a| a <= r) && self.r_max.as_ref().map_or(true, |b| r <= b)
    }

    /// True when the interval reaches `r = +∞`, i.e. the domain contains `t = 0`.
    pub fn contains_origin(&self) -> bool {
        self.r_max.is_none()
    }

    pub fn intersect(&self, o: &Interval) -> Result<Interval> {
        let lo = match (&self.r_min, &o.r_min) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (a, None) => a.clone(),
            (None, b) => b.clone(),
        };
        let hi = match (&self.r_max, &o.r_max) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (a, None) => a.clone(),
            (None, b) => b.clone(),
        };
        Interval::new(lo, hi).map_err(|_| Error::Incompatible("intervals do not meet".into()))
    }

    /// Multiplies both endpoints by a positive rational.
    pub fn scale(&self, k: &Q) -> Interval {
        Interval { r_min: self.r_min.as_ref().map(|a| a * k), r_max: self.r_max.as_ref().map(|b| b * k) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffModule {
    pub mode: FieldMode,
    pub derivation: Derivation,
    pub interval: Interval,
    pub matrix: PolyMat,
}

/// Output of the cyclic-vector search.
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionData {
    pub vector: Vec<LaurentPoly>,
    /// `(numerator, denominator)` of `a_0..a_{n−1}` with `D^n v = Σ a_i D^i v`.
    pub coeffs: Vec<(LaurentPoly, LaurentPoly)>,
    /// `±det[v, Dv, …, D^{n−1}v]`.
    pub det: LaurentPoly,
    pub candidates_tried: usize,
}

impl CompanionData {
    /// Valuations of the coefficients of `T^n − Σ a_i T^i` at `r`.
    pub fn coefficient_vals(&self, r: &Q, mode: &FieldMode) -> Result<Vec<Val>> {
        let mut vals = Vec::with_capacity(self.coeffs.len() + 1);
        for (num, den) in &self.coeffs {
            let wn = num.gauss_val(r, mode)?;
            let wd = den.gauss_val(r, mode)?;
            let wd = wd.fin().cloned().ok_or_else(|| Error::DegenerateInput("zero denominator".into()))?;
            vals.push(wn.shift(&-wd));
        }
        vals.push(Val::Fin(Q::zero()));
        Ok(vals)
    }

    pub fn newton_polygon(&self, r: &Q, mode: &FieldMode) -> Result<NewtonPolygon> {
        NewtonPolygon::from_vals(&self.coefficient_vals(r, mode)?)
    }
}

fn check_scalars(mode: &FieldMode, matrix: &PolyMat) -> Result<()> {
    if let FieldMode::PAdic { .. } = mode {
        for row in matrix {
            for e in row {
                if e.terms().values().any(|c| matches!(c, Scalar::Ser(_))) {
                    return Err(Error::Mode("u-series coefficient in a p-adic module".into()));
                }
            }
        }
    }
    Ok(())
}

impl DiffModule {
    pub fn new(mode: FieldMode, derivation: Derivation, interval: Interval, matrix: PolyMat) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Parameter("matrix must be square".into()));
        }
        check_scalars(&mode, &matrix)?;
        Ok(DiffModule { mode, derivation, interval, matrix })
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    /// Fails when a pole at `t = 0` meets an interval reaching `r = +∞`.
    pub fn validate_poles(&self) -> Result<()> {
        if !self.interval.contains_origin() {
            return Ok(());
        }
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.has_negative_exponents() {
                    return Err(Error::PoleConflict(format!(
                        "entry ({i}, {j}) has a pole at t = 0 but the interval reaches r = +inf"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn require_interior(&self, r: &Q) -> Result<()> {
        if self.interval.contains(r) {
            Ok(())
        } else {
            Err(Error::OutsideInterval(fmt_q(r)))
        }
    }

    /// Same basis, other derivation: `N_{t d/dt} = t · N_{d/dt}`.
    pub fn switch_derivation(&self) -> DiffModule {
        let (d, k) = match self.derivation {
            Derivation::Ddt => (Derivation::TDdt, 1),
            Derivation::TDdt => (Derivation::Ddt, -1),
        };
        DiffModule { derivation: d, matrix: linalg::mat_map(&self.matrix, |x| x.shift(k)), ..self.clone() }
    }

    pub fn with_derivation(&self, d: Derivation) -> DiffModule {
        if self.derivation == d {
            self.clone()
        } else {
            self.switch_derivation()
        }
    }

    /// `D(v) = d(v) + N v`.
    pub fn apply(&self, v: &[LaurentPoly]) -> Vec<LaurentPoly> {
        let nv = linalg::mat_vec(&self.matrix, v);
        nv.iter().zip(v).map(|(a, b)| a.add(&b.derive(self.derivation))).collect()
    }

    /// Gauge transformation to the basis given by the columns of `u`:
    /// `U^{-1} N U + U^{-1} d(U)`. Requires `det U = c t^k`.
    pub fn change_basis(&self, u: &PolyMat) -> Result<DiffModule> {
        let n = self.rank();
        if u.len() != n || u.iter().any(|r| r.len() != n) {
            return Err(Error::SingularGauge("gauge has the wrong shape".into()));
        }
        let d = linalg::det(u, &self.mode)?;
        if d.is_zero() || d.len() != 1 {
            return Err(Error::SingularGauge(format!("determinant {d} is not a unit of K[t, 1/t]")));
        }
        let adj = linalg::adjugate(u, &self.mode)?;
        let inv = linalg::mat_map(&adj, |x| x.exact_div(&d, &self.mode).expect("monomial division"));
        let nu = linalg::mat_add(&linalg::mat_mul(&self.matrix, u), &linalg::mat_derive(u, self.derivation));
        let matrix = linalg::mat_mul(&inv, &nu);
        Ok(DiffModule { matrix, ..self.clone() })
    }

    fn check_compatible(&self, o: &DiffModule) -> Result<Interval> {
        if self.mode != o.mode {
            return Err(Error::Incompatible("field modes differ".into()));
        }
        if self.derivation != o.derivation {
            return Err(Error::Incompatible("derivations differ".into()));
        }
        self.interval.intersect(&o.interval)
    }

    pub fn dual(&self) -> DiffModule {
        let matrix = linalg::mat_map(&linalg::transpose(&self.matrix), |x| x.neg());
        DiffModule { matrix, ..self.clone() }
    }

    pub fn tensor(&self, o: &DiffModule) -> Result<DiffModule> {
        let interval = self.check_compatible(o)?;
        let a = linalg::kron(&self.matrix, &linalg::identity(o.rank()));
        let b = linalg::kron(&linalg::identity(self.rank()), &o.matrix);
        Ok(DiffModule { mode: self.mode, derivation: self.derivation, interval, matrix: linalg::mat_add(&a, &b) })
    }

    pub fn tensor_power(&self, k: usize) -> Result<DiffModule> {
        let mut out = DiffModule { matrix: vec![vec![LaurentPoly::zero()]], ..self.clone() };
        for _ in 0..k {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    pub fn direct_sum(&self, o: &DiffModule) -> Result<DiffModule> {
        let interval = self.check_compatible(o)?;
        let (n1, n2) = (self.rank(), o.rank());
        let mut matrix = linalg::zeros(n1 + n2, n1 + n2);
        for i in 0..n1 {
            for j in 0..n1 {
                matrix[i][j] = self.matrix[i][j].clone();
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                matrix[n1 + i][n1 + j] = o.matrix[i][j].clone();
            }
        }
        Ok(DiffModule { mode: self.mode, derivation: self.derivation, interval, matrix })
    }

    pub fn restrict(&self, interval: &Interval) -> Result<DiffModule> {
        Ok(DiffModule { interval: self.interval.intersect(interval)?, ..self.clone() })
    }

    /// Subquotient spanned by the basis vectors in `idx` (rows and columns of `N`).
    pub fn block(&self, idx: &[usize]) -> DiffModule {
        let matrix = idx.iter().map(|&i| idx.iter().map(|&j| self.matrix[i][j].clone()).collect()).collect();
        DiffModule { matrix, ..self.clone() }
    }

    /// Strongly connected components of the graph `j → i` for `N_ij ≠ 0`, listed so
    /// that the module is block-triangular with these diagonal blocks.
    pub fn scc_blocks(&self) -> Vec<Vec<usize>> {
        let n = self.rank();
        let mut reach = vec![vec![false; n]; n];
        for (j, row) in reach.iter_mut().enumerate() {
            row[j] = true;
            for i in 0..n {
                if !self.matrix[i][j].is_zero() {
                    row[i] = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        let mut seen = vec![false; n];
        let mut blocks = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
            for &j in &comp {
                seen[j] = true;
            }
            blocks.push(comp);
        }
        blocks
    }

    /// Deterministic cyclic-vector search over `v = Σ t^{k_j} e_j`.
    pub fn cyclic_vector(&self, r: &Q, attempt_budget: usize) -> Result<CompanionData> {
        let n = self.rank();
        if n == 0 {
            return Err(Error::DegenerateInput("rank 0 module has no cyclic vector".into()));
        }
        let mut tried = Vec::new();
        let mut precision_failure = None;
        for exps in ExponentLadder::new(n).take(attempt_budget) {
            let v: Vec<LaurentPoly> = exps.iter().map(|&k| LaurentPoly::t_pow(k)).collect();
            tried.push(describe(&exps));
            match self.companion_for(&v) {
                Ok(Some(c)) => {
                    if c.det.gauss_val(r, &self.mode)?.is_inf() {
                        continue;
                    }
                    return Ok(CompanionData { candidates_tried: tried.len(), ..c });
                }
                Ok(None) => {}
                Err(e @ Error::PrecisionExhausted(_)) => precision_failure = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(precision_failure.unwrap_or(Error::CyclicSearchFailure { tried }))
    }

    /// Companion data for a given vector, or `None` if it is not cyclic.
    pub fn companion_for(&self, v: &[LaurentPoly]) -> Result<Option<CompanionData>> {
        let n = self.rank();
        let mut cols = vec![v.to_vec()];
        for _ in 0..n {
            let next = self.apply(cols.last().unwrap());
            cols.push(next);
        }
        let b: PolyMat = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
        let Some((nums, den)) = linalg::solve_fraction_free(&b, &cols[n], &self.mode)? else {
            return Ok(None);
        };
        Ok(Some(CompanionData {
            vector: v.to_vec(),
            coeffs: nums.into_iter().map(|x| (x, den.clone())).collect(),
            det: den,
            candidates_tried: 0,
        }))
    }

    /// The module in the coordinate `s = t − c`, with derivation `d/ds`. Needs a
    /// matrix regular on the disc.
    pub fn translate(&self, c: &Q) -> Result<DiffModule> {
        if !self.interval.contains_origin() {
            return Err(Error::Parameter("translation needs a module on a disc".into()));
        }
        let t = LaurentPoly::t_pow(1);
        let mut matrix = Vec::with_capacity(self.rank());
        for row in &self.matrix {
            let mut out = Vec::with_capacity(row.len());
            for f in row {
                let g = match self.derivation {
                    Derivation::Ddt => f.clone(),
                    Derivation::TDdt => f
                        .exact_div(&t, &self.mode)
                        .map_err(|_| Error::Irregular("t d/dt matrix not divisible by t".into()))?,
                };
                if g.has_negative_exponents() {
                    return Err(Error::Irregular("matrix has a pole at t = 0".into()));
                }
                // Horner in s + c
                let shift = LaurentPoly::from_rationals(&[(0, c.clone()), (1, q(1))]);
                let mut acc = LaurentPoly::zero();
                for k in (0..=g.highest().unwrap_or(0)).rev() {
                    acc = acc.mul(&shift).add(&LaurentPoly::constant(g.coeff(k)));
                }
                out.push(acc);
            }
            matrix.push(out);
        }
        Ok(DiffModule { derivation: Derivation::Ddt, matrix, ..self.clone() })
    }

    /// Frobenius descendant along `s = t^p`: rank `p·n` on the basis `e_i t^j`
    /// (index `i·p + j`), derivation `d/ds`, interval scaled by `p`.
    pub fn frobenius_descendant(&self) -> Result<DiffModule> {
        let p = self.mode.require_padic("the Frobenius descendant")?;
        if self.interval.contains_origin() {
            return Err(Error::PoleConflict("the descendant is defined on annuli (finite r_max)".into()));
        }
        let pu = p as usize;
        let pi = p as i64;
        let n = self.rank();
        let ddt = self.with_derivation(Derivation::Ddt);
        let inv_p = qf(1, pi);
        let mut m = linalg::zeros(n * pu, n * pu);
        // D'(e_i t^j) = p^{-1} t^{1-p} (j t^{j-1} e_i + Σ_k N_ki t^j e_k); a monomial
        // t^E with E = p·a + b, 0 ≤ b < p, becomes s^a on the basis vector t^b.
        let mut add = |row: usize, col: usize, c: &Scalar, e: i64| {
            let (a, b) = e.div_mod_floor(&pi);
            let target = row * pu + b as usize;
            m[target][col] = m[target][col].add(&LaurentPoly::monomial(c.scale(&inv_p), a));
        };
        for i in 0..n {
            for j in 0..pu {
                let col = i * pu + j;
                if j > 0 {
                    add(i, col, &Scalar::int(j as i64), j as i64 - pi);
                }
                for k in 0..n {
                    for (e, c) in ddt.matrix[k][i].terms() {
                        add(k, col, c, e + j as i64 + 1 - pi);
                    }
                }
            }
        }
        Ok(DiffModule {
            mode: self.mode,
            derivation: Derivation::Ddt,
            interval: self.interval.scale(&q(pi)),
            matrix: m,
        })
    }

    /// The direct sum of a list of modules.
    pub fn sum_of(mods: &[DiffModule]) -> Result<DiffModule> {
        let (first, rest) = mods.split_first().ok_or_else(|| Error::Parameter("empty direct sum".into()))?;
        rest.iter().try_fold(first.clone(), |acc, m| acc.direct_sum(m))
    }
}

fn describe(exps: &[i64]) -> String {
    exps.iter()
        .enumerate()
        .map(|(j, k)| if *k == 0 { format!("e{}", j + 1) } else { format!("t^{k} e{}", j + 1) })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Exponent vectors in `{0..L}^n` with maximum exactly `L`, for `L = 0, 1, 2, …`.
struct ExponentLadder {
    n: usize,
    level: i64,
    current: Vec<i64>,
    done_level: bool,
}

impl ExponentLadder {
    fn new(n: usize) -> Self {
        ExponentLadder { n, level: 0, current: vec![0; n], done_level: false }
    }

    fn advance(&mut self) -> bool {
        for i in (0..self.n).rev() {
            if self.current[i] < self.level {
                self.current[i] += 1;
                for x in self.current.iter_mut().skip(i + 1) {
                    *x = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for ExponentLadder {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        loop {
            if self.done_level {
                if !self.advance() {
                    self.level += 1;
                    self.current = vec![0; self.n];
                    if self.n == 1 {
                        return None;
                    }
                }
            }
            self.done_level = true;
            if self.current.iter().max() == Some(&self.level) {
                return Some(self.current.clone());
            }
        }
    }
}

/// The module `N_{λ,h,e,m}` over `u = t^{1/m}` with derivation `d/du`:
/// `D v_i = u^{-1} v_{i+1}`, `D v_e = λ u^{h−1} v_1`. The interval is given in `t`.
pub fn test_module(lambda: &Scalar, h: i64, e: usize, m: i64, mode: FieldMode, interval: Interval) -> Result<DiffModule> {
    if e == 0 || m < 1 {
        return Err(Error::Parameter("e and m must be positive".into()));
    }
    if lambda.is_zero_checked()? {
        return Err(Error::Parameter("λ must be nonzero".into()));
    }
    match mode {
        FieldMode::PAdic { p } => {
            let mut x = e;
            while x % p as usize == 0 {
                x /= p as usize;
            }
            if x != 1 {
                return Err(Error::Parameter(format!("e = {e} is not a power of p = {p}")));
            }
            if m % p as i64 == 0 {
                return Err(Error::Parameter(format!("m = {m} is divisible by p = {p}")));
            }
        }
        FieldMode::EqualChar0 { .. } => {
            if e != 1 {
                return Err(Error::Parameter("e must be 1 in residue characteristic 0".into()));
            }
        }
    }
    if h.gcd(&(e as i64 * m)) != 1 {
        return Err(Error::Parameter(format!("gcd(h, e·m) = gcd({h}, {}) ≠ 1", e as i64 * m)));
    }
    let mut matrix = linalg::zeros(e, e);
    for i in 0..e - 1 {
        matrix[i + 1][i] = LaurentPoly::t_pow(-1);
    }
    matrix[0][e - 1] = matrix[0][e - 1].add(&LaurentPoly::monomial(lambda.clone(), h - 1));
    DiffModule::new(mode, Derivation::Ddt, interval.scale(&qf(1, m)), matrix)
}

/// `W_m`: rank one over `s` with `D v = (m/p) s^{-1} v`.
pub fn twist_w(m_idx: u64, p: u64, interval: Interval) -> Result<DiffModule> {
    let mode = FieldMode::padic(p)?;
    if m_idx >= p {
        return Err(Error::Parameter(format!("twist index {m_idx} is outside 0..{p}")));
    }
    let c = LaurentPoly::monomial(Scalar::Rat(qf(m_idx as i64, p as i64)), -1);
    DiffModule::new(mode, Derivation::Ddt, interval, vec![vec![c]])
}

/// Rank-one module with matrix `(c)`.
pub fn rank_one(c: LaurentPoly, mode: FieldMode, derivation: Derivation, interval: Interval) -> Result<DiffModule> {
    DiffModule::new(mode, derivation, interval, vec![vec![c]])
}

/// Matrix of rationals `[(exponent, value)]` entries, for concise construction.
pub fn poly_matrix(entries: Vec<Vec<Vec<(i64, Q)>>>) -> PolyMat {
    entries.into_iter().map(|row| row.into_iter().map(|e| LaurentPoly::from_rationals(&e)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn padic(p: u64) -> FieldMode {
        FieldMode::padic(p).unwrap()
    }

    fn lp(pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_rationals(&pairs.iter().map(|(n, c)| (*n, q(*c))).collect::<Vec<_>>())
    }

    fn annulus() -> Interval {
        Interval::closed(q(-1), q(1)).unwrap()
    }

    #[test]
    fn change_basis_examples() {
        let m = DiffModule::new(padic(2), Derivation::Ddt, annulus(), vec![vec![LaurentPoly::zero()]]).unwrap();
        assert_eq!(m.change_basis(&linalg::identity(1)).unwrap(), m);
        let g = m.change_basis(&vec![vec![LaurentPoly::t_pow(1)]]).unwrap();
        assert_eq!(g.matrix, vec![vec![LaurentPoly::t_pow(-1)]]);
        assert!(matches!(m.change_basis(&vec![vec![lp(&[(0, 1), (1, 1)])]]), Err(Error::SingularGauge(_))));
    }

    #[test]
    fn change_basis_round_trip() {
        let n = vec![vec![lp(&[(0, 1), (2, 3)]), lp(&[(-1, 2)])], vec![lp(&[(1, 5)]), lp(&[(0, -1)])]];
        let m = DiffModule::new(padic(3), Derivation::Ddt, annulus(), n).unwrap();
        let u = vec![vec![lp(&[(0, 1)]), lp(&[(1, 1), (2, 4)])], vec![LaurentPoly::zero(), lp(&[(-1, 2)])]];
        let d = linalg::det(&u, &m.mode).unwrap();
        let uinv = linalg::mat_map(&linalg::adjugate(&u, &m.mode).unwrap(), |x| x.exact_div(&d, &m.mode).unwrap());
        let back = m.change_basis(&u).unwrap().change_basis(&uinv).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn dual_and_tensor() {
        let a = DiffModule::new(padic(2), Derivation::Ddt, annulus(), vec![vec![lp(&[(0, 3)])]]).unwrap();
        let b = DiffModule::new(padic(2), Derivation::Ddt, annulus(), vec![vec![lp(&[(1, 5)])]]).unwrap();
        assert_eq!(a.dual().matrix, vec![vec![lp(&[(0, -3)])]]);
        assert_eq!(a.tensor(&b).unwrap().matrix, vec![vec![lp(&[(0, 3), (1, 5)])]]);
        assert!(a.dual().tensor(&a).unwrap().matrix[0][0].is_zero());
        let c = a.switch_derivation();
        assert!(matches!(a.tensor(&c), Err(Error::Incompatible(_))));
    }

    #[test]
    fn switching_derivations() {
        let m = DiffModule::new(padic(5), Derivation::Ddt, annulus(), vec![vec![lp(&[(-1, 7)])]]).unwrap();
        let s = m.switch_derivation();
        assert_eq!(s.derivation, Derivation::TDdt);
        assert_eq!(s.matrix, vec![vec![lp(&[(0, 7)])]]);
        assert_eq!(s.switch_derivation(), m);
    }

    #[test]
    fn cyclic_vectors() {
        let r = q(0);
        let m1 = DiffModule::new(padic(2), Derivation::Ddt, annulus(), vec![vec![lp(&[(2, 3)])]]).unwrap();
        let c = m1.cyclic_vector(&r, 10).unwrap();
        assert_eq!(c.vector, vec![LaurentPoly::one()]);
        let (a0n, a0d) = &c.coeffs[0];
        assert_eq!(a0n.exact_div(a0d, &m1.mode).unwrap(), lp(&[(2, 3)]));

        let sum = DiffModule::new(
            padic(2),
            Derivation::Ddt,
            annulus(),
            vec![vec![LaurentPoly::zero(), LaurentPoly::zero()], vec![LaurentPoly::zero(), lp(&[(-1, 1)])]],
        )
        .unwrap();
        let c = sum.cyclic_vector(&r, 10).unwrap();
        assert_eq!(c.vector, vec![LaurentPoly::one(), LaurentPoly::one()]);
        // D^2 v = a_0 v + a_1 D v
        let dv = sum.apply(&c.vector);
        let d2v = sum.apply(&dv);
        for i in 0..2 {
            let rhs = c.coeffs[0].0.mul(&c.vector[i]).add(&c.coeffs[1].0.mul(&dv[i]));
            assert_eq!(d2v[i].mul(&c.det), rhs);
        }

        let triv = DiffModule::new(padic(2), Derivation::Ddt, annulus(), linalg::zeros(2, 2)).unwrap();
        let c = triv.cyclic_vector(&r, 10).unwrap();
        assert_eq!(c.vector, vec![LaurentPoly::one(), LaurentPoly::t_pow(1)]);
        assert_eq!(c.candidates_tried, 2);
        assert!(matches!(triv.cyclic_vector(&r, 1), Err(Error::CyclicSearchFailure { .. })));
    }

    #[test]
    fn descendant_of_trivial_module_is_sum_of_twists() {
        for p in [2u64, 3, 5] {
            let triv = DiffModule::new(padic(p), Derivation::Ddt, annulus(), linalg::zeros(1, 1)).unwrap();
            let d = triv.frobenius_descendant().unwrap();
            assert_eq!(d.rank(), p as usize);
            for j in 0..p as usize {
                for i in 0..p as usize {
                    let expected = if i == j {
                        LaurentPoly::monomial(Scalar::Rat(qf(j as i64, p as i64)), -1)
                    } else {
                        LaurentPoly::zero()
                    };
                    assert_eq!(d.matrix[i][j], expected);
                    if i == j {
                        let w = twist_w(j as u64, p, annulus().scale(&q(p as i64))).unwrap();
                        assert_eq!(w.matrix[0][0], expected);
                    }
                }
            }
        }
        let empty = DiffModule::new(padic(3), Derivation::Ddt, annulus(), Vec::new()).unwrap();
        assert_eq!(empty.frobenius_descendant().unwrap().rank(), 0);
    }

    #[test]
    fn test_module_shapes() {
        let m = test_module(&Scalar::Rat(qf(1, 4)), 1, 1, 1, padic(2), Interval::disc(q(0))).unwrap();
        assert_eq!(m.matrix, vec![vec![LaurentPoly::from_q(qf(1, 4))]]);
        let m = test_module(&Scalar::Rat(q(3)), 1, 3, 1, padic(3), annulus()).unwrap();
        assert_eq!(m.matrix[1][0], LaurentPoly::t_pow(-1));
        assert_eq!(m.matrix[2][1], LaurentPoly::t_pow(-1));
        assert_eq!(m.matrix[0][2], lp(&[(0, 3)]));
        assert!(matches!(test_module(&Scalar::int(1), 1, 2, 1, padic(3), annulus()), Err(Error::Parameter(_))));
        assert!(matches!(test_module(&Scalar::int(1), 2, 2, 1, padic(2), annulus()), Err(Error::Parameter(_))));
        assert!(twist_w(2, 2, annulus()).is_err());
    }

    #[test]
    fn block_structure() {
        let n = vec![
            vec![lp(&[(0, 1)]), LaurentPoly::zero(), LaurentPoly::zero()],
            vec![lp(&[(0, 1)]), lp(&[(0, 2)]), lp(&[(0, 1)])],
            vec![LaurentPoly::zero(), lp(&[(0, 1)]), LaurentPoly::zero()],
        ];
        let m = DiffModule::new(padic(2), Derivation::Ddt, annulus(), n).unwrap();
        let mut blocks = m.scc_blocks();
        blocks.sort();
        assert_eq!(blocks, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn pole_validation() {
        let m = DiffModule::new(padic(2), Derivation::Ddt, Interval::disc(q(0)), vec![vec![lp(&[(-1, 1)])]]).unwrap();
        assert!(matches!(m.validate_poles(), Err(Error::PoleConflict(_))));
        assert!(m.restrict(&Interval::closed(q(0), q(2)).unwrap()).unwrap().validate_poles().is_ok());
    }

    #[test]
    fn translation_expands_binomially() {
        let mode = FieldMode::padic(2).unwrap();
        let m = rank_one(LaurentPoly::from_rationals(&[(2, q(1))]), mode, Derivation::Ddt, Interval::disc(q(0))).unwrap();
        let s = m.translate(&q(2)).unwrap();
        assert_eq!(s.matrix[0][0], LaurentPoly::from_rationals(&[(0, q(4)), (1, q(4)), (2, q(1))]));
        let tm = rank_one(LaurentPoly::from_q(q(1)), mode, Derivation::TDdt, Interval::disc(q(0))).unwrap();
        assert!(matches!(tm.translate(&q(1)), Err(Error::Irregular(_))));
    }
}
