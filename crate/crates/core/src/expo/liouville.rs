use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::valcore::rational::{fmt_q, pow_big, residue, val_q, Q};
use crate::valcore::FieldMode;

/// An element of `Z_p`: an exact rational, or an integer known modulo `p^depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Exact(Q),
    Approx { residue: BigInt, depth: u32 },
}

impl Exponent {
    pub fn depth(&self) -> Option<u32> {
        match self {
            Exponent::Exact(_) => None,
            Exponent::Approx { depth, .. } => Some(*depth),
        }
    }

    pub fn as_exact(&self) -> Option<&Q> {
        match self {
            Exponent::Exact(a) => Some(a),
            Exponent::Approx { .. } => None,
        }
    }

    /// Residue modulo `p^m` in `[0, p^m)`; `None` past the known depth.
    pub fn residue_mod(&self, p: u64, m: u32) -> Result<Option<BigInt>> {
        let pm = pow_big(p, m);
        match self {
            Exponent::Exact(a) => residue(a, &pm).map(Some).ok_or_else(|| Error::NotInZp(fmt_q(a))),
            Exponent::Approx { residue, depth } => Ok((m <= *depth).then(|| residue.mod_floor(&pm))),
        }
    }

    pub fn sub(&self, o: &Exponent) -> Exponent {
        match (self, o) {
            (Exponent::Exact(a), Exponent::Exact(b)) => Exponent::Exact(a - b),
            _ => {
                let depth = self.depth().unwrap_or(u32::MAX).min(o.depth().unwrap_or(u32::MAX));
                Exponent::Approx { residue: self.lift() - o.lift(), depth }
            }
        }
    }

    fn lift(&self) -> BigInt {
        match self {
            Exponent::Exact(a) => a.to_integer(),
            Exponent::Approx { residue, .. } => residue.clone(),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Exact(a) => write!(f, "{}", fmt_q(a)),
            Exponent::Approx { residue, depth } => write!(f, "{residue} + O(p^{depth})"),
        }
    }
}

/// A multiset of exponents; in p-adic mode every entry lies in `Z_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMultiset {
    pub entries: Vec<Exponent>,
}

impl ExponentMultiset {
    pub fn new(entries: Vec<Exponent>, mode: &FieldMode) -> Result<Self> {
        for e in &entries {
            match (e, mode) {
                (Exponent::Exact(a), FieldMode::PAdic { p }) => {
                    if !a.is_zero() && val_q(&Q::from_integer(a.denom().clone()), *p) > 0 {
                        return Err(Error::NotInZp(fmt_q(a)));
                    }
                }
                (Exponent::Approx { .. }, FieldMode::EqualChar0 { .. }) => {
                    return Err(Error::Mode("approximate exponents need a p-adic field".into()));
                }
                _ => {}
            }
        }
        Ok(ExponentMultiset { entries })
    }

    pub fn exact(values: &[Q], mode: &FieldMode) -> Result<Self> {
        Self::new(values.iter().cloned().map(Exponent::Exact).collect(), mode)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `⟨x⟩`, the distance from `x` to the nearest integer.
pub fn frac_dist(x: &Q) -> Q {
    let f = x - x.floor();
    let g = x.ceil() - x;
    f.min(g)
}

/// `p^m ⟨a/p^m⟩` for `a ∈ Z_p`: the absolute value of the representative of `a`
/// modulo `p^m` nearest to 0. `None` past the known depth.
pub fn scaled_dist(a: &Exponent, p: u64, m: u32) -> Result<Option<BigInt>> {
    let pm = pow_big(p, m);
    Ok(a.residue_mod(p, m)?.map(|k| {
        let other = &pm - &k;
        k.min(other)
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiouvilleStatus {
    Integer,
    /// A rational non-integer `n/d`; the note records the growth bound.
    RationalNonLiouville { note: String },
    UndecidedToDepth(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiouvilleVerdict {
    pub status: LiouvilleStatus,
    /// `(m, p^m ⟨a/p^m⟩)` for `m = 1..`.
    pub profile: Vec<(u32, BigInt)>,
}

pub fn liouville_profile(a: &Exponent, p: u64, m_max: u32) -> Result<LiouvilleVerdict> {
    let mut profile = Vec::new();
    for m in 1..=m_max {
        match scaled_dist(a, p, m)? {
            Some(d) => profile.push((m, d)),
            None => break,
        }
    }
    let status = match a {
        Exponent::Exact(x) if x.is_integer() => LiouvilleStatus::Integer,
        Exponent::Exact(x) => LiouvilleStatus::RationalNonLiouville {
            note: format!(
                "{} is not an integer, so p^m⟨a/p^m⟩ ≥ (p^m − {})/{} for every m",
                fmt_q(x),
                x.numer().abs(),
                x.denom()
            ),
        },
        Exponent::Approx { depth, .. } => LiouvilleStatus::UndecidedToDepth((*depth).min(m_max)),
    };
    Ok(LiouvilleVerdict { status, profile })
}

/// A set of rows whose admissible partners are too few (Hall's condition fails).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallWitness {
    pub rows: Vec<usize>,
    pub neighbors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakVerdict {
    /// `permutations[m-1][i]` is the index in `A` matched with `b_i` at depth `m`.
    ConsistentToDepth { depth: u32, permutations: Vec<Vec<usize>> },
    RefutedAtDepth { m: u32, witness: HallWitness },
}

impl WeakVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, WeakVerdict::ConsistentToDepth { .. })
    }
}

fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>], visited: &mut Vec<usize>) -> bool {
    visited.push(i);
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match owner[j] {
            None => true,
            Some(k) => augment(k, adj, seen, owner, visited),
        };
        if free {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

/// Perfect matching of rows to columns, or a Hall violator.
fn perfect_matching(adj: &[Vec<usize>], cols: usize) -> std::result::Result<Vec<usize>, HallWitness> {
    let mut owner: Vec<Option<usize>> = vec![None; cols];
    for i in 0..adj.len() {
        let mut seen = vec![false; cols];
        let mut visited = Vec::new();
        if !augment(i, adj, &mut seen, &mut owner, &mut visited) {
            visited.sort_unstable();
            visited.dedup();
            let neighbors = (0..cols).filter(|&j| seen[j]).collect();
            return Err(HallWitness { rows: visited, neighbors });
        }
    }
    let mut row_of_col = vec![0; cols];
    for (j, o) in owner.iter().enumerate() {
        row_of_col[j] = o.expect("perfect matching covers every column");
    }
    Ok(row_of_col)
}

/// Tests, for each depth `m ≤ m_max`, whether some permutation `σ` satisfies
/// `p^m ⟨(a_σ(i) − b_i)/p^m⟩ ≤ c·m` for all `i`.
pub fn weakly_equivalent(a: &ExponentMultiset, b: &ExponentMultiset, p: u64, c: &Q, m_max: u32) -> Result<WeakVerdict> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::SizeMismatch(n, b.len()));
    }
    let diffs: Vec<Vec<Exponent>> = a.entries.iter().map(|x| b.entries.iter().map(|y| x.sub(y)).collect()).collect();
    let mut permutations = Vec::new();
    for m in 1..=m_max {
        let bound = c * Q::from_integer(BigInt::from(m));
        let mut adj = vec![Vec::new(); n];
        let mut known = true;
        for (i, row) in diffs.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                match scaled_dist(d, p, m)? {
                    Some(v) if Q::from_integer(v.clone()) <= bound => adj[i].push(j),
                    Some(_) => {}
                    None => known = false,
                }
            }
        }
        if !known {
            return Ok(WeakVerdict::ConsistentToDepth { depth: m - 1, permutations });
        }
        // try the aligned partner first so equal inputs match by the identity
        for (i, row) in adj.iter_mut().enumerate() {
            row.sort_by_key(|&j| j != i);
        }
        match perfect_matching(&adj, n) {
            Ok(perm) => permutations.push(perm),
            Err(witness) => return Ok(WeakVerdict::RefutedAtDepth { m, witness }),
        }
    }
    Ok(WeakVerdict::ConsistentToDepth { depth: m_max, permutations })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Index sets into the input multiset, each sorted, ordered by first index.
    pub components: Vec<Vec<usize>>,
    /// False when some link rests on finite-depth evidence about approximate entries.
    pub exact: bool,
}

fn components(n: usize, linked: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if linked(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index[r]].push(i);
    }
    groups
}

/// Classes of `a ~ b` iff `a − b ∈ Z` (exact entries only).
pub fn integer_partition(a: &ExponentMultiset) -> Result<Partition> {
    let vals: Vec<&Q> = a
        .entries
        .iter()
        .map(|e| e.as_exact().ok_or_else(|| Error::Parameter("integer partition needs exact exponents".into())))
        .collect::<Result<_>>()?;
    Ok(Partition { components: components(vals.len(), |i, j| (vals[i] - vals[j]).is_integer()), exact: true })
}

/// Components of the graph linking entries whose difference is an integer, or, for
/// approximate entries, whose pairwise profile stays within `c·m` through `m_max`.
pub fn liouville_partition(a: &ExponentMultiset, p: u64, c: &Q, m_max: u32) -> Result<Partition> {
    let n = a.len();
    let mut link = vec![vec![false; n]; n];
    let mut exact = true;
    for i in 0..n {
        for j in i + 1..n {
            let d = a.entries[i].sub(&a.entries[j]);
            link[i][j] = match &d {
                Exponent::Exact(x) => x.is_integer(),
                Exponent::Approx { .. } => {
                    exact = false;
                    let mut ok = true;
                    for m in 1..=m_max {
                        match scaled_dist(&d, p, m)? {
                            Some(v) if Q::from_integer(v.clone()) > c * Q::from_integer(BigInt::from(m)) => {
                                ok = false;
                                break;
                            }
                            Some(_) => {}
                            None => break,
                        }
                    }
                    ok
                }
            };
        }
    }
    Ok(Partition { components: components(n, |i, j| link[i][j]), exact })
}

/// No two entries `a_1, a_2` with `val(a_1 − a_2 − k) > 0` for a nonzero integer `k`.
///
/// In residue characteristic 0 this means no two entries differ by a nonzero integer.
/// In p-adic mode any two elements of `Z_p` are congruent mod `p` to a nonzero integer
/// apart, so only multisets with at most one entry are prepared.
pub fn prepared(a: &ExponentMultiset, mode: &FieldMode) -> bool {
    match mode {
        FieldMode::PAdic { .. } => a.len() <= 1,
        FieldMode::EqualChar0 { .. } => {
            let vals: Vec<&Q> = a.entries.iter().filter_map(Exponent::as_exact).collect();
            for i in 0..vals.len() {
                for j in 0..vals.len() {
                    let d = vals[i] - vals[j];
                    if i != j && d.is_integer() && !d.is_zero() {
                        return false;
                    }
                }
            }
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valcore::rational::{q, qf};

    fn ex(v: &[Q]) -> ExponentMultiset {
        ExponentMultiset::exact(v, &FieldMode::padic(2).unwrap()).unwrap()
    }

    #[test]
    fn nearest_integer_distance() {
        assert_eq!(frac_dist(&qf(7, 2)), qf(1, 2));
        assert_eq!(frac_dist(&qf(-1, 3)), qf(1, 3));
        assert_eq!(q(8) * frac_dist(&qf(5, 8)), q(3));
    }

    #[test]
    fn profiles() {
        let v = liouville_profile(&Exponent::Exact(q(3)), 2, 6).unwrap();
        assert_eq!(v.status, LiouvilleStatus::Integer);
        let vals: Vec<i64> = v.profile.iter().map(|(_, d)| i64::try_from(d).unwrap()).collect();
        assert_eq!(vals, vec![1, 1, 3, 3, 3, 3]);
        let v = liouville_profile(&Exponent::Exact(qf(1, 3)), 2, 12).unwrap();
        assert!(matches!(v.status, LiouvilleStatus::RationalNonLiouville { .. }));
        for (m, d) in &v.profile {
            // 1/3 mod 2^m is (2^m + 1)/3 or (2^{m+1} + 1)/3, nearest-to-zero gives ⌊2^m/3⌉
            let pm = 1i64 << m;
            let expected = (pm + 1) / 3;
            assert_eq!(i64::try_from(d).unwrap(), expected.min(pm - expected), "m = {m}");
        }
        assert!(matches!(liouville_profile(&Exponent::Exact(qf(1, 2)), 2, 4), Err(Error::NotInZp(_))));
        let approx = Exponent::Approx { residue: BigInt::from(5), depth: 3 };
        let v = liouville_profile(&approx, 2, 8).unwrap();
        assert_eq!(v.status, LiouvilleStatus::UndecidedToDepth(3));
        assert_eq!(v.profile.len(), 3);
    }

    #[test]
    fn weak_equivalence() {
        let c = q(3);
        assert!(weakly_equivalent(&ex(&[q(3)]), &ex(&[q(0)]), 2, &c, 12).unwrap().is_consistent());
        let r = weakly_equivalent(&ex(&[qf(1, 3)]), &ex(&[q(0)]), 2, &q(1), 12).unwrap();
        assert!(matches!(r, WeakVerdict::RefutedAtDepth { .. }));
        let a = ex(&[qf(1, 3), q(5), qf(-2, 7)]);
        match weakly_equivalent(&a, &a, 2, &q(0), 10).unwrap() {
            WeakVerdict::ConsistentToDepth { depth, permutations } => {
                assert_eq!(depth, 10);
                assert!(permutations.iter().all(|p| p == &vec![0, 1, 2]));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(weakly_equivalent(&a, &ex(&[q(0)]), 2, &c, 3), Err(Error::SizeMismatch(3, 1))));
    }

    #[test]
    fn hall_witness_is_a_violator() {
        let a = ex(&[qf(1, 3), qf(1, 3)]);
        let b = ex(&[qf(1, 3), qf(1, 5)]);
        match weakly_equivalent(&a, &b, 2, &q(1), 12).unwrap() {
            WeakVerdict::RefutedAtDepth { witness, .. } => assert!(witness.neighbors.len() < witness.rows.len()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partitions() {
        let a = ex(&[q(0), q(5), qf(1, 3)]);
        let p = liouville_partition(&a, 2, &q(1), 12).unwrap();
        assert_eq!(p.components, vec![vec![0, 1], vec![2]]);
        assert!(p.exact);
        assert_eq!(liouville_partition(&ex(&[q(0), q(0)]), 2, &q(1), 8).unwrap().components, vec![vec![0, 1]]);
        assert_eq!(integer_partition(&ex(&[qf(1, 3), qf(4, 3)])).unwrap().components, vec![vec![0, 1]]);
    }

    #[test]
    fn preparedness() {
        let m = FieldMode::eqchar0(8).unwrap();
        let e = |v: &[Q]| ExponentMultiset::exact(v, &m).unwrap();
        assert!(!prepared(&e(&[q(0), q(1)]), &m));
        assert!(prepared(&e(&[q(0), q(0)]), &m));
        assert!(prepared(&e(&[q(0), qf(1, 2)]), &m));
    }
}
