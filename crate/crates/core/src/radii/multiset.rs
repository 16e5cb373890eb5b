use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::valcore::rational::{fmt_q, q, qf, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Certainty {
    Exact,
    /// Only `IR ≥ p^{-irlog}` is known, i.e. the true irlog is at most the stored value.
    LowerBoundOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiiEntry {
    pub irlog: Q,
    pub mult: usize,
    pub certainty: Certainty,
}

/// Intrinsic subsidiary radii in log units, largest irlog (smallest radius) first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RadiiMultiset {
    entries: Vec<RadiiEntry>,
    pub flags: Vec<String>,
    pub certificates: Vec<String>,
}

impl RadiiMultiset {
    pub fn new(entries: impl IntoIterator<Item = RadiiEntry>) -> Self {
        let mut acc: BTreeMap<(Q, Certainty), usize> = BTreeMap::new();
        for e in entries {
            if e.mult > 0 {
                *acc.entry((e.irlog, e.certainty)).or_default() += e.mult;
            }
        }
        let mut entries: Vec<RadiiEntry> =
            acc.into_iter().map(|((irlog, certainty), mult)| RadiiEntry { irlog, mult, certainty }).collect();
        entries.sort_by(|a, b| b.irlog.cmp(&a.irlog).then(a.certainty.cmp(&b.certainty)));
        RadiiMultiset { entries, flags: Vec::new(), certificates: Vec::new() }
    }

    pub fn exact(pairs: &[(Q, usize)]) -> Self {
        Self::new(pairs.iter().map(|(x, m)| RadiiEntry { irlog: x.clone(), mult: *m, certainty: Certainty::Exact }))
    }

    pub fn entries(&self) -> &[RadiiEntry] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.iter().map(|e| e.mult).sum()
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.certainty == Certainty::Exact)
    }

    pub fn is_certified(&self) -> bool {
        self.is_exact() && self.flags.is_empty()
    }

    pub fn lower_bound_mult(&self) -> usize {
        self.entries.iter().filter(|e| e.certainty == Certainty::LowerBoundOnly).map(|e| e.mult).sum()
    }

    /// irlog values with repetition, largest first.
    pub fn expand(&self) -> Vec<Q> {
        self.entries.iter().flat_map(|e| std::iter::repeat(e.irlog.clone()).take(e.mult)).collect()
    }

    pub fn exact_pairs(&self) -> Vec<(Q, usize)> {
        self.entries.iter().filter(|e| e.certainty == Certainty::Exact).map(|e| (e.irlog.clone(), e.mult)).collect()
    }

    pub fn union(&self, o: &RadiiMultiset) -> RadiiMultiset {
        let mut out = RadiiMultiset::new(self.entries.iter().chain(o.entries.iter()).cloned());
        out.flags = self.flags.iter().chain(&o.flags).cloned().collect();
        out.certificates = self.certificates.iter().chain(&o.certificates).cloned().collect();
        out
    }

    /// Removes `mult` copies of an exact value; false if not enough are present.
    pub fn remove_exact(&mut self, x: &Q, mult: usize) -> bool {
        let Some(pos) = self.entries.iter().position(|e| &e.irlog == x && e.certainty == Certainty::Exact) else {
            return false;
        };
        if self.entries[pos].mult < mult {
            return false;
        }
        self.entries[pos].mult -= mult;
        if self.entries[pos].mult == 0 {
            self.entries.remove(pos);
        }
        true
    }
}

impl fmt::Display for RadiiMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                let tag = if e.certainty == Certainty::Exact { "" } else { "≤" };
                format!("({tag}{}, {})", fmt_q(&e.irlog), e.mult)
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn c_omega(p: u64) -> Q {
    qf(1, p as i64 - 1)
}

/// Radii of the Frobenius descendant: `x < c_ω ↦ {p·x} ∪ {p·c_ω ×(p−1)}`,
/// `x ≥ c_ω ↦ {x + 1 ×p}`.
pub fn forward_descendant_law(ms: &RadiiMultiset, p: u64) -> RadiiMultiset {
    let cw = c_omega(p);
    let pq = q(p as i64);
    let junk = &cw * &pq;
    let pu = p as usize;
    let mut out = Vec::new();
    for e in ms.entries() {
        if e.irlog < cw {
            out.push(RadiiEntry { irlog: &e.irlog * &pq, mult: e.mult, certainty: e.certainty });
            out.push(RadiiEntry { irlog: junk.clone(), mult: e.mult * (pu - 1), certainty: e.certainty });
        } else {
            out.push(RadiiEntry { irlog: &e.irlog + Q::one(), mult: e.mult * pu, certainty: e.certainty });
        }
    }
    let mut r = RadiiMultiset::new(out);
    r.flags = ms.flags.clone();
    r
}

/// Inverse of [`forward_descendant_law`].
pub fn invert_descendant_multiset(desc: &RadiiMultiset, p: u64) -> Result<RadiiMultiset> {
    let cw = c_omega(p);
    let pq = q(p as i64);
    let junk = &cw * &pq;
    let pu = p as usize;
    let mut out = Vec::new();
    let mut small = 0usize;
    let mut at_junk = 0usize;
    let mut junk_certainty = Certainty::Exact;
    for e in desc.entries() {
        if e.irlog > junk {
            if e.mult % pu != 0 {
                return Err(Error::InversionInfeasible(format!(
                    "irlog {} has multiplicity {} not divisible by p = {p}",
                    fmt_q(&e.irlog),
                    e.mult
                )));
            }
            out.push(RadiiEntry { irlog: &e.irlog - Q::one(), mult: e.mult / pu, certainty: e.certainty });
        } else if e.irlog < junk {
            small += e.mult;
            out.push(RadiiEntry { irlog: &e.irlog / &pq, mult: e.mult, certainty: e.certainty });
        } else {
            at_junk += e.mult;
            junk_certainty = junk_certainty.max(e.certainty);
        }
    }
    let needed = (pu - 1) * small;
    if at_junk < needed {
        return Err(Error::InversionInfeasible(format!(
            "{small} small radii need {needed} copies of irlog {} but only {at_junk} are present",
            fmt_q(&junk)
        )));
    }
    let rest = at_junk - needed;
    if rest % pu != 0 {
        return Err(Error::AmbiguousInversion { entry: fmt_q(&junk) });
    }
    if rest > 0 {
        out.push(RadiiEntry { irlog: cw, mult: rest / pu, certainty: junk_certainty });
    }
    let mut r = RadiiMultiset::new(out);
    r.flags = desc.flags.clone();
    Ok(r)
}

impl RadiiEntry {
    pub fn exact(irlog: Q, mult: usize) -> Self {
        RadiiEntry { irlog, mult, certainty: Certainty::Exact }
    }

    pub fn lower_bound(irlog: Q, mult: usize) -> Self {
        RadiiEntry { irlog, mult, certainty: Certainty::LowerBoundOnly }
    }
}
