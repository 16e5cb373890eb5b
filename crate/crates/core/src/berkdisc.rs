//! Points of the Berkovich closed disc `{ val(t) ≥ r0 }`, the deformation retraction
//! onto its Gauss point, rooted skeleta and controlling subdivisions.
//!
//! Radii are stored in log units: `ζ_{z,r}` is the Gauss point of the disc of radius
//! `p^{-r}` around `z`, so larger `r` means a smaller disc.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::radii::PAFunction;
use crate::valcore::rational::{ceil_i64, fmt_q, q, Q};
use crate::valcore::{FieldMode, Scalar, USeries, Val};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointType {
    T1,
    T2,
    T3,
    T4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiscPoint {
    /// Type 1: the classical point `z`.
    Classical { center: Scalar },
    /// Type 2: `ζ_{z,r}` with rational `r`; the center is canonical modulo the disc.
    Disc { center: Scalar, r: Q },
    /// Type 3 marker: irrational radius strictly between `lo` and `hi`.
    Irrational { center: Scalar, lo: Q, hi: Q },
    /// Type 4: strictly nested discs `(z_k, r_k)` with `r_k` increasing to `limit`.
    /// Emptiness of the intersection is taken on trust.
    Nested { chain: Vec<(Scalar, Q)>, limit: Q },
}

impl DiscPoint {
    pub fn point_type(&self) -> PointType {
        match self {
            DiscPoint::Classical { .. } => PointType::T1,
            DiscPoint::Disc { .. } => PointType::T2,
            DiscPoint::Irrational { .. } => PointType::T3,
            DiscPoint::Nested { .. } => PointType::T4,
        }
    }

    /// A center for the point; for type 4 the center of the last disc in the chain.
    pub fn center(&self) -> &Scalar {
        match self {
            DiscPoint::Classical { center } | DiscPoint::Disc { center, .. } | DiscPoint::Irrational { center, .. } => center,
            DiscPoint::Nested { chain, .. } => &chain.last().expect("nonempty chain").0,
        }
    }

    /// `−log ρ(x)`: `Inf` for type 1, the declared limit for type 4.
    pub fn diameter(&self) -> Result<Val> {
        match self {
            DiscPoint::Classical { .. } => Ok(Val::Inf),
            DiscPoint::Disc { r, .. } => Ok(Val::Fin(r.clone())),
            DiscPoint::Irrational { .. } => Err(Error::IrrationalMarker),
            DiscPoint::Nested { limit, .. } => Ok(Val::Fin(limit.clone())),
        }
    }
}

impl fmt::Display for DiscPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscPoint::Classical { center } => write!(f, "{center}"),
            DiscPoint::Disc { center, r } => write!(f, "ζ({center}, r={})", fmt_q(r)),
            DiscPoint::Irrational { center, lo, hi } => write!(f, "ζ({center}, r∈({}, {}))", fmt_q(lo), fmt_q(hi)),
            DiscPoint::Nested { chain, limit } => write!(f, "ζ4[{} discs → r={}]", chain.len(), fmt_q(limit)),
        }
    }
}

/// The closed disc `val(t) ≥ r0` over a field model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BerkDisc {
    pub mode: FieldMode,
    pub r0: Q,
}

impl BerkDisc {
    pub fn new(mode: FieldMode, r0: Q) -> Self {
        BerkDisc { mode, r0 }
    }

    pub fn gauss_point(&self) -> DiscPoint {
        DiscPoint::Disc { center: Scalar::zero(), r: self.r0.clone() }
    }

    fn val(&self, z: &Scalar) -> Result<Val> {
        z.val(&self.mode)
    }

    fn sep(&self, a: &Scalar, b: &Scalar) -> Result<Val> {
        self.val(&a.sub(b))
    }

    fn check_center(&self, z: &Scalar) -> Result<()> {
        if self.val(z)? < Val::Fin(self.r0.clone()) {
            return Err(Error::Containment(format!("center {z} lies outside the disc val ≥ {}", fmt_q(&self.r0))));
        }
        Ok(())
    }

    /// Representative of `z` modulo the open-closed disc of log-radius `r`.
    fn canonical_center(&self, z: &Scalar, r: &Q) -> Result<Scalar> {
        let n = ceil_i64(r);
        match (&self.mode, z) {
            (FieldMode::PAdic { .. }, Scalar::Rat(_)) => Ok(z.round(&self.mode, r)),
            (FieldMode::PAdic { .. }, Scalar::Ser(_)) => Err(Error::Mode("u-series center in a p-adic disc".into())),
            (FieldMode::EqualChar0 { .. }, _) => {
                let s = z.to_series();
                if s.prec().map_or(false, |pr| pr < n) {
                    return Err(Error::PrecisionExhausted(format!("center {z} is not known to u-order {n}")));
                }
                let terms: BTreeMap<i64, Q> = s.terms().range(..n).map(|(k, c)| (*k, c.clone())).collect();
                Ok(match terms.iter().next() {
                    None => Scalar::zero(),
                    Some((0, c)) if terms.len() == 1 => Scalar::Rat(c.clone()),
                    _ => Scalar::Ser(USeries::exact(terms)),
                })
            }
        }
    }

    pub fn classical(&self, center: Scalar) -> Result<DiscPoint> {
        self.check_center(&center)?;
        Ok(DiscPoint::Classical { center })
    }

    pub fn point(&self, center: Scalar, r: Q) -> Result<DiscPoint> {
        self.check_center(&center)?;
        if r < self.r0 {
            return Err(Error::Containment(format!("radius r = {} exceeds the disc r0 = {}", fmt_q(&r), fmt_q(&self.r0))));
        }
        Ok(DiscPoint::Disc { center: self.canonical_center(&center, &r)?, r })
    }

    pub fn irrational(&self, center: Scalar, lo: Q, hi: Q) -> Result<DiscPoint> {
        self.check_center(&center)?;
        if !(self.r0 <= lo && lo < hi) {
            return Err(Error::Containment("irrational marker needs r0 ≤ lo < hi".into()));
        }
        Ok(DiscPoint::Irrational { center, lo, hi })
    }

    /// Verifies strict nesting of the chain; the empty intersection is not checkable.
    pub fn nested(&self, chain: Vec<(Scalar, Q)>, limit: Q) -> Result<DiscPoint> {
        if chain.is_empty() {
            return Err(Error::Chain("empty chain".into()));
        }
        let mut canon = Vec::with_capacity(chain.len());
        for (i, (z, r)) in chain.iter().enumerate() {
            self.check_center(z)?;
            if *r < self.r0 || *r >= limit {
                return Err(Error::Chain(format!("radius {} of disc {i} is outside [r0, limit)", fmt_q(r))));
            }
            if i > 0 {
                let (pz, pr) = &chain[i - 1];
                if r <= pr {
                    return Err(Error::Chain(format!("disc {i} does not shrink")));
                }
                if self.sep(z, pz)? < Val::Fin(pr.clone()) {
                    return Err(Error::Chain(format!("disc {i} is not inside disc {}", i - 1)));
                }
            }
            canon.push((self.canonical_center(z, r)?, r.clone()));
        }
        Ok(DiscPoint::Nested { chain: canon, limit })
    }

    pub fn contains(&self, x: &DiscPoint) -> bool {
        match x {
            DiscPoint::Classical { center } | DiscPoint::Irrational { center, .. } => self.check_center(center).is_ok(),
            DiscPoint::Disc { center, r } => *r >= self.r0 && self.check_center(center).is_ok(),
            DiscPoint::Nested { chain, .. } => chain.iter().all(|(z, r)| *r >= self.r0 && self.check_center(z).is_ok()),
        }
    }

    /// `H(x, s)`: the point of the root path of `x` at log-radius `min(r(x), s)`.
    pub fn homotopy(&self, x: &DiscPoint, s: &Q) -> Result<DiscPoint> {
        if *s < self.r0 {
            return Err(Error::Containment(format!("r = {} is outside the disc r0 = {}", fmt_q(s), fmt_q(&self.r0))));
        }
        if !self.contains(x) {
            return Err(Error::Containment(format!("{x} is outside the disc")));
        }
        match x {
            DiscPoint::Classical { center } => self.point(center.clone(), s.clone()),
            DiscPoint::Disc { center, r } => {
                if s < r {
                    self.point(center.clone(), s.clone())
                } else {
                    Ok(x.clone())
                }
            }
            DiscPoint::Irrational { center, lo, hi } => {
                if s <= lo {
                    self.point(center.clone(), s.clone())
                } else if s >= hi {
                    Ok(x.clone())
                } else {
                    Err(Error::IrrationalMarker)
                }
            }
            DiscPoint::Nested { chain, limit } => {
                if s >= limit {
                    return Ok(x.clone());
                }
                let (z, _) = chain
                    .iter()
                    .find(|(_, r)| r >= s)
                    .ok_or_else(|| Error::Chain(format!("no disc in the chain reaches r = {}", fmt_q(s))))?;
                self.point(z.clone(), s.clone())
            }
        }
    }

    /// True iff `y = H(x, s)` for some `s`. Undecidable marker comparisons yield false.
    pub fn dominates(&self, y: &DiscPoint, x: &DiscPoint) -> bool {
        if y == x {
            return true;
        }
        match y {
            DiscPoint::Disc { center, r } => {
                let below = match x.diameter() {
                    Ok(d) => d >= Val::Fin(r.clone()),
                    Err(_) => matches!(x, DiscPoint::Irrational { lo, .. } if lo >= r),
                };
                below && self.sep(center, x.center()).map_or(false, |v| v >= Val::Fin(r.clone()))
                    && match x {
                        DiscPoint::Nested { .. } => self.homotopy(x, r).map_or(false, |h| &h == y),
                        _ => true,
                    }
            }
            DiscPoint::Irrational { center, hi, .. } => {
                let below = match x {
                    DiscPoint::Classical { .. } => true,
                    DiscPoint::Disc { r, .. } => r >= hi,
                    DiscPoint::Nested { limit, .. } => limit >= hi,
                    DiscPoint::Irrational { lo, .. } => lo >= hi,
                };
                below && self.sep(center, x.center()).map_or(false, |v| v >= Val::Fin(hi.clone()))
            }
            DiscPoint::Classical { .. } | DiscPoint::Nested { .. } => false,
        }
    }

    /// Rooted skeleton spanned by the root paths of `generators` (types 1 and 2).
    pub fn skeleton(&self, generators: &[DiscPoint]) -> Result<Skeleton> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if !self.contains(g) {
                return Err(Error::Containment(format!("generator {g} is outside the disc")));
            }
            match g {
                DiscPoint::Classical { .. } | DiscPoint::Disc { .. } => gens.push(g.clone()),
                _ => return Err(Error::Parameter(format!("generator {g} must be of type 1 or 2"))),
            }
        }
        gens.sort_by_key(|g| g.to_string());
        gens.dedup();
        let root = self.gauss_point();
        let mut vertices = vec![root.clone()];
        let push = |v: DiscPoint, vs: &mut Vec<DiscPoint>| {
            if !vs.contains(&v) {
                vs.push(v);
            }
        };
        for g in &gens {
            push(g.clone(), &mut vertices);
        }
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                let join = self.join_radius(a, b)?;
                push(self.homotopy(a, &join)?, &mut vertices);
            }
        }
        let key = |v: &DiscPoint| (v.diameter().unwrap_or(Val::Inf), v.to_string());
        vertices.sort_by_key(key);
        let mut edges = Vec::new();
        for (i, v) in vertices.iter().enumerate().skip(1) {
            // The parent is the dominating vertex of largest radius below v.
            let parent = (0..i).rev().find(|&j| self.dominates(&vertices[j], v)).expect("root dominates every vertex");
            let r_start = match vertices[parent].diameter()? {
                Val::Fin(x) => x,
                Val::Inf => unreachable!("type-1 vertices dominate nothing else"),
            };
            edges.push(SkeletonEdge { parent, child: i, center: v.center().clone(), r_start, r_end: v.diameter()? });
        }
        Ok(Skeleton { disc: self.clone(), generators: gens, vertices, edges })
    }

    /// `r` at which the root paths of two type-1/2 points separate.
    pub fn join_radius(&self, a: &DiscPoint, b: &DiscPoint) -> Result<Q> {
        let cap = self.sep(a.center(), b.center())?.min(a.diameter()?).min(b.diameter()?);
        Ok(match cap {
            Val::Fin(x) if x >= self.r0 => x,
            Val::Fin(_) => self.r0.clone(),
            Val::Inf => return Err(Error::Parameter("the points coincide as classical points".into())),
        })
    }

    /// The last point of the root path of `x` lying on `S`.
    pub fn retract(&self, s: &Skeleton, x: &DiscPoint) -> Result<DiscPoint> {
        if !self.contains(x) {
            return Err(Error::Containment(format!("{x} is outside the disc")));
        }
        let z = x.center();
        let mut best = Val::Fin(self.r0.clone());
        for g in &s.generators {
            let reach = g.diameter()?.min(self.sep(z, g.center())?);
            if reach > best {
                best = reach;
            }
        }
        match best {
            Val::Inf => Ok(x.clone()),
            Val::Fin(b) => match x.diameter() {
                Ok(Val::Fin(rx)) if rx <= b => Ok(x.clone()),
                _ => self.homotopy(x, &b),
            },
        }
    }

    /// Subdivision of `S` at every kink of the supplied edge functions.
    pub fn controlling_subdivision(&self, s: &Skeleton, fs: &[(usize, PAFunction)]) -> Result<Subdivision> {
        let mut vertices = Vec::new();
        let mut flags = Vec::new();
        let mut kinks: BTreeMap<(usize, Q), Vec<(usize, Q, Q)>> = BTreeMap::new();
        for (fi, (edge, f)) in fs.iter().enumerate() {
            let e = s.edges.get(*edge).ok_or_else(|| Error::Parameter(format!("no edge {edge}")))?;
            if f.start() < &e.r_start || Val::Fin(f.end().clone()) > e.r_end {
                return Err(Error::Containment(format!("function {fi} extends beyond edge {edge}")));
            }
            for (j, p) in f.pieces.iter().enumerate() {
                if !p.certified {
                    flags.push(format!(
                        "function {fi} uncertified on [{}, {}] of edge {edge}",
                        fmt_q(&f.breakpoints[j]),
                        fmt_q(&f.breakpoints[j + 1])
                    ));
                }
            }
            for j in 1..f.pieces.len() {
                if f.pieces[j - 1].slope != f.pieces[j].slope {
                    kinks.entry((*edge, f.breakpoints[j].clone())).or_default().push((
                        fi,
                        f.pieces[j - 1].slope.clone(),
                        f.pieces[j].slope.clone(),
                    ));
                }
            }
        }
        for ((edge, r), slopes) in kinks {
            let point = self.point(s.edges[edge].center.clone(), r.clone())?;
            vertices.push(SubdivisionVertex { edge, r, point, slopes });
        }
        Ok(Subdivision { vertices, flags })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonEdge {
    pub parent: usize,
    pub child: usize,
    /// Center of the points `ζ_{center, r}`, `r_start ≤ r ≤ r_end`, along the edge.
    pub center: Scalar,
    pub r_start: Q,
    pub r_end: Val,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub disc: BerkDisc,
    pub generators: Vec<DiscPoint>,
    /// Vertex 0 is the root.
    pub vertices: Vec<DiscPoint>,
    pub edges: Vec<SkeletonEdge>,
}

impl Skeleton {
    pub fn root(&self) -> &DiscPoint {
        &self.vertices[0]
    }

    /// Whether `x` lies on the skeleton.
    pub fn contains(&self, x: &DiscPoint) -> bool {
        self.generators.iter().any(|g| self.disc.dominates(x, g)) || x == self.root()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionVertex {
    pub edge: usize,
    pub r: Q,
    pub point: DiscPoint,
    /// `(function index, left slope, right slope)` for each function kinking here.
    pub slopes: Vec<(usize, Q, Q)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub vertices: Vec<SubdivisionVertex>,
    pub flags: Vec<String>,
}

impl Subdivision {
    /// Every added vertex is a type-2 point.
    pub fn is_strict(&self) -> bool {
        self.vertices.iter().all(|v| v.point.point_type() == PointType::T2)
    }
}

/// Convenience for tests and the CLI: a p-adic disc of log-radius `r0`.
pub fn padic_disc(p: u64, r0: i64) -> Result<BerkDisc> {
    Ok(BerkDisc::new(FieldMode::padic(p)?, q(r0)))
}
