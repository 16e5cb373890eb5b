use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::engine::{module_radii_with, RadiiOptions};
use crate::diffmod::DiffModule;
use crate::error::{Error, Result};
use crate::valcore::rational::{fmt_q, q, Q};

/// One affine piece `slope·r + intercept` on `[breakpoints[i], breakpoints[i+1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub slope: Q,
    pub intercept: Q,
    pub certified: bool,
}

impl Piece {
    pub fn eval(&self, r: &Q) -> Q {
        &self.slope * r + &self.intercept
    }
}

/// Continuous piecewise-affine function on `[breakpoints[0], breakpoints[last]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAFunction {
    pub breakpoints: Vec<Q>,
    pub pieces: Vec<Piece>,
}

impl PAFunction {
    /// Interpolates sorted points; chord `j` carries `certified[j]`. Adjacent chords
    /// with equal slope and status are merged.
    pub fn from_points(points: &[(Q, Q)], certified: &[bool]) -> Result<Self> {
        if points.len() < 2 || certified.len() + 1 != points.len() {
            return Err(Error::Parameter("need at least two points and one flag per chord".into()));
        }
        let mut breakpoints = vec![points[0].0.clone()];
        let mut pieces: Vec<Piece> = Vec::new();
        for (j, w) in points.windows(2).enumerate() {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if x1 <= x0 {
                return Err(Error::IntervalOrder { r1: fmt_q(x0), r2: fmt_q(x1) });
            }
            let slope = (y1 - y0) / (x1 - x0);
            let intercept = y0 - &slope * x0;
            let piece = Piece { slope, intercept, certified: certified[j] };
            if pieces.last() == Some(&piece) {
                *breakpoints.last_mut().unwrap() = x1.clone();
            } else {
                pieces.push(piece);
                breakpoints.push(x1.clone());
            }
        }
        Ok(PAFunction { breakpoints, pieces })
    }

    pub fn start(&self) -> &Q {
        &self.breakpoints[0]
    }

    pub fn end(&self) -> &Q {
        self.breakpoints.last().unwrap()
    }

    fn piece_index(&self, r: &Q) -> Option<usize> {
        if r < self.start() || r > self.end() {
            return None;
        }
        let i = self.breakpoints[1..].partition_point(|b| b < r);
        Some(i.min(self.pieces.len() - 1))
    }

    pub fn eval(&self, r: &Q) -> Option<Q> {
        self.piece_index(r).map(|i| self.pieces[i].eval(r))
    }

    pub fn piece_at(&self, r: &Q) -> Option<&Piece> {
        self.piece_index(r).map(|i| &self.pieces[i])
    }

    /// Values agree across every interior breakpoint.
    pub fn is_continuous(&self) -> bool {
        (1..self.pieces.len()).all(|i| self.pieces[i - 1].eval(&self.breakpoints[i]) == self.pieces[i].eval(&self.breakpoints[i]))
    }

    /// Pointwise sum over a common domain; a piece is certified when all summands are.
    pub fn sum(fs: &[PAFunction]) -> Result<PAFunction> {
        let first = fs.first().ok_or_else(|| Error::Parameter("empty sum".into()))?;
        let mut cuts: Vec<Q> = fs.iter().flat_map(|f| f.breakpoints.iter().cloned()).collect();
        cuts.sort();
        cuts.dedup();
        if fs.iter().any(|f| f.start() != first.start() || f.end() != first.end()) {
            return Err(Error::Parameter("summands have different domains".into()));
        }
        let points: Vec<(Q, Q)> = cuts
            .iter()
            .map(|x| (x.clone(), fs.iter().map(|f| f.eval(x).unwrap()).sum()))
            .collect();
        let flags: Vec<bool> = cuts
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / q(2);
                fs.iter().all(|f| f.piece_at(&mid).map_or(false, |p| p.certified))
            })
            .collect();
        PAFunction::from_points(&points, &flags)
    }

    /// Total length of certified pieces.
    pub fn certified_length(&self) -> Q {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.certified)
            .map(|(i, _)| &self.breakpoints[i + 1] - &self.breakpoints[i])
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileOptions {
    pub grid: usize,
    pub refinement_rounds: usize,
    pub radii: RadiiOptions,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { grid: 16, refinement_rounds: 2, radii: RadiiOptions::default() }
    }
}

/// `f_1 ≥ … ≥ f_n` on `[r1, r2]` with uncertified spans listed in `flags`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiiProfile {
    pub functions: Vec<PAFunction>,
    pub flags: Vec<String>,
    pub refinement_rounds: usize,
    pub samples: usize,
}

impl RadiiProfile {
    pub fn is_certified(&self) -> bool {
        self.flags.is_empty()
    }

    /// Fraction of the domain, averaged over the `f_i`, lying in certified pieces.
    pub fn certified_fraction(&self) -> Q {
        let Some(f) = self.functions.first() else {
            return Q::zero();
        };
        let len = f.end() - f.start();
        if len.is_zero() {
            return q(1);
        }
        let total: Q = self.functions.iter().map(PAFunction::certified_length).sum();
        total / (len * q(self.functions.len() as i64))
    }

    /// `F_i = f_1 + … + f_i`.
    pub fn partial_sums(&self) -> Result<Vec<PAFunction>> {
        (1..=self.functions.len()).map(|i| PAFunction::sum(&self.functions[..i])).collect()
    }
}

#[derive(Clone, Debug)]
struct Sample {
    values: Vec<Q>,
    uncertain: bool,
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var("CONVLAB_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Parameter(e.to_string()))
}

fn evaluate(m: &DiffModule, xs: &[Q], opts: &RadiiOptions, pool: &rayon::ThreadPool) -> Result<Vec<(Q, Sample)>> {
    pool.install(|| {
        xs.par_iter()
            .map(|x| {
                let ms = module_radii_with(m, x, opts)?;
                let values = ms.expand().into_iter().map(|irlog| x + irlog).collect();
                Ok((x.clone(), Sample { values, uncertain: !ms.is_certified() }))
            })
            .collect()
    })
}

fn small_denominator(s: &Q, n: usize) -> bool {
    *s.denom() <= BigInt::from(n)
}

struct ChordStatus {
    certified: Vec<bool>,
    /// Points whose evaluation could certify an open chord.
    kinks: Vec<Q>,
    /// Open chords that a midpoint might help.
    refinable: Vec<usize>,
}

fn chord_status(xs: &[Q], ys: &[Q], uncertain: &[bool], n: usize) -> ChordStatus {
    let c = xs.len() - 1;
    let slopes: Vec<Q> = (0..c).map(|j| (&ys[j + 1] - &ys[j]) / (&xs[j + 1] - &xs[j])).collect();
    let sound = |j: usize| !uncertain[j] && !uncertain[j + 1] && small_denominator(&slopes[j], n);
    let certified: Vec<bool> = (0..c)
        .map(|j| {
            sound(j) && ((j > 0 && slopes[j - 1] == slopes[j]) || (j + 1 < c && slopes[j + 1] == slopes[j]))
        })
        .collect();
    let mut kinks = Vec::new();
    let mut refinable = Vec::new();
    for j in 0..c {
        if certified[j] || uncertain[j] || uncertain[j + 1] {
            continue;
        }
        if j > 0 && j + 1 < c && certified[j - 1] && certified[j + 1] && slopes[j - 1] != slopes[j + 1] {
            let b1 = &ys[j] - &slopes[j - 1] * &xs[j];
            let b2 = &ys[j + 1] - &slopes[j + 1] * &xs[j + 1];
            let x = (&b2 - &b1) / (&slopes[j - 1] - &slopes[j + 1]);
            if xs[j] < x && x < xs[j + 1] {
                kinks.push(x);
                continue;
            }
        }
        refinable.push(j);
    }
    ChordStatus { certified, kinks, refinable }
}

pub fn radii_profile(m: &DiffModule, r1: &Q, r2: &Q, grid: usize) -> Result<RadiiProfile> {
    radii_profile_with(m, r1, r2, &ProfileOptions { grid, ..ProfileOptions::default() })
}

pub fn radii_profile_with(m: &DiffModule, r1: &Q, r2: &Q, opts: &ProfileOptions) -> Result<RadiiProfile> {
    if r1 >= r2 {
        return Err(Error::IntervalOrder { r1: fmt_q(r1), r2: fmt_q(r2) });
    }
    if opts.grid < 2 {
        return Err(Error::Parameter("grid must be at least 2".into()));
    }
    m.require_interior(r1)?;
    m.require_interior(r2)?;
    let n = m.rank();
    if n == 0 {
        return Err(Error::DegenerateInput("rank 0 module has no radii".into()));
    }
    let pool = thread_pool()?;
    let step = (r2 - r1) / q(opts.grid as i64 - 1);
    let xs: Vec<Q> = (0..opts.grid).map(|j| r1 + &step * q(j as i64)).collect();
    let mut samples: BTreeMap<Q, Sample> = evaluate(m, &xs, &opts.radii, &pool)?.into_iter().collect();
    let mut rounds = 0;
    let mut kink_passes = 0;
    let statuses = loop {
        let xs: Vec<Q> = samples.keys().cloned().collect();
        let uncertain: Vec<bool> = samples.values().map(|s| s.uncertain).collect();
        let statuses: Vec<ChordStatus> = (0..n)
            .map(|i| {
                let ys: Vec<Q> = samples.values().map(|s| s.values[i].clone()).collect();
                chord_status(&xs, &ys, &uncertain, n)
            })
            .collect();
        let mut kinks: Vec<Q> = statuses.iter().flat_map(|s| s.kinks.iter().cloned()).collect();
        kinks.sort();
        kinks.dedup();
        kinks.retain(|x| !samples.contains_key(x));
        if !kinks.is_empty() && kink_passes < 4 {
            kink_passes += 1;
            samples.extend(evaluate(m, &kinks, &opts.radii, &pool)?);
            continue;
        }
        let mut mids: Vec<Q> = statuses
            .iter()
            .flat_map(|s| s.refinable.iter())
            .map(|&j| (&xs[j] + &xs[j + 1]) / q(2))
            .collect();
        mids.sort();
        mids.dedup();
        if mids.is_empty() || rounds >= opts.refinement_rounds {
            break statuses;
        }
        rounds += 1;
        kink_passes = 0;
        samples.extend(evaluate(m, &mids, &opts.radii, &pool)?);
    };
    let xs: Vec<Q> = samples.keys().cloned().collect();
    let mut functions = Vec::with_capacity(n);
    let mut flags = Vec::new();
    for (i, st) in statuses.iter().enumerate() {
        let points: Vec<(Q, Q)> = samples.iter().map(|(x, s)| (x.clone(), s.values[i].clone())).collect();
        for (j, ok) in st.certified.iter().enumerate() {
            if !ok {
                flags.push(format!("f_{} uncertified on [{}, {}]", i + 1, fmt_q(&xs[j]), fmt_q(&xs[j + 1])));
            }
        }
        functions.push(PAFunction::from_points(&points, &st.certified)?);
    }
    Ok(RadiiProfile { functions, flags, refinement_rounds: rounds, samples: samples.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Context {
    Disc,
    Annulus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationReport {
    pub checks: Vec<PropertyCheck>,
}

impl VariationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn property(name: &'static str, witnesses: Vec<String>) -> PropertyCheck {
    PropertyCheck { name, passed: witnesses.is_empty(), witnesses }
}

fn span(f: &PAFunction, j: usize) -> String {
    format!("[{}, {}]", fmt_q(&f.breakpoints[j]), fmt_q(&f.breakpoints[j + 1]))
}

/// Checks convexity of each `F_i`, integrality of `F_n` slopes, slope denominators of
/// each `f_i`, and (on discs) nonpositive `F_i` slopes where `f_i(r) > r`. Only
/// certified pieces are examined.
pub fn variation_check(profiles: &[PAFunction], context: Context) -> Result<VariationReport> {
    let n = profiles.len();
    let mut sums = Vec::with_capacity(n);
    for i in 1..=n {
        sums.push(PAFunction::sum(&profiles[..i])?);
    }
    let mut convex = Vec::new();
    for (i, f) in sums.iter().enumerate() {
        for j in 1..f.pieces.len() {
            let (a, b) = (&f.pieces[j - 1], &f.pieces[j]);
            if a.certified && b.certified && a.slope > b.slope {
                convex.push(format!(
                    "F_{} slope drops from {} to {} at r = {}",
                    i + 1,
                    fmt_q(&a.slope),
                    fmt_q(&b.slope),
                    fmt_q(&f.breakpoints[j])
                ));
            }
        }
    }
    let mut integral = Vec::new();
    if let Some(f) = sums.last() {
        for (j, p) in f.pieces.iter().enumerate() {
            if p.certified && !p.slope.is_integer() {
                integral.push(format!("F_{n} has slope {} on {}", fmt_q(&p.slope), span(f, j)));
            }
        }
    }
    let mut slope_set = Vec::new();
    for (i, f) in profiles.iter().enumerate() {
        for (j, p) in f.pieces.iter().enumerate() {
            if p.certified && !small_denominator(&p.slope, n) {
                slope_set.push(format!("f_{} has slope {} on {}", i + 1, fmt_q(&p.slope), span(f, j)));
            }
        }
    }
    let mut checks = vec![
        property("convexity", convex),
        property("integral_top_slopes", integral),
        property("slope_denominators", slope_set),
    ];
    if context == Context::Disc {
        let mut mono = Vec::new();
        for (i, f) in sums.iter().enumerate() {
            for (j, p) in f.pieces.iter().enumerate() {
                let mid = (&f.breakpoints[j] + &f.breakpoints[j + 1]) / q(2);
                let above = profiles[i].eval(&mid).map_or(false, |v| v > mid);
                if p.certified && above && p.slope > Q::zero() {
                    mono.push(format!("F_{} has slope {} on {} where f_{} > r", i + 1, fmt_q(&p.slope), span(f, j), i + 1));
                }
            }
        }
        checks.push(property("disc_monotonicity", mono));
    }
    Ok(VariationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::{test_module, Interval};
    use crate::linalg;
    use crate::valcore::rational::qf;
    use crate::valcore::{Derivation, FieldMode, Scalar};

    #[test]
    fn test_module_profile_is_constant() {
        let mode = FieldMode::padic(2).unwrap();
        let m = test_module(&Scalar::Rat(qf(1, 4)), 1, 1, 1, mode, Interval::disc(q(0))).unwrap();
        let prof = radii_profile(&m, &q(0), &qf(3, 2), 4).unwrap();
        assert!(prof.is_certified(), "{:?}", prof.flags);
        assert_eq!(prof.functions[0].pieces.len(), 1);
        assert_eq!(prof.functions[0].pieces[0].slope, q(0));
        assert_eq!(prof.functions[0].pieces[0].intercept, q(3));
        assert!(variation_check(&prof.functions, Context::Disc).unwrap().all_passed());
    }

    #[test]
    fn trivial_profile_has_slope_one() {
        let mode = FieldMode::padic(3).unwrap();
        let m = DiffModule::new(mode, Derivation::Ddt, Interval::disc(q(0)), linalg::zeros(2, 2)).unwrap();
        let prof = radii_profile(&m, &q(0), &q(2), 3).unwrap();
        for f in &prof.functions {
            assert_eq!(f.pieces.len(), 1);
            assert_eq!(f.pieces[0].slope, q(1));
        }
    }

    #[test]
    fn bad_slope_is_reported() {
        let f = PAFunction::from_points(&[(q(0), q(0)), (q(1), qf(1, 3)), (q(2), qf(2, 3))], &[true, true]).unwrap();
        let rep = variation_check(&[f.clone(), f], Context::Annulus).unwrap();
        assert!(!rep.check("slope_denominators").unwrap().passed);
        assert!(rep.check("convexity").unwrap().passed);
    }

    #[test]
    fn kink_is_located() {
        let mode = FieldMode::padic(2).unwrap();
        // D v = λ u v with val λ = −3: f_1(r) = max(4 − r, 5/2) until it meets r.
        let m = test_module(&Scalar::Rat(qf(1, 8)), 2, 1, 1, mode, Interval::disc(q(0))).unwrap();
        let prof = radii_profile(&m, &q(0), &q(2), 5).unwrap();
        let f = &prof.functions[0];
        assert!(prof.is_certified(), "{:?}", prof.flags);
        assert_eq!(f.breakpoints, vec![q(0), qf(3, 2), q(2)]);
        assert_eq!(f.eval(&qf(3, 2)), Some(qf(5, 2)));
        assert!(variation_check(&prof.functions, Context::Disc).unwrap().all_passed());
    }

    #[test]
    fn pa_function_sum() {
        let a = PAFunction::from_points(&[(q(0), q(0)), (q(2), q(2))], &[true]).unwrap();
        let b = PAFunction::from_points(&[(q(0), q(1)), (q(1), q(1)), (q(2), q(2))], &[true, true]).unwrap();
        let s = PAFunction::sum(&[a, b]).unwrap();
        assert_eq!(s.breakpoints, vec![q(0), q(1), q(2)]);
        assert_eq!(s.eval(&q(2)), Some(q(4)));
        assert!(s.is_continuous());
    }
}
