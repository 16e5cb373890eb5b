use num_traits::Zero;

use super::multiset::{forward_descendant_law, invert_descendant_multiset, RadiiEntry, RadiiMultiset};
use crate::diffmod::{DiffModule, Interval};
use crate::error::{Error, Result};
use crate::linalg;
use crate::valcore::newton::NewtonPolygon;
use crate::valcore::rational::{fmt_q, q, val_q, Q};
use crate::valcore::{Derivation, FieldMode, Scalar, Val};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiiOptions {
    /// Number of Frobenius-descendant steps allowed.
    pub depth: u32,
    /// Candidates tried by the cyclic-vector search.
    pub attempt_budget: usize,
    /// Largest rank a descendant may reach.
    pub max_rank: usize,
}

impl Default for RadiiOptions {
    fn default() -> Self {
        RadiiOptions { depth: 2, attempt_budget: 64, max_rank: 48 }
    }
}

/// Translates root valuations of a companion polynomial at `r` into radii.
pub fn christol_dwork(np: &NewtonPolygon, r: &Q, mode: &FieldMode) -> RadiiMultiset {
    let cw = mode.c_omega();
    let threshold = Val::Fin(-r.clone());
    let mut entries = Vec::new();
    let mut rest = 0;
    for (sigma, mult) in &np.segments {
        match sigma {
            Val::Fin(s) if *sigma < threshold => entries.push(RadiiEntry::exact(&cw - r - s, *mult)),
            _ => rest += mult,
        }
    }
    if rest > 0 {
        entries.push(match mode {
            FieldMode::PAdic { .. } => RadiiEntry::lower_bound(cw, rest),
            FieldMode::EqualChar0 { .. } => RadiiEntry::exact(Q::zero(), rest),
        });
    }
    RadiiMultiset::new(entries)
}

/// Radii at `r` with the default options and the given descendant depth.
pub fn module_radii(m: &DiffModule, r: &Q, depth: u32) -> Result<RadiiMultiset> {
    module_radii_with(m, r, &RadiiOptions { depth, ..RadiiOptions::default() })
}

pub fn module_radii_with(m: &DiffModule, r: &Q, opts: &RadiiOptions) -> Result<RadiiMultiset> {
    m.require_interior(r)?;
    blocks_radii(&m.with_derivation(Derivation::Ddt), r, opts, opts.depth)
}

fn block_label(rank: usize) -> String {
    format!("rank-{rank} block")
}

fn block_radii(block: &DiffModule, r: &Q, opts: &RadiiOptions, depth: u32) -> Result<RadiiMultiset> {
    let n = block.rank();
    if let Some(exps) = robba_exponents(block)? {
        let mut ms = RadiiMultiset::exact(&[(Q::zero(), n)]);
        let list: Vec<String> = exps.iter().map(fmt_q).collect();
        ms.certificates.push(format!("Robba: {} has constant residue with exponents [{}]", block_label(n), list.join(", ")));
        return Ok(ms);
    }
    let comp = block.cyclic_vector(r, opts.attempt_budget)?;
    let np = comp.newton_polygon(r, &block.mode)?;
    let ms = christol_dwork(&np, r, &block.mode);
    let hidden = ms.lower_bound_mult();
    if hidden == 0 {
        return Ok(ms);
    }
    let p = block.mode.require_padic("descendant recursion")?;
    let mut partial = ms.clone();
    if depth == 0 {
        partial.flags.push(format!("depth exhausted: {hidden} radii known only as irlog ≤ {}", fmt_q(&block.mode.c_omega())));
        return Ok(partial);
    }
    if n * p as usize > opts.max_rank {
        partial.flags.push(format!("rank cap {} reached: {hidden} radii unresolved", opts.max_rank));
        return Ok(partial);
    }
    let pr = r * q(p as i64);
    let desc = block.restrict(&Interval::point(r.clone()))?.frobenius_descendant()?;
    let mut dms = blocks_radii(&desc, &pr, opts, depth - 1)?;
    let known = RadiiMultiset::exact(&ms.exact_pairs());
    for e in forward_descendant_law(&known, p).entries() {
        if !dms.remove_exact(&e.irlog, e.mult) {
            return Err(Error::InversionInfeasible(format!(
                "descendant lacks the image {} of a visible radius",
                fmt_q(&e.irlog)
            )));
        }
    }
    match invert_descendant_multiset(&dms, p) {
        Ok(pre) => Ok(known.union(&pre)),
        Err(Error::AmbiguousInversion { entry }) => {
            partial.flags.push(format!("ambiguous inversion at descendant irlog {entry}"));
            Ok(partial)
        }
        Err(e) => Err(e),
    }
}

fn blocks_radii(m: &DiffModule, r: &Q, opts: &RadiiOptions, depth: u32) -> Result<RadiiMultiset> {
    let mut out = RadiiMultiset::default();
    for idx in m.scc_blocks() {
        out = out.union(&block_radii(&m.block(&idx), r, opts, depth)?);
    }
    Ok(out)
}

/// Exponents of a block whose `t d/dt` matrix is constant with eigenvalues in `Z_(p) ∩ Q`.
/// Such a block has all intrinsic radii equal to 1.
fn robba_exponents(block: &DiffModule) -> Result<Option<Vec<Q>>> {
    let FieldMode::PAdic { p } = block.mode else {
        return Ok(None);
    };
    let td = block.with_derivation(Derivation::TDdt);
    let mut a = Vec::with_capacity(td.rank());
    for row in &td.matrix {
        let mut out = Vec::with_capacity(row.len());
        for x in row {
            if !(x.is_zero() || x.is_constant()) {
                return Ok(None);
            }
            out.push(x.constant_term());
        }
        a.push(out);
    }
    let cp = linalg::charpoly(&a);
    let coeffs: Option<Vec<Q>> = cp.iter().map(Scalar::as_rational).collect();
    let Some(roots) = coeffs.and_then(|c| linalg::rational_roots(&c)) else {
        return Ok(None);
    };
    if roots.iter().any(|x| !x.is_zero() && val_q(x, p) < 0) {
        return Ok(None);
    }
    Ok(Some(roots))
}

/// Convenience: the largest irlog, i.e. `−log IR`.
pub fn ir_log(ms: &RadiiMultiset) -> Q {
    ms.entries().first().map(|e| e.irlog.clone()).unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmod::{test_module, twist_w};
    use crate::valcore::rational::qf;
    use crate::valcore::LaurentPoly;

    fn padic(p: u64) -> FieldMode {
        FieldMode::padic(p).unwrap()
    }

    #[test]
    fn christol_dwork_examples() {
        let m = padic(2);
        let np = NewtonPolygon::from_vals(&[Val::Fin(q(-2)), Val::Fin(q(0))]).unwrap();
        assert_eq!(christol_dwork(&np, &q(0), &m), RadiiMultiset::exact(&[(q(3), 1)]));
        let np = NewtonPolygon::from_vals(&[Val::Fin(q(-1)), Val::Fin(q(0))]).unwrap();
        assert_eq!(christol_dwork(&np, &q(0), &m), RadiiMultiset::exact(&[(q(2), 1)]));
        let np = NewtonPolygon::from_vals(&[Val::Fin(q(0)), Val::Fin(q(0))]).unwrap();
        let ms = christol_dwork(&np, &q(0), &m);
        assert_eq!(ms.entries(), &[RadiiEntry::lower_bound(q(1), 1)]);
    }

    #[test]
    fn test_module_radius() {
        let m = test_module(&Scalar::Rat(qf(1, 4)), 1, 1, 1, padic(2), Interval::disc(q(0))).unwrap();
        assert_eq!(module_radii(&m, &q(0), 2).unwrap(), RadiiMultiset::exact(&[(q(3), 1)]));
    }

    #[test]
    fn trivial_and_regular_modules_are_robba() {
        let triv = DiffModule::new(padic(2), Derivation::Ddt, Interval::disc(q(0)), linalg::zeros(2, 2)).unwrap();
        let ms = module_radii(&triv, &q(0), 2).unwrap();
        assert_eq!(ms.exact_pairs(), vec![(q(0), 2)]);
        assert!(ms.is_certified());
        assert!(!ms.certificates.is_empty());
        let m1 = DiffModule::new(padic(2), Derivation::TDdt, Interval::closed(q(-1), q(1)).unwrap(), vec![vec![LaurentPoly::one()]])
            .unwrap();
        assert_eq!(module_radii(&m1, &q(0), 2).unwrap().exact_pairs(), vec![(q(0), 1)]);
    }

    #[test]
    fn hidden_radius_resolved_by_descent() {
        // D v = c v with val(c) = 0 at p = 2, r = 0: IR = |exp(ct)| radius = ω, irlog = 1.
        let m = DiffModule::new(padic(2), Derivation::Ddt, Interval::closed(q(-1), q(1)).unwrap(), vec![vec![LaurentPoly::one()]])
            .unwrap();
        let ms = module_radii(&m, &q(0), 2).unwrap();
        assert_eq!(ms.exact_pairs(), vec![(q(1), 1)]);
        assert!(ms.is_certified(), "{ms:?}");
    }

    #[test]
    fn twist_w_radius() {
        for p in [2u64, 3] {
            let w = twist_w(1, p, Interval::closed(q(-1), q(1)).unwrap()).unwrap();
            let ms = module_radii(&w, &q(0), 0).unwrap();
            assert_eq!(ms.exact_pairs(), vec![(qf(p as i64, p as i64 - 1), 1)]);
        }
    }

    #[test]
    fn depth_exhaustion_is_flagged() {
        let m = DiffModule::new(padic(3), Derivation::Ddt, Interval::closed(q(-1), q(1)).unwrap(), vec![vec![LaurentPoly::one()]])
            .unwrap();
        let ms = module_radii(&m, &q(0), 0).unwrap();
        assert_eq!(ms.lower_bound_mult(), 1);
        assert!(!ms.is_certified());
        assert!(matches!(module_radii(&m, &q(5), 0), Err(Error::OutsideInterval(_))));
    }
}
