use convlab::berkdisc::{padic_disc, DiscPoint};
use convlab::diffmod::{rank_one, test_module, DiffModule, Interval};
use convlab::expo::{
    frac_dist, invert_gauge, liouville_partition, liouville_profile, residue_exponent, shear, weakly_equivalent, Exponent,
    ExponentMultiset, LiouvilleStatus, ShearTarget,
};
use convlab::formats::{emit_module, parse_module, JobSpec};
use convlab::linalg::PolyMat;
use convlab::radii::{module_radii, radii_profile, Certainty};
use convlab::valcore::newton::from_roots;
use convlab::valcore::rational::pow_q;
use convlab::valcore::{newton_polygon, q, qf, split_by_slope, Derivation, FieldMode, LaurentPoly, Scalar, USeries, Val, Q};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn padic(p: u64) -> FieldMode {
    FieldMode::padic(p).unwrap()
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

fn small_q() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| qf(n, d))
}

fn nonzero_q() -> impl Strategy<Value = Q> {
    small_q().prop_filter("nonzero", |x| !x.is_zero())
}

fn laurent(max_terms: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::btree_map(-3i64..=3, nonzero_q(), 0..=max_terms)
        .prop_map(|m| LaurentPoly::from_rationals(&m.into_iter().collect::<Vec<_>>()))
}

fn series() -> impl Strategy<Value = Scalar> {
    prop::collection::btree_map(-2i64..=4, nonzero_q(), 1..=3).prop_map(|m| Scalar::Ser(USeries::exact(m)))
}

fn series_laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::btree_map(-2i64..=2, series(), 0..=3).prop_map(LaurentPoly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn gauss_val_is_multiplicative(p in prime(), f in laurent(3), g in laurent(3), r in small_q()) {
        let m = padic(p);
        let lhs = f.mul(&g).gauss_val(&r, &m).unwrap();
        let rhs = f.gauss_val(&r, &m).unwrap().plus(&g.gauss_val(&r, &m).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauss_val_is_multiplicative_over_series(f in series_laurent(), g in series_laurent(), r in small_q()) {
        let m = FieldMode::eqchar0(16).unwrap();
        let lhs = f.mul(&g).gauss_val(&r, &m).unwrap();
        let rhs = f.gauss_val(&r, &m).unwrap().plus(&g.gauss_val(&r, &m).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn scalar_valuation_laws(p in prime(), a in small_q(), b in small_q()) {
        let m = padic(p);
        let (sa, sb) = (Scalar::Rat(a), Scalar::Rat(b));
        let (va, vb) = (sa.val(&m).unwrap(), sb.val(&m).unwrap());
        prop_assert_eq!(sa.mul(&sb).val(&m).unwrap(), va.plus(&vb));
        let vs = sa.add(&sb).val(&m).unwrap();
        prop_assert!(vs >= va.clone().min(vb.clone()));
        if va != vb {
            prop_assert_eq!(vs, va.min(vb));
        }
    }

    #[test]
    fn no_stored_zero_coefficients(f in laurent(3), g in laurent(3)) {
        for h in [f.add(&g), f.sub(&f), f.mul(&g), f.sub(&g)] {
            prop_assert!(h.terms().values().all(|c| !c.is_exact_zero()));
        }
    }

    #[test]
    fn mode_filter_decay(
        p in prime(),
        modulus in 1i64..=4,
        h in 0i64..4,
        coeffs in prop::collection::vec(nonzero_q(), 1..=4),
        r1 in -4i64..=0,
        width in 2i64..=8,
        delta in 0i64..=4,
    ) {
        let m = padic(p);
        let h = h % modulus;
        let terms: Vec<(i64, Q)> = coeffs.iter().enumerate().map(|(j, c)| (h + modulus * (j as i64 - 2), c.clone())).collect();
        let f = LaurentPoly::from_rationals(&terms);
        let (r1, r2) = (q(r1), q(r1 + width));
        let delta = qf(delta, 4).min(qf(width, 2));
        let h_prime = q(modulus) * frac_dist(&qf(h, modulus));
        let outer = f.interval_gauss_val(&r1, &r2, &m).unwrap();
        let inner = f.interval_gauss_val(&(&r1 + &delta), &(&r2 - &delta), &m).unwrap();
        prop_assert!(inner >= outer.shift(&(h_prime * delta)));
    }

    #[test]
    fn newton_polygon_is_additive(p in prime(), a in prop::collection::vec(nonzero_q(), 2..=4), b in prop::collection::vec(nonzero_q(), 2..=4)) {
        let m = padic(p);
        let fa: Vec<LaurentPoly> = a.iter().cloned().map(LaurentPoly::from_q).collect();
        let fb: Vec<LaurentPoly> = b.iter().cloned().map(LaurentPoly::from_q).collect();
        let mut prod = vec![LaurentPoly::zero(); fa.len() + fb.len() - 1];
        for (i, x) in fa.iter().enumerate() {
            for (j, y) in fb.iter().enumerate() {
                prod[i + j] = prod[i + j].add(&x.mul(y));
            }
        }
        let na = newton_polygon(&fa, &q(0), &m).unwrap();
        let nb = newton_polygon(&fb, &q(0), &m).unwrap();
        let np = newton_polygon(&prod, &q(0), &m).unwrap();
        prop_assert_eq!(np.degree(), na.degree() + nb.degree());
        prop_assert_eq!(np, na.union(&nb));
    }

    #[test]
    fn split_by_slope_round_trip(
        p in prime(),
        low in prop::collection::vec((-3i64..=0, 1i64..=4), 1..=2),
        high in prop::collection::vec((1i64..=3, 1i64..=4), 1..=2),
    ) {
        let m = padic(p);
        let root = |(v, u): &(i64, i64)| LaurentPoly::from_q(pow_q(p, *v) * q(if *u % p as i64 == 0 { 1 } else { *u }));
        let roots: Vec<LaurentPoly> = low.iter().chain(high.iter()).map(root).collect();
        let input = from_roots(&roots);
        let s = split_by_slope(&input, &q(0), &qf(1, 2), &q(12), &m).unwrap();
        prop_assert_eq!(s.low.len(), low.len() + 1);
        prop_assert_eq!(s.high.len(), high.len() + 1);
        let np_low = newton_polygon(&s.low, &q(0), &m).unwrap();
        let np_high = newton_polygon(&s.high, &q(0), &m).unwrap();
        prop_assert!(np_low.segments.iter().all(|(v, _)| *v < Val::Fin(qf(1, 2))));
        prop_assert!(np_high.segments.iter().all(|(v, _)| *v > Val::Fin(qf(1, 2))));
        prop_assert_eq!(np_low.union(&np_high), newton_polygon(&input, &q(0), &m).unwrap());
    }
}

fn visible_module(p: u64, vl: i64, h: i64) -> DiffModule {
    test_module(&Scalar::Rat(pow_q(p, vl)), h, 1, 1, padic(p), Interval::point(q(0))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn radii_are_gauge_invariant(p in prime(), vl in -4i64..=-2, vl2 in -4i64..=-2, c in nonzero_q(), k in -2i64..=2) {
        let m = DiffModule::sum_of(&[visible_module(p, vl, 1), visible_module(p, vl2, 2)]).unwrap();
        let mut u: PolyMat = vec![vec![LaurentPoly::one(), LaurentPoly::from_rationals(&[(k, c)])], vec![LaurentPoly::zero(), LaurentPoly::one()]];
        u[1][0] = LaurentPoly::zero();
        let g = m.change_basis(&u).unwrap();
        let before = module_radii(&m, &q(0), 2).unwrap();
        let after = module_radii(&g, &q(0), 2).unwrap();
        prop_assert_eq!(before.exact_pairs(), after.exact_pairs());
        prop_assert_eq!(before.is_exact(), after.is_exact());
    }

    #[test]
    fn dual_and_tensor_bounds(p in prime(), a in -5i64..=-2, b in -5i64..=-2, ua in 1i64..=3, ub in 1i64..=3) {
        let mode = padic(p);
        let unit = |u: i64| if u % p as i64 == 0 { 1 } else { u };
        let ma = rank_one(LaurentPoly::from_q(pow_q(p, a) * q(unit(ua))), mode, Derivation::Ddt, Interval::point(q(0))).unwrap();
        let mb = rank_one(LaurentPoly::from_q(pow_q(p, b) * q(unit(ub))), mode, Derivation::Ddt, Interval::point(q(0))).unwrap();
        let top = |m: &DiffModule| module_radii(m, &q(0), 2).unwrap().entries()[0].irlog.clone();
        let (xa, xb) = (top(&ma), top(&mb));
        prop_assert_eq!(top(&ma.dual()), xa.clone());
        let t = module_radii(&ma.tensor(&mb).unwrap(), &q(0), 2).unwrap();
        let xt = &t.entries()[0];
        let bound = xa.clone().max(xb.clone());
        prop_assert!(xt.irlog <= bound);
        if xa != xb {
            prop_assert_eq!(xt.certainty, Certainty::Exact);
            prop_assert_eq!(xt.irlog.clone(), bound);
        }
    }

    #[test]
    fn cyclic_vector_certificate(p in prime(), vl in -4i64..=-1, h in prop::sample::select(vec![1i64, -1]), r in 0i64..=2) {
        let m = test_module(&Scalar::Rat(pow_q(p, vl)), h, p as usize, 1, padic(p), Interval::closed(q(0), q(2)).unwrap()).unwrap();
        let cd = m.cyclic_vector(&q(r), 64).unwrap();
        prop_assert!(matches!(cd.det.gauss_val(&q(r), &m.mode).unwrap(), Val::Fin(_)));
        prop_assert_eq!(cd.coeffs.len(), m.rank());
    }

    #[test]
    fn multisets_cover_the_rank(p in prop::sample::select(vec![2u64, 3]), vl in -4i64..=-1, h in 1i64..=2, e_is_p in any::<bool>(), r in 0i64..=3) {
        let (e, h) = if e_is_p { (p as usize, 1) } else { (1, h) };
        let m = test_module(&Scalar::Rat(pow_q(p, vl)), h, e, 1, padic(p), Interval::closed(q(0), q(2)).unwrap()).unwrap();
        let ms = module_radii(&m, &qf(r, 2), 1).unwrap();
        prop_assert_eq!(ms.rank(), m.rank());
        prop_assert!(ms.entries().iter().all(|x| x.irlog >= Q::zero()));
    }

    #[test]
    fn profile_pieces_are_continuous_with_bounded_slopes(p in prime(), vl in -4i64..=-3, vl2 in -4i64..=-3) {
        let m = DiffModule::sum_of(&[
            test_module(&Scalar::Rat(pow_q(p, vl)), 1, 1, 1, padic(p), Interval::disc(q(0))).unwrap(),
            test_module(&Scalar::Rat(pow_q(p, vl2)), 1, 1, 1, padic(p), Interval::disc(q(0))).unwrap(),
        ]).unwrap();
        let prof = radii_profile(&m, &q(0), &q(2), 8).unwrap();
        let n = prof.functions.len() as i64;
        for f in &prof.functions {
            prop_assert!(f.is_continuous());
            for piece in f.pieces.iter().filter(|x| x.certified) {
                prop_assert!(piece.slope.denom() <= &n.into());
            }
        }
    }
}

fn disc_point(p: u64) -> impl Strategy<Value = DiscPoint> {
    (-60i64..=60, 0u32..=2, prop::option::of(0i64..=24)).prop_map(move |(z, k, r)| {
        let disc = padic_disc(p, 0).unwrap();
        let center = Scalar::Rat(q(z) * pow_q(p, k as i64));
        match r {
            Some(r) => disc.point(center, qf(r, 3)).unwrap(),
            None => disc.classical(center).unwrap(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn domination_is_a_partial_order(x in disc_point(3), y in disc_point(3), z in disc_point(3)) {
        let disc = padic_disc(3, 0).unwrap();
        prop_assert!(disc.dominates(&x, &x));
        if disc.dominates(&x, &y) && disc.dominates(&y, &x) {
            prop_assert_eq!(&x, &y);
        }
        if disc.dominates(&z, &y) && disc.dominates(&y, &x) {
            prop_assert!(disc.dominates(&z, &x));
        }
    }

    #[test]
    fn retraction_is_idempotent(gens in prop::collection::vec(disc_point(2), 1..=3), x in disc_point(2)) {
        let disc = padic_disc(2, 0).unwrap();
        let s = disc.skeleton(&gens).unwrap();
        let rx = disc.retract(&s, &x).unwrap();
        prop_assert!(s.contains(&rx));
        prop_assert_eq!(disc.retract(&s, &rx).unwrap(), rx.clone());
        for v in &s.vertices {
            prop_assert_eq!(&disc.retract(&s, v).unwrap(), v);
        }
        prop_assert!(disc.dominates(&rx, &x));
    }

    #[test]
    fn frac_dist_is_periodic_and_bounded(x in small_q(), n in -20i64..=20) {
        let d = frac_dist(&x);
        prop_assert!(d >= Q::zero() && d <= qf(1, 2));
        prop_assert_eq!(frac_dist(&(&x + q(n))), d.clone());
        prop_assert_eq!(frac_dist(&-x.clone()), d);
    }

    #[test]
    fn liouville_status_matches_integrality(p in prime(), n in -30i64..=30, d in 1i64..=9) {
        let d = if d % p as i64 == 0 { d + 1 } else { d };
        let a = qf(n, d);
        let v = liouville_profile(&Exponent::Exact(a.clone()), p, 8).unwrap();
        match v.status {
            LiouvilleStatus::Integer => prop_assert!(a.is_integer()),
            LiouvilleStatus::RationalNonLiouville { .. } => prop_assert!(!a.is_integer()),
            LiouvilleStatus::UndecidedToDepth(_) => prop_assert!(false, "rational input left undecided"),
        }
    }

    #[test]
    fn integer_translates_are_weakly_equivalent(
        p in prime(),
        entries in prop::collection::vec((-12i64..=12, 1i64..=6), 1..=4),
        shifts in prop::collection::vec(-4i64..=4, 4),
    ) {
        let mode = padic(p);
        let a: Vec<Q> = entries.iter().map(|(n, d)| qf(*n, if d % p as i64 == 0 { d + 1 } else { *d })).collect();
        let b: Vec<Q> = a.iter().zip(&shifts).map(|(x, s)| x + q(*s)).collect();
        let c = shifts.iter().map(|s| q(s.abs())).fold(q(1), Q::max);
        let (ea, eb) = (ExponentMultiset::exact(&a, &mode).unwrap(), ExponentMultiset::exact(&b, &mode).unwrap());
        prop_assert!(weakly_equivalent(&ea, &eb, p, &c, 10).unwrap().is_consistent());
        let pa = liouville_partition(&ea, p, &q(1), 10).unwrap();
        let pb = liouville_partition(&eb, p, &q(1), 10).unwrap();
        prop_assert_eq!(pa, pb);
    }
}

fn regular_module() -> impl Strategy<Value = DiffModule> {
    let diag = prop::collection::vec((prop::sample::select(vec![qf(0, 1), qf(1, 2), qf(1, 3)]), 0i64..=2), 2..=3);
    (diag, prop::collection::vec(-2i64..=2, 9), prop::collection::vec((-3i64..=3, 1i64..=3), 9)).prop_map(|(diag, upper, tail)| {
        let n = diag.len();
        let mut m: PolyMat = vec![vec![LaurentPoly::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut terms = Vec::new();
                if i == j {
                    terms.push((0, &diag[i].0 + q(diag[i].1)));
                } else if i < j {
                    terms.push((0, q(upper[i * n + j])));
                }
                let (a, b) = tail[i * n + j];
                terms.push((1, qf(a, b)));
                m[i][j] = LaurentPoly::from_rationals(&terms);
            }
        }
        DiffModule::new(FieldMode::eqchar0(8).unwrap(), Derivation::TDdt, Interval::disc(q(0)), m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shear_round_trips(m in regular_module(), up in any::<bool>()) {
        let target = if up { ShearTarget::Up } else { ShearTarget::Down };
        let s = shear(&m, target).unwrap();
        prop_assert_eq!(&m.change_basis(&s.gauge).unwrap().matrix, &s.module.matrix);
        let back = invert_gauge(&s.gauge, &m.mode).unwrap();
        prop_assert_eq!(&s.module.change_basis(&back).unwrap().matrix, &m.matrix);
        let before = residue_exponent(&m).unwrap();
        let after = residue_exponent(&s.module).unwrap();
        let frac = |e: &ExponentMultiset| {
            let mut v: Vec<Q> = e.entries.iter().map(|x| { let a = x.as_exact().unwrap(); a - a.floor() }).collect();
            v.sort();
            v
        };
        prop_assert_eq!(frac(&before), frac(&after));
    }

    #[test]
    fn module_files_round_trip(m in regular_module()) {
        let text = emit_module(&m);
        prop_assert_eq!(parse_module(&text).unwrap(), m);
    }

    #[test]
    fn series_module_files_round_trip(f in series_laurent(), g in series_laurent()) {
        let m = DiffModule::new(
            FieldMode::eqchar0(16).unwrap(),
            Derivation::TDdt,
            Interval::closed(qf(-1, 2), qf(1, 2)).unwrap(),
            vec![vec![f, g.clone()], vec![g, LaurentPoly::one()]],
        )
        .unwrap();
        prop_assert_eq!(parse_module(&emit_module(&m)).unwrap(), m);
    }

    #[test]
    fn job_specs_round_trip(r in small_q(), depth in 0u32..=4) {
        let text = format!(r#"{{"command":"radii","input":"m.json","params":{{"r":"{r}","depth":"{depth}"}},"output":"json"}}"#);
        let job = JobSpec::parse(&text).unwrap();
        let again = JobSpec::parse(&job.to_value().to_string()).unwrap();
        prop_assert_eq!(job, again);
    }
}
