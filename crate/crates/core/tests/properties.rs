use lubin_tate::coleman::{ColemanContext, ColemanSeries};
use lubin_tate::formal_group::{build_formal_group, build_hom, iterate_fm, scalar_endo, LTPolynomial};
use lubin_tate::ramification::{lower_numbering, GaloisPresentation, Q};
use lubin_tate::series::{working_prec, TruncatedSeries};
use lubin_tate::torsion::{build_level, residue_rep};
use lubin_tate::verify::seeded_rng;
use lubin_tate::{DigitSet, Ring, UnramifiedRing, Zp};
use proptest::prelude::*;

fn ring(p: u32, n: usize, prec: u32) -> UnramifiedRing<Zp> {
    UnramifiedRing::new(Zp::new(p, prec).unwrap(), n).unwrap()
}

fn field() -> impl Strategy<Value = (u32, usize)> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..=3)
}

fn random_series(r: &UnramifiedRing<Zp>, nvars: usize, d: usize, seed: u64, constant: bool) -> TruncatedSeries<UnramifiedRing<Zp>> {
    let mut rng = seeded_rng(seed, 1);
    let mut terms = Vec::new();
    for total in usize::from(!constant)..=d {
        for i in 0..=total {
            let e = if nvars == 1 { [total as u16, 0, 0] } else { [i as u16, (total - i) as u16, 0] };
            terms.push((e, r.random_elem(&mut rng)));
            if nvars == 1 {
                break;
            }
        }
    }
    TruncatedSeries::from_terms(r, nvars, d, &terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((p, n) in field(), seed in any::<u64>()) {
        let r = ring(p, n, 8);
        let mut rng = seeded_rng(seed, 0);
        let (a, b, c) = (r.random_elem(&mut rng), r.random_elem(&mut rng), r.random_elem(&mut rng));
        prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
        prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
        prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
    }

    #[test]
    fn frobenius_is_ring_automorphism_of_order_n((p, n) in field(), seed in any::<u64>()) {
        let r = ring(p, n, 8);
        let mut rng = seeded_rng(seed, 0);
        let (a, b) = (r.random_elem(&mut rng), r.random_elem(&mut rng));
        prop_assert_eq!(r.frobenius(&r.mul(&a, &b), 1), r.mul(&r.frobenius(&a, 1), &r.frobenius(&b, 1)));
        prop_assert_eq!(r.frobenius(&r.add(&a, &b), 1), r.add(&r.frobenius(&a, 1), &r.frobenius(&b, 1)));
        prop_assert_eq!(r.frobenius(&a, n as i64), a.clone());
        prop_assert_eq!(r.frobenius(&r.frobenius(&a, 1), -1), a);
    }

    #[test]
    fn digit_round_trip((p, n) in field(), seed in any::<u64>(), val in -3i64..4) {
        let r = ring(p, n, 8);
        let mut rng = seeded_rng(seed, 0);
        let x = r.field_new(r.random_unit(&mut rng), val).unwrap();
        for set in [DigitSet::Plain, DigitSet::Teichmueller] {
            prop_assert_eq!(r.from_digits(&r.pi_adic_digits(&x, set)), x.clone());
        }
    }

    #[test]
    fn norm_and_trace_land_in_base((p, n) in field(), seed in any::<u64>()) {
        let r = ring(p, n, 8);
        let base = r.base();
        let mut rng = seeded_rng(seed, 0);
        let (x, y) = (r.random_elem(&mut rng), r.random_elem(&mut rng));
        let nxy = r.norm_to_base(&r.mul(&x, &y)).unwrap();
        prop_assert_eq!(nxy, base.mul(&r.norm_to_base(&x).unwrap(), &r.norm_to_base(&y).unwrap()));
        let txy = r.trace_to_base(&r.add(&x, &y)).unwrap();
        prop_assert_eq!(txy, base.add(&r.trace_to_base(&x).unwrap(), &r.trace_to_base(&y).unwrap()));
        let u = r.random_base_unit(&mut rng);
        prop_assert_eq!(r.norm_to_base(&r.norm_preimage(&u).unwrap()).unwrap(), u);
    }

    #[test]
    fn series_ring_laws((p, n) in field(), seed in any::<u64>()) {
        let r = ring(p, n, 6);
        let a = random_series(&r, 2, 5, seed, true);
        let b = random_series(&r, 2, 5, seed ^ 1, true);
        let c = random_series(&r, 2, 5, seed ^ 2, true);
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn composition_is_associative(p in prop::sample::select(vec![2u32, 3, 5]), seed in any::<u64>()) {
        let r = ring(p, 1, 6);
        let a = random_series(&r, 1, 6, seed, true);
        let b = random_series(&r, 1, 6, seed ^ 1, false);
        let c = random_series(&r, 1, 6, seed ^ 2, false);
        let left = a.compose(&[b.compose(std::slice::from_ref(&c)).unwrap()]).unwrap();
        let right = a.compose(&[b]).unwrap().compose(&[c]).unwrap();
        prop_assert_eq!(left, right);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inverse_law(p in prop::sample::select(vec![2u32, 3, 5]), n in 1usize..=2) {
        let d = 6;
        let r = ring(p, n, 8);
        let w = r.with_prec(working_prec(8, r.q(), d)).unwrap();
        let f = LTPolynomial::standard(&w).unwrap();
        let group = build_formal_group(&f, d).unwrap();
        let inv = scalar_endo(&w.from_i64(-1), &f, d).unwrap().series;
        let x = TruncatedSeries::var(&w, 1, d, 0).unwrap();
        let sum = group.series.compose(&[x, inv]).unwrap().coerce_to(&r);
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn hom_composition(seed in any::<u64>()) {
        let d = 6;
        let r = ring(3, 1, 8);
        let w = r.with_prec(working_prec(8, 3, d)).unwrap();
        let mut rng = seeded_rng(seed, 3);
        // f = 3X + 3cX^2 + X^3 for three random c; all share the uniformizer 3.
        let polys: Vec<_> = (0..3)
            .map(|_| {
                let c = w.mul(&w.from_i64(3), &w.random_elem(&mut rng));
                LTPolynomial::new(&w, vec![w.zero(), w.from_i64(3), c, w.one()]).unwrap()
            })
            .collect();
        let (t1, t2) = (w.random_unit(&mut rng), w.random_unit(&mut rng));
        let h1 = build_hom(&t1, &polys[0], &polys[1], d).unwrap();
        let h2 = build_hom(&t2, &polys[1], &polys[2], d).unwrap();
        let h12 = build_hom(&w.mul(&t1, &t2), &polys[0], &polys[2], d).unwrap();
        prop_assert_eq!(h2.compose(&h1).unwrap().coerce_to(&r), h12.series.coerce_to(&r));
    }

    #[test]
    fn scalars_respect_the_group_law(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3])) {
        let d = 5;
        let r = ring(p, 1, 8);
        let w = r.with_prec(working_prec(8, r.q(), d)).unwrap();
        let f = LTPolynomial::standard(&w).unwrap();
        let group = build_formal_group(&f, d).unwrap();
        let mut rng = seeded_rng(seed, 4);
        let (a, b) = (w.embed(&w.random_base_elem(&mut rng)), w.embed(&w.random_base_elem(&mut rng)));
        let sa = scalar_endo(&a, &f, d).unwrap().series;
        let sb = scalar_endo(&b, &f, d).unwrap().series;
        let sum = scalar_endo(&w.add(&a, &b), &f, d).unwrap().series;
        let prod = scalar_endo(&w.mul(&a, &b), &f, d).unwrap().series;
        prop_assert_eq!(group.series.compose(&[sa.clone(), sb.clone()]).unwrap().coerce_to(&r), sum.coerce_to(&r));
        prop_assert_eq!(sa.compose(&[sb]).unwrap().coerce_to(&r), prod.coerce_to(&r));
    }

    #[test]
    fn coleman_raises_congruence_level(seed in any::<u64>(), m in 1u32..=3) {
        let r = ring(3, 1, 8);
        let f = LTPolynomial::standard(&r).unwrap();
        let ctx = ColemanContext::for_levels(&f, 1, 3).unwrap();
        let mut rng = seeded_rng(seed, 5);
        let h = ColemanSeries::random_unit(&r, 2, &mut rng);
        let mut coeffs: Vec<_> = h.coeffs.iter().map(|c| r.mul_pi_pow(c, m)).collect();
        coeffs[0] = r.add(&coeffs[0], &r.one());
        let g = ColemanSeries::polynomial(coeffs);
        let ng = ctx.coleman_n(&g, 3).unwrap();
        for k in 0..=3 {
            let c = ng.coeff(&r, k);
            let d = if k == 0 { r.sub(&c, &r.one()) } else { c };
            prop_assert!(r.valuation(&d).is_none_or(|v| v > m), "coefficient {k} of N(g)");
        }
        let phi = ctx.coleman_n(&h, 3).unwrap();
        for k in 0..=3 {
            let d = r.sub(&phi.coeff(&r, k), &r.frobenius(&h.coeff(&r, k), 1));
            prop_assert!(r.valuation(&d).is_none_or(|v| v >= 1));
        }
    }

    #[test]
    fn galois_action_composes(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3])) {
        let r = ring(p, 1, 8);
        let f = LTPolynomial::standard(&r).unwrap();
        let m = if p == 2 { 3 } else { 2 };
        let level = build_level(&f, m).unwrap();
        let base = r.base();
        let mut rng = seeded_rng(seed, 6);
        let units: Vec<_> = level.units().map(|pt| pt.a).collect();
        let u = &units[rand::Rng::gen_range(&mut rng, 0..units.len())];
        let v = &units[rand::Rng::gen_range(&mut rng, 0..units.len())];
        let twice = level.galois_apply(u, &level.galois_apply(v, &level.alpha).unwrap()).unwrap();
        let uv = residue_rep(base, m, lubin_tate::torsion::residue_index(base, m, &base.mul(u, v)));
        prop_assert_eq!(level.locate(&twice), level.locate(level.point(&uv)));
        let x = level.ext.random_elem(&mut rng);
        let y = level.ext.random_elem(&mut rng);
        let xy = level.ext.mul(&x, &y);
        if let (Some(vx), Some(vy)) = (level.valuation(&x), level.valuation(&y)) {
            if vx + vy < level.ext.prec() {
                prop_assert_eq!(level.valuation(&xy), Some(vx + vy));
            }
        }
    }

    #[test]
    fn herbrand_phi_is_piecewise_linear(num in 0i64..200, den in 1i64..12) {
        let r = ring(2, 1, 8);
        let level = build_level(&LTPolynomial::standard(&r).unwrap(), 3).unwrap();
        let filt = lower_numbering(&GaloisPresentation::from_level(&level).unwrap()).unwrap();
        let x = Q::new(num, den);
        let k = x.floor().to_integer();
        let slope = Q::new(filt.size(k as usize + 1) as i64, filt.size(0) as i64);
        let lower = filt.phi(Q::from_integer(k));
        prop_assert_eq!(filt.phi(x), lower + (x - Q::from_integer(k)) * slope);
        prop_assert_eq!(filt.psi(filt.phi(x)), x);
    }

    #[test]
    fn artin_homomorphism_random_pairs(seed in any::<u64>()) {
        let r = ring(3, 1, 8);
        let level = build_level(&LTPolynomial::standard(&r).unwrap(), 2).unwrap();
        let mut rng = seeded_rng(seed, 7);
        let x = r.field_new(r.random_unit(&mut rng), rand::Rng::gen_range(&mut rng, -1..=1)).unwrap();
        let y = r.field_new(r.random_unit(&mut rng), rand::Rng::gen_range(&mut rng, -1..=1)).unwrap();
        let rep = lubin_tate::artin::check_homomorphism(&x, &y, &level).unwrap();
        prop_assert_eq!(rep.agree, rep.points);
    }
}

#[test]
fn teichmueller_roots_of_unity() {
    for (p, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)] {
        let r = ring(p, n, 8);
        let size = r.residue_size();
        for idx in 1..size {
            let c = r.residue(&r.lift_residue_index(idx));
            let t = r.teichmueller(&c);
            assert!(r.is_one(&r.pow(&t, size - 1)), "p={p} n={n} residue {idx}");
            assert_eq!(r.residue(&t), c);
        }
    }
}

#[test]
fn f_m_is_pi_m_endomorphism() {
    for (p, m) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
        let d = 8;
        let r = ring(p, 1, 8);
        let w = r.with_prec(working_prec(8, r.q(), d)).unwrap();
        let f = LTPolynomial::standard(&w).unwrap();
        let (fm, _) = iterate_fm(&f, m);
        let pm = w.from_i64((p as i64).pow(m as u32));
        let series = scalar_endo(&pm, &f, d).unwrap().series.coerce_to(&r);
        let window = TruncatedSeries::from_univariate(&w, d, &fm).unwrap().coerce_to(&r);
        assert_eq!(series, window, "p={p} m={m}");
    }
}
