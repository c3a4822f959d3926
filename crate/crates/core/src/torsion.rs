//! Torsion towers: the level-m extension cut out by `f_m/f_{m-1}`, its torsion
//! points `[a]_f(α)`, Galois action and norms.

use std::collections::HashSet;

use crate::base::LocalBase;
use crate::error::{Error, Result};
use crate::extension::{EisensteinExtension, ExtElement};
use crate::formal_group::{iterate_fm, scalar_endo, LTPolynomial};
use crate::poly;
use crate::ring::Ring;
use crate::unramified::RingElement;

type Elem<B> = RingElement<<B as Ring>::Elem>;
type Ext<B> = ExtElement<<B as Ring>::Elem>;

/// A torsion point `[a]_f(α)` with its label `a ∈ O_K/π^m`.
#[derive(Clone, Debug)]
pub struct TorsionPoint<B: LocalBase> {
    /// Position in the digit enumeration of O_K/π^m.
    pub index: u64,
    pub a: B::Elem,
    pub point: Ext<B>,
}

#[derive(Clone, Debug)]
pub struct TorsionLevel<B: LocalBase> {
    pub f: LTPolynomial<B>,
    pub m: usize,
    pub fm: Vec<Elem<B>>,
    pub ext: EisensteinExtension<B>,
    pub alpha: Ext<B>,
    pub points: Vec<TorsionPoint<B>>,
    /// Degree at which `[a]_f` series were truncated before evaluation.
    pub series_cap: usize,
}

/// Digits `d_0..d_{m-1}` of `index` in base q, as the element `Σ lift(d_i) π^i` of O_K.
pub fn residue_rep<B: LocalBase>(base: &B, m: usize, mut index: u64) -> B::Elem {
    let q = base.q();
    let digits: Vec<u32> = (0..m)
        .map(|_| {
            let d = (index % q) as u32;
            index /= q;
            d
        })
        .collect();
    base.from_digits(&digits)
}

/// Index of `a mod π^m` in the digit enumeration.
pub fn residue_index<B: LocalBase>(base: &B, m: usize, a: &B::Elem) -> u64 {
    let q = base.q();
    (0..m).rev().fold(0u64, |acc, i| acc * q + base.digit(a, i as u32) as u64)
}

/// Evaluates a univariate series with O_L coefficients at a point of positive valuation.
pub fn eval_series_at<B: LocalBase>(ext: &EisensteinExtension<B>, coeffs: &[Elem<B>], x: &Ext<B>) -> Ext<B> {
    ext.eval_base_poly(coeffs, x)
}

/// The level-m tower of `f`.
pub fn build_level<B: LocalBase>(f: &LTPolynomial<B>, m: usize) -> Result<TorsionLevel<B>> {
    if m == 0 {
        return Err(Error::InvalidConfig("torsion level must be at least 1".into()));
    }
    let r = f.ring();
    let (fm, _) = iterate_fm(f, m);
    let (fm1, _) = iterate_fm(f, m - 1);
    let (g, rem) = poly::divrem_monic(r, &fm, &fm1)?;
    if !rem.is_empty() {
        return Err(Error::NotEisenstein("f_{m-1} does not divide f_m".into()));
    }
    let ext = EisensteinExtension::new(r, g)?;
    let alpha = ext.alpha();
    let series_cap = (ext.prec() as usize).saturating_sub(1).max(1);
    let base = r.base();
    let q = r.q();
    let count = q.pow(m as u32);
    let mut points = Vec::with_capacity(count as usize);
    for index in 0..count {
        let a = residue_rep(base, m, index);
        let point = if base.is_zero(&a) {
            ext.zero()
        } else {
            let hom = scalar_endo(&r.embed(&a), f, series_cap)?;
            eval_series_at(&ext, &hom.series.univariate_coeffs(), &alpha)
        };
        points.push(TorsionPoint { index, a, point });
    }
    Ok(TorsionLevel { f: f.clone(), m, fm, ext, alpha, points, series_cap })
}

impl<B: LocalBase> TorsionLevel<B> {
    pub fn e(&self) -> usize {
        self.ext.e()
    }

    pub fn point(&self, a: &B::Elem) -> &Ext<B> {
        let idx = residue_index(self.f.ring().base(), self.m, a);
        &self.points[idx as usize].point
    }

    /// Residues prime to π, in enumeration order.
    pub fn units(&self) -> impl Iterator<Item = &TorsionPoint<B>> {
        let base = self.f.ring().base();
        self.points.iter().filter(move |p| base.is_unit(&p.a))
    }

    /// The automorphism `α ↦ [u]_f(α)` applied to `x`.
    pub fn galois_apply(&self, u: &B::Elem, x: &Ext<B>) -> Result<Ext<B>> {
        let base = self.f.ring().base();
        if !base.is_unit(u) {
            return Err(Error::NotAUnit(base.fmt_elem(u)));
        }
        Ok(self.ext.substitute(x, self.point(u)))
    }

    /// `∏_σ σ(x)` over Gal(L'/L), returned in O_L.
    pub fn norm_rel(&self, x: &Ext<B>) -> Result<Elem<B>> {
        let mut acc = self.ext.one();
        for u in self.units() {
            acc = self.ext.mul(&acc, &self.ext.substitute(x, &u.point));
        }
        self.ext
            .to_base(&acc)
            .ok_or_else(|| Error::NotInBase(format!("relative norm {}", self.ext.fmt_elem(&acc))))
    }

    /// The norm down to K.
    pub fn norm_abs(&self, x: &Ext<B>) -> Result<B::Elem> {
        self.f.ring().norm_to_base(&self.norm_rel(x)?)
    }

    /// Index of the point `β` with `v(x - β) > q^{m-1}`; distinct points are never that close.
    pub fn locate(&self, x: &Ext<B>) -> Option<usize> {
        let sep = self.f.q().pow(self.m as u32 - 1) as u32;
        self.points
            .iter()
            .position(|p| self.ext.valuation(&self.ext.sub(x, &p.point)).is_none_or(|v| v > sep))
    }

    pub fn valuation(&self, x: &Ext<B>) -> Option<u32> {
        self.ext.valuation(x)
    }

    /// One line per residue: index, label, coordinates of `[a](α)` and its valuation.
    pub fn to_tsv(&self) -> String {
        let r = self.f.ring();
        let base = r.base();
        let mut out = String::from("index\ta");
        for i in 0..self.e() {
            out.push_str(&format!("\tc{i}"));
        }
        out.push_str("\tvaluation\n");
        for p in &self.points {
            out.push_str(&format!("{}\t{}", p.index, base.fmt_elem(&p.a)));
            for c in &p.point.coords {
                out.push_str(&format!("\t{}", r.fmt_coords(c)));
            }
            let v = self.valuation(&p.point).map_or("inf".to_string(), |v| v.to_string());
            out.push_str(&format!("\t{v}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparabilityReport {
    pub m: usize,
    pub expected: u64,
    pub distinct: u64,
    pub all_roots: bool,
    /// `v(f_m'(α))` in the level's normalization; `None` when it vanishes to precision.
    pub derivative_valuation: Option<u32>,
    pub pass: bool,
}

/// Counts distinct roots among the enumerated torsion points and checks `f_m'(α) ≠ 0`.
pub fn check_separable<B: LocalBase>(f: &LTPolynomial<B>, m: usize) -> Result<SeparabilityReport> {
    if m == 0 {
        return Ok(SeparabilityReport {
            m,
            expected: 1,
            distinct: 1,
            all_roots: true,
            derivative_valuation: Some(0),
            pass: true,
        });
    }
    let level = build_level(f, m)?;
    let expected = f.q().pow(m as u32);
    let pts: HashSet<_> = level.points.iter().map(|p| &p.point).collect();
    let ext = &level.ext;
    let all_roots = level.points.iter().all(|p| ext.is_zero(&ext.eval_base_poly(&level.fm, &p.point)));
    let deriv = poly::derivative(f.ring(), &level.fm);
    let dv = ext.valuation(&ext.eval_base_poly(&deriv, &level.alpha));
    let distinct = pts.len() as u64;
    Ok(SeparabilityReport {
        m,
        expected,
        distinct,
        all_roots,
        derivative_valuation: dv,
        pass: distinct == expected && all_roots && dv.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{FqSeries, Zp};
    use crate::formal_group::FormalGroupLaw;
    use crate::formal_group::build_formal_group;
    use crate::unramified::UnramifiedRing;

    fn zring(p: u32, prec: u32) -> UnramifiedRing<Zp> {
        UnramifiedRing::new(Zp::new(p, prec).unwrap(), 1).unwrap()
    }

    #[test]
    fn small_levels() {
        let r = zring(2, 10);
        let f = LTPolynomial::from_i64s(&r, &[0, 2, 1]).unwrap();
        let l1 = build_level(&f, 1).unwrap();
        assert_eq!(l1.ext.defining_poly(), &poly::from_i64s(&r, &[2, 1])[..]);
        assert_eq!(l1.points.len(), 2);
        assert_eq!(l1.points[1].point, l1.ext.embed(&r.from_i64(-2)));
        let l2 = build_level(&f, 2).unwrap();
        assert_eq!(l2.ext.defining_poly(), &poly::from_i64s(&r, &[2, 2, 1])[..]);
        assert_eq!(l2.points.len(), 4);
        let r3 = zring(3, 8);
        let c = LTPolynomial::cyclotomic(&r3).unwrap();
        let l = build_level(&c, 1).unwrap();
        assert_eq!(l.ext.defining_poly(), &poly::from_i64s(&r3, &[3, 3, 1])[..]);
    }

    #[test]
    fn galois_action_examples() {
        let r = zring(2, 10);
        let f = LTPolynomial::from_i64s(&r, &[0, 2, 1]).unwrap();
        let l2 = build_level(&f, 2).unwrap();
        let x = &l2.ext;
        let img = l2.galois_apply(&3, &l2.alpha).unwrap();
        assert_eq!(img, x.sub(&x.neg(&l2.alpha), &x.from_i64(2)));
        assert_eq!(l2.galois_apply(&1, &l2.alpha).unwrap(), l2.alpha);
        assert!(matches!(l2.galois_apply(&2, &l2.alpha), Err(Error::NotAUnit(_))));
        let r3 = zring(3, 8);
        let f3 = LTPolynomial::from_i64s(&r3, &[0, 3, 0, 1]).unwrap();
        let l = build_level(&f3, 1).unwrap();
        assert_eq!(l.galois_apply(&r3.base().from_i64(-1), &l.alpha).unwrap(), l.ext.neg(&l.alpha));
    }

    #[test]
    fn norm_examples() {
        let r = zring(2, 10);
        let f = LTPolynomial::from_i64s(&r, &[0, 2, 1]).unwrap();
        let l2 = build_level(&f, 2).unwrap();
        let x = &l2.ext;
        assert_eq!(l2.norm_rel(&x.neg(&l2.alpha)).unwrap(), r.from_i64(2));
        assert_eq!(l2.norm_rel(&x.add(&x.one(), &l2.alpha)).unwrap(), r.one());
        assert_eq!(l2.norm_rel(&x.from_i64(2)).unwrap(), r.from_i64(4));
        assert_eq!(r.base().valuation(&l2.norm_abs(&l2.alpha).unwrap()), Some(1));
    }

    #[test]
    fn module_law_on_points() {
        let r = zring(3, 8);
        let f = LTPolynomial::from_i64s(&r, &[0, 3, 0, 1]).unwrap();
        let l = build_level(&f, 2).unwrap();
        let cap = l.series_cap;
        let g: FormalGroupLaw<Zp> = build_formal_group(&f, cap).unwrap();
        let x = &l.ext;
        for (a, b) in [(1u64, 2u64), (4, 7), (5, 8)] {
            let sum = (a + b) % 9;
            let mut acc = x.zero();
            for (e, c) in g.series.terms() {
                let t = x.mul(&x.pow(l.point(&a), e[0] as u64), &x.pow(l.point(&b), e[1] as u64));
                acc = x.add(&acc, &x.scale(&c, &t));
            }
            assert_eq!(&acc, l.point(&sum), "{a} + {b}");
        }
    }

    #[test]
    fn separability() {
        let r = zring(2, 10);
        let f = LTPolynomial::from_i64s(&r, &[0, 2, 1]).unwrap();
        for m in 0..=3 {
            let rep = check_separable(&f, m).unwrap();
            assert!(rep.pass, "{rep:?}");
            assert_eq!(rep.distinct, 1 << m);
        }
        let base = FqSeries::new(2, 1, 8).unwrap();
        let rt = UnramifiedRing::new(base, 1).unwrap();
        let ft = LTPolynomial::standard(&rt).unwrap();
        let rep = check_separable(&ft, 2).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.distinct, 4);
    }

    #[test]
    fn tsv_has_one_row_per_point() {
        let r = zring(2, 6);
        let f = LTPolynomial::from_i64s(&r, &[0, 2, 1]).unwrap();
        let l = build_level(&f, 2).unwrap();
        assert_eq!(l.to_tsv().lines().count(), 5);
    }
}
