//! The Artin map at finite level: `x ↦ (φ^j, α ↦ [xπ_j](α))` with `j = -v(x)`.

use serde::Serialize;

use crate::base::{LocalBase, Zp};
use crate::error::{Error, Result};
use crate::extension::ExtElement;
use crate::formal_group::{build_hom, solve_theta, LTPolynomial};
use crate::poly;
use crate::ring::Ring;
use crate::torsion::{build_level, eval_series_at, residue_index, residue_rep, TorsionLevel};
use crate::unramified::{FieldElement, RingElement, UnramifiedRing};

type Ext<B> = ExtElement<<B as Ring>::Elem>;
type Field<B> = FieldElement<<B as Ring>::Elem>;

/// `π_j` with `π_{j+j'} = π_{j'}^{(j)} π_j`; for `j < 0` this is `(π_{-j}^{-1})^{(j)}`.
pub fn pi_j<B: LocalBase>(f: &LTPolynomial<B>, j: i64) -> Field<B> {
    let r = f.ring();
    if j >= 0 {
        (0..j).fold(r.field_one(), |acc, t| r.field_mul(&acc, &f.frobenius(t).pi().clone()))
    } else {
        let inv = r.field_inv(&pi_j(f, -j)).expect("π_j is nonzero");
        r.field_frobenius(&inv, j)
    }
}

#[derive(Clone, Debug)]
pub struct ArtinDescriptor<B: LocalBase> {
    pub x: Field<B>,
    /// Exponent of the arithmetic Frobenius on L; equals `-v(x)`.
    pub j: i64,
    /// The unit `xπ_j`.
    pub theta: RingElement<B::Elem>,
    /// `σ(β)` for every point β of the level, in enumeration order.
    pub images: Vec<Ext<B>>,
    /// Label pairs `(a, a')` when the target tower is the source tower.
    pub permutation: Option<Vec<(u64, u64)>>,
}

impl<B: LocalBase> ArtinDescriptor<B> {
    pub fn generator_image(&self) -> &Ext<B> {
        &self.images[1]
    }

    /// `σ(y)`: Frobenius on coefficients, then `α ↦ σ(α)`.
    pub fn apply(&self, level: &TorsionLevel<B>, y: &Ext<B>) -> Ext<B> {
        let r = level.f.ring();
        let twisted = level.ext.apply_base(y, |c| r.frobenius(c, self.j));
        level.ext.substitute(&twisted, self.generator_image())
    }

    pub fn is_identity(&self, level: &TorsionLevel<B>) -> bool {
        self.images.iter().enumerate().all(|(k, img)| level.locate(img) == Some(k))
    }
}

/// Evaluates the Artin descriptor of `x ∈ K^×` on every point of the level.
pub fn artin_apply<B: LocalBase>(x: &Field<B>, level: &TorsionLevel<B>) -> Result<ArtinDescriptor<B>> {
    let f = &level.f;
    let r = f.ring();
    if x.unit.is_none() {
        return Err(Error::NotAUnit("Artin map of zero".into()));
    }
    if !x.unit.as_ref().is_some_and(|u| r.in_base(u)) {
        return Err(Error::NotInBase(r.fmt_field(x)));
    }
    let j = -x.val;
    let theta = r.field_to_ring(&r.field_mul(x, &pi_j(f, j)))?;
    let target = f.frobenius(j);
    let hom = build_hom(&theta, f, &target, level.series_cap)?;
    let coeffs = hom.series.univariate_coeffs();
    let images: Vec<Ext<B>> = level.points.iter().map(|p| eval_series_at(&level.ext, &coeffs, &p.point)).collect();
    let permutation = if poly::eq(r, target.coeffs(), f.coeffs()) {
        let mut perm = Vec::with_capacity(images.len());
        for (p, img) in level.points.iter().zip(&images) {
            let k = level
                .locate(img)
                .ok_or_else(|| Error::PrecisionExhausted("image is not a torsion point".into()))?;
            perm.push((p.index, level.points[k].index));
        }
        Some(perm)
    } else {
        None
    };
    Ok(ArtinDescriptor { x: x.clone(), j, theta, images, permutation })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterizationReport {
    pub n: u32,
    pub j: i64,
    pub norm_ok: bool,
    pub frobenius_ok: bool,
    pub fixed_points: usize,
    pub total_points: usize,
}

impl CharacterizationReport {
    pub fn pass(&self) -> bool {
        self.norm_ok && self.frobenius_ok && self.fixed_points == self.total_points
    }
}

/// A uniformizer π of `K_n` with `N(π) = x`, built as `ϖ · norm_preimage(x/ϖ^n)`.
pub fn uniformizer_with_norm<B: LocalBase>(l: &UnramifiedRing<B>, x: &B::Elem) -> Result<RingElement<B::Elem>> {
    let base = l.base();
    let n = l.n() as u32;
    if base.valuation(x) != Some(n) {
        return Err(Error::NotAUniformizer(format!("v({}) must be {n}", base.fmt_elem(x))));
    }
    let unit = base.shift_down(x, n);
    let w = l.norm_preimage(&unit)?;
    Ok(l.mul(&l.uniformizer(), &w))
}

/// The relative tower for `x` of valuation `n > 0`: L = K_n, f = πX + X^q with `N(π) = x`.
pub fn relative_tower<B: LocalBase>(base: &B, x: &B::Elem, m: usize) -> Result<TorsionLevel<B>> {
    let n = base
        .valuation(x)
        .filter(|&v| v > 0)
        .ok_or_else(|| Error::NotAUniformizer(format!("{} has no positive valuation", base.fmt_elem(x))))?;
    let l = UnramifiedRing::new(base.clone(), n as usize)?;
    let pi = uniformizer_with_norm(&l, x)?;
    build_level(&LTPolynomial::with_uniformizer(&l, &pi)?, m)
}

/// `Art_K(x)` acts as `φ^{-n}` on L and fixes the torsion of the tower of x.
pub fn check_characterization<B: LocalBase>(x: &B::Elem, level: &TorsionLevel<B>) -> Result<CharacterizationReport> {
    let r = level.f.ring();
    let n = r.n() as u32;
    let xf = r.field_from_base(x);
    let norm_ok = r.field_eq(&r.field_norm(level.f.pi()), &xf);
    let d = artin_apply(&xf, level)?;
    let frobenius_ok = xf.val == n as i64 && d.j == -xf.val;
    let fixed_points = d.images.iter().enumerate().filter(|(k, img)| level.locate(img) == Some(*k)).count();
    Ok(CharacterizationReport { n, j: d.j, norm_ok, frobenius_ok, fixed_points, total_points: level.points.len() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomomorphismReport {
    pub points: usize,
    pub agree: usize,
}

impl HomomorphismReport {
    pub fn pass(&self) -> bool {
        self.agree == self.points
    }
}

/// `Art(x) ∘ Art(y) = Art(xy)` on every point of a tower over K itself.
pub fn check_homomorphism<B: LocalBase>(x: &Field<B>, y: &Field<B>, level: &TorsionLevel<B>) -> Result<HomomorphismReport> {
    let r = level.f.ring();
    if r.n() != 1 {
        return Err(Error::Unsupported("homomorphism check needs L = K".into()));
    }
    let dx = artin_apply(x, level)?;
    let dy = artin_apply(y, level)?;
    let dxy = artin_apply(&r.field_mul(x, y), level)?;
    let agree = (0..level.points.len())
        .filter(|&k| {
            let lhs = dx.apply(level, &dy.images[k]);
            let want = level.locate(&dxy.images[k]);
            want.is_some() && level.locate(&lhs) == want
        })
        .count();
    Ok(HomomorphismReport { points: level.points.len(), agree })
}

/// Descriptors of `x ∈ units × {1, ϖ}` are pairwise distinct.
pub fn bijectivity_check<B: LocalBase>(level: &TorsionLevel<B>) -> Result<(usize, bool)> {
    let r = level.f.ring();
    let base = r.base();
    let sep = level.f.q().pow(level.m as u32 - 1) as u32;
    let mut seen: Vec<(i64, Ext<B>)> = Vec::new();
    for u in level.units() {
        for k in 0..2u32 {
            let x = base.mul(&u.a, &base.mul_pi_pow(&base.one(), k));
            let d = artin_apply(&r.field_from_base(&x), level)?;
            seen.push((d.j, d.generator_image().clone()));
        }
    }
    let ext = &level.ext;
    let distinct = seen.iter().enumerate().all(|(a, (ja, xa))| {
        seen[a + 1..]
            .iter()
            .all(|(jb, xb)| ja != jb || ext.valuation(&ext.sub(xa, xb)).is_some_and(|v| v <= sep))
    });
    Ok((seen.len(), distinct))
}

/// The level-(m+1) action of `x` restricted to `μ_m` equals the level-m action.
pub fn restriction_check<B: LocalBase>(x: &Field<B>, lower: &TorsionLevel<B>, upper: &TorsionLevel<B>) -> Result<bool> {
    let base = lower.f.ring().base();
    if upper.m != lower.m + 1 || lower.f.ring().n() != 1 {
        return Err(Error::Unsupported("restriction needs consecutive levels over K".into()));
    }
    let dl = artin_apply(x, lower)?;
    let du = artin_apply(x, upper)?;
    let (Some(pl), Some(pu)) = (&dl.permutation, &du.permutation) else {
        return Err(Error::Unsupported("twisted target".into()));
    };
    let pi = base.uniformizer();
    Ok(pl.iter().all(|&(c, c2)| {
        let up = |idx: u64| residue_index(base, upper.m, &base.mul(&pi, &residue_rep(base, lower.m, idx)));
        pu[up(c) as usize].1 == up(c2)
    }))
}

/// Two polynomials with the same π give the same parametrization: `[1]_{f,f'}` intertwines `[u]`.
pub fn independence_of_f<B: LocalBase>(level: &TorsionLevel<B>, f2: &LTPolynomial<B>) -> Result<bool> {
    let f = &level.f;
    let r = f.ring();
    if !r.field_eq(f.pi(), f2.pi()) {
        return Err(Error::NotAUniformizer("linear coefficients differ".into()));
    }
    let ext = &level.ext;
    let link = build_hom(&r.one(), f, f2, level.series_cap)?.series.univariate_coeffs();
    let moved = eval_series_at(ext, &link, &level.alpha);
    let sep = f.q().pow(level.m as u32 - 1) as u32;
    for u in level.units() {
        let d = artin_apply(&r.field_from_base(&u.a), level)?;
        let lhs = eval_series_at(ext, &link, d.generator_image());
        let endo = build_hom(&r.embed(&u.a), f2, f2, level.series_cap)?.series.univariate_coeffs();
        let rhs = eval_series_at(ext, &endo, &moved);
        if ext.valuation(&ext.sub(&lhs, &rhs)).is_some_and(|v| v <= sep) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For `f = (1+X)^p - 1`: `Art(u)` sends `ζ - 1` to `ζ^u - 1` on every point.
pub fn cyclotomic_cross_check(level: &TorsionLevel<Zp>) -> Result<(usize, bool)> {
    let r = level.f.ring();
    let cyc = LTPolynomial::cyclotomic(r)?;
    if !poly::eq(r, cyc.coeffs(), level.f.coeffs()) {
        return Err(Error::InvalidPolynomial("not the cyclotomic polynomial".into()));
    }
    let ext = &level.ext;
    let one = ext.one();
    let mut checked = 0;
    for u in level.units() {
        let d = artin_apply(&r.field_from_base(&u.a), level)?;
        for (p, img) in level.points.iter().zip(&d.images) {
            let zeta = ext.add(&one, &p.point);
            let want = ext.sub(&ext.pow(&zeta, u.a), &one);
            if want != *img {
                return Ok((checked, false));
            }
            checked += 1;
        }
    }
    Ok((checked, true))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormCompatibilityReport {
    pub n: usize,
    pub valuation_ok: bool,
    /// `[θ]` carries the q^m points of one tower to distinct roots of the other's `f_m`.
    pub theta_links: bool,
    pub fixes_source: bool,
    pub fixes_target: bool,
    /// `θ^{(j)}/θ = π'_j/π_j` for `|j| ≤ n`.
    pub theta_pi_ok: bool,
}

impl NormCompatibilityReport {
    pub fn pass(&self) -> bool {
        self.valuation_ok && self.theta_links && self.fixes_source && self.fixes_target && self.theta_pi_ok
    }
}

/// Finite-level base change for `x' ∈ K_n` with `v(x') = 1`, or `x' = 1`.
///
/// The tower of `x'` over `K' = K_n` and the relative tower of `y = N(x')` are linked by
/// `[θ]`, and `Art_K(y)` fixes both.
pub fn norm_compatibility_check<B: LocalBase>(
    l: &UnramifiedRing<B>,
    x: &Field<B>,
    m: usize,
) -> Result<NormCompatibilityReport> {
    let n = l.n();
    let y = l.field_norm(x);
    let valuation_ok = y.val == n as i64 * x.val;
    if l.field_eq(x, &l.field_one()) {
        let k = UnramifiedRing::new(l.base().clone(), 1)?;
        let level = build_level(&LTPolynomial::standard(&k)?, m)?;
        let id = artin_apply(&k.field_one(), &level)?.is_identity(&level);
        return Ok(NormCompatibilityReport {
            n,
            valuation_ok,
            theta_links: true,
            fixes_source: id,
            fixes_target: id,
            theta_pi_ok: true,
        });
    }
    if x.val != 1 {
        return Err(Error::Unsupported("base change is checked for uniformizers".into()));
    }
    let base = l.base();
    let y_base = l.to_base(y.unit.as_ref().expect("nonzero"))
        .map(|u| base.mul_pi_pow(&u, y.val as u32))
        .ok_or_else(|| Error::NotInBase(l.fmt_field(&y)))?;
    let pi_a = l.field_to_ring(x)?;
    let fa = LTPolynomial::with_uniformizer(l, &pi_a)?;
    let fb = LTPolynomial::with_uniformizer(l, &uniformizer_with_norm(l, &y_base)?)?;
    let theta = solve_theta(l, fa.pi(), fb.pi())?;
    let tower_a = build_level(&fa, m)?;
    let tower_b = build_level(&fb, m)?;

    let ext = &tower_a.ext;
    let link = build_hom(&theta, &fa, &fb, tower_a.series_cap)?.series.univariate_coeffs();
    let images: Vec<Ext<B>> = tower_a.points.iter().map(|p| eval_series_at(ext, &link, &p.point)).collect();
    let sep = fa.q().pow(m as u32 - 1) as u32;
    let distinct = images
        .iter()
        .enumerate()
        .all(|(i, a)| images[i + 1..].iter().all(|b| ext.valuation(&ext.sub(a, b)).is_some_and(|v| v <= sep)));
    let (fbm, _) = crate::formal_group::iterate_fm(&fb, m);
    let dfbm = poly::derivative(l, &fbm);
    let roots = images.iter().all(|t| {
        let h = ext.eval_base_poly(&fbm, t);
        let dh = ext.eval_base_poly(&dfbm, t);
        match (ext.valuation(&h), ext.valuation(&dh)) {
            (None, _) => true,
            (Some(vh), Some(vd)) => vh > 2 * vd,
            (Some(_), None) => false,
        }
    });
    let theta_links = distinct && roots && images.len() as u64 == fa.q().pow(m as u32);

    let yf = l.field_from_base(&y_base);
    let fixes_source = artin_apply(&yf, &tower_a)?.is_identity(&tower_a);
    let fixes_target = artin_apply(&yf, &tower_b)?.is_identity(&tower_b);
    let tf = l.field_from_ring(&theta);
    let theta_pi_ok = (-(n as i64)..=n as i64).all(|j| {
        let lhs = l.field_div(&l.field_frobenius(&tf, j), &tf);
        let rhs = l.field_div(&pi_j(&fb, j), &pi_j(&fa, j));
        matches!((lhs, rhs), (Ok(a), Ok(b)) if l.field_agree(&a, &b, l.prec() - 1))
    });
    Ok(NormCompatibilityReport { n, valuation_ok, theta_links, fixes_source, fixes_target, theta_pi_ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2(prec: u32) -> UnramifiedRing<Zp> {
        UnramifiedRing::new(Zp::new(2, prec).unwrap(), 1).unwrap()
    }

    fn label_perm(d: &ArtinDescriptor<Zp>) -> Vec<(u64, u64)> {
        d.permutation.clone().unwrap()
    }

    #[test]
    fn uniformizer_acts_trivially() {
        let r = q2(10);
        let level = build_level(&LTPolynomial::standard(&r).unwrap(), 3).unwrap();
        let d = artin_apply(&r.field_from_i64(2), &level).unwrap();
        assert_eq!(d.j, -1);
        assert!(r.is_one(&d.theta));
        assert!(d.is_identity(&level));
        let one = artin_apply(&r.field_one(), &level).unwrap();
        assert_eq!(one.j, 0);
        assert!(one.is_identity(&level));
    }

    #[test]
    fn unit_acts_by_multiplication() {
        let r = q2(10);
        let level = build_level(&LTPolynomial::standard(&r).unwrap(), 3).unwrap();
        for x in [5, 10, 3] {
            let d = artin_apply(&r.field_from_i64(x), &level).unwrap();
            let u = (x >> (x.trailing_zeros())) as u64;
            let want: Vec<(u64, u64)> = (0..8).map(|a| (a, (u * a) % 8)).collect();
            assert_eq!(label_perm(&d), want, "x = {x}");
        }
    }

    #[test]
    fn homomorphism_on_units_mod_8() {
        let r = q2(10);
        let level = build_level(&LTPolynomial::standard(&r).unwrap(), 3).unwrap();
        let rep = check_homomorphism(&r.field_from_i64(3), &r.field_from_i64(5), &level).unwrap();
        assert!(rep.pass(), "{rep:?}");
        let rep = check_homomorphism(&r.field_from_i64(2), &r.field_from_i64(7), &level).unwrap();
        assert!(rep.pass());
    }

    #[test]
    fn cyclotomic_tower() {
        let r = q2(10);
        let level = build_level(&LTPolynomial::cyclotomic(&r).unwrap(), 3).unwrap();
        let (n, ok) = cyclotomic_cross_check(&level).unwrap();
        assert!(ok);
        assert_eq!(n, 32);
    }

    #[test]
    fn bijective_and_restricts() {
        let r = q2(10);
        let f = LTPolynomial::standard(&r).unwrap();
        let l2 = build_level(&f, 2).unwrap();
        let l3 = build_level(&f, 3).unwrap();
        let (count, distinct) = bijectivity_check(&l3).unwrap();
        assert_eq!(count, 8);
        assert!(distinct);
        for x in [3, 5, 6, 7] {
            assert!(restriction_check(&r.field_from_i64(x), &l2, &l3).unwrap());
        }
    }

    #[test]
    fn independent_of_polynomial() {
        let r = UnramifiedRing::new(Zp::new(3, 8).unwrap(), 1).unwrap();
        let f = LTPolynomial::standard(&r).unwrap();
        let f2 = LTPolynomial::from_i64s(&r, &[0, 3, 3, 1]).unwrap();
        let level = build_level(&f, 1).unwrap();
        assert!(independence_of_f(&level, &f2).unwrap());
    }

    #[test]
    fn characterization_relative() {
        let base = Zp::new(2, 8).unwrap();
        let level = relative_tower(&base, &4, 1).unwrap();
        let rep = check_characterization(&4, &level).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(rep.n, 2);
        let base = Zp::new(2, 10).unwrap();
        let level = relative_tower(&base, &2, 2).unwrap();
        assert!(check_characterization(&2, &level).unwrap().pass());
    }

    #[test]
    fn base_change_uniformizer() {
        let l = UnramifiedRing::new(Zp::new(2, 8).unwrap(), 2).unwrap();
        let x = l.field_mul(&l.field_uniformizer(), &l.field_from_ring(&l.add(&l.one(), &l.mul_pi_pow(&l.y(), 1))));
        let rep = norm_compatibility_check(&l, &x, 1).unwrap();
        assert!(rep.pass(), "{rep:?}");
        let rep = norm_compatibility_check(&l, &l.field_one(), 2).unwrap();
        assert!(rep.pass());
    }
}
