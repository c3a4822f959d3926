//! Totally ramified extensions O_L[X]/(g) for a monic Eisenstein `g`.

use std::sync::Arc;

use crate::base::LocalBase;
use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::unramified::{RingElement, UnramifiedRing};

/// `Σ coords[i] α^i` with `coords[i] ∈ O_L`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct ExtElement<E> {
    pub coords: Vec<RingElement<E>>,
}

#[derive(Debug)]
struct Inner<B: LocalBase> {
    base: UnramifiedRing<B>,
    g: Vec<RingElement<B::Elem>>,
    /// `reduce[k]` is `α^{e+k}` in the power basis, for `k < e - 1`.
    reduce: Vec<Vec<RingElement<B::Elem>>>,
}

#[derive(Debug, Clone)]
pub struct EisensteinExtension<B: LocalBase> {
    inner: Arc<Inner<B>>,
}

impl<B: LocalBase> PartialEq for EisensteinExtension<B> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || (self.inner.base == other.inner.base && self.inner.g == other.inner.g)
    }
}

/// Checks monic, `π | g_i` for `i < e`, and `v(g_0) = 1`.
pub fn is_eisenstein<B: LocalBase>(base: &UnramifiedRing<B>, g: &[RingElement<B::Elem>]) -> bool {
    let Some(e) = g.len().checked_sub(1) else { return false };
    e >= 1
        && base.is_one(&g[e])
        && base.valuation(&g[0]) == Some(1)
        && g[1..e].iter().all(|c| base.valuation(c).is_none_or(|v| v >= 1))
}

impl<B: LocalBase> EisensteinExtension<B> {
    pub fn new(base: &UnramifiedRing<B>, g: Vec<RingElement<B::Elem>>) -> Result<Self> {
        if !is_eisenstein(base, &g) {
            return Err(Error::NotEisenstein(format!("degree {} polynomial", g.len().saturating_sub(1))));
        }
        let e = g.len() - 1;
        let mut reduce = Vec::with_capacity(e.saturating_sub(1));
        let mut cur: Vec<_> = g[..e].iter().map(|c| base.neg(c)).collect();
        for _ in 0..e.saturating_sub(1) {
            reduce.push(cur.clone());
            let top = cur[e - 1].clone();
            let mut next: Vec<_> = std::iter::once(base.zero()).chain(cur[..e - 1].iter().cloned()).collect();
            for (slot, c) in next.iter_mut().zip(&g[..e]) {
                let t = base.mul(&top, c);
                *slot = base.sub(slot, &t);
            }
            cur = next;
        }
        Ok(EisensteinExtension { inner: Arc::new(Inner { base: base.clone(), g, reduce }) })
    }

    pub fn base(&self) -> &UnramifiedRing<B> {
        &self.inner.base
    }

    /// Ramification index, the degree of `g`.
    pub fn e(&self) -> usize {
        self.inner.g.len() - 1
    }

    pub fn defining_poly(&self) -> &[RingElement<B::Elem>] {
        &self.inner.g
    }

    /// The class of X.
    pub fn alpha(&self) -> ExtElement<B::Elem> {
        if self.e() == 1 {
            return self.embed(&self.base().neg(&self.inner.g[0]));
        }
        let mut x = self.zero();
        x.coords[1] = self.base().one();
        x
    }

    pub fn embed(&self, a: &RingElement<B::Elem>) -> ExtElement<B::Elem> {
        let mut x = self.zero();
        x.coords[0] = a.clone();
        x
    }

    /// The O_L-value when all higher coordinates vanish.
    pub fn to_base(&self, x: &ExtElement<B::Elem>) -> Option<RingElement<B::Elem>> {
        let b = self.base();
        x.coords[1..].iter().all(|c| b.is_zero(c)).then(|| x.coords[0].clone())
    }

    /// Normalized so that `v(α) = 1` and `v(π) = e`; `None` for zero.
    pub fn valuation(&self, x: &ExtElement<B::Elem>) -> Option<u32> {
        let e = self.e() as u32;
        let b = self.base();
        x.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| b.valuation(c).map(|v| e * v + i as u32))
            .min()
    }

    pub fn is_unit(&self, x: &ExtElement<B::Elem>) -> bool {
        self.valuation(x) == Some(0)
    }

    /// Valuation at which elements become indistinguishable from zero.
    pub fn prec(&self) -> u32 {
        self.e() as u32 * self.base().prec()
    }

    pub fn apply_base(&self, x: &ExtElement<B::Elem>, h: impl Fn(&RingElement<B::Elem>) -> RingElement<B::Elem>) -> ExtElement<B::Elem> {
        ExtElement { coords: x.coords.iter().map(h).collect() }
    }

    pub fn scale(&self, a: &RingElement<B::Elem>, x: &ExtElement<B::Elem>) -> ExtElement<B::Elem> {
        self.apply_base(x, |c| self.base().mul(a, c))
    }

    /// `Σ c_k x^k` by Horner, for coefficients in O_L.
    pub fn eval_base_poly(&self, c: &[RingElement<B::Elem>], x: &ExtElement<B::Elem>) -> ExtElement<B::Elem> {
        c.iter().rev().fold(self.zero(), |acc, ck| {
            let mut t = self.mul(&acc, x);
            self.base().add_assign(&mut t.coords[0], ck);
            t
        })
    }

    /// Substitutes `α ↦ image`; this is the O_L-algebra map determined by the image of α.
    pub fn substitute(&self, x: &ExtElement<B::Elem>, image: &ExtElement<B::Elem>) -> ExtElement<B::Elem> {
        self.eval_base_poly(&x.coords, image)
    }

    /// Inverse of a unit by Newton iteration.
    pub fn inv(&self, x: &ExtElement<B::Elem>) -> Result<ExtElement<B::Elem>> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit("extension element of positive valuation".into()));
        }
        let b = self.base();
        let mut y = self.embed(&b.inv(&x.coords[0])?);
        let two = self.from_i64(2);
        for _ in 0..=(self.prec() as f64).log2().ceil() as usize + 1 {
            let next = self.mul(&y, &self.sub(&two, &self.mul(x, &y)));
            if next == y {
                break;
            }
            y = next;
        }
        if !self.is_one(&self.mul(x, &y)) {
            return Err(Error::PrecisionExhausted("inverse did not converge".into()));
        }
        Ok(y)
    }

    pub fn random_elem<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ExtElement<B::Elem> {
        ExtElement { coords: (0..self.e()).map(|_| self.base().random_elem(rng)).collect() }
    }

    pub fn random_unit<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ExtElement<B::Elem> {
        let mut x = self.random_elem(rng);
        x.coords[0] = self.base().random_unit(rng);
        x
    }

    pub fn fmt_elem(&self, x: &ExtElement<B::Elem>) -> String {
        let parts: Vec<_> = x.coords.iter().map(|c| self.base().fmt_coords(c)).collect();
        format!("<{}>", parts.join("; "))
    }
}

impl<B: LocalBase> Ring for EisensteinExtension<B> {
    type Elem = ExtElement<B::Elem>;

    fn zero(&self) -> Self::Elem {
        ExtElement { coords: (0..self.e()).map(|_| self.base().zero()).collect() }
    }

    fn one(&self) -> Self::Elem {
        self.embed(&self.base().one())
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.embed(&self.base().from_i64(n))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = self.base();
        ExtElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| r.add(x, y)).collect() }
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = self.base();
        ExtElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| r.sub(x, y)).collect() }
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.apply_base(a, |c| self.base().neg(c))
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = self.base();
        let e = self.e();
        if e == 1 {
            return ExtElement { coords: vec![r.mul(&a.coords[0], &b.coords[0])] };
        }
        let mut full: Vec<_> = (0..2 * e - 1).map(|_| r.zero()).collect();
        for (i, x) in a.coords.iter().enumerate() {
            if r.is_zero(x) {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !r.is_zero(y) {
                    r.mul_add_assign(&mut full[i + j], x, y);
                }
            }
        }
        let (low, high) = full.split_at_mut(e);
        for (k, c) in high.iter().enumerate() {
            if r.is_zero(c) {
                continue;
            }
            for (slot, red) in low.iter_mut().zip(&self.inner.reduce[k]) {
                r.mul_add_assign(slot, c, red);
            }
        }
        full.truncate(e);
        ExtElement { coords: full }
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coords.iter().all(|c| self.base().is_zero(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Zp;

    fn ext(coeffs: &[i64]) -> EisensteinExtension<Zp> {
        let r = UnramifiedRing::new(Zp::new(2, 10).unwrap(), 1).unwrap();
        let g = coeffs.iter().map(|&c| r.from_i64(c)).collect();
        EisensteinExtension::new(&r, g).unwrap()
    }

    #[test]
    fn gaussian_integers_over_z2() {
        let x = ext(&[2, 2, 1]);
        let a = x.alpha();
        let b = x.base();
        assert_eq!(x.valuation(&a), Some(1));
        assert_eq!(x.valuation(&x.scale(&b.from_i64(2), &x.mul(&a, &a))), Some(4));
        assert_eq!(x.valuation(&x.zero()), None);
        let g_at_a = x.eval_base_poly(x.defining_poly(), &a);
        assert!(x.is_zero(&g_at_a));
        let zeta = x.add(&x.one(), &a);
        assert_eq!(x.pow(&zeta, 4), x.one());
        let u = x.add(&x.one(), &x.mul(&a, &a));
        assert_eq!(x.mul(&u, &x.inv(&u).unwrap()), x.one());
    }

    #[test]
    fn rejects_non_eisenstein() {
        let r = UnramifiedRing::new(Zp::new(3, 5).unwrap(), 1).unwrap();
        let g = [9, 3, 1].iter().map(|&c| r.from_i64(c)).collect();
        assert!(matches!(EisensteinExtension::new(&r, g), Err(Error::NotEisenstein(_))));
    }

    #[test]
    fn degree_one_extension() {
        let x = ext(&[2, 1]);
        assert_eq!(x.alpha().coords[0], x.base().from_i64(-2));
        assert_eq!(x.valuation(&x.alpha()), Some(1));
    }
}
