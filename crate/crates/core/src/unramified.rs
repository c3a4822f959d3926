//! The unramified coefficient ring O_L = O_K[y]/(g) for L = K_n, with its
//! Frobenius, Teichmüller lifts, Newton roots, norms and traces.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::base::LocalBase;
use crate::error::{Error, Result};
use crate::fq::{lowest_irreducible, MAX_FIELD_SIZE};
use crate::ring::Ring;

/// An element of O_L: `n` coordinates over O_K in the basis `1, y, .., y^{n-1}`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct RingElement<E> {
    pub coords: SmallVec<[E; 2]>,
}

impl<E> RingElement<E> {
    pub fn from_coords(coords: impl IntoIterator<Item = E>) -> Self {
        RingElement { coords: coords.into_iter().collect() }
    }
}

/// `unit * π_K^val`, or zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldElement<E> {
    pub unit: Option<RingElement<E>>,
    pub val: i64,
}

impl<E> FieldElement<E> {
    pub fn zero() -> Self {
        FieldElement { unit: None, val: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigitSet {
    Plain,
    Teichmueller,
}

/// `x = π^start · Σ digits[i] π^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiAdicExpansion<E> {
    pub start: i64,
    pub digits: Vec<RingElement<E>>,
}

#[derive(Debug)]
struct Inner<B: LocalBase> {
    base: B,
    n: usize,
    g: Vec<B::Elem>,
    g_residue: Vec<u32>,
    /// `frob[k][i]` is φ^k(y^i).
    frob: Vec<Vec<RingElement<B::Elem>>>,
}

/// O_L for L the degree-n unramified extension of K, modulo π^N.
#[derive(Debug, Clone)]
pub struct UnramifiedRing<B: LocalBase> {
    inner: Arc<Inner<B>>,
}

impl<B: LocalBase> PartialEq for UnramifiedRing<B> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.base == other.inner.base && self.inner.g == other.inner.g)
    }
}

impl<B: LocalBase> Ring for UnramifiedRing<B> {
    type Elem = RingElement<B::Elem>;

    fn zero(&self) -> Self::Elem {
        RingElement::from_coords((0..self.n()).map(|_| self.base().zero()))
    }

    fn one(&self) -> Self::Elem {
        self.embed(&self.base().one())
    }

    fn from_i64(&self, k: i64) -> Self::Elem {
        self.embed(&self.base().from_i64(k))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let base = self.base();
        RingElement::from_coords(a.coords.iter().zip(&b.coords).map(|(x, y)| base.add(x, y)))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let base = self.base();
        RingElement::from_coords(a.coords.iter().zip(&b.coords).map(|(x, y)| base.sub(x, y)))
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        let base = self.base();
        RingElement::from_coords(a.coords.iter().map(|x| base.neg(x)))
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let base = self.base();
        let n = self.n();
        if n == 1 {
            return RingElement::from_coords([base.mul(&a.coords[0], &b.coords[0])]);
        }
        let mut prod: Vec<B::Elem> = (0..2 * n - 1).map(|_| base.zero()).collect();
        for (i, x) in a.coords.iter().enumerate() {
            if base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                base.mul_add_assign(&mut prod[i + j], x, y);
            }
        }
        let g = &self.inner.g;
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::replace(&mut prod[k], base.zero());
            if base.is_zero(&c) {
                continue;
            }
            for i in 0..n {
                let t = base.mul(&c, &g[i]);
                prod[k - n + i] = base.sub(&prod[k - n + i], &t);
            }
        }
        prod.truncate(n);
        RingElement::from_coords(prod)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coords.iter().all(|x| self.base().is_zero(x))
    }

    fn add_assign(&self, acc: &mut Self::Elem, b: &Self::Elem) {
        let base = self.base();
        for (x, y) in acc.coords.iter_mut().zip(&b.coords) {
            base.add_assign(x, y);
        }
    }
}

impl<B: LocalBase> UnramifiedRing<B> {
    /// Builds O_L with the lowest irreducible defining polynomial of degree `n`.
    pub fn new(base: B, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("unramified degree must be at least 1".into()));
        }
        let fq = base.residue_field();
        let size = (fq.size() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return Err(Error::InvalidConfig(format!(
                "residue field of size {size} exceeds {MAX_FIELD_SIZE}"
            )));
        }
        let g_residue = lowest_irreducible(fq, n);
        let g: Vec<B::Elem> = g_residue.iter().map(|&c| base.lift_residue(c)).collect();
        let mut identity = Vec::with_capacity(n);
        for i in 0..n {
            let mut coords: SmallVec<[B::Elem; 2]> = (0..n).map(|_| base.zero()).collect();
            coords[i] = base.one();
            identity.push(RingElement { coords });
        }
        let provisional = UnramifiedRing {
            inner: Arc::new(Inner {
                base: base.clone(),
                n,
                g: g.clone(),
                g_residue: g_residue.clone(),
                frob: vec![identity.clone()],
            }),
        };
        let mut frob = vec![identity];
        if n > 1 {
            let y = provisional.y();
            let seed = provisional.pow(&y, base.q());
            let g_over_l: Vec<_> = g.iter().map(|c| provisional.embed(c)).collect();
            let z = provisional.hensel_root(&g_over_l, &seed)?;
            let phi1: Vec<_> = (0..n).map(|i| provisional.pow(&z, i as u64)).collect();
            let apply = |x: &RingElement<B::Elem>| {
                let mut acc = provisional.zero();
                for (c, img) in x.coords.iter().zip(&phi1) {
                    provisional.add_assign(&mut acc, &provisional.scale(c, img));
                }
                acc
            };
            let mut yk = z.clone();
            for _ in 1..n {
                frob.push((0..n).map(|i| provisional.pow(&yk, i as u64)).collect());
                yk = apply(&yk);
            }
            if yk != y {
                return Err(Error::PrecisionExhausted("Frobenius does not have order n".into()));
            }
        }
        Ok(UnramifiedRing { inner: Arc::new(Inner { base, n, g, g_residue, frob }) })
    }

    pub fn base(&self) -> &B {
        &self.inner.base
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn prec(&self) -> u32 {
        self.base().prec()
    }

    pub fn p(&self) -> u32 {
        self.base().p()
    }

    /// Size q of the base residue field.
    pub fn q(&self) -> u64 {
        self.base().q()
    }

    /// Size q^n of the residue field of O_L.
    pub fn residue_size(&self) -> u64 {
        self.q().pow(self.n() as u32)
    }

    /// Defining polynomial over O_K, ascending, monic.
    pub fn defining_poly(&self) -> &[B::Elem] {
        &self.inner.g
    }

    pub fn defining_poly_residue(&self) -> &[u32] {
        &self.inner.g_residue
    }

    /// φ(y).
    pub fn frob_image(&self) -> RingElement<B::Elem> {
        if self.n() == 1 {
            return self.y();
        }
        self.inner.frob[1][1].clone()
    }

    /// The class of X in O_K[X]/(g).
    pub fn y(&self) -> RingElement<B::Elem> {
        let n = self.n();
        if n == 1 {
            // g = X, so y = 0.
            return self.zero();
        }
        let mut c = self.zero();
        c.coords[1] = self.base().one();
        c
    }

    pub fn with_prec(&self, prec: u32) -> Result<Self> {
        if prec == self.prec() {
            return Ok(self.clone());
        }
        UnramifiedRing::new(self.base().with_prec(prec)?, self.n())
    }

    /// Carries an element from a ring of another precision via canonical digits.
    pub fn coerce(&self, x: &RingElement<B::Elem>) -> RingElement<B::Elem> {
        RingElement::from_coords(x.coords.iter().map(|c| self.base().coerce(c)))
    }

    /// Lifts from a lower-precision ring by least representatives, so small integers stay exact.
    pub fn lift_from(&self, src: &Self, x: &RingElement<B::Elem>) -> RingElement<B::Elem> {
        RingElement::from_coords(x.coords.iter().map(|c| self.base().lift_from(src.base(), c)))
    }

    pub fn embed(&self, b: &B::Elem) -> RingElement<B::Elem> {
        let mut c = self.zero();
        c.coords[0] = b.clone();
        c
    }

    pub fn to_base(&self, x: &RingElement<B::Elem>) -> Option<B::Elem> {
        if x.coords[1..].iter().all(|c| self.base().is_zero(c)) {
            Some(x.coords[0].clone())
        } else {
            None
        }
    }

    pub fn in_base(&self, x: &RingElement<B::Elem>) -> bool {
        self.to_base(x).is_some()
    }

    pub fn scale(&self, b: &B::Elem, x: &RingElement<B::Elem>) -> RingElement<B::Elem> {
        RingElement::from_coords(x.coords.iter().map(|c| self.base().mul(b, c)))
    }

    pub fn valuation(&self, x: &RingElement<B::Elem>) -> Option<u32> {
        x.coords.iter().filter_map(|c| self.base().valuation(c)).min()
    }

    pub fn is_unit(&self, x: &RingElement<B::Elem>) -> bool {
        self.valuation(x) == Some(0)
    }

    pub fn mul_pi_pow(&self, x: &RingElement<B::Elem>, k: u32) -> RingElement<B::Elem> {
        RingElement::from_coords(x.coords.iter().map(|c| self.base().mul_pi_pow(c, k)))
    }

    /// Exact division by π^k; the top k digits of the result are unknown and set to zero.
    pub fn div_pi_pow(&self, x: &RingElement<B::Elem>, k: u32) -> Result<RingElement<B::Elem>> {
        if k >= self.prec() && k > 0 {
            return Err(Error::PrecisionExhausted(format!(
                "dividing by π^{k} at precision {}",
                self.prec()
            )));
        }
        if self.valuation(x).is_some_and(|v| v < k) {
            return Err(Error::NotDivisible);
        }
        Ok(self.shift_down(x, k))
    }

    /// Division by π^k discarding the low k digits.
    pub fn shift_down(&self, x: &RingElement<B::Elem>, k: u32) -> RingElement<B::Elem> {
        RingElement::from_coords(x.coords.iter().map(|c| self.base().shift_down(c, k)))
    }

    pub fn uniformizer(&self) -> RingElement<B::Elem> {
        self.embed(&self.base().uniformizer())
    }

    pub fn frobenius(&self, x: &RingElement<B::Elem>, i: i64) -> RingElement<B::Elem> {
        let k = i.rem_euclid(self.n() as i64) as usize;
        if k == 0 {
            return x.clone();
        }
        let images = &self.inner.frob[k];
        let mut acc = self.zero();
        for (c, img) in x.coords.iter().zip(images) {
            if self.base().is_zero(c) {
                continue;
            }
            self.add_assign(&mut acc, &self.scale(c, img));
        }
        acc
    }

    /// Residue of `x` as F_q coordinates.
    pub fn residue(&self, x: &RingElement<B::Elem>) -> Vec<u32> {
        x.coords.iter().map(|c| self.base().residue(c)).collect()
    }

    pub fn residue_index(&self, x: &RingElement<B::Elem>) -> u64 {
        let q = self.q();
        self.residue(x).iter().rev().fold(0, |acc, &d| acc * q + d as u64)
    }

    /// Plain lift of the residue class with the given index.
    pub fn lift_residue_index(&self, mut idx: u64) -> RingElement<B::Elem> {
        let q = self.q();
        RingElement::from_coords((0..self.n()).map(|_| {
            let d = (idx % q) as u32;
            idx /= q;
            self.base().lift_residue(d)
        }))
    }

    pub fn lift_residue(&self, c: &[u32]) -> RingElement<B::Elem> {
        RingElement::from_coords(c.iter().map(|&d| self.base().lift_residue(d)))
    }

    /// Inverse of a unit by Newton iteration from the residue inverse.
    pub fn inv(&self, x: &RingElement<B::Elem>) -> Result<RingElement<B::Elem>> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit(self.fmt_elem(x)));
        }
        let one = self.one();
        let two = self.from_i64(2);
        let mut y = self.pow(x, self.residue_size() - 2);
        for _ in 0..80 {
            let xy = self.mul(x, &y);
            if xy == one {
                return Ok(y);
            }
            y = self.mul(&y, &self.sub(&two, &xy));
        }
        Err(Error::PrecisionExhausted("unit inverse did not converge".into()))
    }

    pub fn eval_poly(&self, h: &[RingElement<B::Elem>], x: &RingElement<B::Elem>) -> RingElement<B::Elem> {
        h.iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c))
    }

    /// The unique root of `h` congruent to `x0` modulo π.
    pub fn hensel_root(
        &self,
        h: &[RingElement<B::Elem>],
        x0: &RingElement<B::Elem>,
    ) -> Result<RingElement<B::Elem>> {
        let dh: Vec<_> = h
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.mul(&self.from_i64(i as i64), c))
            .collect();
        let hx = self.eval_poly(h, x0);
        if self.valuation(&hx).is_some_and(|v| v == 0) {
            return Err(Error::NotARoot);
        }
        if !self.is_unit(&self.eval_poly(&dh, x0)) {
            return Err(Error::NonSimpleRoot);
        }
        let mut x = x0.clone();
        for _ in 0..80 {
            let hx = self.eval_poly(h, &x);
            if self.is_zero(&hx) {
                return Ok(x);
            }
            let d = self.inv(&self.eval_poly(&dh, &x))?;
            x = self.sub(&x, &self.mul(&hx, &d));
        }
        Err(Error::PrecisionExhausted("Newton iteration did not converge".into()))
    }

    /// The root of unity or zero with residue `c`.
    pub fn teichmueller(&self, c: &[u32]) -> RingElement<B::Elem> {
        let e = self.residue_size();
        let mut x = self.lift_residue(c);
        for _ in 0..=self.prec() + 1 {
            let next = self.pow(&x, e);
            if next == x {
                break;
            }
            x = next;
        }
        x
    }

    pub fn norm(&self, x: &RingElement<B::Elem>) -> RingElement<B::Elem> {
        (1..self.n() as i64).fold(x.clone(), |acc, i| self.mul(&acc, &self.frobenius(x, i)))
    }

    pub fn trace(&self, x: &RingElement<B::Elem>) -> RingElement<B::Elem> {
        (1..self.n() as i64).fold(x.clone(), |acc, i| self.add(&acc, &self.frobenius(x, i)))
    }

    pub fn norm_to_base(&self, x: &RingElement<B::Elem>) -> Result<B::Elem> {
        let nx = self.norm(x);
        self.to_base(&nx).ok_or_else(|| Error::NotInBase(format!("norm {}", self.fmt_elem(&nx))))
    }

    pub fn trace_to_base(&self, x: &RingElement<B::Elem>) -> Result<B::Elem> {
        let tx = self.trace(x);
        self.to_base(&tx).ok_or_else(|| Error::NotInBase(format!("trace {}", self.fmt_elem(&tx))))
    }

    /// Some `v` with `N(v) = u`, lifted digit by digit.
    pub fn norm_preimage(&self, u: &B::Elem) -> Result<RingElement<B::Elem>> {
        let base = self.base();
        if !base.is_unit(u) {
            return Err(Error::NotAUnit(base.fmt_elem(u)));
        }
        let target = base.residue(u);
        let v = (1..self.residue_size())
            .map(|idx| self.lift_residue_index(idx))
            .find(|v| base.residue(&self.norm(v).coords[0]) == target)
            .ok_or_else(|| Error::NotInBase("residue norm is not surjective".into()))?;
        self.refine_norm(v, u, 1)
    }

    /// Multiplies `v` by units `≡ 1 mod π^start` until `N(v) = u`.
    fn refine_norm(&self, mut v: RingElement<B::Elem>, u: &B::Elem, start: u32) -> Result<RingElement<B::Elem>> {
        let base = self.base();
        let fq = base.residue_field();
        let (b0, t0) = (1..self.residue_size())
            .map(|idx| {
                let b = self.lift_residue_index(idx);
                let t = base.residue(&self.trace(&b).coords[0]);
                (b, t)
            })
            .find(|(_, t)| *t != 0)
            .ok_or_else(|| Error::NotInBase("residue trace vanishes".into()))?;
        let t0_inv = fq.inv(t0).expect("nonzero");
        for k in start..self.prec() {
            let nv = self.norm_to_base(&v)?;
            let ratio = base.mul(u, &self.base_inv(&nv)?);
            let a = base.digit(&base.sub(&ratio, &base.one()), k);
            if a == 0 {
                continue;
            }
            let scale = base.lift_residue(fq.mul(a, t0_inv));
            let beta = self.scale(&scale, &b0);
            let step = self.add(&self.one(), &self.mul_pi_pow(&beta, k));
            v = self.mul(&v, &step);
        }
        Ok(v)
    }

    /// Lex-least residue lifts `b` indexed by `φ(b) - b`, over the whole residue field.
    fn artin_schreier_table(&self) -> Vec<Option<u64>> {
        let size = self.residue_size();
        let mut table = vec![None; size as usize];
        for idx in 0..size {
            let b = self.lift_residue_index(idx);
            let img = self.residue_index(&self.sub(&self.frobenius(&b, 1), &b));
            table[img as usize].get_or_insert(idx);
        }
        table
    }

    /// A unit `θ` with `φ(θ)/θ = w`, refining `start` (known good modulo π^level) when given.
    ///
    /// Fails with `NormMismatch` when no such unit exists, i.e. when `N(w) ≠ 1`.
    pub fn solve_frobenius_ratio(
        &self,
        w: &RingElement<B::Elem>,
        start: Option<(&RingElement<B::Elem>, u32)>,
    ) -> Result<RingElement<B::Elem>> {
        if !self.is_unit(w) {
            return Err(Error::NotAUnit(self.fmt_elem(w)));
        }
        let (mut theta, level) = match start {
            Some((t, level)) => (t.clone(), level.max(1)),
            None => {
                let t = (1..self.residue_size())
                    .map(|idx| self.lift_residue_index(idx))
                    .find(|t| self.residue(&self.frobenius(t, 1)) == self.residue(&self.mul(t, w)))
                    .ok_or(Error::NormMismatch)?;
                (t, 1)
            }
        };
        if level >= self.prec() {
            return Ok(theta);
        }
        let table = self.artin_schreier_table();
        for j in level..self.prec() {
            let ratio = self.mul(&self.mul(w, &theta), &self.inv(&self.frobenius(&theta, 1))?);
            let err = self.sub(&ratio, &self.one());
            if self.valuation(&err).is_some_and(|v| v < j) {
                return Err(Error::NormMismatch);
            }
            let digit: Vec<u32> = err.coords.iter().map(|c| self.base().digit(c, j)).collect();
            let idx = self.residue_index(&self.lift_residue(&digit));
            if idx == 0 {
                continue;
            }
            let b = table[idx as usize].ok_or(Error::NormMismatch)?;
            let beta = self.lift_residue_index(b);
            theta = self.mul(&theta, &self.add(&self.one(), &self.mul_pi_pow(&beta, j)));
        }
        Ok(theta)
    }

    fn base_inv(&self, b: &B::Elem) -> Result<B::Elem> {
        Ok(self.inv(&self.embed(b))?.coords[0].clone())
    }

    pub fn pi_adic_digits(
        &self,
        x: &FieldElement<B::Elem>,
        set: DigitSet,
    ) -> PiAdicExpansion<B::Elem> {
        let Some(unit) = &x.unit else {
            return PiAdicExpansion { start: 0, digits: vec![] };
        };
        let mut rest = unit.clone();
        let mut digits = Vec::new();
        for _ in 0..self.prec() {
            let c = self.residue(&rest);
            let d = match set {
                DigitSet::Plain => self.lift_residue(&c),
                DigitSet::Teichmueller => self.teichmueller(&c),
            };
            rest = self.shift_down(&self.sub(&rest, &d), 1);
            digits.push(d);
        }
        while digits.last().is_some_and(|d| self.is_zero(d)) {
            digits.pop();
        }
        PiAdicExpansion { start: x.val, digits }
    }

    pub fn from_digits(&self, e: &PiAdicExpansion<B::Elem>) -> FieldElement<B::Elem> {
        let mut acc = self.zero();
        for (i, d) in e.digits.iter().enumerate() {
            acc = self.add(&acc, &self.mul_pi_pow(d, i as u32));
        }
        let mut f = self.field_from_ring(&acc);
        if !f.is_zero() {
            f.val += e.start;
        }
        f
    }

    pub fn random_elem<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> RingElement<B::Elem> {
        let q = self.q() as u32;
        let prec = self.prec() as usize;
        RingElement::from_coords((0..self.n()).map(|_| {
            let digits: Vec<u32> = (0..prec).map(|_| rng.gen_range(0..q)).collect();
            self.base().from_digits(&digits)
        }))
    }

    pub fn random_unit<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> RingElement<B::Elem> {
        loop {
            let x = self.random_elem(rng);
            if self.is_unit(&x) {
                return x;
            }
        }
    }

    pub fn random_base_elem<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> B::Elem {
        let q = self.q() as u32;
        let digits: Vec<u32> = (0..self.prec()).map(|_| rng.gen_range(0..q)).collect();
        self.base().from_digits(&digits)
    }

    pub fn random_base_unit<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> B::Elem {
        loop {
            let x = self.random_base_elem(rng);
            if self.base().is_unit(&x) {
                return x;
            }
        }
    }

    // Field elements.

    pub fn field_from_ring(&self, x: &RingElement<B::Elem>) -> FieldElement<B::Elem> {
        match self.valuation(x) {
            None => FieldElement::zero(),
            Some(v) => FieldElement { unit: Some(self.shift_down(x, v)), val: v as i64 },
        }
    }

    pub fn field_from_base(&self, b: &B::Elem) -> FieldElement<B::Elem> {
        self.field_from_ring(&self.embed(b))
    }

    pub fn field_from_i64(&self, k: i64) -> FieldElement<B::Elem> {
        self.field_from_ring(&self.from_i64(k))
    }

    /// `u * π_K^v` for a unit `u`.
    pub fn field_new(&self, unit: RingElement<B::Elem>, val: i64) -> Result<FieldElement<B::Elem>> {
        if !self.is_unit(&unit) {
            return Err(Error::NotAUnit(self.fmt_elem(&unit)));
        }
        Ok(FieldElement { unit: Some(unit), val })
    }

    pub fn field_uniformizer(&self) -> FieldElement<B::Elem> {
        FieldElement { unit: Some(self.one()), val: 1 }
    }

    pub fn field_one(&self) -> FieldElement<B::Elem> {
        FieldElement { unit: Some(self.one()), val: 0 }
    }

    pub fn field_mul(&self, a: &FieldElement<B::Elem>, b: &FieldElement<B::Elem>) -> FieldElement<B::Elem> {
        match (&a.unit, &b.unit) {
            (Some(x), Some(y)) => FieldElement { unit: Some(self.mul(x, y)), val: a.val + b.val },
            _ => FieldElement::zero(),
        }
    }

    pub fn field_inv(&self, a: &FieldElement<B::Elem>) -> Result<FieldElement<B::Elem>> {
        let u = a.unit.as_ref().ok_or_else(|| Error::NotAUnit("0".into()))?;
        Ok(FieldElement { unit: Some(self.inv(u)?), val: -a.val })
    }

    pub fn field_div(&self, a: &FieldElement<B::Elem>, b: &FieldElement<B::Elem>) -> Result<FieldElement<B::Elem>> {
        Ok(self.field_mul(a, &self.field_inv(b)?))
    }

    pub fn field_pow(&self, a: &FieldElement<B::Elem>, e: i64) -> Result<FieldElement<B::Elem>> {
        let Some(u) = &a.unit else {
            return if e > 0 { Ok(FieldElement::zero()) } else { Err(Error::NotAUnit("0".into())) };
        };
        let u = if e >= 0 { u.clone() } else { self.inv(u)? };
        Ok(FieldElement { unit: Some(self.pow(&u, e.unsigned_abs())), val: a.val * e })
    }

    pub fn field_frobenius(&self, a: &FieldElement<B::Elem>, i: i64) -> FieldElement<B::Elem> {
        FieldElement { unit: a.unit.as_ref().map(|u| self.frobenius(u, i)), val: a.val }
    }

    pub fn field_norm(&self, a: &FieldElement<B::Elem>) -> FieldElement<B::Elem> {
        FieldElement { unit: a.unit.as_ref().map(|u| self.norm(u)), val: a.val * self.n() as i64 }
    }

    /// The integral element represented by `a`.
    pub fn field_to_ring(&self, a: &FieldElement<B::Elem>) -> Result<RingElement<B::Elem>> {
        match &a.unit {
            None => Ok(self.zero()),
            Some(_) if a.val < 0 => Err(Error::NotIntegral),
            Some(u) => Ok(if a.val >= self.prec() as i64 { self.zero() } else { self.mul_pi_pow(u, a.val as u32) }),
        }
    }

    pub fn field_eq(&self, a: &FieldElement<B::Elem>, b: &FieldElement<B::Elem>) -> bool {
        a == b
    }

    /// Same valuation and unit parts congruent mod π^digits.
    pub fn field_agree(&self, a: &FieldElement<B::Elem>, b: &FieldElement<B::Elem>, digits: u32) -> bool {
        match (&a.unit, &b.unit) {
            (None, None) => true,
            (Some(u), Some(w)) => a.val == b.val && self.valuation(&self.sub(u, w)).is_none_or(|v| v >= digits),
            _ => false,
        }
    }

    // Literals.

    pub fn fmt_coords(&self, x: &RingElement<B::Elem>) -> String {
        let parts: Vec<String> = x.coords.iter().map(|c| self.base().fmt_elem(c)).collect();
        format!("[{}]", parts.join(";"))
    }

    /// `[c_0;..;c_{n-1}] + O(p^N)`.
    pub fn fmt_elem(&self, x: &RingElement<B::Elem>) -> String {
        format!("{} + O({})", self.fmt_coords(x), self.base().modulus_label())
    }

    pub fn parse_coords(&self, s: &str) -> Result<RingElement<B::Elem>> {
        let s = s.trim();
        let body = s
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected a coordinate list, got `{s}`")))?;
        let coords: Vec<B::Elem> =
            body.split(';').map(|c| self.base().parse_elem(c)).collect::<Result<_>>()?;
        if coords.len() != self.n() {
            return Err(Error::Parse(format!("expected {} coordinates, got {}", self.n(), coords.len())));
        }
        Ok(RingElement::from_coords(coords))
    }

    pub fn parse_elem(&self, s: &str) -> Result<RingElement<B::Elem>> {
        let s = s.trim();
        if let Some(idx) = s.find("O(") {
            let head = s[..idx]
                .trim_end()
                .strip_suffix('+')
                .ok_or_else(|| Error::Parse(format!("bad precision suffix in `{s}`")))?;
            let label = s[idx + 2..].trim_end().strip_suffix(')').unwrap_or_default().trim();
            if label != self.base().modulus_label() {
                return Err(Error::Parse(format!(
                    "precision O({label}) does not match O({})",
                    self.base().modulus_label()
                )));
            }
            return self.parse_coords(head);
        }
        if s.starts_with('[') {
            self.parse_coords(s)
        } else {
            Ok(self.embed(&self.base().parse_elem(s)?))
        }
    }

    /// `[u_0;..]*p^v`, or `0`.
    pub fn fmt_field(&self, x: &FieldElement<B::Elem>) -> String {
        match &x.unit {
            None => "0".into(),
            Some(u) => format!("{}*{}^{}", self.fmt_coords(u), self.base().uniformizer_symbol(), x.val),
        }
    }

    /// Parses `u*p^v` (or `u*t^v`), a bare coordinate list, or a base literal.
    pub fn parse_field(&self, s: &str) -> Result<FieldElement<B::Elem>> {
        let s = s.trim();
        let (head, val) = match s.rsplit_once('*').filter(|(h, _)| h.trim_end().ends_with(']')) {
            Some((h, tail)) => {
                let tail = tail.trim();
                let sym = self.base().uniformizer_symbol();
                let exp = tail
                    .strip_prefix(sym)
                    .and_then(|r| r.strip_prefix('^'))
                    .ok_or_else(|| Error::Parse(format!("expected `{sym}^v`, got `{tail}`")))?;
                let v: i64 = exp.parse().map_err(|_| Error::Parse(format!("bad exponent `{exp}`")))?;
                (h, v)
            }
            None => (s, 0),
        };
        let x = if head.trim_start().starts_with('[') {
            self.parse_coords(head)?
        } else {
            self.embed(&self.base().parse_elem(head)?)
        };
        let mut f = self.field_from_ring(&x);
        if !f.is_zero() {
            f.val += val;
        }
        Ok(f)
    }
}

impl<E: fmt::Debug> fmt::Display for RingElement<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{FqSeries, Zp};

    fn zp_ring(p: u32, prec: u32, n: usize) -> UnramifiedRing<Zp> {
        UnramifiedRing::new(Zp::new(p, prec).unwrap(), n).unwrap()
    }

    #[test]
    fn degree_one_ring_is_z_mod_pn() {
        let r = zp_ring(2, 8, 1);
        assert_eq!(r.defining_poly(), &[0, 1]);
        let x = r.from_i64(200);
        assert_eq!(r.mul(&x, &x).coords[0], (200u64 * 200) % 256);
        assert_eq!(r.frobenius(&x, 1), x);
    }

    #[test]
    fn defining_polynomials() {
        assert_eq!(zp_ring(2, 8, 2).defining_poly_residue(), &[1, 1, 1]);
        assert_eq!(zp_ring(3, 6, 2).defining_poly_residue(), &[1, 0, 1]);
    }

    #[test]
    fn frobenius_has_order_n() {
        let r = zp_ring(2, 10, 2);
        let y = r.y();
        assert_eq!(r.frobenius(&y, 2), y);
        assert_ne!(r.frobenius(&y, 1), y);
        let r3 = zp_ring(3, 6, 3);
        let y = r3.y();
        assert_eq!(r3.frobenius(&r3.frobenius(&r3.frobenius(&y, 1), 1), 1), y);
    }

    #[test]
    fn frobenius_squares_cube_root_of_unity() {
        let r = zp_ring(2, 10, 2);
        // residue of y is a primitive cube root of unity in F_4
        let w = r.teichmueller(&[0, 1]);
        assert_eq!(r.pow(&w, 3), r.one());
        assert_eq!(r.frobenius(&w, 1), r.mul(&w, &w));
        assert_eq!(r.norm_to_base(&w).unwrap(), 1);
        assert_eq!(r.trace_to_base(&w).unwrap(), r.base().from_i64(-1));
    }

    #[test]
    fn teichmueller_examples() {
        let r = zp_ring(5, 2, 1);
        assert_eq!(r.teichmueller(&[2]).coords[0], 7);
        assert_eq!(r.teichmueller(&[4]).coords[0], 24);
        assert_eq!(r.teichmueller(&[0]).coords[0], 0);
        assert_eq!(r.teichmueller(&[1]).coords[0], 1);
    }

    #[test]
    fn hensel_examples() {
        let r = zp_ring(5, 3, 1);
        let h = vec![r.from_i64(1), r.zero(), r.one()];
        assert_eq!(r.hensel_root(&h, &r.from_i64(2)).unwrap().coords[0], 57);
        let r3 = zp_ring(3, 4, 1);
        let h1 = vec![r3.from_i64(-1), r3.zero(), r3.one()];
        assert_eq!(r3.hensel_root(&h1, &r3.one()).unwrap(), r3.one());
        let h2 = vec![r3.from_i64(1), r3.zero(), r3.one()];
        assert_eq!(r3.hensel_root(&h2, &r3.one()), Err(Error::NotARoot));
        let r2 = zp_ring(2, 4, 1);
        let sq = vec![r2.from_i64(-1), r2.zero(), r2.one()];
        assert_eq!(r2.hensel_root(&sq, &r2.one()), Err(Error::NonSimpleRoot));
    }

    #[test]
    fn digit_expansions() {
        let r = zp_ring(5, 2, 1);
        let seven = r.field_from_i64(7);
        let plain = r.pi_adic_digits(&seven, DigitSet::Plain);
        assert_eq!(plain.digits.iter().map(|d| d.coords[0]).collect::<Vec<_>>(), vec![2, 1]);
        let teich = r.pi_adic_digits(&seven, DigitSet::Teichmueller);
        assert_eq!(teich.digits.iter().map(|d| d.coords[0]).collect::<Vec<_>>(), vec![7]);
        assert!(r.pi_adic_digits(&FieldElement::zero(), DigitSet::Plain).digits.is_empty());
        assert_eq!(r.from_digits(&plain), seven);
    }

    #[test]
    fn norm_preimage_of_minus_one() {
        let r = zp_ring(2, 4, 2);
        let u = r.base().from_i64(-1);
        let v = r.norm_preimage(&u).unwrap();
        assert_eq!(r.norm_to_base(&v).unwrap(), 15);
        assert_eq!(r.norm_preimage(&1).unwrap(), r.one());
    }

    #[test]
    fn literals_round_trip() {
        let r = zp_ring(5, 2, 2);
        let x = RingElement::from_coords([7u64, 0]);
        assert_eq!(r.fmt_elem(&x), "[7;0] + O(5^2)");
        assert_eq!(r.parse_elem("[7;0] + O(5^2)").unwrap(), x);
        assert!(r.parse_elem("[7;0] + O(5^3)").is_err());
        let f = r.parse_field("[3;1]*p^-2").unwrap();
        assert_eq!(f.val, -2);
        assert_eq!(r.parse_field(&r.fmt_field(&f)).unwrap(), f);
        let t = r.parse_field("10").unwrap();
        assert_eq!((t.val, t.unit.unwrap().coords[0]), (1, 2));
    }

    #[test]
    fn power_series_ring() {
        let r = UnramifiedRing::new(FqSeries::new(2, 1, 6).unwrap(), 2).unwrap();
        let y = r.y();
        assert_eq!(r.frob_image(), r.mul(&y, &y));
        assert_eq!(r.frobenius(&y, 2), y);
        let t = r.uniformizer();
        assert_eq!(r.frobenius(&t, 1), t);
        let s = r.fmt_elem(&r.add(&t, &y));
        assert_eq!(s, "[t;1] + O(t^6)");
        assert_eq!(r.parse_elem(&s).unwrap(), r.add(&t, &y));
    }

    #[test]
    fn inverse_and_division() {
        let r = zp_ring(3, 5, 2);
        let x = r.add(&r.y(), &r.from_i64(4));
        let xi = r.inv(&x).unwrap();
        assert_eq!(r.mul(&x, &xi), r.one());
        assert!(r.inv(&r.from_i64(3)).is_err());
        assert_eq!(r.div_pi_pow(&r.from_i64(9), 2).unwrap(), r.one());
        assert_eq!(r.div_pi_pow(&r.from_i64(3), 2), Err(Error::NotDivisible));
        assert!(matches!(r.div_pi_pow(&r.zero(), 5), Err(Error::PrecisionExhausted(_))));
    }
}
