//! Truncated power series in up to three variables, and the solver for
//! `f'∘F = F^φ∘f`.

use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::LocalBase;
use crate::error::{Error, Result};
use crate::poly;
use crate::ring::Ring;
use crate::unramified::{RingElement, UnramifiedRing};

pub type Exps = [u16; 3];

/// Monomials of total degree at most `deg_cap`, ordered by degree then lexicographically.
#[derive(Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    nvars: usize,
    deg_cap: usize,
    exps: Vec<Exps>,
    starts: Vec<usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, deg_cap: usize) -> Result<Arc<Self>> {
        if !(1..=3).contains(&nvars) {
            return Err(Error::InvalidConfig(format!("{nvars} variables; supported are 1 to 3")));
        }
        let mut exps = Vec::new();
        let mut starts = Vec::with_capacity(deg_cap + 2);
        for d in 0..=deg_cap {
            starts.push(exps.len());
            let d16 = d as u16;
            match nvars {
                1 => exps.push([d16, 0, 0]),
                2 => (0..=d16).for_each(|a| exps.push([a, d16 - a, 0])),
                _ => {
                    for a in 0..=d16 {
                        for b in 0..=d16 - a {
                            exps.push([a, b, d16 - a - b]);
                        }
                    }
                }
            }
        }
        starts.push(exps.len());
        Ok(Arc::new(MonomialBasis { nvars, deg_cap, exps, starts }))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn deg_cap(&self) -> usize {
        self.deg_cap
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self, i: usize) -> &Exps {
        &self.exps[i]
    }

    pub fn degree_range(&self, d: usize) -> Range<usize> {
        self.starts[d]..self.starts[d + 1]
    }

    /// Position of a monomial; the caller guarantees its degree is within the cap.
    pub fn index_of(&self, e: &Exps) -> usize {
        let (a, b, c) = (e[0] as usize, e[1] as usize, e[2] as usize);
        match self.nvars {
            1 => a,
            2 => {
                let d = a + b;
                d * (d + 1) / 2 + a
            }
            _ => {
                let d = a + b + c;
                d * (d + 1) * (d + 2) / 6 + a * (d + 1) - a * a.saturating_sub(1) / 2 + b
            }
        }
    }
}

pub fn degree_of(e: &Exps) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

/// A power series in `nvars` variables known up to total degree `deg_cap`.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<R: Ring> {
    ring: R,
    basis: Arc<MonomialBasis>,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for TruncatedSeries<R> {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.coeffs == other.coeffs
    }
}

impl<R: Ring> TruncatedSeries<R> {
    pub fn zero(ring: &R, nvars: usize, deg_cap: usize) -> Result<Self> {
        let basis = MonomialBasis::new(nvars, deg_cap)?;
        Ok(Self::zero_on(ring, basis))
    }

    pub fn zero_on(ring: &R, basis: Arc<MonomialBasis>) -> Self {
        let coeffs = (0..basis.len()).map(|_| ring.zero()).collect();
        TruncatedSeries { ring: ring.clone(), basis, coeffs }
    }

    pub fn constant(ring: &R, nvars: usize, deg_cap: usize, c: R::Elem) -> Result<Self> {
        let mut s = Self::zero(ring, nvars, deg_cap)?;
        s.coeffs[0] = c;
        Ok(s)
    }

    /// The variable `X_i` (0-based).
    pub fn var(ring: &R, nvars: usize, deg_cap: usize, i: usize) -> Result<Self> {
        let mut e = [0u16; 3];
        e[i] = 1;
        Self::from_terms(ring, nvars, deg_cap, &[(e, ring.one())])
    }

    pub fn from_terms(ring: &R, nvars: usize, deg_cap: usize, terms: &[(Exps, R::Elem)]) -> Result<Self> {
        let mut s = Self::zero(ring, nvars, deg_cap)?;
        for (e, c) in terms {
            if e[nvars..].iter().any(|&x| x != 0) {
                return Err(Error::RingMismatch);
            }
            if degree_of(e) <= deg_cap {
                let i = s.basis.index_of(e);
                s.coeffs[i] = ring.add(&s.coeffs[i], c);
            }
        }
        Ok(s)
    }

    /// `Σ c_k X_var^k` as a series in `nvars` variables.
    pub fn univariate_in(ring: &R, nvars: usize, deg_cap: usize, var: usize, c: &[R::Elem]) -> Result<Self> {
        let mut s = Self::zero(ring, nvars, deg_cap)?;
        for (k, x) in c.iter().enumerate().take(deg_cap + 1) {
            let mut e = [0u16; 3];
            e[var] = k as u16;
            let i = s.basis.index_of(&e);
            s.coeffs[i] = x.clone();
        }
        Ok(s)
    }

    pub fn from_univariate(ring: &R, deg_cap: usize, c: &[R::Elem]) -> Result<Self> {
        Self::univariate_in(ring, 1, deg_cap, 0, c)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars
    }

    pub fn deg_cap(&self) -> usize {
        self.basis.deg_cap
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Exps) -> R::Elem {
        if degree_of(e) > self.deg_cap() {
            return self.ring.zero();
        }
        self.coeffs[self.basis.index_of(e)].clone()
    }

    pub fn set_coeff(&mut self, e: &Exps, c: R::Elem) {
        if degree_of(e) <= self.deg_cap() {
            let i = self.basis.index_of(e);
            self.coeffs[i] = c;
        }
    }

    /// Nonzero terms in (degree, lex) order.
    pub fn terms(&self) -> Vec<(Exps, R::Elem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(|(i, c)| (self.basis.exps[i], c.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeffs[0].clone()
    }

    /// Coefficients of a univariate series, ascending.
    pub fn univariate_coeffs(&self) -> Vec<R::Elem> {
        debug_assert_eq!(self.nvars(), 1);
        self.coeffs.clone()
    }

    pub fn map_coeffs<S: Ring>(&self, ring: &S, f: impl Fn(&R::Elem) -> S::Elem) -> TruncatedSeries<S> {
        TruncatedSeries { ring: ring.clone(), basis: self.basis.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Restriction to a smaller degree cap.
    pub fn truncate(&self, deg_cap: usize) -> Self {
        if deg_cap >= self.deg_cap() {
            return self.clone();
        }
        let basis = MonomialBasis::new(self.nvars(), deg_cap).expect("valid basis");
        let len = basis.len();
        TruncatedSeries { ring: self.ring.clone(), basis, coeffs: self.coeffs[..len].to_vec() }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.nvars() != other.nvars() || self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let cap = self.deg_cap().min(other.deg_cap());
        (self.truncate(cap), other.truncate(cap))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (mut a, b) = self.aligned(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            self.ring.add_assign(x, y);
        }
        Ok(a)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (mut a, b) = self.aligned(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = self.ring.sub(x, y);
        }
        Ok(a)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(&self.ring, |c| self.ring.neg(c))
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        self.map_coeffs(&self.ring, |x| self.ring.mul(c, x))
    }

    fn nonzero(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for d in 0..=self.deg_cap() {
            for i in self.basis.degree_range(d) {
                if !self.ring.is_zero(&self.coeffs[i]) {
                    out.push((i, d));
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (a, b) = self.aligned(other);
        let cap = a.deg_cap();
        let mut out = Self::zero_on(&self.ring, a.basis.clone());
        let bn = b.nonzero();
        for (i, da) in a.nonzero() {
            let ea = a.basis.exps[i];
            let x = &a.coeffs[i];
            for &(j, db) in &bn {
                if da + db > cap {
                    break;
                }
                let eb = b.basis.exps[j];
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let k = out.basis.index_of(&e);
                self.ring.mul_add_assign(&mut out.coeffs[k], x, &b.coeffs[j]);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: usize) -> Result<Self> {
        let mut acc = Self::constant(&self.ring, self.nvars(), self.deg_cap(), self.ring.one())?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `outer(inners[0], ..)`; the result lives in the inners' variable space.
    pub fn compose(&self, inners: &[Self]) -> Result<Self> {
        if inners.len() != self.nvars() || inners.is_empty() {
            return Err(Error::RingMismatch);
        }
        let target = inners[0].nvars();
        for s in inners {
            if s.nvars() != target || s.ring != self.ring {
                return Err(Error::RingMismatch);
            }
            if !self.ring.is_zero(&s.constant_term()) {
                return Err(Error::NonzeroConstantTerm);
            }
        }
        let cap = inners.iter().map(|s| s.deg_cap()).min().unwrap_or(0).min(self.deg_cap());
        let inners: Vec<Self> = inners.iter().map(|s| s.truncate(cap)).collect();
        let one = Self::constant(&self.ring, target, cap, self.ring.one())?;
        let mut powers: Vec<Vec<Self>> = inners.iter().map(|_| vec![one.clone()]).collect();
        let mut acc = Self::zero(&self.ring, target, cap)?;
        for (i, d) in self.nonzero() {
            if d > cap {
                break;
            }
            let e = self.basis.exps[i];
            let mut prod: Option<Self> = None;
            for (v, inner) in inners.iter().enumerate() {
                let k = e[v] as usize;
                if k == 0 {
                    continue;
                }
                while powers[v].len() <= k {
                    let next = powers[v].last().expect("nonempty").mul(inner)?;
                    powers[v].push(next);
                }
                prod = Some(match prod {
                    None => powers[v][k].clone(),
                    Some(p) => p.mul(&powers[v][k])?,
                });
            }
            let term = prod.unwrap_or_else(|| one.clone()).scale(&self.coeffs[i]);
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coeff: String,
}

/// Series interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub vars: usize,
    pub deg_cap: usize,
    pub prec: u32,
    pub terms: Vec<TermJson>,
}

impl<B: LocalBase> TruncatedSeries<UnramifiedRing<B>> {
    pub fn apply_frobenius(&self, i: i64) -> Self {
        self.map_coeffs(&self.ring, |c| self.ring.frobenius(c, i))
    }

    /// Moves every coefficient into `ring` (another precision) by canonical digits.
    pub fn coerce_to(&self, ring: &UnramifiedRing<B>) -> Self {
        self.map_coeffs(ring, |c| ring.coerce(c))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            vars: self.nvars(),
            deg_cap: self.deg_cap(),
            prec: self.ring.prec(),
            terms: self
                .terms()
                .into_iter()
                .map(|(e, c)| TermJson { exp: e[..self.nvars()].to_vec(), coeff: self.ring.fmt_elem(&c) })
                .collect(),
        }
    }

    pub fn from_json(ring: &UnramifiedRing<B>, j: &SeriesJson) -> Result<Self> {
        if j.prec != ring.prec() {
            return Err(Error::Parse(format!("series precision {} differs from ring precision {}", j.prec, ring.prec())));
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.exp.len() != j.vars {
                return Err(Error::Parse("exponent length differs from variable count".into()));
            }
            let mut e = [0u16; 3];
            e[..j.vars].copy_from_slice(&t.exp);
            terms.push((e, ring.parse_elem(&t.coeff)?));
        }
        Self::from_terms(ring, j.vars, j.deg_cap, &terms)
    }
}

/// Checks `f ≡ πX mod deg 2`, `f ≡ X^q mod π`, monic of degree q, zero constant term.
pub fn check_lt_shape<B: LocalBase>(ring: &UnramifiedRing<B>, f: &[RingElement<B::Elem>]) -> Result<()> {
    let q = ring.q() as usize;
    if f.len() != q + 1 || !ring.is_one(&f[q]) {
        return Err(Error::InvalidPolynomial(format!("expected a monic polynomial of degree {q}")));
    }
    if !ring.is_zero(&f[0]) {
        return Err(Error::InvalidPolynomial("constant term must vanish".into()));
    }
    if ring.valuation(&f[1]) != Some(1) {
        return Err(Error::NotAUniformizer(ring.fmt_elem(&f[1])));
    }
    if f[2..q].iter().any(|c| ring.valuation(c).is_some_and(|v| v == 0)) {
        return Err(Error::InvalidPolynomial("f is not congruent to X^q modulo π".into()));
    }
    Ok(())
}

/// Extra digits carried while solving so that the result is exact modulo π^N.
pub fn guard_digits(q: u64, deg_cap: usize) -> u32 {
    let mut g = 3;
    let mut k = q;
    while k <= deg_cap as u64 {
        g += 1;
        k *= q;
    }
    g
}

/// Precision at which identities among separately built series should be computed
/// so that they hold exactly modulo π^prec up to total degree `deg_cap`.
///
/// A series such as `[a]_f` modulo `(deg D, π^N)` depends on `a` and `f` modulo
/// roughly `π^{N + log_q D}`, so inputs known only modulo π^N are carried with
/// these extra digits.
pub fn working_prec(prec: u32, q: u64, deg_cap: usize) -> u32 {
    prec + guard_digits(q, deg_cap) - 1
}

/// The unique `F ≡ Σ θ_i X_i mod deg 2` with `f2∘F = F^φ∘f`, up to total degree `deg_cap`.
///
/// The recursion runs at a precision raised by [`guard_digits`]; inputs are
/// lifted so that the θ-condition holds exactly there, and `f2` is lifted as an
/// exact Frobenius twist of `f` whenever it is one modulo π^N.
pub fn solve_functional_equation<B: LocalBase>(
    ring: &UnramifiedRing<B>,
    f: &[RingElement<B::Elem>],
    f2: &[RingElement<B::Elem>],
    thetas: &[RingElement<B::Elem>],
    deg_cap: usize,
) -> Result<TruncatedSeries<UnramifiedRing<B>>> {
    check_lt_shape(ring, f)?;
    check_lt_shape(ring, f2)?;
    if thetas.is_empty() || thetas.len() > 3 {
        return Err(Error::InvalidConfig("between one and three thetas are required".into()));
    }
    for th in thetas {
        let lhs = ring.mul(&ring.frobenius(th, 1), &f[1]);
        let rhs = ring.mul(&f2[1], th);
        if lhs != rhs {
            return Err(Error::ThetaConditionFailed(format!(
                "θ = {} does not satisfy θ^φ·π = π'·θ",
                ring.fmt_elem(th)
            )));
        }
    }
    let guard = guard_digits(ring.q(), deg_cap);
    let wide = ring.with_prec(ring.prec() + guard).map_err(|_| {
        Error::PrecisionExhausted(format!("precision {} plus {guard} guard digits is not representable", ring.prec()))
    })?;
    let fl: Vec<_> = f.iter().map(|c| wide.lift_from(ring, c)).collect();
    let twist = (0..ring.n() as i64).find(|&i| f2.iter().zip(f).all(|(a, b)| *a == ring.frobenius(b, i)));
    let mut f2l: Vec<_> = match twist {
        Some(i) => fl.iter().map(|c| wide.frobenius(c, i)).collect(),
        None => f2.iter().map(|c| wide.lift_from(ring, c)).collect(),
    };
    let mut tl: Vec<_> = thetas.iter().map(|c| wide.lift_from(ring, c)).collect();
    let mut adjusted = false;
    for th in tl.iter_mut() {
        let Some(v) = wide.valuation(th) else { continue };
        let holds = |f2l: &[RingElement<B::Elem>], th: &RingElement<B::Elem>| {
            wide.mul(&wide.frobenius(th, 1), &fl[1]) == wide.mul(&f2l[1], th)
        };
        if holds(&f2l, th) {
            continue;
        }
        let unit = wide.shift_down(th, v);
        let w = wide.mul(&wide.shift_down(&f2l[1], 1), &wide.inv(&wide.shift_down(&fl[1], 1))?);
        if let Ok(refined) = wide.solve_frobenius_ratio(&w, Some((&unit, ring.prec()))) {
            *th = wide.mul_pi_pow(&refined, v);
            continue;
        }
        if adjusted {
            return Err(Error::ThetaConditionFailed("thetas are inconsistent at guarded precision".into()));
        }
        let ratio = wide.mul(&wide.frobenius(&unit, 1), &wide.inv(&unit)?);
        f2l[1] = wide.mul(&fl[1], &ratio);
        adjusted = true;
        if !holds(&f2l, th) {
            return Err(Error::ThetaConditionFailed("cannot realize θ at guarded precision".into()));
        }
    }
    let wide_series = solve_exact(&wide, &fl, &f2l, &tl, deg_cap)?;
    let out = wide_series.coerce_to(ring);

    let f2s = TruncatedSeries::from_univariate(ring, deg_cap, f2)?;
    let t = thetas.len();
    let lhs = f2s.compose(std::slice::from_ref(&out))?;
    let fx: Vec<_> = (0..t)
        .map(|v| TruncatedSeries::univariate_in(ring, t, deg_cap, v, f))
        .collect::<Result<_>>()?;
    let rhs = out.apply_frobenius(1).compose(&fx)?;
    if lhs != rhs {
        return Err(Error::PrecisionExhausted("defining equation fails after reduction".into()));
    }
    Ok(out)
}

/// Degree-by-degree recursion, assuming the θ-condition holds exactly in `ring`.
fn solve_exact<B: LocalBase>(
    ring: &UnramifiedRing<B>,
    f: &[RingElement<B::Elem>],
    f2: &[RingElement<B::Elem>],
    thetas: &[RingElement<B::Elem>],
    deg_cap: usize,
) -> Result<TruncatedSeries<UnramifiedRing<B>>> {
    let q = f.len() - 1;
    let t = thetas.len();
    let basis = MonomialBasis::new(t, deg_cap)?;
    let mut series = TruncatedSeries::zero_on(ring, basis.clone());
    let mut phi_coeffs: Vec<RingElement<B::Elem>> = (0..basis.len()).map(|_| ring.zero()).collect();
    if deg_cap == 0 {
        return Ok(series);
    }
    for (v, th) in thetas.iter().enumerate() {
        let mut e = [0u16; 3];
        e[v] = 1;
        let i = basis.index_of(&e);
        series.coeffs[i] = th.clone();
        phi_coeffs[i] = ring.frobenius(th, 1);
    }

    // fp[e][a] = coefficient of X^a in f(X)^e.
    let mut fp: Vec<Vec<RingElement<B::Elem>>> = vec![poly::monomial(ring, 0)];
    for e in 1..=deg_cap {
        let next = poly::mul_trunc(ring, &fp[e - 1], f, Some(deg_cap));
        fp.push(next);
    }
    let fpc = |e: usize, a: usize| fp[e].get(a);

    let u = ring.shift_down(&f[1], 1);
    let u2 = ring.shift_down(&f2[1], 1);
    let u2_inv = ring.inv(&u2)?;
    let u_ratio = ring.mul(&u, &u2_inv);

    // pow[k] holds F^k for k = 2..=q, filled degree by degree.
    let mut pow: Vec<Vec<RingElement<B::Elem>>> =
        (0..=q).map(|_| (0..basis.len()).map(|_| ring.zero()).collect()).collect();

    for s in 2..=deg_cap {
        for k in 2..=q.min(s) {
            for s1 in 1..s {
                let s2 = s - s1;
                if s2 < k - 1 {
                    continue;
                }
                for i in basis.degree_range(s1) {
                    let x = &series.coeffs[i];
                    if ring.is_zero(x) {
                        continue;
                    }
                    let ei = basis.exps[i];
                    for j in basis.degree_range(s2) {
                        let y = if k == 2 { &series.coeffs[j] } else { &pow[k - 1][j] };
                        if ring.is_zero(y) {
                            continue;
                        }
                        let ej = basis.exps[j];
                        let idx = basis.index_of(&[ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]]);
                        let prod = ring.mul(x, y);
                        ring.add_assign(&mut pow[k][idx], &prod);
                    }
                }
            }
        }

        let range = basis.degree_range(s);
        let mut g: Vec<RingElement<B::Elem>> = range.clone().map(|_| ring.zero()).collect();
        for k in 2..=q.min(s) {
            if ring.is_zero(&f2[k]) {
                continue;
            }
            for (slot, idx) in g.iter_mut().zip(range.clone()) {
                if !ring.is_zero(&pow[k][idx]) {
                    ring.mul_add_assign(slot, &f2[k], &pow[k][idx]);
                }
            }
        }
        for d in 1..s {
            for mi in basis.degree_range(d) {
                let c = &phi_coeffs[mi];
                if ring.is_zero(c) {
                    continue;
                }
                let m = basis.exps[mi];
                let lo = |v: usize| m[v] as usize;
                let hi = |v: usize| q * m[v] as usize;
                match t {
                    1 => {
                        if let Some(a) = fpc(lo(0), s) {
                            let prod = ring.mul(c, a);
                            g[0] = ring.sub(&g[0], &prod);
                        }
                    }
                    2 => {
                        let a_lo = lo(0).max(s.saturating_sub(hi(1)));
                        let a_hi = hi(0).min(s - lo(1).min(s));
                        for a in a_lo..=a_hi {
                            let b = s - a;
                            let (Some(x), Some(y)) = (fpc(lo(0), a), fpc(lo(1), b)) else { continue };
                            if ring.is_zero(x) || ring.is_zero(y) {
                                continue;
                            }
                            let idx = basis.index_of(&[a as u16, b as u16, 0]) - range.start;
                            let prod = ring.mul(c, &ring.mul(x, y));
                            g[idx] = ring.sub(&g[idx], &prod);
                        }
                    }
                    _ => {
                        for a in lo(0)..=hi(0).min(s) {
                            let Some(x) = fpc(lo(0), a).filter(|x| !ring.is_zero(x)) else { continue };
                            let cx = ring.mul(c, x);
                            for b in lo(1)..=hi(1).min(s - a) {
                                let cc = s - a - b;
                                if cc < lo(2) || cc > hi(2) {
                                    continue;
                                }
                                let (Some(y), Some(z)) = (fpc(lo(1), b), fpc(lo(2), cc)) else { continue };
                                if ring.is_zero(y) || ring.is_zero(z) {
                                    continue;
                                }
                                let idx = basis.index_of(&[a as u16, b as u16, cc as u16]) - range.start;
                                let prod = ring.mul(&cx, &ring.mul(y, z));
                                g[idx] = ring.sub(&g[idx], &prod);
                            }
                        }
                    }
                }
            }
        }

        // c_s = π^s/π' = π_K^{s-1} u^s / u'.
        let c_s = ring.mul_pi_pow(&ring.mul(&ring.pow(&u, s as u64 - 1), &u_ratio), s as u32 - 1);
        for (off, gv) in g.iter().enumerate() {
            if ring.is_zero(gv) {
                continue;
            }
            if ring.valuation(gv) == Some(0) {
                return Err(Error::InvalidPolynomial("recursion hit a non-integral coefficient".into()));
            }
            let beta = ring.mul(&ring.shift_down(gv, 1), &u2_inv);
            let minus_beta = ring.neg(&beta);
            let mut alpha = minus_beta.clone();
            for _ in 0..=ring.prec() + 1 {
                let next = ring.add(&minus_beta, &ring.mul(&c_s, &ring.frobenius(&alpha, 1)));
                if next == alpha {
                    break;
                }
                alpha = next;
            }
            let idx = range.start + off;
            phi_coeffs[idx] = ring.frobenius(&alpha, 1);
            series.coeffs[idx] = alpha;
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Zp;

    fn zring(p: u32, prec: u32) -> UnramifiedRing<Zp> {
        UnramifiedRing::new(Zp::new(p, prec).unwrap(), 1).unwrap()
    }

    fn c(r: &UnramifiedRing<Zp>, k: i64) -> RingElement<u64> {
        r.from_i64(k)
    }

    #[test]
    fn monomial_indexing_matches_enumeration() {
        for nvars in 1..=3 {
            let b = MonomialBasis::new(nvars, 7).unwrap();
            for i in 0..b.len() {
                assert_eq!(b.index_of(b.exps(i)), i);
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let r = zring(2, 3);
        let x = TruncatedSeries::var(&r, 2, 4, 0).unwrap();
        let y = TruncatedSeries::var(&r, 2, 4, 1).unwrap();
        let p = x.add(&y).unwrap().mul(&x.sub(&y).unwrap()).unwrap();
        let expect = TruncatedSeries::from_terms(&r, 2, 4, &[([2, 0, 0], c(&r, 1)), ([0, 2, 0], c(&r, -1))]).unwrap();
        assert_eq!(p, expect);
        let a = TruncatedSeries::from_univariate(&r, 4, &[c(&r, 1), c(&r, 2)]).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.univariate_coeffs()[..3], [c(&r, 1), c(&r, 4), c(&r, 4)]);
    }

    #[test]
    fn composition_examples() {
        let r = zring(2, 10);
        let xsq = TruncatedSeries::from_terms(&r, 1, 6, &[([2, 0, 0], c(&r, 1))]).unwrap();
        let x = TruncatedSeries::var(&r, 2, 6, 0).unwrap();
        let y = TruncatedSeries::var(&r, 2, 6, 1).unwrap();
        let s = xsq.compose(&[x.add(&y).unwrap()]).unwrap();
        assert_eq!(s.terms().len(), 3);
        assert_eq!(s.coeff(&[1, 1, 0]), c(&r, 2));
        let f = TruncatedSeries::from_univariate(&r, 6, &[c(&r, 0), c(&r, 2), c(&r, 1)]).unwrap();
        let ff = f.compose(std::slice::from_ref(&f)).unwrap();
        assert_eq!(ff.univariate_coeffs()[..5], [c(&r, 0), c(&r, 4), c(&r, 6), c(&r, 4), c(&r, 1)]);
        let id = TruncatedSeries::var(&r, 1, 6, 0).unwrap();
        assert_eq!(f.compose(&[id]).unwrap(), f);
        let one = TruncatedSeries::constant(&r, 1, 6, c(&r, 1)).unwrap();
        assert_eq!(f.compose(&[one]), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn mismatch_errors() {
        let r = zring(2, 4);
        let a = TruncatedSeries::var(&r, 1, 3, 0).unwrap();
        let b = TruncatedSeries::var(&r, 2, 3, 0).unwrap();
        assert_eq!(a.add(&b), Err(Error::RingMismatch));
        let other = zring(3, 4);
        let d = TruncatedSeries::var(&other, 1, 3, 0).unwrap();
        assert_eq!(a.mul(&d), Err(Error::RingMismatch));
    }

    #[test]
    fn multiplicative_group_from_solver() {
        let r = zring(2, 12);
        let f = vec![c(&r, 0), c(&r, 2), c(&r, 1)];
        let one = r.one();
        let s = solve_functional_equation(&r, &f, &f, &[one.clone(), one], 8).unwrap();
        let expect = TruncatedSeries::from_terms(
            &r,
            2,
            8,
            &[([1, 0, 0], c(&r, 1)), ([0, 1, 0], c(&r, 1)), ([1, 1, 0], c(&r, 1))],
        )
        .unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn identity_and_zero_xy_term() {
        let r = zring(3, 8);
        let f = vec![c(&r, 0), c(&r, 3), c(&r, 0), c(&r, 1)];
        let id = solve_functional_equation(&r, &f, &f, &[r.one()], 8).unwrap();
        assert_eq!(id, TruncatedSeries::var(&r, 1, 8, 0).unwrap());
        let one = r.one();
        let s = solve_functional_equation(&r, &f, &f, &[one.clone(), one], 8).unwrap();
        assert!(r.is_zero(&s.coeff(&[1, 1, 0])));
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        let r = zring(3, 8);
        let f = vec![c(&r, 0), c(&r, 3), c(&r, 0), c(&r, 1)];
        let g = vec![c(&r, 0), c(&r, 9), c(&r, 0), c(&r, 1)];
        assert!(matches!(solve_functional_equation(&r, &g, &f, &[r.one()], 4), Err(Error::NotAUniformizer(_))));
        let h = vec![c(&r, 0), c(&r, 6), c(&r, 0), c(&r, 1)];
        assert!(matches!(
            solve_functional_equation(&r, &f, &h, &[r.one()], 4),
            Err(Error::ThetaConditionFailed(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let r = zring(5, 3);
        let s = TruncatedSeries::from_terms(&r, 2, 3, &[([1, 0, 0], c(&r, 7)), ([0, 2, 0], c(&r, 124))]).unwrap();
        let j = s.to_json();
        assert_eq!(j.terms[0].coeff, "[7] + O(5^3)");
        assert_eq!(j.terms[1].exp, vec![0, 2]);
        assert_eq!(TruncatedSeries::from_json(&r, &j).unwrap(), s);
    }
}
