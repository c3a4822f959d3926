//! The Coleman norm operator `N_f`, its iterates, and the unit norms `u_i = N^i(g)(0)`.
//!
//! `N(g)` is the unique `h` with `h∘f = ∏_{β∈μ_1} g(X +_F β)`. The product is a
//! power series, so it is formed modulo `X^M` and `h` is extracted by repeated
//! top-down division by the monic `f`. Each coefficient carries the number of
//! π-adic digits it is known to, and the output is cut at the first coefficient
//! that is not exact modulo π^N.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base::LocalBase;
use crate::error::{Error, Result};
use crate::extension::ExtElement;
use crate::formal_group::{build_formal_group, FormalGroupLaw, LTPolynomial};
use crate::poly;
use crate::ring::Ring;
use crate::torsion::{build_level, TorsionLevel};
use crate::unramified::{FieldElement, RingElement, UnramifiedRing};

type Elem<B> = RingElement<<B as Ring>::Elem>;

/// A power series over O_L, either a polynomial (`exact`) or known up to its length.
#[derive(Clone, Debug, PartialEq)]
pub struct ColemanSeries<B: LocalBase> {
    pub coeffs: Vec<Elem<B>>,
    pub exact: bool,
}

impl<B: LocalBase> ColemanSeries<B> {
    pub fn polynomial(coeffs: Vec<Elem<B>>) -> Self {
        ColemanSeries { coeffs, exact: true }
    }

    /// Known coefficients; the tail beyond them is unknown unless `exact`.
    /// A unit constant term followed by `deg` arbitrary coefficients.
    pub fn random_unit<R: rand::Rng + ?Sized>(ring: &UnramifiedRing<B>, deg: usize, rng: &mut R) -> Self {
        let mut c = vec![ring.random_unit(rng)];
        c.extend((0..deg).map(|_| ring.random_elem(rng)));
        Self::polynomial(c)
    }

    pub fn known_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn constant_term(&self, ring: &UnramifiedRing<B>) -> Elem<B> {
        self.coeffs.first().cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn coeff(&self, ring: &UnramifiedRing<B>, k: usize) -> Elem<B> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ring.zero())
    }
}

/// Everything `N_f` needs: `f`, `F_f` to a sufficient degree, and the level-1 torsion.
#[derive(Clone, Debug)]
pub struct ColemanContext<B: LocalBase> {
    pub f: LTPolynomial<B>,
    pub group: FormalGroupLaw<B>,
    pub level1: TorsionLevel<B>,
}

/// Truncation order of `∏ g(X +_F β)` needed for `out_cap` exact output coefficients.
fn product_order(q: usize, prec: usize, out_cap: usize) -> usize {
    q * (out_cap + 2) + (q - 1) * prec
}

/// Degree of input (and of `F`) needed for `out_cap` exact output coefficients.
pub fn input_degree_for(q: usize, e: usize, prec: usize, out_cap: usize) -> usize {
    product_order(q, prec, out_cap) - 1 + e * prec
}

/// Output caps for the steps `1..=m` of the iteration, ending at `final_cap`.
pub fn cap_chain(q: usize, e: usize, prec: usize, m: usize, final_cap: usize) -> Vec<usize> {
    let mut caps = vec![0; m + 1];
    if m == 0 {
        return caps;
    }
    caps[m] = final_cap;
    for k in (1..m).rev() {
        caps[k] = input_degree_for(q, e, prec, caps[k + 1]);
    }
    caps
}

impl<B: LocalBase> ColemanContext<B> {
    /// A context with `F_f` built to total degree `group_deg`.
    pub fn new(f: &LTPolynomial<B>, group_deg: usize) -> Result<Self> {
        let level1 = build_level(f, 1)?;
        let group = build_formal_group(f, group_deg)?;
        Ok(ColemanContext { f: f.clone(), group, level1 })
    }

    /// A context large enough for `m` iterations ending with `final_cap` exact coefficients.
    pub fn for_levels(f: &LTPolynomial<B>, m: usize, final_cap: usize) -> Result<Self> {
        let q = f.q() as usize;
        let e = q - 1;
        let prec = f.ring().prec() as usize;
        let caps = cap_chain(q, e, prec, m.max(1), final_cap);
        Self::new(f, input_degree_for(q, e, prec, caps[1]))
    }

    fn q(&self) -> usize {
        self.f.q() as usize
    }

    fn e(&self) -> usize {
        self.level1.e()
    }

    fn prec(&self) -> usize {
        self.f.ring().prec() as usize
    }

    /// `N_f(g)` with at most `out_cap + 1` coefficients, all exact modulo π^N.
    pub fn coleman_n(&self, g: &ColemanSeries<B>, out_cap: usize) -> Result<ColemanSeries<B>> {
        let r = self.f.ring();
        let ext = &self.level1.ext;
        let (q, e, prec) = (self.q(), self.e(), self.prec());
        let group_deg = self.group.deg_cap();
        let mut order = product_order(q, prec, out_cap);
        order = order.min((group_deg + 1).saturating_sub(e * prec)).max(1);
        let useful = order - 1 + e * prec;
        let take = g.coeffs.len().min(useful + 1);
        let known_all = g.exact || g.known_degree() >= useful;
        let d_in = g.known_degree();
        let err: Vec<usize> = (0..order)
            .map(|d| if known_all { prec } else { ((d_in + 1).saturating_sub(d) / e).min(prec) })
            .collect();

        let gcoef: Vec<ExtElement<B::Elem>> = g.coeffs[..take].iter().map(|c| ext.embed(c)).collect();
        let mut product = vec![ext.one()];
        for pt in &self.level1.points {
            let beta = &pt.point;
            let s = self.shifted_series(beta, order)?;
            let mut val: Vec<ExtElement<B::Elem>> = vec![];
            for c in gcoef.iter().rev() {
                val = poly::mul_trunc(ext, &val, &s, Some(order - 1));
                val = poly::add(ext, &val, std::slice::from_ref(c));
            }
            product = poly::mul_trunc(ext, &product, &val, Some(order - 1));
        }
        product.resize(order, ext.zero());

        let mut p: Vec<Elem<B>> = Vec::with_capacity(order);
        for (d, c) in product.iter().enumerate() {
            let tail_ok = c.coords[1..].iter().all(|x| r.valuation(x).is_none_or(|v| v as usize >= err[d]));
            if !tail_ok {
                return Err(Error::DescentFailed(format!("coefficient of X^{d} is not in O_L")));
            }
            p.push(c.coords[0].clone());
        }

        let fc = self.f.coeffs();
        let fval: Vec<usize> = fc.iter().map(|c| r.valuation(c).map_or(usize::MAX / 2, |v| v as usize)).collect();
        let mut cur = p;
        let mut cur_err = err;
        let mut out = Vec::new();
        for k in 0..=out_cap {
            if cur.is_empty() || cur_err[0] < prec {
                break;
            }
            out.push(cur[0].clone());
            if k == out_cap || cur.len() <= q {
                break;
            }
            cur[0] = r.zero();
            let len = cur.len();
            for j in len - q + 1..len {
                let tail = (1..=j + q - len).map(|i| fval[i]).min().unwrap_or(usize::MAX);
                cur_err[j] = cur_err[j].min(tail);
            }
            let mut quot: Vec<Elem<B>> = (0..len - q).map(|_| r.zero()).collect();
            let mut qerr = vec![0usize; len - q];
            for top in (q..len).rev() {
                let c = cur[top].clone();
                let ce = cur_err[top];
                quot[top - q] = c.clone();
                qerr[top - q] = ce;
                for i in 0..q {
                    if !r.is_zero(&c) {
                        let t = r.mul(&c, &fc[i]);
                        cur[top - q + i] = r.sub(&cur[top - q + i], &t);
                    }
                    cur_err[top - q + i] = cur_err[top - q + i].min(ce + fval[i]);
                }
            }
            for i in 0..q {
                let need = cur_err[i].min(prec);
                if r.valuation(&cur[i]).is_some_and(|v| (v as usize) < need) {
                    return Err(Error::DivisionRemainder(k));
                }
            }
            cur = quot;
            cur_err = qerr;
        }
        Ok(ColemanSeries { coeffs: out, exact: false })
    }

    /// `F(X, β)` modulo `X^order`, with coefficients in the level-1 extension.
    fn shifted_series(&self, beta: &ExtElement<B::Elem>, order: usize) -> Result<Vec<ExtElement<B::Elem>>> {
        let ext = &self.level1.ext;
        let (e, prec) = (self.e(), self.prec());
        let jmax = e * prec;
        let mut pows = vec![ext.one()];
        for _ in 1..jmax {
            let next = ext.mul(pows.last().expect("nonempty"), beta);
            pows.push(next);
        }
        let cap = self.group.deg_cap();
        let mut out: Vec<_> = (0..order).map(|_| ext.zero()).collect();
        for (exps, c) in self.group.series.terms() {
            let (i, j) = (exps[0] as usize, exps[1] as usize);
            if i >= order || j >= jmax || i + j > cap {
                continue;
            }
            let t = ext.scale(&c, &pows[j]);
            out[i] = ext.add(&out[i], &t);
        }
        Ok(out)
    }

    pub fn frobenius(&self, g: &ColemanSeries<B>, i: i64) -> ColemanSeries<B> {
        let r = self.f.ring();
        ColemanSeries { coeffs: g.coeffs.iter().map(|c| r.frobenius(c, i)).collect(), exact: g.exact }
    }

    /// `N^m(g)`, via `a_1 = N(g)`, `a_{k+1} = N(a_k^{φ^{-1}})`, `N^m(g) = a_m^{φ^{m-1}}`.
    pub fn iterated_n(&self, g: &ColemanSeries<B>, m: usize, out_cap: usize) -> Result<ColemanSeries<B>> {
        if m == 0 {
            return Ok(g.clone());
        }
        let caps = cap_chain(self.q(), self.e(), self.prec(), m, out_cap);
        let mut a = self.coleman_n(g, caps[1])?;
        for cap in caps.iter().take(m + 1).skip(2) {
            a = self.coleman_n(&self.frobenius(&a, -1), *cap)?;
        }
        Ok(self.frobenius(&a, m as i64 - 1))
    }

    /// `[g, N(g), ..., N^m(g)]` with the coefficient caps each is known to.
    pub fn iterates(&self, g: &ColemanSeries<B>, m: usize, final_cap: usize) -> Result<(Vec<ColemanSeries<B>>, Vec<usize>)> {
        let caps = cap_chain(self.q(), self.e(), self.prec(), m, final_cap);
        let mut out = vec![g.clone()];
        if m == 0 {
            return Ok((out, caps));
        }
        let mut a = self.coleman_n(g, caps[1])?;
        out.push(a.clone());
        for (k, cap) in caps.iter().enumerate().take(m + 1).skip(2) {
            a = self.coleman_n(&self.frobenius(&a, -1), *cap)?;
            out.push(self.frobenius(&a, k as i64 - 1));
        }
        Ok((out, caps))
    }

    /// `N^k(g) ≡ N^{k-1}(g)^φ mod π^k` up to `caps[k]`, for each `k ≥ 1`.
    pub fn iterate_congruences(&self, iterates: &[ColemanSeries<B>], caps: &[usize]) -> Vec<bool> {
        let r = self.f.ring();
        (1..iterates.len())
            .map(|k| {
                let (cur, prev) = (&iterates[k], self.frobenius(&iterates[k - 1], 1));
                (0..=caps[k].min(cur.coeffs.len().saturating_sub(1))).all(|i| {
                    let d = r.sub(&cur.coeff(r, i), &prev.coeff(r, i));
                    r.valuation(&d).is_none_or(|v| v as usize >= k)
                })
            })
            .collect()
    }

    /// `u_i = N^i(g)(0)` for `i = 0..=m`.
    pub fn unit_norm_sequence(&self, g: &ColemanSeries<B>, m: usize) -> Result<Vec<Elem<B>>> {
        let r = self.f.ring();
        let u0 = g.constant_term(r);
        if !r.is_unit(&u0) {
            return Err(Error::NotAUnit(r.fmt_elem(&u0)));
        }
        let mut out = vec![u0];
        if m == 0 {
            return Ok(out);
        }
        let caps = cap_chain(self.q(), self.e(), self.prec(), m, 0);
        let mut a = self.coleman_n(g, caps[1])?;
        out.push(a.constant_term(r));
        for (k, cap) in caps.iter().enumerate().take(m + 1).skip(2) {
            a = self.coleman_n(&self.frobenius(&a, -1), *cap)?;
            out.push(r.frobenius(&a.constant_term(r), k as i64 - 1));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormGroupReport {
    pub m: usize,
    pub samples: usize,
    pub unit_failures: usize,
    pub uniformizer_norm_ok: bool,
}

impl NormGroupReport {
    pub fn pass(&self) -> bool {
        self.unit_failures == 0 && self.uniformizer_norm_ok
    }
}

/// Checks that sampled unit norms lie in `1 + π^m` and that `N(−α) = x`.
pub fn norm_group_membership<B: LocalBase>(
    x: &FieldElement<B::Elem>,
    level: &TorsionLevel<B>,
    samples: usize,
    seed: u64,
) -> Result<NormGroupReport> {
    let r = level.f.ring();
    let base = r.base();
    let ext = &level.ext;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit_failures = 0;
    for _ in 0..samples {
        let u = ext.random_unit(&mut rng);
        let nu = level.norm_abs(&u)?;
        if base.valuation(&base.sub(&nu, &base.one())).is_some_and(|v| (v as usize) < level.m) {
            unit_failures += 1;
        }
    }
    let n_alpha = level.norm_abs(&ext.neg(&level.alpha))?;
    let uniformizer_norm_ok = r.field_from_base(&n_alpha) == *x;
    Ok(NormGroupReport { m: level.m, samples, unit_failures, uniformizer_norm_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Zp;

    fn setup(p: u32, prec: u32, m: usize, cap: usize) -> (UnramifiedRing<Zp>, ColemanContext<Zp>) {
        let r = UnramifiedRing::new(Zp::new(p, prec).unwrap(), 1).unwrap();
        let f = LTPolynomial::standard(&r).unwrap();
        let ctx = ColemanContext::for_levels(&f, m, cap).unwrap();
        (r, ctx)
    }

    fn poly_of(r: &UnramifiedRing<Zp>, c: &[i64]) -> ColemanSeries<Zp> {
        ColemanSeries::polynomial(c.iter().map(|&x| r.from_i64(x)).collect())
    }

    #[test]
    fn spec_examples() {
        let (r, ctx) = setup(2, 10, 1, 4);
        let n = ctx.coleman_n(&poly_of(&r, &[1, 1]), 4).unwrap();
        let expect: Vec<_> = [-1, -1, 0, 0, 0].iter().map(|&x| r.from_i64(x)).collect();
        assert_eq!(n.coeffs, expect);
        let nx = ctx.coleman_n(&poly_of(&r, &[0, 1]), 4).unwrap();
        assert_eq!(nx.coeffs[1], r.from_i64(-1));
        assert!(nx.coeffs.iter().enumerate().all(|(k, c)| k == 1 || r.is_zero(c)));
        let one = ctx.coleman_n(&poly_of(&r, &[1]), 3).unwrap();
        assert_eq!(one.coeffs[0], r.one());
        assert!(one.coeffs[1..].iter().all(|c| r.is_zero(c)));
    }

    #[test]
    fn unit_sequence_and_dual_norm() {
        let (r, ctx) = setup(2, 8, 2, 0);
        let g = poly_of(&r, &[1, 1]);
        let u = ctx.unit_norm_sequence(&g, 2).unwrap();
        assert_eq!(u, vec![r.one(), r.from_i64(-1), r.from_i64(-1)]);
        let level = build_level(&ctx.f, 2).unwrap();
        let ga = level.ext.add(&level.ext.one(), &level.alpha);
        assert_eq!(level.norm_rel(&ga).unwrap(), r.mul(&u[2], &r.inv(&u[1]).unwrap()));
    }

    #[test]
    fn norm_group_small() {
        let r = UnramifiedRing::new(Zp::new(2, 10).unwrap(), 1).unwrap();
        let f = LTPolynomial::standard(&r).unwrap();
        let level = build_level(&f, 2).unwrap();
        let rep = norm_group_membership(&r.field_from_i64(2), &level, 20, 7).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn multiplicative_and_stable_under_larger_order() {
        for p in [2u32, 3] {
            let (r, ctx) = setup(p, 6, 1, 6);
            let g1 = poly_of(&r, &[1, 2, 0, 1]);
            let g2 = poly_of(&r, &[2, 1, 1]);
            let prod = ColemanSeries::polynomial(poly::mul(&r, &g1.coeffs, &g2.coeffs));
            let n1 = ctx.coleman_n(&g1, 6).unwrap();
            let n2 = ctx.coleman_n(&g2, 6).unwrap();
            let n12 = ctx.coleman_n(&prod, 6).unwrap();
            assert_eq!(n12.coeffs.len(), 7);
            let lhs = poly::mul_trunc(&r, &n1.coeffs, &n2.coeffs, Some(6));
            assert!(poly::eq(&r, &lhs, &n12.coeffs), "p = {p}");
            let short = ctx.coleman_n(&g1, 3).unwrap();
            assert_eq!(short.coeffs[..], n1.coeffs[..4]);
            for (k, c) in n1.coeffs.iter().enumerate() {
                let d = r.sub(c, &r.frobenius(&g1.coeff(&r, k), 1));
                assert!(r.valuation(&d).is_none_or(|v| v >= 1));
            }
        }
    }
}
