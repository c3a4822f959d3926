//! Lower and upper ramification filtrations of a totally ramified Galois
//! extension given by an Eisenstein ring and the images of its generator.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::LocalBase;
use crate::error::{Error, Result};
use crate::extension::{EisensteinExtension, ExtElement};
use crate::ring::Ring;
use crate::torsion::TorsionLevel;
use crate::unramified::UnramifiedRing;

pub type Q = Ratio<i64>;

/// Hand-entered cyclotomic presentations of Q_2(ζ_8) and Q_2(ζ_4) over Z/2^8.
pub const ZETA8_JSON: &str = include_str!("../fixtures/zeta8.json");
pub const ZETA4_JSON: &str = include_str!("../fixtures/zeta4.json");
type Ext<B> = ExtElement<<B as Ring>::Elem>;

/// A finite group of automorphisms, each given by the image of α.
#[derive(Clone, Debug)]
pub struct GaloisPresentation<B: LocalBase> {
    pub ext: EisensteinExtension<B>,
    pub images: Vec<Ext<B>>,
    pub labels: Vec<String>,
    /// `table[a][b]` is the index of `σ_a ∘ σ_b`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl<B: LocalBase> GaloisPresentation<B> {
    pub fn new(ext: &EisensteinExtension<B>, images: Vec<Ext<B>>, labels: Vec<String>) -> Result<Self> {
        let n = images.len();
        if n != ext.e() || labels.len() != n {
            return Err(Error::InvalidPresentation(format!("{n} automorphisms for an extension of degree {}", ext.e())));
        }
        let alpha = ext.alpha();
        for (img, l) in images.iter().zip(&labels) {
            if !ext.is_zero(&ext.eval_base_poly(ext.defining_poly(), img)) {
                return Err(Error::InvalidPresentation(format!("image of {l} is not a root")));
            }
        }
        let identity = images
            .iter()
            .position(|x| *x == alpha)
            .ok_or_else(|| Error::InvalidPresentation("identity is missing".into()))?;
        let index: HashMap<&Ext<B>, usize> = images.iter().enumerate().map(|(i, x)| (x, i)).collect();
        if index.len() != n {
            return Err(Error::InvalidPresentation("images are not distinct".into()));
        }
        let sep = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter_map(|(a, b)| ext.valuation(&ext.sub(&images[a], &images[b])))
            .max()
            .unwrap_or(0);
        let find = |x: &Ext<B>| {
            index.get(x).copied().or_else(|| {
                images.iter().position(|y| ext.valuation(&ext.sub(x, y)).is_none_or(|v| v > sep))
            })
        };
        let mut table = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let img = ext.substitute(&images[b], &images[a]);
                table[a][b] = find(&img)
                    .ok_or_else(|| Error::InvalidPresentation(format!("{} ∘ {} is not listed", labels[a], labels[b])))?;
            }
        }
        Ok(GaloisPresentation { ext: ext.clone(), images, labels, table, identity })
    }

    /// Gal(L'/L) of a torsion level, labelled by the unit residues.
    pub fn from_level(level: &TorsionLevel<B>) -> Result<Self> {
        let base = level.f.ring().base();
        let (labels, images) = level.units().map(|p| (base.fmt_elem(&p.a), p.point.clone())).unzip();
        Self::new(&level.ext, images, labels)
    }

    /// Reads `{ext: [g_0, ..], autos: [[c_0, ..], ..], labels}` with coefficient literals.
    pub fn from_json(r: &UnramifiedRing<B>, j: &PresentationJson) -> Result<Self> {
        let g = j.ext.iter().map(|c| r.parse_elem(c)).collect::<Result<Vec<_>>>()?;
        let ext = EisensteinExtension::new(r, g)?;
        let images = j
            .autos
            .iter()
            .map(|img| {
                if img.len() != ext.e() {
                    return Err(Error::InvalidPresentation(format!("image with {} coordinates", img.len())));
                }
                Ok(ExtElement { coords: img.iter().map(|c| r.parse_elem(c)).collect::<Result<_>>()? })
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = if j.labels.is_empty() {
            (0..images.len()).map(|k| format!("s{k}")).collect()
        } else {
            j.labels.clone()
        };
        Self::new(&ext, images, labels)
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).expect("group")
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.compose(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        (1..=self.order()).find(|&k| self.power(a, k) == self.identity).expect("finite")
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        (0..self.order()).all(|g| {
            let gi = self.inverse(g);
            h.iter().all(|&x| h.contains(&self.compose(self.compose(g, x), gi)))
        })
    }

    pub fn is_subgroup(&self, h: &[usize]) -> bool {
        h.contains(&self.identity) && h.iter().all(|&a| h.iter().all(|&b| h.contains(&self.compose(a, b))))
    }

    pub fn apply(&self, a: usize, x: &Ext<B>) -> Ext<B> {
        self.ext.substitute(x, &self.images[a])
    }

    /// `v(σ(x) - x)` for every σ; `None` marks `∞`.
    pub fn i_table_for(&self, x: &Ext<B>) -> Vec<Option<u32>> {
        (0..self.order()).map(|a| self.ext.valuation(&self.ext.sub(&self.apply(a, x), x))).collect()
    }

    fn check_uniformizer(&self, x: &Ext<B>) -> Result<()> {
        if self.ext.valuation(x) != Some(1) {
            return Err(Error::NotUniformizer);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<u32>,
    pub ext: Vec<String>,
    pub autos: Vec<Vec<String>>,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// `i(σ)` for every element, with the derived lower-numbering groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationFiltration {
    pub order: usize,
    pub i_table: Vec<Option<u32>>,
    /// `group_sizes[n] = |G_n|` for `n = 0..=last`, where `G_last` is trivial.
    pub group_sizes: Vec<usize>,
}

/// `φ(x) = -1 + (1/|G|) Σ_σ min(i(σ), x+1)`.
pub fn phi_of(i_table: &[Option<u32>], x: Q) -> Q {
    let n = i_table.len() as i64;
    let total: Q = i_table
        .iter()
        .map(|i| match i {
            None => x + 1,
            Some(v) => (x + 1).min(Q::from_integer(*v as i64)),
        })
        .sum();
    total / n - 1
}

fn ceil_nonneg(x: Q) -> usize {
    x.ceil().to_integer().max(0) as usize
}

impl RamificationFiltration {
    pub fn from_i_table(i_table: Vec<Option<u32>>) -> Self {
        let order = i_table.len();
        let top = i_table.iter().flatten().copied().max().unwrap_or(0) as usize;
        let group_sizes = (0..=top).map(|n| i_table.iter().filter(|i| i.is_none_or(|v| v as usize > n)).count()).collect();
        RamificationFiltration { order, i_table, group_sizes }
    }

    /// `|G_n|` for any `n ≥ 0`.
    pub fn size(&self, n: usize) -> usize {
        self.group_sizes.get(n).copied().unwrap_or(1)
    }

    /// Elements of `G_x = {σ : i(σ) ≥ x + 1}` for rational `x ≥ 0`.
    pub fn lower_group(&self, x: Q) -> Vec<usize> {
        let n = ceil_nonneg(x);
        (0..self.order).filter(|&a| self.i_table[a].is_none_or(|v| v as usize > n)).collect()
    }

    pub fn phi(&self, x: Q) -> Q {
        phi_of(&self.i_table, x)
    }

    /// `ψ = φ^{-1}`, exact on the breakpoint list.
    pub fn psi(&self, y: Q) -> Q {
        if y <= Q::from_integer(0) {
            return y;
        }
        let mut n = 0usize;
        loop {
            let a = self.phi(Q::from_integer(n as i64));
            let b = self.phi(Q::from_integer(n as i64 + 1));
            if y <= b {
                let slope = Q::new(self.order as i64, self.size(n + 1) as i64);
                return Q::from_integer(n as i64) + (y - a) * slope;
            }
            n += 1;
        }
    }

    /// `G^y = G_{ψ(y)}`.
    pub fn upper_group(&self, y: Q) -> Vec<usize> {
        self.lower_group(self.psi(y))
    }

    /// `n ≥ 0` with `G_n ≠ G_{n+1}`.
    pub fn jumps(&self) -> Vec<usize> {
        (0..self.group_sizes.len()).filter(|&n| self.size(n) != self.size(n + 1)).collect()
    }

    /// `(n, φ(n))` at every integer up to one past the last jump.
    pub fn phi_breaks(&self) -> Vec<(usize, Q)> {
        let last = self.jumps().last().copied().unwrap_or(0) + 1;
        (0..=last).map(|n| (n, self.phi(Q::from_integer(n as i64)))).collect()
    }
}

pub fn lower_numbering<B: LocalBase>(pres: &GaloisPresentation<B>) -> Result<RamificationFiltration> {
    let alpha = pres.ext.alpha();
    pres.check_uniformizer(&alpha)?;
    Ok(RamificationFiltration::from_i_table(pres.i_table_for(&alpha)))
}

/// Recomputes `i` with the uniformizer `α(1+α)` and compares.
pub fn uniformizer_independent<B: LocalBase>(pres: &GaloisPresentation<B>) -> Result<bool> {
    let ext = &pres.ext;
    let alpha = ext.alpha();
    let other = ext.mul(&alpha, &ext.add(&ext.one(), &alpha));
    pres.check_uniformizer(&other)?;
    Ok(pres.i_table_for(&alpha) == pres.i_table_for(&other))
}

/// Residue index of the coefficient of `α^v` in `x`, which must have valuation `≥ v`.
pub fn leading_residue<B: LocalBase>(ext: &EisensteinExtension<B>, x: &Ext<B>, v: u32) -> u64 {
    let r = ext.base();
    let e = ext.e() as u32;
    let (i, k) = ((v % e) as usize, v / e);
    // α^e ≡ -g_0 mod α^{e+1}, so α^{ek} contributes (-g_0/π)^k.
    let g0 = r.neg(&r.shift_down(&ext.defining_poly()[0], 1));
    let scale = r.inv(&r.pow(&g0, k as u64)).expect("Eisenstein constant term");
    r.residue_index(&r.mul(&r.shift_down(&x.coords[i], k), &scale))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    /// `θ_0(σ)` as residue indices, for every σ.
    pub theta0: Vec<u64>,
    /// For each `n ≥ 1` with `G_n` nontrivial, `θ_n(σ)` for σ in `G_n`.
    pub theta_n: Vec<(usize, Vec<(usize, u64)>)>,
    pub injective: bool,
    pub homomorphic: bool,
}

/// The maps `G_0/G_1 → k^×` and `G_n/G_{n+1} → k`, checked exhaustively.
pub fn theta_maps<B: LocalBase>(pres: &GaloisPresentation<B>, filt: &RamificationFiltration) -> ThetaReport {
    let ext = &pres.ext;
    let r = ext.base();
    let alpha = ext.alpha();
    let n = pres.order();
    let theta0: Vec<u64> = (0..n).map(|a| leading_residue(ext, &pres.images[a], 1)).collect();
    let mul_res = |x: u64, y: u64| r.residue_index(&r.mul(&r.lift_residue_index(x), &r.lift_residue_index(y)));
    let add_res = |x: u64, y: u64| r.residue_index(&r.add(&r.lift_residue_index(x), &r.lift_residue_index(y)));
    let g1 = filt.lower_group(Q::from_integer(1));
    let mut injective = (0..n).all(|a| (theta0[a] == 1) == g1.contains(&a));
    let mut homomorphic = (0..n).all(|a| (0..n).all(|b| theta0[pres.compose(a, b)] == mul_res(theta0[a], theta0[b])));
    let mut theta_n = Vec::new();
    for level in 1..filt.group_sizes.len() {
        let gn = filt.lower_group(Q::from_integer(level as i64));
        if gn.len() <= 1 {
            break;
        }
        let gnext = filt.lower_group(Q::from_integer(level as i64 + 1));
        let vals: Vec<(usize, u64)> = gn
            .iter()
            .map(|&a| (a, leading_residue(ext, &ext.sub(&pres.images[a], &alpha), level as u32 + 1)))
            .collect();
        let lookup: HashMap<usize, u64> = vals.iter().copied().collect();
        injective &= vals.iter().all(|&(a, t)| (t == 0) == gnext.contains(&a));
        homomorphic &= gn.iter().all(|&a| gn.iter().all(|&b| lookup[&pres.compose(a, b)] == add_res(lookup[&a], lookup[&b])));
        theta_n.push((level, vals));
    }
    ThetaReport { theta0, theta_n, injective, homomorphic }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    /// Cosets of H, each as element indices; the first contains the identity.
    pub cosets: Vec<Vec<usize>>,
    /// `i(σ̄)` by the average over the coset; `None` for the trivial class.
    pub i_quotient: Vec<Option<Q>>,
    pub i_direct_agrees: Option<bool>,
    /// `φ_G(n) = φ_{G/H}(φ_H(n))` at every tested integer.
    pub transitivity: bool,
    /// `G_n H/H = (G/H)_{φ_H(n)}` at every tested integer.
    pub herbrand: bool,
    pub tested_up_to: usize,
}

impl QuotientReport {
    pub fn pass(&self) -> bool {
        self.transitivity && self.herbrand && self.i_direct_agrees.unwrap_or(true)
    }
}

/// Quotient filtration of `G/H`, checked against Herbrand's theorem.
///
/// `direct` optionally gives a presentation of the fixed field of H together with
/// the image of each element of G in it, for an independent computation of `i(σ̄)`.
pub fn herbrand_quotient<B: LocalBase>(
    pres: &GaloisPresentation<B>,
    h: &[usize],
    direct: Option<(&GaloisPresentation<B>, &[usize])>,
    up_to: usize,
) -> Result<QuotientReport> {
    if !pres.is_subgroup(h) {
        return Err(Error::InvalidPresentation("H is not a subgroup".into()));
    }
    if !pres.is_normal(h) {
        return Err(Error::NotNormal);
    }
    let filt = lower_numbering(pres)?;
    let mut coset_of = vec![usize::MAX; pres.order()];
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<usize> = std::iter::once(pres.identity).chain(0..pres.order()).collect();
    reps.dedup();
    for g in reps {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let cos: Vec<usize> = h.iter().map(|&t| pres.compose(g, t)).collect();
        for &x in &cos {
            coset_of[x] = cosets.len();
        }
        cosets.push(cos);
    }
    let hsize = h.len() as i64;
    let i_quotient: Vec<Option<Q>> = cosets
        .iter()
        .map(|cos| {
            if cos.contains(&pres.identity) {
                None
            } else {
                let s: i64 = cos.iter().map(|&a| filt.i_table[a].expect("non-identity") as i64).sum();
                Some(Q::new(s, hsize))
            }
        })
        .collect();
    let i_direct_agrees = match direct {
        None => None,
        Some((sub, map)) => {
            let dfilt = lower_numbering(sub)?;
            Some(cosets.iter().zip(&i_quotient).all(|(cos, iq)| {
                let d = dfilt.i_table[map[cos[0]]].map(|v| Q::from_integer(v as i64));
                cos.iter().all(|&a| map[a] == map[cos[0]]) && d == *iq
            }))
        }
    };
    let h_table: Vec<Option<u32>> = h.iter().map(|&a| filt.i_table[a]).collect();
    let phi_q = |x: Q| -> Q {
        let n = cosets.len() as i64;
        let total: Q = i_quotient.iter().map(|i| i.map_or(x + 1, |v| (x + 1).min(v))).sum();
        total / n - 1
    };
    let mut transitivity = true;
    let mut herbrand = true;
    for n in 0..=up_to {
        let x = Q::from_integer(n as i64);
        let ph = phi_of(&h_table, x);
        transitivity &= filt.phi(x) == phi_q(ph);
        let mut image: Vec<usize> = filt.lower_group(x).iter().map(|&a| coset_of[a]).collect();
        image.sort_unstable();
        image.dedup();
        let quotient_group: Vec<usize> =
            (0..cosets.len()).filter(|&c| i_quotient[c].is_none_or(|v| v > ph)).collect();
        herbrand &= image == quotient_group;
    }
    Ok(QuotientReport { cosets, i_quotient, i_direct_agrees, transitivity, herbrand, tested_up_to: up_to })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HasseArfReport {
    pub abelian: bool,
    pub jumps: Vec<(usize, Q)>,
    pub integral: bool,
    /// `|G/G^m|` divides `(q-1) q^{m-1}` for every integer `m ≥ 1` up to the last upper jump.
    pub index_divides: bool,
    /// `e_0 = |G_0/G_1|` divides every jump `n ≥ 1`.
    pub tame_divides: bool,
}

impl HasseArfReport {
    pub fn pass(&self) -> bool {
        !self.abelian || (self.integral && self.index_divides && self.tame_divides)
    }
}

pub fn hasse_arf_check<B: LocalBase>(pres: &GaloisPresentation<B>, filt: &RamificationFiltration, q: u64) -> HasseArfReport {
    let abelian = pres.is_abelian();
    let jumps: Vec<(usize, Q)> = filt.jumps().into_iter().map(|n| (n, filt.phi(Q::from_integer(n as i64)))).collect();
    let integral = jumps.iter().all(|(_, y)| y.is_integer());
    let top = jumps.last().map_or(0, |(_, y)| y.ceil().to_integer()) + 1;
    let order = filt.order as u64;
    let index_divides = (1..=top.max(1)).all(|m| {
        let gm = filt.upper_group(Q::from_integer(m)).len() as u64;
        let bound = (q - 1) * q.pow(m as u32 - 1);
        bound.is_multiple_of(order / gm)
    });
    let e0 = (filt.size(0) / filt.size(1)) as u64;
    let tame_divides = jumps.iter().filter(|(n, _)| *n >= 1).all(|(n, _)| (*n as u64).is_multiple_of(e0));
    HasseArfReport { abelian, jumps, integral, index_divides, tame_divides }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SenReport {
    /// `(element, order, [i_0, i_1, ...])` for every σ in G_1 of p-power order.
    pub chains: Vec<(usize, usize, Vec<u32>)>,
    pub congruences: bool,
    pub powers: bool,
}

impl SenReport {
    pub fn pass(&self) -> bool {
        self.congruences && self.powers
    }
}

/// For σ ∈ G_1 of order p^k: `i_{j-1} ≡ i_j mod p^j` and `i(σ^a) = i_{v_p(a)}`.
pub fn sen_check<B: LocalBase>(pres: &GaloisPresentation<B>, filt: &RamificationFiltration, p: u64) -> SenReport {
    let g1 = filt.lower_group(Q::from_integer(1));
    let mut chains = Vec::new();
    let mut congruences = true;
    let mut powers = true;
    for &s in &g1 {
        if s == pres.identity {
            continue;
        }
        let ord = pres.element_order(s);
        let mut k = 0usize;
        let mut t = ord;
        while t.is_multiple_of(p as usize) {
            t /= p as usize;
            k += 1;
        }
        if t != 1 {
            continue;
        }
        let chain: Vec<u32> = (0..k)
            .map(|j| filt.i_table[pres.power(s, p.pow(j as u32) as usize)].expect("non-identity"))
            .collect();
        for j in 1..k {
            congruences &= (chain[j - 1] as i64 - chain[j] as i64).rem_euclid(p.pow(j as u32) as i64) == 0;
        }
        for a in 1..ord {
            let mut vp = 0usize;
            let mut b = a;
            while b % p as usize == 0 {
                b /= p as usize;
                vp += 1;
            }
            powers &= filt.i_table[pres.power(s, a)] == Some(chain[vp]);
        }
        chains.push((s, ord, chain));
    }
    SenReport { chains, congruences, powers }
}

/// For σ ∈ G_1 of order p, `v(Σ_{i<p} σ^i(x)) > v(x)` on random x.
pub fn wild_trace_check<B: LocalBase>(
    pres: &GaloisPresentation<B>,
    filt: &RamificationFiltration,
    p: usize,
    samples: usize,
    seed: u64,
) -> bool {
    let ext = &pres.ext;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = filt.lower_group(Q::from_integer(1));
    let sigmas: Vec<usize> = g1.into_iter().filter(|&s| s != pres.identity && pres.element_order(s) == p).collect();
    sigmas.iter().all(|&s| {
        (0..samples).all(|_| {
            let x = ext.random_elem(&mut rng);
            let Some(vx) = ext.valuation(&x) else { return true };
            let mut acc = ext.zero();
            let mut cur = x.clone();
            for _ in 0..p {
                acc = ext.add(&acc, &cur);
                cur = pres.apply(s, &cur);
            }
            ext.valuation(&acc).is_none_or(|v| v > vx || v >= ext.prec())
        })
    })
}

/// For a Lubin-Tate level: `i(σ_u) = q^{v_K(u-1)}` for every unit `u ≠ 1`.
pub fn lt_ramification_formula<B: LocalBase>(level: &TorsionLevel<B>, filt: &RamificationFiltration) -> bool {
    let base = level.f.ring().base();
    let q = base.q();
    level.units().enumerate().all(|(k, u)| {
        let d = base.sub(&u.a, &base.one());
        match base.valuation(&d).filter(|&v| (v as usize) < level.m) {
            None => filt.i_table[k].is_none(),
            Some(v) => filt.i_table[k] == Some(q.pow(v) as u32),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Zp;
    use crate::formal_group::LTPolynomial;
    use crate::torsion::build_level;
    use crate::unramified::UnramifiedRing;

    fn level(p: u32, prec: u32, m: usize) -> TorsionLevel<Zp> {
        let r = UnramifiedRing::new(Zp::new(p, prec).unwrap(), 1).unwrap();
        let f = LTPolynomial::standard(&r).unwrap();
        build_level(&f, m).unwrap()
    }

    #[test]
    fn zeta4_filtration() {
        let l = level(2, 10, 2);
        let pres = GaloisPresentation::from_level(&l).unwrap();
        let filt = lower_numbering(&pres).unwrap();
        assert_eq!(filt.i_table, vec![None, Some(2)]);
        assert_eq!(filt.size(1), 2);
        assert_eq!(filt.size(2), 1);
        assert_eq!(filt.phi(Q::from_integer(3)), Q::from_integer(2));
        let th = theta_maps(&pres, &filt);
        assert!(th.injective && th.homomorphic);
        assert_ne!(th.theta_n[0].1[1].1, 0);
    }

    #[test]
    fn lt_tower_p2_m3() {
        let l = level(2, 10, 3);
        let pres = GaloisPresentation::from_level(&l).unwrap();
        let filt = lower_numbering(&pres).unwrap();
        let sizes: Vec<usize> = (1..=7).map(|n| filt.size(n)).collect();
        assert_eq!(sizes, vec![4, 2, 2, 1, 1, 1, 1]);
        assert_eq!(filt.phi(Q::from_integer(7)), Q::from_integer(3));
        assert_eq!(filt.upper_group(Q::from_integer(3)).len(), 1);
        assert_eq!(filt.upper_group(Q::from_integer(2)), filt.lower_group(Q::from_integer(3)));
        assert_eq!(filt.upper_group(Q::from_integer(0)).len(), 4);
        assert_eq!(filt.jumps(), vec![1, 3]);
        assert!(lt_ramification_formula(&l, &filt));
        let ha = hasse_arf_check(&pres, &filt, 2);
        assert!(ha.pass(), "{ha:?}");
        assert!(sen_check(&pres, &filt, 2).pass());
        assert!(uniformizer_independent(&pres).unwrap());
        assert!(wild_trace_check(&pres, &filt, 2, 20, 1));
        let th = theta_maps(&pres, &filt);
        assert!(th.injective && th.homomorphic, "{th:?}");
    }

    #[test]
    fn quotient_by_one_plus_p2() {
        let l3 = level(2, 10, 3);
        let pres = GaloisPresentation::from_level(&l3).unwrap();
        let h: Vec<usize> = l3.units().enumerate().filter(|(_, u)| u.a % 4 == 1).map(|(k, _)| k).collect();
        let l2 = level(2, 10, 2);
        let sub = GaloisPresentation::from_level(&l2).unwrap();
        let map: Vec<usize> = l3.units().map(|u| l2.units().position(|w| w.a == u.a % 4).unwrap()).collect();
        let rep = herbrand_quotient(&pres, &h, Some((&sub, &map)), 8).unwrap();
        assert!(rep.pass(), "{rep:?}");
        let all: Vec<usize> = (0..pres.order()).collect();
        let triv = herbrand_quotient(&pres, &all, None, 8).unwrap();
        assert!(triv.pass());
        assert_eq!(triv.cosets.len(), 1);
    }

    #[test]
    fn tame_p3() {
        let l = level(3, 8, 1);
        let pres = GaloisPresentation::from_level(&l).unwrap();
        let filt = lower_numbering(&pres).unwrap();
        let th = theta_maps(&pres, &filt);
        assert!(th.injective && th.homomorphic);
        assert_eq!(th.theta0[1], 2);
        assert_eq!(filt.size(1), 1);
    }

    #[test]
    fn zeta8_fixture() {
        let j: PresentationJson = serde_json::from_str(ZETA8_JSON).unwrap();
        let r = UnramifiedRing::new(Zp::new(2, 8).unwrap(), 1).unwrap();
        let pres = GaloisPresentation::from_json(&r, &j).unwrap();
        let filt = lower_numbering(&pres).unwrap();
        assert_eq!(filt.i_table, vec![None, Some(2), Some(4), Some(2)]);
        assert_eq!(filt.jumps(), vec![1, 3]);
        let sen = sen_check(&pres, &filt, 2);
        assert!(sen.pass());
        assert!(sen.chains.iter().any(|(s, ord, c)| *s == 2 && *ord == 2 && c == &vec![4]));
    }

    #[test]
    fn trivial_group() {
        let l = level(2, 8, 1);
        let pres = GaloisPresentation::from_level(&l).unwrap();
        let filt = lower_numbering(&pres).unwrap();
        assert!(filt.jumps().is_empty());
        assert_eq!(filt.phi(Q::from_integer(5)), Q::from_integer(5));
        assert!(hasse_arf_check(&pres, &filt, 2).pass());
    }
}
