//! Named invariant suites over a fixture, run concurrently and merged by name.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artin::{
    bijectivity_check, check_characterization, check_homomorphism, cyclotomic_cross_check, independence_of_f,
    norm_compatibility_check, relative_tower, restriction_check,
};
use crate::base::{FqSeries, LocalBase, Zp};
use crate::coleman::{norm_group_membership, ColemanContext, ColemanSeries};
use crate::error::{Error, Result};
use crate::extension::{is_eisenstein, EisensteinExtension, ExtElement};
use crate::formal_group::{build_formal_group, build_hom, scalar_endo, LTPolynomial};
use crate::poly;
use crate::ramification::{
    hasse_arf_check, herbrand_quotient, lower_numbering, lt_ramification_formula, sen_check, theta_maps,
    uniformizer_independent, wild_trace_check, GaloisPresentation, PresentationJson, Q, ZETA4_JSON, ZETA8_JSON,
};
use crate::ring::Ring;
use crate::series::{working_prec, TruncatedSeries};
use crate::torsion::{build_level, residue_index, TorsionLevel};
use crate::unramified::UnramifiedRing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Axioms,
    ModuleLaw,
    Torsion,
    Coleman,
    Norms,
    Ramification,
    Artin,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = ["axioms", "module-law", "torsion", "coleman", "norms", "ramification", "artin", "all"];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "axioms" => Suite::Axioms,
            "module-law" => Suite::ModuleLaw,
            "torsion" => Suite::Torsion,
            "coleman" => Suite::Coleman,
            "norms" => Suite::Norms,
            "ramification" => Suite::Ramification,
            "artin" => Suite::Artin,
            "all" => Suite::All,
            _ => return Err(Error::InvalidConfig(format!("unknown suite `{s}`"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = Suite::NAMES.iter().position(|n| n.parse::<Suite>().ok() == Some(*self)).unwrap_or(7);
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FSpec {
    /// `πX + X^q`.
    Standard,
    /// `(1+X)^p - 1`; only for Q_p.
    Cyclotomic,
    /// Coefficient literals of `X, X^2, ..., X^q`.
    Coeffs(Vec<String>),
}

impl FSpec {
    pub fn build<B: LocalBase>(&self, r: &UnramifiedRing<B>) -> Result<LTPolynomial<B>> {
        match self {
            FSpec::Standard => LTPolynomial::standard(r),
            FSpec::Cyclotomic => LTPolynomial::cyclotomic(r),
            FSpec::Coeffs(c) => {
                let mut coeffs = vec![r.zero()];
                for lit in c {
                    coeffs.push(r.parse_elem(lit)?);
                }
                LTPolynomial::new(r, coeffs)
            }
        }
    }
}

impl FromStr for FSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cyclotomic" => Ok(FSpec::Cyclotomic),
            "standard" => Ok(FSpec::Standard),
            list => {
                let c: Vec<String> = list.split(',').map(|x| x.trim().to_string()).collect();
                if c.iter().any(|x| x.is_empty()) {
                    return Err(Error::Parse(format!("bad coefficient list `{list}`")));
                }
                Ok(FSpec::Coeffs(c))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub label: String,
    pub p: u32,
    /// `true` for F_p((t)), `false` for Q_p.
    pub char_p: bool,
    pub n: usize,
    pub prec: u32,
    pub deg: usize,
    pub m: usize,
    pub f: FSpec,
    pub seed: u64,
    pub samples: usize,
}

impl Fixture {
    pub fn new(label: &str, p: u32, char_p: bool, n: usize, m: usize, f: FSpec) -> Self {
        Fixture { label: label.into(), p, char_p, n, prec: 8, deg: 6, m, f, seed: 0, samples: 20 }
    }
}

/// The fixture set behind `verify --suite all` without an explicit field.
pub fn default_fixtures(seed: u64) -> Vec<Fixture> {
    let mut v = vec![
        Fixture::new("Q2", 2, false, 1, 3, FSpec::Standard),
        Fixture::new("Q2-cyclotomic", 2, false, 1, 3, FSpec::Cyclotomic),
        Fixture::new("Q3", 3, false, 1, 2, FSpec::Standard),
        Fixture::new("Q5", 5, false, 1, 1, FSpec::Standard),
        Fixture::new("F2((t))", 2, true, 1, 2, FSpec::Standard),
        Fixture::new("Q4-unramified", 2, false, 2, 1, FSpec::Standard),
    ];
    for f in &mut v {
        f.seed = seed;
    }
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub fixture: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub millis: u64,
}

/// The generator behind every sampled check; `salt` separates the streams.
pub fn seeded_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

type Check<'a> = (String, Box<dyn Fn() -> Result<(bool, String)> + Send + Sync + 'a>);

fn item<'a>(name: impl Into<String>, f: impl Fn() -> Result<(bool, String)> + Send + Sync + 'a) -> Check<'a> {
    (name.into(), Box::new(f))
}

fn run_checks(fixture: &str, checks: Vec<Check<'_>>) -> Vec<CheckResult> {
    let mut out: Vec<CheckResult> = checks
        .into_par_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult { fixture: fixture.into(), name, pass, detail, millis: t.elapsed().as_millis() as u64 }
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Runs `suite` on one fixture.
pub fn run_fixture(fx: &Fixture, suite: Suite) -> Result<Vec<CheckResult>> {
    if fx.n == 0 || fx.m == 0 {
        return Err(Error::InvalidConfig("n and m must be at least 1".into()));
    }
    if fx.char_p {
        let mut ctx = Fx::new(fx, FqSeries::new(fx.p, 1, fx.prec)?)?;
        ctx.prepare(suite)?;
        Ok(run_checks(&fx.label, ctx.checks(suite)))
    } else {
        let mut ctx = Fx::new(fx, Zp::new(fx.p, fx.prec)?)?;
        ctx.prepare(suite)?;
        let mut checks = zp_checks(&ctx, suite);
        checks.extend(ctx.checks(suite));
        Ok(run_checks(&fx.label, checks))
    }
}

/// Runs `suite` on every fixture, in order.
pub fn run_all(fixtures: &[Fixture], suite: Suite) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for fx in fixtures {
        out.extend(run_fixture(fx, suite)?);
    }
    Ok(out)
}

struct Fx<'a, B: LocalBase> {
    cfg: &'a Fixture,
    ring: UnramifiedRing<B>,
    f: LTPolynomial<B>,
    /// The same polynomial lifted to `working_prec`.
    wring: UnramifiedRing<B>,
    wf: LTPolynomial<B>,
    levels: Vec<TorsionLevel<B>>,
}

fn fail_count(name: &str, failures: usize, total: usize) -> (bool, String) {
    (failures == 0, format!("{name}: {} of {total} passed", total - failures))
}

impl<'a, B: LocalBase> Fx<'a, B> {
    fn new(cfg: &'a Fixture, base: B) -> Result<Self> {
        let ring = UnramifiedRing::new(base, cfg.n)?;
        let f = cfg.f.build(&ring)?;
        let wp = working_prec(cfg.prec, ring.q(), cfg.deg);
        let wring = ring.with_prec(wp)?;
        let wf = LTPolynomial::new(&wring, f.coeffs().iter().map(|c| wring.lift_from(&ring, c)).collect())?;
        Ok(Fx { cfg, ring, f, wring, wf, levels: Vec::new() })
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        seeded_rng(self.cfg.seed, salt)
    }

    fn level(&self, k: usize) -> &TorsionLevel<B> {
        &self.levels[k - 1]
    }

    fn prepare(&mut self, suite: Suite) -> Result<()> {
        let needs_levels = [Suite::Torsion, Suite::Coleman, Suite::Norms, Suite::Ramification, Suite::Artin]
            .iter()
            .any(|s| suite.includes(*s));
        if needs_levels {
            self.levels = (1..=self.cfg.m).into_par_iter().map(|k| build_level(&self.f, k)).collect::<Result<_>>()?;
        }
        Ok(())
    }

    fn checks(&self, suite: Suite) -> Vec<Check<'_>> {
        let mut checks = Vec::new();
        if suite.includes(Suite::Axioms) {
            checks.extend(self.axioms());
        }
        if suite.includes(Suite::ModuleLaw) {
            checks.extend(self.module_law());
        }
        if suite.includes(Suite::Torsion) {
            checks.extend(self.torsion());
        }
        if suite.includes(Suite::Coleman) {
            checks.extend(self.coleman());
        }
        if suite.includes(Suite::Norms) {
            checks.extend(self.norms());
        }
        if suite.includes(Suite::Ramification) {
            checks.extend(self.ramification());
        }
        if suite.includes(Suite::Artin) {
            checks.extend(self.artin());
        }
        checks
    }

    fn axioms(&self) -> Vec<Check<'_>> {
        let d = self.cfg.deg;
        let r = &self.ring;
        let group = move || build_formal_group(&self.f, d);
        let mut v = vec![
            item("axioms.linear-term", move || {
                let g = group()?;
                let ok = r.is_one(&g.series.coeff(&[1, 0, 0]))
                    && r.is_one(&g.series.coeff(&[0, 1, 0]))
                    && r.is_zero(&g.series.coeff(&[0, 0, 0]));
                Ok((ok, "F ≡ X + Y mod deg 2".into()))
            }),
            item("axioms.commutativity", move || {
                let g = group()?;
                let x = TruncatedSeries::var(r, 2, d, 0)?;
                let y = TruncatedSeries::var(r, 2, d, 1)?;
                Ok((g.series.compose(&[y, x])? == g.series, format!("F(Y,X) = F(X,Y) mod deg {}", d + 1)))
            }),
            item("axioms.identity", move || {
                let g = group()?;
                let x = TruncatedSeries::var(r, 2, d, 0)?;
                let y = TruncatedSeries::var(r, 2, d, 1)?;
                let z = TruncatedSeries::zero(r, 2, d)?;
                let ok = g.series.compose(&[x.clone(), z.clone()])? == x && g.series.compose(&[z, y.clone()])? == y;
                Ok((ok, "F(X,0) = X and F(0,Y) = Y".into()))
            }),
            item("axioms.associativity", move || {
                let g = group()?;
                let vars: Vec<_> = (0..3).map(|i| TruncatedSeries::var(r, 3, d, i)).collect::<Result<_>>()?;
                let xy = g.series.compose(&[vars[0].clone(), vars[1].clone()])?;
                let yz = g.series.compose(&[vars[1].clone(), vars[2].clone()])?;
                let ok = g.series.compose(&[xy, vars[2].clone()])? == g.series.compose(&[vars[0].clone(), yz])?;
                Ok((ok, "F(F(X,Y),Z) = F(X,F(Y,Z))".into()))
            }),
        ];
        if self.cfg.f == FSpec::Cyclotomic {
            v.push(item("axioms.multiplicative-group", move || {
                let g = group()?;
                let terms: Vec<_> = g.series.terms().into_iter().map(|(e, c)| (e, r.fmt_coords(&c))).collect();
                let want = vec![([0, 1, 0], "[1]".to_string()), ([1, 0, 0], "[1]".to_string()), ([1, 1, 0], "[1]".to_string())];
                let mut got = terms.clone();
                got.sort();
                Ok((got == want, format!("{} nonzero terms", terms.len())))
            }));
        }
        v
    }

    /// Sampled `a, b ∈ O_K` at the working precision.
    fn sample_pairs(&self, salt: u64) -> Vec<(B::Elem, B::Elem)> {
        let mut rng = self.rng(salt);
        (0..self.cfg.samples)
            .map(|_| (self.wring.random_base_elem(&mut rng), self.wring.random_base_elem(&mut rng)))
            .collect()
    }

    fn module_law(&self) -> Vec<Check<'_>> {
        let d = self.cfg.deg;
        let (r, wr, wf) = (&self.ring, &self.wring, &self.wf);
        let endo = move |a: &B::Elem| scalar_endo(&wr.embed(a), wf, d).map(|h| h.series);
        vec![
            item("module-law.additive", move || {
                let g = build_formal_group(wf, d)?;
                let pairs = self.sample_pairs(1);
                let mut bad = 0;
                for (a, b) in &pairs {
                    let lhs = endo(&wr.base().add(a, b))?;
                    let rhs = g.series.compose(&[endo(a)?, endo(b)?])?;
                    bad += usize::from(lhs.coerce_to(r) != rhs.coerce_to(r));
                }
                Ok(fail_count("[a+b] = [a] +_F [b]", bad, pairs.len()))
            }),
            item("module-law.multiplicative", move || {
                let pairs = self.sample_pairs(2);
                let mut bad = 0;
                for (a, b) in &pairs {
                    let lhs = endo(&wr.base().mul(a, b))?;
                    let rhs = endo(a)?.compose(&[endo(b)?])?;
                    bad += usize::from(lhs.coerce_to(r) != rhs.coerce_to(r));
                }
                Ok(fail_count("[ab] = [a]∘[b]", bad, pairs.len()))
            }),
            item("module-law.uniformizer", move || {
                let h = build_hom(wf.pi_elem(), wf, &wf.frobenius(1), d)?;
                let fs = wf.as_series(1, 0, d)?;
                Ok((h.series.coerce_to(r) == fs.coerce_to(r), "[π]_{f,f^φ} = f".into()))
            }),
        ]
    }

    fn torsion(&self) -> Vec<Check<'_>> {
        let mut v = Vec::new();
        let q = self.ring.q();
        for k in 1..=self.cfg.m {
            v.push(item(format!("torsion.count.m{k}"), move || {
                let l = self.level(k);
                let ext = &l.ext;
                let distinct: HashSet<_> = l.points.iter().map(|p| &p.point).collect();
                let roots = l.points.iter().all(|p| ext.is_zero(&ext.eval_base_poly(&l.fm, &p.point)));
                let want = q.pow(k as u32) as usize;
                let deriv = poly::derivative(l.f.ring(), &l.fm);
                let sep = ext.valuation(&ext.eval_base_poly(&deriv, &l.alpha)).is_some();
                Ok((
                    distinct.len() == want && roots && sep,
                    format!("{} distinct roots of f_{k}, expected {want}", distinct.len()),
                ))
            }));
            v.push(item(format!("torsion.eisenstein.m{k}"), move || {
                let l = self.level(k);
                let g = l.ext.defining_poly();
                let deg = (q - 1) * q.pow(k as u32 - 1);
                let ok = is_eisenstein(l.f.ring(), g) && g.len() as u64 == deg + 1;
                Ok((ok, format!("g_{k} Eisenstein of degree {}", g.len() - 1)))
            }));
            v.push(item(format!("torsion.constant-term.m{k}"), move || {
                let l = self.level(k);
                let ext = &l.ext;
                let prod = l.units().fold(ext.one(), |acc, p| ext.mul(&acc, &ext.neg(&p.point)));
                let want = ext.embed(l.f.frobenius(k as i64 - 1).pi_elem());
                Ok((prod == want, "∏(-α) = π^{φ^{m-1}}".into()))
            }));
            v.push(item(format!("torsion.module.m{k}"), move || self.torsion_module(k)));
        }
        v
    }

    fn torsion_module(&self, k: usize) -> Result<(bool, String)> {
        let l = self.level(k);
        let ext = &l.ext;
        let r = l.f.ring();
        let base = r.base();
        let g = build_formal_group(&self.f, ext.prec() as usize - 1)?;
        let mut rng = self.rng(10 + k as u64);
        let n = l.points.len();
        let mut bad = 0;
        let samples = self.cfg.samples.min(n * n);
        for _ in 0..samples {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (a, b) = (&l.points[i], &l.points[j]);
            let sum = eval_bivariate(ext, &g.series, &a.point, &b.point);
            let want = residue_index(base, k, &base.add(&a.a, &b.a)) as usize;
            bad += usize::from(l.locate(&sum) != Some(want));
            let c = &l.points[rng.gen_range(0..n)].a;
            let image = ext.substitute(&a.point, &l.points[residue_index(base, k, c) as usize].point);
            let want = residue_index(base, k, &base.mul(c, &a.a)) as usize;
            bad += usize::from(base.is_unit(c) && l.locate(&image) != Some(want));
        }
        Ok(fail_count("α_a +_F α_b = α_{a+b}, σ_c(α_a) = α_{ca}", bad, 2 * samples))
    }

    fn random_unit_poly(&self, rng: &mut ChaCha8Rng) -> ColemanSeries<B> {
        ColemanSeries::random_unit(&self.ring, 2, rng)
    }

    fn coleman(&self) -> Vec<Check<'_>> {
        let m = self.cfg.m;
        let r = &self.ring;
        vec![
            item("coleman.frobenius-congruence", move || {
                let ctx = ColemanContext::for_levels(&self.f, 1, 3)?;
                let mut rng = self.rng(20);
                let mut bad = 0;
                for _ in 0..self.cfg.samples {
                    let g = self.random_unit_poly(&mut rng);
                    let n = ctx.coleman_n(&g, 3)?;
                    bad += usize::from(!(0..n.coeffs.len()).all(|k| {
                        let d = r.sub(&n.coeffs[k], &r.frobenius(&g.coeff(r, k), 1));
                        r.valuation(&d).is_none_or(|v| v >= 1)
                    }));
                }
                Ok(fail_count("N(g) ≡ g^φ mod π", bad, self.cfg.samples))
            }),
            item("coleman.multiplicative", move || {
                let ctx = ColemanContext::for_levels(&self.f, 1, 3)?;
                let mut rng = self.rng(21);
                let mut bad = 0;
                for _ in 0..self.cfg.samples {
                    let (g1, g2) = (self.random_unit_poly(&mut rng), self.random_unit_poly(&mut rng));
                    let prod = ColemanSeries::polynomial(poly::mul(r, &g1.coeffs, &g2.coeffs));
                    let (a, b, c) = (ctx.coleman_n(&g1, 3)?, ctx.coleman_n(&g2, 3)?, ctx.coleman_n(&prod, 3)?);
                    bad += usize::from(!poly::eq(r, &poly::mul_trunc(r, &a.coeffs, &b.coeffs, Some(3)), &c.coeffs));
                }
                Ok(fail_count("N(g_1 g_2) = N(g_1) N(g_2)", bad, self.cfg.samples))
            }),
            item(format!("coleman.iterates.m{m}"), move || self.coleman_iterates(m)),
        ]
    }

    /// `N^k(g) ≡ N^{k-1}(g)^φ mod π^k` and `u_k/u_{k-1} = N_{L'/L}(g(α))` for `k ≤ m`.
    fn coleman_iterates(&self, m: usize) -> Result<(bool, String)> {
        let r = &self.ring;
        let ctx = ColemanContext::for_levels(&self.f, m, 1)?;
        let mut rng = self.rng(22);
        let (mut cong_bad, mut dual_bad) = (0, 0);
        for _ in 0..self.cfg.samples {
            let g = self.random_unit_poly(&mut rng);
            let (iterates, caps) = ctx.iterates(&g, m, 1)?;
            let cong = ctx.iterate_congruences(&iterates, &caps);
            for k in 1..=m {
                cong_bad += usize::from(!cong[k - 1]);
                let l = self.level(k);
                let ga = crate::torsion::eval_series_at(&l.ext, &g.coeffs, &l.alpha);
                let dual = l.norm_rel(&ga)?;
                let (uk, uk1) = (iterates[k].constant_term(r), iterates[k - 1].constant_term(r));
                dual_bad += usize::from(r.mul(&dual, &uk1) != uk);
            }
        }
        let total = self.cfg.samples * m;
        Ok((
            cong_bad == 0 && dual_bad == 0,
            format!(
                "N^k(g)/N^(k-1)(g)^φ ≡ 1 mod π^k: {} of {total}; u_k/u_(k-1) = conjugate product: {} of {total}",
                total - cong_bad,
                total - dual_bad
            ),
        ))
    }

    fn norms(&self) -> Vec<Check<'_>> {
        (1..=self.cfg.m)
            .map(|k| {
                item(format!("norms.group.m{k}"), move || {
                    let r = &self.ring;
                    let x = r.field_norm(self.f.pi());
                    let rep = norm_group_membership(&x, self.level(k), self.cfg.samples, self.cfg.seed ^ k as u64)?;
                    Ok((
                        rep.pass(),
                        format!(
                            "{} of {} unit norms in 1+π^{k}; N(-α) = x: {}",
                            rep.samples - rep.unit_failures,
                            rep.samples,
                            rep.uniformizer_norm_ok
                        ),
                    ))
                })
            })
            .collect()
    }

    fn ramification(&self) -> Vec<Check<'_>> {
        let mut v = Vec::new();
        let q = self.ring.q();
        let p = self.ring.p() as u64;
        for k in 1..=self.cfg.m {
            let pres = move || GaloisPresentation::from_level(self.level(k));
            v.push(item(format!("ramification.lower.m{k}"), move || {
                let pr = pres()?;
                let filt = lower_numbering(&pr)?;
                let top = filt.phi(Q::from_integer(q.pow(k as u32) as i64 - 1));
                let upper_trivial = filt.upper_group(Q::from_integer(k as i64)).len() == 1;
                let slopes = (1..filt.group_sizes.len()).all(|n| {
                    let d = filt.phi(Q::from_integer(n as i64)) - filt.phi(Q::from_integer(n as i64 - 1));
                    d == Q::new(filt.size(n) as i64, filt.order as i64)
                });
                let ok = lt_ramification_formula(self.level(k), &filt)
                    && top == Q::from_integer(k as i64)
                    && upper_trivial
                    && slopes;
                Ok((ok, format!("sizes {:?}, φ(q^m-1) = {top}, jumps {:?}", filt.group_sizes, filt.jumps())))
            }));
            v.push(item(format!("ramification.hasse-arf.m{k}"), move || {
                let pr = pres()?;
                let filt = lower_numbering(&pr)?;
                let ha = hasse_arf_check(&pr, &filt, q);
                Ok((ha.pass() && ha.abelian, format!("jumps {:?}", ha.jumps)))
            }));
            v.push(item(format!("ramification.sen.m{k}"), move || {
                let pr = pres()?;
                let filt = lower_numbering(&pr)?;
                let s = sen_check(&pr, &filt, p);
                Ok((s.pass(), format!("{} cyclic p-power elements", s.chains.len())))
            }));
            v.push(item(format!("ramification.theta.m{k}"), move || {
                let pr = pres()?;
                let filt = lower_numbering(&pr)?;
                let t = theta_maps(&pr, &filt);
                Ok((t.injective && t.homomorphic, format!("{} graded pieces", t.theta_n.len() + 1)))
            }));
            v.push(item(format!("ramification.uniformizer-choice.m{k}"), move || {
                Ok((uniformizer_independent(&pres()?)?, "α and α(1+α) give the same i".into()))
            }));
            v.push(item(format!("ramification.wild-trace.m{k}"), move || {
                let pr = pres()?;
                let filt = lower_numbering(&pr)?;
                Ok((wild_trace_check(&pr, &filt, p as usize, 20, self.cfg.seed), "v(Σσ^i x) > v(x)".into()))
            }));
            if k >= 2 {
                v.push(item(format!("ramification.herbrand.m{k}"), move || {
                    let (upper, lower) = (self.level(k), self.level(k - 1));
                    let pr = GaloisPresentation::from_level(upper)?;
                    let sub = GaloisPresentation::from_level(lower)?;
                    let base = upper.f.ring().base();
                    let units: Vec<_> = upper.units().collect();
                    let h: Vec<usize> = (0..units.len())
                        .filter(|&i| residue_index(base, k - 1, &units[i].a) == 1)
                        .collect();
                    let low_units: Vec<_> = lower.units().collect();
                    let map: Vec<usize> = units
                        .iter()
                        .map(|u| {
                            let idx = residue_index(base, k - 1, &u.a);
                            low_units.iter().position(|w| w.index == idx).expect("unit")
                        })
                        .collect();
                    let rep = herbrand_quotient(&pr, &h, Some((&sub, &map)), q.pow(k as u32) as usize)?;
                    Ok((rep.pass(), format!("|H| = {}, tested n ≤ {}", h.len(), rep.tested_up_to)))
                }));
            }
        }
        v
    }

    fn artin(&self) -> Vec<Check<'_>> {
        let m = self.cfg.m;
        let r = &self.ring;
        let base = r.base();
        let mut v = Vec::new();
        if self.cfg.n == 1 {
            v.push(item(format!("artin.homomorphism.m{m}"), move || {
                let l = self.level(m);
                let units: Vec<_> = l.units().map(|u| u.a.clone()).collect();
                let mut pairs: Vec<(B::Elem, B::Elem)> = Vec::new();
                if units.len() * units.len() <= 64 {
                    for a in &units {
                        for b in &units {
                            pairs.push((a.clone(), b.clone()));
                        }
                    }
                } else {
                    let mut rng = self.rng(30);
                    for _ in 0..self.cfg.samples {
                        pairs.push((
                            units[rng.gen_range(0..units.len())].clone(),
                            units[rng.gen_range(0..units.len())].clone(),
                        ));
                    }
                }
                let pi = base.uniformizer();
                pairs.push((pi.clone(), units[units.len() - 1].clone()));
                let mut bad = 0;
                for (a, b) in &pairs {
                    let rep = check_homomorphism(&r.field_from_base(a), &r.field_from_base(b), l)?;
                    bad += usize::from(!rep.pass());
                }
                Ok(fail_count("Art(x)Art(y) = Art(xy)", bad, pairs.len()))
            }));
            v.push(item(format!("artin.bijectivity.m{m}"), move || {
                let (count, distinct) = bijectivity_check(self.level(m))?;
                Ok((distinct, format!("{count} descriptors pairwise distinct: {distinct}")))
            }));
            v.push(item(format!("artin.unit-action.m{m}"), move || {
                let l = self.level(m);
                let mut bad = 0;
                let mut total = 0;
                for u in l.units() {
                    let d = crate::artin::artin_apply(&r.field_from_base(&u.a), l)?;
                    let perm = d.permutation.ok_or_else(|| Error::Unsupported("twisted".into()))?;
                    for (p, (_, img)) in l.points.iter().zip(&perm) {
                        total += 1;
                        bad += usize::from(residue_index(base, m, &base.mul(&u.a, &p.a)) != *img);
                    }
                }
                Ok(fail_count("Art(u) acts as a ↦ ua", bad, total))
            }));
            v.push(item("artin.uniformizer-fixes", move || {
                let rep = check_characterization(&base.uniformizer(), self.level(m))?;
                Ok((rep.pass(), format!("{} of {} points fixed", rep.fixed_points, rep.total_points)))
            }));
            if m >= 2 {
                v.push(item(format!("artin.restriction.m{m}"), move || {
                    let (lo, hi) = (self.level(m - 1), self.level(m));
                    let mut bad = 0;
                    let xs: Vec<_> = hi.units().map(|u| u.a.clone()).chain([base.uniformizer()]).collect();
                    for x in &xs {
                        bad += usize::from(!restriction_check(&r.field_from_base(x), lo, hi)?);
                    }
                    Ok(fail_count("level m+1 restricts to level m", bad, xs.len()))
                }));
            }
            if r.q() > 2 {
                v.push(item("artin.independence-of-f", move || {
                    let mut c = self.f.coeffs().to_vec();
                    c[2] = r.add(&c[2], self.f.pi_elem());
                    let f2 = LTPolynomial::new(r, c)?;
                    Ok((independence_of_f(self.level(m), &f2)?, "ρ_f = ρ_f' for f' = f + πX^2".into()))
                }));
            }
        }
        v.push(item("artin.relative-characterization", move || {
            let x = base.mul_pi_pow(&base.from_i64(1), 2);
            let level = relative_tower(base, &x, 1)?;
            let rep = check_characterization(&x, &level)?;
            Ok((rep.pass(), format!("n = {}, {} of {} points fixed", rep.n, rep.fixed_points, rep.total_points)))
        }));
        v.push(item("artin.base-change", move || {
            let l = UnramifiedRing::new(base.clone(), 2)?;
            let w = l.add(&l.one(), &l.mul_pi_pow(&l.y(), 1));
            let x = l.field_mul(&l.field_uniformizer(), &l.field_from_ring(&w));
            let rep = norm_compatibility_check(&l, &x, 1)?;
            Ok((rep.pass(), format!("{rep:?}")))
        }));
        v
    }
}

/// `F(x, y)` for a two-variable series at points of positive valuation.
pub fn eval_bivariate<B: LocalBase>(
    ext: &EisensteinExtension<B>,
    series: &TruncatedSeries<UnramifiedRing<B>>,
    x: &ExtElement<B::Elem>,
    y: &ExtElement<B::Elem>,
) -> ExtElement<B::Elem> {
    let d = series.deg_cap();
    let powers = |z: &ExtElement<B::Elem>| {
        let mut out = vec![ext.one()];
        for _ in 0..d {
            out.push(ext.mul(out.last().expect("nonempty"), z));
        }
        out
    };
    let (px, py) = (powers(x), powers(y));
    series.terms().into_iter().fold(ext.zero(), |acc, (e, c)| {
        let t = ext.scale(&c, &ext.mul(&px[e[0] as usize], &py[e[1] as usize]));
        ext.add(&acc, &t)
    })
}

fn zp_checks<'a>(fx: &'a Fx<'a, Zp>, suite: Suite) -> Vec<Check<'a>> {
    let mut v = Vec::new();
    if suite.includes(Suite::Artin) && fx.cfg.n == 1 {
        v.push(item(format!("artin.cyclotomic.m{}", fx.cfg.m), move || {
            let level = build_level(&LTPolynomial::cyclotomic(&fx.ring)?, fx.cfg.m)?;
            let (n, ok) = cyclotomic_cross_check(&level)?;
            Ok((ok, format!("{n} points match ζ ↦ ζ^u")))
        }));
    }
    if suite.includes(Suite::Ramification) && fx.cfg.p == 2 && fx.cfg.n == 1 {
        v.push(item("ramification.zeta8-fixture", move || {
            let r = UnramifiedRing::new(Zp::new(2, 8)?, 1)?;
            let j8: PresentationJson = serde_json::from_str(ZETA8_JSON).map_err(|e| Error::Parse(e.to_string()))?;
            let j4: PresentationJson = serde_json::from_str(ZETA4_JSON).map_err(|e| Error::Parse(e.to_string()))?;
            let g = GaloisPresentation::from_json(&r, &j8)?;
            let sub = GaloisPresentation::from_json(&r, &j4)?;
            let filt = lower_numbering(&g)?;
            let h = vec![0, 2];
            let map = vec![0, 1, 0, 1];
            let rep = herbrand_quotient(&g, &h, Some((&sub, &map)), 8)?;
            let ha = hasse_arf_check(&g, &filt, 2);
            let ok = rep.pass() && ha.pass() && filt.jumps() == vec![1, 3];
            Ok((ok, format!("jumps {:?}, i(σ̄) {:?}", filt.jumps(), rep.i_quotient)))
        }));
    }
    v
}

/// `(passed, total)`.
pub fn tally(results: &[CheckResult]) -> (usize, usize) {
    (results.iter().filter(|r| r.pass).count(), results.len())
}
