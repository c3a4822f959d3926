//! Subcommand bodies. Each renders JSON or TSV and reports whether its checks held.

use std::io::Read;
use std::path::Path;

use lubin_tate::artin::artin_apply;
use lubin_tate::coleman::{ColemanContext, ColemanSeries};
use lubin_tate::extension::ExtElement;
use lubin_tate::formal_group::{build_formal_group, LTPolynomial};
use lubin_tate::ramification::{
    hasse_arf_check, lower_numbering, GaloisPresentation, PresentationJson, Q, ZETA4_JSON, ZETA8_JSON,
};
use lubin_tate::series::SeriesJson;
use lubin_tate::torsion::{build_level, eval_series_at};
use lubin_tate::verify::{default_fixtures, run_all, seeded_rng, FSpec, Fixture, Suite};
use lubin_tate::{FqSeries, LocalBase, Ring, UnramifiedRing, Zp};
use serde::Serialize;

use crate::config::{Output, RunConfig};
use crate::{CliError, Report};

/// Coefficient cap of the last Coleman iterate printed by `coleman`.
const COLEMAN_CAP: usize = 2;

pub trait Task {
    fn run<B: LocalBase>(&self, cfg: &RunConfig, ring: UnramifiedRing<B>) -> Result<Report, CliError>;
}

/// Builds `O_L/π^N` over Q_p or F_p((t)) and runs `task` on it.
pub fn dispatch(cfg: &RunConfig, task: impl Task) -> Result<Report, CliError> {
    if cfg.char_p {
        task.run(cfg, UnramifiedRing::new(FqSeries::new(cfg.p, 1, cfg.prec)?, cfg.n)?)
    } else {
        task.run(cfg, UnramifiedRing::new(Zp::new(cfg.p, cfg.prec)?, cfg.n)?)
    }
}

fn json<T: Serialize>(value: &T, ok: bool) -> Result<Report, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    Ok(Report { text, ok })
}

fn lt_poly<B: LocalBase>(cfg: &RunConfig, ring: &UnramifiedRing<B>) -> Result<LTPolynomial<B>, CliError> {
    Ok(cfg.f.parse::<FSpec>()?.build(ring)?)
}

fn coords<B: LocalBase>(ring: &UnramifiedRing<B>, x: &ExtElement<B::Elem>) -> Vec<String> {
    x.coords.iter().map(|c| ring.fmt_coords(c)).collect()
}

pub struct Fgroup;

#[derive(Serialize)]
struct FgroupOut<'a> {
    command: &'static str,
    config: &'a RunConfig,
    f: String,
    group_law: SeriesJson,
    axioms: bool,
}

impl Task for Fgroup {
    fn run<B: LocalBase>(&self, cfg: &RunConfig, ring: UnramifiedRing<B>) -> Result<Report, CliError> {
        let f = lt_poly(cfg, &ring)?;
        let group = build_formal_group(&f, cfg.deg)?;
        let axioms = group.check_axioms()?;
        let law = group.series.to_json();
        match cfg.output {
            Output::Json => json(&FgroupOut { command: "fgroup", config: cfg, f: f.display(), group_law: law, axioms }, axioms),
            Output::Tsv => {
                let mut text = format!("{}\n# axioms={axioms}\ni\tj\tcoeff\n", cfg.header("fgroup"));
                for t in &law.terms {
                    text.push_str(&format!("{}\t{}\t{}\n", t.exp[0], t.exp[1], t.coeff));
                }
                Ok(Report { text, ok: axioms })
            }
        }
    }
}

#[derive(Serialize)]
struct CheckOut {
    fixture: String,
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    command: &'static str,
    config: &'a RunConfig,
    suite: String,
    fixtures: Vec<Fixture>,
    passed: usize,
    failed: usize,
    results: Vec<CheckOut>,
}

/// With an explicit field the config is the only fixture; otherwise the default set.
pub fn verify(cfg: &RunConfig, suite: Suite, explicit_field: bool) -> Result<Report, CliError> {
    let fixtures = if explicit_field {
        let field = if cfg.char_p { format!("F{}((t))", cfg.p) } else { format!("Q{}", cfg.p) };
        let label = if cfg.n > 1 { format!("{field}-n{}", cfg.n) } else { field };
        let mut fx = Fixture::new(&label, cfg.p, cfg.char_p, cfg.n, cfg.m, cfg.f.parse()?);
        fx.prec = cfg.prec;
        fx.deg = cfg.deg;
        fx.seed = cfg.seed;
        vec![fx]
    } else {
        default_fixtures(cfg.seed)
    };
    let results = run_all(&fixtures, suite)?;
    let passed = results.iter().filter(|r| r.pass).count();
    let failed = results.len() - passed;
    let ok = failed == 0;
    match cfg.output {
        Output::Json => {
            let results = results
                .into_iter()
                .map(|r| CheckOut { fixture: r.fixture, name: r.name, pass: r.pass, detail: r.detail })
                .collect();
            json(&VerifyOut { command: "verify", config: cfg, suite: suite.to_string(), fixtures, passed, failed, results }, ok)
        }
        Output::Tsv => {
            let mut text = format!("{} suite={suite} passed={passed} failed={failed}\nfixture\tname\tresult\tdetail\n", cfg.header("verify"));
            for r in &results {
                let verdict = if r.pass { "pass" } else { "FAIL" };
                text.push_str(&format!("{}\t{}\t{verdict}\t{}\n", r.fixture, r.name, r.detail));
            }
            Ok(Report { text, ok })
        }
    }
}

pub struct Torsion;

#[derive(Serialize)]
struct TorsionRow {
    index: u64,
    a: String,
    coords: Vec<String>,
    valuation: Option<u32>,
}

#[derive(Serialize)]
struct TorsionOut<'a> {
    command: &'static str,
    config: &'a RunConfig,
    e: usize,
    defining_poly: Vec<String>,
    rows: Vec<TorsionRow>,
}

impl Task for Torsion {
    fn run<B: LocalBase>(&self, cfg: &RunConfig, ring: UnramifiedRing<B>) -> Result<Report, CliError> {
        let f = lt_poly(cfg, &ring)?;
        let level = build_level(&f, cfg.m)?;
        match cfg.output {
            Output::Tsv => Ok(Report { text: format!("{}\n{}", cfg.header("torsion"), level.to_tsv()), ok: true }),
            Output::Json => {
                let rows = level
                    .points
                    .iter()
                    .map(|p| TorsionRow {
                        index: p.index,
                        a: ring.base().fmt_elem(&p.a),
                        coords: coords(&ring, &p.point),
                        valuation: level.valuation(&p.point),
                    })
                    .collect();
                let defining_poly = level.ext.defining_poly().iter().map(|c| ring.fmt_coords(c)).collect();
                json(&TorsionOut { command: "torsion", config: cfg, e: level.e(), defining_poly, rows }, true)
            }
        }
    }
}

/// Reads the presentation, then runs over the field it names (falling back to the config).
pub fn ramify(cfg: &RunConfig, input: Option<&Path>, fixture: Option<&str>) -> Result<Report, CliError> {
    let text = match (fixture, input) {
        (Some("zeta4"), _) => ZETA4_JSON.to_string(),
        (Some(_), _) => ZETA8_JSON.to_string(),
        (None, Some(path)) if path != Path::new("-") => {
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        (None, _) => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
            s
        }
    };
    let pres: PresentationJson = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("presentation: {e}")))?;
    let mut cfg = cfg.clone();
    cfg.p = pres.p.unwrap_or(cfg.p);
    cfg.prec = pres.prec.unwrap_or(cfg.prec);
    cfg.validate()?;
    dispatch(&cfg, Ramify { pres })
}

struct Ramify {
    pres: PresentationJson,
}

#[derive(Serialize)]
struct UpperOut {
    y: i64,
    order: usize,
}

#[derive(Serialize)]
struct RamifyOut {
    command: &'static str,
    p: u32,
    prec: u32,
    order: usize,
    labels: Vec<String>,
    /// `null` marks `i(id) = ∞`.
    i_table: Vec<Option<u32>>,
    group_sizes: Vec<usize>,
    jumps: Vec<usize>,
    upper_jumps: Vec<String>,
    phi_breaks: Vec<(usize, String)>,
    hasse_arf: &'static str,
    abelian: bool,
    upper: Vec<UpperOut>,
}

impl Task for Ramify {
    fn run<B: LocalBase>(&self, cfg: &RunConfig, ring: UnramifiedRing<B>) -> Result<Report, CliError> {
        let pres = GaloisPresentation::from_json(&ring, &self.pres)?;
        let filt = lower_numbering(&pres)?;
        let ha = hasse_arf_check(&pres, &filt, ring.q());
        let top = ha.jumps.last().map_or(0, |(_, y)| y.ceil().to_integer()) + 1;
        let upper = (0..=top).map(|y| UpperOut { y, order: filt.upper_group(Q::from_integer(y)).len() }).collect();
        let out = RamifyOut {
            command: "ramify",
            p: cfg.p,
            prec: cfg.prec,
            order: pres.order(),
            labels: pres.labels.clone(),
            i_table: filt.i_table.clone(),
            group_sizes: filt.group_sizes.clone(),
            jumps: filt.jumps(),
            upper_jumps: ha.jumps.iter().map(|(_, y)| y.to_string()).collect(),
            phi_breaks: filt.phi_breaks().into_iter().map(|(n, y)| (n, y.to_string())).collect(),
            hasse_arf: if ha.pass() { "pass" } else { "fail" },
            abelian: ha.abelian,
            upper,
        };
        match cfg.output {
            Output::Json => json(&out, ha.pass()),
            Output::Tsv => {
                let mut text = format!(
                    "{}\n# order={} jumps={:?} upper_jumps={:?} hasse_arf={}\nelement\ti\n",
                    cfg.header("ramify"),
                    out.order,
                    out.jumps,
                    out.upper_jumps,
                    out.hasse_arf
                );
                for (label, i) in out.labels.iter().zip(&out.i_table) {
                    text.push_str(&format!("{label}\t{}\n", i.map_or("inf".to_string(), |v| v.to_string())));
                }
                Ok(Report { text, ok: ha.pass() })
            }
        }
    }
}

pub struct Artin {
    pub x: String,
    pub level: usize,
}

#[derive(Serialize)]
struct ArtinOut<'a> {
    command: &'static str,
    config: &'a RunConfig,
    x: String,
    level: usize,
    /// Exponent of the arithmetic Frobenius on L.
    frobenius_exponent: i64,
    theta: String,
    generator_image: Vec<String>,
    /// `[a, a']` label pairs; `null` when the action moves to a twisted tower.
    torsion_permutation: Option<Vec<(u64, u64)>>,
}

impl Task for Artin {
    fn run<B: LocalBase>(&self, cfg: &RunConfig, ring: UnramifiedRing<B>) -> Result<Report, CliError> {
        let f = lt_poly(cfg, &ring)?;
        let x = ring.parse_field(&self.x)?;
        let level = build_level(&f, self.level)?;
        let d = artin_apply(&x, &level)?;
        let out = ArtinOut {
            command: "artin",
            config: cfg,
            x: ring.fmt_field(&x),
            level: self.level,
            frobenius_exponent: d.j,
            theta: ring.fmt_coords(&d.theta),
            generator_image: coords(&ring, d.generator_image()),
            torsion_permutation: d.permutation.clone(),
        };
        match cfg.output {
            Output::Json => json(&out, true),
            Output::Tsv => {
                let mut text = format!(
                    "{} x={} level={} frobenius_exponent={}\na\ta'\n",
                    cfg.header("artin"),
                    out.x,
                    out.level,
                    out.frobenius_exponent
                );
                for (a, b) in out.torsion_permutation.iter().flatten() {
                    text.push_str(&format!("{a}\t{b}\n"));
                }
                Ok(Report { text, ok: true })
            }
        }
    }
}

pub struct Coleman {
    pub g: Option<String>,
}

#[derive(Serialize)]
struct IterateOut {
    k: usize,
    cap: usize,
    coeffs: Vec<String>,
}

#[derive(Serialize)]
struct ColemanOut<'a> {
    command: &'static str,
    config: &'a RunConfig,
    g: Vec<String>,
    iterates: Vec<IterateOut>,
    /// `u_k = N^k(g)(0)`.
    u: Vec<String>,
    /// `N^k(g) ≡ N^{k-1}(g)^φ mod π^k`, for `k = 1..=m`.
    congruences: Vec<bool>,
    /// `u_k / u_{k-1}` equals the norm of `g(α_k)` from level k to level k-1.
    conjugate_product: Vec<bool>,
}

impl Task for Coleman {
    fn run<B: LocalBase>(&self, cfg: &RunConfig, ring: UnramifiedRing<B>) -> Result<Report, CliError> {
        let f = lt_poly(cfg, &ring)?;
        let g = match &self.g {
            Some(list) => ColemanSeries::polynomial(list.split(',').map(|c| ring.parse_elem(c.trim())).collect::<Result<_, _>>()?),
            None => ColemanSeries::random_unit(&ring, 2, &mut seeded_rng(cfg.seed, 0)),
        };
        if !ring.is_unit(&g.constant_term(&ring)) {
            return Err(CliError::Usage("g must have a unit constant term".into()));
        }
        let ctx = ColemanContext::for_levels(&f, cfg.m, COLEMAN_CAP)?;
        let (iterates, caps) = ctx.iterates(&g, cfg.m, COLEMAN_CAP)?;
        let congruences = ctx.iterate_congruences(&iterates, &caps);
        let u: Vec<_> = iterates.iter().map(|s| s.constant_term(&ring)).collect();
        let mut conjugate_product = Vec::with_capacity(cfg.m);
        for k in 1..=cfg.m {
            let level = build_level(&f, k)?;
            let ga = eval_series_at(&level.ext, &g.coeffs, &level.alpha);
            conjugate_product.push(ring.mul(&level.norm_rel(&ga)?, &u[k - 1]) == u[k]);
        }
        let ok = congruences.iter().chain(&conjugate_product).all(|b| *b);
        let fmt = |s: &ColemanSeries<B>, cap: usize| -> Vec<String> {
            s.coeffs.iter().take(cap + 1).map(|c| ring.fmt_coords(c)).collect()
        };
        let out = ColemanOut {
            command: "coleman",
            config: cfg,
            g: fmt(&g, g.coeffs.len()),
            iterates: iterates.iter().enumerate().skip(1).map(|(k, s)| IterateOut { k, cap: caps[k], coeffs: fmt(s, caps[k]) }).collect(),
            u: u.iter().map(|c| ring.fmt_coords(c)).collect(),
            congruences,
            conjugate_product,
        };
        match cfg.output {
            Output::Json => json(&out, ok),
            Output::Tsv => {
                let mut text = format!("{}\nk\tu_k\tcongruence\tconjugate_product\n", cfg.header("coleman"));
                text.push_str(&format!("0\t{}\t-\t-\n", out.u[0]));
                for k in 1..=cfg.m {
                    text.push_str(&format!("{k}\t{}\t{}\t{}\n", out.u[k], out.congruences[k - 1], out.conjugate_product[k - 1]));
                }
                Ok(Report { text, ok })
            }
        }
    }
}
