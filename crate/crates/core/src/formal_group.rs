//! Lubin-Tate group laws, homomorphisms `[θ]_{f,f'}`, scalar endomorphisms and
//! the iterates `f_m`.

use crate::base::LocalBase;
use crate::error::{Error, Result};
use crate::poly;
use crate::ring::Ring;
use crate::series::{check_lt_shape, solve_functional_equation, TruncatedSeries};
use crate::unramified::{FieldElement, RingElement, UnramifiedRing};

type Elem<B> = RingElement<<B as Ring>::Elem>;
type Series<B> = TruncatedSeries<UnramifiedRing<B>>;

/// A monic degree-q polynomial with `f ≡ πX mod deg 2` and `f ≡ X^q mod π`.
#[derive(Clone, Debug, PartialEq)]
pub struct LTPolynomial<B: LocalBase> {
    ring: UnramifiedRing<B>,
    coeffs: Vec<Elem<B>>,
    pi: FieldElement<B::Elem>,
}

impl<B: LocalBase> LTPolynomial<B> {
    /// Coefficients ascending from the constant term.
    pub fn new(ring: &UnramifiedRing<B>, coeffs: Vec<Elem<B>>) -> Result<Self> {
        check_lt_shape(ring, &coeffs)?;
        let pi = ring.field_from_ring(&coeffs[1]);
        Ok(LTPolynomial { ring: ring.clone(), coeffs, pi })
    }

    pub fn from_i64s(ring: &UnramifiedRing<B>, c: &[i64]) -> Result<Self> {
        Self::new(ring, c.iter().map(|&x| ring.from_i64(x)).collect())
    }

    /// `πX + X^q` for the chosen base uniformizer.
    pub fn standard(ring: &UnramifiedRing<B>) -> Result<Self> {
        Self::with_uniformizer(ring, &ring.uniformizer())
    }

    /// `πX + X^q` for a given uniformizer of O_L.
    pub fn with_uniformizer(ring: &UnramifiedRing<B>, pi: &Elem<B>) -> Result<Self> {
        let q = ring.q() as usize;
        let mut c: Vec<_> = (0..=q).map(|_| ring.zero()).collect();
        c[1] = pi.clone();
        c[q] = ring.one();
        Self::new(ring, c)
    }

    /// `(1+X)^p - 1`; a Lubin-Tate polynomial only over Z_p.
    pub fn cyclotomic(ring: &UnramifiedRing<B>) -> Result<Self> {
        let p = ring.p() as usize;
        let mut c = vec![ring.one()];
        for _ in 0..p {
            c = poly::mul(ring, &c, &[ring.one(), ring.one()]);
        }
        c[0] = ring.zero();
        Self::new(ring, c)
    }

    pub fn ring(&self) -> &UnramifiedRing<B> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Elem<B>] {
        &self.coeffs
    }

    /// The linear coefficient as a field element.
    pub fn pi(&self) -> &FieldElement<B::Elem> {
        &self.pi
    }

    pub fn pi_elem(&self) -> &Elem<B> {
        &self.coeffs[1]
    }

    pub fn q(&self) -> u64 {
        self.ring.q()
    }

    /// `f^{φ^i}`: Frobenius on every coefficient.
    pub fn frobenius(&self, i: i64) -> Self {
        let coeffs: Vec<_> = self.coeffs.iter().map(|c| self.ring.frobenius(c, i)).collect();
        let pi = self.ring.field_from_ring(&coeffs[1]);
        LTPolynomial { ring: self.ring.clone(), coeffs, pi }
    }

    pub fn eval(&self, x: &Elem<B>) -> Elem<B> {
        self.ring.eval_poly(&self.coeffs, x)
    }

    pub fn as_series(&self, nvars: usize, var: usize, deg_cap: usize) -> Result<Series<B>> {
        TruncatedSeries::univariate_in(&self.ring, nvars, deg_cap, var, &self.coeffs)
    }

    /// Display as `c1*X + ... + X^q`, omitting zero terms.
    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{k}"),
            };
            if self.ring.is_one(c) {
                parts.push(mono);
            } else {
                parts.push(format!("({})*{mono}", self.ring.fmt_coords(c)));
            }
        }
        parts.join(" + ")
    }
}

/// The formal group `F_f`, known up to total degree `deg_cap`.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw<B: LocalBase> {
    pub f: LTPolynomial<B>,
    pub series: Series<B>,
}

impl<B: LocalBase> FormalGroupLaw<B> {
    pub fn deg_cap(&self) -> usize {
        self.series.deg_cap()
    }

    /// `F(a, b)` for two series in the same variables.
    pub fn add(&self, a: &Series<B>, b: &Series<B>) -> Result<Series<B>> {
        self.series.compose(&[a.clone(), b.clone()])
    }

    /// The three group axioms modulo truncation, plus `F ≡ X+Y mod deg 2`.
    pub fn check_axioms(&self) -> Result<bool> {
        let r = &self.f.ring;
        let d = self.deg_cap();
        let x2 = TruncatedSeries::var(r, 2, d, 0)?;
        let y2 = TruncatedSeries::var(r, 2, d, 1)?;
        let swapped = self.series.compose(&[y2.clone(), x2.clone()])?;
        let zero = TruncatedSeries::zero(r, 2, d)?;
        let right_unit = self.series.compose(&[x2.clone(), zero])?;
        let linear = self.series.coeff(&[1, 0, 0]) == r.one() && self.series.coeff(&[0, 1, 0]) == r.one();
        let x3 = TruncatedSeries::var(r, 3, d, 0)?;
        let y3 = TruncatedSeries::var(r, 3, d, 1)?;
        let z3 = TruncatedSeries::var(r, 3, d, 2)?;
        let xy = self.series.compose(&[x3.clone(), y3.clone()])?;
        let yz = self.series.compose(&[y3, z3.clone()])?;
        let left = self.series.compose(&[xy, z3])?;
        let right = self.series.compose(&[x3, yz])?;
        Ok(linear && swapped == self.series && right_unit == x2 && left == right)
    }
}

/// `[θ]_{f,f'}`, the unique series `≡ θX` with `f'∘[θ] = [θ]^φ∘f`.
#[derive(Clone, Debug)]
pub struct HomSeries<B: LocalBase> {
    pub theta: Elem<B>,
    pub f_src: LTPolynomial<B>,
    pub f_dst: LTPolynomial<B>,
    pub series: Series<B>,
}

impl<B: LocalBase> HomSeries<B> {
    /// `self ∘ other`, where `other` lands in the source of `self`.
    pub fn compose(&self, other: &HomSeries<B>) -> Result<Series<B>> {
        if other.f_dst != self.f_src {
            return Err(Error::RingMismatch);
        }
        self.series.compose(std::slice::from_ref(&other.series))
    }

    /// `[θ]∘F_f = F_{f'}∘([θ], [θ])` modulo truncation.
    pub fn is_homomorphism(&self, src: &FormalGroupLaw<B>, dst: &FormalGroupLaw<B>) -> Result<bool> {
        let lhs = self.series.compose(std::slice::from_ref(&src.series))?;
        let r = self.f_src.ring();
        let d = self.series.deg_cap().min(src.deg_cap());
        let x = TruncatedSeries::var(r, 2, d, 0)?;
        let y = TruncatedSeries::var(r, 2, d, 1)?;
        let tx = self.series.compose(&[x])?;
        let ty = self.series.compose(&[y])?;
        let rhs = dst.series.compose(&[tx, ty])?;
        Ok(lhs == rhs)
    }
}

pub fn build_formal_group<B: LocalBase>(f: &LTPolynomial<B>, deg_cap: usize) -> Result<FormalGroupLaw<B>> {
    let r = &f.ring;
    let series = solve_functional_equation(r, &f.coeffs, &f.coeffs, &[r.one(), r.one()], deg_cap)?;
    let x = TruncatedSeries::var(r, 2, deg_cap, 0)?;
    let y = TruncatedSeries::var(r, 2, deg_cap, 1)?;
    if series.compose(&[y.clone(), x.clone()])? != series {
        return Err(Error::PrecisionExhausted("group law is not commutative".into()));
    }
    if series.compose(&[x.clone(), TruncatedSeries::zero(r, 2, deg_cap)?])? != x {
        return Err(Error::PrecisionExhausted("F(X, 0) differs from X".into()));
    }
    Ok(FormalGroupLaw { f: f.clone(), series })
}

pub fn build_hom<B: LocalBase>(
    theta: &Elem<B>,
    f_src: &LTPolynomial<B>,
    f_dst: &LTPolynomial<B>,
    deg_cap: usize,
) -> Result<HomSeries<B>> {
    if f_src.ring != f_dst.ring {
        return Err(Error::RingMismatch);
    }
    let series = solve_functional_equation(
        &f_src.ring,
        &f_src.coeffs,
        &f_dst.coeffs,
        std::slice::from_ref(theta),
        deg_cap,
    )?;
    Ok(HomSeries { theta: theta.clone(), f_src: f_src.clone(), f_dst: f_dst.clone(), series })
}

/// `[a]_f` for `a ∈ O_K`.
pub fn scalar_endo<B: LocalBase>(a: &Elem<B>, f: &LTPolynomial<B>, deg_cap: usize) -> Result<HomSeries<B>> {
    if !f.ring.in_base(a) {
        return Err(Error::NotInBase(f.ring.fmt_elem(a)));
    }
    build_hom(a, f, f, deg_cap)
}

/// `f_m = f^{φ^{m-1}} ∘ ... ∘ f^φ ∘ f` and `π_m = ∏_{t<m} π^{φ^t}`.
pub fn iterate_fm<B: LocalBase>(f: &LTPolynomial<B>, m: usize) -> (Vec<Elem<B>>, FieldElement<B::Elem>) {
    let r = &f.ring;
    let mut fm = poly::monomial(r, 1);
    let mut pim = r.field_one();
    for t in 0..m {
        let ft = f.frobenius(t as i64);
        fm = poly::compose(r, &ft.coeffs, &fm, None);
        pim = r.field_mul(&pim, &ft.pi);
    }
    (fm, pim)
}

/// A unit `θ` of O_L with `θ^φ/θ = π'/π`, which exists exactly when the norms agree.
///
/// The residue is the lex-least solution, lifted digit by digit.
pub fn solve_theta<B: LocalBase>(
    ring: &UnramifiedRing<B>,
    pi: &FieldElement<B::Elem>,
    pi2: &FieldElement<B::Elem>,
) -> Result<Elem<B>> {
    for x in [pi, pi2] {
        if x.val != 1 || x.unit.is_none() {
            return Err(Error::NotAUniformizer(ring.fmt_field(x)));
        }
    }
    if ring.field_norm(pi) != ring.field_norm(pi2) {
        return Err(Error::NormMismatch);
    }
    let w = ring.field_to_ring(&ring.field_div(pi2, pi)?)?;
    ring.solve_frobenius_ratio(&w, None)
}
