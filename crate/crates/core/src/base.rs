//! The base rings O_K/π^N: Z/p^N and F_q[t]/t^N.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::{is_prime, Fq};
use crate::ring::Ring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    PAdic,
    PowerSeries,
}

/// Parameters of the base local field and the working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseFieldConfig {
    pub kind: BaseKind,
    pub p: u32,
    pub r: u32,
    /// Elements are known modulo π^prec.
    pub prec: u32,
}

impl BaseFieldConfig {
    pub fn padic(p: u32, prec: u32) -> Self {
        BaseFieldConfig { kind: BaseKind::PAdic, p, r: 1, prec }
    }

    pub fn power_series(p: u32, r: u32, prec: u32) -> Self {
        BaseFieldConfig { kind: BaseKind::PowerSeries, p, r, prec }
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p as u64) {
            return Err(Error::InvalidConfig(format!("{} is not prime", self.p)));
        }
        if self.prec == 0 {
            return Err(Error::InvalidConfig("precision must be at least 1".into()));
        }
        if self.r == 0 {
            return Err(Error::InvalidConfig("residue degree must be at least 1".into()));
        }
        if self.kind == BaseKind::PAdic && self.r != 1 {
            return Err(Error::InvalidConfig("the p-adic kind requires r = 1".into()));
        }
        Ok(())
    }
}

/// The coefficient ring O_K/π^N of the base field.
pub trait LocalBase: Ring + PartialEq + Debug + 'static {
    fn config(&self) -> BaseFieldConfig;
    fn residue_field(&self) -> &Fq;
    fn prec(&self) -> u32;
    /// The same base at another precision.
    fn with_prec(&self, prec: u32) -> Result<Self>;
    /// Reinterprets an element of this base at any precision by its canonical digits.
    fn coerce(&self, x: &Self::Elem) -> Self::Elem;
    /// Lifts an element of `src` (a lower precision) by its representative of least size.
    fn lift_from(&self, _src: &Self, x: &Self::Elem) -> Self::Elem {
        self.coerce(x)
    }
    /// π-adic valuation, `None` for zero.
    fn valuation(&self, x: &Self::Elem) -> Option<u32>;
    fn mul_pi_pow(&self, x: &Self::Elem, k: u32) -> Self::Elem;
    /// Drops the lowest `k` digits and shifts down; top digits become zero.
    fn shift_down(&self, x: &Self::Elem, k: u32) -> Self::Elem;
    /// The `i`-th plain π-adic digit, as an element of F_q.
    fn digit(&self, x: &Self::Elem, i: u32) -> u32;
    /// Rebuilds an element from plain digits (index i is the coefficient of π^i).
    fn from_digits(&self, digits: &[u32]) -> Self::Elem;
    fn fmt_elem(&self, x: &Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;
    /// `5^2` or `t^4`.
    fn modulus_label(&self) -> String;
    /// Symbol for the base uniformizer in literals.
    fn uniformizer_symbol(&self) -> &'static str;

    fn p(&self) -> u32 {
        self.config().p
    }

    fn q(&self) -> u64 {
        self.residue_field().size() as u64
    }

    fn uniformizer(&self) -> Self::Elem {
        self.mul_pi_pow(&self.one(), 1)
    }

    fn residue(&self, x: &Self::Elem) -> u32 {
        self.digit(x, 0)
    }

    fn lift_residue(&self, c: u32) -> Self::Elem {
        self.from_digits(&[c])
    }

    fn is_unit(&self, x: &Self::Elem) -> bool {
        self.residue(x) != 0
    }
}

/// Z/p^N with `p^N < 2^63`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zp {
    p: u32,
    prec: u32,
    modulus: u64,
    fq: Arc<Fq>,
}

impl Zp {
    pub fn new(p: u32, prec: u32) -> Result<Self> {
        BaseFieldConfig::padic(p, prec).validate()?;
        let modulus = (p as u64)
            .checked_pow(prec)
            .filter(|&m| m < (1u64 << 63))
            .ok_or_else(|| Error::InvalidConfig(format!("{p}^{prec} exceeds the 63-bit word")))?;
        Ok(Zp { p, prec, modulus, fq: Arc::new(Fq::prime_field(p)?) })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Largest precision representable for this prime.
    pub fn max_prec(p: u32) -> u32 {
        let mut k = 0;
        let mut m: u64 = 1;
        while let Some(next) = m.checked_mul(p as u64).filter(|&x| x < (1u64 << 63)) {
            m = next;
            k += 1;
        }
        k
    }
}

impl Ring for Zp {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.modulus
    }

    fn from_i64(&self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.modulus as i128) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

impl LocalBase for Zp {
    fn config(&self) -> BaseFieldConfig {
        BaseFieldConfig::padic(self.p, self.prec)
    }

    fn residue_field(&self) -> &Fq {
        &self.fq
    }

    fn prec(&self) -> u32 {
        self.prec
    }

    fn with_prec(&self, prec: u32) -> Result<Self> {
        Zp::new(self.p, prec)
    }

    fn coerce(&self, x: &u64) -> u64 {
        x % self.modulus
    }

    fn lift_from(&self, src: &Self, x: &u64) -> u64 {
        if src.modulus < self.modulus && *x > src.modulus / 2 {
            self.modulus - (src.modulus - x)
        } else {
            x % self.modulus
        }
    }

    fn valuation(&self, x: &u64) -> Option<u32> {
        if *x == 0 {
            return None;
        }
        let mut v = 0;
        let mut y = *x;
        while y.is_multiple_of(self.p as u64) {
            y /= self.p as u64;
            v += 1;
        }
        Some(v)
    }

    fn mul_pi_pow(&self, x: &u64, k: u32) -> u64 {
        if k >= self.prec {
            return 0;
        }
        self.mul(x, &(self.p as u64).pow(k))
    }

    fn shift_down(&self, x: &u64, k: u32) -> u64 {
        if k >= self.prec {
            return 0;
        }
        x / (self.p as u64).pow(k)
    }

    fn digit(&self, x: &u64, i: u32) -> u32 {
        if i >= self.prec {
            return 0;
        }
        ((x / (self.p as u64).pow(i)) % self.p as u64) as u32
    }

    fn from_digits(&self, digits: &[u32]) -> u64 {
        digits
            .iter()
            .take(self.prec as usize)
            .rev()
            .fold(0u64, |acc, &d| acc * self.p as u64 + d as u64)
    }

    fn fmt_elem(&self, x: &u64) -> String {
        x.to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<u64> {
        let s = s.trim();
        let n: i128 = s.parse().map_err(|_| Error::Parse(format!("bad integer `{s}`")))?;
        Ok(n.rem_euclid(self.modulus as i128) as u64)
    }

    fn modulus_label(&self) -> String {
        format!("{}^{}", self.p, self.prec)
    }

    fn uniformizer_symbol(&self) -> &'static str {
        "p"
    }
}

/// F_q[t]/t^N; elements are coefficient vectors of length N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqSeries {
    p: u32,
    r: u32,
    prec: u32,
    fq: Arc<Fq>,
}

impl FqSeries {
    pub fn new(p: u32, r: u32, prec: u32) -> Result<Self> {
        BaseFieldConfig::power_series(p, r, prec).validate()?;
        Ok(FqSeries { p, r, prec, fq: Arc::new(Fq::new(p, r)?) })
    }
}

impl Ring for FqSeries {
    type Elem = Vec<u32>;

    fn zero(&self) -> Vec<u32> {
        vec![0; self.prec as usize]
    }

    fn one(&self) -> Vec<u32> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }

    fn from_i64(&self, n: i64) -> Vec<u32> {
        let mut v = self.zero();
        v[0] = self.fq.from_i64(n);
        v
    }

    fn add(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.fq.add(x, y)).collect()
    }

    fn sub(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.fq.sub(x, y)).collect()
    }

    fn neg(&self, a: &Vec<u32>) -> Vec<u32> {
        a.iter().map(|&x| self.fq.neg(x)).collect()
    }

    fn mul(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        let n = self.prec as usize;
        if self.r == 1 {
            let p = self.p as u64;
            let mut acc = vec![0u64; n];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().take(n - i).enumerate() {
                    acc[i + j] += x as u64 * y as u64;
                }
                if i % 64 == 63 {
                    acc.iter_mut().for_each(|c| *c %= p);
                }
            }
            return acc.into_iter().map(|c| (c % p) as u32).collect();
        }
        let mut out = vec![0u32; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().take(n - i).enumerate() {
                out[i + j] = self.fq.add(out[i + j], self.fq.mul(x, y));
            }
        }
        out
    }

    fn is_zero(&self, a: &Vec<u32>) -> bool {
        a.iter().all(|&x| x == 0)
    }
}

impl LocalBase for FqSeries {
    fn config(&self) -> BaseFieldConfig {
        BaseFieldConfig::power_series(self.p, self.r, self.prec)
    }

    fn residue_field(&self) -> &Fq {
        &self.fq
    }

    fn prec(&self) -> u32 {
        self.prec
    }

    fn with_prec(&self, prec: u32) -> Result<Self> {
        BaseFieldConfig::power_series(self.p, self.r, prec).validate()?;
        Ok(FqSeries { prec, ..self.clone() })
    }

    fn coerce(&self, x: &Vec<u32>) -> Vec<u32> {
        let mut v = x.clone();
        v.resize(self.prec as usize, 0);
        v
    }

    fn valuation(&self, x: &Vec<u32>) -> Option<u32> {
        x.iter().position(|&c| c != 0).map(|i| i as u32)
    }

    fn mul_pi_pow(&self, x: &Vec<u32>, k: u32) -> Vec<u32> {
        let n = self.prec as usize;
        let k = k as usize;
        let mut v = vec![0; n];
        if k < n {
            v[k..].copy_from_slice(&x[..n - k]);
        }
        v
    }

    fn shift_down(&self, x: &Vec<u32>, k: u32) -> Vec<u32> {
        let n = self.prec as usize;
        let k = k as usize;
        let mut v = vec![0; n];
        if k < n {
            v[..n - k].copy_from_slice(&x[k..]);
        }
        v
    }

    fn digit(&self, x: &Vec<u32>, i: u32) -> u32 {
        x.get(i as usize).copied().unwrap_or(0)
    }

    fn from_digits(&self, digits: &[u32]) -> Vec<u32> {
        let mut v = self.zero();
        for (slot, &d) in v.iter_mut().zip(digits) {
            *slot = d;
        }
        v
    }

    fn fmt_elem(&self, x: &Vec<u32>) -> String {
        let parts: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}*t"),
                (k, 1) => format!("t^{k}"),
                (k, c) => format!("{c}*t^{k}"),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    fn parse_elem(&self, s: &str) -> Result<Vec<u32>> {
        let mut v = self.zero();
        let s = s.trim();
        if s == "0" {
            return Ok(v);
        }
        for term in s.split('+') {
            let term = term.trim();
            let bad = || Error::Parse(format!("bad term `{term}`"));
            let (coeff, power) = match term.split_once('t') {
                None => (term.parse::<u32>().map_err(|_| bad())?, 0usize),
                Some((c, rest)) => {
                    let c = c.trim_end_matches('*');
                    let coeff = if c.is_empty() { 1 } else { c.parse::<u32>().map_err(|_| bad())? };
                    let power = match rest.strip_prefix('^') {
                        Some(e) => e.parse::<usize>().map_err(|_| bad())?,
                        None if rest.is_empty() => 1,
                        None => return Err(bad()),
                    };
                    (coeff, power)
                }
            };
            if coeff >= self.fq.size() {
                return Err(bad());
            }
            if power < v.len() {
                v[power] = self.fq.add(v[power], coeff);
            }
        }
        Ok(v)
    }

    fn modulus_label(&self) -> String {
        format!("t^{}", self.prec)
    }

    fn uniformizer_symbol(&self) -> &'static str {
        "t"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zp_arithmetic() {
        let z = Zp::new(5, 2).unwrap();
        assert_eq!(z.from_i64(-1), 24);
        assert_eq!(z.mul(&7, &7), 24);
        assert_eq!(z.valuation(&10), Some(1));
        assert_eq!(z.digit(&7, 0), 2);
        assert_eq!(z.digit(&7, 1), 1);
        assert_eq!(z.from_digits(&[2, 1]), 7);
        assert_eq!(z.shift_down(&10, 1), 2);
    }

    #[test]
    fn zp_precision_limits() {
        assert_eq!(Zp::max_prec(2), 62);
        assert!(Zp::new(2, 63).is_err());
        assert!(Zp::new(4, 3).is_err());
        assert!(Zp::new(3, 0).is_err());
    }

    #[test]
    fn series_arithmetic_and_literals() {
        let s = FqSeries::new(2, 1, 4).unwrap();
        let x = s.parse_elem("1+t").unwrap();
        let sq = s.mul(&x, &x);
        assert_eq!(s.fmt_elem(&sq), "1+t^2");
        assert_eq!(s.valuation(&s.parse_elem("t^3").unwrap()), Some(3));
        assert_eq!(s.fmt_elem(&s.mul_pi_pow(&x, 3)), "t^3");
    }

    #[test]
    fn series_over_f4() {
        let s = FqSeries::new(2, 2, 3).unwrap();
        let z = s.parse_elem("2").unwrap();
        let zz = s.mul(&z, &z);
        assert_eq!(s.fmt_elem(&zz), "3");
    }

    #[test]
    fn config_validation() {
        assert!(BaseFieldConfig { kind: BaseKind::PAdic, p: 3, r: 2, prec: 4 }.validate().is_err());
        assert!(BaseFieldConfig::power_series(3, 2, 4).validate().is_ok());
    }
}
