//! Finite fields F_q, q = p^r, and dense polynomials over them.
//!
//! Elements are encoded as integers in `[0, q)` whose base-p digits are the
//! coordinates in the power basis of F_p[z]/(h).

use crate::error::{Error, Result};

/// Largest residue field the library will enumerate.
pub const MAX_FIELD_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fq {
    p: u32,
    r: u32,
    q: u32,
    /// F_p coefficients of the defining polynomial, ascending, monic.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fq {
    pub fn new(p: u32, r: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidConfig(format!("{p} is not prime")));
        }
        if r == 0 {
            return Err(Error::InvalidConfig("residue degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(r).filter(|&q| q <= MAX_FIELD_SIZE).ok_or_else(|| {
            Error::InvalidConfig(format!("field size {p}^{r} exceeds {MAX_FIELD_SIZE}"))
        })? as u32;
        let prime = Fq { p, r: 1, q: p, modulus: vec![0, 1], exp: vec![], log: vec![] };
        if r == 1 {
            return Ok(prime);
        }
        let modulus = lowest_irreducible(&prime, r as usize);
        let mut field = Fq { p, r, q, modulus, exp: vec![], log: vec![] };
        field.build_tables();
        Ok(field)
    }

    pub fn prime_field(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.r as usize];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let r = self.r as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * r - 1];
        for i in 0..r {
            for j in 0..r {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for k in (r..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..r {
                prod[k - r + i] = (prod[k - r + i] + (p - c) * self.modulus[i] as u64) % p;
            }
            prod[k] = 0;
        }
        let d: Vec<u32> = prod[..r].iter().map(|&x| x as u32).collect();
        self.undigits(&d)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let order = q - 1;
        for g in 2..self.q {
            let mut exp = vec![0u32; order];
            let mut x = 1u32;
            let mut ok = true;
            for (k, e) in exp.iter_mut().enumerate() {
                if k > 0 && x == 1 {
                    ok = false;
                    break;
                }
                *e = x;
                x = self.slow_mul(x, g);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; q];
                for (k, &e) in exp.iter().enumerate() {
                    log[e as usize] = k as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic");
    }

    pub fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.r == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.r == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let d: Vec<u32> = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.undigits(&d)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.r == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let order = self.q as usize - 1;
        let k = (self.log[a as usize] as usize + self.log[b as usize] as usize) % order;
        self.exp[k]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let mut result = 1;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.q as u64 - 2))
        }
    }
}

/// Dense polynomials over F_q, coefficients ascending.
pub mod poly {
    use super::Fq;

    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem_monic(fq: &Fq, a: &[u32], m: &[u32]) -> Vec<u32> {
        let dm = m.len() - 1;
        let mut r = a.to_vec();
        trim(&mut r);
        while r.len() > dm {
            let k = r.len() - 1;
            let c = r[k];
            for i in 0..=dm {
                let t = fq.mul(c, m[i]);
                r[k - dm + i] = fq.sub(r[k - dm + i], t);
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(fq: &Fq, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = fq.add(out[i + j], fq.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    /// Monic polynomial of degree `n` whose coefficients `(a_{n-1}, .., a_0)`
    /// are the base-q digits of `index`, most significant first.
    pub fn monic_from_index(fq: &Fq, n: usize, mut index: u64) -> Vec<u32> {
        let q = fq.size() as u64;
        let mut c = vec![0u32; n + 1];
        c[n] = 1;
        for coeff in c.iter_mut().take(n) {
            *coeff = (index % q) as u32;
            index /= q;
        }
        c
    }

    pub fn is_irreducible(fq: &Fq, f: &[u32]) -> bool {
        let n = f.len() - 1;
        if n == 0 {
            return false;
        }
        let q = fq.size() as u64;
        for d in 1..=n / 2 {
            for idx in 0..q.pow(d as u32) {
                let cand = monic_from_index(fq, d, idx);
                if rem_monic(fq, f, &cand).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Lowest monic irreducible polynomial of degree `n` over `fq`, ordering
/// candidates lexicographically by `(a_{n-1}, .., a_0)`.
pub fn lowest_irreducible(fq: &Fq, n: usize) -> Vec<u32> {
    let q = fq.size() as u64;
    let total = q.pow(n as u32);
    (0..total)
        .map(|idx| poly::monic_from_index(fq, n, idx))
        .find(|c| poly::is_irreducible(fq, c))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Fq::new(5, 1).unwrap();
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.inv(2), Some(3));
        assert_eq!(f.neg(0), 0);
        assert_eq!(f.sub(1, 3), 3);
    }

    #[test]
    fn f4_is_a_field() {
        let f = Fq::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        for a in 1..4 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            assert_eq!(f.pow(a, 3), 1);
        }
        // z * z = z + 1
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn f9_distributive() {
        let f = Fq::new(3, 2).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                for c in 0..9 {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn lowest_irreducibles() {
        let f2 = Fq::new(2, 1).unwrap();
        assert_eq!(lowest_irreducible(&f2, 2), vec![1, 1, 1]);
        assert_eq!(lowest_irreducible(&f2, 3), vec![1, 1, 0, 1]);
        let f3 = Fq::new(3, 1).unwrap();
        assert_eq!(lowest_irreducible(&f3, 2), vec![1, 0, 1]);
        assert_eq!(lowest_irreducible(&f3, 1), vec![0, 1]);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(Fq::new(4, 1).is_err());
        assert!(Fq::new(2, 17).is_err());
    }
}
