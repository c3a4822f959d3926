//! Dense univariate polynomials over any [`Ring`], coefficients ascending.

use crate::error::{Error, Result};
use crate::ring::Ring;

pub fn trim<R: Ring>(ring: &R, a: &mut Vec<R::Elem>) {
    while a.last().is_some_and(|c| ring.is_zero(c)) {
        a.pop();
    }
}

pub fn degree<R: Ring>(ring: &R, a: &[R::Elem]) -> Option<usize> {
    a.iter().rposition(|c| !ring.is_zero(c))
}

pub fn add<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    let zero = ring.zero();
    let mut out: Vec<_> = (0..n)
        .map(|i| ring.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(ring, &mut out);
    out
}

pub fn sub<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let n = a.len().max(b.len());
    let zero = ring.zero();
    let mut out: Vec<_> = (0..n)
        .map(|i| ring.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(ring, &mut out);
    out
}

pub fn scale<R: Ring>(ring: &R, c: &R::Elem, a: &[R::Elem]) -> Vec<R::Elem> {
    let mut out: Vec<_> = a.iter().map(|x| ring.mul(c, x)).collect();
    trim(ring, &mut out);
    out
}

/// Product truncated to degree `cap` (no truncation for `None`).
pub fn mul_trunc<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem], cap: Option<usize>) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let full = a.len() + b.len() - 1;
    let len = cap.map_or(full, |c| full.min(c + 1));
    let mut out: Vec<_> = (0..len).map(|_| ring.zero()).collect();
    for (i, x) in a.iter().enumerate().take(len) {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            ring.mul_add_assign(&mut out[i + j], x, y);
        }
    }
    trim(ring, &mut out);
    out
}

pub fn mul<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    mul_trunc(ring, a, b, None)
}

pub fn eval<R: Ring>(ring: &R, a: &[R::Elem], x: &R::Elem) -> R::Elem {
    a.iter().rev().fold(ring.zero(), |acc, c| ring.add(&ring.mul(&acc, x), c))
}

/// `outer(inner)`, truncated to degree `cap` when given.
pub fn compose<R: Ring>(ring: &R, outer: &[R::Elem], inner: &[R::Elem], cap: Option<usize>) -> Vec<R::Elem> {
    let mut acc: Vec<R::Elem> = vec![];
    for c in outer.iter().rev() {
        acc = mul_trunc(ring, &acc, inner, cap);
        acc = add(ring, &acc, std::slice::from_ref(c));
    }
    acc
}

pub fn derivative<R: Ring>(ring: &R, a: &[R::Elem]) -> Vec<R::Elem> {
    let mut out: Vec<_> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| ring.mul(&ring.from_i64(i as i64), c))
        .collect();
    trim(ring, &mut out);
    out
}

/// Quotient and remainder by a monic divisor.
pub fn divrem_monic<R: Ring>(ring: &R, a: &[R::Elem], m: &[R::Elem]) -> Result<(Vec<R::Elem>, Vec<R::Elem>)> {
    let dm = degree(ring, m).ok_or(Error::NotDivisible)?;
    if !ring.is_one(&m[dm]) {
        return Err(Error::InvalidPolynomial("divisor is not monic".into()));
    }
    let mut r = a.to_vec();
    trim(ring, &mut r);
    if r.len() <= dm {
        return Ok((vec![], r));
    }
    let mut q: Vec<_> = (0..r.len() - dm).map(|_| ring.zero()).collect();
    for k in (dm..r.len()).rev() {
        let c = r[k].clone();
        if ring.is_zero(&c) {
            continue;
        }
        q[k - dm] = c.clone();
        for i in 0..=dm {
            let t = ring.mul(&c, &m[i]);
            r[k - dm + i] = ring.sub(&r[k - dm + i], &t);
        }
    }
    trim(ring, &mut q);
    trim(ring, &mut r);
    Ok((q, r))
}

pub fn monomial<R: Ring>(ring: &R, k: usize) -> Vec<R::Elem> {
    let mut v: Vec<_> = (0..k).map(|_| ring.zero()).collect();
    v.push(ring.one());
    v
}

pub fn from_i64s<R: Ring>(ring: &R, c: &[i64]) -> Vec<R::Elem> {
    let mut v: Vec<_> = c.iter().map(|&x| ring.from_i64(x)).collect();
    trim(ring, &mut v);
    v
}

pub fn eq<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> bool {
    sub(ring, a, b).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Zp;

    #[test]
    fn compose_and_divide() {
        let z = Zp::new(2, 10).unwrap();
        let f = from_i64s(&z, &[0, 2, 1]);
        let f2 = compose(&z, &f, &f, None);
        assert_eq!(f2, from_i64s(&z, &[0, 4, 6, 4, 1]));
        let (q, r) = divrem_monic(&z, &f2, &f).unwrap();
        assert!(r.is_empty());
        assert_eq!(q, from_i64s(&z, &[2, 2, 1]));
        let (_, r) = divrem_monic(&z, &from_i64s(&z, &[1, 0, 0, 1]), &f).unwrap();
        assert_eq!(r, from_i64s(&z, &[1, 4]));
    }

    #[test]
    fn truncated_products() {
        let z = Zp::new(3, 4).unwrap();
        let a = from_i64s(&z, &[1, 1]);
        assert_eq!(mul_trunc(&z, &a, &a, Some(1)), from_i64s(&z, &[1, 2]));
        assert_eq!(derivative(&z, &from_i64s(&z, &[5, 0, 1])), from_i64s(&z, &[0, 2]));
    }
}
