//! Integer polynomial helpers: irreducibility filters, modular factor degree
//! patterns and cyclotomic polynomials. Coefficients are stored lowest degree
//! first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

pub fn trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[BigInt]) -> usize {
    p.len().saturating_sub(1)
}

pub fn eval_int(p: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of integer polynomials by a monic divisor. Returns `None`
/// when the remainder is nonzero.
pub fn div_exact_monic(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let db = degree(b);
    if a.len() < b.len() {
        return if a.iter().all(|c| c.is_zero()) {
            Some(vec![BigInt::zero()])
        } else {
            None
        };
    }
    let mut rem = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (i, bc) in b.iter().enumerate() {
            rem[k + i] -= &c * bc;
        }
        q[k] = c;
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(q)
    } else {
        None
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let Some(small) = n.to_u64() else {
        // Constant terms of admissible minimal polynomials are tiny; give up
        // the trial on absurd inputs and let the modular filter decide.
        return out;
    };
    let mut d = 1u64;
    while d * d <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    out
}

/// Does the monic polynomial have an integer root?
pub fn has_integer_root(p: &[BigInt]) -> bool {
    if p[0].is_zero() {
        return true;
    }
    divisors(&p[0])
        .into_iter()
        .any(|d| eval_int(p, &d).is_zero() || eval_int(p, &(-d)).is_zero())
}

// ---- arithmetic modulo a small prime ----

type ModPoly = Vec<u64>;

fn mtrim(p: &mut ModPoly) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn minv(a: u64, p: u64) -> u64 {
    mpow(a, p - 2, p)
}

fn mpow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn mrem(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let mut r = a.clone();
    mtrim(&mut r);
    let db = b.len() - 1;
    let lead_inv = minv(*b.last().unwrap(), p);
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() * lead_inv % p;
        for (i, bc) in b.iter().enumerate() {
            r[k + i] = (r[k + i] + p - c * bc % p) % p;
        }
        r.pop();
        mtrim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    if r.is_empty() {
        r.push(0);
    }
    r
}

fn mmul(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    mtrim(&mut out);
    out
}

fn mgcd(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    mtrim(&mut x);
    mtrim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = mrem(&x, &y, p);
        x = y;
        y = r;
    }
    let inv = minv(*x.last().unwrap(), p);
    x.iter().map(|c| c * inv % p).collect()
}

fn msub(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let n = a.len().max(b.len());
    let mut out: ModPoly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    mtrim(&mut out);
    out
}

fn mpowmod(base: &ModPoly, mut e: u64, m: &ModPoly, p: u64) -> ModPoly {
    let mut r: ModPoly = vec![1];
    let mut b = mrem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = mrem(&mmul(&r, &b, p), m, p);
        }
        b = mrem(&mmul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

/// Degrees of the irreducible factors of `f` modulo `p`, or `None` when the
/// reduction is not squarefree (or drops degree).
fn factor_degrees_mod(f: &[BigInt], p: u64) -> Option<Vec<usize>> {
    let bp = BigInt::from(p);
    let fm: ModPoly = f
        .iter()
        .map(|c| c.mod_floor(&bp).to_u64().unwrap())
        .collect();
    if *fm.last().unwrap() == 0 {
        return None;
    }
    let deriv: ModPoly = {
        let mut d: ModPoly = fm
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| (i as u64 % p) * c % p)
            .collect();
        if d.is_empty() {
            d.push(0);
        }
        mtrim(&mut d);
        d
    };
    if deriv.len() == 1 && deriv[0] == 0 {
        return None;
    }
    if mgcd(&fm, &deriv, p).len() > 1 {
        return None;
    }
    let mut degs = Vec::new();
    let mut rest = fm.clone();
    let x: ModPoly = vec![0, 1];
    let mut xp = x.clone();
    let mut k = 1;
    while rest.len() > 2 * k {
        xp = mpowmod(&xp, p, &rest, p);
        let g = mgcd(&rest, &msub(&xp, &x, p), p);
        let dg = g.len() - 1;
        if dg > 0 {
            for _ in 0..dg / k {
                degs.push(k);
            }
            rest = mdiv(&rest, &g, p);
            xp = mrem(&xp, &rest, p);
        }
        k += 1;
    }
    if rest.len() > 1 {
        degs.push(rest.len() - 1);
    }
    Some(degs)
}

fn mdiv(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let db = b.len() - 1;
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    let lead_inv = minv(*b.last().unwrap(), p);
    for k in (0..q.len()).rev() {
        let c = r[k + db] * lead_inv % p;
        q[k] = c;
        for (i, bc) in b.iter().enumerate() {
            r[k + i] = (r[k + i] + p - c * bc % p) % p;
        }
    }
    mtrim(&mut q);
    q
}

fn subset_sums(degs: &[usize]) -> BTreeSet<usize> {
    let mut s = BTreeSet::from([0usize]);
    for d in degs {
        let next: Vec<usize> = s.iter().map(|x| x + d).collect();
        s.extend(next);
    }
    s
}

const SMALL_PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Degrees `k` with `0 < k < deg f` that a rational factor of `f` could still
/// have after the modular degree-pattern sieve.
pub fn possible_factor_degrees(f: &[BigInt]) -> BTreeSet<usize> {
    let d = degree(f);
    let mut possible: BTreeSet<usize> = (1..d).collect();
    for &p in SMALL_PRIMES.iter() {
        if possible.is_empty() {
            break;
        }
        if let Some(degs) = factor_degrees_mod(f, p) {
            let sums = subset_sums(&degs);
            possible.retain(|k| sums.contains(k));
        }
    }
    possible
}

/// The N-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> Vec<BigInt> {
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = div_exact_monic(&num, &cyclotomic(d)).expect("cyclotomic division");
        }
    }
    num
}

pub fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), zp(&[-1, 1]));
        assert_eq!(cyclotomic(4), zp(&[1, 0, 1]));
        assert_eq!(cyclotomic(5), zp(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic(12), zp(&[1, 0, -1, 0, 1]));
        assert_eq!(euler_phi(12), 4);
    }

    #[test]
    fn sieve_detects_irreducible() {
        assert!(possible_factor_degrees(&zp(&[1, 0, 1])).is_empty());
        assert!(possible_factor_degrees(&zp(&[-2, 0, 0, 1])).is_empty());
        // x^4 + 1 splits modulo every prime into quadratics or linears.
        assert!(possible_factor_degrees(&zp(&[1, 0, 0, 0, 1])).contains(&2));
        // (x^2+1)(x^2+2)
        assert!(possible_factor_degrees(&zp(&[2, 0, 3, 0, 1])).contains(&2));
    }

    #[test]
    fn integer_roots() {
        assert!(has_integer_root(&zp(&[-4, 0, 1])));
        assert!(!has_integer_root(&zp(&[-2, 0, 1])));
        assert!(has_integer_root(&zp(&[0, 1])));
    }
}
