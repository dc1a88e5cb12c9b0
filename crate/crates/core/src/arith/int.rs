//! Integer primitives: primality, factorization, square-free parts and the
//! Jacobi symbol.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type ExactInt = BigInt;

/// Trial division limit used before switching to Pollard rho.
const TRIAL_LIMIT: u64 = 1_000_000;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = ((a % m) as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

fn miller_rabin_u64(n: u64, a: u64) -> bool {
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    let mut x = pow_mod(a % n, d, n);
    if x == 1 || x == n - 1 || a.is_multiple_of(n) {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic for all `u64` (the first twelve prime bases suffice below 3.3e24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&a| miller_rabin_u64(n, a))
}

fn strong_probable_prime(n: &BigUint, base: u64) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(base).modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

fn jacobi_big(a: &BigInt, n: &BigUint) -> i8 {
    jacobi(a, &BigInt::from(n.clone()))
}

fn half_mod(x: BigInt, n: &BigInt) -> BigInt {
    let x = x.mod_floor(n);
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters.
fn strong_lucas(n: &BigUint) -> bool {
    let nn = BigInt::from(n.clone());
    let mut d_param: i64 = 5;
    loop {
        let j = jacobi_big(&BigInt::from(d_param), n);
        if j == -1 {
            break;
        }
        if j == 0 && BigInt::from(d_param.abs()) != nn {
            return false;
        }
        d_param = if d_param > 0 { -(d_param + 2) } else { -d_param + 2 };
    }
    let p = BigInt::one();
    let q = BigInt::from((1 - d_param) / 4);
    let dd = BigInt::from(d_param);
    let n_plus_1: BigInt = &nn + 1;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let d = &n_plus_1 >> s;
    let bits = d.bits();
    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = q.mod_floor(&nn);
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(&nn);
        v = (&v * &v - &qk * BigInt::from(2)).mod_floor(&nn);
        qk = (&qk * &qk).mod_floor(&nn);
        if d.bit(i) {
            let nu = half_mod(&p * &u + &v, &nn);
            let nv = half_mod(&dd * &u + &p * &v, &nn);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(&nn);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - &qk * BigInt::from(2)).mod_floor(&nn);
        qk = (&qk * &qk).mod_floor(&nn);
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// Primality of |n|: deterministic Miller-Rabin below 2^64, BPSW above.
pub fn is_prime(n: &BigInt) -> bool {
    let m = n.magnitude();
    if let Some(small) = m.to_u64() {
        return is_prime_u64(small);
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if (m % p).is_zero() {
            return false;
        }
    }
    let root = Roots::sqrt(m);
    if &root * &root == *m {
        return false;
    }
    strong_probable_prime(m, 2) && strong_lucas(m)
}

/// A signed factorization `unit * prod(prime^exp)` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: i8,
    pub factors: Vec<(ExactInt, u32)>,
}

impl Factorization {
    pub fn value(&self) -> ExactInt {
        let mut acc = BigInt::from(self.unit);
        for (p, e) in &self.factors {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        acc
    }

    pub fn primes(&self) -> impl Iterator<Item = &ExactInt> {
        self.factors.iter().map(|(p, _)| p)
    }
}

fn pollard_brent(n: &BigUint) -> Option<BigUint> {
    let one = BigUint::one();
    if n.is_even() {
        return Some(BigUint::from(2u8));
    }
    for c in 1u32..64 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u8);
        let mut r: u64 = 1;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        const M: u64 = 128;
        let mut iterations: u64 = 0;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..M.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += M;
            }
            r *= 2;
            iterations += r;
            if iterations > 1 << 26 {
                break;
            }
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return Some(g);
        }
    }
    None
}

fn split_into(n: BigUint, out: &mut Vec<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if is_prime(&BigInt::from(n.clone())) {
        out.push(n);
        return Ok(());
    }
    let d = pollard_brent(&n).ok_or_else(|| Error::BoundExceeded(n.to_string()))?;
    let rest = &n / &d;
    split_into(d, out)?;
    split_into(rest, out)
}

/// Default desk-scale bound on |n| for [`factorize`].
pub fn default_factor_bound() -> BigInt {
    BigInt::one() << 128
}

pub fn factorize(n: &ExactInt) -> Result<Factorization> {
    factorize_within(n, &default_factor_bound())
}

pub fn factorize_within(n: &ExactInt, bound: &ExactInt) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    if n.abs() > *bound {
        return Err(Error::BoundExceeded(n.to_string()));
    }
    let unit = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut primes: Vec<BigUint> = Vec::new();
    if let Some(mut small) = m.to_u64() {
        let mut p = 2u64;
        while p <= TRIAL_LIMIT && p * p <= small {
            while small % p == 0 {
                primes.push(BigUint::from(p));
                small /= p;
            }
            p += if p == 2 { 1 } else { 2 };
        }
        m = BigUint::from(small);
        if small > 1 && (small < TRIAL_LIMIT * TRIAL_LIMIT || is_prime_u64(small)) {
            primes.push(m.clone());
            m = BigUint::one();
        }
    } else {
        let mut p = 2u64;
        while p <= TRIAL_LIMIT {
            while (&m % p).is_zero() {
                primes.push(BigUint::from(p));
                m /= p;
            }
            if BigUint::from(p) * p > m {
                break;
            }
            p += if p == 2 { 1 } else { 2 };
        }
    }
    split_into(m, &mut primes)?;
    primes.sort();
    let mut factors: Vec<(ExactInt, u32)> = Vec::new();
    for p in primes {
        let p = BigInt::from(p);
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { unit, factors })
}

/// The squarefree `d` with `n / d` a positive square.
pub fn squarefree_part(n: &ExactInt) -> Result<ExactInt> {
    let f = factorize(n)?;
    let mut d = BigInt::from(f.unit);
    for (p, e) in &f.factors {
        if e % 2 == 1 {
            d *= p;
        }
    }
    Ok(d)
}

/// `v_p(n)` together with the cofactor `n / p^v`. `n` must be nonzero.
pub fn valuation(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return (v, m);
        }
        m = q;
        v += 1;
    }
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
pub fn jacobi(a: &ExactInt, n: &ExactInt) -> i8 {
    assert!(n.is_positive() && n.is_odd(), "jacobi: n must be odd and positive");
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let n8 = (&n % 8u8).to_u8().unwrap();
            if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u8).to_u8() == Some(3) && (&n % 4u8).to_u8() == Some(3) {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Jacobi symbol on machine integers.
pub fn jacobi_i64(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi: n must be odd");
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Legendre symbol of a big integer modulo an odd prime `p` given as `u64`.
pub fn legendre_big(a: &BigInt, p: u64) -> i8 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    jacobi_i64(r as i64, p)
}

/// Primes up to `n` inclusive.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Distinct prime factors of a `u64`, by trial division.
pub fn prime_divisors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of `a` modulo `m`; `a` must be a unit.
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    let phi = euler_phi(m);
    let mut ord = phi;
    for q in prime_divisors_u64(phi) {
        while ord.is_multiple_of(q) && pow_mod(a, ord / q, m) == 1 {
            ord /= q;
        }
    }
    ord
}

pub fn euler_phi(m: u64) -> u64 {
    prime_divisors_u64(m)
        .into_iter()
        .fold(m, |acc, p| acc / p * (p - 1))
}

/// Least positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| jacobi_i64(a as i64, p) == -1).unwrap()
}
