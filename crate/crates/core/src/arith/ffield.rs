//! Finite fields `F_{r^f}` realized as residue fields of `Q(zeta_p)` above `r`.
//!
//! The field is `F_r[x] / (h)` where `h` is an irreducible factor of the
//! `p`-th cyclotomic polynomial modulo `r`; the class of `x` is then a
//! primitive `p`-th root of unity, the distinguished `zeta`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::int::{inv_mod, is_prime_u64, multiplicative_order};
use crate::error::{Error, Result};

type Poly = Vec<u64>;

fn trim(p: &mut Poly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn add(a: &[u64], b: &[u64], r: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % r)
        .collect();
    trim(&mut out);
    out
}

fn sub(a: &[u64], b: &[u64], r: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + r - b.get(i).copied().unwrap_or(0)) % r)
        .collect();
    trim(&mut out);
    out
}

fn mul(a: &[u64], b: &[u64], r: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % r as u128;
        }
    }
    let mut out: Poly = out.into_iter().map(|c| c as u64).collect();
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero `m`.
fn rem(a: &[u64], m: &[u64], r: u64) -> Poly {
    let mut a = a.to_vec();
    trim(&mut a);
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], r).expect("leading coefficient invertible");
    while a.len() > dm {
        let shift = a.len() - 1 - dm;
        let q = (*a.last().unwrap() as u128 * inv_lead as u128 % r as u128) as u64;
        for (i, &c) in m.iter().enumerate() {
            let t = (q as u128 * c as u128 % r as u128) as u64;
            a[shift + i] = (a[shift + i] + r - t) % r;
        }
        trim(&mut a);
    }
    a
}

fn divide_exact(a: &[u64], m: &[u64], r: u64) -> Poly {
    let mut a = a.to_vec();
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], r).unwrap();
    let mut q = vec![0u64; a.len().saturating_sub(dm)];
    while a.len() > dm {
        let shift = a.len() - 1 - dm;
        let c = (*a.last().unwrap() as u128 * inv_lead as u128 % r as u128) as u64;
        q[shift] = c;
        for (i, &mc) in m.iter().enumerate() {
            let t = (c as u128 * mc as u128 % r as u128) as u64;
            a[shift + i] = (a[shift + i] + r - t) % r;
        }
        trim(&mut a);
    }
    trim(&mut q);
    q
}

fn monic(a: &[u64], r: u64) -> Poly {
    let inv = inv_mod(*a.last().unwrap(), r).unwrap();
    a.iter()
        .map(|&c| (c as u128 * inv as u128 % r as u128) as u64)
        .collect()
}

fn gcd(a: &[u64], b: &[u64], r: u64) -> Poly {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let t = rem(&a, &b, r);
        a = b;
        b = t;
    }
    if a.is_empty() {
        a
    } else {
        monic(&a, r)
    }
}

fn powmod(base: &[u64], exp: &BigUint, m: &[u64], r: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let b = rem(base, m, r);
    for i in (0..exp.bits()).rev() {
        acc = rem(&mul(&acc, &acc, r), m, r);
        if exp.bit(i) {
            acc = rem(&mul(&acc, &b, r), m, r);
        }
    }
    acc
}

/// Equal-degree factorization of a squarefree monic `h` whose irreducible
/// factors all have degree `f`.
fn equal_degree_factors(h: &[u64], f: usize, r: u64, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = h.len() - 1;
    if n == f {
        return vec![h.to_vec()];
    }
    loop {
        let mut a: Poly = (0..n).map(|_| rng.gen_range(0..r)).collect();
        trim(&mut a);
        if a.len() < 2 {
            continue;
        }
        let candidate = if r == 2 {
            // trace map a + a^2 + ... + a^(2^(f-1))
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..f {
                t = rem(&mul(&t, &t, r), h, r);
                acc = add(&acc, &t, r);
            }
            acc
        } else {
            let e = (BigUint::from(r).pow(f as u32) - 1u32) / 2u32;
            sub(&powmod(&a, &e, h, r), &[1], r)
        };
        let g = gcd(&candidate, h, r);
        if g.len() > 1 && g.len() < h.len() {
            let other = divide_exact(h, &g, r);
            let mut out = equal_degree_factors(&g, f, r, rng);
            out.extend(equal_degree_factors(&monic(&other, r), f, r, rng));
            return out;
        }
    }
}

/// Irreducible factors of the `p`-th cyclotomic polynomial modulo `r`, sorted
/// lexicographically by `(a_0, ..., a_{f-1})`.
pub fn cyclotomic_factors(p: u64, r: u64) -> Vec<Vec<u64>> {
    let phi: Poly = vec![1; p as usize];
    let f = multiplicative_order(r % p, p) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(p.wrapping_mul(1_000_003).wrapping_add(r));
    let mut factors = equal_degree_factors(&phi, f, r, &mut rng);
    factors.sort();
    factors
}

/// Field element as coefficients of a polynomial of degree `< f`.
pub type FfElem = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteField {
    r: u64,
    f: usize,
    modulus: Vec<u64>,
}

impl FiniteField {
    /// Residue field of `Q(zeta_p)` at a prime above `r`.
    pub fn residue_field(p: u64, r: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NonPrime(p.to_string()));
        }
        if !is_prime_u64(r) {
            return Err(Error::NonPrime(r.to_string()));
        }
        if p == r {
            return Err(Error::ExcludedPrime(r));
        }
        if p == 2 {
            return Ok(FiniteField {
                r,
                f: 1,
                modulus: vec![1 % r, 1],
            });
        }
        let modulus = cyclotomic_factors(p, r).remove(0);
        let f = modulus.len() - 1;
        Ok(FiniteField { r, f, modulus })
    }

    pub fn characteristic(&self) -> u64 {
        self.r
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.r).pow(self.f as u32)
    }

    fn reduce(&self, a: &[u64]) -> FfElem {
        let mut v = rem(a, &self.modulus, self.r);
        v.resize(self.f, 0);
        v
    }

    pub fn one(&self) -> FfElem {
        self.from_int(&BigInt::one())
    }

    pub fn from_int(&self, n: &BigInt) -> FfElem {
        let c = n.mod_floor(&BigInt::from(self.r)).to_u64().unwrap();
        self.reduce(&[c])
    }

    /// The distinguished primitive `p`-th root of unity (class of `x`).
    pub fn zeta(&self) -> FfElem {
        self.reduce(&[0, 1])
    }

    pub fn is_zero(&self, a: &FfElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, a: &FfElem, b: &FfElem) -> FfElem {
        self.reduce(&mul(a, b, self.r))
    }

    pub fn pow(&self, a: &FfElem, e: &BigUint) -> FfElem {
        let mut v = powmod(a, e, &self.modulus, self.r);
        v.resize(self.f, 0);
        v
    }

    pub fn pow_u64(&self, a: &FfElem, e: u64) -> FfElem {
        self.pow(a, &BigUint::from(e))
    }

    pub fn inv(&self, a: &FfElem) -> FfElem {
        self.pow(a, &(self.order() - 2u32))
    }

    /// `z^((|F| - 1) / gcd(p, |F| - 1)) == 1`.
    pub fn is_pth_power(&self, z: &FfElem, p: u64) -> Result<bool> {
        if self.is_zero(z) {
            return Err(Error::Zero);
        }
        let m = self.order() - 1u32;
        let g = m.gcd(&BigUint::from(p));
        Ok(self.pow(z, &(m / g)) == self.one())
    }

    /// A `p`-th root of `z` for prime `p`, or `None` when none exists.
    pub fn pth_root(&self, z: &FfElem, p: u64) -> Option<FfElem> {
        if self.is_zero(z) {
            return Some(z.clone());
        }
        let m_total = self.order() - 1u32;
        let pb = BigUint::from(p);
        if !(&m_total % &pb).is_zero() {
            let e = pb.modinv(&m_total)?;
            return Some(self.pow(z, &e));
        }
        if !self.is_pth_power(z, p).ok()? {
            return None;
        }
        // |F^x| = p^e * m with p coprime to m.
        let mut e = 0u32;
        let mut m = m_total.clone();
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        // generator of the p-Sylow subgroup
        let gamma = self.sylow_generator(p, &m, e);
        // r0^p = z * (z^m)^w where u*p = 1 + m*w
        let u = if m.is_one() {
            BigUint::zero()
        } else {
            pb.modinv(&m).unwrap()
        };
        let r0 = if m.is_one() { self.one() } else { self.pow(z, &u) };
        let err = self.mul(&self.pow_u64(&r0, p), &self.inv(z));
        // err = gamma^L with p | L; correct by gamma^(-L/p)
        let l = self.sylow_log(&err, &gamma, p, e)?;
        debug_assert!((&l % &pb).is_zero());
        let order = pb.pow(e);
        let shift = (&order - (&l / &pb) % &order) % &order;
        let root = self.mul(&r0, &self.pow(&gamma, &shift));
        debug_assert_eq!(self.pow_u64(&root, p), *z);
        Some(root)
    }

    /// Generator of the `p`-Sylow subgroup, from seeded random candidates.
    /// Small constants are a bad source: for `f > 1` the prime field can lie
    /// entirely inside the `p`-th powers.
    fn sylow_generator(&self, p: u64, m: &BigUint, e: u32) -> FfElem {
        let top = BigUint::from(p).pow(e - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.r.wrapping_mul(31).wrapping_add(self.f as u64));
        loop {
            let g: FfElem = (0..self.f).map(|_| rng.gen_range(0..self.r)).collect();
            if self.is_zero(&g) {
                continue;
            }
            let c = self.pow(&g, m);
            if self.pow(&c, &top) != self.one() {
                return c;
            }
        }
    }

    /// Discrete log of `a` in base `gamma` (order `p^e`), digit by digit.
    fn sylow_log(&self, a: &FfElem, gamma: &FfElem, p: u64, e: u32) -> Option<BigUint> {
        let pb = BigUint::from(p);
        let order = pb.pow(e);
        let base = self.pow(gamma, &pb.pow(e - 1)); // order p
        let mut l = BigUint::zero();
        for k in 0..e {
            let g_inv_l = self.pow(gamma, &((&order - &l % &order) % &order));
            let t = self.mul(a, &g_inv_l);
            let probe = self.pow(&t, &pb.pow(e - 1 - k));
            let mut digit = None;
            let mut acc = self.one();
            for d in 0..p {
                if acc == probe {
                    digit = Some(d);
                    break;
                }
                acc = self.mul(&acc, &base);
            }
            l += BigUint::from(digit?) * pb.pow(k);
        }
        Some(l)
    }
}
