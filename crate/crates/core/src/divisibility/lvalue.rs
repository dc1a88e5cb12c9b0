//! Dirichlet coefficients and a truncated series for `L(E, 1)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::tate::{global_reduction, square_table, GlobalReduction, Weierstrass};
use crate::arith::primes_up_to;
use crate::descent::CurveE2;
use crate::error::{Error, Result};

/// `a_p` of the model at `p`, using the local minimal model where the model is bad.
fn a_prime(w: &Weierstrass, red: &GlobalReduction, p: u64, table: Option<&[bool]>) -> i64 {
    if let Some(l) = red.local_at(p) {
        return l.a_p();
    }
    match table {
        Some(t) => p as i64 + 1 - count_with_table(w, p, t) as i64,
        None => p as i64 + 1 - w.count_points(p) as i64,
    }
}

fn count_with_table(w: &Weierstrass, p: u64, table: &[bool]) -> u64 {
    if p == 2 {
        return w.count_points(2);
    }
    let m = |a: BigInt| a.to_i64().map(|v| v.rem_euclid(p as i64) as u64);
    let (Some(b2), Some(b4), Some(b6)) = (m(w.b2() % p), m(w.b4() % p), m(w.b6() % p)) else {
        return w.count_points(p);
    };
    let mut n = 1 + p;
    for x in 0..p {
        let v = ((4 * x % p * x % p * x + b2 * x % p * x + 2 * b4 % p * x + b6) % p) as usize;
        if v != 0 {
            if table[v] {
                n += 1;
            } else {
                n -= 1;
            }
        }
    }
    n
}

/// `a_1, ..., a_n` (index 0 unused).
pub fn an_coefficients(w: &Weierstrass, red: &GlobalReduction, n: usize) -> Vec<i64> {
    let mut a = vec![0i64; n + 1];
    if n == 0 {
        return a;
    }
    a[1] = 1;
    let mut spf = vec![0usize; n + 1];
    for p in primes_up_to(n as u64) {
        let p = p as usize;
        let mut m = p;
        while m <= n {
            if spf[m] == 0 {
                spf[m] = p;
            }
            m += p;
        }
        let table = square_table(p as u64);
        let ap = a_prime(w, red, p as u64, Some(&table));
        let good = red.local_at(p as u64).is_none_or(|l| l.conductor_exponent == 0);
        // prime powers
        let (mut prev, mut cur) = (1i64, ap);
        let mut q = p;
        loop {
            a[q] = cur;
            let Some(nq) = q.checked_mul(p).filter(|&x| x <= n) else { break };
            let next = if good { ap * cur - p as i64 * prev } else { ap * cur };
            prev = cur;
            cur = next;
            q = nq;
        }
    }
    for m in 2..=n {
        let p = spf[m];
        let mut pk = p;
        while m % (pk * p) == 0 {
            pk *= p;
        }
        if pk != m {
            a[m] = a[pk] * a[m / pk];
        }
    }
    a
}

/// Truncated `L(E, 1)` with its diagnostics. Floating point values are
/// serialized as strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    #[serde(with = "f64_string")]
    pub estimate: f64,
    /// `|estimate(terms) - estimate(terms / 2)|`
    #[serde(with = "f64_string")]
    pub stability: f64,
    /// error bound for the tail of the series
    #[serde(with = "f64_string")]
    pub tail_bound: f64,
    /// root number consistent with the functional equation test
    #[serde(with = "crate::cert::num_string")]
    pub root_number: i8,
    /// residual of that test
    #[serde(with = "f64_string")]
    pub functional_residual: f64,
    #[serde(with = "crate::cert::num_string")]
    pub conductor: BigInt,
    #[serde(with = "crate::cert::num_string")]
    pub terms: usize,
}

pub(crate) mod f64_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{x:.12e}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `sum_{n <= terms} a_n / n * exp(-2 pi n a / sqrt(N))`.
fn partial(a: &[i64], terms: usize, scale: f64) -> f64 {
    (1..=terms.min(a.len() - 1))
        .map(|n| a[n] as f64 / n as f64 * (-(n as f64) * scale).exp())
        .sum()
}

/// Everything needed for repeated evaluations on one curve.
pub struct LSeries {
    pub conductor: BigInt,
    sqrt_n: f64,
    an: Vec<i64>,
}

impl LSeries {
    pub fn new(w: &Weierstrass, terms: usize) -> Result<Self> {
        let red = global_reduction(w)?;
        let sqrt_n = red
            .conductor
            .to_f64()
            .ok_or_else(|| Error::ConductorUnavailable("conductor too large".into()))?
            .sqrt();
        let an = an_coefficients(w, &red, terms);
        Ok(LSeries {
            conductor: red.conductor,
            sqrt_n,
            an,
        })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.an
    }

    fn s(&self, a: f64, terms: usize) -> f64 {
        partial(&self.an, terms, 2.0 * PI * a / self.sqrt_n)
    }

    pub fn evaluate(&self, terms: usize) -> LValue {
        let terms = terms.min(self.an.len() - 1);
        let s1 = self.s(1.0, terms);
        // L(1) = S(A) + w S(1/A) for every A > 0
        let a = 1.1f64;
        let (sa, sb) = (self.s(a, terms), self.s(1.0 / a, terms));
        let res_plus = (sa + sb - 2.0 * s1).abs();
        let res_minus = (sa - sb).abs();
        let (root_number, functional_residual) = if res_plus <= res_minus { (1, res_plus) } else { (-1, res_minus) };
        let estimate = if root_number == 1 { 2.0 * s1 } else { 0.0 };
        let half = if root_number == 1 { 2.0 * self.s(1.0, terms / 2) } else { 0.0 };
        // |a_n| <= d(n) sqrt(n) <= n, so the tail is bounded by a geometric series
        let q = (-2.0 * PI / self.sqrt_n).exp();
        let tail_bound = 2.0 * q.powf(terms as f64 + 1.0) / (1.0 - q);
        LValue {
            estimate,
            stability: (estimate - half).abs(),
            tail_bound,
            root_number,
            functional_residual,
            conductor: self.conductor.clone(),
            terms,
        }
    }
}

/// `L(E, 1)` from `terms` coefficients, with the stability against `terms / 2`.
pub fn l_value_approx(e: &CurveE2, terms: usize) -> Result<LValue> {
    if terms < 2 {
        return Err(Error::InvalidInput("at least two terms are needed".into()));
    }
    let w = Weierstrass::from_big(e.weierstrass());
    Ok(LSeries::new(&w, terms)?.evaluate(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `q prod (1 - q^n)^2 (1 - q^{11 n})^2`, the weight 2 newform of level 11.
    fn eta_11(n: usize) -> Vec<i64> {
        let mut c = vec![0i64; n + 1];
        c[1] = 1;
        let mul_factor = |c: &mut Vec<i64>, k: usize| {
            // multiply by (1 - q^k)
            for i in (k..=n).rev() {
                c[i] -= c[i - k];
            }
        };
        for m in 1..n {
            mul_factor(&mut c, m);
            mul_factor(&mut c, m);
            if 11 * m < n {
                mul_factor(&mut c, 11 * m);
                mul_factor(&mut c, 11 * m);
            }
        }
        c
    }

    #[test]
    fn level_11_matches_eta_product() {
        let w = Weierstrass::new([0, -1, 1, -10, -20]);
        let s = LSeries::new(&w, 400).unwrap();
        assert_eq!(s.conductor, 11.into());
        assert_eq!(&s.coefficients()[1..], &eta_11(400)[1..]);
        let l = s.evaluate(400);
        assert_eq!(l.root_number, 1);
        assert!((l.estimate - 0.2538418608559).abs() < 1e-9, "{}", l.estimate);
    }

    #[test]
    fn rank_one_curve_has_sign_minus() {
        // 37a1
        let w = Weierstrass::new([0, 0, 1, -1, 0]);
        let l = LSeries::new(&w, 500).unwrap().evaluate(500);
        assert_eq!(l.root_number, -1);
    }

    #[test]
    fn coefficients_are_multiplicative() {
        let e = CurveE2::parse("80 205").unwrap();
        let w = Weierstrass::from_big(e.weierstrass());
        let s = LSeries::new(&w, 600).unwrap();
        let a = s.coefficients();
        assert_eq!(a[1], 1);
        for m in 2..25usize {
            for n in 2..25usize {
                if num_integer::gcd(m, n) == 1 && m * n <= 600 {
                    assert_eq!(a[m * n], a[m] * a[n]);
                }
            }
        }
        // direct counts at a few good primes
        for p in [3u64, 7, 11, 13, 101] {
            let mut n = 1i64;
            for x in 0..p as i64 {
                let r = (x * (x + 80) * (x + 205)).rem_euclid(p as i64);
                n += (0..p as i64).filter(|y| (y * y).rem_euclid(p as i64) == r).count() as i64;
            }
            assert_eq!(a[p as usize], p as i64 + 1 - n, "p = {p}");
        }
    }

    #[test]
    fn example_has_nonzero_stable_value() {
        let e = CurveE2::parse("80 205").unwrap();
        let l = l_value_approx(&e, 4000).unwrap();
        assert_eq!(l.conductor, 1025.into());
        assert_eq!(l.root_number, 1);
        assert!(l.estimate.abs() > 0.05);
        assert!(l.stability < 1e-3);
    }
}
