//! Dense univariate polynomials with integer coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficients stored constant term first; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Coefficients given highest degree first, e.g. `[a4, a3, a2, a1, a0]`.
    pub fn from_high_first(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().rev().cloned().collect())
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Coefficients of `f(x0 + t)` as a polynomial in `t`.
    pub fn taylor_at(&self, x0: &BigInt) -> Vec<BigInt> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * x0;
                c[j] += t;
            }
        }
        c
    }

    /// `x^n f(1/x)` where `n` is the supplied formal degree.
    pub fn reversed(&self, formal_degree: usize) -> Self {
        let mut c = vec![BigInt::zero(); formal_degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[formal_degree - i] = a.clone();
        }
        Self::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `a^(n-1) f(y / a)` for leading coefficient `a`: monic with integer
    /// coefficients, roots scaled by `a`.
    pub fn monic_scaled(&self) -> Self {
        let n = self.degree().unwrap_or(0);
        let a = self.leading();
        let mut out = vec![BigInt::zero(); n + 1];
        let mut p = BigInt::one();
        for i in (0..n).rev() {
            out[i] = &self.coeffs[i] * &p;
            p *= &a;
        }
        out[n] = BigInt::one();
        Self::new(out)
    }

    fn to_rat(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }

    pub fn discriminant(&self) -> BigInt {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return BigInt::zero(),
        };
        let res = resultant(&self.to_rat(), &self.derivative().to_rat());
        let a = BigRational::from_integer(self.leading());
        let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
        let d = res / a * BigRational::from_integer(BigInt::from(sign));
        debug_assert!(d.is_integer());
        d.to_integer()
    }

    /// Number of distinct real roots, via a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        let seq = sturm_sequence(self);
        let at_neg = sign_changes(seq.iter().map(|p| sign_at_neg_inf(p)));
        let at_pos = sign_changes(seq.iter().map(|p| rat_sign(p.last().unwrap())));
        at_neg - at_pos
    }

    /// Disjoint rational intervals `(lo, hi]`, each containing exactly one
    /// real root. Width at most `width`.
    pub fn isolate_real_roots(&self, width: &BigRational) -> Vec<(BigRational, BigRational)> {
        let seq = sturm_sequence(self);
        let bound = self.cauchy_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((lo, hi)) = stack.pop() {
            let k = sturm_count(&seq, &lo, &hi);
            if k == 0 {
                continue;
            }
            if k == 1 && &hi - &lo <= *width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        out.sort();
        out
    }

    fn cauchy_bound(&self) -> BigRational {
        let a = self.leading().abs();
        let m = self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default();
        BigRational::new(m, a) + BigRational::one()
    }

    /// Parses "11x^2 - 67x + 31" style input.
    pub fn parse(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut coeffs: Vec<BigInt> = Vec::new();
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let (coef, deg) = if let Some(pos) = body.find('x') {
                let c = body[..pos].trim_end_matches('*');
                let coef = if c.is_empty() {
                    BigInt::one()
                } else {
                    c.parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad coefficient in '{t}'")))?
                };
                let rest = &body[pos + 1..];
                let deg = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|e| e.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad exponent in '{t}'")))?
                };
                (coef, deg)
            } else {
                let coef = body
                    .parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad constant '{t}'")))?;
                (coef, 0)
            };
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, BigInt::zero());
            }
            coeffs[deg] += if neg { -coef } else { coef };
        }
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coef = !a.is_one() || i == 0;
            if show_coef {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let q = r.last().unwrap() / &lb;
        for (i, c) in b.iter().enumerate() {
            let t = &q * c;
            r[shift + i] -= t;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Resultant over Q by the Euclidean algorithm.
fn resultant(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let a = trim(a.to_vec());
    let b = trim(b.to_vec());
    if a.is_empty() || b.is_empty() {
        return BigRational::zero();
    }
    let da = a.len() - 1;
    let db = b.len() - 1;
    if db == 0 {
        return num_traits::pow(b[0].clone(), da);
    }
    if da < db {
        let s = if (da * db) % 2 == 1 { -1 } else { 1 };
        return resultant(&b, &a) * BigRational::from_integer(BigInt::from(s));
    }
    let r = poly_rem(&a, &b);
    if r.is_empty() {
        return BigRational::zero();
    }
    let dr = r.len() - 1;
    let s = if (da * db) % 2 == 1 { -1 } else { 1 };
    let lb = b[db].clone();
    resultant(&b, &r) * num_traits::pow(lb, da - dr) * BigRational::from_integer(BigInt::from(s))
}

fn sturm_sequence(f: &IntPoly) -> Vec<Vec<BigRational>> {
    let mut seq = vec![f.to_rat(), f.derivative().to_rat()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        if seq[n - 1].len() == 1 {
            break;
        }
        let r = poly_rem(&seq[n - 2], &seq[n - 1]);
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn eval_rat_vec(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn rat_sign(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn sign_at_neg_inf(p: &[BigRational]) -> i8 {
    let s = rat_sign(p.last().unwrap());
    if (p.len() - 1) % 2 == 1 {
        -s
    } else {
        s
    }
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Roots in `(lo, hi]`.
fn sturm_count(seq: &[Vec<BigRational>], lo: &BigRational, hi: &BigRational) -> usize {
    let at = |x: &BigRational| sign_changes(seq.iter().map(|p| rat_sign(&eval_rat_vec(p, x))));
    at(lo) - at(hi)
}

/// `v_p(x)` of a nonzero integer with `p` given as a `BigInt`.
pub fn val_big(x: &BigInt, p: &BigInt) -> u32 {
    let mut v = 0;
    let mut m = x.clone();
    while m.is_multiple_of(p) && !m.is_zero() {
        m /= p;
        v += 1;
    }
    v
}
