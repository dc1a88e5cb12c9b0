//! Tate's algorithm: local minimal models, Kodaira symbols, conductor
//! exponents and the local factor `a_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, jacobi_i64};
use crate::error::{Error, Result};
use crate::local::vp;

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weierstrass {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
}

impl Weierstrass {
    pub fn new(a: [i64; 5]) -> Self {
        Self::from_big(a.map(BigInt::from))
    }

    pub fn from_big(a: [BigInt; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a;
        Weierstrass { a1, a2, a3, a4, a6 }
    }

    pub fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + &self.a2 * 4
    }
    pub fn b4(&self) -> BigInt {
        &self.a4 * 2 + &self.a1 * &self.a3
    }
    pub fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + &self.a6 * 4
    }
    pub fn b8(&self) -> BigInt {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        a1 * a1 * a6 + a2 * a6 * 4 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }
    pub fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - self.b4() * 24
    }
    pub fn c6(&self) -> BigInt {
        let b2 = self.b2();
        -(&b2 * &b2 * &b2) + &b2 * self.b4() * 36 - self.b6() * 216
    }
    pub fn discriminant(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - &b4 * &b4 * &b4 * 8 - &b6 * &b6 * 27 + &b2 * &b4 * &b6 * 9
    }

    /// Substitution `x = x' + r`, `y = y' + s x' + t`.
    pub fn transform(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        Weierstrass {
            a1: a1 + s * 2,
            a2: a2 - s * a1 + r * 3 - s * s,
            a3: a3 + r * a1 + t * 2,
            a4: a4 - s * a3 + r * a2 * 2 - (t + r * s) * a1 + r * r * 3 - s * t * 2,
            a6: a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
        }
    }

    /// `a_i / p^i`.
    fn scale_down(&self, p: &BigInt) -> Self {
        let d = |a: &BigInt, k: u32| {
            let (q, r) = a.div_rem(&p.pow(k));
            debug_assert!(r.is_zero());
            q
        };
        Weierstrass {
            a1: d(&self.a1, 1),
            a2: d(&self.a2, 2),
            a3: d(&self.a3, 3),
            a4: d(&self.a4, 4),
            a6: d(&self.a6, 6),
        }
    }

    /// `#E(F_p)` of the reduction, for `p` of good reduction of this model.
    pub fn count_points(&self, p: u64) -> u64 {
        let m = |a: &BigInt| a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
        if p == 2 {
            let (a1, a2, a3, a4, a6) = (m(&self.a1), m(&self.a2), m(&self.a3), m(&self.a4), m(&self.a6));
            let mut n = 1;
            for x in 0..2u64 {
                for y in 0..2u64 {
                    let l = y * y + a1 * x * y + a3 * y;
                    let r = x * x * x + a2 * x * x + a4 * x + a6;
                    if (l + 2 - r % 2) % 2 == 0 {
                        n += 1;
                    }
                }
            }
            return n;
        }
        // y'^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
        let (b2, b4, b6) = (m(&self.b2()), m(&self.b4()), m(&self.b6()));
        let table = square_table(p);
        let mut n = 1 + p;
        for x in 0..p {
            let v = ((4 * x % p * x % p * x + b2 * x % p * x + 2 * b4 % p * x + b6) % p) as usize;
            match (v, table[v]) {
                (0, _) => {}
                (_, true) => n += 1,
                (_, false) => n -= 1,
            }
        }
        n
    }
}

/// `table[a]` is whether `a` is a nonzero square mod `p`.
pub fn square_table(p: u64) -> Vec<bool> {
    let mut t = vec![false; p as usize];
    for y in 1..p {
        t[(y * y % p) as usize] = true;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Good,
    Split,
    NonSplit,
    Additive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub p: u64,
    pub conductor_exponent: u32,
    pub kodaira: String,
    pub tamagawa: u32,
    pub reduction: Reduction,
    /// `v_p` of the minimal discriminant
    pub min_disc_valuation: u32,
    pub minimal: Weierstrass,
}

impl LocalData {
    pub fn a_p(&self) -> i64 {
        match self.reduction {
            Reduction::Good => self.p as i64 + 1 - self.minimal.count_points(self.p) as i64,
            Reduction::Split => 1,
            Reduction::NonSplit => -1,
            Reduction::Additive => 0,
        }
    }
}

fn val(x: &BigInt, p: u64) -> u32 {
    vp(x, p).unwrap_or(u32::MAX)
}

fn modp(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Roots mod `p` of `a x^2 + b x + c`.
fn quad_roots(a: &BigInt, b: &BigInt, c: &BigInt, p: u64) -> Vec<u64> {
    let (a, b, c) = (modp(a, p), modp(b, p), modp(c, p));
    if p > 2 && a != 0 {
        let disc = (b * b % p + p - 4 * a % p * c % p) % p;
        if disc != 0 && jacobi_i64(disc as i64, p) == -1 {
            return vec![];
        }
    }
    (0..p).filter(|&x| (a * x % p * x + b * x + c).is_multiple_of(p)).collect()
}

fn exact_div(a: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(d);
    debug_assert!(r.is_zero(), "{a} not divisible by {d}");
    q
}

/// Tate's algorithm at `p` on the model `w`.
pub fn tate(w: &Weierstrass, p: u64) -> Result<LocalData> {
    let pb = BigInt::from(p);
    let mut e = w.clone();
    let zero = BigInt::zero();
    loop {
        let n = val(&e.discriminant(), p);
        if n == u32::MAX {
            return Err(Error::DegenerateCurve);
        }
        let done = |f: u32, kodaira: String, c: u32, red: Reduction, e: Weierstrass| LocalData {
            p,
            conductor_exponent: f,
            kodaira,
            tamagawa: c,
            reduction: red,
            min_disc_valuation: n,
            minimal: e,
        };
        if n == 0 {
            return Ok(done(0, "I0".into(), 1, Reduction::Good, e));
        }
        // move the singular point of the reduction to (0, 0)
        let (r, t) = singular_point(&e, p);
        e = e.transform(&BigInt::from(r), &zero, &BigInt::from(t));
        if val(&e.c4(), p) == 0 {
            let split = !quad_roots(&BigInt::one(), &e.a1, &-&e.a2, p).is_empty();
            let c = if split { n } else if n % 2 == 1 { 1 } else { 2 };
            let red = if split { Reduction::Split } else { Reduction::NonSplit };
            return Ok(done(1, format!("I{n}"), c, red, e));
        }
        if val(&e.a6, p) < 2 {
            return Ok(done(n, "II".into(), 1, Reduction::Additive, e));
        }
        if val(&e.b8(), p) < 3 {
            return Ok(done(n - 1, "III".into(), 2, Reduction::Additive, e));
        }
        if val(&e.b6(), p) < 3 {
            let a3 = exact_div(&e.a3, &pb);
            let a6 = exact_div(&e.a6, &pb.pow(2));
            let c = if quad_roots(&BigInt::one(), &a3, &-a6, p).is_empty() { 1 } else { 3 };
            return Ok(done(n - 2, "IV".into(), c, Reduction::Additive, e));
        }
        // p | a1, a2; p^2 | a3, a4; p^3 | a6
        e = step_six(&e, p)?;
        let a2 = exact_div(&e.a2, &pb);
        let a4 = exact_div(&e.a4, &pb.pow(2));
        let a6 = exact_div(&e.a6, &pb.pow(3));
        let cubic = |x: u64| -> u64 {
            let (b, c, d) = (modp(&a2, p), modp(&a4, p), modp(&a6, p));
            (x * x % p * x + b * x % p * x + c * x + d) % p
        };
        let deriv = |x: u64| -> u64 {
            let (b, c) = (modp(&a2, p), modp(&a4, p));
            (3 * x % p * x + 2 * b * x + c) % p
        };
        let roots: Vec<u64> = (0..p).filter(|&x| cubic(x) == 0).collect();
        let multiple = roots.iter().copied().find(|&x| deriv(x) == 0);
        let Some(alpha) = multiple else {
            let c = 1 + roots.len() as u32;
            return Ok(done(n - 4, "I0*".into(), c, Reduction::Additive, e));
        };
        let triple = (3 * alpha + modp(&a2, p)).is_multiple_of(p);
        e = e.transform(&(&pb * alpha), &zero, &zero);
        if !triple {
            let (m, c) = inm_star(&mut e, p);
            return Ok(done(n - m - 4, format!("I{m}*"), c, Reduction::Additive, e));
        }
        let a3 = exact_div(&e.a3, &pb.pow(2));
        let a6 = exact_div(&e.a6, &pb.pow(4));
        let disc: BigInt = &a3 * &a3 + &a6 * 4;
        let disc = disc.mod_floor(&pb);
        if !disc.is_zero() {
            let c = if quad_roots(&BigInt::one(), &a3, &-&a6, p).is_empty() { 1 } else { 3 };
            return Ok(done(n - 6, "IV*".into(), c, Reduction::Additive, e));
        }
        let beta = quad_roots(&BigInt::one(), &a3, &-&a6, p)[0];
        e = e.transform(&zero, &zero, &(pb.pow(2) * beta));
        if val(&e.a4, p) < 4 {
            return Ok(done(n - 7, "III*".into(), 2, Reduction::Additive, e));
        }
        if val(&e.a6, p) < 6 {
            return Ok(done(n - 8, "II*".into(), 1, Reduction::Additive, e));
        }
        e = e.scale_down(&pb);
    }
}

/// `(r, t)` placing a singular point of the reduction at the origin.
fn singular_point(e: &Weierstrass, p: u64) -> (u64, u64) {
    if p >= 5 {
        let inv = |a: u64| crate::arith::inv_mod(a % p, p).expect("unit");
        let (b2, c4, c6) = (modp(&e.b2(), p), modp(&e.c4(), p), modp(&e.c6(), p));
        let r = if c4 == 0 {
            (p - b2 * inv(12) % p) % p
        } else {
            let num = (c6 + b2 * c4) % p;
            (p - num * inv(12 * c4 % p) % p) % p
        };
        let a1 = modp(&e.a1, p);
        let a3 = modp(&e.a3, p);
        let t = (p - inv(2) * ((a1 * r + a3) % p) % p) % p;
        return (r, t);
    }
    // brute force over the singular points of the reduction mod 2 or 3
    let m = |a: &BigInt| modp(a, p);
    let (a1, a2, a3, a4, a6) = (m(&e.a1), m(&e.a2), m(&e.a3), m(&e.a4), m(&e.a6));
    for x in 0..p {
        for y in 0..p {
            let f = (y * y + a1 * x * y + a3 * y + 3 * p * p * p - x * x * x - a2 * x * x - a4 * x - a6) % p;
            let fx = (a1 * y + 3 * p * p - 3 * x * x - 2 * a2 * x - a4) % p;
            let fy = (2 * y + a1 * x + a3) % p;
            if f == 0 && fx == 0 && fy == 0 {
                return (x, y);
            }
        }
    }
    unreachable!("singular reduction has a singular point")
}

fn step_six(e: &Weierstrass, p: u64) -> Result<Weierstrass> {
    let ok = |w: &Weierstrass| {
        val(&w.a1, p) >= 1
            && val(&w.a2, p) >= 1
            && val(&w.a3, p) >= 2
            && val(&w.a4, p) >= 2
            && val(&w.a6, p) >= 3
    };
    let zero = BigInt::zero();
    if p > 2 {
        let pb = BigInt::from(p);
        let half = BigInt::from(p.div_ceil(2));
        let s = (-&e.a1 * &half).mod_floor(&pb);
        let p2 = &pb * &pb;
        let t = (-&e.a3 * &half).mod_floor(&p2);
        let w = e.transform(&zero, &s, &t);
        if ok(&w) {
            return Ok(w);
        }
    }
    for s in 0..p {
        for t in 0..p * p {
            let w = e.transform(&zero, &BigInt::from(s), &BigInt::from(t));
            if ok(&w) {
                return Ok(w);
            }
        }
    }
    Err(Error::ConductorUnavailable(format!("Tate's algorithm failed at p = {p}")))
}

/// Subprocedure for `I_m*`; returns `(m, c)`.
fn inm_star(e: &mut Weierstrass, p: u64) -> (u32, u32) {
    let pb = BigInt::from(p);
    let zero = BigInt::zero();
    let mut m = 1u32;
    let mut mx = &pb * &pb;
    let mut my = mx.clone();
    loop {
        let xa2 = exact_div(&e.a2, &pb);
        let xa3 = exact_div(&e.a3, &my);
        let xa6 = exact_div(&e.a6, &(&mx * &my));
        let d: BigInt = &xa3 * &xa3 + &xa6 * 4;
        if !d.mod_floor(&pb).is_zero() {
            let c = if quad_roots(&BigInt::one(), &xa3, &-&xa6, p).is_empty() { 2 } else { 4 };
            return (m, c);
        }
        let y0 = quad_roots(&BigInt::one(), &xa3, &-&xa6, p)[0];
        *e = e.transform(&zero, &zero, &(&my * y0));
        my *= &pb;
        m += 1;
        let xa2b = xa2;
        let xa4 = exact_div(&e.a4, &(&pb * &mx));
        let xa6 = exact_div(&e.a6, &(&mx * &my));
        let d: BigInt = &xa4 * &xa4 - &xa2b * &xa6 * 4;
        if !d.mod_floor(&pb).is_zero() {
            let c = if quad_roots(&xa2b, &xa4, &xa6, p).is_empty() { 2 } else { 4 };
            return (m, c);
        }
        let x0 = quad_roots(&xa2b, &xa4, &xa6, p)[0];
        *e = e.transform(&(&mx * x0), &zero, &zero);
        mx *= &pb;
        m += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalReduction {
    pub conductor: BigInt,
    pub local: Vec<LocalData>,
}

impl GlobalReduction {
    pub fn local_at(&self, p: u64) -> Option<&LocalData> {
        self.local.iter().find(|l| l.p == p)
    }
}

/// Local data at every prime dividing the discriminant of `w`.
pub fn global_reduction(w: &Weierstrass) -> Result<GlobalReduction> {
    let disc = w.discriminant();
    if disc.is_zero() {
        return Err(Error::DegenerateCurve);
    }
    let f = factorize(&disc)?;
    let mut local = Vec::new();
    let mut conductor = BigInt::one();
    for p in f.primes() {
        let p = p
            .to_u64()
            .ok_or_else(|| Error::ConductorUnavailable(format!("prime {p} too large")))?;
        let d = tate(w, p)?;
        conductor *= BigInt::from(p).pow(d.conductor_exponent);
        local.push(d);
    }
    debug_assert!(conductor.is_positive());
    Ok(GlobalReduction { conductor, local })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_ab(a: i64, b: i64) -> Weierstrass {
        Weierstrass::new([0, a + b, 0, a * b, 0])
    }

    #[test]
    fn conductors() {
        assert_eq!(global_reduction(&curve_ab(80, 205)).unwrap().conductor, 1025.into());
        // y^2 = x^3 - x
        assert_eq!(global_reduction(&curve_ab(1, -1)).unwrap().conductor, 32.into());
        // y^2 = x^3 - 25x
        assert_eq!(global_reduction(&curve_ab(5, -5)).unwrap().conductor, 800.into());
        // 11a1: y^2 + y = x^3 - x^2 - 10x - 20
        let g = global_reduction(&Weierstrass::new([0, -1, 1, -10, -20])).unwrap();
        assert_eq!(g.conductor, 11.into());
        let l = g.local_at(11).unwrap();
        assert_eq!(l.kodaira, "I5");
        assert_eq!(l.reduction, Reduction::Split);
        // 37a1: y^2 + y = x^3 - x
        let g = global_reduction(&Weierstrass::new([0, 0, 1, -1, 0])).unwrap();
        assert_eq!(g.conductor, 37.into());
    }

    #[test]
    fn example_is_nonminimal_and_good_at_two() {
        let g = global_reduction(&curve_ab(80, 205)).unwrap();
        let l2 = g.local_at(2).unwrap();
        assert_eq!(l2.reduction, Reduction::Good);
        assert_eq!(l2.min_disc_valuation, 0);
        let l5 = g.local_at(5).unwrap();
        assert_eq!(l5.conductor_exponent, 2);
        assert_eq!(g.local_at(41).unwrap().conductor_exponent, 1);
    }

    #[test]
    fn a3_of_the_example_by_direct_count() {
        let w = curve_ab(80, 205);
        // affine points of y^2 = x(x+80)(x+205) mod 3, plus infinity
        let mut n = 1;
        for x in 0..3i64 {
            for y in 0..3i64 {
                if (y * y - x * (x + 80) * (x + 205)).rem_euclid(3) == 0 {
                    n += 1;
                }
            }
        }
        assert_eq!(w.count_points(3), n as u64);
    }

    #[test]
    fn additive_types_are_consistent_with_ogg() {
        // Ogg: f = v(disc) + 1 - m with m the number of components
        let comps = |k: &str| -> u32 {
            match k {
                "II" | "II*" => if k == "II" { 1 } else { 9 },
                "III" => 2,
                "IV" => 3,
                "III*" => 8,
                "IV*" => 7,
                "I0*" => 5,
                s if s.ends_with('*') => s[1..s.len() - 1].parse::<u32>().unwrap() + 5,
                s => s[1..].parse::<u32>().unwrap(),
            }
        };
        for (a, b) in [(1, -1), (5, -5), (80, 205), (3, 12), (7, 63), (2, 18), (9, 36), (6, 10)] {
            let w = curve_ab(a, b);
            for l in global_reduction(&w).unwrap().local {
                if l.reduction == Reduction::Additive && l.p > 3 {
                    let m = comps(&l.kodaira);
                    assert_eq!(l.conductor_exponent, l.min_disc_valuation + 1 - m, "{a} {b} at {}: {}", l.p, l.kodaira);
                }
            }
        }
    }
}
