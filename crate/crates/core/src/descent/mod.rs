//! 2-descent on elliptic curves with full rational 2-torsion.

pub mod f2;
mod selmer;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, squarefree_part, ExactRat};
use crate::error::{Error, Result};
use crate::local::{square_class, Place, SquareClassPair};

pub(crate) use selmer::preimage;
pub use selmer::{
    local_image, selmer2, selmer2_with_order, sha2_classes, ClassSpace, LocalImage, SelmerGroup, ShaCoset,
};

/// `y^2 = (x - e1)(x - e2)(x - e3)` with distinct integer roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct CurveE2 {
    roots: [BigInt; 3],
}

impl CurveE2 {
    pub fn new(e1: BigInt, e2: BigInt, e3: BigInt) -> Result<Self> {
        if e1 == e2 || e1 == e3 || e2 == e3 {
            return Err(Error::DegenerateCurve);
        }
        Ok(CurveE2 {
            roots: [e1, e2, e3],
        })
    }

    /// `y^2 = x(x + a)(x + b)`.
    pub fn from_ab(a: BigInt, b: BigInt) -> Result<Self> {
        Self::new(BigInt::zero(), -a, -b)
    }

    /// `"e1 e2 e3"` or `"a b"`.
    pub fn parse(s: &str) -> Result<Self> {
        let nums = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad integer '{t}' in curve")))
            })
            .collect::<Result<Vec<_>>>()?;
        match nums.as_slice() {
            [a, b] => Self::from_ab(a.clone(), b.clone()),
            [e1, e2, e3] => Self::new(e1.clone(), e2.clone(), e3.clone()),
            _ => Err(Error::Parse(format!(
                "curve needs \"e1 e2 e3\" or \"a b\", got '{s}'"
            ))),
        }
    }

    pub fn roots(&self) -> &[BigInt; 3] {
        &self.roots
    }

    /// `(a, b)` with `y^2 = x(x + a)(x + b)` after moving `e1` to 0.
    pub fn shifted_ab(&self) -> (BigInt, BigInt) {
        let [e1, e2, e3] = &self.roots;
        (e1 - e2, e1 - e3)
    }

    /// `(e1 - e2)(e1 - e3)(e2 - e3)`.
    pub fn root_product(&self) -> BigInt {
        let [e1, e2, e3] = &self.roots;
        (e1 - e2) * (e1 - e3) * (e2 - e3)
    }

    pub fn discriminant(&self) -> BigInt {
        let d = self.root_product();
        &d * &d * 16
    }

    /// `[a1, a2, a3, a4, a6]` of the given model.
    pub fn weierstrass(&self) -> [BigInt; 5] {
        let [e1, e2, e3] = &self.roots;
        [
            BigInt::zero(),
            -(e1 + e2 + e3),
            BigInt::zero(),
            e1 * e2 + e1 * e3 + e2 * e3,
            -(e1 * e2 * e3),
        ]
    }

    /// `S`: the real place and the primes dividing `2 (e1-e2)(e1-e3)(e2-e3)`,
    /// finite primes ascending, real last.
    pub fn bad_places(&self) -> Result<Vec<Place>> {
        let mut out = vec![];
        for p in self.bad_primes()? {
            out.push(Place::Finite(p));
        }
        out.push(Place::Real);
        Ok(out)
    }

    pub fn bad_primes(&self) -> Result<Vec<u64>> {
        let f = factorize(&(self.root_product() * 2))?;
        f.primes()
            .map(|p| p.to_u64().ok_or_else(|| Error::BoundExceeded(p.to_string())))
            .collect()
    }

    /// `x^3 + a2 x^2 + a4 x + a6` at `x`.
    pub fn rhs(&self, x: &ExactRat) -> ExactRat {
        self.roots
            .iter()
            .map(|e| x - BigRational::from_integer(e.clone()))
            .fold(BigRational::one(), |acc, d| acc * d)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    /// `P1 = (e1, 0)`, `P2 = (e2, 0)`.
    pub fn basis(&self) -> (Point, Point) {
        (self.two_torsion_point(0), self.two_torsion_point(1))
    }

    pub fn two_torsion_point(&self, i: usize) -> Point {
        Point::Affine {
            x: BigRational::from_integer(self.roots[i].clone()),
            y: BigRational::zero(),
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine {
                x: x.clone(),
                y: -y,
            },
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let [_, a2, _, a4, _] = self.weierstrass().map(BigRational::from_integer);
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return Point::Infinity;
            }
            let three = BigRational::from_integer(3.into());
            let two = BigRational::from_integer(2.into());
            (three * x1 * x1 + &two * &a2 * x1 + a4) / (two * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - a2 - x1 - x2;
        let y3 = -(y1 + &lambda * (&x3 - x1));
        Point::Affine { x: x3, y: y3 }
    }

    pub fn mul(&self, n: i64, p: &Point) -> Point {
        let mut acc = Point::Infinity;
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Rational points `Q` with `2Q = P`.
    pub fn halve(&self, p: &Point) -> Vec<Point> {
        let x0 = match p {
            Point::Infinity => {
                let mut out = vec![Point::Infinity];
                out.extend((0..3).map(|i| self.two_torsion_point(i)));
                return out;
            }
            Point::Affine { x, .. } => x,
        };
        let mut r = Vec::new();
        for e in &self.roots {
            match rational_sqrt(&(x0 - BigRational::from_integer(e.clone()))) {
                Some(s) => r.push(s),
                None => return vec![],
            }
        }
        let mut out = Vec::new();
        for signs in 0..8u32 {
            let s: Vec<ExactRat> = (0..3)
                .map(|i| if signs >> i & 1 == 1 { -&r[i] } else { r[i].clone() })
                .collect();
            let x = x0 + &s[0] * &s[1] + &s[0] * &s[2] + &s[1] * &s[2];
            let Some(y) = rational_sqrt(&self.rhs(&x)) else {
                continue;
            };
            for y in [y.clone(), -y] {
                let q = Point::Affine { x: x.clone(), y };
                if &self.mul(2, &q) == p && !out.contains(&q) {
                    out.push(q);
                }
            }
        }
        out.sort();
        out
    }

    /// The rational 2-power torsion, by repeated halving from `E[2]`.
    pub fn two_power_torsion(&self) -> Vec<Point> {
        let mut pts = self.halve(&Point::Infinity);
        let mut frontier = pts.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for q in self.halve(p) {
                    if !pts.contains(&q) {
                        pts.push(q.clone());
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        pts.sort();
        pts
    }

    /// Points with `x = n / d^2`, `|n| <= height`, `1 <= d <= denominator`,
    /// one per x-coordinate (nonnegative `y`), in order of `(d, n)`.
    pub fn naive_points(&self, height: u64, denominator: u64) -> Vec<Point> {
        let small: Option<[i128; 3]> = (|| {
            let mut e = [0i128; 3];
            for (i, r) in self.roots.iter().enumerate() {
                let v = r.to_i128()?;
                if v.unsigned_abs() > 1 << 20 {
                    return None;
                }
                e[i] = v;
            }
            Some(e)
        })();
        let h = height as i128;
        let mut out = Vec::new();
        for d in 1..=denominator as i128 {
            let d2 = d * d;
            for n in -h..=h {
                if d > 1 && n.gcd(&d) != 1 {
                    continue;
                }
                let is_sq = match small {
                    Some(e) => {
                        // (n - e1 d^2)(n - e2 d^2)(n - e3 d^2) must be a square
                        let f: Vec<i128> = e.iter().map(|ei| n - ei * d2).collect();
                        match f[0].checked_mul(f[1]).and_then(|t| t.checked_mul(f[2])) {
                            Some(v) => is_square_i128(v),
                            None => is_square_big(&(BigInt::from(f[0]) * f[1] * f[2])),
                        }
                    }
                    None => {
                        let db = BigInt::from(d2);
                        let v = self
                            .roots
                            .iter()
                            .fold(BigInt::one(), |acc, e| acc * (BigInt::from(n) - e * &db));
                        is_square_big(&v)
                    }
                };
                if !is_sq {
                    continue;
                }
                let x = BigRational::new(n.into(), d2.into());
                let y = rational_sqrt(&self.rhs(&x)).expect("square checked");
                out.push(Point::Affine { x, y });
            }
        }
        out
    }
}

impl fmt::Display for CurveE2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = ")?;
        for e in &self.roots {
            if e.is_zero() {
                write!(f, "x")?;
            } else if e.is_negative() {
                write!(f, "(x + {})", -e)?;
            } else {
                write!(f, "(x - {e})")?;
            }
        }
        Ok(())
    }
}

impl From<CurveE2> for String {
    fn from(c: CurveE2) -> String {
        let [e1, e2, e3] = &c.roots;
        format!("{e1} {e2} {e3}")
    }
}

impl TryFrom<String> for CurveE2 {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

fn is_square_i128(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    // quadratic residues mod 64 filter most candidates
    const QR64: u64 = {
        let mut m = 0u64;
        let mut i = 0;
        while i < 64 {
            m |= 1 << (i * i % 64);
            i += 1;
        }
        m
    };
    if QR64 >> (v & 63) & 1 == 0 {
        return false;
    }
    let r = v.sqrt();
    r * r == v
}

fn is_square_big(v: &BigInt) -> bool {
    !v.is_negative() && {
        let r = v.sqrt();
        &r * &r == *v
    }
}

/// Square root in `Q`, if any.
pub fn rational_sqrt(x: &ExactRat) -> Option<ExactRat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    Infinity,
    Affine {
        #[serde(with = "rat_string")]
        x: ExactRat,
        #[serde(with = "rat_string")]
        y: ExactRat,
    },
}

impl Point {
    pub fn from_ints(x: i64, y: i64) -> Point {
        Point::Affine {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }

    pub fn x(&self) -> Option<&ExactRat> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, .. } => Some(x),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

pub(crate) mod rat_string {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad rational '{s}'")))
    }
}

/// A class `(d1, d2)` of `H^1(Q, E[2]) = (Q^x / Q^x2)^2` by squarefree
/// representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[String; 2]", try_from = "[String; 2]")]
pub struct GlobalClass {
    pub d1: BigInt,
    pub d2: BigInt,
}

fn sqfree_mul(a: &BigInt, b: &BigInt) -> BigInt {
    let g = a.gcd(b);
    a * b / (&g * &g)
}

impl GlobalClass {
    /// Reduces arbitrary nonzero integers to squarefree representatives.
    pub fn new(d1: &BigInt, d2: &BigInt) -> Result<Self> {
        Ok(GlobalClass {
            d1: squarefree_part(d1)?,
            d2: squarefree_part(d2)?,
        })
    }

    pub fn from_i64(d1: i64, d2: i64) -> Self {
        Self::new(&d1.into(), &d2.into()).expect("nonzero")
    }

    pub fn from_rats(a: &ExactRat, b: &ExactRat) -> Result<Self> {
        Self::new(&(a.numer() * a.denom()), &(b.numer() * b.denom()))
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 1)
    }

    pub fn is_identity(&self) -> bool {
        self.d1.is_one() && self.d2.is_one()
    }

    pub fn mul(&self, o: &GlobalClass) -> GlobalClass {
        GlobalClass {
            d1: sqfree_mul(&self.d1, &o.d1),
            d2: sqfree_mul(&self.d2, &o.d2),
        }
    }

    pub fn at(&self, v: Place) -> SquareClassPair {
        SquareClassPair::from_ints(&self.d1, &self.d2, v).expect("nonzero")
    }

    /// Ordering used to choose coset representatives: small `|d1 d2|` first.
    pub fn height_key(&self) -> (BigInt, BigInt, BigInt) {
        ((&self.d1 * &self.d2).abs(), self.d1.clone(), self.d2.clone())
    }

    /// Third coordinate `d1 d2`, the class of `x - e3`.
    pub fn third(&self) -> BigInt {
        sqfree_mul(&self.d1, &self.d2)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        let [a, b] = parts.as_slice() else {
            return Err(Error::Parse(format!("class needs \"(d1,d2)\", got '{s}'")));
        };
        let a = a.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer '{a}'")))?;
        let b = b.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer '{b}'")))?;
        Self::new(&a, &b)
    }
}

impl Ord for GlobalClass {
    fn cmp(&self, o: &Self) -> Ordering {
        (&self.d1, &self.d2).cmp(&(&o.d1, &o.d2))
    }
}

impl PartialOrd for GlobalClass {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for GlobalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.d1, self.d2)
    }
}

impl From<GlobalClass> for [String; 2] {
    fn from(c: GlobalClass) -> Self {
        [c.d1.to_string(), c.d2.to_string()]
    }
}

impl TryFrom<[String; 2]> for GlobalClass {
    type Error = Error;
    fn try_from(v: [String; 2]) -> Result<Self> {
        Self::parse(&format!("({},{})", v[0], v[1]))
    }
}

/// Rational `(d1, d2)` before squarefree reduction, by the explicit formulas.
fn delta_raw(e: &CurveE2, x: &ExactRat) -> (ExactRat, ExactRat) {
    let r: Vec<ExactRat> = e
        .roots
        .iter()
        .map(|v| BigRational::from_integer(v.clone()))
        .collect();
    if *x == r[0] {
        let a = &r[0] - &r[1];
        (&a * (&r[0] - &r[2]), a)
    } else if *x == r[1] {
        let a = &r[1] - &r[0];
        (a.clone(), &a * (&r[1] - &r[2]))
    } else if *x == r[2] {
        (&r[2] - &r[0], &r[2] - &r[1])
    } else {
        (x - &r[0], x - &r[1])
    }
}

/// `delta(P)` in `(Q^x / Q^x2)^2` under the basis `P1 = (e1, 0)`, `P2 = (e2, 0)`.
pub fn delta_of_point(e: &CurveE2, p: &Point) -> Result<GlobalClass> {
    if !e.contains(p) {
        let (x, y) = match p {
            Point::Affine { x, y } => (x.to_string(), y.to_string()),
            Point::Infinity => unreachable!(),
        };
        return Err(Error::PointNotOnCurve(x, y));
    }
    match p {
        Point::Infinity => Ok(GlobalClass::identity()),
        Point::Affine { x, .. } => {
            let (a, b) = delta_raw(e, x);
            // entries are S-units times squares, so only primes of S need stripping
            let primes = e.bad_primes()?;
            Ok(GlobalClass {
                d1: s_squarefree(&(a.numer() * a.denom()), &primes)?,
                d2: s_squarefree(&(b.numer() * b.denom()), &primes)?,
            })
        }
    }
}

/// Squarefree part of `n`, assuming `n` is an `S`-unit times a square.
fn s_squarefree(n: &BigInt, primes: &[u64]) -> Result<BigInt> {
    let mut d = n.signum();
    let mut rest = n.abs();
    for &p in primes {
        let pb = BigInt::from(p);
        let mut odd = false;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            odd = !odd;
        }
        if odd {
            d *= &pb;
        }
    }
    if is_square_big(&rest) {
        Ok(d)
    } else {
        squarefree_part(n)
    }
}

/// `delta` of a point over `Q_v` given by a rational x-coordinate.
pub fn delta_at_place(e: &CurveE2, x: &ExactRat, v: Place) -> Result<SquareClassPair> {
    let (a, b) = delta_raw(e, x);
    Ok(SquareClassPair(square_class(&a, v)?, square_class(&b, v)?))
}

/// `{delta(O), delta(P1), delta(P2), delta(P3)}` in that order.
pub fn torsion_image_set(e: &CurveE2) -> [GlobalClass; 4] {
    let t = |i| delta_of_point(e, &e.two_torsion_point(i)).expect("on curve");
    [GlobalClass::identity(), t(0), t(1), t(2)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e80() -> CurveE2 {
        CurveE2::parse("80 205").unwrap()
    }

    #[test]
    fn delta_table_of_the_example() {
        let e = e80();
        let (p1, p2) = e.basis();
        assert_eq!(p1, Point::from_ints(0, 0));
        assert_eq!(p2, Point::from_ints(-80, 0));
        assert_eq!(delta_of_point(&e, &p1).unwrap(), GlobalClass::from_i64(41, 5));
        assert_eq!(delta_of_point(&e, &p2).unwrap(), GlobalClass::from_i64(-5, -1));
        assert_eq!(delta_of_point(&e, &Point::Infinity).unwrap(), GlobalClass::identity());
        let t = torsion_image_set(&e);
        assert_eq!(t[3], GlobalClass::from_i64(-205, -5));
        // closure: delta(P1) delta(P2) = delta(P3)
        assert_eq!(t[1].mul(&t[2]), t[3]);
        assert!(matches!(
            delta_of_point(&e, &Point::from_ints(1, 1)),
            Err(Error::PointNotOnCurve(..))
        ));
    }

    #[test]
    fn control_curve_torsion_image() {
        let e = CurveE2::new(0.into(), (-1).into(), 1.into()).unwrap();
        let t = torsion_image_set(&e);
        // (0,0): ((0+1)(0-1), 1) = (-1, 1); (-1,0): (-1, (-1)(-2)) = (-1, 2); (1,0): (1, 2)
        assert_eq!(t[1], GlobalClass::from_i64(-1, 1));
        assert_eq!(t[2], GlobalClass::from_i64(-1, 2));
        assert_eq!(t[3], GlobalClass::from_i64(1, 2));
        assert_eq!(t[1].mul(&t[2]), t[3]);
    }

    #[test]
    fn degenerate_and_parsing() {
        assert_eq!(CurveE2::parse("3 3"), Err(Error::DegenerateCurve));
        assert_eq!(CurveE2::parse("0 0 1"), Err(Error::DegenerateCurve));
        assert!(CurveE2::parse("1").is_err());
        let e = CurveE2::parse("0 -80 -205").unwrap();
        assert_eq!(e, e80());
        assert_eq!(e.to_string(), "y^2 = x(x + 80)(x + 205)");
        let places: Vec<String> = e.bad_places().unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(places, ["2", "5", "41", "real"]);
    }

    #[test]
    fn example_torsion_is_e2() {
        assert_eq!(e80().two_power_torsion().len(), 4);
        // 1 and 4 are squares, so (0,0) is halved
        let e = CurveE2::parse("1 4").unwrap();
        let t = e.two_power_torsion();
        assert!(t.len() >= 8);
        for p in &t {
            assert!(e.contains(p));
            assert_eq!(e.mul(t.len() as i64, p), Point::Infinity);
        }
    }

    #[test]
    fn naive_search_finds_rank_one_point() {
        // congruent number curve for 5
        let e = CurveE2::new(0.into(), 5.into(), (-5).into()).unwrap();
        let pts = e.naive_points(100, 4);
        assert!(pts.contains(&Point::from_ints(-4, 6)));
        for p in &pts {
            assert!(e.contains(p));
        }
    }

    fn rank_one() -> CurveE2 {
        CurveE2::new(0.into(), 5.into(), (-5).into()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn delta_is_a_homomorphism(m in -4i64..=4, n in -4i64..=4, t1 in 0usize..4, t2 in 0usize..4) {
            let e = rank_one();
            let g = Point::from_ints(-4, 6);
            let tors = e.halve(&Point::Infinity);
            let p = e.add(&e.mul(m, &g), &tors[t1]);
            let q = e.add(&e.mul(n, &g), &tors[t2]);
            let s = e.add(&p, &q);
            let lhs = delta_of_point(&e, &s).unwrap();
            let rhs = delta_of_point(&e, &p).unwrap().mul(&delta_of_point(&e, &q).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn local_delta_is_a_homomorphism(m in -3i64..=3, n in -3i64..=3,
                                         v in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
            let e = rank_one();
            let g = Point::from_ints(-4, 6);
            let p = e.mul(m, &g);
            let q = e.add(&e.mul(n, &g), &e.two_torsion_point(0));
            let s = e.add(&p, &q);
            let v = Place::Finite(v);
            let loc = |pt: &Point| match pt.x() {
                None => GlobalClass::identity().at(v),
                Some(x) => delta_at_place(&e, x, v).unwrap(),
            };
            prop_assert_eq!(loc(&s), loc(&p).mul(&loc(&q)));
        }
    }
}
