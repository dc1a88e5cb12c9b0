//! Local solvability of genus-one homogeneous spaces: quartic double covers
//! `y^2 = g(x)` and the pairs of conics attached to a 2-descent class.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, ExactRat, IntPoly};
use crate::error::{Error, Result};
use crate::local::{
    precision_ladder, square_class, unit_discs, vp, walk_discs, LeafKind,
    Place, SquareClass, SquareClassPair,
};

/// Primes at or below this bound are checked directly even at good reduction.
pub const DIRECT_CHECK_BOUND: u64 = 13;

fn walk_depth(disc: &BigInt, p: u64) -> u32 {
    let dv = vp(disc, p).unwrap_or(0);
    let top = *precision_ladder(dv).last().unwrap();
    top + if p == 2 { 3 } else { 1 }
}

fn exhausted(p: u64, out: &crate::local::WalkOutcome) -> Error {
    let (c, k) = &out.undecided[0];
    Error::PrecisionExhausted {
        place: p.to_string(),
        residue: c.to_string(),
        modulus: BigInt::from(p).pow(*k).to_string(),
    }
}

// ---------------------------------------------------------------------------
// conic pairs

/// `d1 z1^2 - d2 z2^2 = e2 - e1`, `d1 z1^2 - d1 d2 z3^2 = e3 - e1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicPair {
    pub roots: [BigInt; 3],
    pub d1: BigInt,
    pub d2: BigInt,
}

/// A point of `E(Q_v)` given by its x-coordinate; its image under the local
/// connecting map is recomputed on verification.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XWitness {
    Infinity,
    X { x: String },
}

impl fmt::Display for XWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XWitness::Infinity => write!(f, "O"),
            XWitness::X { x } => write!(f, "x = {x}"),
        }
    }
}

/// Image under the local connecting map of a point with x-coordinate `x`, or
/// `None` if no such point exists over `Q_v`.
pub fn local_delta_at_x(roots: &[BigInt; 3], x: &ExactRat, v: Place) -> Result<Option<SquareClassPair>> {
    let e: Vec<ExactRat> = roots.iter().map(|r| BigRational::from_integer(r.clone())).collect();
    let diffs: Vec<ExactRat> = e.iter().map(|ei| x - ei).collect();
    if let Some(i) = diffs.iter().position(|d| d.is_zero()) {
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let a = &e[i] - &e[j];
        let b = &e[i] - &e[k];
        let pair = match i {
            0 => (&a * &b, a),
            1 => (a.clone(), &a * &b),
            _ => (a, b),
        };
        return Ok(Some(SquareClassPair(
            square_class(&pair.0, v)?,
            square_class(&pair.1, v)?,
        )));
    }
    let c: Vec<SquareClass> = diffs
        .iter()
        .map(|d| square_class(d, v))
        .collect::<Result<_>>()?;
    if !c[0].mul(&c[1]).mul(&c[2]).is_trivial() {
        return Ok(None);
    }
    Ok(Some(SquareClassPair(c[0], c[1])))
}

impl XWitness {
    pub fn delta(&self, roots: &[BigInt; 3], v: Place) -> Result<Option<SquareClassPair>> {
        match self {
            XWitness::Infinity => Ok(Some(SquareClassPair(
                SquareClass::trivial(v),
                SquareClass::trivial(v),
            ))),
            XWitness::X { x } => {
                let x: ExactRat = x
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rational '{x}'")))?;
                local_delta_at_x(roots, &x, v)
            }
        }
    }
}

fn descent_discriminant(roots: &[BigInt; 3]) -> BigInt {
    let d = (&roots[0] - &roots[1]) * (&roots[0] - &roots[2]) * (&roots[1] - &roots[2]);
    &d * &d * 16
}

/// Every class of the local image of `E(Q_v)` under the connecting map, each
/// with a point realizing it.
///
/// Finite places walk the residue discs of `x - e_i` (with `x = t/4` at
/// `p = 2`); points of smaller valuation map to the trivial class.
pub fn descent_image_at(roots: &[BigInt; 3], v: Place) -> Result<BTreeMap<SquareClassPair, XWitness>> {
    let mut out = BTreeMap::new();
    out.insert(
        SquareClassPair(SquareClass::trivial(v), SquareClass::trivial(v)),
        XWitness::Infinity,
    );
    let mut candidates: Vec<ExactRat> = roots.iter().map(|r| BigRational::from_integer(r.clone())).collect();
    match v {
        Place::Real => {
            let mut sorted = roots.to_vec();
            sorted.sort();
            let two = BigInt::from(2);
            candidates.push(BigRational::from_integer(&sorted[2] + 1));
            candidates.push(BigRational::new(&sorted[0] + &sorted[1], two.clone()));
            candidates.push(BigRational::new(&sorted[1] + &sorted[2], two));
            candidates.push(BigRational::from_integer(&sorted[0] - 1));
        }
        Place::Finite(p) => {
            let scale = BigInt::from(if p == 2 { 4 } else { 1 });
            let polys: Vec<IntPoly> = roots
                .iter()
                .map(|e| IntPoly::new(vec![-(&scale * e), BigInt::one()]))
                .collect();
            let depth = walk_depth(&descent_discriminant(roots), p);
            let walk = walk_discs(&polys, p, &unit_discs(p), depth, |_| false);
            if !walk.undecided.is_empty() {
                return Err(exhausted(p, &walk));
            }
            for leaf in walk.leaves {
                if let LeafKind::Classes(c) = &leaf.kind {
                    if c[0].mul(&c[1]).mul(&c[2]).is_trivial() {
                        candidates.push(BigRational::new(leaf.center.clone(), scale.clone()));
                    }
                }
            }
        }
    }
    for x in candidates {
        if let Some(pair) = local_delta_at_x(roots, &x, v)? {
            out.entry(pair).or_insert_with(|| XWitness::X { x: x.to_string() });
        }
    }
    let expected = match v {
        Place::Real => 2,
        Place::Finite(2) => 8,
        Place::Finite(_) => 4,
    };
    if out.len() != expected {
        return Err(Error::InvalidInput(format!(
            "local image at {v} has {} classes, expected {expected}",
            out.len()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConicVerdict {
    Solvable { witness: XWitness },
    Insolvable { reason: String },
}

impl ConicVerdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, ConicVerdict::Solvable { .. })
    }
}

pub fn conic_pair_solvable_at(c: &ConicPair, v: Place) -> Result<ConicVerdict> {
    if c.d1.is_zero() || c.d2.is_zero() {
        return Err(Error::Zero);
    }
    let target = SquareClassPair::from_ints(&c.d1, &c.d2, v)?;
    let image = descent_image_at(&c.roots, v)?;
    Ok(match image.get(&target) {
        Some(w) => ConicVerdict::Solvable { witness: w.clone() },
        None => ConicVerdict::Insolvable {
            reason: format!(
                "class {target} is outside the {} classes realized over Q_{v}",
                image.len()
            ),
        },
    })
}

// ---------------------------------------------------------------------------
// quartic double covers

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticCover {
    pub g: IntPoly,
    /// factored form as given, if any
    pub factors: Option<Vec<IntPoly>>,
}

impl QuarticCover {
    pub fn new(g: IntPoly) -> Result<Self> {
        match g.degree() {
            Some(3) | Some(4) => {}
            _ => return Err(Error::InvalidInput("quartic cover needs degree 3 or 4".into())),
        }
        if g.discriminant().is_zero() {
            return Err(Error::InvalidInput("g is not squarefree".into()));
        }
        Ok(QuarticCover { g, factors: None })
    }

    pub fn from_factors(factors: Vec<IntPoly>) -> Result<Self> {
        let g = factors.iter().fold(IntPoly::from_i64(&[1]), |acc, f| acc.mul(f));
        let mut q = Self::new(g)?;
        q.factors = Some(factors);
        Ok(q)
    }

    /// `"[a4,a3,a2,a1,a0]"` or `"(q1)*(q2)"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("y^2 =").map_or(s, str::trim);
        if let Some(body) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let coeffs = body
                .split(',')
                .map(|c| c.trim().parse::<BigInt>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse(format!("bad coefficient list '{s}'")))?;
            return Self::new(IntPoly::from_high_first(&coeffs));
        }
        if s.starts_with('(') {
            let factors = s
                .split('*')
                .map(|f| {
                    let f = f.trim();
                    let inner = f
                        .strip_prefix('(')
                        .and_then(|b| b.strip_suffix(')'))
                        .ok_or_else(|| Error::Parse(format!("bad factor '{f}'")))?;
                    IntPoly::parse(inner)
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::from_factors(factors);
        }
        Self::new(IntPoly::parse(s)?)
    }

    /// `t^4 g(1/t)`.
    pub fn reversed(&self) -> IntPoly {
        self.g.reversed(4)
    }

    /// Places needing a direct check: real, primes of `2 disc(g) lc(g)` and
    /// all primes up to [`DIRECT_CHECK_BOUND`].
    pub fn check_places(&self) -> Result<Vec<Place>> {
        let n = BigInt::from(2) * self.g.discriminant() * self.g.leading();
        let f = crate::arith::factorize(&n)?;
        let mut ps: Vec<u64> = f
            .primes()
            .map(|p| u64::try_from(p).map_err(|_| Error::BoundExceeded(p.to_string())))
            .collect::<Result<_>>()?;
        ps.extend(primes_up_to(DIRECT_CHECK_BOUND));
        ps.sort_unstable();
        ps.dedup();
        let mut places: Vec<Place> = ps.into_iter().map(Place::Finite).collect();
        places.push(Place::Real);
        Ok(places)
    }
}

impl fmt::Display for QuarticCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.factors {
            Some(fs) => {
                let parts: Vec<String> = fs.iter().map(|q| format!("({q})")).collect();
                write!(f, "y^2 = {}", parts.join("*"))
            }
            None => write!(f, "y^2 = {}", self.g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuarticWitness {
    /// `g(x)` is a nonzero square in `Q_v` (positive at the real place)
    Square { x: String },
    /// strong Hensel root of `g` (or of `t^4 g(1/t)` when `reversed`) near `x0`
    HenselRoot { reversed: bool, x0: String },
    /// a real root of `g` in `(lo, hi]`
    RealRoot { lo: String, hi: String },
}

impl QuarticWitness {
    pub fn verify(&self, q: &QuarticCover, v: Place) -> bool {
        match (self, v) {
            (QuarticWitness::Square { x }, _) => {
                let Ok(x) = x.parse::<ExactRat>() else {
                    return false;
                };
                let gx = q.g.eval_rat(&x);
                match v {
                    Place::Real => gx.is_positive(),
                    _ => square_class(&gx, v).is_ok_and(|c| c.is_trivial()),
                }
            }
            (QuarticWitness::HenselRoot { reversed, x0 }, Place::Finite(p)) => {
                let Ok(x0) = x0.parse::<BigInt>() else {
                    return false;
                };
                let f = if *reversed { q.reversed() } else { q.g.clone() };
                let fx = f.eval(&x0);
                let Some(vf) = vp(&fx, p) else {
                    return true;
                };
                vp(&f.derivative().eval(&x0), p).is_some_and(|vd| vf > 2 * vd)
            }
            (QuarticWitness::RealRoot { lo, hi }, Place::Real) => {
                let (Ok(lo), Ok(hi)) = (lo.parse::<ExactRat>(), hi.parse::<ExactRat>()) else {
                    return false;
                };
                let a = q.g.eval_rat(&lo);
                let b = q.g.eval_rat(&hi);
                b.is_zero() || (a.is_positive() != b.is_positive() && !a.is_zero())
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum QuarticVerdict {
    Solvable { witness: QuarticWitness },
    Insolvable { reason: String },
}

impl QuarticVerdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, QuarticVerdict::Solvable { .. })
    }
}

pub fn quartic_solvable_at(q: &QuarticCover, v: Place) -> Result<QuarticVerdict> {
    quartic_solvable_with_slack(q, v, 0)
}

/// As [`quartic_solvable_at`] with `slack` extra levels of disc refinement.
pub fn quartic_solvable_with_slack(q: &QuarticCover, v: Place, slack: u32) -> Result<QuarticVerdict> {
    match v {
        Place::Real => Ok(quartic_real(q)),
        Place::Finite(p) => quartic_padic(q, p, slack),
    }
}

fn quartic_real(q: &QuarticCover) -> QuarticVerdict {
    if q.g.leading().is_positive() {
        // g(x) > 0 for x beyond the Cauchy bound
        let m: BigInt = q.g.coeffs().iter().map(|c| c.abs()).sum::<BigInt>() + 1;
        let mut x = m;
        while !q.g.eval(&x).is_positive() {
            x *= 2;
        }
        return QuarticVerdict::Solvable {
            witness: QuarticWitness::Square { x: x.to_string() },
        };
    }
    let width = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
    if let Some((lo, hi)) = q.g.isolate_real_roots(&width).into_iter().next() {
        return QuarticVerdict::Solvable {
            witness: QuarticWitness::RealRoot {
                lo: lo.to_string(),
                hi: hi.to_string(),
            },
        };
    }
    QuarticVerdict::Insolvable {
        reason: "g has negative leading coefficient and no real root, so g < 0 on R".into(),
    }
}

fn quartic_padic(q: &QuarticCover, p: u64, slack: u32) -> Result<QuarticVerdict> {
    let depth = walk_depth(&q.g.discriminant(), p) + slack;
    let h = q.reversed();
    let good = |kind: &LeafKind| match kind {
        LeafKind::Classes(c) => c[0].is_trivial(),
        LeafKind::Root { .. } => true,
    };
    let mut total = 0;
    for (reversed, poly, start) in [
        (false, &q.g, unit_discs(p)),
        (true, &h, vec![(BigInt::zero(), 1)]),
    ] {
        let walk = walk_discs(std::slice::from_ref(poly), p, &start, depth, |l| good(&l.kind));
        if walk.stopped_early {
            let leaf = walk.leaves.last().unwrap();
            let witness = match &leaf.kind {
                LeafKind::Root { .. } => QuarticWitness::HenselRoot {
                    reversed,
                    x0: leaf.center.to_string(),
                },
                LeafKind::Classes(_) if reversed => {
                    // t = 0 is the point at infinity; any nonzero t of the disc will do
                    let t = if leaf.center.is_zero() {
                        BigInt::from(p).pow(leaf.depth)
                    } else {
                        leaf.center.clone()
                    };
                    QuarticWitness::Square {
                        x: BigRational::new(BigInt::one(), t).to_string(),
                    }
                }
                LeafKind::Classes(_) => QuarticWitness::Square {
                    x: leaf.center.to_string(),
                },
            };
            return Ok(QuarticVerdict::Solvable { witness });
        }
        if !walk.undecided.is_empty() {
            return Err(exhausted(p, &walk));
        }
        total += walk.leaves.len();
    }
    Ok(QuarticVerdict::Insolvable {
        reason: format!(
            "all {total} residue discs of Z_{p} and its reciprocal chart carry a nonsquare value of g"
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceVerdict {
    pub place: Place,
    pub verdict: QuarticVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElsReport {
    pub quartic: String,
    pub places: Vec<PlaceVerdict>,
    /// good primes above [`DIRECT_CHECK_BOUND`], accepted by the Hasse-Weil bound
    pub axiom: String,
    pub els: bool,
}

/// Everywhere local solvability of `y^2 = g(x)`.
pub fn quartic_els(q: &QuarticCover) -> Result<ElsReport> {
    use rayon::prelude::*;
    let places = q.check_places()?;
    let verdicts: Vec<PlaceVerdict> = places
        .par_iter()
        .map(|&v| {
            quartic_solvable_at(q, v).map(|verdict| PlaceVerdict { place: v, verdict })
        })
        .collect::<Result<_>>()?;
    let els = verdicts.iter().all(|pv| pv.verdict.is_solvable());
    Ok(ElsReport {
        quartic: q.to_string(),
        places: verdicts,
        axiom: format!(
            "for primes p > {DIRECT_CHECK_BOUND} of good reduction the smooth genus one reduction has p + 1 - 2 sqrt(p) > 0 points, which lift by Hensel"
        ),
        els,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> QuarticCover {
        QuarticCover::parse("(11x^2 - 67x + 31)*(-x^2 - 3x - 1)").unwrap()
    }

    #[test]
    fn parse_forms_agree() {
        let a = QuarticCover::parse("[1,0,0,0,1]").unwrap();
        let b = QuarticCover::parse("x^4 + 1").unwrap();
        assert_eq!(a.g, b.g);
        let t = t1();
        assert_eq!(t.g, IntPoly::from_i64(&[-31, -26, 159, 34, -11]));
        assert!(QuarticCover::parse("[1,0,0,0,0]").is_err());
    }

    #[test]
    fn real_place_examples() {
        let v = quartic_solvable_at(&t1(), Place::Real).unwrap();
        let QuarticVerdict::Solvable { witness } = v else {
            panic!("T1 should be solvable over R")
        };
        assert!(witness.verify(&t1(), Place::Real));
        let neg = QuarticCover::parse("[-1,0,0,0,-1]").unwrap();
        assert!(!quartic_solvable_at(&neg, Place::Real).unwrap().is_solvable());
    }

    #[test]
    fn valuation_obstruction_at_three() {
        let q = QuarticCover::parse("[3,0,0,0,3]").unwrap();
        assert!(!quartic_solvable_at(&q, Place::Finite(3)).unwrap().is_solvable());
        // brute force: 3(x^4 + 1) has odd 3-adic valuation for every x mod 9
        for x in 0..9i64 {
            let g = 3 * (x.pow(4) + 1);
            assert_eq!(vp(&BigInt::from(g), 3), Some(1));
        }
        // more precision does not flip the verdict
        assert!(!quartic_solvable_with_slack(&q, Place::Finite(3), 4).unwrap().is_solvable());
        let r = quartic_els(&q).unwrap();
        assert!(!r.els);
    }

    #[test]
    fn witnesses_reverify() {
        let t2 = QuarticCover::parse("(11x^2 - 34x + 19)*(x^2 + 6x + 4)").unwrap();
        for q in [t1(), t2.clone()] {
            for v in q.check_places().unwrap() {
                if let QuarticVerdict::Solvable { witness } = quartic_solvable_at(&q, v).unwrap() {
                    assert!(witness.verify(&q, v), "{q} at {v}");
                }
            }
        }
        assert!(quartic_solvable_at(&t2, Place::Finite(5)).unwrap().is_solvable());
    }

    #[test]
    fn rational_point_implies_els() {
        let q = QuarticCover::parse("[1,0,0,0,1]").unwrap();
        assert!(quartic_els(&q).unwrap().els);
        let cubic = QuarticCover::parse("x^3 - 2").unwrap();
        assert!(quartic_els(&cubic).unwrap().els);
    }

    #[test]
    fn conic_pairs_on_the_example_curve() {
        let roots = [BigInt::from(0), BigInt::from(-80), BigInt::from(-205)];
        for v in [Place::Finite(2), Place::Finite(5), Place::Finite(41), Place::Real] {
            let c = ConicPair {
                roots: roots.clone(),
                d1: 1.into(),
                d2: 5.into(),
            };
            let verdict = conic_pair_solvable_at(&c, v).unwrap();
            let ConicVerdict::Solvable { witness } = verdict else {
                panic!("(1,5) should be solvable at {v}")
            };
            let got = witness.delta(&roots, v).unwrap().unwrap();
            assert_eq!(got, SquareClassPair::from_ints(&1.into(), &5.into(), v).unwrap());
        }
        let c = ConicPair {
            roots: roots.clone(),
            d1: 2.into(),
            d2: 1.into(),
        };
        let fails = [Place::Finite(2), Place::Finite(5), Place::Finite(41), Place::Real]
            .into_iter()
            .any(|v| !conic_pair_solvable_at(&c, v).unwrap().is_solvable());
        assert!(fails);
    }

    #[test]
    fn real_image_of_example() {
        let roots = [BigInt::from(0), BigInt::from(-80), BigInt::from(-205)];
        let img = descent_image_at(&roots, Place::Real).unwrap();
        let reps: Vec<(BigInt, BigInt)> = img.keys().map(|k| k.representatives()).collect();
        assert!(reps.contains(&(1.into(), 1.into())));
        assert!(reps.contains(&((-1).into(), (-1).into())));
    }
}
