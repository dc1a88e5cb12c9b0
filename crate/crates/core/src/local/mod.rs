//! Square classes in completions `Q_v`, Hensel root finding and residue-disc
//! enumeration.

mod hensel;
mod walk;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime_u64, jacobi_i64, least_nonresidue, ExactRat};
use crate::error::{Error, Result};

pub use hensel::{
    decide_roots, hensel_roots, local_linear_factor, precision_ladder, HenselRoots, LinearFactorRoot,
    LinearFactorWitness, MAXPREC_ENV,
};
pub use walk::{unit_discs, walk_discs, DiscLeaf, LeafKind, WalkOutcome};

/// A completion of `Q`. Finite primes are desk-scale and fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Place {
    Finite(u64),
    Real,
}

impl Place {
    pub fn finite(p: u64) -> Result<Place> {
        if is_prime_u64(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NonPrime(p.to_string()))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Finite(p) => Some(*p),
            Place::Real => None,
        }
    }

    /// `F_2`-dimension of `Q_v^x / Q_v^x2`.
    pub fn class_bits(&self) -> u32 {
        self.square_class_count().trailing_zeros()
    }

    /// `|Q_v^x / Q_v^x2|`.
    pub fn square_class_count(&self) -> usize {
        match self {
            Place::Real => 2,
            Place::Finite(2) => 8,
            Place::Finite(_) => 4,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Real => write!(f, "real"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Place> {
        match s.trim() {
            "real" | "inf" | "infinity" => Ok(Place::Real),
            t => {
                let p = t
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad place '{t}'")))?;
                Place::finite(p)
            }
        }
    }
}

impl From<Place> for String {
    fn from(p: Place) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Place {
    type Error = Error;
    fn try_from(s: String) -> Result<Place> {
        s.parse()
    }
}

/// Unit datum of a square class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitTag {
    /// odd `p`: whether the unit part is a quadratic residue
    Residue(bool),
    /// `p = 2`: unit part modulo 8
    Mod8(u8),
    /// real place: sign
    Sign(bool),
}

/// An element of `Q_v^x / Q_v^x2` in normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    pub place: Place,
    pub odd_valuation: bool,
    pub tag: UnitTag,
}

impl SquareClass {
    pub fn trivial(place: Place) -> SquareClass {
        let tag = match place {
            Place::Real => UnitTag::Sign(true),
            Place::Finite(2) => UnitTag::Mod8(1),
            Place::Finite(_) => UnitTag::Residue(true),
        };
        SquareClass {
            place,
            odd_valuation: false,
            tag,
        }
    }

    pub fn is_trivial(&self) -> bool {
        *self == SquareClass::trivial(self.place)
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        assert_eq!(self.place, other.place, "square classes at different places");
        let tag = match (self.tag, other.tag) {
            (UnitTag::Residue(a), UnitTag::Residue(b)) => UnitTag::Residue(a == b),
            (UnitTag::Mod8(a), UnitTag::Mod8(b)) => UnitTag::Mod8(a * b % 8),
            (UnitTag::Sign(a), UnitTag::Sign(b)) => UnitTag::Sign(a == b),
            _ => unreachable!("tags at one place share a kind"),
        };
        SquareClass {
            place: self.place,
            odd_valuation: self.odd_valuation != other.odd_valuation,
            tag,
        }
    }

    /// Coordinates in `F_2^n`, `n = place.class_bits()`.
    pub fn bits(&self) -> u32 {
        let v = self.odd_valuation as u32;
        match self.tag {
            UnitTag::Residue(qr) => v | ((!qr as u32) << 1),
            UnitTag::Mod8(u) => v | (((u % 4 == 3) as u32) << 1) | (((u == 3 || u == 5) as u32) << 2),
            UnitTag::Sign(pos) => !pos as u32,
        }
    }

    /// Canonical squarefree integer representative.
    pub fn representative(&self) -> BigInt {
        match (self.place, self.tag) {
            (Place::Real, UnitTag::Sign(s)) => BigInt::from(if s { 1 } else { -1 }),
            (Place::Finite(p), UnitTag::Residue(qr)) => {
                let u = if qr { 1 } else { least_nonresidue(p) };
                let v = if self.odd_valuation { p } else { 1 };
                BigInt::from(u) * v
            }
            (Place::Finite(_), UnitTag::Mod8(u)) => {
                BigInt::from(u) * if self.odd_valuation { 2 } else { 1 }
            }
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

/// Splits an integer at `p`: `(v_p(n), n / p^v mod m)`.
fn split_unit(n: &BigInt, p: u64, m: u64) -> (u32, u64) {
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut n = n.clone();
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        n = q;
        v += 1;
    }
    (v, n.mod_floor(&BigInt::from(m)).to_u64().unwrap())
}

pub fn square_class_int(x: &BigInt, v: Place) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    Ok(match v {
        Place::Real => SquareClass {
            place: v,
            odd_valuation: false,
            tag: UnitTag::Sign(x.is_positive()),
        },
        Place::Finite(2) => {
            let (val, u) = split_unit(x, 2, 8);
            SquareClass {
                place: v,
                odd_valuation: val % 2 == 1,
                tag: UnitTag::Mod8(u as u8),
            }
        }
        Place::Finite(p) => {
            let (val, u) = split_unit(x, p, p);
            SquareClass {
                place: v,
                odd_valuation: val % 2 == 1,
                tag: UnitTag::Residue(jacobi_i64(u as i64, p) == 1),
            }
        }
    })
}

/// Square class of a nonzero rational at `v`.
pub fn square_class(x: &ExactRat, v: Place) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::Zero);
    }
    square_class_int(&(x.numer() * x.denom()), v)
}

/// Whether `x / y` is a square in `Q_v^x`.
pub fn same_class(x: &ExactRat, y: &ExactRat, v: Place) -> Result<bool> {
    Ok(square_class(x, v)? == square_class(y, v)?)
}

pub fn same_class_int(x: &BigInt, y: &BigInt, v: Place) -> Result<bool> {
    Ok(square_class_int(x, v)? == square_class_int(y, v)?)
}

/// An element of `(Q_v^x / Q_v^x2)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClassPair(pub SquareClass, pub SquareClass);

impl SquareClassPair {
    pub fn from_ints(a: &BigInt, b: &BigInt, v: Place) -> Result<SquareClassPair> {
        Ok(SquareClassPair(square_class_int(a, v)?, square_class_int(b, v)?))
    }

    pub fn place(&self) -> Place {
        self.0.place
    }

    pub fn mul(&self, other: &SquareClassPair) -> SquareClassPair {
        SquareClassPair(self.0.mul(&other.0), self.1.mul(&other.1))
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_trivial() && self.1.is_trivial()
    }

    /// First coordinate in the low bits, second shifted by `class_bits`.
    pub fn bits(&self) -> u32 {
        self.0.bits() | (self.1.bits() << self.place().class_bits())
    }

    pub fn representatives(&self) -> (BigInt, BigInt) {
        (self.0.representative(), self.1.representative())
    }
}

impl fmt::Display for SquareClassPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// `v_p(x)` for nonzero `x`; `None` encodes `+infinity` for zero.
pub fn vp(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    Some(split_unit(x, p, p.max(2)).0)
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
