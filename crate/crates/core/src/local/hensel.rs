use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{vp, Place};
use crate::arith::IntPoly;
use crate::error::{Error, Result};

/// Environment variable that replaces the top rung of the precision ladder.
pub const MAXPREC_ENV: &str = "SHA_NONDIV_MAXPREC";

/// Precision ladder `{1, 3, 5, 2 v(disc) + 3}`, top rung overridable through
/// `SHA_NONDIV_MAXPREC`.
pub fn precision_ladder(disc_valuation: u32) -> Vec<u32> {
    let top = std::env::var(MAXPREC_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|&k| k > 0)
        .unwrap_or(2 * disc_valuation + 3);
    let mut ladder: Vec<u32> = [1, 3, 5].into_iter().filter(|&k| k < top).collect();
    ladder.push(top);
    ladder
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselRoots {
    pub precision: u32,
    pub modulus: BigInt,
    /// residues `x0 mod p^k` such that a root of `f` in `Z_p` is `≡ x0 (mod p^k)`
    pub certified: Vec<BigInt>,
    /// residues neither certified nor refuted at this precision
    pub undecided: Vec<BigInt>,
}

impl HenselRoots {
    pub fn is_decided(&self) -> bool {
        self.undecided.is_empty()
    }
}

/// Residues mod `p^k` certified by the strong Hensel criterion
/// `v(f(x0)) > 2 v(f'(x0))` to approximate a `Z_p` root to precision `k`.
pub fn hensel_roots(f: &IntPoly, p: u64, k: u32) -> Result<HenselRoots> {
    if f.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInput("precision must be at least 1".into()));
    }
    let pb = BigInt::from(p);
    let fp = f.derivative();
    let mut frontier: Vec<BigInt> = (0..p).map(BigInt::from).collect();
    let mut modulus = pb.clone();
    for depth in 1..=k {
        let mut next = Vec::new();
        for x0 in frontier {
            if disc_has_no_root(f, &x0, depth, p) {
                continue;
            }
            if depth == k {
                next.push(x0);
            } else {
                for t in 0..p {
                    next.push(&x0 + &modulus * t);
                }
            }
        }
        frontier = next;
        if depth < k {
            modulus *= &pb;
        }
    }
    let mut certified = Vec::new();
    let mut undecided = Vec::new();
    for x0 in frontier {
        if certifies_root(f, &fp, &x0, p, k) {
            certified.push(x0);
        } else {
            undecided.push(x0);
        }
    }
    certified.sort();
    undecided.sort();
    Ok(HenselRoots {
        precision: k,
        modulus,
        certified,
        undecided,
    })
}

/// `f` has constant finite valuation on `x0 + p^depth Z_p`.
fn disc_has_no_root(f: &IntPoly, x0: &BigInt, depth: u32, p: u64) -> bool {
    let t = f.taylor_at(x0);
    let v0 = match t.first().and_then(|c| vp(c, p)) {
        Some(v) => v,
        None => return false,
    };
    t.iter()
        .enumerate()
        .skip(1)
        .filter_map(|(i, c)| vp(c, p).map(|v| v + i as u32 * depth))
        .all(|w| w > v0)
}

/// Strong Hensel at `x0` with the root pinned to `x0 mod p^k`.
pub(crate) fn certifies_root(f: &IntPoly, fp: &IntPoly, x0: &BigInt, p: u64, k: u32) -> bool {
    let fx = f.eval(x0);
    let Some(vf) = vp(&fx, p) else {
        return true;
    };
    let Some(vd) = vp(&fp.eval(x0), p) else {
        return false;
    };
    vf > 2 * vd && vf - vd >= k
}

/// Escalates through the precision ladder until every residue is decided.
pub fn decide_roots(f: &IntPoly, p: u64) -> Result<HenselRoots> {
    let disc = f.discriminant();
    let dv = vp(&disc, p).unwrap_or(0);
    let ladder = precision_ladder(dv);
    let mut last = None;
    for &k in &ladder {
        let roots = hensel_roots(f, p, k)?;
        if roots.is_decided() {
            return Ok(roots);
        }
        last = Some(roots);
    }
    let last = last.unwrap();
    Err(Error::PrecisionExhausted {
        place: p.to_string(),
        residue: last.undecided[0].to_string(),
        modulus: last.modulus.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearFactorRoot {
    /// root `y / scale` where `y ≡ residue (mod modulus)` is a root of the
    /// monic rescaling of the factor
    PAdic {
        residue: String,
        modulus: String,
        #[serde(with = "crate::cert::num_string")]
        precision: u32,
        scale: String,
    },
    /// a real root in `(lo, hi]`
    Real { lo: String, hi: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFactorWitness {
    #[serde(with = "crate::cert::num_string")]
    pub factor_index: usize,
    pub root: LinearFactorRoot,
}

impl LinearFactorWitness {
    /// Re-checks the witness from raw arithmetic.
    pub fn verify(&self, factors: &[IntPoly], place: Place) -> bool {
        let Some(f) = factors.get(self.factor_index) else {
            return false;
        };
        match (&self.root, place) {
            (
                LinearFactorRoot::PAdic {
                    residue,
                    precision,
                    scale,
                    ..
                },
                Place::Finite(p),
            ) => {
                let (Ok(y0), Ok(a)) = (residue.parse::<BigInt>(), scale.parse::<BigInt>()) else {
                    return false;
                };
                if a != f.leading() {
                    return false;
                }
                let g = f.monic_scaled();
                certifies_root(&g, &g.derivative(), &y0, p, *precision)
            }
            (LinearFactorRoot::Real { lo, hi }, Place::Real) => {
                let (Ok(lo), Ok(hi)) = (lo.parse::<BigRational>(), hi.parse::<BigRational>())
                else {
                    return false;
                };
                let flo = f.eval_rat(&lo);
                let fhi = f.eval_rat(&hi);
                fhi.is_zero() || (flo.is_positive() != fhi.is_positive() && !flo.is_zero())
            }
            _ => false,
        }
    }
}

/// A root over `Q_v` of the first factor in `factors` that has one.
///
/// `Ok(None)` means every factor was decided to have no root at `v`.
pub fn local_linear_factor(factors: &[IntPoly], v: Place) -> Result<Option<LinearFactorWitness>> {
    for (i, f) in factors.iter().enumerate() {
        if f.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidInput("constant factor".into()));
        }
        match v {
            Place::Real => {
                let width = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
                if let Some((lo, hi)) = f.isolate_real_roots(&width).into_iter().next() {
                    return Ok(Some(LinearFactorWitness {
                        factor_index: i,
                        root: LinearFactorRoot::Real {
                            lo: lo.to_string(),
                            hi: hi.to_string(),
                        },
                    }));
                }
            }
            Place::Finite(p) => {
                let g = f.monic_scaled();
                let roots = decide_roots(&g, p)?;
                if let Some(y0) = roots.certified.first() {
                    return Ok(Some(LinearFactorWitness {
                        factor_index: i,
                        root: LinearFactorRoot::PAdic {
                            residue: y0.to_string(),
                            modulus: roots.modulus.to_string(),
                            precision: roots.precision,
                            scale: f.leading().to_string(),
                        },
                    }));
                }
            }
        }
    }
    Ok(None)
}
