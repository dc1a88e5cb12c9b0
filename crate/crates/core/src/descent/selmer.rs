//! Local images, the 2-Selmer group and its quotient by known points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::f2::{kernel, F2Echelon};
use super::{delta_of_point, torsion_image_set, CurveE2, GlobalClass, Point};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::homspace::{descent_image_at, XWitness};
use crate::local::{square_class_int, Place, SquareClassPair};

/// `F_2`-coordinates for classes supported on `S`: basis `-1` followed by the
/// primes of `S`, first coordinate in the low bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSpace {
    pub basis: Vec<BigInt>,
}

impl ClassSpace {
    pub fn new(primes: &[u64]) -> Result<Self> {
        if primes.len() + 1 > 32 {
            return Err(Error::BoundExceeded(format!("{} primes in S", primes.len())));
        }
        let mut basis = vec![BigInt::from(-1)];
        basis.extend(primes.iter().map(|&p| BigInt::from(p)));
        Ok(ClassSpace { basis })
    }

    pub fn for_curve(e: &CurveE2) -> Result<Self> {
        Self::new(&e.bad_primes()?)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn scalar(&self, d: &BigInt) -> Result<u64> {
        let mut bits = u64::from(d.is_negative());
        let mut rest = d.abs();
        for (i, p) in self.basis.iter().enumerate().skip(1) {
            let (q, r) = rest.div_rem(p);
            if r.is_zero() {
                bits |= 1 << i;
                rest = q;
            }
        }
        if !rest.is_one() {
            return Err(Error::InvalidInput(format!("{d} is not supported on S")));
        }
        Ok(bits)
    }

    pub fn vector(&self, c: &GlobalClass) -> Result<u64> {
        Ok(self.scalar(&c.d1)? | (self.scalar(&c.d2)? << self.rank()))
    }

    fn product(&self, bits: u64) -> BigInt {
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(BigInt::one(), |acc, (_, b)| acc * b)
    }

    pub fn class(&self, v: u64) -> GlobalClass {
        let mask = (1u64 << self.rank()) - 1;
        GlobalClass {
            d1: self.product(v & mask),
            d2: self.product(v >> self.rank()),
        }
    }

    /// Images of the `2 * rank` unit vectors in the pair bits at `v`.
    pub fn columns_at(&self, v: Place) -> Vec<u128> {
        let w = v.class_bits();
        let single: Vec<u128> = self
            .basis
            .iter()
            .map(|b| square_class_int(b, v).expect("nonzero").bits() as u128)
            .collect();
        single
            .iter()
            .copied()
            .chain(single.iter().map(|c| c << w))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalImage {
    pub place: Place,
    pub classes: BTreeMap<SquareClassPair, XWitness>,
}

impl LocalImage {
    pub fn space(&self) -> F2Echelon {
        F2Echelon::spanned_by(self.classes.keys().map(|c| c.bits() as u128))
    }

    pub fn contains(&self, c: &SquareClassPair) -> bool {
        self.classes.contains_key(c)
    }
}

/// Image of `E(Q_v)/2E(Q_v)` in `(Q_v^x / Q_v^x2)^2`.
pub fn local_image(e: &CurveE2, v: Place) -> Result<LocalImage> {
    Ok(LocalImage {
        place: v,
        classes: descent_image_at(e.roots(), v)?,
    })
}

/// Subspace of classes whose image at every place in `places` lies in the
/// corresponding subspace of pair bits.
pub(crate) fn preimage(space: &ClassSpace, conditions: &[(Vec<u128>, F2Echelon, u32)]) -> Result<F2Echelon> {
    let n = 2 * space.rank();
    let mut cols = vec![0u128; n];
    let mut offset = 0u32;
    for (columns, target, width) in conditions {
        if offset + width > 128 {
            return Err(Error::BoundExceeded("too many local conditions".into()));
        }
        for (j, c) in columns.iter().enumerate() {
            cols[j] |= target.reduce(*c) << offset;
        }
        offset += width;
    }
    Ok(F2Echelon::spanned_by(kernel(&cols).into_iter().map(u128::from)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelmerGroup {
    pub curve: CurveE2,
    pub space: ClassSpace,
    pub dimension: usize,
    /// all elements, sorted
    pub elements: Vec<GlobalClass>,
    pub generators: Vec<GlobalClass>,
    /// span of `delta` of the 2-power torsion and of the points found
    pub point_image: Vec<GlobalClass>,
    pub point_image_dimension: usize,
    pub torsion: Vec<Point>,
    /// points found by the naive search that are not torsion
    pub points: Vec<Point>,
    pub local_images: Vec<LocalImage>,
}

impl SelmerGroup {
    pub fn contains(&self, c: &GlobalClass) -> bool {
        self.elements.binary_search(c).is_ok()
    }

    pub fn in_point_image(&self, c: &GlobalClass) -> bool {
        self.point_image.contains(c)
    }
}

pub fn selmer2(e: &CurveE2, cfg: &RunConfig) -> Result<SelmerGroup> {
    selmer2_with_order(e, cfg, &e.bad_places()?)
}

/// Selmer computation testing places in the given order.
pub fn selmer2_with_order(e: &CurveE2, cfg: &RunConfig, places: &[Place]) -> Result<SelmerGroup> {
    let space = ClassSpace::for_curve(e)?;
    let images: Vec<LocalImage> = places
        .par_iter()
        .map(|&v| local_image(e, v))
        .collect::<Result<_>>()?;
    let conditions: Vec<(Vec<u128>, F2Echelon, u32)> = images
        .iter()
        .map(|li| (space.columns_at(li.place), li.space(), 2 * li.place.class_bits()))
        .collect();
    let sel = preimage(&space, &conditions)?;
    let mut elements: Vec<GlobalClass> = sel.elements().into_iter().map(|v| space.class(v as u64)).collect();
    elements.sort();
    let generators: Vec<GlobalClass> = sel.rows().iter().map(|&v| space.class(v as u64)).collect();

    let torsion = e.two_power_torsion();
    let points: Vec<Point> = e
        .naive_points(cfg.point_height, cfg.point_denominator)
        .into_iter()
        .filter(|p| !torsion.contains(p))
        .collect();
    let mut img = F2Echelon::new();
    for p in torsion.iter().chain(&points) {
        img.insert(space.vector(&delta_of_point(e, p)?)? as u128);
    }
    let mut point_image: Vec<GlobalClass> = img.elements().into_iter().map(|v| space.class(v as u64)).collect();
    point_image.sort();

    let mut images = images;
    images.sort_by_key(|li| li.place);
    let out = SelmerGroup {
        curve: e.clone(),
        space,
        dimension: sel.dim(),
        elements,
        generators,
        point_image_dimension: img.dim(),
        point_image,
        torsion,
        points,
        local_images: images,
    };
    for t in torsion_image_set(e) {
        debug_assert!(out.contains(&t));
    }
    if !out.point_image.iter().all(|c| out.contains(c)) {
        return Err(Error::InvalidInput("point image escapes the Selmer group".into()));
    }
    Ok(out)
}

/// A nontrivial coset of the point image in the Selmer group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShaCoset {
    pub representative: GlobalClass,
    pub elements: Vec<GlobalClass>,
}

/// Nontrivial cosets of `delta(points)` in `Sel_2`, each listed by height with
/// the smallest element as representative.
pub fn sha2_classes(sel: &SelmerGroup) -> Vec<ShaCoset> {
    let mut seen: Vec<GlobalClass> = sel.point_image.clone();
    let mut out = Vec::new();
    let mut by_height = sel.elements.clone();
    by_height.sort_by_key(|c| c.height_key());
    for c in by_height {
        if seen.contains(&c) {
            continue;
        }
        let mut elements: Vec<GlobalClass> = sel.point_image.iter().map(|t| c.mul(t)).collect();
        elements.sort_by_key(|x| x.height_key());
        seen.extend(elements.iter().cloned());
        out.push(ShaCoset {
            representative: elements[0].clone(),
            elements,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{jacobi_i64, pow_mod};

    fn e80() -> CurveE2 {
        CurveE2::parse("80 205").unwrap()
    }

    fn quick() -> RunConfig {
        RunConfig {
            point_height: 300,
            point_denominator: 10,
            ..RunConfig::default()
        }
    }

    #[test]
    fn local_image_sizes_and_torsion() {
        let e = e80();
        for v in [Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(41), Place::Real] {
            let li = local_image(&e, v).unwrap();
            let expected = match v {
                Place::Real => 2,
                Place::Finite(2) => 8,
                _ => 4,
            };
            assert_eq!(li.classes.len(), expected);
            for t in torsion_image_set(&e) {
                assert!(li.contains(&t.at(v)), "{t} at {v}");
            }
            for (c, w) in &li.classes {
                assert_eq!(w.delta(e.roots(), v).unwrap().as_ref(), Some(c));
            }
        }
        let real = local_image(&e, Place::Real).unwrap();
        let mut reps: Vec<_> = real.classes.keys().map(|c| c.representatives()).collect();
        reps.sort();
        assert_eq!(reps, vec![((-1).into(), (-1).into()), (1.into(), 1.into())]);
    }

    #[test]
    fn good_place_image_is_torsion_reduction() {
        // oracle: enumerate E(F_3) and lift
        let e = e80();
        let li = local_image(&e, Place::Finite(3)).unwrap();
        let mut oracle: Vec<SquareClassPair> = torsion_image_set(&e).iter().map(|t| t.at(Place::Finite(3))).collect();
        for x in 0..3i64 {
            let f = x * (x + 80) * (x + 205);
            if f % 3 != 0 && jacobi_i64(f, 3) == 1 {
                oracle.push(SquareClassPair::from_ints(&x.into(), &(x + 80).into(), Place::Finite(3)).unwrap());
            }
        }
        oracle.sort();
        oracle.dedup();
        let got: Vec<_> = li.classes.keys().cloned().collect();
        assert_eq!(got, oracle);
    }

    /// Brute force over `x mod p^3` with unit values, plus torsion images.
    fn brute_image(e: &CurveE2, p: u64) -> Vec<SquareClassPair> {
        let v = Place::Finite(p);
        let mut out: Vec<SquareClassPair> = torsion_image_set(e).iter().map(|t| t.at(v)).collect();
        let m = p.pow(3) as i64;
        let r: Vec<i64> = e.roots().iter().map(|x| i64::try_from(x).unwrap()).collect();
        for x in 0..m {
            let d: Vec<i64> = r.iter().map(|ei| (x - ei).rem_euclid(m)).collect();
            let f = (d[0] * d[1] % m) * d[2] % m;
            if f % p as i64 == 0 {
                continue;
            }
            // unit square iff Euler criterion mod p
            if pow_mod(f as u64 % p, (p - 1) / 2, p) != 1 {
                continue;
            }
            out.push(SquareClassPair(
                square_class_int(&(x - r[0]).into(), v).unwrap(),
                square_class_int(&(x - r[1]).into(), v).unwrap(),
            ));
        }
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn local_image_matches_brute_force_at_small_good_primes() {
        let curves = ["0 -1 1", "0 1 2", "0 1 3", "0 1 4", "0 2 3", "0 1 5"];
        for s in curves {
            let e = CurveE2::parse(s).unwrap();
            assert!(e.discriminant().abs() <= 10_000.into());
            let bad = e.bad_primes().unwrap();
            for p in [3u64, 5, 7, 11, 13] {
                if bad.contains(&p) {
                    continue;
                }
                let got: Vec<_> = local_image(&e, Place::Finite(p)).unwrap().classes.into_keys().collect();
                assert_eq!(got, brute_image(&e, p), "curve {s} at {p}");
            }
        }
    }

    #[test]
    fn selmer_of_the_example() {
        let e = e80();
        let sel = selmer2(&e, &quick()).unwrap();
        assert_eq!(sel.dimension, 4);
        assert!(sel.contains(&GlobalClass::from_i64(1, 5)));
        for t in torsion_image_set(&e) {
            assert!(sel.contains(&t));
        }
        assert_eq!(sel.point_image_dimension, 2);
        let cosets = sha2_classes(&sel);
        assert_eq!(cosets.len(), 3);
        assert!(cosets.iter().any(|c| c.representative == GlobalClass::from_i64(1, 5)));
        // Klein four group: product of two cosets is the third
        let prod = cosets[0].representative.mul(&cosets[1].representative);
        assert!(cosets[2].elements.contains(&prod));
    }

    #[test]
    fn selmer_matches_full_enumeration() {
        let e = e80();
        let sel = selmer2(&e, &quick()).unwrap();
        let space = &sel.space;
        let n = 2 * space.rank();
        let mut brute = Vec::new();
        for v in 0u64..(1 << n) {
            let c = space.class(v);
            if sel.local_images.iter().all(|li| li.contains(&c.at(li.place))) {
                brute.push(c);
            }
        }
        brute.sort();
        assert_eq!(brute, sel.elements);
    }

    #[test]
    fn selmer_is_order_independent() {
        let e = e80();
        let mut places = e.bad_places().unwrap();
        let a = selmer2_with_order(&e, &quick(), &places).unwrap();
        places.reverse();
        let b = selmer2_with_order(&e, &quick(), &places).unwrap();
        assert_eq!(a.elements, b.elements);
    }

    #[test]
    fn control_curves() {
        let trivial = CurveE2::parse("1 2").unwrap();
        let sel = selmer2(&trivial, &quick()).unwrap();
        assert_eq!(sha2_classes(&sel).len(), 0);

        let rank_one = CurveE2::new(0.into(), 5.into(), (-5).into()).unwrap();
        let sel = selmer2(&rank_one, &quick()).unwrap();
        assert!(sel.dimension >= 3);
        assert!(sel.point_image_dimension >= 3);

        let cong = CurveE2::new(0.into(), (-1).into(), 1.into()).unwrap();
        let sel = selmer2(&cong, &quick()).unwrap();
        assert_eq!(sel.dimension, 2);
    }
}
