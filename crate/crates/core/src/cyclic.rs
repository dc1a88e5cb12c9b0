//! Cyclic covers `y^p = c f(x)` over `k = Q(zeta_p)` with
//! `f = (x^p - zeta)(x^p - q)(x^p - zeta q) ... (x^p - zeta^(p-1) q)`:
//! everywhere local linear factors of `f` and primes `r` for which `c = r`
//! is not a norm from `L = k[x]/f` modulo `p`-th powers.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{build_residue_field, is_prime_u64, multiplicative_order, pow_mod, primes_up_to, FfElem, FiniteField, IntPoly};
use crate::cert::{num_string, vec_num_string, Certificate, Check, Status, Step, Verdict};
use crate::error::{Error, Result};
use crate::local::{local_linear_factor, LinearFactorWitness, Place};

/// `q ≡ 1 (mod p^2)`, or `(mod 8)` when `p = 2`.
pub fn admissible(p: u64, q: u64) -> Result<bool> {
    for n in [p, q] {
        if !is_prime_u64(n) {
            return Err(Error::NonPrime(n.to_string()));
        }
    }
    let m = if p == 2 { 8 } else { p * p };
    Ok(q % m == 1)
}

/// Genus of the smooth model of `y^p = c f(x)`.
pub fn genus(p: u64) -> u64 {
    (p * p * p - 3 * p + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KummerFamily {
    #[serde(with = "num_string")]
    pub p: u64,
    #[serde(with = "num_string")]
    pub q: u64,
}

impl KummerFamily {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if !admissible(p, q)? {
            return Err(Error::Inadmissible { p, q });
        }
        Ok(KummerFamily { p, q })
    }

    pub fn genus(&self) -> u64 {
        genus(self.p)
    }

    /// Degree of `f`.
    pub fn degree(&self) -> u64 {
        self.p * (self.p + 1)
    }

    /// Factor `0` is `x^p - zeta`; factor `j >= 1` is `x^p - zeta^(j-1) q`.
    pub fn factor_label(&self, j: usize) -> String {
        let p = self.p;
        if p == 2 {
            return ["x^2 + 1".to_string(), format!("x^2 - {}", self.q), format!("x^2 + {}", self.q)][j].clone();
        }
        match j {
            0 => format!("x^{p} - zeta"),
            1 => format!("x^{p} - {}", self.q),
            2 => format!("x^{p} - zeta*{}", self.q),
            _ => format!("x^{p} - zeta^{}*{}", j - 1, self.q),
        }
    }

    pub fn factor_labels(&self) -> Vec<String> {
        (0..=self.p as usize).map(|j| self.factor_label(j)).collect()
    }

    /// `x^p - q` as an integer polynomial.
    fn rational_factor(&self) -> IntPoly {
        let mut c = vec![BigInt::from(0); self.p as usize + 1];
        c[0] = -BigInt::from(self.q);
        c[self.p as usize] = BigInt::one();
        IntPoly::new(c)
    }

    /// For `p = 2` all factors are rational: `x^2 + 1`, `x^2 - q`, `x^2 + q`.
    fn rational_factors_p2(&self) -> Vec<IntPoly> {
        let q = self.q as i64;
        vec![
            IntPoly::from_i64(&[1, 0, 1]),
            IntPoly::from_i64(&[-q, 0, 1]),
            IntPoly::from_i64(&[q, 0, 1]),
        ]
    }
}

/// A prime of `k` above the rational prime `r`, with its residue field.
#[derive(Debug, Clone)]
pub struct CycloPlace {
    pub r: u64,
    pub residue_degree: usize,
    pub field: Option<FiniteField>,
    pub is_p: bool,
    pub is_q: bool,
}

impl CycloPlace {
    pub fn new(f: &KummerFamily, r: u64) -> Result<Self> {
        if !is_prime_u64(r) {
            return Err(Error::NonPrime(r.to_string()));
        }
        let field = if r == f.p { None } else { Some(build_residue_field(f.p, r)?) };
        let residue_degree = match &field {
            Some(k) => k.degree(),
            None => 1,
        };
        if let Some(k) = &field {
            debug_assert_eq!(k.degree() as u64, multiplicative_order(r % f.p, f.p));
        }
        Ok(CycloPlace {
            r,
            residue_degree,
            field,
            is_p: r == f.p,
            is_q: r == f.q,
        })
    }
}

/// Element `zeta^i` (`i` may be any exponent) times `q` in `F`, or `zeta^i`
/// alone for factor `0`.
fn factor_constant(k: &FiniteField, fam: &KummerFamily, j: usize, zeta: &FfElem) -> FfElem {
    if j == 0 {
        return zeta.clone();
    }
    let z = k.pow_u64(zeta, (j - 1) as u64);
    k.mul(&z, &k.from_int(&BigInt::from(fam.q)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorRoot {
    /// `w` in the residue field with `w^p` equal to the factor's constant;
    /// lifts by Hensel since the constant is a unit and `r != p`
    Residue {
        #[serde(with = "vec_num_string")]
        modulus: Vec<u64>,
        #[serde(with = "vec_num_string")]
        root: Vec<u64>,
    },
    /// a root over `Q_v` of a factor with rational coefficients
    Rational { witness: LinearFactorWitness },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactorCheck {
    pub family: KummerFamily,
    pub place: Place,
    #[serde(with = "num_string")]
    pub factor_index: usize,
    pub factor: String,
    pub root: FactorRoot,
}

impl LocalFactorCheck {
    /// Re-checks the stored root from raw arithmetic.
    pub fn verify(&self) -> bool {
        let fam = self.family;
        if admissible(fam.p, fam.q) != Ok(true) || self.factor_index > fam.p as usize {
            return false;
        }
        if self.factor != fam.factor_label(self.factor_index) {
            return false;
        }
        match (&self.root, self.place) {
            (FactorRoot::Residue { modulus, root }, Place::Finite(r)) => {
                if r == fam.p {
                    return false;
                }
                let Ok(k) = build_residue_field(fam.p, r) else {
                    return false;
                };
                if k.modulus() != modulus.as_slice() || root.len() != k.degree() || root.iter().any(|&c| c >= r) {
                    return false;
                }
                let target = factor_constant(&k, &fam, self.factor_index, &k.zeta());
                !k.is_zero(&target) && k.pow_u64(root, fam.p) == target
            }
            (FactorRoot::Rational { witness }, v) => {
                if fam.p == 2 {
                    witness.factor_index == self.factor_index && witness.verify(&fam.rational_factors_p2(), v)
                } else {
                    self.factor_index == 1
                        && witness.factor_index == 0
                        && v == Place::Finite(fam.p)
                        && witness.verify(&[fam.rational_factor()], v)
                }
            }
            _ => false,
        }
    }
}

fn residue_check(fam: &KummerFamily, r: u64, zeta_power: u64) -> Result<Option<(usize, FfElem, Vec<u64>)>> {
    let k = build_residue_field(fam.p, r)?;
    let zeta = k.pow_u64(&k.zeta(), zeta_power);
    for j in 0..=fam.p as usize {
        let c = factor_constant(&k, fam, j, &zeta);
        if k.is_zero(&c) {
            continue;
        }
        if let Some(w) = k.pth_root(&c, fam.p) {
            return Ok(Some((j, w, k.modulus().to_vec())));
        }
    }
    Ok(None)
}

/// A linear factor of `f` over the completion of `k` at a prime above `r`
/// (or over `R` for `p = 2`).
pub fn local_factor_check(fam: &KummerFamily, v: Place) -> Result<LocalFactorCheck> {
    let make = |j: usize, root: FactorRoot| LocalFactorCheck {
        family: *fam,
        place: v,
        factor_index: j,
        factor: fam.factor_label(j),
        root,
    };
    match v {
        Place::Real => {
            if fam.p != 2 {
                return Err(Error::InvalidInput("Q(zeta_p) has no real place for odd p".into()));
            }
            let w = local_linear_factor(&fam.rational_factors_p2(), v)?
                .ok_or(Error::InternalPigeonholeViolation(0))?;
            Ok(make(w.factor_index, FactorRoot::Rational { witness: w }))
        }
        Place::Finite(r) if r == fam.p => {
            let w = if fam.p == 2 {
                local_linear_factor(&fam.rational_factors_p2(), v)?
            } else {
                local_linear_factor(&[fam.rational_factor()], v)?
            }
            .ok_or(Error::InternalPigeonholeViolation(r))?;
            let j = if fam.p == 2 { w.factor_index } else { 1 };
            Ok(make(j, FactorRoot::Rational { witness: w }))
        }
        Place::Finite(r) => {
            let (j, w, modulus) = residue_check(fam, r, 1)?.ok_or(Error::InternalPigeonholeViolation(r))?;
            Ok(make(j, FactorRoot::Residue { modulus, root: w }))
        }
    }
}

/// Whether some factor has a root at `r` when `zeta` is replaced by
/// `zeta^zeta_power` (`zeta_power` prime to `p`).
pub fn local_factor_exists_with_zeta(fam: &KummerFamily, r: u64, zeta_power: u64) -> Result<bool> {
    if zeta_power.is_multiple_of(fam.p) {
        return Err(Error::InvalidInput("zeta power must be prime to p".into()));
    }
    Ok(residue_check(fam, r, zeta_power)?.is_some())
}

/// Sufficient test for local triviality of the descent class at `v`: a factor
/// of degree prime to `p` (here linear) exists.
pub fn xi_local_triviality(fam: &KummerFamily, v: Place) -> Result<bool> {
    match local_factor_check(fam, v) {
        Ok(c) => Ok(c.verify()),
        Err(Error::InternalPigeonholeViolation(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// The places to scan: the real place for `p = 2`, then `p`, `q` and all
/// primes up to `bound`, ascending.
pub fn scan_places(fam: &KummerFamily, bound: u64) -> Vec<Place> {
    let mut primes = primes_up_to(bound);
    for s in [fam.p, fam.q] {
        if !primes.contains(&s) {
            primes.push(s);
        }
    }
    primes.sort_unstable();
    let mut out: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    if fam.p == 2 {
        out.push(Place::Real);
    }
    out
}

/// [`local_factor_check`] at every place of [`scan_places`].
pub fn local_factor_scan(fam: &KummerFamily, bound: u64) -> Result<Certificate> {
    let checks: Vec<LocalFactorCheck> = scan_places(fam, bound)
        .par_iter()
        .map(|&v| local_factor_check(fam, v))
        .collect::<Result<_>>()?;
    let mut steps = vec![Step::new(
        format!(
            "each x^{p} - zeta^i q is irreducible over k: a prime above {q} divides zeta^i q exactly once",
            p = fam.p,
            q = fam.q
        ),
        Status::Axiom,
        Check::None,
    )];
    for c in &checks {
        steps.push(Step::new(
            format!("{} has a root over the completion at {}", c.factor, c.place),
            Status::Verified,
            Check::LocalFactor { check: c.clone() },
        ));
    }
    steps.push(Step::new(
        format!(
            "at a prime above r outside {{{}, {}}} the p + 1 classes of zeta, q, zeta q, ..., zeta^(p-1) q in F^x/F^xp cannot all be nontrivial since F^x/F^xp has order dividing p, so one factor has a root by Hensel",
            fam.p, fam.q
        ),
        Status::Axiom,
        Check::None,
    ));
    let details = serde_json::json!({
        "family": fam,
        "genus": fam.genus().to_string(),
        "factors": fam.factor_labels(),
        "bound": bound.to_string(),
        "places_checked": checks.len().to_string(),
    });
    Ok(Certificate::new(
        "cyclic verify",
        [
            ("p".to_string(), fam.p.to_string()),
            ("q".to_string(), fam.q.to_string()),
            ("bound".to_string(), bound.to_string()),
        ],
        steps,
        Verdict::Verified,
        details,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauParity {
    PrimeToP,
    DivisibleByP,
}

/// `s` is a `p`-th power modulo `p^2`.
pub fn is_pth_power_mod_p2(s: u64, p: u64) -> bool {
    let m = p * p;
    !s.is_multiple_of(p) && pow_mod(s % m, p - 1, m) == 1
}

/// Parity of the gcd of inertia degrees above `s` in `K_1 = k(zeta^(1/p))`,
/// `K_2 = k(q^(1/p))` and `K_3 = k((zeta q)^(1/p))`.
pub fn tau_parity(i: u8, s: u64, fam: &KummerFamily) -> Result<TauParity> {
    if s == fam.p || s == fam.q {
        return Err(Error::ExcludedPrime(s));
    }
    if !is_prime_u64(s) {
        return Err(Error::NonPrime(s.to_string()));
    }
    let prime_to_p = match i {
        1 => is_pth_power_mod_p2(s, fam.p),
        2 | 3 => {
            let k = build_residue_field(fam.p, s)?;
            let q = k.from_int(&BigInt::from(fam.q));
            if i == 2 {
                k.is_pth_power(&q, fam.p)?
            } else {
                let mut found = false;
                for j in 1..fam.p {
                    let c = k.mul(&k.pow_u64(&k.zeta(), j), &q);
                    if k.is_pth_power(&c, fam.p)? {
                        found = true;
                        break;
                    }
                }
                found
            }
        }
        _ => return Err(Error::InvalidInput(format!("tau index {i} not in 1..=3"))),
    };
    Ok(if prime_to_p { TauParity::PrimeToP } else { TauParity::DivisibleByP })
}

/// Evidence for the three conditions making `r` an obstruction prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub family: KummerFamily,
    #[serde(with = "num_string")]
    pub r: u64,
    /// `r^(p-1) mod p^2`, which is not 1
    #[serde(with = "num_string")]
    pub a_power_mod_p2: u64,
    #[serde(with = "vec_num_string")]
    pub modulus: Vec<u64>,
    /// `i` with `zeta^i q` a `p`-th power in the residue field ...
    #[serde(with = "num_string")]
    pub b_index: u64,
    /// ... and a `p`-th root of it
    #[serde(with = "vec_num_string")]
    pub b_root: Vec<u64>,
    /// `zeta^((|F| - 1) / p)`, which is not 1
    #[serde(with = "vec_num_string")]
    pub c_power: Vec<u64>,
    pub conclusion: String,
}

impl ObstructionCertificate {
    /// Recomputes every condition from residue arithmetic.
    pub fn verify(&self) -> bool {
        let fam = self.family;
        let (p, r) = (fam.p, self.r);
        if admissible(p, fam.q) != Ok(true) || !is_prime_u64(r) || r == p || r == fam.q {
            return false;
        }
        // (A)
        let m = p * p;
        if pow_mod(r % m, p - 1, m) != self.a_power_mod_p2 || self.a_power_mod_p2 == 1 {
            return false;
        }
        let Ok(k) = build_residue_field(p, r) else {
            return false;
        };
        if k.modulus() != self.modulus.as_slice() {
            return false;
        }
        // (B)
        if self.b_index == 0 || self.b_index >= p || self.b_root.len() != k.degree() {
            return false;
        }
        let target = k.mul(&k.pow_u64(&k.zeta(), self.b_index), &k.from_int(&BigInt::from(fam.q)));
        if k.pow_u64(&self.b_root, p) != target {
            return false;
        }
        // (C)
        let e = (k.order() - BigUint::one()) / BigUint::from(p);
        let c = k.pow(&k.zeta(), &e);
        c == self.c_power && c != k.one()
    }
}

/// The obstruction certificate for `r`, if `r` satisfies all three conditions.
pub fn obstruction_at(fam: &KummerFamily, r: u64) -> Result<Option<ObstructionCertificate>> {
    let p = fam.p;
    if r == p || r == fam.q {
        return Err(Error::ExcludedPrime(r));
    }
    let m = p * p;
    let a = pow_mod(r % m, p - 1, m);
    if a == 1 {
        return Ok(None);
    }
    let k = build_residue_field(p, r)?;
    let e = (k.order() - BigUint::one()) / BigUint::from(p);
    let c = k.pow(&k.zeta(), &e);
    if c == k.one() {
        return Ok(None);
    }
    let q = k.from_int(&BigInt::from(fam.q));
    for i in 1..p {
        let t = k.mul(&k.pow_u64(&k.zeta(), i), &q);
        if let Some(w) = k.pth_root(&t, p) {
            return Ok(Some(ObstructionCertificate {
                family: *fam,
                r,
                a_power_mod_p2: a,
                modulus: k.modulus().to_vec(),
                b_index: i,
                b_root: w,
                c_power: c,
                conclusion: format!(
                    "a prime above {r} splits in k(({}q)^(1/{p})) and is inert in k(zeta^(1/{p})) while {r} is not a {p}-th power mod {m}, so c = {r} is not in N(L^x) k^x{p}; the curve y^{p} = {r} f(x) has Sha(J) not contained in (1 - zeta) H^1(J), hence not in {p}H^1(J)",
                    if i == 1 { "zeta ".to_string() } else { format!("zeta^{i} ") }
                ),
            }));
        }
    }
    Ok(None)
}

/// All obstruction primes `r <= bound` with `r` not dividing `p q`, ascending.
pub fn obstruction_prime_search(fam: &KummerFamily, bound: u64) -> Result<Vec<ObstructionCertificate>> {
    let primes: Vec<u64> = primes_up_to(bound)
        .into_iter()
        .filter(|&r| r != fam.p && r != fam.q)
        .collect();
    let found: Vec<Option<ObstructionCertificate>> =
        primes.par_iter().map(|&r| obstruction_at(fam, r)).collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Certificate for [`obstruction_prime_search`].
pub fn obstruction_certificate(fam: &KummerFamily, bound: u64) -> Result<Certificate> {
    let certs = obstruction_prime_search(fam, bound)?;
    let mut steps: Vec<Step> = certs
        .iter()
        .map(|c| {
            Step::new(
                format!("r = {} satisfies the split, inert and non-power conditions", c.r),
                Status::Verified,
                Check::Obstruction { certificate: c.clone() },
            )
        })
        .collect();
    steps.push(Step::new(
        "N_{K_3/Q}(O_{K_3}) lies in 1 + p^2 Z, so the norm conditions above exclude r from N(L^x) k^xp".into(),
        Status::Axiom,
        Check::None,
    ));
    let verdict = if certs.is_empty() { Verdict::Undecided } else { Verdict::Verified };
    let details = serde_json::json!({
        "family": fam,
        "bound": bound.to_string(),
        "primes": certs.iter().map(|c| c.r.to_string()).collect::<Vec<_>>(),
    });
    Ok(Certificate::new(
        "cyclic search-c",
        [
            ("p".to_string(), fam.p.to_string()),
            ("q".to_string(), fam.q.to_string()),
            ("bound".to_string(), bound.to_string()),
        ],
        steps,
        verdict,
        details,
    ))
}
