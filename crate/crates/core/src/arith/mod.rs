//! Exact integer arithmetic, factorization, residue symbols, integer
//! polynomials and the finite fields used as residue fields of `Q(zeta_p)`.

mod ffield;
mod int;
mod poly;

pub use ffield::{cyclotomic_factors, FfElem, FiniteField};
pub use int::{
    default_factor_bound, euler_phi, factorize, factorize_within, inv_mod, is_prime,
    is_prime_u64, jacobi, jacobi_i64, least_nonresidue, legendre_big, mul_mod,
    multiplicative_order, pow_mod, prime_divisors_u64, primes_up_to, squarefree_part,
    valuation, ExactInt, Factorization,
};
pub use poly::{val_big, IntPoly};

pub type ExactRat = num_rational::BigRational;

/// Residue field of `Q(zeta_p)` at a prime above `r`.
pub fn build_residue_field(p: u64, r: u64) -> crate::Result<FiniteField> {
    FiniteField::residue_field(p, r)
}
