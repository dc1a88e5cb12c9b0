//! Verification and search toolkit for local-global divisibility failures of
//! Tate-Shafarevich elements.
//!
//! The crate certifies that for `E : y^2 = x(x+80)(x+205)` some element of
//! `Sha(E)` is not divisible by 4 in the Weil-Chatelet group, classifies the
//! 2-torsion of `Sha(E)` by lifts to `H^1(E[2])`, checks local solvability of
//! explicit torsor models, and runs the prime-condition calculus for cyclic
//! covers `y^p = c f(x)` over `Q(zeta_p)`. Every verdict is emitted as a
//! replayable [`cert::Certificate`].

pub mod arith;
pub mod cert;
pub mod config;
pub mod cyclic;
pub mod descent;
pub mod divisibility;
mod error;
pub mod homspace;
pub mod local;

pub use error::{Error, Result};
