//! Local and archimedean invariants attached to Weierstrass points of
//! semistable hyperelliptic fibrations.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: exact rationals, p-adic valuations, prime fields, truncated
//!   power series with Hasse derivatives and Wronskians, polynomials and
//!   exact linear algebra.
//! * [`cluster`]: the tree of residue classes of the branch points over a
//!   discrete valuation ring, the invariant `e` and the residual divisor.
//! * [`fiber`]: intersection theory on special fibres given as component
//!   graphs, the correction divisors `Φ_P` and the local discriminant identity.
//! * [`hyperelliptic`]: hyperelliptic equations, discriminants, the valuation
//!   of the discriminant section and Wronskian identities on local expansions.
//! * [`analytic`]: Riemann theta functions, the norms `‖θ‖` and `‖J‖`, the
//!   T-invariant, period matrices by quadrature and Monte-Carlo theta
//!   integrals.
//! * [`height`]: the closed Faltings height formula and the lower bounds.
//! * [`schema`]: the JSON file formats shared with the command-line tool.

pub mod analytic;
pub mod arith;
pub mod cluster;
pub mod error;
pub mod fiber;
pub mod height;
pub mod hyperelliptic;
pub mod schema;

pub use error::{Error, Result};
