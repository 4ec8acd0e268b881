//! Exact arithmetic: rationals, valuations, coefficient fields, truncated
//! power series, polynomials and linear algebra over ℚ and F_p.

pub mod field;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod series;

pub use field::CoefficientField;
pub use poly::Polynomial;
pub use rational::{
    display_rational, format_rational, is_prime, p_valuation, parse_rational, rat, rat_frac,
    Valuation,
};
pub use series::{wronskian, TruncatedSeries};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
