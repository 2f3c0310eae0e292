//! Exact coefficient arithmetic and sparse multivariate polynomials.

pub mod crt;
pub mod field;
pub mod monomial;
pub mod order;
pub mod parse;
pub mod polynomial;
pub mod primes;

pub use crt::{crt, lift_rational, reconstruct};
pub use field::{Field, PrimeField, Rationals};
pub use monomial::{binomial, monomial_count, monomials_of_degree, Monomial, MAX_VARS};
pub use order::VariableOrder;
pub use parse::parse_polynomial;
pub use polynomial::{Division, Polynomial};
pub use primes::{is_prime, random_prime, random_primes};

/// Polynomial with rational coefficients.
pub type QPoly = Polynomial<Rationals>;
