//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input must be nonzero")]
    Zero,
    #[error("{0} exceeds the 2^63 input ceiling")]
    AboveCeiling(u64),
    #[error("{a} is not invertible mod {q} (gcd {g})")]
    NotInvertible { a: u64, q: u64, g: u64 },
    #[error("moduli {0} and {1} are not coprime")]
    ModuliNotCoprime(u64, u64),
    #[error("intermediate modulus overflows u64")]
    Overflow,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("component {b} shares a factor with the modulus {q}")]
    NotCoprimeToModulus { b: u64, q: u64 },
    #[error("B = {b} exceeds q = {q}")]
    BExceedsQ { b: u64, q: u64 },
    #[error("rho = {rho} does not divide q = {q}")]
    RhoNotDivisor { rho: u64, q: u64 },
    #[error("rho = {0} is divisible by 3")]
    RhoDivisibleByThree(u64),
    #[error("rhostar = {got} is not the radical {want} of rho")]
    BadRadical { got: u64, want: u64 },
    #[error("principal character mod {0} rejected")]
    PrincipalCharacter(u64),
    #[error("imprimitive character (conductor {conductor} < modulus {q}) rejected")]
    ImprimitiveCharacter { q: u64, conductor: u64 },
    #[error("odd character mod {0} rejected")]
    OddCharacter(u64),
    #[error("modulus {0} is 2 mod 4 and carries no primitive characters")]
    TwoModFour(u64),
    #[error("modulus {0} too small for this operation")]
    ModulusTooSmall(u64),
    #[error("argument must be positive, got {0}")]
    NonPositive(f64),
    #[error("theta values must lie in (0, 1/2)")]
    ThetaOutOfRange,
    #[error("gamma must lie in [0, 1/3]")]
    GammaOutOfRange,
    #[error("csv row width {got} does not match schema width {want}")]
    SchemaMismatch { got: usize, want: usize },
    #[error("bad config line: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
