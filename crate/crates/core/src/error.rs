use thiserror::Error;

/// Errors surfaced by the library. Budget violations and non-stabilized
/// limits are reported, never silently absorbed.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("degenerate form: det = 0")]
    DegenerateForm,
    #[error("gram matrix is not symmetric")]
    AsymmetricGram,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("coordinate denominator is not a power of the declared prime")]
    DenominatorNotPPower,
    #[error("coordinate denominator divisible by p = {0}")]
    DenominatorDivisibleByP(u64),
    #[error("scan cap exceeded: needed {needed} candidates, cap {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("box too large: {needed} candidates exceed cap {cap}")]
    BoxTooLarge { needed: u128, cap: u128 },
    #[error("count did not stabilize (p = {p}, reached k = {k_reached})")]
    NotStabilized { p: u64, k_reached: u32 },
    #[error("no formula path at p = {0}; use brute force or prime-power counting")]
    BadPrime(u64),
    #[error("modulus {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("density table has no entry for prime {0}")]
    MissingPrime(u64),
    #[error("zero denominator: no points over F_{0}")]
    ZeroDenominator(u64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("chart degenerate: region meets the singular locus of the projection")]
    ChartDegenerate,
    #[error("density table entry at p = {0} violates omega(p)/p < 1")]
    DensityOutOfRange(u64),
}
