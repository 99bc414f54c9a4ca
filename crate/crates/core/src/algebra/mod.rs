//! Finite fields and capped sparse polynomials.

mod field;
mod poly;
pub mod text;

pub use field::{field_with_kth_root, FieldElement, FieldSpec, EXTENSION_ORDER_BOUND, PRIME_BOUND};
pub use poly::{poly_add, poly_evaluate, poly_mul_reduce, poly_substitute, Cap, Monomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("characteristic {p} divides k = {k}")]
    CharDividesK { p: u64, k: u32 },
    #[error("characteristic {0} exceeds the single-limb bound")]
    PrimeTooLarge(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    InvalidExtensionDegree(usize),
    #[error("invalid root order {0}")]
    InvalidRootOrder(u32),
    #[error("element is not a primitive root of the requested order")]
    NotPrimitiveRoot,
    #[error("modulus is not monic irreducible")]
    ReducibleModulus,
    #[error("coefficients do not describe a field element")]
    InvalidElement,
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("operands use different exponent caps")]
    CapMismatch,
    #[error("variable x_{0} has no value")]
    UnboundVariable(u32),
    #[error("parse error: {0}")]
    Parse(String),
}
