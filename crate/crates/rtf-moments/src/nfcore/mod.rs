//! Arithmetic of ℚ and real quadratic fields of class number one: ideals in
//! factored form, multiplicative functions, Dedekind zeta data and lattice
//! enumeration.

pub mod arith;
pub mod enumerate;
pub mod field;
pub mod ideal;
pub mod zeta;

pub use arith::Q;
pub use enumerate::{enumerate_elements, enumerate_in_box, DEFAULT_CAP};
pub use field::{Field, FieldElement, PrimeIdeal, PrimeKind};
pub use ideal::{moebius, rho, tau, IdealData, WeightVector};
pub use zeta::{dedekind_zeta, dedekind_zeta_euler, local_zeta, zeta_laurent, EULER_GAMMA};

/// `field_from_spec("Q")`, `field_from_spec("Q(sqrt5)")`.
pub fn field_from_spec(spec: &str) -> crate::Result<Field> {
    Field::from_spec(spec)
}
