//! Quaternionic operator theory on `H^n`: S-spectrum, S-resolvents,
//! spherical Yosida approximations, contour functional calculus and
//! power-boundedness diagnostics for quaternion matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::sync::atomic::{AtomicU64, Ordering};

pub mod cli;
pub mod error;
pub mod fcalc;
pub mod fixtures;
pub mod powan;
pub mod qop;
pub mod quat;
pub mod sspec;
pub mod yosida;

pub use error::{Error, Result};
pub use qop::{ComplexAdjoint, QMatrix};
pub use quat::{Quaternion, SlicePoint, UnitImaginary};
pub use sspec::{Side, SpectralSphere, SSpectrum};

/// Default library-wide tolerance for equality and invertibility tests.
pub const DEFAULT_EPSILON: f64 = 1e-10;

static EPSILON_BITS: AtomicU64 = AtomicU64::new(DEFAULT_EPSILON.to_bits());

/// Current library-wide tolerance.
pub fn epsilon() -> f64 {
    f64::from_bits(EPSILON_BITS.load(Ordering::Relaxed))
}

/// Replaces the library-wide tolerance. Non-positive or non-finite values
/// are rejected.
pub fn set_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive and finite, got {eps}")));
    }
    EPSILON_BITS.store(eps.to_bits(), Ordering::Relaxed);
    Ok(())
}
