//! Deterministic matrix generators for tests, acceptance runs and the CLI.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qop::QMatrix;
use crate::quat::Quaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    /// Gaussian entries rescaled to an operator norm in `[0.3, 0.9]`.
    Random,
    /// `I + N` with `N` the ones superdiagonal.
    Jordan,
    /// Diagonal with random quaternion entries of modulus in `[0.2, 1)`.
    Diagonal,
    /// Diagonal with random unit quaternions.
    UnitaryLike,
}

impl FromStr for FixtureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(FixtureKind::Random),
            "jordan" => Ok(FixtureKind::Jordan),
            "diagonal" => Ok(FixtureKind::Diagonal),
            "unitary-like" => Ok(FixtureKind::UnitaryLike),
            other => Err(Error::Domain(format!("unknown fixture kind `{other}`"))),
        }
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixtureKind::Random => "random",
            FixtureKind::Jordan => "jordan",
            FixtureKind::Diagonal => "diagonal",
            FixtureKind::UnitaryLike => "unitary-like",
        })
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Uniformly distributed unit quaternion.
pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = random_quaternion(rng);
        let n = q.norm();
        if n > 1e-6 {
            return q / n;
        }
    }
}

/// Gaussian entries with standard deviation `std`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, std: f64) -> QMatrix {
    QMatrix::from_fn(n, |_, _| random_quaternion(rng) * std)
}

/// Gaussian matrix rescaled to operator norm exactly `norm`.
pub fn random_with_norm<R: Rng + ?Sized>(rng: &mut R, n: usize, norm: f64) -> QMatrix {
    let t = random_matrix(rng, n, 1.0);
    let current = t.op_norm();
    t.scale(norm / current)
}

/// `diag(1, q_2, ..., q_n)` with `|q_k| <= max_modulus < 1`.
pub fn peripheral_one_diagonal<R: Rng + ?Sized>(rng: &mut R, n: usize, max_modulus: f64) -> QMatrix {
    let mut d = vec![Quaternion::ONE];
    for _ in 1..n {
        let r = rng.random_range(0.1..max_modulus);
        d.push(random_unit_quaternion(rng) * r);
    }
    QMatrix::diag(&d)
}

pub fn jordan_block(n: usize) -> QMatrix {
    QMatrix::from_fn(n, |i, j| {
        if i == j || j == i + 1 {
            Quaternion::ONE
        } else {
            Quaternion::ZERO
        }
    })
}

/// Builds the fixture `kind` of dimension `n` from `seed`.
pub fn generate(kind: FixtureKind, seed: u64, n: usize) -> Result<QMatrix> {
    if n == 0 {
        return Err(Error::Domain("fixture dimension must be at least 1".into()));
    }
    let mut rng = rng(seed);
    Ok(match kind {
        FixtureKind::Random => {
            let norm = rng.random_range(0.3..0.9);
            random_with_norm(&mut rng, n, norm)
        }
        FixtureKind::Jordan => jordan_block(n),
        FixtureKind::Diagonal => {
            let d: Vec<_> = (0..n)
                .map(|_| {
                    let r = rng.random_range(0.2..1.0);
                    random_unit_quaternion(&mut rng) * r
                })
                .collect();
            QMatrix::diag(&d)
        }
        FixtureKind::UnitaryLike => {
            let d: Vec<_> = (0..n).map(|_| random_unit_quaternion(&mut rng)).collect();
            QMatrix::diag(&d)
        }
    })
}

/// The seeded random corpus used throughout the tests: 20 matrices of
/// dimension 2..=4 with `‖T‖ <= 0.9`.
pub fn random_corpus(seed: u64, count: usize) -> Vec<QMatrix> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=4);
            let norm = rng.random_range(0.3..0.9);
            random_with_norm(&mut rng, n, norm)
        })
        .collect()
}
