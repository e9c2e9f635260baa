//! Quaternion matrices as bounded right-linear operators on `H^n`.
//!
//! A matrix acts on column vectors by left multiplication,
//! `(Tv)_i = sum_j T_ij v_j`, which makes it right `H`-linear. Inversion,
//! norms and spectra all go through the complex adjoint: writing
//! `T = A + B j` with `A, B` complex (in `C_i`), the `2n x 2n` matrix
//! `[[A, B], [-conj(B), conj(A)]]` is a faithful algebra homomorphism that
//! also preserves the Euclidean operator norm.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// An `n x n` quaternion matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct QMatrix {
    n: usize,
    data: Vec<Quaternion>,
}

/// On-disk matrix layout: `{"n": int, "entries": [[[w,x,y,z], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<Quaternion>>,
}

impl TryFrom<MatrixFile> for QMatrix {
    type Error = Error;
    fn try_from(f: MatrixFile) -> Result<Self> {
        if f.entries.len() != f.n {
            return Err(Error::DimensionMismatch { expected: f.n, found: f.entries.len() });
        }
        QMatrix::from_rows(f.entries)
    }
}

impl From<QMatrix> for MatrixFile {
    fn from(m: QMatrix) -> Self {
        MatrixFile { n: m.n, entries: m.rows() }
    }
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        QMatrix { n, data: vec![Quaternion::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Quaternion::ONE)
    }

    /// The scalar operator `q·I`: `q` on every diagonal entry.
    pub fn scalar(n: usize, q: Quaternion) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = q;
        }
        m
    }

    pub fn diag(d: &[Quaternion]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &q) in d.iter().enumerate() {
            m.data[i * n + i] = q;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        QMatrix { n, data }
    }

    /// Builds a matrix from square row-major rows.
    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            data.extend(row);
        }
        Ok(QMatrix { n, data })
    }

    /// Real matrix with quaternion entries.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Quaternion::real(v)).collect()).collect())
    }

    pub fn rows(&self) -> Vec<Vec<Quaternion>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Quaternion {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, q: Quaternion) {
        self.data[i * self.n + j] = q;
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// `q·T`, i.e. the composition `(qI) ∘ T`: every entry left-multiplied by `q`.
    pub fn left_scalar(&self, q: Quaternion) -> QMatrix {
        QMatrix { n: self.n, data: self.data.iter().map(|&e| q * e).collect() }
    }

    /// `T·q`, i.e. `T ∘ (qI)`: every entry right-multiplied by `q`.
    pub fn right_scalar(&self, q: Quaternion) -> QMatrix {
        QMatrix { n: self.n, data: self.data.iter().map(|&e| e * q).collect() }
    }

    pub fn scale(&self, r: f64) -> QMatrix {
        QMatrix { n: self.n, data: self.data.iter().map(|&e| e * r).collect() }
    }

    /// `T + c·I` for a real `c`.
    pub fn shift(&self, c: f64) -> QMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i].w += c;
        }
        m
    }

    pub fn mat_apply(&self, v: &[Quaternion]) -> Result<Vec<Quaternion>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        Ok((0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(v).fold(Quaternion::ZERO, |acc, (&t, &x)| acc + t * x)
            })
            .collect())
    }

    pub fn complex_adjoint(&self) -> ComplexAdjoint {
        let n = self.n;
        let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let q = self.get(i, j);
                let a = Complex64::new(q.w, q.x);
                let b = Complex64::new(q.y, q.z);
                m[(i, j)] = a;
                m[(i, n + j)] = b;
                m[(n + i, j)] = -b.conj();
                m[(n + i, n + j)] = a.conj();
            }
        }
        ComplexAdjoint(m)
    }

    /// Recovers `T` from its adjoint, rejecting matrices whose block
    /// symmetry is off by more than the library epsilon (relative).
    pub fn from_adjoint(adj: &ComplexAdjoint) -> Result<QMatrix> {
        let defect = adj.block_defect();
        let scale = adj.0.iter().fold(1.0f64, |m, c| m.max(c.norm()));
        if defect > crate::epsilon() * scale {
            return Err(Error::NotAdjointShaped { defect });
        }
        Ok(Self::project_adjoint(&adj.0))
    }

    /// Nearest quaternion matrix to an (almost) adjoint-shaped `m`.
    pub(crate) fn project_adjoint(m: &DMatrix<Complex64>) -> QMatrix {
        let n = m.nrows() / 2;
        QMatrix::from_fn(n, |i, j| {
            let a = (m[(i, j)] + m[(n + i, n + j)].conj()) * 0.5;
            let b = (m[(i, n + j)] - m[(n + i, j)].conj()) * 0.5;
            Quaternion::new(a.re, a.im, b.re, b.im)
        })
    }

    /// Singular values of the complex adjoint, each listed twice.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.n == 0 {
            return Vec::new();
        }
        let svd = self.complex_adjoint().0.svd(false, false);
        svd.singular_values.iter().copied().collect()
    }

    /// Euclidean operator norm `‖T‖ = σ_max(adjoint(T))`.
    pub fn op_norm(&self) -> f64 {
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    /// `(σ_min, σ_max)` of the adjoint.
    pub fn extreme_singular_values(&self) -> (f64, f64) {
        let sv = self.singular_values();
        let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = sv.iter().copied().fold(0.0, f64::max);
        (lo, hi)
    }

    /// Inverse through the complex adjoint. `Singular` when
    /// `σ_min <= epsilon·σ_max`.
    pub fn mat_inv(&self) -> Result<QMatrix> {
        self.inv_relative_to(0.0)
    }

    /// Inverse with the singularity threshold `epsilon·max(σ_max, scale)`.
    ///
    /// `scale` lets callers supply the magnitude of the terms a matrix was
    /// assembled from, so a tiny result of cancellation counts as singular
    /// even when all its singular values are alike (e.g. `1 x 1`).
    pub(crate) fn inv_relative_to(&self, scale: f64) -> Result<QMatrix> {
        let svd = self.complex_adjoint().0.svd(true, true);
        let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let sigma_min = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(sigma_min > crate::epsilon() * sigma_max.max(scale)) || !sigma_min.is_finite() {
            return Err(Error::Singular { sigma_min, sigma_max });
        }
        let inv = svd
            .pseudo_inverse(0.0)
            .map_err(|_| Error::Singular { sigma_min, sigma_max })?;
        Ok(Self::project_adjoint(&inv))
    }

    /// `T^n` by binary exponentiation; `T^0 = I`.
    pub fn mat_pow(&self, n: u32) -> QMatrix {
        let mut acc = QMatrix::identity(self.n);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `[I, T, T^2, ..., T^n]` by repeated multiplication.
    pub fn powers(&self, n: usize) -> Vec<QMatrix> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(QMatrix::identity(self.n));
        for k in 0..n {
            let next = &out[k] * self;
            out.push(next);
        }
        out
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &QMatrix) -> f64 {
        (self - other).op_norm()
    }

    /// Largest entry modulus; a cheap norm for closeness checks.
    pub fn max_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |m, q| m.max(q.norm()))
    }
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;

    fn mul(self, rhs: &'a QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul for QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: QMatrix) -> QMatrix {
        &self * &rhs
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &'a QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        QMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl Add for QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: QMatrix) -> QMatrix {
        &self + &rhs
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &'a QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimensions differ");
        QMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl Sub for QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: QMatrix) -> QMatrix {
        &self - &rhs
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { n: self.n, data: self.data.iter().map(|&a| -a).collect() }
    }
}

/// The `2n x 2n` complex matrix `[[A, B], [-conj(B), conj(A)]]` of `T = A + Bj`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAdjoint(pub DMatrix<Complex64>);

impl ComplexAdjoint {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Largest violation of the block symmetry.
    pub fn block_defect(&self) -> f64 {
        let m = &self.0;
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
            return f64::INFINITY;
        }
        let n = m.nrows() / 2;
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((m[(i, j)] - m[(n + i, n + j)].conj()).norm());
                defect = defect.max((m[(i, n + j)] + m[(n + i, j)].conj()).norm());
            }
        }
        defect
    }

    /// Complex eigenvalues (closed under conjugation up to rounding).
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        if self.0.nrows() == 0 {
            return Vec::new();
        }
        let schur = self.0.clone().schur();
        let (_, t) = schur.unpack();
        (0..t.nrows()).map(|i| t[(i, i)]).collect()
    }
}

/// Free-function form of [`QMatrix::complex_adjoint`].
pub fn complex_adjoint(t: &QMatrix) -> ComplexAdjoint {
    t.complex_adjoint()
}

/// Free-function form of [`QMatrix::from_adjoint`].
pub fn from_adjoint(m: &ComplexAdjoint) -> Result<QMatrix> {
    QMatrix::from_adjoint(m)
}

pub fn mat_apply(t: &QMatrix, v: &[Quaternion]) -> Result<Vec<Quaternion>> {
    t.mat_apply(v)
}

pub fn op_norm(t: &QMatrix) -> f64 {
    t.op_norm()
}

pub fn mat_inv(t: &QMatrix) -> Result<QMatrix> {
    t.mat_inv()
}

pub fn mat_pow(t: &QMatrix, n: u32) -> QMatrix {
    t.mat_pow(n)
}
