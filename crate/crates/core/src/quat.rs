//! Quaternion arithmetic and slice geometry.
//!
//! Every quaternion `q = x + yI` lies in the complex plane `C_I = R + IR`
//! spanned by its own imaginary direction `I`. Most spectral quantities in
//! this crate depend on `q` only through the pair `(x, y)` with `y >= 0`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A quaternion `w + x i + y j + z k`.
///
/// Serialized as the 4-array `[w, x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Quaternion::real(r)
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(r: f64) -> Self {
        Self { w: r, x: 0.0, y: 0.0, z: 0.0 }
    }

    /// Real part `Re(q)`.
    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part `Im(q)` as a pure quaternion.
    #[inline]
    pub fn im(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Modulus `|q|`.
    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|Im(q)|`.
    #[inline]
    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn scale(self, r: f64) -> Quaternion {
        Quaternion::new(self.w * r, self.x * r, self.y * r, self.z * r)
    }

    /// Multiplicative inverse `conj(q) / |q|^2`.
    ///
    /// Fails with [`Error::ZeroDivisor`] when `|q|` is below the library
    /// epsilon.
    pub fn inv(self) -> Result<Quaternion> {
        let n2 = self.norm_sqr();
        let modulus = n2.sqrt();
        if modulus <= crate::epsilon() {
            return Err(Error::ZeroDivisor { modulus });
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Integer power by binary exponentiation. `q^0 = 1`.
    pub fn powi(self, n: u32) -> Quaternion {
        let mut acc = Quaternion::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Tolerance-based equality: `|a - b| <= eps * (1 + max(|a|, |b|))`.
    pub fn approx_eq(self, other: Quaternion, eps: f64) -> bool {
        (self - other).norm() <= eps * (1.0 + self.norm().max(other.norm()))
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w + b.w, self.x + b.x, self.y + b.y, self.z + b.z)
    }
}

impl Add<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self + q.w, q.x, q.y, q.z)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, b: Quaternion) {
        *self = *self + b;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.w - b.w, self.x - b.x, self.y - b.y, self.z - b.z)
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, b: Quaternion) {
        *self = *self - b;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, b: Quaternion) -> Quaternion {
        let a = self;
        Quaternion::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, b: Quaternion) {
        *self = *self * b;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, r: f64) -> Quaternion {
        self.scale(r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, r: f64) -> Quaternion {
        self.scale(1.0 / r)
    }
}

/// Hamilton product `a * b` as a free function.
#[inline]
pub fn q_mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// `q^{-1}`; see [`Quaternion::inv`].
#[inline]
pub fn q_inv(q: Quaternion) -> Result<Quaternion> {
    q.inv()
}

/// A purely imaginary unit quaternion `I`, so that `I^2 = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitImaginary(Quaternion);

impl UnitImaginary {
    /// Normalizes `(x, y, z)`. Fails when the direction has zero length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroDivisor { modulus: n });
        }
        Ok(UnitImaginary(Quaternion::new(0.0, x / n, y / n, z / n)))
    }

    /// Direction of the imaginary part of `q`; the real part is ignored.
    pub fn from_quaternion(q: Quaternion) -> Result<Self> {
        Self::new(q.x, q.y, q.z)
    }

    pub const fn i() -> Self {
        UnitImaginary(Quaternion::I)
    }

    pub const fn j() -> Self {
        UnitImaginary(Quaternion::J)
    }

    pub const fn k() -> Self {
        UnitImaginary(Quaternion::K)
    }

    #[inline]
    pub fn quaternion(self) -> Quaternion {
        self.0
    }

    /// The point `x + yI` of the slice `C_I`.
    #[inline]
    pub fn point(self, x: f64, y: f64) -> Quaternion {
        Quaternion::new(x, y * self.0.x, y * self.0.y, y * self.0.z)
    }

    /// `r e^{I theta} = r cos(theta) + r sin(theta) I`.
    #[inline]
    pub fn polar(self, r: f64, theta: f64) -> Quaternion {
        let (s, c) = theta.sin_cos();
        self.point(r * c, r * s)
    }

    /// Components `[x, y, z]` of the direction.
    pub fn components(self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }
}

impl TryFrom<[f64; 3]> for UnitImaginary {
    type Error = Error;
    fn try_from(c: [f64; 3]) -> Result<Self> {
        UnitImaginary::new(c[0], c[1], c[2])
    }
}

impl From<UnitImaginary> for [f64; 3] {
    fn from(u: UnitImaginary) -> Self {
        u.components()
    }
}

impl fmt::Display for UnitImaginary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{};{}", self.0.x, self.0.y, self.0.z)
    }
}

/// A point `x + y·axis` of the slice `C_axis`, in canonical form `y >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub x: f64,
    pub y: f64,
    pub axis: UnitImaginary,
    /// Set for real inputs, where the axis carries no information.
    pub degenerate: bool,
}

/// Splits `q` into `(Re q, |Im q|, Im q / |Im q|)`.
///
/// Real quaternions get `y = 0`, the default axis `i` and the degenerate
/// flag; callers must branch on the flag rather than on the axis.
pub fn slice_decompose(q: Quaternion) -> SlicePoint {
    let y = q.im_norm();
    if y > 0.0 && y.is_finite() {
        SlicePoint {
            x: q.w,
            y,
            axis: UnitImaginary(Quaternion::new(0.0, q.x / y, q.y / y, q.z / y)),
            degenerate: false,
        }
    } else {
        SlicePoint { x: q.w, y: 0.0, axis: UnitImaginary::i(), degenerate: true }
    }
}

/// Inverse of [`slice_decompose`]: `x + y·axis`.
pub fn embed_slice(p: SlicePoint) -> Quaternion {
    p.axis.point(p.x, p.y)
}
