//! S-spectrum, pseudo-resolvent and the left/right S-resolvent operators.
//!
//! For `s ∈ H` the pencil `Q_s(T) = T^2 - 2Re(s)T + |s|^2 I` is a polynomial
//! in `T` with real coefficients. `s` belongs to the S-resolvent set when
//! `Q_s(T)` is invertible; the S-spectrum is the complement. Because the
//! pencil only depends on `Re(s)` and `|s|`, the S-spectrum is a union of
//! spheres `x + yS` which we store as [`SpectralSphere`]s.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qop::QMatrix;
use crate::quat::{Quaternion, UnitImaginary};

/// Which S-resolvent: `S_L^{-1} = Q^{-1}(s̄I - T)` or `S_R^{-1} = (s̄I - T)Q^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// The sphere `[x + yS]`; `y = 0` is the single real point `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "SphereRecord", from = "SphereRecord")]
pub struct SpectralSphere {
    pub x: f64,
    pub y: f64,
}

#[derive(Serialize, Deserialize)]
struct SphereRecord {
    x: f64,
    y: f64,
    #[serde(default)]
    modulus: f64,
}

impl From<SpectralSphere> for SphereRecord {
    fn from(s: SpectralSphere) -> Self {
        SphereRecord { x: s.x, y: s.y, modulus: s.modulus() }
    }
}

impl From<SphereRecord> for SpectralSphere {
    fn from(r: SphereRecord) -> Self {
        SpectralSphere::new(r.x, r.y)
    }
}

impl SpectralSphere {
    pub fn new(x: f64, y: f64) -> Self {
        SpectralSphere { x, y: y.abs() }
    }

    /// Sphere through a complex number `x + iy`.
    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im.abs())
    }

    /// Sphere through a quaternion.
    pub fn of(q: Quaternion) -> Self {
        Self::new(q.w, q.im_norm())
    }

    /// `|s|` for every `s` on the sphere.
    pub fn modulus(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `|s - 1|` for every `s` on the sphere.
    pub fn distance_to_one(&self) -> f64 {
        (self.x - 1.0).hypot(self.y)
    }

    /// The point `x + y·axis`.
    pub fn representative(&self, axis: UnitImaginary) -> Quaternion {
        axis.point(self.x, self.y)
    }

    /// Distance in the `(x, y)` half-plane.
    pub fn distance(&self, other: &SpectralSphere) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Distance from `q` to the sphere, measured in the half-plane.
    pub fn distance_to(&self, q: Quaternion) -> f64 {
        self.distance(&SpectralSphere::of(q))
    }
}

/// A finite axially symmetric set, one entry per distinct sphere.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SSpectrum {
    pub spheres: Vec<SpectralSphere>,
}

impl SSpectrum {
    /// Merges spheres closer than `epsilon·(1 + |x| + y)` and sorts by `(x, y)`.
    pub fn from_spheres(mut raw: Vec<SpectralSphere>) -> Self {
        raw.sort_by(sphere_order);
        let eps = crate::epsilon();
        let mut clusters: Vec<(SpectralSphere, usize)> = Vec::new();
        for s in raw {
            let tol = eps * (1.0 + s.x.abs() + s.y);
            match clusters.iter_mut().find(|(c, _)| c.distance(&s) <= tol) {
                Some((c, count)) => {
                    let k = *count as f64;
                    c.x = (c.x * k + s.x) / (k + 1.0);
                    c.y = (c.y * k + s.y) / (k + 1.0);
                    *count += 1;
                }
                None => clusters.push((s, 1)),
            }
        }
        let mut spheres: Vec<_> = clusters.into_iter().map(|(c, _)| c).collect();
        spheres.sort_by(sphere_order);
        SSpectrum { spheres }
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SpectralSphere> {
        self.spheres.iter()
    }

    /// `sup |s|` over the set; zero when empty.
    pub fn radius(&self) -> f64 {
        self.spheres.iter().map(|s| s.modulus()).fold(0.0, f64::max)
    }

    /// Half-plane distance from `q` to the nearest sphere.
    pub fn distance_to(&self, q: Quaternion) -> f64 {
        self.spheres.iter().map(|s| s.distance_to(q)).fold(f64::INFINITY, f64::min)
    }

    /// Whether every sphere lies within `tol` of the real point 1.
    pub fn within_one(&self, tol: f64) -> bool {
        self.spheres.iter().all(|s| s.distance_to_one() <= tol)
    }

    /// Hausdorff distance between two sphere sets in the `(x, y)` half-plane.
    pub fn hausdorff(&self, other: &SSpectrum) -> f64 {
        fn directed(a: &SSpectrum, b: &SSpectrum) -> f64 {
            a.spheres
                .iter()
                .map(|s| b.spheres.iter().map(|t| s.distance(t)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        }
        match (self.is_empty(), other.is_empty()) {
            (true, true) => 0.0,
            (false, false) => directed(self, other).max(directed(other, self)),
            _ => f64::INFINITY,
        }
    }
}

fn sphere_order(a: &SpectralSphere, b: &SpectralSphere) -> Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

/// `Q_s(T) = T^2 - 2Re(s)T + |s|^2 I`, evaluated as `(T - Re(s))^2 + |Im s|^2 I`.
///
/// The two forms are equal; the second avoids cancellation when `s` sits
/// next to a real spectral point.
pub fn q_pencil(t: &QMatrix, s: Quaternion) -> QMatrix {
    let shifted = t.shift(-s.re());
    let im2 = s.x * s.x + s.y * s.y + s.z * s.z;
    (&shifted * &shifted).shift(im2)
}

/// Magnitude of the two terms summed into the pencil, `‖T - Re(s)‖^2 + |Im s|^2`.
///
/// Invertibility of the pencil is judged relative to this, not only to
/// `σ_max(Q_s(T))`: for a scalar operator all singular values of the pencil
/// coincide, so a purely relative test would accept rounding noise.
fn pencil_scale(t: &QMatrix, s: Quaternion) -> f64 {
    let a = t.shift(-s.re()).op_norm();
    a * a + s.im().norm_sqr()
}

/// `Q_s(T)^{-1}`, or `SpectrumPoint` when the pencil is singular.
pub fn pseudo_resolvent(t: &QMatrix, s: Quaternion) -> Result<QMatrix> {
    q_pencil(t, s).inv_relative_to(pencil_scale(t, s)).map_err(to_spectrum_point)
}

fn to_spectrum_point(e: Error) -> Error {
    match e {
        Error::Singular { sigma_min, .. } => Error::SpectrumPoint { margin: sigma_min },
        other => other,
    }
}

/// Outcome of the definitional resolvent-set test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub in_resolvent_set: bool,
    /// Smallest singular value of `Q_s(T)`.
    pub margin: f64,
}

/// Whether `Q_s(T)` is invertible: `σ_min > epsilon·max(σ_max, ‖T - Re s‖^2 + |Im s|^2)`
/// on its adjoint. The margin is `σ_min` itself.
pub fn in_s_resolvent_set(t: &QMatrix, s: Quaternion) -> Membership {
    let (lo, hi) = q_pencil(t, s).extreme_singular_values();
    let threshold = crate::epsilon() * hi.max(pencil_scale(t, s));
    Membership { in_resolvent_set: lo > threshold, margin: lo }
}

/// S-spectrum from the eigenvalues of the complex adjoint.
///
/// The `2n` adjoint eigenvalues come in conjugate pairs; each pair is
/// matched and averaged into one sphere before near-duplicates are merged,
/// so an `n x n` matrix never yields more than `n` spheres.
pub fn s_spectrum(t: &QMatrix) -> SSpectrum {
    let mut eig = t.complex_adjoint().eigenvalues();
    let mut raw = Vec::with_capacity(eig.len() / 2);
    eig.sort_by(|a, b| b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re)));
    while let Some(z) = eig.pop() {
        let target = z.conj();
        let partner = eig
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (**a - target).norm().total_cmp(&(**b - target).norm()))
            .map(|(k, _)| k);
        let sphere = match partner {
            Some(k) => {
                let w = eig.swap_remove(k);
                SpectralSphere::new(0.5 * (z.re + w.re), 0.5 * (z.im.abs() + w.im.abs()))
            }
            None => SpectralSphere::from_complex(z),
        };
        raw.push(sphere);
    }
    SSpectrum::from_spheres(raw)
}

/// `r_S(T) = max |s|` over the S-spectrum.
pub fn s_spectral_radius(t: &QMatrix) -> f64 {
    s_spectrum(t).radius()
}

/// `(‖T^n‖^{1/n})` for `n = 1..=n_max`.
pub fn gelfand_radius(t: &QMatrix, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n_max);
    let mut p = t.clone();
    for n in 1..=n_max {
        out.push(p.op_norm().powf(1.0 / n as f64));
        if n < n_max {
            p = &p * t;
        }
    }
    Ok(out)
}

/// Spheres with `||s| - 1| <= tol`.
pub fn peripheral_spectrum(t: &QMatrix, tol: f64) -> SSpectrum {
    peripheral_part(&s_spectrum(t), tol)
}

pub(crate) fn peripheral_part(spec: &SSpectrum, tol: f64) -> SSpectrum {
    SSpectrum { spheres: spec.spheres.iter().copied().filter(|s| (s.modulus() - 1.0).abs() <= tol).collect() }
}

/// `Q_s(T)^{-1}` together with `T` and `s`, for evaluating S-resolvent
/// powers without re-inverting the pencil.
#[derive(Debug, Clone)]
pub struct Resolvent<'a> {
    t: &'a QMatrix,
    s: Quaternion,
    q_inv: QMatrix,
}

impl<'a> Resolvent<'a> {
    pub fn new(t: &'a QMatrix, s: Quaternion) -> Result<Self> {
        Ok(Resolvent { t, s, q_inv: pseudo_resolvent(t, s)? })
    }

    pub fn point(&self) -> Quaternion {
        self.s
    }

    pub fn pseudo(&self) -> &QMatrix {
        &self.q_inv
    }

    /// `S^{-1}(s, T)` on the requested side.
    pub fn first(&self, side: Side) -> QMatrix {
        let n = self.t.dim();
        let sbar_minus_t = &QMatrix::scalar(n, self.s.conj()) - self.t;
        match side {
            Side::Left => &self.q_inv * &sbar_minus_t,
            Side::Right => &sbar_minus_t * &self.q_inv,
        }
    }

    /// `S^{-k}(s, T)` for `k = 1..=n`.
    ///
    /// The left power is `Q^{-n} sum_m C(n,m) (-T)^m s̄^{n-m}`. Its numerator
    /// obeys `P_k = P_{k-1} s̄ - T P_{k-1}`, and since `Q^{-1}` commutes with
    /// `T` the whole power follows `R_k = Q^{-1}(R_{k-1}s̄ - T R_{k-1})`. The
    /// bracket is formed as `-R v - (T - x)R` with `s = x + v`, which is the
    /// same quantity without the cancellation of the expanded binomial sum.
    /// The right power mirrors this with every product reversed.
    pub fn powers(&self, side: Side, n: usize) -> Vec<QMatrix> {
        let v = self.s.im();
        let t_shift = self.t.shift(-self.s.re());
        let mut out = Vec::with_capacity(n);
        let mut r = QMatrix::identity(self.t.dim());
        for _ in 0..n {
            r = match side {
                Side::Left => {
                    let bracket = &(-&r.right_scalar(v)) - &(&t_shift * &r);
                    &self.q_inv * &bracket
                }
                Side::Right => {
                    let bracket = &(-&r.left_scalar(v)) - &(&r * &t_shift);
                    &bracket * &self.q_inv
                }
            };
            out.push(r.clone());
        }
        out
    }

    /// `S^{-n}(s, T)`; `n >= 1`.
    pub fn power(&self, side: Side, n: usize) -> QMatrix {
        self.powers(side, n).pop().expect("n >= 1")
    }
}

/// `S_L^{-1}(s,T) = Q_s(T)^{-1}(s̄I - T)` or `S_R^{-1}(s,T) = (s̄I - T)Q_s(T)^{-1}`.
pub fn s_resolvent(side: Side, t: &QMatrix, s: Quaternion) -> Result<QMatrix> {
    Ok(Resolvent::new(t, s)?.first(side))
}

/// `S^{-n}(s, T)` on the requested side, `n >= 1`.
pub fn s_resolvent_pow(side: Side, t: &QMatrix, s: Quaternion, n: usize) -> Result<QMatrix> {
    if n == 0 {
        return Err(Error::Domain("resolvent power must be positive".into()));
    }
    Ok(Resolvent::new(t, s)?.power(side, n))
}

/// Partial sum of `sum_m C(m+n-1, n-1) T^m s^{-(m+n)}`, truncated once a
/// geometric bound on the remaining tail drops below `tail_tol`.
///
/// The bound uses `‖T^m‖ <= c·ρ^m` with `ρ = ‖T^k‖^{1/k} < |s|` for the
/// first `k` where that holds, so it is valid for any `|s| > r_S(T)`.
pub fn resolvent_series_oracle(t: &QMatrix, s: Quaternion, n: usize, tail_tol: f64) -> Result<QMatrix> {
    const MAX_WARMUP: usize = 4096;
    const MAX_TERMS: usize = 1_000_000;

    if n == 0 {
        return Err(Error::Domain("resolvent power must be positive".into()));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::Domain("tail tolerance must be positive".into()));
    }
    let modulus = s.norm();
    let radius = s_spectral_radius(t);
    if modulus <= radius + crate::epsilon() * (1.0 + radius) {
        return Err(Error::Divergent { modulus, radius });
    }
    let dim = t.dim();
    let s_inv = s.inv()?;

    // Find ρ = ‖T^k‖^{1/k} < |s| and c = max_{j<k} ‖T^j‖ / ρ^j.
    let mut norms = vec![1.0];
    let mut p = QMatrix::identity(dim);
    let (rho, c, nilpotent_at) = loop {
        p = &p * t;
        let k = norms.len();
        let nk = p.op_norm();
        if nk == 0.0 {
            break (0.0, 0.0, Some(k));
        }
        let rho = nk.powf(1.0 / k as f64);
        if rho < modulus {
            let c = norms.iter().enumerate().map(|(j, &nj)| nj / rho.powi(j as i32)).fold(1.0, f64::max);
            break (rho, c, None);
        }
        if k >= MAX_WARMUP {
            return Err(Error::Divergent { modulus, radius });
        }
        norms.push(nk);
    };

    let q = rho / modulus;
    let mut sum = QMatrix::zeros(dim);
    let mut tm = QMatrix::identity(dim);
    let mut sp = s_inv.powi(n as u32);
    let mut coef = 1.0;
    let nf = n as f64;
    for m in 0..MAX_TERMS {
        if let Some(k) = nilpotent_at {
            if m >= k {
                return Ok(sum);
            }
        }
        sum = &sum + &tm.right_scalar(sp).scale(coef);

        let mf = m as f64;
        let next_coef = coef * (mf + nf) / (mf + 1.0);
        if nilpotent_at.is_none() {
            let ratio = (mf + 1.0 + nf) / (mf + 2.0) * q;
            if ratio < 1.0 {
                let next_bound = next_coef * c * q.powi(m as i32 + 1) * modulus.powi(-(n as i32));
                if next_bound / (1.0 - ratio) < tail_tol {
                    return Ok(sum);
                }
            }
        }
        tm = &tm * t;
        sp *= s_inv;
        coef = next_coef;
    }
    Err(Error::Divergent { modulus, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{random_corpus, random_matrix, random_unit_quaternion, rng};
    use proptest::prelude::*;
    use rand::Rng;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    /// `Q^{-n} sum_m C(n,m) (-T)^m s̄^{n-m}` exactly as displayed, summed term by term.
    fn binomial_left(t: &QMatrix, s: Quaternion, n: usize) -> QMatrix {
        let qinv = pseudo_resolvent(t, s).unwrap();
        let dim = t.dim();
        let neg_t = -t;
        let mut sum = QMatrix::zeros(dim);
        let mut coef = 1.0;
        for m in 0..=n {
            let term = neg_t.mat_pow(m as u32).right_scalar(s.conj().powi((n - m) as u32)).scale(coef);
            sum = &sum + &term;
            coef = coef * (n - m) as f64 / (m + 1) as f64;
        }
        &qinv.mat_pow(n as u32) * &sum
    }

    fn binomial_right(t: &QMatrix, s: Quaternion, n: usize) -> QMatrix {
        let qinv = pseudo_resolvent(t, s).unwrap();
        let dim = t.dim();
        let neg_t = -t;
        let mut sum = QMatrix::zeros(dim);
        let mut coef = 1.0;
        for m in 0..=n {
            let term = neg_t.mat_pow(m as u32).left_scalar(s.conj().powi((n - m) as u32)).scale(coef);
            sum = &sum + &term;
            coef = coef * (n - m) as f64 / (m + 1) as f64;
        }
        &sum * &qinv.mat_pow(n as u32)
    }

    /// Right-sided series `sum_m C(m+n-1, n-1) s^{-(m+n)} T^m`.
    fn right_series(t: &QMatrix, s: Quaternion, n: usize, terms: usize) -> QMatrix {
        let si = s.inv().unwrap();
        let mut sum = QMatrix::zeros(t.dim());
        let mut tm = QMatrix::identity(t.dim());
        let mut coef = 1.0;
        for m in 0..terms {
            sum = &sum + &tm.left_scalar(si.powi((m + n) as u32)).scale(coef);
            coef = coef * (m + n) as f64 / (m + 1) as f64;
            tm = &tm * t;
        }
        sum
    }

    #[test]
    fn pencil_of_identity_is_scalar() {
        let t = QMatrix::identity(3);
        let s = q(0.4, -1.0, 2.0, 0.3);
        let expected = QMatrix::scalar(3, Quaternion::real((s - Quaternion::ONE).norm_sqr()));
        assert!(q_pencil(&t, s).distance(&expected) < 1e-14);
    }

    #[test]
    fn pencil_at_real_point_is_square() {
        let mut g = rng(3);
        let t = random_matrix(&mut g, 3, 1.0);
        let shifted = t.shift(-0.7);
        assert!(q_pencil(&t, Quaternion::real(0.7)).distance(&(&shifted * &shifted)) < 1e-13);
    }

    #[test]
    fn pencil_matches_expanded_form_and_commutes() {
        let mut g = rng(4);
        let t = random_matrix(&mut g, 3, 1.0);
        let s = q(0.3, 0.2, -1.1, 0.5);
        let expanded = &(&(&t * &t) - &t.scale(2.0 * s.re())) + &QMatrix::scalar(3, Quaternion::real(s.norm_sqr()));
        let p = q_pencil(&t, s);
        assert!(p.distance(&expanded) < 1e-13);
        assert!((&p * &t).distance(&(&t * &p)) < 1e-13);
    }

    #[test]
    fn pencil_is_constant_on_spheres() {
        let mut g = rng(5);
        let t = random_matrix(&mut g, 3, 1.0);
        let base = q_pencil(&t, q(0.5, 1.2, 0.0, 0.0));
        for _ in 0..5 {
            let axis = UnitImaginary::from_quaternion(random_unit_quaternion(&mut g)).unwrap();
            let p = q_pencil(&t, axis.point(0.5, 1.2));
            assert!(p.distance(&base) < 1e-13);
        }
    }

    #[test]
    fn pseudo_resolvent_examples() {
        let id = QMatrix::identity(2);
        let p = pseudo_resolvent(&id, Quaternion::real(3.0)).unwrap();
        assert!(p.distance(&QMatrix::scalar(2, Quaternion::real(0.25))) < 1e-15);
        assert!(matches!(pseudo_resolvent(&id, Quaternion::ONE), Err(Error::SpectrumPoint { .. })));
    }

    #[test]
    fn pseudo_resolvent_commutes_with_t() {
        let mut g = rng(6);
        for _ in 0..10 {
            let t = random_matrix(&mut g, 3, 0.5);
            let s = random_unit_quaternion(&mut g) * (t.op_norm() + 0.5);
            let p = pseudo_resolvent(&t, s).unwrap();
            let comm = (&p * &t).distance(&(&t * &p));
            assert!(comm < 1e-9 * t.op_norm() * p.op_norm());
            let qs = q_pencil(&t, s);
            assert!((&p * &qs).distance(&(&qs * &p)) < 1e-10);
        }
    }

    #[test]
    fn membership_examples() {
        let m = in_s_resolvent_set(&QMatrix::identity(2), Quaternion::I);
        assert!(m.in_resolvent_set);
        assert!((m.margin - 2.0).abs() < 1e-14);

        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J]);
        assert!(!in_s_resolvent_set(&t, Quaternion::K).in_resolvent_set);

        let nil = QMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(!in_s_resolvent_set(&nil, Quaternion::ZERO).in_resolvent_set);
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(s_spectrum(&QMatrix::identity(3)).spheres, vec![SpectralSphere::new(1.0, 0.0)]);

        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J]);
        let sp = s_spectrum(&t);
        assert_eq!(sp.len(), 1);
        assert!(sp.spheres[0].distance(&SpectralSphere::new(0.0, 1.0)) < 1e-14);

        let jordan = QMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let sp = s_spectrum(&jordan);
        assert_eq!(sp.len(), 1);
        assert!(sp.spheres[0].distance(&SpectralSphere::new(1.0, 0.0)) < 1e-14);
    }

    #[test]
    fn sphere_diag_scan_matches_oracle() {
        // Q_s(diag(i, j)) is singular exactly on Re s = 0, |Im s| = 1.
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J]);
        let axis = UnitImaginary::new(1.0, -2.0, 0.5).unwrap();
        for a in -4..=4 {
            for b in 0..=8 {
                let (x, y) = (a as f64 * 0.25, b as f64 * 0.25);
                let on = a == 0 && b == 4;
                assert_eq!(!in_s_resolvent_set(&t, axis.point(x, y)).in_resolvent_set, on, "({x}, {y})");
            }
        }
    }

    #[test]
    fn spectral_radius_examples() {
        let nil = QMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(s_spectral_radius(&nil), 0.0);
        let g = gelfand_radius(&nil, 3).unwrap();
        assert_eq!((g[0], g[1], g[2]), (1.0, 0.0, 0.0));

        let s = q(0.3, -0.4, 1.2, 0.0);
        assert!((s_spectral_radius(&QMatrix::scalar(2, s)) - s.norm()).abs() < 1e-14);
        assert!(gelfand_radius(&nil, 0).is_err());
    }

    #[test]
    fn gelfand_sequence_approaches_radius() {
        let mut g = rng(11);
        for _ in 0..5 {
            let t = random_matrix(&mut g, 3, 0.4);
            let seq = gelfand_radius(&t, 60).unwrap();
            assert!((seq[59] - s_spectral_radius(&t)).abs() < 0.05);
        }
    }

    #[test]
    fn peripheral_examples() {
        assert_eq!(peripheral_spectrum(&QMatrix::identity(2), 1e-8).spheres, vec![SpectralSphere::new(1.0, 0.0)]);
        let t = QMatrix::diag(&[Quaternion::ONE, q(0.0, 0.0, 0.5, 0.0)]);
        assert_eq!(peripheral_spectrum(&t, 1e-8).spheres, vec![SpectralSphere::new(1.0, 0.0)]);
        let neg = QMatrix::scalar(2, Quaternion::real(-1.0));
        assert_eq!(peripheral_spectrum(&neg, 1e-8).spheres, vec![SpectralSphere::new(-1.0, 0.0)]);
    }

    #[test]
    fn resolvent_of_identity() {
        let id = QMatrix::identity(2);
        let s = q(0.5, 1.0, -0.5, 2.0);
        let expected = QMatrix::scalar(2, (s - Quaternion::ONE).inv().unwrap());
        for side in [Side::Left, Side::Right] {
            assert!(s_resolvent(side, &id, s).unwrap().distance(&expected) < 1e-14);
        }
        assert!(matches!(s_resolvent(Side::Left, &id, Quaternion::ONE), Err(Error::SpectrumPoint { .. })));
    }

    #[test]
    fn left_and_right_differ_on_noncommuting_example() {
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J]);
        let s = q(1.0, 2.0, 0.0, 0.0);
        let l = s_resolvent(Side::Left, &t, s).unwrap();
        let r = s_resolvent(Side::Right, &t, s).unwrap();
        assert!(l.distance(&r) > 1e-3);
    }

    #[test]
    fn left_resolvent_matches_neumann_series() {
        let mut g = rng(12);
        for _ in 0..8 {
            let t = random_matrix(&mut g, 3, 1.0);
            let t = t.scale(1.0 / t.op_norm());
            let s = random_unit_quaternion(&mut g) * 2.0;
            let l = s_resolvent(Side::Left, &t, s).unwrap();
            let series = resolvent_series_oracle(&t, s, 1, 1e-13).unwrap();
            assert!(l.distance(&series) < 1e-12);
        }
    }

    #[test]
    fn left_resolvent_equation() {
        // S_L^{-1}(s,T)·s - T·S_L^{-1}(s,T) = I
        let mut g = rng(13);
        for _ in 0..10 {
            let t = random_matrix(&mut g, 3, 0.7);
            let s = random_unit_quaternion(&mut g) * g.random_range(0.2..3.0);
            if !in_s_resolvent_set(&t, s).in_resolvent_set {
                continue;
            }
            let l = s_resolvent(Side::Left, &t, s).unwrap();
            let lhs = &l.right_scalar(s) - &(&t * &l);
            assert!(lhs.distance(&QMatrix::identity(3)) < 1e-9 * (1.0 + l.op_norm()));
        }
    }

    #[test]
    fn resolvent_powers_collapse_and_scalar_case() {
        let mut g = rng(14);
        let t = random_matrix(&mut g, 3, 0.5);
        let s = q(0.2, 1.5, 0.3, -0.4);
        for side in [Side::Left, Side::Right] {
            let one = s_resolvent_pow(side, &t, s, 1).unwrap();
            assert!(one.distance(&s_resolvent(side, &t, s).unwrap()) < 1e-14);
        }
        let id = QMatrix::identity(2);
        let sq = s_resolvent_pow(Side::Left, &id, Quaternion::real(3.0), 2).unwrap();
        assert!(sq.distance(&QMatrix::scalar(2, Quaternion::real(0.25))) < 1e-15);
        assert!(s_resolvent_pow(Side::Left, &id, Quaternion::real(3.0), 0).is_err());
    }

    #[test]
    fn recurrence_matches_displayed_binomial_sum() {
        let mut g = rng(15);
        for _ in 0..10 {
            let t = random_matrix(&mut g, 3, 0.6);
            let s = random_unit_quaternion(&mut g) * g.random_range(0.5..2.5);
            if in_s_resolvent_set(&t, s).margin < 1e-2 {
                continue;
            }
            let res = Resolvent::new(&t, s).unwrap();
            for n in 1..=5 {
                let l = res.power(Side::Left, n);
                let r = res.power(Side::Right, n);
                let bl = binomial_left(&t, s, n);
                let br = binomial_right(&t, s, n);
                assert!(l.distance(&bl) <= 1e-9 * (1.0 + bl.op_norm()), "left n={n}");
                assert!(r.distance(&br) <= 1e-9 * (1.0 + br.op_norm()), "right n={n}");
            }
        }
    }

    #[test]
    fn third_power_matches_series() {
        let mut g = rng(16);
        for _ in 0..5 {
            let t = random_matrix(&mut g, 3, 1.0);
            let t = t.scale(0.9 / s_spectral_radius(&t).max(t.op_norm() * 0.5));
            let s = random_unit_quaternion(&mut g) * 2.0;
            let closed = s_resolvent_pow(Side::Left, &t, s, 3).unwrap();
            let series = resolvent_series_oracle(&t, s, 3, 1e-12).unwrap();
            assert!(closed.distance(&series) < 1e-10);
        }
    }

    #[test]
    fn right_powers_match_right_series() {
        let mut g = rng(17);
        for t in random_corpus(17, 6) {
            let s = random_unit_quaternion(&mut g) * 1.5;
            for n in 1..=4 {
                let closed = s_resolvent_pow(Side::Right, &t, s, n).unwrap();
                assert!(closed.distance(&right_series(&t, s, n, 400)) < 1e-10);
            }
        }
    }

    #[test]
    fn series_oracle_examples() {
        let z = QMatrix::zeros(2);
        let s = q(0.5, 0.5, 0.0, 1.0);
        let out = resolvent_series_oracle(&z, s, 1, 1e-14).unwrap();
        assert!(out.distance(&QMatrix::scalar(2, s.inv().unwrap())) < 1e-15);

        let t = QMatrix::diag(&[Quaternion::real(0.5), q(0.0, 0.8, 0.0, 0.0)]);
        assert!(matches!(
            resolvent_series_oracle(&t, Quaternion::real(0.7), 1, 1e-12),
            Err(Error::Divergent { .. })
        ));
        assert!(matches!(
            resolvent_series_oracle(&t, Quaternion::J * 0.8, 1, 1e-12),
            Err(Error::Divergent { .. })
        ));
    }

    #[test]
    fn series_oracle_beyond_norm_but_above_radius() {
        // ‖T‖ is large but r_S = 0.5: the warm-up bound must still converge.
        let t = QMatrix::from_real(&[&[0.5, 20.0], &[0.0, 0.5]]).unwrap();
        let s = Quaternion::real(0.9);
        let series = resolvent_series_oracle(&t, s, 1, 1e-12).unwrap();
        let closed = s_resolvent(Side::Left, &t, s).unwrap();
        assert!(series.distance(&closed) < 1e-9);
    }

    #[test]
    fn hausdorff_basics() {
        let a = SSpectrum::from_spheres(vec![SpectralSphere::new(0.0, 1.0), SpectralSphere::new(1.0, 0.0)]);
        let b = SSpectrum::from_spheres(vec![SpectralSphere::new(0.0, 1.0)]);
        assert_eq!(a.hausdorff(&a), 0.0);
        assert!((a.hausdorff(&b) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.hausdorff(&SSpectrum::default()), f64::INFINITY);
    }

    #[test]
    fn spectrum_json_layout() {
        let s = s_spectrum(&QMatrix::identity(2));
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"[{"x":1.0,"y":0.0,"modulus":1.0}]"#);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn spectrum_is_nonempty_and_bounded_in_count(seed in any::<u64>(), n in 1usize..5) {
            let mut g = rng(seed);
            let t = random_matrix(&mut g, n, 1.0);
            let sp = s_spectrum(&t);
            prop_assert!(!sp.is_empty());
            prop_assert!(sp.len() <= n);
            prop_assert!(sp.radius() <= t.op_norm() * (1.0 + 1e-12));
        }

        #[test]
        fn spheres_are_axially_symmetric(seed in any::<u64>(), n in 1usize..5) {
            let mut g = rng(seed);
            let t = random_matrix(&mut g, n, 1.0);
            let sp = s_spectrum(&t);
            for sphere in sp.iter() {
                for _ in 0..8 {
                    let axis = UnitImaginary::from_quaternion(random_unit_quaternion(&mut g)).unwrap();
                    let m = in_s_resolvent_set(&t, sphere.representative(axis));
                    prop_assert!(!m.in_resolvent_set, "sphere {:?} margin {}", sphere, m.margin);
                }
            }
            let r = sp.radius().max(t.op_norm());
            let mut tested = 0;
            while tested < 32 {
                let p = random_unit_quaternion(&mut g) * g.random_range(0.0..1.5 * r + 0.1);
                let scale = 1.0 + p.norm();
                if sp.distance_to(p) > 0.1 * scale {
                    prop_assert!(in_s_resolvent_set(&t, p).in_resolvent_set);
                    tested += 1;
                }
            }
        }
    }
}
