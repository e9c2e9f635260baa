//! Contour-quadrature S-functional calculus on disks `|s| < r`.
//!
//! On the circle `s = r e^{I theta}` the slice differential is
//! `ds_I = -I ds = s dtheta`, so
//! `f(T) = (1/2pi) ∫ S_L^{-1}(s,T) s f(s) dtheta` and the right-sided form is
//! `(1/2pi) ∫ f(s) s S_R^{-1}(s,T) dtheta`. Both are evaluated with the
//! trapezoidal rule on `theta_k = -pi + 2 pi k / N`.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qop::QMatrix;
use crate::quat::{slice_decompose, Quaternion, UnitImaginary};
use crate::sspec::{s_spectrum, Resolvent, SSpectrum, Side, SpectralSphere};

/// Circle of radius `radius` in the slice `C_axis`, sampled at `nodes` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub axis: UnitImaginary,
    pub radius: f64,
    pub nodes: usize,
    /// Quadrature tolerance for the node-doubling check; `None` skips it.
    pub tol: Option<f64>,
}

impl ContourSpec {
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn new(axis: UnitImaginary, radius: f64, nodes: usize) -> Result<Self> {
        let spec = ContourSpec { axis, radius, nodes, tol: Some(Self::DEFAULT_TOL) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tol(mut self, tol: Option<f64>) -> Result<Self> {
        self.tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Domain(format!("contour radius must be positive, got {}", self.radius)));
        }
        if self.nodes < 8 || !self.nodes.is_multiple_of(2) {
            return Err(Error::Domain(format!("contour needs an even node count >= 8, got {}", self.nodes)));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(Error::Domain(format!("quadrature tolerance must be positive, got {tol}")));
            }
        }
        Ok(())
    }
}

/// `f(q) = sum_m a_m q^m` with real coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicFunction {
    pub coeffs: Vec<f64>,
    /// Convergence radius; infinite for polynomials.
    pub radius: f64,
}

impl IntrinsicFunction {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        IntrinsicFunction { coeffs, radius: f64::INFINITY }
    }

    /// Truncated power series valid for `|q| <= radius`.
    pub fn series(coeffs: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("convergence radius must be positive, got {radius}")));
        }
        Ok(IntrinsicFunction { coeffs, radius })
    }

    pub fn identity() -> Self {
        Self::polynomial(vec![0.0, 1.0])
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::polynomial(c)
    }

    /// The first `terms` terms of the exponential series.
    pub fn exp(terms: usize) -> Self {
        let mut c = Vec::with_capacity(terms);
        let mut a = 1.0;
        for m in 0..terms {
            c.push(a);
            a /= (m + 1) as f64;
        }
        Self::polynomial(c)
    }

    /// Horner evaluation, preceded by the radius check.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        let modulus = q.norm();
        if modulus > self.radius {
            return Err(Error::OutOfRadius { modulus, radius: self.radius });
        }
        Ok(self.eval_unchecked(q))
    }

    fn eval_unchecked(&self, q: Quaternion) -> Quaternion {
        self.coeffs.iter().rev().fold(Quaternion::ZERO, |acc, &a| acc * q + Quaternion::real(a))
    }

    /// `sum_m a_m T^m` by Horner's rule; the oracle for polynomial `f`.
    pub fn eval_matrix(&self, t: &QMatrix) -> QMatrix {
        let n = t.dim();
        self.coeffs.iter().rev().fold(QMatrix::zeros(n), |acc, &a| (&acc * t).shift(a))
    }
}

impl FromStr for IntrinsicFunction {
    type Err = Error;

    /// `identity`, `q-1`, `exp-N`, or a coefficient list `a0,a1,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "identity" => return Ok(Self::identity()),
            "q-1" => return Ok(Self::polynomial(vec![-1.0, 1.0])),
            _ => {}
        }
        if let Some(n) = s.strip_prefix("exp-") {
            let terms: usize = n.parse().map_err(|_| Error::Domain(format!("bad exp preset `{s}`")))?;
            if terms == 0 {
                return Err(Error::Domain("exp preset needs at least one term".into()));
            }
            return Ok(Self::exp(terms));
        }
        let coeffs = s
            .split(',')
            .map(|c| c.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Domain(format!("unknown function `{s}`")))?;
        Ok(Self::polynomial(coeffs))
    }
}

/// `f(q)`; fails with `OutOfRadius` outside the convergence radius.
pub fn intrinsic_eval(f: &IntrinsicFunction, q: Quaternion) -> Result<Quaternion> {
    f.eval(q)
}

fn check_contour(t: &QMatrix, c: &ContourSpec) -> Result<SSpectrum> {
    c.validate()?;
    let spec = s_spectrum(t);
    let r = c.radius;
    let distance = spec.iter().map(|s| (s.modulus() - r).abs()).fold(f64::INFINITY, f64::min);
    if distance < crate::epsilon() * r.max(1.0) {
        return Err(Error::ContourThroughSpectrum { radius: r, distance });
    }
    if spec.radius() > r {
        return Err(Error::Domain(format!("contour radius {r} does not enclose r_S = {}", spec.radius())));
    }
    Ok(spec)
}

/// Trapezoidal sum over `count` nodes `theta_k = -pi + 2 pi k / count` of
/// the integrand weighted by `g(s) = s f(s)`.
fn trapezoid(side: Side, t: &QMatrix, c: &ContourSpec, count: usize, g: &(dyn Fn(Quaternion) -> Quaternion + Sync)) -> Result<Vec<QMatrix>> {
    (0..count)
        .into_par_iter()
        .map(|k| {
            let theta = -PI + 2.0 * PI * k as f64 / count as f64;
            let s = c.axis.polar(c.radius, theta);
            let r = Resolvent::new(t, s)?.first(side);
            let w = g(s);
            Ok(match side {
                Side::Left => r.right_scalar(w),
                Side::Right => r.left_scalar(w),
            })
        })
        .collect()
}

fn sum_scaled(terms: impl Iterator<Item = QMatrix>, n: usize, count: usize) -> QMatrix {
    terms.fold(QMatrix::zeros(n), |acc, m| &acc + &m).scale(1.0 / count as f64)
}

fn quadrature(side: Side, t: &QMatrix, c: &ContourSpec, g: &(dyn Fn(Quaternion) -> Quaternion + Sync)) -> Result<QMatrix> {
    check_contour(t, c)?;
    let n = t.dim();
    let Some(tol) = c.tol else {
        let terms = trapezoid(side, t, c, c.nodes, g)?;
        return Ok(sum_scaled(terms.into_iter(), n, c.nodes));
    };
    let fine = trapezoid(side, t, c, 2 * c.nodes, g)?;
    let coarse = sum_scaled(fine.iter().step_by(2).cloned(), n, c.nodes);
    let refined = sum_scaled(fine.into_iter(), n, 2 * c.nodes);
    let change = coarse.distance(&refined);
    if change > 10.0 * tol * coarse.op_norm().max(1.0) {
        return Err(Error::DivergedQuadrature { change });
    }
    Ok(coarse)
}

/// `T^n` from the Cauchy formula on the contour `c`.
pub fn contour_power(side: Side, t: &QMatrix, n: usize, c: &ContourSpec) -> Result<QMatrix> {
    let n = u32::try_from(n).map_err(|_| Error::Domain("power too large".into()))?;
    quadrature(side, t, c, &|s| s.powi(n + 1))
}

/// Left S-functional calculus `f(T)`.
pub fn functional_calculus(t: &QMatrix, f: &IntrinsicFunction, c: &ContourSpec) -> Result<QMatrix> {
    functional_calculus_side(Side::Left, t, f, c)
}

/// `f(T)` from the left or right Cauchy formula.
pub fn functional_calculus_side(side: Side, t: &QMatrix, f: &IntrinsicFunction, c: &ContourSpec) -> Result<QMatrix> {
    c.validate()?;
    if c.radius > f.radius {
        return Err(Error::OutOfRadius { modulus: c.radius, radius: f.radius });
    }
    quadrature(side, t, c, &|s| s * f.eval_unchecked(s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMappingReport {
    /// `sigma_S(f(T))` with `f(T)` from the contour quadrature.
    pub computed: SSpectrum,
    /// `{f(x + y i) : [x + yS] in sigma_S(T)}`.
    pub image: SSpectrum,
    pub hausdorff: f64,
}

/// Compares `sigma_S(f(T))` with the image of `sigma_S(T)` under `f`.
pub fn spectral_mapping_check(t: &QMatrix, f: &IntrinsicFunction, c: &ContourSpec) -> Result<SpectralMappingReport> {
    let ft = functional_calculus(t, f, c)?;
    let computed = s_spectrum(&ft);
    let image = SSpectrum::from_spheres(
        s_spectrum(t)
            .iter()
            .map(|sp| {
                let p = slice_decompose(f.eval_unchecked(Quaternion::new(sp.x, sp.y, 0.0, 0.0)));
                SpectralSphere::new(p.x, p.y)
            })
            .collect(),
    );
    let hausdorff = computed.hausdorff(&image);
    Ok(SpectralMappingReport { computed, image, hausdorff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{random_corpus, random_with_norm, rng};
    use crate::sspec::s_spectral_radius;
    use proptest::prelude::*;

    fn spec(axis: UnitImaginary, r: f64, n: usize) -> ContourSpec {
        ContourSpec::new(axis, r, n).unwrap()
    }

    #[test]
    fn eval_examples() {
        let sq = IntrinsicFunction::monomial(2);
        assert!(sq.eval(Quaternion::J).unwrap().approx_eq(Quaternion::real(-1.0), 1e-15));
        let shift: IntrinsicFunction = "q-1".parse().unwrap();
        assert_eq!(shift.eval(Quaternion::ONE).unwrap(), Quaternion::ZERO);
        let e = IntrinsicFunction::exp(40).eval(Quaternion::I * std::f64::consts::PI).unwrap();
        assert!(e.approx_eq(Quaternion::real(-1.0), 1e-10), "{e}");
    }

    #[test]
    fn eval_respects_radius() {
        let f = IntrinsicFunction::series(vec![1.0; 30], 1.0).unwrap();
        assert_eq!(f.eval(Quaternion::real(2.0)).unwrap_err().name(), "OutOfRadius");
        assert!(f.eval(Quaternion::real(0.5)).is_ok());
    }

    #[test]
    fn parsing() {
        assert_eq!("identity".parse::<IntrinsicFunction>().unwrap(), IntrinsicFunction::identity());
        assert_eq!("0, 0, 1".parse::<IntrinsicFunction>().unwrap(), IntrinsicFunction::monomial(2));
        assert_eq!("exp-3".parse::<IntrinsicFunction>().unwrap().coeffs, vec![1.0, 1.0, 0.5]);
        assert!("sin".parse::<IntrinsicFunction>().is_err());
        assert!("exp-0".parse::<IntrinsicFunction>().is_err());
    }

    #[test]
    fn contour_spec_validation() {
        assert!(ContourSpec::new(UnitImaginary::i(), 1.0, 7).is_err());
        assert!(ContourSpec::new(UnitImaginary::i(), 1.0, 10).is_ok());
        assert!(ContourSpec::new(UnitImaginary::i(), -1.0, 16).is_err());
    }

    #[test]
    fn zeroth_power_is_identity() {
        for t in random_corpus(1, 5) {
            for side in [Side::Left, Side::Right] {
                let p = contour_power(side, &t, 0, &spec(UnitImaginary::j(), 2.0, 256)).unwrap();
                assert!(p.distance(&QMatrix::identity(t.dim())) < 1e-8);
            }
        }
    }

    #[test]
    fn fifth_power_matches_mat_pow() {
        let mut g = rng(21);
        let t = random_with_norm(&mut g, 3, 1.0);
        let p = contour_power(Side::Left, &t, 5, &spec(UnitImaginary::i(), 2.0, 1024)).unwrap();
        assert!(p.distance(&t.mat_pow(5)) < 1e-8);
        let axis = UnitImaginary::new(1.0, 0.0, 1.0).unwrap();
        let q = contour_power(Side::Left, &t, 5, &spec(axis, 2.0, 1024)).unwrap();
        assert!(p.distance(&q) < 1e-8);
    }

    #[test]
    fn contour_errors() {
        let t = QMatrix::diag(&[Quaternion::real(2.0), Quaternion::real(0.5)]);
        let err = contour_power(Side::Left, &t, 1, &spec(UnitImaginary::i(), 2.0, 64)).unwrap_err();
        assert_eq!(err.name(), "ContourThroughSpectrum");
        let err = contour_power(Side::Left, &t, 1, &spec(UnitImaginary::i(), 1.0, 64)).unwrap_err();
        assert_eq!(err.name(), "DomainError");
        let near = QMatrix::diag(&[Quaternion::real(0.99)]);
        let err = contour_power(Side::Left, &near, 3, &spec(UnitImaginary::i(), 1.0, 8)).unwrap_err();
        assert_eq!(err.name(), "DivergedQuadrature");
    }

    #[test]
    fn calculus_examples() {
        let t = random_corpus(4, 1).remove(0);
        let c = spec(UnitImaginary::k(), 1.5, 512);
        let cube = functional_calculus(&t, &IntrinsicFunction::monomial(3), &c).unwrap();
        assert!(cube.distance(&t.mat_pow(3)) < 1e-8);
        let one = functional_calculus(&t, &IntrinsicFunction::polynomial(vec![1.0]), &c).unwrap();
        assert!(one.distance(&QMatrix::identity(t.dim())) < 1e-8);
        let f = IntrinsicFunction::polynomial(vec![0.0, 1.0, -1.0]);
        let zero = functional_calculus(&QMatrix::identity(2), &f, &spec(UnitImaginary::i(), 2.0, 256)).unwrap();
        assert!(zero.max_entry() < 1e-8);
        let bounded = IntrinsicFunction::series(vec![1.0; 10], 1.2).unwrap();
        assert_eq!(functional_calculus(&t, &bounded, &c).unwrap_err().name(), "OutOfRadius");
    }

    #[test]
    fn right_calculus_matches_left_for_polynomials() {
        let f = IntrinsicFunction::polynomial(vec![0.3, -1.0, 0.5, 0.25]);
        for t in random_corpus(8, 4) {
            let c = spec(UnitImaginary::j(), 2.0, 512);
            let l = functional_calculus_side(Side::Left, &t, &f, &c).unwrap();
            let r = functional_calculus_side(Side::Right, &t, &f, &c).unwrap();
            assert!(l.distance(&f.eval_matrix(&t)) < 1e-8);
            assert!(r.distance(&l) < 1e-8);
        }
    }

    #[test]
    fn radius_independence() {
        let f = IntrinsicFunction::exp(30);
        for t in random_corpus(13, 3) {
            let r = 1.2 * s_spectral_radius(&t).max(0.5);
            let a = functional_calculus(&t, &f, &spec(UnitImaginary::i(), r, 512)).unwrap();
            let b = functional_calculus(&t, &f, &spec(UnitImaginary::i(), 1.5 * r, 512)).unwrap();
            assert!(a.distance(&b) < 1e-7);
        }
    }

    #[test]
    fn spectral_mapping_examples() {
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J]);
        let rep = spectral_mapping_check(&t, &IntrinsicFunction::monomial(2), &spec(UnitImaginary::i(), 2.0, 256)).unwrap();
        assert_eq!(rep.image.len(), 1);
        assert!(rep.image.iter().next().unwrap().distance(&SpectralSphere::new(-1.0, 0.0)) < 1e-14);
        assert!(rep.hausdorff < 1e-8);
        for t in random_corpus(17, 5) {
            let rep = spectral_mapping_check(&t, &IntrinsicFunction::identity(), &spec(UnitImaginary::i(), 2.0, 256)).unwrap();
            assert!(rep.hausdorff < 1e-8);
            let f = IntrinsicFunction::polynomial(vec![0.0, -1.0, 1.0]);
            let rep = spectral_mapping_check(&t, &f, &spec(UnitImaginary::i(), 2.0, 256)).unwrap();
            assert!(rep.hausdorff < 1e-8, "{}", rep.hausdorff);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eval_stays_in_slice(
            coeffs in prop::collection::vec(-2.0f64..2.0, 1..6),
            w in -1.5f64..1.5, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
        ) {
            let q = Quaternion::new(w, x, y, z);
            prop_assume!(q.im_norm() > 1e-3);
            let v = IntrinsicFunction::polynomial(coeffs).eval(q).unwrap();
            let a = q.im();
            let b = v.im();
            let cross = Quaternion::new(0.0, a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);
            prop_assert!(cross.norm() <= 1e-12 * (1.0 + b.norm()) * a.norm());
        }

        #[test]
        fn calculus_matches_monomials(a in prop::collection::vec(-1.0f64..1.0, 6), seed in 0u64..1000) {
            let t = random_corpus(seed, 1).remove(0);
            let f = IntrinsicFunction::polynomial(a);
            let c = ContourSpec::new(UnitImaginary::i(), 2.0, 256).unwrap();
            let got = functional_calculus(&t, &f, &c).unwrap();
            prop_assert!(got.distance(&f.eval_matrix(&t)) < 1e-8);
        }
    }
}
