//! Spherical Yosida approximations and the discrete Hille-Yosida-Phillips scan.
//!
//! `Y_L(s,T) = S_L^{-1}(s,T)s^2 - sI` and `Y_R(s,T) = s^2 S_R^{-1}(s,T) - sI`.
//! Their `n`-th powers are taken in the form `T^n S_L^{-n}(s,T) s^n` and
//! `s^n S_R^{-n}(s,T) T^n`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qop::QMatrix;
use crate::quat::{slice_decompose, Quaternion, SlicePoint, UnitImaginary};
use crate::sspec::{Resolvent, Side};

/// Sampling grid `s = r e^{I theta}` over radii, angles and slice axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub axes: Vec<UnitImaginary>,
}

impl Default for ScanGrid {
    /// Radii `{1.05, 1.1, 1.25, 1.5, 2, 4}`, 16 angles `-pi + 2 pi k / 16`
    /// and the axes `i`, `j`, `(i+j+k)/sqrt 3`.
    fn default() -> Self {
        ScanGrid {
            radii: vec![1.05, 1.1, 1.25, 1.5, 2.0, 4.0],
            angles: uniform_angles(16),
            axes: default_axes(),
        }
    }
}

/// `-pi + 2 pi k / count` for `k = 0..count`.
pub fn uniform_angles(count: usize) -> Vec<f64> {
    (0..count).map(|k| -PI + 2.0 * PI * k as f64 / count as f64).collect()
}

/// `i`, `j` and `(i+j+k)/sqrt 3`.
pub fn default_axes() -> Vec<UnitImaginary> {
    vec![UnitImaginary::i(), UnitImaginary::j(), UnitImaginary::new(1.0, 1.0, 1.0).expect("nonzero")]
}

/// One sampled point of a [`ScanGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub radius: f64,
    pub angle: f64,
    pub axis: UnitImaginary,
    pub s: SlicePoint,
}

impl ScanPoint {
    pub fn quaternion(&self) -> Quaternion {
        self.axis.polar(self.radius, self.angle)
    }
}

impl ScanGrid {
    /// All points in radius-major, then angle, then axis order.
    pub fn points(&self) -> Vec<ScanPoint> {
        let mut out = Vec::with_capacity(self.radii.len() * self.angles.len() * self.axes.len());
        for &radius in &self.radii {
            for &angle in &self.angles {
                for &axis in &self.axes {
                    let s = axis.polar(radius, angle);
                    out.push(ScanPoint { radius, angle, axis, s: slice_decompose(s) });
                }
            }
        }
        out
    }

    pub(crate) fn validate_outside_unit_disk(&self) -> Result<()> {
        if self.radii.is_empty() || self.angles.is_empty() || self.axes.is_empty() {
            return Err(Error::Domain("scan grid must have at least one radius, angle and axis".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 1.0 && r.is_finite())) {
            return Err(Error::Domain(format!("scan radii must exceed 1, got {r}")));
        }
        Ok(())
    }
}

/// `Y_L(s,T) = S_L^{-1}(s,T)s^2 - sI` or `Y_R(s,T) = s^2 S_R^{-1}(s,T) - sI`.
pub fn yosida(side: Side, t: &QMatrix, s: Quaternion) -> Result<QMatrix> {
    let r = Resolvent::new(t, s)?.first(side);
    let s2 = s * s;
    let scaled = match side {
        Side::Left => r.right_scalar(s2),
        Side::Right => r.left_scalar(s2),
    };
    Ok(&scaled - &QMatrix::scalar(t.dim(), s))
}

/// `T^n S_L^{-n}(s,T) s^n` or `s^n S_R^{-n}(s,T) T^n`, `n >= 1`.
pub fn yosida_pow(side: Side, t: &QMatrix, s: Quaternion, n: usize) -> Result<QMatrix> {
    if n == 0 {
        return Err(Error::Domain("Yosida power must be positive".into()));
    }
    let r = Resolvent::new(t, s)?.power(side, n);
    let tn = t.mat_pow(n as u32);
    Ok(yosida_from_parts(side, &tn, &r, s.powi(n as u32)))
}

fn yosida_from_parts(side: Side, tn: &QMatrix, rn: &QMatrix, sn: Quaternion) -> QMatrix {
    match side {
        Side::Left => (tn * rn).right_scalar(sn),
        Side::Right => (rn * tn).left_scalar(sn),
    }
}

/// One table entry `(1 - 1/|s|)^n ‖Y^n(s,T)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YosidaRow {
    pub radius: f64,
    pub angle: f64,
    pub axis: UnitImaginary,
    pub side: Side,
    pub n: usize,
    pub value: f64,
}

/// Largest table value at one radius, per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusMax {
    pub radius: f64,
    pub left: f64,
    pub right: f64,
}

impl RadiusMax {
    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }
}

/// Outcome of comparing the scan against a target constant `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    /// `worst_ratio <= C`.
    Satisfies,
    /// `C` is exceeded at two adjacent radii; the witness is the worst row.
    Violates { radii: [f64; 2], witness: YosidaRow },
    /// `C` is exceeded, but not at two adjacent radii.
    Inconclusive { witness: YosidaRow },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YosidaScanReport {
    pub grid: Vec<ScanPoint>,
    pub n_max: usize,
    pub worst_ratio: f64,
    pub witness: YosidaRow,
    pub per_radius: Vec<RadiusMax>,
    pub c_target: f64,
    pub verdict: Verdict,
    pub table: Vec<YosidaRow>,
}

impl YosidaScanReport {
    /// Largest table value on one side.
    pub fn worst_on(&self, side: Side) -> f64 {
        self.per_radius
            .iter()
            .map(|m| match side {
                Side::Left => m.left,
                Side::Right => m.right,
            })
            .fold(0.0, f64::max)
    }

    /// Largest table value at `radius`, both sides.
    pub fn worst_at(&self, radius: f64) -> Option<f64> {
        self.per_radius.iter().find(|m| m.radius == radius).map(RadiusMax::max)
    }
}

/// Tabulates `(1 - 1/|s|)^n ‖Y^n(s,T)‖` for both sides, every grid point
/// and `n = 1..=n_max`, and judges the table against `c_target`.
pub fn yosida_bound_scan(t: &QMatrix, grid: &ScanGrid, n_max: usize, c_target: f64) -> Result<YosidaScanReport> {
    grid.validate_outside_unit_disk()?;
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let t_powers = t.powers(n_max);
    let points = grid.points();
    let per_point: Vec<Vec<YosidaRow>> = points
        .par_iter()
        .map(|p| scan_point(t, &t_powers, p, n_max))
        .collect::<Result<_>>()?;
    let table: Vec<YosidaRow> = per_point.into_iter().flatten().collect();

    let witness = *table
        .iter()
        .reduce(|best, row| if row.value > best.value { row } else { best })
        .expect("grid is nonempty");
    let per_radius: Vec<RadiusMax> = grid
        .radii
        .iter()
        .map(|&radius| {
            let side_max = |side| {
                table.iter().filter(|r| r.radius == radius && r.side == side).map(|r| r.value).fold(0.0, f64::max)
            };
            RadiusMax { radius, left: side_max(Side::Left), right: side_max(Side::Right) }
        })
        .collect();
    let verdict = judge(&per_radius, witness, c_target);
    Ok(YosidaScanReport {
        grid: points,
        n_max,
        worst_ratio: witness.value,
        witness,
        per_radius,
        c_target,
        verdict,
        table,
    })
}

fn scan_point(t: &QMatrix, t_powers: &[QMatrix], p: &ScanPoint, n_max: usize) -> Result<Vec<YosidaRow>> {
    let s = p.quaternion();
    let res = Resolvent::new(t, s)?;
    let damping = 1.0 - 1.0 / s.norm();
    let mut rows = Vec::with_capacity(2 * n_max);
    for side in [Side::Left, Side::Right] {
        let mut sn = Quaternion::ONE;
        for (k, rn) in res.powers(side, n_max).iter().enumerate() {
            let n = k + 1;
            sn *= s;
            let y = yosida_from_parts(side, &t_powers[n], rn, sn);
            let value = damping.powi(n as i32) * y.op_norm();
            rows.push(YosidaRow { radius: p.radius, angle: p.angle, axis: p.axis, side, n, value });
        }
    }
    Ok(rows)
}

/// Radii are compared in the order given; "adjacent" means consecutive in
/// that list.
fn judge(per_radius: &[RadiusMax], witness: YosidaRow, c_target: f64) -> Verdict {
    if witness.value <= c_target {
        return Verdict::Satisfies;
    }
    let pair = per_radius.windows(2).find(|w| w[0].max() > c_target && w[1].max() > c_target);
    match pair {
        Some(w) => Verdict::Violates { radii: [w[0].radius, w[1].radius], witness },
        None => Verdict::Inconclusive { witness },
    }
}

/// `‖Y_L(s,T) - T‖` together with the bound `‖T‖^2 / (|s| - ‖T‖)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitResidual {
    pub residual: f64,
    pub bound: f64,
}

/// Requires `|s| > ‖T‖`.
pub fn yosida_limit_residual(t: &QMatrix, s: Quaternion) -> Result<LimitResidual> {
    let norm = t.op_norm();
    let modulus = s.norm();
    if !(modulus > norm) {
        return Err(Error::Domain(format!("|s| = {modulus} must exceed ‖T‖ = {norm}")));
    }
    let y = yosida(Side::Left, t, s)?;
    Ok(LimitResidual { residual: (&y - t).op_norm(), bound: norm * norm / (modulus - norm) })
}
