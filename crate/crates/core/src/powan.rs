//! Power-boundedness diagnostics: `p(T)`, Kreiss constant, Ritt-type scan,
//! Katznelson-Tzafriri sequence and the Gelfand rigidity probe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qop::QMatrix;
use crate::quat::UnitImaginary;
use crate::sspec::{peripheral_part, s_spectrum, Resolvent, SSpectrum, Side};
use crate::yosida::{default_axes, ScanGrid, ScanPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Bounded,
    Unbounded,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    /// `‖T^n‖` for `n = 0..=N`.
    pub norms: Vec<f64>,
    /// `max_{n <= N} ‖T^n‖`, including `‖T^0‖ = 1`.
    pub p_n: f64,
    pub r_s: f64,
    pub classification: Classification,
    /// Least-squares slope of `‖T^n‖` against `n` over the last quartile.
    pub trend_slope: f64,
    pub evidence: Vec<String>,
}

/// Norms of `T^0..=T^N` by repeated multiplication, classified as
/// unbounded when `r_S > 1 + epsilon`, bounded when `r_S < 1 - epsilon` or
/// the norms are non-increasing after the first quarter, marginal otherwise.
pub fn power_norms(t: &QMatrix, n: usize) -> Result<PowerReport> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let norms: Vec<f64> = t.powers(n).iter().map(QMatrix::op_norm).collect();
    let r_s = s_spectrum(t).radius();
    Ok(classify(norms, r_s))
}

fn classify(norms: Vec<f64>, r_s: f64) -> PowerReport {
    let eps = crate::epsilon();
    let n = norms.len() - 1;
    let p_n = norms.iter().copied().fold(0.0, f64::max);
    let burn_in = n / 4;
    let tail = &norms[burn_in..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-8));
    let trend_slope = slope(&norms, n - n / 4);

    let mut evidence = vec![format!("p_N = {p_n:e} over n = 0..={n}"), format!("r_S = {r_s:.17}")];
    let classification = if r_s > 1.0 + eps {
        evidence.push(format!("r_S exceeds 1 by {:e}", r_s - 1.0));
        Classification::Unbounded
    } else if r_s < 1.0 - eps {
        evidence.push(format!("r_S is below 1 by {:e}", 1.0 - r_s));
        Classification::Bounded
    } else if non_increasing {
        evidence.push(format!("norms non-increasing for n >= {burn_in}"));
        Classification::Bounded
    } else {
        evidence.push(format!("r_S = 1 and norms increase after n = {burn_in}; slope over last quartile {trend_slope:e}"));
        Classification::Marginal
    };
    PowerReport { norms, p_n, r_s, classification, trend_slope, evidence }
}

fn slope(values: &[f64], from: usize) -> f64 {
    let pts: Vec<(f64, f64)> = values.iter().enumerate().skip(from).map(|(i, &v)| (i as f64, v)).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KreissReport {
    /// `max (|s| - 1) ‖S_L^{-1}(s,T)‖` over the grid.
    pub c_est: f64,
    pub witness: ScanPoint,
}

/// Measured Kreiss constant over `grid`; radii must exceed 1.
pub fn kreiss_scan(t: &QMatrix, grid: &ScanGrid) -> Result<KreissReport> {
    grid.validate_outside_unit_disk()?;
    let points = grid.points();
    let values: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let s = p.quaternion();
            let r = Resolvent::new(t, s)?.first(Side::Left);
            Ok((s.norm() - 1.0) * r.op_norm())
        })
        .collect::<Result<_>>()?;
    let (k, c_est) = argmax(&values);
    Ok(KreissReport { c_est, witness: points[k] })
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KtTrend {
    Converges,
    Stagnates,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KtVerdict {
    Converges,
    Stagnates,
    Undetermined,
    /// The numerical trend contradicts the spectral side of the theorem.
    Inconsistent,
    /// `T` is not classified power-bounded.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KtReport {
    /// `‖T^n - T^{n+1}‖` for `n = 0..=N`.
    pub d: Vec<f64>,
    pub peripheral: SSpectrum,
    /// `sqrt((x-1)^2 + y^2)` for every peripheral sphere.
    pub lower_bounds: Vec<f64>,
    /// Whether every peripheral sphere is within the spectral tolerance of `1`.
    pub peripheral_at_one: bool,
    pub classification: Classification,
    pub trend: KtTrend,
    pub verdict: KtVerdict,
    /// Whether `d_n >= max(lower_bounds) - 1e-8` for every `n`.
    pub lower_bound_holds: bool,
}

/// Thresholds for [`kt_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KtConfig {
    pub n: usize,
    /// Convergence threshold on `d_N`.
    pub tol: f64,
    /// Tolerance for `Gamma_S(T) ⊆ {1}`.
    pub spectral_tol: f64,
}

impl Default for KtConfig {
    fn default() -> Self {
        KtConfig { n: 200, tol: 1e-6, spectral_tol: 1e-8 }
    }
}

/// `d_n = ‖T^n - T^{n+1}‖` from successive cached powers, with the verdict
/// checked against `Gamma_S(T) ⊆ {1}`.
pub fn kt_scan(t: &QMatrix, cfg: &KtConfig) -> Result<KtReport> {
    if cfg.n < 2 {
        return Err(Error::Domain("N must be at least 2".into()));
    }
    let powers = t.powers(cfg.n + 1);
    let d: Vec<f64> = powers.windows(2).map(|w| (&w[0] - &w[1]).op_norm()).collect();
    let norms: Vec<f64> = powers[..=cfg.n].iter().map(QMatrix::op_norm).collect();
    let spectrum = s_spectrum(t);
    let power = classify(norms, spectrum.radius());

    let peripheral = peripheral_part(&spectrum, cfg.spectral_tol);
    let lower_bounds: Vec<f64> = peripheral.iter().map(|s| s.distance_to_one()).collect();
    let peripheral_at_one = lower_bounds.iter().all(|&b| b <= cfg.spectral_tol);
    let floor = lower_bounds.iter().copied().fold(0.0, f64::max);
    let lower_bound_holds = d.iter().all(|&v| v >= floor - 1e-8);

    let n = cfg.n;
    let trend = if d[n] < cfg.tol && d[n] <= d[n / 2] {
        KtTrend::Converges
    } else if d[n / 2 + 1..].iter().all(|&v| v > 10.0 * cfg.tol) {
        KtTrend::Stagnates
    } else {
        KtTrend::Undetermined
    };
    let verdict = match (power.classification, trend) {
        (Classification::Bounded, KtTrend::Converges) if peripheral_at_one => KtVerdict::Converges,
        (Classification::Bounded, KtTrend::Stagnates) if !peripheral_at_one => KtVerdict::Stagnates,
        (Classification::Bounded, KtTrend::Undetermined) => KtVerdict::Undetermined,
        (Classification::Bounded, _) => KtVerdict::Inconsistent,
        _ => KtVerdict::NotApplicable,
    };
    Ok(KtReport {
        d,
        peripheral,
        lower_bounds,
        peripheral_at_one,
        classification: power.classification,
        trend,
        verdict,
        lower_bound_holds,
    })
}

/// Grid refined toward `s = 1`: radii `1 + 2^{-k}` for `k = 1..=levels`,
/// angles `0` and `±pi 2^{-j}` for `j = 1..=angle_levels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RittGrid {
    pub levels: usize,
    pub angle_levels: usize,
    pub axes: Vec<UnitImaginary>,
}

impl Default for RittGrid {
    fn default() -> Self {
        RittGrid { levels: 14, angle_levels: 10, axes: default_axes() }
    }
}

impl RittGrid {
    pub fn radii(&self) -> Vec<f64> {
        (1..=self.levels).map(|k| 1.0 + 0.5f64.powi(k as i32)).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        let mut a = vec![0.0];
        for j in 1..=self.angle_levels {
            let th = std::f64::consts::PI * 0.5f64.powi(j as i32);
            a.push(th);
            a.push(-th);
        }
        a
    }

    fn scan_grid(&self) -> ScanGrid {
        ScanGrid { radii: self.radii(), angles: self.angles(), axes: self.axes.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RittRow {
    pub radius: f64,
    pub angle: f64,
    pub axis: UnitImaginary,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RittReport {
    pub alpha: f64,
    pub table: Vec<RittRow>,
    /// Largest table value.
    pub c_est: f64,
    /// Largest table value per refinement level `k`.
    pub level_max: Vec<f64>,
    /// Optional hypothesis constant supplied by the caller.
    pub c_hyp: Option<f64>,
    pub peripheral_at_one: bool,
    /// `Gamma_S ⊆ {1}`, the table stays bounded under refinement and, if
    /// given, `c_est <= c_hyp`.
    pub hypothesis_met: bool,
    /// The power sequence is classified bounded.
    pub conclusion_observed: bool,
    pub power: PowerReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RittConfig {
    pub alpha: f64,
    pub grid: RittGrid,
    pub c_hyp: Option<f64>,
    pub spectral_tol: f64,
    /// Power count used for `conclusion_observed`.
    pub n: usize,
}

impl Default for RittConfig {
    fn default() -> Self {
        RittConfig { alpha: 1.0, grid: RittGrid::default(), c_hyp: None, spectral_tol: 1e-8, n: 200 }
    }
}

/// Tabulates `|s-1|^{1+alpha} ‖S_L^{-2}(s,T)‖` on the refined grid.
///
/// The table is called bounded under refinement when the finest level's
/// maximum is at most twice the maximum at the middle level. Grid points
/// where the pencil is numerically singular enter the table as `+inf`.
pub fn ritt_scan(t: &QMatrix, cfg: &RittConfig) -> Result<RittReport> {
    if !(cfg.alpha > 0.0 && cfg.alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {}", cfg.alpha)));
    }
    if cfg.grid.levels < 2 || cfg.grid.axes.is_empty() {
        return Err(Error::Domain("Ritt grid needs at least two levels and one axis".into()));
    }
    let points = cfg.grid.scan_grid().points();
    let table: Vec<RittRow> = points
        .par_iter()
        .map(|p| {
            let s = p.quaternion();
            let x = s.re();
            let y = s.im_norm();
            let dist = ((x - 1.0) * (x - 1.0) + y * y).sqrt();
            let value = match Resolvent::new(t, s) {
                Ok(res) => dist.powf(1.0 + cfg.alpha) * res.power(Side::Left, 2).op_norm(),
                Err(Error::SpectrumPoint { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            Ok(RittRow { radius: p.radius, angle: p.angle, axis: p.axis, value })
        })
        .collect::<Result<_>>()?;
    let c_est = table.iter().map(|r| r.value).fold(0.0, f64::max);
    let level_max: Vec<f64> = cfg
        .grid
        .radii()
        .iter()
        .map(|&radius| table.iter().filter(|r| r.radius == radius).map(|r| r.value).fold(0.0, f64::max))
        .collect();

    let spectrum = s_spectrum(t);
    let peripheral_at_one = peripheral_part(&spectrum, cfg.spectral_tol).iter().all(|s| s.distance_to_one() <= cfg.spectral_tol);
    let k = level_max.len();
    let refined_bounded = level_max[k - 1].is_finite() && level_max[k - 1] <= 2.0 * level_max[k / 2 - 1];
    let within_hyp = cfg.c_hyp.is_none_or(|c| c_est <= c);
    let hypothesis_met = peripheral_at_one && refined_bounded && within_hyp;
    let power = power_norms(t, cfg.n)?;
    let conclusion_observed = power.classification == Classification::Bounded;
    Ok(RittReport {
        alpha: cfg.alpha,
        table,
        c_est,
        level_max,
        c_hyp: cfg.c_hyp,
        peripheral_at_one,
        hypothesis_met,
        conclusion_observed,
        power,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GelfandConfig {
    pub n: usize,
    /// Tolerance for `sigma_S(T) = {1}`.
    pub spectral_tol: f64,
    /// Largest admissible `sup_{|n| <= N} ‖T^n‖`.
    pub sup_bound: f64,
    /// Required bound on `‖T - I‖` when the hypotheses hold.
    pub identity_tol: f64,
}

impl Default for GelfandConfig {
    fn default() -> Self {
        GelfandConfig { n: 200, spectral_tol: 1e-8, sup_bound: 1.01, identity_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GelfandReport {
    /// `sup_{|n| <= N} ‖T^n‖`.
    pub sup_norm: f64,
    pub spectrum: SSpectrum,
    pub spectrum_at_one: bool,
    pub distance_to_identity: f64,
    pub hypotheses_hold: bool,
    /// `‖T - I‖ < identity_tol`, reported only when the hypotheses hold.
    pub rigidity_holds: Option<bool>,
}

/// Probes `sup_{n in Z} ‖T^n‖ < inf and sigma_S(T) = {1} => T = I` on `|n| <= N`.
pub fn gelfand_rigidity_check(t: &QMatrix, cfg: &GelfandConfig) -> Result<GelfandReport> {
    let inv = t.mat_inv()?;
    let forward = t.powers(cfg.n).iter().map(QMatrix::op_norm).fold(0.0, f64::max);
    let backward = inv.powers(cfg.n).iter().map(QMatrix::op_norm).fold(0.0, f64::max);
    let sup_norm = forward.max(backward);
    let spectrum = s_spectrum(t);
    let spectrum_at_one = spectrum.iter().all(|s| s.distance_to_one() <= cfg.spectral_tol);
    let distance_to_identity = t.distance(&QMatrix::identity(t.dim()));
    let hypotheses_hold = spectrum_at_one && sup_norm <= cfg.sup_bound;
    Ok(GelfandReport {
        sup_norm,
        spectrum,
        spectrum_at_one,
        distance_to_identity,
        hypotheses_hold,
        rigidity_holds: hypotheses_hold.then_some(distance_to_identity < cfg.identity_tol),
    })
}
