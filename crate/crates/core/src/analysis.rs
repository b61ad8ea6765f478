//! L² functionals of the solution, explicit bounds, and growth-law fits.
//!
//! Norms are computed on the Fourier side, ‖w(t)‖² = ∫ ρ_u(t, r) r^{n−1} dr,
//! and converted with Plancherel, ‖u(t)‖² = (2π)^{−n}‖w(t)‖².

use std::f64::consts::PI;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Problem;
use crate::propagator::{DensityKind, SpectralDensity};
use crate::quadrature::{integrate_radial, Band, Estimate, Oscillation, QuadConfig};
use crate::spectra::{spectral_profiles, SpectralProfiles};
use crate::sphere::surface_area;

/// Default radius parameter of the low/high frequency split.
pub const DEFAULT_DELTA0: f64 = 0.9;

/// (2π)^{−n}, the Plancherel factor of the transform convention.
pub fn plancherel_factor(n: usize) -> f64 {
    (2.0 * PI).powi(-(n as i32))
}

/// Formats with 17 significant digits.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn oscillation(prof: &SpectralProfiles, t: f64) -> Oscillation {
    Oscillation::Phase { t, sigma: prof.sigma }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "time must be finite and ≥ 0, got {t}"
        )))
    }
}

/// ∫_band K(t, r) r^{n−1} dr for one density kind, without the Plancherel factor.
pub fn integrate_density(
    prof: &SpectralProfiles,
    t: f64,
    kind: DensityKind,
    band: Band,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    check_time(t)?;
    if prof.is_zero() {
        return Ok(Estimate::default());
    }
    let d = SpectralDensity::new(prof, t, kind);
    integrate_radial(&d, prof.n, band, oscillation(prof, t), cfg)
}

/// ‖w(t)‖² on the Fourier side, with its quadrature error.
pub fn fourier_norm_sq(prof: &SpectralProfiles, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    integrate_density(prof, t, DensityKind::Displacement, Band::full(), cfg)
}

/// ‖u(t)‖² with its quadrature error.
pub fn solution_l2_sq_estimate(p: &Problem, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    let prof = spectral_profiles(p)?;
    Ok(scale_estimate(
        fourier_norm_sq(&prof, t, cfg)?,
        plancherel_factor(p.n),
    ))
}

/// ‖u(t)‖² = (2π)^{−n} ∫ ρ_u(t, r) r^{n−1} dr.
pub fn solution_l2_sq(p: &Problem, t: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok(solution_l2_sq_estimate(p, t, cfg)?.value)
}

fn scale_estimate(e: Estimate, factor: f64) -> Estimate {
    Estimate {
        value: e.value * factor,
        error: e.error * factor,
        evaluations: e.evaluations,
    }
}

/// Radius (δ₀²/t)^{1/σ} inside which the phase stays below δ₀².
pub fn split_radius(t: f64, delta0: f64, sigma: f64) -> f64 {
    (delta0 * delta0 / t).powf(1.0 / sigma)
}

/// (I_low, I_high) with errors, each already scaled by (2π)^{−n}.
pub fn frequency_split_estimate(
    p: &Problem,
    t: f64,
    delta0: f64,
    cfg: &QuadConfig,
) -> Result<(Estimate, Estimate)> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::Precondition(format!(
            "δ₀ must lie in (0, 1), got {delta0}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("split needs t > 0, got {t}")));
    }
    let radius = split_radius(t, delta0, p.sigma);
    if radius > 1.0 {
        return Err(Error::Precondition(format!(
            "split radius {radius} exceeds 1; t = {t} is too small for δ₀ = {delta0}"
        )));
    }
    let prof = spectral_profiles(p)?;
    let c = plancherel_factor(p.n);
    let kind = DensityKind::Displacement;
    let low = integrate_density(&prof, t, kind, Band::new(0.0, radius), cfg)?;
    let high = integrate_density(&prof, t, kind, Band::from(radius), cfg)?;
    Ok((scale_estimate(low, c), scale_estimate(high, c)))
}

/// (I_low, I_high): the norm² split at radius (δ₀²/t)^{1/σ}.
pub fn frequency_split(p: &Problem, t: f64, delta0: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let (lo, hi) = frequency_split_estimate(p, t, delta0, cfg)?;
    Ok((lo.value, hi.value))
}

/// E(t) = ½(‖u_t‖² + ‖(−Δ)^{σ/2}u‖²) with its quadrature error.
///
/// The velocity and operator parts are integrated separately, so the
/// conservation check measures quadrature error rather than an algebraic
/// cancellation.
pub fn total_energy_estimate(p: &Problem, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    let prof = spectral_profiles(p)?;
    let vel = integrate_density(&prof, t, DensityKind::Velocity, Band::full(), cfg)?;
    let op = integrate_density(&prof, t, DensityKind::OperatorDisplacement, Band::full(), cfg)?;
    Ok(scale_estimate(vel + op, 0.5 * plancherel_factor(p.n)))
}

pub fn total_energy(p: &Problem, t: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok(total_energy_estimate(p, t, cfg)?.value)
}

/// |LHS − RHS| of ½‖V_t‖² + ½‖(−Δ)^{σ/2}V‖² = ½‖u₀‖² + ∫u₁V dx, where
/// V = ∫₀ᵗ u ds, every term computed spectrally.
pub fn antiderivative_identity_residual(p: &Problem, t: f64, cfg: &QuadConfig) -> Result<f64> {
    check_time(t)?;
    let prof = spectral_profiles(p)?;
    if prof.is_zero() {
        return Ok(0.0);
    }
    let full = Band::full();
    let kinetic = integrate_density(&prof, t, DensityKind::Displacement, full, cfg)?;
    let potential = integrate_density(&prof, t, DensityKind::OperatorAntiderivative, full, cfg)?;
    let forcing = integrate_density(&prof, t, DensityKind::Forcing, full, cfg)?;
    let initial = if prof.s0.is_zero() {
        Estimate::default()
    } else {
        let s0 = |r: f64| prof.s0.eval(r);
        integrate_radial(&s0, p.n, full, Oscillation::None, cfg)?
    };
    let lhs = 0.5 * kinetic.value + 0.5 * potential.value;
    let rhs = 0.5 * initial.value + forcing.value;
    Ok((lhs - rhs).abs() * plancherel_factor(p.n))
}

/// ‖ŵ₀‖², ‖ŵ₁‖² on the Fourier side, in closed form.
pub fn fourier_data_norms(prof: &SpectralProfiles) -> (f64, f64) {
    let p = prof.n as f64 - 1.0;
    (prof.s0.radial_moment(p), prof.s1.radial_moment(p))
}

/// The functional sampled by a [`NormSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    NormSq,
    Norm,
    Energy,
    #[serde(rename = "i_low")]
    ILow,
    #[serde(rename = "i_high")]
    IHigh,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norm_sq" => Ok(Self::NormSq),
            "norm" => Ok(Self::Norm),
            "energy" => Ok(Self::Energy),
            "i_low" => Ok(Self::ILow),
            "i_high" => Ok(Self::IHigh),
            other => Err(Error::Precondition(format!(
                "unknown quantity `{other}`; expected norm_sq, norm, energy, i_low or i_high"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub value: f64,
    pub err: f64,
}

/// A sampled trajectory t ↦ value of one functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub quantity: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<Problem>,
    pub points: Vec<SeriesPoint>,
}

impl NormSeries {
    /// Builds a series from raw points, enforcing increasing t and finite,
    /// nonnegative values.
    pub fn new(quantity: Quantity, problem: Option<Problem>, points: Vec<SeriesPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("series needs at least one point".into()));
        }
        if points.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::Precondition("series times must strictly increase".into()));
        }
        if let Some(bad) = points.iter().find(|p| !(p.value.is_finite() && p.value >= 0.0)) {
            return Err(Error::Precondition(format!(
                "series value {} at t = {} is not finite and ≥ 0",
                bad.value, bad.t
            )));
        }
        Ok(Self {
            quantity,
            problem,
            points,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Points with t inside [lo, hi].
    pub fn window(&self, lo: f64, hi: f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .copied()
            .filter(|p| p.t >= lo && p.t <= hi)
            .collect();
        Self::new(self.quantity, self.problem.clone(), points)
    }

    /// CSV with header `t,value,err`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["t", "value", "err"])?;
        for p in &self.points {
            w.write_record([format_sig17(p.t), format_sig17(p.value), format_sig17(p.err)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `t,value[,err]` CSV with a header row.
    pub fn read_csv<R: Read>(input: R, quantity: Quantity) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut points = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Precondition(format!(
                    "CSV row {} needs at least t and value",
                    points.len() + 1
                )));
            }
            let parse = |i: usize| -> Result<f64> {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Precondition(format!("bad number `{}`: {e}", &rec[i])))
            };
            let err = if rec.len() > 2 { parse(2)? } else { 0.0 };
            points.push(SeriesPoint {
                t: parse(0)?,
                value: parse(1)?,
                err,
            });
        }
        Self::new(quantity, None, points)
    }
}

/// `count` log-spaced times from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || count == 0 {
        return Err(Error::Precondition(format!(
            "log grid needs 0 < lo < hi and count ≥ 1, got [{lo}, {hi}] × {count}"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    let mut grid: Vec<f64> = (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    Ok(grid)
}

/// Evaluates one functional at every time of an increasing grid.
pub fn norm_series(p: &Problem, t_grid: &[f64], quantity: Quantity, cfg: &QuadConfig) -> Result<NormSeries> {
    norm_series_with(p, t_grid, quantity, DEFAULT_DELTA0, cfg)
}

/// [`norm_series`] with an explicit δ₀ for the split quantities.
pub fn norm_series_with(
    p: &Problem,
    t_grid: &[f64],
    quantity: Quantity,
    delta0: f64,
    cfg: &QuadConfig,
) -> Result<NormSeries> {
    if t_grid.is_empty() {
        return Err(Error::Precondition("time grid is empty".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("time grid must strictly increase".into()));
    }
    let prof = spectral_profiles(p)?;
    let c = plancherel_factor(p.n);
    let points: Result<Vec<SeriesPoint>> = t_grid
        .par_iter()
        .map(|&t| {
            let est = match quantity {
                Quantity::NormSq | Quantity::Norm => scale_estimate(fourier_norm_sq(&prof, t, cfg)?, c),
                Quantity::Energy => total_energy_estimate(p, t, cfg)?,
                Quantity::ILow => frequency_split_estimate(p, t, delta0, cfg)?.0,
                Quantity::IHigh => frequency_split_estimate(p, t, delta0, cfg)?.1,
            };
            let (value, err) = if quantity == Quantity::Norm {
                let v = est.value.max(0.0).sqrt();
                let e = if v > 0.0 {
                    est.error / (2.0 * v)
                } else {
                    est.error.sqrt()
                };
                (v, e)
            } else {
                (est.value.max(0.0), est.error)
            };
            Ok(SeriesPoint { t, value, err })
        })
        .collect();
    NormSeries::new(quantity, Some(p.clone()), points?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// value ≈ amplitude·t^exponent
    Power,
    /// value ≈ exponent·log t + amplitude
    Log,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    /// Power exponent α, or slope of the log model.
    pub exponent: f64,
    /// Prefactor of the power model, or intercept of the log model.
    pub amplitude: f64,
    pub max_relative_residual: f64,
    pub window: (f64, f64),
}

const MIN_FIT_POINTS: usize = 4;

fn fit_inputs(s: &NormSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    if s.points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_FIT_POINTS,
            got: s.points.len(),
        });
    }
    if let Some(p) = s.points.iter().find(|p| !(p.value > 0.0) || !(p.t > 0.0)) {
        return Err(Error::NonPositive {
            t: p.t,
            value: p.value,
        });
    }
    Ok((s.times(), s.values()))
}

/// Least-squares line y = a·x + b.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (a, my - a * mx)
}

fn window_of(t: &[f64]) -> (f64, f64) {
    (t[0], t[t.len() - 1])
}

/// Least squares on (log t, log value).
pub fn fit_power(s: &NormSeries) -> Result<FitResult> {
    let (t, y) = fit_inputs(s)?;
    let lx: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (alpha, b) = least_squares(&lx, &ly);
    let amplitude = b.exp();
    let res = t
        .iter()
        .zip(&y)
        .map(|(&ti, &yi)| (amplitude * ti.powf(alpha) / yi - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        model: FitModel::Power,
        exponent: alpha,
        amplitude,
        max_relative_residual: res,
        window: window_of(&t),
    })
}

/// Least squares of value against log t.
pub fn fit_log(s: &NormSeries) -> Result<FitResult> {
    let (t, y) = fit_inputs(s)?;
    let lx: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let (slope, b) = least_squares(&lx, &y);
    let res = lx
        .iter()
        .zip(&y)
        .map(|(&xi, &yi)| ((slope * xi + b) / yi - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        model: FitModel::Log,
        exponent: slope,
        amplitude: b,
        max_relative_residual: res,
        window: window_of(&t),
    })
}

/// Growth class of a norm² trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Growth {
    Bounded,
    LogGrowth { slope: f64 },
    PowerGrowth { alpha: f64 },
}

impl Growth {
    pub fn label(&self) -> &'static str {
        match self {
            Growth::Bounded => "Bounded",
            Growth::LogGrowth { .. } => "Log",
            Growth::PowerGrowth { .. } => "Power",
        }
    }
}

/// Exponents with |α| at or below this count as flat.
pub const BOUNDED_EXPONENT: f64 = 0.05;

/// Relative spread max/min − 1 over the last decade of t.
pub fn last_decade_variation(s: &NormSeries) -> f64 {
    let t_end = s.points.last().map_or(0.0, |p| p.t);
    let tail: Vec<f64> = s
        .points
        .iter()
        .filter(|p| p.t >= t_end / 10.0 * (1.0 - 1e-12))
        .map(|p| p.value)
        .collect();
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min - 1.0
    } else {
        f64::INFINITY
    }
}

/// Classifies a norm² series spanning at least three decades.
///
/// Bounded when |α| ≤ 0.05 and the last decade varies by less than `tol`;
/// power growth when the power fit is within `tol`, |α| > 0.05 and it fits no
/// worse than the log model; log growth when the log fit is within `tol` with
/// a positive slope. Anything else is reported as ambiguous.
pub fn classify_growth(s: &NormSeries, tol: f64) -> Result<Growth> {
    let (t0, t1) = match (s.points.first(), s.points.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => return Err(Error::Precondition("empty series".into())),
    };
    if !(t0 > 0.0 && t1 / t0 >= 1e3 * (1.0 - 1e-12)) {
        return Err(Error::Precondition(format!(
            "classification needs three decades of t, got [{t0}, {t1}]"
        )));
    }
    let power = fit_power(s)?;
    let log = fit_log(s)?;
    let variation = last_decade_variation(s);
    if power.exponent.abs() <= BOUNDED_EXPONENT && variation < tol {
        return Ok(Growth::Bounded);
    }
    if power.max_relative_residual < tol
        && power.exponent.abs() > BOUNDED_EXPONENT
        && power.max_relative_residual <= log.max_relative_residual
    {
        return Ok(Growth::PowerGrowth {
            alpha: power.exponent,
        });
    }
    if log.max_relative_residual < tol && log.exponent > 0.0 {
        return Ok(Growth::LogGrowth { slope: log.exponent });
    }
    Err(Error::Ambiguous(format!(
        "power α = {:.4} (residual {:.3e}), log slope = {:.4} (residual {:.3e}), last-decade variation {:.3e}, tol {tol}",
        power.exponent, power.max_relative_residual, log.exponent, log.max_relative_residual, variation
    )))
}

/// P²/(32n)·ω_n·δ₀ⁿ·t^{2−n/2}, the explicit low-frequency lower bound on ‖w(t)‖².
pub fn lower_bound_lemma31(p: f64, n: usize, delta0: f64, t: f64) -> f64 {
    let nf = n as f64;
    p * p / (32.0 * nf) * surface_area(n) * delta0.powi(n as i32) * t.powf(2.0 - nf / 2.0)
}

/// 2ω_n/(n−4)·‖u₁‖₁² + 2‖ŵ₁‖² + ‖ŵ₀‖², a t-uniform bound on ‖w(t)‖² for n ≥ 5.
pub fn upper_bound_prop41(n: usize, l1_u1: f64, wsq_u1: f64, wsq_u0: f64) -> Result<f64> {
    if n < 5 {
        return Err(Error::Precondition(format!(
            "the uniform bound needs n ≥ 5, got n = {n}"
        )));
    }
    Ok(2.0 * surface_area(n) / (n as f64 - 4.0) * l1_u1 * l1_u1 + 2.0 * wsq_u1 + wsq_u0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{l1_weighted_norm, l2_norm_data, moments, DataCombo, DataPrimitive};
    use crate::quadrature::tensor_oracle;
    use proptest::prelude::*;

    fn gauss(a: f64) -> DataCombo {
        DataCombo::single(1.0, DataPrimitive::Gaussian { a })
    }

    fn dipole(a: f64) -> DataCombo {
        DataCombo::single(1.0, DataPrimitive::Dipole { a, axis: 1 })
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn series(t: &[f64], y: &[f64]) -> NormSeries {
        let pts = t
            .iter()
            .zip(y)
            .map(|(&t, &value)| SeriesPoint { t, value, err: 0.0 })
            .collect();
        NormSeries::new(Quantity::NormSq, None, pts).unwrap()
    }

    #[test]
    fn norm_at_time_zero_is_data_norm() {
        let p = Problem::plate(1, gauss(0.5), gauss(0.3)).unwrap();
        let v = solution_l2_sq(&p, 0.0, &QuadConfig::default()).unwrap();
        assert!(rel(v, PI.sqrt()) < 1e-12, "{v}");
    }

    #[test]
    fn small_time_limit() {
        let p = Problem::plate(2, DataCombo::zero(), dipole(0.5)).unwrap();
        let t = 1e-3;
        let v = solution_l2_sq(&p, t, &QuadConfig::default()).unwrap();
        let u1 = l2_norm_data(&p.u1, 2);
        assert!(rel(v / (t * t), u1 * u1) < 1e-4);
    }

    #[test]
    fn norm_matches_tensor_oracle() {
        let p = Problem::plate(1, DataCombo::zero(), gauss(0.5)).unwrap();
        let radial = solution_l2_sq(&p, 1.0, &QuadConfig::default()).unwrap();
        let oracle = tensor_oracle(&p, 1.0, 12.0, 1e-3).unwrap();
        assert!(rel(radial, oracle) < 1e-6, "{radial} vs {oracle}");

        let p = Problem::plate(2, DataCombo::zero(), dipole(0.5)).unwrap();
        let radial = solution_l2_sq(&p, 2.0, &QuadConfig::default()).unwrap();
        let oracle = tensor_oracle(&p, 2.0, 8.0, 0.01).unwrap();
        assert!(rel(radial, oracle) < 1e-6, "{radial} vs {oracle}");
    }

    #[test]
    fn oracle_guards() {
        let p = Problem::plate(2, DataCombo::zero(), gauss(0.5)).unwrap();
        assert_eq!(tensor_oracle(&p, 0.0, 8.0, 0.1).unwrap(), 0.0);
        assert!(matches!(
            tensor_oracle(&p, 1.0, 100.0, 1e-3),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn split_partitions_the_norm() {
        let cfg = QuadConfig::default();
        for p in [
            Problem::plate(1, gauss(0.5), gauss(0.5)).unwrap(),
            Problem::plate(3, DataCombo::zero(), dipole(0.7)).unwrap(),
            Problem::new(2, 1.5, gauss(1.0), gauss(0.5)).unwrap(),
        ] {
            for t in [1.0, 37.0, 1e4] {
                let (lo, hi) = frequency_split(&p, t, 0.9, &cfg).unwrap();
                let total = solution_l2_sq(&p, t, &cfg).unwrap();
                assert!(rel(lo + hi, total) < 1e-9, "t={t}");
            }
        }
        let zero = Problem::plate(2, DataCombo::zero(), DataCombo::zero()).unwrap();
        assert_eq!(frequency_split(&zero, 10.0, 0.9, &cfg).unwrap(), (0.0, 0.0));
        assert!(frequency_split(&zero, 0.5, 0.9, &cfg).is_err());
    }

    #[test]
    fn low_band_of_displacement_only_data() {
        // I_low ≤ (2π)^{−1}·ω₁δ₀‖u₀‖²_{L¹}·t^{−1/2}
        let p = Problem::plate(1, gauss(0.5), DataCombo::zero()).unwrap();
        let t = 1e4;
        let (lo, _) = frequency_split(&p, t, 0.9, &QuadConfig::default()).unwrap();
        let l1 = l1_weighted_norm(&p.u0, 0.0, 1).unwrap() / 2.0;
        let bound = 2.0 * 0.9 * l1 * l1 * t.powf(-0.5) / (2.0 * PI);
        assert!(lo <= bound, "{lo} > {bound}");
    }

    #[test]
    fn energy_examples() {
        let cfg = QuadConfig::default();
        let p = Problem::plate(1, DataCombo::zero(), gauss(0.5)).unwrap();
        for t in [0.0, 1.0, 10.0, 100.0] {
            let e = total_energy(&p, t, &cfg).unwrap();
            assert!(rel(e, PI.sqrt() / 2.0) < 1e-9, "t={t}: {e}");
        }
        let p = Problem::plate(1, gauss(0.5), DataCombo::zero()).unwrap();
        let e = total_energy(&p, 3.0, &cfg).unwrap();
        assert!(rel(e, 0.375 * PI.sqrt()) < 1e-9, "{e}");
        let zero = Problem::plate(2, DataCombo::zero(), DataCombo::zero()).unwrap();
        assert_eq!(total_energy(&zero, 5.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn identity_residual_examples() {
        let cfg = QuadConfig::default();
        let p = Problem::plate(1, gauss(0.5), gauss(0.5)).unwrap();
        assert_eq!(antiderivative_identity_residual(&p, 0.0, &cfg).unwrap(), 0.0);
        let e0 = total_energy(&p, 0.0, &cfg).unwrap();
        let r = antiderivative_identity_residual(&p, 10.0, &cfg).unwrap();
        assert!(r <= 1e-8 * e0, "{r}");
        let p = Problem::plate(1, gauss(0.5), DataCombo::zero()).unwrap();
        let e0 = total_energy(&p, 0.0, &cfg).unwrap();
        let r = antiderivative_identity_residual(&p, 10.0, &cfg).unwrap();
        assert!(r <= 1e-8 * e0, "{r}");
    }

    #[test]
    fn series_and_grid_guards() {
        let p = Problem::plate(1, DataCombo::zero(), gauss(0.5)).unwrap();
        let cfg = QuadConfig::default();
        let grid = log_grid(1e2, 1e6, 13).unwrap();
        assert_eq!(grid.len(), 13);
        assert_eq!((grid[0], grid[12]), (1e2, 1e6));
        let s = norm_series(&p, &[5.0], Quantity::Norm, &cfg).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!(norm_series(&p, &[], Quantity::NormSq, &cfg).is_err());
        assert!(norm_series(&p, &[2.0, 1.0], Quantity::NormSq, &cfg).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = series(&[1.0, 10.0, 100.0], &[0.1, 0.25, 1.0 / 3.0]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,value,err\n"));
        assert!(!text.contains('\r'));
        let back = NormSeries::read_csv(&buf[..], Quantity::NormSq).unwrap();
        assert_eq!(back.points, s.points);
    }

    #[test]
    fn fit_examples() {
        let t = [10.0, 1e2, 1e3, 1e4];
        let y: Vec<f64> = t.iter().map(|v: &f64| 5.0 * v.powf(1.5)).collect();
        let f = fit_power(&series(&t, &y)).unwrap();
        assert!((f.exponent - 1.5).abs() < 1e-12 && f.max_relative_residual < 1e-12);
        assert!(rel(f.amplitude, 5.0) < 1e-12);

        let f = fit_power(&series(&t, &[7.0; 4])).unwrap();
        assert!(f.exponent.abs() < 1e-14);

        let logs: Vec<f64> = t.iter().map(|v| 2.0 * v.ln()).collect();
        let s = series(&t, &logs);
        assert!(fit_power(&s).unwrap().max_relative_residual > fit_log(&s).unwrap().max_relative_residual);

        let y: Vec<f64> = t.iter().map(|v| 2.0 * v.ln() + 3.0).collect();
        assert!((fit_log(&series(&t, &y)).unwrap().exponent - 2.0).abs() < 1e-12);
        assert!(fit_log(&series(&t, &[7.0; 4])).unwrap().exponent.abs() < 1e-14);

        let y: Vec<f64> = t.iter().map(|v| v.sqrt()).collect();
        assert!(fit_log(&series(&t, &y)).unwrap().max_relative_residual > 0.5);
    }

    #[test]
    fn fit_guards() {
        assert!(matches!(
            fit_power(&series(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0])),
            Err(Error::TooFewPoints { needed: 4, got: 3 })
        ));
        assert!(matches!(
            fit_log(&series(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 1.0, 1.0])),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn classify_synthetic() {
        let t = log_grid(1e2, 1e6, 13).unwrap();
        let pw: Vec<f64> = t.iter().map(|v| 3.0 * v.powf(0.75)).collect();
        assert!(matches!(
            classify_growth(&series(&t, &pw), 0.1).unwrap(),
            Growth::PowerGrowth { alpha } if (alpha - 0.75).abs() < 1e-12
        ));
        let lg: Vec<f64> = t.iter().map(|v| 0.25 * v.ln() + 1.0).collect();
        assert!(matches!(
            classify_growth(&series(&t, &lg), 0.1).unwrap(),
            Growth::LogGrowth { .. }
        ));
        let flat: Vec<f64> = t.iter().map(|v| 2.0 + 1.0 / v).collect();
        assert_eq!(classify_growth(&series(&t, &flat), 0.1).unwrap(), Growth::Bounded);
        let short = log_grid(1.0, 100.0, 5).unwrap();
        assert!(classify_growth(&series(&short, &[1.0; 5]), 0.1).is_err());
        let wild: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(i, _)| if i % 2 == 0 { 1.0 } else { 5.0 })
            .collect();
        assert!(matches!(
            classify_growth(&series(&t, &wild), 0.1),
            Err(Error::Ambiguous(_))
        ));
    }

    #[test]
    fn classify_plate_norms() {
        let cfg = QuadConfig::default();
        let grid = log_grid(1e2, 1e6, 13).unwrap();
        let class = |n| {
            let p = Problem::plate(n, DataCombo::zero(), gauss(0.5)).unwrap();
            classify_growth(&norm_series(&p, &grid, Quantity::NormSq, &cfg).unwrap(), 0.1).unwrap()
        };
        assert!(matches!(class(1), Growth::PowerGrowth { alpha } if (alpha - 1.5).abs() < 0.02));
        assert!(matches!(class(4), Growth::LogGrowth { .. }));
        assert_eq!(class(5), Growth::Bounded);
    }

    #[test]
    fn bound_formulas() {
        let v = lower_bound_lemma31((2.0 * PI).sqrt(), 1, 0.9, 1e4);
        assert!(rel(v, 2.0 * PI * 2.0 * 0.9 / 32.0 * 1e6) < 1e-14);
        assert!(rel(v, 3.5343e5) < 1e-4);
        assert_eq!(lower_bound_lemma31(0.0, 3, 0.9, 50.0), 0.0);
        assert!(rel(lower_bound_lemma31(1.0, 2, 0.9, 100.0), 7.9522) < 1e-4);

        let b = upper_bound_prop41(5, 1.0, 2.0, 3.0).unwrap();
        assert!(rel(b, 2.0 * 8.0 * PI * PI / 3.0 + 7.0) < 1e-14);
        assert!(rel(b, 59.638) < 1e-4);
        assert_eq!(upper_bound_prop41(5, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(rel(upper_bound_prop41(6, 1.0, 0.0, 0.0).unwrap(), PI.powi(3)) < 1e-14);
        assert!(upper_bound_prop41(4, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn low_band_moment_law() {
        // I_low ~ t^{2−(n+2κ)/2} for κ-order data
        let cfg = QuadConfig::default();
        let grid = log_grid(1e2, 1e6, 9).unwrap();
        let cases = [
            (1, gauss(0.5), 0u8),
            (3, gauss(0.5), 0),
            (1, dipole(0.5), 1),
            (3, dipole(0.5), 1),
            (
                1,
                DataCombo::single(1.0, DataPrimitive::LapGaussian { a: 0.5 }),
                2,
            ),
            (
                2,
                DataCombo::single(1.0, DataPrimitive::TensorDipole { a: 0.5 }),
                2,
            ),
        ];
        for (n, u1, kappa) in cases {
            assert_eq!(moments(&u1, n).decay_order, kappa);
            let p = Problem::plate(n, DataCombo::zero(), u1).unwrap();
            let s = norm_series(&p, &grid, Quantity::ILow, &cfg).unwrap();
            let alpha = fit_power(&s).unwrap().exponent;
            let want = 2.0 - (n as f64 + 2.0 * kappa as f64) / 2.0;
            assert!((alpha - want).abs() <= 0.05, "n={n} κ={kappa}: {alpha} vs {want}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scaling_covariance(lambda in 0.1f64..10.0, t in 0.5f64..200.0, n in 1usize..4) {
            let cfg = QuadConfig::default();
            let p = Problem::plate(n, gauss(0.8), dipole(0.5)).unwrap();
            let base = solution_l2_sq(&p, t, &cfg).unwrap();
            let scaled = solution_l2_sq(&p.scaled(lambda), t, &cfg).unwrap();
            prop_assert!(rel(scaled, lambda * lambda * base) < 1e-9);
        }

        #[test]
        fn fitted_exponent_is_scale_free(lambda in 0.01f64..100.0) {
            let t = [1e2, 1e3, 1e4, 1e5];
            let y: Vec<f64> = t.iter().map(|v: &f64| v.powf(0.3) + v.ln()).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * lambda * lambda).collect();
            let a = fit_power(&series(&t, &y)).unwrap().exponent;
            let b = fit_power(&series(&t, &ys)).unwrap().exponent;
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
