//! Radial integration of oscillatory spectral densities.
//!
//! Densities carry the phase φ(r) = t·r^σ. Up to a phase budget they are
//! integrated directly on panels aligned with the quarter-phase nodes of
//! sin φ. Beyond it the density is split into its phase mean and its
//! harmonics cos(hφ), sin(hφ); the mean is smooth and the harmonic tails are
//! summed half-period by half-period with an accelerated alternating sum.

pub mod accel;
pub mod gauss;
pub mod oracle;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use gauss::{Estimate, GaussLegendre};
pub use oracle::tensor_oracle;

use crate::error::{Error, Result};
use gauss::{adaptive, AdaptiveOptions};

/// Which path handles an oscillatory band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Direct below `direct_max_phase`, accelerated above it.
    Auto,
    Direct,
    Accelerated,
}

/// Tolerances and budgets for [`integrate_radial`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Guard on half-periods (π/2 in phase) for node lists and tail sums.
    pub max_halfperiods: usize,
    /// Gauss–Legendre points per panel.
    pub panel_order: usize,
    /// Multiplier applied to the automatically located Gaussian tail cutoff.
    pub tail_sigma_mult: f64,
    /// Bisection budget of the adaptive integrator.
    pub max_panels: usize,
    pub strategy: Strategy,
    /// Largest phase span integrated directly under [`Strategy::Auto`].
    pub direct_max_phase: f64,
    /// Phase span kept on the direct path before the split tail starts.
    pub lead_phase: f64,
    /// Half-period terms summed before acceleration is attempted.
    pub accel_min_terms: usize,
    /// Averaging passes used by the accelerated tail.
    pub accel_levels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_halfperiods: 10_000_000,
            panel_order: 16,
            tail_sigma_mult: 1.0,
            max_panels: 400_000,
            strategy: Strategy::Auto,
            direct_max_phase: 2000.0 * PI,
            lead_phase: 100.0 * PI,
            accel_min_terms: 16,
            accel_levels: 10,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Precondition("tolerances must be positive".into()));
        }
        if self.panel_order < 4 {
            return Err(Error::Precondition(format!(
                "panel order must be at least 4, got {}",
                self.panel_order
            )));
        }
        if !(self.tail_sigma_mult >= 1.0) {
            return Err(Error::Precondition("tail multiplier must be ≥ 1".into()));
        }
        if !(self.lead_phase > 0.0 && self.direct_max_phase > 0.0) {
            return Err(Error::Precondition("phase budgets must be positive".into()));
        }
        Ok(())
    }

    fn adaptive_options(&self) -> AdaptiveOptions {
        AdaptiveOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_panels: self.max_panels,
        }
    }
}

/// Integration band [lo, hi], with `hi = None` for [lo, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: Option<f64>,
}

impl Band {
    pub fn full() -> Self {
        Self { lo: 0.0, hi: None }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi: Some(hi) }
    }

    pub fn from(lo: f64) -> Self {
        Self { lo, hi: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oscillation {
    None,
    /// Phase φ(r) = t·r^σ.
    Phase {
        t: f64,
        sigma: f64,
    },
}

/// Phase mean and first two harmonics of a density:
/// ρ = mean + Σ_{h=1,2} (cos_h·cos hφ + sin_h·sin hφ).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Harmonics {
    pub mean: f64,
    pub cos1: f64,
    pub sin1: f64,
    pub cos2: f64,
    pub sin2: f64,
}

impl Harmonics {
    fn coefficients(&self, h: u32) -> (f64, f64) {
        match h {
            1 => (self.cos1, self.sin1),
            _ => (self.cos2, self.sin2),
        }
    }

    fn magnitude(&self) -> f64 {
        self.mean.abs() + self.cos1.abs() + self.sin1.abs() + self.cos2.abs() + self.sin2.abs()
    }
}

/// A radial density ρ(r), before the r^{n−1} volume weight.
pub trait RadialDensity: Sync {
    /// Numerically stable value at r ≥ 0.
    fn value(&self, r: f64) -> f64;

    /// Harmonic split at r > 0, when the density has one.
    fn harmonics(&self, _r: f64) -> Option<Harmonics> {
        None
    }
}

impl<F: Fn(f64) -> f64 + Sync> RadialDensity for F {
    fn value(&self, r: f64) -> f64 {
        self(r)
    }
}

fn phase_radius(phase: f64, t: f64, sigma: f64) -> f64 {
    (phase / t).powf(1.0 / sigma)
}

/// Phase-aligned nodes of sin(t·r^σ) in [r_lo, r_hi]: zeros, quarter and
/// half-phase points (phase kπ/4), plus both endpoints, ascending.
pub fn oscillation_nodes(
    t: f64,
    sigma: f64,
    r_lo: f64,
    r_hi: f64,
    max_halfperiods: usize,
) -> Result<Vec<f64>> {
    if !(t > 0.0 && sigma > 0.0) {
        return Err(Error::Precondition(format!(
            "nodes need t > 0 and σ > 0, got t = {t}, σ = {sigma}"
        )));
    }
    if !(r_lo >= 0.0 && r_hi > r_lo && r_hi.is_finite()) {
        return Err(Error::InvalidBand { lo: r_lo, hi: r_hi });
    }
    let phi_lo = t * r_lo.powf(sigma);
    let phi_hi = t * r_hi.powf(sigma);
    let halfperiods = (phi_hi - phi_lo) / (PI / 2.0);
    if halfperiods > max_halfperiods as f64 {
        return Err(Error::NodeOverflow {
            count: halfperiods,
            budget: max_halfperiods,
        });
    }
    let quarter = PI / 4.0;
    let k_lo = (phi_lo / quarter).floor() as u64 + 1;
    let k_hi = (phi_hi / quarter).ceil() as u64;
    let mut nodes = Vec::with_capacity((k_hi.saturating_sub(k_lo) + 2) as usize);
    nodes.push(r_lo);
    for k in k_lo..k_hi {
        let r = phase_radius(k as f64 * quarter, t, sigma);
        if r > *nodes.last().expect("non-empty") && r < r_hi {
            nodes.push(r);
        }
    }
    nodes.push(r_hi);
    Ok(nodes)
}

/// ∫_band ρ(r) r^{n−1} dr.
///
/// For infinite bands the integrand must decay like a Gaussian; the cutoff is
/// placed where the density envelope drops below 10⁻³ of the working
/// tolerance. The returned error covers panel and tail-truncation error.
pub fn integrate_radial(
    density: &dyn RadialDensity,
    n: usize,
    band: Band,
    oscillation: Oscillation,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let hi_for_err = band.hi.unwrap_or(f64::INFINITY);
    if !(band.lo >= 0.0 && band.lo.is_finite() && hi_for_err > band.lo) {
        return Err(Error::InvalidBand {
            lo: band.lo,
            hi: hi_for_err,
        });
    }
    let weight = move |r: f64| if n == 1 { 1.0 } else { r.powi(n as i32 - 1) };
    let rule = GaussLegendre::new(cfg.panel_order);

    let (phase, has_split) = match oscillation {
        Oscillation::Phase { t, sigma } if t > 0.0 => {
            if !(sigma > 0.0 && sigma.is_finite() && t.is_finite()) {
                return Err(Error::Precondition(format!("invalid phase t = {t}, σ = {sigma}")));
            }
            let probe = band.lo.max(1e-3);
            (Some((t, sigma)), density.harmonics(probe).is_some())
        }
        _ => (None, false),
    };

    let (hi, tail_err) = match band.hi {
        Some(hi) => (hi, 0.0),
        None => {
            let (r_max, err) = tail_cutoff(density, &weight, band.lo, has_split, cfg)?;
            (r_max, err)
        }
    };
    if hi <= band.lo {
        return Ok(Estimate {
            value: 0.0,
            error: tail_err,
            evaluations: 0,
        });
    }
    let full = |r: f64| density.value(r) * weight(r);

    let Some((t, sigma)) = phase else {
        let breaks = smooth_breakpoints(band.lo, hi);
        let mut est = adaptive(&full, &breaks, &rule, cfg.adaptive_options())?;
        est.error += tail_err;
        return Ok(est);
    };

    let phi_lo = t * band.lo.powf(sigma);
    let phi_hi = t * hi.powf(sigma);
    let use_direct = match cfg.strategy {
        Strategy::Direct => true,
        Strategy::Accelerated => !has_split,
        Strategy::Auto => !has_split || phi_hi - phi_lo <= cfg.direct_max_phase,
    };
    if use_direct || phi_hi - phi_lo <= cfg.lead_phase {
        let nodes = oscillation_nodes(t, sigma, band.lo, hi, cfg.max_halfperiods)?;
        let mut est = adaptive(&full, &nodes, &rule, cfg.adaptive_options())?;
        est.error += tail_err;
        return Ok(est);
    }

    // lead region on the direct path
    let cut = phase_radius(phi_lo + cfg.lead_phase, t, sigma);
    let nodes = oscillation_nodes(t, sigma, band.lo, cut, cfg.max_halfperiods)?;
    let lead = adaptive(&full, &nodes, &rule, cfg.adaptive_options())?;

    // phase mean over [cut, hi]
    let mean = |r: f64| density.harmonics(r).expect("split checked above").mean * weight(r);
    let breaks = geometric_breakpoints(cut, hi);
    let mean_est = adaptive(&mean, &breaks, &rule, cfg.adaptive_options())?;

    let mut total = lead + mean_est;
    let scale = total.value.abs();
    let tail_ctx = TailContext {
        density,
        weight: &weight,
        t,
        sigma,
        rule: &rule,
        cfg,
        scale,
    };
    for h in [1u32, 2] {
        total += tail_ctx.harmonic_tail(h, cut, hi)?;
    }
    total.error += tail_err;
    Ok(total)
}

struct TailContext<'a> {
    density: &'a dyn RadialDensity,
    weight: &'a dyn Fn(f64) -> f64,
    t: f64,
    sigma: f64,
    rule: &'a GaussLegendre,
    cfg: &'a QuadConfig,
    scale: f64,
}

impl TailContext<'_> {
    /// ∫_{start}^{end} (cos_h cos hφ + sin_h sin hφ) r^{n−1} dr, summed over
    /// half-periods between zeros of cos hφ.
    fn harmonic_tail(&self, h: u32, start: f64, end: f64) -> Result<Estimate> {
        let hf = h as f64;
        let f = |r: f64| {
            let parts = self.density.harmonics(r).expect("split available");
            let (c, s) = parts.coefficients(h);
            let phi = hf * self.t * r.powf(self.sigma);
            (c * phi.cos() + s * phi.sin()) * (self.weight)(r)
        };
        let opts = self.cfg.adaptive_options();
        let phi_start = hf * self.t * start.powf(self.sigma);
        // zeros of cos(hφ): hφ = π/2 + mπ
        let mut m = ((phi_start - PI / 2.0) / PI).ceil().max(0.0);
        let node = |m: f64| phase_radius((PI / 2.0 + m * PI) / hf, self.t, self.sigma);
        let mut r0 = node(m);
        if r0 <= start {
            m += 1.0;
            r0 = node(m);
        }
        if r0 >= end {
            return adaptive(&f, &[start, end], self.rule, opts);
        }
        let mut est = adaptive(&f, &[start, r0], self.rule, opts)?;

        let target = 0.25 * self.cfg.abs_tol.max(self.cfg.rel_tol * self.scale);
        let mut partial = Vec::new();
        let mut running = 0.0;
        let mut panel_err = 0.0;
        let mut small_run = 0;
        let per_panel = 3 * self.rule.order();
        loop {
            if partial.len() > self.cfg.max_halfperiods {
                return Err(Error::Quadrature {
                    value: est.value + running,
                    error: f64::INFINITY,
                    panels: partial.len(),
                });
            }
            let r1 = node(m + 1.0);
            if r1 >= end {
                let last = adaptive(&f, &[r0, end], self.rule, opts)?;
                est += last;
                est.value += running;
                est.error += panel_err;
                est.evaluations += partial.len() * per_panel;
                return Ok(est);
            }
            let mid = 0.5 * (r0 + r1);
            let whole = self.rule.integrate(&f, r0, r1);
            let halves = self.rule.integrate(&f, r0, mid) + self.rule.integrate(&f, mid, r1);
            panel_err += (whole - halves).abs();
            running += halves;
            partial.push(running);

            if halves.abs() < self.cfg.abs_tol {
                small_run += 1;
                if small_run >= 2 {
                    est.value += running;
                    est.error += panel_err + halves.abs();
                    est.evaluations += partial.len() * per_panel;
                    return Ok(est);
                }
            } else {
                small_run = 0;
            }

            if partial.len() >= self.cfg.accel_min_terms {
                let (limit, err) = averaged_limit_checked(&partial, self.cfg.accel_levels);
                if err <= target {
                    est.value += limit;
                    est.error += panel_err + err;
                    est.evaluations += partial.len() * per_panel;
                    return Ok(est);
                }
            }
            r0 = r1;
            m += 1.0;
        }
    }
}

fn averaged_limit_checked(partial: &[f64], levels: usize) -> (f64, f64) {
    let (a, err_a) = accel::averaged_limit(partial, levels);
    // agreement with the estimate one term earlier guards against a lucky level gap
    let (b, _) = accel::averaged_limit(&partial[..partial.len() - 1], levels);
    (a, err_a.max((a - b).abs()))
}

/// Cutoff where the density envelope falls below the working tolerance.
fn tail_cutoff(
    density: &dyn RadialDensity,
    weight: &dyn Fn(f64) -> f64,
    lo: f64,
    use_split: bool,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    let envelope = |r: f64| {
        // the split terms carry 1/r^σ factors, so they only bound the value away from 0
        let v = if use_split && r >= 1.0 {
            density
                .harmonics(r)
                .map(|h| h.magnitude())
                .unwrap_or_else(|| density.value(r).abs())
        } else {
            density.value(r).abs()
        };
        v * weight(r)
    };
    let step = 0.25;
    let mut peak: f64 = 0.0;
    let mut below = 0;
    let mut prev = f64::INFINITY;
    let mut r = lo;
    let limit = lo + 4.0e4;
    while r < limit {
        let e = envelope(r.max(1e-300));
        if !e.is_finite() {
            return Err(Error::Quadrature {
                value: f64::NAN,
                error: f64::INFINITY,
                panels: 0,
            });
        }
        peak = peak.max(e);
        let threshold = 1e-3 * cfg.abs_tol.max(cfg.rel_tol * peak);
        if e <= threshold && e <= prev {
            below += 1;
            if below >= 3 {
                let r_max = lo + (r - lo) * cfg.tail_sigma_mult;
                // remaining mass is below one step of the threshold
                return Ok((r_max, e * step));
            }
        } else {
            below = 0;
        }
        prev = e;
        r += step;
    }
    Err(Error::Precondition(
        "density does not decay within the scanned range".into(),
    ))
}

fn smooth_breakpoints(lo: f64, hi: f64) -> Vec<f64> {
    let k = 8;
    (0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect()
}

fn geometric_breakpoints(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut r = if lo > 0.0 { 2.0 * lo } else { hi / 8.0 };
    while r < hi {
        pts.push(r);
        r *= 2.0;
    }
    let step = 0.5;
    let last = *pts.last().expect("non-empty");
    let mut x = last + step;
    while x < hi {
        pts.push(x);
        x += step;
    }
    pts.push(hi);
    pts
}
