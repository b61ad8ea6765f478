//! Executable verification scenarios for the growth, boundedness and
//! conservation results, and the σ-sweep of the growth threshold n* = 2σ.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    antiderivative_identity_residual, classify_growth, fit_power, fourier_data_norms, last_decade_variation,
    log_grid, lower_bound_lemma31, norm_series, plancherel_factor, total_energy_estimate, upper_bound_prop41,
    Growth, NormSeries, Quantity, DEFAULT_DELTA0,
};
use crate::error::{Error, Result};
use crate::model::{l1_weighted_norm, l2_norm_data, moments, DataCombo, DataPrimitive, Problem};
use crate::quadrature::QuadConfig;
use crate::spectra::spectral_profiles;

/// Tolerance handed to [`classify_growth`] by every scenario and the sweep.
pub const CLASSIFY_TOL: f64 = 0.1;
/// Half-width of the accepted band around a predicted exponent of ‖u‖.
pub const EXPONENT_TOL: f64 = 0.02;
/// Half-width of the accepted band around 2 − n/σ for norm² in the sweep.
pub const SWEEP_EXPONENT_TOL: f64 = 0.05;
/// Largest relative spread of ‖u‖²/log t accepted as a plateau.
pub const LOG_PLATEAU_TOL: f64 = 0.05;
/// Largest relative spread of ‖u‖/t^{1/4} accepted as a stable constant.
pub const STABLE_CONSTANT_TOL: f64 = 0.05;
/// Largest last-decade spread of norm² accepted as bounded.
pub const BOUNDED_VARIATION_TOL: f64 = 0.02;
/// Largest quadrature error, relative to the compared value, before a report fails.
pub const QUADRATURE_SHARE_TOL: f64 = 0.01;
/// Conservation and identity residuals relative to E(0).
pub const CONSERVATION_TOL: f64 = 1e-8;

const FIT_LO: f64 = 1e2;
const FIT_HI: f64 = 1e6;
const FIT_POINTS: usize = 13;
const PLATEAU_LO: f64 = 1e4;
const DOMINANCE_FROM: f64 = 1e3;

/// A verification scenario; dimension-dependent ones carry n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioId {
    Thm11 { n: usize },
    Thm12,
    Thm13 { n: usize },
    Thm14 { n: usize },
    Thm15N1,
    Thm15N2,
    Prop41,
    Energy,
    Lemma31,
}

impl ScenarioId {
    /// Base name used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioId::Thm11 { .. } => "THM_1_1",
            ScenarioId::Thm12 => "THM_1_2",
            ScenarioId::Thm13 { .. } => "THM_1_3",
            ScenarioId::Thm14 { .. } => "THM_1_4",
            ScenarioId::Thm15N1 => "THM_1_5_N1",
            ScenarioId::Thm15N2 => "THM_1_5_N2",
            ScenarioId::Prop41 => "PROP_4_1",
            ScenarioId::Energy => "ENERGY",
            ScenarioId::Lemma31 => "LEMMA_3_1",
        }
    }

    /// Dimensions a base name accepts, empty when it takes none.
    pub fn dimensions(name: &str) -> Option<&'static [usize]> {
        match name {
            "THM_1_1" => Some(&[1, 2, 3]),
            "THM_1_3" => Some(&[3, 4]),
            "THM_1_4" => Some(&[1, 2]),
            "THM_1_2" | "THM_1_5_N1" | "THM_1_5_N2" | "PROP_4_1" | "ENERGY" | "LEMMA_3_1" => Some(&[]),
            _ => None,
        }
    }

    /// Resolves a base name and optional dimension. A dimensional scenario
    /// without `n` expands to all of its dimensions.
    pub fn resolve(name: &str, n: Option<usize>) -> Result<Vec<ScenarioId>> {
        let upper = name.to_ascii_uppercase();
        let dims = Self::dimensions(&upper).ok_or_else(|| Error::UnknownScenario(name.into()))?;
        let build = |n: usize| match upper.as_str() {
            "THM_1_1" => ScenarioId::Thm11 { n },
            "THM_1_3" => ScenarioId::Thm13 { n },
            _ => ScenarioId::Thm14 { n },
        };
        if dims.is_empty() {
            if let Some(n) = n {
                return Err(Error::Precondition(format!(
                    "{upper} takes no dimension, got n = {n}"
                )));
            }
            let id = match upper.as_str() {
                "THM_1_2" => ScenarioId::Thm12,
                "THM_1_5_N1" => ScenarioId::Thm15N1,
                "THM_1_5_N2" => ScenarioId::Thm15N2,
                "PROP_4_1" => ScenarioId::Prop41,
                "ENERGY" => ScenarioId::Energy,
                _ => ScenarioId::Lemma31,
            };
            return Ok(vec![id]);
        }
        match n {
            Some(n) if dims.contains(&n) => Ok(vec![build(n)]),
            Some(n) => Err(Error::Precondition(format!(
                "{upper} is defined for n ∈ {dims:?}, got n = {n}"
            ))),
            None => Ok(dims.iter().map(|&n| build(n)).collect()),
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioId::Thm11 { n } | ScenarioId::Thm13 { n } | ScenarioId::Thm14 { n } => {
                write!(f, "{}(n={n})", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    /// Accepts `NAME` or `NAME(n=k)` / `NAME:k`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, n) = if let Some((name, rest)) = s.split_once("(n=") {
            (name, Some(rest.trim_end_matches(')')))
        } else if let Some((name, rest)) = s.split_once(':') {
            (name, Some(rest))
        } else {
            (s, None)
        };
        let n = n
            .map(|v| v.parse::<usize>().map_err(|_| Error::UnknownScenario(s.into())))
            .transpose()?;
        let ids = Self::resolve(name, n)?;
        match ids.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::Precondition(format!("{name} needs a dimension"))),
        }
    }
}

/// Every shipped scenario.
pub fn catalog() -> Vec<ScenarioId> {
    let mut ids = Vec::new();
    for name in [
        "THM_1_1",
        "THM_1_2",
        "THM_1_3",
        "THM_1_4",
        "THM_1_5_N1",
        "THM_1_5_N2",
        "PROP_4_1",
        "ENERGY",
        "LEMMA_3_1",
    ] {
        ids.extend(ScenarioId::resolve(name, None).expect("catalog names resolve"));
    }
    ids
}

/// One measured value against its accepted range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    /// Formula or design decision the range comes from.
    pub source: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario_id: String,
    pub claim: String,
    /// Informational values that carry no threshold.
    pub measured: Vec<Measurement>,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    /// Set when a measured value is a finding of this laboratory rather than a proved claim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub runtime_seconds: f64,
    pub quadrature: QuadConfig,
}

struct Builder {
    id: String,
    claim: String,
    measured: Vec<Measurement>,
    checks: Vec<Check>,
    diagnostics: Vec<String>,
    note: Option<String>,
    start: Instant,
}

impl Builder {
    fn new(id: &ScenarioId, claim: impl Into<String>) -> Self {
        Self {
            id: id.to_string(),
            claim: claim.into(),
            measured: Vec::new(),
            checks: Vec::new(),
            diagnostics: Vec::new(),
            note: None,
            start: Instant::now(),
        }
    }

    fn info(&mut self, name: impl Into<String>, value: f64) {
        self.measured.push(Measurement {
            name: name.into(),
            value,
        });
    }

    fn check(
        &mut self,
        name: impl Into<String>,
        measured: f64,
        lower: Option<f64>,
        upper: Option<f64>,
        source: &str,
    ) {
        let passed = measured.is_finite()
            && lower.is_none_or(|l| measured >= l)
            && upper.is_none_or(|u| measured <= u);
        self.checks.push(Check {
            name: name.into(),
            measured,
            lower,
            upper,
            source: source.into(),
            passed,
        });
    }

    /// Evaluates norm² on the standard grid and checks the quadrature share.
    fn series(&mut self, label: &str, p: &Problem, grid: &[f64], cfg: &QuadConfig) -> Result<NormSeries> {
        let s = norm_series(p, grid, Quantity::NormSq, cfg)?;
        let share = s
            .points
            .iter()
            .map(|pt| {
                if pt.value > 0.0 {
                    pt.err / pt.value
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max);
        self.check(
            format!("{label}quadrature_error_share"),
            share,
            None,
            Some(QUADRATURE_SHARE_TOL),
            "no-silent-pass rule: error estimate ≤ 1% of the compared value",
        );
        Ok(s)
    }

    fn finish(mut self, outcome: Result<()>, cfg: &QuadConfig) -> VerificationReport {
        if let Err(e) = outcome {
            self.diagnostics.push(e.to_string());
        }
        let passed =
            self.diagnostics.is_empty() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed);
        VerificationReport {
            scenario_id: self.id,
            claim: self.claim,
            measured: self.measured,
            checks: self.checks,
            passed,
            diagnostics: self.diagnostics,
            note: self.note,
            runtime_seconds: self.start.elapsed().as_secs_f64(),
            quadrature: *cfg,
        }
    }
}

fn gaussian(a: f64) -> DataCombo {
    DataCombo::single(1.0, DataPrimitive::Gaussian { a })
}

fn dipole(a: f64) -> DataCombo {
    DataCombo::single(1.0, DataPrimitive::Dipole { a, axis: 1 })
}

fn fit_grid() -> Vec<f64> {
    log_grid(FIT_LO, FIT_HI, FIT_POINTS).expect("static grid")
}

/// Relative spread max/min − 1.
fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min - 1.0
    } else {
        f64::INFINITY
    }
}

/// Spread of norm²/log t over t ≥ `from`.
fn log_ratio_spread(s: &NormSeries, from: f64) -> Result<f64> {
    let w = s.window(from, f64::INFINITY)?;
    Ok(spread(
        &w.points.iter().map(|p| p.value / p.t.ln()).collect::<Vec<_>>(),
    ))
}

type ScenarioBody = fn(&mut Builder, &ScenarioId, &QuadConfig) -> Result<()>;

pub fn run_scenario(id: ScenarioId, cfg: &QuadConfig) -> VerificationReport {
    let (claim, body): (String, ScenarioBody) = match id {
        ScenarioId::Thm11 { n } => (
            format!(
                "n = {n}, u₁ Gaussian: ‖u(t)‖ grows like t^(1−n/4) = t^{:.2}, with ‖w(t)‖² above P²/(32n)·ω_n·δ₀ⁿ·t^(2−n/2)",
                1.0 - n as f64 / 4.0
            ),
            thm_1_1,
        ),
        ScenarioId::Thm12 => (
            "n = 4, u₁ Gaussian: ‖u(t)‖² grows like log t".into(),
            thm_1_2,
        ),
        ScenarioId::Thm13 { n } => (
            format!("n = {n}, ∫u₁ = 0 (dipole): ‖u(t)‖ stays bounded"),
            thm_1_3,
        ),
        ScenarioId::Thm14 { n } => (
            format!("n = {n}, ∫u₁ = 0 and ∫x_j u₁ = 0: ‖u(t)‖ stays bounded"),
            thm_1_4,
        ),
        ScenarioId::Thm15N1 => (
            "n = 1, ∫u₁ = 0, ∫x u₁ ≠ 0: ‖u(t)‖ ≥ c·t^(1/4) with c > 0".into(),
            thm_1_5_n1,
        ),
        ScenarioId::Thm15N2 => (
            "n = 2, ∫u₁ = 0, ∫x u₁ ≠ 0: ‖u(t)‖² grows like log t".into(),
            thm_1_5_n2,
        ),
        ScenarioId::Prop41 => (
            "n = 5: ‖w(t)‖² ≤ 2ω_n/(n−4)·‖u₁‖₁² + 2‖ŵ₁‖² + ‖ŵ₀‖² for all t, and the norm stays bounded"
                .into(),
            prop_4_1,
        ),
        ScenarioId::Energy => (
            "E(t) = E(0), and ½‖V_t‖² + ½‖(−Δ)^(σ/2)V‖² = ½‖u₀‖² + ∫u₁V for V = ∫₀ᵗ u".into(),
            energy,
        ),
        ScenarioId::Lemma31 => (
            "n ∈ {1,2,3}: ‖w(t)‖² ≥ P²/(32n)·ω_n·δ₀ⁿ·t^(2−n/2) for sampled t ≥ 10³".into(),
            lemma_3_1,
        ),
    };
    let mut b = Builder::new(&id, claim);
    let outcome = body(&mut b, &id, cfg);
    b.finish(outcome, cfg)
}

/// Runs scenarios concurrently; reports come back in input order.
pub fn run_scenarios(ids: &[ScenarioId], cfg: &QuadConfig) -> Vec<VerificationReport> {
    ids.par_iter().map(|&id| run_scenario(id, cfg)).collect()
}

fn dominance(b: &mut Builder, label: &str, p: &Problem, s: &NormSeries) -> Result<()> {
    let n = p.n;
    let big_p = moments(&p.u1, n).p;
    let to_w = 1.0 / plancherel_factor(n);
    let mut worst = f64::INFINITY;
    let mut first_hold = None;
    for pt in &s.points {
        let w = pt.value * to_w;
        let bound = lower_bound_lemma31(big_p, n, DEFAULT_DELTA0, pt.t);
        if w >= bound {
            first_hold.get_or_insert(pt.t);
        } else {
            first_hold = None;
        }
        if pt.t >= DOMINANCE_FROM * (1.0 - 1e-12) {
            worst = worst.min(w / bound);
        }
    }
    b.info(
        format!("{label}first_t_bound_holds"),
        first_hold.unwrap_or(f64::NAN),
    );
    b.check(
        format!("{label}min_norm_over_lower_bound"),
        worst,
        Some(1.0),
        None,
        "lower bound P²/(32n)·ω_n·δ₀ⁿ·t^(2−n/2), δ₀ = 0.9, for t ≥ 10³",
    );
    Ok(())
}

fn thm_1_1(b: &mut Builder, id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    let ScenarioId::Thm11 { n } = *id else {
        unreachable!()
    };
    let want = 1.0 - n as f64 / 4.0;
    let grid = fit_grid();
    for (label, u0) in [("u0=0:", DataCombo::zero()), ("u0=gauss:", gaussian(0.5))] {
        let p = Problem::plate(n, u0, gaussian(0.5))?;
        let s = b.series(label, &p, &grid, cfg)?;
        let fit = fit_power(&s)?;
        b.info(format!("{label}norm_sq_exponent"), fit.exponent);
        b.info(format!("{label}power_fit_residual"), fit.max_relative_residual);
        b.check(
            format!("{label}norm_exponent"),
            fit.exponent / 2.0,
            Some(want - EXPONENT_TOL),
            Some(want + EXPONENT_TOL),
            "growth rate t^(1−n/4) of ‖u(t)‖; ±0.02 band on the fitted exponent",
        );
        dominance(b, label, &p, &s)?;
    }
    Ok(())
}

fn log_plateau(b: &mut Builder, label: &str, p: &Problem, cfg: &QuadConfig, source: &str) -> Result<()> {
    let s = b.series(label, p, &fit_grid(), cfg)?;
    let w = s.window(PLATEAU_LO, f64::INFINITY)?;
    if let Some(last) = w.points.last() {
        b.info(
            format!("{label}norm_sq_over_log_t_at_end"),
            last.value / last.t.ln(),
        );
    }
    match classify_growth(&s, CLASSIFY_TOL) {
        Ok(g) => b.info(
            format!("{label}log_fit_slope"),
            match g {
                Growth::LogGrowth { slope } => slope,
                _ => f64::NAN,
            },
        ),
        Err(e) => b.diagnostics.push(format!("classification: {e}")),
    }
    b.check(
        format!("{label}log_ratio_spread"),
        log_ratio_spread(&s, PLATEAU_LO)?,
        None,
        Some(LOG_PLATEAU_TOL),
        source,
    );
    Ok(())
}

fn thm_1_2(b: &mut Builder, _id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    let p = Problem::plate(4, DataCombo::zero(), gaussian(0.5))?;
    log_plateau(
        b,
        "u0=0:",
        &p,
        cfg,
        "growth rate √(log t) of ‖u(t)‖; ‖u‖²/log t within 5% over [10⁴, 10⁶]",
    )?;
    // ‖u₀‖² adds a constant that log t has not yet swamped at 10⁴, so this
    // variant is held to the log classification instead of the 5% plateau
    let label = "u0=gauss:";
    let p = Problem::plate(4, gaussian(0.5), gaussian(0.5))?;
    let s = b.series(label, &p, &fit_grid(), cfg)?;
    b.info(
        format!("{label}log_ratio_spread"),
        log_ratio_spread(&s, PLATEAU_LO)?,
    );
    let class = classify_growth(&s, CLASSIFY_TOL);
    match &class {
        Ok(Growth::LogGrowth { slope }) => b.info(format!("{label}log_fit_slope"), *slope),
        Ok(_) => {}
        Err(e) => b.diagnostics.push(format!("classification: {e}")),
    }
    b.check(
        format!("{label}classified_log"),
        if matches!(class, Ok(Growth::LogGrowth { .. })) {
            1.0
        } else {
            0.0
        },
        Some(1.0),
        None,
        "classification rule with tolerance 0.1: log model within tolerance, positive slope",
    );
    Ok(())
}

fn bounded(b: &mut Builder, p: &Problem, gamma: f64, cfg: &QuadConfig, source: &str) -> Result<()> {
    let s = b.series("", p, &fit_grid(), cfg)?;
    let fit = fit_power(&s)?;
    let m = moments(&p.u1, p.n);
    b.info("P", m.p);
    b.info("decay_order", m.decay_order as f64);
    let weighted = l1_weighted_norm(&p.u1, gamma, p.n)?;
    b.info(format!("l1_weighted_norm_gamma_{gamma}"), weighted);
    let data = l2_norm_data(&p.u0, p.n) + l2_norm_data(&p.u1, p.n) + weighted;
    let sup = s.values().into_iter().fold(0.0, f64::max).sqrt();
    b.info("max_norm_over_data_norms", sup / data);
    b.check(
        "norm_sq_exponent",
        fit.exponent,
        Some(-EXPONENT_TOL),
        Some(EXPONENT_TOL),
        source,
    );
    b.check(
        "last_decade_variation",
        last_decade_variation(&s),
        None,
        Some(BOUNDED_VARIATION_TOL),
        "boundedness: norm² varies ≤ 2% over the last decade",
    );
    let class = classify_growth(&s, CLASSIFY_TOL);
    let is_bounded = matches!(class, Ok(Growth::Bounded));
    if let Err(e) = &class {
        b.diagnostics.push(format!("classification: {e}"));
    }
    b.check(
        "classified_bounded",
        if is_bounded { 1.0 } else { 0.0 },
        Some(1.0),
        None,
        "classification rule with tolerance 0.1 and |α| ≤ 0.05",
    );
    Ok(())
}

fn thm_1_3(b: &mut Builder, id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    let ScenarioId::Thm13 { n } = *id else {
        unreachable!()
    };
    let p = Problem::plate(n, DataCombo::zero(), dipole(0.5))?;
    bounded(
        b,
        &p,
        1.0,
        cfg,
        "bound ‖u‖ ≤ C(‖u₀‖ + ‖u₁‖ + ‖u₁‖_{1,γ}) with γ = 1; |fitted exponent| ≤ 0.02",
    )
}

fn thm_1_4(b: &mut Builder, id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    let ScenarioId::Thm14 { n } = *id else {
        unreachable!()
    };
    let u1 = match n {
        1 => DataCombo::single(1.0, DataPrimitive::LapGaussian { a: 0.5 }),
        _ => DataCombo::single(1.0, DataPrimitive::TensorDipole { a: 0.5 }),
    };
    let p = Problem::plate(n, DataCombo::zero(), u1)?;
    bounded(
        b,
        &p,
        2.0,
        cfg,
        "bound ‖u‖ ≤ C(‖u₀‖ + ‖u₁‖ + ‖u₁‖_{1,γ}) with γ = 2 under ∫x_j u₁ = 0; |fitted exponent| ≤ 0.02",
    )
}

fn thm_1_5_n1(b: &mut Builder, _id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    b.note = Some(
        "the exponent 0.25 is a measured finding; only the lower bound c·t^(1/4) is a proved claim".into(),
    );
    let p = Problem::plate(1, DataCombo::zero(), dipole(0.5))?;
    let s = b.series("", &p, &fit_grid(), cfg)?;
    let fit = fit_power(&s)?;
    b.check(
        "norm_exponent",
        fit.exponent / 2.0,
        Some(0.25 - EXPONENT_TOL),
        Some(0.25 + EXPONENT_TOL),
        "measured exponent of ‖u(t)‖ against 1/4; ±0.02 band",
    );
    let w = s.window(DOMINANCE_FROM, f64::INFINITY)?;
    let c: Vec<f64> = w.points.iter().map(|p| p.value.sqrt() / p.t.powf(0.25)).collect();
    let c_min = c.iter().copied().fold(f64::INFINITY, f64::min);
    let p1 = moments(&p.u1, 1).p1[0].abs();
    b.info("c_min_over_abs_first_moment", c_min / p1);
    b.check(
        "c_min",
        c_min,
        Some(f64::MIN_POSITIVE),
        None,
        "lower bound |∫x u₁| t^(1/4) ≤ C‖u(t)‖: c = ‖u‖/t^(1/4) positive on [10³, 10⁶]",
    );
    b.check(
        "c_spread",
        spread(&c),
        None,
        Some(STABLE_CONSTANT_TOL),
        "stable constant: max c / min c − 1 ≤ 5% on [10³, 10⁶]",
    );
    Ok(())
}

fn thm_1_5_n2(b: &mut Builder, _id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    b.note = Some("the plateau level of ‖u‖²/log t is a measured finding".into());
    let p = Problem::plate(2, DataCombo::zero(), dipole(0.5))?;
    log_plateau(
        b,
        "",
        &p,
        cfg,
        "lower bound √(log t) ≤ C‖u(t)‖; ‖u‖²/log t within 5% over [10⁴, 10⁶]",
    )
}

fn prop_4_1(b: &mut Builder, _id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    let p = Problem::plate(5, gaussian(0.5), gaussian(0.5))?;
    let prof = spectral_profiles(&p)?;
    let (wsq0, wsq1) = fourier_data_norms(&prof);
    let l1 = l1_weighted_norm(&p.u1, 0.0, 5)? / 2.0;
    let bound = upper_bound_prop41(5, l1, wsq1, wsq0)?;
    b.info("bound", bound);
    let times = [1.0, 10.0, 1e2, 1e3, 1e4];
    let s = b.series("bound_times:", &p, &times, cfg)?;
    let to_w = 1.0 / plancherel_factor(5);
    let worst = s.points.iter().map(|pt| pt.value * to_w).fold(0.0, f64::max);
    b.check(
        "max_w_norm_sq_over_bound",
        worst / bound,
        None,
        Some(1.0),
        "uniform bound 2ω_n/(n−4)·‖u₁‖₁² + 2‖ŵ₁‖² + ‖ŵ₀‖² on ‖w(t)‖²",
    );
    let s = b.series("fit:", &p, &fit_grid(), cfg)?;
    let class = classify_growth(&s, CLASSIFY_TOL);
    if let Err(e) = &class {
        b.diagnostics.push(format!("classification: {e}"));
    }
    b.check(
        "classified_bounded",
        if matches!(class, Ok(Growth::Bounded)) {
            1.0
        } else {
            0.0
        },
        Some(1.0),
        None,
        "classification rule with tolerance 0.1 and |α| ≤ 0.05",
    );
    Ok(())
}

/// The six conservation problems: n ∈ {1, 2, 4} with Gaussian and dipole data.
pub fn energy_catalog() -> Vec<(String, Problem)> {
    let mut out = Vec::new();
    for n in [1, 2, 4] {
        out.push((
            format!("n={n} gaussian"),
            Problem::plate(
                n,
                DataCombo::single(0.7, DataPrimitive::Gaussian { a: 0.8 }),
                gaussian(0.5),
            )
            .expect("valid"),
        ));
        out.push((
            format!("n={n} dipole"),
            Problem::plate(
                n,
                DataCombo::single(0.6, DataPrimitive::Dipole { a: 0.7, axis: 1 }),
                dipole(0.5),
            )
            .expect("valid"),
        ));
    }
    out
}

/// Times at which conservation is checked.
pub const ENERGY_TIMES: [f64; 6] = [0.1, 1.0, 10.0, 1e2, 1e3, 1e4];
/// Times at which the antiderivative identity is checked.
pub const IDENTITY_TIMES: [f64; 3] = [1.0, 10.0, 100.0];

/// max_t |E(t) − E(0)|/E(0), with the largest quadrature error share seen.
pub fn energy_drift(p: &Problem, times: &[f64], cfg: &QuadConfig) -> Result<(f64, f64)> {
    let e0 = total_energy_estimate(p, 0.0, cfg)?;
    let mut drift: f64 = 0.0;
    let mut share = e0.error / e0.value;
    for &t in times {
        let e = total_energy_estimate(p, t, cfg)?;
        drift = drift.max((e.value - e0.value).abs() / e0.value);
        share = share.max(e.error / e.value);
    }
    Ok((drift, share))
}

fn energy(b: &mut Builder, _id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    let results: Vec<(String, Result<(f64, f64)>)> = energy_catalog()
        .into_par_iter()
        .map(|(label, p)| {
            let r = energy_drift(&p, &ENERGY_TIMES, cfg);
            (label, r)
        })
        .collect();
    for (label, r) in results {
        let (drift, share) = r?;
        b.check(
            format!("{label}: energy_drift"),
            drift,
            None,
            Some(CONSERVATION_TOL),
            "conservation E(t) = E(0); relative drift ≤ 10⁻⁸",
        );
        b.check(
            format!("{label}: quadrature_error_share"),
            share,
            None,
            Some(QUADRATURE_SHARE_TOL),
            "no-silent-pass rule: error estimate ≤ 1% of the compared value",
        );
    }
    for n in [1, 2] {
        let p = Problem::plate(
            n,
            DataCombo::single(0.7, DataPrimitive::Gaussian { a: 0.8 }),
            gaussian(0.5),
        )?;
        let e0 = total_energy_estimate(&p, 0.0, cfg)?.value;
        let worst = IDENTITY_TIMES
            .iter()
            .map(|&t| antiderivative_identity_residual(&p, t, cfg))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        b.check(
            format!("n={n} gaussian: identity_residual_over_energy"),
            worst / e0,
            None,
            Some(CONSERVATION_TOL),
            "identity ½‖V_t‖² + ½‖ΔV‖² = ½‖u₀‖² + ∫u₁V; residual ≤ 10⁻⁸·E(0)",
        );
    }
    Ok(())
}

fn lemma_3_1(b: &mut Builder, _id: &ScenarioId, cfg: &QuadConfig) -> Result<()> {
    for n in [1, 2, 3] {
        let label = format!("n={n}:");
        let p = Problem::plate(n, DataCombo::zero(), gaussian(0.5))?;
        let s = b.series(&label, &p, &fit_grid(), cfg)?;
        dominance(b, &label, &p, &s)?;
    }
    Ok(())
}

/// One cell of the σ-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub n: usize,
    /// "Power", "Log", "Bounded" or "Ambiguous".
    pub class: String,
    /// Fitted norm² exponent.
    pub alpha: f64,
    pub expected_class: String,
    /// 2 − n/σ where a power law is predicted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_alpha: Option<f64>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

fn expected_class(sigma: f64, n: usize) -> &'static str {
    let d = n as f64 - 2.0 * sigma;
    if d.abs() < 1e-9 {
        "Log"
    } else if d < 0.0 {
        "Power"
    } else {
        "Bounded"
    }
}

fn sweep_cell(sigma: f64, n: usize, cfg: &QuadConfig) -> SweepRow {
    let expected = expected_class(sigma, n);
    let expected_alpha = (expected == "Power").then(|| 2.0 - n as f64 / sigma);
    let mut row = SweepRow {
        sigma,
        n,
        class: "Ambiguous".into(),
        alpha: f64::NAN,
        expected_class: expected.into(),
        expected_alpha,
        passed: false,
        diagnostic: None,
    };
    let outcome = (|| -> Result<()> {
        let p = Problem::new(n, sigma, DataCombo::zero(), gaussian(0.5))?;
        let s = norm_series(&p, &fit_grid(), Quantity::NormSq, cfg)?;
        row.alpha = fit_power(&s)?.exponent;
        let class = classify_growth(&s, CLASSIFY_TOL)?;
        row.class = class.label().into();
        Ok(())
    })();
    if let Err(e) = outcome {
        row.diagnostic = Some(e.to_string());
    }
    row.passed =
        row.class == expected && expected_alpha.is_none_or(|a| (row.alpha - a).abs() <= SWEEP_EXPONENT_TOL);
    row
}

/// Classifies the norm² growth of Gaussian u₁, u₀ = 0 for every (σ, n).
pub fn sigma_sweep(sigmas: &[f64], ns: &[usize], cfg: &QuadConfig) -> Result<Vec<SweepRow>> {
    if let Some(&s) = sigmas.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Precondition(format!("σ must be positive, got {s}")));
    }
    if ns.contains(&0) {
        return Err(Error::Precondition("dimensions must be ≥ 1".into()));
    }
    let cells: Vec<(f64, usize)> = sigmas
        .iter()
        .flat_map(|&s| ns.iter().map(move |&n| (s, n)))
        .collect();
    Ok(cells
        .into_par_iter()
        .map(|(s, n)| sweep_cell(s, n, cfg))
        .collect())
}
