//! Exact Fourier-space kernels and the sphere-averaged densities built on them.
//!
//! ŵ(t, ξ) = s·ŵ₁ + c·ŵ₀ with s = sin(t r^σ)/r^σ and c = cos(t r^σ), r = |ξ|.

use serde::{Deserialize, Serialize};

use crate::quadrature::{Harmonics, RadialDensity};
use crate::spectra::SpectralProfiles;

/// Below this phase the kernels switch to two-term Taylor forms.
const TAYLOR_PHASE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPair {
    /// sin(t r^σ)/r^σ, equal to t at r = 0.
    pub s: f64,
    /// cos(t r^σ)
    pub c: f64,
    /// t·r^σ
    pub phase: f64,
}

pub fn kernels(t: f64, r: f64, sigma: f64) -> KernelPair {
    let rs = r.powf(sigma);
    let phase = t * rs;
    let s = if phase < TAYLOR_PHASE {
        t * (1.0 - phase * phase / 6.0)
    } else {
        phase.sin() / rs
    };
    KernelPair {
        s,
        c: phase.cos(),
        phase,
    }
}

/// (1 − cos(t r^σ))/r^{2σ}, evaluated as t²·2sin²(φ/2)/φ² with limit t²/2.
pub fn one_minus_cos_kernel(t: f64, r: f64, sigma: f64) -> f64 {
    let phase = t * r.powf(sigma);
    if phase < TAYLOR_PHASE {
        t * t * (0.5 - phase * phase / 24.0)
    } else {
        let h = (0.5 * phase).sin();
        t * t * 2.0 * h * h / (phase * phase)
    }
}

/// ρ_u = s²S₁ + c²S₀ + 2scX, the sphere average of |ŵ(t, rω)|².
pub fn displacement_density(prof: &SpectralProfiles, t: f64, r: f64) -> f64 {
    let k = kernels(t, r, prof.sigma);
    let (s0, s1, x) = prof.eval(r);
    k.s * k.s * s1 + k.c * k.c * s0 + 2.0 * k.s * k.c * x
}

/// ρ_v = c²S₁ + r^{2σ}sin²φ·S₀ − 2r^σ c sinφ·X, the sphere average of |ŵ_t|².
pub fn velocity_density(prof: &SpectralProfiles, t: f64, r: f64) -> f64 {
    let k = kernels(t, r, prof.sigma);
    let rs = r.powf(prof.sigma);
    let sn = k.phase.sin();
    let (s0, s1, x) = prof.eval(r);
    k.c * k.c * s1 + rs * rs * sn * sn * s0 - 2.0 * rs * k.c * sn * x
}

/// Sphere-averaged densities of the time antiderivative V̂ = ∫₀ᵗ ŵ ds
/// = q·ŵ₁ + s·ŵ₀ with q = (1 − cos φ)/r^{2σ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiderivativeDensity {
    /// |V̂|²
    pub rho_v: f64,
    /// |V̂_t|² = ρ_u
    pub rho_vt: f64,
    /// r^{2σ}|V̂|²
    pub op_energy: f64,
    /// Re[ŵ₁ conj(V̂)] = qS₁ + sX
    pub forcing: f64,
}

pub fn antiderivative_density(prof: &SpectralProfiles, t: f64, r: f64) -> AntiderivativeDensity {
    let k = kernels(t, r, prof.sigma);
    let q = one_minus_cos_kernel(t, r, prof.sigma);
    let rs = r.powf(prof.sigma);
    let (s0, s1, x) = prof.eval(r);
    let rho_v = q * q * s1 + k.s * k.s * s0 + 2.0 * q * k.s * x;
    AntiderivativeDensity {
        rho_v,
        rho_vt: k.s * k.s * s1 + k.c * k.c * s0 + 2.0 * k.s * k.c * x,
        op_energy: rs * rs * rho_v,
        forcing: q * s1 + k.s * x,
    }
}

/// Which sphere-averaged density to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// ρ_u
    Displacement,
    /// ρ_v
    Velocity,
    /// r^{2σ}ρ_u
    OperatorDisplacement,
    /// r^{2σ}|V̂|²
    OperatorAntiderivative,
    /// Re[ŵ₁ conj(V̂)]
    Forcing,
}

/// A density at fixed t, ready for [`crate::quadrature::integrate_radial`].
#[derive(Debug, Clone, Copy)]
pub struct SpectralDensity<'a> {
    pub profiles: &'a SpectralProfiles,
    pub t: f64,
    pub kind: DensityKind,
}

impl<'a> SpectralDensity<'a> {
    pub fn new(profiles: &'a SpectralProfiles, t: f64, kind: DensityKind) -> Self {
        Self { profiles, t, kind }
    }
}

impl RadialDensity for SpectralDensity<'_> {
    fn value(&self, r: f64) -> f64 {
        let p = self.profiles;
        let t = self.t;
        match self.kind {
            DensityKind::Displacement => displacement_density(p, t, r),
            DensityKind::Velocity => velocity_density(p, t, r),
            DensityKind::OperatorDisplacement => r.powf(2.0 * p.sigma) * displacement_density(p, t, r),
            DensityKind::OperatorAntiderivative => antiderivative_density(p, t, r).op_energy,
            DensityKind::Forcing => antiderivative_density(p, t, r).forcing,
        }
    }

    fn harmonics(&self, r: f64) -> Option<Harmonics> {
        if !(r > 0.0) {
            return None;
        }
        let rs = r.powf(self.profiles.sigma);
        let r2 = rs * rs;
        let (s0, s1, x) = self.profiles.eval(r);
        let h = match self.kind {
            DensityKind::Displacement => Harmonics {
                mean: 0.5 * (s1 / r2 + s0),
                cos2: 0.5 * (s0 - s1 / r2),
                sin2: x / rs,
                ..Harmonics::default()
            },
            DensityKind::Velocity => Harmonics {
                mean: 0.5 * (s1 + r2 * s0),
                cos2: 0.5 * (s1 - r2 * s0),
                sin2: -rs * x,
                ..Harmonics::default()
            },
            DensityKind::OperatorDisplacement => Harmonics {
                mean: 0.5 * (s1 + r2 * s0),
                cos2: 0.5 * (r2 * s0 - s1),
                sin2: rs * x,
                ..Harmonics::default()
            },
            DensityKind::OperatorAntiderivative => Harmonics {
                mean: 1.5 * s1 / r2 + 0.5 * s0,
                cos1: -2.0 * s1 / r2,
                sin1: 2.0 * x / rs,
                cos2: 0.5 * (s1 / r2 - s0),
                sin2: -x / rs,
            },
            DensityKind::Forcing => Harmonics {
                mean: s1 / r2,
                cos1: -s1 / r2,
                sin1: x / rs,
                ..Harmonics::default()
            },
        };
        Some(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DataCombo, DataPrimitive, Problem};
    use crate::spectra::spectral_profiles;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn gauss(a: f64) -> DataCombo {
        DataCombo::single(1.0, DataPrimitive::Gaussian { a })
    }

    fn mixed_profiles(n: usize, sigma: f64) -> SpectralProfiles {
        let u0 = gauss(0.7);
        let u1 = DataCombo {
            terms: vec![
                crate::model::Term {
                    coeff: 1.0,
                    prim: DataPrimitive::Gaussian { a: 0.5 },
                },
                crate::model::Term {
                    coeff: -0.4,
                    prim: DataPrimitive::LapGaussian { a: 0.9 },
                },
            ],
        };
        spectral_profiles(&Problem::new(n, sigma, u0, u1).unwrap()).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = kernels(3.0, 0.0, 2.0);
        assert_eq!((k.s, k.c), (3.0, 1.0));
        let k = kernels(PI / 2.0, 1.0, 2.0);
        assert!((k.s - 1.0).abs() < 1e-15 && k.c.abs() < 1e-15);
        let k = kernels(1.0, PI.sqrt(), 2.0);
        assert!(k.s.abs() < 1e-15 && (k.c + 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernels_are_continuous_across_taylor_switch() {
        let t = 2.0;
        let r_switch = (TAYLOR_PHASE / t).sqrt();
        for f in [0.999_999, 1.000_001] {
            let r = r_switch * f;
            let k = kernels(t, r, 2.0);
            let exact = (t * r * r).sin() / (r * r);
            assert!((k.s - exact).abs() < 1e-12 * t);
            let q = one_minus_cos_kernel(t, r, 2.0);
            let phase = t * r * r;
            let naive = 2.0 * (0.5 * phase).sin().powi(2) / (r * r * r * r);
            assert!((q - naive).abs() < 1e-10 * t * t);
        }
        assert_eq!(one_minus_cos_kernel(4.0, 0.0, 2.0), 8.0);
    }

    #[test]
    fn displacement_examples() {
        let prof = spectral_profiles(&Problem::plate(1, DataCombo::zero(), gauss(0.5)).unwrap()).unwrap();
        let v = displacement_density(&prof, PI / 2.0, 1.0);
        assert!((v - 4.0 * PI * (-1.0f64).exp()).abs() < 1e-12, "{v}");
        let mixed = mixed_profiles(2, 2.0);
        for r in [0.0, 0.3, 1.7] {
            assert!((displacement_density(&mixed, 0.0, r) - mixed.s0.eval(r)).abs() < 1e-12);
            assert!((velocity_density(&mixed, 0.0, r) - mixed.s1.eval(r)).abs() < 1e-12);
        }
        let t = 5.0;
        let (s0, s1, x) = mixed.eval(0.0);
        let want = t * t * s1 + s0 + 2.0 * t * x;
        assert!((displacement_density(&mixed, t, 0.0) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn velocity_vanishes_at_quarter_phase_for_pure_velocity_data() {
        let prof = spectral_profiles(&Problem::plate(1, DataCombo::zero(), gauss(0.5)).unwrap()).unwrap();
        assert!(velocity_density(&prof, PI / 2.0, 1.0).abs() < 1e-14);
    }

    #[test]
    fn antiderivative_examples() {
        let mixed = mixed_profiles(1, 2.0);
        let a = antiderivative_density(&mixed, 0.0, 0.8);
        assert_eq!(a.rho_v, 0.0);
        assert!((a.rho_vt - mixed.s0.eval(0.8)).abs() < 1e-14);

        let prof = spectral_profiles(&Problem::plate(2, DataCombo::zero(), gauss(0.5)).unwrap()).unwrap();
        let t = 3.0;
        let a = antiderivative_density(&prof, t, 0.0);
        let want = (t * t / 2.0).powi(2) * prof.s1.eval(0.0);
        assert!((a.rho_v - want).abs() < 1e-12 * want);

        let r = (2.0 * PI / t).sqrt();
        let a = antiderivative_density(&prof, t, r);
        assert!(a.rho_v.abs() < 1e-12 * prof.s1.eval(r));
    }

    #[test]
    fn harmonic_splits_reproduce_values() {
        let prof = mixed_profiles(3, 1.5);
        let t = 7.3;
        for kind in [
            DensityKind::Displacement,
            DensityKind::Velocity,
            DensityKind::OperatorDisplacement,
            DensityKind::OperatorAntiderivative,
            DensityKind::Forcing,
        ] {
            let d = SpectralDensity::new(&prof, t, kind);
            for r in [0.2, 0.9, 1.6, 3.1] {
                let h = d.harmonics(r).unwrap();
                let phi = t * r.powf(1.5);
                let rebuilt = h.mean
                    + h.cos1 * phi.cos()
                    + h.sin1 * phi.sin()
                    + h.cos2 * (2.0 * phi).cos()
                    + h.sin2 * (2.0 * phi).sin();
                let v = d.value(r);
                assert!(
                    (rebuilt - v).abs() < 1e-11 * h.mean.abs().max(1e-300),
                    "{kind:?} r={r}: {rebuilt} vs {v}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn pointwise_energy_identity(t in 0.0f64..1e4, r in 0.0f64..6.0, sigma in 0.5f64..3.5) {
            let prof = mixed_profiles(2, sigma);
            let r2s = r.powf(2.0 * sigma);
            let lhs = velocity_density(&prof, t, r) + r2s * displacement_density(&prof, t, r);
            let (s0, s1, _) = prof.eval(r);
            let rhs = s1 + r2s * s0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300) + 1e-300, "{lhs} vs {rhs}");
        }

        #[test]
        fn antiderivative_identity_pointwise(t in 0.0f64..1e3, r in 0.0f64..6.0) {
            let prof = mixed_profiles(1, 2.0);
            let a = antiderivative_density(&prof, t, r);
            let lhs = 0.5 * a.rho_vt + 0.5 * a.op_energy - a.forcing;
            let s0 = prof.s0.eval(r);
            let scale = a.rho_vt.abs() + a.op_energy.abs() + a.forcing.abs() + s0;
            prop_assert!((lhs - 0.5 * s0).abs() <= 1e-12 * scale + 1e-300);
        }

        #[test]
        fn densities_are_nonnegative(t in 0.0f64..1e3, r in 0.0f64..6.0) {
            let prof = mixed_profiles(2, 2.0);
            let (s0, s1, _) = prof.eval(r);
            let scale = (s0 + s1) * (1.0 + t * t + r.powi(8));
            prop_assert!(displacement_density(&prof, t, r) >= -1e-13 * scale);
            prop_assert!(velocity_density(&prof, t, r) >= -1e-13 * scale);
        }
    }
}
