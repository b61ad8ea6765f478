//! Closed-form Fourier transforms of the data family and their sphere-averaged
//! radial profiles.
//!
//! Transforms follow f̂(ξ) = ∫ e^{−ix·ξ} f(x) dx, so ∂_j ↦ iξ_j.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{l1_weighted_norm, DataCombo, DataPrimitive, Problem};
use crate::sphere;

/// f̂(ξ) = Σ c_α ξ^α e^{−b|ξ|²}.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGaussFourier {
    pub monomials: Vec<(Complex64, Vec<u32>)>,
    pub width: f64,
}

impl PolyGaussFourier {
    pub fn dim(&self) -> usize {
        self.monomials.first().map_or(0, |(_, e)| e.len())
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for (c, _) in &mut self.monomials {
            *c *= factor;
        }
        self
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        let poly: Complex64 = self
            .monomials
            .iter()
            .map(|(c, e)| {
                let m: f64 = e.iter().zip(xi).map(|(&k, &x)| x.powi(k as i32)).product();
                c * m
            })
            .sum();
        poly * (-self.width * r2).exp()
    }
}

/// Fourier transform of one primitive.
pub fn fourier_profile(p: &DataPrimitive, n: usize) -> PolyGaussFourier {
    let a = p.width();
    let amp = (PI / a).powf(n as f64 / 2.0);
    let width = 1.0 / (4.0 * a);
    let unit = |axis: usize, k: u32| {
        let mut e = vec![0u32; n];
        e[axis] = k;
        e
    };
    let i = Complex64::i();
    let monomials = match *p {
        DataPrimitive::Gaussian { .. } => vec![(Complex64::new(amp, 0.0), vec![0; n])],
        DataPrimitive::Dipole { axis, .. } => vec![(i * amp, unit(axis - 1, 1))],
        DataPrimitive::TensorDipole { .. } => vec![(i * i * amp, vec![1, 1])],
        DataPrimitive::LapGaussian { .. } => {
            (0..n).map(|j| (Complex64::new(-amp, 0.0), unit(j, 2))).collect()
        }
    };
    PolyGaussFourier { monomials, width }
}

/// Transforms of every term of a combo, coefficients folded in.
pub fn combo_fourier(d: &DataCombo, n: usize) -> Vec<PolyGaussFourier> {
    d.terms
        .iter()
        .filter(|t| t.coeff != 0.0)
        .map(|t| fourier_profile(&t.prim, n).scaled(t.coeff))
        .collect()
}

pub fn eval_fourier_sum(parts: &[PolyGaussFourier], xi: &[f64]) -> Complex64 {
    parts.iter().map(|f| f.eval(xi)).sum()
}

/// One term c·r^{2k}·e^{−b r²}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialTerm {
    pub coeff: f64,
    pub power: u32,
    pub width: f64,
}

/// Σ c_{k,m} r^{2k} e^{−b_m r²}.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolyGaussRadial {
    pub terms: Vec<RadialTerm>,
}

impl PolyGaussRadial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<RadialTerm>) -> Self {
        let mut p = Self { terms };
        p.simplify();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges like terms and drops exact zeros.
    pub fn simplify(&mut self) {
        let mut merged: Vec<RadialTerm> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged
                .iter_mut()
                .find(|m| m.power == t.power && m.width == t.width)
            {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(*t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        merged.sort_by(|a, b| a.width.total_cmp(&b.width).then(a.power.cmp(&b.power)));
        self.terms = merged;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::from_terms(terms)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(RadialTerm {
                    coeff: a.coeff * b.coeff,
                    power: a.power + b.power,
                    width: a.width + b.width,
                });
            }
        }
        Self::from_terms(terms)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| RadialTerm {
                    coeff: t.coeff * factor,
                    ..*t
                })
                .collect(),
        )
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r2 = r * r;
        let mut acc = 0.0;
        let mut last_width = f64::NAN;
        let mut gauss = 0.0;
        for t in &self.terms {
            if t.width != last_width {
                gauss = (-t.width * r2).exp();
                last_width = t.width;
            }
            acc += t.coeff * r2.powi(t.power as i32) * gauss;
        }
        acc
    }

    /// Σ |c| r^{2k} e^{−b r²}, an upper envelope of |f(r)|.
    pub fn abs_envelope(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.terms
            .iter()
            .map(|t| t.coeff.abs() * r2.powi(t.power as i32) * (-t.width * r2).exp())
            .sum()
    }

    pub fn value_at_zero(&self) -> f64 {
        self.terms.iter().filter(|t| t.power == 0).map(|t| t.coeff).sum()
    }

    /// ∫₀^∞ r^p f(r) dr in closed form; needs p + 2k > −1 for every term.
    pub fn radial_moment(&self, p: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let s = (2.0 * t.power as f64 + p + 1.0) / 2.0;
                t.coeff * libm::tgamma(s) / (2.0 * t.width.powf(s))
            })
            .sum()
    }

    /// Smallest power 2k carrying a nonzero coefficient once like powers merge.
    pub fn leading_power(&self) -> Option<u32> {
        let mut powers: Vec<u32> = self.terms.iter().map(|t| t.power).collect();
        powers.sort_unstable();
        powers.dedup();
        powers.into_iter().find(|&k| {
            let sum: f64 = self.terms.iter().filter(|t| t.power == k).map(|t| t.coeff).sum();
            let scale: f64 = self
                .terms
                .iter()
                .filter(|t| t.power == k)
                .map(|t| t.coeff.abs())
                .sum();
            sum.abs() > 1e-12 * scale
        })
    }

    pub fn min_width(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.width).reduce(f64::min)
    }
}

impl fmt::Display for PolyGaussRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{:.6e}·r^{}·exp(-{}·r²)", t.coeff, 2 * t.power, t.width)?;
        }
        Ok(())
    }
}

/// ∫_{S^{n−1}} Re[fA(rω)·conj(fB(rω))] dω as a radial profile.
pub fn angular_cross(fa: &PolyGaussFourier, fb: &PolyGaussFourier, n: usize) -> Result<PolyGaussRadial> {
    let mut terms = Vec::new();
    for (ca, ea) in &fa.monomials {
        for (cb, eb) in &fb.monomials {
            let coeff = (ca * cb.conj()).re;
            if coeff == 0.0 {
                continue;
            }
            let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
            debug_assert_eq!(e.len(), n);
            let avg = sphere::monomial_integral(&e)?;
            if avg == 0.0 {
                continue;
            }
            let degree: u32 = e.iter().sum();
            terms.push(RadialTerm {
                coeff: coeff * avg,
                power: degree / 2,
                width: fa.width + fb.width,
            });
        }
    }
    Ok(PolyGaussRadial::from_terms(terms))
}

fn cross_sum(a: &[PolyGaussFourier], b: &[PolyGaussFourier], n: usize) -> Result<PolyGaussRadial> {
    let mut acc = PolyGaussRadial::zero();
    for fa in a {
        for fb in b {
            acc = acc.add(&angular_cross(fa, fb, n)?);
        }
    }
    Ok(acc)
}

/// The three sphere-averaged profiles S₀, S₁ and X of a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfiles {
    /// ∫ |ŵ₀(rω)|² dω
    pub s0: PolyGaussRadial,
    /// ∫ |ŵ₁(rω)|² dω
    pub s1: PolyGaussRadial,
    /// ∫ Re[ŵ₁ conj(ŵ₀)](rω) dω
    pub x: PolyGaussRadial,
    pub n: usize,
    pub sigma: f64,
}

impl SpectralProfiles {
    /// (S₀(r), S₁(r), X(r)).
    #[inline]
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        (self.s0.eval(r), self.s1.eval(r), self.x.eval(r))
    }

    /// Smallest Gaussian width present, which sets the tail cutoff.
    pub fn min_width(&self) -> Option<f64> {
        [self.s0.min_width(), self.s1.min_width(), self.x.min_width()]
            .into_iter()
            .flatten()
            .reduce(f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.s0.is_zero() && self.s1.is_zero() && self.x.is_zero()
    }
}

pub fn spectral_profiles(p: &Problem) -> Result<SpectralProfiles> {
    p.validate()?;
    let f0 = combo_fourier(&p.u0, p.n);
    let f1 = combo_fourier(&p.u1, p.n);
    Ok(SpectralProfiles {
        s0: cross_sum(&f0, &f0, p.n)?,
        s1: cross_sum(&f1, &f1, p.n)?,
        x: cross_sum(&f1, &f0, p.n)?,
        n: p.n,
        sigma: p.sigma,
    })
}

/// ‖d‖_{L¹}, which bounds |d̂(ξ)| pointwise.
pub fn sup_fourier_bound(d: &DataCombo, n: usize) -> Result<f64> {
    Ok(l1_weighted_norm(d, 0.0, n)? / 2.0)
}
