//! Surface measure of the unit sphere S^{n-1} and exact monomial averages over it.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest total monomial degree accepted by [`monomial_integral`].
///
/// The closed form below is exact for every degree; the cap only keeps the
/// double-factorial products far from overflow. Squared tensor dipoles need 4.
pub const MAX_SPHERE_DEGREE: usize = 32;

/// Surface area ω_n of the unit sphere in R^n (ω₁ = 2, ω₂ = 2π, ω₃ = 4π, ...).
pub fn surface_area(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    // ω_{n+2} = 2π ω_n / n
    let (mut area, mut dim) = if n % 2 == 1 { (2.0, 1) } else { (2.0 * PI, 2) };
    while dim < n {
        area *= 2.0 * PI / dim as f64;
        dim += 2;
    }
    area
}

/// ∫_{S^{n-1}} ω^γ dω for the multi-index `exponents` (length n).
///
/// Odd components vanish by symmetry. Otherwise the average is
/// Π(γ_i − 1)!! / (n (n+2) ⋯ (n + |γ| − 2)).
pub fn monomial_integral(exponents: &[u32]) -> Result<f64> {
    let n = exponents.len();
    assert!(n >= 1, "dimension must be at least 1");
    let degree: usize = exponents.iter().map(|&e| e as usize).sum();
    if degree > MAX_SPHERE_DEGREE {
        return Err(Error::SphereDegree {
            degree,
            max: MAX_SPHERE_DEGREE,
        });
    }
    if exponents.iter().any(|e| e % 2 == 1) {
        return Ok(0.0);
    }
    let mut numer = 1.0;
    for &e in exponents {
        numer *= double_factorial(e as i64 - 1);
    }
    let mut denom = 1.0;
    let mut k = n;
    while k < n + degree {
        denom *= k as f64;
        k += 2;
    }
    Ok(surface_area(n) * numer / denom)
}

/// ∫_{S^{n-1}} |ω_1| dω = 2 π^{(n−1)/2} / Γ((n+1)/2).
pub fn abs_coordinate_integral(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    2.0 * PI.powf((n as f64 - 1.0) / 2.0) / libm::tgamma((n as f64 + 1.0) / 2.0)
}

fn double_factorial(k: i64) -> f64 {
    let mut acc = 1.0;
    let mut j = k;
    while j > 1 {
        acc *= j as f64;
        j -= 2;
    }
    acc
}
