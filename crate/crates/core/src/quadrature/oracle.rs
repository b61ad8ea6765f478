//! Brute-force tensor-grid oracle for Plancherel-side norms.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Problem;
use crate::propagator::kernels;
use crate::spectra::{combo_fourier, eval_fourier_sum};

/// Largest grid the oracle will visit.
pub const MAX_GRID_POINTS: f64 = 5.0e7;

/// (2π)^{−n} Σ |ŵ(t, ξ)|² hⁿ over the midpoint grid of [−R, R]ⁿ with spacing h.
///
/// ŵ is evaluated from the transform monomials and the kernels directly,
/// with no angular averaging or radial reduction.
pub fn tensor_oracle(p: &Problem, t: f64, big_r: f64, h: f64) -> Result<f64> {
    p.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("time must be ≥ 0, got {t}")));
    }
    if !(big_r > 0.0 && h > 0.0 && h < big_r) {
        return Err(Error::Precondition(format!(
            "grid needs 0 < h < R, got R = {big_r}, h = {h}"
        )));
    }
    let n = p.n;
    let per_axis = (2.0 * big_r / h).round();
    let points = per_axis.powi(n as i32);
    if points > MAX_GRID_POINTS {
        return Err(Error::GridTooLarge {
            points,
            limit: MAX_GRID_POINTS,
        });
    }
    let m = per_axis as usize;
    let step = 2.0 * big_r / per_axis;
    let axis: Vec<f64> = (0..m).map(|i| -big_r + (i as f64 + 0.5) * step).collect();
    let f0 = combo_fourier(&p.u0, n);
    let f1 = combo_fourier(&p.u1, n);
    let sigma = p.sigma;

    let point = |xi: &[f64]| {
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let k = kernels(t, r, sigma);
        (eval_fourier_sum(&f1, xi) * k.s + eval_fourier_sum(&f0, xi) * k.c).norm_sqr()
    };

    // the first axis is split across threads, the rest walked in order
    let sum: f64 = axis
        .par_iter()
        .map(|&x0| {
            let mut xi = vec![0.0; n];
            xi[0] = x0;
            let mut idx = vec![0usize; n];
            let mut acc = 0.0;
            loop {
                for j in 1..n {
                    xi[j] = axis[idx[j]];
                }
                acc += point(&xi);
                let mut j = n;
                loop {
                    if j <= 1 {
                        return acc;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < m {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        })
        .sum();
    Ok(sum * step.powi(n as i32) / (2.0 * std::f64::consts::PI).powi(n as i32))
}
