//! Limit estimation for alternating partial sums.

/// Estimates the limit of partial sums S_j of an alternating series whose
/// term magnitudes vary smoothly, by repeatedly averaging neighbours.
///
/// `partial_sums` must hold at least two entries; at most `levels` averaging
/// passes are applied. Returns the deepest estimate and the gap to the
/// previous level, which serves as its error estimate.
pub fn averaged_limit(partial_sums: &[f64], levels: usize) -> (f64, f64) {
    assert!(partial_sums.len() >= 2, "need two partial sums");
    let levels = levels.min(partial_sums.len() - 1).max(1);
    let start = partial_sums.len() - 1 - levels;
    let mut row: Vec<f64> = partial_sums[start..].to_vec();
    let mut prev = *row.last().expect("non-empty");
    for _ in 0..levels {
        prev = *row.last().expect("non-empty");
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let best = row[0];
    (best, (best - prev).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_harmonic_series() {
        // Σ (−1)^k/(k+1) = ln 2
        let mut s = 0.0;
        let sums: Vec<f64> = (0..40)
            .map(|k| {
                s += if k % 2 == 0 { 1.0 } else { -1.0 } / (k as f64 + 1.0);
                s
            })
            .collect();
        let (est, err) = averaged_limit(&sums, 20);
        assert!((est - std::f64::consts::LN_2).abs() < 1e-10, "{est}");
        assert!(err < 1e-8);
        // raw partial sum is only good to ~1/80
        assert!((sums[39] - std::f64::consts::LN_2).abs() > 1e-3);
    }

    #[test]
    fn slowly_varying_gaussian_weights() {
        // Σ (−1)^k e^{−(k/300)²}: limit ½ + tiny
        let mut s = 0.0;
        let sums: Vec<f64> = (0..30)
            .map(|k| {
                let x = k as f64 / 300.0;
                s += if k % 2 == 0 { 1.0 } else { -1.0 } * (-x * x).exp();
                s
            })
            .collect();
        let mut exact = 0.0;
        for k in 0..20_000 {
            let x = k as f64 / 300.0;
            exact += if k % 2 == 0 { 1.0 } else { -1.0 } * (-x * x).exp();
        }
        let (est, _) = averaged_limit(&sums, 12);
        assert!((est - exact).abs() < 1e-13, "{est} vs {exact}");
    }
}
