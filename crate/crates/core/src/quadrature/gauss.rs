//! Gauss–Legendre panels and a globally adaptive bisection integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// A fixed Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `order`-point rule by Newton iteration on P_order.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "rule order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                deriv = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            if dp != 0.0 {
                deriv = dp;
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on [a, b].
    pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(&self, f: &F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// An integral value with its error estimate and evaluation count.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

impl std::ops::AddAssign for Estimate {
    fn add_assign(&mut self, rhs: Estimate) {
        *self = *self + rhs;
    }
}

/// Tolerances and panel budget for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn evaluate<F: Fn(f64) -> f64 + ?Sized>(rule: &GaussLegendre, f: &F, a: f64, b: f64) -> Panel {
    let m = 0.5 * (a + b);
    let whole = rule.integrate(f, a, b);
    let halves = rule.integrate(f, a, m) + rule.integrate(f, m, b);
    let error = if halves.is_finite() && whole.is_finite() {
        (whole - halves).abs()
    } else {
        f64::INFINITY
    };
    Panel {
        a,
        b,
        value: halves,
        error,
    }
}

/// Integrates `f` over the union of panels given by consecutive `breakpoints`.
///
/// Each panel is scored by the gap between one rule application and the sum
/// over its two halves; the worst panel is bisected until the summed gap
/// meets `max(abs_tol, rel_tol·|I|)`. Panels too narrow to split further in
/// floating point are retired with their error still counted.
pub fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    breakpoints: &[f64],
    rule: &GaussLegendre,
    opts: AdaptiveOptions,
) -> Result<Estimate> {
    let per_panel = 3 * rule.order();
    let mut heap = BinaryHeap::new();
    let mut retired = Vec::new();
    let mut evaluations = 0;
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            heap.push(evaluate(rule, f, w[0], w[1]));
            evaluations += per_panel;
        }
    }
    let mut value: f64 = heap.iter().map(|p: &Panel| p.value).sum();
    let mut error: f64 = heap.iter().map(|p: &Panel| p.error).sum();
    let mut panels = heap.len();

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target || heap.is_empty() {
            // Re-sum to shed drift from incremental updates before deciding.
            value = heap.iter().chain(retired.iter()).map(|p| p.value).sum();
            error = heap.iter().chain(retired.iter()).map(|p| p.error).sum();
            let target = opts.abs_tol.max(opts.rel_tol * value.abs());
            if error <= target || heap.is_empty() {
                break;
            }
        }
        if panels >= opts.max_panels {
            return Err(Error::Quadrature { value, error, panels });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) || (worst.b - worst.a) <= 4.0 * f64::EPSILON * m.abs() {
            retired.push(worst);
            continue;
        }
        let left = evaluate(rule, f, worst.a, m);
        let right = evaluate(rule, f, m, worst.b);
        evaluations += 2 * per_panel;
        panels += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // rounding floor: a few ulps of the summed panel magnitudes
    let magnitude: f64 = heap.iter().chain(retired.iter()).map(|p| p.value.abs()).sum();
    error += 16.0 * f64::EPSILON * magnitude;
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Quadrature { value, error, panels });
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}
