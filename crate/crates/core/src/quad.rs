//! Integration against the Marchenko–Pastur density.
//!
//! With `x = a + (b−a)·sin²(φ/2)`, `φ ∈ (0, π)`, the square-root edge factor
//! becomes `h·sin φ` and `p₀(x) dx = h² sin²φ / (2πx) dφ`, `h = (b−a)/2`.
//! The transformed integrand extends to an even, 2π-periodic function, so the
//! midpoint rule in `φ` converges geometrically for integrands analytic on
//! the bulk. Nodes never touch the edges.

use crate::error::{Error, Result};
use crate::mp::mp_edges;

pub const DEFAULT_NODES: usize = 512;
const MIN_NODES: usize = 16;
const MAX_NODES: usize = 1 << 22;

/// Nodes and weights for `∫ₐᵇ p₀(x) f(x) dx` at a fixed α.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Domain(format!("need at least {MIN_NODES} nodes, got {n}")));
        }
        let support = mp_edges(alpha)?;
        let width = support.b - support.a;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let phi = std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            let u = (0.5 * phi).sin().powi(2);
            let v = (0.5 * phi).cos().powi(2);
            let x = support.a + width * u;
            // (π/n) · h² sin²φ / (2πx) with h² sin²φ = (b−a)² u v.
            let w = width * width * u * v / (2.0 * n as f64 * x);
            nodes.push(x);
            weights.push(w);
        }
        Ok(Self { alpha, nodes, weights })
    }

    pub fn with_default_nodes(alpha: f64) -> Result<Self> {
        Self::new(alpha, DEFAULT_NODES)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ₐᵇ p₀(x) f(x) dx`. A non-finite integrand value is an error.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let fx = f(x);
            if !fx.is_finite() {
                return Err(Error::Integration(format!("integrand is {fx} at x = {x}")));
            }
            acc += w * fx;
        }
        Ok(acc)
    }
}

/// `∫ₐᵇ p₀(x) f(x) dx` with the given rule.
pub fn mp_integrate<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> Result<f64> {
    rule.integrate(f)
}

/// Doubles the node count from [`DEFAULT_NODES`] until two successive
/// estimates agree to `tol` (absolute, or relative when the value exceeds 1).
///
/// Needed when `f` has a pole just outside an edge, where a fixed rule
/// converges slowly.
pub fn mp_integrate_converged<F: Fn(f64) -> f64>(f: F, alpha: f64, tol: f64) -> Result<f64> {
    let mut n = DEFAULT_NODES;
    let mut prev = QuadratureRule::new(alpha, n)?.integrate(&f)?;
    while n < MAX_NODES {
        n *= 2;
        let next = QuadratureRule::new(alpha, n)?.integrate(&f)?;
        if (next - prev).abs() <= tol * next.abs().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Integration(format!(
        "no convergence to {tol} with {MAX_NODES} nodes"
    )))
}


// Five-point Gauss–Legendre on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// `∫_lo^hi f(x) dx` by composite five-point Gauss–Legendre on `panels` equal
/// panels. Endpoints are never evaluated.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    if hi <= lo || panels == 0 {
        return 0.0;
    }
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        let panel: f64 = GL5_NODES
            .iter()
            .zip(GL5_WEIGHTS.iter())
            .map(|(t, w)| w * f(mid + 0.5 * h * t))
            .sum();
        acc += 0.5 * h * panel;
    }
    acc
}
