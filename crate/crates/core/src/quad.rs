//! Gauss–Legendre quadrature with node doubling.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared `n`-point rule, built once per process.
    pub fn cached(n: usize) -> Arc<Self> {
        static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let rules = RULES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = rules.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))))
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>() * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Stopping rule for [`integrate_doubling`].
#[derive(Debug, Clone, Copy)]
pub struct Doubling {
    pub start: usize,
    pub max: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Doubling {
    fn default() -> Self {
        Self { start: 64, max: 1024, rel_tol: 1e-8, abs_tol: 0.0 }
    }
}

/// Result of a doubling integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub nodes: usize,
    pub change: f64,
}

/// Integrates `f` on `[a, b]`, doubling the node count until successive
/// estimates agree to `rel_tol` (relative) or `abs_tol` (absolute).
pub fn integrate_doubling<F: FnMut(f64) -> f64>(a: f64, b: f64, rule: Doubling, mut f: F) -> Result<Integral> {
    let mut n = rule.start.max(1);
    let mut prev = GaussLegendre::cached(n).integrate(a, b, &mut f);
    while n < rule.max {
        n *= 2;
        let cur = GaussLegendre::cached(n).integrate(a, b, &mut f);
        let change = (cur - prev).abs();
        if change <= rule.abs_tol || change <= rule.rel_tol * cur.abs() {
            return Ok(Integral { value: cur, nodes: n, change });
        }
        prev = cur;
    }
    Err(Error::numerical(format!("quadrature on [{a}, {b}] did not settle within {} nodes", rule.max)))
}
