use std::sync::OnceLock;

use crate::{Error, Result};

/// Integration domain of a [`QuadratureRule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// The finite interval `[a, b]`.
    Finite(f64, f64),
    /// The half line `[a, ∞)`, handled through `x = a + t/(1 - t)` on `t ∈ [0, 1)`.
    UpperHalfLine(f64),
}

impl Domain {
    /// Range of the variable the base rule is laid out on.
    fn canonical(&self) -> (f64, f64) {
        match *self {
            Domain::Finite(a, b) => (a, b),
            Domain::UpperHalfLine(_) => (0.0, 1.0),
        }
    }

    /// Maps a canonical coordinate to `(x, dx/dt)`.
    #[inline]
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Domain::Finite(_, _) => (t, 1.0),
            Domain::UpperHalfLine(a) => {
                let s = 1.0 - t;
                (a + t / s, 1.0 / (s * s))
            }
        }
    }
}

/// A Gauss-Legendre rule laid out on a [`Domain`].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: Domain,
    reference: &'static ReferenceRule,
}

#[derive(Debug)]
struct ReferenceRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Order used throughout the crate.
pub const DEFAULT_ORDER: usize = 64;

fn reference_rule(order: usize) -> &'static ReferenceRule {
    static RULE_64: OnceLock<ReferenceRule> = OnceLock::new();
    if order == DEFAULT_ORDER {
        RULE_64.get_or_init(|| gauss_legendre_reference(order))
    } else {
        // Non-default orders are rare (tests, diagnostics); leak one copy each.
        Box::leak(Box::new(gauss_legendre_reference(order)))
    }
}

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre_reference(n: usize) -> ReferenceRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
    ReferenceRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl QuadratureRule {
    pub fn gauss_legendre(order: usize, domain: Domain) -> Result<Self> {
        if order < 2 {
            return Err(Error::domain("quadrature rule needs at least two nodes"));
        }
        match domain {
            Domain::Finite(a, b) if !(a.is_finite() && b.is_finite() && a < b) => {
                return Err(Error::domain(format!("invalid interval [{a}, {b}]")));
            }
            Domain::UpperHalfLine(a) if !a.is_finite() => {
                return Err(Error::domain("half line must start at a finite point"));
            }
            _ => {}
        }
        let reference = reference_rule(order);
        let (lo, hi) = domain.canonical();
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut nodes = Vec::with_capacity(order);
        let mut weights = Vec::with_capacity(order);
        for (&r, &w) in reference.nodes.iter().zip(&reference.weights) {
            let (x, jac) = domain.map(mid + half * r);
            nodes.push(x);
            weights.push(w * half * jac);
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            domain,
            reference,
        })
    }

    /// The 64-node rule on `domain`.
    pub fn standard(domain: Domain) -> Self {
        Self::gauss_legendre(DEFAULT_ORDER, domain).expect("valid domain")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Single application of the rule, no refinement.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    fn apply_on<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> f64 {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut acc = 0.0;
        for (&r, &w) in self.reference.nodes.iter().zip(&self.reference.weights) {
            let (x, jac) = self.domain.map(mid + half * r);
            acc += w * jac * f(x);
        }
        acc * half
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the accepted local discrepancy estimates.
    pub error: f64,
    /// False when some sub-interval hit the refinement cap.
    pub converged: bool,
    pub evaluations: usize,
}

impl Integral {
    /// Converts a non-converged estimate into [`Error::NonConvergence`].
    pub fn into_result(self) -> Result<f64> {
        if self.converged && self.value.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence {
                value: self.value,
                error: self.error,
            })
        }
    }
}

/// Cap on the number of sub-intervals kept by [`integrate`].
const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Piece {
    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integration by dyadic bisection.
///
/// Every sub-interval carries the rule applied to each of its halves, and
/// the discrepancy between their sum and the rule over the whole
/// sub-interval. The piece with the largest discrepancy is bisected until
/// the summed discrepancy drops below `tol` or the interval cap is reached.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule, tol: f64) -> Integral {
    let n = rule.order();
    let mut evaluations = n;
    let mut make = |lo: f64, hi: f64, whole: f64| {
        let m = 0.5 * (lo + hi);
        let left = rule.apply_on(&f, lo, m);
        let right = rule.apply_on(&f, m, hi);
        evaluations += 2 * n;
        let sum = left + right;
        let error = if sum.is_finite() { (sum - whole).abs() } else { f64::INFINITY };
        Piece { lo, hi, left, right, error }
    };
    let (lo, hi) = rule.domain.canonical();
    let first = make(lo, hi, rule.apply(&f));
    let mut total_error = first.error;
    let mut heap = std::collections::BinaryHeap::from([first]);
    while total_error > tol && heap.len() < MAX_INTERVALS {
        let worst = *heap.peek().expect("non-empty");
        let m = 0.5 * (worst.lo + worst.hi);
        if !worst.error.is_finite() || !(m > worst.lo && m < worst.hi) {
            break;
        }
        heap.pop();
        let a = make(worst.lo, m, worst.left);
        let b = make(m, worst.hi, worst.right);
        total_error += a.error + b.error - worst.error;
        heap.push(a);
        heap.push(b);
    }
    let mut pieces = heap.into_vec();
    pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value: f64 = pieces.iter().map(Piece::value).sum();
    let error: f64 = pieces.iter().map(|p| p.error).sum();
    Integral {
        value,
        error,
        converged: error <= tol && value.is_finite(),
        evaluations,
    }
}
