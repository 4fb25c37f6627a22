use super::cdf::UnitCsn;
use super::mixing::MixingFamily;

/// Log-density drop at which the trapezoid grids are truncated.
const TAIL_DROP: f64 = 14.0;

/// Fixed discretization of the mixing law of U, shared by every observation
/// in a likelihood evaluation: E g(U) ≈ Σ wₖ g(uₖ).
///
/// Much cheaper than adaptive integration and accurate to about 1e-5 for
/// the smooth integrands `u ↦ F(η√u)` met by the link.
#[derive(Debug, Clone)]
pub struct MixingNodes {
    u: Vec<f64>,
    w: Vec<f64>,
}

/// Trapezoid grid for the density ∝ exp(−k(eˣ − x − 1)) on the real line.
/// It is smooth with light tails, so the rule converges geometrically in
/// the step. Weights are normalized to sum to one.
fn gumbel_grid(k: f64) -> (Vec<f64>, Vec<f64>) {
    let step = (0.35 / k.sqrt()).min(0.25);
    let drop = |x: f64| k * (x.exp_m1() - x);
    let mut xs = vec![0.0];
    for dir in [-1.0, 1.0] {
        let mut x = dir * step;
        while drop(x) < TAIL_DROP {
            xs.push(x);
            x += dir * step;
        }
    }
    xs.sort_by(f64::total_cmp);
    let raw: Vec<f64> = xs.iter().map(|&x| (-drop(x)).exp()).collect();
    let total: f64 = raw.iter().sum();
    (xs, raw.iter().map(|r| r / total).collect())
}

impl MixingNodes {
    pub fn new(fam: &MixingFamily) -> Self {
        match *fam {
            MixingFamily::Normal | MixingFamily::Csn => MixingNodes { u: vec![1.0], w: vec![1.0] },
            MixingFamily::Cscn { nu1, nu2 } => MixingNodes {
                u: vec![nu2, 1.0],
                w: vec![nu1, 1.0 - nu1],
            },
            // U = exp(−eˣ/ν): −ν ln U ~ Exp(1) has log-Gumbel density in x.
            MixingFamily::Css { nu } => {
                let (xs, w) = gumbel_grid(1.0);
                MixingNodes {
                    u: xs.iter().map(|x| (-x.exp() / nu).exp()).collect(),
                    w,
                }
            }
            // U = eˣ with x ∝ exp(−(ν/2)(eˣ − x − 1)).
            MixingFamily::Cst { nu } => {
                let (xs, w) = gumbel_grid(0.5 * nu);
                MixingNodes {
                    u: xs.iter().map(|x| x.exp()).collect(),
                    w,
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.w.iter().copied())
    }

    /// P(Y = y | η) for the binary link, evaluating the smaller tail
    /// directly: `pos` is CSN(0,1,δ) and `neg` is CSN(0,1,−δ).
    pub fn response_prob(&self, eta: f64, y: bool, pos: &UnitCsn, neg: &UnitCsn) -> f64 {
        if y {
            self.points().map(|(u, w)| w * pos.cdf(eta * u.sqrt())).sum()
        } else {
            self.points().map(|(u, w)| w * neg.cdf(-eta * u.sqrt())).sum()
        }
    }
}
