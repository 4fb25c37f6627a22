use serde::Serialize;

use crate::{Error, Result};

/// Replica summary of one parameter's point estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoveryStats {
    /// Mean of the estimates.
    pub est: f64,
    /// Sample standard deviation (divisor R − 1).
    pub sd: f64,
    /// Est − truth.
    pub bias: f64,
    /// |Est − truth| / |truth|, or |Est − truth| when the truth is zero.
    pub rel_bias: f64,
    /// Bias² + SD².
    pub mse: f64,
    /// False when `rel_bias` fell back to the absolute bias.
    pub relative: bool,
}

/// Est, SD, Rel Bias and MSE of replica estimates against the truth.
///
/// The estimates are sorted before summation, so the result does not depend
/// on replica order.
pub fn recovery_stats(estimates: &[f64], truth: f64) -> Result<RecoveryStats> {
    if estimates.len() < 2 {
        return Err(Error::domain(format!(
            "recovery statistics need at least two estimates, got {}",
            estimates.len()
        )));
    }
    if estimates.iter().any(|v| !v.is_finite()) || !truth.is_finite() {
        return Err(Error::domain("non-finite estimate or truth"));
    }
    let mut v = estimates.to_vec();
    v.sort_by(f64::total_cmp);
    let r = v.len() as f64;
    let est = v.iter().sum::<f64>() / r;
    let sd = (v.iter().map(|x| (x - est).powi(2)).sum::<f64>() / (r - 1.0)).sqrt();
    let bias = est - truth;
    let relative = truth != 0.0;
    let rel_bias = if relative { bias.abs() / truth.abs() } else { bias.abs() };
    Ok(RecoveryStats {
        est,
        sd,
        bias,
        rel_bias,
        mse: bias * bias + sd * sd,
        relative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_recovery() {
        let s = recovery_stats(&[1.5; 4], 1.5).unwrap();
        assert_eq!((s.est, s.sd, s.rel_bias, s.mse), (1.5, 0.0, 0.0, 0.0));
    }

    #[test]
    fn two_estimates_by_hand() {
        let s = recovery_stats(&[0.9, 1.1], 1.0).unwrap();
        assert!((s.est - 1.0).abs() < 1e-15);
        assert!((s.sd - 0.02f64.sqrt()).abs() < 1e-15);
        assert!(s.rel_bias < 1e-15);
        assert!((s.mse - 0.02).abs() < 1e-15);
    }

    #[test]
    fn zero_truth_falls_back_to_absolute_bias() {
        let s = recovery_stats(&[0.1, 0.3], 0.0).unwrap();
        assert!(!s.relative);
        assert!((s.rel_bias - 0.2).abs() < 1e-15);
        assert!(recovery_stats(&[0.1], 0.0).is_err());
        assert!(recovery_stats(&[0.1, f64::NAN], 1.0).is_err());
    }

    #[test]
    fn published_row_is_self_consistent() {
        // β₀ at n = 250 under the CSN link: Est 1.0410, SD 0.2136,
        // Rel Bias 0.0410, MSE 0.0473 for truth 1.
        let (est, sd) = (1.0410f64, 0.2136f64);
        assert!(((est - 1.0).abs() - 0.0410).abs() < 5e-5);
        assert!(((est - 1.0).powi(2) + sd * sd - 0.0473).abs() < 5e-5);
    }

    proptest! {
        #[test]
        fn mse_identity_and_order_invariance(
            v in prop::collection::vec(-50.0f64..50.0, 2..40),
            truth in -10.0f64..10.0,
            seed in any::<u64>(),
        ) {
            let s = recovery_stats(&v, truth).unwrap();
            prop_assert!((s.mse - (s.bias * s.bias + s.sd * s.sd)).abs() <= 1e-12 * s.mse.max(1.0));
            prop_assert!(s.rel_bias >= 0.0);
            let mut w = v.clone();
            let k = (seed as usize) % w.len();
            w.rotate_left(k);
            w.reverse();
            prop_assert_eq!(recovery_stats(&w, truth).unwrap(), s);
        }
    }
}
