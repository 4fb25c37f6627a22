use serde::{Deserialize, Serialize};

/// Random-walk scale tuned by Robbins–Monro steps on its logarithm.
///
/// Counters are split into the current adaptation window and the
/// post-burn-in totals used for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveScale {
    log_scale: f64,
    window_accepted: u64,
    window_proposed: u64,
    accepted: u64,
    proposed: u64,
    windows: u64,
}

impl AdaptiveScale {
    pub fn new(scale: f64) -> Self {
        AdaptiveScale {
            log_scale: scale.ln(),
            window_accepted: 0,
            window_proposed: 0,
            accepted: 0,
            proposed: 0,
            windows: 0,
        }
    }

    #[inline]
    pub fn scale(&self) -> f64 {
        self.log_scale.exp()
    }

    #[inline]
    pub fn record(&mut self, accepted: bool) {
        self.record_many(u64::from(accepted), 1);
    }

    pub fn record_many(&mut self, accepted: u64, proposed: u64) {
        self.window_accepted += accepted;
        self.window_proposed += proposed;
        self.accepted += accepted;
        self.proposed += proposed;
    }

    /// Close an adaptation window, moving the log scale toward `target`
    /// acceptance with gain 1/√k.
    pub fn adapt(&mut self, target: f64) {
        if self.window_proposed == 0 {
            return;
        }
        self.windows += 1;
        let rate = self.window_accepted as f64 / self.window_proposed as f64;
        let gain = 1.0 / (self.windows as f64).sqrt();
        self.log_scale = (self.log_scale + gain * (rate - target)).clamp(-12.0, 6.0);
        self.window_accepted = 0;
        self.window_proposed = 0;
    }

    /// Forget acceptance counts, keeping the tuned scale.
    pub fn reset_counts(&mut self) {
        self.window_accepted = 0;
        self.window_proposed = 0;
        self.accepted = 0;
        self.proposed = 0;
    }

    /// Acceptance rate since the last reset, if anything was proposed.
    pub fn rate(&self) -> Option<f64> {
        (self.proposed > 0).then(|| self.accepted as f64 / self.proposed as f64)
    }
}
