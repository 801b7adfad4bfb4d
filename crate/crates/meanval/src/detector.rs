//! Window-based limit detection for partial-average sequences.
//!
//! A sequence is declared convergent once the componentwise spread of the
//! last `window` entries drops to `eps`; the reported limit is the mean of
//! that window (which halves the bias of simply taking the last entry for
//! monotone tails, and centres alternating tails).
//!
//! Oscillation is declared only on strong evidence: the spread has exceeded
//! `eps` for `3 * window` consecutive steps, the window stays bounded, the
//! spreads have stopped shrinking locally (not strictly decreasing, and flat
//! to within five percent over the trailing window), and — decisively — the
//! spread has kept at least 80% of its size since the streak began. Slowly
//! converging sequences fail that last test at every scale and are never
//! misclassified; they run until the caller's iteration cap instead.

use std::collections::VecDeque;

const BOUND: f64 = 1e9;
const FLATNESS: f64 = 0.05;
const NO_PROGRESS: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Verdict {
    Continue,
    Converged(Vec<f64>),
    Oscillating,
}

#[derive(Debug)]
pub(crate) struct WindowDetector {
    eps: f64,
    window: usize,
    values: VecDeque<Vec<f64>>,
    spreads: VecDeque<f64>,
    streak: usize,
    streak_start_spread: f64,
}

impl WindowDetector {
    pub(crate) fn new(eps: f64, window: usize) -> Self {
        assert!(eps > 0.0, "eps must be positive");
        assert!(window >= 2, "window must hold at least two entries");
        WindowDetector {
            eps,
            window,
            values: VecDeque::with_capacity(window + 1),
            spreads: VecDeque::with_capacity(window + 1),
            streak: 0,
            streak_start_spread: f64::INFINITY,
        }
    }

    /// Componentwise max-minus-min over the entries currently held.
    pub(crate) fn spread(&self) -> f64 {
        let d = match self.values.front() {
            Some(v) => v.len(),
            None => return 0.0,
        };
        let mut s = 0.0f64;
        for i in 0..d {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in &self.values {
                lo = lo.min(v[i]);
                hi = hi.max(v[i]);
            }
            s = s.max(hi - lo);
        }
        s
    }

    fn window_mean(&self) -> Vec<f64> {
        let d = self.values[0].len();
        let mut mean = vec![0.0; d];
        for v in &self.values {
            for i in 0..d {
                mean[i] += v[i];
            }
        }
        let k = self.values.len() as f64;
        for m in &mut mean {
            *m /= k;
        }
        mean
    }

    pub(crate) fn push(&mut self, v: &[f64]) -> Verdict {
        self.values.push_back(v.to_vec());
        if self.values.len() > self.window {
            self.values.pop_front();
        }
        if self.values.len() < self.window {
            return Verdict::Continue;
        }
        let spread = self.spread();
        self.spreads.push_back(spread);
        if self.spreads.len() > self.window {
            self.spreads.pop_front();
        }
        if spread <= self.eps {
            return Verdict::Converged(self.window_mean());
        }
        self.streak += 1;
        if self.streak == 1 {
            self.streak_start_spread = spread;
        }

        if self.streak < 3 * self.window || self.spreads.len() < self.window {
            return Verdict::Continue;
        }
        if spread < NO_PROGRESS * self.streak_start_spread {
            // The spread has genuinely shrunk since the streak began: this
            // still looks like (slow) convergence, not oscillation.
            return Verdict::Continue;
        }
        let bounded =
            self.values.iter().all(|v| v.iter().all(|x| x.is_finite() && x.abs() <= BOUND));
        if !bounded {
            return Verdict::Continue;
        }
        // Monotone spreads mean steady convergence or steady divergence;
        // oscillation shows up as spreads that have stopped moving.
        let strictly_decreasing = self
            .spreads
            .iter()
            .zip(self.spreads.iter().skip(1))
            .all(|(a, b)| b < a);
        let strictly_increasing = self
            .spreads
            .iter()
            .zip(self.spreads.iter().skip(1))
            .all(|(a, b)| b > a);
        if strictly_decreasing || strictly_increasing {
            return Verdict::Continue;
        }
        let smax = self.spreads.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s));
        let smin = self.spreads.iter().fold(f64::INFINITY, |m, &s| m.min(s));
        if smax - smin <= FLATNESS * smax {
            return Verdict::Oscillating;
        }
        Verdict::Continue
    }
}
