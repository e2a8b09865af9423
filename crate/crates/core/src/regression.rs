// Copyright (c) 2026 The Iris-CC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Least-squares fit of the rate-difference / RTT-variation model and the
//! Pearson correlation used to validate it.
//!
//! The model is `Δrtt = k·(x − r) + b`. Under Gaussian `b` the maximum
//! likelihood estimate of `(k, b)` is the ordinary least-squares line, so
//! that is all [`fit_k_b`] computes. Sums are taken over centered values to
//! avoid cancellation when the rates sit far from zero.

use std::fmt;

use crate::iris::EpochRecord;

/// One observation: how far the sending rate exceeded the receiving rate,
/// and how much the RTT moved over the same epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// `x − r`, packets/ms.
    pub rate_diff: f64,
    /// `rtt_i − rtt_{i−1}`, ms.
    pub delta_rtt: f64,
}

impl Sample {
    pub fn new(rate_diff: f64, delta_rtt: f64) -> Self {
        Sample {
            rate_diff,
            delta_rtt,
        }
    }

    fn is_finite(&self) -> bool {
        self.rate_diff.is_finite() && self.delta_rtt.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    /// Slope, ms per (packet/ms).
    pub k: f64,
    /// Intercept, ms.
    pub b: f64,
    /// Pearson coefficient of the samples. `None` when `delta_rtt` has no
    /// variance, in which case the slope is exactly zero.
    pub plcc: Option<f64>,
    pub n: usize,
}

impl RegressionFit {
    /// Coefficient of determination of the fitted line.
    pub fn r_squared(&self) -> Option<f64> {
        self.plcc.map(|p| p * p)
    }

    pub fn predict(&self, rate_diff: f64) -> f64 {
        self.k * rate_diff + self.b
    }
}

impl fmt::Display for RegressionFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={:.6} b={:.6} plcc=", self.k, self.b)?;
        match self.plcc {
            Some(p) => write!(f, "{p:.6}")?,
            None => write!(f, "n/a")?,
        }
        write!(f, " n={}", self.n)
    }
}

/// Why a sample set could not be fitted. Callers keep whatever estimate
/// they had before.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unfittable {
    TooFewSamples(usize),
    ZeroVariance,
    NonFinite,
}

impl fmt::Display for Unfittable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unfittable::TooFewSamples(n) => write!(f, "only {n} samples"),
            Unfittable::ZeroVariance => write!(f, "rate difference has zero variance"),
            Unfittable::NonFinite => write!(f, "non-finite sample"),
        }
    }
}

pub type FitOutcome = Result<RegressionFit, Unfittable>;

struct Moments {
    n: usize,
    sxx: f64,
    syy: f64,
    sxy: f64,
    mean_x: f64,
    mean_y: f64,
}

fn moments(samples: &[Sample]) -> Result<Moments, Unfittable> {
    let n = samples.len();
    if n < 2 {
        return Err(Unfittable::TooFewSamples(n));
    }
    if !samples.iter().all(Sample::is_finite) {
        return Err(Unfittable::NonFinite);
    }
    let nf = n as f64;
    let mean_x = samples.iter().map(|s| s.rate_diff).sum::<f64>() / nf;
    let mean_y = samples.iter().map(|s| s.delta_rtt).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for s in samples {
        let dx = s.rate_diff - mean_x;
        let dy = s.delta_rtt - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Ok(Moments {
        n,
        sxx,
        syy,
        sxy,
        mean_x,
        mean_y,
    })
}

fn correlation(m: &Moments) -> Option<f64> {
    if m.sxx <= 0.0 || m.syy <= 0.0 {
        return None;
    }
    Some((m.sxy / (m.sxx.sqrt() * m.syy.sqrt())).clamp(-1.0, 1.0))
}

/// Ordinary least-squares fit of `delta_rtt = k·rate_diff + b`.
pub fn fit_k_b(samples: &[Sample]) -> FitOutcome {
    let m = moments(samples)?;
    if m.sxx <= 0.0 {
        return Err(Unfittable::ZeroVariance);
    }
    let k = m.sxy / m.sxx;
    let b = m.mean_y - k * m.mean_x;
    if !k.is_finite() || !b.is_finite() {
        return Err(Unfittable::NonFinite);
    }
    Ok(RegressionFit {
        k,
        b,
        plcc: correlation(&m),
        n: m.n,
    })
}

/// Pearson linear correlation between `rate_diff` and `delta_rtt`. `None`
/// when either variable is constant or there are fewer than two samples.
pub fn plcc(samples: &[Sample]) -> Option<f64> {
    moments(samples).ok().and_then(|m| correlation(&m))
}

/// Turns time-ordered epoch records into samples by differencing adjacent
/// RTTs: sample `i` pairs `x_i − r_i` with `rtt_i − rtt_{i−1}`.
pub fn samples_from_records(records: &[EpochRecord]) -> Vec<Sample> {
    records
        .windows(2)
        .map(|w| Sample::new(w[1].send_rate - w[1].recv_rate, w[1].rtt - w[0].rtt))
        .collect()
}

/// Fits a recorded trace. Needs at least three records so that two
/// differenced samples exist.
pub fn analyze_trace(records: &[EpochRecord]) -> FitOutcome {
    if records.len() < 3 {
        return Err(Unfittable::TooFewSamples(records.len().saturating_sub(1)));
    }
    fit_k_b(&samples_from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(x: f64, r: f64, rtt: f64) -> EpochRecord {
        EpochRecord {
            index: 0,
            send_rate: x,
            recv_rate: r,
            rtt,
            delta_rtt: 0.0,
            epoch_end_time: 0.0,
        }
    }

    #[test]
    fn exact_line() {
        let s: Vec<_> = (0..20)
            .map(|i| {
                let x = i as f64 * 0.3 - 2.0;
                Sample::new(x, 2.0 * x + 1.0)
            })
            .collect();
        let fit = fit_k_b(&s).unwrap();
        assert!((fit.k - 2.0).abs() < 1e-9);
        assert!((fit.b - 1.0).abs() < 1e-9);
        assert!((fit.plcc.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(fit_k_b(&[]), Err(Unfittable::TooFewSamples(0)));
        assert_eq!(
            fit_k_b(&[Sample::new(1.0, 2.0)]),
            Err(Unfittable::TooFewSamples(1))
        );
        let same: Vec<_> = (0..5).map(|i| Sample::new(0.7, i as f64)).collect();
        assert_eq!(fit_k_b(&same), Err(Unfittable::ZeroVariance));
        assert_eq!(
            fit_k_b(&[Sample::new(1.0, f64::NAN), Sample::new(2.0, 1.0)]),
            Err(Unfittable::NonFinite)
        );
    }

    #[test]
    fn plcc_signs_and_undefined() {
        let up: Vec<_> = (0..10)
            .map(|i| Sample::new(i as f64, 3.0 * i as f64))
            .collect();
        let down: Vec<_> = (0..10)
            .map(|i| Sample::new(i as f64, -0.5 * i as f64))
            .collect();
        assert!((plcc(&up).unwrap() - 1.0).abs() < 1e-12);
        assert!((plcc(&down).unwrap() + 1.0).abs() < 1e-12);
        let flat: Vec<_> = (0..10).map(|i| Sample::new(i as f64, 4.0)).collect();
        assert_eq!(plcc(&flat), None);
        // constant Δrtt still fits, with a flat line
        let fit = fit_k_b(&flat).unwrap();
        assert_eq!(fit.k, 0.0);
        assert_eq!(fit.plcc, None);
    }

    #[test]
    fn differencing() {
        let records = [
            rec(3.0, 3.0, 50.0),
            rec(2.0, 1.0, 60.0),
            rec(1.0, 1.5, 55.0),
        ];
        assert_eq!(
            samples_from_records(&records),
            vec![Sample::new(1.0, 10.0), Sample::new(-0.5, -5.0)]
        );
        assert!(analyze_trace(&records).is_ok());
        assert_eq!(analyze_trace(&[]), Err(Unfittable::TooFewSamples(0)));
        assert_eq!(
            analyze_trace(&records[..2]),
            Err(Unfittable::TooFewSamples(1))
        );
    }
}
