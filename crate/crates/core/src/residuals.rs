//! Residual analysis by time rescaling.
//!
//! Under the true model the rescaled times `sᵢ = Λ*(tᵢ)` form a unit-rate
//! Poisson process, so the gaps `sᵢ - sᵢ₋₁` (with `s₀ = 0`) should look like
//! independent Exp(1) draws. The gaps are tested with a one-sample
//! Kolmogorov–Smirnov test using asymptotic p-values; below 35 gaps the
//! p-value is approximate and the report flags it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::pattern::PointPattern;
use crate::rng::{RngStream, UniformSource};
use crate::state::IntensityState;

/// Sample size below which asymptotic KS p-values are flagged.
pub const SMALL_SAMPLE: usize = 35;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// `P(K > x)` for the Kolmogorov distribution `K`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let p = if x < 1.18 {
        // Theta-function form; the alternating series converges too slowly here.
        let a = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let mut sum = 0.0;
        for k in 1..=100 {
            let odd = (2 * k - 1) as f64;
            let term = (a * odd * odd).exp();
            sum += term;
            if term < 1e-16 {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * sum
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * x * x).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-12 {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// One-sample KS test of `gaps` against Exp(1).
pub fn exp1_ks_test(gaps: &[f64]) -> Result<KsTest> {
    if gaps.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = gaps.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = -(-x.max(0.0)).exp_m1();
            let above = (i + 1) as f64 / n - cdf;
            let below = cdf - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(KsTest {
        statistic,
        p_value: kolmogorov_survival(n.sqrt() * statistic),
    })
}

/// Two-sample KS test with the asymptotic p-value at effective size
/// `n m / (n + m)`.
pub fn two_sample_ks(xs: &[f64], ys: &[f64]) -> Result<KsTest> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut statistic: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n - j as f64 / m).abs());
    }
    let effective = (n * m / (n + m)).sqrt();
    Ok(KsTest {
        statistic,
        p_value: kolmogorov_survival(effective * statistic),
    })
}

/// Two-sample KS on samples pooled from independent replicates, with the
/// p-value calibrated by reassigning whole replicates between the groups.
///
/// Values within a replicate may be dependent (interevent times of a
/// clustered process), which makes the asymptotic p-value of
/// [`two_sample_ks`] on the pooled values far too small. Returns the pooled
/// statistic and `(1 + #{D_perm >= D}) / (1 + permutations)`.
pub fn pooled_ks_replicate_permutation(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    permutations: usize,
    seed: u64,
) -> Result<KsTest> {
    let sizes: Vec<usize> = a.iter().chain(b).map(Vec::len).collect();
    let mut sorted: Vec<(f64, usize)> = a
        .iter()
        .chain(b)
        .enumerate()
        .flat_map(|(r, g)| g.iter().map(move |&x| (x, r)))
        .collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Pooled statistic when replicate r belongs to the first group iff in_a[r].
    let statistic = |in_a: &[bool]| -> Option<f64> {
        let na: usize = sizes
            .iter()
            .zip(in_a)
            .filter(|(_, &f)| f)
            .map(|(s, _)| s)
            .sum();
        let nb = sorted.len() - na;
        if na == 0 || nb == 0 {
            return None;
        }
        let (mut ca, mut cb, mut d) = (0usize, 0usize, 0f64);
        for (k, &(x, r)) in sorted.iter().enumerate() {
            if in_a[r] {
                ca += 1;
            } else {
                cb += 1;
            }
            if sorted.get(k + 1).is_none_or(|next| next.0 != x) {
                d = d.max((ca as f64 / na as f64 - cb as f64 / nb as f64).abs());
            }
        }
        Some(d)
    };

    let mut in_a: Vec<bool> = (0..sizes.len()).map(|r| r < a.len()).collect();
    let observed = statistic(&in_a).ok_or(Error::EmptySample)?;
    let mut rng = RngStream::new(seed);
    let mut exceed = 0usize;
    for _ in 0..permutations {
        for i in (1..in_a.len()).rev() {
            let j = ((rng.uniform() * (i + 1) as f64) as usize).min(i);
            in_a.swap(i, j);
        }
        // An empty group is as extreme as it gets.
        if statistic(&in_a).is_none_or(|d| d >= observed) {
            exceed += 1;
        }
    }
    Ok(KsTest {
        statistic: observed,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
    })
}

fn check_marking(model: &ModelSpec, pattern: &PointPattern) -> Result<()> {
    if model.is_marked() != pattern.is_marked() {
        return Err(Error::MarkMismatch {
            model_marked: model.is_marked(),
            pattern_marked: pattern.is_marked(),
        });
    }
    Ok(())
}

/// Rescaled event times `Λ*(tᵢ)`, each with its own history prefix.
pub fn rescale(model: &ModelSpec, pattern: &PointPattern) -> Result<Vec<f64>> {
    check_marking(model, pattern)?;
    let mut state = IntensityState::new(model);
    let mut out = Vec::with_capacity(pattern.len());
    for event in pattern.events() {
        state.record(event)?;
        out.push(state.compensator());
    }
    Ok(out)
}

/// Gaps `sᵢ - sᵢ₋₁` with `s₀ = 0`.
pub fn rescaled_gaps(rescaled: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    rescaled
        .iter()
        .map(|&s| {
            let g = s - prev;
            prev = s;
            g
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub n: usize,
    pub rescaled_times: Vec<f64>,
    pub interevent_mean: Option<f64>,
    pub interevent_cv: Option<f64>,
    pub ks_statistic: Option<f64>,
    pub ks_p_value: Option<f64>,
    /// `(i, sᵢ - sᵢ₋₁)` for the largest gap, `i` counted from 1.
    pub max_gap: Option<(usize, f64)>,
    /// `Λ*(T) - sₙ`; censored, so excluded from the test.
    pub censored_tail: f64,
    /// Descriptive only; no independence test is performed.
    pub lag1_autocorrelation: Option<f64>,
    /// True when the KS p-value rests on fewer than 35 gaps.
    pub small_sample: bool,
}

impl ResidualReport {
    /// Whether the test fields are defined (at least one event).
    pub fn has_tests(&self) -> bool {
        self.ks_p_value.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn residual_report(model: &ModelSpec, pattern: &PointPattern) -> Result<ResidualReport> {
    check_marking(model, pattern)?;
    let mut state = IntensityState::new(model);
    let mut rescaled = Vec::with_capacity(pattern.len());
    for event in pattern.events() {
        state.record(event)?;
        rescaled.push(state.compensator());
    }
    let censored_tail = state.compensator_at(pattern.t_end())? - state.compensator();
    let gaps = rescaled_gaps(&rescaled);
    let n = gaps.len();

    let interevent_mean = (n > 0).then(|| mean(&gaps));
    let interevent_cv = (n > 1).then(|| {
        let m = mean(&gaps);
        let var = gaps.iter().map(|g| (g - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        var.sqrt() / m
    });
    let lag1_autocorrelation = (n > 2).then(|| {
        let m = mean(&gaps);
        let denom: f64 = gaps.iter().map(|g| (g - m).powi(2)).sum();
        let num: f64 = gaps.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
        num / denom
    });
    let max_gap = gaps
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &g)| match best {
            Some((_, v)) if v >= g => best,
            _ => Some((i + 1, g)),
        });
    let ks = if n > 0 {
        Some(exp1_ks_test(&gaps)?)
    } else {
        None
    };

    Ok(ResidualReport {
        n,
        rescaled_times: rescaled,
        interevent_mean,
        interevent_cv,
        ks_statistic: ks.map(|k| k.statistic),
        ks_p_value: ks.map(|k| k.p_value),
        max_gap,
        censored_tail,
        lag1_autocorrelation,
        small_sample: n < SMALL_SAMPLE,
    })
}
