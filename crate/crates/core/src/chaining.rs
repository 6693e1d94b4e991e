//! Two-agent predictive action chaining and its Monte-Carlo evaluation.
//!
//! Two agents alternate over a sequence of actions. Action `k + 1` may start
//! once action `k` has been recognized (its prediction moment) and once the
//! same agent has finished its own previous action `k - 1`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Duration and prediction-moment statistics of one action (seconds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionTiming {
    pub name: String,
    pub dur_mean: f64,
    pub dur_sd: f64,
    pub esec_mean: f64,
    pub esec_sd: f64,
    pub sec_mean: f64,
    pub sec_sd: f64,
}

impl ActionTiming {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.dur_mean,
            self.dur_sd,
            self.esec_mean,
            self.esec_sd,
            self.sec_mean,
            self.sec_sd,
        ]
        .iter()
        .all(|v| v.is_finite());
        let bad = |what: &str| {
            Err(Error::InvalidTiming(alloc::format!(
                "{}: {what}",
                self.name
            )))
        };
        if !finite {
            return bad("non-finite value");
        }
        if self.dur_mean <= 0.0 || self.esec_mean <= 0.0 || self.sec_mean <= 0.0 {
            return bad("means must be positive");
        }
        if self.esec_mean > self.dur_mean || self.sec_mean > self.dur_mean {
            return bad("prediction mean exceeds duration mean");
        }
        if self.dur_sd < 0.0 || self.esec_sd < 0.0 || self.sec_sd < 0.0 {
            return bad("negative standard deviation");
        }
        Ok(())
    }

    fn pred_stats(&self, mode: PredictionMode) -> Option<(f64, f64)> {
        match mode {
            PredictionMode::Esec => Some((self.esec_mean, self.esec_sd)),
            PredictionMode::Sec => Some((self.sec_mean, self.sec_sd)),
            PredictionMode::None => None,
        }
    }
}

/// Human demonstration statistics of the five chained actions.
pub fn human_timings() -> Vec<ActionTiming> {
    let row = |name: &str, d: (f64, f64), e: (f64, f64), s: (f64, f64)| ActionTiming {
        name: name.into(),
        dur_mean: d.0,
        dur_sd: d.1,
        esec_mean: e.0,
        esec_sd: e.1,
        sec_mean: s.0,
        sec_sd: s.1,
    };
    alloc::vec![
        row("take_down", (11.7, 2.9), (3.3, 0.7), (3.3, 0.7)),
        row("put_on_top", (12.0, 2.1), (8.0, 1.9), (9.2, 1.7)),
        row("shake", (12.5, 2.1), (6.5, 1.2), (10.8, 1.7)),
        row("push", (12.7, 1.9), (5.0, 1.1), (10.0, 1.6)),
        row("hide", (13.8, 2.5), (8.3, 1.6), (10.3, 1.5)),
    ]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionMode {
    #[default]
    Esec,
    Sec,
    /// No prediction: the next action waits for completion.
    None,
}

impl core::str::FromStr for PredictionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "esec" => Ok(PredictionMode::Esec),
            "sec" => Ok(PredictionMode::Sec),
            "none" => Ok(PredictionMode::None),
            other => Err(Error::InvalidConfig(alloc::format!(
                "unknown prediction mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    /// 0 for the first agent, 1 for the second.
    pub agent: usize,
    pub start: f64,
    pub end: f64,
    /// Absolute time at which this action is recognized.
    pub prediction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTimeline {
    pub steps: Vec<ChainStep>,
    pub completion: f64,
    pub total_unchained: f64,
    pub savings: f64,
    pub p_chain: f64,
}

/// Completion time of a chain given `(duration, prediction moment)` pairs.
///
/// Allocation-free kernel shared by [`schedule_chain`] and the Monte-Carlo
/// loop; `starts` and `ends` receive the per-action times.
fn schedule_into(steps: &[(f64, f64)], starts: &mut [f64], ends: &mut [f64]) -> f64 {
    let mut completion: f64 = 0.0;
    for (k, &(dur, _)) in steps.iter().enumerate() {
        let start = match k {
            0 => 0.0,
            1 => starts[0] + steps[0].1,
            _ => (starts[k - 1] + steps[k - 1].1).max(ends[k - 2]),
        };
        starts[k] = start;
        ends[k] = start + dur;
        completion = completion.max(ends[k]);
    }
    completion
}

/// Schedule `(name, duration, prediction moment)` triples on two alternating
/// agents.
pub fn schedule_chain(steps: &[(String, f64, f64)]) -> Result<ChainTimeline> {
    if steps.is_empty() {
        return Err(Error::InvalidTiming("empty chain".into()));
    }
    for (k, (name, dur, pred)) in steps.iter().enumerate() {
        if !(dur.is_finite() && *dur > 0.0 && pred.is_finite() && *pred > 0.0) {
            return Err(Error::InvalidTiming(alloc::format!(
                "{name}: duration and prediction must be positive"
            )));
        }
        if pred > dur {
            return Err(Error::PredictionAfterEnd { index: k });
        }
    }
    let pairs: Vec<(f64, f64)> = steps.iter().map(|(_, d, p)| (*d, *p)).collect();
    let mut starts = alloc::vec![0.0; steps.len()];
    let mut ends = alloc::vec![0.0; steps.len()];
    let completion = schedule_into(&pairs, &mut starts, &mut ends);
    let total: f64 = pairs.iter().map(|(d, _)| d).sum();
    Ok(ChainTimeline {
        steps: steps
            .iter()
            .enumerate()
            .map(|(k, (name, _, pred))| ChainStep {
                name: name.clone(),
                agent: k % 2,
                start: starts[k],
                end: ends[k],
                prediction: starts[k] + pred,
            })
            .collect(),
        completion,
        total_unchained: total,
        savings: total - completion,
        p_chain: (1.0 - completion / total) * 100.0,
    })
}

/// Resolve an action name against a timing table: exact match first, then a
/// unique prefix (`"take"` for `"take_down"`).
pub fn find_timing<'a>(table: &'a [ActionTiming], name: &str) -> Result<&'a ActionTiming> {
    if let Some(t) = table.iter().find(|t| t.name == name) {
        return Ok(t);
    }
    let mut hits = table.iter().filter(|t| t.name.starts_with(name));
    match (hits.next(), hits.next()) {
        (Some(t), None) => Ok(t),
        _ => Err(Error::UnknownAction(name.into())),
    }
}

/// Schedule the named actions using table means.
pub fn schedule_means(
    table: &[ActionTiming],
    order: &[&str],
    mode: PredictionMode,
) -> Result<ChainTimeline> {
    let steps = order
        .iter()
        .map(|name| {
            let t = find_timing(table, name)?;
            t.validate()?;
            let pred = t.pred_stats(mode).map_or(t.dur_mean, |(m, _)| m);
            Ok((t.name.clone(), t.dur_mean, pred))
        })
        .collect::<Result<Vec<_>>>()?;
    schedule_chain(&steps)
}

/// Rejection sample of N(mean, sd) restricted to `(lo, hi]`.
fn truncated_normal<R: Rng>(rng: &mut R, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    if sd > 0.0 {
        if let Ok(normal) = Normal::new(mean, sd) {
            for _ in 0..10_000 {
                let x = normal.sample(rng);
                if x > lo && x <= hi {
                    return x;
                }
            }
        }
    }
    // Degenerate spread or a window far in the tail.
    if mean > lo && mean <= hi {
        mean
    } else {
        hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub base_samples: usize,
    pub seed: u64,
    pub mode: PredictionMode,
    /// Histogram bin width (s).
    pub bin_width: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            base_samples: 10_000,
            seed: 0,
            mode: PredictionMode::Esec,
            bin_width: 1.0,
        }
    }
}

/// Completion time and chain P of every ordering of one base sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub completion: Vec<f64>,
    pub p_chain: Vec<f64>,
}

/// Advance `v` to the next lexicographic permutation; false after the last.
pub fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).unwrap_or(i);
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Draw one base sample (durations and prediction moments) and evaluate
/// every ordering of it.
///
/// The sample depends only on `(seed, index)`: each index owns its own
/// random stream, so samples can be evaluated in any order.
pub fn evaluate_sample(
    table: &[ActionTiming],
    mode: PredictionMode,
    seed: u64,
    index: u64,
) -> SampleOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let draws: Vec<(f64, f64)> = table
        .iter()
        .map(|t| {
            // All three draws are made in every mode so that modes share
            // durations under one seed.
            let dur = truncated_normal(&mut rng, t.dur_mean, t.dur_sd, 0.0, f64::INFINITY);
            let esec = truncated_normal(&mut rng, t.esec_mean, t.esec_sd, 0.0, dur);
            let sec = truncated_normal(&mut rng, t.sec_mean, t.sec_sd, 0.0, dur);
            let pred = match mode {
                PredictionMode::Esec => esec,
                PredictionMode::Sec => sec,
                PredictionMode::None => dur,
            };
            (dur, pred)
        })
        .collect();
    let n = draws.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut steps = alloc::vec![(0.0, 0.0); n];
    let mut starts = alloc::vec![0.0; n];
    let mut ends = alloc::vec![0.0; n];
    let mut out = SampleOutcome {
        completion: Vec::new(),
        p_chain: Vec::new(),
    };
    loop {
        for (slot, &a) in steps.iter_mut().zip(&order) {
            *slot = draws[a];
        }
        let c = schedule_into(&steps, &mut starts, &mut ends);
        // Summed in schedule order so that c == total exactly without prediction.
        let total: f64 = steps.iter().map(|(d, _)| d).sum();
        out.completion.push(c);
        out.p_chain.push((1.0 - c / total) * 100.0);
        if !next_permutation(&mut order) {
            break;
        }
    }
    out
}

/// Running completion-time statistics and histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub cases: u64,
    pub mean: f64,
    pub sd: f64,
    pub mean_p_chain: f64,
    pub min: f64,
    pub max: f64,
    pub bin_width: f64,
    /// Bin index (`floor(completion / bin_width)`) to count.
    pub histogram: BTreeMap<i64, u64>,
}

/// Accumulator fed with samples in index order.
#[derive(Debug, Clone)]
pub struct MonteCarloAccumulator {
    bin_width: f64,
    cases: u64,
    sum: f64,
    sum_sq: f64,
    sum_p: f64,
    min: f64,
    max: f64,
    histogram: BTreeMap<i64, u64>,
}

impl MonteCarloAccumulator {
    pub fn new(bin_width: f64) -> Self {
        MonteCarloAccumulator {
            bin_width,
            cases: 0,
            sum: 0.0,
            sum_sq: 0.0,
            sum_p: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            histogram: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, sample: &SampleOutcome) {
        for (&c, &p) in sample.completion.iter().zip(&sample.p_chain) {
            self.cases += 1;
            self.sum += c;
            self.sum_sq += c * c;
            self.sum_p += p;
            self.min = self.min.min(c);
            self.max = self.max.max(c);
            *self
                .histogram
                .entry(libm::floor(c / self.bin_width) as i64)
                .or_insert(0) += 1;
        }
    }

    pub fn finish(self) -> MonteCarloStats {
        let n = self.cases.max(1) as f64;
        let mean = self.sum / n;
        let var = if self.cases > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        MonteCarloStats {
            cases: self.cases,
            mean,
            sd: libm::sqrt(var),
            mean_p_chain: self.sum_p / n,
            min: self.min,
            max: self.max,
            bin_width: self.bin_width,
            histogram: self.histogram,
        }
    }
}

pub fn validate_table(table: &[ActionTiming]) -> Result<()> {
    if table.is_empty() || table.len() > 8 {
        return Err(Error::InvalidTiming(alloc::format!(
            "table must list 1 to 8 actions, got {}",
            table.len()
        )));
    }
    table.iter().try_for_each(ActionTiming::validate)
}

pub fn validate_mc(cfg: &MonteCarloConfig) -> Result<()> {
    if cfg.base_samples == 0 {
        return Err(Error::InvalidConfig(
            "base_samples must be at least 1".into(),
        ));
    }
    if !(cfg.bin_width > 0.0 && cfg.bin_width.is_finite()) {
        return Err(Error::InvalidConfig("bin_width must be positive".into()));
    }
    Ok(())
}

/// Sequential Monte-Carlo evaluation over all orderings of the table.
pub fn monte_carlo(table: &[ActionTiming], cfg: &MonteCarloConfig) -> Result<MonteCarloStats> {
    validate_table(table)?;
    validate_mc(cfg)?;
    let mut acc = MonteCarloAccumulator::new(cfg.bin_width);
    for i in 0..cfg.base_samples as u64 {
        acc.add(&evaluate_sample(table, cfg.mode, cfg.seed, i));
    }
    Ok(acc.finish())
}
