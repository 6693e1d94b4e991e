//! Causal column-by-column action prediction.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event_chain::EventChain;
use crate::similarity::{prefix_similarity, SimilarityConfig};

/// Labelled exemplars grouped by action class.
#[derive(Debug, Clone)]
pub struct ReferenceLibrary<T> {
    classes: BTreeMap<String, Vec<(String, T)>>,
}

impl<T> Default for ReferenceLibrary<T> {
    fn default() -> Self {
        ReferenceLibrary {
            classes: BTreeMap::new(),
        }
    }
}

impl<T: EventChain> ReferenceLibrary<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add an exemplar; `id` identifies it for leave-self-out.
    pub fn insert(&mut self, class: impl Into<String>, id: impl Into<String>, chain: T) {
        self.classes
            .entry(class.into())
            .or_default()
            .push((id.into(), chain));
    }

    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    pub fn exemplars(&self, class: &str) -> &[(String, T)] {
        self.classes.get(class).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.classes.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Convert every exemplar, keeping classes and ids.
    pub fn map<U: EventChain>(&self, mut f: impl FnMut(&T) -> U) -> ReferenceLibrary<U> {
        ReferenceLibrary {
            classes: self
                .classes
                .iter()
                .map(|(c, v)| {
                    (
                        c.clone(),
                        v.iter().map(|(id, t)| (id.clone(), f(t))).collect(),
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictorConfig {
    pub refs_per_class: usize,
    /// Required lead of the best class mean over the runner-up (Sim points).
    pub margin: f64,
    pub seed: u64,
    /// Consecutive columns the margin must hold before firing.
    pub persistence: usize,
    pub similarity: SimilarityConfig,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            refs_per_class: 20,
            margin: 20.0,
            seed: 0,
            persistence: 1,
            similarity: SimilarityConfig::default(),
        }
    }
}

impl PredictorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.refs_per_class == 0 {
            return Err(Error::InvalidConfig(
                "refs_per_class must be at least 1".into(),
            ));
        }
        if self.margin.is_nan() || self.margin <= 0.0 {
            return Err(Error::InvalidConfig("margin must be positive".into()));
        }
        if self.persistence == 0 {
            return Err(Error::InvalidConfig(
                "persistence must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: Option<String>,
    /// Index of the column at which the prediction fired.
    pub column: Option<usize>,
    /// Prediction moment, seconds from the action start.
    pub t: f64,
    /// Action duration (s).
    pub tot: f64,
    /// Predictive power (percent).
    pub p: f64,
    /// Class order of the trace.
    pub classes: Vec<String>,
    /// Per-column class-mean similarities, up to the firing column.
    pub trace: Vec<Vec<f64>>,
}

/// `(1 - t / tot) * 100`.
pub fn predictive_power(t: f64, tot: f64) -> Result<f64> {
    if tot.is_nan() || tot <= 0.0 || !(0.0..=tot).contains(&t) {
        return Err(Error::InvalidMoment { t, tot });
    }
    Ok((1.0 - t / tot) * 100.0)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Draw the per-class reference sample for one query.
///
/// Exemplars whose id equals `exclude` are left out. Classes with at least
/// `refs_per_class` candidates are sampled without replacement, others with
/// replacement. The draw depends only on the seed and the excluded id.
pub fn sample_references<'a, T: EventChain>(
    library: &'a ReferenceLibrary<T>,
    exclude: Option<&str>,
    cfg: &PredictorConfig,
) -> Vec<(&'a str, Vec<&'a T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(fnv1a(exclude.unwrap_or("")));
    let n = cfg.refs_per_class;
    library
        .classes
        .iter()
        .filter_map(|(class, items)| {
            let pool: Vec<&T> = items
                .iter()
                .filter(|(id, _)| Some(id.as_str()) != exclude)
                .map(|(_, t)| t)
                .collect();
            if pool.is_empty() {
                return None;
            }
            let picked = if pool.len() >= n {
                index::sample(&mut rng, pool.len(), n)
                    .into_iter()
                    .map(|i| pool[i])
                    .collect()
            } else {
                (0..n)
                    .map(|_| pool[rng.random_range(0..pool.len())])
                    .collect()
            };
            Some((class.as_str(), picked))
        })
        .collect()
}

/// Predict the class of `query` as its columns arrive.
///
/// `query_id` is excluded from the reference sample (leave-self-out).
pub fn predict<Q, T>(
    query: &Q,
    query_id: Option<&str>,
    library: &ReferenceLibrary<T>,
    cfg: &PredictorConfig,
) -> Result<Prediction>
where
    Q: EventChain + ?Sized,
    T: EventChain,
{
    cfg.validate()?;
    let n = query.column_count();
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    let refs = sample_references(library, query_id, cfg);
    if refs.len() < 2 {
        return Err(Error::PredictionUndefined(alloc::format!(
            "{} usable class(es); at least 2 are needed",
            refs.len()
        )));
    }
    let (t_start, t_end) = query.span();
    let tot = t_end - t_start;
    let classes: Vec<String> = refs.iter().map(|(c, _)| String::from(*c)).collect();
    let mut trace = Vec::new();
    let mut streak = 0;
    for k in 1..=n {
        let means = refs
            .iter()
            .map(|(_, items)| {
                let mut sum = 0.0;
                for r in items {
                    sum += prefix_similarity(query, *r, Some(k), &cfg.similarity)?;
                }
                Ok(sum / items.len() as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut best = 0;
        for (i, m) in means.iter().enumerate() {
            if *m > means[best] {
                best = i;
            }
        }
        let second = means
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != best)
            .map(|(_, m)| *m)
            .fold(f64::NEG_INFINITY, f64::max);
        trace.push(means.clone());
        if means[best] - second >= cfg.margin {
            streak += 1;
        } else {
            streak = 0;
        }
        if streak >= cfg.persistence {
            let column = k - 1;
            let t = (query.column_time(column) - t_start).clamp(0.0, tot.max(0.0));
            return Ok(Prediction {
                class: Some(classes[best].clone()),
                column: Some(column),
                t,
                tot,
                p: predictive_power(t, tot)?,
                classes,
                trace,
            });
        }
    }
    Ok(Prediction {
        class: None,
        column: None,
        t: tot,
        tot,
        p: 0.0,
        classes,
        trace,
    })
}
