//! Parallel drivers. Every driver returns the same bytes for any job count:
//! work items are evaluated independently and reduced in input order.

use std::collections::BTreeMap;

use esec_core::chaining::{
    evaluate_sample, next_permutation, validate_mc, validate_table, ActionTiming,
    MonteCarloAccumulator, MonteCarloConfig, MonteCarloStats,
};
use esec_core::event_chain::{build_esec, Esec, EsecConfig, EventChain};
use esec_core::predict::{predict, Prediction, PredictorConfig, ReferenceLibrary};
use esec_core::scene::SceneStream;
use esec_core::similarity::{esec_similarity, upper_pairs, SimilarityConfig, SimilarityMatrix};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thread pool with `jobs` workers; 0 means one per core.
pub fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Format(format!("thread pool: {e}")))
}

pub fn extract_all(streams: &[SceneStream], cfg: &EsecConfig, jobs: usize) -> Result<Vec<Esec>> {
    cfg.validate()?;
    Ok(pool(jobs)?.install(|| streams.par_iter().map(|s| build_esec(s, cfg)).collect()))
}

pub fn similarity_matrix<T: EventChain + Sync>(
    labels: Vec<String>,
    items: &[T],
    cfg: &SimilarityConfig,
    jobs: usize,
) -> Result<SimilarityMatrix> {
    if items.is_empty() {
        return Err(esec_core::Error::EmptyChain.into());
    }
    if labels.len() != items.len() {
        return Err(Error::Format(
            "label count does not match item count".into(),
        ));
    }
    let pairs: Vec<(usize, usize)> = upper_pairs(items.len()).collect();
    let upper = pool(jobs)?.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| esec_similarity(&items[i], &items[j], cfg))
            .collect::<esec_core::error::Result<Vec<f64>>>()
    })?;
    Ok(SimilarityMatrix::from_upper(labels, &upper)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub id: String,
    pub label: String,
    pub prediction: Prediction,
}

impl QueryResult {
    pub fn correct(&self) -> bool {
        self.prediction.class.as_deref() == Some(self.label.as_str())
    }

    /// Predictive power credited to the query: zero unless the class is right.
    pub fn credited_p(&self) -> f64 {
        if self.correct() {
            self.prediction.p
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: String,
    pub queries: usize,
    pub correct: usize,
    pub undecided: usize,
    pub error_rate: f64,
    pub mean_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub results: Vec<QueryResult>,
    pub classes: Vec<ClassSummary>,
    /// Counts keyed by true class, then predicted class (`none` when the
    /// margin was never reached).
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
}

impl BenchReport {
    pub fn accuracy(&self) -> f64 {
        let correct = self.results.iter().filter(|r| r.correct()).count();
        correct as f64 / self.results.len().max(1) as f64
    }

    pub fn class(&self, name: &str) -> Option<&ClassSummary> {
        self.classes.iter().find(|c| c.class == name)
    }

    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.classes {
            w.serialize(c)?;
        }
        into_string(w)
    }

    pub fn confusion_csv(&self) -> Result<String> {
        let mut predicted: Vec<&str> = self.confusion.keys().map(String::as_str).collect();
        predicted.push("none");
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["true"];
        header.extend(&predicted);
        w.write_record(&header)?;
        for (truth, row) in &self.confusion {
            let mut rec = vec![truth.clone()];
            rec.extend(
                predicted
                    .iter()
                    .map(|p| row.get(*p).copied().unwrap_or(0).to_string()),
            );
            w.write_record(&rec)?;
        }
        into_string(w)
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Leave-self-out prediction of every labelled item against all others.
pub fn bench_predict<T: EventChain + Sync>(
    items: &[(String, T)],
    cfg: &PredictorConfig,
    jobs: usize,
) -> Result<BenchReport> {
    cfg.validate()?;
    let mut library = ReferenceLibrary::new();
    let mut labels = Vec::with_capacity(items.len());
    for (id, chain) in items {
        let label = chain
            .label()
            .ok_or_else(|| Error::Format(format!("{id}: chain has no label")))?
            .to_string();
        library.insert(label.clone(), id.clone(), RefChain(chain));
        labels.push(label);
    }
    let predictions = pool(jobs)?.install(|| {
        items
            .par_iter()
            .map(|(id, chain)| predict(chain, Some(id), &library, cfg))
            .collect::<esec_core::error::Result<Vec<_>>>()
    })?;
    let results: Vec<QueryResult> = items
        .iter()
        .zip(labels)
        .zip(predictions)
        .map(|(((id, _), label), prediction)| QueryResult {
            id: id.clone(),
            label,
            prediction,
        })
        .collect();
    Ok(summarize(results))
}

/// Borrowed chain usable as a library exemplar.
struct RefChain<'a, T>(&'a T);

impl<T: EventChain> EventChain for RefChain<'_, T> {
    fn column_count(&self) -> usize {
        self.0.column_count()
    }
    fn cell(
        &self,
        column: usize,
        row: usize,
    ) -> (
        esec_core::TnRelation,
        esec_core::SsrRelation,
        esec_core::DsrRelation,
    ) {
        self.0.cell(column, row)
    }
    fn column_time(&self, column: usize) -> f64 {
        self.0.column_time(column)
    }
    fn span(&self) -> (f64, f64) {
        self.0.span()
    }
    fn label(&self) -> Option<&str> {
        self.0.label()
    }
}

fn summarize(results: Vec<QueryResult>) -> BenchReport {
    let mut classes: BTreeMap<String, ClassSummary> = BTreeMap::new();
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for r in &results {
        let c = classes
            .entry(r.label.clone())
            .or_insert_with(|| ClassSummary {
                class: r.label.clone(),
                queries: 0,
                correct: 0,
                undecided: 0,
                error_rate: 0.0,
                mean_p: 0.0,
            });
        c.queries += 1;
        c.correct += usize::from(r.correct());
        c.undecided += usize::from(r.prediction.class.is_none());
        *sums.entry(r.label.clone()).or_insert(0.0) += r.credited_p();
        let predicted = r.prediction.class.clone().unwrap_or_else(|| "none".into());
        *confusion
            .entry(r.label.clone())
            .or_default()
            .entry(predicted)
            .or_insert(0) += 1;
    }
    let classes = classes
        .into_values()
        .map(|mut c| {
            let n = c.queries as f64;
            c.error_rate = (c.queries - c.correct) as f64 / n;
            c.mean_p = sums[&c.class] / n;
            c
        })
        .collect();
    BenchReport {
        results,
        classes,
        confusion,
    }
}

/// Mean completion and chain P of one ordering across all base samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationSummary {
    pub order: String,
    pub mean_completion: f64,
    pub mean_p_chain: f64,
}

/// Base samples evaluated per parallel batch.
const BATCH: usize = 512;

/// Monte-Carlo evaluation; identical to the sequential core routine for any
/// job count.
pub fn monte_carlo(
    table: &[ActionTiming],
    cfg: &MonteCarloConfig,
    jobs: usize,
) -> Result<(MonteCarloStats, Vec<PermutationSummary>)> {
    validate_table(table)?;
    validate_mc(cfg)?;
    let pool = pool(jobs)?;
    let mut acc = MonteCarloAccumulator::new(cfg.bin_width);
    let mut perm_c: Vec<f64> = Vec::new();
    let mut perm_p: Vec<f64> = Vec::new();
    let n = cfg.base_samples;
    for lo in (0..n).step_by(BATCH) {
        let hi = (lo + BATCH).min(n);
        let outcomes: Vec<_> = pool.install(|| {
            (lo..hi)
                .into_par_iter()
                .map(|i| evaluate_sample(table, cfg.mode, cfg.seed, i as u64))
                .collect()
        });
        for o in &outcomes {
            acc.add(o);
            if perm_c.is_empty() {
                perm_c = vec![0.0; o.completion.len()];
                perm_p = vec![0.0; o.p_chain.len()];
            }
            for (s, c) in perm_c.iter_mut().zip(&o.completion) {
                *s += c;
            }
            for (s, p) in perm_p.iter_mut().zip(&o.p_chain) {
                *s += p;
            }
        }
    }
    let mut order: Vec<usize> = (0..table.len()).collect();
    let mut perms = Vec::with_capacity(perm_c.len());
    for k in 0..perm_c.len() {
        perms.push(PermutationSummary {
            order: order
                .iter()
                .map(|&a| table[a].name.as_str())
                .collect::<Vec<_>>()
                .join(">"),
            mean_completion: perm_c[k] / n as f64,
            mean_p_chain: perm_p[k] / n as f64,
        });
        next_permutation(&mut order);
    }
    Ok((acc.finish(), perms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use esec_core::chaining::{human_timings, PredictionMode};

    #[test]
    fn parallel_monte_carlo_matches_the_sequential_routine() {
        let cfg = MonteCarloConfig {
            base_samples: 700,
            seed: 9,
            mode: PredictionMode::Esec,
            bin_width: 1.0,
        };
        let seq = esec_core::monte_carlo(&human_timings(), &cfg).unwrap();
        let (par, perms) = monte_carlo(&human_timings(), &cfg, 4).unwrap();
        assert_eq!(seq, par);
        assert_eq!(perms.len(), 120);
        assert_eq!(perms[0].order, "take_down>put_on_top>shake>push>hide");
    }

    #[test]
    fn permutation_means_average_to_the_overall_mean() {
        let cfg = MonteCarloConfig {
            base_samples: 50,
            ..MonteCarloConfig::default()
        };
        let (stats, perms) = monte_carlo(&human_timings(), &cfg, 2).unwrap();
        let mean = perms.iter().map(|p| p.mean_completion).sum::<f64>() / 120.0;
        assert!((mean - stats.mean).abs() < 1e-9);
    }
}
