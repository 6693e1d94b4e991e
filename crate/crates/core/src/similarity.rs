//! Positional ESEC similarity and similarity matrices.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event_chain::{EventChain, ROWS};

const SQRT_2: f64 = core::f64::consts::SQRT_2;
const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilarityConfig {
    /// Divide each cell difference by sqrt(3) so that Sim lies in [0, 100].
    pub normalize: bool,
    /// Clamp negative similarities to 0.
    pub clamp_nonnegative: bool,
}

/// Number of differing sub-tables (0 to 3) at one cell, with padding by the
/// last column.
fn cell_mismatch<A, B>(a: &A, na: usize, b: &B, nb: usize, col: usize, row: usize) -> usize
where
    A: EventChain + ?Sized,
    B: EventChain + ?Sized,
{
    let x = a.cell(col.min(na - 1), row);
    let y = b.cell(col.min(nb - 1), row);
    usize::from(x.0 != y.0) + usize::from(x.1 != y.1) + usize::from(x.2 != y.2)
}

/// Similarity (percent) of the first `limit` columns of `a` and `b`, or of
/// the full tables when `limit` is `None`.
///
/// The shorter table is padded by repeating its last column.
pub fn prefix_similarity<A, B>(
    a: &A,
    b: &B,
    limit: Option<usize>,
    cfg: &SimilarityConfig,
) -> Result<f64>
where
    A: EventChain + ?Sized,
    B: EventChain + ?Sized,
{
    let clip = |n: usize| limit.map_or(n, |k| n.min(k));
    let (na, nb) = (clip(a.column_count()), clip(b.column_count()));
    if na == 0 || nb == 0 {
        return Err(Error::EmptyChain);
    }
    let p = na.max(nb);
    // Counting mismatch levels keeps the sum independent of argument order.
    let mut counts = [0usize; 4];
    for col in 0..p {
        for row in 0..ROWS {
            counts[cell_mismatch(a, na, b, nb, col, row)] += 1;
        }
    }
    let mut total = counts[1] as f64 + counts[2] as f64 * SQRT_2 + counts[3] as f64 * SQRT_3;
    if cfg.normalize {
        total /= SQRT_3;
    }
    let dis = total / (ROWS * p) as f64;
    let sim = (1.0 - dis) * 100.0;
    Ok(if cfg.clamp_nonnegative {
        sim.max(0.0)
    } else {
        sim
    })
}

/// Similarity (percent) of two event chains.
pub fn esec_similarity<A, B>(a: &A, b: &B, cfg: &SimilarityConfig) -> Result<f64>
where
    A: EventChain + ?Sized,
    B: EventChain + ?Sized,
{
    prefix_similarity(a, b, None, cfg)
}

/// Square, symmetric similarity matrix with item labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub labels: Vec<String>,
    /// Row-major `n x n` values.
    pub values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Assemble from the upper triangle (row-major, excluding the diagonal);
    /// the diagonal is 100.
    pub fn from_upper(labels: Vec<String>, upper: &[f64]) -> Result<Self> {
        let n = labels.len();
        check_labels(&labels)?;
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidConfig(alloc::format!(
                "expected {} pair values for {} items, got {}",
                n * n.saturating_sub(1) / 2,
                n,
                upper.len()
            )));
        }
        let mut values = alloc::vec![100.0; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap_or(&0.0);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(SimilarityMatrix { labels, values })
    }

    /// Accepts an arbitrary square matrix after checking symmetry.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        check_labels(&labels)?;
        if values.len() != n * n {
            return Err(Error::InvalidConfig(alloc::format!(
                "matrix is not {n}x{n}"
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(SimilarityMatrix { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Row-major upper-triangle index pairs `(i, j)` with `i < j`.
pub fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// All-pairs similarity, computed once per unordered pair.
pub fn similarity_matrix<T: EventChain>(
    labels: Vec<String>,
    items: &[T],
    cfg: &SimilarityConfig,
) -> Result<SimilarityMatrix> {
    if items.is_empty() {
        return Err(Error::EmptyChain);
    }
    if labels.len() != items.len() {
        return Err(Error::InvalidConfig(
            "label count does not match item count".into(),
        ));
    }
    let upper = upper_pairs(items.len())
        .map(|(i, j)| esec_similarity(&items[i], &items[j], cfg))
        .collect::<Result<Vec<f64>>>()?;
    SimilarityMatrix::from_upper(labels, &upper)
}
