//! Agglomerative clustering of similarity matrices.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Single,
    Complete,
}

/// One merge step. Nodes `0..n` are leaves, node `n + k` is merge `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub labels: Vec<String>,
    pub merges: Vec<Merge>,
}

/// Nested view of a dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Merge {
        left: Box<TreeNode>,
        right: Box<TreeNode>,
        height: f64,
    },
    Leaf {
        label: String,
    },
}

/// Cluster on the distance `1 - Sim/100`.
///
/// Ties between equally close cluster pairs merge the pair with the smallest
/// node indices first.
pub fn cluster(matrix: &SimilarityMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptyChain);
    }
    for i in 0..n {
        for j in i + 1..n {
            if matrix.get(i, j) != matrix.get(j, i) {
                return Err(Error::NotSymmetric(i, j));
            }
        }
    }
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 1.0 - matrix.get(i, j) / 100.0).collect())
        .collect();
    // Active clusters: (node id, size), indexed like `dist`.
    let mut active: Vec<Option<(usize, usize)>> = (0..n).map(|i| Some((i, 1))).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if active[i].is_none() {
                continue;
            }
            for j in i + 1..n {
                if active[j].is_none() {
                    continue;
                }
                if best.is_none_or(|(d, _, _)| dist[i][j] < d) {
                    best = Some((dist[i][j], i, j));
                }
            }
        }
        let Some((height, i, j)) = best else { break };
        let ((ni, si), (nj, sj)) = (active[i].unwrap(), active[j].unwrap());
        let (left, right) = if ni < nj { (ni, nj) } else { (nj, ni) };
        merges.push(Merge {
            left,
            right,
            height,
            size: si + sj,
        });
        for k in 0..n {
            if k == i || k == j || active[k].is_none() {
                continue;
            }
            let d = match linkage {
                Linkage::Average => {
                    (si as f64 * dist[i][k] + sj as f64 * dist[j][k]) / (si + sj) as f64
                }
                Linkage::Single => dist[i][k].min(dist[j][k]),
                Linkage::Complete => dist[i][k].max(dist[j][k]),
            };
            dist[i][k] = d;
            dist[k][i] = d;
        }
        active[i] = Some((n + step, si + sj));
        active[j] = None;
    }
    Ok(Dendrogram {
        labels: matrix.labels.clone(),
        merges,
    })
}

impl Dendrogram {
    fn root(&self) -> usize {
        self.labels.len() + self.merges.len() - 1
    }

    fn height(&self, node: usize) -> f64 {
        let n = self.labels.len();
        if node < n {
            0.0
        } else {
            self.merges[node - n].height
        }
    }

    pub fn tree(&self) -> TreeNode {
        self.subtree(self.root())
    }

    fn subtree(&self, node: usize) -> TreeNode {
        let n = self.labels.len();
        if node < n {
            return TreeNode::Leaf {
                label: self.labels[node].clone(),
            };
        }
        let m = &self.merges[node - n];
        TreeNode::Merge {
            left: Box::new(self.subtree(m.left)),
            right: Box::new(self.subtree(m.right)),
            height: m.height,
        }
    }

    /// Newick string with branch lengths equal to height differences.
    pub fn newick(&self) -> String {
        let mut out = String::new();
        self.write_newick(self.root(), &mut out);
        out.push(';');
        out
    }

    fn write_newick(&self, node: usize, out: &mut String) {
        let n = self.labels.len();
        if node < n {
            out.push_str(&newick_label(&self.labels[node]));
            return;
        }
        let m = self.merges[node - n];
        out.push('(');
        for (k, child) in [m.left, m.right].into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            self.write_newick(child, out);
            let _ = write!(out, ":{}", m.height - self.height(child));
        }
        out.push(')');
    }

    /// Flat clusters joined by merges at height `<= threshold`, each sorted by
    /// leaf index and ordered by their first leaf.
    pub fn cut(&self, threshold: f64) -> Vec<Vec<usize>> {
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n + self.merges.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (k, m) in self.merges.iter().enumerate() {
            if m.height <= threshold {
                for child in [m.left, m.right] {
                    let r = find(&mut parent, child);
                    parent[r] = n + k;
                }
            }
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for leaf in 0..n {
            let r = find(&mut parent, leaf);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, g)) => g.push(leaf),
                None => groups.push((r, vec![leaf])),
            }
        }
        groups.into_iter().map(|(_, g)| g).collect()
    }

    /// Like [`Dendrogram::cut`], with labels instead of indices.
    pub fn cut_labels(&self, threshold: f64) -> Vec<Vec<String>> {
        self.cut(threshold)
            .into_iter()
            .map(|g| g.into_iter().map(|i| self.labels[i].clone()).collect())
            .collect()
    }
}

fn newick_label(label: &str) -> String {
    if label.chars().any(|c| "()[]':;, \t".contains(c)) {
        alloc::format!("'{}'", label.replace('\'', "''"))
    } else {
        label.into()
    }
}
