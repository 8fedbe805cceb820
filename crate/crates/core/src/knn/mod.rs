//! Exact k-th nearest neighbour distances.
//!
//! Neighbours are ordered by `(squared distance, index)`, so ties at equal
//! distance resolve to the lower point index. Squared distances accumulate
//! coordinate differences in fixed order, which makes the brute-force and
//! tree engines agree bit for bit.

mod tree;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::linalg::SampleMatrix;

pub use tree::KdTree;

/// Row `i` holds the distances from point `i` to its 1st..k-th neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborDistances {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl NeighborDistances {
    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    /// Distances to the k-th neighbour, one per point.
    pub fn kth(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, self.k - 1)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    BruteForce,
    #[default]
    Tree,
}

impl std::str::FromStr for Engine {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" | "brute-force" | "bruteforce" => Ok(Engine::BruteForce),
            "tree" | "kd-tree" | "kdtree" => Ok(Engine::Tree),
            _ => domain(format!("unknown engine {s:?}; expected tree or brute")),
        }
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Bounded candidate list of the `k` best `(d², index)` pairs seen so far,
/// kept sorted ascending.
pub(crate) struct Candidates {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl Candidates {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    /// Current k-th best squared distance, `+∞` until the list is full.
    pub(crate) fn worst(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].0
        }
    }

    pub(crate) fn offer(&mut self, d2: f64, idx: usize) {
        let key = (d2, idx);
        if self.items.len() == self.k {
            let last = self.items[self.k - 1];
            if !less(key, last) {
                return;
            }
            self.items.pop();
        }
        let pos = self.items.partition_point(|&it| less(it, key));
        self.items.insert(pos, key);
    }

    fn write_distances(&self, out: &mut [f64]) {
        for (o, (d2, _)) in out.iter_mut().zip(&self.items) {
            *o = d2.sqrt();
        }
    }
}

fn less(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn check_k(x: &SampleMatrix, k: usize) -> Result<()> {
    if k == 0 || k >= x.nrows() {
        return domain(format!(
            "neighbour order k must satisfy 1 <= k <= N - 1 = {}, got {k}",
            x.nrows() - 1
        ));
    }
    Ok(())
}

fn collect_rows(n: usize, k: usize, query: impl Fn(usize) -> Candidates + Sync) -> NeighborDistances {
    let mut data = vec![0.0; n * k];
    data.par_chunks_mut(k)
        .enumerate()
        .for_each(|(i, out)| query(i).write_distances(out));
    NeighborDistances { n, k, data }
}

/// All-pairs computation, `O(N² m)`.
pub fn knn_distances_bruteforce(x: &SampleMatrix, k: usize) -> Result<NeighborDistances> {
    check_k(x, k)?;
    Ok(collect_rows(x.nrows(), k, |i| {
        let xi = x.row(i);
        let mut cand = Candidates::new(k);
        for j in (0..x.nrows()).filter(|&j| j != i) {
            cand.offer(squared_distance(xi, x.row(j)), j);
        }
        cand
    }))
}

/// Same output as [`knn_distances_bruteforce`] through a median-split kd-tree.
pub fn knn_distances_tree(x: &SampleMatrix, k: usize) -> Result<NeighborDistances> {
    check_k(x, k)?;
    let tree = KdTree::build(x);
    Ok(collect_rows(x.nrows(), k, |i| tree.query_excluding(x.row(i), i, k)))
}

pub fn knn_distances(x: &SampleMatrix, k: usize, engine: Engine) -> Result<NeighborDistances> {
    match engine {
        Engine::BruteForce => knn_distances_bruteforce(x, k),
        Engine::Tree => knn_distances_tree(x, k),
    }
}
