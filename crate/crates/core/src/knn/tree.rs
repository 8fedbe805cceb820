//! Static kd-tree with median splits on the axis of largest spread.

use super::{squared_distance, Candidates};
use crate::linalg::SampleMatrix;

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Points below a split have `x[axis] <= value`, points above `x[axis] >= value`.
#[derive(Debug, Clone)]
pub struct KdTree<'a> {
    points: &'a SampleMatrix,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub fn build(points: &'a SampleMatrix) -> Self {
        let mut tree = Self {
            points,
            order: (0..points.nrows()).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, points.nrows());
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(start, end);
        let pts = self.points;
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts.row(a)[axis].total_cmp(&pts.row(b)[axis])
        });
        let value = pts.row(self.order[mid])[axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn widest_axis(&self, start: usize, end: usize) -> usize {
        let m = self.points.ncols();
        let mut best = (0, f64::NEG_INFINITY);
        for axis in 0..m {
            let (lo, hi) = self.order[start..end]
                .iter()
                .map(|&i| self.points.row(i)[axis])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            if hi - lo > best.1 {
                best = (axis, hi - lo);
            }
        }
        best.0
    }

    /// The `k` nearest points to `query` other than point `skip`.
    pub(crate) fn query_excluding(&self, query: &[f64], skip: usize, k: usize) -> Candidates {
        let mut cand = Candidates::new(k);
        self.search(0, query, skip, &mut cand);
        cand
    }

    fn search(&self, node: usize, query: &[f64], skip: usize, cand: &mut Candidates) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j != skip {
                        cand.offer(squared_distance(query, self.points.row(j)), j);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, skip, cand);
                // Every point on the far side is at least |diff| away along
                // `axis`; an equal bound may still win a tie on index.
                if diff * diff <= cand.worst() {
                    self.search(far, query, skip, cand);
                }
            }
        }
    }
}
