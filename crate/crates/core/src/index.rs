//! Static kd-tree over a flat, row-major coordinate buffer.
//!
//! The tree only prunes; every candidate is re-tested with the exact predicate,
//! so query results are identical to a linear scan.

use crate::geometry::distance;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        lower: Box<Node>,
        upper: Box<Node>,
        bbox_lo: Vec<f64>,
        bbox_hi: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    order: Vec<usize>,
    root: Option<Node>,
}

impl KdTree {
    pub fn build(positions: &[f64], dim: usize) -> Self {
        let count = positions.len().checked_div(dim).unwrap_or(0);
        let mut order: Vec<usize> = (0..count).collect();
        let root = if count == 0 {
            None
        } else {
            Some(build_node(positions, dim, &mut order, 0, count))
        };
        Self { dim, order, root }
    }

    /// Indices `i` with `|y_i - center| <= radius`, ascending.
    pub fn within_ball(&self, positions: &[f64], center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            self.ball_rec(root, positions, center, radius, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Indices `i` with `lo[j] <= y_ij < hi[j]` for every coordinate, ascending.
    pub fn within_box(&self, positions: &[f64], lo: &[f64], hi: &[f64]) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            self.box_rec(root, positions, lo, hi, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn point<'a>(&self, positions: &'a [f64], i: usize) -> &'a [f64] {
        &positions[i * self.dim..(i + 1) * self.dim]
    }

    fn ball_rec(&self, node: &Node, pos: &[f64], c: &[f64], r: f64, out: &mut Vec<usize>) {
        match node {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start..*end] {
                    if distance(self.point(pos, i), c) <= r {
                        out.push(i);
                    }
                }
            }
            Node::Split {
                lower,
                upper,
                bbox_lo,
                bbox_hi,
            } => {
                let gap2: f64 = c
                    .iter()
                    .zip(bbox_lo.iter().zip(bbox_hi))
                    .map(|(&x, (&lo, &hi))| {
                        let d = if x < lo {
                            lo - x
                        } else if x > hi {
                            x - hi
                        } else {
                            0.0
                        };
                        d * d
                    })
                    .sum();
                // Slack so rounding in the squared form never prunes a boundary atom.
                if gap2 > r * r * (1.0 + 1e-9) + f64::MIN_POSITIVE {
                    return;
                }
                self.ball_rec(lower, pos, c, r, out);
                self.ball_rec(upper, pos, c, r, out);
            }
        }
    }

    fn box_rec(&self, node: &Node, pos: &[f64], lo: &[f64], hi: &[f64], out: &mut Vec<usize>) {
        match node {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start..*end] {
                    let y = self.point(pos, i);
                    if y.iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(&v, (&a, &b))| a <= v && v < b)
                    {
                        out.push(i);
                    }
                }
            }
            Node::Split {
                lower,
                upper,
                bbox_lo,
                bbox_hi,
            } => {
                let disjoint = (0..self.dim).any(|j| bbox_hi[j] < lo[j] || bbox_lo[j] >= hi[j]);
                if disjoint {
                    return;
                }
                self.box_rec(lower, pos, lo, hi, out);
                self.box_rec(upper, pos, lo, hi, out);
            }
        }
    }
}

fn build_node(pos: &[f64], dim: usize, order: &mut [usize], start: usize, end: usize) -> Node {
    if end - start <= LEAF_SIZE {
        return Node::Leaf { start, end };
    }
    let mut bbox_lo = vec![f64::INFINITY; dim];
    let mut bbox_hi = vec![f64::NEG_INFINITY; dim];
    for &i in &order[start..end] {
        for j in 0..dim {
            let v = pos[i * dim + j];
            bbox_lo[j] = bbox_lo[j].min(v);
            bbox_hi[j] = bbox_hi[j].max(v);
        }
    }
    let axis = (0..dim)
        .max_by(|&a, &b| (bbox_hi[a] - bbox_lo[a]).total_cmp(&(bbox_hi[b] - bbox_lo[b])))
        .unwrap_or(0);
    let mid = start + (end - start) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        pos[a * dim + axis].total_cmp(&pos[b * dim + axis])
    });
    let lower = build_node(pos, dim, order, start, mid);
    let upper = build_node(pos, dim, order, mid, end);
    Node::Split {
        lower: Box::new(lower),
        upper: Box::new(upper),
        bbox_lo,
        bbox_hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn queries_match_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dim = 3;
        let count = 2000;
        // Quantised coordinates so that many atoms sit exactly on query boundaries.
        let pos: Vec<f64> = (0..count * dim)
            .map(|_| f64::from(rng.gen_range(-8..8)) / 4.0)
            .collect();
        let tree = KdTree::build(&pos, dim);
        for _ in 0..50 {
            let c: Vec<f64> = (0..dim)
                .map(|_| f64::from(rng.gen_range(-8..8)) / 4.0)
                .collect();
            let r = f64::from(rng.gen_range(1..8)) / 4.0;
            let scan: Vec<usize> = (0..count)
                .filter(|&i| distance(&pos[i * dim..(i + 1) * dim], &c) <= r)
                .collect();
            assert_eq!(tree.within_ball(&pos, &c, r), scan);

            let hi: Vec<f64> = c.iter().map(|v| v + r).collect();
            let scan: Vec<usize> = (0..count)
                .filter(|&i| (0..dim).all(|j| c[j] <= pos[i * dim + j] && pos[i * dim + j] < hi[j]))
                .collect();
            assert_eq!(tree.within_box(&pos, &c, &hi), scan);
        }
    }

    #[test]
    fn empty_tree() {
        let tree = KdTree::build(&[], 2);
        assert!(tree.within_ball(&[], &[0.0, 0.0], 1.0).is_empty());
    }
}
