//! Static k-d tree over unit quaternions in R⁴.
//!
//! Each rotation is stored twice, as `q` and `−q`. The Frobenius distance
//! is an increasing function of the Euclidean distance to the nearer copy,
//! so Euclidean bounds prune the search while candidate scoring uses the
//! exact Frobenius distance.

use crate::so3::{frobenius_to_chordal, quat_distance};

const LEAF_SIZE: usize = 8;

/// Relative and absolute slack when converting a Frobenius radius into a
/// Euclidean pruning radius.
const PRUNE_REL: f64 = 1e-9;
const PRUNE_ABS: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        axis: u8,
        value: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    coords: Vec<[f64; 4]>,
    ids: Vec<u32>,
    nodes: Vec<Node>,
}

fn prune_radius(d: f64) -> f64 {
    let e = frobenius_to_chordal(d);
    if e.is_finite() {
        e * (1.0 + PRUNE_REL) + PRUNE_ABS
    } else {
        f64::INFINITY
    }
}

impl KdTree {
    pub(crate) fn new(points: &[[f64; 4]]) -> Self {
        let mut items: Vec<([f64; 4], u32)> = Vec::with_capacity(points.len() * 2);
        for (i, q) in points.iter().enumerate() {
            items.push((*q, i as u32));
            items.push((q.map(|c| -c), i as u32));
        }
        let mut tree = KdTree {
            coords: Vec::new(),
            ids: Vec::new(),
            nodes: Vec::new(),
        };
        if !items.is_empty() {
            tree.build(&mut items, 0);
        }
        tree.coords = items.iter().map(|(c, _)| *c).collect();
        tree.ids = items.iter().map(|(_, i)| *i).collect();
        tree
    }

    fn build(&mut self, items: &mut [([f64; 4], u32)], offset: usize) -> u32 {
        let id = self.nodes.len() as u32;
        if items.len() <= LEAF_SIZE {
            self.nodes.push(Node::Leaf {
                start: offset as u32,
                end: (offset + items.len()) as u32,
            });
            return id;
        }
        let mut axis = 0;
        let mut widest = -1.0;
        for k in 0..4 {
            let (lo, hi) = items.iter().fold((f64::MAX, f64::MIN), |(lo, hi), (c, _)| {
                (lo.min(c[k]), hi.max(c[k]))
            });
            if hi - lo > widest {
                widest = hi - lo;
                axis = k;
            }
        }
        let mid = items.len() / 2;
        items.select_nth_unstable_by(mid, |a, b| a.0[axis].total_cmp(&b.0[axis]));
        let value = items[mid].0[axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let (lo, hi) = items.split_at_mut(mid);
        let left = self.build(lo, offset);
        let right = self.build(hi, offset + mid);
        self.nodes[id as usize] = Node::Split {
            axis: axis as u8,
            value,
            left,
            right,
        };
        id
    }

    /// Nearest point under the lowest-index tie rule: among all points
    /// within `tie_tol` of the minimum Frobenius distance, the smallest
    /// index wins. Returns `None` on an empty tree.
    pub(crate) fn nearest(&self, q: &[f64; 4], tie_tol: f64) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut search = NearestSearch {
            best: f64::INFINITY,
            prune: f64::INFINITY,
            tie_tol,
            candidates: Vec::new(),
        };
        self.nearest_rec(0, q, &mut search);
        let best = search.best;
        search
            .candidates
            .iter()
            .filter(|(_, d)| *d <= best + tie_tol)
            .min_by_key(|(i, _)| *i)
            .map(|&(i, d)| (i as usize, d))
    }

    fn nearest_rec(&self, node: u32, q: &[f64; 4], s: &mut NearestSearch) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for k in start as usize..end as usize {
                    let c = &self.coords[k];
                    let e2 = sq_dist(c, q);
                    if e2 > s.prune * s.prune {
                        continue;
                    }
                    let d = quat_distance(c, q);
                    s.offer(self.ids[k], d);
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis as usize] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.nearest_rec(near, q, s);
                if diff.abs() <= s.prune {
                    self.nearest_rec(far, q, s);
                }
            }
        }
    }

    /// Indices of all points with Frobenius distance `≤ radius`, sorted.
    pub(crate) fn within(&self, q: &[f64; 4], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.within_rec(0, q, radius, prune_radius(radius), &mut out);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn within_rec(&self, node: u32, q: &[f64; 4], radius: f64, prune: f64, out: &mut Vec<usize>) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for k in start as usize..end as usize {
                    let c = &self.coords[k];
                    if sq_dist(c, q) <= prune * prune && quat_distance(c, q) <= radius {
                        out.push(self.ids[k] as usize);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis as usize] - value;
                if diff <= prune {
                    self.within_rec(left, q, radius, prune, out);
                }
                if -diff <= prune {
                    self.within_rec(right, q, radius, prune, out);
                }
            }
        }
    }
}

struct NearestSearch {
    best: f64,
    prune: f64,
    tie_tol: f64,
    candidates: Vec<(u32, f64)>,
}

impl NearestSearch {
    #[inline]
    fn offer(&mut self, id: u32, d: f64) {
        if d > self.best + self.tie_tol {
            return;
        }
        self.candidates.push((id, d));
        if d < self.best {
            self.best = d;
            self.prune = prune_radius(d + self.tie_tol);
            let limit = d + self.tie_tol;
            self.candidates.retain(|(_, c)| *c <= limit);
        }
    }
}

#[inline]
fn sq_dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for k in 0..4 {
        let t = a[k] - b[k];
        s += t * t;
    }
    s
}
