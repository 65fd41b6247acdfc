//! Uniform cell grid over `[-1, 1]⁴` used while a net is growing.
//!
//! The only query is "is any stored rotation closer than `delta`", which
//! is what greedy packing asks for every candidate. Cells are at least as
//! wide as the Euclidean radius matching `delta`, so the 3⁴ neighbouring
//! cells always suffice.

use crate::so3::{frobenius_to_chordal, quat_distance};

const MAX_CELLS_PER_AXIS: usize = 40;
const NONE: u32 = u32::MAX;

pub(crate) struct Grid {
    delta: f64,
    side: f64,
    dim: usize,
    head: Vec<u32>,
    next: Vec<u32>,
    coords: Vec<[f64; 4]>,
}

impl Grid {
    pub(crate) fn new(delta: f64) -> Self {
        let reach = frobenius_to_chordal(delta) * (1.0 + 1e-9) + 1e-12;
        let dim = if reach.is_finite() && reach > 0.0 {
            ((2.0 / reach).floor() as usize).clamp(1, MAX_CELLS_PER_AXIS)
        } else {
            1
        };
        Grid {
            delta,
            side: 2.0 / dim as f64,
            dim,
            head: vec![NONE; dim.pow(4)],
            next: Vec::new(),
            coords: Vec::new(),
        }
    }

    fn cell_coord(&self, c: f64) -> usize {
        (((c + 1.0) / self.side).floor().max(0.0) as usize).min(self.dim - 1)
    }

    fn cell_of(&self, q: &[f64; 4]) -> [usize; 4] {
        q.map(|c| self.cell_coord(c))
    }

    fn flat(&self, cell: [usize; 4]) -> usize {
        ((cell[0] * self.dim + cell[1]) * self.dim + cell[2]) * self.dim + cell[3]
    }

    pub(crate) fn insert(&mut self, q: &[f64; 4]) {
        for copy in [*q, q.map(|c| -c)] {
            let slot = self.flat(self.cell_of(&copy));
            self.next.push(self.head[slot]);
            self.head[slot] = self.coords.len() as u32;
            self.coords.push(copy);
        }
    }

    /// True if some stored rotation is at Frobenius distance `< delta` from `q`.
    pub(crate) fn conflicts(&self, q: &[f64; 4]) -> bool {
        self.scan(q, |d| d < self.delta)
    }

    /// Smallest distance from `q` to a stored rotation. Exact whenever the
    /// result is below `delta`; otherwise some value `≥ delta`.
    pub(crate) fn nearest_distance(&self, q: &[f64; 4]) -> f64 {
        let mut best = f64::INFINITY;
        self.scan(q, |d| {
            best = best.min(d);
            false
        });
        best
    }

    /// Visits the neighbourhood of `q`, own cell first, until `stop`
    /// returns true.
    fn scan(&self, q: &[f64; 4], mut stop: impl FnMut(f64) -> bool) -> bool {
        let cell = self.cell_of(q);
        let own = self.flat(cell);
        let mut visit = |slot: usize| {
            let mut k = self.head[slot];
            while k != NONE {
                if stop(quat_distance(&self.coords[k as usize], q)) {
                    return true;
                }
                k = self.next[k as usize];
            }
            false
        };
        if visit(own) {
            return true;
        }
        let range = |c: usize| c.saturating_sub(1)..=(c + 1).min(self.dim - 1);
        for a in range(cell[0]) {
            for b in range(cell[1]) {
                for c in range(cell[2]) {
                    for d in range(cell[3]) {
                        let slot = self.flat([a, b, c, d]);
                        if slot != own && visit(slot) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}
