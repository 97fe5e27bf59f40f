//! Exact bottleneck distance between persistence diagrams.
//!
//! Finite points of each diagram are augmented with the diagonal projections
//! of the other diagram's points. The distance is the smallest candidate
//! cost `r` for which the threshold graph (edges of cost `<= r`) has a
//! perfect matching; candidates are searched by bisection and feasibility is
//! decided with Hopcroft-Karp.

use std::collections::{BTreeMap, VecDeque};

use crate::diagram::PersistenceDiagram;

/// `L_inf` distance between two diagram points.
#[inline]
fn point_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// Cost of sending a point to the diagonal.
#[inline]
fn diagonal_cost(a: (f64, f64)) -> f64 {
    (a.1 - a.0).abs() / 2.0
}

/// Bipartite threshold graph over augmented point sets.
///
/// Left vertices `0..p` are the points of `left`, `p..p+q` the diagonal
/// copies of `right`'s points; right vertices mirror this. A real point may
/// only be sent to its own diagonal copy, and diagonal copies match each
/// other for free.
struct MatchingProblem<'a> {
    left: &'a [(f64, f64)],
    right: &'a [(f64, f64)],
}

impl MatchingProblem<'_> {
    fn size(&self) -> usize {
        self.left.len() + self.right.len()
    }

    fn for_each_neighbor(&self, u: usize, r: f64, mut f: impl FnMut(usize) -> bool) {
        let (p, q) = (self.left.len(), self.right.len());
        if u < p {
            let a = self.left[u];
            for (j, &b) in self.right.iter().enumerate() {
                if point_cost(a, b) <= r && f(j) {
                    return;
                }
            }
            if diagonal_cost(a) <= r {
                f(q + u);
            }
        } else {
            let j = u - p;
            if diagonal_cost(self.right[j]) <= r && f(j) {
                return;
            }
            for i in 0..p {
                if f(q + i) {
                    return;
                }
            }
        }
    }

    /// Whether the threshold graph at `r` has a perfect matching.
    fn feasible(&self, r: f64) -> bool {
        let n = self.size();
        const FREE: usize = usize::MAX;
        let mut match_l = vec![FREE; n];
        let mut match_r = vec![FREE; n];
        let mut dist = vec![0usize; n];
        let mut matched = 0;
        loop {
            // BFS layering from free left vertices
            let mut queue = VecDeque::new();
            for u in 0..n {
                if match_l[u] == FREE {
                    dist[u] = 0;
                    queue.push_back(u);
                } else {
                    dist[u] = usize::MAX;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                self.for_each_neighbor(u, r, |v| {
                    let w = match_r[v];
                    if w == FREE {
                        found = true;
                    } else if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    false
                });
            }
            if !found {
                return matched == n;
            }
            for u in 0..n {
                if match_l[u] == FREE && self.augment(u, r, &mut match_l, &mut match_r, &mut dist) {
                    matched += 1;
                }
            }
            if matched == n {
                return true;
            }
        }
    }

    fn augment(
        &self,
        u: usize,
        r: f64,
        match_l: &mut [usize],
        match_r: &mut [usize],
        dist: &mut [usize],
    ) -> bool {
        let mut neighbors = Vec::new();
        self.for_each_neighbor(u, r, |v| {
            neighbors.push(v);
            false
        });
        for v in neighbors {
            let w = match_r[v];
            let ok = w == usize::MAX
                || (dist[w] == dist[u].wrapping_add(1) && self.augment(w, r, match_l, match_r, dist));
            if ok {
                match_l[u] = v;
                match_r[v] = u;
                return true;
            }
        }
        dist[u] = usize::MAX;
        false
    }

    /// All edge costs that could be the bottleneck, sorted and deduplicated.
    fn candidates(&self) -> Vec<f64> {
        let mut c: Vec<f64> = Vec::with_capacity(self.left.len() * self.right.len() + self.size());
        for &a in self.left {
            for &b in self.right {
                c.push(point_cost(a, b));
            }
        }
        c.extend(self.left.iter().chain(self.right).map(|&a| diagonal_cost(a)));
        c.sort_unstable_by(f64::total_cmp);
        c.dedup();
        c
    }

    fn solve(&self) -> f64 {
        if self.size() == 0 {
            return 0.0;
        }
        let cand = self.candidates();
        // sending everything to the diagonal is always feasible at the largest diagonal cost
        let (mut lo, mut hi) = (0usize, cand.len() - 1);
        if self.feasible(0.0) {
            return 0.0;
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.feasible(cand[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        cand[lo]
    }
}

fn split(diagram: &PersistenceDiagram, dim: usize) -> (Vec<(f64, f64)>, Vec<f64>, Vec<f64>) {
    let mut finite = Vec::new();
    let mut up = Vec::new();
    let mut down = Vec::new();
    for f in diagram.in_dim(dim) {
        if f.death == f64::INFINITY {
            up.push(f.birth);
        } else if f.death == f64::NEG_INFINITY {
            down.push(f.birth);
        } else {
            finite.push((f.birth, f.death));
        }
    }
    (finite, up, down)
}

/// Cost of matching essential features by sorted birth; infinite if counts differ.
fn essential_cost(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Bottleneck distance between the `dim`-dimensional parts of two diagrams.
///
/// Essential features only match essential features (dying towards the
/// same infinity); a count mismatch gives `+inf`.
pub fn bottleneck_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram, dim: usize) -> f64 {
    let (f1, up1, down1) = split(d1, dim);
    let (f2, up2, down2) = split(d2, dim);
    let ess = essential_cost(up1, up2).max(essential_cost(down1, down2));
    if ess.is_infinite() {
        return ess;
    }
    let finite = MatchingProblem {
        left: &f1,
        right: &f2,
    }
    .solve();
    finite.max(ess)
}

/// Bottleneck distance for every dimension present in either diagram.
pub fn bottleneck_all_dims(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> BTreeMap<usize, f64> {
    d1.dims()
        .union(&d2.dims())
        .map(|&k| (k, bottleneck_distance(d1, d2, k)))
        .collect()
}
