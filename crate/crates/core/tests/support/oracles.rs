//! Slow, independent reference implementations used by the integration and
//! acceptance tests. None of these call into the code they check.

#![allow(dead_code)]

use std::collections::HashMap;

/// Row-major multi-index of `index` in a grid of `shape` (last axis fastest).
fn unravel(mut index: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for axis in (0..shape.len()).rev() {
        out[axis] = index % shape[axis];
        index /= shape[axis];
    }
    out
}

fn ravel(multi: &[usize], shape: &[usize]) -> usize {
    multi.iter().zip(shape).fold(0, |acc, (&i, &s)| acc * s + i)
}

fn axis_neighbors(index: usize, shape: &[usize]) -> Vec<usize> {
    let multi = unravel(index, shape);
    let mut out = Vec::new();
    for axis in 0..shape.len() {
        for step in [-1i64, 1] {
            let j = multi[axis] as i64 + step;
            if j >= 0 && (j as usize) < shape[axis] {
                let mut m = multi.clone();
                m[axis] = j as usize;
                out.push(ravel(&m, shape));
            }
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
    birth: Vec<f64>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Dimension-0 sublevel persistence of a grid function by a union-find sweep
/// with the elder rule. Returns finite pairs with positive persistence and the
/// births of essential classes, both sorted.
pub fn union_find_dim0(values: &[f64], shape: &[usize]) -> (Vec<(f64, f64)>, Vec<f64>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut uf = UnionFind {
        parent: (0..n).collect(),
        birth: values.to_vec(),
    };
    let mut added = vec![false; n];
    let mut pairs = Vec::new();
    for &v in &order {
        added[v] = true;
        for w in axis_neighbors(v, shape) {
            if !added[w] {
                continue;
            }
            let (rv, rw) = (uf.find(v), uf.find(w));
            if rv == rw {
                continue;
            }
            let (elder, younger) = if uf.birth[rv] <= uf.birth[rw] { (rv, rw) } else { (rw, rv) };
            if uf.birth[younger] < values[v] {
                pairs.push((uf.birth[younger], values[v]));
            }
            uf.parent[younger] = elder;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&v| uf.find(v) == v).collect();
    let mut essential: Vec<f64> = roots.iter().map(|&v| uf.birth[v]).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    essential.sort_by(f64::total_cmp);
    (pairs, essential)
}

/// Euler characteristic of the sublevel set `{f <= t}` of the lower-star
/// cubical complex on a 2D grid, by direct counting of vertices, edges and
/// squares.
pub fn euler_2d(values: &[f64], shape: [usize; 2], t: f64) -> i64 {
    let [p, q] = shape;
    let at = |i: usize, j: usize| values[i * q + j];
    let mut chi = 0i64;
    for i in 0..p {
        for j in 0..q {
            if at(i, j) <= t {
                chi += 1;
            }
            if i + 1 < p && at(i, j).max(at(i + 1, j)) <= t {
                chi -= 1;
            }
            if j + 1 < q && at(i, j).max(at(i, j + 1)) <= t {
                chi -= 1;
            }
            if i + 1 < p && j + 1 < q {
                let m = at(i, j).max(at(i + 1, j)).max(at(i, j + 1)).max(at(i + 1, j + 1));
                if m <= t {
                    chi += 1;
                }
            }
        }
    }
    chi
}

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn to_diagonal(a: (f64, f64)) -> f64 {
    (a.1 - a.0).abs() / 2.0
}

fn best_partial_matching(a: &[(f64, f64)], b: &[(f64, f64)], i: usize, used: &mut Vec<bool>, acc: f64) -> f64 {
    if i == a.len() {
        let rest = b
            .iter()
            .zip(used.iter())
            .filter(|(_, &u)| !u)
            .map(|(&p, _)| to_diagonal(p))
            .fold(0.0, f64::max);
        return acc.max(rest);
    }
    let mut best = best_partial_matching(a, b, i + 1, used, acc.max(to_diagonal(a[i])));
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            best = best.min(best_partial_matching(a, b, i + 1, used, acc.max(linf(a[i], b[j]))));
            used[j] = false;
        }
    }
    best
}

fn best_permutation(a: &[f64], b: &[f64], i: usize, used: &mut Vec<bool>, acc: f64) -> f64 {
    if i == a.len() {
        return acc;
    }
    let mut best = f64::INFINITY;
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            best = best.min(best_permutation(a, b, i + 1, used, acc.max((a[i] - b[j]).abs())));
            used[j] = false;
        }
    }
    best
}

/// Bottleneck distance by exhaustive search. `finite` points are (birth,
/// death); essential classes are given by their births, separately for each
/// infinity.
pub struct BruteDiagram {
    pub finite: Vec<(f64, f64)>,
    pub up: Vec<f64>,
    pub down: Vec<f64>,
}

pub fn brute_force_bottleneck(x: &BruteDiagram, y: &BruteDiagram) -> f64 {
    let mut total = 0.0f64;
    for (a, b) in [(&x.up, &y.up), (&x.down, &y.down)] {
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        total = total.max(best_permutation(a, b, 0, &mut vec![false; b.len()], 0.0));
    }
    let finite = best_partial_matching(&x.finite, &y.finite, 0, &mut vec![false; y.finite.len()], 0.0);
    total.max(finite)
}

/// `k`-th smallest (1-based) after sorting, with `k` the least integer such
/// that `k / B >= 1 - alpha`, found by counting rather than by a ceiling.
pub fn quantile_by_counting(stats: &[f64], alpha: f64) -> f64 {
    let mut s = stats.to_vec();
    s.sort_by(f64::total_cmp);
    let b = s.len();
    let target = 1.0 - alpha;
    let k = (1..=b)
        .find(|&k| k as f64 / b as f64 >= target - 1e-12)
        .unwrap_or(b);
    s[k - 1]
}

/// DTM by sorting every squared distance: `sqrt(mean of the k smallest)`.
pub fn dtm_by_sorting(points: &[Vec<f64>], k: usize, query: &[f64]) -> f64 {
    let mut d: Vec<f64> = points
        .iter()
        .map(|p| p.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    d.sort_by(f64::total_cmp);
    (d[..k].iter().sum::<f64>() / k as f64).sqrt()
}

/// Multiset equality of `(birth, death)` pairs.
pub fn same_pairs(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    let key = |p: &(f64, f64)| (p.0.to_bits(), p.1.to_bits());
    let mut count: HashMap<(u64, u64), i64> = HashMap::new();
    for p in a {
        *count.entry(key(p)).or_default() += 1;
    }
    for p in b {
        *count.entry(key(p)).or_default() -= 1;
    }
    count.values().all(|&c| c == 0)
}
