//! Stratified allocation plus per-class k-medoids to pick the small subsample
//! that is sent through the quantum extractor.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampleSpec {
    pub size: usize,
    pub seed: u64,
    pub max_medoid_iters: usize,
}

impl SubsampleSpec {
    /// Default size is one fifth of the dataset, rounded up.
    pub fn default_size(n: usize) -> usize {
        (n as f64 * 0.2).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subsample {
    /// Row indices into the parent dataset, ascending.
    pub indices: Vec<usize>,
    pub per_class_counts: BTreeMap<i64, usize>,
}

impl Subsample {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// One index per line.
    pub fn to_index_file(&self) -> String {
        let mut s = String::new();
        for i in &self.indices {
            s.push_str(&i.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_index_file(text: &str) -> Result<Vec<usize>> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<usize>().map_err(|_| Error::Parse {
                    row: i + 1,
                    column: "index".into(),
                    message: format!("'{}' is not a row index", l.trim()),
                })
            })
            .collect()
    }
}

/// Per-class quota: proportional share with a floor of one, corrected by
/// largest remainder so the counts sum to `m` exactly.
pub fn allocate_strata(ds: &Dataset, m: usize) -> Result<BTreeMap<i64, usize>> {
    let class_rows = ds.class_rows();
    let sizes: Vec<(i64, usize)> = class_rows.iter().map(|(&c, r)| (c, r.len())).collect();
    allocate_counts(&sizes, m)
}

pub(crate) fn allocate_counts(sizes: &[(i64, usize)], m: usize) -> Result<BTreeMap<i64, usize>> {
    let n: usize = sizes.iter().map(|(_, s)| s).sum();
    if m < sizes.len() {
        return Err(Error::SubsampleTooSmall {
            requested: m,
            classes: sizes.len(),
        });
    }
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "subsample size {m} exceeds dataset size {n}"
        )));
    }
    let quota: Vec<f64> = sizes.iter().map(|&(_, nc)| m as f64 * nc as f64 / n as f64).collect();
    let mut alloc: Vec<usize> = sizes
        .iter()
        .zip(&quota)
        .map(|(&(_, nc), q)| (q.floor() as usize).clamp(1, nc))
        .collect();

    // Shortfall: hand out to the largest remaining quota; excess (from the
    // minority floor): take back from the most over-allocated class.
    loop {
        let total: usize = alloc.iter().sum();
        if total == m {
            break;
        }
        let pick = if total < m {
            (0..sizes.len()).filter(|&c| alloc[c] < sizes[c].1).max_by(|&a, &b| {
                let ra = quota[a] - alloc[a] as f64;
                let rb = quota[b] - alloc[b] as f64;
                ra.total_cmp(&rb).then(b.cmp(&a))
            })
        } else {
            (0..sizes.len()).filter(|&c| alloc[c] > 1).min_by(|&a, &b| {
                let ra = quota[a] - alloc[a] as f64;
                let rb = quota[b] - alloc[b] as f64;
                ra.total_cmp(&rb).then(a.cmp(&b))
            })
        };
        let c = pick.expect("allocation bounds are feasible when classes <= m <= n");
        if total < m {
            alloc[c] += 1;
        } else {
            alloc[c] -= 1;
        }
    }
    Ok(sizes.iter().map(|&(c, _)| c).zip(alloc).collect())
}

fn sq_dist(points: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    points
        .row(a)
        .iter()
        .zip(points.row(b).iter())
        .map(|(x, y)| (x - y).powi(2))
        .sum()
}

/// Dense Euclidean distance matrix between rows.
pub fn distance_matrix(points: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = points.nrows();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = sq_dist(points, i, j).sqrt();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Sum over points of the distance to the nearest medoid.
pub fn medoid_cost(dist: &[Vec<f64>], medoids: &[usize]) -> f64 {
    dist.iter()
        .map(|row| medoids.iter().map(|&m| row[m]).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Largest number of candidate medoid sets searched exhaustively.
const EXHAUSTIVE_LIMIT: usize = 4096;

fn binomial(n: usize, k: usize) -> usize {
    let mut c = 1usize;
    for i in 0..k.min(n - k) {
        c = c.saturating_mul(n - i) / (i + 1);
    }
    c
}

/// Cheapest medoid set by trying every `k`-combination in lexicographic order.
fn exhaustive_medoids(dist: &[Vec<f64>], k: usize) -> Vec<usize> {
    let n = dist.len();
    let mut comb: Vec<usize> = (0..k).collect();
    let mut best = (medoid_cost(dist, &comb), comb.clone());
    loop {
        let Some(i) = (0..k).rev().find(|&i| comb[i] < n - k + i) else {
            return best.1;
        };
        comb[i] += 1;
        for j in (i + 1)..k {
            comb[j] = comb[j - 1] + 1;
        }
        let c = medoid_cost(dist, &comb);
        if c < best.0 {
            best = (c, comb.clone());
        }
    }
}

/// PAM k-medoids on the rows of `points`.
///
/// Small problems (few candidate medoid sets) are solved exactly by
/// enumeration instead.
///
/// Seeding: the point nearest the centroid, then repeatedly the point farthest
/// from the chosen seeds. Refinement: steepest-descent swap moves until no
/// swap lowers the total distance or `max_iters` is hit. The seed only breaks
/// ties, so results are deterministic for a given seed.
pub fn k_medoids(points: &DMatrix<f64>, k: usize, seed: u64, max_iters: usize) -> Result<Vec<usize>> {
    let n = points.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("k_medoids on an empty point set".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={n}")));
    }
    if k == n {
        return Ok((0..n).collect());
    }
    let dist = distance_matrix(points);
    if binomial(n, k) <= EXHAUSTIVE_LIMIT {
        return Ok(exhaustive_medoids(&dist, k));
    }

    // Scan order used for tie-breaking.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let centroid: Vec<f64> = (0..points.ncols()).map(|j| points.column(j).sum() / n as f64).collect();
    let first = *order
        .iter()
        .min_by(|&&a, &&b| {
            let da: f64 = points.row(a).iter().zip(&centroid).map(|(x, c)| (x - c).powi(2)).sum();
            let db: f64 = points.row(b).iter().zip(&centroid).map(|(x, c)| (x - c).powi(2)).sum();
            da.total_cmp(&db)
        })
        .unwrap();
    let mut medoids = vec![first];
    let mut nearest: Vec<f64> = dist[first].clone();
    while medoids.len() < k {
        let next = *order
            .iter()
            .filter(|i| !medoids.contains(i))
            .max_by(|&&a, &&b| nearest[a].total_cmp(&nearest[b]))
            .unwrap();
        medoids.push(next);
        for i in 0..n {
            nearest[i] = nearest[i].min(dist[next][i]);
        }
    }

    let mut cost = medoid_cost(&dist, &medoids);
    for _ in 0..max_iters {
        // Nearest and second-nearest medoid distance per point; a swap only
        // changes the assignment of points served by the removed medoid.
        let (near_slot, near, second) = assignments(&dist, &medoids);
        let mut best: Option<(usize, usize, f64)> = None;
        for slot in 0..k {
            for &cand in &order {
                if medoids.contains(&cand) {
                    continue;
                }
                let c: f64 = (0..n)
                    .map(|j| {
                        let keep = if near_slot[j] == slot { second[j] } else { near[j] };
                        keep.min(dist[j][cand])
                    })
                    .sum();
                if c < cost - 1e-12 * cost.max(1.0) && best.is_none_or(|(_, _, bc)| c < bc) {
                    best = Some((slot, cand, c));
                }
            }
        }
        match best {
            Some((slot, cand, _)) => {
                medoids[slot] = cand;
                cost = medoid_cost(&dist, &medoids);
            }
            None => break,
        }
    }
    Ok(medoids)
}

fn assignments(dist: &[Vec<f64>], medoids: &[usize]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = dist.len();
    let mut slot = vec![0; n];
    let mut near = vec![f64::INFINITY; n];
    let mut second = vec![f64::INFINITY; n];
    for j in 0..n {
        for (s, &m) in medoids.iter().enumerate() {
            let d = dist[j][m];
            if d < near[j] {
                second[j] = near[j];
                near[j] = d;
                slot[j] = s;
            } else if d < second[j] {
                second[j] = d;
            }
        }
    }
    (slot, near, second)
}

/// Stratified allocation, then k-medoids within each class.
pub fn select_subsample(ds: &Dataset, spec: &SubsampleSpec) -> Result<Subsample> {
    let alloc = allocate_strata(ds, spec.size)?;
    let class_rows = ds.class_rows();
    let jobs: Vec<(i64, &Vec<usize>, usize)> = class_rows.iter().map(|(c, rows)| (*c, rows, alloc[c])).collect();

    let run = |&(class, rows, k): &(i64, &Vec<usize>, usize)| -> Result<Vec<usize>> {
        let points = ds.samples.select_rows(rows.iter());
        let seed = spec.seed ^ (class as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let local = k_medoids(&points, k, seed, spec.max_medoid_iters)?;
        Ok(local.into_iter().map(|i| rows[i]).collect())
    };

    #[cfg(feature = "parallel")]
    let picked: Vec<Result<Vec<usize>>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let picked: Vec<Result<Vec<usize>>> = jobs.iter().map(run).collect();

    let mut indices = Vec::with_capacity(spec.size);
    for p in picked {
        indices.extend(p?);
    }
    indices.sort_unstable();
    Ok(Subsample {
        indices,
        per_class_counts: alloc,
    })
}
