//! Seeded k-means++ with Lloyd iterations and restarts.

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::KMeansError;
use crate::partition::ClusterAssignment;
use crate::rng::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: ClusterAssignment,
    /// One centroid per row.
    pub centroids: DMatrix<f64>,
    pub inertia: f64,
    pub iterations: usize,
}

/// Clusters the rows of `points` with the default options.
pub fn kmeans(points: &DMatrix<f64>, k: usize, seed: u64) -> Result<KMeansResult, KMeansError> {
    kmeans_with(points, k, seed, &KMeansOptions::default())
}

pub fn kmeans_with(
    points: &DMatrix<f64>,
    k: usize,
    seed: u64,
    opts: &KMeansOptions,
) -> Result<KMeansResult, KMeansError> {
    let (n, d) = points.shape();
    if k == 0 {
        return Err(KMeansError::ZeroClusters);
    }
    if d == 0 {
        return Err(KMeansError::ZeroDimension);
    }
    if n < k {
        return Err(KMeansError::TooFewPoints { n, k });
    }
    let data = Rows::new(points);
    let restarts = opts.restarts.max(1);
    let runs: Vec<Run> = (0..restarts)
        .into_par_iter()
        .map(|r| lloyd(&data, k, seed, r as u64, opts.max_iter))
        .collect();
    // First run wins ties, so the outcome is independent of thread scheduling.
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.inertia < a.inertia { b } else { a })
        .expect("at least one restart");
    let centroids = DMatrix::from_row_slice(k, d, &best.centroids);
    let assignment = ClusterAssignment::new(best.labels).expect("every cluster repaired nonempty");
    Ok(KMeansResult {
        assignment,
        centroids,
        inertia: best.inertia,
        iterations: best.iterations,
    })
}

/// Scales every nonzero row to unit Euclidean norm.
pub fn row_normalize(points: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = points.clone();
    for mut row in out.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    out
}

struct Rows {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Rows {
    fn new(m: &DMatrix<f64>) -> Self {
        let (n, d) = m.shape();
        let mut data = Vec::with_capacity(n * d);
        for i in 0..n {
            data.extend(m.row(i).iter());
        }
        Self { n, d, data }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

struct Run {
    labels: Vec<usize>,
    centroids: Vec<f64>,
    inertia: f64,
    iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centroids: &[f64], d: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centre) in centroids.chunks_exact(d).enumerate() {
        let dist = sq_dist(p, centre);
        if dist < best.1 {
            best = (c, dist);
        }
    }
    best
}

fn plus_plus(data: &Rows, k: usize, seed: u64, restart: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, &[restart]);
    let (n, d) = (data.n, data.d);
    let mut centroids = Vec::with_capacity(k * d);
    centroids.extend_from_slice(data.row(rng.random_range(0..n)));
    let mut dist: Vec<f64> = (0..n).map(|i| sq_dist(data.row(i), &centroids[..d])).collect();
    for _ in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let start = centroids.len();
        centroids.extend_from_slice(data.row(pick));
        for (i, di) in dist.iter_mut().enumerate() {
            *di = di.min(sq_dist(data.row(i), &centroids[start..]));
        }
    }
    centroids
}

fn assign(data: &Rows, centroids: &[f64], labels: &mut [usize]) {
    for (i, l) in labels.iter_mut().enumerate() {
        *l = nearest(data.row(i), centroids, data.d).0;
    }
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(data: &Rows, centroids: &mut [f64], labels: &mut [usize], k: usize) {
    let d = data.d;
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut far = (usize::MAX, -1.0);
        for i in 0..data.n {
            if sizes[labels[i]] < 2 {
                continue;
            }
            let dist = sq_dist(data.row(i), &centroids[labels[i] * d..(labels[i] + 1) * d]);
            if dist > far.1 {
                far = (i, dist);
            }
        }
        labels[far.0] = empty;
        centroids[empty * d..(empty + 1) * d].copy_from_slice(data.row(far.0));
    }
}

fn update_means(data: &Rows, labels: &[usize], k: usize) -> Vec<f64> {
    let d = data.d;
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, x) in sums[l * d..(l + 1) * d].iter_mut().zip(data.row(i)) {
            *s += x;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        for s in &mut sums[c * d..(c + 1) * d] {
            *s /= count as f64;
        }
    }
    sums
}

fn lloyd(data: &Rows, k: usize, seed: u64, restart: u64, max_iter: usize) -> Run {
    let mut centroids = plus_plus(data, k, seed, restart);
    let mut labels = vec![0usize; data.n];
    assign(data, &centroids, &mut labels);
    let mut next = labels.clone();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        repair_empty(data, &mut centroids, &mut labels, k);
        centroids = update_means(data, &labels, k);
        assign(data, &centroids, &mut next);
        if next == labels {
            break;
        }
        std::mem::swap(&mut labels, &mut next);
    }
    repair_empty(data, &mut centroids, &mut labels, k);
    centroids = update_means(data, &labels, k);
    let inertia = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(data.row(i), &centroids[l * data.d..(l + 1) * data.d]))
        .sum();
    Run {
        labels,
        centroids,
        inertia,
        iterations,
    }
}
