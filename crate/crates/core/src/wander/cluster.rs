//! Spherical k-means over word vectors.
//!
//! Vectors are unit-normalized, so squared Euclidean distance orders points
//! the same way as cosine similarity. Seeding is k-means++ driven by a
//! caller-supplied RNG seed; Lloyd iterations run to an assignment fixpoint
//! or 100 rounds. Centroids are re-normalized after every update, which
//! keeps the within-cluster squared distance non-increasing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embed::EmbeddingStore;

const MAX_LLOYD_ITERATIONS: usize = 100;

#[derive(Debug, Clone)]
pub struct Cluster {
    /// Member symbols, sorted lexicographically.
    pub members: Vec<String>,
    /// Unit-length centroid.
    pub centroid: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    /// Total within-cluster squared distance after each assignment step.
    pub objective_trace: Vec<f64>,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return false;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    true
}

/// Cluster symbols into (at most) `k` groups. `k` is clamped to the symbol
/// count. Every symbol must be in the store's vocabulary; out-of-vocabulary
/// symbols are the caller's to drop.
pub fn cluster_symbols(
    store: &EmbeddingStore,
    symbols: &[String],
    k: usize,
    rng_seed: u64,
) -> ClusterSet {
    assert!(
        !symbols.is_empty(),
        "cluster_symbols needs at least one symbol"
    );
    let points: Vec<Vec<f64>> = symbols
        .iter()
        .map(|s| {
            let mut v = store
                .vector(s)
                .unwrap_or_else(|| panic!("symbol '{s}' is not in the embedding vocabulary"))
                .to_vec();
            assert!(normalize(&mut v), "symbol '{s}' has a zero-norm vector");
            v
        })
        .collect();

    let n = points.len();
    let k = k.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut centroids = seed_centroids(&points, k, &mut rng);

    let mut assignment = vec![0usize; n];
    let mut trace = Vec::new();
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut next = vec![0usize; n];
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let d = squared_distance(p, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            next[i] = best;
        }
        let objective: f64 = points
            .iter()
            .zip(&next)
            .map(|(p, &j)| squared_distance(p, &centroids[j]))
            .sum();
        trace.push(objective);
        let converged = trace.len() > 1 && next == assignment;
        assignment = next;
        if converged {
            break;
        }
        // Update step: normalized mean of each cluster's members.
        for (j, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points
                .iter()
                .zip(&assignment)
                .filter(|&(_, &a)| a == j)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue; // keep previous centroid
            }
            let mut mean = vec![0.0; centroid.len()];
            for m in &members {
                for (acc, x) in mean.iter_mut().zip(m.iter()) {
                    *acc += x;
                }
            }
            let count = members.len() as f64;
            for x in mean.iter_mut() {
                *x /= count;
            }
            if normalize(&mut mean) {
                *centroid = mean;
            }
        }
    }

    let mut clusters = Vec::new();
    for (j, centroid) in centroids.iter().enumerate() {
        let mut members: Vec<String> = symbols
            .iter()
            .zip(&assignment)
            .filter(|(_, &a)| a == j)
            .map(|(s, _)| s.clone())
            .collect();
        if members.is_empty() {
            continue;
        }
        members.sort_unstable();
        clusters.push(Cluster {
            members,
            centroid: centroid.clone(),
        });
    }
    ClusterSet {
        clusters,
        objective_trace: trace,
    }
}

/// k-means++ seeding: first centroid uniform, the rest sampled with
/// probability proportional to squared distance from the nearest chosen
/// centroid.
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen: Vec<usize> = vec![rng.gen_range(0..n)];
    while chosen.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                chosen
                    .iter()
                    .map(|&c| squared_distance(&points[i], &points[c]))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let next = if total == 0.0 {
            // all remaining points coincide with chosen centroids
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        } else {
            let mut r = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in weights.iter().enumerate() {
                if r < *w {
                    pick = i;
                    break;
                }
                r -= w;
            }
            pick
        };
        chosen.push(next);
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}
