//! Lloyd's k-means over habitats, used to find the cuckoo groups.

use rand::seq::index;
use rand::Rng;

const MAX_LLOYD_ITERATIONS: usize = 50;
const MOVEMENT_TOLERANCE: f64 = 1e-9;

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// Assigns every point to one of `k` clusters and returns the assignment.
///
/// Centroids start at `k` distinct random members. `k` is clamped to
/// `1..=points.len()`. Empty clusters keep their previous centroid.
pub fn assign<R: Rng + ?Sized>(points: &[&[f64]], k: usize, rng: &mut R) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    let k = k.clamp(1, points.len());
    let dim = points[0].len();
    let mut centroids: Vec<Vec<f64>> = index::sample(rng, points.len(), k)
        .into_iter()
        .map(|i| points[i].to_vec())
        .collect();
    let mut labels = vec![0; points.len()];

    for _ in 0..MAX_LLOYD_ITERATIONS {
        for (label, p) in labels.iter_mut().zip(points) {
            *label = nearest(p, &centroids);
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&label, p) in labels.iter().zip(points) {
            counts[label] += 1;
            for (s, x) in sums[label].iter_mut().zip(p.iter()) {
                *s += x;
            }
        }

        let mut max_shift = 0.0f64;
        for ((centroid, sum), &count) in centroids.iter_mut().zip(sums).zip(&counts) {
            if count == 0 {
                continue;
            }
            let next: Vec<f64> = sum.into_iter().map(|s| s / count as f64).collect();
            max_shift = max_shift.max(squared_distance(centroid, &next).sqrt());
            *centroid = next;
        }
        if max_shift < MOVEMENT_TOLERANCE {
            break;
        }
    }

    for (label, p) in labels.iter_mut().zip(points) {
        *label = nearest(p, &centroids);
    }
    labels
}
