//! Linear-connectivity estimation on image point clouds.
//!
//! The image of a ball sample forms a point cloud; an epsilon-graph with
//! `epsilon = 2 x median k-NN distance` approximates the intrinsic geometry,
//! and the distortion `M_hat = max (shortest path length) / (chord length)`
//! over a batch of random pairs lower-bounds the linear-connectivity
//! constant of the image domain.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::pmap::PHMap;
use crate::sampling::SampleStream;
use crate::scalar::{real, to_f64, Real};
use crate::{Error, Result};

/// Interior shrink factor for the domain sample: points are drawn from
/// radius `0.95 * domain_radius` to avoid boundary starvation of the graph.
pub const BOUNDARY_RHO: f64 = 0.95;

/// Empirical linear-connectivity estimate. `m_hat` is a lower estimate of
/// the true constant (finite sampling cannot exceed it).
#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityEstimate<T> {
    pub m_hat: T,
    pub epsilon: T,
    pub pairs_checked: u64,
    pub boundary_rho: T,
    /// Cloud polyline realizing the maximal distortion.
    pub path_witness: Option<Vec<Vec<Complex<T>>>>,
}

/// Default number of random pairs rated per estimate.
pub const DEFAULT_PAIR_BATCH: u64 = 10_000;

/// Connectivity estimate of `map(B^n(domain_radius))` from `grid_points`
/// domain samples (drawn at radius `0.95 * domain_radius`).
pub fn connectivity_estimate<T: Real>(
    map: &PHMap<T>,
    domain_radius: f64,
    grid_points: usize,
    k_neighbors: usize,
    seed: u64,
) -> Result<ConnectivityEstimate<T>> {
    if grid_points < 100 {
        return Err(Error::PreconditionViolated {
            detail: format!("grid_points = {grid_points} below the minimum 100"),
        });
    }
    let mut stream = SampleStream::new(seed, 0);
    let cloud: Vec<Vec<Complex<T>>> = (0..grid_points)
        .map(|_| {
            let z: Vec<Complex<T>> = stream.ball_point(map.n(), BOUNDARY_RHO * domain_radius);
            map.eval(&z).expect("dimension fixed by PHMap")
        })
        .collect();
    cloud_connectivity(&cloud, k_neighbors, DEFAULT_PAIR_BATCH, seed)
}

/// Connectivity estimate of an explicit point cloud.
pub fn cloud_connectivity<T: Real>(
    cloud: &[Vec<Complex<T>>],
    k_neighbors: usize,
    pair_batch: u64,
    seed: u64,
) -> Result<ConnectivityEstimate<T>> {
    let n_points = cloud.len();
    if n_points < 2 || k_neighbors == 0 {
        return Err(Error::PreconditionViolated {
            detail: "cloud connectivity needs at least two points and k >= 1".to_string(),
        });
    }
    let pts: Vec<Vec<f64>> = cloud
        .iter()
        .map(|p| {
            p.iter()
                .flat_map(|c| [to_f64(c.re), to_f64(c.im)])
                .collect()
        })
        .collect();
    let dist = |a: usize, b: usize| -> f64 {
        pts[a]
            .iter()
            .zip(&pts[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };

    // epsilon = 2 x median over points of the k-th nearest-neighbor distance
    let k = k_neighbors.min(n_points - 1);
    let mut knn: Vec<f64> = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<f64> = (0..n_points)
                .filter(|&j| j != i)
                .map(|j| dist(i, j))
                .collect();
            row.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
            row[k - 1]
        })
        .collect();
    knn.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = knn[n_points / 2];
    let epsilon = 2.0 * median;
    if epsilon <= 0.0 {
        return Err(Error::GraphDisconnected {
            suggestion: "degenerate cloud (zero median neighbor distance); \
                         increase grid_points or check the map"
                .to_string(),
        });
    }

    let adjacency: Vec<Vec<(usize, f64)>> = (0..n_points)
        .into_par_iter()
        .map(|i| {
            (0..n_points)
                .filter(|&j| j != i)
                .filter_map(|j| {
                    let d = dist(i, j);
                    (d <= epsilon).then_some((j, d))
                })
                .collect()
        })
        .collect();

    // Random pair batch, bucketed by source so each source runs one
    // Dijkstra. Chords below 3 epsilon are under the graph's resolving
    // power (a forced detour over one extra hop already costs a factor
    // close to 2 there) and are skipped.
    let resolution_floor = 3.0 * epsilon;
    let mut pair_stream = SampleStream::new(seed, 1);
    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut pairs_checked = 0u64;
    for _ in 0..pair_batch {
        let a = (pair_stream.next_u64() % n_points as u64) as usize;
        let b = (pair_stream.next_u64() % n_points as u64) as usize;
        if a != b && dist(a, b) >= resolution_floor {
            buckets.entry(a).or_default().push(b);
            pairs_checked += 1;
        }
    }

    let per_source: Vec<Result<(f64, usize, usize)>> = buckets
        .par_iter()
        .map(|(&source, targets)| {
            let d = dijkstra(&adjacency, source);
            let mut best = (f64::NEG_INFINITY, source, source);
            for &t in targets {
                let graph_len = d[t];
                if !graph_len.is_finite() {
                    return Err(Error::GraphDisconnected {
                        suggestion: format!(
                            "pair ({source}, {t}) unreachable at epsilon = {epsilon:.3e}; \
                             raise grid_points or k_neighbors"
                        ),
                    });
                }
                let chord = dist(source, t);
                if chord <= 1e-300 {
                    continue;
                }
                let ratio = graph_len / chord;
                if ratio > best.0 {
                    best = (ratio, source, t);
                }
            }
            Ok(best)
        })
        .collect();

    let mut m_hat = f64::NEG_INFINITY;
    let mut best_pair = None;
    for r in per_source {
        let (ratio, s, t) = r?;
        if ratio > m_hat {
            m_hat = ratio;
            best_pair = Some((s, t));
        }
    }
    let (m_hat, path_witness) = match best_pair {
        None => (1.0, None),
        Some((s, t)) => {
            let (d, preds) = dijkstra_with_predecessors(&adjacency, s);
            debug_assert!(d[t].is_finite());
            let mut path = vec![t];
            let mut cur = t;
            while cur != s {
                cur = preds[cur];
                path.push(cur);
            }
            path.reverse();
            let polyline: Vec<Vec<Complex<T>>> = path.iter().map(|&i| cloud[i].clone()).collect();
            (m_hat, Some(polyline))
        }
    };

    Ok(ConnectivityEstimate {
        m_hat: real(m_hat),
        epsilon: real(epsilon),
        pairs_checked,
        boundary_rho: real(BOUNDARY_RHO),
        path_witness,
    })
}

struct HeapEntry {
    dist: f64,
    node: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap, we want smallest distance first
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn dijkstra(adjacency: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    dijkstra_impl(adjacency, source, None)
}

fn dijkstra_with_predecessors(
    adjacency: &[Vec<(usize, f64)>],
    source: usize,
) -> (Vec<f64>, Vec<usize>) {
    let mut preds = vec![usize::MAX; adjacency.len()];
    let d = dijkstra_impl(adjacency, source, Some(&mut preds));
    (d, preds)
}

fn dijkstra_impl(
    adjacency: &[Vec<(usize, f64)>],
    source: usize,
    mut preds: Option<&mut Vec<usize>>,
) -> Vec<f64> {
    let n = adjacency.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, w) in &adjacency[node] {
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                if let Some(p) = preds.as_deref_mut() {
                    p[next] = node;
                }
                heap.push(HeapEntry {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_disk_is_nearly_convex() {
        let f: PHMap<f64> = PHMap::identity(1);
        let est = connectivity_estimate(&f, 1.0, 1000, 8, 42).unwrap();
        let m = est.m_hat;
        assert!((1.0..=1.15).contains(&m), "m_hat = {m}");
        assert!(est.path_witness.is_some());
    }

    #[test]
    fn horseshoe_cloud_detours() {
        // Three-quarter annulus between radii 1 and 2: the geodesic from one
        // arm tip to the other wraps around while the chord cuts the gap.
        let mut cloud = Vec::new();
        let mut stream = SampleStream::new(5, 0);
        for _ in 0..1500 {
            let angle = stream.uniform_in(0.0, 1.5 * std::f64::consts::PI);
            let radius = (stream.uniform_in(1.0, 4.0)).sqrt();
            cloud.push(vec![c(radius * angle.cos(), radius * angle.sin())]);
        }
        let est = cloud_connectivity(&cloud, 8, 10_000, 42).unwrap();
        assert!(est.m_hat >= 2.0, "m_hat = {}", est.m_hat);
    }

    #[test]
    fn scale_invariance() {
        let mut cloud = Vec::new();
        let mut stream = SampleStream::new(6, 0);
        for _ in 0..400 {
            let z: Vec<Complex<f64>> = stream.ball_point(1, 1.0);
            cloud.push(z);
        }
        let scaled: Vec<Vec<Complex<f64>>> = cloud
            .iter()
            .map(|p| p.iter().map(|z| z * 37.5).collect())
            .collect();
        let a = cloud_connectivity(&cloud, 6, 5000, 9).unwrap();
        let b = cloud_connectivity(&scaled, 6, 5000, 9).unwrap();
        assert!((a.m_hat - b.m_hat).abs() < 1e-9);
    }

    #[test]
    fn m_hat_at_least_one() {
        let f: PHMap<f64> = PHMap::identity(2);
        let est = connectivity_estimate(&f, 0.8, 300, 6, 11).unwrap();
        assert!(est.m_hat >= 1.0 - 1e-9);
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        // Two far-apart tight clusters with k = 1: epsilon stays cluster-sized.
        let mut cloud = Vec::new();
        let mut stream = SampleStream::new(8, 0);
        for _ in 0..60 {
            let z: Vec<Complex<f64>> = stream.ball_point(1, 0.01);
            cloud.push(z);
        }
        for _ in 0..60 {
            let z: Vec<Complex<f64>> = stream.ball_point(1, 0.01);
            cloud.push(vec![z[0] + c(100.0, 0.0)]);
        }
        let r = cloud_connectivity(&cloud, 1, 2000, 3);
        assert!(matches!(r, Err(Error::GraphDisconnected { .. })));
    }

    #[test]
    fn too_few_grid_points_rejected() {
        let f: PHMap<f64> = PHMap::identity(1);
        assert!(matches!(
            connectivity_estimate(&f, 1.0, 50, 8, 1),
            Err(Error::PreconditionViolated { .. })
        ));
    }
}

