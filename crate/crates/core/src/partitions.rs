//! Partitions of the series index set into weakly dependent collections,
//! plus tangent-collection resampling.
//!
//! The hierarchical construction assigns leaf `l` to collection `l mod 2^d`,
//! so within every subtree rooted at depth `D - d` (which holds `2^d`
//! leaves) each collection receives exactly one leaf. The geodesic
//! construction is a capacity-capped greedy max-min-distance assignment; the
//! achieved minimum in-collection distance is reported rather than assumed.

use crate::error::{CoreError, Result};
use crate::panel::TimeSeriesPanel;
use crate::processes::{geodesic_distance, ProcessSpec};
use crate::rng::derive_seed;
use serde::{Deserialize, Serialize};

/// How a partition was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum PartitionConstruction {
    Hierarchical { cut_depth: u32 },
    GeodesicGreedy { k: usize },
    Singleton,
    Whole,
    Custom,
}

/// Disjoint index sets covering `0..m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    index_sets: Vec<Vec<usize>>,
    construction: PartitionConstruction,
}

impl Partition {
    pub fn new(
        index_sets: Vec<Vec<usize>>,
        m: usize,
        construction: PartitionConstruction,
    ) -> Result<Self> {
        let mut seen = vec![false; m];
        let mut count = 0usize;
        for set in &index_sets {
            if set.is_empty() {
                return Err(CoreError::InvariantViolation(
                    "partition collections must be nonempty".into(),
                ));
            }
            for &i in set {
                if i >= m {
                    return Err(CoreError::IndexOutOfRange(format!(
                        "partition index {i} >= m = {m}"
                    )));
                }
                if seen[i] {
                    return Err(CoreError::InvariantViolation(format!(
                        "partition index {i} appears twice"
                    )));
                }
                seen[i] = true;
                count += 1;
            }
        }
        if count != m {
            return Err(CoreError::InvariantViolation(format!(
                "partition covers {count} of {m} indices"
            )));
        }
        Ok(Partition {
            index_sets,
            construction,
        })
    }

    pub fn whole(m: usize) -> Partition {
        Partition {
            index_sets: vec![(0..m).collect()],
            construction: PartitionConstruction::Whole,
        }
    }

    pub fn singletons(m: usize) -> Partition {
        Partition {
            index_sets: (0..m).map(|i| vec![i]).collect(),
            construction: PartitionConstruction::Singleton,
        }
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.index_sets
    }

    pub fn construction(&self) -> &PartitionConstruction {
        &self.construction
    }

    /// Number of collections.
    pub fn k(&self) -> usize {
        self.index_sets.len()
    }

    /// Size of the smallest collection.
    pub fn min_size(&self) -> usize {
        self.index_sets.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.index_sets.iter().map(Vec::len).collect()
    }
}

/// Partition of the `2^depth` leaves of a binary hierarchy into `2^cut_depth`
/// collections of size `2^(depth - cut_depth)` each.
pub fn hierarchical_partition(depth: u32, cut_depth: u32) -> Result<Partition> {
    if cut_depth > depth {
        return Err(CoreError::InvalidParameter(format!(
            "cut depth {cut_depth} exceeds tree depth {depth}"
        )));
    }
    let m = 1usize << depth;
    let k = 1usize << cut_depth;
    let mut sets = vec![Vec::with_capacity(m / k); k];
    for leaf in 0..m {
        sets[leaf % k].push(leaf);
    }
    Partition::new(
        sets,
        m,
        PartitionConstruction::Hierarchical { cut_depth },
    )
}

/// Geodesic partition result: the index sets plus the realized minimum
/// in-collection distance `d_0` that the bound inputs should use.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicPartition {
    pub partition: Partition,
    /// Minimum pairwise geodesic distance within any collection; the sphere
    /// diameter (pi) when every collection is a singleton.
    pub achieved_d0: f64,
}

/// Greedy max-min-distance assignment of sphere points into `k` collections
/// capped at `ceil(m / k)` members. Points are visited in input order and
/// ties break toward the lowest collection index, so the construction is
/// deterministic.
pub fn geodesic_partition(points: &[[f64; 3]], k: usize) -> Result<GeodesicPartition> {
    let m = points.len();
    if k == 0 || k > m {
        return Err(CoreError::InvalidParameter(format!(
            "collection count k = {k} must satisfy 1 <= k <= m = {m}"
        )));
    }
    let capacity = m.div_ceil(k);
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); k];
    for idx in 0..m {
        let mut best: Option<(usize, f64)> = None;
        for (c, set) in sets.iter().enumerate() {
            if set.len() >= capacity {
                continue;
            }
            let min_dist = set
                .iter()
                .map(|&j| geodesic_distance(&points[idx], &points[j]))
                .fold(f64::INFINITY, f64::min);
            let better = match best {
                None => true,
                Some((_, d)) => min_dist > d + 1e-15,
            };
            if better {
                best = Some((c, min_dist));
            }
        }
        let (c, _) = best.ok_or_else(|| {
            CoreError::InvariantViolation("no collection below capacity".into())
        })?;
        sets[c].push(idx);
    }
    sets.retain(|s| !s.is_empty());
    let mut d0 = f64::INFINITY;
    for set in &sets {
        for (a, &i) in set.iter().enumerate() {
            for &j in &set[a + 1..] {
                d0 = d0.min(geodesic_distance(&points[i], &points[j]));
            }
        }
    }
    if !d0.is_finite() {
        d0 = std::f64::consts::PI;
    }
    let partition = Partition::new(sets, m, PartitionConstruction::GeodesicGreedy { k })?;
    Ok(GeodesicPartition {
        partition,
        achieved_d0: d0,
    })
}

/// Draw a tangent collection: for each series index in `collection`, a fresh
/// independent panel is simulated from the spec and only that series' row is
/// kept. The rows keep the original marginals but are mutually independent.
///
/// Requires a generative spec (oracle mode).
pub fn tangent_sample(
    spec: &ProcessSpec,
    collection: &[usize],
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let m = spec.m();
    let mut rows = Vec::with_capacity(collection.len());
    for (pos, &i) in collection.iter().enumerate() {
        if i >= m {
            return Err(CoreError::IndexOutOfRange(format!(
                "tangent index {i} >= m = {m}"
            )));
        }
        let fresh = spec
            .with_seed(derive_seed(seed, pos as u64))
            .simulate()?;
        rows.push(fresh.row(i).to_vec());
    }
    Ok(rows)
}

/// Tangent rows packaged as a panel (ids keep the original series indices).
pub fn tangent_sample_panel(
    spec: &ProcessSpec,
    collection: &[usize],
    seed: u64,
) -> Result<TimeSeriesPanel> {
    let rows = tangent_sample(spec, collection, seed)?;
    let ids = collection.iter().map(|i| format!("s{i}")).collect();
    TimeSeriesPanel::new(rows, ids, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::processes::{hierarchical_covariance, ArCorrelatedSpec, WeightSpec};

    #[test]
    fn hierarchical_depth2_cut1() {
        let p = hierarchical_partition(2, 1).unwrap();
        assert_eq!(p.index_sets(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(p.min_size(), 2);
    }

    #[test]
    fn hierarchical_cut_extremes() {
        let all = hierarchical_partition(3, 0).unwrap();
        assert_eq!(all.k(), 1);
        assert_eq!(all.index_sets()[0], (0..8).collect::<Vec<_>>());
        let singles = hierarchical_partition(3, 3).unwrap();
        assert_eq!(singles.k(), 8);
        assert!(singles.index_sets().iter().all(|s| s.len() == 1));
    }

    #[test]
    fn hierarchical_sizes_and_one_leaf_per_subtree() {
        for depth in 1..=6u32 {
            for cut in 0..=depth {
                let p = hierarchical_partition(depth, cut).unwrap();
                assert_eq!(p.k(), 1 << cut);
                assert!(p.sizes().iter().all(|&s| s == 1usize << (depth - cut)));
                // each subtree rooted at depth-cut holds 2^cut leaves, one
                // per collection
                for set in p.index_sets() {
                    let mut subtree_roots: Vec<usize> =
                        set.iter().map(|&l| l >> cut).collect();
                    subtree_roots.sort_unstable();
                    subtree_roots.dedup();
                    assert_eq!(subtree_roots.len(), set.len());
                }
            }
        }
    }

    #[test]
    fn hierarchical_in_collection_correlation_below_sibling() {
        let depth = 4;
        let cov = hierarchical_covariance(depth, 16.0).unwrap().matrix;
        let sibling = cov[(0, 1)];
        for cut in 1..=depth {
            let p = hierarchical_partition(depth, cut).unwrap();
            for set in p.index_sets() {
                for (a, &i) in set.iter().enumerate() {
                    for &j in &set[a + 1..] {
                        assert!(
                            cov[(i, j)] < sibling,
                            "cut {cut}: cov[{i},{j}] = {} not below sibling {sibling}",
                            cov[(i, j)]
                        );
                    }
                }
            }
        }
    }

    fn tetrahedron() -> Vec<[f64; 3]> {
        let s = 1.0 / 3.0_f64.sqrt();
        vec![
            [s, s, s],
            [s, -s, -s],
            [-s, s, -s],
            [-s, -s, s],
        ]
    }

    #[test]
    fn geodesic_tetrahedron_two_collections() {
        let pts = tetrahedron();
        let g = geodesic_partition(&pts, 2).unwrap();
        assert_eq!(g.partition.k(), 2);
        assert!(g.partition.sizes().iter().all(|&s| s == 2));
        // brute force: all three pairings share the same d0 because every
        // pairwise distance equals arccos(-1/3)
        let expected = (-1.0_f64 / 3.0).acos();
        let pairings = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];
        for pairing in pairings {
            for (i, j) in pairing {
                let d = geodesic_distance(&pts[i], &pts[j]);
                assert!((d - expected).abs() < 1e-12);
            }
        }
        assert!((g.achieved_d0 - expected).abs() < 1e-12);
    }

    #[test]
    fn geodesic_extreme_k() {
        let pts = tetrahedron();
        let singles = geodesic_partition(&pts, 4).unwrap();
        assert_eq!(singles.partition.k(), 4);
        assert!((singles.achieved_d0 - std::f64::consts::PI).abs() < 1e-12);

        let one = geodesic_partition(&pts, 1).unwrap();
        assert_eq!(one.partition.k(), 1);
        let global_min = (-1.0_f64 / 3.0).acos();
        assert!((one.achieved_d0 - global_min).abs() < 1e-12);
    }

    #[test]
    fn partition_validation_rejects_bad_sets() {
        assert!(Partition::new(vec![vec![0], vec![0]], 2, PartitionConstruction::Custom).is_err());
        assert!(Partition::new(vec![vec![0]], 2, PartitionConstruction::Custom).is_err());
        assert!(Partition::new(vec![vec![0, 2]], 2, PartitionConstruction::Custom).is_err());
        assert!(Partition::new(vec![vec![], vec![0]], 1, PartitionConstruction::Custom).is_err());
    }

    fn small_diag_spec(seed: u64) -> ProcessSpec {
        let mut cov = Matrix::zeros(3, 3);
        for i in 0..3 {
            cov[(i, i)] = 0.25;
        }
        ProcessSpec::ArCorrelated(ArCorrelatedSpec {
            m: 3,
            t_len: 600,
            weights: WeightSpec::Shared(vec![0.4]),
            noise_cov: cov,
            burn_in: 100,
            seed,
        })
    }

    #[test]
    fn tangent_rows_match_marginals_and_are_independent() {
        let spec = small_diag_spec(5);
        let rows = tangent_sample(&spec, &[0, 1, 2], 99).unwrap();
        let original = spec.simulate().unwrap();
        let t = original.t_len() as f64;

        // matched marginals: mean and variance of tangent row vs original
        for (pos, row) in rows.iter().enumerate() {
            let (rm, _) = crate::stats::mean_and_stderr(row);
            let (om, _) = crate::stats::mean_and_stderr(original.row(pos));
            let rv = row.iter().map(|x| (x - rm) * (x - rm)).sum::<f64>() / t;
            let ov = original
                .row(pos)
                .iter()
                .map(|x| (x - om) * (x - om))
                .sum::<f64>()
                / t;
            let se = 3.0 / t.sqrt();
            assert!((rm - om).abs() < se, "means {rm} vs {om}");
            assert!((rv - ov).abs() < se, "vars {rv} vs {ov}");
        }

        // independence: cross-correlation of tangent rows near zero
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                let (ma, _) = crate::stats::mean_and_stderr(&rows[a]);
                let (mb, _) = crate::stats::mean_and_stderr(&rows[b]);
                let mut num = 0.0;
                let mut va = 0.0;
                let mut vb = 0.0;
                for (x, y) in rows[a].iter().zip(&rows[b]) {
                    num += (x - ma) * (y - mb);
                    va += (x - ma) * (x - ma);
                    vb += (y - mb) * (y - mb);
                }
                let r = num / (va * vb).sqrt();
                assert!(r.abs() < 3.0 / t.sqrt(), "cross-correlation {r}");
            }
        }
    }

    #[test]
    fn tangent_deterministic_under_seed() {
        let spec = small_diag_spec(5);
        let a = tangent_sample(&spec, &[0, 2], 7).unwrap();
        let b = tangent_sample(&spec, &[0, 2], 7).unwrap();
        assert_eq!(a, b);
        let c = tangent_sample(&spec, &[0, 2], 8).unwrap();
        assert_ne!(a, c);
    }
}
