//! Independent input groups and the per-block computation of indices.
//!
//! When `Γ` is block diagonal (after a permutation), the groups `C_1, …, C_k`
//! are independent and `Y = Σ_j β_{C_j}ᵀ X_{C_j}` is block additive. Then
//! every Sobol index of a subset straddling two groups is zero, and
//! `η_i = S^g_{j(i)} · η_i^{(j(i))}`, where `S^g_j` is the variance share of
//! group `j` and `η^{(j)}` the Shapley effects of the group's own sub-model.
//! Only `Σ_j 2^{|C_j|}` conditional variances are needed.

use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::condvar::all_conditional_variances;
use crate::error::ValidationKind;
use crate::indices::{SensitivityReport, SobolMethod};
use crate::model::LinearGaussianModel;
use crate::subset::{check_lattice_dim, SubsetId};
use crate::{Error, Result};

/// A partition of the inputs into groups. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    groups: Vec<Vec<usize>>,
    group_of: Vec<usize>,
}

impl BlockPartition {
    /// Validates that `groups` partition `0..p`. Groups are sorted
    /// internally and ordered by their smallest element.
    pub fn new(mut groups: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        let mut group_of = vec![usize::MAX; p];
        for g in &mut groups {
            if g.is_empty() {
                return Err(Error::InvalidArgument("empty group".into()));
            }
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        for (j, g) in groups.iter().enumerate() {
            for &i in g {
                if i >= p {
                    return Err(Error::InvalidArgument(format!("index {i} outside 0..{p}")));
                }
                if group_of[i] != usize::MAX {
                    return Err(Error::InvalidArgument(format!("index {i} in two groups")));
                }
                group_of[i] = j;
            }
        }
        if let Some(i) = group_of.iter().position(|&j| j == usize::MAX) {
            return Err(Error::InvalidArgument(format!("index {i} not covered")));
        }
        Ok(Self { groups, group_of })
    }

    pub fn single(p: usize) -> Self {
        Self {
            groups: vec![(0..p).collect()],
            group_of: vec![0; p],
        }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn p(&self) -> usize {
        self.group_of.len()
    }

    /// Bit mask (in global `h` coordinates) of group `j`.
    pub fn group_mask(&self, j: usize) -> u64 {
        self.groups[j].iter().fold(0, |m, &i| m | (1u64 << i))
    }

    /// The single group containing all of `mask`, if any. `None` for the
    /// empty set.
    pub fn enclosing_group(&self, mask: u64) -> Option<usize> {
        if mask == 0 {
            return None;
        }
        let first = mask.trailing_zeros() as usize;
        let j = self.group_of[first];
        (mask & !self.group_mask(j) == 0).then_some(j)
    }

    /// Maps a global mask restricted to group `j` to the group's local mask.
    pub fn to_local(&self, j: usize, mask: u64) -> u64 {
        self.groups[j]
            .iter()
            .enumerate()
            .fold(0, |m, (l, &i)| m | (((mask >> i) & 1) << l))
    }

    /// Inverse of [`to_local`](Self::to_local).
    pub fn to_global(&self, j: usize, local: u64) -> u64 {
        self.groups[j]
            .iter()
            .enumerate()
            .fold(0, |m, (l, &i)| m | (((local >> l) & 1) << i))
    }

    /// Total conditional variances the grouped computation needs.
    pub fn lattice_work(&self) -> usize {
        self.groups.iter().map(|g| 1usize << g.len()).sum()
    }
}

/// Connected components of the graph with an edge `a – b` whenever
/// `|Γ_ab| > eps_block`.
pub fn detect_blocks(gamma: &DMatrix<f64>, eps_block: f64) -> BlockPartition {
    let p = gamma.nrows();
    let mut uf = UnionFind::<usize>::new(p);
    for a in 0..p {
        for b in (a + 1)..p {
            if gamma[(a, b)].abs() > eps_block || gamma[(b, a)].abs() > eps_block {
                uf.union(a, b);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; p];
    for (i, &root) in labels.iter().enumerate() {
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    BlockPartition::new(groups, p).expect("components form a partition")
}

/// `β_Cᵀ Γ_{C,C} β_C / βᵀΓβ`, the share of `Var(Y)` carried by group `C`.
pub fn group_weight(model: &LinearGaussianModel, group: &[usize]) -> f64 {
    model.restrict(group).total_variance() / model.total_variance()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupedReport {
    pub partition: BlockPartition,
    /// `S^g_j` for each group.
    pub group_weights: Vec<f64>,
    /// Indices of each group's own sub-model; `None` when the group carries
    /// no variance (its effects are all zero).
    pub group_reports: Vec<Option<SensitivityReport>>,
    /// Global Shapley vector, 0-based.
    pub shapley: Vec<f64>,
    /// Per-group Sobol arrays scaled by the group weight, indexed by local
    /// masks. Sobol indices of straddling subsets are zero and not stored.
    pub scaled_sobol: Vec<Vec<f64>>,
    /// Conditional variances evaluated.
    pub eval_count: usize,
}

impl GroupedReport {
    /// Global `S_u`.
    pub fn sobol(&self, u: SubsetId) -> f64 {
        match self.partition.enclosing_group(u.value()) {
            Some(j) => {
                let local = self.partition.to_local(j, u.value()) as usize;
                self.scaled_sobol[j].get(local).copied().unwrap_or(0.0)
            }
            None => 0.0,
        }
    }

    /// Global `S^cl_u = Σ_j S^g_j · S^cl,(j)_{u∩C_j}`.
    pub fn closed_sobol(&self, u: SubsetId) -> f64 {
        (0..self.partition.k())
            .filter_map(|j| {
                let report = self.group_reports[j].as_ref()?;
                let local = self.partition.to_local(j, u.value()) as usize;
                Some(self.group_weights[j] * report.closed_sobol[local])
            })
            .sum()
    }
}

/// Runs the exact indices on each independent group and rescales them.
pub fn lg_groups_indices(model: &LinearGaussianModel, eps_block: f64) -> Result<GroupedReport> {
    let partition = detect_blocks(model.gamma(), eps_block);
    lg_groups_indices_with(model, partition)
}

/// As [`lg_groups_indices`] but with a caller-supplied partition, which must
/// match the independence structure of `Γ`.
pub fn lg_groups_indices_with(
    model: &LinearGaussianModel,
    partition: BlockPartition,
) -> Result<GroupedReport> {
    if partition.p() != model.p() {
        return Err(Error::Dimension(format!(
            "partition covers {} inputs, model has {}",
            partition.p(),
            model.p()
        )));
    }
    let largest = partition.groups().iter().map(Vec::len).max().unwrap_or(0);
    check_lattice_dim(largest)?;

    let per_group: Vec<(f64, Option<SensitivityReport>)> = partition
        .groups()
        .par_iter()
        .map(|group| -> Result<_> {
            let weight = group_weight(model, group);
            let sub = model.restrict(group);
            match LinearGaussianModel::new(sub.beta().clone(), sub.gamma().clone(), None) {
                Ok(sub) => {
                    let table = all_conditional_variances(&sub)?;
                    Ok((weight, Some(SensitivityReport::from_table(&table, SobolMethod::Fast))))
                }
                Err(e) if e.kind == ValidationKind::ZeroOutputVariance => Ok((weight, None)),
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<_>>()?;

    let mut group_weights = Vec::with_capacity(partition.k());
    let mut group_reports = Vec::with_capacity(partition.k());
    let mut scaled_sobol = Vec::with_capacity(partition.k());
    let mut eval_count = 0;
    for (w, report) in per_group {
        let w = if report.is_some() { w } else { 0.0 };
        scaled_sobol.push(match &report {
            Some(r) => r.sobol.iter().map(|s| w * s).collect(),
            None => Vec::new(),
        });
        eval_count += report.as_ref().map_or(0, |r| r.eval_count);
        group_weights.push(w);
        group_reports.push(report);
    }

    let local_shapleys: Vec<Vec<f64>> = group_reports
        .iter()
        .zip(partition.groups())
        .map(|(r, g)| match r {
            Some(r) => r.shapley.clone(),
            None => vec![0.0; g.len()],
        })
        .collect();
    let shapley = combine_block_shapley(&group_weights, &local_shapleys, &partition)?;

    Ok(GroupedReport {
        partition,
        group_weights,
        group_reports,
        shapley,
        scaled_sobol,
        eval_count,
    })
}

/// `η_i = weight[j(i)] · group_shapley[j(i)][position of i in C_{j(i)}]`.
pub fn combine_block_shapley(
    group_weights: &[f64],
    group_shapleys: &[Vec<f64>],
    partition: &BlockPartition,
) -> Result<Vec<f64>> {
    if group_weights.len() != partition.k() || group_shapleys.len() != partition.k() {
        return Err(Error::Dimension(format!(
            "{} weights and {} Shapley vectors for {} groups",
            group_weights.len(),
            group_shapleys.len(),
            partition.k()
        )));
    }
    let mut eta = vec![0.0; partition.p()];
    for (j, group) in partition.groups().iter().enumerate() {
        if group_shapleys[j].len() != group.len() {
            return Err(Error::Dimension(format!(
                "group {j} has {} inputs but a Shapley vector of length {}",
                group.len(),
                group_shapleys[j].len()
            )));
        }
        for (l, &i) in group.iter().enumerate() {
            eta[i] = group_weights[j] * group_shapleys[j][l];
        }
    }
    Ok(eta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossBlockViolation {
    pub subset: SubsetId,
    pub value: f64,
}

/// Every subset not contained in a single group whose Sobol index exceeds
/// `tol` in absolute value.
pub fn verify_cross_block_zeros(
    report: &SensitivityReport,
    partition: &BlockPartition,
    tol: f64,
) -> Vec<CrossBlockViolation> {
    let p = report.p();
    report
        .sobol
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(mask, &s)| partition.enclosing_group(mask as u64).is_none() && s.abs() > tol)
        .map(|(mask, &value)| CrossBlockViolation {
            subset: SubsetId::new(mask as u64, p).expect("mask within lattice"),
            value,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::lg_indices;
    use crate::model::{generate_block_instance, generate_random_instance};
    use nalgebra::{dmatrix, dvector, DVector};
    use rand::seq::SliceRandom;

    #[test]
    fn diagonal_gives_singletons() {
        let p = detect_blocks(&DMatrix::identity(3, 3), 0.0);
        assert_eq!(p.groups(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn explicit_blocks() {
        let g = dmatrix![1.0, 0.3, 0.0; 0.3, 1.0, 0.0; 0.0, 0.0, 2.0];
        assert_eq!(detect_blocks(&g, 0.0).groups(), &[vec![0, 1], vec![2]]);
        // interleaved blocks {1,3} and {2}
        let g = dmatrix![1.0, 0.0, 0.3; 0.0, 1.0, 0.0; 0.3, 0.0, 2.0];
        let part = detect_blocks(&g, 0.0);
        assert_eq!(part.groups(), &[vec![0, 2], vec![1]]);
        assert_eq!(part.group_of(2), 0);
    }

    #[test]
    fn eps_block_ignores_round_off() {
        let g = dmatrix![1.0, 1e-17; 1e-17, 1.0];
        assert_eq!(detect_blocks(&g, 0.0).k(), 1);
        assert_eq!(detect_blocks(&g, 1e-12).k(), 2);
    }

    #[test]
    fn dense_instance_is_one_group() {
        let m = generate_random_instance(6, 4);
        assert!(m.gamma().iter().all(|x| x.abs() > 0.0));
        assert_eq!(detect_blocks(m.gamma(), 0.0).k(), 1);
    }

    #[test]
    fn block_instance_recovered() {
        let m = generate_block_instance(3, 2, 9);
        let part = detect_blocks(m.gamma(), 0.0);
        assert_eq!(part.groups(), &[vec![0, 1], vec![2, 3], vec![4, 5]]);
    }

    #[test]
    fn detection_is_permutation_invariant() {
        let m = generate_block_instance(3, 3, 2);
        let mut perm: Vec<usize> = (0..9).collect();
        perm.shuffle(&mut crate::seed::rng(77));
        let pm = m.permuted(&perm);
        let original = detect_blocks(m.gamma(), 0.0);
        let relabeled = detect_blocks(pm.gamma(), 0.0);
        let mut mapped: Vec<Vec<usize>> = relabeled
            .groups()
            .iter()
            .map(|g| {
                let mut v: Vec<usize> = g.iter().map(|&k| perm[k]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        mapped.sort();
        assert_eq!(mapped, original.groups());
    }

    #[test]
    fn group_weight_examples() {
        let m = LinearGaussianModel::new(dvector![1.0, 2.0], DMatrix::identity(2, 2), None).unwrap();
        assert!((group_weight(&m, &[1]) - 0.8).abs() < 1e-15);
        assert!((group_weight(&m, &[0, 1]) - 1.0).abs() < 1e-15);

        let m = generate_block_instance(4, 3, 8);
        let part = detect_blocks(m.gamma(), 0.0);
        let total: f64 = part.groups().iter().map(|g| group_weight(&m, g)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn work_count_two_blocks_of_six() {
        let m = generate_block_instance(2, 6, 1);
        let g = lg_groups_indices(&m, 0.0).unwrap();
        assert_eq!(g.eval_count, 128);
        assert_eq!(lg_indices(&m).unwrap().eval_count, 4096);
    }

    #[test]
    fn grouped_matches_full_lattice() {
        for (k, n) in [(2, 3), (3, 2), (2, 5), (5, 3)] {
            let m = generate_block_instance(k, n, (k * 10 + n) as u64);
            let g = lg_groups_indices(&m, 0.0).unwrap();
            let r = lg_indices(&m).unwrap();
            for (a, b) in g.shapley.iter().zip(&r.shapley) {
                assert!((a - b).abs() < 1e-10);
            }
            for mask in 0..(1u64 << m.p()) {
                let u = SubsetId::new(mask, m.p()).unwrap();
                assert!((g.sobol(u) - r.sobol[mask as usize]).abs() < 1e-10);
                assert!((g.closed_sobol(u) - r.closed_sobol[mask as usize]).abs() < 1e-10);
            }
            assert!(verify_cross_block_zeros(&r, &g.partition, 1e-10).is_empty());
            let wsum: f64 = g.group_weights.iter().sum();
            assert!((wsum - 1.0).abs() < 1e-10);
            for (j, group) in g.partition.groups().iter().enumerate() {
                let local = &g.group_reports[j].as_ref().unwrap().shapley;
                for (l, &i) in group.iter().enumerate() {
                    assert_eq!(g.shapley[i], g.group_weights[j] * local[l]);
                }
            }
        }
    }

    #[test]
    fn single_dense_group_reduces_to_full() {
        let m = generate_random_instance(5, 21);
        let g = lg_groups_indices(&m, 0.0).unwrap();
        let r = lg_indices(&m).unwrap();
        assert_eq!(g.group_weights, vec![1.0]);
        assert_eq!(g.group_reports[0].as_ref().unwrap(), &r);
        assert_eq!(g.shapley, r.shapley);
    }

    #[test]
    fn zero_variance_group() {
        let beta = dvector![1.0, 0.0, 0.0];
        let gamma = dmatrix![1.0, 0.0, 0.0; 0.0, 1.0, 0.5; 0.0, 0.5, 1.0];
        let m = LinearGaussianModel::new(beta, gamma, None).unwrap();
        let g = lg_groups_indices(&m, 0.0).unwrap();
        assert_eq!(g.shapley, vec![1.0, 0.0, 0.0]);
        assert!(g.group_reports[1].is_none());
        assert_eq!(g.eval_count, 2);
    }

    #[test]
    fn group_cap_enforced() {
        let p = 26;
        let m = LinearGaussianModel::new(
            DVector::from_element(p, 1.0),
            DMatrix::from_element(p, p, 0.1) + DMatrix::identity(p, p),
            None,
        )
        .unwrap();
        assert!(matches!(lg_groups_indices(&m, 0.0), Err(Error::CapExceeded { .. })));
        // but many small blocks in high dimension are fine
        let m = generate_block_instance(15, 2, 3);
        let g = lg_groups_indices(&m, 0.0).unwrap();
        assert_eq!(g.eval_count, 60);
        assert!((g.shapley.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn combine_examples() {
        let one = BlockPartition::single(2);
        assert_eq!(combine_block_shapley(&[1.0], &[vec![0.3, 0.7]], &one).unwrap(), vec![0.3, 0.7]);

        let part = BlockPartition::new(vec![vec![0, 1], vec![2]], 3).unwrap();
        let eta = combine_block_shapley(&[0.6, 0.4], &[vec![0.5, 0.5], vec![1.0]], &part).unwrap();
        assert!((eta[0] - 0.3).abs() < 1e-15 && (eta[1] - 0.3).abs() < 1e-15);
        assert_eq!(eta[2], 0.4);

        assert!(combine_block_shapley(&[0.6], &[vec![0.5, 0.5]], &part).is_err());
        assert!(combine_block_shapley(&[0.6, 0.4], &[vec![1.0], vec![1.0]], &part).is_err());
    }

    #[test]
    fn injected_cross_block_fault_detected() {
        let m = generate_block_instance(2, 2, 3);
        let part = detect_blocks(m.gamma(), 0.0);
        let mut r = lg_indices(&m).unwrap();
        assert!(verify_cross_block_zeros(&r, &part, 1e-10).is_empty());
        // {1,3} straddles {1,2} and {3,4}
        let u = SubsetId::encode(&[1, 3], 4).unwrap();
        r.sobol[u.index()] = 0.1;
        let v = verify_cross_block_zeros(&r, &part, 1e-10);
        assert_eq!(v, vec![CrossBlockViolation { subset: u, value: 0.1 }]);

        let dense = lg_indices(&generate_random_instance(3, 1)).unwrap();
        assert!(verify_cross_block_zeros(&dense, &BlockPartition::single(3), 1e-10).is_empty());
    }

    #[test]
    fn partition_validation() {
        assert!(BlockPartition::new(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(BlockPartition::new(vec![vec![0]], 2).is_err());
        assert!(BlockPartition::new(vec![vec![2]], 2).is_err());
        let part = BlockPartition::new(vec![vec![2, 0], vec![1]], 3).unwrap();
        assert_eq!(part.to_local(0, 0b101), 0b11);
        assert_eq!(part.to_global(0, 0b10), 0b100);
        assert_eq!(part.enclosing_group(0b101), Some(0));
        assert_eq!(part.enclosing_group(0b011), None);
    }
}
