//! Finite data-generating processes and their exact joint distributions.
//!
//! A [`World`] is a prior over a finite cause alphabet φ together with a
//! per-cause observation distribution over a finite symbol alphabet x.
//! Conditioned on φ, draws are i.i.d., so a [`JointModel`] materializes the
//! exact joint table p(φ, x_P, x_F) for N past draws and M future draws by
//! multiplying per-draw factors. Datasets are ordered tuples of symbols,
//! enumerated lexicographically (first draw most significant).

use ndarray::{Array1, Array2, Array3, ArrayView3, Axis};

use crate::error::{PibError, Result};

/// Tolerance accepted on externally supplied probability tables.
pub const INPUT_NORMALIZATION_TOL: f64 = 1e-9;
/// Tolerance required of internally produced probability tables.
pub const INTERNAL_NORMALIZATION_TOL: f64 = 1e-12;
/// Default cap on the total number of cells in an exact joint table.
pub const DEFAULT_SIZE_CAP: usize = 10_000_000;

/// Validates a probability table and renormalizes away sub-tolerance drift.
///
/// Entries must be finite and non-negative; the sum must be within
/// [`INPUT_NORMALIZATION_TOL`] of one, in which case the table is divided by
/// its sum so downstream code sees tables normalized to machine precision.
fn validate_and_normalize(table: &mut [f64]) -> Result<()> {
    for &v in table.iter() {
        if !v.is_finite() || v < 0.0 {
            return Err(PibError::NegativeProbability(v));
        }
    }
    let sum: f64 = table.iter().sum();
    let deviation = (sum - 1.0).abs();
    if deviation >= INPUT_NORMALIZATION_TOL {
        return Err(PibError::NotNormalized {
            sum,
            deviation,
            tolerance: INPUT_NORMALIZATION_TOL,
        });
    }
    for v in table.iter_mut() {
        *v /= sum;
    }
    Ok(())
}

/// A finite data-generating process: p(φ) and p(x | φ).
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    phi_prior: Vec<f64>,
    obs_given_phi: Vec<Vec<f64>>,
}

impl World {
    /// Builds and validates a world from a cause prior and per-cause
    /// observation rows. Tables off by less than 1e-9 are renormalized;
    /// larger deviations are rejected.
    pub fn new(phi_prior: Vec<f64>, obs_given_phi: Vec<Vec<f64>>) -> Result<Self> {
        if phi_prior.is_empty() {
            return Err(PibError::EmptyAlphabet(
                "phi alphabet must have at least one symbol".into(),
            ));
        }
        if obs_given_phi.len() != phi_prior.len() {
            return Err(PibError::DimensionMismatch(format!(
                "{} observation rows for {} phi symbols",
                obs_given_phi.len(),
                phi_prior.len()
            )));
        }
        let k_x = obs_given_phi[0].len();
        if k_x < 2 {
            return Err(PibError::EmptyAlphabet(
                "observation alphabet must have at least two symbols".into(),
            ));
        }
        if let Some(row) = obs_given_phi.iter().find(|row| row.len() != k_x) {
            return Err(PibError::DimensionMismatch(format!(
                "ragged observation table: row of length {} among rows of length {}",
                row.len(),
                k_x
            )));
        }

        let mut phi_prior = phi_prior;
        let mut obs_given_phi = obs_given_phi;
        validate_and_normalize(&mut phi_prior)?;
        for row in obs_given_phi.iter_mut() {
            validate_and_normalize(row)?;
        }
        Ok(World {
            phi_prior,
            obs_given_phi,
        })
    }

    /// The canonical two-cause test world: a fair prior over two biased
    /// coins with heads probabilities 0.9 and 0.1.
    pub fn w1() -> Self {
        World::new(vec![0.5, 0.5], vec![vec![0.9, 0.1], vec![0.1, 0.9]])
            .expect("w1 is statically valid")
    }

    /// A three-cause, three-symbol world with an asymmetric prior.
    pub fn w2() -> Self {
        World::new(
            vec![0.5, 0.3, 0.2],
            vec![
                vec![0.7, 0.2, 0.1],
                vec![0.1, 0.8, 0.1],
                vec![0.2, 0.2, 0.6],
            ],
        )
        .expect("w2 is statically valid")
    }

    /// Looks up a built-in world by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "w1" => Ok(Self::w1()),
            "w2" => Ok(Self::w2()),
            other => Err(PibError::InvalidArgument(format!(
                "unknown built-in world {other:?} (available: w1, w2)"
            ))),
        }
    }

    pub fn k_phi(&self) -> usize {
        self.phi_prior.len()
    }

    pub fn k_x(&self) -> usize {
        self.obs_given_phi[0].len()
    }

    pub fn phi_prior(&self) -> &[f64] {
        &self.phi_prior
    }

    pub fn obs_given_phi(&self) -> &[Vec<f64>] {
        &self.obs_given_phi
    }

    /// Probability of a dataset (ordered draws) given a cause, computed from
    /// symbol counts so that it is exactly invariant under draw reordering.
    pub fn dataset_likelihood(&self, phi: usize, draws: &[usize]) -> f64 {
        let mut counts = vec![0i32; self.k_x()];
        for &s in draws {
            counts[s] += 1;
        }
        counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(|(x, &c)| self.obs_given_phi[phi][x].powi(c))
            .product()
    }
}

/// The space of ordered datasets of fixed length over a fixed alphabet,
/// with the lexicographic index ↔ tuple correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSpace {
    alphabet: usize,
    len: usize,
}

impl DatasetSpace {
    pub fn new(alphabet: usize, len: usize) -> Self {
        DatasetSpace { alphabet, len }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of datasets, K_x^len, or `None` on overflow.
    pub fn size_checked(&self) -> Option<usize> {
        let mut size: usize = 1;
        for _ in 0..self.len {
            size = size.checked_mul(self.alphabet)?;
        }
        Some(size)
    }

    /// Number of datasets; panics on overflow (guarded by the size cap in
    /// every construction path).
    pub fn size(&self) -> usize {
        self.size_checked().expect("dataset space size overflow")
    }

    /// Lexicographic index of an ordered dataset (first draw most
    /// significant).
    pub fn index_of(&self, draws: &[usize]) -> Result<usize> {
        if draws.len() != self.len {
            return Err(PibError::DimensionMismatch(format!(
                "dataset of length {} in a space of length {}",
                draws.len(),
                self.len
            )));
        }
        let mut idx = 0usize;
        for &s in draws {
            if s >= self.alphabet {
                return Err(PibError::InvalidArgument(format!(
                    "symbol {s} outside alphabet of size {}",
                    self.alphabet
                )));
            }
            idx = idx * self.alphabet + s;
        }
        Ok(idx)
    }

    /// The ordered dataset at a lexicographic index.
    pub fn draws_of(&self, mut index: usize) -> Vec<usize> {
        let mut draws = vec![0usize; self.len];
        for slot in draws.iter_mut().rev() {
            *slot = index % self.alphabet;
            index /= self.alphabet;
        }
        draws
    }

    /// Per-symbol occurrence counts of the dataset at an index.
    pub fn counts_of(&self, index: usize) -> Vec<u32> {
        let mut counts = vec![0u32; self.alphabet];
        for s in self.draws_of(index) {
            counts[s] += 1;
        }
        counts
    }

    /// Iterates all datasets in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size()).map(|i| self.draws_of(i))
    }
}

/// Exact joint table p(φ, x_P, x_F) for a world with N past and M future
/// draws. Axes: (φ, past dataset index, future dataset index).
#[derive(Debug, Clone)]
pub struct JointModel {
    world: World,
    n_past: usize,
    n_future: usize,
    joint: Array3<f64>,
}

impl JointModel {
    pub fn new(world: &World, n_past: usize, n_future: usize) -> Result<Self> {
        Self::with_size_cap(world, n_past, n_future, DEFAULT_SIZE_CAP)
    }

    pub fn with_size_cap(
        world: &World,
        n_past: usize,
        n_future: usize,
        size_cap: usize,
    ) -> Result<Self> {
        if n_past == 0 || n_future == 0 {
            return Err(PibError::InvalidArgument(
                "n_past and n_future must be at least 1".into(),
            ));
        }
        let k_x = world.k_x() as u128;
        let cells = (world.k_phi() as u128)
            .checked_mul(k_x.checked_pow(n_past as u32).unwrap_or(u128::MAX))
            .and_then(|c| c.checked_mul(k_x.checked_pow(n_future as u32).unwrap_or(u128::MAX)))
            .unwrap_or(u128::MAX);
        if cells > size_cap as u128 {
            return Err(PibError::SizeCapExceeded {
                cells,
                cap: size_cap,
            });
        }

        let past = DatasetSpace::new(world.k_x(), n_past);
        let future = DatasetSpace::new(world.k_x(), n_future);
        let (np, nf) = (past.size(), future.size());

        // Per-phi dataset likelihoods, then the product with the prior.
        let mut joint = Array3::zeros((world.k_phi(), np, nf));
        for phi in 0..world.k_phi() {
            let past_lik: Vec<f64> = (0..np)
                .map(|i| world.dataset_likelihood(phi, &past.draws_of(i)))
                .collect();
            let future_lik: Vec<f64> = (0..nf)
                .map(|j| world.dataset_likelihood(phi, &future.draws_of(j)))
                .collect();
            let prior = world.phi_prior[phi];
            for (i, &pl) in past_lik.iter().enumerate() {
                for (j, &fl) in future_lik.iter().enumerate() {
                    joint[(phi, i, j)] = prior * pl * fl;
                }
            }
        }

        let total: f64 = joint.sum();
        if (total - 1.0).abs() > INTERNAL_NORMALIZATION_TOL {
            return Err(PibError::NumericalFailure(format!(
                "joint table sums to {total}, outside internal tolerance"
            )));
        }
        Ok(JointModel {
            world: world.clone(),
            n_past,
            n_future,
            joint,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn n_past(&self) -> usize {
        self.n_past
    }

    pub fn n_future(&self) -> usize {
        self.n_future
    }

    pub fn past_space(&self) -> DatasetSpace {
        DatasetSpace::new(self.world.k_x(), self.n_past)
    }

    pub fn future_space(&self) -> DatasetSpace {
        DatasetSpace::new(self.world.k_x(), self.n_future)
    }

    /// The full joint table p(φ, x_P, x_F).
    pub fn joint(&self) -> ArrayView3<'_, f64> {
        self.joint.view()
    }

    /// Pairwise marginal p(x_P, x_F).
    pub fn past_future(&self) -> Array2<f64> {
        self.joint.sum_axis(Axis(0))
    }

    /// Pairwise marginal p(φ, x_P).
    pub fn phi_past(&self) -> Array2<f64> {
        self.joint.sum_axis(Axis(2))
    }

    /// Marginal p(x_P).
    pub fn past_marginal(&self) -> Array1<f64> {
        self.joint.sum_axis(Axis(0)).sum_axis(Axis(1))
    }

    /// Marginal p(x_F).
    pub fn future_marginal(&self) -> Array1<f64> {
        self.joint.sum_axis(Axis(0)).sum_axis(Axis(0))
    }

    /// Rows p(x_F | x_P) for every past dataset. Rows with zero past mass
    /// are filled uniformly; they carry no weight anywhere downstream.
    pub fn predictive_table(&self) -> Array2<f64> {
        let pf = self.past_future();
        let np = pf.nrows();
        let nf = pf.ncols();
        let mut rows = Array2::zeros((np, nf));
        for i in 0..np {
            let mass: f64 = pf.row(i).sum();
            if mass > 0.0 {
                for j in 0..nf {
                    rows[(i, j)] = pf[(i, j)] / mass;
                }
            } else {
                rows.row_mut(i).fill(1.0 / nf as f64);
            }
        }
        rows
    }

    /// Exact posterior predictive p(x_F | x_P = draws).
    pub fn predictive(&self, draws: &[usize]) -> Result<Array1<f64>> {
        let idx = self.past_space().index_of(draws)?;
        self.predictive_by_index(idx)
    }

    /// Exact posterior predictive for a past dataset given by index.
    pub fn predictive_by_index(&self, past_index: usize) -> Result<Array1<f64>> {
        let pf = self.past_future();
        if past_index >= pf.nrows() {
            return Err(PibError::InvalidArgument(format!(
                "past dataset index {past_index} out of range {}",
                pf.nrows()
            )));
        }
        let mass: f64 = pf.row(past_index).sum();
        if mass <= 0.0 {
            return Err(PibError::ZeroProbabilityDataset);
        }
        Ok(pf.row(past_index).mapv(|v| v / mass))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn w1_builds_and_normalizes() {
        let w = World::w1();
        assert_eq!(w.k_phi(), 2);
        assert_eq!(w.k_x(), 2);
        assert_abs_diff_eq!(w.phi_prior()[0], 0.5);
    }

    #[test]
    fn sub_tolerance_drift_is_renormalized() {
        let w = World::new(
            vec![0.5, 0.5 + 5e-10],
            vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        )
        .unwrap();
        let sum: f64 = w.phi_prior().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn off_by_too_much_is_rejected() {
        let err = World::new(vec![0.5, 0.5001], vec![vec![0.9, 0.1], vec![0.1, 0.9]])
            .unwrap_err();
        assert!(matches!(err, PibError::NotNormalized { .. }));
    }

    #[test]
    fn negative_probability_is_rejected() {
        let err = World::new(vec![1.5, -0.5], vec![vec![0.9, 0.1], vec![0.1, 0.9]])
            .unwrap_err();
        assert!(matches!(err, PibError::NegativeProbability(_)));
    }

    #[test]
    fn degenerate_single_cause_world() {
        let w = World::new(vec![1.0], vec![vec![0.5, 0.5]]).unwrap();
        assert_eq!(w.k_phi(), 1);
    }

    #[test]
    fn empty_and_undersized_alphabets_are_rejected() {
        assert!(matches!(
            World::new(vec![], vec![]).unwrap_err(),
            PibError::EmptyAlphabet(_)
        ));
        assert!(matches!(
            World::new(vec![1.0], vec![vec![1.0]]).unwrap_err(),
            PibError::EmptyAlphabet(_)
        ));
    }

    #[test]
    fn dataset_space_roundtrip_is_lexicographic() {
        let space = DatasetSpace::new(3, 2);
        assert_eq!(space.size(), 9);
        // Lexicographic: (0,0), (0,1), (0,2), (1,0), ...
        assert_eq!(space.draws_of(0), vec![0, 0]);
        assert_eq!(space.draws_of(1), vec![0, 1]);
        assert_eq!(space.draws_of(3), vec![1, 0]);
        for i in 0..space.size() {
            assert_eq!(space.index_of(&space.draws_of(i)).unwrap(), i);
        }
    }

    #[test]
    fn w1_joint_cell_matches_hand_product() {
        let j = JointModel::new(&World::w1(), 1, 1).unwrap();
        // p(phi=1, x_P=1, x_F=1) = 0.5 * 0.9 * 0.9
        assert_abs_diff_eq!(j.joint()[(1, 1, 1)], 0.405, epsilon = 1e-15);
        let pf = j.past_future();
        assert_abs_diff_eq!(pf[(1, 1)], 0.41, epsilon = 1e-15);
    }

    #[test]
    fn joint_reconstruction_matches_cell_by_cell() {
        for (world, n, m) in [
            (World::w1(), 2, 1),
            (World::w1(), 1, 2),
            (World::w2(), 2, 2),
        ] {
            let j = JointModel::new(&world, n, m).unwrap();
            let past = j.past_space();
            let future = j.future_space();
            for phi in 0..world.k_phi() {
                for i in 0..past.size() {
                    for k in 0..future.size() {
                        // Draw-by-draw product, the independent route.
                        let mut expect = world.phi_prior()[phi];
                        for &s in &past.draws_of(i) {
                            expect *= world.obs_given_phi()[phi][s];
                        }
                        for &s in &future.draws_of(k) {
                            expect *= world.obs_given_phi()[phi][s];
                        }
                        assert_abs_diff_eq!(j.joint()[(phi, i, k)], expect, epsilon = 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn one_cause_world_joint_is_product_of_independent_coins() {
        let w = World::new(vec![1.0], vec![vec![0.5, 0.5]]).unwrap();
        let j = JointModel::new(&w, 2, 1).unwrap();
        for i in 0..4 {
            for k in 0..2 {
                assert_abs_diff_eq!(j.joint()[(0, i, k)], 0.125, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn predictive_w1_single_draw() {
        let j = JointModel::new(&World::w1(), 1, 1).unwrap();
        let p = j.predictive(&[1]).unwrap();
        assert_abs_diff_eq!(p[1], 0.82, epsilon = 1e-12);
        // Symmetry of w1.
        let p0 = j.predictive(&[0]).unwrap();
        assert_abs_diff_eq!(p0[0], 0.82, epsilon = 1e-12);
        assert_abs_diff_eq!(p.sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn predictive_of_one_cause_world_ignores_the_past() {
        let w = World::new(vec![1.0], vec![vec![0.25, 0.75]]).unwrap();
        let j = JointModel::new(&w, 2, 1).unwrap();
        let base = j.predictive(&[0, 0]).unwrap();
        for draws in j.past_space().iter() {
            let p = j.predictive(&draws).unwrap();
            assert_abs_diff_eq!(p[0], base[0], epsilon = 1e-15);
            assert_abs_diff_eq!(p[1], base[1], epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_probability_past_is_an_error() {
        let w = World::new(vec![1.0], vec![vec![1.0, 0.0]]).unwrap();
        let j = JointModel::new(&w, 1, 1).unwrap();
        assert!(matches!(
            j.predictive(&[1]).unwrap_err(),
            PibError::ZeroProbabilityDataset
        ));
    }

    #[test]
    fn exchangeability_is_exact() {
        let j = JointModel::new(&World::w2(), 3, 1).unwrap();
        let past = j.past_space();
        let marginal = j.past_marginal();
        // Every permutation of a dataset has bit-identical mass and predictive.
        let perms3 = [
            [0usize, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for draws in past.iter() {
            let base_idx = past.index_of(&draws).unwrap();
            let base_pred = j.predictive_by_index(base_idx).unwrap();
            for perm in perms3 {
                let permuted: Vec<usize> = perm.iter().map(|&k| draws[k]).collect();
                let idx = past.index_of(&permuted).unwrap();
                assert_eq!(marginal[base_idx], marginal[idx]);
                let pred = j.predictive_by_index(idx).unwrap();
                for f in 0..pred.len() {
                    assert_eq!(base_pred[f], pred[f]);
                }
            }
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let err = JointModel::with_size_cap(&World::w1(), 3, 3, 100).unwrap_err();
        assert!(matches!(err, PibError::SizeCapExceeded { .. }));
        assert!(JointModel::with_size_cap(&World::w1(), 3, 3, 200).is_ok());
    }

    #[test]
    fn zero_length_datasets_are_rejected() {
        assert!(JointModel::new(&World::w1(), 0, 1).is_err());
        assert!(JointModel::new(&World::w1(), 1, 0).is_err());
    }
}
