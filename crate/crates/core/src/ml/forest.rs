//! Bootstrap ensembles of regression trees.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ml::frame::SupervisedFrame;
use crate::ml::tree::{fit_tree_on_rows, RegressionTree, TreeConfig};

pub const FOREST_TREE_COUNT: usize = 500;

/// A fitted forest; prediction is the mean over tree predictions.
#[derive(Debug, Clone)]
pub struct ForestModel {
    trees: Vec<RegressionTree>,
    pub mtry: usize,
    pub seed: u64,
}

impl ForestModel {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        sum / self.trees.len() as f64
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }
}

/// Default candidate-feature count: a third of the window, at least one.
pub fn default_mtry(width: usize) -> usize {
    (width / 3).max(1)
}

/// Grow 500 trees, each on an independent bootstrap resample of the rows
/// (with replacement, same size), sampling `mtry` candidate features per
/// node, minimum leaf size five, no depth cap.
///
/// Tree i draws from its own counter-derived stream of the seed, so a
/// parallel build is bit-identical to a serial one.
pub fn fit_forest(frame: &SupervisedFrame, seed: u64) -> ForestModel {
    fit_forest_with(frame, default_mtry(frame.width()), FOREST_TREE_COUNT, seed)
}

pub fn fit_forest_with(
    frame: &SupervisedFrame,
    mtry: usize,
    tree_count: usize,
    seed: u64,
) -> ForestModel {
    let config = TreeConfig {
        mtry: Some(mtry.clamp(1, frame.width())),
        max_depth: None,
        min_leaf: 5,
        min_split: 10,
    };
    let n = frame.n_rows();
    let trees: Vec<RegressionTree> = (0..tree_count)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64 + 1);
            let mut rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            fit_tree_on_rows(frame, &mut rows, &config, &mut rng)
        })
        .collect();
    ForestModel {
        trees,
        mtry: config.mtry.unwrap(),
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::frame::build_frame;
    use crate::series::TimeSeries;

    fn noise_frame(seed: u64, n: usize, w: usize) -> SupervisedFrame {
        let s = TimeSeries::new(crate::dgp::normal_stream(seed, n)).unwrap();
        build_frame(&s, w, false).unwrap()
    }

    #[test]
    fn constant_targets_predict_exactly() {
        let rows: Vec<(Vec<f64>, f64)> = (0..20).map(|i| (vec![i as f64, -(i as f64)], 4.0)).collect();
        let borrowed: Vec<(&[f64], f64)> = rows.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
        let f = SupervisedFrame::from_rows(&borrowed).unwrap();
        let forest = fit_forest_with(&f, 1, 25, 3);
        assert_eq!(forest.predict(&[100.0, 100.0]), 4.0);
    }

    #[test]
    fn mtry_defaults_follow_window() {
        assert_eq!(default_mtry(2), 1);
        assert_eq!(default_mtry(4), 1);
        assert_eq!(default_mtry(8), 2);
        assert_eq!(default_mtry(16), 5);
    }

    #[test]
    fn deterministic_across_runs() {
        let f = noise_frame(11, 120, 4);
        let a = fit_forest_with(&f, 1, 40, 9);
        let b = fit_forest_with(&f, 1, 40, 9);
        let probe = [0.3, -0.7, 1.1, 0.0];
        assert_eq!(a.predict(&probe), b.predict(&probe));
        let c = fit_forest_with(&f, 1, 40, 10);
        assert_ne!(a.predict(&probe), c.predict(&probe));
    }

    #[test]
    fn single_tree_forest_equals_that_tree() {
        let f = noise_frame(13, 150, 4);
        let forest = fit_forest_with(&f, 2, 1, 21);
        let probe = [0.5, 0.5, -0.5, 0.2];
        assert_eq!(forest.predict(&probe), forest.trees()[0].predict(&probe));
    }

    #[test]
    fn prediction_stays_in_target_range() {
        let f = noise_frame(17, 200, 8);
        let lo = f.targets().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = f.targets().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let forest = fit_forest_with(&f, 2, 60, 5);
        for probe_scale in [-50.0, -1.0, 0.0, 1.0, 50.0] {
            let row = vec![probe_scale; 8];
            let p = forest.predict(&row);
            assert!(p >= lo && p <= hi);
        }
    }

    #[test]
    fn feature_subsampling_increases_tree_spread() {
        // Bagging (mtry = w) lets every tree chase the same informative
        // feature, so trees agree; restricting candidates (mtry = 1)
        // forces diversity and widens the spread of tree predictions.
        let noise = crate::dgp::normal_stream(23, 300 * 5);
        let rows: Vec<(Vec<f64>, f64)> = (0..300)
            .map(|i| {
                let x: Vec<f64> = noise[i * 5..i * 5 + 4].to_vec();
                let y = 2.0 * x[3] + 0.3 * noise[i * 5 + 4];
                (x, y)
            })
            .collect();
        let borrowed: Vec<(&[f64], f64)> = rows.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
        let f = SupervisedFrame::from_rows(&borrowed).unwrap();

        let probe = [0.1, 0.2, -0.1, 0.4];
        let spread = |mtry: usize| -> f64 {
            let forest = fit_forest_with(&f, mtry, 120, 31);
            let preds: Vec<f64> = forest.trees().iter().map(|t| t.predict(&probe)).collect();
            let mean = preds.iter().sum::<f64>() / preds.len() as f64;
            preds.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / preds.len() as f64
        };
        let restricted = spread(1);
        let bagging = spread(4);
        assert!(
            restricted > bagging,
            "tree variance {restricted} (mtry=1) vs {bagging} (mtry=w)"
        );
    }
}
