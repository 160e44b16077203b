//! Gradient-boosted regression trees with second-order split statistics.

use crate::ml::frame::SupervisedFrame;

/// Boosting configuration.
#[derive(Debug, Clone, Copy)]
pub struct BoostConfig {
    pub rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub l2_leaf_regularization: f64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            rounds: 100,
            learning_rate: 0.3,
            max_depth: 6,
            l2_leaf_regularization: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        weight: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct BoostTree {
    nodes: Vec<Node>,
}

impl BoostTree {
    fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { weight } => return *weight,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Additive ensemble: base score plus learning-rate-scaled round trees.
#[derive(Debug, Clone)]
pub struct BoostedModel {
    pub base_score: f64,
    pub learning_rate: f64,
    trees: Vec<BoostTree>,
    /// Training squared-error after each round; diagnostics and tests.
    pub round_mse: Vec<f64>,
}

impl BoostedModel {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let boost: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        self.base_score + self.learning_rate * boost
    }

    pub fn rounds(&self) -> usize {
        self.trees.len()
    }
}

/// Fit under squared loss. Per round, gradients are prediction minus
/// target and hessians are one; each tree maximizes the regularized gain
///   (G_L^2/(H_L+reg) + G_R^2/(H_R+reg) - (G_L+G_R)^2/(H_L+H_R+reg)) / 2
/// accepting only positive-gain splits down to the depth cap, and each
/// leaf contributes -G/(H+reg).
///
/// Squared loss keeps the hessians constant, but the split machinery
/// consumes general (g, h) statistics.
pub fn fit_boosted(frame: &SupervisedFrame, config: &BoostConfig, _seed: u64) -> BoostedModel {
    let targets = frame.targets();
    let n = frame.n_rows();
    let base_score = targets.iter().sum::<f64>() / n as f64;

    let mut predictions = vec![base_score; n];
    let mut gradients = vec![0.0f64; n];
    let hessians = vec![1.0f64; n];
    let mut trees = Vec::with_capacity(config.rounds);
    let mut round_mse = Vec::with_capacity(config.rounds);

    for _ in 0..config.rounds {
        for i in 0..n {
            gradients[i] = predictions[i] - targets[i];
        }
        let mut rows: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::new();
        grow(
            frame,
            &mut rows,
            &gradients,
            &hessians,
            config,
            0,
            &mut nodes,
        );
        let tree = BoostTree { nodes };
        for i in 0..n {
            predictions[i] += config.learning_rate * tree.predict(frame.row(i));
        }
        round_mse.push(
            predictions
                .iter()
                .zip(targets)
                .map(|(p, y)| (p - y).powi(2))
                .sum::<f64>()
                / n as f64,
        );
        trees.push(tree);
    }

    BoostedModel {
        base_score,
        learning_rate: config.learning_rate,
        trees,
        round_mse,
    }
}

#[allow(clippy::too_many_arguments)]
fn grow(
    frame: &SupervisedFrame,
    rows: &mut [usize],
    gradients: &[f64],
    hessians: &[f64],
    config: &BoostConfig,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let grad_sum: f64 = rows.iter().map(|r| gradients[*r]).sum();
    let hess_sum: f64 = rows.iter().map(|r| hessians[*r]).sum();
    let reg = config.l2_leaf_regularization;

    let leaf = |nodes: &mut Vec<Node>| -> usize {
        nodes.push(Node::Leaf {
            weight: -grad_sum / (hess_sum + reg),
        });
        nodes.len() - 1
    };

    if depth >= config.max_depth || rows.len() < 2 {
        return leaf(nodes);
    }
    let Some((feature, threshold)) = best_gain_split(frame, rows, gradients, hessians, reg) else {
        return leaf(nodes);
    };

    let mut pivot = 0usize;
    for i in 0..rows.len() {
        if frame.row(rows[i])[feature] <= threshold {
            rows.swap(i, pivot);
            pivot += 1;
        }
    }
    let here = nodes.len();
    nodes.push(Node::Leaf { weight: 0.0 }); // placeholder
    let (left_rows, right_rows) = rows.split_at_mut(pivot);
    let left = grow(frame, left_rows, gradients, hessians, config, depth + 1, nodes);
    let right = grow(frame, right_rows, gradients, hessians, config, depth + 1, nodes);
    nodes[here] = Node::Split {
        feature,
        threshold,
        left,
        right,
    };
    here
}

/// Best positive-gain split over all features and distinct-value
/// midpoints; ties keep the lowest feature index, then lowest threshold.
fn best_gain_split(
    frame: &SupervisedFrame,
    rows: &[usize],
    gradients: &[f64],
    hessians: &[f64],
    reg: f64,
) -> Option<(usize, f64)> {
    let total_g: f64 = rows.iter().map(|r| gradients[*r]).sum();
    let total_h: f64 = rows.iter().map(|r| hessians[*r]).sum();
    let parent_term = total_g * total_g / (total_h + reg);

    let mut best: Option<(usize, f64, f64)> = None;
    let mut pairs: Vec<(f64, f64, f64)> = Vec::with_capacity(rows.len());
    for feature in 0..frame.width() {
        pairs.clear();
        pairs.extend(
            rows.iter()
                .map(|r| (frame.row(*r)[feature], gradients[*r], hessians[*r])),
        );
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let mut left_g = 0.0;
        let mut left_h = 0.0;
        for k in 1..pairs.len() {
            left_g += pairs[k - 1].1;
            left_h += pairs[k - 1].2;
            if pairs[k - 1].0 == pairs[k].0 {
                continue;
            }
            let right_g = total_g - left_g;
            let right_h = total_h - left_h;
            let gain = 0.5
                * (left_g * left_g / (left_h + reg) + right_g * right_g / (right_h + reg)
                    - parent_term);
            if gain > 0.0 && best.is_none_or(|(_, _, g)| gain > g) {
                best = Some((feature, 0.5 * (pairs[k - 1].0 + pairs[k].0), gain));
            }
        }
    }
    best.map(|(f, t, _)| (f, t))
}
