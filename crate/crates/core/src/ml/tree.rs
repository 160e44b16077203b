//! Greedy regression trees split on squared-error reduction.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ml::frame::SupervisedFrame;

/// How a tree is grown.
#[derive(Debug, Clone, Copy)]
pub struct TreeConfig {
    /// Candidate features drawn per node; all features when absent.
    pub mtry: Option<usize>,
    pub max_depth: Option<usize>,
    /// Minimum training rows in each child of an accepted split.
    pub min_leaf: usize,
    /// Nodes smaller than this become leaves without a split attempt.
    pub min_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            mtry: None,
            max_depth: None,
            min_leaf: 5,
            min_split: 10,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        prediction: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary regression tree; leaves predict the mean of their training
/// targets, so predictions always stay inside the training target range.
#[derive(Debug, Clone)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { prediction } => return *prediction,
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

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}

/// The split chosen for one node, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    /// Sum of child squared errors after the split.
    pub children_sse: f64,
}

/// Grow a tree on the frame. `rng` drives the per-node feature draws when
/// `mtry` restricts candidates; with all features in play the result is
/// rng-independent.
pub fn fit_tree(frame: &SupervisedFrame, config: &TreeConfig, rng: &mut ChaCha8Rng) -> RegressionTree {
    let mut rows: Vec<usize> = (0..frame.n_rows()).collect();
    fit_tree_on_rows(frame, &mut rows, config, rng)
}

/// Grow a tree on an explicit multiset of row indices (bootstrap entry).
pub fn fit_tree_on_rows(
    frame: &SupervisedFrame,
    rows: &mut [usize],
    config: &TreeConfig,
    rng: &mut ChaCha8Rng,
) -> RegressionTree {
    let mut nodes = Vec::new();
    grow(frame, rows, config, rng, 0, &mut nodes);
    RegressionTree { nodes }
}

fn grow(
    frame: &SupervisedFrame,
    rows: &mut [usize],
    config: &TreeConfig,
    rng: &mut ChaCha8Rng,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let targets = frame.targets();
    let n = rows.len();
    let sum: f64 = rows.iter().map(|r| targets[*r]).sum();
    let mean = sum / n as f64;

    let depth_capped = config.max_depth.is_some_and(|cap| depth >= cap);
    if n < config.min_split || depth_capped {
        nodes.push(Node::Leaf { prediction: mean });
        return nodes.len() - 1;
    }

    let parent_sse: f64 = rows.iter().map(|r| (targets[*r] - mean).powi(2)).sum();
    let Some(split) = best_split(frame, rows, config, rng) else {
        nodes.push(Node::Leaf { prediction: mean });
        return nodes.len() - 1;
    };
    if !(split.children_sse < parent_sse) {
        nodes.push(Node::Leaf { prediction: mean });
        return nodes.len() - 1;
    }

    let pivot = partition(frame, rows, split.feature, split.threshold);
    let here = nodes.len();
    nodes.push(Node::Leaf { prediction: mean }); // placeholder
    let (left_rows, right_rows) = rows.split_at_mut(pivot);
    let left = grow(frame, left_rows, config, rng, depth + 1, nodes);
    let right = grow(frame, right_rows, config, rng, depth + 1, nodes);
    nodes[here] = Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left,
        right,
    };
    here
}

fn partition(frame: &SupervisedFrame, rows: &mut [usize], feature: usize, threshold: f64) -> usize {
    let mut pivot = 0usize;
    for i in 0..rows.len() {
        if frame.row(rows[i])[feature] <= threshold {
            rows.swap(i, pivot);
            pivot += 1;
        }
    }
    pivot
}

/// Exact greedy split search: midpoints between consecutive distinct
/// values of each candidate feature, scored by the sum of child squared
/// errors. Ties keep the lowest feature index, then the lowest threshold
/// (candidates are scanned in exactly that order and only strict
/// improvements replace the incumbent).
pub fn best_split(
    frame: &SupervisedFrame,
    rows: &[usize],
    config: &TreeConfig,
    rng: &mut ChaCha8Rng,
) -> Option<SplitChoice> {
    let width = frame.width();
    let features: Vec<usize> = match config.mtry {
        Some(m) if m < width => sample_features(width, m, rng),
        _ => (0..width).collect(),
    };

    let targets = frame.targets();
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
    let mut best: Option<SplitChoice> = None;

    for &feature in &features {
        pairs.clear();
        pairs.extend(
            rows.iter()
                .map(|r| (frame.row(*r)[feature], targets[*r])),
        );
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let total_sum: f64 = pairs.iter().map(|(_, y)| y).sum();
        let total_sq: f64 = pairs.iter().map(|(_, y)| y * y).sum();
        let n = pairs.len();

        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for k in 1..n {
            left_sum += pairs[k - 1].1;
            left_sq += pairs[k - 1].1 * pairs[k - 1].1;
            if pairs[k - 1].0 == pairs[k].0 {
                continue;
            }
            if k < config.min_leaf || n - k < config.min_leaf {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let children_sse = (left_sq - left_sum * left_sum / k as f64)
                + (right_sq - right_sum * right_sum / (n - k) as f64);
            if best.as_ref().is_none_or(|b| children_sse < b.children_sse) {
                best = Some(SplitChoice {
                    feature,
                    threshold: 0.5 * (pairs[k - 1].0 + pairs[k].0),
                    children_sse,
                });
            }
        }
    }
    best
}

/// Draw `m` distinct feature indices, reported in ascending order so the
/// split scan keeps its deterministic tie behavior.
fn sample_features(width: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..width).collect();
    for i in 0..m {
        let j = i + rng.gen_range(0..pool.len() - i);
        pool.swap(i, j);
    }
    let mut chosen = pool[..m].to_vec();
    chosen.sort_unstable();
    chosen
}
