//! Random forest of Gini-split trees grown to purity on bootstrap samples.

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::argmax;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestOptions {
    pub n_trees: usize,
    /// Features tried per split; `None` means `floor(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestOptions {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_features: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { class: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub n_classes: usize,
}

impl ForestModel {
    /// Fraction of trees voting for each class.
    pub fn votes(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.n_classes];
        for t in &self.trees {
            v[t.predict(x)] += 1.0;
        }
        let n = self.trees.len().max(1) as f64;
        v.iter_mut().for_each(|c| *c /= n);
        v
    }

    /// Majority vote; ties go to the lowest class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.votes(x))
    }
}

/// Trains `n_trees` trees on class indices `< n_classes`. Tree `t` draws from
/// its own stream of the seeded generator, so results do not depend on
/// evaluation order.
pub fn rf_train(x: ArrayView2<'_, f64>, labels: &[usize], n_classes: usize, opts: &ForestOptions, seed: u64) -> Result<ForestModel> {
    let (n, d) = x.dim();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
    }
    if n < 2 || d == 0 {
        return Err(Error::invalid("random forest needs at least two rows and one feature"));
    }
    if labels.iter().any(|&l| l >= n_classes) {
        return Err(Error::invalid("label out of range"));
    }
    if opts.n_trees == 0 {
        return Err(Error::invalid("random forest needs at least one tree"));
    }
    let mtry = opts.max_features.unwrap_or(((d as f64).sqrt().floor() as usize).max(1)).clamp(1, d);
    let trees = (0..opts.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let sample: Vec<usize> = if opts.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(x, labels, n_classes, sample, mtry, &mut rng)
        })
        .collect();
    Ok(ForestModel { trees, n_classes })
}

fn majority(labels: &[usize], rows: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0.0; n_classes];
    for &r in rows {
        counts[labels[r]] += 1.0;
    }
    argmax(&counts)
}

struct Best {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

/// Lowest weighted Gini impurity `n_L g_L + n_R g_R` over splits of `feature`.
fn best_split(x: ArrayView2<'_, f64>, labels: &[usize], n_classes: usize, rows: &mut [usize], feature: usize) -> Option<Best> {
    rows.sort_by(|&a, &b| x[[a, feature]].total_cmp(&x[[b, feature]]));
    let n = rows.len();
    let mut right = vec![0usize; n_classes];
    for &r in rows.iter() {
        right[labels[r]] += 1;
    }
    let mut left = vec![0usize; n_classes];
    let sq = |c: &[usize]| c.iter().map(|&v| (v * v) as f64).sum::<f64>();
    let mut best: Option<Best> = None;
    for p in 1..n {
        let l = labels[rows[p - 1]];
        left[l] += 1;
        right[l] -= 1;
        let (a, b) = (x[[rows[p - 1], feature]], x[[rows[p], feature]]);
        if b <= a {
            continue;
        }
        let impurity = (p as f64 - sq(&left) / p as f64) + ((n - p) as f64 - sq(&right) / (n - p) as f64);
        if best.as_ref().is_none_or(|bst| impurity < bst.impurity) {
            best = Some(Best {
                impurity,
                feature,
                threshold: a + (b - a) / 2.0,
            });
        }
    }
    best
}

fn grow(x: ArrayView2<'_, f64>, labels: &[usize], n_classes: usize, sample: Vec<usize>, mtry: usize, rng: &mut ChaCha8Rng) -> Tree {
    let d = x.ncols();
    let mut nodes = vec![Node::Leaf { class: 0 }];
    let mut stack = vec![(0usize, sample)];
    let mut features: Vec<usize> = (0..d).collect();
    while let Some((at, mut rows)) = stack.pop() {
        let first = labels[rows[0]];
        if rows.iter().all(|&r| labels[r] == first) {
            nodes[at] = Node::Leaf { class: first };
            continue;
        }
        features.shuffle(rng);
        let mut chosen: Option<Best> = None;
        for (tried, &f) in features.iter().enumerate() {
            if tried >= mtry && chosen.is_some() {
                break;
            }
            if let Some(b) = best_split(x, labels, n_classes, &mut rows, f) {
                let better = match &chosen {
                    None => true,
                    Some(c) => b.impurity < c.impurity || (b.impurity == c.impurity && b.feature < c.feature),
                };
                if better {
                    chosen = Some(b);
                }
            }
        }
        let Some(b) = chosen else {
            nodes[at] = Node::Leaf {
                class: majority(labels, &rows, n_classes),
            };
            continue;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[[i, b.feature]] <= b.threshold);
        let (li, ri) = (nodes.len(), nodes.len() + 1);
        nodes.push(Node::Leaf { class: 0 });
        nodes.push(Node::Leaf { class: 0 });
        nodes[at] = Node::Split {
            feature: b.feature,
            threshold: b.threshold,
            left: li,
            right: ri,
        };
        stack.push((ri, r));
        stack.push((li, l));
    }
    Tree { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn single_tree_memorizes_in_bag_rows() {
        let x = array![[0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0], [0.5, 0.5], [0.2, 0.7]];
        let y = [0, 1, 2, 3, 1, 0];
        let opts = ForestOptions {
            n_trees: 1,
            bootstrap: false,
            ..ForestOptions::default()
        };
        let f = rf_train(x.view(), &y, 4, &opts, 9).unwrap();
        for (r, &l) in x.rows().into_iter().zip(&y) {
            assert_eq!(f.predict(&r.to_vec()), l);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]];
        let y = [0, 0, 1, 1, 2, 2];
        let a = rf_train(x.view(), &y, 3, &ForestOptions::default(), 4).unwrap();
        let b = rf_train(x.view(), &y, 3, &ForestOptions::default(), 4).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn constant_features_make_a_majority_leaf() {
        let x = array![[1.0], [1.0], [1.0]];
        let f = rf_train(x.view(), &[2, 0, 2], 3, &ForestOptions { n_trees: 1, bootstrap: false, ..Default::default() }, 0).unwrap();
        assert_eq!(f.trees[0].nodes, vec![Node::Leaf { class: 2 }]);
    }
}
