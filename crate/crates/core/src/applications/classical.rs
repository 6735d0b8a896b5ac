use alloc::vec::Vec;

use crate::channels::StochasticMatrix;
use crate::error::{Error, Result};

/// Transition probabilities at or below this count as zero.
pub const CONFUSABILITY_EPS: f64 = 1e-12;

/// Disjoint classes covering `0..n`, each sorted, ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `j`.
    pub fn class_of(&self, j: usize) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.binary_search(&j).is_ok())
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Classes of inputs that some output cannot tell apart: `j ~ k` when
/// `p[i][j] > eps` and `p[i][k] > eps` for some `i`, closed transitively.
pub fn confusability_classes(p: &StochasticMatrix, eps: f64) -> Partition {
    let n = p.cols();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..p.rows() {
        let mut first = None;
        for j in 0..n {
            if p.get(i, j) > eps {
                match first {
                    None => first = Some(j),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, j));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot = alloc::vec![usize::MAX; n];
    for j in 0..n {
        let root = find(&mut parent, j);
        if slot[root] == usize::MAX {
            slot[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[root]].push(j);
    }
    Partition { classes }
}

/// Whether the observable `diag(alpha)` survives `p`: `alpha` must be constant
/// (within `eps`) on every confusability class.
pub fn classical_correctable(p: &StochasticMatrix, alpha: &[f64], eps: f64) -> Result<bool> {
    if alpha.len() != p.cols() {
        return Err(Error::DimensionMismatch {
            context: "observable length",
            expected: p.cols(),
            found: alpha.len(),
        });
    }
    let partition = confusability_classes(p, CONFUSABILITY_EPS);
    Ok(partition.classes().iter().all(|class| {
        let (lo, hi) = class
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &j| {
                (lo.min(alpha[j]), hi.max(alpha[j]))
            });
        hi - lo <= eps
    }))
}
