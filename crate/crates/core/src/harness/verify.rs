use serde::{Deserialize, Serialize};

use crate::localcore::is_sorted;

/// Outcome of checking a distributed sort against its input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Every rank's output is non-decreasing.
    pub sorted_ok: bool,
    /// The last element of each non-empty rank is `<=` the first element of
    /// the next non-empty rank.
    pub boundary_ok: bool,
    /// Outputs hold exactly the input multiset.
    pub multiset_ok: bool,
    /// `max_i |m_i - n/p|` over the output counts `m_i`.
    pub imbalance: f64,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.sorted_ok && self.boundary_ok && self.multiset_ok
    }
}

pub fn imbalance(counts: impl IntoIterator<Item = usize>) -> f64 {
    let counts: Vec<usize> = counts.into_iter().collect();
    if counts.is_empty() {
        return 0.0;
    }
    let ideal = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    counts.iter().map(|&m| (m as f64 - ideal).abs()).fold(0.0, f64::max)
}

pub fn verify<K: Ord + Clone>(inputs: &[Vec<K>], outputs: &[Vec<K>]) -> VerifyReport {
    let sorted_ok = outputs.iter().all(|o| is_sorted(o));
    let mut boundary_ok = true;
    let mut last: Option<&K> = None;
    for out in outputs.iter().filter(|o| !o.is_empty()) {
        if let Some(prev) = last {
            if prev > &out[0] {
                boundary_ok = false;
            }
        }
        last = out.last();
    }
    let mut expected: Vec<K> = inputs.iter().flatten().cloned().collect();
    expected.sort_unstable();
    let mut actual: Vec<K> = outputs.iter().flatten().cloned().collect();
    actual.sort_unstable();
    VerifyReport {
        sorted_ok,
        boundary_ok,
        multiset_ok: expected == actual,
        imbalance: imbalance(outputs.iter().map(Vec::len)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_blocks_pass() {
        let inputs = vec![vec![5i64, 2, 7], vec![1, 8, 3]];
        let outputs = vec![vec![1i64, 2, 3], vec![5, 7, 8]];
        let r = verify(&inputs, &outputs);
        assert!(r.all_ok());
        assert_eq!(r.imbalance, 0.0);
    }

    #[test]
    fn swapped_pair_across_boundary() {
        let inputs = vec![vec![1i64, 2, 3], vec![4, 5, 6]];
        let outputs = vec![vec![1i64, 2, 4], vec![3, 5, 6]];
        let r = verify(&inputs, &outputs);
        assert!(r.sorted_ok);
        assert!(!r.boundary_ok);
        assert!(r.multiset_ok);
    }

    #[test]
    fn lost_element_and_unsorted_rank() {
        let inputs = vec![vec![1i64, 2], vec![3, 4]];
        let r = verify(&inputs, &[vec![2i64, 1], vec![3]]);
        assert!(!r.sorted_ok);
        assert!(!r.multiset_ok);
        assert_eq!(r.imbalance, 0.5);
    }

    #[test]
    fn empty_ranks_are_skipped_at_boundaries() {
        let inputs = vec![vec![1i64], vec![], vec![2]];
        let r = verify(&inputs, &[vec![1i64], vec![], vec![2]]);
        assert!(r.all_ok());
    }
}
