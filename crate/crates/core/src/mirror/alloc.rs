//! Enumeration of error allocations in canonical order.

use crate::grid::OverlapPartition;
use crate::rscode::MAX_CORRECTIONS;

use super::system::ErrorAllocation;

/// All `k`-subsets of `items`, lexicographic by position.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Advance the rightmost index that still has room.
        let Some(i) = (0..k).rev().find(|&i| idx[i] < items.len() - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Allocations over the bytes touched by conflicting cells, at most
/// [`MAX_CORRECTIONS`] per side.
///
/// Order: fewer allocated bytes first; within a size, fewer side-A bytes
/// first; then lexicographic on side A, then on side B. The first feasible
/// allocation in this order is the canonical one. A partition without
/// conflicts yields only the empty allocation.
pub fn enumerate_error_allocations(
    part: &OverlapPartition,
) -> impl Iterator<Item = ErrorAllocation> {
    let cand_a: Vec<usize> = part.conflict_bytes_a().into_iter().collect();
    let cand_b: Vec<usize> = part.conflict_bytes_b().into_iter().collect();
    let max_a = MAX_CORRECTIONS.min(cand_a.len());
    let max_b = MAX_CORRECTIONS.min(cand_b.len());
    (0..=max_a + max_b).flat_map(move |total| {
        let lo = total.saturating_sub(max_b);
        let hi = total.min(max_a);
        let (cand_a, cand_b) = (cand_a.clone(), cand_b.clone());
        (lo..=hi).flat_map(move |ka| {
            let combos_a = combinations(&cand_a, ka);
            let combos_b = combinations(&cand_b, total - ka);
            combos_a.into_iter().flat_map(move |a| {
                combos_b
                    .clone()
                    .into_iter()
                    .map(move |b| ErrorAllocation::new(a.clone(), b))
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::overlap_partition;

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(&[1, 2, 3], 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(&[4, 5], 0), vec![Vec::<usize>::new()]);
        assert!(combinations(&[4], 2).is_empty());
        assert_eq!(combinations(&(0..10).collect::<Vec<_>>(), 3).len(), 120);
    }

    #[test]
    fn counts_and_order() {
        let part = overlap_partition(41, 41).unwrap();
        let (na, nb) = (part.conflict_bytes_a().len(), part.conflict_bytes_b().len());
        let all: Vec<_> = enumerate_error_allocations(&part).collect();
        let expected: usize = (0..=3)
            .flat_map(|a| (0..=3).map(move |b| (a, b)))
            .map(|(a, b)| binom(na, a) * binom(nb, b))
            .sum();
        assert_eq!(all.len(), expected);
        assert!(all[0].is_empty());
        assert!(all.windows(2).all(|w| w[0].len() <= w[1].len()));
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        assert!(all
            .iter()
            .all(|a| a.side_a.len() <= 3 && a.side_b.len() <= 3));
        assert!(all
            .iter()
            .all(|a| a.side_a.is_subset(&part.conflict_bytes_a())));
    }
}
