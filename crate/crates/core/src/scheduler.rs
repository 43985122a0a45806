//! Static partition of the distance matrix's diagonals across workers.
//!
//! Diagonal `k` holds cells `(i, i + k)` and has `windows - k` of them.
//! Offsets `0..=exclusion` are never computed. The rest are joined
//! outermost-first into pairs `(k1, k2)` with `k1 + k2 = windows + exclusion`,
//! so every pair covers exactly `windows - exclusion` cells, and the pairs
//! are dealt round-robin. With an odd number of diagonals the middle one is
//! left unpaired and goes to the least-loaded worker.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{validate_exclusion, DiagonalOrder};
use crate::error::{Error, Result};
use crate::series::check_window;

/// One unit of dealt work: two complementary diagonals, or the lone middle one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalPair {
    Pair(usize, usize),
    Middle(usize),
}

impl DiagonalPair {
    pub fn offsets(self) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            DiagonalPair::Pair(a, b) => (a, Some(b)),
            DiagonalPair::Middle(a) => (a, None),
        };
        std::iter::once(a).chain(b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSchedule {
    windows: usize,
    exclusion: usize,
    order: DiagonalOrder,
    pairs: Vec<Vec<DiagonalPair>>,
    assignments: Vec<Vec<usize>>,
}

/// Builds the per-worker diagonal lists for a series of length `n`.
pub fn schedule_diagonals(
    n: usize,
    m: usize,
    exclusion: usize,
    workers: usize,
    order: DiagonalOrder,
) -> Result<DiagonalSchedule> {
    if workers == 0 {
        return Err(Error::NoWorkers);
    }
    check_window(n, m)?;
    validate_exclusion(n, m, exclusion)?;
    let windows = n - m + 1;

    let mut pairs = vec![Vec::new(); workers];
    let mut load = vec![0usize; workers];
    let target = windows - exclusion;
    let (mut lo, mut hi) = (exclusion + 1, windows - 1);
    let mut dealt = 0;
    while lo < hi {
        let w = dealt % workers;
        pairs[w].push(DiagonalPair::Pair(lo, hi));
        load[w] += target;
        dealt += 1;
        lo += 1;
        hi -= 1;
    }
    if lo == hi {
        // min_by_key returns the first minimum, i.e. the lowest worker id
        let (w, _) = load.iter().enumerate().min_by_key(|(_, &l)| l).unwrap();
        pairs[w].push(DiagonalPair::Middle(lo));
    }

    let assignments = pairs
        .iter()
        .enumerate()
        .map(|(w, ps)| {
            let mut list: Vec<usize> = ps.iter().flat_map(|p| p.offsets()).collect();
            match order {
                DiagonalOrder::Sequential => list.sort_unstable(),
                DiagonalOrder::Random { seed } => {
                    list.shuffle(&mut ChaCha8Rng::seed_from_u64(worker_seed(seed, w)))
                }
            }
            list
        })
        .collect();

    Ok(DiagonalSchedule {
        windows,
        exclusion,
        order,
        pairs,
        assignments,
    })
}

fn worker_seed(seed: u64, worker: usize) -> u64 {
    seed ^ (worker as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

impl DiagonalSchedule {
    pub fn workers(&self) -> usize {
        self.assignments.len()
    }

    /// Profile length `n - m + 1`.
    pub fn windows(&self) -> usize {
        self.windows
    }

    pub fn exclusion(&self) -> usize {
        self.exclusion
    }

    pub fn order(&self) -> DiagonalOrder {
        self.order
    }

    /// Cells covered by every full pair: `windows - exclusion`.
    pub fn target(&self) -> usize {
        self.windows - self.exclusion
    }

    /// Offsets for `worker` in the order they will be computed.
    pub fn assignment(&self, worker: usize) -> &[usize] {
        &self.assignments[worker]
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    /// Pairs dealt to `worker`, in dealing order.
    pub fn pairs(&self, worker: usize) -> &[DiagonalPair] {
        &self.pairs[worker]
    }

    pub fn diagonal_len(&self, offset: usize) -> usize {
        self.windows - offset
    }

    /// Cells assigned to `worker`.
    pub fn cells(&self, worker: usize) -> usize {
        self.assignments[worker]
            .iter()
            .map(|&k| self.diagonal_len(k))
            .sum()
    }

    pub fn total_diagonals(&self) -> usize {
        self.windows - 1 - self.exclusion
    }

    pub fn total_cells(&self) -> usize {
        (self.exclusion + 1..self.windows)
            .map(|k| self.diagonal_len(k))
            .sum()
    }

    /// How many diagonals each worker may run so that, together, they run
    /// the first `budget` entries of the round-robin interleaving of all
    /// lists (step 0 of every worker, then step 1, ...). Growing the budget
    /// only ever adds diagonals.
    pub fn quotas(&self, budget: usize) -> Vec<usize> {
        let mut quotas = vec![0; self.workers()];
        let mut left = budget;
        let mut step = 0;
        while left > 0 {
            let mut any = false;
            for (w, list) in self.assignments.iter().enumerate() {
                if left == 0 {
                    break;
                }
                if step < list.len() {
                    quotas[w] += 1;
                    left -= 1;
                    any = true;
                }
            }
            if !any {
                break;
            }
            step += 1;
        }
        quotas
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pairing_walkthrough() {
        let s = schedule_diagonals(13, 4, 1, 2, DiagonalOrder::Sequential).unwrap();
        assert_eq!(s.target(), 9);
        assert_eq!(
            s.pairs(0),
            &[DiagonalPair::Pair(2, 9), DiagonalPair::Pair(4, 7)]
        );
        assert_eq!(
            s.pairs(1),
            &[DiagonalPair::Pair(3, 8), DiagonalPair::Pair(5, 6)]
        );
        assert_eq!(s.assignment(0), &[2, 4, 7, 9]);
        assert_eq!(s.assignment(1), &[3, 5, 6, 8]);
        assert_eq!((s.cells(0), s.cells(1)), (18, 18));
    }

    #[test]
    fn single_worker_gets_everything() {
        let s = schedule_diagonals(40, 8, 2, 1, DiagonalOrder::Random { seed: 9 }).unwrap();
        let mut all = s.assignment(0).to_vec();
        all.sort_unstable();
        assert_eq!(all, (3..33).collect::<Vec<_>>());
    }

    #[test]
    fn odd_count_middle_goes_to_least_loaded() {
        // offsets 2..=8: pairs (2,8) (3,7) (4,6), middle 5
        let s = schedule_diagonals(12, 4, 1, 2, DiagonalOrder::Sequential).unwrap();
        assert_eq!(s.windows(), 9);
        assert_eq!(
            s.pairs(0),
            &[DiagonalPair::Pair(2, 8), DiagonalPair::Pair(4, 6)]
        );
        assert_eq!(
            s.pairs(1),
            &[DiagonalPair::Pair(3, 7), DiagonalPair::Middle(5)]
        );
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert_eq!(
            schedule_diagonals(13, 4, 1, 0, DiagonalOrder::Sequential),
            Err(Error::NoWorkers)
        );
        assert!(schedule_diagonals(13, 4, 9, 2, DiagonalOrder::Sequential).is_err());
    }

    #[test]
    fn balance_by_exhaustive_count() {
        let s = schedule_diagonals(1000, 16, 4, 7, DiagonalOrder::Random { seed: 1 }).unwrap();
        let cells: Vec<usize> = (0..7).map(|w| s.cells(w)).collect();
        let brute: usize = (5..=984).map(|k| 985 - k).sum();
        assert_eq!(cells.iter().sum::<usize>(), brute);
        let spread = cells.iter().max().unwrap() - cells.iter().min().unwrap();
        assert!(spread <= s.target(), "{cells:?}");
    }

    #[test]
    fn quotas_are_monotone_prefixes() {
        let s = schedule_diagonals(100, 8, 2, 3, DiagonalOrder::Random { seed: 4 }).unwrap();
        let total = s.total_diagonals();
        assert_eq!(s.quotas(0), vec![0, 0, 0]);
        assert_eq!(s.quotas(4), vec![2, 1, 1]);
        let full = s.quotas(total + 10);
        assert_eq!(
            full,
            (0..3).map(|w| s.assignment(w).len()).collect::<Vec<_>>()
        );
        for b in 0..total {
            let (a, c) = (s.quotas(b), s.quotas(b + 1));
            assert_eq!(c.iter().sum::<usize>(), b + 1);
            assert!(a.iter().zip(&c).all(|(x, y)| x <= y));
        }
    }

    proptest! {
        #[test]
        fn partition_and_balance(
            n in 10usize..600,
            m in 4usize..64,
            workers in 1usize..12,
            seed in any::<u64>(),
            sequential in any::<bool>(),
        ) {
            prop_assume!(m + 2 <= n);
            let exclusion = m / 4;
            prop_assume!(exclusion < n - m);
            let order = if sequential { DiagonalOrder::Sequential } else { DiagonalOrder::Random { seed } };
            let s = schedule_diagonals(n, m, exclusion, workers, order).unwrap();

            let mut all: Vec<usize> = s.assignments().iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (exclusion + 1..=n - m).collect::<Vec<_>>());

            let cells: Vec<usize> = (0..workers).map(|w| s.cells(w)).collect();
            prop_assert!(cells.iter().max().unwrap() - cells.iter().min().unwrap() <= s.target());

            let mut middles = 0;
            for w in 0..workers {
                for p in s.pairs(w) {
                    match *p {
                        DiagonalPair::Pair(a, b) => {
                            prop_assert_eq!(s.diagonal_len(a) + s.diagonal_len(b), s.target())
                        }
                        DiagonalPair::Middle(_) => middles += 1,
                    }
                }
            }
            prop_assert!(middles <= 1);

            // shuffle is a permutation of the sequential list, and reproducible
            let seq = schedule_diagonals(n, m, exclusion, workers, DiagonalOrder::Sequential).unwrap();
            for w in 0..workers {
                let mut sorted = s.assignment(w).to_vec();
                sorted.sort_unstable();
                prop_assert_eq!(&sorted[..], seq.assignment(w));
            }
            prop_assert_eq!(&s, &schedule_diagonals(n, m, exclusion, workers, order).unwrap());
        }
    }
}
