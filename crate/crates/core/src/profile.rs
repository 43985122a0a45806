use std::cmp::Ordering;

use crate::real::Real;

/// Profile-index sentinel for a window that has no recorded neighbor yet.
pub const NONE: usize = usize::MAX;

/// How equal-distance candidates compete for a profile entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// `(distance, neighbor)` lexicographic minimum. Independent of the order
    /// cells are visited in, so results do not depend on the schedule.
    #[default]
    LowestIndex,
    /// Plain `d < P`: the first candidate seen at a given distance is kept.
    /// Which one that is depends on the schedule and worker count.
    FirstSeen,
}

/// Matrix profile `P` with its index `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T = f64> {
    pub m: usize,
    pub distances: Vec<T>,
    pub indices: Vec<usize>,
}

impl<T: Real> Profile<T> {
    /// All entries at `+∞` with index [`NONE`].
    pub fn new(len: usize, m: usize) -> Self {
        Self {
            m,
            distances: vec![T::infinity(); len],
            indices: vec![NONE; len],
        }
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Offer neighbor `j` at distance `d` to entry `i`.
    #[inline(always)]
    pub fn offer(&mut self, i: usize, d: T, j: usize, rule: TieRule) {
        offer_one(&mut self.distances[i], &mut self.indices[i], d, j, rule);
    }

    /// Two disjoint runs `[a, a + w)` and `[b, b + w)` with `a + w <= b`,
    /// each offered the other's positions as neighbors.
    #[inline(always)]
    pub(crate) fn offer_pair_runs(&mut self, a: usize, b: usize, ds: &[T], rule: TieRule) {
        let w = ds.len();
        debug_assert!(a + w <= b);
        let (lo_d, hi_d) = self.distances.split_at_mut(b);
        let (lo_i, hi_i) = self.indices.split_at_mut(b);
        offer_lanes(&mut lo_d[a..a + w], &mut lo_i[a..a + w], ds, b, rule);
        offer_lanes(&mut hi_d[..w], &mut hi_i[..w], ds, a, rule);
    }

    /// Neighbor of entry `i`, if one has been recorded.
    pub fn neighbor(&self, i: usize) -> Option<usize> {
        match self.indices[i] {
            NONE => None,
            j => Some(j),
        }
    }

    /// Same profile with distances widened or narrowed to `U`.
    pub fn convert<U: Real>(&self) -> Profile<U> {
        Profile {
            m: self.m,
            distances: self
                .distances
                .iter()
                .map(|d| U::from_f64(d.to_f64()))
                .collect(),
            indices: self.indices.clone(),
        }
    }

    /// Index and value of the smallest finite entry (the top motif).
    pub fn argmin(&self) -> Option<(usize, T)> {
        self.finite()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    }

    /// Index and value of the largest finite entry (the top discord). Ties
    /// resolve to the lowest index.
    pub fn argmax(&self) -> Option<(usize, T)> {
        self.finite().fold(None, |best, (i, d)| match best {
            Some((_, b)) if d <= b => best,
            _ => Some((i, d)),
        })
    }

    fn finite(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.distances
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, d)| d.to_f64().is_finite())
    }
}

#[inline(always)]
fn offer_one<T: Real>(cur: &mut T, idx: &mut usize, d: T, j: usize, rule: TieRule) {
    let take = match d.partial_cmp(cur) {
        Some(Ordering::Less) => true,
        Some(Ordering::Equal) => rule == TieRule::LowestIndex && j < *idx,
        _ => false,
    };
    if take {
        *cur = d;
        *idx = j;
    }
}

#[inline(always)]
fn offer_lanes<T: Real>(dist: &mut [T], idx: &mut [usize], ds: &[T], first: usize, rule: TieRule) {
    let w = ds.len();
    let (dist, idx) = (&mut dist[..w], &mut idx[..w]);
    for l in 0..w {
        offer_one(&mut dist[l], &mut idx[l], ds[l], first + l, rule);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_profile_is_all_sentinels() {
        let p = Profile::<f64>::new(5, 4);
        assert!(p.distances.iter().all(|d| d.is_infinite()));
        assert!(p.indices.iter().all(|&i| i == NONE));
        assert_eq!(p.argmax(), None);
    }

    #[test]
    fn offer_respects_tie_rule() {
        let mut p = Profile::<f64>::new(1, 4);
        p.offer(0, 1.0, 7, TieRule::LowestIndex);
        p.offer(0, 1.0, 3, TieRule::LowestIndex);
        p.offer(0, 1.0, 5, TieRule::LowestIndex);
        assert_eq!((p.distances[0], p.indices[0]), (1.0, 3));
        p.offer(0, 2.0, 0, TieRule::LowestIndex);
        assert_eq!(p.indices[0], 3);

        let mut q = Profile::<f64>::new(1, 4);
        q.offer(0, 1.0, 7, TieRule::FirstSeen);
        q.offer(0, 1.0, 3, TieRule::FirstSeen);
        assert_eq!(q.indices[0], 7);
    }

    #[test]
    fn extremes_skip_sentinels() {
        let p = Profile {
            m: 4,
            distances: vec![f64::INFINITY, 2.0, 0.5, 2.0],
            indices: vec![NONE, 3, 3, 1],
        };
        assert_eq!(p.argmin(), Some((2, 0.5)));
        assert_eq!(p.argmax(), Some((1, 2.0)));
        assert_eq!(p.neighbor(0), None);
        assert_eq!(p.neighbor(1), Some(3));
    }
}
