use std::cmp::Ordering;
use std::fmt;

/// Largest supported base dimension.
pub const MAX_DIM: usize = 8;

/// Symmetric multi-index: a multiplicity for each base direction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex {
    counts: [u8; MAX_DIM],
}

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex { counts: [0; MAX_DIM] };

    pub fn new() -> Self {
        Self::EMPTY
    }

    pub fn single(direction: usize) -> Self {
        Self::EMPTY.plus(direction)
    }

    /// Builds a multi-index from a sequence of directions in any order.
    pub fn from_directions<I: IntoIterator<Item = usize>>(dirs: I) -> Self {
        dirs.into_iter().fold(Self::EMPTY, |m, d| m.plus(d))
    }

    pub fn order(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn count(&self, direction: usize) -> usize {
        self.counts[direction] as usize
    }

    /// Λ + λ.
    pub fn plus(&self, direction: usize) -> Self {
        assert!(direction < MAX_DIM, "direction {direction} out of range");
        let mut out = *self;
        out.counts[direction] = out.counts[direction]
            .checked_add(1)
            .expect("multi-index multiplicity overflow");
        out
    }

    /// Λ − λ, if λ occurs in Λ.
    pub fn minus(&self, direction: usize) -> Option<Self> {
        if direction >= MAX_DIM || self.counts[direction] == 0 {
            return None;
        }
        let mut out = *self;
        out.counts[direction] -= 1;
        Some(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        for (c, o) in out.counts.iter_mut().zip(other.counts.iter()) {
            *c = c.checked_add(*o).expect("multi-index multiplicity overflow");
        }
        out
    }

    /// Other − self when self ⊆ other.
    pub fn difference(&self, other: &Self) -> Option<Self> {
        let mut out = *other;
        for (c, s) in out.counts.iter_mut().zip(self.counts.iter()) {
            *c = c.checked_sub(*s)?;
        }
        Some(out)
    }

    /// Non-decreasing direction sequence.
    pub fn directions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.order());
        for (d, &c) in self.counts.iter().enumerate() {
            for _ in 0..c {
                out.push(d);
            }
        }
        out
    }

    /// Smallest direction present.
    pub fn first(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c > 0)
    }

    pub fn max_direction(&self) -> Option<usize> {
        self.counts.iter().rposition(|&c| c > 0)
    }

    /// All multi-indices over `n` directions with order exactly `k`.
    pub fn all_of_order(n: usize, k: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, start: usize, left: usize, cur: MultiIndex, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(cur);
                return;
            }
            for d in start..n {
                rec(n, d, left - 1, cur.plus(d), out);
            }
        }
        let mut out = Vec::new();
        rec(n, 0, k, Self::EMPTY, &mut out);
        out.sort();
        out
    }

    /// All multi-indices over `n` directions with order at most `k`.
    pub fn all_up_to(n: usize, k: usize) -> Vec<MultiIndex> {
        (0..=k).flat_map(|o| Self::all_of_order(n, o)).collect()
    }
}

impl Ord for MultiIndex {
    /// Lexicographic on the non-decreasing direction sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        for d in 0..MAX_DIM {
            let a = self.counts[d];
            let b = other.counts[d];
            if a == b {
                continue;
            }
            let (shorter, sign) = if a > b { (other, Ordering::Less) } else { (self, Ordering::Greater) };
            // The shorter run is followed by a larger direction or by the end.
            let has_more = shorter.counts[d + 1..].iter().any(|&c| c > 0);
            return if has_more { sign } else { sign.reverse() };
        }
        Ordering::Equal
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.directions())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
        a.directions().cmp(&b.directions())
    }

    #[test]
    fn order_matches_sequence_lexicographic() {
        let all = MultiIndex::all_up_to(3, 3);
        for a in &all {
            for b in &all {
                assert_eq!(a.cmp(b), seq_cmp(a, b), "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn symmetric_construction() {
        let a = MultiIndex::from_directions([2, 0, 1, 0]);
        let b = MultiIndex::from_directions([0, 0, 1, 2]);
        assert_eq!(a, b);
        assert_eq!(a.order(), 4);
        assert_eq!(a.directions(), vec![0, 0, 1, 2]);
    }

    #[test]
    fn empty_is_identity() {
        let a = MultiIndex::from_directions([1, 2]);
        assert_eq!(a.union(&MultiIndex::EMPTY), a);
        assert_eq!(MultiIndex::EMPTY.order(), 0);
        assert!(MultiIndex::EMPTY < a);
    }

    #[test]
    fn counts_of_orders() {
        assert_eq!(MultiIndex::all_of_order(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_up_to(2, 3).len(), 10);
    }

    #[test]
    fn minus_and_difference() {
        let a = MultiIndex::from_directions([0, 1, 1]);
        assert_eq!(a.minus(1), Some(MultiIndex::from_directions([0, 1])));
        assert_eq!(a.minus(2), None);
        let b = MultiIndex::from_directions([1]);
        assert_eq!(b.difference(&a), Some(MultiIndex::from_directions([0, 1])));
        assert_eq!(a.difference(&b), None);
    }
}
