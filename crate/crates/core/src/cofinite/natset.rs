//! Eventually periodic subsets of `ℕ = {1, 2, 3, …}`.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Bit sequence `pre · per · per · …` over positions `1, 2, 3, …`, kept in
/// canonical form (shortest period, then shortest preperiod), so equality
/// is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NatSet {
    pre: Vec<bool>,
    per: Vec<bool>,
}

impl NatSet {
    pub fn from_bits(pre: Vec<bool>, per: Vec<bool>) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::Domain("period must be nonempty".into()));
        }
        Ok(Self::canonical(pre, per))
    }

    pub fn empty() -> Self {
        NatSet {
            pre: Vec::new(),
            per: vec![false],
        }
    }

    pub fn all() -> Self {
        NatSet {
            pre: Vec::new(),
            per: vec![true],
        }
    }

    pub fn singleton(n: u64) -> Self {
        Self::finite([n])
    }

    /// Finite set; zero is ignored.
    pub fn finite(members: impl IntoIterator<Item = u64>) -> Self {
        let members: Vec<u64> = members.into_iter().filter(|&n| n > 0).collect();
        let max = members.iter().copied().max().unwrap_or(0) as usize;
        let mut pre = vec![false; max];
        for n in members {
            pre[n as usize - 1] = true;
        }
        Self::canonical(pre, vec![false])
    }

    /// `[m, ∞)`
    pub fn from(m: u64) -> Self {
        let m = m.max(1) as usize;
        Self::canonical(vec![false; m - 1], vec![true])
    }

    /// `[lo, hi]`
    pub fn range(lo: u64, hi: u64) -> Self {
        Self::finite(lo.max(1)..=hi)
    }

    /// `{a·k + b : k ≥ 0} ∩ ℕ`
    pub fn progression(a: u64, b: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::Domain("progression step must be positive".into()));
        }
        let (a, b) = (a as usize, b as usize);
        // positions 1..=b+a cover the preperiod and one full period
        let lead = b.saturating_sub(1);
        let pre = vec![false; lead];
        let per: Vec<bool> = (0..a)
            .map(|i| {
                let pos = lead + 1 + i;
                pos >= b && (pos - b) % a == 0
            })
            .collect();
        Ok(Self::canonical(pre, per))
    }

    fn canonical(mut pre: Vec<bool>, mut per: Vec<bool>) -> Self {
        let n = per.len();
        if let Some(d) = (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .find(|&d| (0..n).all(|i| per[i] == per[i % d]))
        {
            per.truncate(d);
        }
        while let Some(&last) = pre.last() {
            if last != *per.last().expect("period nonempty") {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        NatSet { pre, per }
    }

    pub fn preperiod(&self) -> &[bool] {
        &self.pre
    }

    pub fn period(&self) -> &[bool] {
        &self.per
    }

    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        let i = (n - 1) as usize;
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.per[(i - self.pre.len()) % self.per.len()]
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let lead = self.pre.len().max(other.pre.len());
        let period = self.per.len().lcm(&other.per.len());
        let bit = |s: &Self, i: usize| s.contains(i as u64 + 1);
        let pre = (0..lead).map(|i| op(bit(self, i), bit(other, i))).collect();
        let per = (lead..lead + period)
            .map(|i| op(bit(self, i), bit(other, i)))
            .collect();
        Self::canonical(pre, per)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        NatSet {
            pre: self.pre.iter().map(|b| !b).collect(),
            per: self.per.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::empty()
    }

    pub fn is_finite(&self) -> bool {
        self.per.iter().all(|b| !b)
    }

    pub fn is_cofinite(&self) -> bool {
        self.per.iter().all(|&b| b)
    }

    /// Least `m` with `[m, ∞) ⊂ self`, for cofinite sets.
    pub fn tail_start(&self) -> Option<u64> {
        self.is_cofinite().then(|| self.pre.len() as u64 + 1)
    }

    /// `self ∩ [1, n]`
    pub fn truncate(&self, n: u64) -> Self {
        self.intersection(&Self::range(1, n))
    }

    /// Members up to `n`, ascending.
    pub fn members_upto(&self, n: u64) -> impl Iterator<Item = u64> + '_ {
        (1..=n).filter(move |&k| self.contains(k))
    }

    /// Members of a finite set, ascending; `None` for infinite sets.
    pub fn members(&self) -> Option<Vec<u64>> {
        self.is_finite()
            .then(|| self.members_upto(self.pre.len() as u64).collect())
    }

    /// `(a, b)` when the set is exactly `{a·k + b : k ≥ 0}` with `b ≥ 1`.
    pub fn as_progression(&self) -> Option<(u64, u64)> {
        if self.is_finite() {
            return None;
        }
        let a = self.per.len() as u64;
        let b = (1..).find(|&k| self.contains(k))?;
        (Self::progression(a, b).ok()? == *self).then_some((a, b))
    }

    pub fn bits_string(&self) -> String {
        let s = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        format!("{};{}", s(&self.pre), s(&self.per))
    }
}

impl fmt::Debug for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.members() {
            Some(m) => write!(f, "{m:?}"),
            None => write!(f, "{{{}}}", self.bits_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> NatSet {
        NatSet::progression(2, 2).unwrap()
    }

    fn odds() -> NatSet {
        NatSet::progression(2, 1).unwrap()
    }

    #[test]
    fn canonical_forms_are_unique() {
        let a = NatSet::from_bits(vec![false, true, false], vec![true, false, true, false]).unwrap();
        assert_eq!(a, evens());
        assert_eq!(a.preperiod(), &[] as &[bool]);
        assert_eq!(a.period(), &[false, true]);
        assert_eq!(NatSet::from(1), NatSet::all());
        assert_eq!(NatSet::progression(1, 1).unwrap(), NatSet::all());
        assert_eq!(
            NatSet::progression(3, 0).unwrap(),
            NatSet::progression(3, 3).unwrap()
        );
    }

    #[test]
    fn set_algebra() {
        assert_eq!(evens().union(&odds()), NatSet::all());
        assert!(evens().intersection(&odds()).is_empty());
        assert_eq!(evens().complement(), odds());
        let m3 = NatSet::progression(3, 3).unwrap();
        let m6 = NatSet::progression(6, 6).unwrap();
        assert_eq!(evens().intersection(&m3), m6);
        assert!(NatSet::finite([1, 2, 5]).is_finite());
        assert_eq!(NatSet::finite([1, 2, 5]).members(), Some(vec![1, 2, 5]));
        assert!(NatSet::from(4).is_cofinite());
        assert_eq!(NatSet::from(4).tail_start(), Some(4));
        assert_eq!(NatSet::from(4).union(&NatSet::singleton(3)).tail_start(), Some(3));
        assert_eq!(evens().truncate(7).members(), Some(vec![2, 4, 6]));
    }

    #[test]
    fn progressions() {
        assert_eq!(evens().as_progression(), Some((2, 2)));
        assert_eq!(NatSet::progression(2, 5).unwrap().as_progression(), Some((2, 5)));
        assert!(NatSet::progression(2, 5).unwrap().contains(7));
        assert!(!NatSet::progression(2, 5).unwrap().contains(3));
        assert_eq!(NatSet::all().as_progression(), Some((1, 1)));
        assert_eq!(NatSet::finite([2]).as_progression(), None);
    }
}
