//! Sub-σ-fields of a finite space, represented as canonical partitions.
//!
//! With strictly positive probabilities every sub-σ-field is generated by a
//! unique partition of the outcomes, and `x ≤ y` (inclusion of σ-fields)
//! means the partition of `y` refines the partition of `x`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::finmeas::{ProbSpace, Rv};
use crate::linalg::Subspace;
use crate::scalar::Scalar;
use crate::unionfind::UnionFind;

/// A partition of the outcome indices of a space.
///
/// Canonical: blocks are sorted internally and ordered by least element, and
/// `labels[i]` is the index of the block holding outcome `i`.
#[derive(Clone)]
pub struct SigmaField<S> {
    space: ProbSpace<S>,
    labels: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl<S: Scalar> fmt::Debug for SigmaField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigmaField{:?}", self.blocks)
    }
}

impl<S: Scalar> PartialEq for SigmaField<S> {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl<S: Scalar> Eq for SigmaField<S> {}

impl<S: Scalar> std::hash::Hash for SigmaField<S> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.labels.hash(state);
    }
}

impl<S: Scalar> SigmaField<S> {
    /// Canonicalizes an arbitrary labelling.
    ///
    /// # Panics
    /// If `labels.len()` differs from the outcome count.
    pub fn from_labels(space: &ProbSpace<S>, labels: &[usize]) -> Self {
        assert_eq!(labels.len(), space.len(), "one label per outcome");
        let mut relabel = HashMap::new();
        let mut canon = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let next = relabel.len();
            let b = *relabel.entry(*l).or_insert(next);
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(i);
            canon.push(b);
        }
        SigmaField {
            space: space.clone(),
            labels: canon,
            blocks,
        }
    }

    pub fn from_blocks(space: &ProbSpace<S>, blocks: &[Vec<usize>]) -> Result<Self> {
        let n = space.len();
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Invalid(format!("block {b} is empty")));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::Invalid(format!(
                        "outcome index {i} out of range for {n} outcomes"
                    )));
                }
                if labels[i] != usize::MAX {
                    return Err(Error::Invalid(format!("outcome {i} appears in two blocks")));
                }
                labels[i] = b;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Invalid(format!("outcome {i} is not covered")));
        }
        Ok(Self::from_labels(space, &labels))
    }

    /// `0_Λ`: the trivial σ-field.
    pub fn trivial(space: &ProbSpace<S>) -> Self {
        Self::from_labels(space, &vec![0; space.len()])
    }

    /// `1_Λ`: the full σ-field.
    pub fn discrete(space: &ProbSpace<S>) -> Self {
        Self::from_labels(space, &(0..space.len()).collect::<Vec<_>>())
    }

    /// σ-field generated by a list of random variables (joint level sets).
    pub fn generated_by(space: &ProbSpace<S>, rvs: &[Rv<S>]) -> Result<Self> {
        let mut acc = Self::trivial(space);
        for f in rvs {
            space.check_same(f.space())?;
            acc = acc.join_unchecked(&level_sets(space, f.values()));
        }
        Ok(acc)
    }

    pub fn space(&self) -> &ProbSpace<S> {
        &self.space
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.labels.len()
    }

    pub fn block_probs(&self) -> Vec<S> {
        self.blocks.iter().map(|b| self.space.mass(b)).collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        self.space.check_same(&other.space)
    }

    /// `x ∧ y`: the intersection σ-field, i.e. the finest partition coarser
    /// than both (connected components of the shared-block graph).
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.meet_unchecked(other))
    }

    pub(crate) fn meet_unchecked(&self, other: &Self) -> Self {
        let n = self.labels.len();
        let mut uf = UnionFind::new(n);
        for part in [&self.blocks, &other.blocks] {
            for block in part.iter() {
                for w in block.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        Self::from_labels(&self.space, &uf.roots())
    }

    /// `x ∨ y`: the common refinement.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.join_unchecked(other))
    }

    pub(crate) fn join_unchecked(&self, other: &Self) -> Self {
        let m = other.blocks.len();
        let labels: Vec<usize> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(a, b)| a * m + b)
            .collect();
        Self::from_labels(&self.space, &labels)
    }

    /// `self ≤ other`: every block of `other` lies inside a block of `self`.
    pub fn le(&self, other: &Self) -> bool {
        if self.labels.len() != other.labels.len() {
            return false;
        }
        let mut image = vec![usize::MAX; other.blocks.len()];
        for (a, b) in self.labels.iter().zip(&other.labels) {
            if image[*b] == usize::MAX {
                image[*b] = *a;
            } else if image[*b] != *a {
                return false;
            }
        }
        true
    }

    /// Conditional expectation on raw values: block-wise weighted average.
    pub fn project_values(&self, f: &[S]) -> Vec<S> {
        let probs = self.space.probs();
        let mut sums = vec![S::zero(); self.blocks.len()];
        let mut mass = vec![S::zero(); self.blocks.len()];
        for (i, v) in f.iter().enumerate() {
            let b = self.labels[i];
            sums[b].add_prod(&probs[i], v);
            mass[b] = mass[b].plus(&probs[i]);
        }
        let avg: Vec<S> = sums.iter().zip(&mass).map(|(s, m)| s.divide(m)).collect();
        self.labels.iter().map(|&b| avg[b].clone()).collect()
    }

    /// `E(f | x)`, the orthogonal projection onto `L2(x)`.
    pub fn cond_exp(&self, f: &Rv<S>) -> Result<Rv<S>> {
        self.space.check_same(f.space())?;
        self.space.rv(self.project_values(f.values()))
    }

    /// Whether `f` is constant on every block.
    pub fn is_measurable(&self, f: &[S]) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| f[i].approx_eq(&f[b[0]])))
    }

    /// Whether `Q_x Q_y = Q_y Q_x`, checked on every standard basis vector.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        let n = self.labels.len();
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e[j] = S::one();
            let xy = self.project_values(&other.project_values(&e));
            let yx = other.project_values(&self.project_values(&e));
            e[j] = S::zero();
            if !xy.iter().zip(&yx).all(|(a, b)| a.approx_eq(b)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Product rule `P(X ∩ Y) = P(X) P(Y)` over all block pairs.
    pub fn independent(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.independence_witness(other).is_none())
    }

    /// First block pair violating the product rule, if any.
    pub fn independence_witness(&self, other: &Self) -> Option<(usize, usize)> {
        let m = other.blocks.len();
        let mut joint = vec![S::zero(); self.blocks.len() * m];
        for (i, p) in self.space.probs().iter().enumerate() {
            let k = self.labels[i] * m + other.labels[i];
            joint[k] = joint[k].plus(p);
        }
        let px = self.block_probs();
        let py = other.block_probs();
        for (a, pa) in px.iter().enumerate() {
            for (b, pb) in py.iter().enumerate() {
                if !joint[a * m + b].approx_eq(&pa.times(pb)) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// `L2(x)`: spanned by the (mutually orthogonal) block indicators.
    pub fn subspace(&self) -> Subspace<S> {
        let basis = self
            .blocks
            .iter()
            .map(|b| self.space.indicator(b).into_values())
            .collect::<Vec<_>>();
        Subspace::from_orthogonal(&self.space, basis)
    }

    /// σ-field generated by a subspace: joint level sets of a basis.
    pub fn generated_by_subspace(v: &Subspace<S>) -> Self {
        let space = v.space();
        v.basis().iter().fold(Self::trivial(space), |acc, b| {
            acc.join_unchecked(&level_sets(space, b))
        })
    }

    pub fn inf_family(xs: &[Self]) -> Result<Self> {
        let (first, rest) = xs
            .split_first()
            .ok_or_else(|| domain("infimum of an empty family"))?;
        rest.iter().try_fold(first.clone(), |acc, x| acc.meet(x))
    }

    pub fn sup_family(xs: &[Self]) -> Result<Self> {
        let (first, rest) = xs
            .split_first()
            .ok_or_else(|| domain("supremum of an empty family"))?;
        rest.iter().try_fold(first.clone(), |acc, x| acc.join(x))
    }
}

/// Partition into level sets of one vector. Float values are grouped by
/// chains of gaps below the level tolerance, which keeps the grouping an
/// equivalence relation.
fn level_sets<S: Scalar>(space: &ProbSpace<S>, v: &[S]) -> SigmaField<S> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(Ordering::Equal));
    let mut labels = vec![0; v.len()];
    let mut group = 0;
    for w in 0..order.len() {
        if w > 0 && !v[order[w - 1]].level_eq(&v[order[w]]) {
            group += 1;
        }
        labels[order[w]] = group;
    }
    SigmaField::from_labels(space, &labels)
}
