//! Subspaces of `L2` of a finite space and exact/float elimination.

use std::fmt;

use crate::error::Result;
use crate::finmeas::{weighted_inner, ProbSpace, Rv};
use crate::scalar::Scalar;

/// A linear subspace of `L2(space)` held as a pairwise orthogonal basis.
///
/// In float mode the basis is orthonormal. In exact mode square roots are
/// unavailable, so basis vectors are only orthogonal and their squared
/// norms are cached alongside.
#[derive(Clone)]
pub struct Subspace<S> {
    space: ProbSpace<S>,
    basis: Vec<Vec<S>>,
    norms: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Subspace<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("dim", &self.dim())
            .field("basis", &self.basis)
            .finish()
    }
}

impl<S: Scalar> Subspace<S> {
    pub fn zero(space: &ProbSpace<S>) -> Self {
        Subspace {
            space: space.clone(),
            basis: Vec::new(),
            norms: Vec::new(),
        }
    }

    /// Span of raw value vectors.
    pub fn from_vectors<'a>(space: &ProbSpace<S>, vs: impl IntoIterator<Item = &'a [S]>) -> Self {
        let mut sub = Self::zero(space);
        for v in vs {
            sub.push(v);
        }
        sub
    }

    /// Builds a subspace from vectors already known to be pairwise
    /// orthogonal and nonzero.
    pub(crate) fn from_orthogonal(space: &ProbSpace<S>, basis: Vec<Vec<S>>) -> Self {
        let norms = basis
            .iter()
            .map(|b| weighted_inner(space.probs(), b, b))
            .collect();
        let sub = Subspace {
            space: space.clone(),
            basis,
            norms,
        };
        debug_assert!(sub.is_orthogonal_basis());
        sub
    }

    pub fn space(&self) -> &ProbSpace<S> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn basis_rvs(&self) -> Vec<Rv<S>> {
        self.basis
            .iter()
            .map(|b| self.space.rv(b.clone()).expect("basis length matches space"))
            .collect()
    }

    fn inner(&self, f: &[S], g: &[S]) -> S {
        weighted_inner(self.space.probs(), f, g)
    }

    /// Removes the component of `r` along the current basis (modified
    /// Gram-Schmidt, in place).
    fn reduce(&self, r: &mut [S]) {
        for (b, n) in self.basis.iter().zip(&self.norms) {
            let c = self.inner(r, b).divide(n);
            if c.is_zero() {
                continue;
            }
            for (ri, bi) in r.iter_mut().zip(b) {
                if !bi.is_zero() {
                    *ri = ri.minus(&c.times(bi));
                }
            }
        }
    }

    /// Adds `v` to the spanning set. Returns whether the dimension grew.
    pub fn push(&mut self, v: &[S]) -> bool {
        assert_eq!(v.len(), self.space.len(), "vector length must match space");
        let mut r = v.to_vec();
        self.reduce(&mut r);
        if !S::EXACT {
            // second pass recovers orthogonality lost to cancellation
            self.reduce(&mut r);
        }
        let n = self.inner(&r, &r);
        let negligible = if S::EXACT {
            r.iter().all(Scalar::is_zero)
        } else {
            let scale = self.inner(v, v).to_f64().sqrt().max(1.0);
            n.to_f64().sqrt() < crate::scalar::RANK_TOL * scale
        };
        if negligible {
            return false;
        }
        match n.sqrt() {
            Some(len) => {
                for x in r.iter_mut() {
                    *x = x.divide(&len);
                }
                self.norms.push(S::one());
            }
            None => {
                S::rescale(&mut r);
                self.norms.push(self.inner(&r, &r));
            }
        }
        self.basis.push(r);
        true
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, f: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); f.len()];
        for (b, n) in self.basis.iter().zip(&self.norms) {
            let c = self.inner(f, b).divide(n);
            if c.is_zero() {
                continue;
            }
            for (o, bi) in out.iter_mut().zip(b) {
                o.add_prod(&c, bi);
            }
        }
        out
    }

    pub fn contains(&self, f: &[S]) -> bool {
        let p = self.project(f);
        f.iter().zip(&p).all(|(a, b)| a.approx_eq(b))
    }

    pub fn contains_rv(&self, f: &Rv<S>) -> bool {
        self.space.same_as(f.space()) && self.contains(f.values())
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && other.basis.iter().all(|b| self.contains(b))
    }

    /// Equality as sets: equal dimension and mutual containment.
    pub fn same_subspace(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other) && other.contains_subspace(self)
    }

    pub fn is_orthogonal_to(&self, other: &Self) -> bool {
        self.basis
            .iter()
            .all(|a| other.basis.iter().all(|b| self.inner(a, b).is_zero()))
    }

    /// Linear span of the union.
    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for b in &other.basis {
            out.push(b);
        }
        out
    }

    /// `self ⊖ other`: the part of `self` orthogonal to `other`.
    pub fn minus(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.space);
        for b in &self.basis {
            let p = other.project(b);
            let r: Vec<S> = b.iter().zip(&p).map(|(x, y)| x.minus(y)).collect();
            out.push(&r);
        }
        out
    }

    /// Intersection, computed as `{u in self : P_other u = u}`.
    pub fn intersect(&self, other: &Self) -> Self {
        // columns (I - P_other) u_i, solve for coefficients
        let cols: Vec<Vec<S>> = self
            .basis
            .iter()
            .map(|u| {
                let p = other.project(u);
                u.iter().zip(&p).map(|(a, b)| a.minus(b)).collect()
            })
            .collect();
        let n = self.space.len();
        let rows: Vec<Vec<S>> = (0..n)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        let kernel = nullspace(&rows, self.dim());
        let mut out = Self::zero(&self.space);
        for coeffs in kernel {
            let mut v = vec![S::zero(); n];
            for (c, u) in coeffs.iter().zip(&self.basis) {
                for (vi, ui) in v.iter_mut().zip(u) {
                    vi.add_prod(c, ui);
                }
            }
            out.push(&v);
        }
        out
    }

    /// Image of the subspace under a linear map given by its action.
    pub fn map(&self, op: impl Fn(&[S]) -> Vec<S>) -> Self {
        let mut out = Self::zero(&self.space);
        for b in &self.basis {
            out.push(&op(b));
        }
        out
    }

    fn is_orthogonal_basis(&self) -> bool {
        for i in 0..self.basis.len() {
            if !self.norms[i].is_positive() {
                return false;
            }
            for j in 0..i {
                if !self.inner(&self.basis[i], &self.basis[j]).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Checks the basis invariant; used by tests and audits.
    pub fn check_orthogonal(&self) -> Result<()> {
        if self.is_orthogonal_basis() && self.dim() <= self.space.len() {
            Ok(())
        } else {
            Err(crate::error::Error::Consistency(
                "subspace basis is not orthogonal".into(),
            ))
        }
    }

    /// Concatenates bases of mutually orthogonal subspaces.
    pub(crate) fn orthogonal_sum<'a>(
        space: &ProbSpace<S>,
        parts: impl IntoIterator<Item = &'a Subspace<S>>,
    ) -> Self {
        let mut out = Self::zero(space);
        for p in parts {
            out.basis.extend(p.basis.iter().cloned());
            out.norms.extend(p.norms.iter().cloned());
        }
        debug_assert!(out.is_orthogonal_basis());
        out
    }
}

/// Reduced row echelon form in place; returns pivot columns.
fn row_reduce<S: Scalar>(m: &mut [Vec<S>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        // exact: first nonzero; float: largest magnitude
        let pick = if S::EXACT {
            (row..m.len()).find(|&r| !m[r][col].is_zero())
        } else {
            (row..m.len())
                .filter(|&r| !m[r][col].is_zero())
                .max_by(|&a, &b| m[a][col].to_f64().abs().total_cmp(&m[b][col].to_f64().abs()))
        };
        let Some(p) = pick else { continue };
        m.swap(row, p);
        let inv = S::one().divide(&m[row][col]);
        for x in m[row].iter_mut() {
            *x = x.times(&inv);
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = other[col].clone();
            if factor.is_zero() {
                other[col] = S::zero();
                continue;
            }
            for (x, y) in other.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.minus(&factor.times(y));
                }
            }
            other[col] = S::zero();
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Rank of a row list.
pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m, ncols).len()
}

/// Basis of `{c : M c = 0}` for the matrix with the given rows.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m[r][f].negate();
            }
            v
        })
        .collect()
}
