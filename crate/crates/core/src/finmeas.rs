//! Finite probability spaces and random variables on them.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::linalg::Subspace;
use crate::scalar::{Scalar, MASS_TOL};
use crate::sigma::SigmaField;

/// Largest `n` accepted by [`ProbSpace::dyadic`].
pub const MAX_DYADIC: usize = 20;
/// Outcome cap for constructed spaces (products, dyadic cubes).
pub const MAX_OUTCOMES: usize = 1 << 20;

struct SpaceData<S> {
    outcomes: Vec<String>,
    probs: Vec<S>,
}

/// A finite outcome set with strictly positive probabilities.
///
/// Cheap to clone; clones share storage and compare as the same space.
#[derive(Clone)]
pub struct ProbSpace<S> {
    data: Arc<SpaceData<S>>,
}

impl<S: Scalar> fmt::Debug for ProbSpace<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProbSpace")
            .field("outcomes", &self.data.outcomes)
            .field("probs", &self.data.probs)
            .finish()
    }
}

impl<S: Scalar> PartialEq for ProbSpace<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl<S: Scalar> ProbSpace<S> {
    pub fn new(outcomes: Vec<String>, probs: Vec<S>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Invalid(
                "a probability space needs at least one outcome".into(),
            ));
        }
        if outcomes.len() != probs.len() {
            return Err(Error::Invalid(format!(
                "{} outcomes but {} probabilities",
                outcomes.len(),
                probs.len()
            )));
        }
        if outcomes.len() > MAX_OUTCOMES {
            return Err(Error::Capacity {
                what: "outcomes",
                requested: outcomes.len(),
                limit: MAX_OUTCOMES,
            });
        }
        let mut seen = HashSet::with_capacity(outcomes.len());
        for id in &outcomes {
            if !seen.insert(id.as_str()) {
                return Err(Error::Invalid(format!("duplicate outcome identifier {id:?}")));
            }
        }
        let mut total = S::zero();
        for (id, p) in outcomes.iter().zip(&probs) {
            if !p.is_positive() {
                return Err(Error::Invalid(format!(
                    "outcome {id:?} has non-positive probability {p}"
                )));
            }
            total = total.plus(p);
        }
        let mass_ok = if S::EXACT {
            total == S::one()
        } else {
            (total.to_f64() - 1.0).abs() <= MASS_TOL
        };
        if !mass_ok {
            return Err(Error::Invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(ProbSpace {
            data: Arc::new(SpaceData { outcomes, probs }),
        })
    }

    /// Uniform space on `n` outcomes labelled `0..n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n > MAX_OUTCOMES {
            return Err(Error::Capacity {
                what: "outcomes",
                requested: n,
                limit: MAX_OUTCOMES,
            });
        }
        let p = S::from_ratio(1, n.max(1) as i64);
        Self::new((0..n).map(|i| i.to_string()).collect(), vec![p; n])
    }

    /// Uniform measure on `{+1,-1}^n`, outcomes as sign strings in
    /// lexicographic order with `+` before `-`.
    pub fn dyadic(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DYADIC {
            return Err(Error::Capacity {
                what: "dyadic dimension",
                requested: n,
                limit: MAX_DYADIC,
            });
        }
        let size = 1usize << n;
        let outcomes = (0..size)
            .map(|idx| {
                (0..n)
                    .map(|bit| if idx >> (n - 1 - bit) & 1 == 0 { '+' } else { '-' })
                    .collect()
            })
            .collect();
        Self::new(outcomes, vec![S::from_ratio(1, size as i64); size])
    }

    pub fn len(&self) -> usize {
        self.data.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.probs.is_empty()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.data.outcomes
    }

    pub fn probs(&self) -> &[S] {
        &self.data.probs
    }

    pub fn prob(&self, i: usize) -> &S {
        &self.data.probs[i]
    }

    /// Probability of a set of outcome indices.
    pub fn mass(&self, set: &[usize]) -> S {
        set.iter()
            .fold(S::zero(), |acc, &i| acc.plus(&self.data.probs[i]))
    }

    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
            || (self.data.outcomes == other.data.outcomes && self.data.probs == other.data.probs)
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(domain("operands live on different probability spaces"))
        }
    }

    pub fn rv(&self, values: Vec<S>) -> Result<Rv<S>> {
        if values.len() != self.len() {
            return Err(domain(format!(
                "random variable has {} values, space has {} outcomes",
                values.len(),
                self.len()
            )));
        }
        Ok(Rv {
            space: self.clone(),
            values,
        })
    }

    pub fn constant(&self, c: S) -> Rv<S> {
        Rv {
            space: self.clone(),
            values: vec![c; self.len()],
        }
    }

    pub fn indicator(&self, set: &[usize]) -> Rv<S> {
        let mut values = vec![S::zero(); self.len()];
        for &i in set {
            values[i] = S::one();
        }
        Rv {
            space: self.clone(),
            values,
        }
    }

    /// Coordinate sign `xi_i` (1-based) of a space whose outcome labels are
    /// sign strings.
    pub fn sign(&self, i: usize) -> Result<Rv<S>> {
        let values = self
            .outcomes()
            .iter()
            .map(|id| match id.as_bytes().get(i.wrapping_sub(1)) {
                Some(b'+') => Ok(S::one()),
                Some(b'-') => Ok(S::one().negate()),
                _ => Err(domain(format!("outcome {id:?} has no sign at coordinate {i}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        self.rv(values)
    }

    /// Product of the coordinate signs in `coords` (the Walsh character).
    pub fn walsh(&self, coords: &[usize]) -> Result<Rv<S>> {
        let mut acc = self.constant(S::one());
        for &i in coords {
            acc = acc.times(&self.sign(i)?)?;
        }
        Ok(acc)
    }

    /// `sum_i p_i f(i) g(i)`
    pub fn inner(&self, f: &Rv<S>, g: &Rv<S>) -> Result<S> {
        self.check_same(&f.space)?;
        self.check_same(&g.space)?;
        Ok(weighted_inner(self.probs(), &f.values, &g.values))
    }

    pub fn norm2(&self, f: &Rv<S>) -> Result<S> {
        self.inner(f, f)
    }

    pub fn expectation(&self, f: &Rv<S>) -> Result<S> {
        self.check_same(&f.space)?;
        Ok(self
            .probs()
            .iter()
            .zip(&f.values)
            .fold(S::zero(), |mut acc, (p, v)| {
                acc.add_prod(p, v);
                acc
            }))
    }

    /// Orthogonal basis of the linear span of `vs`.
    pub fn span<'a, I>(&self, vs: I) -> Result<Subspace<S>>
    where
        I: IntoIterator<Item = &'a Rv<S>>,
    {
        let mut sub = Subspace::zero(self);
        for v in vs {
            self.check_same(&v.space)?;
            sub.push(&v.values);
        }
        Ok(sub)
    }

    /// Whether outcome labels are equal-length sign strings.
    fn is_sign_space(&self) -> bool {
        let first = self.outcomes()[0].len();
        first > 0
            && self
                .outcomes()
                .iter()
                .all(|o| o.len() == first && o.bytes().all(|b| b == b'+' || b == b'-'))
    }

    /// Product space with embedding maps for both factors.
    ///
    /// Outcome `(i, j)` sits at index `i * b.len() + j`. Sign-string labels
    /// are concatenated so the product of two sign spaces is again one.
    pub fn product(a: &Self, b: &Self) -> Result<Product<S>> {
        let size = a
            .len()
            .checked_mul(b.len())
            .filter(|&s| s <= MAX_OUTCOMES)
            .ok_or(Error::Capacity {
                what: "product outcomes",
                requested: a.len().saturating_mul(b.len()),
                limit: MAX_OUTCOMES,
            })?;
        let concat = a.is_sign_space() && b.is_sign_space();
        let mut outcomes = Vec::with_capacity(size);
        let mut probs = Vec::with_capacity(size);
        for (ia, pa) in a.outcomes().iter().zip(a.probs()) {
            for (ib, pb) in b.outcomes().iter().zip(b.probs()) {
                outcomes.push(if concat {
                    format!("{ia}{ib}")
                } else {
                    format!("{ia}.{ib}")
                });
                probs.push(pa.times(pb));
            }
        }
        Ok(Product {
            space: ProbSpace::new(outcomes, probs)?,
            left: a.clone(),
            right: b.clone(),
        })
    }
}

pub(crate) fn weighted_inner<S: Scalar>(probs: &[S], f: &[S], g: &[S]) -> S {
    let mut acc = S::zero();
    for ((p, a), b) in probs.iter().zip(f).zip(g) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc.add_prod(p, &a.times(b));
    }
    acc
}

/// A real random variable, one value per outcome.
#[derive(Clone)]
pub struct Rv<S> {
    space: ProbSpace<S>,
    values: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Rv<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Rv").field(&self.values).finish()
    }
}

impl<S: Scalar> Rv<S> {
    pub fn space(&self) -> &ProbSpace<S> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Rv {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| op(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, S::plus)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, S::minus)
    }

    /// Pointwise product.
    pub fn times(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, S::times)
    }

    pub fn scale(&self, c: &S) -> Self {
        Rv {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.times(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.values.iter().zip(&other.values).all(|(a, b)| a.approx_eq(b))
    }
}

/// A product space together with its two factors.
#[derive(Clone)]
pub struct Product<S> {
    pub space: ProbSpace<S>,
    pub left: ProbSpace<S>,
    pub right: ProbSpace<S>,
}

impl<S: Scalar> fmt::Debug for Product<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Product").field("space", &self.space).finish()
    }
}

impl<S: Scalar> Product<S> {
    fn right_len(&self) -> usize {
        self.right.len()
    }

    /// `f(a, b) = g(a)`
    pub fn embed_left(&self, f: &Rv<S>) -> Result<Rv<S>> {
        self.left.check_same(f.space())?;
        let m = self.right_len();
        self.space
            .rv((0..self.space.len()).map(|k| f.values[k / m].clone()).collect())
    }

    /// `f(a, b) = g(b)`
    pub fn embed_right(&self, f: &Rv<S>) -> Result<Rv<S>> {
        self.right.check_same(f.space())?;
        let m = self.right_len();
        self.space
            .rv((0..self.space.len()).map(|k| f.values[k % m].clone()).collect())
    }

    pub fn embed_left_field(&self, x: &SigmaField<S>) -> Result<SigmaField<S>> {
        self.left.check_same(x.space())?;
        let m = self.right_len();
        let labels: Vec<usize> = (0..self.space.len()).map(|k| x.label(k / m)).collect();
        Ok(SigmaField::from_labels(&self.space, &labels))
    }

    pub fn embed_right_field(&self, x: &SigmaField<S>) -> Result<SigmaField<S>> {
        self.right.check_same(x.space())?;
        let m = self.right_len();
        let labels: Vec<usize> = (0..self.space.len()).map(|k| x.label(k % m)).collect();
        Ok(SigmaField::from_labels(&self.space, &labels))
    }
}
