//! Joint diagonalization of the commuting projections `Q_x` of a finite
//! noise-type Boolean algebra.
//!
//! Each spectral point `s` is a joint eigenspace. Its generator `x_b(s)` is
//! the least element `x` with `Q_x = I` on the eigenspace; `K_b(s)` counts
//! the atoms below it. Points are found by splitting `H` along the
//! co-atoms only; [`verify_spectral_identities`] then audits the pattern
//! on every element.

use std::collections::BTreeMap;

use crate::chaos::{first_chaos, MAX_ENUMERATED_ATOMS};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::ntba::{AtomSet, Ntba};
use crate::scalar::Scalar;
use crate::sigma::SigmaField;

#[derive(Clone, Debug)]
pub struct SpectralPoint<S: Scalar> {
    pub eigenspace: Subspace<S>,
    /// `x_b(s)`
    pub generator: AtomSet,
}

impl<S: Scalar> SpectralPoint<S> {
    /// `K_b(s)`
    pub fn k(&self) -> usize {
        self.generator.len()
    }

    /// `s ∈ S_x`
    pub fn in_spectral_set(&self, x: AtomSet) -> bool {
        self.generator.is_subset(x)
    }

    /// Membership of `s` in `S_x` for every element, indexed by atom bits.
    pub fn pattern(&self, num_atoms: usize) -> Vec<bool> {
        AtomSet::all(num_atoms).map(|x| self.in_spectral_set(x)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomp<S: Scalar> {
    pub algebra: Ntba<S>,
    /// Ordered by generator bits.
    pub points: Vec<SpectralPoint<S>>,
    /// `k ↦ H^(k)`, nonzero levels only.
    pub levels: BTreeMap<usize, Subspace<S>>,
}

impl<S: Scalar> SpectralDecomp<S> {
    pub fn level(&self, k: usize) -> Subspace<S> {
        self.levels
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.algebra.space()))
    }

    pub fn level_dims(&self) -> BTreeMap<usize, usize> {
        self.levels.iter().map(|(&k, v)| (k, v.dim())).collect()
    }

    /// `H(S_x)`: the sum of eigenspaces of points in `S_x`.
    pub fn spectral_subspace(&self, x: AtomSet) -> Subspace<S> {
        Subspace::orthogonal_sum(
            self.algebra.space(),
            self.points
                .iter()
                .filter(|p| p.in_spectral_set(x))
                .map(|p| &p.eigenspace),
        )
    }
}

pub fn spectral_decompose<S: Scalar>(b: &Ntba<S>) -> SpectralDecomp<S> {
    let space = b.space();
    let coatoms = b.coatoms();
    let mut leaves = vec![(
        AtomSet::EMPTY,
        Subspace::from_vectors(space, unit_vectors(space.len()).iter().map(Vec::as_slice)),
    )];
    for (i, c) in coatoms.iter().enumerate() {
        let mut next = Vec::with_capacity(leaves.len() * 2);
        for (gen, w) in leaves {
            let inside = w.map(|v| c.project_values(v));
            let outside = w.map(|v| {
                let q = c.project_values(v);
                v.iter().zip(&q).map(|(a, b)| a.minus(b)).collect()
            });
            if inside.dim() > 0 {
                next.push((gen, inside));
            }
            if outside.dim() > 0 {
                next.push((gen.union(AtomSet::singleton(i)), outside));
            }
        }
        leaves = next;
    }
    leaves.sort_by_key(|(g, _)| g.0);
    let points: Vec<SpectralPoint<S>> = leaves
        .into_iter()
        .map(|(generator, eigenspace)| SpectralPoint {
            eigenspace,
            generator,
        })
        .collect();
    let mut levels = BTreeMap::new();
    for k in 0..=b.num_atoms() {
        let parts: Vec<&Subspace<S>> = points
            .iter()
            .filter(|p| p.k() == k)
            .map(|p| &p.eigenspace)
            .collect();
        if !parts.is_empty() {
            levels.insert(k, Subspace::orthogonal_sum(space, parts));
        }
    }
    SpectralDecomp {
        algebra: b.clone(),
        points,
        levels,
    }
}

fn unit_vectors<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|i| {
            let mut e = vec![S::zero(); n];
            e[i] = S::one();
            e
        })
        .collect()
}

/// Which identity failed, with the offending elements or point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityFailure {
    /// Eigenspaces overlap or do not fill `H`.
    Completeness,
    /// `Q_x` is not `0` or `I` on a point as its pattern predicts.
    Pattern { point: usize, element: AtomSet },
    /// `S_x ∩ S_y ≠ S_{x∧y}`
    Intersection { x: AtomSet, y: AtomSet },
    /// `H(S_x) ≠ H_x`
    Subspace { x: AtomSet },
    /// `{x : s ∈ S_x}` is not a filter.
    Filter { point: usize },
}

/// Audits the decomposition on every element of the algebra.
pub fn verify_spectral_identities<S: Scalar>(
    d: &SpectralDecomp<S>,
) -> Result<std::result::Result<(), IdentityFailure>> {
    let b = &d.algebra;
    let n = b.num_atoms();
    if n > MAX_ENUMERATED_ATOMS {
        return Err(Error::Capacity {
            what: "atoms for element enumeration",
            requested: n,
            limit: MAX_ENUMERATED_ATOMS,
        });
    }
    let space = b.space();
    let total: usize = d.points.iter().map(|p| p.eigenspace.dim()).sum();
    let all = Subspace::orthogonal_sum(space, d.points.iter().map(|p| &p.eigenspace));
    if total != space.len() || all.check_orthogonal().is_err() {
        return Ok(Err(IdentityFailure::Completeness));
    }
    let fields: Vec<SigmaField<S>> = b.elements().map(|e| b.realize(e)).collect();
    for (pi, p) in d.points.iter().enumerate() {
        for (xi, x) in fields.iter().enumerate() {
            let e = AtomSet(xi as u64);
            let expect = p.in_spectral_set(e);
            let ok = p.eigenspace.basis().iter().all(|v| {
                let q = x.project_values(v);
                if expect {
                    q.iter().zip(v).all(|(a, b)| a.approx_eq(b))
                } else {
                    q.iter().all(Scalar::is_zero)
                }
            });
            if !ok {
                return Ok(Err(IdentityFailure::Pattern {
                    point: pi,
                    element: e,
                }));
            }
        }
        // filter: upward closed and closed under meets
        let pattern = p.pattern(n);
        for x in AtomSet::all(n) {
            for y in AtomSet::all(n) {
                let (px, py) = (pattern[x.0 as usize], pattern[y.0 as usize]);
                let up = !px || !x.is_subset(y) || py;
                let meet = !(px && py) || pattern[x.intersection(y).0 as usize];
                if !up || !meet {
                    return Ok(Err(IdentityFailure::Filter { point: pi }));
                }
            }
        }
        if !pattern[b.top().0 as usize] {
            return Ok(Err(IdentityFailure::Filter { point: pi }));
        }
    }
    let sets: Vec<Vec<bool>> = AtomSet::all(n)
        .map(|x| d.points.iter().map(|p| p.in_spectral_set(x)).collect())
        .collect();
    for x in AtomSet::all(n) {
        for y in AtomSet::all(n) {
            let lhs: Vec<bool> = sets[x.0 as usize]
                .iter()
                .zip(&sets[y.0 as usize])
                .map(|(a, b)| *a && *b)
                .collect();
            if lhs != sets[x.intersection(y).0 as usize] {
                return Ok(Err(IdentityFailure::Intersection { x, y }));
            }
        }
    }
    for (xi, x) in fields.iter().enumerate() {
        let e = AtomSet(xi as u64);
        if !d.spectral_subspace(e).same_subspace(&x.subspace()) {
            return Ok(Err(IdentityFailure::Subspace { x: e }));
        }
    }
    Ok(Ok(()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    pub dims: BTreeMap<usize, usize>,
    /// `K < ∞` everywhere; always true at finite scale.
    pub classical: bool,
}

/// Level dimensions and the classicality verdict, cross-checked against
/// the first-chaos computation.
pub fn chaos_grading<S: Scalar>(d: &SpectralDecomp<S>) -> Result<Grading> {
    let dims = d.level_dims();
    let total: usize = dims.values().sum();
    if total != d.algebra.space().len() {
        return Err(Error::Consistency(format!(
            "levels span dimension {total}, expected {}",
            d.algebra.space().len()
        )));
    }
    let classical = d.points.iter().all(|p| p.k() <= d.algebra.num_atoms());
    let chaos = first_chaos(&d.algebra);
    if chaos.classical != classical {
        return Err(Error::Consistency(format!(
            "spectral verdict {classical} disagrees with first chaos verdict {}",
            chaos.classical
        )));
    }
    if !chaos.h1.same_subspace(&d.level(1)) {
        return Err(Error::Consistency("level 1 differs from the first chaos".into()));
    }
    Ok(Grading { dims, classical })
}

/// `K = K_e + K_{e'}` on the product points of the two restrictions.
pub fn k_restriction_additivity<S: Scalar>(b: &Ntba<S>, e: AtomSet) -> Result<bool> {
    let n = b.num_atoms();
    if e.is_empty() || e == b.top() {
        return Err(Error::Precondition(
            "restriction element must differ from 0 and 1".into(),
        ));
    }
    let whole = spectral_decompose(b);
    let left = b.restrict(e)?;
    let right = b.restrict(e.complement(n))?;
    let dl = spectral_decompose(&left.algebra);
    let dr = spectral_decompose(&right.algebra);
    let space = b.space();
    let mut covered = 0;
    for p in &dl.points {
        for q in &dr.points {
            let mut prod = Subspace::zero(space);
            for u in p.eigenspace.basis() {
                let lu = left.lift(u);
                for v in q.eigenspace.basis() {
                    let lv = right.lift(v);
                    prod.push(lu.times(&lv)?.values());
                }
            }
            let expected_k = p.k() + q.k();
            let expected_gen = left
                .lift_element(p.generator)
                .union(right.lift_element(q.generator));
            let Some(point) = whole
                .points
                .iter()
                .find(|s| s.eigenspace.contains_subspace(&prod))
            else {
                return Ok(false);
            };
            if point.k() != expected_k
                || point.generator != expected_gen
                || point.eigenspace.dim() != prod.dim()
            {
                return Ok(false);
            }
            covered += prod.dim();
        }
    }
    Ok(covered == space.len())
}

/// `σ(H^(k)) ⊂ σ(H^(1))` for every nonzero level `k ≥ 2`.
pub fn sigma_tower_check<S: Scalar>(d: &SpectralDecomp<S>) -> bool {
    let base = SigmaField::generated_by_subspace(&d.level(1));
    d.levels
        .iter()
        .filter(|(&k, _)| k >= 2)
        .all(|(_, h)| SigmaField::generated_by_subspace(h).le(&base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finmeas::ProbSpace;
    use crate::scalar::Rational;

    #[test]
    fn coordinate_two() {
        let b = Ntba::<Rational>::coordinate(2).unwrap();
        let d = spectral_decompose(&b);
        let ks: Vec<usize> = d.points.iter().map(SpectralPoint::k).collect();
        assert_eq!(ks, vec![0, 1, 1, 2]);
        let s = b.space();
        let walsh = [&[][..], &[1], &[2], &[1, 2]];
        for (p, w) in d.points.iter().zip(walsh) {
            assert_eq!(p.eigenspace.dim(), 1);
            assert!(p.eigenspace.contains_rv(&s.walsh(w).unwrap()));
        }
        assert_eq!(d.points[1].generator, AtomSet::singleton(0));
        assert_eq!(verify_spectral_identities(&d).unwrap(), Ok(()));
        let zero = d.spectral_subspace(AtomSet::EMPTY);
        assert!(zero.same_subspace(&SigmaField::trivial(s).subspace()));
    }

    #[test]
    fn trivial_algebra() {
        let s = ProbSpace::<Rational>::uniform(4).unwrap();
        let b = Ntba::trivial(&s).unwrap();
        let d = spectral_decompose(&b);
        assert_eq!(d.points.len(), 2);
        assert_eq!(d.level_dims(), BTreeMap::from([(0, 1), (1, 3)]));
        assert!(chaos_grading(&d).unwrap().classical);
    }

    #[test]
    fn binomial_levels() {
        let b = Ntba::<Rational>::coordinate(3).unwrap();
        let d = spectral_decompose(&b);
        assert_eq!(d.level_dims(), BTreeMap::from([(0, 1), (1, 3), (2, 3), (3, 1)]));
        assert!(sigma_tower_check(&d));
        let p = Ntba::<Rational>::parity(3).unwrap();
        let dp = spectral_decompose(&p);
        assert_eq!(
            dp.level_dims(),
            BTreeMap::from([(0, 1), (1, 4), (2, 6), (3, 4), (4, 1)])
        );
        assert!(sigma_tower_check(&dp));
        assert_eq!(verify_spectral_identities(&dp).unwrap(), Ok(()));
    }

    #[test]
    fn additivity_examples() {
        let b = Ntba::<Rational>::coordinate(2).unwrap();
        assert!(k_restriction_additivity(&b, AtomSet::singleton(0)).unwrap());
        let p = Ntba::<Rational>::parity(2).unwrap();
        assert!(k_restriction_additivity(&p, AtomSet::from_indices([0, 1])).unwrap());
        assert!(k_restriction_additivity(&b, AtomSet::EMPTY).is_err());
    }
}
