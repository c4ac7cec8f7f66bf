//! Finite noise-type Boolean algebras, presented by their atoms.
//!
//! A finite algebra is atomic: every element is the join of the atoms below
//! it, so elements are stored as [`AtomSet`]s and realized as σ-fields on
//! demand.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::finmeas::{ProbSpace, Rv};
use crate::scalar::Scalar;
use crate::sigma::SigmaField;

/// Upper bound on the atom count of an algebra.
pub const MAX_ATOMS: usize = 20;
/// Cap on the number of block tuples enumerated by the independence check.
pub const MAX_BLOCK_TUPLES: usize = 1 << 22;
/// Families up to this size get an exhaustive distributivity check.
pub const EXHAUSTIVE_TRIPLES: usize = 64;
const RANDOM_TRIPLES: usize = 1000;

/// A set of atom indices; bit `i` stands for atom `i`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AtomSet(pub u64);

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl AtomSet {
    pub const EMPTY: AtomSet = AtomSet(0);

    pub fn full(n: usize) -> Self {
        AtomSet(if n >= 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn singleton(i: usize) -> Self {
        AtomSet(1 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        AtomSet(indices.into_iter().fold(0, |acc, i| acc | 1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        AtomSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        AtomSet(self.0 & other.0)
    }

    /// Complement within the first `n` atoms.
    pub fn complement(self, n: usize) -> Self {
        AtomSet(!self.0 & Self::full(n).0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// All subsets of the first `n` atoms, in numeric order.
    pub fn all(n: usize) -> impl Iterator<Item = AtomSet> {
        (0..1u64 << n).map(AtomSet)
    }
}

/// A finite noise-type Boolean algebra on a finite space.
#[derive(Clone)]
pub struct Ntba<S> {
    space: ProbSpace<S>,
    atoms: Vec<SigmaField<S>>,
}

impl<S: Scalar> fmt::Debug for Ntba<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ntba")
            .field("outcomes", &self.space.len())
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl<S: Scalar> Ntba<S> {
    /// Validates the atom presentation: no trivial atom, atoms jointly
    /// generate `1_Λ`, and the atoms are mutually independent.
    pub fn new(space: &ProbSpace<S>, atoms: Vec<SigmaField<S>>) -> Result<Self> {
        if atoms.len() > MAX_ATOMS {
            return Err(Error::Capacity {
                what: "atoms",
                requested: atoms.len(),
                limit: MAX_ATOMS,
            });
        }
        for (i, a) in atoms.iter().enumerate() {
            space.check_same(a.space())?;
            if a.is_trivial() && space.len() > 1 {
                return Err(Error::Invalid(format!("atom {i} is 0_Λ")));
            }
        }
        let top = atoms
            .iter()
            .fold(SigmaField::trivial(space), |acc, a| acc.join_unchecked(a));
        if !top.is_discrete() {
            return Err(Error::Invalid(format!(
                "atoms generate {} blocks, not 1_Λ",
                top.num_blocks()
            )));
        }
        if let Some(w) = mutual_independence_witness(space, &atoms)? {
            return Err(Error::Invalid(format!(
                "atoms are not mutually independent; block tuple {w:?} violates the product rule"
            )));
        }
        Ok(Ntba {
            space: space.clone(),
            atoms,
        })
    }

    /// `{0_Λ, 1_Λ}`: one atom, the full σ-field (no atoms on a one-point
    /// space).
    pub fn trivial(space: &ProbSpace<S>) -> Result<Self> {
        let atoms = if space.len() > 1 {
            vec![SigmaField::discrete(space)]
        } else {
            Vec::new()
        };
        Self::new(space, atoms)
    }

    /// Atoms `σ(ξ_1), …, σ(ξ_n)` on the dyadic cube.
    pub fn coordinate(n: usize) -> Result<Self> {
        let space = ProbSpace::dyadic(n)?;
        let atoms = (1..=n)
            .map(|i| SigmaField::generated_by(&space, &[space.sign(i)?]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&space, atoms)
    }

    /// Atoms `σ(ξ_1ξ_2), …, σ(ξ_nξ_{n+1}), σ(ξ_{n+1})` on `{±1}^{n+1}`.
    pub fn parity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("parity algebra needs n ≥ 1".into()));
        }
        let space = ProbSpace::dyadic(n + 1)?;
        let mut atoms = (1..=n)
            .map(|i| SigmaField::generated_by(&space, &[space.walsh(&[i, i + 1])?]))
            .collect::<Result<Vec<_>>>()?;
        atoms.push(SigmaField::generated_by(&space, &[space.sign(n + 1)?])?);
        Self::new(&space, atoms)
    }

    pub fn space(&self) -> &ProbSpace<S> {
        &self.space
    }

    pub fn atoms(&self) -> &[SigmaField<S>] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn top(&self) -> AtomSet {
        AtomSet::full(self.atoms.len())
    }

    /// All `2^n` elements.
    pub fn elements(&self) -> impl Iterator<Item = AtomSet> {
        AtomSet::all(self.atoms.len())
    }

    pub fn complement(&self, e: AtomSet) -> AtomSet {
        e.complement(self.atoms.len())
    }

    /// The σ-field `⋁_{i ∈ e} a_i`.
    pub fn realize(&self, e: AtomSet) -> SigmaField<S> {
        e.iter()
            .take_while(|&i| i < self.atoms.len())
            .fold(SigmaField::trivial(&self.space), |acc, i| {
                acc.join_unchecked(&self.atoms[i])
            })
    }

    /// Every co-atom `a_i'` (the complement of one atom).
    pub fn coatoms(&self) -> Vec<SigmaField<S>> {
        (0..self.atoms.len())
            .map(|i| self.realize(self.complement(AtomSet::singleton(i))))
            .collect()
    }

    /// The algebra `B_x = {u ∈ B : u ≤ x}` on the quotient space `(Ω, x, P|x)`.
    pub fn restrict(&self, e: AtomSet) -> Result<Restriction<S>> {
        if e.is_empty() {
            return Err(Error::Precondition(
                "restriction needs an element with at least one atom".into(),
            ));
        }
        if !e.is_subset(self.top()) {
            return Err(Error::Domain(format!("{e:?} is not an element")));
        }
        let x = self.realize(e);
        let outcomes = x
            .blocks()
            .iter()
            .map(|b| {
                let ids: Vec<&str> = b.iter().map(|&i| self.space.outcomes()[i].as_str()).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect();
        let quotient = ProbSpace::new(outcomes, x.block_probs())?;
        let atom_indices: Vec<usize> = e.iter().collect();
        let atoms = atom_indices
            .iter()
            .map(|&i| {
                let labels: Vec<usize> = x.blocks().iter().map(|b| self.atoms[i].label(b[0])).collect();
                SigmaField::from_labels(&quotient, &labels)
            })
            .collect();
        Ok(Restriction {
            algebra: Ntba::new(&quotient, atoms)?,
            quotient_map: x.labels().to_vec(),
            atom_indices,
            parent: self.space.clone(),
        })
    }
}

/// Result of [`Ntba::restrict`].
#[derive(Clone, Debug)]
pub struct Restriction<S: Scalar> {
    pub algebra: Ntba<S>,
    /// Quotient outcome holding each original outcome.
    pub quotient_map: Vec<usize>,
    /// Original index of each atom of the restricted algebra.
    pub atom_indices: Vec<usize>,
    parent: ProbSpace<S>,
}

impl<S: Scalar> Restriction<S> {
    /// Pulls a random variable on the quotient back to the original space.
    pub fn lift(&self, values: &[S]) -> Rv<S> {
        self.parent
            .rv(self.quotient_map.iter().map(|&q| values[q].clone()).collect())
            .expect("quotient map covers the space")
    }

    /// Maps an element of the restricted algebra to the parent's atom set.
    pub fn lift_element(&self, e: AtomSet) -> AtomSet {
        AtomSet::from_indices(e.iter().map(|i| self.atom_indices[i]))
    }
}

/// A block tuple (one block per atom) whose probability differs from the
/// product of the block probabilities.
pub fn mutual_independence_witness<S: Scalar>(
    space: &ProbSpace<S>,
    atoms: &[SigmaField<S>],
) -> Result<Option<Vec<usize>>> {
    let counts: Vec<usize> = atoms.iter().map(|a| a.num_blocks()).collect();
    let tuples = counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .filter(|&t| t <= MAX_BLOCK_TUPLES)
        .ok_or(Error::Capacity {
            what: "block tuples",
            requested: usize::MAX,
            limit: MAX_BLOCK_TUPLES,
        })?;
    let mut joint: HashMap<Vec<usize>, S> = HashMap::new();
    for (i, p) in space.probs().iter().enumerate() {
        let key: Vec<usize> = atoms.iter().map(|a| a.label(i)).collect();
        let slot = joint.entry(key).or_insert_with(S::zero);
        *slot = slot.plus(p);
    }
    let block_probs: Vec<Vec<S>> = atoms.iter().map(|a| a.block_probs()).collect();
    let zero = S::zero();
    let mut tuple = vec![0usize; atoms.len()];
    for _ in 0..tuples {
        let expected = tuple
            .iter()
            .zip(&block_probs)
            .fold(S::one(), |acc, (&b, ps)| acc.times(&ps[b]));
        let actual = joint.get(&tuple).unwrap_or(&zero);
        if !actual.approx_eq(&expected) {
            return Ok(Some(tuple));
        }
        // odometer increment
        for (slot, &c) in tuple.iter_mut().zip(&counts) {
            *slot += 1;
            if *slot < c {
                break;
            }
            *slot = 0;
        }
    }
    Ok(None)
}

/// Which condition a candidate family fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyFailure {
    SpaceMismatch,
    MissingBottom,
    MissingTop,
    NotMeetClosed,
    NotJoinClosed,
    NotDistributive,
    NoComplement,
    ComplementNotIndependent,
}

impl fmt::Display for FamilyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyFailure::SpaceMismatch => "elements live on different spaces",
            FamilyFailure::MissingBottom => "0_Λ is missing",
            FamilyFailure::MissingTop => "1_Λ is missing",
            FamilyFailure::NotMeetClosed => "not closed under meet",
            FamilyFailure::NotJoinClosed => "not closed under join",
            FamilyFailure::NotDistributive => "distributive law fails",
            FamilyFailure::NoComplement => "an element has no complement",
            FamilyFailure::ComplementNotIndependent => "complement pair not independent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyVerdict {
    Valid,
    /// `witness` holds indices into the audited family.
    Invalid {
        reason: FamilyFailure,
        witness: Vec<usize>,
    },
}

impl FamilyVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, FamilyVerdict::Valid)
    }
}

/// Audits an arbitrary family of σ-fields against the defining conditions
/// of a noise-type Boolean algebra.
pub fn validate_family<S: Scalar>(space: &ProbSpace<S>, elems: &[SigmaField<S>]) -> FamilyVerdict {
    let fail = |reason, witness: Vec<usize>| FamilyVerdict::Invalid { reason, witness };
    if let Some(i) = elems.iter().position(|e| !e.space().same_as(space)) {
        return fail(FamilyFailure::SpaceMismatch, vec![i]);
    }
    let index: HashMap<&SigmaField<S>, usize> = elems.iter().enumerate().rev().map(|(i, e)| (e, i)).collect();
    let zero = SigmaField::trivial(space);
    let one = SigmaField::discrete(space);
    let Some(&zero_idx) = index.get(&zero) else {
        return fail(FamilyFailure::MissingBottom, vec![]);
    };
    let Some(&one_idx) = index.get(&one) else {
        return fail(FamilyFailure::MissingTop, vec![]);
    };
    let n = elems.len();
    let mut meets = vec![0usize; n * n];
    let mut joins = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            match index.get(&elems[i].meet_unchecked(&elems[j])) {
                Some(&k) => meets[i * n + j] = k,
                None => return fail(FamilyFailure::NotMeetClosed, vec![i, j]),
            }
            match index.get(&elems[i].join_unchecked(&elems[j])) {
                Some(&k) => joins[i * n + j] = k,
                None => return fail(FamilyFailure::NotJoinClosed, vec![i, j]),
            }
        }
    }
    let distributive = |x: usize, y: usize, z: usize| {
        let lhs = meets[x * n + joins[y * n + z]];
        let rhs = joins[meets[x * n + y] * n + meets[x * n + z]];
        elems[lhs] == elems[rhs]
    };
    if n <= EXHAUSTIVE_TRIPLES {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !distributive(x, y, z) {
                        return fail(FamilyFailure::NotDistributive, vec![x, y, z]);
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..RANDOM_TRIPLES {
            let (x, y, z) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            if !distributive(x, y, z) {
                return fail(FamilyFailure::NotDistributive, vec![x, y, z]);
            }
        }
    }
    for x in 0..n {
        let complement = (0..n).find(|&y| {
            elems[meets[x * n + y]] == elems[zero_idx] && elems[joins[x * n + y]] == elems[one_idx]
        });
        match complement {
            None => return fail(FamilyFailure::NoComplement, vec![x]),
            Some(y) => {
                if elems[x].independence_witness(&elems[y]).is_some() {
                    return fail(FamilyFailure::ComplementNotIndependent, vec![x, y]);
                }
            }
        }
    }
    FamilyVerdict::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Field = SigmaField<Rational>;

    fn walsh_field(s: &ProbSpace<Rational>, c: &[usize]) -> Field {
        Field::generated_by(s, &[s.walsh(c).unwrap()]).unwrap()
    }

    #[test]
    fn coordinate_algebra() {
        let b = Ntba::<Rational>::coordinate(2).unwrap();
        assert_eq!(b.num_atoms(), 2);
        assert_eq!(b.elements().count(), 4);
        assert!(b.realize(AtomSet::from_indices([0, 1])).is_discrete());
        assert!(b.realize(AtomSet::EMPTY).is_trivial());
        let family: Vec<Field> = b.elements().map(|e| b.realize(e)).collect();
        assert_eq!(validate_family(b.space(), &family), FamilyVerdict::Valid);
    }

    #[test]
    fn parity_algebra() {
        let b1 = Ntba::<Rational>::parity(1).unwrap();
        assert_eq!(b1.space().len(), 4);
        assert_eq!(b1.atoms()[0], walsh_field(b1.space(), &[1, 2]));
        assert_eq!(b1.atoms()[1], walsh_field(b1.space(), &[2]));

        let b2 = Ntba::<Rational>::parity(2).unwrap();
        assert_eq!(b2.num_atoms(), 3);
        assert_eq!(b2.elements().count(), 8);
        let ys = b2.realize(AtomSet::from_indices([0, 1]));
        assert_eq!(ys.num_blocks(), 4);
        assert!(!ys.is_discrete());
        assert!(ys.blocks().iter().all(|b| b.len() == 2));
        assert!(Ntba::<Rational>::parity(0).is_err());
    }

    #[test]
    fn complements() {
        let b = Ntba::<Rational>::parity(2).unwrap();
        assert_eq!(b.complement(AtomSet::EMPTY), b.top());
        let x3 = AtomSet::singleton(2);
        let c = b.complement(x3);
        assert_eq!(c, AtomSet::from_indices([0, 1]));
        assert_eq!(b.complement(c), x3);
        let (x, y) = (b.realize(x3), b.realize(c));
        assert!(x.meet(&y).unwrap().is_trivial());
        assert!(x.join(&y).unwrap().is_discrete());
        assert!(x.independent(&y).unwrap());
    }

    #[test]
    fn validate_examples() {
        let s = ProbSpace::<Rational>::dyadic(2).unwrap();
        let zero = Field::trivial(&s);
        let one = Field::discrete(&s);
        let coords = vec![
            zero.clone(),
            walsh_field(&s, &[1]),
            walsh_field(&s, &[2]),
            one.clone(),
        ];
        assert!(validate_family(&s, &coords).is_valid());
        let mixed = vec![zero, walsh_field(&s, &[1]), walsh_field(&s, &[1, 2]), one];
        assert!(validate_family(&s, &mixed).is_valid());

        let s3 = ProbSpace::<Rational>::uniform(3).unwrap();
        let x = Field::from_blocks(&s3, &[vec![0], vec![1, 2]]).unwrap();
        let y = Field::from_blocks(&s3, &[vec![0, 1], vec![2]]).unwrap();
        let fam = vec![Field::trivial(&s3), x, y, Field::discrete(&s3)];
        assert_eq!(
            validate_family(&s3, &fam),
            FamilyVerdict::Invalid {
                reason: FamilyFailure::ComplementNotIndependent,
                witness: vec![1, 2]
            }
        );
    }

    #[test]
    fn validate_reports_missing_pieces() {
        let s = ProbSpace::<Rational>::dyadic(2).unwrap();
        let x1 = walsh_field(&s, &[1]);
        let x2 = walsh_field(&s, &[2]);
        let v = validate_family(&s, &[Field::discrete(&s), x1.clone()]);
        assert!(matches!(
            v,
            FamilyVerdict::Invalid {
                reason: FamilyFailure::MissingBottom,
                ..
            }
        ));
        let v = validate_family(
            &s,
            &[
                Field::trivial(&s),
                Field::discrete(&s),
                x1.clone(),
                x2.clone(),
                walsh_field(&s, &[1, 2]),
            ],
        );
        // σ(ξ1) ∨ σ(ξ2) = 1 is present, but the five-element family is not distributive
        assert!(matches!(
            v,
            FamilyVerdict::Invalid {
                reason: FamilyFailure::NotDistributive,
                ..
            }
        ));
        let v = validate_family(&s, &[Field::trivial(&s), Field::discrete(&s), x1]);
        assert!(matches!(
            v,
            FamilyVerdict::Invalid {
                reason: FamilyFailure::NoComplement,
                ..
            }
        ));
    }

    #[test]
    fn rejects_dependent_atoms() {
        let s = ProbSpace::<Rational>::dyadic(2).unwrap();
        let x1 = walsh_field(&s, &[1]);
        let err = Ntba::new(&s, vec![x1.clone(), x1.clone()]).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
        // pairwise independent but not mutually independent
        let triple = vec![x1, walsh_field(&s, &[2]), walsh_field(&s, &[1, 2])];
        assert!(Ntba::new(&s, triple).is_err());
        assert!(Ntba::new(&s, vec![walsh_field(&s, &[1])]).is_err());
    }

    #[test]
    fn restrictions() {
        let b = Ntba::<Rational>::coordinate(2).unwrap();
        let r = b.restrict(AtomSet::singleton(0)).unwrap();
        assert_eq!(r.algebra.num_atoms(), 1);
        assert_eq!(r.algebra.space().len(), 2);

        let full = b.restrict(b.top()).unwrap();
        assert_eq!(full.algebra.space().len(), 4);
        assert_eq!(full.algebra.space().probs(), b.space().probs());
        for (a, orig) in full.algebra.atoms().iter().zip(b.atoms()) {
            assert_eq!(a.labels(), orig.labels());
        }

        let p = Ntba::<Rational>::parity(2).unwrap();
        let r = p.restrict(AtomSet::from_indices([0, 1])).unwrap();
        assert_eq!(r.algebra.num_atoms(), 2);
        assert_eq!(r.algebra.space().len(), 4);
        assert_eq!(r.lift_element(AtomSet::singleton(1)), AtomSet::singleton(1));

        assert!(matches!(b.restrict(AtomSet::EMPTY), Err(Error::Precondition(_))));
    }

    #[test]
    fn trivial_algebras() {
        let s = ProbSpace::<Rational>::uniform(3).unwrap();
        let t = Ntba::trivial(&s).unwrap();
        assert_eq!(t.num_atoms(), 1);
        let one = ProbSpace::<Rational>::uniform(1).unwrap();
        let t1 = Ntba::trivial(&one).unwrap();
        assert_eq!(t1.num_atoms(), 0);
        assert!(t1.realize(t1.top()).is_discrete());
    }
}
