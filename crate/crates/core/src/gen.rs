//! Seeded random instances for property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::finmeas::{ProbSpace, Rv};
use crate::ntba::Ntba;
use crate::scalar::Scalar;
use crate::sigma::SigmaField;

/// Probabilities proportional to small integer weights, so exact
/// arithmetic stays cheap.
pub fn probs<S: Scalar>(rng: &mut impl Rng, n: usize) -> Vec<S> {
    let weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    weights.iter().map(|&w| S::from_ratio(w, total)).collect()
}

/// Space of `1..=max_len` outcomes; uniform with probability 1/4.
pub fn space<S: Scalar>(rng: &mut impl Rng, max_len: usize) -> ProbSpace<S> {
    let n = rng.random_range(1..=max_len.max(1));
    if rng.random_bool(0.25) {
        return ProbSpace::uniform(n).expect("small uniform space");
    }
    let ids = (0..n).map(|i| i.to_string()).collect();
    ProbSpace::new(ids, probs(rng, n)).expect("generated probabilities are valid")
}

pub fn partition<S: Scalar>(rng: &mut impl Rng, space: &ProbSpace<S>) -> SigmaField<S> {
    let k = rng.random_range(1..=space.len());
    let labels: Vec<usize> = (0..space.len()).map(|_| rng.random_range(0..k)).collect();
    SigmaField::from_labels(space, &labels)
}

/// A random σ-field below `x`: its blocks merged at random.
pub fn coarsening<S: Scalar>(rng: &mut impl Rng, x: &SigmaField<S>) -> SigmaField<S> {
    let k = rng.random_range(1..=x.num_blocks());
    let merge: Vec<usize> = (0..x.num_blocks()).map(|_| rng.random_range(0..k)).collect();
    let labels: Vec<usize> = x.labels().iter().map(|&l| merge[l]).collect();
    SigmaField::from_labels(x.space(), &labels)
}

/// Integer-valued random variable with values in `-3..=3`.
pub fn rv<S: Scalar>(rng: &mut impl Rng, space: &ProbSpace<S>) -> Rv<S> {
    let values = (0..space.len())
        .map(|_| S::from_ratio(rng.random_range(-3..=3), 1))
        .collect();
    space.rv(values).expect("length matches")
}

/// Independent product of factor spaces with outcomes shuffled; returns
/// the space and, per factor, the factor coordinate of every outcome.
pub fn shuffled_product<S: Scalar>(
    rng: &mut impl Rng,
    factors: &[Vec<S>],
) -> (ProbSpace<S>, Vec<Vec<usize>>) {
    let total: usize = factors.iter().map(Vec::len).product();
    // row-major: the last factor varies fastest
    let coords: Vec<Vec<usize>> = (0..factors.len())
        .map(|f| {
            let stride: usize = factors[f + 1..].iter().map(Vec::len).product();
            (0..total).map(|i| (i / stride) % factors[f].len()).collect()
        })
        .collect();
    let probs: Vec<S> = (0..total)
        .map(|i| {
            factors
                .iter()
                .zip(&coords)
                .fold(S::one(), |p, (fac, c)| p.times(&fac[c[i]]))
        })
        .collect();
    let mut perm: Vec<usize> = (0..total).collect();
    perm.shuffle(rng);
    let space = ProbSpace::new(
        (0..total).map(|i| i.to_string()).collect(),
        perm.iter().map(|&j| probs[j].clone()).collect(),
    )
    .expect("product of valid factors is valid");
    let coords = coords
        .into_iter()
        .map(|c| perm.iter().map(|&j| c[j]).collect())
        .collect();
    (space, coords)
}

/// Random NTBA on at most `max_outcomes` outcomes: a product of 2–4 point
/// factors with random weights, factors grouped into atoms, outcomes
/// shuffled.
pub fn ntba<S: Scalar>(rng: &mut impl Rng, max_outcomes: usize) -> Ntba<S> {
    assert!(max_outcomes >= 2, "need room for one nontrivial factor");
    let mut sizes = Vec::new();
    let mut total = 1usize;
    loop {
        let s = rng.random_range(2..=4);
        if total * s > max_outcomes || sizes.len() >= 6 {
            break;
        }
        sizes.push(s);
        total *= s;
        if rng.random_bool(0.15) {
            break;
        }
    }
    if sizes.is_empty() {
        sizes.push(2);
    }
    let factors: Vec<Vec<S>> = sizes.iter().map(|&s| probs(rng, s)).collect();
    let (space, coords) = shuffled_product(rng, &factors);
    let groups = rng.random_range(1..=sizes.len());
    let mut owner: Vec<usize> = (0..sizes.len()).map(|f| f % groups).collect();
    owner.shuffle(rng);
    let atoms = (0..groups)
        .map(|g| {
            let members: Vec<usize> = (0..sizes.len()).filter(|&f| owner[f] == g).collect();
            let labels: Vec<usize> = (0..space.len())
                .map(|i| members.iter().fold(0, |acc, &f| acc * 4 + coords[f][i]))
                .collect();
            SigmaField::from_labels(&space, &labels)
        })
        .collect();
    Ntba::new(&space, atoms).expect("independent factors form a noise-type algebra")
}

/// Two independent σ-fields `x, y` with `x ∨ y = 1` on a product space.
pub fn independent_pair<S: Scalar>(rng: &mut impl Rng) -> (ProbSpace<S>, SigmaField<S>, SigmaField<S>) {
    let a = rng.random_range(2..=4);
    let b = rng.random_range(2..=4);
    let factors = [probs(rng, a), probs(rng, b)];
    let (space, coords) = shuffled_product(rng, &factors);
    let x = SigmaField::from_labels(&space, &coords[0]);
    let y = SigmaField::from_labels(&space, &coords[1]);
    (space, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let b = ntba::<Rational>(&mut rng, 64);
            assert!(b.space().len() <= 64);
            let (_, x, y) = independent_pair::<Rational>(&mut rng);
            assert!(x.independent(&y).unwrap());
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = ntba::<Rational>(&mut ChaCha8Rng::seed_from_u64(3), 64);
        let b = ntba::<Rational>(&mut ChaCha8Rng::seed_from_u64(3), 64);
        assert_eq!(a.space().probs(), b.space().probs());
        assert_eq!(a.atoms(), b.atoms());
    }
}
