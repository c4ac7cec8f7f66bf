//! Library results against computations that share none of its code:
//! modular rank, explicit block averages, Walsh diagonalization and the
//! parity/coordinate change of variables.

use noise_lattice::chaos::first_chaos;
use noise_lattice::spectrum::spectral_decompose;
use noise_lattice::{gen, AtomSet, Ntba, ProbSpace, Rational, Scalar, SigmaField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u128 = (1 << 61) - 1;

fn to_mod(x: i64) -> u128 {
    (x.rem_euclid(P as i64)) as u128
}

fn pow_mod(mut b: u128, mut e: u128) -> u128 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

fn rat_mod(x: &Rational) -> u128 {
    let part = |v: &num_bigint::BigInt| to_mod(i64::try_from(v.clone()).expect("small entries"));
    part(x.numer()) * pow_mod(part(x.denom()), P - 2) % P
}

/// Rank of a rational matrix over `F_p`, `p = 2^61 − 1`.
fn rank_mod_p(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<u128>> = rows.iter().map(|r| r.iter().map(rat_mod).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = pow_mod(m[rank][c], P - 2);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c] * inv % P;
                let pivot = m[rank].clone();
                for (x, &p) in m[r].iter_mut().zip(&pivot).skip(c) {
                    *x = (*x + P - f * p % P) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn signs(idx: usize, m: usize) -> Vec<i64> {
    (0..m)
        .map(|b| if idx >> (m - 1 - b) & 1 == 0 { 1 } else { -1 })
        .collect()
}

fn index(signs: &[i64]) -> usize {
    signs.iter().fold(0, |acc, &s| acc << 1 | usize::from(s < 0))
}

#[test]
fn span_dimension_matches_modular_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let space = gen::space::<Rational>(&mut rng, 8);
        let k = rng.random_range(0..8);
        let vs: Vec<_> = (0..k).map(|_| gen::rv(&mut rng, &space)).collect();
        let rows: Vec<Vec<Rational>> = vs.iter().map(|v| v.values().to_vec()).collect();
        assert_eq!(space.span(&vs).unwrap().dim(), rank_mod_p(&rows));
    }
}

#[test]
fn conditional_expectation_is_the_block_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let space = gen::space::<Rational>(&mut rng, 8);
        let x = gen::partition(&mut rng, &space);
        let f = gen::rv(&mut rng, &space);
        let q = x.cond_exp(&f).unwrap();
        for block in x.blocks() {
            let mass = block.iter().fold(Rational::zero(), |a, &i| a + space.prob(i));
            let weighted = block
                .iter()
                .fold(Rational::zero(), |a, &i| a + space.prob(i) * &f.values()[i]);
            for &i in block {
                assert_eq!(q.values()[i], &weighted / &mass);
            }
        }
    }
}

/// Labels of the finest common coarsening, by flooding.
fn meet_labels(a: &[usize], b: &[usize]) -> Vec<usize> {
    let n = a.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = next;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if comp[j] == usize::MAX && (a[i] == a[j] || b[i] == b[j]) {
                    comp[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    comp
}

#[test]
fn meet_join_and_independence_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..300 {
        let (space, x, y) = if case % 3 == 0 {
            gen::independent_pair::<Rational>(&mut rng)
        } else {
            let space = gen::space::<Rational>(&mut rng, 8);
            let x = gen::partition(&mut rng, &space);
            let y = gen::partition(&mut rng, &space);
            (space, x, y)
        };
        let meet = SigmaField::from_labels(&space, &meet_labels(x.labels(), y.labels()));
        assert_eq!(x.meet(&y).unwrap(), meet);
        let pairs: Vec<usize> = (0..space.len())
            .map(|i| x.label(i) * space.len() + y.label(i))
            .collect();
        assert_eq!(x.join(&y).unwrap(), SigmaField::from_labels(&space, &pairs));

        let mass = |f: &dyn Fn(usize) -> bool| {
            (0..space.len())
                .filter(|&i| f(i))
                .fold(Rational::zero(), |a, i| a + space.prob(i))
        };
        let independent = (0..x.num_blocks()).all(|a| {
            (0..y.num_blocks()).all(|b| {
                mass(&|i| x.label(i) == a && y.label(i) == b)
                    == mass(&|i| x.label(i) == a) * mass(&|i| y.label(i) == b)
            })
        });
        assert_eq!(x.independent(&y).unwrap(), independent, "case {case}");
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let mut row = vec![1usize];
    for _ in 0..n {
        let mut next = vec![1; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k]
}

#[test]
fn coordinate_spectrum_is_the_walsh_basis() {
    for n in 1..=5 {
        let b = Ntba::<Rational>::coordinate(n).unwrap();
        let space = b.space();
        // Q_x w_S = w_S if S ⊆ x, else 0
        for s in AtomSet::all(n) {
            let coords: Vec<usize> = s.iter().map(|i| i + 1).collect();
            let w = space.walsh(&coords).unwrap();
            for x in b.elements() {
                let q = b.realize(x).cond_exp(&w).unwrap();
                if s.is_subset(x) {
                    assert!(q.approx_eq(&w));
                } else {
                    assert!(q.is_zero());
                }
            }
        }
        let d = spectral_decompose(&b);
        assert_eq!(d.points.len(), 1 << n);
        for p in &d.points {
            assert_eq!(p.eigenspace.dim(), 1);
            let coords: Vec<usize> = p.generator.iter().map(|i| i + 1).collect();
            assert!(p.eigenspace.contains_rv(&space.walsh(&coords).unwrap()));
        }
        for (k, dim) in d.level_dims() {
            assert_eq!(dim, binomial(n, k), "n = {n}, k = {k}");
        }
    }
}

/// `dim H^(1) = N − rank` of the stacked constraints `f = Q_x f + Q_{x'} f`
/// and `E f = 0`.
fn first_chaos_dim_oracle(b: &Ntba<Rational>) -> usize {
    let space = b.space();
    let n = space.len();
    let q_row = |x: &SigmaField<Rational>, i: usize| -> Vec<Rational> {
        let block = &x.blocks()[x.label(i)];
        let mass = block.iter().fold(Rational::zero(), |a, &j| a + space.prob(j));
        (0..n)
            .map(|j| {
                if x.label(j) == x.label(i) {
                    space.prob(j) / &mass
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };
    let mut rows: Vec<Vec<Rational>> = vec![space.probs().to_vec()];
    for e in b.elements() {
        let (x, xc) = (b.realize(e), b.realize(b.complement(e)));
        for i in 0..n {
            let (a, c) = (q_row(&x, i), q_row(&xc, i));
            rows.push(
                (0..n)
                    .map(|j| {
                        let delta = if i == j { Rational::one() } else { Rational::zero() };
                        delta - &a[j] - &c[j]
                    })
                    .collect(),
            );
        }
    }
    n - rank_mod_p(&rows)
}

#[test]
fn first_chaos_dimension_against_linear_constraints() {
    for n in 1..=5 {
        let b = Ntba::<Rational>::coordinate(n).unwrap();
        assert_eq!(first_chaos(&b).h1.dim(), n);
        assert_eq!(first_chaos_dim_oracle(&b), n);
    }
    for n in 1..=4 {
        let b = Ntba::<Rational>::parity(n).unwrap();
        assert_eq!(first_chaos(&b).h1.dim(), first_chaos_dim_oracle(&b));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let b = gen::ntba::<Rational>(&mut rng, 16);
        assert_eq!(first_chaos(&b).h1.dim(), first_chaos_dim_oracle(&b), "{b:?}");
    }
    let trivial = Ntba::<Rational>::trivial(&ProbSpace::uniform(5).unwrap()).unwrap();
    assert_eq!(first_chaos_dim_oracle(&trivial), 4);
    assert_eq!(first_chaos(&trivial).h1.dim(), 4);
}

#[test]
fn parity_is_coordinate_after_change_of_variables() {
    for n in 1..=4 {
        let m = n + 1;
        let parity = Ntba::<Rational>::parity(n).unwrap();
        let coord = Ntba::<Rational>::coordinate(m).unwrap();
        // η_k = ω_k ω_{k+1} for k ≤ n, η_{n+1} = ω_{n+1}
        let phi: Vec<usize> = (0..1 << m)
            .map(|i| {
                let w = signs(i, m);
                let eta: Vec<i64> = (0..m)
                    .map(|k| if k < n { w[k] * w[k + 1] } else { w[k] })
                    .collect();
                index(&eta)
            })
            .collect();
        for e in parity.elements() {
            let target = coord.realize(e);
            let pulled: Vec<usize> = phi.iter().map(|&j| target.label(j)).collect();
            assert_eq!(
                parity.realize(e),
                SigmaField::from_labels(parity.space(), &pulled),
                "n = {n}, element {e:?}"
            );
        }
        assert_eq!(
            spectral_decompose(&parity).level_dims(),
            spectral_decompose(&coord).level_dims()
        );
        assert_eq!(first_chaos(&parity).h1.dim(), m);
    }
}

#[test]
fn sign_pairing_blocks() {
    for n in 1..=4 {
        let space = ProbSpace::<Rational>::dyadic(n + 1).unwrap();
        let gens: Vec<_> = (1..=n).map(|i| space.walsh(&[i, i + 1]).unwrap()).collect();
        let x = SigmaField::generated_by_subspace(&space.span(&gens).unwrap());
        assert_eq!(x.num_blocks(), 1 << n);
        let flip = |i: usize| (1 << (n + 1)) - 1 - i;
        for block in x.blocks() {
            assert_eq!(block.len(), 2);
            assert_eq!(block[1], flip(block[0]));
        }
    }
}
