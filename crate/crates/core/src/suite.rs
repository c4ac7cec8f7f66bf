//! Seeded randomized property suites.
//!
//! Case `c` of suite `name` draws from its own generator (derived from the
//! seed, the suite name and `c`), so any failure is reproduced by
//! `(seed, suite, case)` alone.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chaos::{
    atomless_split, centered_pair_space, chaos_membership, first_chaos, first_chaos_exhaustive, split_space,
    superadditivity_gap, up_down_roundtrip, Split,
};
use crate::cofinite::{self, CofElem, NatSet};
use crate::error::{Error, Result};
use crate::finmeas::{ProbSpace, Rv};
use crate::formats::{PartitionJson, SpaceJson};
use crate::gen;
use crate::linalg::rank;
use crate::ntba::{validate_family, AtomSet, Ntba};
use crate::randsup::{self, SampleConfig};
use crate::scalar::Scalar;
use crate::sigma::SigmaField;
use crate::spectrum::{
    chaos_grading, k_restriction_additivity, sigma_tower_check, spectral_decompose,
    verify_spectral_identities,
};

/// Failures kept verbatim per suite; the rest are only counted.
const KEPT_FAILURES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    pub cases: u64,
    /// Evaluate independence on a space with two probabilities shifted, so
    /// the independence suite must report a counterexample.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Repro {
    pub seed: u64,
    pub suite: String,
    pub case: u64,
    pub space: Option<SpaceJson>,
    pub partitions: Vec<PartitionJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub case: u64,
    pub check: String,
    pub detail: String,
    pub repro: Repro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: u64,
    pub checks: u64,
    pub failed: u64,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    fn new(name: &str, cases: u64) -> Self {
        SuiteReport {
            name: name.into(),
            cases,
            checks: 0,
            failed: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

/// Per-case bookkeeping: the instance being checked, for reproduction.
struct Case<'r, S: Scalar> {
    report: &'r mut SuiteReport,
    seed: u64,
    case: u64,
    space: Option<ProbSpace<S>>,
    partitions: Vec<SigmaField<S>>,
}

impl<'r, S: Scalar> Case<'r, S> {
    fn instance(&mut self, space: &ProbSpace<S>, partitions: &[&SigmaField<S>]) {
        self.space = Some(space.clone());
        self.partitions = partitions.iter().map(|&x| x.clone()).collect();
    }

    fn check(&mut self, what: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.report.checks += 1;
        if ok {
            return;
        }
        self.report.failed += 1;
        if self.report.failures.len() < KEPT_FAILURES {
            let repro = Repro {
                seed: self.seed,
                suite: self.report.name.clone(),
                case: self.case,
                space: self.space.as_ref().map(SpaceJson::from_space),
                partitions: self.partitions.iter().map(PartitionJson::from_field).collect(),
            };
            self.report.failures.push(Failure {
                case: self.case,
                check: what.into(),
                detail: detail(),
                repro,
            });
        }
    }

    fn ok<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(what, false, || e.to_string());
                None
            }
        }
    }
}

fn fnv(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Generator for one case of one suite.
pub fn case_rng(seed: u64, suite: &str, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(suite));
    rng.set_stream(case);
    rng
}

fn run_cases<S: Scalar>(
    name: &str,
    seed: u64,
    cases: u64,
    mut body: impl FnMut(&mut Case<'_, S>, &mut ChaCha8Rng),
) -> SuiteReport {
    let mut report = SuiteReport::new(name, cases);
    for case in 0..cases {
        let mut rng = case_rng(seed, name, case);
        let mut c = Case {
            report: &mut report,
            seed,
            case,
            space: None,
            partitions: Vec::new(),
        };
        body(&mut c, &mut rng);
    }
    report
}

fn vec_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y))
}

fn nonneg<S: Scalar>(x: &S) -> bool {
    !x.negate().is_positive()
}

/// Span dimensions, Walsh orthonormality and product embeddings.
pub fn finmeas_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("finmeas", seed, cases, |c, rng| {
        let space = gen::space::<S>(rng, 8);
        c.instance(&space, &[]);
        let k = rng.random_range(0..=6);
        let mut vs: Vec<Rv<S>> = (0..k).map(|_| gen::rv(rng, &space)).collect();
        if k >= 2 {
            // force a dependency now and then
            let combo = vs[0].add(&vs[1]).expect("same space");
            vs.push(combo);
        }
        let Some(sub) = c.ok("span", space.span(&vs)) else {
            return;
        };
        let rows: Vec<Vec<S>> = vs.iter().map(|v| v.values().to_vec()).collect();
        let r = rank(&rows, space.len());
        c.check("dim span = rank", sub.dim() == r, || {
            format!("{} vs {r}", sub.dim())
        });

        let n = 1 + (c.case % 4) as usize;
        let Some(cube) = c.ok("dyadic", ProbSpace::<S>::dyadic(n)) else {
            return;
        };
        let chars: Vec<Rv<S>> = (0..1u32 << n)
            .map(|m| {
                let coords: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| i + 1).collect();
                cube.walsh(&coords).expect("coordinates in range")
            })
            .collect();
        let mut orthonormal = true;
        for (i, f) in chars.iter().enumerate() {
            for (j, g) in chars.iter().enumerate() {
                let ip = cube.inner(f, g).expect("same space");
                let want = if i == j { S::one() } else { S::zero() };
                orthonormal &= ip.approx_eq(&want);
            }
        }
        c.check("Walsh characters orthonormal", orthonormal, || format!("n = {n}"));

        let a = gen::space::<S>(rng, 4);
        let b = gen::space::<S>(rng, 4);
        let Some(prod) = c.ok("product", ProbSpace::product(&a, &b)) else {
            return;
        };
        let (f, g) = (gen::rv(rng, &a), gen::rv(rng, &a));
        let (h, k) = (gen::rv(rng, &b), gen::rv(rng, &b));
        let lhs =
            |u: &Rv<S>, v: &Rv<S>| -> Result<Rv<S>> { prod.embed_left(u)?.times(&prod.embed_right(v)?) };
        let ok = (|| -> Result<bool> {
            let left = prod.space.inner(&prod.embed_left(&f)?, &prod.embed_left(&g)?)?;
            let right = prod.space.inner(&prod.embed_right(&h)?, &prod.embed_right(&k)?)?;
            let tensor = prod.space.inner(&lhs(&f, &h)?, &lhs(&g, &k)?)?;
            let fg = a.inner(&f, &g)?;
            let hk = b.inner(&h, &k)?;
            Ok(left.approx_eq(&fg) && right.approx_eq(&hk) && tensor.approx_eq(&fg.times(&hk)))
        })();
        if let Some(ok) = c.ok("product inner products", ok) {
            c.check("embeddings preserve inner products", ok, String::new);
        }
    })
}

/// Lattice laws, projections and subspace round trips for random
/// partitions.
pub fn sigma_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("sigma", seed, cases, |c, rng| {
        let space = gen::space::<S>(rng, 8);
        let x = gen::partition(rng, &space);
        let y = gen::partition(rng, &space);
        let z = gen::partition(rng, &space);
        c.instance(&space, &[&x, &y, &z]);
        let m = |a: &SigmaField<S>, b: &SigmaField<S>| a.meet(b).expect("same space");
        let j = |a: &SigmaField<S>, b: &SigmaField<S>| a.join(b).expect("same space");
        c.check("meet commutative", m(&x, &y) == m(&y, &x), String::new);
        c.check("join commutative", j(&x, &y) == j(&y, &x), String::new);
        c.check(
            "meet associative",
            m(&m(&x, &y), &z) == m(&x, &m(&y, &z)),
            String::new,
        );
        c.check(
            "join associative",
            j(&j(&x, &y), &z) == j(&x, &j(&y, &z)),
            String::new,
        );
        c.check(
            "absorption",
            m(&x, &j(&x, &y)) == x && j(&x, &m(&x, &y)) == x,
            String::new,
        );
        c.check("idempotent", m(&x, &x) == x && j(&x, &x) == x, String::new);
        c.check("order", x.le(&y) == (m(&x, &y) == x), String::new);

        let sub = x.subspace();
        c.check(
            "sigma_of(subspace_of(x)) = x",
            SigmaField::generated_by_subspace(&sub) == x,
            String::new,
        );
        let Some(inf) = c.ok("inf", SigmaField::inf_family(&[x.clone(), y.clone(), z.clone()])) else {
            return;
        };
        let cap = x.subspace().intersect(&y.subspace()).intersect(&z.subspace());
        c.check(
            "subspace of inf = intersection",
            inf.subspace().same_subspace(&cap),
            || format!("dims {} vs {}", inf.subspace().dim(), cap.dim()),
        );

        let f = gen::rv(rng, &space);
        let g = gen::rv(rng, &space);
        let (Some(qf), Some(qg)) = (c.ok("cond_exp", x.cond_exp(&f)), c.ok("cond_exp", x.cond_exp(&g)))
        else {
            return;
        };
        let idem = x.cond_exp(&qf).map(|q| q.approx_eq(&qf)).unwrap_or(false);
        c.check("cond_exp idempotent", idem, String::new);
        let sym = space
            .inner(&qf, &g)
            .and_then(|a| Ok(a.approx_eq(&space.inner(&f, &qg)?)))
            .unwrap_or(false);
        c.check("cond_exp self-adjoint", sym, String::new);
        c.check("cond_exp range", sub.contains_rv(&qf), String::new);
    })
}

/// Independence ⇔ commuting and meeting trivially.
pub fn independence_suite<S: Scalar>(opts: Options) -> SuiteReport {
    let mut report = run_cases::<S>("independence", opts.seed, opts.cases, |c, rng| {
        let (space, x, y) = if c.case % 2 == 0 {
            let (space, x, y) = gen::independent_pair::<S>(rng);
            let (x, y) = if rng.random_bool(0.5) {
                (gen::coarsening(rng, &x), gen::coarsening(rng, &y))
            } else {
                (x, y)
            };
            (space, x, y)
        } else {
            let space = gen::space::<S>(rng, 8);
            let x = gen::partition(rng, &space);
            let y = gen::partition(rng, &space);
            (space, x, y)
        };
        c.instance(&space, &[&x, &y]);
        let (ix, iy) = if opts.inject_fault {
            match shifted(&space) {
                Some(s2) => (
                    SigmaField::from_labels(&s2, x.labels()),
                    SigmaField::from_labels(&s2, y.labels()),
                ),
                None => (x.clone(), y.clone()),
            }
        } else {
            (x.clone(), y.clone())
        };
        let Some(indep) = c.ok("independent", ix.independent(&iy)) else {
            return;
        };
        let Some(comm) = c.ok("commutes", x.commutes(&y)) else {
            return;
        };
        let trivial = x.meet(&y).map(|m| m.is_trivial()).unwrap_or(false);
        c.check(
            "independent ⇔ commuting ∧ meet trivial",
            indep == (comm && trivial),
            || format!("independent {indep}, commutes {comm}, meet trivial {trivial}"),
        );
    });
    // the three-point witness: trivial meet, yet dependent and non-commuting
    let space = ProbSpace::<S>::uniform(3).expect("three points");
    let x = SigmaField::from_blocks(&space, &[vec![0], vec![1, 2]]).expect("partition");
    let y = SigmaField::from_blocks(&space, &[vec![0, 1], vec![2]]).expect("partition");
    let mut c = Case {
        report: &mut report,
        seed: opts.seed,
        case: opts.cases,
        space: Some(space),
        partitions: vec![x.clone(), y.clone()],
    };
    let dependent = !x.independent(&y).unwrap_or(true);
    let noncommuting = !x.commutes(&y).unwrap_or(true);
    c.check(
        "three-point witness dependent",
        dependent && noncommuting,
        String::new,
    );
    report
}

/// The space with mass `δ` moved from outcome 1 to outcome 0.
fn shifted<S: Scalar>(space: &ProbSpace<S>) -> Option<ProbSpace<S>> {
    if space.len() < 2 {
        return None;
    }
    let mut probs = space.probs().to_vec();
    let two = S::from_ratio(2, 1);
    let delta = if probs[0] < probs[1] { &probs[0] } else { &probs[1] }.divide(&two);
    probs[0] = probs[0].plus(&delta);
    probs[1] = probs[1].minus(&delta);
    ProbSpace::new(space.outcomes().to_vec(), probs).ok()
}

/// Identities for independent quadruples `u_i ≤ x`, `v_i ≤ y`.
pub fn quadruple_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("quadruples", seed, cases, |c, rng| {
        let (space, x, y) = gen::independent_pair::<S>(rng);
        let (u1, u2) = (gen::coarsening(rng, &x), gen::coarsening(rng, &x));
        let (v1, v2) = (gen::coarsening(rng, &y), gen::coarsening(rng, &y));
        c.instance(&space, &[&x, &y, &u1, &u2, &v1, &v2]);
        let m = |a: &SigmaField<S>, b: &SigmaField<S>| a.meet_unchecked(b);
        let j = |a: &SigmaField<S>, b: &SigmaField<S>| a.join_unchecked(b);
        c.check(
            "(u1∨v1)∧(u2∨v2) = (u1∧u2)∨(v1∧v2)",
            m(&j(&u1, &v1), &j(&u2, &v2)) == j(&m(&u1, &u2), &m(&v1, &v2)),
            String::new,
        );
        c.check("(u∨v)∧x = u", m(&j(&u1, &v1), &x) == u1, String::new);
        c.check("(u∨v)∧y = v", m(&j(&u1, &v1), &y) == v1, String::new);
        let z = j(&u2, &v2);
        c.check("z = (x∧z)∨(y∧z)", j(&m(&x, &z), &m(&y, &z)) == z, String::new);
    })
}

/// Element lattice, family validation and generated sub-algebras.
pub fn ntba_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("ntba", seed, cases, |c, rng| {
        let b = gen::ntba::<S>(rng, 16);
        let atoms: Vec<&SigmaField<S>> = b.atoms().iter().collect();
        c.instance(b.space(), &atoms);
        let n = b.num_atoms();
        let e1 = AtomSet(rng.random_range(0..1u64 << n));
        let e2 = AtomSet(rng.random_range(0..1u64 << n));
        let (r1, r2) = (b.realize(e1), b.realize(e2));
        c.check(
            "meet ↔ intersection",
            r1.meet_unchecked(&r2) == b.realize(e1.intersection(e2)),
            || format!("{e1:?} ∧ {e2:?}"),
        );
        c.check(
            "join ↔ union",
            r1.join_unchecked(&r2) == b.realize(e1.union(e2)),
            || format!("{e1:?} ∨ {e2:?}"),
        );
        let elems: Vec<SigmaField<S>> = b.elements().map(|e| b.realize(e)).collect();
        let verdict = validate_family(b.space(), &elems);
        c.check(
            "realized elements form a valid family",
            verdict.is_valid(),
            || format!("{verdict:?}"),
        );
        // two coarsenings and the algebra they generate
        let g1: Vec<usize> = (0..n).map(|_| rng.random_range(0..n.max(1))).collect();
        let g2: Vec<usize> = (0..n).map(|_| rng.random_range(0..n.max(1))).collect();
        let groups = |g: &[usize]| -> Vec<AtomSet> {
            (0..n)
                .map(|k| AtomSet::from_indices((0..n).filter(|&i| g[i] == k)))
                .filter(|s| !s.is_empty())
                .collect()
        };
        let (a1, a2) = (groups(&g1), groups(&g2));
        let mut meets = Vec::new();
        for &p in &a1 {
            for &q in &a2 {
                let r = b.realize(p).meet_unchecked(&b.realize(q));
                if !r.is_trivial() {
                    c.check(
                        "a1 ∧ a2 realizes p ∩ q",
                        r == b.realize(p.intersection(q)),
                        String::new,
                    );
                    meets.push(r);
                }
            }
        }
        let gen_ok = Ntba::new(b.space(), meets.clone()).is_ok()
            && a1.iter().chain(&a2).all(|&p| {
                let target = b.realize(p);
                meets
                    .iter()
                    .filter(|m| m.le(&target))
                    .fold(SigmaField::trivial(b.space()), |acc, m| acc.join_unchecked(m))
                    == target
            });
        c.check("nonzero meets are the generated atoms", gen_ok, String::new);
    })
}

/// Superadditivity, the three first-chaos criteria and related identities.
pub fn chaos_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("chaos", seed, cases, |c, rng| {
        let b = gen::ntba::<S>(rng, 16);
        let atoms: Vec<&SigmaField<S>> = b.atoms().iter().collect();
        c.instance(b.space(), &atoms);
        let chaos = first_chaos(&b);
        c.check(
            "finite algebras are classical",
            chaos.classical && !chaos.black,
            String::new,
        );
        let n = b.num_atoms();
        let f = match rng.random_range(0..3) {
            0 if chaos.h1.dim() > 0 => {
                let mut v = vec![S::zero(); b.space().len()];
                for basis in chaos.h1.basis() {
                    let coef = S::from_ratio(rng.random_range(-2..=2), 1);
                    v.iter_mut()
                        .zip(basis)
                        .for_each(|(vi, bi)| vi.add_prod(&coef, bi));
                }
                b.space().rv(v).expect("length matches")
            }
            _ => gen::rv(rng, b.space()),
        };
        if let Some(m) = c.ok("membership", chaos_membership(&b, &f)) {
            c.check(
                "membership ⇔ f ∈ H^(1)",
                m.verdict() == chaos.h1.contains_rv(&f),
                || format!("{m:?}"),
            );
        }
        let x = AtomSet(rng.random_range(0..1u64 << n));
        let y = AtomSet(rng.random_range(0..1u64 << n));
        let gap = superadditivity_gap(&b, f.values(), x, y);
        c.check("superadditivity", nonneg(&gap), || {
            format!("gap {gap} at {x:?}, {y:?}")
        });

        let (e1, e2) = (x, y.intersection(x.complement(n)));
        let (q1, q2, q12) = (b.realize(e1), b.realize(e2), b.realize(e1.union(e2)));
        let additive = chaos.h1.basis().iter().all(|h| {
            let sum: Vec<S> = q1
                .project_values(h)
                .iter()
                .zip(q2.project_values(h))
                .map(|(a, b)| a.plus(&b))
                .collect();
            vec_eq(&q12.project_values(h), &sum)
        });
        c.check("Q restricted to H^(1) is additive", additive, String::new);

        let (xr, xc) = (b.realize(x), b.realize(b.complement(x)));
        c.check(
            "split space = centered pair space",
            split_space(&xr, &xc).same_subspace(&centered_pair_space(&xr, &xc)),
            || format!("{x:?}"),
        );
        if let Some(all) = c.ok("exhaustive", first_chaos_exhaustive(&b)) {
            c.check("co-atoms suffice", all.same_subspace(&chaos.h1), String::new);
        }
        // same algebra, atoms listed in another order
        let mut order: Vec<usize> = (0..n).collect();
        order.reverse();
        let permuted: Vec<SigmaField<S>> = order.iter().map(|&i| b.atoms()[i].clone()).collect();
        if let Some(b2) = c.ok("reordered", Ntba::new(b.space(), permuted)) {
            c.check(
                "presentation does not matter",
                first_chaos(&b2).h1.same_subspace(&chaos.h1),
                String::new,
            );
        }
        if let Some(Split::Found { elements, .. }) =
            c.ok("split", centered(&f).and_then(|g| atomless_split(&b, &g, 1e6)))
        {
            let cover = elements.iter().fold(AtomSet::EMPTY, |a, &e| a.union(e));
            c.check("split covers 1", cover == b.top(), String::new);
        }
    })
}

fn centered<S: Scalar>(f: &Rv<S>) -> Result<Rv<S>> {
    let mean = f.space().expectation(f)?;
    f.sub(&f.space().constant(mean))
}

fn constructed_algebras<S: Scalar>() -> Result<Vec<Ntba<S>>> {
    let mut out = Vec::new();
    for n in 1..=5 {
        out.push(Ntba::coordinate(n)?);
    }
    for n in 1..=4 {
        out.push(Ntba::parity(n)?);
    }
    for n in [1, 2, 5] {
        out.push(Ntba::trivial(&ProbSpace::uniform(n)?)?);
    }
    Ok(out)
}

/// `Up(Down(x)) = x` for every element of the constructed algebras and of
/// random algebras with at most five atoms.
pub fn roundtrip_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    let fixed = constructed_algebras::<S>();
    run_cases::<S>("roundtrip", seed, cases + 1, |c, rng| {
        let algebras = if c.case == 0 {
            match c.ok("constructed", fixed.clone()) {
                Some(v) => v,
                None => return,
            }
        } else {
            let mut b = gen::ntba::<S>(rng, 32);
            while b.num_atoms() > 5 {
                b = gen::ntba::<S>(rng, 32);
            }
            vec![b]
        };
        for b in &algebras {
            let atoms: Vec<&SigmaField<S>> = b.atoms().iter().collect();
            c.instance(b.space(), &atoms);
            let chaos = first_chaos(b);
            for e in b.elements() {
                let ok = up_down_roundtrip(b, &chaos, e);
                if let Some(ok) = c.ok("roundtrip", ok) {
                    c.check("Up(Down(x)) = x", ok, || format!("element {e:?}"));
                }
            }
        }
    })
}

/// Spectral identities, grading and the σ-field tower on random algebras.
pub fn spectrum_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("spectrum", seed, cases, |c, rng| {
        let b = gen::ntba::<S>(rng, 32);
        let atoms: Vec<&SigmaField<S>> = b.atoms().iter().collect();
        c.instance(b.space(), &atoms);
        let d = spectral_decompose(&b);
        if let Some(r) = c.ok("identities", verify_spectral_identities(&d)) {
            c.check("spectral identities", r.is_ok(), || format!("{r:?}"));
        }
        if let Some(g) = c.ok("grading", chaos_grading(&d)) {
            let total: usize = g.dims.values().sum();
            c.check("levels fill H", total == b.space().len() && g.classical, || {
                format!("{:?}", g.dims)
            });
        }
        c.check("σ(H^(k)) ⊂ σ(H^(1))", sigma_tower_check(&d), String::new);
        // a coarser algebra: atoms merged in pairs
        let n = b.num_atoms();
        if n >= 2 {
            let groups: Vec<AtomSet> = (0..n)
                .step_by(2)
                .map(|i| AtomSet::from_indices((i..(i + 2).min(n)).collect::<Vec<_>>()))
                .collect();
            let coarse_atoms: Vec<SigmaField<S>> = groups.iter().map(|&g| b.realize(g)).collect();
            if let Some(coarse) = c.ok("coarsening", Ntba::new(b.space(), coarse_atoms)) {
                let dc = spectral_decompose(&coarse);
                let monotone = d.points.iter().all(|p| {
                    dc.points
                        .iter()
                        .find(|q| q.eigenspace.contains_subspace(&p.eigenspace))
                        .is_some_and(|q| q.k() <= p.k())
                });
                c.check("K of a sub-algebra is smaller", monotone, String::new);
            }
        }
    })
}

/// `H(E_1) = H^(1)` on random algebras of up to 64 outcomes.
pub fn first_level_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("first-level", seed, cases, |c, rng| {
        let b = gen::ntba::<S>(rng, 64);
        let atoms: Vec<&SigmaField<S>> = b.atoms().iter().collect();
        c.instance(b.space(), &atoms);
        let d = spectral_decompose(&b);
        let h1 = first_chaos(&b).h1;
        let level = d.level(1);
        c.check("H(E_1) = H^(1)", level.same_subspace(&h1), || {
            format!("dims {} vs {}", level.dim(), h1.dim())
        });
    })
}

/// `K = K_e + K_{e'}` under restriction.
pub fn additivity_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    run_cases::<S>("additivity", seed, cases, |c, rng| {
        let mut b = gen::ntba::<S>(rng, 32);
        while b.num_atoms() < 2 {
            b = gen::ntba::<S>(rng, 32);
        }
        let n = b.num_atoms();
        let atoms: Vec<&SigmaField<S>> = b.atoms().iter().collect();
        c.instance(b.space(), &atoms);
        let e = AtomSet(rng.random_range(1..(1u64 << n) - 1));
        if let Some(ok) = c.ok("additivity", k_restriction_additivity(&b, e)) {
            c.check("K additive under restriction", ok, || format!("element {e:?}"));
        }
    })
}

fn random_elem(rng: &mut impl Rng, pool: &[CofElem]) -> CofElem {
    pool.choose(rng).expect("nonempty pool").clone()
}

/// Lattice laws, complements and completion of the symbolic algebra.
pub fn cofinite_suite(seed: u64, cases: u64) -> SuiteReport {
    let pool = cofinite::bounded_enumeration(4);
    run_cases::<f64>("cofinite", seed, cases, |c, rng| {
        let (a, b, d) = (
            random_elem(rng, &pool),
            random_elem(rng, &pool),
            random_elem(rng, &pool),
        );
        let show = || format!("a = {a}, b = {b}, c = {d}");
        c.check(
            "commutative",
            a.meet(&b) == b.meet(&a) && a.join(&b) == b.join(&a),
            show,
        );
        c.check(
            "associative",
            a.meet(&b).meet(&d) == a.meet(&b.meet(&d)) && a.join(&b).join(&d) == a.join(&b.join(&d)),
            show,
        );
        c.check("idempotent", a.meet(&a) == a && a.join(&a) == a, show);
        c.check(
            "absorptive",
            a.meet(&a.join(&b)) == a && a.join(&a.meet(&b)) == a,
            show,
        );
        if a.in_b() && b.in_b() && d.in_b() {
            c.check(
                "distributive on B",
                a.meet(&b.join(&d)) == a.meet(&b).join(&a.meet(&d)),
                show,
            );
            c.check("B closed", a.meet(&b).in_b() && a.join(&b).in_b(), show);
        }
        match a.complement() {
            Some(ac) => {
                c.check(
                    "complement",
                    a.meet(&ac) == CofElem::zero() && a.join(&ac) == CofElem::one(),
                    show,
                );
                let others = pool
                    .iter()
                    .filter(|e| **e != ac)
                    .any(|e| a.meet(e) == CofElem::zero() && a.join(e) == CofElem::one());
                c.check("complement unique", !others, show);
            }
            None => c.check("only B is complemented", !a.in_b(), show),
        }
        let i = NatSet::from_bits(
            (0..rng.random_range(0..4))
                .map(|_| rng.random_bool(0.5))
                .collect(),
            (0..rng.random_range(1..4))
                .map(|_| rng.random_bool(0.5))
                .collect(),
        )
        .expect("nonempty period");
        for seq in [
            cofinite::Seq::PrefixJoins(i.clone()),
            cofinite::Seq::ComplementChain(i.clone()),
            cofinite::Seq::TailChain(rng.random_range(1..5)),
        ] {
            if let Some(l) = c.ok("limit", cofinite::monotone_limit(&seq)) {
                // the limit is comparable with every term in the right direction
                let ok = (1..12).all(|n| match (&seq, seq.term(n)) {
                    (cofinite::Seq::PrefixJoins(_), Ok(t)) => t.le(&l),
                    (_, Ok(t)) => l.le(&t),
                    (_, Err(_)) => false,
                });
                c.check("limit bounds the terms", ok, || format!("{seq:?} → {l}"));
            }
        }
        if let Some(d) = c.ok(
            "double limit",
            cofinite::double_limit_check(&cofinite::Seq::PrefixJoins(i.clone())),
        ) {
            c.check("double limit", d.equal, || format!("{d:?}"));
        }
        if c.case == 0 {
            let done = cofinite::completion(&pool);
            let b_part: Vec<CofElem> = pool.iter().filter(|e| e.in_b()).cloned().collect();
            c.check("completion = B", done == b_part, String::new);
        }
    })
}

/// A random element of `B` supported below `n`.
pub fn random_supported(rng: &mut impl Rng, n: u64) -> CofElem {
    let subset =
        |rng: &mut dyn rand::RngCore, hi: u64| NatSet::finite((1..hi).filter(|_| rng.random_bool(0.5)));
    if rng.random_bool(0.4) {
        let m = rng.random_range(1..=n);
        let ys = subset(rng, m);
        CofElem::from_parts(Some(m), ys).expect("valid tail")
    } else {
        CofElem::ys(subset(rng, n))
    }
}

/// Symbolic meets and joins against partitions in the parity truncation.
pub fn cross_oracle_suite<S: Scalar>(seed: u64, cases: u64) -> SuiteReport {
    let algebras: Vec<Result<Ntba<S>>> = (1..=6).map(Ntba::parity).collect();
    run_cases::<S>("cross-oracle", seed, cases, |c, rng| {
        let n = rng.random_range(1..=6u64);
        let Some(b) = c.ok("parity", algebras[n as usize - 1].clone()) else {
            return;
        };
        let (x, y) = (random_supported(rng, n), random_supported(rng, n));
        let show = || format!("n = {n}, a = {x}, b = {y}");
        let real = |e: &CofElem| e.realize(&b);
        let (Some(rx), Some(ry)) = (c.ok("realize", real(&x)), c.ok("realize", real(&y))) else {
            return;
        };
        c.instance(b.space(), &[&rx, &ry]);
        if let Some(rm) = c.ok("realize meet", real(&x.meet(&y))) {
            c.check("meet agrees", rm == rx.meet_unchecked(&ry), show);
        }
        if let Some(rj) = c.ok("realize join", real(&x.join(&y))) {
            c.check("join agrees", rj == rx.join_unchecked(&ry), show);
        }
    })
}

/// Distribution law of `ν_{b,p}` and the union bound.
pub fn randsup_suite(seed: u64, trials: u64) -> SuiteReport {
    let mut report = SuiteReport::new("randsup", trials);
    let mut c = Case::<f64> {
        report: &mut report,
        seed,
        case: 0,
        space: None,
        partitions: Vec::new(),
    };
    for n in 1..=4 {
        for p in [0.1, 0.5, 0.9] {
            if let Some(r) = c.ok("chi-square", randsup::distribution_test(n, p, trials, seed)) {
                c.check("ν_{b,p} frequencies", r.pass(), || {
                    format!(
                        "n = {n}, p = {p}: χ² = {:.3}, p-value {:.4}",
                        r.statistic, r.p_value
                    )
                });
            }
            c.case += 1;
        }
    }
    for (counts, ps) in [
        (vec![2, 2, 2], vec![0.1, 0.1, 0.1]),
        (vec![1], vec![0.25]),
        (vec![3, 3], vec![0.4, 0.4]),
        (vec![1, 2, 4, 8], vec![0.05, 0.1, 0.15, 0.2]),
    ] {
        let cfg = SampleConfig {
            atom_counts: counts,
            ps,
            seed,
            trials,
            c: None,
        };
        if let Some(r) = c.ok("union bound", randsup::union_bound_report(&cfg, 0)) {
            c.check("union bound", r.pass(), || {
                format!(
                    "estimate {:.5}, exact {:.5}, bound {:.5}, σ {:.5}",
                    r.estimate, r.exact, r.bound, r.sigma
                )
            });
        }
        c.case += 1;
    }
    report
}

/// Every suite with `cases` instances each.
pub fn run_all<S: Scalar>(opts: Options) -> Vec<SuiteReport> {
    let (seed, cases) = (opts.seed, opts.cases);
    vec![
        finmeas_suite::<S>(seed, cases),
        sigma_suite::<S>(seed, cases),
        independence_suite::<S>(opts),
        quadruple_suite::<S>(seed, cases),
        ntba_suite::<S>(seed, cases),
        chaos_suite::<S>(seed, cases),
        roundtrip_suite::<S>(seed, cases.min(20)),
        spectrum_suite::<S>(seed, cases),
        first_level_suite::<S>(seed, cases),
        additivity_suite::<S>(seed, cases),
        cofinite_suite(seed, cases),
        cross_oracle_suite::<S>(seed, cases),
        randsup_suite(seed, 2_000 * cases.max(1)),
    ]
}

/// Error for callers that treat any failure as fatal.
pub fn first_failure(reports: &[SuiteReport]) -> Result<()> {
    match reports.iter().find(|r| !r.passed()) {
        None => Ok(()),
        Some(r) => Err(Error::Consistency(format!(
            "suite {} failed {} of {} checks",
            r.name, r.failed, r.checks
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn small_run_passes() {
        let opts = Options {
            seed: 1,
            cases: 3,
            inject_fault: false,
        };
        for r in run_all::<Rational>(opts) {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn fault_is_caught() {
        let opts = Options {
            seed: 1,
            cases: 4,
            inject_fault: true,
        };
        let r = independence_suite::<Rational>(opts);
        assert!(!r.passed());
        assert!(r.failures[0].repro.space.is_some());
    }
}
