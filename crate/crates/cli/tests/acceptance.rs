//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Everything runs in exact rational arithmetic with a fixed seed, so every
//! equality below is exact; statistical criteria state their thresholds.

use std::process::Command;
use std::time::{Duration, Instant};

use noise_lattice::chaos::{chaos_membership, first_chaos, superadditivity_gap, up_down_roundtrip};
use noise_lattice::cofinite::{self, condition_c_check, CofElem, NatSet, Seq};
use noise_lattice::randsup::{self, SampleConfig, CHI_SQUARE_ALPHA};
use noise_lattice::spectrum::spectral_decompose;
use noise_lattice::suite::{self, case_rng};
use noise_lattice::{gen, AtomSet, Ntba, ProbSpace, Rational, Rv, Scalar, SigmaField};
use rand::Rng;

type Q = Rational;

const SEED: u64 = 20_241_016;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn walsh_grading() -> Verdict {
    let mut bad = Vec::new();
    for n in 1..=5 {
        let b = Ntba::<Q>::coordinate(n).expect("coordinate algebra");
        let dims = spectral_decompose(&b).level_dims();
        let want: Vec<(usize, usize)> = (0..=n).map(|k| (k, binomial(n, k))).collect();
        let got: Vec<(usize, usize)> = dims.into_iter().collect();
        if got != want {
            bad.push(format!("n={n}: {got:?}"));
        }
    }
    verdict(
        bad.is_empty(),
        format!("n = 1..5, dims = C(n,k) exactly; mismatches {bad:?}"),
    )
}

fn first_level_equals_first_chaos() -> Verdict {
    let mut failures = 0;
    let mut largest = 0;
    for case in 0..100 {
        let mut rng = case_rng(SEED, "acceptance-2", case);
        let b = gen::ntba::<Q>(&mut rng, 64);
        largest = largest.max(b.space().len());
        let level = spectral_decompose(&b).level(1);
        let h1 = first_chaos(&b).h1;
        if !(level.contains_subspace(&h1) && h1.contains_subspace(&level)) {
            failures += 1;
        }
    }
    verdict(
        failures == 0,
        format!("100 algebras (largest {largest} outcomes), mutual containment exact; {failures} failures"),
    )
}

fn independence_criterion() -> Verdict {
    let (mut counterexamples, mut nonuniform, mut independent) = (0, 0, 0);
    for case in 0..200 {
        let mut rng = case_rng(SEED, "acceptance-3", case);
        let (space, x, y) = if case % 2 == 0 {
            let (s, x, y) = gen::independent_pair::<Q>(&mut rng);
            let (x, y) = (gen::coarsening(&mut rng, &x), gen::coarsening(&mut rng, &y));
            (s, x, y)
        } else {
            let s = gen::space::<Q>(&mut rng, 8);
            let x = gen::partition(&mut rng, &s);
            let y = gen::partition(&mut rng, &s);
            (s, x, y)
        };
        if space.probs().iter().any(|p| p != &space.probs()[0]) {
            nonuniform += 1;
        }
        let indep = x.independent(&y).expect("same space");
        independent += usize::from(indep);
        let rhs = x.commutes(&y).expect("same space") && x.meet(&y).expect("same space").is_trivial();
        if indep != rhs {
            counterexamples += 1;
        }
    }
    let s = ProbSpace::<Q>::uniform(3).expect("three points");
    let x = SigmaField::from_blocks(&s, &[vec![0], vec![1, 2]]).expect("partition");
    let y = SigmaField::from_blocks(&s, &[vec![0, 1], vec![2]]).expect("partition");
    let witness_dependent = !x.independent(&y).expect("same space")
        && !x.commutes(&y).expect("same space")
        && x.meet(&y).expect("same space").is_trivial();
    verdict(
        counterexamples == 0 && witness_dependent && nonuniform > 0,
        format!(
            "200 pairs ({nonuniform} non-uniform, {independent} independent), {counterexamples} counterexamples; three-point witness dependent: {witness_dependent}"
        ),
    )
}

fn superadditivity_and_membership() -> Verdict {
    let (mut gaps, mut disagreements, mut members) = (0, 0, 0);
    for case in 0..500 {
        let mut rng = case_rng(SEED, "acceptance-4", case);
        let b = gen::ntba::<Q>(&mut rng, 16);
        let h1 = first_chaos(&b).h1;
        let f: Rv<Q> = if case % 2 == 0 && h1.dim() > 0 {
            let mut v = vec![Q::zero(); b.space().len()];
            for basis in h1.basis() {
                let c = Q::from_ratio(rng.random_range(-3..=3), 1);
                v.iter_mut().zip(basis).for_each(|(vi, bi)| vi.add_prod(&c, bi));
            }
            b.space().rv(v).expect("length")
        } else {
            gen::rv(&mut rng, b.space())
        };
        let n = b.num_atoms();
        let x = AtomSet(rng.random_range(0..1u64 << n));
        let y = AtomSet(rng.random_range(0..1u64 << n));
        let gap = superadditivity_gap(&b, f.values(), x, y);
        if gap.negate().is_positive() {
            gaps += 1;
        }
        match chaos_membership(&b, &f) {
            Ok(m) => {
                let all_agree = m.complement_split == m.disjoint_additive
                    && m.disjoint_additive == m.modular
                    && m.verdict() == h1.contains_rv(&f);
                if !all_agree {
                    disagreements += 1;
                }
                members += usize::from(m.verdict());
            }
            Err(_) => disagreements += 1,
        }
    }
    verdict(
        gaps == 0 && disagreements == 0,
        format!("500 cases ({members} in H^(1)), exact: {gaps} negative gaps, {disagreements} disagreements"),
    )
}

fn quadruples() -> Verdict {
    let r = suite::quadruple_suite::<Q>(SEED, 200);
    verdict(
        r.passed(),
        format!(
            "200 quadruples, {} identities exact; {} failures",
            r.checks, r.failed
        ),
    )
}

fn roundtrip() -> Verdict {
    let mut algebras: Vec<(String, Ntba<Q>)> = Vec::new();
    for n in 1..=5 {
        algebras.push((format!("coords:{n}"), Ntba::coordinate(n).expect("coordinate")));
    }
    for n in 1..=4 {
        algebras.push((format!("parity:{n}"), Ntba::parity(n).expect("parity")));
    }
    for n in [1, 2, 3, 6] {
        let space = ProbSpace::uniform(n).expect("uniform");
        algebras.push((format!("trivial:{n}"), Ntba::trivial(&space).expect("trivial")));
    }
    let (mut elements, mut bad) = (0, Vec::new());
    for (name, b) in &algebras {
        let chaos = first_chaos(b);
        for e in b.elements() {
            elements += 1;
            if !up_down_roundtrip(b, &chaos, e).unwrap_or(false) {
                bad.push(format!("{name} {e:?}"));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{} algebras, {elements} elements, exact; failures {bad:?}",
            algebras.len()
        ),
    )
}

fn additivity() -> Verdict {
    let r = suite::additivity_suite::<Q>(SEED, 50);
    verdict(
        r.passed(),
        format!("50 (B, e) pairs, exact; {} failures", r.failed),
    )
}

fn dossier() -> Verdict {
    let mut bad = Vec::new();
    for n in 1..=6 {
        let dim = first_chaos(&Ntba::<Q>::parity(n).expect("parity")).h1.dim();
        if dim != n + 1 {
            bad.push(format!("h1 dim n={n}: {dim}"));
        }
        let s = ProbSpace::<Q>::dyadic(n + 1).expect("cube");
        let gens: Vec<_> = (1..=n).map(|i| s.walsh(&[i, i + 1]).expect("walsh")).collect();
        let x = SigmaField::generated_by_subspace(&s.span(&gens).expect("span"));
        if x.num_blocks() != 1 << n || x.blocks().iter().any(|b| b.len() != 2) {
            bad.push(format!("sign pairing n={n}: {} blocks", x.num_blocks()));
        }
    }
    let c = condition_c_check(&Seq::PrefixJoins(NatSet::all())).expect("supported sequence");
    if c.holds || c.sup != CofElem::ys(NatSet::all()) {
        bad.push(format!("condition (c): {c:?}"));
    }
    for inf in [
        NatSet::all(),
        NatSet::progression(2, 2).expect("evens"),
        NatSet::progression(3, 1).expect("3k+1"),
    ] {
        if CofElem::ys(inf.clone()).complement().is_some() {
            bad.push(format!("complement of Y{inf:?} exists"));
        }
    }
    let pool = cofinite::bounded_enumeration(6);
    let b: Vec<CofElem> = pool.iter().filter(|e| e.in_b()).cloned().collect();
    if cofinite::completion(&pool) != b {
        bad.push("completion ≠ B".into());
    }
    verdict(
        bad.is_empty(),
        format!(
            "h1 dims n+1 and 2^n pairing blocks (n = 1..6), condition (c) fails with sup Y(ℕ), completion = B over {} elements; failures {bad:?}",
            pool.len()
        ),
    )
}

fn cross_oracle() -> Verdict {
    let r = suite::cross_oracle_suite::<Q>(SEED, 300);
    verdict(
        r.passed(),
        format!(
            "300 instances, parity truncations n ≤ 6, {} meet/join comparisons exact; {} failures",
            r.checks, r.failed
        ),
    )
}

fn random_supremum() -> Verdict {
    let trials = 100_000;
    let mut bad = Vec::new();
    let mut worst = 1.0f64;
    for n in 1..=4 {
        for p in [0.1, 0.5, 0.9] {
            let seed = SEED ^ (n as u64 * 1000 + (p * 10.0) as u64);
            let t = randsup::distribution_test(n, p, trials, seed).expect("valid test");
            worst = worst.min(t.p_value);
            if !t.pass() {
                bad.push(format!("χ² n={n} p={p}: p-value {:.5}", t.p_value));
            }
        }
    }
    for ps in [
        vec![0.1, 0.1, 0.1],
        vec![0.25],
        vec![0.4, 0.4],
        vec![0.05, 0.1, 0.15, 0.2],
    ] {
        let cfg = SampleConfig {
            atom_counts: (0..ps.len()).map(|k| 1 << k).collect(),
            ps: ps.clone(),
            seed: SEED,
            trials,
            c: None,
        };
        let r = randsup::union_bound_report(&cfg, 0).expect("valid config");
        let closed = 1.0 - ps.iter().map(|p| 1.0 - p).product::<f64>();
        let sum: f64 = ps.iter().sum();
        let exact_ok = (r.exact - closed).abs() < 1e-12 && closed <= sum + 1e-12;
        if !(r.pass() && exact_ok) {
            bad.push(format!("union bound {ps:?}: {r:?}"));
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "10^5 trials, χ² p-value > {CHI_SQUARE_ALPHA} (min {worst:.4}), union bound exact closed form and Monte-Carlo within 3σ; failures {bad:?}"
        ),
    )
}

fn determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_noise-lattice"))
            .args(["check", "all", "--seed", "7", "--cases", "5", "--format", "json"])
            .env("NOISE_LATTICE_MODE", "rational")
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    verdict(
        ok,
        format!(
            "check all --seed 7 twice: {} bytes, identical: {}",
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

type Criterion = (&'static str, Duration, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("Walsh grading", Duration::from_secs(5), walsh_grading),
        (
            "H(E_1) = H^(1)",
            Duration::from_secs(60),
            first_level_equals_first_chaos,
        ),
        (
            "independence ⇔ commuting ∧ trivial meet",
            Duration::MAX,
            independence_criterion,
        ),
        (
            "superadditivity and first-chaos tri-equivalence",
            Duration::MAX,
            superadditivity_and_membership,
        ),
        ("independent quadruple identities", Duration::MAX, quadruples),
        ("Up(Down(x)) = x", Duration::MAX, roundtrip),
        ("K additive under restriction", Duration::MAX, additivity),
        ("cofinite dossier", Duration::from_secs(10), dossier),
        ("symbolic/partition cross-oracle", Duration::MAX, cross_oracle),
        (
            "random supremum statistics",
            Duration::from_secs(30),
            random_supremum,
        ),
        ("deterministic reports", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = v.pass && in_time;
        failed += usize::from(!pass);
        let budget = if *limit == Duration::MAX {
            String::new()
        } else {
            format!(" / limit {}s", limit.as_secs())
        };
        println!(
            "[{}] {:>2}. {name}: {} ({:.2}s{budget})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            elapsed.as_secs_f64(),
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
