use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use noise_lattice::chaos::first_chaos;
use noise_lattice::cofinite::{self, ClosureClass, CofElem};
use noise_lattice::formats::{self, FamilyJson, NtbaJson, PartitionJson, SpaceJson};
use noise_lattice::ntba::{validate_family, FamilyVerdict, MAX_ATOMS};
use noise_lattice::randsup::{self, SampleConfig, MAX_TEST_ATOMS};
use noise_lattice::spectrum::spectral_decompose;
use noise_lattice::suite::{self, Options, SuiteReport};
use noise_lattice::{AtomSet, Error, Ntba, ProbSpace, Scalar, SigmaField};

use crate::report::{table, Outcome};

/// Input text plus the bytes that go into the report digest.
pub struct Inputs {
    pub bytes: Vec<Vec<u8>>,
}

impl Inputs {
    pub fn read(&mut self, path: &str) -> Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        self.bytes.push(text.as_bytes().to_vec());
        Ok(text)
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &str) -> Result<T> {
        let text = self.read(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{path}: {e}")))
            .map_err(Into::into)
    }

    /// An algebra from a JSON file, or `coords:N` / `parity:N`.
    pub fn ntba<S: Scalar>(&mut self, source: &str) -> Result<Ntba<S>> {
        let builtin = |n: &str| -> Result<usize> {
            n.parse()
                .map_err(|_| Error::Parse(format!("bad size in {source:?}")).into())
        };
        if let Some(n) = source.strip_prefix("coords:") {
            return Ok(Ntba::coordinate(builtin(n)?)?);
        }
        if let Some(n) = source.strip_prefix("parity:") {
            return Ok(Ntba::parity(builtin(n)?)?);
        }
        let j: NtbaJson = self.json(source)?;
        Ok(j.to_ntba()?)
    }
}

fn prob_rows<S: Scalar>(space: &ProbSpace<S>) -> Vec<Vec<String>> {
    space
        .outcomes()
        .iter()
        .zip(space.probs())
        .map(|(o, p)| vec![o.clone(), p.to_string()])
        .collect()
}

fn space_outcome<S: Scalar>(space: &ProbSpace<S>) -> Outcome {
    let results = json!({
        "space": SpaceJson::from_space(space),
        "outcomes": space.len(),
    });
    let text = table(&["outcome", "prob"], &prob_rows(space));
    Outcome::info(results, text)
}

pub fn space_dyadic<S: Scalar>(n: usize) -> Result<Outcome> {
    Ok(space_outcome(&ProbSpace::<S>::dyadic(n)?))
}

pub fn space_load<S: Scalar>(inputs: &mut Inputs, path: &str) -> Result<Outcome> {
    let j: SpaceJson = inputs.json(path)?;
    Ok(space_outcome(&j.to_space::<S>()?))
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum SigmaOp {
    Meet,
    Join,
    Indep,
    Commutes,
}

fn blocks_text(x: &PartitionJson) -> String {
    let blocks: Vec<String> = x
        .blocks
        .iter()
        .map(|b| {
            let ids: Vec<String> = b.iter().map(usize::to_string).collect();
            format!("{{{}}}", ids.join(","))
        })
        .collect();
    blocks.join(" ")
}

pub fn sigma<S: Scalar>(inputs: &mut Inputs, op: SigmaOp, space: &str, x: &str, y: &str) -> Result<Outcome> {
    let space: ProbSpace<S> = inputs.json::<SpaceJson>(space)?.to_space()?;
    let x: SigmaField<S> = inputs.json::<PartitionJson>(x)?.to_field(&space)?;
    let y: SigmaField<S> = inputs.json::<PartitionJson>(y)?.to_field(&space)?;
    Ok(match op {
        SigmaOp::Meet | SigmaOp::Join => {
            let z = if matches!(op, SigmaOp::Meet) {
                x.meet(&y)?
            } else {
                x.join(&y)?
            };
            let pj = PartitionJson::from_field(&z);
            let text = format!("{} blocks: {}\n", z.num_blocks(), blocks_text(&pj));
            Outcome::info(json!({"result": pj, "blocks": z.num_blocks()}), text)
        }
        SigmaOp::Indep => {
            let witness = x.independence_witness(&y);
            let independent = witness.is_none();
            let text = match witness {
                None => "independent\n".to_string(),
                Some((a, b)) => format!("dependent: blocks x[{a}], y[{b}]\n"),
            };
            Outcome::info(
                json!({"independent": independent, "witness": witness.map(|(a, b)| [a, b])}),
                text,
            )
        }
        SigmaOp::Commutes => {
            let c = x.commutes(&y)?;
            let text = format!("{}\n", if c { "commute" } else { "do not commute" });
            Outcome::info(json!({"commutes": c}), text)
        }
    })
}

fn ntba_outcome<S: Scalar>(b: &Ntba<S>) -> Outcome {
    let results = json!({
        "ntba": NtbaJson::from_ntba(b),
        "atoms": b.num_atoms(),
        "outcomes": b.space().len(),
    });
    let rows: Vec<Vec<String>> = b
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| vec![i.to_string(), a.num_blocks().to_string()])
        .collect();
    let text = format!(
        "{} atoms on {} outcomes\n{}",
        b.num_atoms(),
        b.space().len(),
        table(&["atom", "blocks"], &rows)
    );
    Outcome::info(results, text)
}

pub fn ntba_coords<S: Scalar>(n: usize) -> Result<Outcome> {
    Ok(ntba_outcome(&Ntba::<S>::coordinate(n)?))
}

pub fn ntba_parity<S: Scalar>(n: usize) -> Result<Outcome> {
    Ok(ntba_outcome(&Ntba::<S>::parity(n)?))
}

fn verdict_outcome(verdict: FamilyVerdict, size: usize) -> Outcome {
    match verdict {
        FamilyVerdict::Valid => Outcome::checked(
            json!({"valid": true, "elements": size}),
            format!("valid ({size} elements)\n"),
            1,
            0,
        ),
        FamilyVerdict::Invalid { reason, witness } => Outcome::checked(
            json!({"valid": false, "reason": reason.to_string(), "witness": witness}),
            format!("invalid: {reason}; witness {witness:?}\n"),
            1,
            1,
        ),
    }
}

/// Accepts a family (`elements`) or an algebra (`atoms`) whose realized
/// elements are audited.
pub fn ntba_validate<S: Scalar>(inputs: &mut Inputs, path: &str) -> Result<Outcome> {
    let text = inputs.read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    if value.get("elements").is_some() {
        let fam: FamilyJson =
            serde_json::from_value(value).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        let (space, elems) = fam.to_family::<S>()?;
        return Ok(verdict_outcome(validate_family(&space, &elems), elems.len()));
    }
    let j: NtbaJson = serde_json::from_value(value).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    let space = j.space.to_space::<S>()?;
    let atoms = j
        .atoms
        .iter()
        .map(|a| a.to_field(&space))
        .collect::<noise_lattice::Result<Vec<_>>>()?;
    match Ntba::new(&space, atoms) {
        Ok(b) => {
            if b.num_atoms() > 10 {
                return Err(Error::Capacity {
                    what: "atoms for element-wise validation",
                    requested: b.num_atoms(),
                    limit: 10,
                }
                .into());
            }
            let elems: Vec<_> = b.elements().map(|e| b.realize(e)).collect();
            Ok(verdict_outcome(validate_family(&space, &elems), elems.len()))
        }
        Err(e @ (Error::Invalid(_) | Error::Precondition(_))) => Ok(Outcome::checked(
            json!({"valid": false, "reason": e.to_string(), "witness": []}),
            format!("invalid: {e}\n"),
            1,
            1,
        )),
        Err(e) => Err(e.into()),
    }
}

pub fn ntba_restrict<S: Scalar>(inputs: &mut Inputs, path: &str, atoms: &str) -> Result<Outcome> {
    let b = inputs.ntba::<S>(path)?;
    let idx = formats::parse_atom_list(atoms)?;
    if let Some(&bad) = idx.iter().find(|&&i| i >= b.num_atoms()) {
        bail!(Error::Domain(format!("atom {bad} out of range")));
    }
    let r = b.restrict(AtomSet::from_indices(idx))?;
    let mut out = ntba_outcome(&r.algebra);
    out.results["atom_indices"] = json!(r.atom_indices);
    Ok(out)
}

fn fmt_csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = headers.join(",") + "\n";
    for r in rows {
        out += &(r.join(",") + "\n");
    }
    out
}

pub fn chaos_report<S: Scalar>(inputs: &mut Inputs, source: &str) -> Result<Outcome> {
    let b = inputs.ntba::<S>(source)?;
    let c = first_chaos(&b);
    let row = vec![
        c.h1.dim().to_string(),
        c.classical.to_string(),
        c.black.to_string(),
        c.generated.num_blocks().to_string(),
    ];
    let headers = ["dim_h1", "classical", "black", "generated_blocks"];
    let results = json!({
        "dim_h1": c.h1.dim(),
        "classical": c.classical,
        "black": c.black,
        "generated_blocks": c.generated.num_blocks(),
    });
    let mut out = Outcome::info(results, table(&headers, std::slice::from_ref(&row)));
    out.csv = Some(fmt_csv(&headers, &[row]));
    Ok(out)
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn spectrum_report<S: Scalar>(inputs: &mut Inputs, source: &str) -> Result<Outcome> {
    let b = inputs.ntba::<S>(source)?;
    if b.num_atoms() > MAX_ATOMS {
        bail!(Error::Capacity {
            what: "atoms",
            requested: b.num_atoms(),
            limit: MAX_ATOMS,
        });
    }
    let d = spectral_decompose(&b);
    let n = b.num_atoms();
    let points: Vec<Value> = d
        .points
        .iter()
        .map(|p| {
            json!({
                "pattern": bits(&p.pattern(n)),
                "generator_atoms": p.generator.iter().collect::<Vec<_>>(),
                "k": p.k(),
                "dim": p.eigenspace.dim(),
            })
        })
        .collect();
    let level_rows: Vec<Vec<String>> = d
        .level_dims()
        .into_iter()
        .map(|(k, dim)| vec![k.to_string(), dim.to_string()])
        .collect();
    let levels: Vec<Value> = d
        .level_dims()
        .into_iter()
        .map(|(k, dim)| json!({"k": k, "dim": dim}))
        .collect();
    let point_rows: Vec<Vec<String>> = d
        .points
        .iter()
        .map(|p| {
            vec![
                format!("{:?}", p.generator),
                p.k().to_string(),
                p.eigenspace.dim().to_string(),
            ]
        })
        .collect();
    let text = format!(
        "{}\n{}",
        table(&["generator", "k", "dim"], &point_rows),
        table(&["k", "dim"], &level_rows)
    );
    let mut out = Outcome::info(json!({"points": points, "levels": levels}), text);
    out.csv = Some(fmt_csv(&["k", "dim"], &level_rows));
    Ok(out)
}

fn class_name(e: &CofElem) -> &'static str {
    match e.closure_class() {
        ClosureClass::InB => "B",
        ClosureClass::ClosureOnly => "Cl(B)\\B",
    }
}

pub fn cofinite_eval(expr: &str) -> Result<Outcome> {
    let e: CofElem = expr.parse()?;
    let complement = e.complement();
    let results = json!({
        "input": expr,
        "value": e.to_string(),
        "class": class_name(&e),
        "tail": e.tail(),
        "complement": complement.as_ref().map(ToString::to_string),
    });
    let text = table(
        &["value", "class", "complement"],
        &[vec![
            e.to_string(),
            class_name(&e).to_string(),
            complement.map_or("none".to_string(), |c| c.to_string()),
        ]],
    );
    Ok(Outcome::info(results, text))
}

fn dossier_rows(entries: &[cofinite::DossierEntry]) -> Vec<Vec<String>> {
    entries
        .iter()
        .map(|d| {
            vec![
                d.label.clone(),
                d.value.clone(),
                d.expected.clone(),
                if d.pass { "ok" } else { "FAIL" }.to_string(),
            ]
        })
        .collect()
}

fn dossier_json(entries: &[cofinite::DossierEntry]) -> Value {
    entries
        .iter()
        .map(|d| json!({"label": d.label, "value": d.value, "expected": d.expected, "pass": d.pass}))
        .collect()
}

pub fn cofinite_demo() -> Result<Outcome> {
    let entries = cofinite::dossier()?;
    let filters: Vec<Vec<String>> = cofinite::enumerate_ultrafilters(4)
        .iter()
        .map(|u| vec![u.to_string(), u.infimum().to_string()])
        .collect();
    let (atomless, witness) = cofinite::is_atomless();
    let failures = entries.iter().filter(|d| !d.pass).count() as u64;
    let results = json!({
        "entries": dossier_json(&entries),
        "ultrafilters": filters.iter().map(|r| json!({"filter": r[0], "infimum": r[1]})).collect::<Vec<_>>(),
        "atomless": atomless,
        "atom_witness": witness.map(|w| w.to_string()),
    });
    let text = format!(
        "{}\n{}\natomless: {atomless}\n",
        table(&["example", "value", "expected", ""], &dossier_rows(&entries)),
        table(&["ultrafilter", "infimum"], &filters),
    );
    Ok(Outcome::checked(results, text, entries.len() as u64, failures))
}

pub struct RandsupArgs {
    pub ps: Vec<f64>,
    pub atoms: Vec<usize>,
    pub c: Option<Vec<u64>>,
    pub trials: u64,
    pub seed: u64,
    pub atom: usize,
    pub chi_square: bool,
}

pub fn randsup_run(a: RandsupArgs) -> Result<Outcome> {
    let atom_counts = match a.atoms.as_slice() {
        [n] => vec![*n; a.ps.len()],
        counts => counts.to_vec(),
    };
    let cfg = SampleConfig {
        atom_counts,
        ps: a.ps,
        seed: a.seed,
        trials: a.trials,
        c: a.c,
    };
    let u = randsup::union_bound_report(&cfg, a.atom)?;
    let mut checks = 1;
    let mut failures = u64::from(!u.pass());
    let mut tests = Vec::new();
    let mut rows = Vec::new();
    if a.chi_square {
        for (level, (&n, &p)) in cfg.atom_counts.iter().zip(&cfg.ps).enumerate() {
            if n > MAX_TEST_ATOMS {
                continue;
            }
            let seed = cfg.seed.wrapping_add(level as u64 + 1);
            let t = randsup::distribution_test(n, p, cfg.trials, seed)?;
            checks += 1;
            failures += u64::from(!t.pass());
            rows.push(vec![
                (level + 1).to_string(),
                n.to_string(),
                p.to_string(),
                format!("{:.4}", t.statistic),
                t.df.to_string(),
                format!("{:.4}", t.p_value),
                if t.pass() { "ok" } else { "FAIL" }.to_string(),
            ]);
            tests.push(json!({
                "level": level + 1, "atoms": n, "p": p, "statistic": t.statistic,
                "df": t.df, "p_value": t.p_value, "counts": t.counts, "pass": t.pass(),
            }));
        }
    }
    let c_seq: Vec<Value> = u
        .c_sequence
        .iter()
        .map(|(n, c, v)| json!({"n": n, "c": c, "value": v}))
        .collect();
    let results = json!({
        "union_bound": {
            "atom": u.atom, "hits": u.hits, "trials": u.trials, "estimate": u.estimate,
            "exact": u.exact, "bound": u.bound, "sigma": u.sigma,
            "within_exact": u.within_exact, "below_bound": u.below_bound, "pass": u.pass(),
            "c_sequence": c_seq,
        },
        "distribution_tests": tests,
    });
    let mut text = table(
        &["estimate", "exact", "bound", "3σ", "status"],
        &[vec![
            format!("{:.6}", u.estimate),
            format!("{:.6}", u.exact),
            format!("{:.6}", u.bound),
            format!("{:.6}", 3.0 * u.sigma),
            if u.pass() { "ok" } else { "FAIL" }.to_string(),
        ]],
    );
    if !rows.is_empty() {
        text += "\n";
        text += &table(&["level", "atoms", "p", "χ²", "df", "p-value", "status"], &rows);
    }
    let mut out = Outcome::checked(results, text, checks, failures);
    out.seed = Some(cfg.seed);
    Ok(out)
}

pub fn check_all<S: Scalar>(opts: Options) -> Result<Outcome> {
    let reports = suite::run_all::<S>(opts);
    Ok(suite_outcome(&reports, opts.seed))
}

pub fn suite_outcome(reports: &[SuiteReport], seed: u64) -> Outcome {
    let checks = reports.iter().map(|r| r.checks).sum();
    let failures = reports.iter().map(|r| r.failed).sum();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.cases.to_string(),
                r.checks.to_string(),
                r.failed.to_string(),
                if r.passed() { "ok" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let mut text = table(&["suite", "cases", "checks", "failed", "status"], &rows);
    for r in reports {
        for f in &r.failures {
            let repro = serde_json::to_string(&f.repro).expect("serializable");
            text += &format!(
                "\n{} case {}: {} ({})\n  repro {repro}\n",
                r.name, f.case, f.check, f.detail
            );
        }
    }
    let mut out = Outcome::checked(json!({"suites": reports}), text, checks, failures);
    out.seed = Some(seed);
    out
}

/// The finite shadows of the countable example.
pub fn demo<S: Scalar>() -> Result<Outcome> {
    let mut entries: Vec<cofinite::DossierEntry> = Vec::new();
    let mut push = |label: String, value: String, expected: String| {
        entries.push(cofinite::DossierEntry {
            pass: value == expected,
            label,
            value,
            expected,
        })
    };
    for n in 1..=6 {
        let b = Ntba::<S>::parity(n)?;
        let h1 = first_chaos(&b).h1;
        push(
            format!("dim h1, parity n={n}"),
            h1.dim().to_string(),
            (n + 1).to_string(),
        );
        let s = b.space();
        let mut gens = (1..=n)
            .map(|i| s.walsh(&[i, i + 1]))
            .chain([s.sign(n + 1)])
            .collect::<noise_lattice::Result<Vec<_>>>()?;
        let spanned = gens.iter().all(|g| h1.contains_rv(g));
        push(
            format!("h1 ∋ ξᵢξᵢ₊₁ (i ≤ {n}) and ξ{}", n + 1),
            spanned.to_string(),
            "true".into(),
        );
        gens.pop();
        if n == 3 {
            let x = SigmaField::generated_by_subspace(&s.span(&gens)?);
            // ω and −ω sit at mirrored indices
            let pairs = x
                .blocks()
                .iter()
                .all(|blk| blk.len() == 2 && blk[0] + blk[1] == s.len() - 1);
            push(
                "sign pairing σ(ξ₁ξ₂, ξ₂ξ₃, ξ₃ξ₄)".into(),
                format!(
                    "{} blocks of size 2 in {} outcomes, ω ~ −ω: {pairs}",
                    x.num_blocks(),
                    s.len()
                ),
                "8 blocks of size 2 in 16 outcomes, ω ~ −ω: true".into(),
            );
        }
    }
    for d in cofinite::dossier()? {
        push(d.label, d.value, d.expected);
    }
    let pool = cofinite::bounded_enumeration(6);
    let completion = cofinite::completion(&pool);
    let b_part: Vec<CofElem> = pool.iter().filter(|e| e.in_b()).cloned().collect();
    push(
        "completion over support ≤ 6".into(),
        if completion == b_part {
            "B itself"
        } else {
            "differs from B"
        }
        .into(),
        "B itself".into(),
    );
    let failures = entries.iter().filter(|d| !d.pass).count() as u64;
    let text = table(&["example", "value", "expected", ""], &dossier_rows(&entries));
    Ok(Outcome::checked(
        json!({"entries": dossier_json(&entries)}),
        text,
        entries.len() as u64,
        failures,
    ))
}
