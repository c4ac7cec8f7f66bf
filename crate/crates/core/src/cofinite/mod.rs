//! The finite/cofinite noise-type Boolean algebra generated by
//! `y_n = σ(ξ_nξ_{n+1})` and `x_n = σ(ξ_n, ξ_{n+1}, …)` over independent
//! random signs, together with its closure.
//!
//! Every element in play is generated by a subfamily of one independent
//! family: the products `η_k = ξ_kξ_{k+1}` plus a single far-out sign
//! `ξ_M`. An element is therefore a pair `(flag, S)`: `σ(η_k : k ∈ S)`,
//! joined with `σ(ξ_M)` when `flag` is set. A set flag forces `S` to be
//! cofinite (`x_m` carries every `η_k`, `k ≥ m`). Meets and joins act on
//! the pair componentwise.

mod natset;
mod parse;

use std::fmt;
use std::str::FromStr;

pub use natset::NatSet;

use crate::error::{Error, Result};
use crate::ntba::{AtomSet, Ntba};
use crate::scalar::Scalar;
use crate::sigma::SigmaField;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CofElem {
    flag: bool,
    set: NatSet,
}

/// Where an element sits relative to `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureClass {
    InB,
    /// In `Cl(B) \ B`.
    ClosureOnly,
}

impl CofElem {
    fn new(flag: bool, set: NatSet) -> Result<Self> {
        if flag && !set.is_cofinite() {
            return Err(Error::Domain("a tail requires a cofinite index set".into()));
        }
        Ok(CofElem { flag, set })
    }

    /// From a tail and a y-index set, with `y_{m−1} ∨ x_m = x_{m−1}`
    /// absorbed.
    pub fn from_parts(tail: Option<u64>, yset: NatSet) -> Result<Self> {
        match tail {
            Some(0) => Err(Error::Domain("tail index starts at 1".into())),
            Some(m) => Self::new(true, yset.union(&NatSet::from(m))),
            None => Self::new(false, yset),
        }
    }

    /// `0_Λ`
    pub fn zero() -> Self {
        CofElem {
            flag: false,
            set: NatSet::empty(),
        }
    }

    /// `1_Λ = x_1`
    pub fn one() -> Self {
        CofElem {
            flag: true,
            set: NatSet::all(),
        }
    }

    /// `x_m = σ(ξ_m, ξ_{m+1}, …)`
    pub fn x(m: u64) -> Self {
        Self::from_parts(Some(m.max(1)), NatSet::empty()).expect("valid tail")
    }

    /// `y_n = σ(ξ_nξ_{n+1})`
    pub fn y(n: u64) -> Self {
        Self::ys(NatSet::singleton(n))
    }

    /// `sup_{n ∈ I} y_n`
    pub fn ys(set: NatSet) -> Self {
        CofElem { flag: false, set }
    }

    pub fn tail(&self) -> Option<u64> {
        if self.flag {
            self.set.tail_start()
        } else {
            None
        }
    }

    /// Indices of the `y_n` not already absorbed by the tail.
    pub fn yset(&self) -> NatSet {
        match self.tail() {
            Some(m) => self.set.truncate(m - 1),
            None => self.set.clone(),
        }
    }

    pub fn closure_class(&self) -> ClosureClass {
        if self.flag || self.set.is_finite() {
            ClosureClass::InB
        } else {
            ClosureClass::ClosureOnly
        }
    }

    pub fn in_b(&self) -> bool {
        self.closure_class() == ClosureClass::InB
    }

    pub fn meet(&self, other: &Self) -> Self {
        CofElem {
            flag: self.flag && other.flag,
            set: self.set.intersection(&other.set),
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        CofElem {
            flag: self.flag || other.flag,
            set: self.set.union(&other.set),
        }
    }

    pub fn le(&self, other: &Self) -> bool {
        self.meet(other) == *self
    }

    /// The complement in `Cl(B)`; it exists exactly for elements of `B`.
    pub fn complement(&self) -> Option<Self> {
        self.in_b().then(|| CofElem {
            flag: !self.flag,
            set: self.set.complement(),
        })
    }

    /// Image in the parity algebra on `n + 1` signs: `y_k` maps to atom
    /// `k − 1`, the tail `x_m` to `y_m ∨ … ∨ y_n ∨ σ(ξ_{n+1})`.
    pub fn truncation(&self, n: u64) -> Result<AtomSet> {
        let fits = match self.tail() {
            Some(m) => m <= n + 1,
            None => self.set.is_subset(&NatSet::range(1, n)),
        };
        if !fits || n as usize >= crate::ntba::MAX_ATOMS {
            return Err(Error::Precondition(format!(
                "{self} is not supported below {}",
                n + 1
            )));
        }
        let mut atoms = AtomSet::from_indices(self.set.members_upto(n).map(|k| k as usize - 1));
        if self.flag {
            atoms = atoms.union(AtomSet::singleton(n as usize));
        }
        Ok(atoms)
    }

    /// The σ-field of [`CofElem::truncation`] inside `parity(n)`.
    pub fn realize<S: Scalar>(&self, b: &Ntba<S>) -> Result<SigmaField<S>> {
        let n = b.num_atoms() as u64 - 1;
        Ok(b.realize(self.truncation(n)?))
    }
}

impl fmt::Display for CofElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::zero() {
            return f.write_str("0");
        }
        if *self == Self::one() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        let ys = self.yset();
        match ys.members() {
            Some(m) => parts.extend(m.iter().map(|k| format!("y{k}"))),
            None => parts.push(match ys.as_progression() {
                Some((1, 1)) => "Y(k)".to_string(),
                Some((a, b)) if b == a => format!("Y({a}k)"),
                Some((1, b)) => format!("Y(k+{b})"),
                Some((a, b)) => format!("Y({a}k+{b})"),
                None => format!("Y{{{}}}", ys.bits_string()),
            }),
        }
        if let Some(m) = self.tail() {
            parts.push(format!("x{m}"));
        }
        f.write_str(&parts.join("|"))
    }
}

impl fmt::Debug for CofElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for CofElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse::parse(s)
    }
}

/// Monotone sequences whose limits are computed exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Seq {
    /// `x_n = ⋁_{k ∈ I, k ≤ n} y_k`, increasing.
    PrefixJoins(NatSet),
    /// `x_n = x_{m+n}`, decreasing.
    TailChain(u64),
    /// Complements of the prefix joins of `I`, decreasing.
    ComplementChain(NatSet),
    /// A finite list, constant after its last entry.
    EventuallyConstant(Vec<CofElem>),
}

/// Increasing `(flag, base ∪ (add ∩ [1,n]))` or decreasing
/// `(flag, base \ (remove ∩ [1,n]))`.
#[derive(Debug, Clone)]
enum Chain {
    Up {
        flag: bool,
        base: NatSet,
        add: NatSet,
    },
    Down {
        flag: bool,
        base: NatSet,
        remove: NatSet,
    },
}

impl Chain {
    fn limit(&self) -> CofElem {
        match self {
            Chain::Up { flag, base, add } => CofElem {
                flag: *flag,
                set: base.union(add),
            },
            Chain::Down { flag, base, remove } => {
                let dropped = remove.intersection(base);
                if *flag && dropped.is_finite() {
                    CofElem {
                        flag: true,
                        set: base.difference(&dropped),
                    }
                } else {
                    CofElem {
                        flag: false,
                        set: base.difference(remove),
                    }
                }
            }
        }
    }

    fn term(&self, n: u64) -> CofElem {
        match self {
            Chain::Up { flag, base, add } => CofElem {
                flag: *flag,
                set: base.union(&add.truncate(n)),
            },
            Chain::Down { flag, base, remove } => CofElem {
                flag: *flag,
                set: base.difference(&remove.truncate(n)),
            },
        }
    }

    /// Termwise complements; every term must lie in `B`.
    fn complement(&self) -> Result<Chain> {
        let (flag, base) = match self {
            Chain::Up { flag, base, .. } | Chain::Down { flag, base, .. } => (*flag, base),
        };
        if !flag && !base.is_finite() {
            return Err(Error::Precondition(
                "sequence leaves B, complements do not exist".into(),
            ));
        }
        Ok(match self {
            Chain::Up { add, .. } => Chain::Down {
                flag: !flag,
                base: base.complement(),
                remove: add.clone(),
            },
            Chain::Down { remove, .. } => Chain::Up {
                flag: !flag,
                base: base.complement(),
                add: remove.clone(),
            },
        })
    }
}

impl Seq {
    fn chain(&self) -> Result<Chain> {
        Ok(match self {
            Seq::PrefixJoins(i) => Chain::Up {
                flag: false,
                base: NatSet::empty(),
                add: i.clone(),
            },
            Seq::TailChain(m) => {
                if *m == 0 {
                    return Err(Error::Unsupported("tail chains start at x_1".into()));
                }
                Chain::Down {
                    flag: true,
                    base: NatSet::from(*m),
                    remove: NatSet::all(),
                }
            }
            Seq::ComplementChain(i) => Chain::Down {
                flag: true,
                base: NatSet::all(),
                remove: i.clone(),
            },
            Seq::EventuallyConstant(list) => {
                let last = list
                    .last()
                    .ok_or_else(|| Error::Unsupported("empty sequence".into()))?;
                Chain::Up {
                    flag: last.flag,
                    base: last.set.clone(),
                    add: NatSet::empty(),
                }
            }
        })
    }

    /// The `n`-th term (`n ≥ 1`).
    pub fn term(&self, n: u64) -> Result<CofElem> {
        if let Seq::EventuallyConstant(list) = self {
            if let Some(e) = list.get(n.saturating_sub(1) as usize) {
                return Ok(e.clone());
            }
        }
        let n = match self {
            Seq::TailChain(_) => n + 1,
            _ => n,
        };
        Ok(self.chain()?.term(n))
    }

    fn increasing_chain(&self) -> Result<Chain> {
        match self {
            Seq::PrefixJoins(_) => self.chain(),
            Seq::EventuallyConstant(list) => {
                if list.windows(2).any(|w| !w[0].le(&w[1])) {
                    return Err(Error::Unsupported("list is not increasing".into()));
                }
                if list.iter().any(|e| !e.in_b()) {
                    return Err(Error::Unsupported("list leaves B".into()));
                }
                self.chain()
            }
            _ => Err(Error::Unsupported("an increasing sequence is required".into())),
        }
    }
}

/// `sup x_n` or `inf x_n` of a monotone sequence.
pub fn monotone_limit(seq: &Seq) -> Result<CofElem> {
    Ok(seq.chain()?.limit())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionC {
    pub sup: CofElem,
    pub inf_complements: CofElem,
    pub join: CofElem,
    pub holds: bool,
}

/// `(sup x_n) ∨ (inf x′_n) = 1_Λ` for an increasing sequence in `B`.
pub fn condition_c_check(seq: &Seq) -> Result<ConditionC> {
    let up = seq.increasing_chain()?;
    let sup = up.limit();
    let inf_complements = up.complement()?.limit();
    let join = sup.join(&inf_complements);
    Ok(ConditionC {
        holds: join == CofElem::one(),
        sup,
        inf_complements,
        join,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleLimit {
    /// `(lim x_n) ∨ (lim x′_n)`
    pub lhs: CofElem,
    /// `lim_m lim_n (x_m ∨ x′_n)`
    pub rhs: CofElem,
    pub equal: bool,
}

pub fn double_limit_check(seq: &Seq) -> Result<DoubleLimit> {
    let Chain::Up { flag, base, add } = seq.increasing_chain()? else {
        unreachable!("increasing chains are Up chains")
    };
    let Chain::Down {
        flag: dflag,
        base: dbase,
        remove,
    } = (Chain::Up {
        flag,
        base: base.clone(),
        add: add.clone(),
    })
    .complement()?
    else {
        unreachable!("complement of an increasing chain is decreasing")
    };
    let lhs = CofElem {
        flag,
        set: base.union(&add),
    }
    .join(
        &Chain::Down {
            flag: dflag,
            base: dbase.clone(),
            remove: remove.clone(),
        }
        .limit(),
    );
    // For fixed m, n ↦ x_m ∨ x′_n decreases from (S_m ∪ D) by (R ∩ D) \ S_m;
    // its infimum is S_m ∪ (D \ R), flagged when the removed part is finite.
    // Those infima increase in m through add.
    let inner_flag = (flag || dflag) && remove.intersection(&dbase).difference(&base).is_finite();
    let outer = Chain::Up {
        flag: inner_flag,
        base: base.union(&dbase.difference(&remove)),
        add,
    };
    let rhs = outer.limit();
    Ok(DoubleLimit {
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

/// Ultrafilters of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ultrafilter {
    /// Elements above `y_n`.
    Principal(u64),
    /// Elements above some `x_m`.
    Frechet,
}

impl Ultrafilter {
    pub fn contains(&self, e: &CofElem) -> bool {
        match self {
            Ultrafilter::Principal(n) => e.set.contains(*n),
            Ultrafilter::Frechet => e.flag,
        }
    }

    /// Infimum over the filter.
    pub fn infimum(&self) -> CofElem {
        match self {
            Ultrafilter::Principal(n) => CofElem::y(*n),
            Ultrafilter::Frechet => CofElem::zero(),
        }
    }
}

impl fmt::Display for Ultrafilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ultrafilter::Principal(n) => write!(f, "principal({n})"),
            Ultrafilter::Frechet => f.write_str("frechet"),
        }
    }
}

/// `principal(1..=limit)` and the Fréchet filter.
pub fn enumerate_ultrafilters(limit: u64) -> Vec<Ultrafilter> {
    (1..=limit)
        .map(Ultrafilter::Principal)
        .chain([Ultrafilter::Frechet])
        .collect()
}

/// Not atomless: `principal(1)` has infimum `y_1 ≠ 0_Λ`.
pub fn is_atomless() -> (bool, Option<Ultrafilter>) {
    let witness = enumerate_ultrafilters(1)
        .into_iter()
        .find(|u| u.infimum() != CofElem::zero());
    (witness.is_none(), witness)
}

/// Infinite index patterns living above `support`, used to reach
/// `Cl(B) \ B` in bounded enumerations.
fn infinite_patterns(support: u64) -> Vec<NatSet> {
    let above = NatSet::from(support + 1);
    [
        NatSet::all(),
        NatSet::progression(2, 2).expect("valid"),
        NatSet::progression(2, 1).expect("valid"),
        NatSet::progression(3, 3).expect("valid"),
    ]
    .into_iter()
    .map(|p| p.intersection(&above))
    .collect()
}

/// Elements with y-support in `{1..support}`: all of `B` with tails up to
/// `support + 1`, plus members of `Cl(B) \ B` extending each finite
/// support by an infinite pattern above it.
pub fn bounded_enumeration(support: u64) -> Vec<CofElem> {
    let base: Vec<NatSet> = (0..1u64 << support)
        .map(|mask| NatSet::finite((1..=support).filter(|k| mask >> (k - 1) & 1 == 1)))
        .collect();
    let mut out: Vec<CofElem> = base.iter().cloned().map(CofElem::ys).collect();
    for m in 1..=support + 1 {
        for s in &base {
            let e = CofElem::from_parts(Some(m), s.clone()).expect("valid tail");
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    for p in infinite_patterns(support) {
        for s in &base {
            out.push(CofElem::ys(s.union(&p)));
        }
    }
    out
}

/// Complemented elements among `elems`.
pub fn completion(elems: &[CofElem]) -> Vec<CofElem> {
    elems
        .iter()
        .filter(|e| e.complement().is_some())
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DossierEntry {
    pub label: String,
    pub value: String,
    pub expected: String,
    pub pass: bool,
}

fn entry(label: &str, value: impl ToString, expected: impl ToString) -> DossierEntry {
    let (value, expected) = (value.to_string(), expected.to_string());
    DossierEntry {
        label: label.into(),
        pass: value == expected,
        value,
        expected,
    }
}

fn class_name(c: ClosureClass) -> &'static str {
    match c {
        ClosureClass::InB => "B",
        ClosureClass::ClosureOnly => "Cl(B)\\B",
    }
}

/// The worked examples of the algebra with their expected outcomes.
pub fn dossier() -> Result<Vec<DossierEntry>> {
    let e = |s: &str| s.parse::<CofElem>();
    let mut out = Vec::new();
    for (text, class) in [
        ("x4", ClosureClass::InB),
        ("Y(3k)", ClosureClass::ClosureOnly),
        ("y1|y2|y5", ClosureClass::InB),
        ("Y(2k)", ClosureClass::ClosureOnly),
    ] {
        out.push(entry(
            &format!("closure class of {text}"),
            class_name(e(text)?.closure_class()),
            class_name(class),
        ));
    }
    out.push(entry("y2 | x3", e("y2|x3")?, "x2"));
    out.push(entry("Y(2k) | Y(2k+1)", e("Y(2k)|Y(2k+1)")?, "Y(k)"));
    out.push(entry("x2 & y1", e("x2&y1")?, "0"));
    let show = |c: Option<CofElem>| c.map_or("none".to_string(), |c| c.to_string());
    out.push(entry("complement of x3", show(e("x3")?.complement()), "y1|y2"));
    out.push(entry(
        "complement of Y(2k)",
        show(e("Y(2k)")?.complement()),
        "none",
    ));
    out.push(entry("complement of 0", show(CofElem::zero().complement()), "1"));
    out.push(entry(
        "lim prefix joins of ℕ",
        monotone_limit(&Seq::PrefixJoins(NatSet::all()))?,
        "Y(k)",
    ));
    out.push(entry("lim x_n", monotone_limit(&Seq::TailChain(1))?, "0"));
    let enumeration = bounded_enumeration(6);
    let completed = completion(&enumeration);
    let in_b: Vec<CofElem> = enumeration.iter().filter(|e| e.in_b()).cloned().collect();
    out.push(entry("completion = B (support ≤ 6)", completed == in_b, true));
    let c = condition_c_check(&Seq::PrefixJoins(NatSet::all()))?;
    out.push(entry(
        "condition (c), prefix joins of ℕ",
        format!("{} (sup {}, inf {})", verdict(c.holds), c.sup, c.inf_complements),
        "fails (sup Y(k), inf 0)",
    ));
    let c = condition_c_check(&Seq::EventuallyConstant(vec![CofElem::y(1)]))?;
    out.push(entry("condition (c), constant y1", verdict(c.holds), "holds"));
    let c = condition_c_check(&Seq::PrefixJoins(NatSet::progression(2, 2)?))?;
    out.push(entry(
        "condition (c), prefix joins of evens",
        format!("{} (join {})", verdict(c.holds), c.join),
        "fails (join Y(k))",
    ));
    for seq in [
        Seq::PrefixJoins(NatSet::all()),
        Seq::EventuallyConstant(vec![CofElem::one()]),
        Seq::PrefixJoins(NatSet::progression(2, 2)?),
    ] {
        let d = double_limit_check(&seq)?;
        out.push(entry(&format!("double limit {seq:?}"), d.equal, true));
    }
    for u in enumerate_ultrafilters(3) {
        let expected = match u {
            Ultrafilter::Principal(n) => CofElem::y(n),
            Ultrafilter::Frechet => CofElem::zero(),
        };
        out.push(entry(&format!("inf {u}"), u.infimum(), expected));
    }
    let (atomless, witness) = is_atomless();
    out.push(entry(
        "atomless",
        format!(
            "{atomless} (witness {})",
            witness.map_or("-".into(), |w| w.to_string())
        ),
        "false (witness principal(1))",
    ));
    Ok(out)
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}
