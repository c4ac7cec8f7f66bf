//! First chaos of a finite noise-type Boolean algebra and the checks built
//! on it.

use crate::error::{Error, Result};
use crate::finmeas::{weighted_inner, Rv};
use crate::linalg::{nullspace, Subspace};
use crate::ntba::{AtomSet, Ntba};
use crate::scalar::Scalar;
use crate::sigma::SigmaField;

/// Atom count above which element-wise enumerations refuse to run.
pub const MAX_ENUMERATED_ATOMS: usize = 12;

#[derive(Clone, Debug)]
pub struct ChaosResult<S: Scalar> {
    /// `H^(1)(B)`
    pub h1: Subspace<S>,
    /// `σ(H^(1)) = 1_Λ`
    pub classical: bool,
    /// `H^(1) = {0}` while `0_Λ ≠ 1_Λ`; impossible for finite algebras, kept
    /// for symmetry with the infinite theory.
    pub black: bool,
    /// `σ(H^(1))`
    pub generated: SigmaField<S>,
}

/// `f − Q_x f − Q_y f + Q_0 f`
fn split_defect<S: Scalar>(x: &SigmaField<S>, y: &SigmaField<S>, f: &[S]) -> Vec<S> {
    let qx = x.project_values(f);
    let qy = y.project_values(f);
    let mean = weighted_inner(x.space().probs(), f, &vec![S::one(); f.len()]);
    f.iter()
        .zip(qx.iter().zip(&qy))
        .map(|(v, (a, b))| v.minus(a).minus(b).plus(&mean))
        .collect()
}

/// Restricts a basis (as columns) to the kernel of a linear map.
fn restrict_to_kernel<S: Scalar>(basis: Vec<Vec<S>>, op: impl Fn(&[S]) -> Vec<S>) -> Vec<Vec<S>> {
    if basis.is_empty() {
        return basis;
    }
    let images: Vec<Vec<S>> = basis.iter().map(|b| op(b)).collect();
    let n = images[0].len();
    let rows: Vec<Vec<S>> = (0..n)
        .map(|i| images.iter().map(|c| c[i].clone()).collect())
        .collect();
    nullspace(&rows, basis.len())
        .into_iter()
        .map(|coeffs| {
            let mut v = vec![S::zero(); basis[0].len()];
            for (c, b) in coeffs.iter().zip(&basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    vi.add_prod(c, bi);
                }
            }
            S::rescale(&mut v);
            v
        })
        .collect()
}

/// Intersection over the given complement pairs `(x, x')` of
/// `{f : f = Q_x f + Q_{x'} f}`, within `Q_0 f = 0`.
fn intersect_split_kernels<S: Scalar>(
    b: &Ntba<S>,
    pairs: impl IntoIterator<Item = (SigmaField<S>, SigmaField<S>)>,
) -> Subspace<S> {
    let space = b.space();
    let probs = space.probs();
    // kernel of f ↦ E f
    let mut basis = nullspace(&[probs.to_vec()], space.len());
    for (x, y) in pairs {
        basis = restrict_to_kernel(basis, |f| split_defect(&x, &y, f));
    }
    Subspace::from_vectors(space, basis.iter().map(Vec::as_slice))
}

/// `H^(1)(B)`, computed from the co-atom constraints only.
pub fn first_chaos<S: Scalar>(b: &Ntba<S>) -> ChaosResult<S> {
    let pairs = b
        .coatoms()
        .into_iter()
        .zip(b.atoms().iter().cloned())
        .collect::<Vec<_>>();
    let h1 = intersect_split_kernels(b, pairs);
    let generated = SigmaField::generated_by_subspace(&h1);
    ChaosResult {
        classical: generated.is_discrete(),
        black: h1.dim() == 0 && b.space().len() > 1,
        generated,
        h1,
    }
}

/// `H^(1)(B)` from the constraints of every element; audits
/// [`first_chaos`].
pub fn first_chaos_exhaustive<S: Scalar>(b: &Ntba<S>) -> Result<Subspace<S>> {
    guard(b)?;
    let pairs = b
        .elements()
        .map(|e| (b.realize(e), b.realize(b.complement(e))))
        .collect::<Vec<_>>();
    Ok(intersect_split_kernels(b, pairs))
}

/// `{f : f = Q_x f + Q_{x'} f}` for one complement pair.
pub fn split_space<S: Scalar>(x: &SigmaField<S>, x_comp: &SigmaField<S>) -> Subspace<S> {
    let space = x.space();
    let n = space.len();
    let mut basis: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut e = vec![S::zero(); n];
            e[i] = S::one();
            e
        })
        .collect();
    basis = restrict_to_kernel(basis, |f| {
        let qx = x.project_values(f);
        let qy = x_comp.project_values(f);
        f.iter()
            .zip(qx.iter().zip(&qy))
            .map(|(v, (a, b))| v.minus(a).minus(b))
            .collect()
    });
    Subspace::from_vectors(space, basis.iter().map(Vec::as_slice))
}

/// `(H_x ⊖ H_0) ⊕ (H_{x'} ⊖ H_0)`
pub fn centered_pair_space<S: Scalar>(x: &SigmaField<S>, x_comp: &SigmaField<S>) -> Subspace<S> {
    let h0 = SigmaField::trivial(x.space()).subspace();
    x.subspace().minus(&h0).sum(&x_comp.subspace().minus(&h0))
}

fn guard<S: Scalar>(b: &Ntba<S>) -> Result<()> {
    if b.num_atoms() > MAX_ENUMERATED_ATOMS {
        return Err(Error::Capacity {
            what: "atoms for element enumeration",
            requested: b.num_atoms(),
            limit: MAX_ENUMERATED_ATOMS,
        });
    }
    Ok(())
}

/// Verdicts of the three equivalent first-chaos conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    /// `f = Q_x f + Q_{x'} f` for all `x`
    pub complement_split: bool,
    /// `Q_{x∨y} f = Q_x f + Q_y f` for disjoint `x, y`
    pub disjoint_additive: bool,
    /// `Q_{x∨y} f + Q_{x∧y} f = Q_x f + Q_y f` for all `x, y`, and `Q_0 f = 0`
    pub modular: bool,
}

impl Membership {
    pub fn verdict(&self) -> bool {
        self.complement_split
    }
}

fn vec_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.approx_eq(y))
}

fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()
}

/// Evaluates all three conditions independently and insists they agree.
pub fn chaos_membership<S: Scalar>(b: &Ntba<S>, f: &Rv<S>) -> Result<Membership> {
    guard(b)?;
    b.space().check_same(f.space())?;
    let n = b.num_atoms();
    let size = 1usize << n;
    let proj: Vec<Vec<S>> = b
        .elements()
        .map(|e| b.realize(e).project_values(f.values()))
        .collect();
    let fv = f.values();
    let top = b.top().0 as usize;

    let complement_split = (0..size).all(|x| vec_eq(fv, &vec_add(&proj[x], &proj[top & !x])));

    let mut disjoint_additive = true;
    let mut modular = proj[0].iter().all(Scalar::is_zero);
    for x in 0..size {
        for y in 0..size {
            let lhs = vec_add(&proj[x], &proj[y]);
            if x & y == 0 && !vec_eq(&proj[x | y], &lhs) {
                disjoint_additive = false;
            }
            if modular && !vec_eq(&vec_add(&proj[x | y], &proj[x & y]), &lhs) {
                modular = false;
            }
        }
    }
    let m = Membership {
        complement_split,
        disjoint_additive,
        modular,
    };
    if complement_split != disjoint_additive || complement_split != modular {
        return Err(Error::Consistency(format!(
            "first-chaos conditions disagree: {m:?}"
        )));
    }
    Ok(m)
}

/// `‖Q_{x∨y} f‖² + ‖Q_{x∧y} f‖² − ‖Q_x f‖² − ‖Q_y f‖²` (nonnegative).
pub fn superadditivity_gap<S: Scalar>(b: &Ntba<S>, f: &[S], x: AtomSet, y: AtomSet) -> S {
    let probs = b.space().probs();
    let sq = |e: AtomSet| {
        let p = b.realize(e).project_values(f);
        weighted_inner(probs, &p, &p)
    };
    sq(x.union(y))
        .plus(&sq(x.intersection(y)))
        .minus(&sq(x))
        .minus(&sq(y))
}

/// Outcome of [`atomless_split`].
#[derive(Debug, Clone, PartialEq)]
pub enum Split {
    /// Elements covering `1_B` with every `‖Q_x f‖ ≤ ε`.
    Found { elements: Vec<AtomSet>, norms: Vec<f64> },
    /// No cover meets the bound; `best` is the smallest achievable maximum.
    Infeasible { best: f64 },
}

/// Looks for elements `x_1 ∨ … ∨ x_k = 1` with `‖Q_{x_i} f‖ ≤ ε`.
///
/// `x ↦ ‖Q_x f‖` is monotone, so the atoms themselves give the smallest
/// possible maximum; groups are then merged greedily while the bound holds.
pub fn atomless_split<S: Scalar>(b: &Ntba<S>, f: &Rv<S>, eps: f64) -> Result<Split> {
    b.space().check_same(f.space())?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain(format!("ε must be positive, got {eps}")));
    }
    if !b.space().expectation(f)?.is_zero() {
        return Err(Error::Precondition("E f ≠ 0".into()));
    }
    let probs = b.space().probs();
    let norm2 = |e: AtomSet| {
        let p = b.realize(e).project_values(f.values());
        weighted_inner(probs, &p, &p)
    };
    let eps2 = S::from_f64(eps * eps).ok_or_else(|| Error::Domain("ε not finite".into()))?;
    let fits = |v: &S| *v <= eps2 || v.approx_eq(&eps2);

    if b.num_atoms() == 0 {
        return Ok(Split::Found {
            elements: vec![b.top()],
            norms: vec![norm2(b.top()).to_f64().sqrt()],
        });
    }
    let mut groups: Vec<(AtomSet, S)> = (0..b.num_atoms())
        .map(|i| {
            let e = AtomSet::singleton(i);
            (e, norm2(e))
        })
        .collect();
    let worst = groups.iter().map(|(_, v)| v.to_f64()).fold(0.0, f64::max);
    if !groups.iter().all(|(_, v)| fits(v)) {
        return Ok(Split::Infeasible { best: worst.sqrt() });
    }
    'merge: loop {
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let merged = groups[i].0.union(groups[j].0);
                let v = norm2(merged);
                if fits(&v) {
                    groups[i] = (merged, v);
                    groups.remove(j);
                    continue 'merge;
                }
            }
        }
        break;
    }
    Ok(Split::Found {
        norms: groups.iter().map(|(_, v)| v.to_f64().sqrt()).collect(),
        elements: groups.into_iter().map(|(e, _)| e).collect(),
    })
}

/// `Up(Down(x)) = x`: the σ-field generated by `Q_x H^(1)` is `x` itself.
pub fn up_down_roundtrip<S: Scalar>(b: &Ntba<S>, chaos: &ChaosResult<S>, e: AtomSet) -> Result<bool> {
    if !chaos.classical {
        return Err(Error::Precondition("algebra is not classical".into()));
    }
    let x = b.realize(e);
    let image = chaos.h1.map(|h| x.project_values(h));
    Ok(SigmaField::generated_by_subspace(&image) == x)
}
