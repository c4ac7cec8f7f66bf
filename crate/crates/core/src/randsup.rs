//! Random elements `ν_{b,p}` of finite Boolean algebras and the join
//! process `Y_n = X_1 ∨ ⋯ ∨ X_n` over a refining tower of algebras.
//!
//! Level `k` has `N_k` atoms; atom `j` of level `k` refines atom
//! `⌊j·N_{k−1}/N_k⌋` of level `k − 1`. Elements are reported in
//! finest-level coordinates.
//!
//! Trial `t` draws from ChaCha8 seeded with `seed` on stream `t`, so results
//! do not depend on how trials are scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::ntba::AtomSet;

/// Finest-level atoms are held in one `u64`.
pub const MAX_FINE_ATOMS: usize = 64;
/// Largest algebra for the distribution test (`2^n` cells).
pub const MAX_TEST_ATOMS: usize = 16;
/// Significance threshold of the distribution test.
pub const CHI_SQUARE_ALPHA: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub atom_counts: Vec<usize>,
    pub ps: Vec<f64>,
    pub seed: u64,
    pub trials: u64,
    /// `c_n` for the reported `(1 − p_n)^{c_n}`; `n²` when absent.
    pub c: Option<Vec<u64>>,
}

impl SampleConfig {
    /// Every level a copy of the same `n`-atom algebra.
    pub fn uniform(n: usize, ps: Vec<f64>, seed: u64, trials: u64) -> Self {
        SampleConfig {
            atom_counts: vec![n; ps.len()],
            ps,
            seed,
            trials,
            c: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ps.is_empty() || self.ps.len() != self.atom_counts.len() {
            return Err(Error::Domain(
                "need one probability per level and at least one level".into(),
            ));
        }
        for &p in &self.ps {
            check_p(p)?;
        }
        if self.atom_counts[0] == 0 || self.atom_counts.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain(
                "atom counts must be positive and nondecreasing".into(),
            ));
        }
        let fine = *self.atom_counts.last().expect("nonempty");
        if fine > MAX_FINE_ATOMS {
            return Err(Error::Capacity {
                what: "finest-level atoms",
                requested: fine,
                limit: MAX_FINE_ATOMS,
            });
        }
        if let Some(c) = &self.c {
            if c.len() != self.ps.len() {
                return Err(Error::Domain("need one c_n per level".into()));
            }
        }
        Ok(())
    }

    fn fine(&self) -> usize {
        *self.atom_counts.last().expect("validated")
    }

    /// Level-`k` ancestor of every finest atom.
    fn ancestors(&self) -> Vec<Vec<usize>> {
        let levels = self.atom_counts.len();
        let mut out = vec![Vec::new(); levels];
        out[levels - 1] = (0..self.fine()).collect();
        for k in (0..levels - 1).rev() {
            let (coarse, finer) = (self.atom_counts[k], self.atom_counts[k + 1]);
            out[k] = out[k + 1].iter().map(|&j| j * coarse / finer).collect();
        }
        out
    }

    /// Lifts a level-`k` element to finest coordinates.
    fn lift(&self, ancestors: &[Vec<usize>], k: usize, e: AtomSet) -> AtomSet {
        AtomSet::from_indices(
            ancestors[k]
                .iter()
                .enumerate()
                .filter(|(_, &a)| e.contains(a))
                .map(|(i, _)| i),
        )
    }

    /// `c_n` per level (`n²` by default).
    pub fn c_values(&self) -> Vec<u64> {
        self.c
            .clone()
            .unwrap_or_else(|| (1..=self.ps.len() as u64).map(|n| n * n).collect())
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability {p} outside (0, 1)")))
    }
}

/// Generator for trial `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `ν_{b,p}`: every one of `n` atoms included independently with
/// probability `p`.
pub fn sample_element(n: usize, p: f64, rng: &mut impl Rng) -> Result<AtomSet> {
    check_p(p)?;
    if n > MAX_FINE_ATOMS {
        return Err(Error::Capacity {
            what: "atoms",
            requested: n,
            limit: MAX_FINE_ATOMS,
        });
    }
    Ok(AtomSet::from_indices((0..n).filter(|_| rng.random_bool(p))))
}

/// `Y_1, …, Y_n` from given level samples `X_1, …, X_n`.
pub fn accumulate(cfg: &SampleConfig, samples: &[AtomSet]) -> Result<Vec<AtomSet>> {
    cfg.validate()?;
    if samples.len() != cfg.ps.len() {
        return Err(Error::Domain("need one sample per level".into()));
    }
    let anc = cfg.ancestors();
    let mut y = AtomSet::EMPTY;
    Ok(samples
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            y = y.union(cfg.lift(&anc, k, x));
            y
        })
        .collect())
}

fn trajectory_with(cfg: &SampleConfig, anc: &[Vec<usize>], trial: u64) -> Vec<AtomSet> {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut y = AtomSet::EMPTY;
    cfg.ps
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let x = sample_element(cfg.atom_counts[k], p, &mut rng).expect("validated");
            y = y.union(cfg.lift(anc, k, x));
            y
        })
        .collect()
}

/// The join trajectory of one trial.
pub fn trajectory(cfg: &SampleConfig, trial: u64) -> Result<Vec<AtomSet>> {
    cfg.validate()?;
    Ok(trajectory_with(cfg, &cfg.ancestors(), trial))
}

/// Trajectories of every trial, in trial order.
pub fn run_join_process(cfg: &SampleConfig) -> Result<Vec<Vec<AtomSet>>> {
    cfg.validate()?;
    let anc = cfg.ancestors();
    Ok((0..cfg.trials)
        .into_par_iter()
        .map(|t| trajectory_with(cfg, &anc, t))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionBound {
    pub atom: usize,
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    /// `1 − Π(1 − p_k)`
    pub exact: f64,
    /// `Σ p_k`
    pub bound: f64,
    /// Binomial standard error at the exact probability.
    pub sigma: f64,
    pub within_exact: bool,
    pub below_bound: bool,
    /// `(n, c_n, (1 − p_n)^{c_n})`
    pub c_sequence: Vec<(usize, u64, f64)>,
}

impl UnionBound {
    pub fn pass(&self) -> bool {
        self.within_exact && self.below_bound
    }
}

/// Monte-Carlo estimate of `Pr[a ≤ Y_n]` for a finest-level atom `a`.
pub fn union_bound_report(cfg: &SampleConfig, atom: usize) -> Result<UnionBound> {
    cfg.validate()?;
    if atom >= cfg.fine() {
        return Err(Error::Domain(format!("atom {atom} out of range")));
    }
    let bound: f64 = cfg.ps.iter().sum();
    if bound >= 1.0 {
        return Err(Error::Domain(format!("Σ p_k = {bound} must be below 1")));
    }
    if cfg.trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let anc = cfg.ancestors();
    let hits: u64 = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let y = trajectory_with(cfg, &anc, t);
            u64::from(y.last().expect("nonempty").contains(atom))
        })
        .sum();
    let exact = 1.0 - cfg.ps.iter().map(|p| 1.0 - p).product::<f64>();
    let n = cfg.trials as f64;
    let estimate = hits as f64 / n;
    let sigma = (exact * (1.0 - exact) / n).sqrt();
    let c_sequence = cfg
        .c_values()
        .into_iter()
        .zip(&cfg.ps)
        .enumerate()
        .map(|(i, (c, p))| (i + 1, c, (1.0 - p).powf(c as f64)))
        .collect();
    Ok(UnionBound {
        atom,
        hits,
        trials: cfg.trials,
        estimate,
        exact,
        bound,
        sigma,
        within_exact: (estimate - exact).abs() <= 3.0 * sigma,
        below_bound: estimate <= bound + 3.0 * sigma,
        c_sequence,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquare {
    /// Observed frequency of each element, indexed by atom bits.
    pub counts: Vec<u64>,
    /// `trials · p^k (1 − p)^{n−k}`
    pub expected: Vec<f64>,
    pub statistic: f64,
    pub df: u64,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn pass(&self) -> bool {
        self.p_value > CHI_SQUARE_ALPHA
    }
}

/// Goodness of fit of `ν_{b,p}` samples on an `n`-atom algebra.
pub fn distribution_test(n: usize, p: f64, trials: u64, seed: u64) -> Result<ChiSquare> {
    check_p(p)?;
    if n == 0 || n > MAX_TEST_ATOMS {
        return Err(Error::Capacity {
            what: "atoms for the distribution test",
            requested: n,
            limit: MAX_TEST_ATOMS,
        });
    }
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let cells = 1usize << n;
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; cells],
            |mut acc, t| {
                let e = sample_element(n, p, &mut trial_rng(seed, t)).expect("checked");
                acc[e.0 as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let expected: Vec<f64> = (0..cells)
        .map(|e| {
            let k = (e as u64).count_ones() as i32;
            trials as f64 * p.powi(k) * (1.0 - p).powi(n as i32 - k)
        })
        .collect();
    let statistic = counts
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let df = cells as u64 - 1;
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(ChiSquare {
        p_value: dist.sf(statistic),
        counts,
        expected,
        statistic,
        df,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let cfg = SampleConfig::uniform(2, vec![0.1, 0.1, 0.1], 42, 20_000);
        let r = union_bound_report(&cfg, 0).unwrap();
        assert!((r.exact - 0.271).abs() < 1e-12);
        assert!((r.bound - 0.3).abs() < 1e-12);
        assert!(r.pass(), "{r:?}");
        let one = SampleConfig::uniform(1, vec![0.25], 1, 1000);
        let r = union_bound_report(&one, 0).unwrap();
        assert_eq!(r.exact, 0.25);
        assert_eq!(r.bound, 0.25);
        let two = SampleConfig::uniform(3, vec![0.4, 0.4], 1, 1000);
        assert!((union_bound_report(&two, 2).unwrap().exact - 0.64).abs() < 1e-12);
    }

    #[test]
    fn zero_samples_stay_zero() {
        let cfg = SampleConfig {
            atom_counts: vec![1, 2, 4],
            ps: vec![0.5; 3],
            seed: 0,
            trials: 1,
            c: None,
        };
        let y = accumulate(&cfg, &[AtomSet::EMPTY; 3]).unwrap();
        assert!(y.iter().all(|e| e.is_empty()));
        let y = accumulate(&cfg, &[AtomSet::EMPTY, AtomSet::singleton(1), AtomSet::EMPTY]).unwrap();
        assert_eq!(y[2], AtomSet::from_indices([2, 3]));
    }

    #[test]
    fn trajectories_are_monotone_and_reproducible() {
        let cfg = SampleConfig {
            atom_counts: vec![2, 4, 8],
            ps: vec![0.3, 0.3, 0.3],
            seed: 9,
            trials: 200,
            c: None,
        };
        let runs = run_join_process(&cfg).unwrap();
        for t in &runs {
            assert!(t.windows(2).all(|w| w[0].is_subset(w[1])));
        }
        assert_eq!(runs, run_join_process(&cfg).unwrap());
        assert_eq!(runs[17], trajectory(&cfg, 17).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(sample_element(2, 0.0, &mut trial_rng(0, 0)).is_err());
        assert!(sample_element(2, 1.0, &mut trial_rng(0, 0)).is_err());
        let cfg = SampleConfig::uniform(2, vec![0.6, 0.6], 0, 10);
        assert!(union_bound_report(&cfg, 0).is_err());
        let cfg = SampleConfig::uniform(2, vec![0.6, 0.6], 0, 10);
        assert!(trajectory(&cfg, 0).is_ok());
    }

    #[test]
    fn uniform_half() {
        let r = distribution_test(2, 0.5, 20_000, 5).unwrap();
        assert!(r.expected.iter().all(|&e| e == 5000.0));
        assert!(r.pass(), "{r:?}");
    }
}
