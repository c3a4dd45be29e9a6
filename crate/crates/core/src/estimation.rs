//! Monte Carlo check that the QFI is operationally attainable.
//!
//! The eigenvectors of the symmetric logarithmic derivative form the optimal
//! measurement: the classical Fisher information of its outcome distribution
//! equals the QFI. The simulator draws samples from that distribution at the
//! true parameter point, forms the maximum-likelihood estimate per trial and
//! reports the Cramér–Rao ratio variance·M·F, which approaches one from
//! above as the sample count grows.
//!
//! The measurement is fixed at the true parameter; estimating with the
//! optimal POVM of the unknown point itself is the usual idealized benchmark
//! for single-parameter estimation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{trace_product, ComplexMatrix, DensityOperator};
use crate::qfi::{qfi_spectral, sld};
use crate::real::Real;
use crate::unruh::{
    channel_state, channel_state_derivative, ChannelParams, FieldKind, InputParams, Parameter,
};

/// Eigenvalues of the SLD closer than this (relative) merge into one POVM
/// element; outcomes with proportional likelihood derivatives carry the same
/// information, so merging loses nothing.
const DEGENERACY_TOL: f64 = 1e-9;

/// Rank-one projectors onto the SLD eigenvectors, degenerate eigenvalues
/// merged (which also folds the support complement into a single element).
/// The elements sum to the identity.
pub fn optimal_povm<T: Real>(
    rho: &DensityOperator<T>,
    drho: &ComplexMatrix<T>,
    eps: T,
) -> Result<Vec<ComplexMatrix<T>>> {
    let l = sld(rho, drho, eps)?;
    let spec = crate::linalg::eig_hermitian(&l)?;
    let scale = spec
        .eigenvalues
        .iter()
        .fold(T::zero(), |m, &v| m.max(v.abs()))
        .max(T::one());
    let tol = T::of(DEGENERACY_TOL) * scale;

    let mut povm = Vec::new();
    let dim = rho.dim();
    let mut i = 0usize;
    while i < spec.eigenvalues.len() {
        let mut j = i + 1;
        while j < spec.eigenvalues.len() && (spec.eigenvalues[j - 1] - spec.eigenvalues[j]) <= tol {
            j += 1;
        }
        let mut e = ComplexMatrix::zeros(dim);
        for v in &spec.eigenvectors[i..j] {
            e = e.add(&crate::linalg::outer(v, v));
        }
        povm.push(e);
        i = j;
    }
    Ok(povm)
}

/// Fisher information of a discrete outcome distribution,
/// Σ_k (p'_k)²/p_k over outcomes with p_k above the cutoff.
///
/// Callers provide a distribution (p ≥ 0 summing to one) and derivatives
/// summing to zero.
pub fn classical_fisher<T: Real>(probs: &[T], dprobs: &[T], eps: T) -> T {
    let mut acc = T::zero();
    for (&p, &dp) in probs.iter().zip(dprobs) {
        if p > eps {
            acc += dp * dp / p;
        }
    }
    acc
}

/// Configuration of a Cramér–Rao simulation.
#[derive(Clone, Copy, Debug)]
pub struct EstimationRun<T> {
    pub field: FieldKind,
    pub theta: T,
    pub phi: T,
    pub r: T,
    /// Fock truncation override for the scalar channel.
    pub n_max: Option<usize>,
    pub target: Parameter,
    /// Samples per trial, at least 100.
    pub samples: usize,
    /// Independent trials, at least 50.
    pub trials: usize,
    pub seed: u64,
}

/// Summary of a Cramér–Rao simulation.
#[derive(Clone, Debug)]
pub struct CrbReport<T> {
    pub mean: T,
    /// Unbiased variance of the per-trial estimates.
    pub variance: T,
    /// QFI at the true point.
    pub qfi: T,
    /// variance · samples · QFI; approaches one from above.
    pub crb_ratio: T,
    pub samples: usize,
    pub trials: usize,
    pub seed: u64,
    pub estimates: Vec<T>,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial.wrapping_add(1)))
}

/// Golden-section maximization on [a, b] for a unimodal bracket.
fn golden_max<T: Real>(f: &impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let inv_phi = T::of(0.618_033_988_749_894_8);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        if (b - a).abs() < T::of(1e-10) {
            break;
        }
    }
    (a + b) * T::of(0.5)
}

/// Draw outcomes in the optimal POVM at the true point and check the
/// Cramér–Rao bound empirically by one-dimensional maximum likelihood.
pub fn simulate_crb<T: Real>(run: &EstimationRun<T>) -> Result<CrbReport<T>> {
    if run.samples < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 samples per trial for a meaningful variance, got {}",
            run.samples
        )));
    }
    if run.trials < 50 {
        return Err(Error::Domain(format!(
            "need at least 50 trials for a meaningful variance, got {}",
            run.trials
        )));
    }
    let input = InputParams::new(run.theta, run.phi)?;
    let channel = ChannelParams::new(run.field, run.r, run.n_max)?;
    let rho = channel_state(&channel, &input)?;
    let drho = channel_state_derivative(&channel, &input, run.target)?;
    let eps = T::SUPPORT_EPS;
    let qfi = qfi_spectral(&rho, &drho, eps)?;
    if qfi < T::of(1e-9) {
        return Err(Error::NoInformation(format!(
            "QFI of the target parameter is {qfi:e} at the true point"
        )));
    }
    let povm = optimal_povm(&rho, &drho, eps)?;
    let truth_probs: Vec<T> = povm
        .iter()
        .map(|e| trace_product(e, rho.matrix()).re.max(T::zero()))
        .collect();
    let informative = truth_probs.iter().filter(|&&p| p > T::of(1e-12)).count();
    if informative < 2 {
        return Err(Error::NoInformation(
            "outcome distribution is deterministic".into(),
        ));
    }

    // Search window for the maximum-likelihood estimate. The weight
    // parameter has a genuine domain; the phase lives on a circle where the
    // fixed POVM cannot distinguish φ from its mirror twin (the outcome
    // distribution is a single harmonic), so the search stays in the local
    // half-window around the truth where the Cramér–Rao statement applies.
    let (window_lo, window_hi) = match run.target {
        Parameter::Theta => (T::zero(), T::FRAC_PI_2()),
        Parameter::Phi => (run.phi - T::FRAC_PI_2(), run.phi + T::FRAC_PI_2()),
    };
    let candidate_state = |lambda: T| -> Result<DensityOperator<T>> {
        let p = match run.target {
            Parameter::Theta => InputParams::new(lambda, run.phi)?,
            Parameter::Phi => InputParams::with_wrapped_phi(run.theta, lambda)?,
        };
        channel_state(&channel, &p)
    };
    let outcome_probs = |lambda: T| -> Result<Vec<T>> {
        let state = candidate_state(lambda)?;
        Ok(povm
            .iter()
            .map(|e| trace_product(e, state.matrix()).re.max(T::zero()))
            .collect())
    };

    const COARSE: usize = 65;
    let step = (window_hi - window_lo) / T::of((COARSE - 1) as f64);
    let coarse_grid: Vec<T> = (0..COARSE)
        .map(|i| window_lo + step * T::of(i as f64))
        .collect();
    let mut coarse_probs = Vec::with_capacity(COARSE);
    for &x in &coarse_grid {
        coarse_probs.push(outcome_probs(x)?);
    }

    let floor = T::of(1e-300);
    let log_likelihood = |probs: &[T], counts: &[u64]| -> T {
        probs
            .iter()
            .zip(counts)
            .filter(|(_, &n)| n > 0)
            .map(|(&p, &n)| T::of(n as f64) * p.max(floor).ln())
            .sum()
    };

    let estimates: Vec<T> = (0..run.trials)
        .into_par_iter()
        .map(|trial| {
            use rand::{Rng, SeedableRng};
            let mut rng =
                rand_chacha::ChaCha12Rng::seed_from_u64(trial_seed(run.seed, trial as u64));
            let mut counts = vec![0u64; truth_probs.len()];
            for _ in 0..run.samples {
                let u = T::of(rng.random::<f64>());
                let mut acc = T::zero();
                let mut chosen = truth_probs.len() - 1;
                for (k, &p) in truth_probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        chosen = k;
                        break;
                    }
                }
                counts[chosen] += 1;
            }
            // coarse scan, then golden refinement on the winning bracket
            let mut best = 0usize;
            let mut best_ll = T::neg_infinity();
            for (i, probs) in coarse_probs.iter().enumerate() {
                let ll = log_likelihood(probs, &counts);
                if ll > best_ll {
                    best_ll = ll;
                    best = i;
                }
            }
            let lo = coarse_grid[best.saturating_sub(1)];
            let hi = coarse_grid[(best + 1).min(COARSE - 1)];
            let ll_of = |x: T| match outcome_probs(x) {
                Ok(p) => log_likelihood(&p, &counts),
                Err(_) => T::neg_infinity(),
            };
            golden_max(&ll_of, lo, hi)
        })
        .collect();

    let nt = T::of(run.trials as f64);
    let mean = estimates.iter().copied().sum::<T>() / nt;
    let variance = estimates
        .iter()
        .map(|&e| (e - mean) * (e - mean))
        .sum::<T>()
        / (nt - T::one());
    let crb_ratio = variance * T::of(run.samples as f64) * qfi;
    Ok(CrbReport {
        mean,
        variance,
        qfi,
        crb_ratio,
        samples: run.samples,
        trials: run.trials,
        seed: run.seed,
        estimates,
    })
}
