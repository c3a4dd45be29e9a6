//! Closed-form QFI expressions for the channel family, used as targets for
//! oracle cross-validation against the spectral machinery.
//!
//! Conventions: θ is the weight parameter, φ the phase parameter, r the
//! acceleration parameter (scalar: r ≥ 0, Dirac: r ∈ [0, π/4)). The scalar
//! phase QFI is a series; the truncated series is the authoritative value
//! and the hypergeometric form from the analytic summation is a validation
//! target.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::{hyp2f1, Hyp2F1Params, SeriesSum};

/// Hard ceiling on series terms; at the default tolerances this is hit only
/// deep in the tanh²r → 1 regime, where the returned partial sum is still a
/// certified lower bound (all terms are nonnegative).
const MAX_SERIES_TERMS: usize = 50_000_000;

/// QFI of the inertial input state: (F_θ, F_φ) = (4, sin²2θ).
pub fn inertial_qfi<T: Real>(theta: T) -> (T, T) {
    let s = (T::of(2.0) * theta).sin();
    (T::of(4.0), s * s)
}

/// Scalar-channel QFI of the weight parameter; invariant under the channel.
pub fn scalar_f_theta<T: Real>(_theta: T, _r: T) -> T {
    T::of(4.0)
}

/// Classical and quantum contributions of the scalar weight QFI as truncated
/// sums: F_C = Σ Pₙ'(θ)²/Pₙ and F_Q = Σ tanh²ⁿr/cosh²r·[4Λₙ − (∂Θₙ)²/Θₙ]
/// with Λₙ = sin²θ + (n+1)cos²θ/cosh²r. They add up to 4.
pub fn scalar_f_theta_parts<T: Real>(theta: T, r: T, tail_tol: T) -> (T, T) {
    let t = r.tanh() * r.tanh();
    let sech2 = T::one() - t; // 1/cosh²r
    let s2 = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);
    let sin_2t = (T::of(2.0) * theta).sin();
    let four = T::of(4.0);

    // mass tail ≤ tol·1e-3 keeps the slowly growing block factors harmless
    let fine = tail_tol * T::of(1e-3);
    let mut classical = T::zero();
    let mut quantum = T::zero();
    let mut tpow = T::one();
    let mut n = 0usize;
    loop {
        let np1 = T::of((n + 1) as f64);
        let norm_sq = c2 + np1 * s2 * sech2;
        let d_norm = sin_2t * (np1 * sech2 - T::one());
        let tangent = s2 + np1 * c2 * sech2;
        let w = tpow * sech2;
        classical += w * d_norm * d_norm / norm_sq;
        quantum += w * (four * tangent - d_norm * d_norm / norm_sq);
        tpow *= t;
        let np2 = np1 + T::one();
        let tail = tpow * (np2 + T::one() - np2 * t);
        if tail <= fine || n >= MAX_SERIES_TERMS {
            break;
        }
        n += 1;
    }
    (classical, quantum)
}

/// Scalar-channel QFI of the phase parameter as the truncated series
/// F_φ = sin²2θ/cosh⁴r · Σ (n+1)tanh²ⁿr/Θₙ, with a certified tail bound.
///
/// The tail bound uses the geometric-derivative sum over the monotone floor
/// of Θₙ. When the term ceiling is reached first (deep in the tanh²r → 1
/// regime) the returned `tail_bound` honestly exceeds `tail_tol`; the value
/// is then still a lower bound since every term is nonnegative.
pub fn scalar_f_phi_series<T: Real>(theta: T, r: T, tail_tol: T) -> SeriesSum<T> {
    let sin_2t = (T::of(2.0) * theta).sin();
    let pref_base = sin_2t * sin_2t;
    if pref_base == T::zero() {
        return SeriesSum {
            value: T::zero(),
            terms: 0,
            tail_bound: T::zero(),
        };
    }
    let t = r.tanh() * r.tanh();
    let sech2 = T::one() - t;
    let pref = pref_base * sech2 * sech2; // sin²2θ/cosh⁴r
    let s2 = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);

    let mut sum = T::zero();
    let mut comp = T::zero(); // Kahan compensation
    let mut tpow = T::one();
    let mut n = 0usize;
    loop {
        let np1 = T::of((n + 1) as f64);
        let norm_sq = c2 + np1 * s2 * sech2;
        let term = np1 * tpow / norm_sq;
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;

        tpow *= t;
        let np2 = np1 + T::one();
        // Σ_{m>n}(m+1)tᵐ = t^{n+1}((n+2)−(n+1)t)/(1−t)², and Θ ≥ Θ_{n+1}
        let floor = c2 + np2 * s2 * sech2;
        let tail = pref_base * tpow * (np2 + T::one() - np2 * t) / floor;
        if tail <= tail_tol || n + 1 >= MAX_SERIES_TERMS {
            return SeriesSum {
                value: pref * sum,
                terms: n + 1,
                tail_bound: tail,
            };
        }
        n += 1;
    }
}

/// Largest |cot θ| the hypergeometric route accepts before the parameters
/// b, c ≈ cosh²r·cot²θ overflow the series; beyond this the series route is
/// the accurate one and callers are redirected there.
const MAX_COTANGENT: f64 = 1e6;

/// Scalar-channel phase QFI by the analytic summation of the series:
///
/// F_φ = sech⁴r·sin²2θ·[₂F₁(1, 1+κ; 2+κ; z)(cos²θ + 2sech²r·sin²θ)
///       + ₂F₁(2, 2+κ; 3+κ; z)(cos²θ + sech²r·sin²θ)tanh²r]
///       / (cos⁴θ + 3sech²r·sin²θcos²θ + 2sech⁴r·sin⁴θ)
///
/// with κ = cosh²r·cot²θ and z = tanh²r.
pub fn scalar_f_phi_hyper<T: Real>(theta: T, r: T) -> Result<T> {
    if !(theta > T::zero() && theta < T::FRAC_PI_2()) {
        return Err(Error::Domain(
            "hypergeometric route needs theta in (0, pi/2); use the series route at the endpoints"
                .into(),
        ));
    }
    let cot = theta.cos() / theta.sin();
    if cot.abs() > T::of(MAX_COTANGENT) {
        return Err(Error::Domain(format!(
            "cot(theta) = {cot:.3e} too large for the hypergeometric parameters; \
             use the series route"
        )));
    }
    let t = r.tanh() * r.tanh();
    let sech2 = T::one() - t;
    let s2 = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);
    let sin_2t = (T::of(2.0) * theta).sin();

    let kappa = r.cosh().powi(2) * cot * cot;
    let one = T::one();
    let two = T::of(2.0);
    let three = T::of(3.0);
    let mut p1 = Hyp2F1Params::new(one, one + kappa, two + kappa, t);
    let mut p2 = Hyp2F1Params::new(two, two + kappa, three + kappa, t);
    p1.max_terms = 500_000;
    p2.max_terms = 500_000;
    let f1 = hyp2f1(&p1)?.value;
    let f2 = hyp2f1(&p2)?.value;

    let num = sech2
        * sech2
        * sin_2t
        * sin_2t
        * (f1 * (c2 + two * sech2 * s2) + f2 * (c2 + sech2 * s2) * t);
    let den = c2 * c2 + three * sech2 * s2 * c2 + two * sech2 * sech2 * s2 * s2;
    Ok(num / den)
}

/// Dirac-channel QFI of the weight parameter; invariant under the channel.
pub fn dirac_f_theta<T: Real>(_theta: T, _r: T) -> T {
    T::of(4.0)
}

/// Classical and quantum contributions of the Dirac weight QFI:
/// F_C = 4sin²r·sin²θ/(1−sin²r·cos²θ), F_Q = 4cos²r/(1−sin²r·cos²θ).
pub fn dirac_f_theta_parts<T: Real>(theta: T, r: T) -> (T, T) {
    let four = T::of(4.0);
    let s2r = r.sin().powi(2);
    let denom = T::one() - s2r * theta.cos().powi(2);
    (
        four * s2r * theta.sin().powi(2) / denom,
        four * r.cos().powi(2) / denom,
    )
}

/// Dirac-channel phase QFI: cos²r·sin²2θ/(1−sin²r·cos²θ).
pub fn dirac_f_phi<T: Real>(theta: T, r: T) -> T {
    let sin_2t = (T::of(2.0) * theta).sin();
    let denom = T::one() - r.sin().powi(2) * theta.cos().powi(2);
    r.cos().powi(2) * sin_2t * sin_2t / denom
}

/// r-derivative of [`dirac_f_phi`]:
/// ∂F_φ/∂r = −4sin2r·sin⁴θ·cos²θ/(1−sin²r·cos²θ)², never positive.
pub fn dirac_f_phi_dr<T: Real>(theta: T, r: T) -> T {
    let denom = T::one() - r.sin().powi(2) * theta.cos().powi(2);
    -T::of(4.0) * (T::of(2.0) * r).sin() * theta.sin().powi(4) * theta.cos().powi(2)
        / (denom * denom)
}

/// Infinite-acceleration limit of the Dirac phase QFI:
/// lim_{r→π/4} F_φ = (1−cos4θ)/(3−cos2θ).
pub fn dirac_f_phi_limit<T: Real>(theta: T) -> T {
    (T::one() - (T::of(4.0) * theta).cos()) / (T::of(3.0) - (T::of(2.0) * theta).cos())
}

/// Subsystem QFI of the Dirac channel output.
#[derive(Clone, Copy, Debug)]
pub struct SubsystemQfi<T> {
    /// F_θ of Alice's reduced state (4 in the open θ interval).
    pub f_theta_alice: T,
    /// F_θ of Rob's reduced state: 4cos²r·sin²θ/(1−cos²r·cos²θ).
    pub f_theta_rob: T,
    /// F_φ of Alice's reduced state (the marginal carries no phase).
    pub f_phi_alice: T,
    /// F_φ of Rob's reduced state (likewise zero).
    pub f_phi_rob: T,
}

/// Closed-form subsystem QFI of the Dirac channel.
pub fn dirac_subsystem_qfi<T: Real>(theta: T, r: T) -> SubsystemQfi<T> {
    let c2r = r.cos().powi(2);
    let denom = T::one() - c2r * theta.cos().powi(2);
    SubsystemQfi {
        f_theta_alice: T::of(4.0),
        f_theta_rob: T::of(4.0) * c2r * theta.sin().powi(2) / denom,
        f_phi_alice: T::zero(),
        f_phi_rob: T::zero(),
    }
}

/// Symmetry-breaking probe of the scalar phase QFI:
/// ΔF_φ(r) = F_φ(θ=π/3, r) − F_φ(θ=π/6, r).
pub fn delta_f_phi_scalar<T: Real>(r: T, tail_tol: T) -> T {
    let third = T::PI() / T::of(3.0);
    let sixth = T::PI() / T::of(6.0);
    scalar_f_phi_series(third, r, tail_tol).value - scalar_f_phi_series(sixth, r, tail_tol).value
}
