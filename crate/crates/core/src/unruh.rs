//! Input states and Unruh channel outputs for scalar and Dirac fields.
//!
//! The input family is |Ψ⟩ = cosθ|00⟩ + e^{iφ}sinθ|11⟩ with θ ∈ [0, π/2],
//! φ ∈ [0, 2π). Alice's qubit is untouched; Rob's mode passes through the
//! Unruh channel at acceleration parameter `r`:
//!
//! * scalar field: the two-mode squeezing expansion |0⟩ → Σ tanhⁿr/cosh r
//!   |n,n⟩ produces, after tracing region II, a direct sum of weighted pure
//!   qubits on the basis pairs {|0,n⟩, |1,n+1⟩} with
//!   Pₙ = tanh²ⁿr/cosh²r · Θₙ, Θₙ = cos²θ + (n+1)sin²θ/cosh²r and
//!   Φₙ = (cosθ, e^{iφ}√(n+1)sinθ/cosh r)/√Θₙ;
//! * Dirac field: |0⟩ → cos r|00⟩ + sin r|11⟩ gives a 4×4 state of rank two
//!   with eigenvalues 1 − sin²r·cos²θ and sin²r·cos²θ.
//!
//! Basis ordering is A-major: |00⟩, |01⟩, |10⟩, |11⟩. The phase convention
//! keeps e^{−iφ} on the first component of the Dirac eigenvector, so
//! ⟨Φ₁|∂_φΦ₁⟩ is nonzero and the overlap subtraction in the pure-state QFI
//! is exercised rather than vanishing by convention.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{partial_trace, CVector, ComplexMatrix, DensityOperator, Subsystem};
use crate::real::Real;

/// Which parameter of the input family a derivative refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parameter {
    Theta,
    Phi,
}

/// Field statistics selecting the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    Dirac,
}

/// Weight and phase of the input state.
#[derive(Clone, Copy, Debug)]
pub struct InputParams<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> InputParams<T> {
    /// θ ∈ [0, π/2], φ ∈ [0, 2π); out-of-range values are rejected rather
    /// than wrapped.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::FRAC_PI_2()) {
            return Err(Error::Domain(format!("theta = {theta} outside [0, pi/2]")));
        }
        let two_pi = T::of(2.0) * T::PI();
        if !(phi >= T::zero() && phi < two_pi) {
            return Err(Error::Domain(format!("phi = {phi} outside [0, 2*pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// Same input with φ reduced modulo 2π (for sweeps over the circle).
    pub fn with_wrapped_phi(theta: T, phi: T) -> Result<Self> {
        let two_pi = T::of(2.0) * T::PI();
        let mut w = phi % two_pi;
        if w < T::zero() {
            w += two_pi;
        }
        // the representative of 2π is 0
        if w >= two_pi {
            w = T::zero();
        }
        Self::new(theta, w)
    }
}

/// Channel selection: field kind, acceleration parameter, optional explicit
/// Fock truncation for the scalar field.
#[derive(Clone, Copy, Debug)]
pub struct ChannelParams<T> {
    pub field: FieldKind,
    pub r: T,
    pub n_max: Option<usize>,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(field: FieldKind, r: T, n_max: Option<usize>) -> Result<Self> {
        match field {
            FieldKind::Scalar => {
                if !(r >= T::zero() && r.is_finite()) {
                    return Err(Error::Domain(format!(
                        "scalar acceleration parameter r = {r} must be finite and >= 0"
                    )));
                }
            }
            FieldKind::Dirac => {
                if !(r >= T::zero() && r < T::FRAC_PI_4()) {
                    return Err(Error::Domain(format!(
                        "dirac acceleration parameter r = {r} outside [0, pi/4)"
                    )));
                }
            }
        }
        Ok(Self { field, r, n_max })
    }
}

/// Amplitudes of the input state in the A-major basis.
pub fn initial_state<T: Real>(p: &InputParams<T>) -> CVector<T> {
    let zero = Complex::new(T::zero(), T::zero());
    vec![
        Complex::new(p.theta.cos(), T::zero()),
        zero,
        zero,
        Complex::from_polar(p.theta.sin(), p.phi),
    ]
}

/// Analytic parameter derivative of [`initial_state`].
pub fn initial_state_derivative<T: Real>(p: &InputParams<T>, param: Parameter) -> CVector<T> {
    let zero = Complex::new(T::zero(), T::zero());
    match param {
        Parameter::Theta => vec![
            Complex::new(-p.theta.sin(), T::zero()),
            zero,
            zero,
            Complex::from_polar(p.theta.cos(), p.phi),
        ],
        Parameter::Phi => vec![
            zero,
            zero,
            zero,
            Complex::from_polar(p.theta.sin(), p.phi) * Complex::new(T::zero(), T::one()),
        ],
    }
}

/// Acceleration ↔ channel-parameter conversion.
///
/// Scalar: cosh r = (1 − e^{−2πΩ})^{−1/2} with Ω = |k|c/a > 0.
/// Dirac: cos r = (1 + e^{−2πωc/a})^{−1/2} with ωc/a ≥ 0, giving r ∈ [0, π/4]
/// where the upper endpoint is the infinite-acceleration limit.
pub fn r_from_acceleration<T: Real>(field: FieldKind, frequency_ratio: T) -> Result<T> {
    let two_pi = T::of(2.0) * T::PI();
    match field {
        FieldKind::Scalar => {
            if !(frequency_ratio > T::zero()) {
                return Err(Error::Domain(
                    "scalar channel needs frequency ratio > 0; the acceleration would be infinite"
                        .into(),
                ));
            }
            let arg = (T::one() - (-two_pi * frequency_ratio).exp())
                .recip()
                .sqrt();
            Ok(arg.acosh())
        }
        FieldKind::Dirac => {
            if !(frequency_ratio >= T::zero()) {
                return Err(Error::Domain(
                    "dirac channel needs frequency ratio >= 0".into(),
                ));
            }
            let arg = (T::one() + (-two_pi * frequency_ratio).exp())
                .recip()
                .sqrt();
            Ok(arg.acos())
        }
    }
}

/// Rindler-mode amplitudes of the Minkowski vacuum: pairs ((n_I, n_II), amp).
///
/// Scalar: tanhⁿr/cosh r on |n, n⟩, truncated so the norm deficit stays
/// below `TAIL_TOL` when `n_max` is not given. Dirac: cos r on |0, 0⟩ and
/// sin r on |1, 1⟩, exact.
pub fn bogoliubov_vacuum<T: Real>(
    field: FieldKind,
    r: T,
    n_max: Option<usize>,
) -> Result<Vec<((usize, usize), T)>> {
    match field {
        FieldKind::Dirac => {
            ChannelParams::new(FieldKind::Dirac, r, None)?;
            Ok(vec![((0, 0), r.cos()), ((1, 1), r.sin())])
        }
        FieldKind::Scalar => {
            ChannelParams::new(FieldKind::Scalar, r, None)?;
            let t = r.tanh() * r.tanh();
            let n_max = match n_max {
                Some(n) => n,
                None => {
                    // norm-deficit tail Σ_{n>N} tanh²ⁿr/cosh²r = t^{N+1}
                    let mut n = 0usize;
                    let mut tail = t;
                    while tail > T::TAIL_TOL && n < MAX_AUTO_TRUNCATION {
                        tail *= t;
                        n += 1;
                    }
                    n
                }
            };
            let inv_ch = r.cosh().recip();
            let tanh = r.tanh();
            let mut amp = inv_ch;
            let mut out = Vec::with_capacity(n_max + 1);
            for n in 0..=n_max {
                out.push(((n, n), amp));
                amp *= tanh;
            }
            Ok(out)
        }
    }
}

/// Ceiling on automatic Fock truncation; beyond this the block state would
/// not fit desk-scale memory and the series routes should be used instead.
const MAX_AUTO_TRUNCATION: usize = 5_000_000;

/// Upper bound on the mass beyond block `n`:
/// Σ_{m>n} Pₘ ≤ t^{n+1}((n+2) − (n+1)t) uniformly in θ, with t = tanh²r.
/// (The geometric-derivative tail Σ_{m>n}(m+1)tᵐ = t^{n+1}((n+2)−(n+1)t)/(1−t)²
/// multiplied by sin²θ/cosh⁴r, plus the plain geometric cos²θ part.)
fn scalar_tail_bound<T: Real>(t: T, n: usize, tpow_np1: T) -> T {
    let np1 = T::of((n + 1) as f64);
    tpow_np1 * (np1 + T::one() - np1 * t)
}

fn scalar_auto_n_max<T: Real>(t: T, tol: T) -> Result<usize> {
    let mut n = 0usize;
    let mut tpow = t; // t^{n+1}
    loop {
        if scalar_tail_bound(t, n, tpow) <= tol {
            return Ok(n);
        }
        n += 1;
        tpow *= t;
        if n > MAX_AUTO_TRUNCATION {
            return Err(Error::TruncationTooShort {
                tail: scalar_tail_bound(t, n, tpow).to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
                required: n,
            });
        }
    }
}

/// One pure block of the bosonic channel output on {|0,n⟩, |1,n+1⟩}.
#[derive(Clone, Debug)]
pub struct ScalarBlock<T> {
    pub mode: usize,
    /// Pₙ = tanh²ⁿr/cosh²r · Θₙ.
    pub weight: T,
    /// Θₙ = cos²θ + (n+1)sin²θ/cosh²r, the squared norm of the raw pair.
    pub norm_sq: T,
    /// Normalized amplitudes Φₙ on the block basis.
    pub amps: [Complex<T>; 2],
    pub d_weight_dtheta: T,
    pub d_amps_dtheta: [Complex<T>; 2],
    pub d_amps_dphi: [Complex<T>; 2],
}

/// Exact (up to certified truncation) bosonic channel output as a direct sum
/// of weighted pure blocks, with analytic θ- and φ-derivatives attached.
#[derive(Clone, Debug)]
pub struct ScalarBlockState<T> {
    pub theta: T,
    pub phi: T,
    pub r: T,
    pub blocks: Vec<ScalarBlock<T>>,
    /// Upper bound on the weight left above the truncation.
    pub tail_bound: T,
}

impl<T: Real> ScalarBlockState<T> {
    pub fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Rob-mode dimension of the embedding: modes 0..=n_max+1.
    pub fn rob_dim(&self) -> usize {
        self.n_max() + 2
    }

    /// Dimension of the embedded joint matrix, 2·(n_max+2).
    pub fn dim(&self) -> usize {
        2 * self.rob_dim()
    }

    pub fn total_weight(&self) -> T {
        self.blocks.iter().map(|b| b.weight).sum()
    }

    /// Global indices of the block basis pair {|0,n⟩, |1,n+1⟩}.
    pub fn block_basis(&self, n: usize) -> (usize, usize) {
        (n, self.rob_dim() + n + 1)
    }

    /// Block amplitudes embedded as joint-space vectors.
    pub fn embedded_vector(&self, n: usize) -> CVector<T> {
        let mut v = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        let (i0, i1) = self.block_basis(n);
        v[i0] = self.blocks[n].amps[0];
        v[i1] = self.blocks[n].amps[1];
        v
    }

    /// Embedded derivative of the block amplitudes.
    pub fn embedded_vector_derivative(&self, n: usize, param: Parameter) -> CVector<T> {
        let mut v = vec![Complex::new(T::zero(), T::zero()); self.dim()];
        let (i0, i1) = self.block_basis(n);
        let d = match param {
            Parameter::Theta => &self.blocks[n].d_amps_dtheta,
            Parameter::Phi => &self.blocks[n].d_amps_dphi,
        };
        v[i0] = d[0];
        v[i1] = d[1];
        v
    }

    /// Embed the block mixture as a density matrix on (qubit) ⊗ (Rob mode).
    pub fn as_matrix(&self) -> Result<DensityOperator<T>> {
        let dim = self.dim();
        if dim > MAX_EMBED_DIM {
            return Err(Error::Domain(format!(
                "embedding dimension {dim} exceeds the dense ceiling {MAX_EMBED_DIM}; \
                 use the block or series routes at this acceleration"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim);
        for (n, b) in self.blocks.iter().enumerate() {
            let (i0, i1) = self.block_basis(n);
            let w = Complex::new(b.weight, T::zero());
            m.set(i0, i0, w * b.amps[0] * b.amps[0].conj());
            m.set(i1, i1, w * b.amps[1] * b.amps[1].conj());
            let off = w * b.amps[0] * b.amps[1].conj();
            m.set(i0, i1, off);
            m.set(i1, i0, off.conj());
        }
        DensityOperator::new(m)
    }

    /// Analytic parameter derivative of [`Self::as_matrix`].
    pub fn derivative_matrix(&self, param: Parameter) -> Result<ComplexMatrix<T>> {
        let dim = self.dim();
        if dim > MAX_EMBED_DIM {
            return Err(Error::Domain(format!(
                "embedding dimension {dim} exceeds the dense ceiling {MAX_EMBED_DIM}"
            )));
        }
        let zero = T::zero();
        let mut m = ComplexMatrix::zeros(dim);
        for (n, b) in self.blocks.iter().enumerate() {
            let (i0, i1) = self.block_basis(n);
            let w = Complex::new(b.weight, zero);
            let dw = Complex::new(
                match param {
                    Parameter::Theta => b.d_weight_dtheta,
                    Parameter::Phi => zero,
                },
                zero,
            );
            let da = match param {
                Parameter::Theta => &b.d_amps_dtheta,
                Parameter::Phi => &b.d_amps_dphi,
            };
            let (a0, a1) = (b.amps[0], b.amps[1]);
            let e00 = dw * a0 * a0.conj() + w * (da[0] * a0.conj() + a0 * da[0].conj());
            let e11 = dw * a1 * a1.conj() + w * (da[1] * a1.conj() + a1 * da[1].conj());
            let e01 = dw * a0 * a1.conj() + w * (da[0] * a1.conj() + a0 * da[1].conj());
            m.set(i0, i0, e00);
            m.set(i1, i1, e11);
            m.set(i0, i1, e01);
            m.set(i1, i0, e01.conj());
        }
        Ok(m)
    }
}

/// Dense embeddings above this dimension are refused (≈ 3 GB of matrices).
const MAX_EMBED_DIM: usize = 10_000;

/// Bosonic channel output with certified truncation.
///
/// With `n_max = None` the truncation is sized from the closed-form tail of
/// Σ(n+1)tⁿ so that the dropped weight stays below `tail_tol`; an explicit
/// `n_max` that leaves more mass than that is rejected with the required
/// size.
pub fn scalar_channel_with_tol<T: Real>(
    p: &InputParams<T>,
    r: T,
    n_max: Option<usize>,
    tail_tol: T,
) -> Result<ScalarBlockState<T>> {
    ChannelParams::new(FieldKind::Scalar, r, n_max)?;
    if !(tail_tol > T::zero()) {
        return Err(Error::Domain(
            "truncation tolerance must be positive".into(),
        ));
    }
    let t = r.tanh() * r.tanh();
    let auto = scalar_auto_n_max(t, tail_tol)?;
    let n_max = match n_max {
        Some(n) => {
            if n < auto {
                let tpow = t.powi(n as i32 + 1);
                return Err(Error::TruncationTooShort {
                    tail: scalar_tail_bound(t, n, tpow).to_f64().unwrap_or(f64::NAN),
                    tol: tail_tol.to_f64().unwrap_or(f64::NAN),
                    required: auto,
                });
            }
            n
        }
        None => auto,
    };

    let ch = r.cosh();
    let inv_ch2 = (ch * ch).recip();
    let sin_t = p.theta.sin();
    let cos_t = p.theta.cos();
    let s2 = sin_t * sin_t;
    let c2 = cos_t * cos_t;
    let sin_2t = (T::of(2.0) * p.theta).sin();
    let phase = Complex::from_polar(T::one(), p.phi);
    let half = T::of(0.5);

    let mut blocks = Vec::with_capacity(n_max + 1);
    let mut tpow = T::one();
    for n in 0..=n_max {
        let np1 = T::of((n + 1) as f64);
        let norm_sq = c2 + np1 * s2 * inv_ch2;
        let root = norm_sq.sqrt();
        let weight = tpow * inv_ch2 * norm_sq;
        let d_norm_sq = sin_2t * (np1 * inv_ch2 - T::one());
        let d_weight_dtheta = tpow * inv_ch2 * d_norm_sq;

        let raw1 = np1.sqrt() * sin_t / ch;
        let a0 = Complex::new(cos_t / root, T::zero());
        let a1 = phase * Complex::new(raw1 / root, T::zero());

        // ∂(x/√Θ) = x'/√Θ − x·∂Θ/(2Θ^{3/2}); the second factor reuses
        // ∂√Θ = ∂Θ/(2√Θ) to stay stable as Θ shrinks
        let shrink = d_norm_sq * half / (norm_sq * root);
        let d0 = Complex::new(-sin_t / root - cos_t * shrink, T::zero());
        let d1 = phase * Complex::new(np1.sqrt() * cos_t / (ch * root) - raw1 * shrink, T::zero());
        let d_phi1 = a1 * Complex::new(T::zero(), T::one());

        blocks.push(ScalarBlock {
            mode: n,
            weight,
            norm_sq,
            amps: [a0, a1],
            d_weight_dtheta,
            d_amps_dtheta: [d0, d1],
            d_amps_dphi: [Complex::new(T::zero(), T::zero()), d_phi1],
        });
        tpow *= t;
    }
    let tail_bound = scalar_tail_bound(t, n_max, tpow);
    Ok(ScalarBlockState {
        theta: p.theta,
        phi: p.phi,
        r,
        blocks,
        tail_bound,
    })
}

/// [`scalar_channel_with_tol`] at the default tail tolerance.
pub fn scalar_channel<T: Real>(
    p: &InputParams<T>,
    r: T,
    n_max: Option<usize>,
) -> Result<ScalarBlockState<T>> {
    scalar_channel_with_tol(p, r, n_max, T::TAIL_TOL)
}

/// Fermionic channel output: the 4×4 joint state of Alice and Rob.
pub fn dirac_channel<T: Real>(p: &InputParams<T>, r: T) -> Result<DensityOperator<T>> {
    ChannelParams::new(FieldKind::Dirac, r, None)?;
    let (sr, cr) = (r.sin(), r.cos());
    let (st, ct) = (p.theta.sin(), p.theta.cos());
    let sin_2t = (T::of(2.0) * p.theta).sin();
    let mut m = ComplexMatrix::zeros(4);
    m.set(0, 0, Complex::new(cr * cr * ct * ct, T::zero()));
    m.set(1, 1, Complex::new(sr * sr * ct * ct, T::zero()));
    m.set(3, 3, Complex::new(st * st, T::zero()));
    let off = Complex::from_polar(T::of(0.5) * cr * sin_2t, -p.phi);
    m.set(0, 3, off);
    m.set(3, 0, off.conj());
    DensityOperator::new(m)
}

/// Analytic parameter derivative of [`dirac_channel`].
pub fn dirac_channel_derivative<T: Real>(
    p: &InputParams<T>,
    r: T,
    param: Parameter,
) -> Result<ComplexMatrix<T>> {
    ChannelParams::new(FieldKind::Dirac, r, None)?;
    let (sr, cr) = (r.sin(), r.cos());
    let two_t = T::of(2.0) * p.theta;
    let mut m = ComplexMatrix::zeros(4);
    match param {
        Parameter::Theta => {
            let sin_2t = two_t.sin();
            let cos_2t = two_t.cos();
            m.set(0, 0, Complex::new(-cr * cr * sin_2t, T::zero()));
            m.set(1, 1, Complex::new(-sr * sr * sin_2t, T::zero()));
            m.set(3, 3, Complex::new(sin_2t, T::zero()));
            let off = Complex::from_polar(cr * cos_2t, -p.phi);
            m.set(0, 3, off);
            m.set(3, 0, off.conj());
        }
        Parameter::Phi => {
            let off = Complex::from_polar(T::of(0.5) * cr * two_t.sin(), -p.phi)
                * Complex::new(T::zero(), -T::one());
            m.set(0, 3, off);
            m.set(3, 0, off.conj());
        }
    }
    Ok(m)
}

/// Nonzero eigenpairs of the Dirac channel output, with analytic derivatives.
#[derive(Clone, Debug)]
pub struct DiracEigensystem<T> {
    /// λ₁ = 1 − sin²r·cos²θ and λ₂ = sin²r·cos²θ.
    pub probabilities: [T; 2],
    /// Φ₁ ∝ (e^{−iφ}cos r·cotθ, 0, 0, 1) and Φ₂ = |01⟩, both normalized.
    pub vectors: [CVector<T>; 2],
    pub d_probabilities_dtheta: [T; 2],
    pub d_vectors_dtheta: [CVector<T>; 2],
    pub d_vectors_dphi: [CVector<T>; 2],
}

impl<T: Real> DiracEigensystem<T> {
    pub fn d_probabilities(&self, param: Parameter) -> [T; 2] {
        match param {
            Parameter::Theta => self.d_probabilities_dtheta,
            Parameter::Phi => [T::zero(); 2],
        }
    }

    pub fn d_vectors(&self, param: Parameter) -> &[CVector<T>; 2] {
        match param {
            Parameter::Theta => &self.d_vectors_dtheta,
            Parameter::Phi => &self.d_vectors_dphi,
        }
    }
}

/// Closed-form eigensystem of [`dirac_channel`]; needs θ in the open
/// interval (0, π/2) where cot θ is finite and the state has rank two.
pub fn dirac_eigensystem<T: Real>(p: &InputParams<T>, r: T) -> Result<DiracEigensystem<T>> {
    ChannelParams::new(FieldKind::Dirac, r, None)?;
    if !(p.theta > T::zero() && p.theta < T::FRAC_PI_2()) {
        return Err(Error::Domain(
            "eigensystem parameterization degenerates at theta in {0, pi/2}; \
             use the matrix route there"
                .into(),
        ));
    }
    let zero = T::zero();
    let czero = Complex::new(zero, zero);
    let (sr, cr) = (r.sin(), r.cos());
    let (st, ct) = (p.theta.sin(), p.theta.cos());
    let lam2 = sr * sr * ct * ct;
    let lam1 = T::one() - lam2;
    let dlam = sr * sr * (T::of(2.0) * p.theta).sin();

    let cot = ct / st;
    let csc2 = (st * st).recip();
    let n = T::one() + cr * cr * cot * cot;
    let root = n.sqrt();
    let phase = Complex::from_polar(T::one(), -p.phi);

    let v1 = vec![
        phase * Complex::new(cr * cot / root, zero),
        czero,
        czero,
        Complex::new(root.recip(), zero),
    ];
    let n32 = n * root;
    let dv1_dtheta = vec![
        phase * Complex::new(-cr * csc2 / n32, zero),
        czero,
        czero,
        Complex::new(cr * cr * cot * csc2 / n32, zero),
    ];
    let dv1_dphi = vec![
        phase * Complex::new(zero, -cr * cot / root),
        czero,
        czero,
        czero,
    ];
    let v2 = vec![czero, Complex::new(T::one(), zero), czero, czero];
    let zeros4 = vec![czero; 4];

    Ok(DiracEigensystem {
        probabilities: [lam1, lam2],
        vectors: [v1, v2],
        d_probabilities_dtheta: [dlam, -dlam],
        d_vectors_dtheta: [dv1_dtheta, zeros4.clone()],
        d_vectors_dphi: [dv1_dphi, zeros4],
    })
}

/// Which half of the joint state a reduction keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Rob,
}

/// Trace out one party of a (2 × d/2) joint state.
pub fn reduced_state<T: Real>(rho: &DensityOperator<T>, keep: Party) -> Result<DensityOperator<T>> {
    let dim = rho.dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "joint dimension {dim} is not 2 × d"
        )));
    }
    let dims = (2, dim / 2);
    match keep {
        Party::Alice => partial_trace(rho, dims, Subsystem::A),
        Party::Rob => partial_trace(rho, dims, Subsystem::B),
    }
}

/// Channel output for either field as a dense density operator.
pub fn channel_state<T: Real>(
    channel: &ChannelParams<T>,
    input: &InputParams<T>,
) -> Result<DensityOperator<T>> {
    match channel.field {
        FieldKind::Scalar => scalar_channel(input, channel.r, channel.n_max)?.as_matrix(),
        FieldKind::Dirac => dirac_channel(input, channel.r),
    }
}

/// Analytic parameter derivative matching [`channel_state`].
pub fn channel_state_derivative<T: Real>(
    channel: &ChannelParams<T>,
    input: &InputParams<T>,
    param: Parameter,
) -> Result<ComplexMatrix<T>> {
    match channel.field {
        FieldKind::Scalar => {
            scalar_channel(input, channel.r, channel.n_max)?.derivative_matrix(param)
        }
        FieldKind::Dirac => dirac_channel_derivative(input, channel.r, param),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, inner, norm_sq};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn input(theta: f64, phi: f64) -> InputParams<f64> {
        InputParams::new(theta, phi).unwrap()
    }

    #[test]
    fn initial_state_matches_hand_values() {
        let v = initial_state(&input(0.0, 1.0));
        assert!((v[0].re - 1.0).abs() < 1e-15 && norm_sq(&v[1..]) < 1e-30);

        let bell = initial_state(&input(FRAC_PI_4, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bell[0].re - s).abs() < 1e-15 && (bell[3].re - s).abs() < 1e-15);

        let v = initial_state(&input(FRAC_PI_3, FRAC_PI_2));
        assert!((v[0].re - 0.5).abs() < 1e-15);
        assert!(v[3].re.abs() < 1e-15 && (v[3].im - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn input_params_reject_out_of_range_angles() {
        assert!(InputParams::new(-0.1, 0.0).is_err());
        assert!(InputParams::new(FRAC_PI_2 + 0.1, 0.0).is_err());
        assert!(InputParams::new(0.3, -1.0).is_err());
        assert!(InputParams::new(0.3, 7.0).is_err());
        assert!(InputParams::with_wrapped_phi(0.3, -1.0).is_ok());
    }

    #[test]
    fn acceleration_mapping_limits() {
        // dirac: vanishing acceleration (ratio → ∞) gives r → 0
        let r: f64 = r_from_acceleration(FieldKind::Dirac, 50.0).unwrap();
        assert!(r.abs() < 1e-12);
        // dirac: infinite acceleration (ratio → 0) approaches π/4
        let r = r_from_acceleration(FieldKind::Dirac, 0.0).unwrap();
        assert!((r - FRAC_PI_4).abs() < 1e-12);
        let r = r_from_acceleration(FieldKind::Dirac, 1e-6).unwrap();
        assert!(r < FRAC_PI_4);
        // scalar: weak acceleration (ratio → ∞) gives r → 0
        let r: f64 = r_from_acceleration(FieldKind::Scalar, 50.0).unwrap();
        assert!(r.abs() < 1e-12);
        assert!(r_from_acceleration::<f64>(FieldKind::Scalar, 0.0).is_err());
    }

    #[test]
    fn vacuum_expansion_amplitudes() {
        let v = bogoliubov_vacuum(FieldKind::Scalar, 0.0, None).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0], ((0, 0), 1.0));

        let v = bogoliubov_vacuum(FieldKind::Dirac, FRAC_PI_6, None).unwrap();
        assert!((v[0].1 - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((v[1].1 - 0.5).abs() < 1e-15);

        let v = bogoliubov_vacuum(FieldKind::Scalar, 0.8, None).unwrap();
        let deficit = 1.0 - v.iter().map(|&(_, a)| a * a).sum::<f64>();
        assert!(deficit.abs() <= 1e-12, "norm deficit {deficit}");
    }

    #[test]
    fn scalar_channel_at_rest_is_identity() {
        let p = input(0.7, 1.3);
        let s = scalar_channel(&p, 0.0, None).unwrap();
        assert_eq!(s.blocks.len(), 1);
        let b = &s.blocks[0];
        assert!((b.weight - 1.0).abs() < 1e-15);
        assert!((b.amps[0].re - 0.7f64.cos()).abs() < 1e-15);
        let expect = num_complex::Complex::from_polar(0.7f64.sin(), 1.3);
        assert!((b.amps[1] - expect).norm() < 1e-15);
    }

    #[test]
    fn scalar_channel_of_vacuum_input_gives_thermal_weights() {
        let s = scalar_channel(&input(0.0, 0.0), 0.9, None).unwrap();
        let ch2 = 0.9f64.cosh().powi(2);
        let t = 0.9f64.tanh().powi(2);
        for (n, b) in s.blocks.iter().enumerate() {
            assert!((b.amps[0].re - 1.0).abs() < 1e-14);
            assert!(b.amps[1].norm() < 1e-14);
            assert!((b.weight - t.powi(n as i32) / ch2).abs() < 1e-14);
        }
    }

    #[test]
    fn scalar_blocks_satisfy_weight_identities_and_normalization() {
        let s = scalar_channel(&input(FRAC_PI_4, 0.4), 1.0, None).unwrap();
        let ch = 1.0f64.cosh();
        let (ch2, t) = (ch * ch, 1.0f64.tanh().powi(2));
        // identity P_n = tanh²ⁿr/cosh²r·Θ_n, unit amplitude norm
        let mut tpow = 1.0;
        for b in &s.blocks {
            assert!((b.weight - tpow / ch2 * b.norm_sq).abs() < 1e-12);
            assert!((norm_sq(&b.amps) - 1.0).abs() < 1e-12);
            tpow *= t;
        }
        // total mass against the closed sums Σtⁿ = cosh²r, Σ(n+1)tⁿ = cosh⁴r
        let total = s.total_weight();
        assert!((total - 1.0).abs() <= 1e-12, "mass {total}");
        assert!(total + s.tail_bound >= 1.0 - 1e-12);
        let (mut s0, mut s1, mut tp) = (0.0, 0.0, 1.0);
        for n in 0..s.blocks.len() {
            s0 += tp;
            s1 += (n as f64 + 1.0) * tp;
            tp *= t;
        }
        let from_sums = (0.5 * s0 + 0.5 * s1 / ch2) / ch2; // θ = π/4
        assert!((total - from_sums).abs() < 1e-12);
        assert!((s0 - ch2).abs() < 1e-9 * ch2);
        assert!((s1 - ch2 * ch2).abs() < 1e-8 * ch2 * ch2);
    }

    #[test]
    fn scalar_channel_rejects_undersized_truncation() {
        match scalar_channel(&input(FRAC_PI_4, 0.0), 1.5, Some(3)) {
            Err(crate::Error::TruncationTooShort { required, .. }) => assert!(required > 3),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn scalar_block_tangents_are_orthogonal_to_blocks() {
        let s = scalar_channel(&input(1.1, 2.2), 0.8, None).unwrap();
        for b in &s.blocks {
            let g = inner(&b.amps, &b.d_amps_dtheta);
            assert!(g.norm() < 1e-12, "⟨Φ|∂θΦ⟩ = {g}");
        }
    }

    #[test]
    fn scalar_analytic_derivatives_match_finite_differences() {
        let h = 1e-6;
        let (theta, phi, r) = (0.9, 0.6, 0.7);
        let s = scalar_channel(&input(theta, phi), r, None).unwrap();
        let plus = scalar_channel(&input(theta + h, phi), r, Some(s.n_max())).unwrap();
        let minus = scalar_channel(&input(theta - h, phi), r, Some(s.n_max())).unwrap();
        for n in 0..=s.n_max() {
            for k in 0..2 {
                let fd = (plus.blocks[n].amps[k] - minus.blocks[n].amps[k]) / (2.0 * h);
                assert!((fd - s.blocks[n].d_amps_dtheta[k]).norm() < 1e-8);
            }
            let fdw = (plus.blocks[n].weight - minus.blocks[n].weight) / (2.0 * h);
            assert!((fdw - s.blocks[n].d_weight_dtheta).abs() < 1e-8);
        }
        let plus = scalar_channel(&input(theta, phi + h), r, Some(s.n_max())).unwrap();
        let minus = scalar_channel(&input(theta, phi - h), r, Some(s.n_max())).unwrap();
        for n in 0..=s.n_max() {
            for k in 0..2 {
                let fd = (plus.blocks[n].amps[k] - minus.blocks[n].amps[k]) / (2.0 * h);
                assert!((fd - s.blocks[n].d_amps_dphi[k]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn embedded_matrix_spectrum_equals_block_weights() {
        let s = scalar_channel(&input(FRAC_PI_4, 0.3), 0.6, None).unwrap();
        let rho = s.as_matrix().unwrap();
        let spec = eig_hermitian(rho.matrix()).unwrap();
        let mut weights: Vec<f64> = s.blocks.iter().map(|b| b.weight).collect();
        weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (i, w) in weights.iter().enumerate() {
            assert!((spec.eigenvalues[i] - w).abs() < 1e-12);
        }
        for ev in &spec.eigenvalues[weights.len()..] {
            assert!(ev.abs() < 1e-12);
        }
    }

    #[test]
    fn embedded_matrix_at_rest_is_the_input_projector() {
        let p = input(0.8, 0.5);
        let rho = scalar_channel(&p, 0.0, None).unwrap().as_matrix().unwrap();
        // dim 4 = 2 modes for Rob; input |Ψ⟩ lives on {|0,0⟩, |1,1⟩}
        let psi = initial_state(&p);
        let psi_embedded = vec![
            psi[0],
            num_complex::Complex::new(0.0, 0.0),
            num_complex::Complex::new(0.0, 0.0),
            psi[3],
        ];
        let proj = crate::linalg::outer(&psi_embedded, &psi_embedded);
        assert!(rho.matrix().max_abs_diff(&proj) < 1e-12);
    }

    #[test]
    fn dirac_channel_matches_displayed_entries() {
        let (theta, phi, r) = (FRAC_PI_3, 0.7, 0.5);
        let rho = dirac_channel(&input(theta, phi), r).unwrap();
        let m = rho.matrix();
        assert!((m.get(0, 0).re - r.cos().powi(2) * theta.cos().powi(2)).abs() < 1e-15);
        assert!((m.get(1, 1).re - r.sin().powi(2) * theta.cos().powi(2)).abs() < 1e-15);
        assert!((m.get(3, 3).re - theta.sin().powi(2)).abs() < 1e-15);
        let off = num_complex::Complex::from_polar(0.5 * r.cos() * (2.0 * theta).sin(), -phi);
        assert!((m.get(0, 3) - off).norm() < 1e-15);
        assert!(m.get(2, 2).norm() < 1e-15);
        assert!((m.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dirac_channel_at_rest_is_identity_and_vacuum_input_is_thermal() {
        let p = input(0.9, 1.7);
        let rho = dirac_channel(&p, 0.0).unwrap();
        let psi = initial_state(&p);
        let proj = crate::linalg::outer(&psi, &psi);
        assert!(rho.matrix().max_abs_diff(&proj) < 1e-12);

        let rho = dirac_channel(&input(0.0, 0.0), 0.6).unwrap();
        let expect =
            ComplexMatrix::from_diag(&[0.6f64.cos().powi(2), 0.6f64.sin().powi(2), 0.0, 0.0]);
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn dirac_channel_rejects_out_of_range_acceleration() {
        assert!(dirac_channel(&input(0.3, 0.0), FRAC_PI_4).is_err());
        assert!(dirac_channel(&input(0.3, 0.0), -0.1).is_err());
    }

    #[test]
    fn dirac_eigenvalues_at_quarter_pi_sixth() {
        let rho = dirac_channel(&input(FRAC_PI_4, 0.0), FRAC_PI_6).unwrap();
        let spec = eig_hermitian(rho.matrix()).unwrap();
        assert!((spec.eigenvalues[0] - 0.875).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 0.125).abs() < 1e-12);
        assert!(spec.eigenvalues[2].abs() < 1e-12);
        assert!(spec.eigenvalues[3].abs() < 1e-12);
    }

    #[test]
    fn dirac_eigensystem_matches_matrix_route() {
        for &(theta, phi, r) in &[(FRAC_PI_3, 0.7, 0.5), (0.3, 5.1, 0.72), (1.4, 2.0, 0.05)] {
            let p = input(theta, phi);
            let sys = dirac_eigensystem(&p, r).unwrap();
            assert!((sys.probabilities[0] + sys.probabilities[1] - 1.0).abs() < 1e-14);
            assert!(inner(&sys.vectors[0], &sys.vectors[1]).norm() < 1e-15);
            assert!((norm_sq(&sys.vectors[0]) - 1.0).abs() < 1e-14);

            let rho = dirac_channel(&p, r).unwrap();
            // eigen-route agreement on the nonzero spectrum
            let spec = eig_hermitian(rho.matrix()).unwrap();
            let mut probs = sys.probabilities;
            probs.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert!((spec.eigenvalues[0] - probs[0]).abs() < 1e-10);
            assert!((spec.eigenvalues[1] - probs[1]).abs() < 1e-10);
            // and ρ·Φᵢ = λᵢΦᵢ directly
            for k in 0..2 {
                let image = rho.matrix().mul_vec(&sys.vectors[k]);
                let scaled: Vec<_> = sys.vectors[k]
                    .iter()
                    .map(|&a| a * num_complex::Complex::new(sys.probabilities[k], 0.0))
                    .collect();
                let diff: f64 = image
                    .iter()
                    .zip(&scaled)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(diff < 1e-12);
            }
        }
    }

    #[test]
    fn dirac_eigensystem_at_rest_is_the_input_projector() {
        let p = input(0.9, 1.3);
        let sys = dirac_eigensystem(&p, 0.0).unwrap();
        assert!((sys.probabilities[0] - 1.0).abs() < 1e-15);
        assert!(sys.probabilities[1].abs() < 1e-15);
        // Φ₁ equals the input state up to the global phase convention
        let overlap = inner(&sys.vectors[0], &initial_state(&p)).norm();
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn block_pure_qfi_matches_its_closed_expression() {
        // per-block weight QFI: Θ_n·F_pure = 4Λ_n − (∂θΘ_n)²/Θ_n with
        // Λ_n = sin²θ + (n+1)cos²θ/cosh²r, cross-checked against the
        // spectral route on the bare 2×2 block
        let (theta, r) = (0.85f64, 0.9);
        let s = scalar_channel(&input(theta, 0.4), r, None).unwrap();
        let ch2 = r.cosh().powi(2);
        for b in s.blocks.iter().take(6) {
            let f_pure = crate::qfi::qfi_pure(&b.amps, &b.d_amps_dtheta).unwrap();
            let np1 = (b.mode + 1) as f64;
            let tangent = theta.sin().powi(2) + np1 * theta.cos().powi(2) / ch2;
            let d_norm = (2.0 * theta).sin() * (np1 / ch2 - 1.0);
            let expect = (4.0 * tangent - d_norm * d_norm / b.norm_sq) / b.norm_sq;
            assert!((f_pure - expect).abs() < 1e-12);

            let rho = crate::linalg::DensityOperator::from_pure(&b.amps).unwrap();
            let drho = crate::linalg::outer(&b.d_amps_dtheta, &b.amps)
                .add(&crate::linalg::outer(&b.amps, &b.d_amps_dtheta));
            let f_spec = crate::qfi::qfi_spectral(&rho, &drho, 1e-12).unwrap();
            assert!((f_pure - f_spec).abs() < 1e-11);
        }
    }

    #[test]
    fn dirac_eigensystem_second_vector_at_example_point() {
        let sys = dirac_eigensystem(&input(FRAC_PI_4, 0.0), FRAC_PI_6).unwrap();
        assert!((sys.probabilities[1] - 0.125).abs() < 1e-15);
        assert!((sys.vectors[1][1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dirac_eigensystem_rejects_degenerate_angles() {
        assert!(dirac_eigensystem(&input(0.0, 0.0), 0.3).is_err());
        assert!(dirac_eigensystem(&input(FRAC_PI_2, 0.0), 0.3).is_err());
    }

    #[test]
    fn dirac_eigensystem_derivatives_match_finite_differences() {
        let (theta, phi, r) = (0.8, 0.9, 0.6);
        let h = 1e-6;
        let sys = dirac_eigensystem(&input(theta, phi), r).unwrap();
        let tp = dirac_eigensystem(&input(theta + h, phi), r).unwrap();
        let tm = dirac_eigensystem(&input(theta - h, phi), r).unwrap();
        for k in 0..2 {
            let fd = (tp.probabilities[k] - tm.probabilities[k]) / (2.0 * h);
            assert!((fd - sys.d_probabilities_dtheta[k]).abs() < 1e-8);
            for i in 0..4 {
                let fd = (tp.vectors[k][i] - tm.vectors[k][i]) / (2.0 * h);
                assert!((fd - sys.d_vectors_dtheta[k][i]).norm() < 1e-7);
            }
        }
        let pp = dirac_eigensystem(&input(theta, phi + h), r).unwrap();
        let pm = dirac_eigensystem(&input(theta, phi - h), r).unwrap();
        for k in 0..2 {
            for i in 0..4 {
                let fd = (pp.vectors[k][i] - pm.vectors[k][i]) / (2.0 * h);
                assert!((fd - sys.d_vectors_dphi[k][i]).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn reduced_states_match_hand_partial_traces() {
        let (theta, r) = (FRAC_PI_4, FRAC_PI_6);
        let rho = dirac_channel(&input(theta, 0.9), r).unwrap();
        let alice = reduced_state(&rho, Party::Alice).unwrap();
        let expect = ComplexMatrix::from_diag(&[theta.cos().powi(2), theta.sin().powi(2)]);
        assert!(alice.matrix().max_abs_diff(&expect) < 1e-14);

        let rob = reduced_state(&rho, Party::Rob).unwrap();
        let p = r.cos().powi(2) * theta.cos().powi(2);
        assert!((p - 0.375).abs() < 1e-15);
        let expect = ComplexMatrix::from_diag(&[p, 1.0 - p]);
        assert!(rob.matrix().max_abs_diff(&expect) < 1e-14);

        // at rest both reductions are the input marginals
        let rho = dirac_channel(&input(0.7, 0.0), 0.0).unwrap();
        let rob = reduced_state(&rho, Party::Rob).unwrap();
        let expect = ComplexMatrix::from_diag(&[0.7f64.cos().powi(2), 0.7f64.sin().powi(2)]);
        assert!(rob.matrix().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn scalar_channel_works_in_single_precision() {
        let p = InputParams::<f32>::new(0.7, 0.4).unwrap();
        let s = scalar_channel(&p, 0.5f32, None).unwrap();
        assert!((s.total_weight() - 1.0).abs() < 1e-5);
    }
}
