//! General quantum Fisher information engines.
//!
//! For a state ρ_λ with eigendecomposition ρ = Σ pᵢ|ψᵢ⟩⟨ψᵢ| the QFI of λ is
//! computed along several routes that must agree:
//!
//! * SLD route: F = Tr(ρ L²) with the symmetric logarithmic derivative L
//!   solving ∂ρ = (ρL + Lρ)/2;
//! * spectral route: F = 2 Σ_{m,n} |⟨ψₘ|∂ρ|ψₙ⟩|²/(pₘ+pₙ) over pairs with
//!   pₘ+pₙ above a support cutoff;
//! * support route: F = Σ (pᵢ')²/pᵢ + Σ 4pᵢ(⟨ψᵢ'|ψᵢ'⟩−|⟨ψᵢ|ψᵢ'⟩|²)
//!   − Σ_{i≠j} 8pᵢpⱼ/(pᵢ+pⱼ)|⟨ψᵢ|ψⱼ'⟩|², split into classical, averaged
//!   pure-state and mixing contributions;
//! * Bures route: d²_B(ρ_λ, ρ_{λ+dλ}) = F dλ²/4 with
//!   d_B(ρ,σ) = √(2(1 − Tr√(ρ^{1/2}σρ^{1/2}))).
//!
//! Spectral machinery runs per connected component of the state's nonzero
//! pattern, so block direct sums stay cheap.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    component_eig, inner, norm, CVector, ComplexMatrix, ComponentSpectrum, DensityOperator,
    MatrixScan,
};
use crate::real::Real;

/// The three contributions of the support-restricted QFI formula.
#[derive(Clone, Copy, Debug)]
pub struct QfiBreakdown<T> {
    pub total: T,
    /// Σ (pᵢ')²/pᵢ — Fisher information of the eigenvalue distribution.
    pub classical: T,
    /// Σ 4pᵢ(⟨ψᵢ'|ψᵢ'⟩ − |⟨ψᵢ|ψᵢ'⟩|²) — weighted pure-state QFI.
    pub quantum_avg: T,
    /// −Σ_{i≠j} 8pᵢpⱼ/(pᵢ+pⱼ)|⟨ψᵢ|ψⱼ'⟩|² — loss from mixing, never positive.
    pub mixing: T,
}

/// Result of the Bures finite-difference route.
#[derive(Clone, Copy, Debug)]
pub struct BuresQfi<T> {
    pub value: T,
    /// Set when the support dimension differs across the stencil; the
    /// quadratic Bures expansion is unreliable at rank-changing points.
    pub rank_changed: bool,
}

fn check_derivative<T: Real>(drho: &ComplexMatrix<T>) -> Result<MatrixScan<T>> {
    let scan = drho.scan();
    scan.check_hermitian()?;
    let tr = scan.trace;
    let defect = (tr.re.powi(2) + tr.im.powi(2)).sqrt();
    // central differences of unit-trace states at step h carry trace noise
    // of order ε/2h (≈ 1.1e-10 at h = 1e-6), so the gate sits one decade
    // above the analytic tolerance; genuine sign errors arrive at O(1)
    let tol = T::of(10.0) * T::TRACE_TOL * T::one().max(scan.max_abs);
    if defect > tol {
        return Err(Error::Domain(format!(
            "state derivative is not traceless: |tr| = {:e}",
            defect
        )));
    }
    Ok(scan)
}

/// Matrix elements of `op` between eigenvectors of two components,
/// `out[m][n] = ⟨ψ^α_m| op |ψ^β_n⟩`, given the local block of `op`.
fn local_matrix_elements<T: Real>(
    alpha: &crate::linalg::Component<T>,
    beta: &crate::linalg::Component<T>,
    block: &[Complex<T>], // kα × kβ, row-major, local coordinates
) -> Vec<Complex<T>> {
    let ka = alpha.indices.len();
    let kb = beta.indices.len();
    let zero = Complex::new(T::zero(), T::zero());
    // tmp[i][n] = Σ_j block[i][j] ψ^β_n[j]
    let mut tmp = vec![zero; ka * kb];
    for i in 0..ka {
        for j in 0..kb {
            let v = block[i * kb + j];
            if v.re == T::zero() && v.im == T::zero() {
                continue;
            }
            for n in 0..kb {
                tmp[i * kb + n] += v * beta.eigvecs[n][j];
            }
        }
    }
    let mut out = vec![zero; ka * kb];
    for m in 0..ka {
        for i in 0..ka {
            let w = alpha.eigvecs[m][i].conj();
            if w.re == T::zero() && w.im == T::zero() {
                continue;
            }
            for n in 0..kb {
                out[m * kb + n] += w * tmp[i * kb + n];
            }
        }
    }
    out
}

/// Group nonzero triplets by (row component, column component).
fn blocks_by_component<T: Real>(
    spectrum: &ComponentSpectrum<T>,
    nonzeros: &[(usize, usize, Complex<T>)],
) -> std::collections::BTreeMap<(u32, u32), Vec<Complex<T>>> {
    let mut blocks: std::collections::BTreeMap<(u32, u32), Vec<Complex<T>>> =
        std::collections::BTreeMap::new();
    let zero = Complex::new(T::zero(), T::zero());
    for &(i, j, v) in nonzeros {
        let (ca, la) = spectrum.index_of[i];
        let (cb, lb) = spectrum.index_of[j];
        let ka = spectrum.comps[ca as usize].indices.len();
        let kb = spectrum.comps[cb as usize].indices.len();
        let block = blocks
            .entry((ca, cb))
            .or_insert_with(|| vec![zero; ka * kb]);
        block[la as usize * kb + lb as usize] = v;
    }
    blocks
}

/// Symmetric logarithmic derivative of (ρ, ∂ρ) on the support defined by ε.
///
/// In the eigenbasis of ρ, `L[m][n] = 2(∂ρ)[m][n]/(pₘ+pₙ)` where `pₘ+pₙ > ε`
/// and zero elsewhere; returned in the original basis. If ∂ρ has weight on
/// the orthogonal complement of the support the SLD does not exist and the
/// call fails.
pub fn sld<T: Real>(
    rho: &DensityOperator<T>,
    drho: &ComplexMatrix<T>,
    eps: T,
) -> Result<ComplexMatrix<T>> {
    if rho.dim() != drho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs derivative dim {}",
            rho.dim(),
            drho.dim()
        )));
    }
    let scan = check_derivative(drho)?;
    let spectrum = rho.spectrum();
    let kernel_tol = T::EIG_TOL * T::one().max(scan.max_abs);
    let dim = rho.dim();
    let mut l = ComplexMatrix::zeros(dim);
    let zero = Complex::new(T::zero(), T::zero());
    let two = Complex::new(T::of(2.0), T::zero());

    for ((ca, cb), block) in blocks_by_component(spectrum, &scan.nonzeros) {
        let alpha = &spectrum.comps[ca as usize];
        let beta = &spectrum.comps[cb as usize];
        let (ka, kb) = (alpha.indices.len(), beta.indices.len());
        let elems = local_matrix_elements(alpha, beta, &block);
        // L in the eigenbasis of the pair
        let mut l_eig = vec![zero; ka * kb];
        for m in 0..ka {
            for n in 0..kb {
                let s = alpha.eigvals[m] + beta.eigvals[n];
                let e = elems[m * kb + n];
                if s > eps {
                    l_eig[m * kb + n] = two * e / Complex::new(s, T::zero());
                } else if e.norm_sqr().sqrt() > kernel_tol {
                    return Err(Error::SupportMoved {
                        defect: e.norm_sqr().sqrt().to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        // back to the original basis: Ψα · L_eig · Ψβ†
        let mut half = vec![zero; ka * kb]; // half[i][n] = Σ_m ψα_m[i] L[m][n]
        for m in 0..ka {
            for i in 0..ka {
                let w = alpha.eigvecs[m][i];
                if w.re == T::zero() && w.im == T::zero() {
                    continue;
                }
                for n in 0..kb {
                    half[i * kb + n] += w * l_eig[m * kb + n];
                }
            }
        }
        for i in 0..ka {
            for n in 0..kb {
                let h = half[i * kb + n];
                if h.re == T::zero() && h.im == T::zero() {
                    continue;
                }
                for j in 0..kb {
                    let gi = alpha.indices[i];
                    let gj = beta.indices[j];
                    let add = h * beta.eigvecs[n][j].conj();
                    l.set(gi, gj, l.get(gi, gj) + add);
                }
            }
        }
    }
    // products leave eps-scale asymmetry; return an exactly Hermitian L
    let sym = l
        .add(&l.adjoint())
        .scale(Complex::new(T::of(0.5), T::zero()));
    Ok(sym)
}

/// QFI by the spectral formula 2 Σ |⟨ψₘ|∂ρ|ψₙ⟩|²/(pₘ+pₙ), pairs below the
/// support cutoff dropped.
pub fn qfi_spectral<T: Real>(
    rho: &DensityOperator<T>,
    drho: &ComplexMatrix<T>,
    eps: T,
) -> Result<T> {
    if rho.dim() != drho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs derivative dim {}",
            rho.dim(),
            drho.dim()
        )));
    }
    let scan = check_derivative(drho)?;
    let spectrum = rho.spectrum();
    let kernel_tol = T::EIG_TOL * T::one().max(scan.max_abs);
    let two = T::of(2.0);
    let mut total = T::zero();
    for ((ca, cb), block) in blocks_by_component(spectrum, &scan.nonzeros) {
        let alpha = &spectrum.comps[ca as usize];
        let beta = &spectrum.comps[cb as usize];
        let kb = beta.indices.len();
        let elems = local_matrix_elements(alpha, beta, &block);
        for (m, &pm) in alpha.eigvals.iter().enumerate() {
            for (n, &pn) in beta.eigvals.iter().enumerate() {
                let s = pm + pn;
                let mag2 = elems[m * kb + n].norm_sqr();
                if s > eps {
                    total += two * mag2 / s;
                } else if mag2.sqrt() > kernel_tol {
                    return Err(Error::SupportMoved {
                        defect: mag2.sqrt().to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
    }
    Ok(total)
}

/// QFI of a normalized pure state: 4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²).
pub fn qfi_pure<T: Real>(psi: &[Complex<T>], dpsi: &[Complex<T>]) -> Result<T> {
    if psi.len() != dpsi.len() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs derivative dim {}",
            psi.len(),
            dpsi.len()
        )));
    }
    let defect = (norm(psi) - T::one()).abs();
    if defect > T::EIG_TOL {
        return Err(Error::NotNormalized {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let dd = crate::linalg::norm_sq(dpsi);
    let overlap = inner(psi, dpsi).norm_sqr();
    Ok(T::of(4.0) * (dd - overlap))
}

/// Support-restricted QFI from explicit eigen-data and its derivatives.
///
/// `p` are the nonzero eigenvalues with orthonormal eigenvectors `psis`;
/// `dp` and `dpsis` are their parameter derivatives.
pub fn qfi_support<T: Real>(
    p: &[T],
    psis: &[CVector<T>],
    dp: &[T],
    dpsis: &[CVector<T>],
) -> Result<QfiBreakdown<T>> {
    let m = p.len();
    if psis.len() != m || dp.len() != m || dpsis.len() != m {
        return Err(Error::DimensionMismatch(
            "eigen-data arrays must have equal length".into(),
        ));
    }
    let mut mass = T::zero();
    for &pi in p {
        if pi <= T::zero() {
            return Err(Error::Domain(format!(
                "support weights must be positive, got {pi}"
            )));
        }
        mass += pi;
    }
    if mass > T::one() + T::TRACE_TOL {
        return Err(Error::Domain(format!(
            "support weights sum to {mass}, above one"
        )));
    }
    let mut gram_defect = T::zero();
    for i in 0..m {
        for j in i..m {
            let g = inner(&psis[i], &psis[j]);
            let expect = if i == j { T::one() } else { T::zero() };
            let d = ((g.re - expect).powi(2) + g.im.powi(2)).sqrt();
            gram_defect = gram_defect.max(d);
        }
    }
    if gram_defect > T::EIG_TOL {
        return Err(Error::NotOrthonormal {
            defect: gram_defect.to_f64().unwrap_or(f64::NAN),
        });
    }

    let four = T::of(4.0);
    let eight = T::of(8.0);
    let mut classical = T::zero();
    let mut quantum_avg = T::zero();
    let mut mixing = T::zero();
    for i in 0..m {
        classical += dp[i] * dp[i] / p[i];
        let dd = crate::linalg::norm_sq(&dpsis[i]);
        let overlap = inner(&psis[i], &dpsis[i]).norm_sqr();
        quantum_avg += four * p[i] * (dd - overlap);
        for j in 0..m {
            if i == j {
                continue;
            }
            let cross = inner(&psis[i], &dpsis[j]).norm_sqr();
            mixing -= eight * p[i] * p[j] / (p[i] + p[j]) * cross;
        }
    }
    Ok(QfiBreakdown {
        total: classical + quantum_avg + mixing,
        classical,
        quantum_avg,
        mixing,
    })
}

/// Tr√(ρ^{1/2} σ ρ^{1/2}), computed on the support of ρ.
///
/// With ρ = Vₛ diag(p) Vₛ† restricted to p above rounding dust, the nonzero
/// eigenvalues of ρ^{1/2}σρ^{1/2} equal those of the compressed positive
/// matrix W = diag(√p) Vₛ†σVₛ diag(√p); the kernel of ρ contributes nothing.
fn root_fidelity<T: Real>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<T> {
    let spectrum = rho.spectrum();
    let dust = T::epsilon() * T::of(rho.dim() as f64) * spectrum.max_eigenvalue();
    // support list: (component, local index, weight)
    let mut support: Vec<(usize, usize, T)> = Vec::new();
    for (ci, comp) in spectrum.comps.iter().enumerate() {
        for (ei, &p) in comp.eigvals.iter().enumerate() {
            if p > dust {
                support.push((ci, ei, p));
            }
        }
    }
    let k = support.len();
    let sm = sigma.matrix();
    let zero = Complex::new(T::zero(), T::zero());
    let mut w = ComplexMatrix::zeros(k);
    for u in 0..k {
        let (cu, eu, pu) = support[u];
        let alpha = &spectrum.comps[cu];
        let vu = &alpha.eigvecs[eu];
        for v in u..k {
            let (cv, ev, pv) = support[v];
            let beta = &spectrum.comps[cv];
            let vv = &beta.eigvecs[ev];
            let mut elem = zero;
            for (li, &gi) in alpha.indices.iter().enumerate() {
                let wu = vu[li].conj();
                if wu.re == T::zero() && wu.im == T::zero() {
                    continue;
                }
                for (lj, &gj) in beta.indices.iter().enumerate() {
                    elem += wu * sm.get(gi, gj) * vv[lj];
                }
            }
            let scaled = elem * Complex::new((pu * pv).sqrt(), T::zero());
            w.set(u, v, scaled);
            w.set(v, u, scaled.conj());
        }
    }
    let wspec = component_eig(&w)?;
    let mut acc = T::zero();
    for comp in &wspec.comps {
        for &mu in &comp.eigvals {
            acc += mu.max(T::zero()).sqrt();
        }
    }
    Ok(acc)
}

fn bures_distance_sq<T: Real>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let a = root_fidelity(rho, sigma)?;
    Ok((T::of(2.0) * (T::one() - a)).max(T::zero()))
}

/// Bures distance √(2(1 − Tr√(ρ^{1/2}σρ^{1/2}))).
pub fn bures_distance<T: Real>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<T> {
    Ok(bures_distance_sq(rho, sigma)?.sqrt())
}

/// A one-parameter family of states with an attached derivative policy.
pub struct ParametrizedState<'a, T: Real> {
    rho_fn: Box<dyn Fn(T) -> Result<DensityOperator<T>> + Send + Sync + 'a>,
    drho_fn: Option<Box<dyn Fn(T) -> Result<ComplexMatrix<T>> + Send + Sync + 'a>>,
    fd_step: T,
}

impl<'a, T: Real> ParametrizedState<'a, T> {
    pub fn new(rho_fn: impl Fn(T) -> Result<DensityOperator<T>> + Send + Sync + 'a) -> Self {
        Self {
            rho_fn: Box::new(rho_fn),
            drho_fn: None,
            fd_step: T::of(1e-6),
        }
    }

    /// Attach an analytic derivative; otherwise central differences are used.
    pub fn with_analytic_derivative(
        mut self,
        drho_fn: impl Fn(T) -> Result<ComplexMatrix<T>> + Send + Sync + 'a,
    ) -> Self {
        self.drho_fn = Some(Box::new(drho_fn));
        self
    }

    /// Step of the central-difference fallback (O(h²) error).
    pub fn with_fd_step(mut self, h: T) -> Self {
        self.fd_step = h;
        self
    }

    pub fn rho(&self, lambda: T) -> Result<DensityOperator<T>> {
        (self.rho_fn)(lambda)
    }

    pub fn drho(&self, lambda: T) -> Result<ComplexMatrix<T>> {
        match &self.drho_fn {
            Some(f) => f(lambda),
            None => {
                let h = self.fd_step;
                let plus = self.rho(lambda + h)?;
                let minus = self.rho(lambda - h)?;
                let inv = Complex::new((T::of(2.0) * h).recip(), T::zero());
                Ok(plus.matrix().sub(minus.matrix()).scale(inv))
            }
        }
    }
}

fn support_dim<T: Real>(rho: &DensityOperator<T>) -> Result<usize> {
    let spectrum = rho.spectrum();
    let dust = T::epsilon() * T::of(rho.dim() as f64) * spectrum.max_eigenvalue();
    let cut = dust.max(T::SUPPORT_EPS);
    Ok(spectrum
        .comps
        .iter()
        .flat_map(|c| c.eigvals.iter())
        .filter(|&&p| p > cut)
        .count())
}

/// QFI from the Bures distance over a symmetric stencil,
/// 4 d²_B(ρ(λ−dλ/2), ρ(λ+dλ/2)) / dλ².
///
/// The symmetric stencil cancels the leading odd error term; expect
/// agreement with the spectral route to O(dλ²) plus the numerical floor.
/// A change of support dimension across the stencil sets `rank_changed`.
///
/// The fidelity is normalized by √(Tr ρ · Tr σ): a truncated family whose
/// states miss a trace tail ε would otherwise acquire a spurious 8ε/dλ²
/// offset, far above the distance signal at small dλ.
pub fn qfi_from_bures<T: Real>(
    state: &ParametrizedState<'_, T>,
    lambda: T,
    dlambda: T,
) -> Result<BuresQfi<T>> {
    if dlambda <= T::zero() {
        return Err(Error::Domain("Bures stencil needs dλ > 0".into()));
    }
    let half = dlambda * T::of(0.5);
    let lo = state.rho(lambda - half)?;
    let hi = state.rho(lambda + half)?;
    if lo.dim() != hi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "stencil states have dims {} vs {}",
            lo.dim(),
            hi.dim()
        )));
    }
    let rank_changed = support_dim(&lo)? != support_dim(&hi)?;
    let a = root_fidelity(&lo, &hi)?;
    let norm = (lo.matrix().trace().re * hi.matrix().trace().re).sqrt();
    let d2 = (T::of(2.0) * (T::one() - a / norm)).max(T::zero());
    Ok(BuresQfi {
        value: T::of(4.0) * d2 / (dlambda * dlambda),
        rank_changed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sqrtm_psd;

    type C64 = Complex<f64>;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn inertial_state(theta: f64, phi: f64) -> Vec<C64> {
        vec![
            c(theta.cos(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(phi.cos(), phi.sin()) * c(theta.sin(), 0.0),
        ]
    }

    fn inertial_dtheta(theta: f64, phi: f64) -> Vec<C64> {
        vec![
            c(-theta.sin(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(phi.cos(), phi.sin()) * c(theta.cos(), 0.0),
        ]
    }

    fn inertial_dphi(theta: f64, phi: f64) -> Vec<C64> {
        vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 1.0) * c(phi.cos(), phi.sin()) * c(theta.sin(), 0.0),
        ]
    }

    fn pure_drho(psi: &[C64], dpsi: &[C64]) -> ComplexMatrix<f64> {
        crate::linalg::outer(dpsi, psi).add(&crate::linalg::outer(psi, dpsi))
    }

    fn random_density(dim: usize, seed: u64) -> DensityOperator<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let raw = ComplexMatrix::from_fn(dim, |_, _| {
            c(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            )
        });
        let psd = raw.matmul(&raw.adjoint());
        let tr = psd.trace().re;
        DensityOperator::new(psd.scale(c(1.0 / tr, 0.0))).unwrap()
    }

    #[test]
    fn sld_of_commuting_family_is_diagonal_log_derivative() {
        let lam = 0.3;
        let rho = DensityOperator::new(ComplexMatrix::from_diag(&[lam, 1.0 - lam])).unwrap();
        let drho = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let l = sld(&rho, &drho, 1e-12).unwrap();
        let expect = ComplexMatrix::from_diag(&[1.0 / lam, -1.0 / (1.0 - lam)]);
        assert!(l.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn sld_of_pure_state_with_orthogonal_motion_is_twice_drho() {
        let psi = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let dpsi = vec![c(0.0, 0.0), c(0.7, 0.4)];
        let rho = DensityOperator::from_pure(&psi).unwrap();
        let drho = pure_drho(&psi, &dpsi);
        let l = sld(&rho, &drho, 1e-12).unwrap();
        assert!(l.max_abs_diff(&drho.scale(c(2.0, 0.0))) < 1e-12);
    }

    #[test]
    fn sld_satisfies_its_defining_relation() {
        let rho = random_density(5, 3);
        let sigma = random_density(5, 4);
        // mixture family ρ(λ) = (1−λ)ρ + λσ at λ = 0.3
        let lam = 0.3;
        let mix = DensityOperator::new(
            rho.matrix()
                .scale(c(1.0 - lam, 0.0))
                .add(&sigma.matrix().scale(c(lam, 0.0))),
        )
        .unwrap();
        let drho = sigma.matrix().sub(rho.matrix());
        let l = sld(&mix, &drho, 1e-12).unwrap();
        let recon = mix
            .matrix()
            .matmul(&l)
            .add(&l.matmul(mix.matrix()))
            .scale(c(0.5, 0.0));
        assert!(recon.max_abs_diff(&drho) < 1e-9);
    }

    #[test]
    fn spectral_route_rejects_support_moving_derivative() {
        let rho = DensityOperator::new(ComplexMatrix::from_diag(&[1.0, 0.0])).unwrap();
        // derivative with weight purely on the kernel
        let drho = ComplexMatrix::from_diag(&[1e-3, -1e-3]);
        // kernel-kernel element (1,1) is -1e-3, far above tolerance
        assert!(matches!(
            qfi_spectral(&rho, &drho, 1e-12),
            Err(Error::SupportMoved { .. })
        ));
    }

    #[test]
    fn spectral_qfi_of_inertial_family() {
        for &(theta, phi) in &[(0.4, 0.0), (1.1, 2.0), (std::f64::consts::FRAC_PI_4, 0.7)] {
            let psi = inertial_state(theta, phi);
            let rho = DensityOperator::from_pure(&psi).unwrap();
            let f_theta =
                qfi_spectral(&rho, &pure_drho(&psi, &inertial_dtheta(theta, phi)), 1e-12).unwrap();
            assert!((f_theta - 4.0).abs() < 1e-10, "theta={theta}: {f_theta}");
            let f_phi =
                qfi_spectral(&rho, &pure_drho(&psi, &inertial_dphi(theta, phi)), 1e-12).unwrap();
            assert!(((2.0 * theta).sin().powi(2) - f_phi).abs() < 1e-10);
        }
    }

    #[test]
    fn pure_state_qfi_matches_display_values() {
        let (theta, phi) = (std::f64::consts::FRAC_PI_8, 0.3);
        let psi = inertial_state(theta, phi);
        assert!((qfi_pure(&psi, &inertial_dtheta(theta, phi)).unwrap() - 4.0).abs() < 1e-12);
        assert!((qfi_pure(&psi, &inertial_dphi(theta, phi)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_state_qfi_rejects_unnormalized_input() {
        let psi = vec![c(0.9, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            qfi_pure(&psi, &psi),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn support_formula_degenerates_to_pure_qfi() {
        let (theta, phi) = (0.6, 1.2);
        let psi = inertial_state(theta, phi);
        let dpsi = inertial_dphi(theta, phi);
        let got = qfi_support(
            &[1.0],
            std::slice::from_ref(&psi),
            &[0.0],
            std::slice::from_ref(&dpsi),
        )
        .unwrap();
        let expect = qfi_pure(&psi, &dpsi).unwrap();
        assert!((got.total - expect).abs() < 1e-12);
        assert_eq!(got.classical, 0.0);
        assert_eq!(got.mixing, 0.0);
    }

    #[test]
    fn support_formula_on_classical_ensemble_gives_binary_fisher() {
        let p = 0.3f64;
        let basis = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let zeros = vec![vec![c(0.0, 0.0); 2]; 2];
        let got = qfi_support(&[p, 1.0 - p], &basis, &[1.0, -1.0], &zeros).unwrap();
        let expect = 1.0 / (p * (1.0 - p));
        assert!((got.total - expect).abs() < 1e-12);
        assert!((got.classical - expect).abs() < 1e-12);
        assert_eq!(got.quantum_avg, 0.0);
    }

    #[test]
    fn support_formula_rejects_non_orthonormal_vectors() {
        let skew = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.6, 0.0), c(0.8, 0.0)],
        ];
        let zeros = vec![vec![c(0.0, 0.0); 2]; 2];
        assert!(matches!(
            qfi_support(&[0.5, 0.5], &skew, &[0.0, 0.0], &zeros),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn bures_distance_basics() {
        let rho = random_density(4, 11);
        assert!(bures_distance(&rho, &rho).unwrap() < 1e-7);

        let e0 = DensityOperator::new(ComplexMatrix::from_diag(&[1.0, 0.0])).unwrap();
        let e1 = DensityOperator::new(ComplexMatrix::from_diag(&[0.0, 1.0])).unwrap();
        let d = bures_distance(&e0, &e1).unwrap();
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bures_distance_is_symmetric() {
        let rho = random_density(5, 17);
        let sigma = random_density(5, 18);
        let ab = bures_distance(&rho, &sigma).unwrap();
        let ba = bures_distance(&sigma, &rho).unwrap();
        assert!((ab - ba).abs() < 1e-9);
    }

    #[test]
    fn support_compressed_fidelity_matches_direct_matrix_route() {
        let rho = random_density(4, 23);
        let sigma = random_density(4, 24);
        let fast = root_fidelity(&rho, &sigma).unwrap();
        // direct route: eigenvalues of √ρ σ √ρ in the full space
        let root = sqrtm_psd(rho.matrix()).unwrap();
        let m = root.matmul(sigma.matrix()).matmul(&root);
        let spec = crate::linalg::eig_hermitian(&m.add(&m.adjoint()).scale(c(0.5, 0.0))).unwrap();
        let direct: f64 = spec.eigenvalues.iter().map(|&e| e.max(0.0).sqrt()).sum();
        assert!((fast - direct).abs() < 1e-10);
    }

    #[test]
    fn bures_route_recovers_pure_state_qfi() {
        let phi = 0.9;
        let family = ParametrizedState::new(move |theta: f64| {
            DensityOperator::from_pure(&inertial_state(theta, phi))
        });
        let got = qfi_from_bures(&family, 0.7, 1e-4).unwrap();
        assert!(!got.rank_changed);
        assert!((got.value - 4.0).abs() < 1e-4, "got {}", got.value);
    }

    #[test]
    fn bures_route_of_constant_family_is_zero() {
        let family = ParametrizedState::new(|_: f64| {
            DensityOperator::new(ComplexMatrix::from_diag(&[0.25, 0.75]))
        });
        let got = qfi_from_bures(&family, 0.5, 1e-4).unwrap();
        assert!(got.value.abs() < 1e-8);
        assert!(!got.rank_changed);
    }

    #[test]
    fn bures_route_flags_rank_changes() {
        // rank jumps from 1 to 2 as λ crosses zero
        let family = ParametrizedState::new(|lam: f64| {
            let w = if lam > 0.0 { 0.1 } else { 0.0 };
            DensityOperator::new(ComplexMatrix::from_diag(&[1.0 - w, w]))
        });
        let got = qfi_from_bures(&family, 0.0, 1e-4).unwrap();
        assert!(got.rank_changed);
    }

    #[test]
    fn parametrized_state_finite_difference_matches_analytic() {
        let rho0 = random_density(4, 31);
        let sig0 = random_density(4, 32);
        let (r, s) = (rho0.clone(), sig0.clone());
        let family = ParametrizedState::new(move |lam: f64| {
            DensityOperator::new(
                r.matrix()
                    .scale(c(1.0 - lam, 0.0))
                    .add(&s.matrix().scale(c(lam, 0.0))),
            )
        });
        let fd = family.drho(0.4).unwrap();
        let analytic = sig0.matrix().sub(rho0.matrix());
        assert!(fd.max_abs_diff(&analytic) < 1e-8);
    }

    #[test]
    fn all_routes_agree_on_a_mixture_family() {
        let rho0 = random_density(4, 41);
        let sig0 = random_density(4, 42);
        let drho = sig0.matrix().sub(rho0.matrix());
        let lam = 0.35;
        let state = DensityOperator::new(
            rho0.matrix()
                .scale(c(1.0 - lam, 0.0))
                .add(&sig0.matrix().scale(c(lam, 0.0))),
        )
        .unwrap();

        let f_spec = qfi_spectral(&state, &drho, 1e-12).unwrap();

        let l = sld(&state, &drho, 1e-12).unwrap();
        let f_sld = state.matrix().matmul(&l).matmul(&l).trace().re;
        assert!((f_spec - f_sld).abs() < 1e-8, "{f_spec} vs {f_sld}");

        let (r, s) = (rho0.clone(), sig0.clone());
        let family = ParametrizedState::new(move |x: f64| {
            DensityOperator::new(
                r.matrix()
                    .scale(c(1.0 - x, 0.0))
                    .add(&s.matrix().scale(c(x, 0.0))),
            )
        });
        let f_bures = qfi_from_bures(&family, lam, 1e-4).unwrap();
        assert!(!f_bures.rank_changed);
        let rel = (f_bures.value - f_spec).abs() / f_spec;
        assert!(rel < 1e-3, "bures {} vs spectral {}", f_bures.value, f_spec);
    }

    #[test]
    fn qfi_is_nonnegative_on_random_mixtures() {
        for seed in 0..6 {
            let rho0 = random_density(3, 100 + seed);
            let sig0 = random_density(3, 200 + seed);
            let drho = sig0.matrix().sub(rho0.matrix());
            let state = DensityOperator::new(
                rho0.matrix()
                    .scale(c(0.5, 0.0))
                    .add(&sig0.matrix().scale(c(0.5, 0.0))),
            )
            .unwrap();
            let f = qfi_spectral(&state, &drho, 1e-12).unwrap();
            assert!(f >= -1e-10);
        }
    }
}
