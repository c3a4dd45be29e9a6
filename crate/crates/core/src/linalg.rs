//! Dense complex linear algebra for small Hermitian problems.
//!
//! Matrices are square, row-major `Complex<T>` arrays. The eigensolver is a
//! cyclic Jacobi method; before iterating it splits the matrix into connected
//! components of the exact nonzero pattern, so direct sums (as produced by
//! block-structured channel states) cost no more than their largest block.
//! Rotations use a relative threshold, which keeps small eigenvalues of
//! graded positive matrices at high relative accuracy.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

/// Dense complex vector.
pub type CVector<T> = Vec<Complex<T>>;

/// ⟨a|b⟩ with the conjugation on the first argument.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sq<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Euclidean norm of a complex vector.
pub fn norm<T: Real>(v: &[Complex<T>]) -> T {
    norm_sq(v).sqrt()
}

/// Kronecker product of two vectors, `a`-major.
pub fn kron_vec<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> CVector<T> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Outer product |a⟩⟨b|.
pub fn outer<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> ComplexMatrix<T> {
    assert_eq!(a.len(), b.len(), "outer product needs equal dimensions");
    ComplexMatrix::from_fn(a.len(), |i, j| a[i] * b[j].conj())
}

/// Square matrix of complex numbers, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        let len = dim * dim;
        // vec![0.0; n] of a primitive float goes through alloc_zeroed, so
        // the kernel hands back lazily mapped zero pages; that matters at
        // desk-scale embeddings where eager memset of hundreds of MB would
        // rival the actual computation. Complex<T> is repr(C) over [T; 2],
        // so the reinterpretation below is layout-exact.
        let raw: Vec<T> = vec![T::zero(); 2 * len];
        if raw.capacity() == 2 * len {
            let mut raw = std::mem::ManuallyDrop::new(raw);
            let ptr = raw.as_mut_ptr() as *mut Complex<T>;
            let data = unsafe { Vec::from_raw_parts(ptr, len, len) };
            return Self { dim, data };
        }
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Diagonal matrix from real entries.
    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(
                "matrix rows must all have length equal to the row count".into(),
            ));
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.dim + j] = v;
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            acc += self.data[i * self.dim + i];
        }
        acc
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul needs equal dimensions");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> CVector<T> {
        assert_eq!(self.dim, v.len(), "matrix-vector dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), T::max)
            .sqrt()
    }

    /// Largest entrywise difference |self − rhs|.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .fold(T::zero(), T::max)
            .sqrt()
    }

    /// max |A[i][j] − conj(A[j][i])| over all entries.
    ///
    /// Tiled comparison keeps both sides of the transpose cache-resident;
    /// desk-scale embeddings reach a few hundred MB where strided reads
    /// would dominate everything else.
    pub fn hermitian_defect(&self) -> T {
        const TILE: usize = 64;
        let n = self.dim;
        let mut worst2 = T::zero();
        for i in 0..n {
            worst2 = worst2.max(self.data[i * n + i].im * self.data[i * n + i].im);
        }
        let mut bi = 0;
        while bi < n {
            let iend = (bi + TILE).min(n);
            let mut bj = bi;
            while bj < n {
                let jend = (bj + TILE).min(n);
                for i in bi..iend {
                    let jstart = if bi == bj { i + 1 } else { bj };
                    for j in jstart..jend {
                        let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
                        worst2 = worst2.max(d);
                    }
                }
                bj += TILE;
            }
            bi += TILE;
        }
        worst2.sqrt()
    }

    /// Symmetry defect, entry scale, trace and nonzero triplets from a
    /// single tiled pass. Matrices at desk-scale embeddings run to a few
    /// hundred MB, so every full traversal counts.
    pub(crate) fn scan(&self) -> MatrixScan<T> {
        const TILE: usize = 64;
        let n = self.dim;
        let zero = T::zero();
        let mut worst2 = zero;
        let mut scale2 = zero;
        let mut trace = Complex::new(zero, zero);
        let mut nonzeros = Vec::new();
        for i in 0..n {
            let d = self.data[i * n + i];
            trace += d;
            worst2 = worst2.max(d.im * d.im);
            scale2 = scale2.max(d.norm_sqr());
            if d.re != zero || d.im != zero {
                nonzeros.push((i, i, d));
            }
        }
        let mut bi = 0;
        while bi < n {
            let iend = (bi + TILE).min(n);
            let mut bj = bi;
            while bj < n {
                let jend = (bj + TILE).min(n);
                for i in bi..iend {
                    let jstart = if bi == bj { i + 1 } else { bj };
                    for j in jstart..jend {
                        let u = self.data[i * n + j];
                        let l = self.data[j * n + i];
                        // block-sparse states are mostly exact zeros
                        if u.re == zero && u.im == zero && l.re == zero && l.im == zero {
                            continue;
                        }
                        worst2 = worst2.max((u - l.conj()).norm_sqr());
                        scale2 = scale2.max(u.norm_sqr()).max(l.norm_sqr());
                        if u.re != zero || u.im != zero {
                            nonzeros.push((i, j, u));
                        }
                        if l.re != zero || l.im != zero {
                            nonzeros.push((j, i, l));
                        }
                    }
                }
                bj += TILE;
            }
            bi += TILE;
        }
        MatrixScan {
            herm_defect: worst2.sqrt(),
            max_abs: scale2.sqrt(),
            trace,
            nonzeros,
        }
    }

    /// Reject matrices whose symmetry defect exceeds `HERM_TOL · max|A|`.
    pub fn check_hermitian(&self) -> Result<()> {
        self.scan().check_hermitian()
    }
}

/// Everything a single traversal of a matrix can certify.
pub(crate) struct MatrixScan<T> {
    pub herm_defect: T,
    pub max_abs: T,
    pub trace: Complex<T>,
    /// (row, col, value) for every exactly nonzero entry.
    pub nonzeros: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> MatrixScan<T> {
    pub fn check_hermitian(&self) -> Result<()> {
        if self.max_abs == T::zero() {
            return Ok(());
        }
        let tol = T::HERM_TOL * self.max_abs;
        if self.herm_defect > tol {
            return Err(Error::NotHermitian {
                defect: self.herm_defect.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

/// Tr(A·B) without forming the product.
pub fn trace_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Complex<T> {
    assert_eq!(a.dim(), b.dim(), "trace product needs equal dimensions");
    let n = a.dim();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            acc += a.data[i * n + j] * b.data[j * n + i];
        }
    }
    acc
}

/// Kronecker product: `(A⊗B)[(i·dB+k)][(j·dB+l)] = A[i][j]·B[k][l]`.
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij.re == T::zero() && aij.im == T::zero() {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Which tensor factor `partial_trace` keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian, unit-trace, positive-semidefinite matrix certified at construction.
///
/// Certification eigendecomposes the matrix (componentwise), so the spectrum
/// is kept for the QFI engines to reuse.
#[derive(Clone, Debug)]
pub struct DensityOperator<T> {
    matrix: ComplexMatrix<T>,
    spectrum: ComponentSpectrum<T>,
    clamped: usize,
}

impl<T: Real> DensityOperator<T> {
    /// Certify hermiticity, unit trace and positivity of `matrix`.
    ///
    /// Eigenvalues in `[−PSD_TOL, 0)` are counted as clamped rounding dust;
    /// anything below that is rejected.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let scan = matrix.scan();
        scan.check_hermitian()?;
        let tr = scan.trace;
        let defect = ((tr.re - T::one()).powi(2) + tr.im.powi(2)).sqrt();
        if defect > T::TRACE_TOL {
            return Err(Error::TraceNotOne {
                defect: defect.to_f64().unwrap_or(f64::NAN),
                tol: T::TRACE_TOL.to_f64().unwrap_or(f64::NAN),
            });
        }
        let spectrum = component_eig_from_scan(&scan, matrix.dim())?;
        let tol = T::PSD_TOL * T::one().max(spectrum.max_eigenvalue());
        let mut clamped = 0usize;
        for comp in &spectrum.comps {
            for &ev in &comp.eigvals {
                if ev < -tol {
                    return Err(Error::NotPositive {
                        eigenvalue: ev.to_f64().unwrap_or(f64::NAN),
                        tol: tol.to_f64().unwrap_or(f64::NAN),
                    });
                }
                if ev < T::zero() {
                    clamped += 1;
                }
            }
        }
        Ok(Self {
            matrix,
            spectrum,
            clamped,
        })
    }

    /// Rank-one projector |ψ⟩⟨ψ| of a normalized vector.
    pub fn from_pure(psi: &[Complex<T>]) -> Result<Self> {
        let defect = (norm(psi) - T::one()).abs();
        if defect > T::EIG_TOL {
            return Err(Error::NotNormalized {
                defect: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        Self::new(outer(psi, psi))
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Number of eigenvalues that were negative rounding dust at construction.
    pub fn clamped_eigenvalues(&self) -> usize {
        self.clamped
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// Componentwise eigendecomposition computed at certification.
    pub(crate) fn spectrum(&self) -> &ComponentSpectrum<T> {
        &self.spectrum
    }
}

/// Eigenvalues (descending) and matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<CVector<T>>,
    pub support_cutoff: T,
}

impl<T: Real> SpectralDecomposition<T> {
    /// Indices with eigenvalue above the support cutoff.
    pub fn support(&self) -> Vec<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > self.support_cutoff)
            .map(|(i, _)| i)
            .collect()
    }

    /// Σ pᵢ |ψᵢ⟩⟨ψᵢ|, for residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let dim = self.eigenvectors.first().map_or(0, Vec::len);
        let mut m = ComplexMatrix::zeros(dim);
        for (p, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..dim {
                for j in 0..dim {
                    let add = v[i] * v[j].conj() * Complex::new(*p, T::zero());
                    m.set(i, j, m.get(i, j) + add);
                }
            }
        }
        m
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Intended for desk-scale dense problems (dims up to a few hundred); the
/// eigenvector matrix is materialized densely. Spectral formulas that only
/// need matrix elements go through the component machinery directly and
/// stay cheap on block-sparse states.
pub fn eig_hermitian<T: Real>(a: &ComplexMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let scan = a.scan();
    scan.check_hermitian()?;
    let spectrum = component_eig_from_scan(&scan, a.dim())?;
    let dim = a.dim();
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(dim);
    for (ci, comp) in spectrum.comps.iter().enumerate() {
        for ei in 0..comp.eigvals.len() {
            order.push((ci, ei));
        }
    }
    order.sort_by(|&(ca, ea), &(cb, eb)| {
        let va = spectrum.comps[ca].eigvals[ea];
        let vb = spectrum.comps[cb].eigvals[eb];
        vb.partial_cmp(&va)
            .unwrap()
            .then(ca.cmp(&cb))
            .then(ea.cmp(&eb))
    });
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut eigenvectors = Vec::with_capacity(dim);
    for (ci, ei) in order {
        let comp = &spectrum.comps[ci];
        eigenvalues.push(comp.eigvals[ei]);
        let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
        for (loc, &global) in comp.indices.iter().enumerate() {
            v[global] = comp.eigvecs[ei][loc];
        }
        eigenvectors.push(v);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        support_cutoff: T::SUPPORT_EPS,
    })
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
///
/// Eigenvalues in `[−tol, 0)` are clamped to zero; anything lower is rejected.
pub fn sqrtm_psd<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let scan = a.scan();
    scan.check_hermitian()?;
    let spectrum = component_eig_from_scan(&scan, a.dim())?;
    let tol = T::PSD_TOL * T::one().max(scan.max_abs);
    let mut out = ComplexMatrix::zeros(a.dim());
    for comp in &spectrum.comps {
        let k = comp.indices.len();
        for (ei, &ev) in comp.eigvals.iter().enumerate() {
            if ev < -tol {
                return Err(Error::NotPositive {
                    eigenvalue: ev.to_f64().unwrap_or(f64::NAN),
                    tol: tol.to_f64().unwrap_or(f64::NAN),
                });
            }
            let root = ev.max(T::zero()).sqrt();
            if root == T::zero() {
                continue;
            }
            let vec = &comp.eigvecs[ei];
            for li in 0..k {
                for lj in 0..k {
                    let (gi, gj) = (comp.indices[li], comp.indices[lj]);
                    let add = vec[li] * vec[lj].conj() * Complex::new(root, T::zero());
                    out.set(gi, gj, out.get(gi, gj) + add);
                }
            }
        }
    }
    Ok(out)
}

/// Trace out one tensor factor of a `dims.0 × dims.1` bipartite state.
pub fn partial_trace<T: Real>(
    rho: &DensityOperator<T>,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityOperator<T>> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} is not {}x{}",
            rho.dim(),
            da,
            db
        )));
    }
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, |i, j| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..db {
                acc += m.get(i * db + k, j * db + k);
            }
            acc
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, |k, l| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..da {
                acc += m.get(i * db + k, i * db + l);
            }
            acc
        }),
    };
    DensityOperator::new(reduced)
}

// ---------------------------------------------------------------------------
// Component-wise Jacobi engine
// ---------------------------------------------------------------------------

/// One connected component of the nonzero pattern, diagonalized.
#[derive(Clone, Debug)]
pub(crate) struct Component<T> {
    /// Global indices spanned by this component, ascending.
    pub indices: Vec<usize>,
    /// Eigenvalues in local (unsorted) order.
    pub eigvals: Vec<T>,
    /// `eigvecs[e][loc]` is the component-local eigenvector of `eigvals[e]`.
    pub eigvecs: Vec<Vec<Complex<T>>>,
}

/// Eigendecomposition grouped by connected components.
#[derive(Clone, Debug)]
pub(crate) struct ComponentSpectrum<T> {
    pub comps: Vec<Component<T>>,
    /// Global index → (component, local index).
    pub index_of: Vec<(u32, u32)>,
}

impl<T: Real> ComponentSpectrum<T> {
    /// Largest eigenvalue across components (zero for an empty matrix).
    pub fn max_eigenvalue(&self) -> T {
        self.comps
            .iter()
            .flat_map(|c| c.eigvals.iter().copied())
            .fold(T::zero(), T::max)
    }
}

/// Union-find with path halving.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Split `a` into connected components of its exact nonzero pattern and run
/// cyclic Jacobi on each. Exact zeros never couple, so diagonalizing a direct
/// sum costs only the blocks.
pub(crate) fn component_eig<T: Real>(a: &ComplexMatrix<T>) -> Result<ComponentSpectrum<T>> {
    component_eig_from_scan(&a.scan(), a.dim())
}

/// [`component_eig`] on a completed traversal, so validation and
/// decomposition share one pass over the entries.
pub(crate) fn component_eig_from_scan<T: Real>(
    scan: &MatrixScan<T>,
    n: usize,
) -> Result<ComponentSpectrum<T>> {
    let mut uf = UnionFind::new(n);
    for &(i, j, _) in &scan.nonzeros {
        if i != j {
            uf.union(i, j);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> =
        std::collections::BTreeMap::new();
    for i in 0..n {
        let root = uf.find(i);
        groups.entry(root).or_default().push(i);
    }

    let mut comps: Vec<Component<T>> = Vec::with_capacity(groups.len());
    let mut index_of = vec![(0u32, 0u32); n];
    let mut locals: Vec<Vec<Complex<T>>> = Vec::with_capacity(groups.len());
    for (ci, (_, indices)) in groups.into_iter().enumerate() {
        let k = indices.len();
        for (loc, &g) in indices.iter().enumerate() {
            index_of[g] = (ci as u32, loc as u32);
        }
        locals.push(vec![Complex::new(T::zero(), T::zero()); k * k]);
        comps.push(Component {
            indices,
            eigvals: Vec::new(),
            eigvecs: Vec::new(),
        });
    }
    // Symmetrized local blocks: each ordered triplet contributes half, so a
    // pair (i,j), (j,i) averages to (a_ij + conj(a_ji))/2 exactly.
    let half = Complex::new(T::of(0.5), T::zero());
    for &(i, j, v) in &scan.nonzeros {
        let (ci, li) = index_of[i];
        if i == j {
            let k = comps[ci as usize].indices.len();
            locals[ci as usize][li as usize * k + li as usize] = Complex::new(v.re, T::zero());
            continue;
        }
        let (_, lj) = index_of[j];
        let k = comps[ci as usize].indices.len();
        let block = &mut locals[ci as usize];
        block[li as usize * k + lj as usize] += v * half;
        block[lj as usize * k + li as usize] += v.conj() * half;
    }
    for (comp, mut local) in comps.iter_mut().zip(locals) {
        let k = comp.indices.len();
        if k == 1 {
            comp.eigvals = vec![local[0].re];
            comp.eigvecs = vec![vec![Complex::new(T::one(), T::zero())]];
            continue;
        }
        let (eigvals, eigvecs) = jacobi_hermitian(&mut local, k)?;
        comp.eigvals = eigvals;
        comp.eigvecs = eigvecs;
    }
    Ok(ComponentSpectrum { comps, index_of })
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// Cyclic Jacobi on a dense Hermitian `k×k` matrix (row-major, in place).
///
/// Returns eigenvalues and eigenvectors in local order. A pivot is rotated
/// only while `|a_pq|² > ε²|a_pp·a_qq|` (plus an absolute floor to terminate
/// on rounding dust), the classic relative criterion.
fn jacobi_hermitian<T: Real>(
    a: &mut [Complex<T>],
    k: usize,
) -> Result<(Vec<T>, Vec<Vec<Complex<T>>>)> {
    let zero = T::zero();
    let one = T::one();
    let two = T::of(2.0);
    let eps = T::epsilon();

    // Columns of the accumulated unitary; vcols[c][i] = V[i][c].
    let mut vcols: Vec<Vec<Complex<T>>> = (0..k)
        .map(|c| {
            let mut col = vec![Complex::new(zero, zero); k];
            col[c] = Complex::new(one, zero);
            col
        })
        .collect();

    let scale0 = a
        .iter()
        .map(|c| c.norm_sqr())
        .fold(zero, T::max)
        .sqrt()
        .max(T::min_positive_value());
    let floor = eps * eps * scale0;

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p * k + q];
                let mag2 = apq.norm_sqr();
                if mag2 == zero {
                    continue;
                }
                let app = a[p * k + p].re;
                let aqq = a[q * k + q].re;
                let rel = eps * eps * (app * aqq).abs();
                if mag2 <= rel.max(floor * floor) {
                    continue;
                }
                rotated = true;

                let mag = mag2.sqrt();
                let phase = apq / Complex::new(mag, zero); // e^{iφ}
                let tau = (aqq - app) / (two * mag);
                // smaller-magnitude root of t² − 2τt − 1 = 0
                let t = if tau >= zero {
                    -one / (tau + (one + tau * tau).sqrt())
                } else {
                    one / (-tau + (one + tau * tau).sqrt())
                };
                let c = one / (one + t * t).sqrt();
                let s = t * c;
                let cs = Complex::new(c, zero);
                let sp = Complex::new(s, zero) * phase; // s·e^{iφ}
                let spc = sp.conj(); // s·e^{−iφ}

                // rows/columns outside the pivot pair
                for j in 0..k {
                    if j == p || j == q {
                        continue;
                    }
                    let rp = a[p * k + j];
                    let rq = a[q * k + j];
                    let np = cs * rp + sp * rq;
                    let nq = cs * rq - spc * rp;
                    a[p * k + j] = np;
                    a[q * k + j] = nq;
                    a[j * k + p] = np.conj();
                    a[j * k + q] = nq.conj();
                }
                // pivot corner
                let app_new = c * c * app + two * c * s * mag + s * s * aqq;
                let aqq_new = s * s * app - two * c * s * mag + c * c * aqq;
                a[p * k + p] = Complex::new(app_new, zero);
                a[q * k + q] = Complex::new(aqq_new, zero);
                a[p * k + q] = Complex::new(zero, zero);
                a[q * k + p] = Complex::new(zero, zero);

                // accumulate V ← V·U
                for i in 0..k {
                    let vp = vcols[p][i];
                    let vq = vcols[q][i];
                    vcols[p][i] = cs * vp + spc * vq;
                    vcols[q][i] = cs * vq - sp * vp;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        let off = (0..k)
            .flat_map(|p| ((p + 1)..k).map(move |q| (p, q)))
            .map(|(p, q)| a[p * k + q].norm_sqr())
            .fold(zero, T::max)
            .sqrt();
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
            off: off.to_f64().unwrap_or(f64::NAN),
        });
    }

    let eigvals = (0..k).map(|i| a[i * k + i].re).collect();
    Ok((eigvals, vcols))
}
