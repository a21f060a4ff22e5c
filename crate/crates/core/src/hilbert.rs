//! Dense complex operator algebra and state handling for small composite
//! Hilbert spaces.
//!
//! Subsystem ordering is fixed globally as (qubit, mode 1, mode 2, ...); every
//! module of the crate relies on it. Total dimensions stay at desk scale
//! (≤ ~1000), so all storage is dense.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance for asserting hermiticity of operators.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Tolerance for hermiticity of density matrices.
const STATE_HERMITICITY_TOL: f64 = 1e-10;

/// Tolerance for unit trace of freshly constructed density matrices.
const STATE_TRACE_TOL: f64 = 1e-9;

/// A dense operator on a composite Hilbert space.
///
/// `dims` lists the subsystem dimensions; the matrix dimension is their
/// product.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    matrix: Array2<Complex64>,
}

impl Operator {
    /// Wrap a matrix, checking that it is square and matches `dims`.
    pub fn new(dims: Vec<usize>, matrix: Array2<Complex64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                what: "operator matrix (not square)",
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        if matrix.nrows() != total {
            return Err(Error::DimensionMismatch {
                what: "operator matrix vs subsystem dimensions",
                left: matrix.nrows(),
                right: total,
            });
        }
        Ok(Self { dims, matrix })
    }

    /// Identity on the composite space described by `dims`.
    pub fn identity(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        Self { dims, matrix: Array2::eye(total) }
    }

    /// All-zero operator on the composite space described by `dims`.
    pub fn zeros(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        Self { dims, matrix: Array2::zeros((total, total)) }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.matrix
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Array2::zeros(self.matrix.raw_dim());
        for ((i, j), v) in self.matrix.indexed_iter() {
            out[[j, i]] = v.conj();
        }
        Self { dims: self.dims.clone(), matrix: out }
    }

    /// Maximum absolute elementwise deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Error unless hermitian to `HERMITICITY_TOL`.
    pub fn assert_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation, tolerance: HERMITICITY_TOL });
        }
        Ok(())
    }

    /// Matrix product; panics on dimension mismatch (builder-level misuse).
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "operator product on mismatched spaces");
        Self { dims: self.dims.clone(), matrix: self.matrix.dot(&other.matrix) }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dims: self.dims.clone(), matrix: self.matrix.mapv(|v| v * factor) }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().iter().sum()
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator sum on mismatched spaces");
        Operator { dims: self.dims.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dims, rhs.dims, "operator difference on mismatched spaces");
        Operator { dims: self.dims.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

/// Annihilation (lowering) operator on a `dim`-level truncation:
/// `A[n-1, n] = sqrt(n)`.
pub fn annihilation(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension { what: "annihilation operator", dim, min: 2 });
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Operator::new(vec![dim], m)
}

/// Creation (raising) operator, adjoint of [`annihilation`].
pub fn creation(dim: usize) -> Result<Operator> {
    Ok(annihilation(dim)?.dagger())
}

/// Number operator `A†A` with diagonal (0, 1, ..., dim-1).
pub fn number(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension { what: "number operator", dim, min: 2 });
    }
    let mut m = Array2::zeros((dim, dim));
    for n in 0..dim {
        m[[n, n]] = Complex64::new(n as f64, 0.0);
    }
    Operator::new(vec![dim], m)
}

/// Pauli-Z in the (|0⟩, |1⟩) ordering: diag(+1, -1).
pub fn pauli_z() -> Operator {
    let mut m = Array2::zeros((2, 2));
    m[[0, 0]] = Complex64::new(1.0, 0.0);
    m[[1, 1]] = Complex64::new(-1.0, 0.0);
    Operator { dims: vec![2], matrix: m }
}

/// Projector |level⟩⟨level| on subsystem `index` of the composite space.
pub fn level_projector(dims: &[usize], index: usize, level: usize) -> Result<Operator> {
    if index >= dims.len() {
        return Err(Error::InvalidSubsystem { index, n_subsystems: dims.len() });
    }
    if level >= dims[index] {
        return Err(Error::InvalidDimension { what: "projector level", dim: level, min: 0 });
    }
    let mut local = Array2::zeros((dims[index], dims[index]));
    local[[level, level]] = Complex64::new(1.0, 0.0);
    embed(&Operator::new(vec![dims[index]], local)?, index, dims)
}

/// Kronecker product of two dense matrices.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &av) in a.indexed_iter() {
        if av == Complex64::new(0.0, 0.0) {
            continue;
        }
        for ((k, l), &bv) in b.indexed_iter() {
            out[[i * br + k, j * bc + l]] = av * bv;
        }
    }
    out
}

/// Embed a single-subsystem operator at position `index` of the composite
/// space `dims`, with identities on all other subsystems.
pub fn embed(op: &Operator, index: usize, dims: &[usize]) -> Result<Operator> {
    if index >= dims.len() {
        return Err(Error::InvalidSubsystem { index, n_subsystems: dims.len() });
    }
    if op.dim() != dims[index] {
        return Err(Error::InvalidEmbedding { op_dim: op.dim(), index, expected: dims[index] });
    }
    let pre: usize = dims[..index].iter().product();
    let post: usize = dims[index + 1..].iter().product();
    let mut m = kron(&Array2::eye(pre), op.matrix());
    m = kron(&m, &Array2::eye(post));
    Operator::new(dims.to_vec(), m)
}

/// A density matrix on a composite Hilbert space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: Array2<Complex64>,
}

impl DensityMatrix {
    /// Validate hermiticity (1e-10) and unit trace (1e-9) and wrap.
    pub fn new(dims: Vec<usize>, matrix: Array2<Complex64>) -> Result<Self> {
        Self::with_trace_tolerance(dims, matrix, STATE_TRACE_TOL)
    }

    /// As [`DensityMatrix::new`] with a caller-chosen trace tolerance.
    /// Integration snapshots accumulate bounded trace drift and use a looser
    /// tolerance than fresh constructions.
    pub fn with_trace_tolerance(
        dims: Vec<usize>,
        matrix: Array2<Complex64>,
        trace_tol: f64,
    ) -> Result<Self> {
        let total: usize = dims.iter().product();
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != total {
            return Err(Error::InvalidState {
                reason: format!(
                    "matrix is {}x{} but subsystem dimensions give {}",
                    matrix.nrows(),
                    matrix.ncols(),
                    total
                ),
            });
        }
        let op = Operator { dims: dims.clone(), matrix };
        let dev = op.hermiticity_deviation();
        if dev > STATE_HERMITICITY_TOL {
            return Err(Error::InvalidState {
                reason: format!("hermiticity deviation {dev:.3e} exceeds {STATE_HERMITICITY_TOL:.1e}"),
            });
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::InvalidState {
                reason: format!("trace {tr} deviates from 1 beyond {trace_tol:.1e}"),
            });
        }
        Ok(Self { dims: op.dims, matrix: op.matrix })
    }

    /// Pure product Fock state |n_0, n_1, ...⟩⟨...|.
    pub fn basis_state(dims: &[usize], occupations: &[usize]) -> Result<Self> {
        if dims.len() != occupations.len() {
            return Err(Error::DimensionMismatch {
                what: "basis state occupations vs dims",
                left: occupations.len(),
                right: dims.len(),
            });
        }
        let mut index = 0usize;
        for (d, n) in dims.iter().zip(occupations) {
            if n >= d {
                return Err(Error::InvalidDimension { what: "basis occupation", dim: *n, min: 0 });
            }
            index = index * d + n;
        }
        let total: usize = dims.iter().product();
        let mut m = Array2::zeros((total, total));
        m[[index, index]] = Complex64::new(1.0, 0.0);
        Ok(Self { dims: dims.to_vec(), matrix: m })
    }

    /// Pure state ρ = |ψ⟩⟨ψ| from an amplitude vector (renormalized).
    pub fn from_pure(dims: &[usize], amplitudes: &[Complex64]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch {
                what: "pure state amplitudes vs dimension",
                left: amplitudes.len(),
                right: total,
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidState { reason: "zero state vector".into() });
        }
        let mut m = Array2::zeros((total, total));
        for i in 0..total {
            for j in 0..total {
                m[[i, j]] = amplitudes[i] * amplitudes[j].conj() / norm_sq;
            }
        }
        Ok(Self { dims: dims.to_vec(), matrix: m })
    }

    /// Single-oscillator thermal state with mean occupation `nbar`,
    /// truncated to `dim` levels and renormalized: p_n ∝ (nbar/(1+nbar))^n.
    ///
    /// For dim = 2 this reduces to detailed balance, p_1 = nbar/(1+2 nbar).
    pub fn thermal_oscillator(dim: usize, nbar: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension { what: "thermal oscillator", dim, min: 2 });
        }
        if nbar < 0.0 {
            return Err(Error::Domain(format!("thermal occupation {nbar} must be nonnegative")));
        }
        let ratio = nbar / (1.0 + nbar);
        let mut weights = Vec::with_capacity(dim);
        let mut w = 1.0;
        for _ in 0..dim {
            weights.push(w);
            w *= ratio;
        }
        let norm: f64 = weights.iter().sum();
        let mut m = Array2::zeros((dim, dim));
        for (n, w) in weights.iter().enumerate() {
            m[[n, n]] = Complex64::new(w / norm, 0.0);
        }
        Ok(Self { dims: vec![dim], matrix: m })
    }

    /// Tensor product of states, in the given subsystem order.
    pub fn product(states: &[&DensityMatrix]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidState { reason: "empty product".into() });
        }
        let mut dims = states[0].dims.clone();
        let mut m = states[0].matrix.clone();
        for s in &states[1..] {
            m = kron(&m, &s.matrix);
            dims.extend_from_slice(&s.dims);
        }
        Ok(Self { dims, matrix: m })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diag().iter().sum()
    }

    /// Purity Tr(ρ²).
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix[[i, j]] * self.matrix[[j, i]]).re;
            }
        }
        acc
    }

    /// Real diagonal (populations in the product basis).
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diag().iter().map(|v| v.re).collect()
    }

    /// Smallest eigenvalue; on-demand positivity check.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = hermitian_eigenvalues(&self.matrix)?;
        Ok(vals[0])
    }
}

/// Expectation value Tr(op·ρ) of a hermitian operator.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<f64> {
    if op.dims() != rho.dims() {
        return Err(Error::DimensionMismatch {
            what: "expectation operator vs state",
            left: op.dim(),
            right: rho.dim(),
        });
    }
    op.assert_hermitian()?;
    let n = op.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += op.matrix()[[i, j]] * rho.matrix()[[j, i]];
        }
    }
    if acc.im.abs() >= 1e-9 {
        return Err(Error::Domain(format!(
            "expectation of hermitian operator has imaginary residue {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Reduced state over the subsystems listed in `keep` (any order; the result
/// keeps them in ascending subsystem order). Trace is preserved.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let dims = rho.dims();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    for &k in &keep {
        if k >= dims.len() {
            return Err(Error::InvalidSubsystem { index: k, n_subsystems: dims.len() });
        }
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let keep_total: usize = keep_dims.iter().product();
    let traced_total: usize = traced.iter().map(|&t| dims[t]).product();

    // Strides of each subsystem in the flat row-major index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    // Flat offsets of every kept and traced multi-index.
    let offsets = |subsys: &[usize], count: usize| -> Vec<usize> {
        let mut offs = vec![0usize; count];
        for (pos, off) in offs.iter_mut().enumerate() {
            let mut rem = pos;
            let mut acc = 0usize;
            for &s in subsys.iter().rev() {
                acc += (rem % dims[s]) * strides[s];
                rem /= dims[s];
            }
            *off = acc;
        }
        offs
    };
    let keep_offsets = offsets(&keep, keep_total);
    let traced_offsets = offsets(&traced, traced_total);

    let mut out = Array2::zeros((keep_total, keep_total));
    for (a, &ka) in keep_offsets.iter().enumerate() {
        for (b, &kb) in keep_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_offsets {
                acc += rho.matrix()[[ka + t, kb + t]];
            }
            out[[a, b]] = acc;
        }
    }
    // Bypass trace validation: partial trace preserves whatever trace the
    // input carried, including drifted integration snapshots.
    Ok(DensityMatrix { dims: keep_dims, matrix: out })
}

/// Eigenvalues of a hermitian matrix, ascending, by cyclic complex Jacobi
/// rotations.
pub fn hermitian_eigenvalues(matrix: &Array2<Complex64>) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "eigenvalue input (not square)",
            left: n,
            right: matrix.ncols(),
        });
    }
    let mut a = matrix.clone();
    let scale: f64 = a.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[[p, q]].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.norm() <= tol * 1e-2 {
                    continue;
                }
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                // Phase that makes the pivot real, then a real Jacobi rotation.
                let phase = apq / apq.norm();
                let g = apq.norm();
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation: a[:, p] and a[:, q].
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * s * phase.conj();
                    a[[k, q]] = akq * c + akp * s * phase;
                }
                // Row rotation: a[p, :] and a[q, :].
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * s * phase;
                    a[[q, k]] = aqk * c + apk * s * phase.conj();
                }
            }
        }
    }

    let mut vals: Vec<f64> = a.diag().iter().map(|v| v.re).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn annihilation_qubit_is_lowering_operator() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.matrix()[[0, 1]], c(1.0, 0.0));
        assert_eq!(a.matrix()[[0, 0]], c(0.0, 0.0));
        assert_eq!(a.matrix()[[1, 0]], c(0.0, 0.0));
        assert_eq!(a.matrix()[[1, 1]], c(0.0, 0.0));
    }

    #[test]
    fn number_operator_spectrum() {
        let a = annihilation(3).unwrap();
        let n = a.dagger().matmul(&a);
        for k in 0..3 {
            assert_abs_diff_eq!(n.matrix()[[k, k]].re, k as f64, epsilon = 1e-14);
        }
        assert_eq!(&n.matrix().mapv(|v| v.im).sum(), &0.0);
    }

    #[test]
    fn commutator_truncation_artifact() {
        // [A, A†] on a 4-level truncation: identity except -3 on the top level.
        let a = annihilation(4).unwrap();
        let comm = &a.matmul(&a.dagger()) - &a.dagger().matmul(&a);
        let expected = [1.0, 1.0, 1.0, -3.0];
        for k in 0..4 {
            assert_abs_diff_eq!(comm.matrix()[[k, k]].re, expected[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn annihilation_rejects_small_dims() {
        assert!(matches!(annihilation(1), Err(Error::InvalidDimension { .. })));
        assert!(matches!(annihilation(0), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn embed_pauli_z_block_structure() {
        let z = embed(&pauli_z(), 0, &[2, 3]).unwrap();
        for k in 0..3 {
            assert_eq!(z.matrix()[[k, k]], c(1.0, 0.0));
            assert_eq!(z.matrix()[[3 + k, 3 + k]], c(-1.0, 0.0));
        }
        let off_diag_norm: f64 = z
            .matrix()
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, v)| v.norm())
            .sum();
        assert_eq!(off_diag_norm, 0.0);
    }

    #[test]
    fn embed_identity_is_identity() {
        let id = Operator::identity(vec![3]);
        let full = embed(&id, 1, &[2, 3, 2]).unwrap();
        assert_eq!(full.matrix(), &Array2::eye(12));
    }

    #[test]
    fn embedded_annihilation_lowers_mode() {
        // a on mode 1 of (qubit, mode) maps |g,1> to |g,0>.
        let a = embed(&annihilation(3).unwrap(), 1, &[2, 3]).unwrap();
        // Basis index of |g,1> is 1; of |g,0> is 0.
        assert_eq!(a.matrix()[[0, 1]], c(1.0, 0.0));
        let column_norm: f64 = (0..6).map(|i| a.matrix()[[i, 1]].norm()).sum();
        assert_abs_diff_eq!(column_norm, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn embed_rejects_mismatched_dimension() {
        let a = annihilation(3).unwrap();
        assert!(matches!(embed(&a, 0, &[2, 3]), Err(Error::InvalidEmbedding { .. })));
        assert!(matches!(embed(&a, 5, &[2, 3]), Err(Error::InvalidSubsystem { .. })));
    }

    #[test]
    fn expectation_examples() {
        // Number operator on vacuum.
        let dims = [2, 3];
        let vac = DensityMatrix::basis_state(&dims, &[0, 0]).unwrap();
        let n1 = embed(&number(3).unwrap(), 1, &dims).unwrap();
        assert_abs_diff_eq!(expectation(&n1, &vac).unwrap(), 0.0, epsilon = 1e-14);

        // Pauli-Z on the maximally mixed qubit.
        let mixed = DensityMatrix::new(vec![2], Array2::eye(2).mapv(|v: f64| c(v * 0.5, 0.0))).unwrap();
        assert_abs_diff_eq!(expectation(&pauli_z(), &mixed).unwrap(), 0.0, epsilon = 1e-14);

        // Excited-state projector on |e> ⊗ vacuum.
        let exc = DensityMatrix::basis_state(&dims, &[1, 0]).unwrap();
        let proj = level_projector(&dims, 0, 1).unwrap();
        assert_abs_diff_eq!(expectation(&proj, &exc).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let a = annihilation(2).unwrap();
        let rho = DensityMatrix::basis_state(&[2], &[0]).unwrap();
        assert!(matches!(expectation(&a, &rho), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn partial_trace_recovers_product_factors() {
        let qubit = DensityMatrix::thermal_oscillator(2, 0.05).unwrap();
        let mode = DensityMatrix::thermal_oscillator(3, 0.2).unwrap();
        let joint = DensityMatrix::product(&[&qubit, &mode]).unwrap();

        let red_q = partial_trace(&joint, &[0]).unwrap();
        let red_m = partial_trace(&joint, &[1]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(
                    red_q.matrix()[[i, j]].re,
                    qubit.matrix()[[i, j]].re,
                    epsilon = 1e-14
                );
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(
                    red_m.matrix()[[i, j]].re,
                    mode.matrix()[[i, j]].re,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn partial_trace_of_entangled_state_is_mixed() {
        // (|e,0> + |g,1>)/sqrt(2) over (qubit, mode 2-level).
        let dims = [2usize, 2];
        // Index of |e,0> = 2, |g,1> = 1.
        let amps = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let bell = DensityMatrix::from_pure(&dims, &amps).unwrap();
        let qubit = partial_trace(&bell, &[0]).unwrap();
        assert_abs_diff_eq!(qubit.matrix()[[0, 0]].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(qubit.matrix()[[1, 1]].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(qubit.matrix()[[0, 1]].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_three_party_single_mode() {
        let a = DensityMatrix::thermal_oscillator(2, 0.1).unwrap();
        let b = DensityMatrix::basis_state(&[3], &[1]).unwrap();
        let cst = DensityMatrix::thermal_oscillator(3, 0.3).unwrap();
        let joint = DensityMatrix::product(&[&a, &b, &cst]).unwrap();
        let red = partial_trace(&joint, &[1]).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(red.matrix()[[i, i]].re, b.matrix()[[i, i]].re, epsilon = 1e-14);
        }
    }

    #[test]
    fn partial_trace_keep_all_is_identity_map() {
        let qubit = DensityMatrix::thermal_oscillator(2, 0.05).unwrap();
        let mode = DensityMatrix::thermal_oscillator(3, 0.2).unwrap();
        let joint = DensityMatrix::product(&[&qubit, &mode]).unwrap();
        let same = partial_trace(&joint, &[0, 1]).unwrap();
        let diff: f64 = (joint.matrix() - same.matrix()).iter().map(|v| v.norm()).sum();
        assert_abs_diff_eq!(diff, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let rho = DensityMatrix::basis_state(&[2, 2], &[0, 0]).unwrap();
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::EmptyKeep)));
    }

    #[test]
    fn density_matrix_validation() {
        // Trace 2 rejected.
        let m = Array2::eye(2).mapv(|v: f64| c(v, 0.0));
        assert!(DensityMatrix::new(vec![2], m).is_err());
        // Non-hermitian rejected.
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = c(1.0, 0.0);
        m[[0, 1]] = c(0.5, 0.0);
        assert!(DensityMatrix::new(vec![2], m).is_err());
    }

    #[test]
    fn thermal_oscillator_detailed_balance_population() {
        let nbar = 4.855e-3;
        let q = DensityMatrix::thermal_oscillator(2, nbar).unwrap();
        let expected = nbar / (1.0 + 2.0 * nbar);
        assert_abs_diff_eq!(q.matrix()[[1, 1]].re, expected, epsilon = 1e-15);
    }

    #[test]
    fn eigenvalues_of_pauli_x_like_coupling() {
        // [[0, g], [g, 0]] has eigenvalues ±g.
        let g = 1.885;
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = c(g, 0.0);
        m[[1, 0]] = c(g, 0.0);
        let vals = hermitian_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(vals[0], -g, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], g, epsilon = 1e-12);
    }

    #[test]
    fn eigenvalues_complex_hermitian_3x3() {
        // Known analytic case: diag(1,2,3) plus i-coupling between 0 and 2.
        let mut m = Array2::zeros((3, 3));
        m[[0, 0]] = c(1.0, 0.0);
        m[[1, 1]] = c(2.0, 0.0);
        m[[2, 2]] = c(3.0, 0.0);
        m[[0, 2]] = c(0.0, 0.5);
        m[[2, 0]] = c(0.0, -0.5);
        let vals = hermitian_eigenvalues(&m).unwrap();
        // Block (1,3) with coupling |0.5|: eigenvalues 2 ± sqrt(1 + 0.25).
        let s = (1.0f64 + 0.25).sqrt();
        assert_abs_diff_eq!(vals[0], 2.0 - s, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], 2.0 + s, epsilon = 1e-12);
    }

    #[test]
    fn min_eigenvalue_positivity() {
        let rho = DensityMatrix::thermal_oscillator(3, 0.1).unwrap();
        assert!(rho.min_eigenvalue().unwrap() >= -1e-12);
    }
}
