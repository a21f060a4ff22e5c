//! Compiled Lindblad generator for the integration hot loop.
//!
//! The public contract of [`crate::dynamics`] works on dense operators and
//! density matrices. Integrating the reset protocol at full truncation
//! (dimension ~500, so ~2.4e5 density-matrix entries) with dense matrix
//! products per Runge-Kutta stage is far too slow, so `evolve` compiles the
//! (H, collapse) pair once per segment into a sparse superoperator acting on
//! the packed upper triangle of ρ. Hermiticity is then preserved by
//! construction and the per-step cost is proportional to the number of
//! structural nonzeros.
//!
//! Row-major vectorization with packing: for i ≤ j the entry ρ[i,j] lives at
//! `offs[i] + j - i`; lower-triangle sources are resolved through conjugated
//! reads, marked by the top bit of the column index.

use ndarray::Array2;
use num_complex::Complex64;

use super::CollapseOp;
use crate::hilbert::{DensityMatrix, Operator};
use crate::Result;

const CONJ_BIT: u32 = 0x8000_0000;

pub(crate) struct PackedLindbladian {
    dim: usize,
    packed_len: usize,
    /// Packed index of (i, i): row start offsets.
    offsets: Vec<usize>,
    /// Dense superoperator diagonal.
    diag: Vec<Complex64>,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<Complex64>,
}

fn nonzeros(m: &Array2<Complex64>) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for ((i, j), &v) in m.indexed_iter() {
        if v != Complex64::new(0.0, 0.0) {
            out.push((i, j, v));
        }
    }
    out
}

impl PackedLindbladian {
    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn packed_len(&self) -> usize {
        self.packed_len
    }

    pub(crate) fn diag_index(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub(crate) fn build(h: &Operator, collapse: &[CollapseOp]) -> Result<Self> {
        h.assert_hermitian()?;
        let d = h.dim();
        let packed_len = d * (d + 1) / 2;
        let mut offsets = Vec::with_capacity(d + 1);
        let mut acc = 0usize;
        for i in 0..d {
            offsets.push(acc);
            acc += d - i;
        }
        debug_assert_eq!(acc, packed_len);
        let pidx = |i: usize, j: usize| -> usize { offsets[i] + j - i };
        // Source reference: packed index plus conjugation flag.
        let src = |k: usize, l: usize| -> u32 {
            if k <= l {
                pidx(k, l) as u32
            } else {
                pidx(l, k) as u32 | CONJ_BIT
            }
        };

        let hm = h.matrix();
        let h_diag: Vec<f64> = (0..d).map(|i| hm[[i, i]].re).collect();
        let h_off: Vec<(usize, usize, Complex64)> =
            nonzeros(hm).into_iter().filter(|&(i, j, _)| i != j).collect();

        let mut diag = vec![Complex64::new(0.0, 0.0); packed_len];
        // Unitary diagonal: -i (h_i - h_j).
        for i in 0..d {
            for j in i..d {
                diag[pidx(i, j)] = Complex64::new(0.0, -(h_diag[i] - h_diag[j]));
            }
        }

        let active: Vec<&CollapseOp> = collapse.iter().filter(|c| c.rate != 0.0).collect();

        // Triplets (row, col|flag, value) for the off-diagonal structure.
        let mut cap = 0usize;
        for &(r, _, _) in &h_off {
            cap += d - r; // commutator left factor
        }
        cap += h_off.len() * d / 2 + 16; // commutator right factor (i ≤ c)
        for op in &active {
            let nnz = op.operator.matrix().iter().filter(|v| **v != Complex64::new(0.0, 0.0)).count();
            cap += nnz * nnz;
        }
        let mut trips: Vec<(u32, u32, Complex64)> = Vec::with_capacity(cap);

        let minus_i = Complex64::new(0.0, -1.0);
        let plus_i = Complex64::new(0.0, 1.0);

        // Commutator -i(Hρ - ρH) from off-diagonal H entries.
        for &(r, c, hv) in &h_off {
            // -i Σ_k H[r,k] ρ[k,j]: target (r, j), source (c, j).
            for j in r..d {
                trips.push((pidx(r, j) as u32, src(c, j), minus_i * hv));
            }
            // +i Σ_l ρ[i,l] H[l,c]: target (i, c), source (i, r).
            for i in 0..=c {
                trips.push((pidx(i, c) as u32, src(i, r), plus_i * hv));
            }
        }

        for op in &active {
            let rate = op.rate;
            let lm = op.operator.matrix();
            let l_nnz = nonzeros(lm);

            // M = L†L accumulated from rows of L.
            let mut m_dense: Array2<Complex64> = Array2::zeros((d, d));
            let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); d];
            for &(i, j, v) in &l_nnz {
                by_row[i].push((j, v));
            }
            for row in &by_row {
                for &(k, vk) in row {
                    for &(l, vl) in row {
                        m_dense[[k, l]] += vk.conj() * vl;
                    }
                }
            }

            // Anticommutator diagonal: -(rate/2)(M_ii + M_jj).
            for i in 0..d {
                for j in i..d {
                    let m_sum = m_dense[[i, i]].re + m_dense[[j, j]].re;
                    diag[pidx(i, j)] += Complex64::new(-0.5 * rate * m_sum, 0.0);
                }
            }
            // Anticommutator off-diagonal, same dual pattern as the commutator.
            for (r, c, mv) in nonzeros(&m_dense) {
                if r == c {
                    continue;
                }
                let w = Complex64::new(-0.5 * rate, 0.0) * mv;
                for j in r..d {
                    trips.push((pidx(r, j) as u32, src(c, j), w));
                }
                for i in 0..=c {
                    trips.push((pidx(i, c) as u32, src(i, r), w));
                }
            }

            // Jump term rate · L ρ L†.
            for &(a, b, va) in &l_nnz {
                for &(c2, e, vc) in &l_nnz {
                    if a > c2 {
                        continue;
                    }
                    let val = va * vc.conj() * rate;
                    trips.push((pidx(a, c2) as u32, src(b, e), val));
                }
            }
        }

        // Sort, merge duplicates, and fold row-coincident entries into the
        // dense diagonal.
        trips.sort_unstable_by_key(|t| ((t.0 as u64) << 32) | t.1 as u64);
        let mut row_ptr = vec![0u32; packed_len + 1];
        let mut cols: Vec<u32> = Vec::with_capacity(trips.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(trips.len());
        let mut idx = 0usize;
        while idx < trips.len() {
            let (row, colflag, mut v) = trips[idx];
            let mut next = idx + 1;
            while next < trips.len() && trips[next].0 == row && trips[next].1 == colflag {
                v += trips[next].2;
                next += 1;
            }
            idx = next;
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            if colflag == row {
                diag[row as usize] += v;
            } else {
                cols.push(colflag);
                vals.push(v);
                row_ptr[row as usize + 1] += 1;
            }
        }
        for t in 0..packed_len {
            row_ptr[t + 1] += row_ptr[t];
        }

        Ok(Self { dim: d, packed_len, offsets, diag, row_ptr, cols, vals })
    }

    /// y = L(v).
    pub(crate) fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for t in 0..self.packed_len {
            let mut acc = self.diag[t] * v[t];
            let start = self.row_ptr[t] as usize;
            let end = self.row_ptr[t + 1] as usize;
            for e in start..end {
                let cf = self.cols[e];
                let x = v[(cf & !CONJ_BIT) as usize];
                let x = if cf & CONJ_BIT != 0 { x.conj() } else { x };
                acc += self.vals[e] * x;
            }
            out[t] = acc;
        }
    }

    pub(crate) fn pack(&self, rho: &Array2<Complex64>) -> Vec<Complex64> {
        let d = self.dim;
        let mut v = vec![Complex64::new(0.0, 0.0); self.packed_len];
        for i in 0..d {
            for j in i..d {
                v[self.offsets[i] + j - i] = rho[[i, j]];
            }
        }
        v
    }

    pub(crate) fn unpack(&self, v: &[Complex64]) -> Array2<Complex64> {
        let d = self.dim;
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in i..d {
                let x = v[self.offsets[i] + j - i];
                m[[i, j]] = x;
                if i != j {
                    m[[j, i]] = x.conj();
                }
            }
        }
        // Diagonal of a hermitian matrix is real; drop roundoff residue.
        for i in 0..d {
            m[[i, i]] = Complex64::new(m[[i, i]].re, 0.0);
        }
        m
    }

    pub(crate) fn trace(&self, v: &[Complex64]) -> f64 {
        (0..self.dim).map(|i| v[self.offsets[i]].re).sum()
    }
}

/// An observable prepared for fast evaluation on packed states.
pub(crate) struct PackedObservable {
    diag_weights: Vec<(usize, f64)>,
    /// Upper-triangle entries (packed index, value); contribute
    /// 2 Re(val · conj(ρ_ij)).
    upper: Vec<(usize, Complex64)>,
}

impl PackedObservable {
    pub(crate) fn prepare(op: &Operator, gen: &PackedLindbladian) -> Result<Self> {
        op.assert_hermitian()?;
        let d = gen.dim();
        let mut diag_weights = Vec::new();
        let mut upper = Vec::new();
        for ((i, j), &v) in op.matrix().indexed_iter() {
            if v == Complex64::new(0.0, 0.0) || i > j {
                continue;
            }
            if i == j {
                diag_weights.push((gen.diag_index(i), v.re));
            } else {
                upper.push((gen.diag_index(i) + j - i, v));
            }
        }
        let _ = d;
        Ok(Self { diag_weights, upper })
    }

    pub(crate) fn evaluate(&self, v: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for &(t, w) in &self.diag_weights {
            acc += w * v[t].re;
        }
        for &(t, o) in &self.upper {
            acc += 2.0 * (o * v[t].conj()).re;
        }
        acc
    }
}

/// Fixed-step RK4 with preallocated stage buffers.
pub(crate) struct Rk4Workspace {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Workspace {
    pub(crate) fn new(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    pub(crate) fn step(&mut self, gen: &PackedLindbladian, v: &mut [Complex64], dt: f64) {
        let n = v.len();
        gen.apply(v, &mut self.k1);
        for t in 0..n {
            self.tmp[t] = v[t] + 0.5 * dt * self.k1[t];
        }
        gen.apply(&self.tmp, &mut self.k2);
        for t in 0..n {
            self.tmp[t] = v[t] + 0.5 * dt * self.k2[t];
        }
        gen.apply(&self.tmp, &mut self.k3);
        for t in 0..n {
            self.tmp[t] = v[t] + dt * self.k3[t];
        }
        gen.apply(&self.tmp, &mut self.k4);
        let w = dt / 6.0;
        for t in 0..n {
            v[t] += w * (self.k1[t] + 2.0 * (self.k2[t] + self.k3[t]) + self.k4[t]);
        }
    }
}

/// Build a snapshot density matrix from a packed state.
pub(crate) fn snapshot(
    gen: &PackedLindbladian,
    v: &[Complex64],
    dims: &[usize],
    trace_tol: f64,
) -> Result<DensityMatrix> {
    DensityMatrix::with_trace_tolerance(dims.to_vec(), gen.unpack(v), trace_tol)
}
