//! Lindblad master-equation integration over piecewise-constant Hamiltonian
//! segments with thermal dissipators.
//!
//! dρ/dt = −i[H, ρ] + Σ_k r_k (L_k ρ L_k† − ½{L_k†L_k, ρ})
//!
//! Integration is fixed-step classical RK4; protocols are µs-scale with
//! MHz-scale dynamics, so 10³–10⁴ deterministic steps suffice and golden
//! tests stay exact. Stark-shift ramps are modeled as instantaneous frequency
//! jumps between segments.

mod generator;

use ndarray::Array2;
use num_complex::Complex64;

use crate::hilbert::{DensityMatrix, Operator};
use crate::model::{thermal_occupation, DeviceModel};
use crate::{Error, Result};

use generator::{snapshot, PackedLindbladian, PackedObservable, Rk4Workspace};

/// Trace drift at which integration aborts.
const TRACE_ABORT_TOL: f64 = 1e-6;

/// Decoherence rates, bath temperature, and residual mode occupations.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    /// Qubit energy relaxation time T1, µs.
    pub qubit_t1: f64,
    /// Qubit pure dephasing time Tφ, µs.
    pub qubit_tphi: f64,
    /// Effective qubit bath temperature, kelvin.
    pub bath_temp: f64,
    /// Per-mode phonon energy lifetimes, µs.
    pub phonon_t1: Vec<f64>,
    /// Per-mode residual thermal occupations.
    pub phonon_nbar: Vec<f64>,
}

impl NoiseModel {
    /// Reference noise parameters: T1 = 23.1 µs, Tφ = 17.1 µs, bath 45 mK,
    /// phonon lifetimes 150 µs (modes 1, 2, 3, 5) and 400 µs (mode 4),
    /// residual occupations 1e-4.
    pub fn five_mode_default() -> Self {
        Self {
            qubit_t1: 23.1,
            qubit_tphi: 17.1,
            bath_temp: 0.045,
            phonon_t1: vec![150.0, 150.0, 150.0, 400.0, 150.0],
            phonon_nbar: vec![1e-4; 5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubit_t1 <= 0.0 || self.qubit_tphi <= 0.0 {
            return Err(Error::Config("qubit T1 and Tφ must be positive".into()));
        }
        if self.bath_temp < 0.0 {
            return Err(Error::Config("bath temperature must be nonnegative".into()));
        }
        if self.phonon_t1.iter().any(|&t| t <= 0.0) {
            return Err(Error::Config("phonon lifetimes must be positive".into()));
        }
        if self.phonon_nbar.iter().any(|&n| !(0.0..1.0).contains(&n)) {
            return Err(Error::Config("phonon occupations must lie in [0, 1)".into()));
        }
        if self.phonon_t1.len() != self.phonon_nbar.len() {
            return Err(Error::DimensionMismatch {
                what: "phonon lifetimes vs occupations",
                left: self.phonon_t1.len(),
                right: self.phonon_nbar.len(),
            });
        }
        Ok(())
    }
}

/// A collapse channel: unscaled operator plus its rate; the dissipator is
/// rate · (LρL† − ½{L†L, ρ}).
#[derive(Debug, Clone)]
pub struct CollapseOp {
    pub label: String,
    pub operator: Operator,
    pub rate: f64,
}

/// A piecewise-constant evolution interval.
#[derive(Debug, Clone)]
pub struct Segment {
    pub hamiltonian: Operator,
    pub duration: f64,
    pub label: String,
}

impl Segment {
    pub fn new(hamiltonian: Operator, duration: f64, label: impl Into<String>) -> Result<Self> {
        if duration < 0.0 {
            return Err(Error::Config(format!("segment duration {duration} must be nonnegative")));
        }
        hamiltonian.assert_hermitian()?;
        Ok(Self { hamiltonian, duration, label: label.into() })
    }
}

/// Density-matrix snapshots at segment boundaries.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Boundary times, starting at 0; strictly increasing except across
    /// zero-duration segments.
    pub times: Vec<f64>,
    /// States at the corresponding times; `states[0]` is the initial state.
    pub states: Vec<DensityMatrix>,
    /// Label of the segment ending at `times[k+1]`.
    pub segment_labels: Vec<String>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// One observer sample per integration step.
#[derive(Debug, Clone)]
pub struct ObservedSample {
    pub time: f64,
    pub segment_index: usize,
    pub values: Vec<f64>,
}

/// Per-step expectation values of a set of hermitian observables.
#[derive(Debug, Clone)]
pub struct ObservedSeries {
    pub labels: Vec<String>,
    pub samples: Vec<ObservedSample>,
}

/// Thermal collapse channels of the full composite system:
/// qubit decay √(γ(1+n̄_q))·q, heating √(γ n̄_q)·q†, dephasing √(2γ_φ)·q†q,
/// and per mode decay √(κ_i(1+n̄_i))·a_i, heating √(κ_i n̄_i)·a_i†
/// with γ = 1/T1, γ_φ = 1/Tφ, n̄_q the Bose-Einstein occupation at the idle
/// qubit frequency, κ_i = 1/phonon_t1[i].
///
/// The dephasing convention √(2γ_φ)·q†q makes a two-level coherence decay
/// with pure-dephasing envelope e^(−t/Tφ).
pub fn collapse_operators(device: &DeviceModel, noise: &NoiseModel) -> Result<Vec<CollapseOp>> {
    device.validate()?;
    noise.validate()?;
    if noise.phonon_t1.len() != device.n_modes() {
        return Err(Error::DimensionMismatch {
            what: "noise mode entries vs device modes",
            left: noise.phonon_t1.len(),
            right: device.n_modes(),
        });
    }
    let dims = device.dims();
    let gamma = 1.0 / noise.qubit_t1;
    let gamma_phi = 1.0 / noise.qubit_tphi;
    let nbar_q = thermal_occupation(noise.bath_temp, device.qubit_freq)?;

    let q = crate::hilbert::embed(&crate::hilbert::annihilation(device.qubit_levels)?, 0, &dims)?;
    let nq = crate::hilbert::embed(&crate::hilbert::number(device.qubit_levels)?, 0, &dims)?;

    let mut ops = vec![
        CollapseOp { label: "qubit-decay".into(), operator: q.clone(), rate: gamma * (1.0 + nbar_q) },
        CollapseOp { label: "qubit-heating".into(), operator: q.dagger(), rate: gamma * nbar_q },
        CollapseOp { label: "qubit-dephasing".into(), operator: nq, rate: 2.0 * gamma_phi },
    ];
    for i in 0..device.n_modes() {
        let kappa = 1.0 / noise.phonon_t1[i];
        let nbar = noise.phonon_nbar[i];
        let a = crate::hilbert::embed(&crate::hilbert::annihilation(device.fock_dim)?, i + 1, &dims)?;
        ops.push(CollapseOp {
            label: format!("mode-{}-decay", i + 1),
            operator: a.clone(),
            rate: kappa * (1.0 + nbar),
        });
        ops.push(CollapseOp {
            label: format!("mode-{}-heating", i + 1),
            operator: a.dagger(),
            rate: kappa * nbar,
        });
    }
    Ok(ops)
}

/// Dense Lindblad right-hand side −i[H,ρ] + Σ_k r_k (L_k ρ L_k† − ½{L_k†L_k, ρ}).
///
/// Trace of the result vanishes and hermiticity is preserved. This is the
/// reference implementation; `evolve` runs a compiled sparse equivalent.
pub fn lindblad_rhs(
    h: &Operator,
    collapse: &[CollapseOp],
    rho: &DensityMatrix,
) -> Result<Array2<Complex64>> {
    h.assert_hermitian()?;
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            what: "hamiltonian vs state",
            left: h.dim(),
            right: rho.dim(),
        });
    }
    let i = Complex64::new(0.0, 1.0);
    let hm = h.matrix();
    let rm = rho.matrix();
    let mut out = hm.dot(rm);
    out = out - rm.dot(hm);
    out.mapv_inplace(|v| -i * v);

    for op in collapse {
        if op.rate == 0.0 {
            continue;
        }
        if op.operator.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                what: "collapse operator vs state",
                left: op.operator.dim(),
                right: rho.dim(),
            });
        }
        let l = op.operator.matrix();
        let l_dag = op.operator.dagger();
        let ldl = l_dag.matrix().dot(l);
        let jump = l.dot(rm).dot(l_dag.matrix());
        let anti = ldl.dot(rm) + rm.dot(&ldl);
        let rate = Complex64::new(op.rate, 0.0);
        out = out + (jump - anti.mapv(|v| v * 0.5)).mapv(|v| v * rate);
    }
    Ok(out)
}

fn validate_step(segments: &[Segment], step: f64) -> Result<()> {
    let shortest = segments
        .iter()
        .filter(|s| s.duration > 0.0)
        .map(|s| s.duration)
        .fold(f64::INFINITY, f64::min);
    if step <= 0.0 || (shortest.is_finite() && step > shortest / 10.0) {
        return Err(Error::InvalidStep { step, shortest });
    }
    Ok(())
}

fn run_evolution(
    segments: &[Segment],
    rho0: &DensityMatrix,
    collapse: &[CollapseOp],
    step: f64,
    observables: &[(String, Operator)],
) -> Result<(Trajectory, ObservedSeries)> {
    validate_step(segments, step)?;
    for seg in segments {
        if seg.hamiltonian.dim() != rho0.dim() {
            return Err(Error::DimensionMismatch {
                what: "segment hamiltonian vs state",
                left: seg.hamiltonian.dim(),
                right: rho0.dim(),
            });
        }
    }

    let dims = rho0.dims().to_vec();
    // Consecutive segments often share a Hamiltonian (ramp pad followed by
    // the swap at the same detuning); reuse the compiled generator then.
    let mut cached: Option<(Operator, PackedLindbladian)> = None;

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    let mut segment_labels = Vec::with_capacity(segments.len());
    let mut samples: Vec<ObservedSample> = Vec::new();

    // Packed state; initialized lazily from the first generator because the
    // packing layout belongs to it.
    let mut v: Option<Vec<Complex64>> = None;
    let mut t_now = 0.0;

    for (seg_idx, seg) in segments.iter().enumerate() {
        segment_labels.push(seg.label.clone());
        if seg.duration == 0.0 {
            times.push(t_now);
            states.push(states.last().unwrap().clone());
            continue;
        }
        let rebuild = match &cached {
            Some((prev, _)) => prev.matrix() != seg.hamiltonian.matrix(),
            None => true,
        };
        if rebuild {
            let gen = PackedLindbladian::build(&seg.hamiltonian, collapse)?;
            cached = Some((seg.hamiltonian.clone(), gen));
        }
        let gen = &cached.as_ref().unwrap().1;
        let mut state = match v.take() {
            Some(s) => s,
            None => gen.pack(rho0.matrix()),
        };
        let packed_obs: Vec<PackedObservable> = observables
            .iter()
            .map(|(_, op)| PackedObservable::prepare(op, gen))
            .collect::<Result<_>>()?;
        let mut ws = Rk4Workspace::new(gen.packed_len());

        let n_steps = (seg.duration / step).ceil() as usize;
        let dt = seg.duration / n_steps as f64;
        if seg_idx == 0 && !packed_obs.is_empty() {
            samples.push(ObservedSample {
                time: t_now,
                segment_index: seg_idx,
                values: packed_obs.iter().map(|o| o.evaluate(&state)).collect(),
            });
        }
        for k in 0..n_steps {
            ws.step(gen, &mut state, dt);
            t_now = times[times.len() - 1] + (k + 1) as f64 * dt;
            let drift = (gen.trace(&state) - 1.0).abs();
            if drift > TRACE_ABORT_TOL {
                return Err(Error::IntegrationFailure {
                    reason: format!(
                        "trace drift {drift:.3e} exceeded {TRACE_ABORT_TOL:.1e} in segment '{}'",
                        seg.label
                    ),
                });
            }
            if !packed_obs.is_empty() {
                samples.push(ObservedSample {
                    time: t_now,
                    segment_index: seg_idx,
                    values: packed_obs.iter().map(|o| o.evaluate(&state)).collect(),
                });
            }
        }
        times.push(t_now);
        states.push(snapshot(gen, &state, &driver.dims, TRACE_ABORT_TOL)?);
        v = Some(state);
    }

    let labels = observables.iter().map(|(l, _)| l.clone()).collect();
    Ok((Trajectory { times, states, segment_labels }, ObservedSeries { labels, samples }))
}

/// Integrate the master equation over `segments` from `rho0`, snapshotting
/// at each segment boundary.
///
/// `step` must be positive and at most a tenth of the shortest positive
/// segment. Trace drift beyond 1e-6 aborts with an integration failure.
pub fn evolve(
    segments: &[Segment],
    rho0: &DensityMatrix,
    collapse: &[CollapseOp],
    step: f64,
) -> Result<Trajectory> {
    run_evolution(segments, rho0, collapse, step, &[]).map(|(t, _)| t)
}

/// As [`evolve`], additionally recording expectation values of hermitian
/// `observables` at every integration step.
pub fn evolve_observed(
    segments: &[Segment],
    rho0: &DensityMatrix,
    collapse: &[CollapseOp],
    step: f64,
    observables: &[(String, Operator)],
) -> Result<(Trajectory, ObservedSeries)> {
    run_evolution(segments, rho0, collapse, step, observables)
}

/// Richardson-style step-convergence check: evolve at `step` and `step/2`
/// and return the largest absolute change of any boundary population
/// (diagonal entry).
pub fn step_convergence(
    segments: &[Segment],
    rho0: &DensityMatrix,
    collapse: &[CollapseOp],
    step: f64,
) -> Result<f64> {
    let full = evolve(segments, rho0, collapse, step)?;
    let half = evolve(segments, rho0, collapse, step / 2.0)?;
    let mut max_delta: f64 = 0.0;
    for (a, b) in full.states.iter().zip(&half.states) {
        for (pa, pb) in a.diagonal().iter().zip(b.diagonal()) {
            max_delta = max_delta.max((pa - pb).abs());
        }
    }
    Ok(max_delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        annihilation, embed, expectation, level_projector, number, DensityMatrix,
    };
    use crate::model::DeviceModel;
    use crate::units::{khz, mhz};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit_device() -> DeviceModel {
        // Two-level qubit with one far-detuned spectator mode.
        let mut d = DeviceModel::five_mode_default();
        d.mode_freqs = vec![d.qubit_freq - mhz(34.0)];
        d.couplings = vec![khz(300.0)];
        d.fock_dim = 2;
        d
    }

    #[test]
    fn zero_temperature_heating_rates_vanish() {
        let mut device = qubit_device();
        device.fock_dim = 2;
        let noise = NoiseModel {
            qubit_t1: 23.1,
            qubit_tphi: 17.1,
            bath_temp: 0.0,
            phonon_t1: vec![150.0],
            phonon_nbar: vec![0.0],
        };
        let ops = collapse_operators(&device, &noise).unwrap();
        for op in &ops {
            if op.label.contains("heating") {
                assert_eq!(op.rate, 0.0, "{}", op.label);
            } else {
                assert!(op.rate > 0.0, "{}", op.label);
            }
        }
    }

    #[test]
    fn rhs_vanishes_for_commuting_diagonal_inputs() {
        let h = Operator::new(
            vec![2],
            Array2::from_diag(&ndarray::arr1(&[c(1.0, 0.0), c(3.0, 0.0)])),
        )
        .unwrap();
        let rho = DensityMatrix::thermal_oscillator(2, 0.1).unwrap();
        let rhs = lindblad_rhs(&h, &[], &rho).unwrap();
        assert_eq!(rhs.iter().map(|v| v.norm()).sum::<f64>(), 0.0);
    }

    #[test]
    fn rhs_is_traceless_and_hermiticity_preserving() {
        let device = qubit_device();
        let noise = NoiseModel {
            qubit_t1: 23.1,
            qubit_tphi: 17.1,
            bath_temp: 0.045,
            phonon_t1: vec![150.0],
            phonon_nbar: vec![1e-4],
        };
        let h = crate::model::lab_hamiltonian(&device, -mhz(10.0)).unwrap();
        let ops = collapse_operators(&device, &noise).unwrap();
        let q = DensityMatrix::thermal_oscillator(2, 0.3).unwrap();
        let m = DensityMatrix::thermal_oscillator(2, 0.2).unwrap();
        let rho = DensityMatrix::product(&[&q, &m]).unwrap();
        let rhs = lindblad_rhs(&h, &ops, &rho).unwrap();
        let trace: Complex64 = rhs.diag().iter().sum();
        assert!(trace.norm() < 1e-10, "trace {trace}");
        for i in 0..rhs.nrows() {
            for j in i..rhs.ncols() {
                assert!((rhs[[i, j]] - rhs[[j, i]].conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn compiled_generator_matches_dense_rhs() {
        use super::generator::PackedLindbladian;
        let device = qubit_device();
        let noise = NoiseModel {
            qubit_t1: 23.1,
            qubit_tphi: 17.1,
            bath_temp: 0.045,
            phonon_t1: vec![150.0],
            phonon_nbar: vec![1e-4],
        };
        let h = crate::model::lab_hamiltonian(&device, -mhz(34.0)).unwrap();
        let ops = collapse_operators(&device, &noise).unwrap();
        // A state with off-diagonal structure.
        let amps: Vec<Complex64> =
            vec![c(0.6, 0.1), c(0.2, -0.3), c(0.5, 0.0), c(0.1, 0.4)];
        let rho = DensityMatrix::from_pure(&[2, 2], &amps).unwrap();

        let dense = lindblad_rhs(&h, &ops, &rho).unwrap();
        let gen = PackedLindbladian::build(&h, &ops).unwrap();
        let v = gen.pack(rho.matrix());
        let mut out = vec![c(0.0, 0.0); v.len()];
        gen.apply(&v, &mut out);
        let sparse = gen.unpack(&out);
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (dense[[i, j]] - sparse[[i, j]]).norm() < 1e-13,
                    "mismatch at ({i},{j}): {} vs {}",
                    dense[[i, j]],
                    sparse[[i, j]]
                );
            }
        }
    }

    #[test]
    fn dephasing_envelope_matches_analytic_rate() {
        // Coherence of (|g>+|e>)/√2 decays as e^(−t/Tφ) under the dephasing
        // operator alone.
        let tphi = 17.1;
        let dims = [2usize];
        let nq = number(2).unwrap();
        let ops = vec![CollapseOp {
            label: "dephasing".into(),
            operator: nq,
            rate: 2.0 / tphi,
        }];
        let rho0 = DensityMatrix::from_pure(&dims, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let h = Operator::zeros(vec![2]);
        let seg = Segment::new(h, tphi, "dephase").unwrap();
        let traj = evolve(&[seg], &rho0, &ops, 0.01).unwrap();
        let coherence = traj.final_state().matrix()[[0, 1]].norm();
        assert_abs_diff_eq!(coherence, 0.5 * (-1.0f64).exp(), epsilon = 1e-6);
    }

    #[test]
    fn free_decay_matches_exponential() {
        let t1 = 23.1;
        let dims = [2usize];
        let q = annihilation(2).unwrap();
        let ops = vec![CollapseOp { label: "decay".into(), operator: q, rate: 1.0 / t1 }];
        let rho0 = DensityMatrix::basis_state(&dims, &[1]).unwrap();
        let seg = Segment::new(Operator::zeros(vec![2]), t1, "decay").unwrap();
        let traj = evolve(&[seg], &rho0, &ops, 0.01).unwrap();
        let p_e = traj.final_state().matrix()[[1, 1]].re;
        assert_abs_diff_eq!(p_e, (-1.0f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn thermal_steady_state_detailed_balance() {
        // Up-rate γ n̄ and down-rate γ(1+n̄) settle at p_e = n̄/(1+2n̄).
        let nbar = 4.855e-3;
        let gamma = 1.0 / 23.1;
        let q = annihilation(2).unwrap();
        let ops = vec![
            CollapseOp { label: "down".into(), operator: q.clone(), rate: gamma * (1.0 + nbar) },
            CollapseOp { label: "up".into(), operator: q.dagger(), rate: gamma * nbar },
        ];
        let rho0 = DensityMatrix::basis_state(&[2], &[0]).unwrap();
        let seg = Segment::new(Operator::zeros(vec![2]), 10.0 * 23.1, "thermalize").unwrap();
        let traj = evolve(&[seg], &rho0, &ops, 0.05).unwrap();
        let p_e = traj.final_state().matrix()[[1, 1]].re;
        let expected = nbar / (1.0 + 2.0 * nbar);
        assert!((p_e - expected).abs() / expected < 0.01, "p_e={p_e}, expected={expected}");
    }

    #[test]
    fn empty_schedule_returns_initial_state() {
        let rho0 = DensityMatrix::basis_state(&[2], &[0]).unwrap();
        let traj = evolve(&[], &rho0, &[], 0.001).unwrap();
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.times, vec![0.0]);

        let zero = Segment::new(Operator::zeros(vec![2]), 0.0, "idle").unwrap();
        let traj = evolve(&[zero], &rho0, &[], 0.001).unwrap();
        assert_eq!(traj.states.len(), 2);
        assert_eq!(traj.times, vec![0.0, 0.0]);
    }

    #[test]
    fn resonant_vacuum_rabi_swap() {
        // Resonant JC for t = π/(2g) moves |e,0> to |g,1>.
        let g = khz(300.0);
        let mut device = qubit_device();
        device.mode_freqs = vec![device.qubit_freq];
        device.fock_dim = 3;
        let h = crate::model::lab_hamiltonian(&device, 0.0).unwrap();
        let dims = device.dims();
        let rho0 = DensityMatrix::basis_state(&dims, &[1, 0]).unwrap();
        let t_swap = std::f64::consts::PI / (2.0 * g);
        let seg = Segment::new(h, t_swap, "iswap").unwrap();
        let traj = evolve(&[seg], &rho0, &[], 0.001).unwrap();
        let p_mode = expectation(
            &level_projector(&dims, 1, 1).unwrap(),
            traj.final_state(),
        )
        .unwrap();
        assert!(p_mode >= 0.999, "transfer {p_mode}");
        assert!((1.0 - p_mode) < 1e-6, "infidelity {}", 1.0 - p_mode);
        // Unitary evolution preserves purity.
        assert_abs_diff_eq!(traj.final_state().purity(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn step_precondition_enforced() {
        let seg = Segment::new(Operator::zeros(vec![2]), 1.0, "idle").unwrap();
        let rho0 = DensityMatrix::basis_state(&[2], &[0]).unwrap();
        assert!(matches!(
            evolve(&[seg.clone()], &rho0, &[], 0.2),
            Err(Error::InvalidStep { .. })
        ));
        assert!(matches!(
            evolve(&[seg], &rho0, &[], -0.001),
            Err(Error::InvalidStep { .. })
        ));
    }

    #[test]
    fn unstable_step_reports_integration_failure() {
        // A rate far above 1/step makes fixed-step RK4 blow up; the driver
        // must abort with an integration failure rather than return garbage.
        let q = annihilation(2).unwrap();
        let ops = vec![CollapseOp { label: "fast".into(), operator: q, rate: 5e4 }];
        let rho0 = DensityMatrix::basis_state(&[2], &[1]).unwrap();
        let seg = Segment::new(Operator::zeros(vec![2]), 0.01, "violent").unwrap();
        let res = evolve(&[seg], &rho0, &ops, 1e-3);
        assert!(matches!(res, Err(Error::IntegrationFailure { .. })), "{res:?}");
    }

    #[test]
    fn observer_records_every_step() {
        let g = khz(300.0);
        let mut device = qubit_device();
        device.mode_freqs = vec![device.qubit_freq];
        let h = crate::model::lab_hamiltonian(&device, 0.0).unwrap();
        let dims = device.dims();
        let rho0 = DensityMatrix::basis_state(&dims, &[1, 0]).unwrap();
        let t_swap = std::f64::consts::PI / (2.0 * g);
        let seg = Segment::new(h, t_swap, "iswap").unwrap();
        let obs = vec![("p_e".to_string(), level_projector(&dims, 0, 1).unwrap())];
        let (_, series) = evolve_observed(&[seg], &rho0, &[], t_swap / 100.0, &obs).unwrap();
        assert_eq!(series.samples.len(), 101); // initial point + 100 steps
        assert_abs_diff_eq!(series.samples[0].values[0], 1.0, epsilon = 1e-12);
        assert!(series.samples.last().unwrap().values[0] < 1e-4);
    }

    #[test]
    fn step_convergence_reports_small_delta_for_smooth_problem() {
        let t1 = 23.1;
        let q = annihilation(2).unwrap();
        let ops = vec![CollapseOp { label: "decay".into(), operator: q, rate: 1.0 / t1 }];
        let rho0 = DensityMatrix::basis_state(&[2], &[1]).unwrap();
        let seg = Segment::new(Operator::zeros(vec![2]), 1.0, "decay").unwrap();
        let delta = step_convergence(&[seg], &rho0, &ops, 0.01).unwrap();
        assert!(delta < 1e-10, "delta {delta}");
    }

    #[test]
    fn embedded_mode_decay_acts_only_on_its_mode() {
        // Sanity on embedding order: decay on mode 2 of (qubit, m1, m2).
        let dims = [2usize, 2, 2];
        let a2 = embed(&annihilation(2).unwrap(), 2, &dims).unwrap();
        let ops = vec![CollapseOp { label: "m2".into(), operator: a2, rate: 1.0 }];
        let rho0 = DensityMatrix::basis_state(&dims, &[0, 1, 1]).unwrap();
        let seg = Segment::new(Operator::zeros(dims.to_vec()), 3.0, "relax").unwrap();
        let traj = evolve(&[seg], &rho0, &ops, 0.01).unwrap();
        let p_m1 = expectation(&level_projector(&dims, 1, 1).unwrap(), traj.final_state()).unwrap();
        let p_m2 = expectation(&level_projector(&dims, 2, 1).unwrap(), traj.final_state()).unwrap();
        assert_abs_diff_eq!(p_m1, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p_m2, (-3.0f64).exp(), epsilon = 1e-6);
    }
}
