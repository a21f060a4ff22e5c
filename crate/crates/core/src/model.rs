//! Physical Hamiltonians of the transmon–multimode-phonon system and the
//! dispersive (Schrieffer-Wolff) effective parameters derived from them.
//!
//! All frequencies are angular (rad/µs). Hamiltonians are built in a rotating
//! frame so that absolute GHz-scale values never enter matrix elements; the
//! default reference is the unshifted qubit frequency.

use num_complex::Complex64;

use crate::hilbert::{annihilation, embed, number, Operator};
use crate::units::{angular_per_second, HBAR, KB};
use crate::{units, Error, Result};

/// Frequencies, couplings and truncations of the transmon plus N phonon
/// modes.
#[derive(Debug, Clone)]
pub struct DeviceModel {
    /// Idle (zero-Stark-shift) qubit angular frequency, rad/µs.
    pub qubit_freq: f64,
    /// Transmon anharmonicity α (> 0; enters as -α/2 q†²q²), rad/µs.
    pub anharmonicity: f64,
    /// Phonon mode angular frequencies, rad/µs, labeled in order of
    /// increasing detuning from the idle qubit frequency.
    pub mode_freqs: Vec<f64>,
    /// Qubit–mode couplings g_i, rad/µs.
    pub couplings: Vec<f64>,
    /// Free spectral range of the phonon resonator, rad/µs.
    pub fsr: f64,
    /// Qubit truncation (≥ 2; 2 for the reset protocol, 3 for RPM studies).
    pub qubit_levels: usize,
    /// Fock truncation per phonon mode (≥ 2).
    pub fock_dim: usize,
}

impl DeviceModel {
    /// Default five-mode device: qubit idling at 5.000 GHz, mode i at
    /// ω_q − (8.8 + (i−1)·12.6) MHz, couplings 2π·300 kHz, FSR 12.6 MHz.
    /// This grid puts mode 3 at −34.0 MHz and modes 1↔3 a distance of
    /// 25.2 MHz apart.
    pub fn five_mode_default() -> Self {
        let qubit_freq = units::ghz(5.0);
        let fsr = units::mhz(12.6);
        let first_offset = units::mhz(8.8);
        let mode_freqs: Vec<f64> =
            (0..5).map(|i| qubit_freq - first_offset - i as f64 * fsr).collect();
        Self {
            qubit_freq,
            anharmonicity: units::mhz(200.0),
            mode_freqs,
            couplings: vec![units::khz(300.0); 5],
            fsr,
            qubit_levels: 2,
            fock_dim: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubit_levels < 2 {
            return Err(Error::InvalidDimension {
                what: "qubit levels",
                dim: self.qubit_levels,
                min: 2,
            });
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidDimension { what: "fock dimension", dim: self.fock_dim, min: 2 });
        }
        if self.mode_freqs.len() != self.couplings.len() {
            return Err(Error::DimensionMismatch {
                what: "mode frequencies vs couplings",
                left: self.mode_freqs.len(),
                right: self.couplings.len(),
            });
        }
        if self.couplings.iter().any(|&g| g <= 0.0) {
            return Err(Error::Config("all couplings must be positive".into()));
        }
        if self.fsr <= 0.0 {
            return Err(Error::Config("free spectral range must be positive".into()));
        }
        // Mode labels run in order of increasing detuning from the idle qubit.
        let dets: Vec<f64> = self.mode_freqs.iter().map(|&w| (self.qubit_freq - w).abs()).collect();
        if dets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "mode frequencies must be strictly ordered by |qubit detuning|".into(),
            ));
        }
        Ok(())
    }

    /// Number of phonon modes.
    pub fn n_modes(&self) -> usize {
        self.mode_freqs.len()
    }

    /// Subsystem dimensions, (qubit, mode 1, mode 2, ...).
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.qubit_levels];
        dims.extend(std::iter::repeat(self.fock_dim).take(self.n_modes()));
        dims
    }

    /// Detuning ω_i − ω_q of mode `index` (0-based) from the idle qubit.
    pub fn mode_detuning(&self, index: usize) -> Result<f64> {
        if index >= self.n_modes() {
            return Err(Error::InvalidSubsystem { index, n_subsystems: self.n_modes() });
        }
        Ok(self.mode_freqs[index] - self.qubit_freq)
    }

    /// Restriction to a single mode (for driven single-mode studies).
    pub fn single_mode(&self, index: usize) -> Result<DeviceModel> {
        if index >= self.n_modes() {
            return Err(Error::InvalidSubsystem { index, n_subsystems: self.n_modes() });
        }
        Ok(DeviceModel {
            qubit_freq: self.qubit_freq,
            anharmonicity: self.anharmonicity,
            mode_freqs: vec![self.mode_freqs[index]],
            couplings: vec![self.couplings[index]],
            fsr: self.fsr,
            qubit_levels: self.qubit_levels,
            fock_dim: self.fock_dim,
        })
    }
}

/// A single-tone qubit drive: amplitude Ω, frequency ω_d (both rad/µs).
#[derive(Debug, Clone, Copy)]
pub struct DriveConfig {
    pub amplitude: f64,
    pub frequency: f64,
    pub duration: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.amplitude < 0.0 {
            return Err(Error::Config("drive amplitude must be nonnegative".into()));
        }
        if self.duration <= 0.0 {
            return Err(Error::Config("drive duration must be positive".into()));
        }
        Ok(())
    }

    /// Duration of a π pulse under H = ... + Ω(σ₊+σ₋): t_π = π/(2Ω).
    pub fn pi_pulse_duration(amplitude: f64) -> f64 {
        std::f64::consts::PI / (2.0 * amplitude)
    }
}

/// Dispersive-regime effective parameters of a driven qubit–mode pair.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveParams {
    /// Dispersive shift χ = g²/Δ.
    pub chi: f64,
    /// Lamb-shifted qubit detuning Δ̃_q = Δ_q + χ for a drive resonant with
    /// the bare qubit (Δ_q = 0).
    pub lamb_shifted_detuning: f64,
    /// Qubit-state-dependent displacement coefficient gΩ/Δ.
    pub displacement_coeff: f64,
    /// Amplitude of the driven mode response, gΩ/Δ².
    pub response_amplitude: f64,
    /// Residual mode population from the displacement, (gΩ/Δ²)².
    pub spurious_population: f64,
    /// Dispersive validity ratio g/|Δ| for caller checks.
    pub dispersive_ratio: f64,
}

/// Multimode Jaynes-Cummings Hamiltonian in a rotating frame:
///
/// H = (ω_q + δ_s − ω_ref) q†q − (α/2) q†²q² + Σ (ω_i − ω_ref) a_i†a_i
///     + Σ g_i (a_i q† + a_i† q)
///
/// `stark_shift` shifts the qubit frequency additively (may be negative);
/// `frame_reference` is the rotation frequency (total-excitation frame, which
/// leaves the couplings static).
pub fn lab_hamiltonian_in_frame(
    device: &DeviceModel,
    stark_shift: f64,
    frame_reference: f64,
) -> Result<Operator> {
    device.validate()?;
    let dims = device.dims();
    let q = embed(&annihilation(device.qubit_levels)?, 0, &dims)?;
    let q_dag = q.dagger();
    let nq = embed(&number(device.qubit_levels)?, 0, &dims)?;

    let mut h = nq.scale_re(device.qubit_freq + stark_shift - frame_reference);
    if device.qubit_levels > 2 {
        // -(α/2) q†²q² = -(α/2) n(n-1); vanishes identically on 2 levels.
        let n2 = nq.matmul(&nq);
        let anh = &n2 - &nq;
        h = &h - &anh.scale_re(device.anharmonicity / 2.0);
    }
    for (i, (&w, &g)) in device.mode_freqs.iter().zip(&device.couplings).enumerate() {
        let a = embed(&annihilation(device.fock_dim)?, i + 1, &dims)?;
        let na = embed(&number(device.fock_dim)?, i + 1, &dims)?;
        h = &h + &na.scale_re(w - frame_reference);
        let coupling = &a.matmul(&q_dag) + &a.dagger().matmul(&q);
        h = &h + &coupling.scale_re(g);
    }
    h.assert_hermitian()?;
    Ok(h)
}

/// [`lab_hamiltonian_in_frame`] with the default frame, the unshifted qubit
/// frequency.
pub fn lab_hamiltonian(device: &DeviceModel, stark_shift: f64) -> Result<Operator> {
    lab_hamiltonian_in_frame(device, stark_shift, device.qubit_freq)
}

/// Driven single-mode Hamiltonian in the frame rotating at the drive
/// frequency, after the rotating-wave approximation:
///
/// H = (Δ_q/2) σ_z + Δ_r a†a + g (a σ₊ + a† σ₋) + Ω (σ₊ + σ₋)
///
/// with Δ_q = ω_q − ω_d, Δ_r = ω_r − ω_d. The qubit is treated as two-level;
/// σ_z = |e⟩⟨e| − |g⟩⟨g| so that the excited state carries +Δ_q/2.
pub fn rwa_hamiltonian(device: &DeviceModel, drive: &DriveConfig) -> Result<Operator> {
    drive.validate()?;
    if device.n_modes() != 1 {
        return Err(Error::Config(format!(
            "rwa_hamiltonian requires a single-mode device, got {} modes",
            device.n_modes()
        )));
    }
    let dims = vec![2usize, device.fock_dim];
    let dq = device.qubit_freq - drive.frequency;
    let dr = device.mode_freqs[0] - drive.frequency;
    let g = device.couplings[0];

    let q = embed(&annihilation(2)?, 0, &dims)?;
    let q_dag = q.dagger();
    let a = embed(&annihilation(device.fock_dim)?, 1, &dims)?;
    let nq = embed(&number(2)?, 0, &dims)?;
    let na = embed(&number(device.fock_dim)?, 1, &dims)?;

    // (Δ_q/2) σ_z = Δ_q (q†q − 1/2); the constant offset is dropped.
    let mut h = nq.scale_re(dq);
    h = &h + &na.scale_re(dr);
    let jc = &a.matmul(&q_dag) + &a.dagger().matmul(&q);
    h = &h + &jc.scale_re(g);
    let rabi = &q_dag + &q;
    h = &h + &rabi.scale_re(drive.amplitude);
    h.assert_hermitian()?;
    Ok(h)
}

/// Dispersive-frame effective Hamiltonian of the driven qubit–mode pair for a
/// drive resonant with the Lamb-shifted qubit (Δ̃_q = 0):
///
/// H = Δ_r a†a + χ a†a σ_z + Ω (σ₊ + σ₋) + (gΩ/Δ)(a + a†) σ_z
pub fn dispersive_hamiltonian(device: &DeviceModel, drive: &DriveConfig) -> Result<Operator> {
    drive.validate()?;
    if device.n_modes() != 1 {
        return Err(Error::Config(format!(
            "dispersive_hamiltonian requires a single-mode device, got {} modes",
            device.n_modes()
        )));
    }
    let delta = device.qubit_freq - device.mode_freqs[0];
    let params = schrieffer_wolff_params(device.couplings[0], delta, drive.amplitude)?;
    let dr = device.mode_freqs[0] - drive.frequency;
    let dims = vec![2usize, device.fock_dim];

    let q = embed(&annihilation(2)?, 0, &dims)?;
    let q_dag = q.dagger();
    let a = embed(&annihilation(device.fock_dim)?, 1, &dims)?;
    let na = embed(&number(device.fock_dim)?, 1, &dims)?;
    // σ_z = 2 q†q − 1 in the (g, e) ordering.
    let sz = &embed(&number(2)?, 0, &dims)?.scale_re(2.0) - &Operator::identity(dims.clone());

    let mut h = na.scale_re(dr);
    h = &h + &na.matmul(&sz).scale_re(params.chi);
    let rabi = &q_dag + &q;
    h = &h + &rabi.scale_re(drive.amplitude);
    let displacement = (&a + &a.dagger()).matmul(&sz);
    h = &h + &displacement.scale_re(params.displacement_coeff);
    h.assert_hermitian()?;
    Ok(h)
}

/// Schrieffer-Wolff effective parameters for coupling g, qubit–mode detuning
/// Δ = ω_q − ω_r, and drive amplitude Ω.
pub fn schrieffer_wolff_params(g: f64, delta: f64, omega: f64) -> Result<EffectiveParams> {
    if delta == 0.0 {
        return Err(Error::Domain(
            "dispersive expansion undefined at zero qubit-mode detuning".into(),
        ));
    }
    let chi = g * g / delta;
    let displacement_coeff = g * omega / delta;
    let response_amplitude = g * omega / (delta * delta);
    Ok(EffectiveParams {
        chi,
        lamb_shifted_detuning: chi,
        displacement_coeff,
        response_amplitude,
        spurious_population: response_amplitude * response_amplitude,
        dispersive_ratio: (g / delta).abs(),
    })
}

/// Bose-Einstein occupation n̄ = 1/(exp(ħω/k_B T) − 1) for temperature in
/// kelvin and angular frequency in rad/µs. Returns 0 at T = 0.
pub fn thermal_occupation(temperature: f64, frequency: f64) -> Result<f64> {
    if frequency <= 0.0 {
        return Err(Error::Domain(format!(
            "thermal occupation requires positive frequency, got {frequency}"
        )));
    }
    if temperature < 0.0 {
        return Err(Error::Domain(format!(
            "thermal occupation requires nonnegative temperature, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * angular_per_second(frequency) / (KB * temperature);
    Ok(1.0 / x.exp_m1())
}
