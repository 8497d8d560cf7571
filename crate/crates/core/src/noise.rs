//! Density-matrix evaluation with T1 relaxation, pure dephasing and readout
//! error. Noise is applied as a discrete channel after each pulse; at
//! tau/T1 ~ 5e-4 per pulse the splitting error is negligible next to the
//! effects being modeled.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::sequences::Sequence;
use crate::su2::{pulse_propagator, ErrorPoint, Unitary2};
use crate::{Error, Result};

/// Decoherence and readout parameters. Defaults are the calibration values
/// of the qubit the embedded tables were measured on: T1 = 203.44 us,
/// T2 = 301.91 us, 100 ns pi-pulse duration, 3.57% readout error applied
/// symmetrically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseParams {
    /// Relaxation time in seconds.
    pub t1: f64,
    /// Coherence time in seconds (t2 <= 2 t1).
    pub t2: f64,
    /// Duration of a nominal pi pulse, in seconds.
    pub pulse_duration: f64,
    /// Probability of reading |0> as |1>.
    pub readout_error_up: f64,
    /// Probability of reading |1> as |0>.
    pub readout_error_down: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            t1: 203.44e-6,
            t2: 301.91e-6,
            pulse_duration: 100e-9,
            readout_error_up: 0.0357,
            readout_error_down: 0.0357,
        }
    }
}

impl NoiseParams {
    /// Noiseless limit: infinite coherence times, perfect readout.
    pub fn noiseless() -> Self {
        Self {
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            pulse_duration: 100e-9,
            readout_error_up: 0.0,
            readout_error_down: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidNoiseParams(m));
        // infinity is allowed: it is the noiseless limit
        let positive = |t: f64| !t.is_nan() && t > 0.0;
        if !positive(self.t1) || !positive(self.t2) || !positive(self.pulse_duration) {
            return bad("times must be positive".into());
        }
        if self.t2 > 2.0 * self.t1 {
            return bad(format!("t2 = {} exceeds 2 t1 = {}", self.t2, 2.0 * self.t1));
        }
        for r in [self.readout_error_up, self.readout_error_down] {
            if !(0.0..0.5).contains(&r) {
                return bad(format!("readout error {r} outside [0, 0.5)"));
            }
        }
        Ok(())
    }

    /// Pure-dephasing rate 1/T2 - 1/(2 T1).
    pub fn pure_dephasing_rate(&self) -> f64 {
        let r = 1.0 / self.t2 - 1.0 / (2.0 * self.t1);
        r.max(0.0)
    }

    /// Map an ideal excited-state population through the readout error.
    /// Affine and not an involution; applied exactly once per evaluation.
    pub fn apply_readout(&self, p: f64) -> f64 {
        p * (1.0 - self.readout_error_down) + (1.0 - p) * self.readout_error_up
    }
}

/// 2x2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Density2 {
    /// Ground state |0><0|.
    pub fn ground() -> Self {
        Self {
            a11: Complex64::new(1.0, 0.0),
            a12: Complex64::new(0.0, 0.0),
            a21: Complex64::new(0.0, 0.0),
            a22: Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    /// Excited-state population <1|rho|1>.
    pub fn excited_population(&self) -> f64 {
        self.a22.re
    }

    /// rho -> U rho U^dag.
    pub fn evolve(&self, u: &Unitary2) -> Density2 {
        // rows of U rho
        let b11 = u.a11 * self.a11 + u.a12 * self.a21;
        let b12 = u.a11 * self.a12 + u.a12 * self.a22;
        let b21 = u.a21 * self.a11 + u.a22 * self.a21;
        let b22 = u.a21 * self.a12 + u.a22 * self.a22;
        let d = u.dagger();
        Density2 {
            a11: b11 * d.a11 + b12 * d.a21,
            a12: b11 * d.a12 + b12 * d.a22,
            a21: b21 * d.a11 + b22 * d.a21,
            a22: b21 * d.a12 + b22 * d.a22,
        }
    }

    /// Amplitude damping with decay probability gamma (|1> -> |0>).
    pub fn amplitude_damping(&self, gamma: f64) -> Density2 {
        let s = (1.0 - gamma).sqrt();
        Density2 {
            a11: self.a11 + gamma * self.a22,
            a12: s * self.a12,
            a21: s * self.a21,
            a22: (1.0 - gamma) * self.a22,
        }
    }

    /// Pure dephasing multiplying coherences by `factor` in [0, 1].
    pub fn dephasing(&self, factor: f64) -> Density2 {
        Density2 {
            a11: self.a11,
            a12: factor * self.a12,
            a21: factor * self.a21,
            a22: self.a22,
        }
    }
}

/// Transition probability of a full sequence under decoherence and readout
/// error. Starts from |0><0|; each pulse applies its ideal unitary followed
/// by amplitude-damping and pure-dephasing channels for the pulse duration,
/// and the final excited population is mapped through the readout error.
pub fn noisy_transition_probability(
    seq: &Sequence,
    e: &ErrorPoint,
    params: &NoiseParams,
) -> Result<f64> {
    params.validate()?;
    let rate_phi = params.pure_dephasing_rate();
    let mut rho = Density2::ground();
    for pulse in &seq.pulses {
        let u = pulse_propagator(pulse, e)?;
        rho = rho.evolve(&u);
        let tau = pulse.duration_fraction() * params.pulse_duration;
        let gamma = 1.0 - (-tau / params.t1).exp();
        rho = rho.amplitude_damping(gamma);
        rho = rho.dephasing((-tau * rate_phi).exp());
    }
    Ok(params.apply_readout(rho.excited_population().clamp(0.0, 1.0)))
}
