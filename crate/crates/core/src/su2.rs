//! Exact SU(2) propagators for rectangular pulses and their composition.
//!
//! Sign convention: a pulse of area `A` at phase `phi`, Rabi error `eps`
//! and detuning `delta` (in units of the nominal Rabi frequency) evolves
//! the state by `U = exp(-i H tau)` with
//! `H = 1/2 [[-D, W e^{i phi}], [W e^{-i phi}, D]]`,
//! `W = (1 + eps) A / tau`, `D = delta * A / tau`. At `eps = delta = 0`,
//! `phi = 0`, `A = pi` this maps |0> to -i|1>.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Round to 12 significant digits, the precision of all serialized phases.
///
/// Idempotent: re-parsing the 12-digit decimal representation recovers the
/// same f64, which is what makes sequence export/import bit-exact.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

/// Format with 12 significant digits, matching [`round_sig12`].
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// One rectangular drive segment. Areas and phases are stored in units of
/// pi; the duration fraction (relative to the nominal pi-pulse duration)
/// equals the area in pi units by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    /// Nominal pulse area in units of pi (1 for B pulses, 1/2 for A pulses).
    pub area_pi: f64,
    /// Phase in units of pi, canonicalized to [0, 2).
    pub phase_pi: f64,
}

impl Pulse {
    pub fn new(area_pi: f64, phase_pi: f64) -> Self {
        assert!(area_pi > 0.0, "pulse area must be positive");
        Self {
            area_pi,
            phase_pi: canonical_phase_pi(phase_pi),
        }
    }

    /// Nominal pi pulse (a `B` pulse).
    pub fn pi(phase_pi: f64) -> Self {
        Self::new(1.0, phase_pi)
    }

    /// Nominal half-pi pulse (an `A` pulse).
    pub fn half_pi(phase_pi: f64) -> Self {
        Self::new(0.5, phase_pi)
    }

    /// Area in radians.
    pub fn area(&self) -> f64 {
        self.area_pi * std::f64::consts::PI
    }

    /// Phase in radians.
    pub fn phase(&self) -> f64 {
        self.phase_pi * std::f64::consts::PI
    }

    /// Duration as a fraction of the nominal pi-pulse duration.
    pub fn duration_fraction(&self) -> f64 {
        self.area_pi
    }
}

/// Reduce a phase (pi units) into [0, 2) and round to 12 significant digits.
pub fn canonical_phase_pi(phase_pi: f64) -> f64 {
    let mut p = phase_pi.rem_euclid(2.0);
    if p == 2.0 {
        p = 0.0;
    }
    round_sig12(p)
}

/// Relative Rabi-frequency deviation and detuning in units of the nominal
/// Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub epsilon: f64,
    pub delta: f64,
}

impl ErrorPoint {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self { epsilon, delta }
    }

    /// Pure Rabi error on resonance.
    pub fn rabi(epsilon: f64) -> Self {
        Self::new(epsilon, 0.0)
    }

    pub const IDEAL: ErrorPoint = ErrorPoint {
        epsilon: 0.0,
        delta: 0.0,
    };
}

/// Complex 2x2 matrix holding a (near-)unitary propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Unitary2 {
    pub const IDENTITY: Unitary2 = Unitary2 {
        a11: Complex64::new(1.0, 0.0),
        a12: Complex64::new(0.0, 0.0),
        a21: Complex64::new(0.0, 0.0),
        a22: Complex64::new(1.0, 0.0),
    };

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Unitary2) -> Unitary2 {
        Unitary2 {
            a11: self.a11 * rhs.a11 + self.a12 * rhs.a21,
            a12: self.a11 * rhs.a12 + self.a12 * rhs.a22,
            a21: self.a21 * rhs.a11 + self.a22 * rhs.a21,
            a22: self.a21 * rhs.a12 + self.a22 * rhs.a22,
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Unitary2 {
        Unitary2 {
            a11: self.a11.conj(),
            a12: self.a21.conj(),
            a21: self.a12.conj(),
            a22: self.a22.conj(),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Max entry of |U^dag U - I|. Zero for an exactly unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.dagger().mul(self);
        let one = Complex64::new(1.0, 0.0);
        [
            (g.a11 - one).norm(),
            g.a12.norm(),
            g.a21.norm(),
            (g.a22 - one).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Validation: unitary and unimodular within `tol` per entry.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol && (self.det().norm() - 1.0).abs() <= tol
    }
}

/// Propagator of a single rectangular pulse.
///
/// Closed form of `exp(-i H tau)`:
/// `U = cos(h) I - i sin(h)/h (kx sx + ky sy + kz sz)` with
/// `kx = a cos(phi)/2`, `ky = -a sin(phi)/2`, `kz = -b/2`,
/// `a = (1 + eps) A`, `b = delta A`, `h = sqrt(kx^2 + ky^2 + kz^2)`.
pub fn pulse_propagator(pulse: &Pulse, e: &ErrorPoint) -> Result<Unitary2> {
    if e.epsilon < -1.0 {
        return Err(Error::EpsilonBelowZeroField(e.epsilon));
    }
    Ok(pulse_propagator_unchecked(pulse, e))
}

/// Same closed form without the domain check. The solver uses this through
/// reflection identities that keep the physical inputs in range.
pub(crate) fn pulse_propagator_unchecked(pulse: &Pulse, e: &ErrorPoint) -> Unitary2 {
    let area = pulse.area();
    let phi = pulse.phase();
    let a = (1.0 + e.epsilon) * area;
    let b = e.delta * area;
    let kx = a * phi.cos() / 2.0;
    let ky = -a * phi.sin() / 2.0;
    let kz = -b / 2.0;
    let h = (kx * kx + ky * ky + kz * kz).sqrt();
    let c = h.cos();
    let s = sinc(h);
    let i = Complex64::i();
    Unitary2 {
        a11: Complex64::new(c, 0.0) - i * s * kz,
        a12: -i * s * Complex64::new(kx, -ky),
        a21: -i * s * Complex64::new(kx, ky),
        a22: Complex64::new(c, 0.0) + i * s * kz,
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Ordered product `U_N ... U_1`: the first propagator in the list acts
/// first on the state.
pub fn compose(props: &[Unitary2]) -> Result<Unitary2> {
    if props.is_empty() {
        return Err(Error::EmptyComposition);
    }
    let mut total = props[0];
    for u in &props[1..] {
        total = u.mul(&total);
    }
    Ok(total)
}

/// Transition probability |<1|U|0>|^2 = |a21|^2, clamped to [0, 1].
///
/// Clamping only irons out rounding; excursions beyond 1e-9 indicate a
/// logic error upstream and are caught in debug builds.
pub fn transition_probability(u: &Unitary2) -> f64 {
    let p = u.a21.norm_sqr();
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&p), "p = {p} out of range");
    p.clamp(0.0, 1.0)
}
