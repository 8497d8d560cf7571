//! Constructors for the composite-pulse families: broadband, narrowband,
//! passband (nested), universal, and theta pulses locking the transition
//! probability at a chosen partial value.

use serde::{Deserialize, Serialize};

use crate::su2::{
    self, canonical_phase_pi, compose, format_sig12, pulse_propagator, transition_probability,
    ErrorPoint, Pulse, Unitary2,
};
use crate::tables;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Bb,
    Nb,
    PbBofN,
    PbNofB,
    Universal,
    ThetaBb,
    ThetaNb,
    ThetaPb,
    Single,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Bb => "bb",
            Family::Nb => "nb",
            Family::PbBofN => "pb-bn",
            Family::PbNofB => "pb-nb",
            Family::Universal => "universal",
            Family::ThetaBb => "theta-bb",
            Family::ThetaNb => "theta-nb",
            Family::ThetaPb => "theta-pb",
            Family::Single => "single",
        }
    }
}

/// An ordered composite sequence plus its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub label: String,
    pub family: Family,
    /// Target transition probability at zero error (1 for pi-pulse families).
    pub target_p: f64,
    pub pulses: Vec<Pulse>,
}

impl Sequence {
    pub fn n_pulses(&self) -> usize {
        self.pulses.len()
    }

    /// Total propagator at the given error point (first pulse acts first).
    pub fn propagator(&self, e: &ErrorPoint) -> Result<Unitary2> {
        let props = self
            .pulses
            .iter()
            .map(|p| pulse_propagator(p, e))
            .collect::<Result<Vec<_>>>()?;
        compose(&props)
    }

    /// Transition probability at the given error point.
    pub fn probability(&self, e: &ErrorPoint) -> Result<f64> {
        Ok(transition_probability(&self.propagator(e)?))
    }

    /// Serialize to the sequence-document JSON schema. Phases and areas are
    /// in units of pi with 12 significant digits; output is deterministic.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\"label\":");
        out.push_str(&serde_json::to_string(&self.label).unwrap());
        out.push_str(",\"family\":\"");
        out.push_str(self.family.as_str());
        out.push_str("\",\"target_p\":");
        out.push_str(&format_sig12(self.target_p));
        out.push_str(",\"pulses\":[");
        for (i, p) in self.pulses.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("{\"area_pi_units\":");
            out.push_str(&format_sig12(p.area_pi));
            out.push_str(",\"phase_pi_units\":");
            out.push_str(&format_sig12(p.phase_pi));
            out.push('}');
        }
        out.push_str("]}");
        out
    }

    /// Parse a sequence document produced by [`Sequence::to_json`].
    pub fn from_json(doc: &str) -> Result<Sequence> {
        #[derive(Deserialize)]
        struct PulseDoc {
            area_pi_units: f64,
            phase_pi_units: f64,
        }
        #[derive(Deserialize)]
        struct SeqDoc {
            label: String,
            family: Family,
            target_p: f64,
            pulses: Vec<PulseDoc>,
        }
        let doc: SeqDoc = serde_json::from_str(doc)?;
        if doc.pulses.is_empty() {
            return Err(Error::MalformedSequence("empty pulse list".into()));
        }
        for p in &doc.pulses {
            if !(p.area_pi_units.is_finite() && p.area_pi_units > 0.0)
                || !(0.0..2.0).contains(&p.phase_pi_units)
            {
                return Err(Error::MalformedSequence(format!(
                    "pulse out of range: area {} pi, phase {} pi",
                    p.area_pi_units, p.phase_pi_units
                )));
            }
        }
        Ok(Sequence {
            label: doc.label,
            family: doc.family,
            target_p: doc.target_p,
            pulses: doc
                .pulses
                .into_iter()
                .map(|p| Pulse::new(p.area_pi_units, p.phase_pi_units))
                .collect(),
        })
    }
}

fn check_odd(family: &'static str, n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidSequenceLength {
            family,
            n,
            reason: "length must be odd and at least 3",
        });
    }
    Ok(())
}

/// Broadband phases phi_k = k(k-1) pi / N, k = 1..N, in units of pi.
pub fn bb_phases(n: usize) -> Result<Vec<f64>> {
    check_odd("bb", n)?;
    Ok((1..=n)
        .map(|k| canonical_phase_pi(((k * (k - 1)) % (2 * n)) as f64 / n as f64))
        .collect())
}

/// Narrowband phases: k pi / N for even k, -(k-1) pi / N for odd k,
/// in units of pi. Supports extreme lengths (N = 1001 and beyond).
pub fn nb_phases(n: usize) -> Result<Vec<f64>> {
    check_odd("nb", n)?;
    Ok((1..=n)
        .map(|k| {
            if k % 2 == 0 {
                canonical_phase_pi(k as f64 / n as f64)
            } else {
                canonical_phase_pi(((2 * n - (k - 1)) % (2 * n)) as f64 / n as f64)
            }
        })
        .collect())
}

fn pi_sequence(label: String, family: Family, phases_pi: Vec<f64>) -> Sequence {
    Sequence {
        label,
        family,
        target_p: 1.0,
        pulses: phases_pi.into_iter().map(Pulse::pi).collect(),
    }
}

/// Broadband composite pi pulse of odd length N.
pub fn bb(n: usize) -> Result<Sequence> {
    Ok(pi_sequence(format!("B{n}"), Family::Bb, bb_phases(n)?))
}

/// Narrowband composite pi pulse of odd length N.
pub fn nb(n: usize) -> Result<Sequence> {
    Ok(pi_sequence(format!("N{n}"), Family::Nb, nb_phases(n)?))
}

/// Passband B(N): a broadband sequence of narrowband blocks, alternating
/// with their pulse-order reverses, block k offset by the broadband phase
/// beta_k.
pub fn pb_b_of_n(n_outer: usize, n_inner: usize) -> Result<Sequence> {
    let beta = bb_phases(n_outer)?;
    let inner = nb_phases(n_inner)?;
    let mut pulses = Vec::with_capacity(n_outer * n_inner);
    for (k, offset) in beta.iter().enumerate() {
        // blocks alternate N, N^-1, N, ... starting from a plain N
        let reversed = (k + 1) % 2 == 0;
        let block: Box<dyn Iterator<Item = &f64>> = if reversed {
            Box::new(inner.iter().rev())
        } else {
            Box::new(inner.iter())
        };
        pulses.extend(block.map(|ph| Pulse::pi(ph + offset)));
    }
    Ok(Sequence {
        label: format!("B{n_outer}(N{n_inner})"),
        family: Family::PbBofN,
        target_p: 1.0,
        pulses,
    })
}

/// Passband N(B): a narrowband sequence of broadband blocks, block k offset
/// by the narrowband phase nu_k. No block reversal.
pub fn pb_n_of_b(n_outer: usize, n_inner: usize) -> Result<Sequence> {
    let nu = nb_phases(n_outer)?;
    let inner = bb_phases(n_inner)?;
    let mut pulses = Vec::with_capacity(n_outer * n_inner);
    for offset in &nu {
        pulses.extend(inner.iter().map(|ph| Pulse::pi(ph + offset)));
    }
    Ok(Sequence {
        label: format!("N{n_outer}(B{n_inner})"),
        family: Family::PbNofB,
        target_p: 1.0,
        pulses,
    })
}

/// All universal-sequence labels, in table order.
pub fn universal_labels() -> Vec<&'static str> {
    tables::UNIVERSAL.iter().map(|(l, _)| *l).collect()
}

/// Universal composite pi pulse by table label (U3, U5a, ... U25b).
pub fn universal(label: &str) -> Result<Sequence> {
    let phases = tables::universal_row(label).ok_or_else(|| Error::UnknownLabel {
        label: label.to_string(),
        valid: universal_labels().join(", "),
    })?;
    Ok(pi_sequence(
        label.to_string(),
        Family::Universal,
        phases.iter().map(|&p| canonical_phase_pi(p)).collect(),
    ))
}

/// Build the A phi_1 B phi_2 ... A phi_N pattern: half-pi first and last
/// pulses, pi pulses in between. `phases_tail` holds phi_2 .. phi_N.
fn theta_pulses(phases_tail: &[f64]) -> Vec<Pulse> {
    let n = phases_tail.len() + 1;
    std::iter::once(0.0)
        .chain(phases_tail.iter().copied())
        .enumerate()
        .map(|(i, ph)| {
            if i == 0 || i == n - 1 {
                Pulse::half_pi(ph)
            } else {
                Pulse::pi(ph)
            }
        })
        .collect()
}

fn theta_lookup(
    family: &'static str,
    table: &'static [(usize, f64, &[f64])],
    n: usize,
    p: f64,
) -> Result<&'static [f64]> {
    tables::theta_row(table, n, p).ok_or(Error::MissingTableRow { family, n, p })
}

/// Broadband theta pulse for (N, p) from the embedded table, N in 2..=6.
pub fn theta_bb(n: usize, p: f64) -> Result<Sequence> {
    let row = theta_lookup("theta-bb", tables::THETA_BB, n, p)?;
    Ok(Sequence {
        label: format!("TB{n}(p={p})"),
        family: Family::ThetaBb,
        target_p: p,
        pulses: theta_pulses(row),
    })
}

/// Narrowband theta pulse for (N, p) from the embedded table, N in {2,4,6,8}.
pub fn theta_nb(n: usize, p: f64) -> Result<Sequence> {
    let row = theta_lookup("theta-nb", tables::THETA_NB, n, p)?;
    Ok(Sequence {
        label: format!("TN{n}(p={p})"),
        family: Family::ThetaNb,
        target_p: p,
        pulses: theta_pulses(row),
    })
}

/// Twinning phase for a passband theta pulse: 2 arccos(sqrt(p)), in units
/// of pi.
pub fn twinning_phase_pi(p: f64) -> f64 {
    2.0 * p.sqrt().acos() / std::f64::consts::PI
}

/// Passband theta pulse: the narrowband p = 0.5 sequence of half length
/// `n_half` followed by its pulse-order reverse with every phase shifted by
/// the twinning phase. The target probability enters only through the shift.
pub fn theta_pb(n_half: usize, p: f64) -> Result<Sequence> {
    if !tables::THETA_PB_HALF_LENGTHS.contains(&n_half) {
        return Err(Error::MissingTableRow {
            family: "theta-pb",
            n: n_half,
            p,
        });
    }
    if !tables::THETA_TARGETS.iter().any(|t| (t - p).abs() < 1e-12) {
        return Err(Error::MissingTableRow {
            family: "theta-pb",
            n: n_half,
            p,
        });
    }
    let row = theta_lookup("theta-pb", tables::THETA_NB, n_half, 0.5)?;
    let first = theta_pulses(row);
    let shift = twinning_phase_pi(p);
    let second = first
        .iter()
        .rev()
        .map(|q| Pulse::new(q.area_pi, q.phase_pi + shift));
    let pulses: Vec<Pulse> = first.iter().copied().chain(second).collect();
    Ok(Sequence {
        label: format!("TP{}(p={p})", 2 * n_half),
        family: Family::ThetaPb,
        target_p: p,
        pulses,
    })
}

/// Single resonant pi pulse, the reference profile.
pub fn single_pi() -> Sequence {
    Sequence {
        label: "single".to_string(),
        family: Family::Single,
        target_p: 1.0,
        pulses: vec![Pulse::pi(0.0)],
    }
}

/// Evaluate the probability of a bare phase list over the pi-pulse template.
/// Convenience for property tests and the solver oracle.
pub fn pi_sequence_probability(phases_pi: &[f64], e: &ErrorPoint) -> Result<f64> {
    let props = phases_pi
        .iter()
        .map(|&ph| pulse_propagator(&Pulse::pi(ph), e))
        .collect::<Result<Vec<_>>>()?;
    Ok(su2::transition_probability(&compose(&props)?))
}
