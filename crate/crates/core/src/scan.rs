//! Excitation-profile scans over 1D epsilon grids and 2D (epsilon, delta)
//! grids, plus the profile metrics used to compare families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::noise::{self, NoiseParams};
use crate::sequences::Sequence;
use crate::su2::{format_sig12, ErrorPoint};
use crate::{Error, Result};

/// Scan grid. For 1D scans `delta_points` is 1 and the single delta value
/// is `delta_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_points: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
}

impl GridSpec {
    /// 1D grid over epsilon at fixed delta = 0.
    pub fn one_d(eps_min: f64, eps_max: f64, eps_points: usize) -> Self {
        Self {
            eps_min,
            eps_max,
            eps_points,
            delta_min: 0.0,
            delta_max: 0.0,
            delta_points: 1,
        }
    }

    /// Default 1D grid: 201 points over [-1, 1].
    pub fn default_1d() -> Self {
        Self::one_d(-1.0, 1.0, 201)
    }

    /// Default 2D grid: 101 x 101 over [-1, 1] x [-1, 1].
    pub fn default_2d() -> Self {
        Self {
            eps_min: -1.0,
            eps_max: 1.0,
            eps_points: 101,
            delta_min: -1.0,
            delta_max: 1.0,
            delta_points: 101,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        if self.eps_min < -1.0 {
            return bad(format!("eps_min {} below -1", self.eps_min));
        }
        if self.eps_points < 1 || self.delta_points < 1 {
            return bad("point counts must be at least 1".into());
        }
        if self.eps_points > 1 && self.eps_max <= self.eps_min {
            return bad("eps_max must exceed eps_min".into());
        }
        if self.delta_points > 1 && self.delta_max <= self.delta_min {
            return bad("delta_max must exceed delta_min".into());
        }
        if ![self.eps_min, self.eps_max, self.delta_min, self.delta_max]
            .iter()
            .all(|x| x.is_finite())
        {
            return bad("grid bounds must be finite".into());
        }
        Ok(())
    }

    pub fn eps_values(&self) -> Vec<f64> {
        linspace(self.eps_min, self.eps_max, self.eps_points)
    }

    pub fn delta_values(&self) -> Vec<f64> {
        linspace(self.delta_min, self.delta_max, self.delta_points)
    }
}

fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    (0..points).map(|i| min + i as f64 * step).collect()
}

/// One grid point of an excitation profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub epsilon: f64,
    pub delta: f64,
    pub probability_ideal: f64,
    pub probability_noisy: Option<f64>,
}

fn evaluate(
    seq: &Sequence,
    points: &[ErrorPoint],
    noise: Option<&NoiseParams>,
) -> Result<Vec<ProfileRecord>> {
    points
        .par_iter()
        .map(|e| {
            let ideal = seq.probability(e)?;
            let noisy = noise
                .map(|params| noise::noisy_transition_probability(seq, e, params))
                .transpose()?;
            Ok(ProfileRecord {
                epsilon: e.epsilon,
                delta: e.delta,
                probability_ideal: ideal,
                probability_noisy: noisy,
            })
        })
        .collect()
}

/// 1D profile scan; one record per epsilon value, in grid order.
pub fn scan_1d(seq: &Sequence, grid: &GridSpec) -> Result<Vec<ProfileRecord>> {
    scan_1d_noisy(seq, grid, None)
}

/// 1D profile scan with optional per-point noisy evaluation.
pub fn scan_1d_noisy(
    seq: &Sequence,
    grid: &GridSpec,
    noise: Option<&NoiseParams>,
) -> Result<Vec<ProfileRecord>> {
    grid.validate()?;
    if grid.delta_points != 1 {
        return Err(Error::InvalidGrid(
            "1D scan requires delta_points = 1".into(),
        ));
    }
    if seq.pulses.is_empty() {
        return Err(Error::EmptySequence);
    }
    let delta = grid.delta_min;
    let points: Vec<ErrorPoint> = grid
        .eps_values()
        .into_iter()
        .map(|eps| ErrorPoint::new(eps, delta))
        .collect();
    evaluate(seq, &points, noise)
}

/// 1D scan with dense local refinement around the profile center: the base
/// grid is merged with an equally sized grid covering the central tenth of
/// the epsilon range. Needed to resolve the central lobe of extreme
/// narrowband sequences.
pub fn scan_1d_refined(
    seq: &Sequence,
    grid: &GridSpec,
    noise: Option<&NoiseParams>,
) -> Result<Vec<ProfileRecord>> {
    grid.validate()?;
    if grid.delta_points != 1 {
        return Err(Error::InvalidGrid(
            "1D scan requires delta_points = 1".into(),
        ));
    }
    if seq.pulses.is_empty() {
        return Err(Error::EmptySequence);
    }
    let center = 0.5 * (grid.eps_min + grid.eps_max);
    let half_window = 0.05 * (grid.eps_max - grid.eps_min);
    let mut eps: Vec<f64> = grid.eps_values();
    eps.extend(linspace(
        (center - half_window).max(grid.eps_min),
        (center + half_window).min(grid.eps_max),
        grid.eps_points,
    ));
    eps.sort_by(|a, b| a.total_cmp(b));
    eps.dedup();
    let delta = grid.delta_min;
    let points: Vec<ErrorPoint> = eps.into_iter().map(|e| ErrorPoint::new(e, delta)).collect();
    evaluate(seq, &points, noise)
}

/// 2D profile scan in row-major order: delta is the outer loop, epsilon the
/// inner one.
pub fn scan_2d(seq: &Sequence, grid: &GridSpec) -> Result<Vec<ProfileRecord>> {
    scan_2d_noisy(seq, grid, None)
}

/// 2D profile scan with optional noisy evaluation.
pub fn scan_2d_noisy(
    seq: &Sequence,
    grid: &GridSpec,
    noise: Option<&NoiseParams>,
) -> Result<Vec<ProfileRecord>> {
    grid.validate()?;
    if seq.pulses.is_empty() {
        return Err(Error::EmptySequence);
    }
    let eps = grid.eps_values();
    let mut points = Vec::with_capacity(grid.delta_points * grid.eps_points);
    for d in grid.delta_values() {
        for &e in &eps {
            points.push(ErrorPoint::new(e, d));
        }
    }
    evaluate(seq, &points, noise)
}

/// Summary quantities of a 1D profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMetrics {
    /// Maximum probability over the grid.
    pub peak: f64,
    /// Full width at half maximum of the lobe containing the peak, by linear
    /// interpolation between bracketing grid points.
    pub fwhm_eps: f64,
    /// Epsilon extent of the contiguous region around the peak with
    /// p >= level.
    pub flat_top_width: f64,
    /// Maximum probability outside the central lobe (beyond the nearest
    /// local minima flanking the peak).
    pub wing_level: f64,
    /// Set when the profile carries no usable peak (all-zero); fwhm is 0.
    pub degenerate: bool,
}

/// Compute profile metrics from 1D scan records (ideal probabilities).
/// `flat_level` is the probability level defining the flat-top width.
pub fn profile_metrics(records: &[ProfileRecord], flat_level: f64) -> Result<ProfileMetrics> {
    if records.len() < 3 {
        return Err(Error::TooFewRecords(records.len()));
    }
    let p: Vec<f64> = records.iter().map(|r| r.probability_ideal).collect();
    let x: Vec<f64> = records.iter().map(|r| r.epsilon).collect();
    let (i_peak, &peak) = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    if peak <= 0.0 {
        return Ok(ProfileMetrics {
            peak,
            fwhm_eps: 0.0,
            flat_top_width: 0.0,
            wing_level: 0.0,
            degenerate: true,
        });
    }

    // crossing of `level` between grid indices i (inside) and j (outside)
    let cross = |i: usize, j: usize, level: f64| -> f64 {
        if p[j] >= level {
            return x[j];
        }
        x[i] + (x[j] - x[i]) * (level - p[i]) / (p[j] - p[i])
    };
    let width_at = |level: f64| -> f64 {
        let mut lo = i_peak;
        while lo > 0 && p[lo - 1] >= level {
            lo -= 1;
        }
        let mut hi = i_peak;
        while hi + 1 < p.len() && p[hi + 1] >= level {
            hi += 1;
        }
        let left = if lo == 0 {
            x[0]
        } else {
            cross(lo, lo - 1, level)
        };
        let right = if hi + 1 == p.len() {
            x[p.len() - 1]
        } else {
            cross(hi, hi + 1, level)
        };
        right - left
    };

    // central lobe: walk outward from the peak until the profile turns up
    let mut lo = i_peak;
    while lo > 0 && p[lo - 1] <= p[lo] {
        lo -= 1;
    }
    let mut hi = i_peak;
    while hi + 1 < p.len() && p[hi + 1] <= p[hi] {
        hi += 1;
    }
    let wing_level = p[..lo]
        .iter()
        .chain(p[hi + 1..].iter())
        .fold(0.0f64, |acc, &v| acc.max(v));

    Ok(ProfileMetrics {
        peak,
        fwhm_eps: width_at(peak / 2.0),
        flat_top_width: width_at(flat_level),
        wing_level,
        degenerate: false,
    })
}

/// CSV document: header `epsilon,delta,p_ideal[,p_noisy]`, one row per
/// record, 12 significant digits, row-major.
pub fn to_csv(records: &[ProfileRecord]) -> String {
    let noisy = records.iter().any(|r| r.probability_noisy.is_some());
    let mut out = String::new();
    out.push_str(if noisy {
        "epsilon,delta,p_ideal,p_noisy\n"
    } else {
        "epsilon,delta,p_ideal\n"
    });
    for r in records {
        out.push_str(&format_sig12(r.epsilon));
        out.push(',');
        out.push_str(&format_sig12(r.delta));
        out.push(',');
        out.push_str(&format_sig12(r.probability_ideal));
        if noisy {
            out.push(',');
            out.push_str(&format_sig12(r.probability_noisy.unwrap_or(f64::NAN)));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{bb, nb, single_pi};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_pulse_scan_hits_expected_landmarks() {
        let grid = GridSpec::one_d(-1.0, 1.0, 201);
        let records = scan_1d(&single_pi(), &grid).unwrap();
        assert_eq!(records.len(), 201);
        // sin^2(pi (1 + eps) / 2): zero at the edges, one in the middle
        assert_abs_diff_eq!(records[0].probability_ideal, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(records[100].probability_ideal, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(records[200].probability_ideal, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            records[50].probability_ideal,
            (std::f64::consts::PI * 0.25).sin().powi(2),
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_pulse_fwhm_is_one() {
        // p = sin^2(pi (1+eps)/2) crosses 1/2 at eps = +-1/2
        let grid = GridSpec::one_d(-1.0, 1.0, 401);
        let records = scan_1d(&single_pi(), &grid).unwrap();
        let m = profile_metrics(&records, 0.99).unwrap();
        assert_abs_diff_eq!(m.fwhm_eps, 1.0, epsilon = 1e-2);
        assert_abs_diff_eq!(m.peak, 1.0, epsilon = 1e-12);
        assert!(!m.degenerate);
        assert_abs_diff_eq!(m.wing_level, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn narrowband_scan_is_narrower_than_broadband() {
        let grid = GridSpec::default_1d();
        let b = profile_metrics(&scan_1d(&bb(5).unwrap(), &grid).unwrap(), 0.99).unwrap();
        let n = profile_metrics(&scan_1d(&nb(5).unwrap(), &grid).unwrap(), 0.99).unwrap();
        assert!(n.fwhm_eps < b.fwhm_eps);
        assert!(b.flat_top_width > n.flat_top_width);
    }

    #[test]
    fn refined_scan_keeps_base_grid_and_adds_central_points() {
        let grid = GridSpec::one_d(-1.0, 1.0, 201);
        let base = scan_1d(&single_pi(), &grid).unwrap();
        let refined = scan_1d_refined(&single_pi(), &grid, None).unwrap();
        assert!(refined.len() > base.len());
        // every base epsilon survives the merge
        let eps: Vec<f64> = refined.iter().map(|r| r.epsilon).collect();
        for r in &base {
            assert!(eps.contains(&r.epsilon));
        }
        // the added points all live in the central tenth of the range
        assert_eq!(
            refined.len() - base.len(),
            refined
                .iter()
                .filter(|r| r.epsilon.abs() <= 0.1 + 1e-9)
                .count()
                - 21
        );
        // sorted and deduplicated
        assert!(eps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scan_2d_is_row_major_delta_outer() {
        let grid = GridSpec {
            eps_min: -1.0,
            eps_max: 1.0,
            eps_points: 3,
            delta_min: -0.5,
            delta_max: 0.5,
            delta_points: 2,
        };
        let records = scan_2d(&single_pi(), &grid).unwrap();
        assert_eq!(records.len(), 6);
        let coords: Vec<(f64, f64)> = records.iter().map(|r| (r.delta, r.epsilon)).collect();
        assert_eq!(
            coords,
            vec![
                (-0.5, -1.0),
                (-0.5, 0.0),
                (-0.5, 1.0),
                (0.5, -1.0),
                (0.5, 0.0),
                (0.5, 1.0),
            ]
        );
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(GridSpec::one_d(-1.5, 1.0, 10).validate().is_err());
        assert!(GridSpec::one_d(0.5, -0.5, 10).validate().is_err());
        assert!(GridSpec::one_d(-1.0, 1.0, 0).validate().is_err());
        assert!(GridSpec::one_d(-1.0, f64::INFINITY, 10).validate().is_err());
        let mut grid = GridSpec::default_2d();
        grid.delta_points = 3;
        grid.delta_max = grid.delta_min;
        assert!(grid.validate().is_err());
        // a 1D scan cannot take a 2D grid
        assert!(scan_1d(&single_pi(), &GridSpec::default_2d()).is_err());
    }

    #[test]
    fn metrics_need_enough_records() {
        let records = scan_1d(&single_pi(), &GridSpec::one_d(-1.0, 1.0, 2)).unwrap();
        assert!(matches!(
            profile_metrics(&records, 0.5),
            Err(Error::TooFewRecords(2))
        ));
    }

    #[test]
    fn degenerate_profile_is_flagged() {
        let records = vec![
            ProfileRecord {
                epsilon: -1.0,
                delta: 0.0,
                probability_ideal: 0.0,
                probability_noisy: None,
            },
            ProfileRecord {
                epsilon: 0.0,
                delta: 0.0,
                probability_ideal: 0.0,
                probability_noisy: None,
            },
            ProfileRecord {
                epsilon: 1.0,
                delta: 0.0,
                probability_ideal: 0.0,
                probability_noisy: None,
            },
        ];
        let m = profile_metrics(&records, 0.5).unwrap();
        assert!(m.degenerate);
        assert_eq!(m.fwhm_eps, 0.0);
    }

    #[test]
    fn parallel_scan_matches_serial_evaluation() {
        let seq = bb(9).unwrap();
        let grid = GridSpec::one_d(-1.0, 1.0, 101);
        let records = scan_1d(&seq, &grid).unwrap();
        for r in &records {
            let direct = seq
                .probability(&ErrorPoint::new(r.epsilon, r.delta))
                .unwrap();
            assert_eq!(r.probability_ideal, direct);
        }
    }

    #[test]
    fn csv_layout_is_stable() {
        let grid = GridSpec::one_d(-1.0, 1.0, 3);
        let records = scan_1d(&single_pi(), &grid).unwrap();
        let csv = to_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "epsilon,delta,p_ideal");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-1.00000000000e0,0.00000000000e0,"));
        // byte-identical on re-evaluation
        assert_eq!(csv, to_csv(&scan_1d(&single_pi(), &grid).unwrap()));
    }

    #[test]
    fn csv_includes_noisy_column_when_present() {
        let noise = NoiseParams::default();
        let grid = GridSpec::one_d(-1.0, 1.0, 3);
        let records = scan_1d_noisy(&single_pi(), &grid, Some(&noise)).unwrap();
        let csv = to_csv(&records);
        assert!(csv.starts_with("epsilon,delta,p_ideal,p_noisy\n"));
        for r in &records {
            let noisy = r.probability_noisy.unwrap();
            assert!((0.0..=1.0).contains(&noisy));
        }
    }
}
