//! Numerical re-derivation of composite phases by cancelling derivative
//! terms of the sequence propagator around an expansion point.
//!
//! The value condition pins the transition probability at the operating
//! point (zero error); the remaining conditions cancel derivatives at the
//! expansion point. At delta = 0 the probability is an even function of
//! the field amplitude about both expansion points (flipping the field
//! sign is a global phase plus a sigma_z conjugation), so odd probability
//! derivatives vanish identically and carry no information. Around zero
//! error the conditions are therefore the even-order probability
//! derivatives; around zero field (where p and its value condition are
//! pinned at the operating point instead) they are the odd-order
//! derivatives of the complex transition amplitude, each contributing its
//! real and imaginary part as two residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::su2::{canonical_phase_pi, pulse_propagator_unchecked, ErrorPoint, Pulse};
use crate::{Error, Result};

/// Area pattern of the sequence being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    /// All pulses have nominal area pi.
    PiOnly,
    /// Half-pi first and last pulses, pi pulses in between.
    ThetaAba,
}

impl Template {
    /// Pulse areas in units of pi for a sequence of `n` pulses.
    pub fn areas(&self, n: usize) -> Vec<f64> {
        match self {
            Template::PiOnly => vec![1.0; n],
            Template::ThetaAba => (0..n)
                .map(|i| if i == 0 || i == n - 1 { 0.5 } else { 1.0 })
                .collect(),
        }
    }
}

/// Where the derivative terms are cancelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionPoint {
    /// eps = 0, the operating point (broadband character).
    AtZeroError,
    /// eps = -1, zero field (narrowband character).
    AtZeroField,
}

/// A phase-solving problem. The first phase is gauge-fixed to zero, so a
/// sequence of `n_pulses` has `n_pulses - 1` free phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveProblem {
    pub template: Template,
    pub n_pulses: usize,
    pub target_p: f64,
    pub expansion_point: ExpansionPoint,
    /// Total number of residuals including the value condition. At zero
    /// error, `n_conditions = c` cancels probability derivative orders
    /// 2, 4, ..., 2(c-1); at zero field it must be odd and cancels
    /// amplitude derivative orders 1, 3, ..., c-2 (Re/Im pairs).
    pub n_conditions: usize,
}

impl SolveProblem {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProblem(m));
        if self.n_pulses < 2 {
            return bad("need at least 2 pulses".into());
        }
        if !(0.0..=1.0).contains(&self.target_p) {
            return bad(format!(
                "target probability {} outside [0, 1]",
                self.target_p
            ));
        }
        if self.n_conditions < 1 || self.n_conditions > self.n_pulses {
            // the value condition is degenerate with the first derivative
            // at a probability extremum, so one condition beyond the free
            // phase count stays solvable for p = 0 or 1 targets
            return bad(format!(
                "n_conditions = {} outside 1..={}",
                self.n_conditions, self.n_pulses
            ));
        }
        if self.expansion_point == ExpansionPoint::AtZeroField
            && self.n_conditions.is_multiple_of(2)
        {
            return bad("zero-field conditions come in Re/Im pairs; need an odd total".into());
        }
        Ok(())
    }

    pub fn free_phase_count(&self) -> usize {
        self.n_pulses - 1
    }
}

/// Finite-difference steps pinned for the Richardson pair.
const FD_STEP_COARSE: f64 = 1e-2;
const FD_STEP_FINE: f64 = 5e-3;

/// m-th central finite difference of `f` at `x0` with step `h`, O(h^2).
pub fn central_derivative<F: Fn(f64) -> f64>(f: &F, x0: f64, m: usize, h: f64) -> f64 {
    let mut sum = 0.0;
    let mut coef = 1.0; // binomial C(m, j) built incrementally
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * coef * f(x0 + (m as f64 / 2.0 - j as f64) * h);
        coef = coef * (m - j) as f64 / (j + 1) as f64;
    }
    sum / h.powi(m as i32)
}

/// Richardson-extrapolated central derivative, O(h^4). Orders 1 and 2 use
/// the pinned step pair; each further order pair doubles the steps, since
/// the roundoff floor of an m-th central difference grows as h^-m and
/// would otherwise swamp the high-order conditions.
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: &F, x0: f64, m: usize) -> f64 {
    let scale = (1u32 << (m.div_ceil(2) - 1).min(8)) as f64;
    let coarse = central_derivative(f, x0, m, scale * FD_STEP_COARSE);
    let fine = central_derivative(f, x0, m, scale * FD_STEP_FINE);
    (4.0 * fine - coarse) / 3.0
}

/// Transition amplitude a21 of the templated sequence at `eps`, delta = 0.
/// Evaluation below the zero-field point uses the reflection identity
/// a21(-1 - x) = -a21(-1 + x) (flipping the field sign adds pi to every
/// phase, which conjugates the propagator by sigma_z).
fn amplitude(areas: &[f64], phases_full: &[f64], eps: f64) -> num_complex::Complex64 {
    let (eps, sign) = if eps < -1.0 {
        (-2.0 - eps, -1.0)
    } else {
        (eps, 1.0)
    };
    let e = ErrorPoint::rabi(eps);
    let mut u = crate::su2::Unitary2::IDENTITY;
    for (a, ph) in areas.iter().zip(phases_full) {
        // plain struct literal: no phase canonicalization, so the objective
        // stays smooth in the optimization variables
        let pulse = Pulse {
            area_pi: *a,
            phase_pi: ph / std::f64::consts::PI,
        };
        u = pulse_propagator_unchecked(&pulse, &e).mul(&u);
    }
    sign * u.a21
}

fn probability(areas: &[f64], phases_full: &[f64], eps: f64) -> f64 {
    amplitude(areas, phases_full, eps).norm_sqr()
}

/// Residual vector of the derivative-cancellation system for gauge-fixed
/// free phases (radians; phi_1 = 0 prepended internally).
pub fn objective(problem: &SolveProblem, free_phases: &[f64]) -> Result<Vec<f64>> {
    problem.validate()?;
    if free_phases.len() != problem.free_phase_count() {
        return Err(Error::InvalidProblem(format!(
            "expected {} free phases, got {}",
            problem.free_phase_count(),
            free_phases.len()
        )));
    }
    let areas = problem.template.areas(problem.n_pulses);
    let mut phases = Vec::with_capacity(problem.n_pulses);
    phases.push(0.0);
    phases.extend_from_slice(free_phases);

    let mut res = Vec::with_capacity(problem.n_conditions);
    res.push(probability(&areas, &phases, 0.0) - problem.target_p);
    match problem.expansion_point {
        ExpansionPoint::AtZeroError => {
            let f = |e: f64| probability(&areas, &phases, e);
            for k in 1..problem.n_conditions {
                res.push(richardson_derivative(&f, 0.0, 2 * k));
            }
        }
        ExpansionPoint::AtZeroField => {
            let re = |e: f64| amplitude(&areas, &phases, e).re;
            let im = |e: f64| amplitude(&areas, &phases, e).im;
            let mut order = 1;
            while res.len() < problem.n_conditions {
                res.push(richardson_derivative(&re, -1.0, order));
                res.push(richardson_derivative(&im, -1.0, order));
                order += 2;
            }
        }
    }
    Ok(res)
}

fn residual_norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solution of a phase-solving run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// Full phase list in units of pi, phi_1 = 0, canonicalized to [0, 2).
    pub phases_pi: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Index of the winning restart.
    pub start_index: usize,
}

/// Residual norm below which a result counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Damped least-squares (Levenberg-Marquardt) with a finite-difference
/// Jacobian. Systems here have at most a handful of parameters, so the
/// normal equations are solved by direct elimination.
fn lm_minimize<F>(residuals: &F, x0: &[f64], max_iters: usize) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = residuals(&x);
    let mut cost = residual_norm(&r);
    let mut lambda = 1e-3;
    let mut iters = 0;

    for _ in 0..max_iters {
        iters += 1;
        if cost < CONVERGENCE_TOL * 1e-3 {
            break;
        }
        // central-difference Jacobian
        let h = 1e-6;
        let m = r.len();
        let mut jac = vec![vec![0.0; n]; m];
        for j in 0..n {
            let mut xp = x.clone();
            xp[j] += h;
            let rp = residuals(&xp);
            xp[j] -= 2.0 * h;
            let rm = residuals(&xp);
            for i in 0..m {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        // normal equations: (J^T J + lambda diag(J^T J)) dx = -J^T r
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for i in 0..m {
            for a in 0..n {
                jtr[a] += jac[i][a] * r[i];
                for b in 0..n {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }

        let mut improved = false;
        for _ in 0..12 {
            let mut sys = jtj.clone();
            for (a, row) in sys.iter_mut().enumerate() {
                row[a] += lambda * jtj[a][a].max(1e-12);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(dx) = solve_linear(sys, rhs) else {
                lambda *= 10.0;
                continue;
            };
            let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
            let rt = residuals(&xt);
            let ct = residual_norm(&rt);
            if ct < cost {
                x = xt;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, cost, iters)
}

/// Gaussian elimination with partial pivoting. Returns None for a singular
/// system.
#[allow(clippy::needless_range_loop)] // rows i and col are borrowed together
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Multi-start solve with a fixed seed. Restarts run independently (and in
/// parallel); the reported solution is the lowest residual, ties broken by
/// lowest start index, so results are reproducible.
pub fn solve(problem: &SolveProblem, n_restarts: usize, seed: u64) -> Result<SolveResult> {
    problem.validate()?;
    let nfree = problem.free_phase_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..n_restarts)
        .map(|_| {
            (0..nfree)
                .map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI))
                .collect()
        })
        .collect();

    let runs: Vec<(Vec<f64>, f64, usize)> = starts
        .par_iter()
        .map(|x0| {
            let f = |x: &[f64]| objective(problem, x).expect("validated problem");
            lm_minimize(&f, x0, 300)
        })
        .collect();

    let (best_idx, best) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(i.cmp(j)))
        .ok_or_else(|| Error::InvalidProblem("zero restarts".into()))?;

    let mut phases_pi = Vec::with_capacity(problem.n_pulses);
    phases_pi.push(0.0);
    phases_pi.extend(
        best.0
            .iter()
            .map(|&ph| canonical_phase_pi(ph / std::f64::consts::PI)),
    );
    Ok(SolveResult {
        phases_pi,
        residual_norm: best.1,
        iterations: best.2,
        converged: best.1 < CONVERGENCE_TOL,
        start_index: best_idx,
    })
}

/// Serializable report of a solve run.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub problem: SolveProblem,
    pub n_restarts: usize,
    pub seed: u64,
    pub phases_pi: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveReport {
    pub fn new(problem: SolveProblem, n_restarts: usize, seed: u64, result: &SolveResult) -> Self {
        Self {
            problem,
            n_restarts,
            seed,
            phases_pi: result.phases_pi.clone(),
            residual_norm: result.residual_norm,
            iterations: result.iterations,
            converged: result.converged,
        }
    }
}

/// Default restart budget; the objective is multimodal.
pub const DEFAULT_RESTARTS: usize = 64;

/// Sup-norm profile comparison of two phase lists (units of pi) over the
/// sampled epsilon domain. Solutions are non-unique in phase space, so
/// equality of profiles is the meaningful equivalence.
pub fn profile_equivalent(
    phases_a_pi: &[f64],
    phases_b_pi: &[f64],
    template: Template,
    domain: &[f64],
    tol: f64,
) -> Result<bool> {
    Ok(profile_distance(phases_a_pi, phases_b_pi, template, domain)? <= tol)
}

/// Sup-norm of the probability difference over the sampled domain.
pub fn profile_distance(
    phases_a_pi: &[f64],
    phases_b_pi: &[f64],
    template: Template,
    domain: &[f64],
) -> Result<f64> {
    if phases_a_pi.len() != phases_b_pi.len() {
        return Err(Error::InvalidProblem(
            "profile comparison needs equal-length phase lists".into(),
        ));
    }
    let areas = template.areas(phases_a_pi.len());
    let rad = |v: &[f64]| -> Vec<f64> { v.iter().map(|p| p * std::f64::consts::PI).collect() };
    let pa = rad(phases_a_pi);
    let pb = rad(phases_b_pi);
    Ok(domain
        .iter()
        .map(|&e| (probability(&areas, &pa, e) - probability(&areas, &pb, e)).abs())
        .fold(0.0, f64::max))
}

/// Evenly spaced sample domain, inclusive of both ends.
pub fn sample_domain(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let step = (max - min) / (points - 1) as f64;
    (0..points).map(|i| min + i as f64 * step).collect()
}
