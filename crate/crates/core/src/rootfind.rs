//! Ehrlich-Aberth simultaneous iteration started from tropical root moduli.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::backward_error::{Provenance, RootSet};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::tropical::{tropical_roots, TropicalData};
use crate::xprec::UNIT_ROUNDOFF;

/// `pi * (3 - sqrt 5)`.
const GOLDEN_ANGLE: f64 = PI * (3.0 - 2.236_067_977_499_79);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AberthConfig {
    /// Sweeps allowed per attempt.
    pub max_iter: usize,
    /// Relative correction size at which a root is frozen.
    pub rel_tol: f64,
    /// Number of restarts with fresh phases after a stalled attempt.
    pub restart_phases: usize,
}

impl Default for AberthConfig {
    fn default() -> Self {
        AberthConfig {
            max_iter: 200,
            rel_tol: 4.0 * UNIT_ROUNDOFF,
            restart_phases: 3,
        }
    }
}

/// Starting points: `m` equispaced points of modulus `exp(tau)` for each hull
/// segment of multiplicity `m`, each segment rotated by a multiple of the
/// golden angle.
pub fn initial_guesses(t: &TropicalData) -> Vec<Complex64> {
    guesses_with_rotation(t, 0.0)
}

fn guesses_with_rotation(t: &TropicalData, rotation: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(t.degree());
    for (l, block) in t.blocks().enumerate() {
        let m = block.multiplicity();
        let modulus = block.tau.exp().clamp(f64::MIN_POSITIVE, f64::MAX);
        let offset = GOLDEN_ANGLE * (l + 1) as f64 + rotation;
        for k in 0..m {
            let phase = TAU * k as f64 / m as f64 + offset;
            out.push(Complex64::from_polar(modulus, phase));
        }
    }
    out
}

/// Tropical starting points followed by [`aberth`].
pub fn find_roots(p: &Polynomial, cfg: &AberthConfig) -> Result<RootSet> {
    let t = tropical_roots(p)?;
    aberth(p, &initial_guesses(&t), cfg)
}

/// Runs Aberth sweeps from `guesses` until every root is frozen.
///
/// A root is frozen once its correction is below `rel_tol` relative to its
/// modulus, or once its residual is at the rounding level of Horner
/// evaluation. Each sweep computes all corrections from the same snapshot.
/// The guesses are put in a canonical order first, so permuting the input
/// only permutes the output.
pub fn aberth(p: &Polynomial, guesses: &[Complex64], cfg: &AberthConfig) -> Result<RootSet> {
    let d = p.degree();
    if guesses.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            actual: guesses.len(),
        });
    }
    if d == 0 {
        return RootSet::new(Vec::new(), Provenance::Computed);
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        guesses[a]
            .re
            .total_cmp(&guesses[b].re)
            .then(guesses[a].im.total_cmp(&guesses[b].im))
    });
    let start: Vec<Complex64> = order.iter().map(|&i| guesses[i]).collect();

    let mut total_iter = 0;
    let mut best: Option<(f64, Vec<Complex64>, Vec<f64>)> = None;
    for attempt in 0..=cfg.restart_phases {
        let init = if attempt == 0 {
            start.clone()
        } else {
            rephase(&start, attempt)
        };
        let sweep = sweep_until_frozen(p, init, cfg);
        total_iter += sweep.iterations;
        if sweep.converged {
            let mut roots = vec![Complex64::new(0.0, 0.0); d];
            for (slot, z) in order.iter().zip(sweep.roots) {
                roots[*slot] = z;
            }
            return RootSet::new(roots, Provenance::Computed);
        }
        let worst = sweep.residuals.iter().cloned().fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| worst < b.0) {
            best = Some((worst, sweep.roots, sweep.residuals));
        }
        log::debug!("aberth attempt {attempt} stalled, worst residual {worst:e}");
    }
    let (_, roots, residuals) = best.expect("at least one attempt");
    let mut best_roots = vec![Complex64::new(0.0, 0.0); d];
    let mut best_res = vec![0.0; d];
    for (k, &slot) in order.iter().enumerate() {
        best_roots[slot] = roots[k];
        best_res[slot] = residuals[k];
    }
    Err(Error::RootfindFailed {
        iterations: total_iter,
        restarts: cfg.restart_phases,
        best: best_roots,
        residuals: best_res,
    })
}

/// Same moduli, new deterministic phases.
fn rephase(start: &[Complex64], attempt: usize) -> Vec<Complex64> {
    start
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let phase = z.arg() + GOLDEN_ANGLE * ((attempt * 7919 + j * 104_729) as f64).sqrt();
            Complex64::from_polar(z.norm(), phase)
        })
        .collect()
}

struct Sweep {
    roots: Vec<Complex64>,
    residuals: Vec<f64>,
    converged: bool,
    iterations: usize,
}

fn sweep_until_frozen(p: &Polynomial, mut x: Vec<Complex64>, cfg: &AberthConfig) -> Sweep {
    let d = x.len();
    let resid_tol = 2.0 * (d as f64 + 1.0) * UNIT_ROUNDOFF;
    let mut frozen = vec![false; d];
    let mut residuals = vec![f64::INFINITY; d];
    let mut corr = vec![Complex64::new(0.0, 0.0); d];

    for it in 1..=cfg.max_iter {
        for j in 0..d {
            if frozen[j] {
                corr[j] = Complex64::new(0.0, 0.0);
                continue;
            }
            let terms = p.newton_terms(x[j]);
            residuals[j] = terms.rel_residual;
            let s: Complex64 = (0..d)
                .filter(|&k| k != j)
                .map(|k| (x[j] - x[k]).inv())
                .sum();
            let w = terms.step;
            corr[j] = if w.is_finite() {
                w / (Complex64::new(1.0, 0.0) - w * s)
            } else {
                -s.inv()
            };
            if !corr[j].is_finite() {
                corr[j] = Complex64::new(0.0, 0.0);
            }
        }
        for j in 0..d {
            if frozen[j] {
                continue;
            }
            let small_step = corr[j].norm() <= cfg.rel_tol * x[j].norm();
            x[j] -= corr[j];
            if small_step || residuals[j] <= resid_tol {
                frozen[j] = true;
            }
        }
        separate_collisions(&mut x);
        if frozen.iter().all(|&f| f) {
            for (j, r) in residuals.iter_mut().enumerate() {
                *r = p.newton_terms(x[j]).rel_residual;
            }
            return Sweep {
                roots: x,
                residuals,
                converged: true,
                iterations: it,
            };
        }
    }
    Sweep {
        roots: x,
        residuals,
        converged: false,
        iterations: cfg.max_iter,
    }
}

/// Nudges the later of two iterates that coincide to relative 1e-30.
fn separate_collisions(x: &mut [Complex64]) {
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            let scale = x[j].norm().max(x[k].norm());
            if (x[j] - x[k]).norm() <= 1e-30 * scale {
                let phi = GOLDEN_ANGLE * (k + 1) as f64;
                x[k] *= Complex64::new(1.0, 0.0) + Complex64::from_polar(1e-6, phi);
            }
        }
    }
}
