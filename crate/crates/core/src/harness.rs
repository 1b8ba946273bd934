//! Seeded random polynomials and the two batch experiments.
//!
//! Each trial draws from its own ChaCha stream keyed by `(seed, trial)`, so
//! the output does not depend on how rayon schedules the trials.

use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::backward_error::{embe_upper_bound, tbe, Provenance, RootSet};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::rootfind::{find_roots, AberthConfig};
use crate::tropical::tropical_roots;
use crate::xprec::{newton_refine, NewtonConfig, NewtonStatus, UNIT_ROUNDOFF};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    /// Coefficient moduli are `10^e` with `e ~ U[-k, k]`.
    pub k: f64,
    pub trials: usize,
    pub seed: u64,
    pub aberth: AberthConfig,
    pub newton: NewtonConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 20,
            k: 8.0,
            trials: 1000,
            seed: 0,
            aberth: AberthConfig::default(),
            newton: NewtonConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Invalid("degree must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::Invalid(format!("spread k must be finite and >= 0, got {}", self.k)));
        }
        self.newton.validate()
    }
}

/// The random stream of one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Degree-`d` polynomial with `c_i = 10^{e_i} exp(i phi_i)`,
/// `e_i ~ U[-k, k]`, `phi_i ~ U[0, 2pi)`.
pub fn random_poly<R: Rng + ?Sized>(d: usize, k: f64, rng: &mut R) -> Polynomial {
    let coeffs = (0..=d)
        .map(|_| {
            let e = if k > 0.0 { rng.random_range(-k..=k) } else { 0.0 };
            let phi = rng.random_range(0.0..TAU);
            Complex64::from_polar(10f64.powf(e), phi)
        })
        .collect();
    Polynomial::new(coeffs).expect("coefficients are nonzero")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeState {
    Ok,
    /// A Newton refinement diverged.
    Diverged,
    /// Roots could not be computed or measured at all.
    Failed,
}

/// One row of `exp1.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exp1Record {
    pub trial: u64,
    pub seed: u64,
    pub d: usize,
    pub k: f64,
    pub tbe: f64,
    pub embe_ub: Option<f64>,
    pub embe_status: EmbeState,
    pub collision: bool,
}

/// One row of `exp2.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exp2Record {
    pub trial: u64,
    pub root_index: usize,
    pub exp_tau_over_abs_root: f64,
}

/// Measures one polynomial the way every Experiment 1 trial does. Exposed so
/// that callers can feed hand-made polynomials through the same pipeline.
pub fn run_exp1_trial(trial: u64, cfg: &ExperimentConfig, p: &Polynomial) -> Exp1Record {
    let mut rec = Exp1Record {
        trial,
        seed: cfg.seed,
        d: p.degree(),
        k: cfg.k,
        tbe: f64::NAN,
        embe_ub: None,
        embe_status: EmbeState::Failed,
        collision: false,
    };
    let roots = match find_roots(p, &cfg.aberth) {
        Ok(r) => r,
        Err(Error::RootfindFailed { best, .. }) => {
            log::warn!("trial {trial}: aberth did not converge, measuring best attempt");
            match RootSet::new(best, Provenance::Computed) {
                Ok(r) => r,
                Err(e) => {
                    log::warn!("trial {trial}: {e}");
                    return rec;
                }
            }
        }
        Err(e) => {
            log::warn!("trial {trial}: {e}");
            return rec;
        }
    };
    match tbe(p, &roots) {
        Ok(t) => rec.tbe = t.value,
        Err(e) => {
            log::warn!("trial {trial}: {e}");
            return rec;
        }
    }
    match embe_upper_bound(p, &roots, &cfg.newton) {
        Ok(b) => {
            rec.collision = b.pairing_collision;
            match b.epsilon {
                Some(e) => {
                    rec.embe_ub = Some(e);
                    rec.embe_status = EmbeState::Ok;
                }
                None => rec.embe_status = EmbeState::Diverged,
            }
        }
        Err(e) => log::warn!("trial {trial}: {e}"),
    }
    rec
}

/// Experiment 1: TBE of rootfinder output against an upper bound on the
/// element-wise mixed backward error. Always returns `cfg.trials` rows.
pub fn experiment1(cfg: &ExperimentConfig) -> Result<Vec<Exp1Record>> {
    cfg.validate()?;
    Ok((0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let p = random_poly(cfg.d, cfg.k, &mut trial_rng(cfg.seed, trial));
            run_exp1_trial(trial, cfg, &p)
        })
        .collect())
}

/// Ratios `exp(tau_i) / |x_i|` with both sequences sorted ascending.
pub fn tropical_ratios(p: &Polynomial, cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let t = tropical_roots(p)?;
    let rough = find_roots(p, &cfg.aberth)?;
    let mut log_moduli = Vec::with_capacity(p.degree());
    for &z in &rough.roots {
        let out = newton_refine(p, z, &cfg.newton);
        if out.status == NewtonStatus::Diverged {
            return Err(Error::SingularDerivative { at: z });
        }
        log_moduli.push(out.root.abs_f64().ln());
    }
    log_moduli.sort_by(f64::total_cmp);
    let mut tau = t.tau.clone();
    tau.sort_by(f64::total_cmp);
    Ok(tau.iter().zip(&log_moduli).map(|(t, m)| (t - m).exp()).collect())
}

/// Experiment 2: how well tropical roots predict root moduli. Trials whose
/// rootfinding fails are skipped and logged.
pub fn experiment2(cfg: &ExperimentConfig) -> Result<Vec<Exp2Record>> {
    cfg.validate()?;
    let per_trial: Vec<Vec<Exp2Record>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let p = random_poly(cfg.d, cfg.k, &mut trial_rng(cfg.seed, trial));
            match tropical_ratios(&p, cfg) {
                Ok(ratios) => ratios
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| Exp2Record {
                        trial,
                        root_index: i + 1,
                        exp_tau_over_abs_root: r,
                    })
                    .collect(),
                Err(e) => {
                    log::warn!("trial {trial} skipped: {e}");
                    Vec::new()
                }
            }
        })
        .collect();
    Ok(per_trial.into_iter().flatten().collect())
}

/// Fraction of rows with an available bound satisfying
/// `embe_ub <= factor * max(tbe, u)`, and the number of such rows.
pub fn exp1_fraction_within(records: &[Exp1Record], factor: f64) -> (f64, usize) {
    let valid: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.embe_status == EmbeState::Ok)
        .filter_map(|r| r.embe_ub.map(|e| (r.tbe, e)))
        .collect();
    if valid.is_empty() {
        return (0.0, 0);
    }
    let good = valid
        .iter()
        .filter(|(t, e)| *e <= factor * t.max(UNIT_ROUNDOFF))
        .count();
    (good as f64 / valid.len() as f64, valid.len())
}

/// Fraction of ratios in `[1/tol, tol]`.
pub fn exp2_fraction_within(records: &[Exp2Record], tol: f64) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let good = records
        .iter()
        .filter(|r| r.exp_tau_over_abs_root >= 1.0 / tol && r.exp_tau_over_abs_root <= tol)
        .count();
    good as f64 / records.len() as f64
}

fn csv_err(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

pub fn write_csv<W: Write, T: Serialize>(out: W, records: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))
}

/// CSV text; the header is written even when there are no rows.
pub fn exp1_csv(records: &[Exp1Record]) -> Result<String> {
    with_header("trial,seed,d,k,tbe,embe_ub,embe_status,collision", records)
}

pub fn exp2_csv(records: &[Exp2Record]) -> Result<String> {
    with_header("trial,root_index,exp_tau_over_abs_root", records)
}

fn with_header<T: Serialize>(header: &str, records: &[T]) -> Result<String> {
    if records.is_empty() {
        return Ok(format!("{header}\n"));
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub const EXP1_PLOT: &str = r#"# TBE against the EMBE upper bound, one point per trial.
set datafile separator ","
set logscale xy
set format x "10^{%L}"
set format y "10^{%L}"
set xlabel "TBE"
set ylabel "EMBE upper bound"
set key top left
set terminal pngcairo size 800,600
set output "exp1.png"
plot "exp1.csv" using 5:($7 eq "ok" ? $6 : 1/0) skip 1 with points pt 7 ps 0.5 title "trials", \
     x with lines lt 2 title "y = x"
"#;

pub const EXP2_PLOT: &str = r#"# Histogram of exp(tau_i) / |x_i| over all roots of all trials.
set datafile separator ","
set xlabel "exp(tau_i) / |x_i|"
set ylabel "count"
set style fill solid 0.6
binwidth = 0.02
bin(x) = binwidth * floor(x / binwidth) + binwidth / 2
set boxwidth binwidth
set xrange [0:2]
set terminal pngcairo size 800,600
set output "exp2.png"
plot "exp2.csv" using (bin($3)):(1.0) skip 1 smooth freq with boxes notitle
"#;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Invalid(format!("{}: {e}", path.display()))
}

/// Writes `exp1.csv` and `exp1.plt` into `dir`, creating it if needed.
pub fn write_exp1(dir: &Path, records: &[Exp1Record]) -> Result<()> {
    write_pair(dir, "exp1", &exp1_csv(records)?, EXP1_PLOT)
}

/// Writes `exp2.csv` and `exp2.plt` into `dir`, creating it if needed.
pub fn write_exp2(dir: &Path, records: &[Exp2Record]) -> Result<()> {
    write_pair(dir, "exp2", &exp2_csv(records)?, EXP2_PLOT)
}

fn write_pair(dir: &Path, stem: &str, csv: &str, plot: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    fs::write(&csv_path, csv).map_err(|e| io_err(&csv_path, e))?;
    let plt_path = dir.join(format!("{stem}.plt"));
    fs::write(&plt_path, plot).map_err(|e| io_err(&plt_path, e))
}
