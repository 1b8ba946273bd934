//! Backward error measures for a set of approximate roots.
//!
//! Given `f = c_0 + ... + c_d x^d` and approximations `x̂_1..x̂_d`, the
//! reconstructed polynomial `c_d * prod (x - x̂_j)` is expanded in
//! double-double arithmetic so that its own rounding sits far below the
//! errors being measured. From it we get:
//!
//! * NBE, the relative 2-norm distance of the coefficient vectors;
//! * EBE, the largest relative coefficient error;
//! * TBE, the largest coefficient error scaled by the tropical `r_i`;
//! * an upper bound on the element-wise mixed backward error, obtained by
//!   exhibiting a concrete intermediate root set (Newton-refined roots, or
//!   the explicit witness constructions below).

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{expand_roots_x, Polynomial};
use crate::rootfind::{aberth, initial_guesses, AberthConfig};
use crate::tropical::tropical_roots;
use crate::xprec::{newton_refine, NewtonConfig, NewtonStatus, XComplex};

/// Where a root set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Supplied,
    Refined,
}

/// Approximate roots, all nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub provenance: Provenance,
}

impl RootSet {
    pub fn new(roots: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if let Some(i) = roots.iter().position(|z| z.norm() == 0.0) {
            return Err(Error::ZeroRoot(i));
        }
        Ok(RootSet { roots, provenance })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Roots ordered by modulus, ties broken by argument.
    pub fn sorted_by_modulus(&self) -> Vec<Complex64> {
        let mut v = self.roots.clone();
        v.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
        v
    }
}

fn check_roots(p: &Polynomial, x_hat: &RootSet) -> Result<()> {
    if x_hat.len() != p.degree() {
        return Err(Error::LengthMismatch {
            expected: p.degree(),
            actual: x_hat.len(),
        });
    }
    Ok(())
}

fn check_lengths(c: &[Complex64], c_hat: &[Complex64]) -> Result<()> {
    if c.len() != c_hat.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            actual: c_hat.len(),
        });
    }
    if c.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    Ok(())
}

/// `|c_i - c_hat_i|` for `i < d`, the leading coefficient being shared.
fn abs_errors(c: &[Complex64], c_hat: &[Complex64]) -> Vec<f64> {
    let d = c.len() - 1;
    (0..d).map(|i| (c[i] - c_hat[i]).norm()).collect()
}

/// Same as [`abs_errors`] but with the difference taken in double-double.
fn abs_errors_x(c: &[Complex64], c_hat: &[XComplex]) -> Vec<f64> {
    let d = c.len() - 1;
    (0..d)
        .map(|i| (XComplex::from_c64(c[i]) - c_hat[i]).abs_f64())
        .collect()
}

fn nbe_from(c: &[Complex64], abs_err: &[f64]) -> Result<f64> {
    let den: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(den > 0.0) {
        return Err(Error::Invalid("coefficient vector has zero norm".into()));
    }
    let num: f64 = abs_err.iter().map(|e| e * e).sum::<f64>().sqrt();
    Ok(num / den)
}

fn rel_error(c: Complex64, abs_err: f64) -> f64 {
    let m = c.norm();
    if m > 0.0 {
        abs_err / m
    } else if abs_err == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn ebe_from(c: &[Complex64], abs_err: &[f64]) -> f64 {
    abs_err
        .iter()
        .zip(c)
        .map(|(&e, &ci)| rel_error(ci, e))
        .fold(0.0, f64::max)
}

/// Mixed criterion used for witnesses: relative where `c_i != 0`, absolute
/// otherwise.
fn mixed_error(c: &[Complex64], abs_err: &[f64]) -> f64 {
    abs_err
        .iter()
        .zip(c)
        .map(|(&e, &ci)| if ci.norm() > 0.0 { e / ci.norm() } else { e })
        .fold(0.0, f64::max)
}

/// Norm-wise backward error `||c - ĉ||_2 / ||c||_2`.
pub fn nbe(c: &[Complex64], c_hat: &[Complex64]) -> Result<f64> {
    check_lengths(c, c_hat)?;
    nbe_from(c, &abs_errors(c, c_hat))
}

/// Element-wise backward error `max_{i<d} |c_i - ĉ_i| / |c_i|`; infinite when
/// a zero coefficient is perturbed.
pub fn ebe(c: &[Complex64], c_hat: &[Complex64]) -> Result<f64> {
    check_lengths(c, c_hat)?;
    Ok(ebe_from(c, &abs_errors(c, c_hat)))
}

/// Per-coefficient breakdown of a reconstruction error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffError {
    pub index: usize,
    pub abs_err: f64,
    /// `abs_err / |c_i|`; infinite for a perturbed zero coefficient.
    pub rel_err: f64,
    /// The quantity maximized by the tropical backward error.
    pub scaled_err: f64,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TbeResult {
    pub value: f64,
    pub per_coeff: Vec<CoeffError>,
    /// `ĉ` in double-double.
    pub c_hat: Vec<XComplex>,
}

/// Tropical backward error of `x_hat` as roots of `p`.
pub fn tbe(p: &Polynomial, x_hat: &RootSet) -> Result<TbeResult> {
    check_roots(p, x_hat)?;
    let t = tropical_roots(p)?;
    let c = p.coeffs();
    let xr: Vec<XComplex> = x_hat.roots.iter().map(|&z| z.into()).collect();
    let c_hat = expand_roots_x(XComplex::from_c64(p.leading()), &xr);
    let abs_err = abs_errors_x(c, &c_hat);
    let per_coeff: Vec<CoeffError> = abs_err
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let m = c[i].norm();
            let scaled = if m > 0.0 { e / (t.r[i] * m) } else { e / t.r[i] };
            CoeffError {
                index: i,
                abs_err: e,
                rel_err: rel_error(c[i], e),
                scaled_err: scaled,
                r: t.r[i],
            }
        })
        .collect();
    let value = per_coeff.iter().map(|e| e.scaled_err).fold(0.0, f64::max);
    Ok(TbeResult {
        value,
        per_coeff,
        c_hat,
    })
}

/// One approximate root and its Newton-refined counterpart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinedRoot {
    pub approx: Complex64,
    pub refined: XComplex,
    /// `|x̂ - x̃| / |x̃|`.
    pub rel_change: f64,
    pub status: NewtonStatus,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeBound {
    /// `None` when some refinement diverged.
    pub epsilon: Option<f64>,
    /// `max_j |x̂_j - x̃_j| / |x̃_j|`.
    pub forward: f64,
    /// Mixed element-wise error of the coefficients of `prod (x - x̃_j)`.
    pub coefficient: f64,
    pub refined: Vec<RefinedRoot>,
    pub pairing_collision: bool,
}

impl EmbeBound {
    pub fn refined_set(&self) -> Result<RootSet> {
        RootSet::new(
            self.refined.iter().map(|r| r.refined.to_c64()).collect(),
            Provenance::Refined,
        )
    }
}

/// Upper bound on the element-wise mixed backward error: each root is
/// refined separately by extended-precision Newton on `p`, and the refined
/// set is used as the intermediate witness.
pub fn embe_upper_bound(p: &Polynomial, x_hat: &RootSet, cfg: &NewtonConfig) -> Result<EmbeBound> {
    check_roots(p, x_hat)?;
    tropical_roots(p)?;
    cfg.validate()?;
    let refined: Vec<RefinedRoot> = x_hat
        .roots
        .iter()
        .map(|&x| {
            let out = newton_refine(p, x, cfg);
            let rel_change = (XComplex::from_c64(x) - out.root).abs_f64() / out.root.abs_f64();
            RefinedRoot {
                approx: x,
                refined: out.root,
                rel_change,
                status: out.status,
                iterations: out.iterations,
            }
        })
        .collect();

    let pairing_collision = detect_collision(&refined);
    let diverged = refined.iter().any(|r| r.status == NewtonStatus::Diverged);
    let forward = refined.iter().map(|r| r.rel_change).fold(0.0, f64::max);
    let x_tilde: Vec<XComplex> = refined.iter().map(|r| r.refined).collect();
    let c_tilde = expand_roots_x(XComplex::from_c64(p.leading()), &x_tilde);
    let coefficient = mixed_error(p.coeffs(), &abs_errors_x(p.coeffs(), &c_tilde));
    let epsilon = if diverged || !forward.is_finite() {
        None
    } else {
        Some(forward.max(coefficient))
    };
    Ok(EmbeBound {
        epsilon,
        forward,
        coefficient,
        refined,
        pairing_collision,
    })
}

const COLLISION_DISTANCE: f64 = 1e-20;

fn detect_collision(refined: &[RefinedRoot]) -> bool {
    for (j, a) in refined.iter().enumerate() {
        for b in &refined[j + 1..] {
            let scale = a.refined.abs_f64().max(b.refined.abs_f64());
            let merged = (a.refined - b.refined).abs_f64() <= COLLISION_DISTANCE * scale;
            let hat_scale = a.approx.norm().max(b.approx.norm());
            let distinct = (a.approx - b.approx).norm() > COLLISION_DISTANCE * hat_scale;
            if merged && distinct {
                return true;
            }
        }
    }
    false
}

/// Explicit witness for a quadratic `a x^2 + b x + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticWitness {
    /// `x̃_1` (smaller modulus) and `x̃_2`.
    pub x_tilde: [XComplex; 2],
    pub b_tilde: XComplex,
    pub c_tilde: XComplex,
    pub r_b: f64,
    pub epsilon: f64,
}

/// Moves the smaller root by `(b̂ - b) / a` so that the witness polynomial
/// keeps the middle coefficient `b` exactly, and returns the achieved
/// mixed backward error certificate. When `r_b = 1` the roots are kept.
pub fn quadratic_witness(p: &Polynomial, x_hat: &RootSet) -> Result<QuadraticWitness> {
    if p.degree() != 2 {
        return Err(Error::Invalid(format!(
            "quadratic witness needs degree 2, got {}",
            p.degree()
        )));
    }
    check_roots(p, x_hat)?;
    let t = tropical_roots(p)?;
    let (a, b) = (p[2], p[1]);
    let sorted = x_hat.sorted_by_modulus();
    let x1 = XComplex::from_c64(sorted[0]);
    let x2 = XComplex::from_c64(sorted[1]);
    let ax = XComplex::from_c64(a);
    // x1 + x2 is exact in double-double; keeping the shift separate from x1
    // avoids rounding x~1 at the scale of |x1|, which would otherwise
    // dominate b~ when the roots nearly cancel.
    let sum = x1 + x2;
    let b_hat = -(ax * sum);
    let r_b = t.r[1];

    let shift = if r_b == 1.0 {
        XComplex::ZERO
    } else {
        (b_hat - XComplex::from_c64(b)) / ax
    };
    let x1_tilde = x1 + shift;
    if x1_tilde.is_zero() {
        return Err(Error::WitnessDegenerate("moved root cancelled to zero"));
    }
    let b_tilde = -(ax * (sum + shift));
    let c_tilde = ax * (x1 * x2 + shift * x2);
    let tilde = [c_tilde, b_tilde];
    let forward = shift.abs_f64() / x1_tilde.abs_f64();
    let coeff = mixed_error(p.coeffs(), &abs_errors_x(p.coeffs(), &tilde));
    Ok(QuadraticWitness {
        x_tilde: [x1_tilde, x2],
        b_tilde,
        c_tilde,
        r_b,
        epsilon: forward.max(coeff),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessConfig {
    /// Coefficients with `r_i <= r_cap` keep their perturbation in the
    /// witness polynomial; the others are reset to `c_i`.
    pub r_cap: f64,
    pub aberth: AberthConfig,
    pub newton: NewtonConfig,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            r_cap: 1e3,
            aberth: AberthConfig::default(),
            newton: NewtonConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralWitness {
    pub tilde_f: Polynomial,
    pub x_tilde: Vec<XComplex>,
    /// `matching[j]` is the index in `x_hat` paired with `x_tilde[j]`.
    pub matching: Vec<usize>,
    pub forward: f64,
    pub coefficient: f64,
    pub epsilon: f64,
    pub pairing_collision: bool,
}

/// Witness for general degree: keeps the reconstruction error of `ĉ_i` only
/// where `r_i` is moderate, solves the resulting polynomial and pairs its
/// roots with `x_hat`.
pub fn general_witness(p: &Polynomial, x_hat: &RootSet, cfg: &WitnessConfig) -> Result<GeneralWitness> {
    check_roots(p, x_hat)?;
    if !(cfg.r_cap > 1.0) {
        return Err(Error::Invalid(format!("r_cap must exceed 1, got {}", cfg.r_cap)));
    }
    let t = tropical_roots(p)?;
    let c = p.coeffs();
    let d = p.degree();
    let xr: Vec<XComplex> = x_hat.roots.iter().map(|&z| z.into()).collect();
    let c_hat = expand_roots_x(XComplex::from_c64(p.leading()), &xr);

    let mut tilde: Vec<Complex64> = (0..d)
        .map(|i| if t.r[i] <= cfg.r_cap { c_hat[i].to_c64() } else { c[i] })
        .collect();
    tilde.push(p.leading());
    let tilde_f = Polynomial::new(tilde)?;

    let x_tilde: Vec<XComplex> = if tilde_f == *p && x_hat.provenance == Provenance::Refined {
        xr.clone()
    } else {
        let tt = tropical_roots(&tilde_f)?;
        let rough = aberth(&tilde_f, &initial_guesses(&tt), &cfg.aberth)?;
        rough
            .roots
            .iter()
            .map(|&z| {
                let out = newton_refine(&tilde_f, z, &cfg.newton);
                if out.status == NewtonStatus::Diverged {
                    XComplex::from_c64(z)
                } else {
                    out.root
                }
            })
            .collect()
    };

    let (matching, pairing_collision) = match_roots(&xr, &x_tilde);
    let forward = matching
        .iter()
        .enumerate()
        .map(|(j, &h)| (xr[h] - x_tilde[j]).abs_f64() / x_tilde[j].abs_f64())
        .fold(0.0, f64::max);
    let expanded = expand_roots_x(XComplex::from_c64(p.leading()), &x_tilde);
    let coefficient = mixed_error(c, &abs_errors_x(c, &expanded));
    Ok(GeneralWitness {
        tilde_f,
        x_tilde,
        matching,
        forward,
        coefficient,
        epsilon: forward.max(coefficient),
        pairing_collision,
    })
}

/// Greedy pairing: candidates are visited in order of increasing modulus and
/// each takes the nearest (in relative distance) unused reference root.
/// Returns `matching[j] = reference index for candidate j` and whether a
/// candidate's nearest reference root had already been taken.
pub fn match_roots(reference: &[XComplex], candidates: &[XComplex]) -> (Vec<usize>, bool) {
    let n = candidates.len().min(reference.len());
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| candidates[a].abs_f64().total_cmp(&candidates[b].abs_f64()));
    let mut used = vec![false; reference.len()];
    let mut matching = vec![usize::MAX; candidates.len()];
    let mut collision = false;
    for &j in order.iter().take(n) {
        let scale = candidates[j].abs_f64();
        let dist = |h: usize| (reference[h] - candidates[j]).abs_f64() / scale;
        let nearest = (0..reference.len())
            .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
            .expect("non-empty reference");
        let pick = if used[nearest] {
            collision = true;
            (0..reference.len())
                .filter(|&h| !used[h])
                .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
                .expect("unused reference root")
        } else {
            nearest
        };
        used[pick] = true;
        matching[j] = pick;
    }
    (matching, collision)
}

/// Horner for `sum a_i x^i` and its derivative in double-double.
fn eval_pair_x(coeffs: &[Complex64], x: XComplex) -> (XComplex, XComplex) {
    let (mut f, mut df) = (XComplex::ZERO, XComplex::ZERO);
    for &c in coeffs.iter().rev() {
        df = df * x + f;
        f = f * x + XComplex::from_c64(c);
    }
    (f, df)
}

/// First-order displacement `-Δf(x) / (f'(x) + Δf'(x))` of the root `x` of
/// `p` under the coefficient perturbation `delta` (ascending, length at most
/// `d + 1`).
pub fn perturbation_estimate(p: &Polynomial, x_j: Complex64, delta: &[Complex64]) -> Result<Complex64> {
    if delta.len() > p.degree() + 1 {
        return Err(Error::LengthMismatch {
            expected: p.degree() + 1,
            actual: delta.len(),
        });
    }
    let x = XComplex::from_c64(x_j);
    let (_, df) = eval_pair_x(p.coeffs(), x);
    let (dlt, ddlt) = eval_pair_x(delta, x);
    let den = df + ddlt;
    if den.is_zero() {
        return Err(Error::SingularDerivative { at: x_j });
    }
    Ok((-dlt / den).to_c64())
}

/// Which measures to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measures {
    pub nbe: bool,
    pub ebe: bool,
    pub tbe: bool,
    pub embe: bool,
}

impl Default for Measures {
    fn default() -> Self {
        Measures {
            nbe: true,
            ebe: true,
            tbe: true,
            embe: true,
        }
    }
}

impl std::str::FromStr for Measures {
    type Err = Error;

    /// Comma-separated subset of `nbe,ebe,tbe,embe`.
    fn from_str(s: &str) -> Result<Self> {
        let mut m = Measures {
            nbe: false,
            ebe: false,
            tbe: false,
            embe: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().as_str() {
                "nbe" => m.nbe = true,
                "ebe" => m.ebe = true,
                "tbe" => m.tbe = true,
                "embe" => m.embe = true,
                other => return Err(Error::Invalid(format!("unknown measure `{other}`"))),
            }
        }
        if !(m.nbe || m.ebe || m.tbe || m.embe) {
            return Err(Error::Invalid("no measure selected".into()));
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EmbeStatus {
    NotComputed,
    Available(f64),
    Unavailable,
}

impl fmt::Display for EmbeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeStatus::NotComputed => write!(f, "not computed"),
            EmbeStatus::Available(v) => write!(f, "{v:e}"),
            EmbeStatus::Unavailable => write!(f, "unavailable"),
        }
    }
}

/// All four measures for one root set.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub nbe: f64,
    pub ebe: f64,
    pub tbe: f64,
    pub embe_ub: EmbeStatus,
    pub per_coeff: Vec<CoeffError>,
    pub refinement: Option<Vec<RefinedRoot>>,
    pub pairing_collision: bool,
}

impl ErrorReport {
    pub fn compute(p: &Polynomial, x_hat: &RootSet, measures: Measures, cfg: &NewtonConfig) -> Result<Self> {
        let tb = tbe(p, x_hat)?;
        let abs_err: Vec<f64> = tb.per_coeff.iter().map(|e| e.abs_err).collect();
        let nbe = nbe_from(p.coeffs(), &abs_err)?;
        let ebe = ebe_from(p.coeffs(), &abs_err);
        let (embe_ub, refinement, pairing_collision) = if measures.embe {
            let bound = embe_upper_bound(p, x_hat, cfg)?;
            let status = match bound.epsilon {
                Some(e) => EmbeStatus::Available(e),
                None => EmbeStatus::Unavailable,
            };
            (status, Some(bound.refined), bound.pairing_collision)
        } else {
            (EmbeStatus::NotComputed, None, false)
        };
        Ok(ErrorReport {
            nbe,
            ebe,
            tbe: tb.value,
            embe_ub,
            per_coeff: tb.per_coeff,
            refinement,
            pairing_collision,
        })
    }
}
