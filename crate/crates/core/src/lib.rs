//! Backward error measures for approximate roots of complex polynomials.
//!
//! The crate compares four ways of judging a computed root set `X̂` of
//! `f(x) = c_0 + c_1 x + ... + c_d x^d`:
//!
//! * [`nbe`]: norm-wise relative distance between `c` and the coefficients
//!   of `c_d * prod (x - x̂_j)`;
//! * [`ebe`]: the same, coefficient by coefficient;
//! * [`tbe`]: element-wise, but with the tolerance of each coefficient
//!   widened by the constant `r_i` read off the Newton polygon;
//! * [`embe_upper_bound`]: a certified upper bound on the element-wise mixed
//!   backward error, obtained by refining every root in double-double.
//!
//! The tropical layer ([`tropical_roots`]) also drives the starting points
//! of the bundled Aberth rootfinder ([`find_roots`]), and [`harness`] runs
//! batch experiments over random polynomials.
//!
//! ```
//! use num_complex::Complex64;
//! use rootbe::{find_roots, tbe, AberthConfig, Polynomial};
//!
//! let p = Polynomial::from_real(&[2.0, -3.0, 1.0]).unwrap();
//! let roots = find_roots(&p, &AberthConfig::default()).unwrap();
//! assert!(tbe(&p, &roots).unwrap().value < 1e-15);
//! # let _ = Complex64::new(0.0, 0.0);
//! ```

pub mod backward_error;
pub mod error;
pub mod harness;
pub mod poly;
pub mod rootfind;
pub mod tropical;
pub mod xprec;

pub use backward_error::{
    ebe, embe_upper_bound, general_witness, match_roots, nbe, perturbation_estimate, quadratic_witness, tbe,
    CoeffError, EmbeBound, EmbeStatus, ErrorReport, GeneralWitness, Measures, Provenance, QuadraticWitness,
    RefinedRoot, RootSet, TbeResult, WitnessConfig,
};
pub use error::{Error, Result};
pub use harness::{experiment1, experiment2, random_poly, trial_rng, ExperimentConfig, Exp1Record, Exp2Record};
pub use poly::{elem_sym_abs, from_roots, parse_complex_lines, write_complex_lines, Polynomial, ScaledReal};
pub use rootfind::{aberth, find_roots, initial_guesses, AberthConfig};
pub use tropical::{assumption_w, r_constants, tropical_roots, upper_hull, valuations, TropicalData};
pub use xprec::{
    newton_refine, NewtonConfig, NewtonOutcome, NewtonStatus, PrecisionMode, XComplex, XReal, UNIT_ROUNDOFF,
};
pub use num_complex::Complex64;
