//! Tropical roots of a complex polynomial under the valuation `ln|.|`.
//!
//! The lifted points `(i, ln|c_i|)` are scanned once with a monotone chain to
//! obtain their upper concave hull. Each hull segment of length `m` carries a
//! tropical root of multiplicity `m` equal to the negated slope, and the
//! distance of an interior point below the hull gives its `r_i` constant.

use crate::error::{Error, Result};
use crate::poly::{elem_sym_abs, Polynomial};

/// Everything derived from the upper hull of the lifted Newton polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalData {
    /// `v_i = ln|c_i|`, `-inf` for zero coefficients; length `d + 1`.
    pub valuations: Vec<f64>,
    /// Hull vertex indices `0 = b_0 < ... < b_s = d`.
    pub hull: Vec<usize>,
    /// Tropical roots `tau_1 ..= tau_d` (stored at offsets `0..d`), in log
    /// form and non-decreasing.
    pub tau: Vec<f64>,
    /// Segment lengths `b_l - b_{l-1}`, one per hull segment.
    pub multiplicities: Vec<usize>,
    /// `r_0 ..= r_d`, all `>= 1` and equal to 1 at hull vertices.
    pub r: Vec<f64>,
}

/// One hull segment and the tropical root it carries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub tau: f64,
}

impl Block {
    pub fn multiplicity(&self) -> usize {
        self.end - self.start
    }
}

impl TropicalData {
    pub fn degree(&self) -> usize {
        self.valuations.len() - 1
    }

    /// `tau_i` with the 1-based index used in formulas.
    pub fn tau_at(&self, i: usize) -> f64 {
        self.tau[i - 1]
    }

    /// The induced subdivision: consecutive pairs of hull vertices.
    pub fn subdivision(&self) -> Vec<(usize, usize)> {
        self.hull.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn blocks(&self) -> impl Iterator<Item = Block> + '_ {
        self.hull.windows(2).map(|w| Block {
            start: w[0],
            end: w[1],
            tau: self.tau[w[1] - 1],
        })
    }

    pub fn is_vertex(&self, i: usize) -> bool {
        self.hull.binary_search(&i).is_ok()
    }

    /// Predicted root moduli `exp(tau_i)`, ascending. May overflow to
    /// infinity for extreme coefficient spreads; prefer `tau` where possible.
    pub fn root_moduli(&self) -> Vec<f64> {
        self.tau.iter().map(|t| t.exp()).collect()
    }
}

/// `ln|c_i|` for each coefficient; requires `c_0 != 0` and `c_d != 0`.
pub fn valuations(p: &Polynomial) -> Result<Vec<f64>> {
    let c = p.coeffs();
    if c[0].norm() == 0.0 {
        return Err(Error::ZeroConstantCoefficient);
    }
    if p.leading().norm() == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    Ok(c.iter()
        .map(|z| {
            let m = z.norm();
            if m == 0.0 {
                f64::NEG_INFINITY
            } else {
                m.ln()
            }
        })
        .collect())
}

#[inline]
fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Vertex indices of the upper concave chain through the finite points
/// `(i, v_i)`. Points lying exactly on a hull edge are not vertices.
pub fn upper_hull(v: &[f64]) -> Result<Vec<usize>> {
    let d = v.len().checked_sub(1).ok_or(Error::EmptyPolynomial)?;
    if !v[0].is_finite() || !v[d].is_finite() {
        return Err(Error::Invalid(
            "first and last valuations must be finite".into(),
        ));
    }
    let mut hull: Vec<usize> = Vec::with_capacity(v.len());
    for (i, &vi) in v.iter().enumerate() {
        if vi == f64::NEG_INFINITY {
            continue;
        }
        if vi.is_nan() || vi == f64::INFINITY {
            return Err(Error::Invalid(format!("valuation {i} is {vi}")));
        }
        let p = (i as f64, vi);
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if cross((a as f64, v[a]), (b as f64, v[b]), p) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    Ok(hull)
}

/// `r_i` for every index given the hull of `v`. Zero coefficients use the
/// hull height itself; every value is clamped below at 1.
pub fn r_constants(v: &[f64], hull: &[usize]) -> Vec<f64> {
    let mut r = vec![1.0; v.len()];
    for w in hull.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let tau = (v[lo] - v[hi]) / (hi - lo) as f64;
        for i in lo + 1..hi {
            let height = v[hi] + (hi - i) as f64 * tau;
            let log_r = if v[i].is_finite() {
                height - v[i]
            } else {
                height
            };
            r[i] = log_r.exp().max(1.0);
        }
    }
    r
}

/// Valuations, hull, tropical roots with multiplicities and `r_i` constants.
pub fn tropical_roots(p: &Polynomial) -> Result<TropicalData> {
    let valuations = valuations(p)?;
    let hull = upper_hull(&valuations)?;
    let d = p.degree();
    let mut tau = vec![0.0; d];
    let mut multiplicities = Vec::with_capacity(hull.len().saturating_sub(1));
    for w in hull.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let m = hi - lo;
        let t = (valuations[lo] - valuations[hi]) / m as f64;
        tau[lo..hi].fill(t);
        multiplicities.push(m);
    }
    let r = r_constants(&valuations, &hull);
    Ok(TropicalData {
        valuations,
        hull,
        tau,
        multiplicities,
        r,
    })
}

/// Diagnostic `w_i = ln sigma_{d-i}(|x_1|, .., |x_d|) - (tau_d + ... + tau_{i+1})`
/// for `i = 0..d-1`; small values mean root moduli follow the tropical roots.
pub fn assumption_w(t: &TropicalData, moduli: &[f64]) -> Result<Vec<f64>> {
    let d = t.degree();
    if moduli.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            actual: moduli.len(),
        });
    }
    if let Some(&bad) = moduli.iter().find(|&&m| !(m > 0.0)) {
        return Err(Error::NonPositive {
            what: "root modulus",
            value: bad,
        });
    }
    let mut sorted = moduli.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sigma = elem_sym_abs(&sorted)?;
    let mut w = Vec::with_capacity(d);
    for i in 0..d {
        let tail: f64 = t.tau[i..].iter().sum();
        w.push(sigma[d - i].ln() - tail);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn septic() -> Polynomial {
        Polynomial::from_real(&[2.5, 6.0, 3.0, 2.5, 5.0, 0.5, 3.0, 0.5]).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn valuation_examples() {
        let v = valuations(&Polynomial::from_real(&[1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(v, vec![0.0, 0.0, 0.0]);
        let v = valuations(&Polynomial::from_real(&[1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(v, vec![0.0, f64::NEG_INFINITY, 0.0]);
        let v = valuations(&septic()).unwrap();
        let want = [2.5f64, 6.0, 3.0, 2.5, 5.0, 0.5, 3.0, 0.5].map(f64::ln);
        assert_eq!(v, want.to_vec());
        assert_eq!(
            valuations(&Polynomial::from_real(&[0.0, 1.0]).unwrap()),
            Err(Error::ZeroConstantCoefficient)
        );
    }

    #[test]
    fn hull_examples() {
        let t = tropical_roots(&septic()).unwrap();
        assert_eq!(t.hull, vec![0, 1, 4, 6, 7]);
        assert_eq!(t.subdivision(), vec![(0, 1), (1, 4), (4, 6), (6, 7)]);
        assert_eq!(t.multiplicities, vec![1, 3, 2, 1]);
        assert_eq!(upper_hull(&[0.0, 0.0]).unwrap(), vec![0, 1]);
        assert_eq!(upper_hull(&[0.0, 10.0, 0.0]).unwrap(), vec![0, 1, 2]);
        // collinear middle point is not a vertex
        assert_eq!(upper_hull(&[0.0, 1.0, 2.0]).unwrap(), vec![0, 2]);
        assert_eq!(
            upper_hull(&[0.0, f64::NEG_INFINITY, 0.0]).unwrap(),
            vec![0, 2]
        );
        assert!(upper_hull(&[f64::NEG_INFINITY, 0.0]).is_err());
    }

    #[test]
    fn septic_tropical_roots() {
        let t = tropical_roots(&septic()).unwrap();
        let blocks: Vec<(f64, usize)> = t.blocks().map(|b| (b.tau, b.multiplicity())).collect();
        let want = [
            ((5.0f64 / 12.0).ln(), 1),
            ((6.0f64 / 5.0).ln() / 3.0, 3),
            ((5.0f64 / 3.0).ln() / 2.0, 2),
            (6.0f64.ln(), 1),
        ];
        for ((got, m), (exp, em)) in blocks.iter().zip(want) {
            assert!(close(*got, exp, 1e-15), "{got} vs {exp}");
            assert_eq!(*m, em);
        }
        for w in t.tau.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn septic_r_constants() {
        let t = tropical_roots(&septic()).unwrap();
        for i in [0, 1, 4, 6, 7] {
            assert_eq!(t.r[i], 1.0);
        }
        // vertical distance from (i, v_i) to the chord, computed geometrically
        let v = &t.valuations;
        let chord = |a: usize, b: usize, i: usize| {
            v[a] + (v[b] - v[a]) * (i - a) as f64 / (b - a) as f64
        };
        assert!(close(t.r[2], (chord(1, 4, 2) - v[2]).exp(), 1e-14));
        assert!(close(t.r[3], (chord(1, 4, 3) - v[3]).exp(), 1e-14));
        assert!(close(t.r[5], (chord(4, 6, 5) - v[5]).exp(), 1e-14));
        assert!(close(t.r[2], (5.0 / 3.0) * (6.0f64 / 5.0).powf(2.0 / 3.0), 1e-14));
        assert!(close(t.r[3], 2.0 * (6.0f64 / 5.0).powf(1.0 / 3.0), 1e-14));
        assert!(close(t.r[5], 2.0 * 3.0f64.sqrt() * 5.0f64.sqrt(), 1e-14));
    }

    #[test]
    fn quadratic_r_matches_closed_form() {
        let p = Polynomial::from_real(&[1e4, 1.0, 1e-2]).unwrap();
        let t = tropical_roots(&p).unwrap();
        assert!(close(t.r[1], 10.0, 1e-14));
        // |b|^2 >= |ac| gives two segments with tau = ln|c/b|, ln|b/a|
        let p = Polynomial::from_real(&[2.0, 10.0, 3.0]).unwrap();
        let t = tropical_roots(&p).unwrap();
        assert_eq!(t.hull, vec![0, 1, 2]);
        assert!(close(t.tau[0], (0.2f64).ln(), 1e-15));
        assert!(close(t.tau[1], (10.0f64 / 3.0).ln(), 1e-15));
        assert_eq!(t.r[1], 1.0);
    }

    #[test]
    fn double_root_splits_tropically() {
        let p = Polynomial::from_real(&[1.0, -2.0, 1.0]).unwrap();
        let t = tropical_roots(&p).unwrap();
        assert_eq!(t.hull, vec![0, 1, 2]);
        assert!(close(t.tau[0], -(2.0f64.ln()), 1e-15));
        assert!(close(t.tau[1], 2.0f64.ln(), 1e-15));
    }

    #[test]
    fn zero_coefficient_uses_hull_height() {
        // x^2 + 1: r_1 = exp((v0 + v2)/2) = 1
        let t = tropical_roots(&Polynomial::from_real(&[1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(t.r[1], 1.0);
        // 100 x^2 + 4: hull height at 1 is ln 20
        let t = tropical_roots(&Polynomial::from_real(&[4.0, 0.0, 100.0]).unwrap()).unwrap();
        assert!(close(t.r[1], 20.0, 1e-14));
        // tiny coefficients: height below 0 is clamped to r = 1
        let t = tropical_roots(&Polynomial::from_real(&[1e-4, 0.0, 1e-4]).unwrap()).unwrap();
        assert_eq!(t.r[1], 1.0);
    }

    #[test]
    fn w_examples() {
        // d = 1
        let p = Polynomial::from_real(&[3.0, 2.0]).unwrap();
        let t = tropical_roots(&p).unwrap();
        let w = assumption_w(&t, &[1.7]).unwrap();
        assert!(close(w[0], 1.7f64.ln() - t.tau[0], 1e-15));

        // d = 2 with moduli exactly exp(tau)
        let p = Polynomial::from_real(&[2.0, 10.0, 3.0]).unwrap();
        let t = tropical_roots(&p).unwrap();
        let w = assumption_w(&t, &t.root_moduli()).unwrap();
        let gap = (t.tau[0] - t.tau[1]).exp();
        assert!(w[0].abs() < 1e-15);
        assert!(close(w[1], (1.0 + gap).ln(), 1e-14));
        assert!(w[1] > 0.0 && w[1] <= 2f64.ln());

        let t = tropical_roots(&septic()).unwrap();
        let w = assumption_w(&t, &t.root_moduli()).unwrap();
        let bound = (7.0f64 * 2f64.powi(7)).ln();
        assert!(w.iter().all(|x| x.abs() <= bound), "{w:?}");

        assert!(assumption_w(&t, &[1.0; 3]).is_err());
        let mut m = t.root_moduli();
        m[2] = 0.0;
        assert!(matches!(assumption_w(&t, &m), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn scaling_shifts_tropical_roots() {
        let p = septic();
        let lambda = Complex64::from_polar(37.5, 0.4);
        let scaled: Vec<Complex64> = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * lambda.powi(i as i32))
            .collect();
        let q = Polynomial::new(scaled).unwrap();
        let (tp, tq) = (tropical_roots(&p).unwrap(), tropical_roots(&q).unwrap());
        assert_eq!(tp.hull, tq.hull);
        for (a, b) in tp.tau.iter().zip(&tq.tau) {
            assert!((b - (a - lambda.norm().ln())).abs() < 1e-10);
        }
        for (a, b) in tp.r.iter().zip(&tq.r) {
            assert!((a / b - 1.0).abs() < 1e-10);
        }
    }
}
