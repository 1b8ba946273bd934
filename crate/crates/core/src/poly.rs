//! Dense complex polynomials in ascending power order.

use std::fmt;
use std::ops::{Add, Index, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::xprec::{frexp, pow2, PrecisionMode, XComplex};

/// `c_0 + c_1 x + ... + c_d x^d` with `c_d != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients. Zero coefficients are
    /// allowed anywhere except in the leading position.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::EmptyPolynomial),
            Some(c) if *c == Complex64::new(0.0, 0.0) => Err(Error::ZeroLeadingCoefficient),
            Some(_) => Ok(Polynomial { coeffs }),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The zero polynomial of degree 0.
    pub fn zero() -> Self {
        Polynomial {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Horner evaluation in working precision.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Horner evaluation in double-double arithmetic on the exact
    /// coefficients.
    pub fn eval_x(&self, x: XComplex) -> XComplex {
        self.coeffs.iter().rev().fold(XComplex::ZERO, |acc, &c| {
            acc * x + XComplex::from_c64(c)
        })
    }

    /// `max_i |c_i x^i|`, the scale against which residuals are measured.
    pub fn max_term(&self, x: Complex64) -> f64 {
        let lx = x.norm().ln();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, c)| (c.norm().ln() + i as f64 * lx).exp())
            .fold(0.0, f64::max)
    }

    /// k-th derivative; returns the zero polynomial when `k > d`.
    pub fn derivative(&self, k: usize) -> Polynomial {
        let d = self.degree();
        if k > d {
            return Polynomial::zero();
        }
        if k == 0 {
            return self.clone();
        }
        let coeffs = (k..=d)
            .map(|i| {
                let falling: f64 = ((i - k + 1)..=i).map(|j| j as f64).product();
                self.coeffs[i] * falling
            })
            .collect();
        Polynomial { coeffs }
    }

    /// Newton correction `f(x)/f'(x)` together with the relative residual
    /// `|f(x)| / sum_i |c_i| |x|^i`, both computed without overflow. For
    /// `|x| > 1` the reversed polynomial is evaluated at `1/x`.
    pub fn newton_terms(&self, x: Complex64) -> NewtonTerms {
        let d = self.degree();
        let zero = Complex64::new(0.0, 0.0);
        if x.norm() <= 1.0 {
            let ax = x.norm();
            let (mut f, mut df, mut s) = (zero, zero, 0.0);
            for &c in self.coeffs.iter().rev() {
                df = df * x + f;
                f = f * x + c;
                s = s * ax + c.norm();
            }
            NewtonTerms {
                step: f / df,
                rel_residual: f.norm() / s,
            }
        } else {
            let y = x.inv();
            let ay = y.norm();
            let (mut g, mut dg, mut s) = (zero, zero, 0.0);
            for &c in self.coeffs.iter() {
                dg = dg * y + g;
                g = g * y + c;
                s = s * ay + c.norm();
            }
            let den = g * d as f64 - y * dg;
            NewtonTerms {
                step: x * g / den,
                rel_residual: g.norm() / s,
            }
        }
    }

    /// Double-double Newton correction `f(x)/f'(x)`; `None` when the
    /// derivative vanishes exactly.
    pub fn newton_step_x(&self, x: XComplex) -> Option<XComplex> {
        let d = self.degree();
        if x.abs_f64() <= 1.0 {
            let (mut f, mut df) = (XComplex::ZERO, XComplex::ZERO);
            for &c in self.coeffs.iter().rev() {
                df = df * x + f;
                f = f * x + XComplex::from_c64(c);
            }
            f.checked_div(df).ok()
        } else {
            let y = x.recip();
            let (mut g, mut dg) = (XComplex::ZERO, XComplex::ZERO);
            for &c in self.coeffs.iter() {
                dg = dg * y + g;
                g = g * y + XComplex::from_c64(c);
            }
            let den = g * d as f64 - y * dg;
            (x * g).checked_div(den).ok()
        }
    }

    /// Parses the plain-text coefficient format (see [`parse_complex_lines`]).
    pub fn parse(text: &str) -> Result<Polynomial> {
        let coeffs = parse_complex_lines(text)?;
        if coeffs.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no coefficients found".into(),
            });
        }
        Polynomial::new(coeffs).map_err(|e| Error::Parse {
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        write_complex_lines(&self.coeffs)
    }
}

impl Index<usize> for Polynomial {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.coeffs[i]
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonTerms {
    pub step: Complex64,
    pub rel_residual: f64,
}

/// Expands `c_d * prod_j (x - x_j)` one linear factor at a time.
pub fn from_roots(c_d: Complex64, roots: &[Complex64], precision: PrecisionMode) -> Polynomial {
    let coeffs = match precision {
        PrecisionMode::Working => {
            let mut c = vec![c_d];
            for &r in roots {
                c.push(c[c.len() - 1]);
                for k in (1..c.len() - 1).rev() {
                    c[k] = c[k - 1] - r * c[k];
                }
                c[0] = -r * c[0];
            }
            c
        }
        PrecisionMode::Extended => {
            let xr: Vec<XComplex> = roots.iter().map(|&r| XComplex::from_c64(r)).collect();
            expand_roots_x(XComplex::from_c64(c_d), &xr)
                .into_iter()
                .map(XComplex::to_c64)
                .collect()
        }
    };
    Polynomial { coeffs }
}

/// Extended-precision coefficients of `c_d * prod_j (x - x_j)`, ascending.
/// The leading entry equals `c_d` exactly.
pub fn expand_roots_x(c_d: XComplex, roots: &[XComplex]) -> Vec<XComplex> {
    let mut c = Vec::with_capacity(roots.len() + 1);
    c.push(c_d);
    for &r in roots {
        c.push(c[c.len() - 1]);
        for k in (1..c.len() - 1).rev() {
            c[k] = c[k - 1] - r * c[k];
        }
        c[0] = -(r * c[0]);
    }
    c
}

/// Non-negative real `mantissa * 2^exponent` with an unbounded exponent.
#[derive(Clone, Copy, PartialEq)]
pub struct ScaledReal {
    mantissa: f64,
    exponent: i64,
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal {
        mantissa: 0.0,
        exponent: 0,
    };
    pub const ONE: ScaledReal = ScaledReal {
        mantissa: 1.0,
        exponent: 0,
    };

    /// Accepts finite non-negative values.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Invalid(format!(
                "expected a finite non-negative value, got {x}"
            )));
        }
        Ok(Self::normalized(x, 0))
    }

    fn normalized(m: f64, e: i64) -> Self {
        if m == 0.0 {
            return ScaledReal::ZERO;
        }
        let (mant, shift) = frexp(m);
        ScaledReal {
            mantissa: mant,
            exponent: e + shift,
        }
    }

    pub fn mantissa(self) -> f64 {
        self.mantissa
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    /// Rounds to `f64`; saturates to infinity or zero outside its range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exponent > 1023 {
            return f64::INFINITY;
        }
        if self.exponent < -1080 {
            return 0.0;
        }
        self.mantissa * pow2(self.exponent)
    }

    /// Natural logarithm; `-inf` for zero.
    pub fn ln(self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.ln() + self.exponent as f64 * std::f64::consts::LN_2
    }
}

impl Add for ScaledReal {
    type Output = ScaledReal;
    fn add(self, rhs: ScaledReal) -> ScaledReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = big.exponent - small.exponent;
        if gap > 60 {
            return big;
        }
        let m = big.mantissa + small.mantissa * pow2(-gap);
        ScaledReal::normalized(m, big.exponent)
    }
}

impl Mul for ScaledReal {
    type Output = ScaledReal;
    fn mul(self, rhs: ScaledReal) -> ScaledReal {
        if self.is_zero() || rhs.is_zero() {
            return ScaledReal::ZERO;
        }
        ScaledReal::normalized(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl fmt::Debug for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let log10 = self.ln() / std::f64::consts::LN_10;
        let e = log10.floor();
        write!(f, "{:.6}e{}", 10f64.powf(log10 - e), e as i64)
    }
}

/// Elementary symmetric functions `sigma_0 .. sigma_n` of non-negative
/// values, accumulated one value at a time.
pub fn elem_sym_abs(values: &[f64]) -> Result<Vec<ScaledReal>> {
    let mut sigma = vec![ScaledReal::ZERO; values.len() + 1];
    sigma[0] = ScaledReal::ONE;
    for (j, &v) in values.iter().enumerate() {
        let v = ScaledReal::from_f64(v)?;
        for k in (1..=j + 1).rev() {
            sigma[k] = sigma[k] + v * sigma[k - 1];
        }
    }
    Ok(sigma)
}

/// Parses one complex number per line as two whitespace-separated decimal
/// fields `re im`. Blank lines and lines whose first non-blank character is
/// `#` are skipped. Line numbers in errors are 1-based.
pub fn parse_complex_lines(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 fields `re im`, found {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: idx + 1,
                message: format!("invalid number `{s}`: {e}"),
            })
        };
        let (re, im) = (parse(fields[0])?, parse(fields[1])?);
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Parse {
                line: idx + 1,
                message: "non-finite value".into(),
            });
        }
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

/// Writes values in the format read by [`parse_complex_lines`], with 17
/// significant digits so that every `f64` round-trips.
pub fn write_complex_lines(values: &[Complex64]) -> String {
    let mut s = String::new();
    for z in values {
        s.push_str(&format!("{:.16e} {:.16e}\n", z.re, z.im));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn septic() -> Polynomial {
        Polynomial::from_real(&[2.5, 6.0, 3.0, 2.5, 5.0, 0.5, 3.0, 0.5]).unwrap()
    }

    #[test]
    fn rejects_zero_leading_coefficient() {
        assert_eq!(
            Polynomial::from_real(&[1.0, 0.0]),
            Err(Error::ZeroLeadingCoefficient)
        );
        assert_eq!(Polynomial::new(vec![]), Err(Error::EmptyPolynomial));
        // interior and constant zeros are fine
        assert!(Polynomial::from_real(&[0.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn eval_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.eval(c(1.0)), c(0.0));
        assert_eq!(septic().eval(c(0.0)), c(2.5));
        let sum: f64 = septic().coeffs().iter().map(|z| z.re).sum();
        assert_eq!(sum, 23.0);
        assert_eq!(septic().eval(c(1.0)), c(sum));
        assert_eq!(septic().eval_x(XComplex::ONE).to_c64(), c(sum));
    }

    #[test]
    fn derivative_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.derivative(1).coeffs(), &[c(0.0), c(2.0)]);
        let cube = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(cube.derivative(3).coeffs(), &[c(6.0)]);
        assert_eq!(cube.derivative(4), Polynomial::zero());
        let expected = [6.0, 6.0, 7.5, 20.0, 2.5, 18.0, 3.5];
        let got: Vec<f64> = septic().derivative(1).coeffs().iter().map(|z| z.re).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn from_roots_examples() {
        for mode in [PrecisionMode::Working, PrecisionMode::Extended] {
            let p = from_roots(c(1.0), &[c(1.0), c(-1.0)], mode);
            assert_eq!(p.coeffs(), &[c(-1.0), c(0.0), c(1.0)]);
            let p = from_roots(c(1.0), &[c(1.0), c(2.0), c(3.0)], mode);
            assert_eq!(p.coeffs(), &[c(-6.0), c(11.0), c(-6.0), c(1.0)]);
        }
        let p = from_roots(c(0.2), &[c(1e6), c(1e-6)], PrecisionMode::Extended);
        assert_eq!(p.leading(), c(0.2));
        let want = [0.2, -0.2 * (1e6 + 1e-6), 0.2];
        for (got, want) in p.coeffs().iter().zip(want) {
            assert!((got - c(want)).norm() <= 1e-15 * want.abs());
        }
    }

    #[test]
    fn elem_sym_examples() {
        let s: Vec<f64> = elem_sym_abs(&[1.0, 2.0, 3.0])
            .unwrap()
            .iter()
            .map(|x| x.to_f64())
            .collect();
        assert_eq!(s, vec![1.0, 6.0, 11.0, 6.0]);
        let s: Vec<f64> = elem_sym_abs(&[1.0]).unwrap().iter().map(|x| x.to_f64()).collect();
        assert_eq!(s, vec![1.0, 1.0]);
        let s = elem_sym_abs(&[1e8, 1e-8]).unwrap();
        assert_eq!(s[0].to_f64(), 1.0);
        assert!((s[1].to_f64() / (1e8 + 1e-8) - 1.0).abs() < 1e-15);
        assert!((s[2].to_f64() - 1.0).abs() < 1e-15);
        assert!(elem_sym_abs(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn elem_sym_beyond_f64_range() {
        // 400 copies of 1e300: sigma_400 = 1e120000
        let vals = vec![1e300; 400];
        let s = elem_sym_abs(&vals).unwrap();
        let want = 400.0 * 300.0 * std::f64::consts::LN_10;
        assert!((s[400].ln() / want - 1.0).abs() < 1e-12);
        assert_eq!(s[400].to_f64(), f64::INFINITY);
        // sigma_1 = 400e300 also overflows f64 but not ScaledReal
        assert!((s[1].ln() - (400f64.ln() + 300.0 * std::f64::consts::LN_10)).abs() < 1e-12);
    }

    #[test]
    fn newton_terms_agree_across_branches() {
        let p = septic();
        for x in [Complex64::new(0.99, 0.1), Complex64::new(1.2, -0.4), Complex64::new(-3.0, 2.0)] {
            let t = p.newton_terms(x);
            let direct = p.eval(x) / p.derivative(1).eval(x);
            assert!((t.step - direct).norm() <= 1e-13 * direct.norm());
            let sx = p.newton_step_x(XComplex::from_c64(x)).unwrap().to_c64();
            assert!((sx - direct).norm() <= 1e-13 * direct.norm());
        }
    }

    #[test]
    fn newton_terms_do_not_overflow_for_huge_arguments() {
        // f(2e16) = (1.9e16)^20 is not representable
        let p = from_roots(c(1.0), &vec![c(1e15); 20], PrecisionMode::Working);
        let x = Complex64::new(2e16, 0.0);
        assert!(!p.eval(x).re.is_finite());
        let t = p.newton_terms(x);
        // f/f' = (x - a) / 20
        assert!((t.step.re / 9.5e14 - 1.0).abs() < 1e-10, "{:?}", t.step);
        assert!(t.rel_residual.is_finite());
    }

    #[test]
    fn text_format_round_trip_and_errors() {
        let text = "# header\n\n1.5 -2\n  # indented comment\n3e-300 0.1\n";
        let v = parse_complex_lines(text).unwrap();
        assert_eq!(v, vec![Complex64::new(1.5, -2.0), Complex64::new(3e-300, 0.1)]);
        let back = parse_complex_lines(&write_complex_lines(&v)).unwrap();
        assert_eq!(back, v);
        match parse_complex_lines("1 0\n2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_complex_lines("1 0\nx 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(Polynomial::parse("1 0\n0 0\n").is_err());
    }
}
