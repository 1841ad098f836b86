use super::ext::ExtComplex;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Polynomial with complex coefficients, stored lowest degree first.
/// Trailing zero coefficients are trimmed on construction, so `degree()` is
/// honest; the zero polynomial is the empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Poly {
        while coeffs
            .last()
            .is_some_and(|c| c.re == 0.0 && c.im == 0.0)
        {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Poly {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// p(z) = z^d + lower, from the full coefficient list of the lower part.
    pub fn monic(degree: usize, lower: &[Complex64]) -> Poly {
        let mut c = lower.to_vec();
        c.resize(degree, Complex64::new(0.0, 0.0));
        c.push(Complex64::new(1.0, 0.0));
        Poly::new(c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs
            .get(i)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs
            .last()
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation in extended-exponent arithmetic; exact for arguments
    /// whose powers leave the f64 range.
    pub fn eval_ext(&self, z: ExtComplex) -> ExtComplex {
        let mut acc = ExtComplex::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + ExtComplex::from_complex(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![]);
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i + 1) as f64)
                .collect(),
        )
    }

    /// Composition self(inner). Cost O(d1^2 d2^2); used for small elimination
    /// polynomials only.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::new(vec![]);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::new(vec![c]));
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.coeff(i) + other.coeff(i);
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(vec![]);
        }
        let mut out =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// All roots with multiplicity, via companion-matrix eigenvalues plus one
    /// guarded Newton step per root. Deterministic order (by real part, then
    /// imaginary part). Degree must be in 1..=64.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let d = self.degree();
        if d == 0 || d > 64 {
            return Err(Error::DegreeOutOfRange(d));
        }
        // scale-normalize for conditioning (roots are unchanged)
        let cmax = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let scaled: Vec<Complex64> = self.coeffs.iter().map(|&c| c / cmax).collect();
        let lead = scaled[d];

        let mut raw: Vec<Complex64> = if d == 1 {
            vec![-scaled[0] / lead]
        } else {
            let zero = Complex64::new(0.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let mut m = DMatrix::<Complex64>::from_element(d, d, zero);
            for i in 1..d {
                m[(i, i - 1)] = one;
            }
            for i in 0..d {
                m[(i, d - 1)] = -scaled[i] / lead;
            }
            balance(&mut m);
            match m.clone().eigenvalues() {
                Some(ev) => ev.iter().copied().collect(),
                None => {
                    // rare stalls: retry the Schur iteration with a loose eps
                    let schur = m
                        .try_schur(1e-9, 50_000)
                        .ok_or(Error::EigenFailure(d))?;
                    let t = schur.unpack().1;
                    (0..d).map(|i| t[(i, i)]).collect()
                }
            }
        };

        // one Newton polish per root, kept only if it reduces |p|
        let dp = self.derivative();
        for r in raw.iter_mut() {
            let pv = self.eval(*r);
            let dv = dp.eval(*r);
            if dv.norm() > 1e-280 {
                let cand = *r - pv / dv;
                if self.eval(cand).norm() <= pv.norm() {
                    *r = cand;
                }
            }
        }
        raw.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(raw)
    }
}

/// Parlett-Reinsch balancing with power-of-two factors (exact similarity
/// transform). Equalizing row and column norms noticeably tightens eigenvalue
/// clusters of companion matrices at multiple roots.
fn balance(a: &mut DMatrix<Complex64>) {
    let d = a.nrows();
    for _pass in 0..32 {
        let mut converged = true;
        for i in 0..d {
            let mut c: f64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| a[(j, i)].norm())
                .sum();
            let mut r: f64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| a[(i, j)].norm())
                .sum();
            if c == 0.0 || r == 0.0 || !(c.is_finite() && r.is_finite()) {
                continue;
            }
            let s = c + r;
            let mut f = 1.0f64;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if c + r < 0.95 * s && f != 1.0 {
                converged = false;
                for j in 0..d {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}
