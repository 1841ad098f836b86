//! Hénon-type automorphisms of C^2: compositions of factors
//! `h(z1, z2) = (p(z1) + a z2, z1)` with `deg p >= 2` and `a != 0`.
//!
//! Each factor has the constant Jacobian determinant `-a` and the explicit
//! inverse `h^{-1}(z1, z2) = (z2, (z1 - p(z2)) / a)`. A composition inherits
//! the product degree and the product determinant, and its inverse is again
//! Hénon type after conjugating by the coordinate swap.

use crate::error::{Error, Result};
use crate::numerics::{ExtComplex, ExtPoint, Mat2, Poly};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct HenonFactor {
    p: Poly,
    a: Complex64,
}

impl HenonFactor {
    pub fn new(p: Poly, a: Complex64) -> Result<HenonFactor> {
        if p.degree() < 2 || p.is_zero() {
            return Err(Error::FactorDegree(p.degree()));
        }
        if a.re == 0.0 && a.im == 0.0 {
            return Err(Error::FactorZeroA);
        }
        if !a.is_finite() || p.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(Error::FactorNonFinite);
        }
        Ok(HenonFactor { p, a })
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn degree(&self) -> usize {
        self.p.degree()
    }
}

/// Escape certificate: on `V+ = { |z1| >= max(|z2|, radius) }` every factor
/// application multiplies `|z1|` by at least `growth` and stays in `V+`.
///
/// Per factor, with p = sum c_j z^j of degree d:
/// `R = max(1, (|a| + 2 + sum_{j<d} |c_j|) / |c_d|)`,
/// because on `|z1| >= R` the perturbation of the leading term satisfies
/// `|p(z1) + a z2| >= |z1|^{d-1} (|c_d| |z1| - sum_{j<d} |c_j| - |a|) >= 2 |z1|`.
/// The composite certificate takes the worst factor radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscapeCert {
    pub radius: f64,
    pub growth: f64,
}

impl EscapeCert {
    /// Is z in the certified forward-escape cone V+?
    pub fn escaped(&self, z: &ExtPoint) -> bool {
        z[0].abs_ge(self.radius) && z[0].abs_cmp(&z[1]) != std::cmp::Ordering::Less
    }
}

#[derive(Clone, Debug)]
pub struct HenonType {
    factors: Vec<HenonFactor>,
    degree: u64,
    jacobian_det: Complex64,
}

impl HenonType {
    /// Composition `f = h_1 ∘ h_2 ∘ ... ∘ h_m` (the last factor in the list is
    /// applied first).
    pub fn new(factors: Vec<HenonFactor>) -> Result<HenonType> {
        if factors.is_empty() {
            return Err(Error::EmptyComposition);
        }
        let mut degree: u64 = 1;
        let mut det = Complex64::new(1.0, 0.0);
        for f in &factors {
            degree = degree
                .checked_mul(f.degree() as u64)
                .filter(|&d| d <= u32::MAX as u64)
                .ok_or(Error::DegreeOverflow)?;
            det *= -f.a;
        }
        Ok(HenonType {
            factors,
            degree,
            jacobian_det: det,
        })
    }

    pub fn single(p: Poly, a: Complex64) -> Result<HenonType> {
        HenonType::new(vec![HenonFactor::new(p, a)?])
    }

    /// The quadratic workhorse `p(z) = z^2 + c`.
    pub fn quadratic(c: Complex64, a: Complex64) -> Result<HenonType> {
        HenonType::single(
            Poly::new(vec![c, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]),
            a,
        )
    }

    pub fn factors(&self) -> &[HenonFactor] {
        &self.factors
    }

    /// Algebraic degree of the composition (product of factor degrees); also
    /// the degree of the inverse map.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn degree_f(&self) -> f64 {
        self.degree as f64
    }

    /// Constant Jacobian determinant `prod_i (-a_i)`.
    pub fn jacobian_det(&self) -> Complex64 {
        self.jacobian_det
    }

    /// `f ∘ f ∘ ... ∘ f` (k times) as a single composition.
    pub fn iterate(&self, k: u32) -> Result<HenonType> {
        if k == 0 {
            return Err(Error::BadPeriod);
        }
        let mut factors = Vec::with_capacity(self.factors.len() * k as usize);
        for _ in 0..k {
            factors.extend(self.factors.iter().cloned());
        }
        HenonType::new(factors)
    }

    pub fn apply(&self, z: ExtPoint) -> ExtPoint {
        let mut z = z;
        for f in self.factors.iter().rev() {
            let w1 = f.p.eval_ext(z[0]) + z[1].scale(f.a);
            z = [w1, z[0]];
        }
        z
    }

    pub fn apply_c(&self, z: [Complex64; 2]) -> [Complex64; 2] {
        let mut z = z;
        for f in self.factors.iter().rev() {
            z = [f.p.eval(z[0]) + f.a * z[1], z[0]];
        }
        z
    }

    /// Inverse composition: factors inverted and applied left to right,
    /// each as `(z1, z2) -> (z2, (z1 - p(z2)) / a)`.
    pub fn apply_inverse(&self, z: ExtPoint) -> ExtPoint {
        let mut z = z;
        for f in self.factors.iter() {
            let inv_a = Complex64::new(1.0, 0.0) / f.a;
            let w2 = (z[0] - f.p.eval_ext(z[1])).scale(inv_a);
            z = [z[1], w2];
        }
        z
    }

    pub fn apply_inverse_c(&self, z: [Complex64; 2]) -> [Complex64; 2] {
        let mut z = z;
        for f in self.factors.iter() {
            z = [z[1], (z[0] - f.p.eval(z[1])) / f.a];
        }
        z
    }

    /// One inverse application together with the pushforward of a tangent
    /// vector by `D(h^{-1})(z) = [[0, 1], [1/a, -p'(z2)/a]]` per factor.
    pub fn apply_inverse_with_tangent(
        &self,
        z: ExtPoint,
        v: [ExtComplex; 2],
    ) -> (ExtPoint, [ExtComplex; 2]) {
        let mut z = z;
        let mut v = v;
        for f in self.factors.iter() {
            let inv_a = Complex64::new(1.0, 0.0) / f.a;
            let dp = f.p.derivative().eval_ext(z[1]);
            let w2 = (v[0] - dp * v[1]).scale(inv_a);
            v = [v[1], w2];
            let z2 = (z[0] - f.p.eval_ext(z[1])).scale(inv_a);
            z = [z[1], z2];
        }
        (z, v)
    }

    /// Chain-rule derivative of the full composition at z (rightmost factor
    /// evaluated first), each factor contributing `[[p'(z1), a], [1, 0]]`.
    pub fn jacobian(&self, z: [Complex64; 2]) -> Mat2 {
        let mut z = z;
        let mut m = Mat2::identity();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        for f in self.factors.iter().rev() {
            let dp = f.p.derivative().eval(z[0]);
            let j = Mat2::new(dp, f.a, one, zero);
            m = j.mul(&m);
            z = [f.p.eval(z[0]) + f.a * z[1], z[0]];
        }
        m
    }

    /// The inverse automorphism expressed as a Hénon-type map `g` via the
    /// coordinate swap `s(z1, z2) = (z2, z1)`:
    /// `f^{-1} = s ∘ g ∘ s` with conjugated factors `p̂ = -p/a`, `â = 1/a`
    /// in reversed order. Same degree as f.
    pub fn inverse_map(&self) -> HenonType {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let inv_a = Complex64::new(1.0, 0.0) / f.a;
                HenonFactor {
                    p: f.p.scale(-inv_a),
                    a: inv_a,
                }
            })
            .rev()
            .collect();
        // unwrap: conjugation preserves factor validity (same degree, a != 0)
        HenonType::new(factors).expect("conjugated factors stay valid")
    }

    pub fn escape_certificate(&self) -> EscapeCert {
        let mut radius: f64 = 1.0;
        for f in &self.factors {
            let d = f.degree();
            let low: f64 = (0..d).map(|j| f.p.coeff(j).norm()).sum();
            let r = (f.a.norm() + 2.0 + low) / f.p.leading().norm();
            radius = radius.max(r);
        }
        EscapeCert {
            radius,
            growth: 2.0,
        }
    }

    /// Parse the one-factor-per-line map description:
    ///
    /// ```text
    /// factor a=<re>,<im> p=<c0_re>,<c0_im>,<c1_re>,<c1_im>,...
    /// ```
    ///
    /// Coefficients are listed lowest degree first as re,im pairs. Blank lines
    /// and `#` comments are allowed; anything else is an error.
    pub fn parse(text: &str) -> Result<HenonType> {
        let mut factors = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::MapParse {
                line: idx + 1,
                msg: msg.to_string(),
            };
            let mut tokens = line.split_whitespace();
            if tokens.next() != Some("factor") {
                return Err(err("expected line to start with `factor`"));
            }
            let a_tok = tokens.next().ok_or_else(|| err("missing a=<re>,<im>"))?;
            let p_tok = tokens.next().ok_or_else(|| err("missing p=<coeff list>"))?;
            if let Some(extra) = tokens.next() {
                return Err(err(&format!("unexpected token `{extra}`")));
            }
            let a_val = a_tok
                .strip_prefix("a=")
                .ok_or_else(|| err("second token must be a=<re>,<im>"))?;
            let p_val = p_tok
                .strip_prefix("p=")
                .ok_or_else(|| err("third token must be p=<coeff list>"))?;
            let a_parts = parse_floats(a_val).map_err(|m| err(&m))?;
            if a_parts.len() != 2 {
                return Err(err("a needs exactly re,im"));
            }
            let p_parts = parse_floats(p_val).map_err(|m| err(&m))?;
            if p_parts.len() < 2 || p_parts.len() % 2 != 0 {
                return Err(err("p needs an even number of floats (re,im pairs)"));
            }
            let coeffs: Vec<Complex64> = p_parts
                .chunks(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            factors.push(HenonFactor::new(
                Poly::new(coeffs),
                Complex64::new(a_parts[0], a_parts[1]),
            )?);
        }
        HenonType::new(factors)
    }

    /// Inverse of `parse` (canonical text form).
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for f in &self.factors {
            out.push_str(&format!("factor a={},{} p=", f.a.re, f.a.im));
            for (i, c) in f.p.coeffs().iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{},{}", c.re, c.im));
            }
            out.push('\n');
        }
        out
    }
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad float `{t}`"))
        })
        .collect()
}
