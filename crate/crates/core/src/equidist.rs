//! Equidistribution experiments: pull a curve back by f^n, normalize by
//! d^{-n}, and measure its pairing distance to the forward Green current
//! against smooth test forms. The decay rate is fitted in log scale and
//! compared with log d.

use crate::currents::{pair_form, PotentialField, TestForm};
use crate::error::{Error, Result};
use crate::green::classify;
use crate::grid::Window;
use crate::henon::HenonType;
use crate::numerics::{ext_point, ExtPoint};
use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::RangeInclusive;

/// Deepest pullback the extended-arithmetic evaluator accepts. Beyond this
/// the d^{-n} tail of any pairing sits far below quadrature error anyway.
pub const MAX_PULLBACK_DEPTH: u32 = 24;

/// Relative quadrature noise floor: error values below this multiple of the
/// reference-pairing scale carry no rate information and are cut from fits.
pub const NOISE_FLOOR_REL: f64 = 1e-6;

/// Algebraic curve {P = 0} in C^2, stored as the nonzero coefficients of P
/// indexed by bidegree (j, k) for the monomial z1^j z2^k.
#[derive(Clone, Debug)]
pub struct Curve {
    terms: Vec<(u32, u32, Complex64)>,
    degree: u32,
}

impl Curve {
    /// Keeps only nonzero coefficients. Requires total degree >= 1 and a
    /// nonzero coefficient on z1^degree: that monomial is what keeps the
    /// projective closure away from [1:0:0], the indeterminacy point of the
    /// inverse map, which pullbacks must avoid.
    pub fn new(terms: &[(u32, u32, Complex64)]) -> Result<Curve> {
        let mut kept: Vec<(u32, u32, Complex64)> = terms
            .iter()
            .copied()
            .filter(|&(_, _, c)| c.norm_sqr() > 0.0)
            .collect();
        for &(_, _, c) in &kept {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::EmptyCurve);
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyCurve);
        }
        kept.sort_by_key(|&(j, k, _)| (j, k));
        let degree = kept.iter().map(|&(j, k, _)| j + k).max().unwrap();
        if degree == 0 {
            return Err(Error::DegreeOutOfRange(0));
        }
        let top_at_e1: Complex64 = kept
            .iter()
            .filter(|&&(j, k, _)| j + k == degree && k == 0)
            .map(|&(_, _, c)| c)
            .sum();
        if top_at_e1.norm_sqr() == 0.0 {
            return Err(Error::CurveThroughIMinus);
        }
        Ok(Curve {
            terms: kept,
            degree,
        })
    }

    /// The vertical line {z1 = c}.
    pub fn vertical_line(c: Complex64) -> Curve {
        let mut terms = vec![(1, 0, Complex64::new(1.0, 0.0))];
        if c.norm_sqr() > 0.0 {
            terms.push((0, 0, -c));
        }
        Curve::new(&terms).expect("a vertical line is a valid curve")
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[(u32, u32, Complex64)] {
        &self.terms
    }

    pub fn eval(&self, z: [Complex64; 2]) -> Complex64 {
        self.terms
            .iter()
            .map(|&(j, k, c)| c * z[0].powu(j) * z[1].powu(k))
            .sum()
    }

    /// log |P(w)| for an extended-range point. Every monomial splits into a
    /// double mantissa product and an exact power-of-two exponent; the sum is
    /// taken after factoring out the largest exponent, so the only rounding
    /// is the final double addition. Returns -inf when the double sum
    /// cancels to zero, which flags proximity to the curve itself.
    pub fn log_abs_ext(&self, w: &ExtPoint) -> f64 {
        let mut parts: Vec<(Complex64, i128)> = Vec::with_capacity(self.terms.len());
        for &(j, k, c) in &self.terms {
            if (j > 0 && w[0].is_zero()) || (k > 0 && w[1].is_zero()) {
                continue;
            }
            let mantissa = c * w[0].mantissa().powu(j) * w[1].mantissa().powu(k);
            if mantissa.norm_sqr() == 0.0 {
                continue;
            }
            let exp = j as i128 * w[0].exponent() as i128 + k as i128 * w[1].exponent() as i128;
            parts.push((mantissa, exp));
        }
        // exponent differences must be taken in integers: at 10^18-sized
        // exponents a double cannot resolve a gap of a few bits
        let e0 = match parts.iter().map(|&(_, e)| e).max() {
            Some(e) => e,
            None => return f64::NEG_INFINITY,
        };
        let sum: Complex64 = parts
            .iter()
            .map(|&(m, e)| {
                let shift = e - e0;
                if shift < -1080 {
                    Complex64::new(0.0, 0.0)
                } else {
                    m * (shift as f64).exp2()
                }
            })
            .sum();
        if sum.norm_sqr() == 0.0 {
            f64::NEG_INFINITY
        } else {
            sum.norm().ln() + e0 as f64 * std::f64::consts::LN_2
        }
    }
}

/// Potential of the normalized pullback d^{-n} (f^n)^* [V] / deg V, namely
/// z -> d^{-n} (deg V)^{-1} log |P(f^n(z))| with the orbit held in extended
/// arithmetic.
pub fn pullback_potential(f: &HenonType, v: &Curve, n: u32) -> Result<PotentialField> {
    if n > MAX_PULLBACK_DEPTH {
        return Err(Error::PullbackDepth(n, MAX_PULLBACK_DEPTH));
    }
    let f = f.clone();
    let v = v.clone();
    let scale = (-(n as f64) * f.degree_f().ln()).exp() / v.degree() as f64;
    let label = format!("pullback_n{}_deg{}", n, v.degree());
    Ok(PotentialField::new(label, move |z| {
        if !z[0].re.is_finite() || !z[0].im.is_finite() || !z[1].re.is_finite()
            || !z[1].im.is_finite()
        {
            return f64::NAN;
        }
        let mut w = ext_point(z);
        for _ in 0..n {
            w = f.apply(w);
        }
        scale * v.log_abs_ext(&w)
    }))
}

/// Three bumps of radius 0.8 straddling the forward Julia set, placed
/// deterministically: bisection between a bounded grid seed and a certified
/// escaping anchor pins a boundary point, and the centers sit on the ray at
/// -0.4, 0, +0.4 from it. Pairings against these see the current's support.
pub fn default_test_forms(f: &HenonType) -> Result<Vec<TestForm>> {
    let budget = 256;
    let cert = f.escape_certificate();
    let anchor = [Complex64::new(cert.radius + 2.0, 0.0), Complex64::new(0.0, 0.0)];
    let escapes = |z: [Complex64; 2]| -> Result<bool> {
        Ok(classify(f, z, budget)?.forward.is_escaping())
    };

    let mut seed = None;
    'scan: for i in 0..9 {
        for j in 0..9 {
            let z = [
                Complex64::new(Window::coord(-2.0, 2.0, i, 9), 0.0),
                Complex64::new(Window::coord(-2.0, 2.0, j, 9), 0.0),
            ];
            if !escapes(z)? {
                seed = Some(z);
                break 'scan;
            }
        }
    }
    let seed = seed.ok_or(Error::NoBoundedSeed)?;
    if !escapes(anchor)? {
        return Err(Error::NoEscapingSeed);
    }

    let lerp = |t: f64| -> [Complex64; 2] {
        [
            seed[0] + t * (anchor[0] - seed[0]),
            seed[1] + t * (anchor[1] - seed[1]),
        ]
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        if escapes(lerp(mid))? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let boundary = lerp(0.5 * (lo + hi));
    let dir = [anchor[0] - seed[0], anchor[1] - seed[1]];
    let len = (dir[0].norm_sqr() + dir[1].norm_sqr()).sqrt();
    let u = [dir[0] / len, dir[1] / len];
    [-0.4f64, 0.0, 0.4]
        .iter()
        .map(|&t| {
            TestForm::new(
                [boundary[0] + t * u[0], boundary[1] + t * u[1]],
                0.8,
            )
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct EquidistReport {
    /// Iterates requested, in order.
    pub n_values: Vec<u32>,
    /// e_n = max over the battery of |<pullback_n - T_+, psi>|.
    pub errors: Vec<f64>,
    /// Absolute pairing level below which values are treated as noise.
    pub noise_floor: f64,
    /// Inclusive n-range the fit actually used (the prefix above the floor).
    pub used_range: Option<(u32, u32)>,
    /// All errors sat below the noise floor; nothing to fit.
    pub saturated: bool,
    /// Decay rate rho from log e_n ~ b - rho n (+ log n); compare to log d.
    pub fitted_rate: Option<f64>,
    pub fitted_constant: Option<f64>,
    /// Whether the better-fitting model carried the log n factor.
    pub used_log_n_term: bool,
}

impl EquidistReport {
    /// Model prediction for e_n, when a fit exists.
    pub fn model(&self, n: u32) -> Option<f64> {
        let (rate, b) = (self.fitted_rate?, self.fitted_constant?);
        let log_n = if self.used_log_n_term {
            (n.max(1) as f64).ln()
        } else {
            0.0
        };
        Some((b - rate * n as f64 + log_n).exp())
    }

    /// CSV with one row per iterate and a comment footer carrying the fit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,e_n,bound_model\n");
        for (&n, &e) in self.n_values.iter().zip(&self.errors) {
            let m = self.model(n).unwrap_or(f64::NAN);
            out.push_str(&format!("{n},{e:.14e},{m:.14e}\n"));
        }
        out.push_str(&format!("# noise_floor,{:.14e}\n", self.noise_floor));
        out.push_str(&format!("# saturated,{}\n", self.saturated));
        match self.used_range {
            Some((a, b)) => out.push_str(&format!("# used_range,{a},{b}\n")),
            None => out.push_str("# used_range,none\n"),
        }
        let model = match (self.fitted_rate, self.used_log_n_term) {
            (None, _) => "none",
            (Some(_), true) => "rate_with_log_n",
            (Some(_), false) => "plain_rate",
        };
        out.push_str(&format!("# model,{model}\n"));
        out.push_str(&format!(
            "# fitted_rate,{:.14e}\n",
            self.fitted_rate.unwrap_or(f64::NAN)
        ));
        out.push_str(&format!(
            "# fitted_constant,{:.14e}\n",
            self.fitted_constant.unwrap_or(f64::NAN)
        ));
        out
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (slope, intercept, sse)
}

/// Pair every normalized pullback in `n_range` against the battery and fit
/// the decay of the worst-case distance to the forward Green current.
///
/// The reference pairing <T_+, psi> uses a truncated Green potential: on
/// bounded orbits the truncation error decays like d^{-budget}, far below
/// the quadrature floor. The (n, psi) cells of the experiment matrix are
/// independent and evaluated concurrently; assembly is sequential.
pub fn equidist_experiment(
    f: &HenonType,
    v: &Curve,
    psi_list: &[TestForm],
    n_range: RangeInclusive<u32>,
    resolution: usize,
) -> Result<EquidistReport> {
    if psi_list.is_empty() {
        return Err(Error::EmptyTestForms);
    }
    let n_values: Vec<u32> = n_range.collect();
    if n_values.is_empty() {
        return Err(Error::EmptyRange);
    }
    if let Some(&deep) = n_values.iter().max() {
        if deep > MAX_PULLBACK_DEPTH {
            return Err(Error::PullbackDepth(deep, MAX_PULLBACK_DEPTH));
        }
    }

    let green = PotentialField::green_plus(f, 1e-8, 64);
    let refs: Vec<f64> = psi_list
        .iter()
        .map(|psi| pair_form(&green, psi, resolution))
        .collect::<Result<_>>()?;

    let cells: Vec<Result<f64>> = n_values
        .par_iter()
        .flat_map_iter(|&n| psi_list.iter().map(move |psi| (n, psi)))
        .map(|(n, psi)| pair_form(&pullback_potential(f, v, n)?, psi, resolution))
        .collect();
    let mut errors = Vec::with_capacity(n_values.len());
    let mut it = cells.into_iter();
    for _ in &n_values {
        let mut worst = 0.0f64;
        for r in refs.iter() {
            let cell = it.next().expect("cell matrix is rectangular")?;
            worst = worst.max((cell - r).abs());
        }
        errors.push(worst);
    }

    let scale = refs
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()))
        .max(f64::MIN_POSITIVE);
    let noise_floor = NOISE_FLOOR_REL * scale;

    let usable: Vec<usize> = {
        let mut idx = Vec::new();
        for (i, &e) in errors.iter().enumerate() {
            if e > noise_floor && e.is_finite() {
                idx.push(i);
            } else {
                break;
            }
        }
        idx
    };

    let mut report = EquidistReport {
        n_values: n_values.clone(),
        errors,
        noise_floor,
        used_range: None,
        saturated: usable.is_empty(),
        fitted_rate: None,
        fitted_constant: None,
        used_log_n_term: false,
    };
    if usable.len() >= 2 {
        let xs: Vec<f64> = usable.iter().map(|&i| n_values[i] as f64).collect();
        let ys: Vec<f64> = usable.iter().map(|&i| report.errors[i].ln()).collect();
        let (s_plain, b_plain, sse_plain) = linear_fit(&xs, &ys);
        let ys_log: Vec<f64> = usable
            .iter()
            .map(|&i| report.errors[i].ln() - (n_values[i].max(1) as f64).ln())
            .collect();
        let (s_log, b_log, sse_log) = linear_fit(&xs, &ys_log);
        let (slope, intercept, with_log) = if sse_log < sse_plain {
            (s_log, b_log, true)
        } else {
            (s_plain, b_plain, false)
        };
        report.used_range = Some((n_values[usable[0]], n_values[*usable.last().unwrap()]));
        report.fitted_rate = Some(-slope);
        report.fitted_constant = Some(intercept);
        report.used_log_n_term = with_log;
    } else if let Some(&i) = usable.first() {
        report.used_range = Some((n_values[i], n_values[i]));
    }
    Ok(report)
}
