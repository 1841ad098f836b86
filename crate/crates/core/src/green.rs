//! Escape-time potentials G± of Hénon-type maps, orbit classification,
//! per-pixel renderers over affine slices, and derivative-growth estimates
//! for the Hölder exponent of G+.
//!
//! One loop carries everything: iterate in extended-exponent arithmetic and
//! watch the escape certificate. Once the certificate fires at `z`, each
//! further step multiplies `|z1|` by at least 2 and the approximants
//! `G_n = d^{-n} log |z1,n|` converge geometrically, with an explicit
//! one-step defect bound evaluated along the computed orbit. The returned
//! `error_bound` is a certified bound on `|value - G+|`.

use crate::error::{Error, Result};
use crate::grid::{Grid, SlicePlane, Window};
use crate::henon::HenonType;
use crate::numerics::{ext_point, log_sup_norm, ExtComplex, Poly};
use num_complex::Complex64;
use rayon::prelude::*;

/// Iteration cap used by the convenience entry points and the classifiers.
pub const DEFAULT_BUDGET: u32 = 2048;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenValue {
    /// Best approximation of G+ at the queried point (exactly 0 when the
    /// certificate never fired within budget).
    pub value: f64,
    /// Orbit steps actually taken.
    pub iterations: u32,
    /// Certified bound on |value - G+|. Below the requested tolerance unless
    /// the budget ran out first; may underflow to 0 for deep bounded orbits.
    pub error_bound: f64,
    /// Step at which the escape certificate first fired, if it did.
    pub escaped_at: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitTag {
    /// Certificate fired at this orbit step: the point provably escapes.
    Escaping(u32),
    /// Certificate silent for this many steps. Only a semi-decision: the
    /// point may still escape later.
    BoundedWithinBudget(u32),
}

impl OrbitTag {
    pub fn is_escaping(&self) -> bool {
        matches!(self, OrbitTag::Escaping(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointClass {
    pub forward: OrbitTag,
    pub backward: OrbitTag,
}

/// Per-factor tail data for the defect bounds, precomputed from the
/// coefficients. With p = sum c_j z^j of degree d and |z1| = s >= radius,
/// one factor application satisfies
/// `log|z1'| = d log|z1| + v` with `|v| <= |log|c_d|| - log(1 - num/s)`,
/// `num = (sum_{j<d} |c_j| + |a|) / |c_d|`. Factor i enters the composite
/// defect with weight 1/(d_i d_{i+1} ... d_m).
struct TailModel {
    /// (|log|lead||, log(num), weight) per factor.
    terms: Vec<(f64, f64, f64)>,
    /// Uniform defect c0 with log+ M(f w) <= d log+ M(w) + d c0 for all w,
    /// M = sup-norm. Drives the bounded-branch error bound.
    growth_defect: f64,
}

impl TailModel {
    fn of(f: &HenonType) -> TailModel {
        let m = f.factors().len();
        let mut weights = vec![0.0f64; m];
        let mut acc = 1.0;
        for i in (0..m).rev() {
            acc /= f.factors()[i].degree() as f64;
            weights[i] = acc;
        }
        let mut terms = Vec::with_capacity(m);
        let mut growth_defect = 0.0;
        for (i, h) in f.factors().iter().enumerate() {
            let d = h.degree();
            let lead = h.p().leading().norm();
            let low: f64 = (0..d).map(|j| h.p().coeff(j).norm()).sum();
            let num = (low + h.a().norm()) / lead;
            terms.push((lead.ln().abs(), num.ln(), weights[i]));
            let k = low + lead + h.a().norm();
            growth_defect += k.ln().max(0.0) * weights[i];
        }
        TailModel {
            terms,
            growth_defect,
        }
    }

    /// Composite one-step defect bound at log|z1| = log_s (valid once the
    /// certificate has fired, so num/s < 1 for every factor).
    fn defect_at_log(&self, log_s: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(lead_term, log_num, w)| {
                let x = (log_num - log_s).exp();
                debug_assert!(x < 1.0, "defect bound evaluated below the certificate radius");
                (lead_term - (-x.min(1.0 - 1e-15)).ln_1p()) * w
            })
            .sum()
    }
}

/// One-step defect bound of the approximants on `{|z1| >= max(|z2|, s)}`,
/// for s at or beyond the certificate radius. Decreasing in s.
pub fn cone_defect(f: &HenonType, s: f64) -> f64 {
    TailModel::of(f).defect_at_log(s.ln())
}

/// Uniform constant c0 with `log+ M(f(w)) <= d log+ M(w) + d c0` for every
/// point w, where M is the sup-norm. Consequently
/// `G_{n+1} + c_{n+1} <= G_n + c_n` for `c_n = c0 d^{-n} / (1 - 1/d)`.
pub fn sup_growth_defect(f: &HenonType) -> f64 {
    TailModel::of(f).growth_defect
}

fn dpow_neg(d: f64, n: u32) -> f64 {
    (-(n as f64) * d.ln()).exp()
}

fn check_point(z: [Complex64; 2]) -> Result<()> {
    if z[0].is_finite() && z[1].is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinitePoint)
    }
}

pub fn green_plus(f: &HenonType, z: [Complex64; 2], tol: f64) -> Result<GreenValue> {
    green_plus_budget(f, z, tol, DEFAULT_BUDGET)
}

/// Forward Green function by certified escape-time iteration.
///
/// Stops as soon as the tail bound drops under `tol`, or at `budget` steps.
/// Budget exhaustion is not an error: a silent certificate yields value 0
/// with the uniform tail bound `d^{-N} (log+ M_N + c0/(1-1/d))` evaluated at
/// the last orbit point.
pub fn green_plus_budget(
    f: &HenonType,
    z: [Complex64; 2],
    tol: f64,
    budget: u32,
) -> Result<GreenValue> {
    if !(tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    if budget == 0 {
        return Err(Error::BadBudget);
    }
    check_point(z)?;
    let cert = f.escape_certificate();
    let tail = TailModel::of(f);
    let d = f.degree_f();
    let geo = 1.0 / (1.0 - 1.0 / d);
    let mut w = ext_point(z);
    let mut fired: Option<u32> = None;
    let mut n: u32 = 0;
    loop {
        if fired.is_none() && cert.escaped(&w) {
            fired = Some(n);
        }
        if let Some(k) = fired {
            let log_s = w[0].abs_log();
            let dn = dpow_neg(d, n);
            let err = tail.defect_at_log(log_s) * dn * geo;
            // The exponent guard stops once |z1| nears the representable
            // edge; the defect has hit its floor there and only d^{-n}
            // keeps shrinking, which no longer needs the orbit.
            if err <= tol || n >= budget || w[0].exponent() > i64::MAX / 4 {
                return Ok(GreenValue {
                    value: dn * log_s,
                    iterations: n,
                    error_bound: err,
                    escaped_at: Some(k),
                });
            }
        } else if n >= budget {
            let log_m = log_sup_norm(&w).max(0.0);
            let dn = dpow_neg(d, n);
            return Ok(GreenValue {
                value: 0.0,
                iterations: n,
                error_bound: dn * (log_m + tail.growth_defect * geo),
                escaped_at: None,
            });
        }
        w = f.apply(w);
        n += 1;
    }
}

pub fn green_minus(f: &HenonType, z: [Complex64; 2], tol: f64) -> Result<GreenValue> {
    green_minus_budget(f, z, tol, DEFAULT_BUDGET)
}

/// Backward Green function: G- of f equals G+ of the swap-conjugated inverse
/// map evaluated at the swapped point.
pub fn green_minus_budget(
    f: &HenonType,
    z: [Complex64; 2],
    tol: f64,
    budget: u32,
) -> Result<GreenValue> {
    green_plus_budget(&f.inverse_map(), [z[1], z[0]], tol, budget)
}

/// `max(G+ - c, 0)`: the potential of the level-set current at height c.
pub fn level_set_potential(f: &HenonType, c: f64, z: [Complex64; 2], tol: f64) -> Result<f64> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::BadLevel(c));
    }
    Ok((green_plus(f, z, tol)?.value - c).max(0.0))
}

pub(crate) fn orbit_tag(f: &HenonType, z: [Complex64; 2], budget: u32) -> OrbitTag {
    let cert = f.escape_certificate();
    let mut w = ext_point(z);
    for n in 0..=budget {
        if cert.escaped(&w) {
            return OrbitTag::Escaping(n);
        }
        if n < budget {
            w = f.apply(w);
        }
    }
    OrbitTag::BoundedWithinBudget(budget)
}

/// Forward/backward orbit classification. `Escaping` is sound (the
/// certificate is a proof); `BoundedWithinBudget` is only the absence of one.
pub fn classify(f: &HenonType, z: [Complex64; 2], budget: u32) -> Result<PointClass> {
    if budget == 0 {
        return Err(Error::BadBudget);
    }
    check_point(z)?;
    let g = f.inverse_map();
    Ok(PointClass {
        forward: orbit_tag(f, z, budget),
        backward: orbit_tag(&g, [z[1], z[0]], budget),
    })
}

/// Per-pixel G+ over an affine slice. Rows are evaluated in parallel but
/// written to disjoint ranges, so the output is identical for any schedule.
pub fn render_green(
    f: &HenonType,
    plane: &SlicePlane,
    window: &Window,
    width: usize,
    height: usize,
    tol: f64,
    budget: u32,
) -> Result<Grid<GreenValue>> {
    if width < 2 || height < 2 {
        return Err(Error::BadGridSize(width, height));
    }
    if !(tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    if budget == 0 {
        return Err(Error::BadBudget);
    }
    let rows: Vec<Vec<GreenValue>> = (0..height)
        .into_par_iter()
        .map(|row| {
            let y = window.y_coord(row, height);
            (0..width)
                .map(|col| {
                    let x = window.x_coord(col, width);
                    // unwrap: arguments validated above, plane points finite
                    green_plus_budget(f, plane.point(x, y), tol, budget)
                        .expect("validated render arguments")
                })
                .collect()
        })
        .collect();
    Ok(Grid::from_rows(width, height, rows.concat()))
}

/// Forward/backward classification over a slice, same determinism contract
/// as `render_green`.
pub fn render_classify(
    f: &HenonType,
    plane: &SlicePlane,
    window: &Window,
    width: usize,
    height: usize,
    budget: u32,
) -> Result<Grid<PointClass>> {
    if width < 2 || height < 2 {
        return Err(Error::BadGridSize(width, height));
    }
    if budget == 0 {
        return Err(Error::BadBudget);
    }
    let g = f.inverse_map();
    let rows: Vec<Vec<PointClass>> = (0..height)
        .into_par_iter()
        .map(|row| {
            let y = window.y_coord(row, height);
            (0..width)
                .map(|col| {
                    let x = window.x_coord(col, width);
                    let z = plane.point(x, y);
                    PointClass {
                        forward: orbit_tag(f, z, budget),
                        backward: orbit_tag(&g, [z[1], z[0]], budget),
                    }
                })
                .collect()
        })
        .collect();
    Ok(Grid::from_rows(width, height, rows.concat()))
}

/// The approximant sequence `G_k = d^{-k} log+ ||f^k(z)||`, k = 0..=n.
/// Together with `sup_growth_defect` this exhibits the almost-decreasing
/// convergence of the escape-time limit. Valid while orbit magnitudes stay
/// inside the extended-exponent range (any depth for bounded points, roughly
/// 60 doublings past the certificate for escaping ones).
pub fn green_approximants(f: &HenonType, z: [Complex64; 2], n: u32) -> Result<Vec<f64>> {
    check_point(z)?;
    let d = f.degree_f();
    let mut w = ext_point(z);
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        out.push(dpow_neg(d, k) * log_sup_norm(&w).max(0.0));
        if k < n {
            w = f.apply(w);
        }
    }
    Ok(out)
}

/// Closed box in the four real coordinates (re z1, im z1, re z2, im z2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box4 {
    pub re1: (f64, f64),
    pub im1: (f64, f64),
    pub re2: (f64, f64),
    pub im2: (f64, f64),
}

impl Box4 {
    pub fn new(re1: (f64, f64), im1: (f64, f64), re2: (f64, f64), im2: (f64, f64)) -> Result<Box4> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo < hi;
        if ok(re1) && ok(im1) && ok(re2) && ok(im2) {
            Ok(Box4 {
                re1,
                im1,
                re2,
                im2,
            })
        } else {
            Err(Error::BadWindow)
        }
    }

    /// `[-r, r]` in all four coordinates; r = 3 is the default estimation
    /// region.
    pub fn symmetric(r: f64) -> Result<Box4> {
        Box4::new((-r, r), (-r, r), (-r, r), (-r, r))
    }

    /// Default region for Hölder-exponent estimates, paired with
    /// [`DEFAULT_HOLDER_GRID`].
    pub fn default_region() -> Box4 {
        // unwrap: the fixed bounds are finite and ordered
        Box4::symmetric(3.0).expect("fixed default region")
    }
}

/// Samples per axis for Hölder estimates on the default region. Coarse on
/// purpose: the box is four-dimensional, and deeper orbit windows drop every
/// sample whose escape gets certified, so extra resolution mostly buys
/// transient orbits that inflate the growth statistic at shallow depths.
pub const DEFAULT_HOLDER_GRID: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderEstimate {
    pub depth: u32,
    /// min(1, log d / max over the surviving grid of (1/n) log ||Df^n||).
    pub beta_hat: f64,
    /// The maximized derivative-growth rate at this depth.
    pub max_log_growth: f64,
    /// Grid points whose certificate stayed silent through the depth.
    pub samples_used: usize,
    pub region: Box4,
}

/// 2x2 complex matrix with extended-exponent entries, for chain-rule products
/// along deep orbits.
#[derive(Clone, Copy)]
struct ExtMat2 {
    e: [[ExtComplex; 2]; 2],
}

impl ExtMat2 {
    fn identity() -> ExtMat2 {
        let one = ExtComplex::from_complex(Complex64::new(1.0, 0.0));
        ExtMat2 {
            e: [[one, ExtComplex::ZERO], [ExtComplex::ZERO, one]],
        }
    }

    /// Left-multiply by a factor Jacobian [[dp, a], [1, 0]].
    fn factor_push(&self, dp: ExtComplex, a: Complex64) -> ExtMat2 {
        let a_e = ExtComplex::from_complex(a);
        ExtMat2 {
            e: [
                [
                    dp * self.e[0][0] + a_e * self.e[1][0],
                    dp * self.e[0][1] + a_e * self.e[1][1],
                ],
                [self.e[0][0], self.e[0][1]],
            ],
        }
    }

    /// log of the spectral operator norm: normalize by the largest entry,
    /// apply the closed 2x2 singular-value formula, add the scale back.
    fn log_op_norm(&self) -> f64 {
        let mut top = &self.e[0][0];
        for r in 0..2 {
            for c in 0..2 {
                if self.e[r][c].abs_cmp(top) == std::cmp::Ordering::Greater {
                    top = &self.e[r][c];
                }
            }
        }
        if top.is_zero() {
            return f64::NEG_INFINITY;
        }
        let n = |r: usize, c: usize| self.e[r][c].ratio(top);
        let (m00, m01, m10, m11) = (n(0, 0), n(0, 1), n(1, 0), n(1, 1));
        let fr = m00.norm_sqr() + m01.norm_sqr() + m10.norm_sqr() + m11.norm_sqr();
        let det = m00 * m11 - m01 * m10;
        let disc = (fr * fr - 4.0 * det.norm_sqr()).max(0.0);
        let sigma_sq = 0.5 * (fr + disc.sqrt());
        top.abs_log() + 0.5 * sigma_sq.ln()
    }
}

/// Hölder-exponent estimates from the growth of ||Df^n|| over a grid.
///
/// Only grid points whose escape certificate stays silent through step n
/// enter the maximum: along certified-escaping orbits the Euclidean
/// derivative norm grows super-exponentially for chart reasons (the escape
/// happens towards a coordinate direction at infinity), which would drive
/// the estimate to 0 with depth while saying nothing about the potential
/// near the bounded set.
pub fn holder_exponent(
    f: &HenonType,
    region: &Box4,
    grid_per_axis: usize,
    depths: &[u32],
) -> Result<Vec<HolderEstimate>> {
    if depths.is_empty() {
        return Err(Error::EmptyDepths);
    }
    if depths.contains(&0) {
        return Err(Error::BadPeriod);
    }
    if grid_per_axis < 2 {
        return Err(Error::BadHolderGrid(grid_per_axis));
    }
    let max_depth = *depths.iter().max().expect("nonempty");
    let cert = f.escape_certificate();
    let derivs: Vec<Poly> = f.factors().iter().map(|h| h.p().derivative()).collect();
    let g = grid_per_axis;
    let mut max_rate = vec![f64::NEG_INFINITY; max_depth as usize + 1];
    let mut counts = vec![0usize; max_depth as usize + 1];
    let coord = |range: (f64, f64), i: usize| Window::coord(range.0, range.1, i, g);
    for i1 in 0..g {
        for j1 in 0..g {
            for i2 in 0..g {
                for j2 in 0..g {
                    let z = [
                        Complex64::new(coord(region.re1, i1), coord(region.im1, j1)),
                        Complex64::new(coord(region.re2, i2), coord(region.im2, j2)),
                    ];
                    let mut w = ext_point(z);
                    if cert.escaped(&w) {
                        continue;
                    }
                    let mut m = ExtMat2::identity();
                    for k in 1..=max_depth {
                        for (h, dp) in f.factors().iter().zip(derivs.iter()).rev() {
                            m = m.factor_push(dp.eval_ext(w[0]), h.a());
                            w = [h.p().eval_ext(w[0]) + w[1].scale(h.a()), w[0]];
                        }
                        if cert.escaped(&w) {
                            break;
                        }
                        let idx = k as usize;
                        counts[idx] += 1;
                        let rate = m.log_op_norm() / k as f64;
                        if rate > max_rate[idx] {
                            max_rate[idx] = rate;
                        }
                    }
                }
            }
        }
    }
    let log_d = f.degree_f().ln();
    depths
        .iter()
        .map(|&n| {
            let idx = n as usize;
            if counts[idx] == 0 {
                return Err(Error::NoBoundedSamples(n as usize));
            }
            let max = max_rate[idx];
            let beta_hat = if max <= 0.0 { 1.0 } else { (log_d / max).min(1.0) };
            Ok(HolderEstimate {
                depth: n,
                beta_hat,
                max_log_growth: max,
                samples_used: counts[idx],
                region: *region,
            })
        })
        .collect()
}
