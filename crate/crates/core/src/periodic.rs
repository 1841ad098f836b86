//! Periodic points of Hénon-type maps: exact fixed points by elimination for
//! single factors, a damped Newton search for period n with a completeness
//! flag against the d^n count, multiplier classification, and the empirical
//! measure on saddle points.

use crate::error::{Error, Result};
use crate::green::Box4;
use crate::grid::Window;
use crate::henon::HenonType;
use crate::numerics::{Mat2, Poly};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityKind {
    Attracting,
    Repelling,
    Saddle,
    Neutral,
}

impl StabilityKind {
    pub fn label(&self) -> &'static str {
        match self {
            StabilityKind::Attracting => "attracting",
            StabilityKind::Repelling => "repelling",
            StabilityKind::Saddle => "saddle",
            StabilityKind::Neutral => "neutral",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PeriodicPoint {
    pub point: [Complex64; 2],
    /// Period of the solved equation f^n(z) = z, not necessarily minimal.
    pub period: u32,
    /// Eigenvalues of D(f^n) at the point, descending modulus.
    pub multipliers: [Complex64; 2],
    /// |f^n(z) - z| (Euclidean).
    pub residual: f64,
    pub kind: StabilityKind,
}

#[derive(Clone, Debug)]
pub struct PeriodicSearch {
    pub period: u32,
    /// d^n, the count with multiplicity.
    pub expected: u64,
    /// Deduplicated verified solutions, lexicographic by coordinates.
    pub points: Vec<PeriodicPoint>,
    /// Found exactly d^n simple solutions. `false` signals either missed
    /// roots or genuine multiplicity, which Newton cannot resolve.
    pub complete: bool,
}

/// Moduli vs 1 with a 1e-9 dead zone: either multiplier on the unit circle
/// makes the point neutral, otherwise both sides in/out decide.
fn classify_kind(multipliers: [Complex64; 2]) -> StabilityKind {
    const TOL: f64 = 1e-9;
    let (m1, m2) = (multipliers[0].norm(), multipliers[1].norm());
    if (m1 - 1.0).abs() <= TOL || (m2 - 1.0).abs() <= TOL {
        StabilityKind::Neutral
    } else if m1 < 1.0 {
        StabilityKind::Attracting
    } else if m2 > 1.0 {
        StabilityKind::Repelling
    } else {
        StabilityKind::Saddle
    }
}

fn point_norm(z: [Complex64; 2]) -> f64 {
    (z[0].norm_sqr() + z[1].norm_sqr()).sqrt()
}

fn build_point(fn_: &HenonType, z: [Complex64; 2], period: u32) -> PeriodicPoint {
    let w = fn_.apply_c(z);
    let residual = point_norm([w[0] - z[0], w[1] - z[1]]);
    let multipliers = fn_.jacobian(z).eigenvalues();
    PeriodicPoint {
        point: z,
        period,
        multipliers,
        residual,
        kind: classify_kind(multipliers),
    }
}

/// Fixed points of a single-factor map by elimination: the second coordinate
/// of h(z) = z forces z2 = z1, leaving p(z) + (a - 1) z = 0, whose d roots
/// (with multiplicity) are exact up to the polynomial solver.
pub fn fixed_points_exact(f: &HenonType) -> Result<Vec<PeriodicPoint>> {
    if f.factors().len() != 1 {
        return Err(Error::NotSingleFactor(f.factors().len()));
    }
    let h = &f.factors()[0];
    let shift = Poly::new(vec![
        Complex64::new(0.0, 0.0),
        h.a() - Complex64::new(1.0, 0.0),
    ]);
    let q = h.p().add(&shift);
    let roots = q.roots()?;
    Ok(roots
        .into_iter()
        .map(|z| build_point(f, [z, z], 1))
        .collect())
}

/// One damped Newton run on F(z) = f^n(z) - z. Accepts only tight
/// convergence; divergence, singular steps, and stagnation all discard the
/// seed.
fn newton_seek(fn_: &HenonType, seed: [Complex64; 2]) -> Option<[Complex64; 2]> {
    let one = Complex64::new(1.0, 0.0);
    let residual = |z: [Complex64; 2]| {
        let w = fn_.apply_c(z);
        [w[0] - z[0], w[1] - z[1]]
    };
    let mut z = seed;
    let mut r = residual(z);
    let mut rn = point_norm(r);
    if !rn.is_finite() {
        return None;
    }
    for _ in 0..80 {
        if rn <= 1e-13 * (1.0 + point_norm(z)) {
            return Some(z);
        }
        let j = fn_.jacobian(z);
        let jf = Mat2::new(j.m[0][0] - one, j.m[0][1], j.m[1][0], j.m[1][1] - one);
        let delta = jf.solve(r)?;
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let cand = [z[0] - step * delta[0], z[1] - step * delta[1]];
            let rc = residual(cand);
            let rcn = point_norm(rc);
            if rcn.is_finite() && rcn < rn {
                z = cand;
                r = rc;
                rn = rcn;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved || point_norm(z) > 1e9 {
            return None;
        }
    }
    if rn <= 1e-13 * (1.0 + point_norm(z)) {
        Some(z)
    } else {
        None
    }
}

/// Period-n solutions from a deterministic 4-real-dimensional seed grid.
///
/// Converged solutions are clustered at radius 1e-7 (union of near pairs),
/// each cluster keeping its lexicographically smallest member; every kept
/// point is re-verified against the residual bound 1e-10 (1 + |z|).
pub fn periodic_points(
    f: &HenonType,
    n: u32,
    seed_box: &Box4,
    seeds_per_axis: usize,
) -> Result<PeriodicSearch> {
    if n == 0 {
        return Err(Error::BadPeriod);
    }
    if seeds_per_axis < 2 {
        return Err(Error::BadSeedGrid(seeds_per_axis));
    }
    let expected = (f.degree() as u64)
        .checked_pow(n)
        .ok_or(Error::DegreeOverflow)?;
    if expected > 4096 {
        return Err(Error::SearchBudget(expected));
    }
    let fn_ = f.iterate(n)?;

    let g = seeds_per_axis;
    let coord = |range: (f64, f64), i: usize| Window::coord(range.0, range.1, i, g);
    let seeds: Vec<[Complex64; 2]> = (0..g * g * g * g)
        .map(|idx| {
            let (i1, rest) = (idx % g, idx / g);
            let (j1, rest) = (rest % g, rest / g);
            let (i2, j2) = (rest % g, rest / g);
            [
                Complex64::new(coord(seed_box.re1, i1), coord(seed_box.im1, j1)),
                Complex64::new(coord(seed_box.re2, i2), coord(seed_box.im2, j2)),
            ]
        })
        .collect();
    let mut found: Vec<[Complex64; 2]> = seeds
        .par_iter()
        .map(|&seed| newton_seek(&fn_, seed))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    found.sort_by(|a, b| {
        a[0].re
            .total_cmp(&b[0].re)
            .then(a[0].im.total_cmp(&b[0].im))
            .then(a[1].re.total_cmp(&b[1].re))
            .then(a[1].im.total_cmp(&b[1].im))
    });

    // union-find clustering at radius 1e-7
    let m = found.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn root(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let d = point_norm([
                found[i][0] - found[j][0],
                found[i][1] - found[j][1],
            ]);
            if d <= 1e-7 {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut points = Vec::new();
    for i in 0..m {
        if root(&mut parent, i) == i {
            let p = build_point(&fn_, found[i], n);
            if p.residual <= 1e-10 * (1.0 + point_norm(p.point)) {
                points.push(p);
            }
        }
    }
    let complete = points.len() as u64 == expected;
    Ok(PeriodicSearch {
        period: n,
        expected,
        points,
        complete,
    })
}

/// Empirical integral of a scalar bump against the normalized counting
/// measure on the period-n saddles: sum over saddles of chi(point) / d^n.
/// Requires a complete period-n search.
pub fn saddle_measure(
    f: &HenonType,
    n: u32,
    chi: impl Fn([Complex64; 2]) -> f64,
    seed_box: &Box4,
    seeds_per_axis: usize,
) -> Result<f64> {
    let search = periodic_points(f, n, seed_box, seeds_per_axis)?;
    if !search.complete {
        return Err(Error::IncompleteSearch {
            n,
            found: search.points.len(),
            expected: search.expected,
        });
    }
    let w = 1.0 / search.points.len() as f64;
    Ok(search
        .points
        .iter()
        .filter(|p| p.kind == StabilityKind::Saddle)
        .map(|p| w * chi(p.point))
        .sum())
}
