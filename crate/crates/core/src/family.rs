//! Parameter families of Hénon-type maps: the fibered forward Green
//! function, parameter-window scans of a fixed seed point, and continuity
//! diagnostics for how the escape structure moves with the parameter.

use crate::error::{Error, Result};
use crate::green::{green_plus_budget, orbit_tag, GreenValue, OrbitTag, DEFAULT_BUDGET};
use crate::grid::{Grid, Window};
use crate::henon::HenonType;
use num_complex::Complex64;
use rayon::prelude::*;

/// Map-valued function of a two-complex-dimensional parameter, with the
/// degree fixed across the family so fibered potentials share one
/// normalization.
pub struct Family {
    label: String,
    degree: u64,
    builder: Box<dyn Fn([Complex64; 2]) -> Result<HenonType> + Send + Sync>,
}

impl Family {
    pub fn new(
        label: impl Into<String>,
        degree: u64,
        builder: impl Fn([Complex64; 2]) -> Result<HenonType> + Send + Sync + 'static,
    ) -> Family {
        Family {
            label: label.into(),
            degree,
            builder: Box::new(builder),
        }
    }

    /// The built-in scan family: p = z^2 + c1 with a = c2.
    pub fn quadratic_default() -> Family {
        Family::new("quadratic", 2, |c| HenonType::quadratic(c[0], c[1]))
    }

    /// Builds the fiber map and enforces the declared degree.
    pub fn build(&self, c: [Complex64; 2]) -> Result<HenonType> {
        let f = (self.builder)(c)?;
        if f.degree() != self.degree {
            return Err(Error::FamilyDegree {
                expected: self.degree,
                got: f.degree(),
            });
        }
        Ok(f)
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Fibered forward Green value at (c, z): exactly the single-map potential
/// of the built fiber, so values agree bit for bit with module green.
pub fn family_green(
    fam: &Family,
    c: [Complex64; 2],
    z: [Complex64; 2],
    tol: f64,
) -> Result<GreenValue> {
    green_plus_budget(&fam.build(c)?, z, tol, DEFAULT_BUDGET)
}

/// Parameter-window scan of a fixed phase point: per-pixel fibered Green
/// value plus the forward orbit classification of the same seed.
#[derive(Clone, Debug)]
pub struct ParamScan {
    pub green: Grid<GreenValue>,
    pub forward: Grid<OrbitTag>,
}

/// Scans c1 over `window` with c2 held fixed. Rows run in parallel and each
/// pixel is independent, so the scan is deterministic; builder failures are
/// reported for the first offending pixel in row-major order.
pub fn param_scan(
    fam: &Family,
    z0: [Complex64; 2],
    window: &Window,
    c2: Complex64,
    width: usize,
    height: usize,
    tol: f64,
    budget: u32,
) -> Result<ParamScan> {
    if width < 2 || height < 2 {
        return Err(Error::BadGridSize(width, height));
    }
    if !(tol > 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    if budget == 0 {
        return Err(Error::BadBudget);
    }
    if z0.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
        return Err(Error::NonFinitePoint);
    }
    let rows: Vec<Result<Vec<(GreenValue, OrbitTag)>>> = (0..height)
        .into_par_iter()
        .map(|row| {
            let y = window.y_coord(row, height);
            (0..width)
                .map(|col| {
                    let x = window.x_coord(col, width);
                    let f = fam.build([Complex64::new(x, y), c2])?;
                    let g = green_plus_budget(&f, z0, tol, budget)?;
                    Ok((g, orbit_tag(&f, z0, budget)))
                })
                .collect()
        })
        .collect();
    let mut green = Vec::with_capacity(width * height);
    let mut forward = Vec::with_capacity(width * height);
    for row in rows {
        for (g, t) in row? {
            green.push(g);
            forward.push(t);
        }
    }
    Ok(ParamScan {
        green: Grid::from_rows(width, height, green),
        forward: Grid::from_rows(width, height, forward),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::{green_plus, holder_exponent, render_classify, Box4, PointClass};
    use crate::grid::SlicePlane;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fiber_potential_is_bit_exact_against_the_single_map_route() {
        let fam = Family::quadratic_default();
        let cases = [
            ([c(0.0, 0.0), c(0.3, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]),
            ([c(-1.1, 0.0), c(0.4, 0.0)], [c(2.5, 0.3), c(-0.7, 1.1)]),
            ([c(0.2, -0.1), c(0.05, 0.0)], [c(4.0, 0.0), c(4.0, 0.0)]),
        ];
        for (cp, z) in cases {
            let fib = family_green(&fam, cp, z, 1e-8).unwrap();
            let direct = green_plus(&HenonType::quadratic(cp[0], cp[1]).unwrap(), z, 1e-8).unwrap();
            assert_eq!(fib, direct);
        }
        // the origin is a fixed point of every c1 = 0 fiber
        let v = family_green(&fam, [c(0.0, 0.0), c(0.3, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)], 1e-8)
            .unwrap();
        assert_eq!(v.value, 0.0);
        // degenerate parameter surfaces the fiber construction error
        assert!(matches!(
            family_green(&fam, [c(0.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)], 1e-8),
            Err(Error::FactorZeroA)
        ));
    }

    #[test]
    fn declared_degree_is_enforced_per_fiber() {
        let wrong = Family::new("claims-cubic", 3, |p| HenonType::quadratic(p[0], p[1]));
        assert!(matches!(
            wrong.build([c(0.0, 0.0), c(1.0, 0.0)]),
            Err(Error::FamilyDegree {
                expected: 3,
                got: 2
            })
        ));
        let fam = Family::quadratic_default();
        assert_eq!(fam.build([c(0.1, 0.0), c(0.5, 0.0)]).unwrap().degree(), 2);
        assert_eq!(fam.degree(), 2);
        assert_eq!(fam.label(), "quadratic");
    }

    #[test]
    fn joint_holder_modulus_stays_bounded_across_parameter_and_phase() {
        let fam = Family::quadratic_default();
        let a = c(0.3, 0.0);
        let center = fam.build([c(0.0, 0.0), a]).unwrap();
        let beta = holder_exponent(&center, &Box4::symmetric(1.5).unwrap(), 6, &[8]).unwrap()[0]
            .beta_hat;
        assert!(beta > 0.0 && beta <= 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let c1 = c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
            let z = [
                c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
                c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            ];
            let sep = 10f64.powf(rng.gen_range(-4.0..-1.0));
            let mut dir = [0.0f64; 6];
            let mut norm = 0.0;
            for d in dir.iter_mut() {
                *d = rng.gen_range(-1.0..1.0);
                norm += *d * *d;
            }
            let norm = norm.sqrt().max(1e-9);
            let step = |k: usize| sep * dir[k] / norm;
            let c1b = c1 + c(step(0), step(1));
            let zb = [z[0] + c(step(2), step(3)), z[1] + c(step(4), step(5))];
            let g1 = family_green(&fam, [c1, a], z, 1e-8).unwrap().value;
            let g2 = family_green(&fam, [c1b, a], zb, 1e-8).unwrap().value;
            worst = worst.max((g1 - g2).abs() / sep.powf(beta));
        }
        assert!(worst > 0.0, "sampling never straddled a potential change");
        assert!(worst < 6.0, "empirical joint modulus {worst} blew up");
    }

    #[test]
    fn boundary_pixels_persist_under_one_pixel_parameter_shifts() {
        let fam = Family::quadratic_default();
        let plane = SlicePlane::z1_plane(c(0.0, 0.0));
        let w = Window::square(2.0).unwrap();
        let n = 64usize;
        let h = 4.0 / (n as f64 - 1.0);
        // both fibers keep an attracting fixed point, so the bounded set has
        // interior on the slice and the escape locus has a detectable edge
        let f0 = fam.build([c(0.0, 0.0), c(0.3, 0.0)]).unwrap();
        let f1 = fam.build([c(h, 0.0), c(0.3, 0.0)]).unwrap();
        let g0 = render_classify(&f0, &plane, &w, n, n, 256).unwrap();
        let g1 = render_classify(&f1, &plane, &w, n, n, 256).unwrap();
        let boundary = |g: &Grid<PointClass>| -> Vec<(usize, usize)> {
            let mut out = Vec::new();
            for row in 0..n {
                for col in 0..n {
                    let here = g.get(col, row).forward.is_escaping();
                    let right = col + 1 < n && g.get(col + 1, row).forward.is_escaping() != here;
                    let up = row + 1 < n && g.get(col, row + 1).forward.is_escaping() != here;
                    if right || up {
                        out.push((col, row));
                    }
                }
            }
            out
        };
        let b0 = boundary(&g0);
        let b1 = boundary(&g1);
        assert!(!b0.is_empty() && !b1.is_empty());
        // every detected boundary pixel keeps a boundary pixel of the
        // shifted parameter within a 2-pixel dilation
        for (col, row) in &b0 {
            let hit = b1.iter().any(|(cc, rr)| {
                cc.abs_diff(*col) <= 2 && rr.abs_diff(*row) <= 2
            });
            assert!(hit, "boundary pixel ({col},{row}) vanished under the shift");
        }
    }

    #[test]
    fn scans_match_pointwise_potentials_and_refine_consistently() {
        let fam = Family::quadratic_default();
        // a far-out seed escapes in every fiber of a small window
        let far = param_scan(
            &fam,
            [c(8.0, 0.0), c(0.0, 0.0)],
            &Window::square(0.25).unwrap(),
            c(0.5, 0.0),
            8,
            8,
            1e-6,
            64,
        )
        .unwrap();
        assert!(far.green.data().iter().all(|g| g.value > 0.0));
        assert!(far.forward.data().iter().all(|t| t.is_escaping()));

        // near the degenerate-a limit the bounded set of the origin seed
        // shows positive area, echoing the one-variable connectedness locus
        let w = Window::new(-2.2, 0.8, -1.3, 1.3).unwrap();
        let scan = param_scan(
            &fam,
            [c(0.0, 0.0), c(0.0, 0.0)],
            &w,
            c(0.05, 0.0),
            33,
            27,
            1e-6,
            256,
        )
        .unwrap();
        let total = scan.green.data().len();
        let zeros = scan.green.data().iter().filter(|g| g.value == 0.0).count();
        assert!(zeros > total / 6, "only {zeros} of {total} pixels bounded");
        assert!(zeros < total, "window should also contain escaping fibers");
        // the scan's two layers agree pixelwise: value 0 iff certificate
        // stayed silent
        for (g, t) in scan.green.data().iter().zip(scan.forward.data()) {
            assert_eq!(g.value == 0.0, !t.is_escaping());
        }

        // endpoint-inclusive sampling: doubling to 2n-1 keeps every coarse
        // sample on the fine grid, bit for bit
        let coarse = param_scan(&fam, [c(0.0, 0.0), c(0.0, 0.0)], &w, c(0.05, 0.0), 9, 7, 1e-6, 128)
            .unwrap();
        let fine = param_scan(&fam, [c(0.0, 0.0), c(0.0, 0.0)], &w, c(0.05, 0.0), 17, 13, 1e-6, 128)
            .unwrap();
        for row in 0..7 {
            for col in 0..9 {
                assert_eq!(coarse.green.get(col, row), fine.green.get(2 * col, 2 * row));
            }
        }
    }

    #[test]
    fn scan_validates_arguments() {
        let fam = Family::quadratic_default();
        let w = Window::square(1.0).unwrap();
        let z = [c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            param_scan(&fam, z, &w, c(0.5, 0.0), 1, 8, 1e-6, 64),
            Err(Error::BadGridSize(1, 8))
        ));
        assert!(matches!(
            param_scan(&fam, z, &w, c(0.5, 0.0), 8, 8, 0.0, 64),
            Err(Error::BadTolerance(_))
        ));
        assert!(matches!(
            param_scan(&fam, z, &w, c(0.5, 0.0), 8, 8, 1e-6, 0),
            Err(Error::BadBudget)
        ));
        assert!(matches!(
            param_scan(&fam, [c(f64::NAN, 0.0), c(0.0, 0.0)], &w, c(0.5, 0.0), 8, 8, 1e-6, 64),
            Err(Error::NonFinitePoint)
        ));
        // a degenerate fiber inside the window is reported, not skipped
        let z0 = [c(0.2, 0.0), c(0.2, 0.0)];
        assert!(matches!(
            param_scan(&fam, z0, &w, c(0.0, 0.0), 8, 8, 1e-6, 64),
            Err(Error::FactorZeroA)
        ));
    }
}
