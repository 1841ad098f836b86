use num_complex::Complex64;

/// Dense 2x2 complex matrix; row-major. Jacobians of Hénon factors and their
/// chain products are the only matrices this crate needs, so the closed 2x2
/// formulas (determinant, eigenvalues, spectral norm) replace a general solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn identity() -> Mat2 {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        Mat2 { m: [[o, z], [z, o]] }
    }

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Mat2 {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2 {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Eigenvalues by the quadratic formula, ordered by descending modulus
    /// (ties broken lexicographically by (re, im)).
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let t = self.trace();
        let disc = (t * t - 4.0 * self.det()).sqrt();
        let a = (t + disc) * 0.5;
        let b = (t - disc) * 0.5;
        let key = |z: &Complex64| (z.norm(), z.re, z.im);
        let (ka, kb) = (key(&a), key(&b));
        if ka.0 > kb.0 || (ka.0 == kb.0 && (ka.1, ka.2) <= (kb.1, kb.2)) {
            [a, b]
        } else {
            [b, a]
        }
    }

    /// Solve self * x = rhs directly; caller checks the determinant first.
    pub fn solve(&self, rhs: [Complex64; 2]) -> Option<[Complex64; 2]> {
        let det = self.det();
        if det.norm() < 1e-300 {
            return None;
        }
        Some([
            (rhs[0] * self.m[1][1] - rhs[1] * self.m[0][1]) / det,
            (self.m[0][0] * rhs[1] - self.m[1][0] * rhs[0]) / det,
        ])
    }

    /// Spectral norm (largest singular value):
    /// sigma_max^2 = (|M|_F^2 + sqrt(|M|_F^4 - 4 |det|^2)) / 2.
    pub fn op_norm(&self) -> f64 {
        let f: f64 = self
            .m
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum();
        let d2 = self.det().norm_sqr();
        let inner = (f * f - 4.0 * d2).max(0.0).sqrt();
        (0.5 * (f + inner)).sqrt()
    }
}
