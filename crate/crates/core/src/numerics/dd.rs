//! Compensated (double-double) arithmetic: an unevaluated sum hi + lo of two
//! doubles carrying roughly 106 bits of mantissa. Backward orbits along a
//! stable manifold amplify per-step rounding by the reciprocal stable
//! multiplier each step, so plain doubles hit an error floor far above the
//! 1e-8 conjugation certificate; these routines push that floor below 1e-25.
//! Portable error-free transforms (Knuth two-sum, Veltkamp split); no fused
//! multiply-add required. Splitting overflows near 1e300, far beyond the
//! bounded orbits used here.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = 134217729.0 * a; // 2^27 + 1
    let hi = c - (c - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    #[inline]
    pub fn from_c64(z: Complex64) -> DdComplex {
        DdComplex {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    #[inline]
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn add(self, o: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    #[inline]
    pub fn sub(self, o: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    #[inline]
    pub fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    /// Reciprocal via a double-precision seed refined by one complex Newton
    /// step x <- x (2 - z x), enough to reach full double-double accuracy.
    pub fn recip(self) -> DdComplex {
        let seed = DdComplex::from_c64(self.to_c64().inv());
        let two = DdComplex {
            re: Dd::from_f64(2.0),
            im: Dd::default(),
        };
        seed.mul(two.sub(self.mul(seed)))
    }

    /// |z|, to double accuracy (enough for residual reporting).
    pub fn abs(self) -> f64 {
        self.to_c64().norm()
    }
}

/// Horner evaluation of a polynomial with double (exactly representable)
/// coefficients at a double-double point.
pub(crate) fn horner_dd(coeffs: &[Complex64], z: DdComplex) -> DdComplex {
    let mut acc = DdComplex::from_c64(*coeffs.last().expect("nonempty coefficients"));
    for c in coeffs.iter().rev().skip(1) {
        acc = acc.mul(z).add(DdComplex::from_c64(*c));
    }
    acc
}
