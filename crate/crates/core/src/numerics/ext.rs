use num_complex::Complex64;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

/// Complex number held as `mantissa * 2^exponent` with the mantissa modulus
/// normalized into `[1, 2)` (or exactly zero).
///
/// Orbit coordinates under a degree-d Hénon-type map grow like `C^(d^n)`,
/// far past the f64 range, so the binary exponent is carried separately in an
/// i64. Exponent arithmetic saturates; a saturated value still compares and
/// logs correctly, it just stops being exact (unreachable for the iteration
/// depths used here).
///
/// Both components share one exponent, so a component more than ~2^1074 below
/// the modulus flushes to zero — the same relative cutoff plain f64 applies
/// to a sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtComplex {
    mantissa: Complex64,
    exponent: i64,
}

pub const LN_2: f64 = std::f64::consts::LN_2;

/// Multiply by 2^k without intermediate overflow (k may exceed the f64
/// exponent range; the product may still be a normal number).
fn ldexp_c(m: Complex64, k: i64) -> Complex64 {
    if k == 0 || (m.re == 0.0 && m.im == 0.0) {
        return m;
    }
    let mut m = m;
    let mut k = k.clamp(-2200, 2200) as i32;
    while k != 0 {
        let step = k.clamp(-900, 900);
        m *= f64::powi(2.0, step);
        k -= step;
    }
    m
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex {
        mantissa: Complex64 { re: 0.0, im: 0.0 },
        exponent: 0,
    };

    /// Canonical form: zero, or modulus in [1, 2).
    fn renorm(m: Complex64, e: i64) -> ExtComplex {
        let n2 = m.norm_sqr();
        if n2 == 0.0 {
            return ExtComplex::ZERO;
        }
        debug_assert!(n2.is_finite(), "mantissa overflow before renorm: {m}");
        // |m| in [1,2) means norm_sqr in [1,4); read the shift straight off the
        // f64 exponent bits of norm_sqr (floor(log2(n2)) with arithmetic shift
        // handles negatives). Subnormal n2 falls back to log2.
        let bits = n2.to_bits();
        let raw = ((bits >> 52) & 0x7ff) as i64;
        let k = if raw == 0 {
            (n2.log2() / 2.0).floor() as i64
        } else {
            (raw - 1023) >> 1
        };
        let mut m = ldexp_c(m, -k);
        let mut e = e.saturating_add(k);
        let mut n2 = m.norm_sqr();
        while n2 >= 4.0 {
            m *= 0.5;
            e = e.saturating_add(1);
            n2 = m.norm_sqr();
        }
        while n2 < 1.0 {
            m *= 2.0;
            e = e.saturating_sub(1);
            n2 = m.norm_sqr();
        }
        ExtComplex { mantissa: m, exponent: e }
    }

    pub fn new(re: f64, im: f64) -> ExtComplex {
        ExtComplex::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> ExtComplex {
        if z.re == 0.0 && z.im == 0.0 {
            return ExtComplex::ZERO;
        }
        // Pre-scale by the larger component's exponent so norm_sqr cannot
        // overflow (|z| may be near f64::MAX) or flush to zero (subnormals).
        let amax = z.re.abs().max(z.im.abs());
        debug_assert!(amax.is_finite(), "non-finite input: {z}");
        let k = { (amax.to_bits() >> 52) & 0x7ff } as i64 - 1023;
        let k = if k == -1023 { -1074 } else { k }; // subnormal component
        ExtComplex::renorm(ldexp_c(z, -k), k)
    }

    pub fn from_mantissa_exp(m: Complex64, e: i64) -> ExtComplex {
        ExtComplex::renorm(m, e)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// Back to a plain complex; overflows to infinity / underflows to zero
    /// componentwise when the exponent leaves the f64 range.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        if self.exponent > 1024 {
            return self.mantissa * f64::INFINITY;
        }
        if self.exponent < -1100 {
            return Complex64::new(0.0, 0.0);
        }
        ldexp_c(self.mantissa, self.exponent)
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn abs_log(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.exponent as f64 * LN_2
    }

    /// Compare moduli without forming them.
    pub fn abs_cmp(&self, other: &ExtComplex) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self
                .exponent
                .cmp(&other.exponent)
                .then_with(|| self.mantissa.norm_sqr().total_cmp(&other.mantissa.norm_sqr())),
        }
    }

    /// Modulus >= the positive scalar `s`?
    pub fn abs_ge(&self, s: f64) -> bool {
        debug_assert!(s > 0.0);
        if self.is_zero() {
            return false;
        }
        let se = s.log2();
        let e = self.exponent as f64;
        // cheap exponent separation first, exact log comparison on the boundary
        if e - 1.0 > se {
            return true;
        }
        if e + 1.0 < se {
            return false;
        }
        self.abs_log() >= s.ln()
    }

    /// self / other as a plain complex, saturating componentwise when the
    /// exponent gap leaves the f64 range. Intended for forming well-scaled
    /// ratios (e.g. normalizing a matrix by its largest entry).
    pub fn ratio(&self, other: &ExtComplex) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        debug_assert!(!other.is_zero(), "ratio by zero");
        let m = self.mantissa / other.mantissa;
        let k = self.exponent.saturating_sub(other.exponent);
        if k > 1100 {
            return m * f64::INFINITY;
        }
        if k < -1100 {
            return Complex64::new(0.0, 0.0);
        }
        ldexp_c(m, k)
    }

    pub fn scale(&self, w: Complex64) -> ExtComplex {
        *self * ExtComplex::from_complex(w)
    }
}

impl Add for ExtComplex {
    type Output = ExtComplex;
    fn add(self, rhs: ExtComplex) -> ExtComplex {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = hi.exponent - lo.exponent;
        if shift > 60 {
            // below half an ulp of the larger mantissa
            return hi;
        }
        let m = hi.mantissa + ldexp_c(lo.mantissa, -shift);
        ExtComplex::renorm(m, hi.exponent)
    }
}

impl Sub for ExtComplex {
    type Output = ExtComplex;
    fn sub(self, rhs: ExtComplex) -> ExtComplex {
        self + (-rhs)
    }
}

impl Neg for ExtComplex {
    type Output = ExtComplex;
    fn neg(self) -> ExtComplex {
        ExtComplex {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for ExtComplex {
    type Output = ExtComplex;
    fn mul(self, rhs: ExtComplex) -> ExtComplex {
        if self.is_zero() || rhs.is_zero() {
            return ExtComplex::ZERO;
        }
        // mantissa product modulus in [1, 4): a single renorm step
        ExtComplex::renorm(
            self.mantissa * rhs.mantissa,
            self.exponent.saturating_add(rhs.exponent),
        )
    }
}

/// Natural log of the modulus (free-function form used throughout the crate).
pub fn ext_log_abs(x: ExtComplex) -> f64 {
    x.abs_log()
}

/// Point of C^2 in extended precision.
pub type ExtPoint = [ExtComplex; 2];

pub fn ext_point(z: [Complex64; 2]) -> ExtPoint {
    [ExtComplex::from_complex(z[0]), ExtComplex::from_complex(z[1])]
}

/// log of the sup norm max(|z1|, |z2|); `-inf` at the origin.
pub fn log_sup_norm(z: &ExtPoint) -> f64 {
    match z[0].abs_cmp(&z[1]) {
        Ordering::Less => z[1].abs_log(),
        _ => z[0].abs_log(),
    }
}
