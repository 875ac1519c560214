//! Numeric abstraction for the domain pipeline.
//!
//! Everything outside the MILP layer (instances, the virtual-network
//! transform, solution verification, flow decomposition, and the in-tree
//! simplex) is generic over [`Scalar`], so the same code runs with exact
//! rational arithmetic ([`num_rational::BigRational`], zero tolerance) and
//! with floating point (`f64`/`f32`, tolerance-based comparisons). Exactness
//! matters: conservation and equivalence checks in the test suite assert
//! equality, not closeness, whenever the inputs are rational.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Numeric type usable throughout the domain pipeline.
///
/// `EXACT` types (rationals) use a zero [`Scalar::tol`] and so compare
/// exactly; float types compare within a small absolute tolerance via the
/// [`approx_eq`]/[`approx_le`] helpers.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// `true` when arithmetic on this type is exact (no rounding error).
    const EXACT: bool;

    /// Comparison tolerance: zero for exact types.
    fn tol() -> Self;

    /// Converts an integer into this scalar type.
    fn from_int(v: i64) -> Self;

    /// Builds the fraction `num / den` (`den != 0`), exactly when possible.
    fn ratio(num: i64, den: i64) -> Self;

    /// Approximates this value as `f64` (exact for floats, best-effort for
    /// rationals). This is the LP boundary conversion.
    fn to_f64(&self) -> f64;

    /// Converts a finite `f64` into this scalar exactly (every finite `f64`
    /// is a dyadic rational).
    ///
    /// # Panics
    ///
    /// Panics if `v` is not finite.
    fn from_f64_exact(v: f64) -> Self;

    /// Converts a finite `f64` into this scalar, snapping to the nearest
    /// small-denominator rational when that is within relative `1e-9`.
    ///
    /// Solver outputs are vertex coordinates of polytopes with
    /// small-denominator data, perturbed by float round-off; snapping
    /// recovers the exact vertex so downstream rational checks hold with
    /// equality. For float scalars this is the identity.
    fn snap_f64(v: f64) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tol() -> Self {
        1e-9
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_exact(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite value {v}");
        v
    }

    fn snap_f64(v: f64) -> Self {
        v
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tol() -> Self {
        1e-4
    }

    fn from_int(v: i64) -> Self {
        v as f32
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_f64_exact(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite value {v}");
        v as f32
    }

    fn snap_f64(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tol() -> Self {
        BigRational::zero()
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64_exact(v: f64) -> Self {
        BigRational::from_f64(v).unwrap_or_else(|| panic!("non-finite value {v}"))
    }

    fn snap_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite value {v}");
        let (num, den) = best_rational_approx(v, 1_000_000);
        let approx = num as f64 / den as f64;
        // A genuine rational corrupted by float noise sits within a few
        // ulps of p/q, while an arbitrary real's best approximation with
        // denominator q typically errs on the order of 1/q^2. Weighing the
        // error by q^2 separates the two: accept only errors far below the
        // approximation noise floor for that denominator.
        let weighted = (approx - v).abs() * (den as f64) * (den as f64);
        if weighted <= 1e-9 * v.abs().max(1.0) {
            BigRational::new(BigInt::from(num), BigInt::from(den))
        } else {
            Self::from_f64_exact(v)
        }
    }
}

/// Best rational approximation `p/q` of `v` with `q <= max_den`, by the
/// continued-fraction convergent construction.
fn best_rational_approx(v: f64, max_den: i128) -> (i128, i128) {
    let mut x = v;
    // Convergents h/k with the usual two-term recurrence.
    let (mut h2, mut h1) = (1i128, x.floor() as i128);
    let (mut k2, mut k1) = (0i128, 1i128);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
        let a = x.floor() as i128;
        let h = a.saturating_mul(h1).saturating_add(h2);
        let k = a.saturating_mul(k1).saturating_add(k2);
        if k > max_den || k <= 0 {
            break;
        }
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
        frac = x - x.floor();
    }
    (h1, k1)
}

/// `|a - b| <= tol` (exact equality for exact scalars).
pub fn approx_eq<S: Scalar>(a: &S, b: &S) -> bool {
    (a.clone() - b.clone()).abs() <= S::tol()
}

/// `a <= b + tol` (plain `<=` for exact scalars).
pub fn approx_le<S: Scalar>(a: &S, b: &S) -> bool {
    a.clone() - b.clone() <= S::tol()
}
