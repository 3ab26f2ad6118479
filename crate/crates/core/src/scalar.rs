//! Scalar abstraction shared by every numerical module.
//!
//! All matrix work happens over `Complex<T>` for a real type `T` (`f32` or
//! `f64`). Tolerances are carried around as `f64` and converted at the point
//! of use.

use std::fmt::{Debug, Display};

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the crate is generic over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display {}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = Complex<T>;
pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 is representable")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(real(re), real(im))
}

#[inline]
pub fn from_real<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn one<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn zero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn modulus<T: Real>(z: Cx<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Principal argument in `(-π, π]`.
#[inline]
pub fn arg<T: Real>(z: Cx<T>) -> T {
    z.im.atan2(z.re)
}

/// Integer power by repeated squaring; negative exponents invert first.
pub fn powi<T: Real>(z: Cx<T>, k: i64) -> Cx<T> {
    let (mut base, mut e) = if k < 0 { (one::<T>() / z, -k) } else { (z, k) };
    let mut acc = one::<T>();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Principal square root.
pub fn csqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    let r = modulus(z);
    if r == T::zero() {
        return zero();
    }
    let two = real::<T>(2.0);
    let re = ((r + z.re) / two).sqrt();
    let im = ((r - z.re) / two).sqrt();
    if z.im < T::zero() {
        Complex::new(re, -im)
    } else {
        Complex::new(re, im)
    }
}

pub fn to_c64<T: Real>(z: Cx<T>) -> Complex<f64> {
    Complex::new(to_f64(z.re), to_f64(z.im))
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> Cx<T> {
    cx(z.re, z.im)
}

/// The q-integer `[n]_q = (q^n - q^-n) / (q - q^-1)`.
pub fn qint<T: Real>(q: Cx<T>, n: i64) -> Cx<T> {
    (powi(q, n) - powi(q, -n)) / (q - one::<T>() / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_product() {
        let z: Cx<f64> = cx(0.3, 1.1);
        let mut acc = one::<f64>();
        for _ in 0..7 {
            acc *= z;
        }
        assert!(modulus(powi(z, 7) - acc) < 1e-12);
        assert!(modulus(powi(z, -7) * acc - one()) < 1e-12);
        assert_eq!(powi(z, 0), one());
    }

    #[test]
    fn csqrt_squares_back() {
        for &(a, b) in &[(1.0, 0.0), (-4.0, 0.0), (0.2, -3.0), (-1.5, 2.5)] {
            let z: Cx<f64> = cx(a, b);
            let s = csqrt(z);
            assert!(modulus(s * s - z) < 1e-12, "{z}");
            assert!(s.re >= 0.0);
        }
    }

    #[test]
    fn qint_three_is_q2_plus_1_plus_qm2() {
        let q: Cx<f64> = cx(1.1, 0.2);
        let expect = q * q + one() + one::<f64>() / (q * q);
        assert!(modulus(qint(q, 3) - expect) < 1e-12);
    }
}
