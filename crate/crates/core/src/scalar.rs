//! Scalar abstraction shared by the solver and the abstraction builder.
//!
//! Costs live in the extended reals. Floating point already carries `+inf`,
//! so a [`Scalar`] is any IEEE float type; `-inf` is never produced by the
//! problem data and is only reachable as the limit of a diverging iteration.

use std::fmt::{Debug, Display};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type usable as a cost / state coordinate.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Lock-free cell holding one value, used for the shared value array.
    type Atomic: AtomicScalar<Self>;

    /// Size in bytes of one value.
    const BYTES: usize;

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

/// Atomic storage for a [`Scalar`].
pub trait AtomicScalar<T>: Send + Sync + Debug {
    fn new(v: T) -> Self;
    fn load(&self) -> T;
    fn store(&self, v: T);
    /// Lowers the stored value to `v` if `v` is strictly smaller.
    /// Returns `true` when the write happened.
    fn fetch_min(&self, v: T) -> bool;
}

macro_rules! atomic_float {
    ($name:ident, $float:ty, $bits:ty, $atomic:ty) => {
        #[derive(Debug)]
        pub struct $name($atomic);

        impl AtomicScalar<$float> for $name {
            fn new(v: $float) -> Self {
                Self(<$atomic>::new(v.to_bits()))
            }

            #[inline]
            fn load(&self) -> $float {
                <$float>::from_bits(self.0.load(Ordering::Relaxed))
            }

            #[inline]
            fn store(&self, v: $float) {
                self.0.store(v.to_bits(), Ordering::Relaxed)
            }

            #[inline]
            fn fetch_min(&self, v: $float) -> bool {
                let mut cur = self.0.load(Ordering::Relaxed);
                loop {
                    if !(v < <$float>::from_bits(cur)) {
                        return false;
                    }
                    match self.0.compare_exchange_weak(
                        cur,
                        v.to_bits(),
                        Ordering::AcqRel,
                        Ordering::Relaxed,
                    ) {
                        Ok(_) => return true,
                        Err(actual) => cur = actual,
                    }
                }
            }
        }

        impl Scalar for $float {
            type Atomic = $name;
            const BYTES: usize = std::mem::size_of::<$float>();
        }
    };
}

atomic_float!(AtomicF32, f32, u32, AtomicU32);
atomic_float!(AtomicF64, f64, u64, AtomicU64);

/// Extended-real sum of two costs.
///
/// Neither operand may be `-inf`; with that excluded `a + inf = inf` for every
/// `a`, which is exactly IEEE addition.
#[inline]
pub fn ext_add<T: Scalar>(a: T, b: T) -> T {
    debug_assert!(
        a != T::neg_infinity() && b != T::neg_infinity(),
        "-inf cost operand"
    );
    a + b
}

/// Parses a cost literal. Accepts `inf`, `+inf`, `infinity` and any float;
/// rejects `-inf` and NaN.
pub fn parse_cost<T: Scalar>(s: &str) -> Option<T> {
    let t = s.trim();
    let v = match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => T::infinity(),
        _ => t.parse::<T>().ok()?,
    };
    if v.is_nan() || v == T::neg_infinity() {
        None
    } else {
        Some(v)
    }
}

/// Formats a cost so that [`parse_cost`] reads back the identical value.
pub fn format_cost<T: Scalar>(v: T) -> String {
    if v == T::infinity() {
        "inf".to_string()
    } else if v == T::neg_infinity() {
        "-inf".to_string()
    } else {
        // Debug formatting of f32/f64 is shortest round-trip.
        format!("{v:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fetch_min_only_lowers() {
        let a = AtomicF64::new(3.0);
        assert!(!a.fetch_min(4.0));
        assert!(!a.fetch_min(3.0));
        assert!(a.fetch_min(-1.5));
        assert_eq!(a.load(), -1.5);

        let b = AtomicF32::new(f32::INFINITY);
        assert!(b.fetch_min(2.0));
        assert_eq!(b.load(), 2.0);
    }

    #[test]
    fn cost_literals() {
        assert_eq!(parse_cost::<f64>("inf"), Some(f64::INFINITY));
        assert_eq!(parse_cost::<f64>(" -2.5 "), Some(-2.5));
        assert_eq!(parse_cost::<f64>("-inf"), None);
        assert_eq!(parse_cost::<f64>("nan"), None);
        for v in [0.1f64, -3.0, 1e-300, f64::INFINITY] {
            assert_eq!(parse_cost::<f64>(&format_cost(v)), Some(v));
        }
    }

    #[test]
    fn infinity_absorbs() {
        assert_eq!(ext_add(-3.0f64, f64::INFINITY), f64::INFINITY);
        assert_eq!(ext_add(2.0f32, 1.0), 3.0);
    }
}
