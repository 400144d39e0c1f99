//! Nested ratio sums `1 + r_0 (1 + r_1 (1 + ...))` evaluated either in
//! double-double or exactly over the integers.
//!
//! Every factor of a ratio is given as a short list of doubles whose sum is the
//! factor. Doubles are dyadic rationals, so after a common power-of-two shift all
//! factors become integers and the nested sum is a single exact fraction.

use crate::ddouble::DD;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// A factor written as the exact sum of its addends.
pub(crate) type Factor = [f64; 4];

/// `(numerator factors, denominator factors)`.
pub(crate) type Ratio = ([Factor; 3], [Factor; 3]);

fn factor_dd(f: &Factor) -> DD {
    DD::sum_of(f)
}

fn ratio_dd(r: &Ratio) -> DD {
    let num = factor_dd(&r.0[0]) * factor_dd(&r.0[1]) * factor_dd(&r.0[2]);
    let den = factor_dd(&r.1[0]) * factor_dd(&r.1[1]) * factor_dd(&r.1[2]);
    num / den
}

/// Double-double Horner evaluation. Also returns `sum |partial products|`,
/// the scale against which cancellation is measured.
pub(crate) fn nested_sum_dd(ratios: &[Ratio]) -> (f64, f64) {
    let rs: Vec<DD> = ratios.iter().map(ratio_dd).collect();
    let mut v = DD::ONE;
    for r in rs.iter().rev() {
        v = DD::ONE + *r * v;
    }
    let mut t = 1.0_f64;
    let mut scale = 1.0_f64;
    for r in &rs {
        t *= r.to_f64();
        scale += t.abs();
    }
    (v.to_f64(), scale)
}

fn decode(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), exp_bits - 1075)
    };
    // strip trailing zeros so the common shift stays small
    let tz = mant.trailing_zeros() as i32;
    (sign * (mant >> tz), exp + tz)
}

fn factor_big(f: &Factor, shift: i32) -> BigInt {
    let mut acc = BigInt::zero();
    for &x in f {
        let (m, e) = decode(x);
        if m != 0 {
            acc += BigInt::from(m) << ((e + shift) as usize);
        }
    }
    acc
}

/// Exact evaluation of the nested sum, rounded once to `f64`.
pub(crate) fn nested_sum_exact(ratios: &[Ratio]) -> f64 {
    let mut shift = 0i32;
    for r in ratios {
        for f in r.0.iter().chain(r.1.iter()) {
            for &x in f {
                let (m, e) = decode(x);
                if m != 0 {
                    shift = shift.max(-e);
                }
            }
        }
    }
    let mut p = BigInt::from(1);
    let mut q = BigInt::from(1);
    for r in ratios.iter().rev() {
        let n = r.0.iter().map(|f| factor_big(f, shift)).product::<BigInt>();
        let d = r.1.iter().map(|f| factor_big(f, shift)).product::<BigInt>();
        let new_q = &d * &q;
        p = new_q.clone() + n * p;
        q = new_q;
    }
    fraction_to_f64(p, q)
}

fn fraction_to_f64(p: BigInt, q: BigInt) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    let negative = p.is_negative() != q.is_negative();
    let (p, q) = (p.abs(), q.abs());
    let shift = 64 - (p.bits() as i64 - q.bits() as i64);
    let quotient = if shift >= 0 {
        (p << shift as usize) / q
    } else {
        p / (q << (-shift) as usize)
    };
    let v = libm::scalbn(quotient.to_f64().unwrap_or(f64::NAN), -(shift as i32));
    if negative {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(num: [f64; 3], den: [f64; 3]) -> Ratio {
        (
            num.map(|x| [x, 0.0, 0.0, 0.0]),
            den.map(|x| [x, 0.0, 0.0, 0.0]),
        )
    }

    #[test]
    fn geometric_series() {
        // 1 + 1/2 (1 + 1/2 (1 + 1/2)) = 1.875
        let r = ratio([1.0, 1.0, 1.0], [2.0, 1.0, 1.0]);
        let rs = vec![r; 3];
        assert_eq!(nested_sum_exact(&rs), 1.875);
        assert_eq!(nested_sum_dd(&rs).0, 1.875);
    }

    #[test]
    fn exact_handles_binomial_cancellation() {
        // r_k = −(n−k)/(k+1) nests to Σ (−1)^k C(n, k) = (1 − 1)^n = 0
        let n = 60;
        let rs: Vec<Ratio> = (0..n)
            .map(|k| ratio([-(n - k) as f64, 1.0, 1.0], [(k + 1) as f64, 1.0, 1.0]))
            .collect();
        assert_eq!(nested_sum_exact(&rs), 0.0);
        let (_, scale) = nested_sum_dd(&rs);
        assert!(scale > 1e17);
    }

    #[test]
    fn exact_uses_dyadic_parameters_exactly() {
        // (1 + 0.1 * x) with x = 0.3 split as factor [0.1] and [0.3]
        let r: Ratio = (
            [
                [0.1, 0.0, 0.0, 0.0],
                [0.3, 0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
            ],
            [[1.0, 0.0, 0.0, 0.0]; 3],
        );
        let want = 1.0 + 0.1 * 0.3;
        assert!((nested_sum_exact(&[r]) - want).abs() < 1e-16);
    }

    #[test]
    fn dd_and_exact_agree_on_moderate_cancellation() {
        let rs: Vec<Ratio> = (0..20)
            .map(|k| {
                (
                    [
                        [k as f64 - 20.0, 0.0, 0.0, 0.0],
                        [21.0 + k as f64, 0.3, 0.0, 0.0],
                        [1.0 + k as f64, -0.45, 0.0, 0.0],
                    ],
                    [
                        [1.0 + k as f64, 0.2, 0.0, 0.0],
                        [3.0 + k as f64, 0.05, 0.1, 0.0],
                        [k as f64 - 3.0, 0.55, 0.0, 0.0],
                    ],
                )
            })
            .collect();
        let exact = nested_sum_exact(&rs);
        let (dd, _) = nested_sum_dd(&rs);
        assert!(((dd - exact) / exact).abs() < 1e-14, "{dd} vs {exact}");
    }

    #[test]
    fn fraction_conversion_is_correctly_scaled() {
        let v = fraction_to_f64(BigInt::from(-3), BigInt::from(1) << 2000);
        assert_eq!(v, 0.0);
        let v = fraction_to_f64(BigInt::from(7), BigInt::from(2));
        assert_eq!(v, 3.5);
    }
}
