//! Special-function kernel: log-Gamma, reciprocal Gamma, Beta, Gamma ratios
//! and the two-sided Gamma bounds with the Euler–Mascheroni exponent.
//!
//! Everything that multiplies or divides Gamma values works on logarithms with
//! an explicit sign ([`SignedLog`]) and exponentiates once at the end, so
//! factorial-sized intermediates never overflow.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Euler–Mascheroni constant.
pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Relative accuracy promised by the kernel functions.
pub const KERNEL_TOL: f64 = 1e-13;

/// Tolerance used for identities derived from the kernel (recurrences, reflections).
pub const IDENTITY_TOL: f64 = 1e-12;

/// A real number stored as `sign * exp(ln_abs)`; `sign == 0` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog {
        ln_abs: 0.0,
        sign: 1.0,
    };
    pub const ZERO: SignedLog = SignedLog {
        ln_abs: f64::NEG_INFINITY,
        sign: 0.0,
    };

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                ln_abs: x.abs().ln(),
                sign: x.signum(),
            }
        }
    }

    pub fn positive(ln_abs: f64) -> Self {
        SignedLog { ln_abs, sign: 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn value(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn recip(self) -> Self {
        SignedLog {
            ln_abs: -self.ln_abs,
            sign: self.sign,
        }
    }
}

impl std::ops::Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.is_zero() || rhs.is_zero() {
            return SignedLog::ZERO;
        }
        SignedLog {
            ln_abs: self.ln_abs + rhs.ln_abs,
            sign: self.sign * rhs.sign,
        }
    }
}

impl std::ops::Div for SignedLog {
    type Output = SignedLog;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: SignedLog) -> SignedLog {
        self * rhs.recip()
    }
}

/// `sin(pi * x)` with exact argument reduction.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r.abs() == 0.5 {
        return r.signum();
    }
    let (s, r) = if r > 0.5 {
        (1.0, 1.0 - r)
    } else if r < -0.5 {
        (1.0, -1.0 - r)
    } else {
        (1.0, r)
    };
    s * (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.trunc()
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "log_gamma",
            format!("argument {x} must be positive and finite"),
        ));
    }
    Ok(libm::lgamma_r(x).0)
}

/// `ln |Γ(x)|` and the sign of `Γ(x)`; `None` at the poles `x = 0, -1, -2, ...`.
pub fn ln_gamma_signed(x: f64) -> Option<SignedLog> {
    if is_nonpositive_integer(x) || x.is_nan() {
        return None;
    }
    let (v, s) = libm::lgamma_r(x);
    Some(SignedLog {
        ln_abs: v,
        sign: if s < 0 { -1.0 } else { 1.0 },
    })
}

/// `1/Γ(x)`; entire, exactly zero at the non-positive integers.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 0.0 && x < 170.0 {
        return 1.0 / libm::tgamma(x);
    }
    reciprocal_gamma_split(x.fract(), x.trunc() as i64).value()
}

/// `1/Γ(frac + shift)` as a signed logarithm.
///
/// Splitting the argument keeps `sin(pi z)` exact when `shift` is a large
/// negative integer (the `1/Γ(k + α − m + 1)` factors of the coupling matrix).
pub fn reciprocal_gamma_split(frac: f64, shift: i64) -> SignedLog {
    let z = frac + shift as f64;
    if frac == frac.trunc() {
        let zi = frac as i64 + shift;
        if zi <= 0 {
            return SignedLog::ZERO;
        }
        return SignedLog::positive(-libm::lgamma_r(zi as f64).0);
    }
    if z >= 0.5 {
        let (v, s) = libm::lgamma_r(z);
        return SignedLog {
            ln_abs: -v,
            sign: if s < 0 { -1.0 } else { 1.0 },
        };
    }
    // 1/Γ(z) = sin(pi z) Γ(1 - z) / pi
    let mut s = sin_pi(frac);
    if shift.rem_euclid(2) == 1 {
        s = -s;
    }
    let one_minus = (1.0 - frac) - shift as f64;
    SignedLog {
        ln_abs: libm::lgamma_r(one_minus).0 + s.abs().ln() - PI.ln(),
        sign: s.signum(),
    }
}

/// Euler Beta function `B(x, y)` for positive arguments.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::domain(
            "beta",
            format!("arguments ({x}, {y}) must be positive"),
        ));
    }
    Ok(ln_beta(x, y)?.exp())
}

/// `ln B(x, y)` for positive arguments.
pub fn ln_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::domain(
            "ln_beta",
            format!("arguments ({x}, {y}) must be positive"),
        ));
    }
    Ok(libm::lgamma_r(x).0 + libm::lgamma_r(y).0 - libm::lgamma_r(x + y).0)
}

/// Analytic continuation of `B(x, y) = Γ(x)Γ(y)/Γ(x+y)` as a signed log.
/// Fails only at the poles of `Γ(x)` or `Γ(y)`.
pub fn ln_beta_continued(x: f64, y: f64) -> Result<SignedLog> {
    let gx = ln_gamma_signed(x)
        .ok_or_else(|| Error::domain("beta", format!("pole of Gamma at x = {x}")))?;
    let gy = ln_gamma_signed(y)
        .ok_or_else(|| Error::domain("beta", format!("pole of Gamma at y = {y}")))?;
    let rs = match ln_gamma_signed(x + y) {
        Some(g) => g.recip(),
        None => SignedLog::ZERO,
    };
    Ok(gx * gy * rs)
}

fn stirling_tail(z: f64) -> f64 {
    let z2 = 1.0 / (z * z);
    (1.0 / 12.0
        + z2 * (-1.0 / 360.0
            + z2 * (1.0 / 1260.0
                + z2 * (-1.0 / 1680.0 + z2 * (1.0 / 1188.0 + z2 * (-691.0 / 360360.0))))))
        / z
}

/// `ln Γ(x+δ) − ln Γ(x)`; uses a Stirling difference for large arguments so the
/// two huge log-Gamma values never cancel.
pub fn ln_gamma_ratio(x: f64, delta: f64) -> Result<f64> {
    if !(x > 0.0) || !(x + delta > 0.0) {
        return Err(Error::domain(
            "gamma_ratio",
            format!("x = {x}, x + delta = {} must both be positive", x + delta),
        ));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let y = x + delta;
    if x >= 16.0 && y >= 16.0 {
        Ok(
            (x - 0.5) * (delta / x).ln_1p() + delta * y.ln() - delta + stirling_tail(y)
                - stirling_tail(x),
        )
    } else {
        Ok(libm::lgamma_r(y).0 - libm::lgamma_r(x).0)
    }
}

/// `Γ(x+δ)/Γ(x)`.
pub fn gamma_ratio(x: f64, delta: f64) -> Result<f64> {
    Ok(ln_gamma_ratio(x, delta)?.exp())
}

/// Logarithms of Li's two-sided bounds `x^(x−ξ) e^(1−x) < Γ(x) < x^(x−1/2) e^(1−x)`.
pub fn li_gamma_log_bounds(x: f64) -> Result<(f64, f64)> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::domain(
            "li_gamma_bounds",
            format!("x = {x} must exceed 1"),
        ));
    }
    let ln_x = (x - 1.0).ln_1p();
    let tail = 1.0 - x;
    Ok((
        (x - EULER_MASCHERONI) * ln_x + tail,
        (x - 0.5) * ln_x + tail,
    ))
}

/// Li's bounds on `Γ(x)` for `x > 1`, returned as `(lower, upper)`.
pub fn li_gamma_bounds(x: f64) -> Result<(f64, f64)> {
    let (lo, hi) = li_gamma_log_bounds(x)?;
    Ok((lo.exp(), hi.exp()))
}

/// The power law `x^δ` that `Γ(x+δ)/Γ(x)` approaches, together with the
/// smallest doubling point beyond which it holds to a given relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRatioAsymptote {
    pub exponent: f64,
    pub scale_window: f64,
}

impl GammaRatioAsymptote {
    /// Relative error `|Γ(x+δ)/(Γ(x) x^δ) − 1|` of the asymptote at `x`.
    pub fn relative_error(exponent: f64, x: f64) -> Result<f64> {
        Ok((ln_gamma_ratio(x, exponent)? - exponent * x.ln())
            .exp_m1()
            .abs())
    }

    /// Doubles `x` from 2 until the asymptote holds to `tol` at `x`, `2x` and `4x`.
    pub fn certify(exponent: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::contract(
                "GammaRatioAsymptote",
                "tolerance must be positive",
            ));
        }
        let mut x = 2.0_f64.max(1.0 - exponent + 1.0);
        while x < 1e300 {
            let ok = (0..3).try_fold(true, |acc, i| {
                Self::relative_error(exponent, x * f64::powi(2.0, i)).map(|e| acc && e < tol)
            })?;
            if ok {
                return Ok(GammaRatioAsymptote {
                    exponent,
                    scale_window: x,
                });
            }
            x *= 2.0;
        }
        Err(Error::domain(
            "GammaRatioAsymptote",
            format!("no window found for exponent {exponent} at tolerance {tol}"),
        ))
    }
}
