//! The coupling matrix `A^{α,β,γ}_{mn}` between Jacobi coefficients of a
//! function and of its fractional image, plus the auxiliary sequences used to
//! bound its rows.
//!
//! With `(β', γ') = (β, γ)` for the left operator and `(γ, β)` for the right,
//!
//! ```text
//! (p_m, I^α_{a+} p_n)_ω = (−1)^n A^{α,β,γ}_{mn},   (p_m, I^α_{b−} p_n)_ω = (−1)^m A^{α,γ,β}_{mn},
//! A = (b−a)^α δ'_m δ'_n Σ_k (−1)^k C̃_n^k(β',γ') B(α+β'+k+1, γ'+m+1) / Γ(k+α−m+1).
//! ```
//!
//! The k-sum alternates and loses about `0.75 n` decimal digits, so it is
//! evaluated as a nested product of exact term ratios: in double-double when
//! the cancellation is mild, otherwise exactly over the integers.

use crate::ddouble::CompensatedSum;
use crate::error::{Error, Result};
use crate::exact::{self, Ratio};
use crate::fracops::FracOrder;
use crate::jacobi::{gauss_jacobi, ln_delta_prime, ln_factorial, sign_pow, JacobiBasis, Side};
use crate::specfun::{self, SignedLog};
use rayon::prelude::*;
use serde::Serialize;

/// Above this ratio of `Σ|terms|` to `|Σ terms|` the exact path is used.
const CANCELLATION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `A^{α,β,γ}`, used with `I_{a+}`.
    APlus,
    /// `A^{α,γ,β}`, used with `I_{b−}`.
    BMinus,
}

impl Orientation {
    pub fn for_side(side: Side) -> Self {
        match side {
            Side::Left => Orientation::APlus,
            Side::Right => Orientation::BMinus,
        }
    }

    /// `(β', γ')` in the orientation's parameter order.
    fn params(self, basis: &JacobiBasis) -> (f64, f64) {
        match self {
            Orientation::APlus => (basis.beta(), basis.gamma()),
            Orientation::BMinus => (basis.gamma(), basis.beta()),
        }
    }

    /// The sign `s_{mn}` with `(p_m, I^α p_n)_ω = s_{mn} A_{mn}`.
    pub fn sign(self, m: usize, n: usize) -> f64 {
        match self {
            Orientation::APlus => sign_pow(n),
            Orientation::BMinus => sign_pow(m),
        }
    }
}

fn lg(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `A_{mn}` for the orientation matching `order.side()`.
pub fn entry(order: &FracOrder, basis: &JacobiBasis, m: usize, n: usize) -> Result<f64> {
    let (bp, gp) = Orientation::for_side(order.side()).params(basis);
    let a = order.alpha();
    Ok(basis.length().powf(a) * coupling_sum(a, bp, gp, m, n)?)
}

/// The dimensionless sum, with `(β', γ')` already oriented.
fn coupling_sum(alpha: f64, bp: f64, gp: f64, m: usize, n: usize) -> Result<f64> {
    let (mf, nf) = (m as f64, n as f64);
    // first nonvanishing term: 1/Γ(k+1−m) = 0 for k < m when α = 0, and
    // 1/Γ(α+β'+γ'+m+2+k) = 0 at k = 0 when that argument is exactly zero
    let shift_c = alpha + bp + gp + mf + 2.0;
    let mut k0 = if alpha == 0.0 { m } else { 0 };
    if k0 == 0 && shift_c == 0.0 {
        k0 = 1;
    }
    if k0 > n {
        return Ok(0.0);
    }
    let kf = k0 as f64;
    if alpha + bp + 1.0 + kf <= 0.0 && (alpha + bp + 1.0 + kf).fract() == 0.0 {
        return Err(Error::domain(
            "coupling entry",
            format!(
                "Beta argument α+β'+k+1 = {} is a pole at k = {k0}",
                alpha + bp + 1.0 + kf
            ),
        ));
    }

    let prefactor = ln_delta_prime(bp, gp, m) + ln_delta_prime(bp, gp, n) + lg(bp + 1.0 + nf)
        - lg(bp + 1.0)
        + lg(gp + mf + 1.0);

    // T(k0) = (−n)_k (n+β'+γ'+1)_k / (β'+1)_k · Γ(α+β'+1+k) / Γ(α+β'+γ'+m+2+k) / Γ(k+α−m+1)
    let mut first = SignedLog {
        ln_abs: ln_factorial(n) - ln_factorial(n - k0),
        sign: sign_pow(k0),
    };
    if k0 > 0 {
        first.ln_abs += lg(nf + bp + gp + 1.0 + kf) - lg(nf + bp + gp + 1.0);
        first.ln_abs -= lg(bp + 1.0 + kf) - lg(bp + 1.0);
    }
    let g_num = specfun::ln_gamma_signed(alpha + bp + 1.0 + kf).expect("pole excluded above");
    let g_den = specfun::ln_gamma_signed(shift_c + kf)
        .expect("pole excluded by k0")
        .recip();
    let rg = specfun::reciprocal_gamma_split(alpha, k0 as i64 - m as i64 + 1);
    let first = first * g_num * g_den * rg * SignedLog::positive(prefactor);
    if first.is_zero() {
        return Ok(0.0);
    }

    let ratios: Vec<Ratio> = (k0..n)
        .map(|j| {
            let jf = j as f64;
            (
                [
                    [jf - nf, 0.0, 0.0, 0.0],
                    [nf + 1.0 + jf, bp, gp, 0.0],
                    [1.0 + jf, alpha, bp, 0.0],
                ],
                [
                    [1.0 + jf, bp, 0.0, 0.0],
                    [mf + 2.0 + jf, alpha, bp, gp],
                    [jf - mf + 1.0, alpha, 0.0, 0.0],
                ],
            )
        })
        .collect();
    let (h, scale) = exact::nested_sum_dd(&ratios);
    let h = if h == 0.0 || scale > CANCELLATION_LIMIT * h.abs() {
        exact::nested_sum_exact(&ratios)
    } else {
        h
    };
    Ok(first.value() * h)
}

/// Independent evaluation of `A_{mn}` as the weighted inner product of `p_m`
/// with the image `I^α p_n`, by Gauss–Jacobi quadrature.
///
/// The image is built without the power-term form (which cancels badly past
/// degree ~15): `p_n` is expanded in Legendre polynomials of `t ∈ (−1, 1)` and
/// each is mapped by `I^α_{1−} P_j = Γ(j+1)/Γ(j+1+α) (1−t)^α P_j^{(α,−α)}`
/// (mirrored for `a+`). The endpoint factor joins the quadrature weight. When
/// that makes the pairing divergent (`α+β' ≤ −1`), the Hadamard finite part is
/// taken, which is what the closed form continues to.
pub fn oracle_entry(order: &FracOrder, basis: &JacobiBasis, m: usize, n: usize) -> Result<f64> {
    let side = order.side();
    let alpha = order.alpha();
    let (near, far) = match side {
        Side::Left => (basis.beta(), basis.gamma()),
        Side::Right => (basis.gamma(), basis.beta()),
    };
    let image = ImagePolynomial::new(basis, n, order)?;
    let h = |x: f64| basis.values_upto(m, x)[m] * image.eval(x);
    let nodes = (m + n) / 2 + 2;
    let s = near + alpha;
    let integral = if s > -1.0 {
        let (xs, ws) = gauss_jacobi(&weight_with_near(basis, side, s, far)?, nodes)?;
        xs.iter()
            .zip(&ws)
            .map(|(&x, &w)| w * h(x))
            .collect::<CompensatedSum>()
            .value()
    } else {
        // FP∫ h d^s d_far^far = ∫ (h − h(anchor))/d · d^{s+1} d_far^far + h(anchor) (b−a)^{s+far+1} B(s+1, far+1)
        let anchor = match side {
            Side::Left => basis.a(),
            Side::Right => basis.b(),
        };
        let h0 = h(anchor);
        let (xs, ws) = gauss_jacobi(&weight_with_near(basis, side, s + 1.0, far)?, nodes + 1)?;
        let regular = xs
            .iter()
            .zip(&ws)
            .map(|(&x, &w)| w * (h(x) - h0) / (x - anchor).abs())
            .collect::<CompensatedSum>()
            .value();
        let beta = specfun::ln_beta_continued(s + 1.0, far + 1.0)?;
        regular + h0 * beta.value() * basis.length().powf(s + far + 1.0)
    };
    Ok(integral * Orientation::for_side(side).sign(m, n))
}

/// `(I^α p_n)(x) / d(x)^α` with `d` the distance to the operator's endpoint.
struct ImagePolynomial {
    a: f64,
    b: f64,
    alpha: f64,
    side: Side,
    coeffs: Vec<f64>,
}

impl ImagePolynomial {
    fn new(basis: &JacobiBasis, n: usize, order: &FracOrder) -> Result<Self> {
        let (a, b) = (basis.a(), basis.b());
        let legendre = JacobiBasis::new(-1.0, 1.0, 0.0, 0.0)?;
        let (ts, ws) = gauss_jacobi(&legendre, n + 1)?;
        let mut coeffs = vec![0.0; n + 1];
        for (&t, &w) in ts.iter().zip(&ws) {
            let x = 0.5 * (a + b) + 0.5 * (b - a) * t;
            let pn = basis.values_upto(n, x)[n];
            for (c, pj) in coeffs.iter_mut().zip(jacobi_p(n, 0.0, 0.0, t)) {
                *c += w * pn * pj;
            }
        }
        let alpha = order.alpha();
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= (j as f64 + 0.5) / specfun::gamma_ratio(j as f64 + 1.0, alpha)?;
        }
        Ok(ImagePolynomial {
            a,
            b,
            alpha,
            side: order.side(),
            coeffs,
        })
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (pa, pb) = match self.side {
            Side::Right => (self.alpha, -self.alpha),
            Side::Left => (-self.alpha, self.alpha),
        };
        jacobi_p(self.coeffs.len() - 1, pa, pb, t)
            .iter()
            .zip(&self.coeffs)
            .map(|(p, c)| p * c)
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Classical Jacobi polynomials `P_0^{(a,b)}(t), ..., P_n^{(a,b)}(t)`.
fn jacobi_p(n: usize, a: f64, b: f64, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n == 0 {
        return p;
    }
    p.push(0.5 * (a - b) + 0.5 * (a + b + 2.0) * t);
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        p.push((c2 * p[k - 1] - c3 * p[k - 2]) / c1);
    }
    p
}

fn weight_with_near(basis: &JacobiBasis, side: Side, near: f64, far: f64) -> Result<JacobiBasis> {
    match side {
        Side::Left => JacobiBasis::new(basis.a(), basis.b(), near, far),
        Side::Right => JacobiBasis::new(basis.a(), basis.b(), far, near),
    }
}

/// Dense `rows × cols` block of `A_{mn}`, `m < rows`, `n < cols`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingMatrix {
    order: FracOrder,
    basis: JacobiBasis,
    rows: usize,
    cols: usize,
    orientation: Orientation,
    values: Vec<f64>,
}

impl CouplingMatrix {
    pub fn order(&self) -> &FracOrder {
        &self.order
    }
    pub fn basis(&self) -> &JacobiBasis {
        &self.basis
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[m * self.cols + n]
    }
    pub fn row(&self, m: usize) -> &[f64] {
        &self.values[m * self.cols..(m + 1) * self.cols]
    }
    /// Row-major values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Overwrites one cell; used to exercise failure paths.
    pub fn set(&mut self, m: usize, n: usize, v: f64) {
        self.values[m * self.cols + n] = v;
    }

    /// `Σ_{n ≤ k} f_n A_{mn}` for every row, compensated. `k` is clamped to the
    /// available columns and coefficients.
    pub fn row_sums_upto(&self, f: &[f64], k: usize) -> Vec<f64> {
        let upto = (k + 1).min(self.cols).min(f.len());
        (0..self.rows)
            .map(|m| {
                self.row(m)[..upto]
                    .iter()
                    .zip(f)
                    .map(|(a, c)| a * c)
                    .collect::<CompensatedSum>()
                    .value()
            })
            .collect()
    }

    pub fn row_sums(&self, f: &[f64]) -> Vec<f64> {
        self.row_sums_upto(f, usize::MAX - 1)
    }
}

/// Assembles the matrix; rows are computed in parallel and each cell is
/// independent of scheduling.
pub fn assemble(
    order: &FracOrder,
    basis: &JacobiBasis,
    rows: usize,
    cols: usize,
) -> Result<CouplingMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::contract(
            "assemble",
            format!("matrix shape {rows}x{cols} must be nonempty"),
        ));
    }
    let row_values: Vec<Vec<f64>> = (0..rows)
        .into_par_iter()
        .map(|m| (0..cols).map(|n| entry(order, basis, m, n)).collect())
        .collect::<Result<_>>()?;
    let values: Vec<f64> = row_values.into_iter().flatten().collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(
            "assemble",
            format!("entry ({}, {}) is not finite", i / cols, i % cols),
        ));
    }
    Ok(CouplingMatrix {
        order: *order,
        basis: *basis,
        rows,
        cols,
        orientation: Orientation::for_side(order.side()),
        values,
    })
}

/// A value that may exceed the `f64` range, kept with its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogValue {
    pub value: f64,
    pub ln: f64,
}

impl LogValue {
    fn from_ln(ln: f64) -> Self {
        LogValue {
            value: ln.exp(),
            ln,
        }
    }
}

/// `I_mk = δ'_m Γ(β+m+1) Π_{i=1}^{m−k}(m−k−α−i) / Γ(α+β+k+γ+m+2)`.
pub fn lemma1_i_mk(basis: &JacobiBasis, order: &FracOrder, m: usize, k: usize) -> Result<f64> {
    if k >= m {
        return Err(Error::contract(
            "lemma1_I_mk",
            format!("k = {k} must be below m = {m}"),
        ));
    }
    let a = order.alpha();
    if a > 0.0 {
        return Err(Error::domain(
            "lemma1_I_mk",
            format!("order {a} must lie in (−1, 0]"),
        ));
    }
    if a == 0.0 {
        // the factor i = m−k vanishes
        return Ok(0.0);
    }
    let (be, ga) = (basis.beta(), basis.gamma());
    let (mf, kf) = (m as f64, k as f64);
    // Π_{l=0}^{m−k−1} (l − α) = Γ(m−k−α)/Γ(−α)
    let ln = ln_delta_prime(be, ga, m) + lg(be + mf + 1.0) + lg(mf - kf - a)
        - lg(-a)
        - lg(a + be + kf + ga + mf + 2.0);
    Ok(ln.exp())
}

/// `d_k(η) = η^k Σ_{i=0}^k 2^i / (i! (k−i)! Γ(γ+i+1))`.
pub fn lemma2_d_k(k: usize, eta: u32, gamma: f64) -> Result<LogValue> {
    if eta == 0 || !(gamma > -1.0) {
        return Err(Error::domain(
            "lemma2_d_k",
            format!("need η ≥ 1 and γ > −1, got η = {eta}, γ = {gamma}"),
        ));
    }
    let lns: Vec<f64> = (0..=k)
        .map(|i| {
            i as f64 * std::f64::consts::LN_2
                - ln_factorial(i)
                - ln_factorial(k - i)
                - lg(gamma + i as f64 + 1.0)
        })
        .collect();
    let top = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = lns.iter().map(|l| (l - top).exp()).sum();
    Ok(LogValue::from_ln(
        k as f64 * (eta as f64).ln() + top + sum.ln(),
    ))
}

/// `c_n = δ'_n n! Γ(n+β+1) Γ(n+γ+1) / 4^n`.
pub fn lemma3_c_n(basis: &JacobiBasis, n: usize) -> LogValue {
    let nf = n as f64;
    LogValue::from_ln(
        ln_delta_prime(basis.beta(), basis.gamma(), n)
            + ln_factorial(n)
            + lg(nf + basis.beta() + 1.0)
            + lg(nf + basis.gamma() + 1.0)
            - nf * 4f64.ln(),
    )
}

/// Least-squares power law `value ≈ C m^(−exponent)` over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayDiagnostic {
    pub exponent_fit: f64,
    pub constant_fit: f64,
    pub fit_window: (usize, usize),
    pub residual: f64,
}

/// Fits `ln value = ln C − exponent · ln m` to `(m, value)` pairs.
pub fn decay_fit(points: &[(usize, f64)]) -> Result<DecayDiagnostic> {
    if points.len() < 8 {
        return Err(Error::Input(format!(
            "decay fit needs at least 8 points, got {}",
            points.len()
        )));
    }
    if let Some((m, v)) = points
        .iter()
        .find(|(m, v)| !(*v > 0.0) || *m == 0 || !v.is_finite())
    {
        return Err(Error::Input(format!(
            "decay fit needs positive finite magnitudes at positive indices, got {v} at m = {m}"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|(m, _)| (*m as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    let lo = points.iter().map(|p| p.0).min().unwrap_or(0);
    let hi = points.iter().map(|p| p.0).max().unwrap_or(0);
    Ok(DecayDiagnostic {
        exponent_fit: -slope,
        constant_fit: intercept.exp(),
        fit_window: (lo, hi),
        residual,
    })
}

/// The default fit window `[⌈len/2⌉, len−1]` of a sequence indexed from 0.
pub fn upper_half(len: usize) -> std::ops::RangeInclusive<usize> {
    len.div_ceil(2)..=len.saturating_sub(1)
}
