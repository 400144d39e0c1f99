use super::JacobiBasis;
use crate::error::{Error, Result};

/// Gauss–Jacobi nodes and weights for `ω` on `(a, b)` (Golub–Welsch).
///
/// The Jacobi matrix is diagonalized by implicit QL; only the first component
/// of each eigenvector is tracked, which is all the weights need.
pub fn gauss_jacobi(basis: &JacobiBasis, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::contract(
            "gauss_jacobi",
            "node count must be at least 1",
        ));
    }
    let mut d: Vec<f64> = (0..n).map(|k| basis.recurrence(k).0).collect();
    let mut e: Vec<f64> = (0..n)
        .map(|k| {
            if k + 1 < n {
                basis.recurrence(k + 1).1
            } else {
                0.0
            }
        })
        .collect();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    implicit_ql(&mut d, &mut e, &mut z)?;

    let mass = basis.mass();
    let mut pairs: Vec<(f64, f64)> = d
        .into_iter()
        .zip(z)
        .map(|(x, v)| (x.clamp(basis.a(), basis.b()), mass * v * v))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

/// Symmetric tridiagonal eigenproblem. `d` holds the diagonal, `e[i]` couples
/// `i` and `i+1`; `z` is the first row of the eigenvector matrix.
fn implicit_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::domain(
                    "gauss_jacobi",
                    "QL iteration did not converge",
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
