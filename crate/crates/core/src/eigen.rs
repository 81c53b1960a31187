//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit-shift QL iteration, with accumulated
//! transformations. This is the classical EISPACK tred2/tql2 pair, which is
//! deterministic and accurate for the dense sizes used here (n up to a few
//! thousand).

// index-style loops below follow the classical algorithm statement
#![allow(clippy::needless_range_loop, clippy::manual_memcpy)]

use crate::error::{Error, Result};
use crate::real::Real;

/// Eigenvalues in descending order; `vectors[k]` is a unit eigenvector for
/// `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<R> {
    pub values: Vec<R>,
    pub vectors: Vec<Vec<R>>,
}

/// Decompose a symmetric matrix given in row-major order.
pub fn symmetric_eigen<R: Real>(n: usize, a: &[R]) -> Result<SymmetricEigen<R>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: vec![],
        });
    }
    // v is accessed as v[row][col]; columns end up holding eigenvectors.
    let mut v: Vec<Vec<R>> = (0..n).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
    let mut d = vec![R::zero(); n];
    let mut e = vec![R::zero(); n];

    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;

    // Sort descending, carrying the eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).expect("finite eigenvalues"));
    let values: Vec<R> = order.iter().map(|&k| d[k]).collect();
    let vectors: Vec<Vec<R>> = order
        .iter()
        .map(|&k| (0..n).map(|row| v[row][k]).collect())
        .collect();
    Ok(SymmetricEigen { values, vectors })
}

/// Householder reduction of `v` to tridiagonal form, accumulating the
/// orthogonal transformation in `v`.
fn tred2<R: Real>(n: usize, v: &mut [Vec<R>], d: &mut [R], e: &mut [R]) {
    for j in 0..n {
        d[j] = v[n - 1][j];
    }

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = R::zero();
        let mut scale = R::zero();
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == R::zero() {
            e[i] = d[l];
            for j in 0..i {
                d[j] = v[l][j];
                v[i][j] = R::zero();
                v[j][i] = R::zero();
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let f = d[l];
            let mut g = h.sqrt();
            if f > R::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[l] = f - g;
            for j in 0..i {
                e[j] = R::zero();
            }
            for j in 0..i {
                let f = d[j];
                v[j][i] = f;
                let mut g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            let mut f = R::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    let delta = f * e[k] + g * d[k];
                    v[k][j] -= delta;
                }
                d[j] = v[i - 1][j];
                v[i][j] = R::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..(n - 1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = R::one();
        let h = d[i + 1];
        if h != R::zero() {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = R::zero();
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    let delta = g * d[k];
                    v[k][j] -= delta;
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = R::zero();
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = R::zero();
    }
    v[n - 1][n - 1] = R::one();
    e[0] = R::zero();
}

/// Implicit-shift QL iteration on the tridiagonal matrix (d, e),
/// accumulating rotations into `v`.
fn tql2<R: Real>(n: usize, v: &mut [Vec<R>], d: &mut [R], e: &mut [R]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = R::zero();

    let mut f = R::zero();
    let mut tst1 = R::zero();
    let eps = R::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::DegenerateEigenpair {
                        residual: f64::INFINITY,
                        tolerance: 0.0,
                    });
                }
                let g = d[l];
                let two = R::of(2.0);
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(R::one());
                if p < R::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in (l + 2)..n {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                let mut c = R::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = R::zero();
                let mut s2 = R::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let h = v[k][i + 1];
                        v[k][i + 1] = s * v[k][i] + c * h;
                        v[k][i] = c * v[k][i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = R::zero();
    }
    Ok(())
}
