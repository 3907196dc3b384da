//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, SVD};

use crate::{Error, Result, C64, Mat};

/// Upper limit on dense matrix entries any single construction may allocate.
pub const MAX_DENSE_ENTRIES: u128 = 1_000_000;

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn from_real(m: &DMatrix<f64>) -> Mat {
    m.map(|x| C64::new(x, 0.0))
}

/// Fails fast when a `dim x dim` dense matrix would exceed the entry guard.
pub fn guard_dense(what: &str, dim: u128) -> Result<()> {
    let required = dim.saturating_mul(dim);
    if required > MAX_DENSE_ENTRIES {
        return Err(Error::Guard { what: what.to_string(), required, limit: MAX_DENSE_ENTRIES });
    }
    Ok(())
}

/// Kronecker product `a (x) b`, row index `i * b.nrows() + k`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, first factor outermost.
pub fn kron_all(factors: &[&Mat]) -> Mat {
    let mut out = Mat::identity(1, 1);
    for f in factors {
        out = out.kronecker(*f);
    }
    out
}

/// `e^{2 pi i num / den}` with exact values on quarter turns.
pub fn unit_root(num: u64, den: u64) -> C64 {
    debug_assert!(den > 0);
    let r = num % den;
    if r == 0 {
        return C64::new(1.0, 0.0);
    }
    if (4 * r) % den == 0 {
        return match 4 * r / den {
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * (r as f64) / (den as f64);
    let (s, c) = theta.sin_cos();
    C64::new(c, s)
}

pub fn is_hermitian(m: &Mat, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Largest singular value. Real inputs are handled in real arithmetic, and
/// inputs symmetric (Hermitian) up to `1e-14` relative are symmetrized and
/// go through the eigenvalue-only symmetric solver.
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let tol = 1e-14 * max_abs(m);
    let max_abs_of = |v: &[f64]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if m.iter().all(|z| z.im == 0.0) {
        let r = m.map(|z| z.re);
        if is_hermitian(m, tol) {
            return max_abs_of(((&r + r.transpose()) * 0.5).symmetric_eigenvalues().as_slice());
        }
        return max_abs_of(SVD::new(r, false, false).singular_values.as_slice());
    }
    if is_hermitian(m, tol) {
        return max_abs_of(((m + m.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigenvalues().as_slice());
    }
    max_abs_of(SVD::new(m.clone(), false, false).singular_values.as_slice())
}

pub fn min_singular_value(m: &Mat) -> f64 {
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values.iter().fold(f64::INFINITY, |acc, &v| acc.min(v))
}

/// Eigenvalues of a square complex matrix through a Schur decomposition.
pub fn eigenvalues(m: &Mat) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let scale = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000 * n).ok_or_else(|| {
        Error::Numerical(format!(
            "Schur iteration did not converge (dimension {n}, max entry {scale:.3e})"
        ))
    })?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Max absolute column sum (the `l^1 -> l^1` norm).
pub fn max_column_sum(m: &Mat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Max absolute row sum (the `l^inf -> l^inf` norm).
pub fn max_row_sum(m: &Mat) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn power(m: &Mat, n: usize) -> Mat {
    let mut out = identity(m.nrows());
    let mut base = m.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            out = &out * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    out
}

pub fn try_inverse(m: &Mat) -> Option<Mat> {
    m.clone().try_inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_roots_exact_on_quarters() {
        assert_eq!(unit_root(1, 4), C64::new(0.0, 1.0));
        assert_eq!(unit_root(2, 4), C64::new(-1.0, 0.0));
        assert_eq!(unit_root(6, 8), C64::new(0.0, -1.0));
        assert_eq!(unit_root(5, 5), C64::new(1.0, 0.0));
        let z = unit_root(1, 3);
        assert!((z.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn schur_eigenvalues_of_shift() {
        let mut s = Mat::zeros(4, 4);
        for i in 0..4 {
            s[((i + 1) % 4, i)] = C64::new(1.0, 0.0);
        }
        let mut ev = eigenvalues(&s).unwrap();
        let targets = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        for t in targets {
            let (k, d) = ev
                .iter()
                .enumerate()
                .map(|(k, z)| (k, (z - t).norm()))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            assert!(d < 1e-10, "eigenvalue {t} missing, closest distance {d}");
            ev.remove(k);
        }
    }

    #[test]
    fn schur_eigenvalues_of_complex_triangular_similarity() {
        // V diag(d) V^{-1} with complex d.
        let d = [C64::new(0.5, 0.2), C64::new(-0.3, 0.7), C64::new(0.1, -0.9)];
        let v = Mat::from_fn(3, 3, |i, j| C64::new(1.0 + (i * 3 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.3) + if i == j { C64::new(2.0, 0.0) } else { C64::new(0.0, 0.0) });
        let vinv = v.clone().try_inverse().unwrap();
        let m = &v * Mat::from_diagonal(&nalgebra::DVector::from_vec(d.to_vec())) * vinv;
        let ev = eigenvalues(&m).unwrap();
        for t in d {
            assert!(ev.iter().any(|z| (z - t).norm() < 1e-10));
        }
    }

    #[test]
    fn kron_shapes_and_norm() {
        let a = Mat::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 0.0));
        let k = kron(&a, &identity(3));
        assert_eq!(k.nrows(), 6);
        assert!((spectral_norm(&k) - spectral_norm(&a)).abs() < 1e-12);
    }

    #[test]
    fn guard_rejects_large() {
        assert!(guard_dense("x", 1000).is_ok());
        assert!(matches!(guard_dense("x", 1001), Err(Error::Guard { .. })));
    }
}
