//! Eigenvalues of a small real matrix: Householder reduction to upper
//! Hessenberg form followed by Francis double-shift QR.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Iterations allowed per eigenvalue before giving up.
pub const MAX_ITERATIONS: usize = 60;

/// Householder similarity to upper Hessenberg form. Entries below the
/// first subdiagonal are set to exactly zero.
pub fn hessenberg(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[(k + 1, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);

        // A ← (I − 2vvᵀ) A (I − 2vvᵀ), acting on rows/columns k+1..n.
        for j in 0..n {
            let s: f64 = v.iter().enumerate().map(|(p, vp)| vp * a[(k + 1 + p, j)]).sum();
            for (p, vp) in v.iter().enumerate() {
                a[(k + 1 + p, j)] -= 2.0 * vp * s;
            }
        }
        for i in 0..n {
            let s: f64 = v.iter().enumerate().map(|(p, vp)| vp * a[(i, k + 1 + p)]).sum();
            for (p, vp) in v.iter().enumerate() {
                a[(i, k + 1 + p)] -= 2.0 * vp * s;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
    a
}

/// All eigenvalues of `m`, in deflation order.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Shape(format!("expected a square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let n = m.nrows();
    let mut wr = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(wr);
    }
    let mut a = hessenberg(m);
    hqr(&mut a, &mut wr)?;
    Ok(wr)
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, destroying `a`.
fn hqr(a: &mut DMatrix<f64>, w: &mut [Complex64]) -> Result<()> {
    let n = a.nrows();
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    // `nn` is the index of the last row of the active block.
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut its = 0;
    while nn >= 0 {
        let nu = nn as usize;
        // Look for a negligible subdiagonal element to split the problem.
        let mut l = 0;
        for ll in (1..=nu).rev() {
            let mut s = a[(ll - 1, ll - 1)].abs() + a[(ll, ll)].abs();
            if s == 0.0 {
                s = anorm;
            }
            if a[(ll, ll - 1)].abs() <= eps * s {
                a[(ll, ll - 1)] = 0.0;
                l = ll;
                break;
            }
        }
        let mut x = a[(nu, nu)];
        if l == nu {
            w[nu] = Complex64::new(x + t, 0.0);
            nn -= 1;
            its = 0;
            continue;
        }
        let mut y = a[(nu - 1, nu - 1)];
        let mut ww = a[(nu, nu - 1)] * a[(nu - 1, nu)];
        if l == nu - 1 {
            let p = 0.5 * (y - x);
            let q = p * p + ww;
            let mut z = q.abs().sqrt();
            x += t;
            if q >= 0.0 {
                z = p + sign(z, p);
                w[nu - 1] = Complex64::new(x + z, 0.0);
                w[nu] = w[nu - 1];
                if z != 0.0 {
                    w[nu] = Complex64::new(x - ww / z, 0.0);
                }
            } else {
                w[nu] = Complex64::new(x + p, -z);
                w[nu - 1] = w[nu].conj();
            }
            nn -= 2;
            its = 0;
            continue;
        }

        if its >= MAX_ITERATIONS {
            return Err(Error::NoConvergence { index: nu, iterations: its });
        }
        if its > 0 && its % 10 == 0 {
            // Exceptional shift.
            t += x;
            for i in 0..=nu {
                a[(i, i)] -= x;
            }
            let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
            x = 0.75 * s;
            y = x;
            ww = -0.4375 * s * s;
        }
        its += 1;

        // Find two consecutive small subdiagonal elements.
        let (mut p, mut q, mut r);
        let mut m = nu - 2;
        loop {
            let z = a[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - ww) / a[(m + 1, m)] + a[(m, m + 1)];
            q = a[(m + 1, m + 1)] - z - rr - ss;
            r = a[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
            let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
            if u <= eps * v {
                break;
            }
            m -= 1;
        }
        for i in m..nu - 1 {
            a[(i + 2, i)] = 0.0;
            if i != m {
                a[(i + 2, i - 1)] = 0.0;
            }
        }

        // Double QR step on rows l..nn and columns m..nn.
        for k in m..nu {
            if k != m {
                p = a[(k, k - 1)];
                q = a[(k + 1, k - 1)];
                r = if k + 1 != nu { a[(k + 2, k - 1)] } else { 0.0 };
                x = p.abs() + q.abs() + r.abs();
                if x != 0.0 {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            let s = sign((p * p + q * q + r * r).sqrt(), p);
            if s == 0.0 {
                continue;
            }
            if k == m {
                if l != m {
                    a[(k, k - 1)] = -a[(k, k - 1)];
                }
            } else {
                a[(k, k - 1)] = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            let z = r / s;
            q /= p;
            r /= p;
            for j in k..=nu {
                let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                if k + 1 != nu {
                    pp += r * a[(k + 2, j)];
                    a[(k + 2, j)] -= pp * z;
                }
                a[(k + 1, j)] -= pp * y;
                a[(k, j)] -= pp * x;
            }
            let mmin = if nu < k + 3 { nu } else { k + 3 };
            for i in l..=mmin {
                let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                if k + 1 != nu {
                    pp += z * a[(i, k + 2)];
                    a[(i, k + 2)] -= pp * r;
                }
                a[(i, k + 1)] -= pp * q;
                a[(i, k)] -= pp;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn hessenberg_is_similar_and_banded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_matrix(&mut rng, 7);
        let h = hessenberg(&m);
        for i in 0..7usize {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(h[(i, j)], 0.0);
            }
        }
        assert!((h.trace() - m.trace()).abs() < 1e-12);
        assert!(((&h * &h).trace() - (&m * &m).trace()).abs() < 1e-11);
    }

    #[test]
    fn small_cases() {
        assert!(eigenvalues(&DMatrix::zeros(0, 0)).unwrap().is_empty());
        let e = eigenvalues(&DMatrix::from_element(1, 1, 3.5)).unwrap();
        assert_eq!(e, vec![Complex64::new(3.5, 0.0)]);
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = sorted(eigenvalues(&rot).unwrap());
        assert!((e[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((e[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let e = eigenvalues(&DMatrix::identity(8, 8)).unwrap();
        assert!(e.iter().all(|z| (z - 1.0).norm() < 1e-15));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(eigenvalues(&DMatrix::zeros(2, 3)), Err(Error::Shape(_))));
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(eigenvalues(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn agrees_with_library_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 4, 5, 8, 12, 16, 33] {
            let m = random_matrix(&mut rng, n);
            let ours = sorted(eigenvalues(&m).unwrap());
            let theirs = sorted(m.complex_eigenvalues().iter().cloned().collect());
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).norm() < 1e-9, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn companion_of_known_polynomial() {
        // (x−1)(x−2)(x−3)(x²+1)
        let c = [-6.0, 11.0, -12.0, 12.0, -6.0];
        let mut m = DMatrix::zeros(5, 5);
        for i in 0..4 {
            m[(i, i + 1)] = 1.0;
        }
        for j in 0..5 {
            m[(4, j)] = -c[j];
        }
        let e = sorted(eigenvalues(&m).unwrap());
        let expected = [
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ];
        for (a, b) in e.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }
}
