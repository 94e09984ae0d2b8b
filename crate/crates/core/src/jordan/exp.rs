//! `exp(Jt)` for a real Jordan form split as `D + A + N`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn commutator_norm(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    (x * y - y * x).norm()
}

/// Largest of `‖[D,A]‖`, `‖[D,N]‖`, `‖[A,N]‖` (Frobenius).
pub fn max_commutator(d: &DMatrix<f64>, a: &DMatrix<f64>, n: &DMatrix<f64>) -> f64 {
    commutator_norm(d, a).max(commutator_norm(d, n)).max(commutator_norm(a, n))
}

/// Index pairs `(p, q)`, `p < q`, coupled by `A`, with `b = A[q][p]`.
pub fn rotation_pairs(a: &DMatrix<f64>) -> Result<Vec<(usize, usize, f64)>> {
    let dim = a.nrows();
    let mut used = vec![false; dim];
    let mut pairs = Vec::new();
    for p in 0..dim {
        for q in p + 1..dim {
            let b = a[(q, p)];
            if b == 0.0 && a[(p, q)] == 0.0 {
                continue;
            }
            if a[(p, q)] != -b {
                return Err(Error::Structure(format!("A is not antisymmetric at ({p},{q})")));
            }
            if used[p] || used[q] {
                return Err(Error::Structure(format!(
                    "A couples index {} to more than one partner",
                    if used[p] { p } else { q }
                )));
            }
            used[p] = true;
            used[q] = true;
            pairs.push((p, q, b));
        }
    }
    Ok(pairs)
}

/// `exp(Dt) · exp(At) · exp(Nt)`.
///
/// `D` must be diagonal, `A` a direct sum of disjoint planar rotation
/// generators and `N` nilpotent. The three must commute within
/// `commute_tol · (‖D + A + N‖ + 1)`.
pub fn exp_jordan(d: &DMatrix<f64>, a: &DMatrix<f64>, n: &DMatrix<f64>, t: f64, commute_tol: f64) -> Result<DMatrix<f64>> {
    let dim = d.nrows();
    let j_norm = (d + a + n).norm();
    let comm = max_commutator(d, a, n);
    if comm > commute_tol * (j_norm + 1.0) {
        return Err(Error::Precondition(format!(
            "D, A and N do not commute (largest commutator {comm:e})"
        )));
    }

    let mut ed = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        ed[(i, i)] = (d[(i, i)] * t).exp();
    }

    let mut ea = DMatrix::identity(dim, dim);
    for (p, q, b) in rotation_pairs(a)? {
        let (s, c) = (b * t).sin_cos();
        ea[(p, p)] = c;
        ea[(q, q)] = c;
        ea[(p, q)] = -s;
        ea[(q, p)] = s;
    }

    let mut en = DMatrix::identity(dim, dim);
    let nt = n * t;
    let mut term = DMatrix::identity(dim, dim);
    for k in 1..=dim {
        term = &term * &nt / k as f64;
        if term.iter().all(|v| *v == 0.0) {
            break;
        }
        en += &term;
    }

    Ok(ed * ea * en)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_identity() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0]));
        let mut a = DMatrix::zeros(2, 2);
        a[(1, 0)] = 2.0;
        a[(0, 1)] = -2.0;
        let n = DMatrix::zeros(2, 2);
        assert_eq!(exp_jordan(&d, &a, &n, 0.0, 1e-10).unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn single_pair_is_scaled_rotation() {
        let (alpha, b, t) = (0.3, 1.7, 0.9);
        let d = DMatrix::identity(2, 2) * alpha;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -b, b, 0.0]);
        let n = DMatrix::zeros(2, 2);
        let e = exp_jordan(&d, &a, &n, t, 1e-10).unwrap();
        let g = (alpha * t).exp();
        let expected = DMatrix::from_row_slice(2, 2, &[
            g * (b * t).cos(),
            -g * (b * t).sin(),
            g * (b * t).sin(),
            g * (b * t).cos(),
        ]);
        assert!((e - expected).amax() < 1e-15);
    }

    #[test]
    fn matches_library_exponential_with_nilpotent_part() {
        // λ = 0.5 block of size 3 plus a pair −1 ± 2i with a 2-chain.
        let mut d = DMatrix::zeros(7, 7);
        let mut a = DMatrix::zeros(7, 7);
        let mut n = DMatrix::zeros(7, 7);
        for i in 0..3 {
            d[(i, i)] = 0.5;
        }
        n[(1, 0)] = 1.0;
        n[(2, 1)] = 1.0;
        for i in 3..7 {
            d[(i, i)] = -1.0;
        }
        // Re/Im layout: columns 3,4 are the cosine chain, 5,6 the sine chain.
        n[(4, 3)] = 1.0;
        n[(6, 5)] = 1.0;
        for k in 0..2 {
            a[(5 + k, 3 + k)] = 2.0;
            a[(3 + k, 5 + k)] = -2.0;
        }
        let t = 0.7;
        let ours = exp_jordan(&d, &a, &n, t, 1e-10).unwrap();
        let theirs = ((&d + &a + &n) * t).exp();
        assert!((ours - theirs).amax() < 1e-13);
    }

    #[test]
    fn non_commuting_parts_are_rejected() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let mut n = DMatrix::zeros(2, 2);
        n[(1, 0)] = 1.0;
        let a = DMatrix::zeros(2, 2);
        assert!(matches!(exp_jordan(&d, &a, &n, 1.0, 1e-10), Err(Error::Precondition(_))));
    }
}
