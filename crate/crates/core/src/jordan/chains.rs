//! Jordan chains for a single eigenvalue from nested null spaces.
//!
//! Works over `f64` for real eigenvalues and `Complex64` for the upper
//! member of a conjugate pair.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{Error, Result};

/// Orthonormal basis of the numerical null space of `a`, as columns.
/// Singular values at or below `rel · σ_max` count as zero.
pub fn null_space<T>(a: &DMatrix<T>, rel: f64) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64>,
{
    let n = a.ncols();
    let svd = a
        .clone()
        .try_svd(false, true, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Chain("singular value decomposition did not converge".into()))?;
    let v_t = svd.v_t.as_ref().expect("requested V");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let thr = rel * smax;
    // Columns of V beyond the computed singular values (wide input) are
    // always null; `a` is square here so this does not arise.
    let cols: Vec<DVector<T>> = (0..sigma.len())
        .filter(|&i| sigma[i] <= thr)
        .map(|i| v_t.row(i).adjoint())
        .collect();
    Ok(if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) })
}

/// Canonical basis of the column span: row-reduced echelon form of the
/// transposed basis, pivots scaled to one.
pub fn canonical_basis<T>(basis: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64>,
{
    let d = basis.ncols();
    if d == 0 {
        return basis.clone();
    }
    let mut r = basis.transpose();
    let n = r.ncols();
    let scale = r.iter().map(|v| v.clone().modulus()).fold(0.0, f64::max);
    let mut row = 0;
    for col in 0..n {
        if row == d {
            break;
        }
        let (best, mag) = (row..d)
            .map(|i| (i, r[(i, col)].clone().modulus()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= 1e-8 * scale {
            continue;
        }
        r.swap_rows(row, best);
        let pivot = r[(row, col)].clone();
        for j in 0..n {
            r[(row, j)] = r[(row, j)].clone() / pivot.clone();
        }
        r[(row, col)] = T::one();
        for i in 0..d {
            if i != row {
                let f = r[(i, col)].clone();
                if f != T::zero() {
                    for j in 0..n {
                        let v = r[(row, j)].clone() * f.clone();
                        r[(i, j)] -= v;
                    }
                    r[(i, col)] = T::zero();
                }
            }
        }
        row += 1;
    }
    r.transpose()
}

/// Incrementally orthonormalized span used for independence tests.
pub(crate) struct Span<T: ComplexField<RealField = f64>> {
    q: Vec<DVector<T>>,
}

impl<T: ComplexField<RealField = f64>> Span<T> {
    pub(crate) fn new() -> Self {
        Span { q: Vec::new() }
    }

    fn residual(&self, v: &DVector<T>) -> DVector<T> {
        let mut r = v.clone();
        // Two passes of classical Gram–Schmidt.
        for _ in 0..2 {
            for q in &self.q {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        r
    }

    /// Adds `v` if it is independent of the span; returns whether it was.
    pub(crate) fn push(&mut self, v: &DVector<T>, rel: f64) -> bool {
        let norm = v.norm();
        if norm == 0.0 {
            return false;
        }
        let r = self.residual(v);
        let rn = r.norm();
        if rn <= rel * norm {
            return false;
        }
        self.q.push(r.unscale(rn));
        true
    }
}

/// Chains `[h, Bh, …, B^{L−1}h]` for the eigenvalue `lambda` of algebraic
/// multiplicity `mult`, longest first. The last vector of each chain is an
/// eigenvector whose first significant component is one.
pub fn jordan_chains<T>(m: &DMatrix<T>, lambda: T, mult: usize, rank_tol: f64) -> Result<Vec<Vec<DVector<T>>>>
where
    T: ComplexField<RealField = f64>,
{
    let n = m.nrows();
    let b = m - DMatrix::<T>::identity(n, n) * lambda.clone();

    // K_j = null(B^j) until the dimension reaches the multiplicity.
    let mut kernels: Vec<DMatrix<T>> = vec![DMatrix::zeros(n, 0)];
    let mut power = DMatrix::<T>::identity(n, n);
    loop {
        power = &b * &power;
        let k = canonical_basis(&null_space(&power, rank_tol)?);
        let prev = kernels.last().unwrap().ncols();
        let dim = k.ncols();
        if dim > mult {
            return Err(Error::Chain(format!(
                "null space of (M − λI)^{} has dimension {dim}, more than the multiplicity {mult} of λ = {lambda}",
                kernels.len()
            )));
        }
        if dim <= prev {
            return Err(Error::Chain(format!(
                "generalized eigenspace of λ = {lambda} stalled at dimension {prev} of {mult}"
            )));
        }
        kernels.push(k);
        if dim == mult {
            break;
        }
    }
    let top = kernels.len() - 1;
    let dims: Vec<usize> = kernels.iter().map(|k| k.ncols()).collect();

    // chains[c] holds the vectors of chain c at levels top..1, head first.
    let mut chains: Vec<Vec<DVector<T>>> = Vec::new();
    for level in (1..=top).rev() {
        let longer = if level < top { dims[level + 1] - dims[level] } else { 0 };
        let wanted = (dims[level] - dims[level - 1]) - longer;

        let mut span = Span::new();
        for col in kernels[level - 1].column_iter() {
            span.push(&col.into_owned(), 1e-8);
        }
        for chain in &chains {
            // Vector of an existing chain at this level.
            let v = &b * chain.last().unwrap();
            span.push(&v, 1e-8);
        }
        for chain in chains.iter_mut() {
            let v = &b * chain.last().unwrap();
            chain.push(v);
        }

        let mut found = 0;
        for cand in kernels[level].column_iter() {
            if found == wanted {
                break;
            }
            let cand = cand.into_owned();
            if span.push(&cand, 1e-8) {
                chains.push(vec![cand]);
                found += 1;
            }
        }
        if found < wanted {
            return Err(Error::Chain(format!(
                "found {found} of {wanted} chain heads of length {level} for λ = {lambda}"
            )));
        }
    }

    for chain in chains.iter_mut() {
        let eig = chain.last().unwrap();
        let big = eig.iter().map(|v| v.clone().modulus()).fold(0.0, f64::max);
        let pivot = eig
            .iter()
            .find(|v| (*v).clone().modulus() > 1e-8 * big)
            .cloned()
            .ok_or_else(|| Error::Chain(format!("zero eigenvector for λ = {lambda}")))?;
        for v in chain.iter_mut() {
            *v = v.clone() / pivot.clone();
        }
    }
    Ok(chains)
}
