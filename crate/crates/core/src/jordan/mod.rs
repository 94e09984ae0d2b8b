//! Real Jordan form `M = T J T⁻¹` of a small real matrix, with `J` split
//! into commuting diagonal, antisymmetric and nilpotent parts.
//!
//! Blocks are laid out as real eigenvalues first (descending), then every
//! upper-half-plane chain `Z`, then the conjugate chains `Z̄` in the same
//! order. Chains follow the lower convention: ones sit below the diagonal.

pub mod chains;
pub mod exp;
pub mod schur;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub use exp::exp_jordan;

/// Largest matrix dimension accepted.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealEigenvalue {
    pub value: f64,
    pub mult: usize,
}

/// The conjugate pair `re ± i·im`, `im > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
}

/// Eigenvalues with algebraic multiplicities. Reals are sorted descending;
/// pairs by descending real part, then descending imaginary part.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Spectrum {
    pub real: Vec<RealEigenvalue>,
    pub complex: Vec<ComplexPair>,
}

impl Spectrum {
    pub fn dimension(&self) -> usize {
        self.real.iter().map(|e| e.mult).sum::<usize>()
            + 2 * self.complex.iter().map(|p| p.mult).sum::<usize>()
    }

    /// Every eigenvalue repeated by multiplicity, conjugates included, in
    /// block order.
    pub fn values(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for e in &self.real {
            out.extend(std::iter::repeat_n(Complex64::new(e.value, 0.0), e.mult));
        }
        for p in &self.complex {
            out.extend(std::iter::repeat_n(Complex64::new(p.re, p.im), p.mult));
        }
        for p in &self.complex {
            out.extend(std::iter::repeat_n(Complex64::new(p.re, -p.im), p.mult));
        }
        out
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(Error::Shape(format!("expected a non-empty square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    if m.nrows() > MAX_DIM {
        return Err(Error::Shape(format!("dimension {} exceeds the supported maximum {MAX_DIM}", m.nrows())));
    }
    Ok(())
}

/// Clustering radius `τ_cluster · max(1, ‖M‖_F)`.
pub fn cluster_radius(m: &DMatrix<f64>, tol: &Tolerances) -> f64 {
    tol.cluster * m.norm().max(1.0)
}

/// Groups raw eigenvalues into clusters (single linkage within `radius`)
/// and returns `(mean, size)` for each.
fn cluster(eigs: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += eigs[i];
                g.2 += 1;
            }
            None => groups.push((root, eigs[i], 1)),
        }
    }
    groups.into_iter().map(|(_, sum, k)| (sum / k as f64, k)).collect()
}

/// Eigenvalues of `m` with multiplicities.
pub fn spectrum(m: &DMatrix<f64>, tol: &Tolerances) -> Result<Spectrum> {
    check_square(m)?;
    let eigs = schur::eigenvalues(m)?;
    let radius = cluster_radius(m, tol);
    let clusters = cluster(&eigs, radius);

    let mut spec = Spectrum::default();
    let mut lower: Vec<(Complex64, usize)> = Vec::new();
    for (z, k) in clusters {
        if z.im.abs() <= radius {
            spec.real.push(RealEigenvalue { value: z.re, mult: k });
        } else if z.im > 0.0 {
            spec.complex.push(ComplexPair { re: z.re, im: z.im, mult: k });
        } else {
            lower.push((z, k));
        }
    }
    if lower.len() != spec.complex.len() {
        return Err(Error::Structure(format!(
            "{} eigenvalue clusters above the real axis but {} below",
            spec.complex.len(),
            lower.len()
        )));
    }
    for p in spec.complex.iter_mut() {
        let z = Complex64::new(p.re, p.im);
        let (idx, _) = lower
            .iter()
            .enumerate()
            .map(|(i, (w, _))| (i, (w.conj() - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let (w, k) = lower.swap_remove(idx);
        if k != p.mult {
            return Err(Error::Structure(format!(
                "eigenvalue {z} has multiplicity {} but its conjugate {w} has {k}",
                p.mult
            )));
        }
        p.re = 0.5 * (z.re + w.re);
        p.im = 0.5 * (z.im - w.im);
    }
    spec.real.sort_by(|a, b| b.value.total_cmp(&a.value));
    spec.complex.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(spec)
}

/// Eigenvalue a chain belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainEigenvalue {
    Real { value: f64 },
    Pair { re: f64, im: f64 },
}

/// Position of one Jordan chain in the block layout.
///
/// For a real eigenvalue the chain occupies columns `start..start+len` of
/// `S`, `T` and `J`. For a pair, `start` indexes the `Z` chain and
/// `partner` the conjugate chain in `S`; in `T` the same two ranges hold
/// the cosine (`√2·Re`) and sine (`−√2·Im`) columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chain {
    pub eigenvalue: ChainEigenvalue,
    pub len: usize,
    pub start: usize,
    pub partner: Option<usize>,
}

/// Complex Jordan data: `M·S = S·J_C`.
#[derive(Debug, Clone)]
pub struct ComplexJordan {
    pub j: DMatrix<Complex64>,
    pub s: DMatrix<Complex64>,
    pub chains: Vec<Chain>,
}

/// Jordan chains for every eigenvalue, laid out as `R ⊕ Z ⊕ Z̄`.
pub fn jordan_complex(m: &DMatrix<f64>, spec: &Spectrum, tol: &Tolerances) -> Result<ComplexJordan> {
    check_square(m)?;
    let dim = m.nrows();
    if spec.dimension() != dim {
        return Err(Error::Precondition(format!(
            "spectrum accounts for {} eigenvalues, matrix has dimension {dim}",
            spec.dimension()
        )));
    }
    let mc = m.map(|v| Complex64::new(v, 0.0));
    let mut cols: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(dim);
    let mut chains = Vec::new();

    for e in &spec.real {
        for c in chains::jordan_chains(m, e.value, e.mult, tol.rank)? {
            chains.push(Chain {
                eigenvalue: ChainEigenvalue::Real { value: e.value },
                len: c.len(),
                start: cols.len(),
                partner: None,
            });
            cols.extend(c.into_iter().map(|v| v.map(|x| Complex64::new(x, 0.0))));
        }
    }
    let real_dim = cols.len();
    let mut upper: Vec<Vec<nalgebra::DVector<Complex64>>> = Vec::new();
    let mut pair_chains = Vec::new();
    for p in &spec.complex {
        let z = Complex64::new(p.re, p.im);
        for c in chains::jordan_chains(&mc, z, p.mult, tol.rank)? {
            pair_chains.push((ChainEigenvalue::Pair { re: p.re, im: p.im }, c.len()));
            upper.push(c);
        }
    }
    let pair_dim: usize = upper.iter().map(Vec::len).sum();
    let mut offset = real_dim;
    for (eig, len) in pair_chains {
        chains.push(Chain { eigenvalue: eig, len, start: offset, partner: Some(offset + pair_dim) });
        offset += len;
    }
    for c in &upper {
        cols.extend(c.iter().cloned());
    }
    for c in &upper {
        cols.extend(c.iter().map(|v| v.map(|x| x.conj())));
    }
    debug_assert_eq!(cols.len(), dim);

    let s = DMatrix::from_columns(&cols);
    let mut j = DMatrix::<Complex64>::zeros(dim, dim);
    for ch in &chains {
        let (lam, conj_lam) = match ch.eigenvalue {
            ChainEigenvalue::Real { value } => (Complex64::new(value, 0.0), None),
            ChainEigenvalue::Pair { re, im } => (Complex64::new(re, im), Some(Complex64::new(re, -im))),
        };
        let mut place = |start: usize, l: Complex64| {
            for i in 0..ch.len {
                j[(start + i, start + i)] = l;
                if i + 1 < ch.len {
                    j[(start + i + 1, start + i)] = Complex64::new(1.0, 0.0);
                }
            }
        };
        place(ch.start, lam);
        if let (Some(p), Some(cl)) = (ch.partner, conj_lam) {
            place(p, cl);
        }
    }
    Ok(ComplexJordan { j, s, chains })
}

/// Number of columns in the real part `R` of the layout.
fn real_block_dim(chains: &[Chain]) -> usize {
    chains.iter().filter(|c| c.partner.is_none()).map(|c| c.len).sum()
}

/// `W = I_{2m} ⊕ (1/√2)[[I, iI], [I, −iI]]`.
pub fn realification_matrix(dim: usize, real_dim: usize) -> DMatrix<Complex64> {
    let nz = (dim - real_dim) / 2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..real_dim {
        w[(i, i)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..nz {
        let (r0, r1) = (real_dim + i, real_dim + nz + i);
        w[(r0, r0)] = Complex64::new(h, 0.0);
        w[(r0, r1)] = Complex64::new(0.0, h);
        w[(r1, r0)] = Complex64::new(h, 0.0);
        w[(r1, r1)] = Complex64::new(0.0, -h);
    }
    w
}

/// `J_real = R ⊕ [[Re Z, −Im Z], [Im Z, Re Z]]`, built from the chain layout.
fn structured_real_form(dim: usize, chains: &[Chain]) -> DMatrix<f64> {
    let real_dim = real_block_dim(chains);
    let nz = (dim - real_dim) / 2;
    let mut j = DMatrix::zeros(dim, dim);
    for ch in chains {
        let (re, im) = match ch.eigenvalue {
            ChainEigenvalue::Real { value } => (value, 0.0),
            ChainEigenvalue::Pair { re, im } => (re, im),
        };
        let copies: &[usize] = if ch.partner.is_some() { &[0, 1] } else { &[0] };
        for &copy in copies {
            let s = ch.start + copy * nz;
            for i in 0..ch.len {
                j[(s + i, s + i)] = re;
                if i + 1 < ch.len {
                    j[(s + i + 1, s + i)] = 1.0;
                }
            }
        }
        if ch.partner.is_some() {
            for i in 0..ch.len {
                let (c, sn) = (ch.start + i, ch.start + nz + i);
                j[(sn, c)] = im;
                j[(c, sn)] = -im;
            }
        }
    }
    j
}

fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `T = S·W` (real up to rounding) and `J_real = W⁻¹·J_C·W`.
pub fn realify(cj: &ComplexJordan, tol: &Tolerances) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let dim = cj.s.nrows();
    let real_dim = real_block_dim(&cj.chains);
    let w = realification_matrix(dim, real_dim);
    let t = &cj.s * &w;
    let t_norm = t.norm();
    let imag = t.map(|z| z.im).norm();
    if imag > tol.realify * t_norm.max(1.0) {
        return Err(Error::Pairing { residual: imag / t_norm.max(1.0) });
    }
    let w_inv = w.adjoint();
    let numeric = &w_inv * &cj.j * &w;
    let j_real = structured_real_form(dim, &cj.chains);
    let mismatch = max_modulus(&(numeric - j_real.map(|v| Complex64::new(v, 0.0))));
    if mismatch > tol.unit * (1.0 + max_modulus(&cj.j)) {
        return Err(Error::Internal(format!("realified Jordan form deviates from block structure by {mismatch:e}")));
    }
    Ok((t.map(|z| z.re), j_real))
}

/// Splits `J_real` into diagonal `D`, antisymmetric `A` and nilpotent `N`.
pub fn split_dan(j: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let dim = j.nrows();
    let mut d = DMatrix::zeros(dim, dim);
    let mut a = DMatrix::zeros(dim, dim);
    let mut n = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let e = j[(r, c)];
            if r == c {
                d[(r, c)] = e;
            } else if e == 0.0 {
                continue;
            } else if j[(c, r)] == -e {
                a[(r, c)] = e;
            } else if r == c + 1 && e == 1.0 && j[(c, r)] == 0.0 {
                n[(r, c)] = 1.0;
            } else {
                return Err(Error::Structure(format!(
                    "entry {e} at ({r},{c}) fits none of the diagonal, rotation or nilpotent patterns"
                )));
            }
        }
    }
    Ok((d, a, n))
}

/// Everything produced by the Jordan decomposition of one matrix.
#[derive(Debug, Clone)]
pub struct JordanData {
    pub spectrum: Spectrum,
    pub chains: Vec<Chain>,
    pub j_complex: DMatrix<Complex64>,
    pub s_complex: DMatrix<Complex64>,
    pub w: DMatrix<Complex64>,
    pub t: DMatrix<f64>,
    pub t_inv: DMatrix<f64>,
    pub j_real: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub n: DMatrix<f64>,
}

impl JordanData {
    /// `‖M − T·J·T⁻¹‖_F / ‖M‖_F`.
    pub fn reconstruction_error(&self, m: &DMatrix<f64>) -> f64 {
        (m - &self.t * &self.j_real * &self.t_inv).norm() / m.norm().max(f64::MIN_POSITIVE)
    }

    pub fn max_commutator(&self) -> f64 {
        exp::max_commutator(&self.d, &self.a, &self.n)
    }

    /// `exp(Mt) = T·exp(Jt)·T⁻¹`.
    pub fn exp(&self, t: f64, tol: &Tolerances) -> Result<DMatrix<f64>> {
        Ok(&self.t * exp_jordan(&self.d, &self.a, &self.n, t, tol.commute)? * &self.t_inv)
    }
}

/// Full pipeline: spectrum, chains, realification, split.
pub fn decompose(m: &DMatrix<f64>, tol: &Tolerances) -> Result<JordanData> {
    let spectrum = spectrum(m, tol)?;
    let cj = jordan_complex(m, &spectrum, tol)?;
    let (t, j_real) = realify(&cj, tol)?;
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Chain("generalized eigenvectors are linearly dependent".into()))?;
    let (d, a, n) = split_dan(&j_real)?;
    let w = realification_matrix(m.nrows(), real_block_dim(&cj.chains));
    let data = JordanData {
        spectrum,
        chains: cj.chains,
        j_complex: cj.j,
        s_complex: cj.s,
        w,
        t,
        t_inv,
        j_real,
        d,
        a,
        n,
    };
    let err = data.reconstruction_error(m);
    if !(err <= 1e-6) {
        return Err(Error::Chain(format!(
            "T·J·T⁻¹ reproduces M only to relative error {err:e}"
        )));
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_spectrum() {
        let s = spectrum(&DMatrix::identity(8, 8), &tol()).unwrap();
        assert_eq!(s.real, vec![RealEigenvalue { value: 1.0, mult: 8 }]);
        assert!(s.complex.is_empty());
    }

    #[test]
    fn rotation_realifies_to_generator() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let jd = decompose(&m, &tol()).unwrap();
        assert_eq!(jd.spectrum.complex, vec![ComplexPair { re: 0.0, im: 1.0, mult: 1 }]);
        assert_eq!(jd.j_real, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert!(jd.reconstruction_error(&m) < 1e-14);
    }

    #[test]
    fn diagonal_j_splits_trivially() {
        let j = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 0.5]));
        let (d, a, n) = split_dan(&j).unwrap();
        assert_eq!(d, j);
        assert!(a.iter().all(|v| *v == 0.0));
        assert!(n.iter().all(|v| *v == 0.0));
        let mut bad = j.clone();
        bad[(0, 2)] = 0.3;
        assert!(matches!(split_dan(&bad), Err(Error::Structure(_))));
    }

    #[test]
    fn ordering_is_descending() {
        let m = DMatrix::from_row_slice(6, 6, &[
            -2.0, 0.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 3.0, 0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, -1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, 1.0, -2.0, //
            0.0, 0.0, 0.0, 0.0, 2.0, 1.0,
        ]);
        let s = spectrum(&m, &tol()).unwrap();
        let reals: Vec<f64> = s.real.iter().map(|e| e.value).collect();
        assert_eq!(reals.len(), 2);
        assert!((reals[0] - 3.0).abs() < 1e-14 && (reals[1] + 2.0).abs() < 1e-14);
        assert!((s.complex[0].im - 2.0).abs() < 1e-14);
        assert!((s.complex[1].im - 1.0).abs() < 1e-14);
    }

    #[test]
    fn defective_pair_reconstructs() {
        // Real form of a 2-chain for 0.5 ± 1.5i, hidden by a random similarity.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut j = DMatrix::zeros(4, 4);
        for i in 0..4 {
            j[(i, i)] = 0.5;
        }
        j[(1, 0)] = 1.0;
        j[(3, 2)] = 1.0;
        for i in 0..2 {
            j[(2 + i, i)] = 1.5;
            j[(i, 2 + i)] = -1.5;
        }
        let s = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(4, 4) * 2.0;
        let m = &s * j * s.clone().try_inverse().unwrap();
        // QR splits a defective pair by about √ε·cond(S), past the default radius.
        assert_eq!(spectrum(&m, &tol()).unwrap().complex.len(), 2);
        let mut loose = tol();
        loose.cluster = 1e-6;
        let jd = decompose(&m, &loose).unwrap();
        assert_eq!(jd.spectrum.complex.len(), 1);
        assert_eq!(jd.spectrum.complex[0].mult, 2);
        assert_eq!(jd.chains.len(), 1);
        assert_eq!(jd.chains[0].len, 2);
        assert!(jd.reconstruction_error(&m) < 1e-9, "{}", jd.reconstruction_error(&m));
        assert!(jd.n.iter().any(|v| *v != 0.0));
        assert!((&jd.n * &jd.n).iter().all(|v| *v == 0.0));
        assert!(jd.max_commutator() <= 1e-10 * (jd.j_real.norm() + 1.0));
        let e = jd.exp(0.6, &loose).unwrap();
        assert!((e - (&m * 0.6).exp()).amax() < 1e-8);
    }

    #[test]
    fn random_matrices_reconstruct_and_exponentiate() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let m = DMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
            let jd = decompose(&m, &tol()).unwrap();
            assert!(jd.reconstruction_error(&m) < 1e-9);
            let e = jd.exp(0.8, &tol()).unwrap();
            let reference = (&m * 0.8).exp();
            assert!((e - &reference).amax() < 1e-9 * reference.amax().max(1.0));
        }
    }

    #[test]
    fn similar_matrices_share_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
        let p = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(6, 6) * 3.0;
        let m2 = &p * &m * p.clone().try_inverse().unwrap();
        let a = spectrum(&m, &tol()).unwrap().values();
        let b = spectrum(&m2, &tol()).unwrap().values();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-8);
        }
    }
}
