//! Operators ↔ real matrices.
//!
//! `L_μ R_ν` acts on the column `(q0, q1, q2, q3)` as a signed permutation
//! matrix. The sixteen matrices are stored as transcribed constants and
//! checked once against Hamilton products before first use.

use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix4, SMatrix};

use crate::error::{Error, Result};
use crate::operator::{OperatorMatrix, RealLinearOperator, BASIS_PRODUCT};

pub type RealMatrix = DMatrix<f64>;

type Sign4 = [[i8; 4]; 4];

/// Matrix of `L_μ R_ν`, indexed `[μ][ν][row][col]`.
#[rustfmt::skip]
const TABLE1: [[Sign4; 4]; 4] = [
    [
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
        [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
        [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
    ],
    [
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
        [[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
        [[0, 0, -1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, -1, 0, 0]],
    ],
    [
        [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        [[0, 0, 0, -1], [0, 0, -1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
        [[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]],
        [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]],
    ],
    [
        [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
        [[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]],
        [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]],
        [[-1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]],
    ],
];

/// One block of the inverse table: four operators and, for four matrix
/// entries `(r, c)`, the sign with which `m[r][c] / 4` enters each of them.
struct Table2Block {
    ops: [(usize, usize); 4],
    rows: [((usize, usize), [i8; 4]); 4],
}

#[rustfmt::skip]
const TABLE2: [Table2Block; 4] = [
    Table2Block {
        ops: [(0, 0), (1, 1), (2, 2), (3, 3)],
        rows: [
            ((0, 0), [1, -1, -1, -1]),
            ((1, 1), [1, -1, 1, 1]),
            ((2, 2), [1, 1, -1, 1]),
            ((3, 3), [1, 1, 1, -1]),
        ],
    },
    Table2Block {
        ops: [(1, 0), (0, 1), (2, 3), (3, 2)],
        rows: [
            ((0, 1), [-1, -1, 1, -1]),
            ((1, 0), [1, 1, 1, -1]),
            ((2, 3), [-1, 1, -1, -1]),
            ((3, 2), [1, -1, -1, -1]),
        ],
    },
    Table2Block {
        ops: [(2, 0), (0, 2), (1, 3), (3, 1)],
        rows: [
            ((0, 2), [-1, -1, -1, 1]),
            ((2, 0), [1, 1, -1, 1]),
            ((1, 3), [1, -1, -1, -1]),
            ((3, 1), [-1, 1, -1, -1]),
        ],
    },
    Table2Block {
        ops: [(3, 0), (0, 3), (1, 2), (2, 1)],
        rows: [
            ((0, 3), [-1, -1, 1, -1]),
            ((3, 0), [1, 1, 1, -1]),
            ((1, 2), [-1, 1, -1, -1]),
            ((2, 1), [1, -1, -1, -1]),
        ],
    },
];

struct Tables {
    forward: [[Matrix4<f64>; 4]; 4],
    /// `inverse[μ][ν]` is the 4×4 weight array giving `a_μν = Σ w·m`.
    inverse: [[Matrix4<f64>; 4]; 4],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| match build_tables() {
        Ok(t) => t,
        Err(e) => panic!("translation tables failed their self-check: {e}"),
    })
}

fn sign_matrix(s: &Sign4) -> Matrix4<f64> {
    Matrix4::from_fn(|r, c| s[r][c] as f64)
}

/// Column `c` of the matrix of `L_μ R_ν` is `e_μ e_c e_ν`.
fn hamilton_matrix(mu: usize, nu: usize) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for c in 0..4 {
        let (s1, a) = BASIS_PRODUCT[mu][c];
        let (s2, r) = BASIS_PRODUCT[a][nu];
        m[(r, c)] = (s1 * s2) as f64;
    }
    m
}

fn build_tables() -> Result<Tables> {
    let forward: [[Matrix4<f64>; 4]; 4] =
        std::array::from_fn(|mu| std::array::from_fn(|nu| sign_matrix(&TABLE1[mu][nu])));

    for mu in 0..4 {
        for nu in 0..4 {
            if forward[mu][nu] != hamilton_matrix(mu, nu) {
                return Err(Error::Internal(format!(
                    "table 1 entry ({mu},{nu}) disagrees with the Hamilton product"
                )));
            }
        }
    }

    // Homomorphism on all basis pairs; entries are small integers so the
    // comparison is exact.
    for (a, b) in (0..16).flat_map(|a| (0..16).map(move |b| (a, b))) {
        let (x, y) = (
            RealLinearOperator::basis(a / 4, a % 4),
            RealLinearOperator::basis(b / 4, b % 4),
        );
        let lhs = combine(&forward, &x.compose(&y));
        let rhs = combine(&forward, &x) * combine(&forward, &y);
        if lhs != rhs {
            return Err(Error::Internal(format!("table 1 is not multiplicative on pair ({a},{b})")));
        }
    }

    // The 16×16 coefficient matrix: column μν is vec(Table1[μ][ν]).
    let big = SMatrix::<f64, 16, 16>::from_fn(|row, col| forward[col / 4][col % 4][(row / 4, row % 4)]);
    let inv = big
        .try_inverse()
        .ok_or_else(|| Error::Internal("table 1 matrices are linearly dependent".into()))?;
    let inverse: [[Matrix4<f64>; 4]; 4] = std::array::from_fn(|mu| {
        std::array::from_fn(|nu| Matrix4::from_fn(|r, c| inv[(4 * mu + nu, 4 * r + c)]))
    });

    let mut seen = [[false; 4]; 4];
    for block in &TABLE2 {
        for &((r, c), signs) in &block.rows {
            seen[r][c] = true;
            for (&(mu, nu), &s) in block.ops.iter().zip(&signs) {
                if (inverse[mu][nu][(r, c)] - s as f64 / 4.0).abs() > 1e-14 {
                    return Err(Error::Internal(format!(
                        "table 2 sign for a{r}{c} under ({mu},{nu}) disagrees with the computed inverse"
                    )));
                }
            }
        }
    }
    if seen.iter().flatten().any(|s| !s) {
        return Err(Error::Internal("table 2 does not cover every matrix entry".into()));
    }
    // Entries not listed in a block must vanish in the inverse.
    let listed: usize = TABLE2.iter().map(|b| b.rows.len() * b.ops.len()).sum();
    let nonzero = inv.iter().filter(|v| v.abs() > 1e-14).count();
    if listed != nonzero {
        return Err(Error::Internal(format!(
            "computed inverse has {nonzero} nonzero weights, table 2 lists {listed}"
        )));
    }

    // Snap to the exact quarters so the inverse map is exact on integer data.
    let inverse = inverse.map(|row| row.map(|m| m.map(|v| (v * 4.0).round() / 4.0)));
    Ok(Tables { forward, inverse })
}

fn combine(forward: &[[Matrix4<f64>; 4]; 4], op: &RealLinearOperator) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let a = op.coeffs[mu][nu];
            if a != 0.0 {
                m += forward[mu][nu] * a;
            }
        }
    }
    m
}

/// Runs the table self-check and reports the first inconsistency.
pub fn self_check() -> Result<()> {
    build_tables().map(|_| ())
}

/// Matrix of `L_μ R_ν` as stored.
pub fn basis_matrix(mu: usize, nu: usize) -> Matrix4<f64> {
    tables().forward[mu][nu]
}

pub fn op_to_real(op: &RealLinearOperator) -> Matrix4<f64> {
    combine(&tables().forward, op)
}

pub fn real_to_op(m: &Matrix4<f64>) -> RealLinearOperator {
    let t = tables();
    let mut op = RealLinearOperator::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            op.coeffs[mu][nu] = t.inverse[mu][nu].component_mul(m).sum();
        }
    }
    op
}

/// Block `(r, c)` of the result is `op_to_real(M[r][c])`.
pub fn opmatrix_to_real(m: &OperatorMatrix) -> RealMatrix {
    let n = m.dim();
    let mut out = RealMatrix::zeros(4 * n, 4 * n);
    for r in 0..n {
        for c in 0..n {
            out.fixed_view_mut::<4, 4>(4 * r, 4 * c).copy_from(&op_to_real(m.get(r, c)));
        }
    }
    out
}

pub fn real_to_opmatrix(m: &RealMatrix) -> Result<OperatorMatrix> {
    let (rows, cols) = m.shape();
    if rows != cols || rows % 4 != 0 || rows == 0 {
        return Err(Error::Shape(format!(
            "expected a square matrix with dimension a positive multiple of 4, got {rows}×{cols}"
        )));
    }
    let n = rows / 4;
    let mut out = OperatorMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let block: Matrix4<f64> = m.fixed_view::<4, 4>(4 * r, 4 * c).into_owned();
            out.set(r, c, real_to_op(&block));
        }
    }
    Ok(out)
}
