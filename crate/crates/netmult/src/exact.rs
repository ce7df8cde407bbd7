//! Exact linear algebra over the rationals, used for the rank decisions of
//! the reduction pipeline (radical, coset representatives, center). These are
//! the places where floating-point noise could change the answer's shape, so
//! no tolerance enters here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;
pub type RatMatrix = Vec<Vec<Rat>>;

pub fn from_int(x: i64) -> Rat {
    BigRational::from_integer(BigInt::from(x))
}

pub fn to_f64(x: &Rat) -> f64 {
    let numer = x.numer();
    let denom = x.denom();
    // exact for the small rationals in this pipeline; falls back to a
    // string round-trip only on overflow
    let n = numer.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let d = denom.to_string().parse::<f64>().unwrap_or(f64::NAN);
    n / d
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(mat: &mut RatMatrix) -> Vec<usize> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        // partial pivot: pick the largest magnitude for mild coefficient control
        let pivot_row = (row..rows)
            .filter(|&r| !mat[r][col].is_zero())
            .max_by(|&a, &b| mat[a][col].abs().cmp(&mat[b][col].abs()));
        let Some(pivot_row) = pivot_row else { continue };
        mat.swap(row, pivot_row);
        let inv = mat[row][col].clone();
        for c in col..cols {
            mat[row][c] = &mat[row][c] / &inv;
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..cols {
                    let sub = &factor * &mat[row][c];
                    mat[r][c] = &mat[r][c] - &sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// A basis of the right nullspace `{x : mat x = 0}`.
pub fn nullspace(mat: &RatMatrix) -> Vec<Vec<Rat>> {
    let cols = if mat.is_empty() { 0 } else { mat[0].len() };
    let mut work = mat.clone();
    let pivots = rref(&mut work);
    let pivot_of_col: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = Some(r);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut vec = vec![Rat::zero(); cols];
        vec[free] = Rat::one();
        for col in 0..cols {
            if let Some(r) = pivot_of_col[col] {
                vec[col] = -work[r][free].clone();
            }
        }
        basis.push(vec);
    }
    basis
}

/// Exact inverse of a square matrix, or `None` if singular.
pub fn invert(mat: &RatMatrix) -> Option<RatMatrix> {
    let n = mat.len();
    let mut work: RatMatrix = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut work);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Rank of a rational matrix.
pub fn rank(mat: &RatMatrix) -> usize {
    let mut work = mat.clone();
    rref(&mut work).len()
}
