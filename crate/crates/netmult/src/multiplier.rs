//! The reduction pipeline: the algebra spanned by the generator operators,
//! its radical split off exactly over the rationals, the semisimple quotient
//! cut into simple matrix blocks by seeded random central elements, and an
//! explicit irreducible realization of each block. The output is the family
//! of formal linear maps whose eigenvalues make up the spectrum of every
//! admissible map for every constructible network of the monoid.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, SVD};
use num_complex::Complex64;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

use crate::admissible::{generator_operators, kron};
use crate::error::{Error, Result};
use crate::exact::{self, Rat, RatMatrix};
use crate::network::Monoid;
use crate::seeding::{self, derive_rng};

const MAX_RETRIES: usize = 8;
const CLUSTER_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-8;
const CHECK_TOL: f64 = 1e-9;

/// The algebra of scalar admissible maps of the fundamental network, spanned
/// by the generators `rho_sigma`, with the exact integer structure table
/// `rho_a rho_b = rho_{b ∘ a}`.
#[derive(Debug, Clone)]
pub struct AdmissibleAlgebra {
    monoid: Monoid,
    generators: Vec<Array2<Complex64>>,
}

impl AdmissibleAlgebra {
    pub fn dim(&self) -> usize {
        self.monoid.len()
    }

    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    pub fn generators(&self) -> &[Array2<Complex64>] {
        &self.generators
    }

    /// `structure(a, b)` = index `c` with `rho_a rho_b = rho_c`.
    pub fn structure(&self, a: usize, b: usize) -> usize {
        self.monoid.compose(b, a)
    }
}

/// Builds the generator matrices and structure table of the monoid's
/// admissible-map algebra.
pub fn algebra_structure(m: &Monoid) -> AdmissibleAlgebra {
    AdmissibleAlgebra {
        monoid: m.clone(),
        generators: generator_operators(m),
    }
}

/// The exact radical/semisimple split of the algebra. The radical is the
/// kernel of the integer Gram matrix `G_ab = tr(rho_a rho_b)` (each entry
/// counts fixed elements), computed over the rationals; the quotient is
/// spanned by coset representatives chosen among the generators themselves.
#[derive(Debug, Clone)]
pub struct RadicalSplit {
    monoid: Monoid,
    /// basis of the radical, as rational vectors in the generator basis
    radical_basis: Vec<Vec<Rat>>,
    /// generator indices whose cosets form a basis of the quotient
    pivots: Vec<usize>,
    /// `reduce[c]` = coordinates of `rho_c` modulo the radical, over `pivots`
    reduce: Vec<Vec<Rat>>,
}

impl RadicalSplit {
    pub fn radical_dim(&self) -> usize {
        self.radical_basis.len()
    }

    /// Generator indices whose cosets represent the quotient basis.
    pub fn coset_representatives(&self) -> &[usize] {
        &self.pivots
    }

    pub fn quotient_dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn radical_basis(&self) -> &[Vec<Rat>] {
        &self.radical_basis
    }

    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    /// Rational structure constants of the quotient:
    /// `q_i q_j = Σ_k table(i,j)[k] q_k`.
    fn quotient_product(&self, i: usize, j: usize) -> &[Rat] {
        let c = self.monoid.compose(self.pivots[j], self.pivots[i]);
        &self.reduce[c]
    }
}

/// Computes the radical split by exact rational elimination.
pub fn radical(alg: &AdmissibleAlgebra) -> Result<RadicalSplit> {
    let m = alg.monoid();
    let k = m.len();
    // G_ab = tr(rho_a rho_b) = tr(rho_{b∘a}) = #{t : (b∘a)∘t = t}
    let gram: RatMatrix = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| exact::from_int(m.left_fixed_count(m.compose(b, a)) as i64))
                .collect()
        })
        .collect();

    let radical_basis = exact::nullspace(&gram);
    let pivots = {
        let mut work = gram.clone();
        exact::rref(&mut work)
    };

    // Basis of the full space: radical vectors, then the pivot generators.
    // Its inverse gives every generator's coset coordinates at once.
    let r = radical_basis.len();
    let q = pivots.len();
    debug_assert_eq!(r + q, k);
    let mut basis: RatMatrix = vec![vec![Rat::zero(); k]; k];
    for (col, vec) in radical_basis.iter().enumerate() {
        for row in 0..k {
            basis[row][col] = vec[row].clone();
        }
    }
    for (col, &gen) in pivots.iter().enumerate() {
        basis[gen][r + col] = Rat::from_integer(1.into());
    }
    let inv = exact::invert(&basis)
        .ok_or_else(|| Error::InconsistentTrace("coset basis is singular".into()))?;
    let reduce: Vec<Vec<Rat>> = (0..k)
        .map(|c| (0..q).map(|row| inv[r + row][c].clone()).collect())
        .collect();

    let split = RadicalSplit {
        monoid: m.clone(),
        radical_basis,
        pivots,
        reduce,
    };

    // The radical must be a two-sided ideal: products of radical basis
    // vectors with generators reduce to zero in the quotient, exactly.
    for v in &split.radical_basis {
        for a in 0..k {
            for left in [false, true] {
                let mut image = vec![Rat::zero(); k];
                for b in 0..k {
                    if v[b].is_zero() {
                        continue;
                    }
                    let c = if left {
                        m.compose(b, a) // rho_a rho_b
                    } else {
                        m.compose(a, b) // rho_b rho_a
                    };
                    image[c] = &image[c] + &v[b];
                }
                let mut coset = vec![Rat::zero(); q];
                for (c, w) in image.iter().enumerate() {
                    if !w.is_zero() {
                        for (row, red) in split.reduce[c].iter().enumerate() {
                            coset[row] = &coset[row] + &(w * red);
                        }
                    }
                }
                if coset.iter().any(|x| !x.is_zero()) {
                    return Err(Error::InconsistentTrace(
                        "radical is not a two-sided ideal".into(),
                    ));
                }
            }
        }
    }
    Ok(split)
}

/// Numeric view of the semisimple quotient used by the randomized stages.
struct Quotient {
    dim: usize,
    /// structure tensor: `table[i][j][k]`
    table: Vec<Vec<Vec<f64>>>,
    unit: Array1<Complex64>,
    /// coset coordinates of every generator
    components: Vec<Array1<Complex64>>,
    /// basis of the center, from the exact commutation solve
    center: Vec<Array1<Complex64>>,
}

impl Quotient {
    fn mul(&self, x: &Array1<Complex64>, y: &Array1<Complex64>) -> Array1<Complex64> {
        let mut out = Array1::zeros(self.dim);
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                let coef = x[i] * y[j];
                if coef.is_zero() {
                    continue;
                }
                for (k, t) in self.table[i][j].iter().enumerate() {
                    if *t != 0.0 {
                        out[k] += coef * *t;
                    }
                }
            }
        }
        out
    }

    fn left_mult_matrix(&self, x: &Array1<Complex64>) -> Array2<Complex64> {
        let mut out = Array2::zeros((self.dim, self.dim));
        for j in 0..self.dim {
            let mut e = Array1::zeros(self.dim);
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.mul(x, &e);
            for i in 0..self.dim {
                out[[i, j]] = col[i];
            }
        }
        out
    }
}

fn build_quotient(split: &RadicalSplit) -> Result<Quotient> {
    let q = split.quotient_dim();
    let table: Vec<Vec<Vec<f64>>> = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| split.quotient_product(i, j).iter().map(exact::to_f64).collect())
                .collect()
        })
        .collect();
    let to_complex = |v: &[Rat]| -> Array1<Complex64> {
        Array1::from_iter(v.iter().map(|x| Complex64::new(exact::to_f64(x), 0.0)))
    };
    let unit = to_complex(&split.reduce[split.monoid.unit()]);
    let components: Vec<Array1<Complex64>> =
        split.reduce.iter().map(|v| to_complex(v)).collect();

    // Center: exact solve of the commutation equations z q_i = q_i z.
    let mut constraints: RatMatrix = Vec::new();
    for i in 0..q {
        for k in 0..q {
            let row: Vec<Rat> = (0..q)
                .map(|j| {
                    let left = split.quotient_product(j, i)[k].clone();
                    let right = split.quotient_product(i, j)[k].clone();
                    left - right
                })
                .collect();
            constraints.push(row);
        }
    }
    let center_exact = exact::nullspace(&constraints);
    if center_exact.is_empty() {
        return Err(Error::InconsistentTrace("quotient center is empty".into()));
    }
    let center = center_exact.iter().map(|v| to_complex(v)).collect();
    Ok(Quotient {
        dim: q,
        table,
        unit,
        components,
        center,
    })
}

/// Deterministic clustering of eigenvalues: values are sorted by
/// `(re, im)` and greedily attached to the nearest existing cluster mean
/// within the tolerance.
fn cluster_eigenvalues(vals: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = vals.to_vec();
    sorted.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for v in sorted {
        let best = clusters
            .iter_mut()
            .min_by(|a, b| {
                (a.0 - v)
                    .norm()
                    .partial_cmp(&(b.0 - v).norm())
                    .unwrap_or(Ordering::Equal)
            })
            .filter(|(mean, _)| (*mean - v).norm() <= tol);
        match best {
            Some((mean, count)) => {
                *mean = (*mean * (*count as f64) + v) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((v, 1)),
        }
    }
    clusters.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap_or(Ordering::Equal)
            .then(a.0.im.partial_cmp(&b.0.im).unwrap_or(Ordering::Equal))
    });
    clusters
}

fn well_separated(clusters: &[(Complex64, usize)], tol: f64) -> bool {
    for (i, (a, _)) in clusters.iter().enumerate() {
        for (b, _) in clusters.iter().skip(i + 1) {
            if (*a - *b).norm() < 16.0 * tol {
                return false;
            }
        }
    }
    true
}

fn eigvals(a: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    let (vals, _) = a
        .eig()
        .map_err(|e| Error::Linalg(format!("eigendecomposition failed: {e}")))?;
    Ok(vals.to_vec())
}

/// A simple two-sided ideal of the semisimple quotient: an orthonormal basis
/// in quotient coordinates, the multiplication tensor in that basis, the
/// ideal's unit (a primitive central idempotent) and each generator's
/// component.
#[derive(Debug, Clone)]
pub struct WedderburnBlock {
    dim: usize,
    /// orthonormal basis of the ideal, as columns in quotient coordinates
    basis: Array2<Complex64>,
    mul_table: Vec<Vec<Array1<Complex64>>>,
    unit: Array1<Complex64>,
    components: Vec<Array1<Complex64>>,
}

impl WedderburnBlock {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Array2<Complex64> {
        &self.basis
    }

    fn mul(&self, x: &Array1<Complex64>, y: &Array1<Complex64>) -> Array1<Complex64> {
        let mut out = Array1::zeros(self.dim);
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                let coef = x[i] * y[j];
                if coef.is_zero() {
                    continue;
                }
                out = out + self.mul_table[i][j].mapv(|t| t * coef);
            }
        }
        out
    }
}

fn is_perfect_square(d: usize) -> Option<usize> {
    let n = (d as f64).sqrt().round() as usize;
    (n * n == d).then_some(n)
}

/// Splits the semisimple quotient into simple two-sided ideals: draws a
/// seeded random central element, clusters the eigenvalues of its left
/// regular action, forms the primitive central idempotents by Lagrange
/// interpolation and cuts out each ideal with an orthonormal basis. Retries
/// with a fresh draw when the spectrum is ambiguous.
pub fn wedderburn_blocks(split: &RadicalSplit, seed: u64) -> Result<Vec<WedderburnBlock>> {
    let quotient = build_quotient(split)?;
    let mut last = String::new();
    for attempt in 0..MAX_RETRIES {
        let mut rng = derive_rng(seed, seeding::TAG_WEDDERBURN, attempt as u64, 0);
        match try_split(&quotient, &mut rng) {
            Ok(blocks) => return Ok(blocks),
            Err(detail) => last = detail,
        }
    }
    Err(Error::DegenerateDraw {
        attempts: MAX_RETRIES,
        detail: last,
    })
}

fn try_split(
    quotient: &Quotient,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Vec<WedderburnBlock>, String> {
    let q = quotient.dim;
    let k_center = quotient.center.len();

    // random central element
    let mut z: Array1<Complex64> = Array1::zeros(q);
    for basis_vec in &quotient.center {
        let coef = seeding::complex_gaussian(rng);
        z = z + basis_vec.mapv(|x| x * coef);
    }
    let l_z = quotient.left_mult_matrix(&z);
    let vals = eigvals(&l_z).map_err(|e| e.to_string())?;
    let scale = vals.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let tol = CLUSTER_TOL * scale;
    let clusters = cluster_eigenvalues(&vals, tol);

    if clusters.len() != k_center {
        return Err(format!(
            "{} eigenvalue clusters for a {k_center}-dimensional center",
            clusters.len()
        ));
    }
    if !well_separated(&clusters, tol) {
        return Err("eigenvalue clusters are ambiguous".into());
    }
    if clusters.iter().map(|(_, c)| c).sum::<usize>() != q {
        return Err("cluster sizes do not add up".into());
    }
    for (_, size) in &clusters {
        if is_perfect_square(*size).is_none() {
            return Err(format!("cluster size {size} is not a perfect square"));
        }
    }

    // primitive central idempotents by Lagrange interpolation in z
    let mut idempotents = Vec::with_capacity(clusters.len());
    for (l, (lambda_l, _)) in clusters.iter().enumerate() {
        let mut eps = quotient.unit.clone();
        for (j, (lambda_j, _)) in clusters.iter().enumerate() {
            if j == l {
                continue;
            }
            let shifted = &z - &quotient.unit.mapv(|u| u * *lambda_j);
            eps = quotient.mul(&eps, &shifted.mapv(|x| x / (*lambda_l - *lambda_j)));
        }
        let err = (&quotient.mul(&eps, &eps) - &eps)
            .iter()
            .map(|x| x.norm())
            .fold(0.0f64, f64::max);
        let size = eps.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
        if err > 1e-7 * size.max(1.0) || size < 1e-9 {
            return Err("central idempotent failed its consistency check".into());
        }
        idempotents.push(eps);
    }
    let sum: Array1<Complex64> = idempotents
        .iter()
        .fold(Array1::zeros(q), |acc, e| acc + e);
    let unit_err = (&sum - &quotient.unit)
        .iter()
        .map(|x| x.norm())
        .fold(0.0f64, f64::max);
    if unit_err > 1e-7 {
        return Err("central idempotents do not sum to the unit".into());
    }

    let mut blocks = Vec::with_capacity(clusters.len());
    for (eps, (_, size)) in idempotents.iter().zip(&clusters) {
        let block = cut_ideal(quotient, eps, *size)?;
        blocks.push(block);
    }
    Ok(blocks)
}

/// Cuts the two-sided ideal `Q·eps` out of the quotient and expresses its
/// multiplication in an orthonormal basis.
fn cut_ideal(
    quotient: &Quotient,
    eps: &Array1<Complex64>,
    dim: usize,
) -> std::result::Result<WedderburnBlock, String> {
    let q = quotient.dim;
    let mut candidates = Array2::zeros((q, q));
    for j in 0..q {
        let mut e = Array1::zeros(q);
        e[j] = Complex64::new(1.0, 0.0);
        let v = quotient.mul(&e, eps);
        for i in 0..q {
            candidates[[i, j]] = v[i];
        }
    }
    let basis = orthonormal_column_basis(&candidates, dim)?;

    let coords = |v: &Array1<Complex64>| -> Array1<Complex64> {
        let mut out = Array1::zeros(dim);
        for c in 0..dim {
            let mut dot = Complex64::zero();
            for r in 0..q {
                dot += basis[[r, c]].conj() * v[r];
            }
            out[c] = dot;
        }
        out
    };
    let embed = |x: &Array1<Complex64>| -> Array1<Complex64> {
        let mut out = Array1::zeros(q);
        for r in 0..q {
            for c in 0..dim {
                out[r] += basis[[r, c]] * x[c];
            }
        }
        out
    };

    let mut mul_table = vec![vec![Array1::zeros(dim); dim]; dim];
    for i in 0..dim {
        let bi = basis.column(i).to_owned();
        for j in 0..dim {
            let bj = basis.column(j).to_owned();
            let prod = quotient.mul(&bi, &bj);
            let in_block = coords(&prod);
            let residual = &prod - &embed(&in_block);
            let res = residual.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
            if res > 1e-7 {
                return Err("ideal is not closed under multiplication".into());
            }
            mul_table[i][j] = in_block;
        }
    }

    let unit = coords(eps);
    let components = quotient
        .components
        .iter()
        .map(|g| coords(&quotient.mul(g, eps)))
        .collect();
    Ok(WedderburnBlock {
        dim,
        basis,
        mul_table,
        unit,
        components,
    })
}

/// First `rank` left singular vectors, after checking the singular spectrum
/// actually has that numerical rank.
fn orthonormal_column_basis(
    candidates: &Array2<Complex64>,
    rank: usize,
) -> std::result::Result<Array2<Complex64>, String> {
    let (u, s, _) = candidates
        .svd(true, false)
        .map_err(|e| format!("svd failed: {e}"))?;
    let u = u.expect("left singular vectors were requested");
    let smax = s.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    let numerical_rank = s.iter().filter(|&&x| x > RANK_TOL * smax).count();
    if numerical_rank != rank {
        return Err(format!(
            "numerical rank {numerical_rank} disagrees with the expected dimension {rank}"
        ));
    }
    Ok(u.slice(ndarray::s![.., 0..rank]).to_owned())
}

/// One realized simple block: the images `Λ^l(delta_sigma)`, one `n_l x n_l`
/// complex matrix per monoid element, and their traces (the character).
#[derive(Debug, Clone)]
pub struct SimpleBlock {
    size: usize,
    images: Vec<Array2<Complex64>>,
    character: Vec<Complex64>,
}

impl SimpleBlock {
    pub fn size(&self) -> usize {
        self.size
    }

    /// `images()[sigma][[i, j]]` is the coefficient tensor entry
    /// `a^{sigma}_{i,j}`.
    pub fn images(&self) -> &[Array2<Complex64>] {
        &self.images
    }

    pub fn character(&self) -> &[Complex64] {
        &self.character
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
            && self
                .images
                .iter()
                .all(|m| (m[[0, 0]] - Complex64::new(1.0, 0.0)).norm() <= 1e-6)
    }
}

/// Realizes a simple block as explicit matrices: a seeded random element is
/// split by Lagrange interpolation into a rank-one idempotent `e`; the left
/// ideal `B·e` carries the irreducible action, and left multiplication by
/// each generator's component is expressed in an orthonormal basis of it.
pub fn realize_block(block: &WedderburnBlock, seed: u64, block_index: u64) -> Result<SimpleBlock> {
    let d = block.dim;
    let n = is_perfect_square(d).ok_or(Error::NonSquareBlockDim(d))?;
    let mut last = String::new();
    for attempt in 0..MAX_RETRIES {
        let mut rng = derive_rng(seed, seeding::TAG_REALIZE, block_index, attempt as u64);
        match try_realize(block, n, &mut rng) {
            Ok(simple) => return Ok(simple),
            Err(detail) => last = detail,
        }
    }
    Err(Error::DegenerateDraw {
        attempts: MAX_RETRIES,
        detail: last,
    })
}

fn try_realize(
    block: &WedderburnBlock,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<SimpleBlock, String> {
    let d = block.dim;
    let x: Array1<Complex64> = Array1::from_iter((0..d).map(|_| seeding::complex_gaussian(rng)));

    // distinct eigenvalues of x, each of multiplicity n in the regular action
    let mut l_x = Array2::zeros((d, d));
    for j in 0..d {
        let mut e = Array1::zeros(d);
        e[j] = Complex64::new(1.0, 0.0);
        let col = block.mul(&x, &e);
        for i in 0..d {
            l_x[[i, j]] = col[i];
        }
    }
    let vals = eigvals(&l_x).map_err(|e| e.to_string())?;
    let scale = vals.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let tol = CLUSTER_TOL * scale;
    let clusters = cluster_eigenvalues(&vals, tol);
    if clusters.len() != n || clusters.iter().any(|(_, c)| *c != n) {
        return Err(format!(
            "expected {n} eigenvalues of multiplicity {n}, found clusters {:?}",
            clusters.iter().map(|(_, c)| *c).collect::<Vec<_>>()
        ));
    }
    if !well_separated(&clusters, tol) {
        return Err("block spectrum is ambiguous".into());
    }

    // rank-one idempotent via Lagrange interpolation at the first eigenvalue
    let lambda1 = clusters[0].0;
    let mut e = block.unit.clone();
    for (lambda_j, _) in clusters.iter().skip(1) {
        let shifted = &x - &block.unit.mapv(|u| u * *lambda_j);
        e = block.mul(&e, &shifted.mapv(|v| v / (lambda1 - *lambda_j)));
    }
    let idem_err = (&block.mul(&e, &e) - &e)
        .iter()
        .map(|x| x.norm())
        .fold(0.0f64, f64::max);
    let e_size = e.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
    if idem_err > 1e-7 * e_size.max(1.0) || e_size < 1e-9 {
        return Err("interpolated idempotent failed its consistency check".into());
    }

    // the left ideal B·e and an orthonormal basis of it
    let mut candidates = Array2::zeros((d, d));
    for j in 0..d {
        let mut unit_j = Array1::zeros(d);
        unit_j[j] = Complex64::new(1.0, 0.0);
        let v = block.mul(&unit_j, &e);
        for i in 0..d {
            candidates[[i, j]] = v[i];
        }
    }
    let ideal = orthonormal_column_basis(&candidates, n)?;

    // image of each generator component: left multiplication on the ideal
    let mut images = Vec::with_capacity(block.components.len());
    for comp in &block.components {
        let mut image = Array2::zeros((n, n));
        for j in 0..n {
            let col_in = ideal.column(j).to_owned();
            let prod = block.mul(comp, &col_in);
            for i in 0..n {
                let mut dot = Complex64::zero();
                for r in 0..d {
                    dot += ideal[[r, i]].conj() * prod[r];
                }
                image[[i, j]] = dot;
            }
        }
        images.push(image);
    }
    let character = images.iter().map(|m| m.diag().iter().sum()).collect();
    Ok(SimpleBlock {
        size: n,
        images,
        character,
    })
}

/// The full multiplier family of a monoid, canonically ordered: the trivial
/// block first, then ascending size, ties broken by the character vectors
/// (rounded to 9 decimals, compared entrywise as `(re, im)` pairs, larger
/// first).
#[derive(Debug, Clone)]
pub struct MultiplierSet {
    monoid: Monoid,
    blocks: Vec<SimpleBlock>,
    radical_dim: usize,
}

impl MultiplierSet {
    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    pub fn blocks(&self) -> &[SimpleBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size()).collect()
    }

    pub fn radical_dim(&self) -> usize {
        self.radical_dim
    }

    pub fn from_parts(monoid: Monoid, blocks: Vec<SimpleBlock>, radical_dim: usize) -> Self {
        MultiplierSet {
            monoid,
            blocks,
            radical_dim,
        }
    }

    pub fn block_from_parts(size: usize, images: Vec<Array2<Complex64>>) -> SimpleBlock {
        let character = images.iter().map(|m| m.diag().iter().sum()).collect();
        SimpleBlock {
            size,
            images,
            character,
        }
    }
}

fn rounded_key(character: &[Complex64]) -> Vec<(i64, i64)> {
    character
        .iter()
        .map(|z| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64))
        .collect()
}

fn canonical_order(blocks: &mut [SimpleBlock]) -> Result<()> {
    let trivial_count = blocks.iter().filter(|b| b.is_trivial()).count();
    if trivial_count != 1 {
        return Err(Error::InconsistentTrace(format!(
            "{trivial_count} trivial blocks found, expected exactly one"
        )));
    }
    blocks.sort_by(|a, b| {
        b.is_trivial()
            .cmp(&a.is_trivial())
            .then(a.size().cmp(&b.size()))
            .then_with(|| rounded_key(b.character()).cmp(&rounded_key(a.character())))
    });
    Ok(())
}

/// Runs the whole pipeline: algebra, exact radical, block split, realization,
/// a-posteriori validation and canonical ordering.
pub fn multipliers(m: &Monoid, seed: u64) -> Result<MultiplierSet> {
    let alg = algebra_structure(m);
    let split = radical(&alg)?;
    let mut last: Option<Error> = None;
    for round in 0..MAX_RETRIES {
        let round_seed = seed.wrapping_add((round as u64) << 32);
        let candidate = (|| -> Result<MultiplierSet> {
            let raw = wedderburn_blocks(&split, round_seed)?;
            let mut blocks = Vec::with_capacity(raw.len());
            for (idx, block) in raw.iter().enumerate() {
                blocks.push(realize_block(block, round_seed, idx as u64)?);
            }
            validate_blocks(m, &split, &blocks)?;
            canonical_order(&mut blocks)?;
            Ok(MultiplierSet {
                monoid: m.clone(),
                blocks,
                radical_dim: split.radical_dim(),
            })
        })();
        match candidate {
            Ok(ms) => return Ok(ms),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt ran"))
}

/// A-posteriori validation: the outputs of the randomized stages are checked
/// against the exact laws they must satisfy, so a bad draw is detected
/// rather than trusted.
fn validate_blocks(m: &Monoid, split: &RadicalSplit, blocks: &[SimpleBlock]) -> Result<()> {
    let fail = |msg: String| Err(Error::InconsistentTrace(msg));
    let total: usize = blocks.iter().map(|b| b.size() * b.size()).sum();
    if total != split.quotient_dim() {
        return fail(format!(
            "block sizes square-sum to {total}, quotient dimension is {}",
            split.quotient_dim()
        ));
    }
    for block in blocks {
        let n = block.size();
        let unit_err = (&block.images()[m.unit()] - &Array2::<Complex64>::eye(n))
            .iter()
            .map(|x| x.norm())
            .fold(0.0f64, f64::max);
        if unit_err > CHECK_TOL {
            return fail("unit image is not the identity".into());
        }
        let scale = block
            .images()
            .iter()
            .flat_map(|im| im.iter())
            .map(|x| x.norm())
            .fold(1.0f64, f64::max);
        for t in 0..m.len() {
            for k in 0..m.len() {
                let lhs = block.images()[t].dot(&block.images()[k]);
                let rhs = &block.images()[m.compose(k, t)];
                let err = (&lhs - rhs).iter().map(|x| x.norm()).fold(0.0f64, f64::max);
                if err > CHECK_TOL * scale * scale {
                    return fail("images break the opposite-monoid product law".into());
                }
            }
        }
    }

    // full coefficient family {a^{l,·}_{i,j}} must be linearly independent
    let stacked = coefficient_matrix(m, blocks);
    if numerical_rank(&stacked)? != total {
        return fail("multiplier coefficients are linearly dependent".into());
    }
    let chars = character_matrix(m, blocks);
    if numerical_rank(&chars)? != blocks.len() {
        return fail("characters are linearly dependent".into());
    }
    Ok(())
}

fn coefficient_matrix(m: &Monoid, blocks: &[SimpleBlock]) -> Array2<Complex64> {
    let total: usize = blocks.iter().map(|b| b.size() * b.size()).sum();
    let mut out = Array2::zeros((total, m.len()));
    let mut row = 0;
    for block in blocks {
        let n = block.size();
        for i in 0..n {
            for j in 0..n {
                for s in 0..m.len() {
                    out[[row, s]] = block.images()[s][[i, j]];
                }
                row += 1;
            }
        }
    }
    out
}

fn character_matrix(m: &Monoid, blocks: &[SimpleBlock]) -> Array2<Complex64> {
    let mut out = Array2::zeros((blocks.len(), m.len()));
    for (l, block) in blocks.iter().enumerate() {
        for s in 0..m.len() {
            out[[l, s]] = block.character()[s];
        }
    }
    out
}

fn numerical_rank(a: &Array2<Complex64>) -> Result<usize> {
    let (_, s, _) = a
        .svd(false, false)
        .map_err(|e| Error::Linalg(format!("svd failed: {e}")))?;
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > RANK_TOL * smax).count())
}

/// Evaluates multiplier `l` on block coefficients: the `n_l x n_l` block
/// matrix with `(i, j)` block `Σ_sigma a^{l,sigma}_{i,j} C_sigma`.
pub fn evaluate(
    ms: &MultiplierSet,
    l: usize,
    c: &crate::admissible::Coefficients,
) -> Result<Array2<Complex64>> {
    let block = ms.blocks.get(l).ok_or(Error::BlockIndexOutOfRange {
        index: l,
        count: ms.blocks.len(),
    })?;
    let names: Vec<&str> = ms.monoid.names().iter().map(|s| s.as_str()).collect();
    c.covers_exactly_labels(names.iter().copied())?;
    let m_dim = c.block_dim();
    let n = block.size();
    let mut out = Array2::zeros((n * m_dim, n * m_dim));
    for (s, name) in names.iter().enumerate() {
        let coeff = &c.blocks()[*name];
        out = out + kron(&block.images()[s], coeff);
    }
    Ok(out)
}

/// The `k x |Σ|` character table `chi_l(sigma) = tr Λ^l(delta_sigma)`.
pub fn characters(ms: &MultiplierSet) -> Array2<Complex64> {
    character_matrix(&ms.monoid, &ms.blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::Coefficients;
    use crate::network::{monoid_closure, InputMap};
    use crate::testutil::{exam44, exam612, fig3_left, monoid_of, random_blocks};

    fn fig3_left_monoid() -> Monoid {
        monoid_of(&fig3_left())
    }

    fn exam44_monoid() -> Monoid {
        monoid_of(&exam44())
    }

    fn exam612_monoid() -> Monoid {
        monoid_of(&exam612())
    }

    fn cyclic(n: usize) -> Monoid {
        let shift = InputMap::new((0..n).map(|i| (i + 1) % n).collect());
        monoid_closure(&[shift], 100).unwrap()
    }

    #[test]
    fn algebra_of_trivial_monoid_is_one_dimensional() {
        let m = monoid_closure(&[], 10).unwrap();
        let alg = algebra_structure(&m);
        assert_eq!(alg.dim(), 1);
    }

    #[test]
    fn cyclic_group_algebra_is_commutative() {
        let alg = algebra_structure(&cyclic(4));
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(alg.structure(a, b), alg.structure(b, a));
            }
        }
    }

    #[test]
    fn algebra_structure_matches_generator_products() {
        let m = fig3_left_monoid();
        let alg = algebra_structure(&m);
        assert_eq!(alg.dim(), 5);
        for a in 0..5 {
            for b in 0..5 {
                let prod = alg.generators()[a].dot(&alg.generators()[b]);
                assert_eq!(prod, alg.generators()[alg.structure(a, b)]);
            }
        }
    }

    #[test]
    fn group_algebra_has_no_radical() {
        let split = radical(&algebra_structure(&cyclic(4))).unwrap();
        assert_eq!(split.radical_dim(), 0);
        assert_eq!(split.quotient_dim(), 4);
    }

    #[test]
    fn radical_dimensions_of_the_fixture_monoids() {
        let split = radical(&algebra_structure(&fig3_left_monoid())).unwrap();
        assert_eq!(split.radical_dim(), 2); // 5 - (1 + 1 + 1)
        let split = radical(&algebra_structure(&exam612_monoid())).unwrap();
        assert_eq!(split.radical_dim(), 2); // 8 - (1 + 1 + 4)
    }

    #[test]
    fn commutative_quotient_splits_into_scalar_blocks() {
        let split = radical(&algebra_structure(&cyclic(4))).unwrap();
        let blocks = wedderburn_blocks(&split, 0).unwrap();
        assert_eq!(blocks.len(), 4);
        assert!(blocks.iter().all(|b| b.dim() == 1));
    }

    #[test]
    fn exam612_splits_into_1_1_4() {
        let split = radical(&algebra_structure(&exam612_monoid())).unwrap();
        let mut dims: Vec<usize> = wedderburn_blocks(&split, 0)
            .unwrap()
            .iter()
            .map(|b| b.dim())
            .collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 1, 4]);
    }

    #[test]
    fn exam44_splits_into_scalar_blocks() {
        let split = radical(&algebra_structure(&exam44_monoid())).unwrap();
        let dims: Vec<usize> = wedderburn_blocks(&split, 0)
            .unwrap()
            .iter()
            .map(|b| b.dim())
            .collect();
        assert_eq!(dims, vec![1, 1, 1]);
    }

    #[test]
    fn multipliers_of_running_example() {
        let ms = multipliers(&fig3_left_monoid(), 0).unwrap();
        assert_eq!(ms.sizes(), vec![1, 1, 1]);
        let chars = characters(&ms);
        // {Σ-sum, A+B, A-B} as coefficient vectors over (e, b, c, d, o)
        let rows: Vec<Vec<Complex64>> = (0..3).map(|l| chars.row(l).to_vec()).collect();
        let expect = [
            vec![1.0, 1.0, 1.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 0.0, 0.0],
            vec![1.0, -1.0, 0.0, 0.0, 0.0],
        ];
        for want in &expect {
            assert!(
                rows.iter().any(|row| row
                    .iter()
                    .zip(want)
                    .all(|(z, w)| (z - Complex64::new(*w, 0.0)).norm() < 1e-9)),
                "missing character row {want:?}"
            );
        }
        // canonical order: trivial first, then descending character order
        assert!((rows[1][1] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!((rows[2][1] - Complex64::new(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn multipliers_of_exam44() {
        let ms = multipliers(&exam44_monoid(), 0).unwrap();
        assert_eq!(ms.sizes(), vec![1, 1, 1]);
        let chars = characters(&ms);
        let rows: Vec<Vec<Complex64>> = (0..3).map(|l| chars.row(l).to_vec()).collect();
        let expect = [
            vec![1.0, 1.0, 1.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 0.0, 0.0], // A + B
            vec![1.0, 0.0, 0.0, 0.0, 0.0], // A
        ];
        for (row, want) in rows.iter().zip(&expect) {
            for (z, w) in row.iter().zip(want) {
                assert!((z - Complex64::new(*w, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn multipliers_of_exam612() {
        let ms = multipliers(&exam612_monoid(), 0).unwrap();
        assert_eq!(ms.sizes(), vec![1, 1, 2]);
        let chars = characters(&ms);
        // chi_3 = (2, 0, 0, 1, 1, 0, 0, 0) on (A..H)
        let want = [2.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        for (s, w) in want.iter().enumerate() {
            assert!(
                (chars[[2, s]] - Complex64::new(*w, 0.0)).norm() < 1e-9,
                "chi_3({s}) = {}, want {w}",
                chars[[2, s]]
            );
        }
        // chi_2 corresponds to Λ² = A
        assert!((chars[[1, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        for s in 1..8 {
            assert!(chars[[1, s]].norm() < 1e-9);
        }
    }

    #[test]
    fn cyclic_multipliers_are_the_dft_characters() {
        let n = 5usize;
        let ms = multipliers(&cyclic(n), 0).unwrap();
        assert_eq!(ms.sizes(), vec![1; n]);
        let chars = characters(&ms);
        // each row must match (omega^{jk})_j for a distinct k
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
        let mut matched = vec![false; n];
        for l in 0..n {
            let row = chars.row(l);
            let k = (0..n).find(|&k| {
                !matched[k]
                    && (0..n).all(|j| {
                        (row[j] - omega.powu((j * k) as u32)).norm() < 1e-9
                    })
            });
            let k = k.unwrap_or_else(|| panic!("row {l} is not a DFT character"));
            matched[k] = true;
        }
    }

    #[test]
    fn evaluate_on_the_trivial_block_is_the_sum() {
        let m = fig3_left_monoid();
        let ms = multipliers(&m, 0).unwrap();
        let c = random_blocks(&m, 2, 5);
        let total = evaluate(&ms, 0, &c).unwrap();
        let mut sum = Array2::<Complex64>::zeros((2, 2));
        for block in c.blocks().values() {
            sum += block;
        }
        let err = (&total - &sum).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn evaluate_on_the_unit_delta_is_the_identity() {
        let m = fig3_left_monoid();
        let ms = multipliers(&m, 0).unwrap();
        for l in 0..ms.len() {
            let n = ms.blocks()[l].size();
            for dim in [1usize, 2] {
                let delta = Coefficients::delta(&m, "e", dim);
                let val = evaluate(&ms, l, &delta).unwrap();
                let err = (&val - &Array2::<Complex64>::eye(n * dim))
                    .iter()
                    .map(|x| x.norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-9);
            }
        }
    }

    #[test]
    fn evaluate_the_difference_multiplier() {
        let m = fig3_left_monoid();
        let ms = multipliers(&m, 0).unwrap();
        let c = Coefficients::scalar(&[
            ("e", Complex64::new(2.0, 0.0)),
            ("b", Complex64::new(1.0, 0.0)),
            ("c", Complex64::new(0.0, 0.0)),
            ("d", Complex64::new(0.0, 0.0)),
            ("o", Complex64::new(0.0, 0.0)),
        ]);
        // block 1 in canonical order is A + B, block 2 is A - B
        let plus = evaluate(&ms, 1, &c).unwrap();
        let minus = evaluate(&ms, 2, &c).unwrap();
        assert!((plus[[0, 0]] - Complex64::new(3.0, 0.0)).norm() < 1e-9);
        assert!((minus[[0, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(matches!(
            evaluate(&ms, 3, &c),
            Err(Error::BlockIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn multiplicativity_under_the_sigma_product() {
        for m in [fig3_left_monoid(), exam44_monoid(), exam612_monoid()] {
            let ms = multipliers(&m, 0).unwrap();
            for dim in [1usize, 2, 3] {
                let c = random_blocks(&m, dim, 100 + dim as u64);
                let d = random_blocks(&m, dim, 200 + dim as u64);
                let prod = crate::admissible::sigma_product(&c, &d, &m).unwrap();
                for l in 0..ms.len() {
                    let lhs = evaluate(&ms, l, &c).unwrap().dot(&evaluate(&ms, l, &d).unwrap());
                    let rhs = evaluate(&ms, l, &prod).unwrap();
                    let scale = lhs.iter().map(|x| x.norm()).fold(1.0, f64::max);
                    let err = (&lhs - &rhs).iter().map(|x| x.norm()).fold(0.0, f64::max);
                    assert!(err < 1e-9 * scale, "block {l}, dim {dim}: err {err}");
                }
            }
        }
    }

    #[test]
    fn characters_have_full_row_rank_and_ones_row() {
        for m in [fig3_left_monoid(), exam44_monoid(), exam612_monoid()] {
            let ms = multipliers(&m, 0).unwrap();
            let chars = characters(&ms);
            assert_eq!(numerical_rank(&chars).unwrap(), ms.len());
            for s in 0..m.len() {
                assert!((chars[[0, s]] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn trivial_block_is_unique_and_first() {
        for m in [fig3_left_monoid(), exam44_monoid(), exam612_monoid(), cyclic(6)] {
            let ms = multipliers(&m, 3).unwrap();
            assert!(ms.blocks()[0].is_trivial());
            assert_eq!(ms.blocks().iter().filter(|b| b.is_trivial()).count(), 1);
        }
    }

    #[test]
    fn square_sum_accounts_for_the_quotient() {
        for m in [fig3_left_monoid(), exam44_monoid(), exam612_monoid()] {
            let ms = multipliers(&m, 0).unwrap();
            let sq: usize = ms.sizes().iter().map(|n| n * n).sum();
            assert_eq!(sq + ms.radical_dim(), m.len());
            assert!(sq <= m.len());
        }
    }

    #[test]
    fn seeds_agree_up_to_similarity() {
        for m in [fig3_left_monoid(), exam612_monoid()] {
            let a = multipliers(&m, 7).unwrap();
            let b = multipliers(&m, 8).unwrap();
            assert_eq!(a.sizes(), b.sizes());
            let ca = characters(&a);
            let cb = characters(&b);
            let diff = (&ca - &cb).iter().map(|x| x.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-9, "characters differ across seeds by {diff}");
            // eigenvalues of evaluations agree as multisets
            let c = random_blocks(&m, 2, 55);
            for l in 0..a.len() {
                let mut ea = eigvals(&evaluate(&a, l, &c).unwrap()).unwrap();
                let mut eb = eigvals(&evaluate(&b, l, &c).unwrap()).unwrap();
                let key = |z: &Complex64| ((z.re * 1e9) as i64, (z.im * 1e9) as i64);
                ea.sort_by_key(key);
                eb.sort_by_key(key);
                for (x, y) in ea.iter().zip(&eb) {
                    assert!((x - y).norm() < 1e-7);
                }
            }
        }
    }
}
