//! Linear admissible maps as explicit complex matrices: assembly from
//! per-arrow coefficient blocks, the coefficient product that matches map
//! composition, the trace functional from self-loop counts, and the
//! symmetry / generator operators of the fundamental network.

use indexmap::IndexMap;
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{Monoid, Network};

/// Coefficients of a linear response function: one complex `m x m` block per
/// arrow label (`m = 1` is the scalar case).
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    block_dim: usize,
    blocks: IndexMap<String, Array2<Complex64>>,
}

impl Coefficients {
    pub fn new(block_dim: usize, blocks: IndexMap<String, Array2<Complex64>>) -> Result<Self> {
        for (label, block) in &blocks {
            if block.nrows() != block_dim || block.ncols() != block_dim {
                return Err(Error::DimMismatch(block.nrows(), block_dim));
            }
            if block.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                let _ = label;
                return Err(Error::NonFinite("coefficient block"));
            }
        }
        Ok(Coefficients { block_dim, blocks })
    }

    /// Scalar coefficients from `(label, value)` pairs.
    pub fn scalar(values: &[(&str, Complex64)]) -> Self {
        let blocks = values
            .iter()
            .map(|(label, z)| (label.to_string(), Array2::from_elem((1, 1), *z)))
            .collect();
        Coefficients {
            block_dim: 1,
            blocks,
        }
    }

    /// The delta coefficient: identity block on `label`, zero elsewhere.
    pub fn delta(m: &Monoid, label: &str, block_dim: usize) -> Self {
        let blocks = m
            .names()
            .iter()
            .map(|name| {
                let block = if name == label {
                    Array2::eye(block_dim)
                } else {
                    Array2::zeros((block_dim, block_dim))
                };
                (name.clone(), block)
            })
            .collect();
        Coefficients { block_dim, blocks }
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn blocks(&self) -> &IndexMap<String, Array2<Complex64>> {
        &self.blocks
    }

    pub fn block(&self, label: &str) -> Option<&Array2<Complex64>> {
        self.blocks.get(label)
    }

    pub(crate) fn covers_exactly_labels<'a>(
        &self,
        labels: impl Iterator<Item = &'a str>,
    ) -> Result<()> {
        let mut want: Vec<&str> = labels.collect();
        let mut have: Vec<&str> = self.blocks.keys().map(|s| s.as_str()).collect();
        want.sort_unstable();
        have.sort_unstable();
        if want != have {
            return Err(Error::LabelMismatch(
                "coefficients do not cover exactly the arrow labels".into(),
            ));
        }
        Ok(())
    }

    /// Re-keys coefficients by the monoid elements of a completion: blocks of
    /// labels aliasing the same element are summed, and elements without an
    /// original label are padded with zero blocks.
    pub fn align_to_monoid(&self, aliases: &IndexMap<String, usize>, m: &Monoid) -> Result<Self> {
        let d = self.block_dim;
        let mut blocks: Vec<Array2<Complex64>> = vec![Array2::zeros((d, d)); m.len()];
        for (label, block) in &self.blocks {
            let &idx = aliases
                .get(label)
                .ok_or_else(|| Error::LabelMismatch(format!("unknown arrow label `{label}`")))?;
            blocks[idx] = &blocks[idx] + block;
        }
        Ok(Coefficients {
            block_dim: d,
            blocks: m
                .names()
                .iter()
                .cloned()
                .zip(blocks)
                .collect(),
        })
    }
}

/// A dense linear admissible map, block `(p, sigma(p))` accumulating the
/// coefficient of each arrow `sigma`.
#[derive(Debug, Clone)]
pub struct AdmissibleMatrix {
    pub matrix: Array2<Complex64>,
    pub node_count: usize,
    pub block_dim: usize,
}

/// Assembles the admissible map of `net` for the given coefficients.
pub fn build_admissible(net: &Network, c: &Coefficients) -> Result<AdmissibleMatrix> {
    c.covers_exactly_labels(net.labels())?;
    let n = net.node_count();
    let m = c.block_dim();
    let mut matrix = Array2::zeros((n * m, n * m));
    for (label, map) in net.arrows() {
        let block = &c.blocks()[label.as_str()];
        for p in 0..n {
            let q = map.apply(p);
            for i in 0..m {
                for j in 0..m {
                    matrix[[p * m + i, q * m + j]] += block[[i, j]];
                }
            }
        }
    }
    Ok(AdmissibleMatrix {
        matrix,
        node_count: n,
        block_dim: m,
    })
}

/// The coefficient product matching composition of admissible maps:
/// `(C ∘_Σ D)_sigma = Σ_{kappa ∘ tau = sigma} C_tau D_kappa`, so that
/// `Γ_{C ∘_Σ D} = Γ_C Γ_D`.
pub fn sigma_product(c: &Coefficients, d: &Coefficients, m: &Monoid) -> Result<Coefficients> {
    if c.block_dim() != d.block_dim() {
        return Err(Error::DimMismatch(c.block_dim(), d.block_dim()));
    }
    let names: Vec<&str> = m.names().iter().map(|s| s.as_str()).collect();
    c.covers_exactly_labels(names.iter().copied())?;
    d.covers_exactly_labels(names.iter().copied())?;
    let dim = c.block_dim();
    let mut out: Vec<Array2<Complex64>> = vec![Array2::zeros((dim, dim)); m.len()];
    for tau in 0..m.len() {
        let c_block = &c.blocks()[names[tau]];
        for kappa in 0..m.len() {
            let d_block = &d.blocks()[names[kappa]];
            let sigma = m.compose(kappa, tau);
            out[sigma] = &out[sigma] + &c_block.dot(d_block);
        }
    }
    Coefficients::new(
        dim,
        m.names().iter().cloned().zip(out).collect(),
    )
}

/// Self-loop counts per arrow label, in arrow order. The trace of any
/// admissible map is `Σ_sigma count_sigma · tr(C_sigma)`.
pub fn trace_functional(net: &Network) -> Vec<(String, i64)> {
    net.arrows()
        .iter()
        .map(|(label, map)| (label.clone(), map.fixed_points() as i64))
        .collect()
}

/// The symmetry operators of the fundamental network:
/// `(A_sigma X)_tau = X_{tau ∘ sigma}`, a monoid representation with
/// `A_e = I` and `A_sigma A_tau = A_{sigma ∘ tau}`.
pub fn symmetry_operators(m: &Monoid) -> Vec<Array2<Complex64>> {
    let k = m.len();
    (0..k)
        .map(|sigma| {
            let mut a = Array2::zeros((k, k));
            for tau in 0..k {
                a[[tau, m.compose(tau, sigma)]] = Complex64::new(1.0, 0.0);
            }
            a
        })
        .collect()
}

/// The generator operators `rho_sigma = Γ_{delta_sigma}` with scalar
/// coefficients: entry `(tau, sigma ∘ tau) = 1`. They span the algebra of
/// scalar admissible maps of the fundamental network and obey the
/// opposite-monoid law `rho_tau rho_kappa = rho_{kappa ∘ tau}`.
pub fn generator_operators(m: &Monoid) -> Vec<Array2<Complex64>> {
    let k = m.len();
    (0..k)
        .map(|sigma| {
            let mut r = Array2::zeros((k, k));
            for tau in 0..k {
                r[[tau, m.compose(sigma, tau)]] = Complex64::new(1.0, 0.0);
            }
            r
        })
        .collect()
}

/// Whether `matrix` commutes with every block-inflated symmetry operator,
/// within `1e-10 · ‖matrix‖`.
pub fn check_equivariance(m: &Monoid, matrix: &Array2<Complex64>) -> Result<bool> {
    let k = m.len();
    let size = matrix.nrows();
    if matrix.ncols() != size || !size.is_multiple_of(k) || size == 0 {
        return Err(Error::SizeMismatch { size, blocks: k });
    }
    let inflate = size / k;
    let tol = 1e-10 * frobenius(matrix);
    for a in symmetry_operators(m) {
        let a_big = kron(&a, &Array2::eye(inflate));
        let comm = &a_big.dot(matrix) - &matrix.dot(&a_big);
        if frobenius(&comm) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Kronecker product, with `a` indexing the coarse blocks.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let scale = a[[i, j]];
            if scale == Complex64::new(0.0, 0.0) {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[[i * br + p, j * bc + q]] = scale * b[[p, q]];
                }
            }
        }
    }
    out
}

pub fn frobenius(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
