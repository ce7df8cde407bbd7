//! Multiplicity solve, spectrum prediction and the oracle harness: integer
//! multiplicities from the trace functional, predicted spectra as unions of
//! multiplier eigenvalues, and randomized comparison against a dense
//! nonsymmetric eigensolver.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, LeastSquaresSvd};
use num_complex::Complex64;

use crate::admissible::{build_admissible, sigma_product, trace_functional, Coefficients};
use crate::error::{Error, Result};
use crate::multiplier::{characters, evaluate, MultiplierSet, SimpleBlock};
use crate::network::{
    circulant_network, enumerate_balanced_partitions, is_constructible, quotient, Monoid, Network,
    DEFAULT_ENUMERATION_GATE,
};
use crate::seeding::{derive_rng, gaussian_matrix, TAG_VERIFY};

/// Integer multiplicities aligned with the blocks of a `MultiplierSet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityVector(pub Vec<usize>);

impl MultiplicityVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Per-draw comparison of a predicted spectrum against the dense oracle.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub predicted: Vec<Complex64>,
    pub oracle: Vec<Complex64>,
    pub max_match_distance: f64,
    pub multiplicities: MultiplicityVector,
    pub pass: bool,
}

/// Solves `trace_functional(net) = Σ_l m_l · chi_l` for the integer
/// multiplicities. The characters are linearly independent, so the least
/// squares solution is unique; it must round to nonnegative integers with
/// `Σ m_l n_l` equal to the node count.
pub fn multiplicities(net: &Network, ms: &MultiplierSet) -> Result<MultiplicityVector> {
    if !is_constructible(net, ms.monoid())? {
        return Err(Error::NotConstructible(
            "the labelled input maps break a monoid relation".into(),
        ));
    }
    let m = ms.monoid();
    let k = ms.len();
    let t: Vec<f64> = {
        let by_label: std::collections::HashMap<String, i64> =
            trace_functional(net).into_iter().collect();
        m.names().iter().map(|name| by_label[name] as f64).collect()
    };

    let chars = characters(ms);
    let mut a = Array2::zeros((m.len(), k));
    for s in 0..m.len() {
        for l in 0..k {
            a[[s, l]] = chars[[l, s]];
        }
    }
    let b = Array1::from_iter(t.iter().map(|&x| Complex64::new(x, 0.0)));
    let solution = a
        .least_squares(&b)
        .map_err(|e| Error::Linalg(format!("least squares failed: {e}")))?
        .solution;

    let residual = {
        let fitted = a.dot(&solution);
        (&fitted - &b).iter().map(|z| z.norm()).fold(0.0f64, f64::max)
    };
    if residual > 1e-6 {
        return Err(Error::InconsistentTrace(format!(
            "trace decomposition residual {residual:.3e}"
        )));
    }
    let mut out = Vec::with_capacity(k);
    for l in 0..k {
        let z = solution[l];
        let rounded = z.re.round();
        if z.im.abs() > 1e-6 || (z.re - rounded).abs() > 1e-6 || rounded < -0.5 {
            return Err(Error::InconsistentTrace(format!(
                "multiplicity {l} solves to {z}, not a nonnegative integer"
            )));
        }
        out.push(rounded.max(0.0) as usize);
    }
    let weighted: usize = out
        .iter()
        .zip(ms.sizes())
        .map(|(m_l, n_l)| m_l * n_l)
        .sum();
    if weighted != net.node_count() {
        return Err(Error::InconsistentTrace(format!(
            "Σ m_l n_l = {weighted} but the network has {} nodes",
            net.node_count()
        )));
    }
    Ok(MultiplicityVector(out))
}

/// The predicted spectrum: the union over blocks of `m_l` copies of the
/// eigenvalues of `Λ^l(C)`.
pub fn predicted_spectrum(
    net: &Network,
    ms: &MultiplierSet,
    c: &Coefficients,
) -> Result<Vec<Complex64>> {
    let mult = multiplicities(net, ms)?;
    predicted_spectrum_with(ms, &mult, c)
}

/// As [`predicted_spectrum`], with the multiplicities already solved.
pub fn predicted_spectrum_with(
    ms: &MultiplierSet,
    mult: &MultiplicityVector,
    c: &Coefficients,
) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (l, &m_l) in mult.as_slice().iter().enumerate() {
        if m_l == 0 {
            continue;
        }
        let vals = dense_spectrum(&evaluate(ms, l, c)?)?;
        for _ in 0..m_l {
            out.extend_from_slice(&vals);
        }
    }
    Ok(out)
}

/// All eigenvalues, with algebraic multiplicity, via the dense nonsymmetric
/// eigensolver. This is the oracle the reduction is verified against.
pub fn dense_spectrum(matrix: &Array2<Complex64>) -> Result<Vec<Complex64>> {
    if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entry"));
    }
    if matrix.nrows() == 0 {
        return Ok(Vec::new());
    }
    let (vals, _) = matrix
        .eig()
        .map_err(|e| Error::Linalg(format!("eigendecomposition failed: {e}")))?;
    Ok(vals.to_vec())
}

/// Greedy matching of two eigenvalue multisets: both sides are sorted by
/// `(re, im)`, then each value claims its nearest unused partner. Passes iff
/// the sizes agree and every matched pair is within `tol · (1 + max modulus)`.
pub fn match_spectra(a: &[Complex64], b: &[Complex64], tol: f64) -> (bool, f64) {
    if a.len() != b.len() {
        return (false, f64::INFINITY);
    }
    let sort_key = |z: &Complex64| (z.re, z.im);
    let mut left = a.to_vec();
    let mut right = b.to_vec();
    left.sort_by(|x, y| sort_key(x).partial_cmp(&sort_key(y)).unwrap());
    right.sort_by(|x, y| sort_key(x).partial_cmp(&sort_key(y)).unwrap());
    let mut used = vec![false; right.len()];
    let mut max_distance = 0.0f64;
    for z in &left {
        let mut best = None;
        let mut best_dist = f64::INFINITY;
        for (j, w) in right.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (z - w).norm();
            if d < best_dist {
                best_dist = d;
                best = Some(j);
            }
        }
        let Some(j) = best else {
            return (false, f64::INFINITY);
        };
        used[j] = true;
        max_distance = max_distance.max(best_dist);
    }
    let scale = 1.0
        + a.iter()
            .chain(b.iter())
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
    (max_distance <= tol * scale, max_distance)
}

/// As [`match_spectra`], but repeated predicted eigenvalues are compared
/// against the mean of their oracle cluster. The individual eigenvalues of a
/// defective cluster scatter like `eps^(1/k)` under any backward-stable
/// eigensolver while their mean stays first-order accurate, so comparing
/// means keeps the multiset test meaningful at tight tolerances.
pub fn match_spectra_clustered(
    predicted: &[Complex64],
    oracle: &[Complex64],
    tol: f64,
) -> (bool, f64) {
    if predicted.len() != oracle.len() {
        return (false, f64::INFINITY);
    }
    let scale = 1.0
        + predicted
            .iter()
            .chain(oracle.iter())
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);

    // group the predicted values; they are exact up to roundoff
    let mut sorted = predicted.to_vec();
    sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in sorted {
        match clusters.last_mut() {
            Some((mean, count)) if (*mean - z).norm() <= tol * scale => {
                *mean = (*mean * (*count as f64) + z) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => clusters.push((z, 1)),
        }
    }
    // larger clusters claim their oracle values first
    clusters.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then((a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap())
    });

    let mut used = vec![false; oracle.len()];
    let mut collapsed_pred = Vec::with_capacity(clusters.len());
    let mut collapsed_orac = Vec::with_capacity(clusters.len());
    for (mean, count) in clusters {
        let mut chosen: Vec<usize> = (0..oracle.len()).filter(|&j| !used[j]).collect();
        chosen.sort_by(|&a, &b| {
            (oracle[a] - mean)
                .norm()
                .partial_cmp(&(oracle[b] - mean).norm())
                .unwrap()
        });
        chosen.truncate(count);
        let mut acc = Complex64::new(0.0, 0.0);
        for &j in &chosen {
            used[j] = true;
            acc += oracle[j];
        }
        collapsed_pred.push(mean);
        collapsed_orac.push(acc / count as f64);
    }
    match_spectra(&collapsed_pred, &collapsed_orac, tol)
}

/// The closed-form multiplier set of the ring network on `n` nodes: `n`
/// one-dimensional blocks with coefficients `a^{k,j} = omega^{jk}`, indexed
/// by the same labels as [`circulant_network`]. Bypasses the reduction
/// pipeline.
pub fn circulant_multipliers(n: usize) -> Result<MultiplierSet> {
    let net = circulant_network(n);
    let crate::network::Completion { monoid, .. } = crate::network::completion(&net)?;
    debug_assert_eq!(monoid.len(), n);
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    // k = n is the trivial block (all coefficients 1); it comes first, the
    // remaining frequencies follow in natural order.
    let mut order = vec![n];
    order.extend(1..n);
    let blocks: Vec<SimpleBlock> = order
        .into_iter()
        .map(|k| {
            let images = (0..n)
                .map(|j| Array2::from_elem((1, 1), omega.powu((j * k % n) as u32)))
                .collect();
            MultiplierSet::block_from_parts(1, images)
        })
        .collect();
    Ok(MultiplierSet::from_parts(monoid, blocks, 0))
}

/// One named check of the verification campaign.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
}

/// Outcome of a verification campaign: per-draw spectral reports plus the
/// aggregated identity checks.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub reports: Vec<SpectralReport>,
    pub checks: Vec<CheckResult>,
    pub multiplicities: MultiplicityVector,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.reports.iter().all(|r| r.pass)
    }

    /// The report with the largest matched distance, for diagnosis.
    pub fn worst_report(&self) -> Option<&SpectralReport> {
        self.reports.iter().max_by(|a, b| {
            a.max_match_distance
                .partial_cmp(&b.max_match_distance)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    }
}

/// Verifies the reduction on a constructible network: for every trial and
/// block dimension, coefficients with independent standard complex Gaussian
/// entries are drawn from the seeded stream and the predicted spectrum is
/// compared against the dense oracle; multiplicativity and composition
/// identities are checked alongside, and multiplicity monotonicity is
/// checked on every balanced partition within the enumeration gate.
pub fn verify_network(
    net: &Network,
    ms: &MultiplierSet,
    trials: usize,
    block_dims: &[usize],
    seed: u64,
    tol: f64,
) -> Result<VerifyOutcome> {
    let mult = multiplicities(net, ms)?;
    let m = ms.monoid();
    let mut reports = Vec::new();
    let mut checks = Vec::new();

    let weighted: usize = mult
        .as_slice()
        .iter()
        .zip(ms.sizes())
        .map(|(m_l, n_l)| m_l * n_l)
        .sum();
    checks.push(CheckResult {
        name: "multiplicity_sum".into(),
        pass: weighted == net.node_count(),
        value: Some(weighted as f64),
    });

    // trace identity: the functional must equal Σ m_l chi_l entrywise
    let trace_err = {
        let by_label: std::collections::HashMap<String, i64> =
            trace_functional(net).into_iter().collect();
        let chars = characters(ms);
        let mut worst = 0.0f64;
        for (s, name) in m.names().iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, &m_l) in mult.as_slice().iter().enumerate() {
                acc += Complex64::new(m_l as f64, 0.0) * chars[[l, s]];
            }
            worst = worst.max((acc - Complex64::new(by_label[name] as f64, 0.0)).norm());
        }
        worst
    };
    checks.push(CheckResult {
        name: "trace_identity".into(),
        pass: trace_err <= 1e-9,
        value: Some(trace_err),
    });

    let mut mult_err = 0.0f64;
    let mut comp_err = 0.0f64;
    for (dim_idx, &dim) in block_dims.iter().enumerate() {
        let mut worst_distance = 0.0f64;
        let mut all_pass = true;
        for trial in 0..trials {
            let mut rng = derive_rng(seed, TAG_VERIFY, dim_idx as u64, trial as u64);
            let c = draw_coefficients(m, dim, &mut rng);
            let d = draw_coefficients(m, dim, &mut rng);

            let predicted = predicted_spectrum_with(ms, &mult, &c)?;
            let oracle = dense_spectrum(&build_admissible(net, &c)?.matrix)?;
            // strict pairwise match first; defective clusters (eigensolver
            // scatter eps^(1/k)) fall back to the mean comparison
            let (pass, distance) = match match_spectra(&predicted, &oracle, tol) {
                (true, d) => (true, d),
                (false, _) => match_spectra_clustered(&predicted, &oracle, tol),
            };
            worst_distance = worst_distance.max(distance);
            all_pass &= pass;
            reports.push(SpectralReport {
                predicted,
                oracle,
                max_match_distance: distance,
                multiplicities: mult.clone(),
                pass,
            });

            let prod = sigma_product(&c, &d, m)?;
            for l in 0..ms.len() {
                let lhs = evaluate(ms, l, &c)?.dot(&evaluate(ms, l, &d)?);
                let rhs = evaluate(ms, l, &prod)?;
                let scale = lhs.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
                let err = (&lhs - &rhs)
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0f64, f64::max)
                    / scale;
                mult_err = mult_err.max(err);
            }
            {
                let lhs = build_admissible(net, &c)?
                    .matrix
                    .dot(&build_admissible(net, &d)?.matrix);
                let rhs = build_admissible(net, &prod)?.matrix;
                let scale = lhs.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
                let err = (&lhs - &rhs)
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0f64, f64::max)
                    / scale;
                comp_err = comp_err.max(err);
            }
        }
        checks.push(CheckResult {
            name: format!("spectra_match[m={dim}]"),
            pass: all_pass,
            value: Some(worst_distance),
        });
    }
    checks.push(CheckResult {
        name: "multiplicativity".into(),
        pass: mult_err <= 1e-9,
        value: Some(mult_err),
    });
    checks.push(CheckResult {
        name: "composition".into(),
        pass: comp_err <= 1e-12,
        value: Some(comp_err),
    });

    if net.node_count() <= DEFAULT_ENUMERATION_GATE {
        let mut monotone = true;
        for part in enumerate_balanced_partitions(net, DEFAULT_ENUMERATION_GATE)? {
            let (qnet, _) = quotient(net, &part)?;
            let qmult = multiplicities(&qnet, ms)?;
            monotone &= qmult
                .as_slice()
                .iter()
                .zip(mult.as_slice())
                .all(|(q, full)| q <= full);
        }
        checks.push(CheckResult {
            name: "quotient_monotonicity".into(),
            pass: monotone,
            value: None,
        });
    }

    Ok(VerifyOutcome {
        reports,
        checks,
        multiplicities: mult,
    })
}

/// Coefficients with independent standard complex Gaussian entries.
pub fn draw_coefficients(
    m: &Monoid,
    block_dim: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Coefficients {
    let blocks = m
        .names()
        .iter()
        .map(|name| (name.clone(), gaussian_matrix(rng, block_dim, block_dim)))
        .collect();
    Coefficients::new(block_dim, blocks).expect("gaussian draws are finite")
}
