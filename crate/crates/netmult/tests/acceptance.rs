//! End-to-end acceptance suite. Each test prints one PASS line on success
//! (visible with `cargo test --test acceptance -- --nocapture`); a failed
//! assertion is the FAIL line.

use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;

use netmult::io::parse_network;
use netmult::spectral::draw_coefficients;
use netmult::{
    build_admissible, characters, circulant_multipliers, circulant_network, completion,
    dense_spectrum, enumerate_balanced_partitions, evaluate, fundamental_network, match_spectra,
    multipliers, multiplicities, predicted_spectrum, quotient, sigma_product,
    trace_functional, verify_network, Coefficients, Monoid, MultiplierSet, Network,
};

fn fixture(name: &str) -> Network {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    parse_network(&std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {path}")))
        .expect("fixture parses")
}

fn pipeline(net: &Network, seed: u64) -> (Monoid, MultiplierSet) {
    let comp = completion(net).expect("fixtures complete");
    let ms = multipliers(&comp.monoid, seed).expect("pipeline succeeds");
    (comp.monoid, ms)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn char_rows(ms: &MultiplierSet) -> Vec<Vec<Complex64>> {
    let chars = characters(ms);
    (0..ms.len()).map(|l| chars.row(l).to_vec()).collect()
}

fn row_close(row: &[Complex64], want: &[f64]) -> bool {
    row.len() == want.len()
        && row
            .iter()
            .zip(want)
            .all(|(z, w)| (z - c(*w)).norm() <= 1e-9)
}

/// Runs the oracle campaign, asserts every check and draw passed, and
/// optionally pins an absolute bound on the worst matched distance.
fn oracle_campaign(
    net: &Network,
    ms: &MultiplierSet,
    trials: usize,
    dims: &[usize],
    seed: u64,
    tol: f64,
    absolute_bound: Option<f64>,
) -> f64 {
    let outcome = verify_network(net, ms, trials, dims, seed, tol).expect("campaign runs");
    assert!(
        outcome.all_pass(),
        "verification checks failed: {:?}",
        outcome
            .checks
            .iter()
            .filter(|ch| !ch.pass)
            .collect::<Vec<_>>()
    );
    let worst = outcome
        .worst_report()
        .map(|r| r.max_match_distance)
        .unwrap_or(0.0);
    if let Some(bound) = absolute_bound {
        assert!(worst <= bound, "worst matched distance {worst:.3e} above {bound:.0e}");
    }
    worst
}

#[test]
fn criterion_1_fig2x_multiplicities_and_oracle() {
    let start = Instant::now();
    let net = fixture("fig2x");
    let (m, ms) = pipeline(&net, 0);
    assert_eq!(m.len(), 6);
    assert_eq!(ms.sizes(), vec![1, 1]);
    // multipliers (Σ-sum, A): characters (1,1,1,1,1,1) and (1,0,0,0,0,0)
    let rows = char_rows(&ms);
    assert!(row_close(&rows[0], &[1.0; 6]));
    assert!(row_close(&rows[1], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    let mult = multiplicities(&net, &ms).unwrap();
    assert_eq!(mult.as_slice(), &[1, 3]);
    let worst = oracle_campaign(&net, &ms, 50, &[1], 10, 1e-6, Some(1e-6));
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "criterion 1 took {elapsed:?}, budget 1 s"
    );
    println!(
        "ACCEPTANCE 1: PASS  fig2x multiplicities (1,3); 50 draws, worst distance {worst:.2e}; {elapsed:?}"
    );
}

#[test]
fn criterion_2_running_example_closure_characters_multiplicities() {
    let fig2 = fixture("fig2");
    let comp = completion(&fig2).unwrap();
    assert_eq!(comp.monoid.len(), 5);

    let (m, ms) = pipeline(&fixture("fig3left"), 0);
    assert_eq!(m.len(), 5);
    let rows = char_rows(&ms);
    let expected: [&[f64]; 3] = [
        &[1.0, 1.0, 1.0, 1.0, 1.0],
        &[1.0, 1.0, 0.0, 0.0, 0.0],
        &[1.0, -1.0, 0.0, 0.0, 0.0],
    ];
    for want in expected {
        assert!(
            rows.iter().any(|row| row_close(row, want)),
            "character row {want:?} missing"
        );
    }
    let gamma = multiplicities(&fixture("fig3left"), &ms).unwrap();
    assert_eq!(gamma.as_slice(), &[1, 1, 1]);
    let fund = fundamental_network(&m);
    let big = multiplicities(&fund, &ms).unwrap();
    assert_eq!(big.as_slice(), &[1, 2, 2]);
    println!("ACCEPTANCE 2: PASS  closure size 5, characters match, multiplicities (1,1,1) and (1,2,2)");
}

#[test]
fn criterion_3_fig5_left_multiplicities_and_spectrum() {
    let net = fixture("fig5left");
    let m = completion(&fixture("fig3left")).unwrap().monoid;
    let ms = multipliers(&m, 0).unwrap();
    let mult = multiplicities(&net, &ms).unwrap();
    assert_eq!(mult.as_slice(), &[1, 3, 1]);

    // spectrum equals {A+B+C+D+E, (A+B) x3, A-B} on 50 random scalar draws
    let mut worst = 0.0f64;
    for trial in 0..50u64 {
        let mut rng = netmult::seeding::derive_rng(30, netmult::seeding::TAG_TEST, trial, 0);
        let coeffs = draw_coefficients(&m, 1, &mut rng);
        let get = |l: &str| coeffs.block(l).unwrap()[[0, 0]];
        let (a, b, cc, d, o) = (get("e"), get("b"), get("c"), get("d"), get("o"));
        let mut formula = vec![a + b + cc + d + o, a - b];
        formula.extend(std::iter::repeat_n(a + b, 3));
        let oracle = dense_spectrum(&build_admissible(&net, &coeffs).unwrap().matrix).unwrap();
        let (ok, dist) = match_spectra(&formula, &oracle, 1e-6);
        assert!(ok, "trial {trial}: closed-form spectrum mismatch ({dist:.3e})");
        let predicted = predicted_spectrum(&net, &ms, &coeffs).unwrap();
        let (ok, dist2) = match_spectra(&predicted, &oracle, 1e-6);
        assert!(ok, "trial {trial}: pipeline spectrum mismatch ({dist2:.3e})");
        worst = worst.max(dist).max(dist2);
    }
    assert!(worst <= 1e-6);
    println!("ACCEPTANCE 3: PASS  fig5left multiplicities (1,3,1); 50 draws, worst distance {worst:.2e}");
}

#[test]
fn criterion_4_exam44_multipliers_and_fundamental_multiplicities() {
    let (m, ms) = pipeline(&fixture("exam44"), 0);
    let rows = char_rows(&ms);
    let expected: [&[f64]; 3] = [
        &[1.0, 1.0, 1.0, 1.0, 1.0],
        &[1.0, 1.0, 0.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0, 0.0],
    ];
    for want in expected {
        assert!(
            rows.iter().any(|row| row_close(row, want)),
            "character row {want:?} missing"
        );
    }
    let fund = fundamental_network(&m);
    let mult = multiplicities(&fund, &ms).unwrap();
    assert_eq!(mult.as_slice(), &[1, 2, 2]);
    println!("ACCEPTANCE 4: PASS  exam44 multipliers {{sum, A+B, A}}, fundamental multiplicities (1,2,2)");
}

#[test]
fn criterion_5_exam49_family_instance() {
    let net = fixture("exam49");
    let (_, ms) = pipeline(&net, 0);
    assert_eq!(ms.sizes(), vec![1, 1]);
    let rows = char_rows(&ms);
    assert!(row_close(&rows[0], &[1.0; 7]));
    assert!(row_close(&rows[1], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    let mult = multiplicities(&net, &ms).unwrap();
    assert_eq!(mult.as_slice(), &[1, 3]);
    let worst = oracle_campaign(&net, &ms, 50, &[1, 2], 50, 1e-6, None);
    println!("ACCEPTANCE 5: PASS  exam49 multiplicities (1,3); 50 draws x dims {{1,2}}, worst {worst:.2e}");
}

#[test]
fn criterion_6_exam410_instance() {
    let net = fixture("exam410");
    let (m, ms) = pipeline(&net, 0);
    // the published instance: eigenvalues are the sum once, A+B twice, A three times
    let mult = multiplicities(&net, &ms).unwrap();
    assert_eq!(mult.as_slice(), &[1, 2, 3]);
    let coeffs = Coefficients::scalar(&[
        ("A", c(1.0)),
        ("B", c(10.0)),
        ("C", c(100.0)),
        ("D", c(0.0)),
        ("E", c(0.0)),
        ("F", c(0.0)),
        ("G", c(0.0)),
        ("H", c(0.0)),
    ]);
    let predicted = predicted_spectrum(&net, &ms, &coeffs).unwrap();
    let want = [c(111.0), c(11.0), c(11.0), c(1.0), c(1.0), c(1.0)];
    let (ok, _) = match_spectra(&predicted, &want, 1e-9);
    assert!(ok, "instance multiset mismatch: {predicted:?}");
    let _ = m;
    let worst = oracle_campaign(&net, &ms, 50, &[1], 60, 1e-6, None);
    println!("ACCEPTANCE 6: PASS  exam410 multiplicities (1,2,3), listed multiset matches; worst {worst:.2e}");
}

#[test]
fn criterion_7_exam612_block_sizes_characters_oracle() {
    let net = fixture("exam612");
    let (_, ms) = pipeline(&net, 0);
    assert_eq!(ms.sizes(), vec![1, 1, 2]);
    let mult = multiplicities(&net, &ms).unwrap();
    assert_eq!(mult.as_slice(), &[1, 1, 3]);
    let rows = char_rows(&ms);
    assert!(row_close(&rows[2], &[2.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]));
    let worst = oracle_campaign(&net, &ms, 50, &[1, 2], 70, 1e-6, None);
    println!("ACCEPTANCE 7: PASS  exam612 sizes (1,1,2), multiplicities (1,1,3), chi_3 matches; worst {worst:.2e}");
}

#[test]
fn criterion_8_circulant_rings_match_the_dft() {
    let mut worst = 0.0f64;
    for n in 2..=8usize {
        let net = circulant_network(n);
        let closed = circulant_multipliers(n).unwrap();
        let m = completion(&net).unwrap().monoid;
        let pipe = multipliers(&m, 0).unwrap();
        assert_eq!(pipe.sizes(), vec![1; n]);

        // characters match the DFT rows after canonical reordering
        let ca = characters(&closed);
        let cb = characters(&pipe);
        let mut used = vec![false; n];
        for i in 0..n {
            let j = (0..n)
                .find(|&j| {
                    !used[j] && (0..n).all(|s| (ca[[i, s]] - cb[[j, s]]).norm() <= 1e-9)
                })
                .unwrap_or_else(|| panic!("n={n}: closed-form row {i} unmatched"));
            used[j] = true;
        }

        for &dim in &[1usize, 2, 3] {
            for trial in 0..5u64 {
                let mut rng = netmult::seeding::derive_rng(80 + n as u64, netmult::seeding::TAG_TEST, dim as u64 * 100 + trial, 0);
                let coeffs = draw_coefficients(&m, dim, &mut rng);
                let predicted = predicted_spectrum(&net, &pipe, &coeffs).unwrap();
                let oracle =
                    dense_spectrum(&build_admissible(&net, &coeffs).unwrap().matrix).unwrap();
                let (ok, dist) = match_spectra(&predicted, &oracle, 1e-6);
                assert!(ok, "n={n} dim={dim} trial={trial}: distance {dist:.3e}");
                worst = worst.max(dist);
            }
        }
    }
    println!("ACCEPTANCE 8: PASS  circulant n=2..8 match the DFT; worst oracle distance {worst:.2e}");
}

fn fixture_networks() -> Vec<Network> {
    vec![
        fixture("fig2x"),
        fixture("fig3left"),
        fixture("exam44"),
        fixture("exam49"),
        fixture("exam410"),
        fixture("exam612"),
    ]
}

#[test]
fn criterion_9a_multiplicativity_suite() {
    let start = Instant::now();
    let seed = 900u64;
    let mut cases = 0usize;
    for (f, net) in fixture_networks().iter().enumerate() {
        let (m, ms) = pipeline(net, 0);
        for dim in [1usize, 2, 3] {
            for trial in 0..12u64 {
                let mut rng = netmult::seeding::derive_rng(seed + f as u64, netmult::seeding::TAG_TEST, dim as u64 * 1000 + trial, 0);
                let cc = draw_coefficients(&m, dim, &mut rng);
                let dd = draw_coefficients(&m, dim, &mut rng);
                let prod = sigma_product(&cc, &dd, &m).unwrap();
                for l in 0..ms.len() {
                    let lhs = evaluate(&ms, l, &cc)
                        .unwrap()
                        .dot(&evaluate(&ms, l, &dd).unwrap());
                    let rhs = evaluate(&ms, l, &prod).unwrap();
                    let scale = lhs.iter().map(|z| z.norm()).fold(1.0, f64::max);
                    let err = (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    assert!(err <= 1e-9 * scale, "block {l} dim {dim}: {err:.3e}");
                }
                cases += 1;
            }
        }
    }
    assert!(cases >= 200, "only {cases} cases");
    println!(
        "ACCEPTANCE 9a: PASS  multiplicativity, {cases} cases (seed {seed}), {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_9b_composition_suite() {
    let start = Instant::now();
    let seed = 910u64;
    let mut cases = 0usize;
    for (f, net) in fixture_networks().iter().enumerate() {
        let m = completion(net).unwrap().monoid;
        for dim in [1usize, 2, 3] {
            for trial in 0..12u64 {
                let mut rng = netmult::seeding::derive_rng(seed + f as u64, netmult::seeding::TAG_TEST, dim as u64 * 1000 + trial, 0);
                let cc = draw_coefficients(&m, dim, &mut rng);
                let dd = draw_coefficients(&m, dim, &mut rng);
                let prod = sigma_product(&cc, &dd, &m).unwrap();
                let lhs = build_admissible(net, &cc)
                    .unwrap()
                    .matrix
                    .dot(&build_admissible(net, &dd).unwrap().matrix);
                let rhs = build_admissible(net, &prod).unwrap().matrix;
                let scale = lhs.iter().map(|z| z.norm()).fold(1.0, f64::max);
                let err = (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(err <= 1e-12 * scale, "dim {dim}: {err:.3e}");
                cases += 1;
            }
        }
    }
    assert!(cases >= 200, "only {cases} cases");
    println!(
        "ACCEPTANCE 9b: PASS  composition identity, {cases} cases (seed {seed}), {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_9c_trace_identity_suite() {
    let start = Instant::now();
    let seed = 920u64;
    let mut cases = 0usize;
    for (f, net) in fixture_networks().iter().enumerate() {
        let (m, ms) = pipeline(net, 0);
        let chars = characters(&ms);
        let mult = multiplicities(net, &ms).unwrap();
        // symbolic: the self-loop counts equal Σ m_l chi_l entrywise
        let counts: std::collections::HashMap<String, i64> =
            trace_functional(net).into_iter().collect();
        for (s, name) in m.names().iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, &m_l) in mult.as_slice().iter().enumerate() {
                acc += c(m_l as f64) * chars[[l, s]];
            }
            assert!((acc - c(counts[name] as f64)).norm() <= 1e-9);
        }
        // float route: tr(admissible) = Σ count_sigma tr(C_sigma) on random draws
        for dim in [1usize, 2, 3] {
            for trial in 0..12u64 {
                let mut rng = netmult::seeding::derive_rng(seed + f as u64, netmult::seeding::TAG_TEST, dim as u64 * 1000 + trial, 0);
                let cc = draw_coefficients(&m, dim, &mut rng);
                let built = build_admissible(net, &cc).unwrap().matrix;
                let tr: Complex64 = built.diag().iter().sum();
                let mut expect = Complex64::new(0.0, 0.0);
                for (label, count) in trace_functional(net) {
                    let block_tr: Complex64 = cc.block(&label).unwrap().diag().iter().sum();
                    expect += c(count as f64) * block_tr;
                }
                assert!((tr - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
                cases += 1;
            }
        }
    }
    assert!(cases >= 200, "only {cases} cases");
    println!(
        "ACCEPTANCE 9c: PASS  trace identity, {cases} cases (seed {seed}), {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_9d_multiplicity_sum_and_quotient_monotonicity() {
    let start = Instant::now();
    let mut sum_cases = 0usize;
    let mut mono_cases = 0usize;
    let seeds: Vec<u64> = (0..10).collect();
    for net in fixture_networks() {
        let m = completion(&net).unwrap().monoid;
        for &seed in &seeds {
            let ms = multipliers(&m, seed).unwrap();
            let full = multiplicities(&net, &ms).unwrap();
            let weighted: usize = full
                .as_slice()
                .iter()
                .zip(ms.sizes())
                .map(|(m_l, n_l)| m_l * n_l)
                .sum();
            assert_eq!(weighted, net.node_count());
            sum_cases += 1;
            for part in enumerate_balanced_partitions(&net, 12).unwrap() {
                let (qnet, _) = quotient(&net, &part).unwrap();
                let qm = multiplicities(&qnet, &ms).unwrap();
                let qweighted: usize = qm
                    .as_slice()
                    .iter()
                    .zip(ms.sizes())
                    .map(|(m_l, n_l)| m_l * n_l)
                    .sum();
                assert_eq!(qweighted, qnet.node_count());
                sum_cases += 1;
                for l in 0..ms.len() {
                    assert!(
                        qm.as_slice()[l] <= full.as_slice()[l],
                        "monotonicity broken at block {l}"
                    );
                }
                mono_cases += 1;
            }
        }
    }
    assert!(sum_cases >= 200, "only {sum_cases} sum cases");
    assert!(mono_cases >= 200, "only {mono_cases} monotonicity cases");
    println!(
        "ACCEPTANCE 9d: PASS  Σ m_l n_l = #N ({sum_cases} cases), quotient monotonicity ({mono_cases} cases), seeds 0..9, {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_9e_fundamental_positivity_and_seed_invariance() {
    let start = Instant::now();
    let mut positive_cases = 0usize;
    let mut invariance_cases = 0usize;
    for net in fixture_networks() {
        let m = completion(&net).unwrap().monoid;
        let fund = fundamental_network(&m);
        let reference = multipliers(&m, 0).unwrap();
        let ref_chars = characters(&reference);
        for seed in 0..35u64 {
            let ms = multipliers(&m, seed).unwrap();
            let mult = multiplicities(&fund, &ms).unwrap();
            assert!(
                mult.as_slice().iter().all(|&x| x > 0),
                "seed {seed}: fundamental multiplicity vanished"
            );
            positive_cases += 1;
            assert_eq!(ms.sizes(), reference.sizes());
            let chars = characters(&ms);
            let diff = (&chars - &ref_chars)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-9, "seed {seed}: characters moved by {diff:.3e}");
            invariance_cases += 1;
        }
    }
    assert!(positive_cases >= 200, "only {positive_cases} cases");
    assert!(invariance_cases >= 200, "only {invariance_cases} cases");
    println!(
        "ACCEPTANCE 9e: PASS  fundamental positivity ({positive_cases} cases), seed invariance ({invariance_cases} cases), seeds 0..34, {:?}",
        start.elapsed()
    );
}

#[test]
fn criterion_9f_unit_delta_sanity() {
    // delta_e coefficients with identity blocks: every spectrum is all ones
    for net in fixture_networks() {
        let (m, ms) = pipeline(&net, 0);
        for dim in [1usize, 2] {
            let delta = Coefficients::delta(&m, m.name(m.unit()), dim);
            let spectrum = predicted_spectrum(&net, &ms, &delta).unwrap();
            assert_eq!(spectrum.len(), net.node_count() * dim);
            assert!(spectrum.iter().all(|z| (z - c(1.0)).norm() <= 1e-9));
            let built = build_admissible(&net, &delta).unwrap().matrix;
            assert_eq!(built, Array2::eye(net.node_count() * dim));
        }
    }
    println!("ACCEPTANCE 9f: PASS  unit coefficients give the identity spectrum on all fixtures");
}
