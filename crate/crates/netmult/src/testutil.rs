//! Shared fixture constructors for the unit tests.

use indexmap::IndexMap;
use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::admissible::Coefficients;
use crate::network::{completion, InputMap, Monoid, Network};
use crate::seeding::complex_gaussian;

pub fn net(node_count: usize, arrows: &[(&str, &[usize])]) -> Network {
    let arrows = arrows
        .iter()
        .map(|(label, targets)| {
            (
                label.to_string(),
                InputMap::new(targets.iter().map(|&t| t - 1).collect()),
            )
        })
        .collect();
    Network::new(node_count, arrows).expect("fixture network must be valid")
}

pub fn monoid_of(network: &Network) -> Monoid {
    completion(network).unwrap().monoid
}

/// Three nodes; identity, one transposition, two constant maps.
pub fn fig2() -> Network {
    net(
        3,
        &[
            ("e", &[1, 2, 3]),
            ("b", &[1, 3, 2]),
            ("c", &[1, 1, 1]),
            ("d", &[3, 3, 3]),
        ],
    )
}

/// The completion of [`fig2`]; the added arrow is the constant map onto 2.
pub fn fig3_left() -> Network {
    net(
        3,
        &[
            ("e", &[1, 2, 3]),
            ("b", &[1, 3, 2]),
            ("c", &[1, 1, 1]),
            ("d", &[3, 3, 3]),
            ("o", &[2, 2, 2]),
        ],
    )
}

/// The fundamental network of the five-element monoid of [`fig3_left`].
pub fn fig3_right() -> Network {
    net(
        5,
        &[
            ("e", &[1, 2, 3, 4, 5]),
            ("b", &[2, 1, 3, 5, 4]),
            ("c", &[3, 3, 3, 3, 3]),
            ("d", &[4, 4, 4, 4, 4]),
            ("o", &[5, 5, 5, 5, 5]),
        ],
    )
}

/// A five-node constructible network for the same monoid; the `d` and `o`
/// arrows carry the same input map.
pub fn fig5_left() -> Network {
    net(
        5,
        &[
            ("e", &[1, 2, 3, 4, 5]),
            ("b", &[2, 1, 3, 4, 5]),
            ("c", &[3, 3, 3, 3, 3]),
            ("d", &[4, 4, 4, 4, 4]),
            ("o", &[4, 4, 4, 4, 4]),
        ],
    )
}

/// Four nodes, six arrow types; complete, with multipliers (sum, A).
pub fn fig2x() -> Network {
    net(
        4,
        &[
            ("A", &[1, 2, 3, 4]),
            ("B", &[1, 1, 1, 1]),
            ("C", &[2, 2, 2, 2]),
            ("D", &[3, 4, 4, 4]),
            ("E", &[3, 3, 3, 3]),
            ("F", &[4, 4, 4, 4]),
        ],
    )
}

/// Three nodes with an idempotent generator; multipliers (sum, A+B, A).
pub fn exam44() -> Network {
    net(
        3,
        &[
            ("A", &[1, 2, 3]),
            ("B", &[2, 2, 3]),
            ("C", &[1, 1, 1]),
            ("D", &[2, 2, 2]),
            ("E", &[3, 3, 3]),
        ],
    )
}

/// Four nodes, generator with `tau^3` constant; multipliers (sum, A).
pub fn exam49() -> Network {
    net(
        4,
        &[
            ("A", &[1, 2, 3, 4]),
            ("B", &[2, 3, 4, 4]),
            ("C", &[3, 4, 4, 4]),
            ("D", &[4, 4, 4, 4]),
            ("E", &[1, 1, 1, 1]),
            ("F", &[2, 2, 2, 2]),
            ("G", &[3, 3, 3, 3]),
        ],
    )
}

/// Six nodes, idempotent generator with a three-point image; multipliers
/// (sum, A+B, A).
pub fn exam410() -> Network {
    net(
        6,
        &[
            ("A", &[1, 2, 3, 4, 5, 6]),
            ("B", &[2, 2, 2, 5, 5, 6]),
            ("C", &[1, 1, 1, 1, 1, 1]),
            ("D", &[2, 2, 2, 2, 2, 2]),
            ("E", &[3, 3, 3, 3, 3, 3]),
            ("F", &[4, 4, 4, 4, 4, 4]),
            ("G", &[5, 5, 5, 5, 5, 5]),
            ("H", &[6, 6, 6, 6, 6, 6]),
        ],
    )
}

/// The eight-element fixture whose third multiplier is a 2x2 block.
pub fn exam612() -> Network {
    net(
        8,
        &[
            ("A", &[1, 2, 3, 4, 5, 6, 7, 8]),
            ("B", &[2, 6, 5, 2, 6, 6, 8, 6]),
            ("C", &[3, 4, 7, 7, 3, 8, 7, 7]),
            ("D", &[4, 8, 3, 4, 8, 8, 7, 8]),
            ("E", &[5, 2, 8, 8, 5, 6, 8, 8]),
            ("F", &[6, 6, 6, 6, 6, 6, 6, 6]),
            ("G", &[7, 7, 7, 7, 7, 7, 7, 7]),
            ("H", &[8, 8, 8, 8, 8, 8, 8, 8]),
        ],
    )
}

/// Coefficients with independent standard complex Gaussian entries, keyed by
/// the monoid element names.
pub fn random_blocks(m: &Monoid, dim: usize, seed: u64) -> Coefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: IndexMap<String, Array2<Complex64>> = m
        .names()
        .iter()
        .map(|name| {
            let block = Array2::from_shape_fn((dim, dim), |_| complex_gaussian(&mut rng));
            (name.clone(), block)
        })
        .collect();
    Coefficients::new(dim, blocks).unwrap()
}
