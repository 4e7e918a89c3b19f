//! Built-in test networks.
//!
//! The 39-bus New England system uses the benchmark branch reactances with
//! susceptance `1/x`. Generator buses 30 to 39 get inertia `2H/(2 pi 60)`
//! from the benchmark machine constants; every other bus gets `1e-4`. All
//! buses share the damping [`IEEE39_DAMPING`]. Bus `k` of the benchmark is
//! id `k - 1` here.

use crate::network::{Bus, Line, PowerNetwork};

pub const IEEE39_DAMPING: f64 = 0.025;
pub const IEEE39_LOAD_INERTIA: f64 = 1e-4;

/// Benchmark branches as `(from, to, reactance)` with 1-based bus numbers.
pub const IEEE39_BRANCHES: [(usize, usize, f64); 46] = [
    (1, 2, 0.0411),
    (1, 39, 0.025),
    (2, 3, 0.0151),
    (2, 25, 0.0086),
    (2, 30, 0.0181),
    (3, 4, 0.0213),
    (3, 18, 0.0133),
    (4, 5, 0.0128),
    (4, 14, 0.0129),
    (5, 6, 0.0026),
    (5, 8, 0.0112),
    (6, 7, 0.0092),
    (6, 11, 0.0082),
    (6, 31, 0.025),
    (7, 8, 0.0046),
    (8, 9, 0.0363),
    (9, 39, 0.025),
    (10, 11, 0.0043),
    (10, 13, 0.0043),
    (10, 32, 0.02),
    (12, 11, 0.0435),
    (12, 13, 0.0435),
    (13, 14, 0.0101),
    (14, 15, 0.0217),
    (15, 16, 0.0094),
    (16, 17, 0.0089),
    (16, 19, 0.0195),
    (16, 21, 0.0135),
    (16, 24, 0.0059),
    (17, 18, 0.0082),
    (17, 27, 0.0173),
    (19, 20, 0.0138),
    (19, 33, 0.0142),
    (20, 34, 0.018),
    (21, 22, 0.014),
    (22, 23, 0.0096),
    (22, 35, 0.0143),
    (23, 24, 0.035),
    (23, 36, 0.0272),
    (25, 26, 0.0323),
    (25, 37, 0.0232),
    (26, 27, 0.0147),
    (26, 28, 0.0474),
    (26, 29, 0.0625),
    (28, 29, 0.0151),
    (29, 38, 0.0156),
];

/// Inertia constants `H` (seconds) of the generators at buses 30..=39.
pub const IEEE39_GENERATOR_H: [(usize, f64); 10] = [
    (30, 42.0),
    (31, 30.3),
    (32, 35.8),
    (33, 28.6),
    (34, 26.0),
    (35, 34.8),
    (36, 26.4),
    (37, 24.3),
    (38, 34.5),
    (39, 500.0),
];

/// Ten candidate lines between unconnected buses, `(from, to, reactance)`.
pub const IEEE39_CANDIDATES: [(usize, usize, f64); 10] = [
    (1, 3, 0.030),
    (4, 6, 0.020),
    (5, 10, 0.025),
    (7, 9, 0.035),
    (13, 15, 0.028),
    (14, 17, 0.040),
    (16, 26, 0.045),
    (19, 22, 0.032),
    (21, 24, 0.022),
    (27, 29, 0.038),
];

/// Fifteen benchmark buses around the northern loop, with pendant buses 14,
/// 18, 25, 30 and 31. Their 16 internal branches form two independent
/// cycles.
pub const IEEE39_NORTH_BUSES: [usize; 15] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 14, 18, 25, 30, 31, 39];

/// Nineteen benchmark buses with four independent cycles among their 22
/// internal branches.
pub const IEEE39_WEST_BUSES: [usize; 19] =
    [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 25, 30, 31, 32, 39];

/// Inertia of benchmark bus `k` (1-based).
pub fn ieee39_inertia(k: usize) -> f64 {
    IEEE39_GENERATOR_H
        .iter()
        .find(|(b, _)| *b == k)
        .map_or(IEEE39_LOAD_INERTIA, |&(_, h)| 2.0 * h / (2.0 * std::f64::consts::PI * 60.0))
}

fn bus(id: usize, k: usize) -> Bus {
    Bus { id, inertia: ieee39_inertia(k), damping: IEEE39_DAMPING }
}

/// The full benchmark grid, all branches existing, reference bus 1.
pub fn ieee39() -> PowerNetwork {
    let buses = (1..=39).map(|k| bus(k - 1, k)).collect();
    let lines = IEEE39_BRANCHES
        .iter()
        .map(|&(f, t, x)| Line::existing(f - 1, t - 1, 1.0 / x))
        .collect();
    PowerNetwork::new(buses, lines, 0).expect("benchmark data is valid")
}

/// [`ieee39`] plus the ten [`IEEE39_CANDIDATES`] as candidate lines.
pub fn ieee39_with_candidates() -> PowerNetwork {
    let base = ieee39();
    let mut lines = base.lines().to_vec();
    lines.extend(
        IEEE39_CANDIDATES
            .iter()
            .map(|&(f, t, x)| Line::candidate(f - 1, t - 1, 1.0 / x)),
    );
    base.with_lines(lines).expect("candidate lines are valid")
}

/// The benchmark restricted to `buses` (1-based, increasing) and the
/// branches between them, all as candidate lines. Bus ids follow the order
/// of `buses`; `reference` is a benchmark bus number.
pub fn ieee39_subnetwork(buses: &[usize], reference: usize) -> crate::Result<PowerNetwork> {
    let id_of = |k: usize| buses.iter().position(|&b| b == k);
    let machines = buses.iter().enumerate().map(|(id, &k)| bus(id, k)).collect();
    let lines = IEEE39_BRANCHES
        .iter()
        .filter_map(|&(f, t, x)| Some(Line::candidate(id_of(f)?, id_of(t)?, 1.0 / x)))
        .collect();
    let reference = id_of(reference).ok_or_else(|| {
        crate::Error::InvalidNetwork(format!("reference bus {reference} is not in the subnetwork"))
    })?;
    PowerNetwork::new(machines, lines, reference)
}

/// [`IEEE39_NORTH_BUSES`] with reference bus 30.
pub fn ieee39_north() -> PowerNetwork {
    ieee39_subnetwork(&IEEE39_NORTH_BUSES, 30).expect("subnetwork data is valid")
}

/// [`IEEE39_WEST_BUSES`] with reference bus 30.
pub fn ieee39_west() -> PowerNetwork {
    ieee39_subnetwork(&IEEE39_WEST_BUSES, 30).expect("subnetwork data is valid")
}
