//! Embedded composite-phase tables.
//!
//! All phases are in units of pi, exactly as published: exact fractions are
//! written as fractions, numerically derived entries carry four decimals.

/// Universal composite-pulse phases, keyed by label.
pub const UNIVERSAL: &[(&str, &[f64])] = &[
    ("U3", &[0.0, 1.0 / 2.0, 0.0]),
    ("U5a", &[0.0, 5.0 / 6.0, 2.0 / 6.0, 5.0 / 6.0, 0.0]),
    ("U5b", &[0.0, 11.0 / 6.0, 2.0 / 6.0, 11.0 / 6.0, 0.0]),
    (
        "U7a",
        &[
            0.0,
            11.0 / 12.0,
            10.0 / 12.0,
            17.0 / 12.0,
            10.0 / 12.0,
            11.0 / 12.0,
            0.0,
        ],
    ),
    (
        "U7b",
        &[
            0.0,
            1.0 / 12.0,
            14.0 / 12.0,
            19.0 / 12.0,
            14.0 / 12.0,
            1.0 / 12.0,
            0.0,
        ],
    ),
    (
        "U9a",
        &[0.0, 0.366, 0.638, 0.435, 1.697, 0.435, 0.638, 0.366, 0.0],
    ),
    (
        "U9b",
        &[0.0, 0.634, 1.362, 0.565, 0.303, 0.565, 1.362, 0.634, 0.0],
    ),
    (
        "U11a",
        &[
            0.0,
            11.0 / 12.0,
            10.0 / 12.0,
            23.0 / 12.0,
            1.0 / 12.0,
            19.0 / 12.0,
            1.0 / 12.0,
            23.0 / 12.0,
            10.0 / 12.0,
            11.0 / 12.0,
            0.0,
        ],
    ),
    (
        "U11b",
        &[
            0.0,
            1.0 / 12.0,
            14.0 / 12.0,
            13.0 / 12.0,
            23.0 / 12.0,
            17.0 / 12.0,
            23.0 / 12.0,
            13.0 / 12.0,
            14.0 / 12.0,
            1.0 / 12.0,
            0.0,
        ],
    ),
    (
        "U13a",
        &[
            0.0,
            9.0 / 24.0,
            42.0 / 24.0,
            11.0 / 24.0,
            8.0 / 24.0,
            37.0 / 24.0,
            2.0 / 24.0,
            37.0 / 24.0,
            8.0 / 24.0,
            11.0 / 24.0,
            42.0 / 24.0,
            9.0 / 24.0,
            0.0,
        ],
    ),
    (
        "U13b",
        &[
            0.0,
            33.0 / 24.0,
            42.0 / 24.0,
            35.0 / 24.0,
            8.0 / 24.0,
            13.0 / 24.0,
            2.0 / 24.0,
            13.0 / 24.0,
            8.0 / 24.0,
            35.0 / 24.0,
            42.0 / 24.0,
            33.0 / 24.0,
            0.0,
        ],
    ),
    (
        "U25a",
        &[
            0.0,
            5.0 / 6.0,
            2.0 / 6.0,
            5.0 / 6.0,
            0.0,
            11.0 / 6.0,
            4.0 / 6.0,
            1.0 / 6.0,
            4.0 / 6.0,
            11.0 / 6.0,
            2.0 / 6.0,
            7.0 / 6.0,
            4.0 / 6.0,
            7.0 / 6.0,
            2.0 / 6.0,
            11.0 / 6.0,
            4.0 / 6.0,
            1.0 / 6.0,
            4.0 / 6.0,
            11.0 / 6.0,
            0.0,
            5.0 / 6.0,
            2.0 / 6.0,
            5.0 / 6.0,
            0.0,
        ],
    ),
    (
        "U25b",
        &[
            0.0,
            11.0 / 6.0,
            2.0 / 6.0,
            11.0 / 6.0,
            0.0,
            5.0 / 6.0,
            4.0 / 6.0,
            7.0 / 6.0,
            4.0 / 6.0,
            5.0 / 6.0,
            2.0 / 6.0,
            1.0 / 6.0,
            4.0 / 6.0,
            1.0 / 6.0,
            2.0 / 6.0,
            5.0 / 6.0,
            4.0 / 6.0,
            7.0 / 6.0,
            4.0 / 6.0,
            5.0 / 6.0,
            0.0,
            11.0 / 6.0,
            2.0 / 6.0,
            11.0 / 6.0,
            0.0,
        ],
    ),
];

/// Target probabilities common to every theta-pulse table.
pub const THETA_TARGETS: &[f64] = &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Broadband theta-pulse phases (phi_2 .. phi_N; phi_1 = 0), keyed by
/// (sequence length N, target probability).
pub const THETA_BB: &[(usize, f64, &[f64])] = &[
    (2, 0.1, &[0.7952]),
    (2, 0.2, &[0.7048]),
    (2, 0.3, &[0.6310]),
    (2, 0.4, &[0.5641]),
    (2, 0.5, &[0.5]),
    (2, 0.6, &[0.4359]),
    (2, 0.7, &[0.3690]),
    (2, 0.8, &[0.2952]),
    (2, 0.9, &[0.2048]),
    (3, 0.1, &[0.8204, 1.4359]),
    (3, 0.2, &[0.7952, 1.2952]),
    (3, 0.3, &[0.7778, 1.1866]),
    (3, 0.4, &[0.7634, 1.0908]),
    (3, 0.5, &[3.0 / 4.0, 1.0]),
    (3, 0.6, &[0.7366, 0.9092]),
    (3, 0.7, &[0.7222, 0.8134]),
    (3, 0.8, &[0.7048, 0.7048]),
    (3, 0.9, &[0.6796, 0.5641]),
    (4, 0.1, &[2.0 / 3.0, 1.4618, 0.7952]),
    (4, 0.2, &[2.0 / 3.0, 1.3715, 0.7048]),
    (4, 0.3, &[2.0 / 3.0, 1.2977, 0.6310]),
    (4, 0.4, &[2.0 / 3.0, 1.2308, 0.5641]),
    (4, 0.5, &[2.0 / 3.0, 7.0 / 6.0, 1.0 / 2.0]),
    (4, 0.6, &[2.0 / 3.0, 1.1026, 0.4359]),
    (4, 0.7, &[2.0 / 3.0, 1.0357, 0.3690]),
    (4, 0.8, &[2.0 / 3.0, 0.9618, 0.2952]),
    (4, 0.9, &[2.0 / 3.0, 0.8715, 0.2048]),
    (5, 0.1, &[0.5033, 1.6110, 1.1032, 1.7861]),
    (5, 0.2, &[0.4569, 1.5710, 1.185, 1.8467]),
    (5, 0.3, &[0.4253, 1.5436, 1.2531, 1.9006]),
    (5, 0.4, &[0.3991, 1.5209, 1.3153, 1.9510]),
    (5, 0.5, &[3.0 / 8.0, 3.0 / 2.0, 11.0 / 8.0, 0.0]),
    (5, 0.6, &[0.3509, 1.4791, 1.4347, 0.0490]),
    (5, 0.7, &[0.3247, 1.4564, 1.4969, 0.0994]),
    (5, 0.8, &[0.2931, 1.4291, 1.565, 0.1533]),
    (5, 0.9, &[0.2467, 1.3890, 1.6468, 0.2139]),
    (6, 0.1, &[2.0 / 5.0, 8.0 / 5.0, 0.3952, 1.1952, 0.7952]),
    (6, 0.2, &[2.0 / 5.0, 8.0 / 5.0, 0.3048, 1.1048, 0.7048]),
    (6, 0.3, &[2.0 / 5.0, 8.0 / 5.0, 0.2310, 1.0310, 0.6310]),
    (6, 0.4, &[2.0 / 5.0, 8.0 / 5.0, 0.1641, 0.9641, 0.5641]),
    (
        6,
        0.5,
        &[2.0 / 5.0, 8.0 / 5.0, 1.0 / 10.0, 9.0 / 10.0, 1.0 / 2.0],
    ),
    (6, 0.6, &[2.0 / 5.0, 8.0 / 5.0, 0.0359, 0.8359, 0.4359]),
    (6, 0.7, &[2.0 / 5.0, 8.0 / 5.0, 1.9689, 0.7689, 0.3689]),
    (6, 0.8, &[2.0 / 5.0, 8.0 / 5.0, 1.8952, 0.6952, 0.2952]),
    (6, 0.9, &[2.0 / 5.0, 8.0 / 5.0, 1.8048, 0.6048, 0.2048]),
];

/// Narrowband theta-pulse phases (phi_2 .. phi_N; phi_1 = 0), keyed by
/// (sequence length N, target probability). The two-pulse column coincides
/// with the broadband table: a two-pulse sequence has a single free phase.
pub const THETA_NB: &[(usize, f64, &[f64])] = &[
    (2, 0.1, &[0.7952]),
    (2, 0.2, &[0.7048]),
    (2, 0.3, &[0.6310]),
    (2, 0.4, &[0.5641]),
    (2, 0.5, &[0.5]),
    (2, 0.6, &[0.4359]),
    (2, 0.7, &[0.3690]),
    (2, 0.8, &[0.2952]),
    (2, 0.9, &[0.2048]),
    (4, 0.1, &[0.0769, 1.0257, 1.1026]),
    (4, 0.2, &[0.1108, 1.0373, 1.1481]),
    (4, 0.3, &[0.1386, 1.0469, 1.1855]),
    (4, 0.4, &[0.1639, 1.0557, 1.2196]),
    (4, 0.5, &[0.1881, 1.0644, 1.2525]),
    (4, 0.6, &[0.2124, 1.0732, 1.2857]),
    (4, 0.7, &[0.2379, 1.0827, 1.3207]),
    (4, 0.8, &[0.2661, 1.0936, 1.3597]),
    (4, 0.9, &[0.3009, 1.1075, 1.4083]),
    (6, 0.1, &[1.4150, 0.5716, 0.8499, 0.0064, 1.4214]),
    (6, 0.2, &[1.4316, 0.6075, 0.8012, 1.9772, 1.4087]),
    (6, 0.3, &[1.4379, 0.6284, 0.7646, 1.9551, 1.3930]),
    (6, 0.4, &[1.4400, 0.6430, 0.7330, 1.9360, 1.3760]),
    (6, 0.5, &[1.4396, 0.6541, 0.7038, 1.9182, 1.3579]),
    (6, 0.6, &[1.4374, 0.6629, 0.6752, 1.9008, 1.3382]),
    (6, 0.7, &[1.4334, 0.6702, 0.6460, 1.8828, 1.3162]),
    (6, 0.8, &[1.4274, 0.6763, 0.6142, 1.8630, 1.2904]),
    (6, 0.9, &[1.4183, 0.6813, 0.5755, 1.8385, 1.2568]),
    (
        8,
        0.1,
        &[1.2681, 0.5191, 0.4643, 1.5937, 1.5389, 0.7899, 0.0580],
    ),
    (
        8,
        0.2,
        &[1.2813, 0.5427, 0.4539, 1.6112, 1.5223, 0.7838, 0.0651],
    ),
    (
        8,
        0.3,
        &[1.2879, 0.5569, 0.4423, 1.6198, 1.5052, 0.7742, 0.0621],
    ),
    (
        8,
        0.4,
        &[1.2917, 0.5672, 0.4302, 1.6248, 1.4879, 0.7633, 0.0551],
    ),
    (
        8,
        0.5,
        &[1.2939, 0.5752, 0.4177, 1.6277, 1.4702, 0.7515, 0.0454],
    ),
    (
        8,
        0.6,
        &[1.2948, 0.5818, 0.4043, 1.6291, 1.4516, 0.7386, 0.0334],
    ),
    (
        8,
        0.7,
        &[1.2947, 0.5874, 0.3896, 1.6291, 1.4314, 0.7241, 0.0187],
    ),
    (
        8,
        0.8,
        &[1.2934, 0.5922, 0.3727, 1.6277, 1.4081, 0.7069, 0.0003],
    ),
    (
        8,
        0.9,
        &[1.2906, 0.5965, 0.3508, 1.6240, 1.3784, 0.6843, 1.9749],
    ),
];

/// Half lengths available for passband theta pulses. A passband sequence
/// twins the narrowband p = 0.5 row of the same half length, so the full
/// sequence holds twice as many pulses.
pub const THETA_PB_HALF_LENGTHS: &[usize] = &[2, 4, 6, 8];

/// Look up a universal row by label.
pub fn universal_row(label: &str) -> Option<&'static [f64]> {
    UNIVERSAL
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, phases)| *phases)
}

/// Look up a theta row by (N, p). Targets are matched exactly against the
/// table grid 0.1 .. 0.9.
pub fn theta_row(
    table: &'static [(usize, f64, &[f64])],
    n: usize,
    p: f64,
) -> Option<&'static [f64]> {
    table
        .iter()
        .find(|(tn, tp, _)| *tn == n && (*tp - p).abs() < 1e-12)
        .map(|(_, _, phases)| *phases)
}
