//! Reference values from the published tables.
//!
//! Rows are `(k, n_elem, values)`. Arc values are tip displacements, slope
//! values `u/L`, fork values `u/L` at the upper tine in configurations (1)
//! and (2), helical values tip positions with the reported absolute errors.

/// Arc segment, per slenderness `ρ = 10, 100, 1000`.
pub const ARC: [(f64, [(usize, usize, [f64; 3]); 8]); 3] = [
    (
        10.0,
        [
            (1, 4, [-23.75125, -13.59944, 54.49189]),
            (2, 4, [-23.65101, -13.63756, 54.08983]),
            (3, 4, [-23.64497, -13.63205, 54.095]),
            (4, 4, [-23.64501, -13.63207, 54.09503]),
            (1, 32, [-23.64685, -13.63184, 54.10082]),
            (2, 32, [-23.64503, -13.63208, 54.09503]),
            (3, 32, [-23.64501, -13.63207, 54.09503]),
            (4, 32, [-23.64501, -13.63207, 54.09503]),
        ],
    ),
    (
        100.0,
        [
            (1, 4, [-23.66304, -13.57181, 53.87134]),
            (2, 4, [-23.56625, -13.61001, 53.46957]),
            (3, 4, [-23.5602, -13.6045, 53.47483]),
            (4, 4, [-23.56024, -13.60452, 53.47486]),
            (1, 32, [-23.56202, -13.60429, 53.48064]),
            (2, 32, [-23.56026, -13.60453, 53.47486]),
            (3, 32, [-23.56024, -13.60452, 53.47486]),
            (4, 32, [-23.56024, -13.60452, 53.47486]),
        ],
    ),
    (
        1000.0,
        [
            (1, 4, [-23.66215, -13.57153, 53.86514]),
            (2, 4, [-23.56541, -13.60974, 53.46337]),
            (3, 4, [-23.55935, -13.60423, 53.46863]),
            (4, 4, [-23.55939, -13.60425, 53.46866]),
            (1, 32, [-23.56118, -13.60401, 53.47444]),
            (2, 32, [-23.55941, -13.60426, 53.46866]),
            (3, 32, [-23.55939, -13.60425, 53.46866]),
            (4, 32, [-23.55939, -13.60425, 53.46866]),
        ],
    ),
];

pub const SLOPE: [(usize, usize, [f64; 3]); 8] = [
    (1, 3, [-1.519637, -0.1870366, -2.607832]),
    (2, 3, [-1.528034, -0.1713543, -2.470063]),
    (3, 3, [-1.535102, -0.175832, -2.484094]),
    (4, 3, [-1.535068, -0.1758733, -2.484223]),
    (1, 24, [-1.534489, -0.1759337, -2.485712]),
    (2, 24, [-1.53507, -0.1758742, -2.484215]),
    (3, 24, [-1.535072, -0.1758755, -2.484219]),
    (4, 24, [-1.535072, -0.1758755, -2.484219]),
];

/// `[u⁽¹⁾, u⁽²⁾]` at the upper tine.
pub const FORK: [(usize, usize, [[f64; 3]; 2]); 8] = [
    (1, 9, [[-1.084348, -0.759430, 1.981360], [-0.599783, -0.731959, 1.465554]]),
    (2, 9, [[-1.088565, -0.746239, 1.978099], [-0.598926, -0.727164, 1.479676]]),
    (3, 9, [[-1.088609, -0.746318, 1.978403], [-0.598811, -0.727135, 1.479965]]),
    (4, 9, [[-1.088614, -0.746307, 1.978303], [-0.598829, -0.727134, 1.479862]]),
    (1, 30, [[-1.088214, -0.747378, 1.978359], [-0.598936, -0.727541, 1.478570]]),
    (2, 30, [[-1.088613, -0.746306, 1.978299], [-0.598830, -0.727134, 1.479858]]),
    (3, 30, [[-1.088614, -0.746307, 1.978302], [-0.598829, -0.727134, 1.479861]]),
    (4, 30, [[-1.088614, -0.746307, 1.978301], [-0.598829, -0.727134, 1.479860]]),
];

/// `[r(L), e]` with 30 elements; `e` is the reported deviation from a fine
/// reference solution.
pub const HELICAL: [(usize, usize, [[f64; 3]; 2]); 4] = [
    (1, 30, [[6.698e-3, 1.166e-4, -1.249e-1], [1.9e-3, 4.4e-5, 4.8e-2]]),
    (2, 30, [[4.753e-3, 7.135e-5, -7.789e-2], [5.0e-5, 1.2e-6, 1.5e-3]]),
    (3, 30, [[4.803e-3, 7.248e-5, -7.647e-2], [5.6e-7, 2.0e-8, 2.4e-5]]),
    (4, 30, [[4.803e-3, 7.250e-5, -7.644e-2], [9.8e-9, 2.8e-10, 8.7e-8]]),
];

pub fn arc(rho: f64, k: usize, n: usize) -> Option<[f64; 3]> {
    ARC.iter()
        .find(|(r, _)| *r == rho)
        .and_then(|(_, rows)| rows.iter().find(|r| r.0 == k && r.1 == n))
        .map(|r| r.2)
}

pub fn slope(k: usize, n: usize) -> Option<[f64; 3]> {
    SLOPE.iter().find(|r| r.0 == k && r.1 == n).map(|r| r.2)
}

pub fn fork(k: usize, n: usize) -> Option<[[f64; 3]; 2]> {
    FORK.iter().find(|r| r.0 == k && r.1 == n).map(|r| r.2)
}

pub fn helical(k: usize, n: usize) -> Option<[[f64; 3]; 2]> {
    HELICAL.iter().find(|r| r.0 == k && r.1 == n).map(|r| r.2)
}
