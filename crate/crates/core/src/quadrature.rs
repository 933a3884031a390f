//! Legendre polynomials, the hierarchical centerline basis and Gauss rules.

/// Values and derivatives of `P₀ … P_k` at `xi`.
pub fn legendre_basis(k: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; k + 1];
    let mut dp = vec![0.0; k + 1];
    p[0] = 1.0;
    if k >= 1 {
        p[1] = xi;
        dp[1] = 1.0;
    }
    for n in 1..k {
        let nf = n as f64;
        p[n + 1] = ((2.0 * nf + 1.0) * xi * p[n] - nf * p[n - 1]) / (nf + 1.0);
        // P'_{n+1} = P'_{n-1} + (2n+1) P_n
        dp[n + 1] = dp[n - 1] + (2.0 * nf + 1.0) * p[n];
    }
    (p, dp)
}

/// Centerline shape functions of order `k`: the two linear end modes followed
/// by the bubbles `P_j − P_{j−2}`, `j = 2..=k`, which vanish at both ends.
pub fn centerline_basis(k: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let (p, _) = legendre_basis(k, xi);
    let mut n = Vec::with_capacity(k + 1);
    let mut dn = Vec::with_capacity(k + 1);
    n.push(0.5 * (1.0 - xi));
    n.push(0.5 * (1.0 + xi));
    dn.push(-0.5);
    dn.push(0.5);
    for j in 2..=k {
        n.push(p[j] - p[j - 2]);
        dn.push((2 * j - 1) as f64 * p[j - 1]);
    }
    (n, dn)
}

/// Gauss points and weights on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n`-point Gauss–Legendre rule, exact for degree `2n − 1`.
    pub fn gauss(n: usize) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Newton on P_n from the Chebyshev-like initial guess
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dpn = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_basis(n, x);
                dpn = dp[n];
                let dx = p[n] / dpn;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_basis(n, x);
            dpn = if dp[n] != 0.0 { dp[n] } else { dpn };
            let w = 2.0 / ((1.0 - x * x) * dpn * dpn);
            points[i] = x;
            weights[i] = w;
            points[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            points[n / 2] = 0.0;
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `(full, reduced)` rules for order `k`: `k + 1` and `k` Gauss points.
pub fn quadrature_rules(k: usize) -> (QuadratureRule, QuadratureRule) {
    (QuadratureRule::gauss(k + 1), QuadratureRule::gauss(k.max(1)))
}
