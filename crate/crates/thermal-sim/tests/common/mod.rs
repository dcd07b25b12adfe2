//! Shared test support: an independent orthant-probability oracle for the
//! sign-bit distribution of a trivariate Gaussian, plus small helpers.
//!
//! The oracle computes P(sign pattern) by nested numerical quadrature and is
//! deliberately independent of the crate's sampling and entropy machinery.

#![allow(dead_code)]

use statrs::function::erf::erf;

/// Standard normal density.
fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF.
fn phi_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// 64-point Gauss-Legendre nodes/weights on [-1, 1], computed by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // initial guess (Chebyshev-like)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = pk;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Integrate f over [a, b] with 64-point Gauss-Legendre.
fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(64);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Bivariate normal probability P(Z1 <= h, Z2 <= k) with correlation r, via
/// the 1D integral representation
///
///   Phi2(h, k; r) = Phi(h) Phi(k)
///     + (1/2pi) int_0^r exp(-(h^2 - 2 t h k + k^2)/(2(1-t^2))) / sqrt(1-t^2) dt
///
/// with the substitution t = sin(theta) to remove the endpoint singularity.
fn bivariate_cdf(h: f64, k: f64, r: f64) -> f64 {
    assert!(r.abs() < 1.0, "degenerate correlation {r}");
    let tail = integrate(
        |theta| {
            let (s, c) = theta.sin_cos();
            (-(h * h - 2.0 * s * h * k + k * k) / (2.0 * c * c)).exp()
        },
        0.0,
        r.asin(),
    ) / (2.0 * std::f64::consts::PI);
    phi_cdf(h) * phi_cdf(k) + tail
}

/// P(X1 > 0, X2 > 0, X3 > 0) for a zero-mean trivariate Gaussian with
/// correlations (r12, r13, r23), by conditioning on X3 = z and integrating
/// the conditional bivariate probability over z > 0.
fn positive_orthant(r12: f64, r13: f64, r23: f64) -> f64 {
    for r in [r12, r13, r23] {
        assert!(r.abs() < 1.0, "degenerate correlation {r}");
    }
    let d13 = (1.0 - r13 * r13).sqrt();
    let d23 = (1.0 - r23 * r23).sqrt();
    let rc = (r12 - r13 * r23) / (d13 * d23);
    assert!(
        rc.abs() < 1.0,
        "conditional correlation {rc} is degenerate"
    );
    // piecewise panels keep the Gaussian tail resolved
    let mut total = 0.0;
    for (a, b) in [(0.0, 1.0), (1.0, 2.0), (2.0, 4.0), (4.0, 10.0)] {
        total += integrate(
            |z| phi(z) * bivariate_cdf(r13 * z / d13, r23 * z / d23, rc),
            a,
            b,
        );
    }
    total
}

/// All eight sign-pattern probabilities for (X1, X2, X3), indexed by
/// (s1 << 2) | (s2 << 1) | s3 with s = 1 meaning "> 0".
pub fn orthant_probabilities(r12: f64, r13: f64, r23: f64) -> [f64; 8] {
    let mut out = [0.0; 8];
    for (idx, item) in out.iter_mut().enumerate() {
        let s1 = if idx & 4 != 0 { 1.0 } else { -1.0 };
        let s2 = if idx & 2 != 0 { 1.0 } else { -1.0 };
        let s3 = if idx & 1 != 0 { 1.0 } else { -1.0 };
        *item = positive_orthant(s1 * s2 * r12, s1 * s3 * r13, s2 * s3 * r23);
    }
    let sum: f64 = out.iter().sum();
    assert!(
        (sum - 1.0).abs() < 1e-9,
        "orthant probabilities sum to {sum}"
    );
    out
}

/// Closed-form check for the positive orthant (arcsine identity):
/// P(+++) = 1/8 + (asin r12 + asin r13 + asin r23)/(4 pi).
pub fn positive_orthant_arcsine(r12: f64, r13: f64, r23: f64) -> f64 {
    0.125 + (r12.asin() + r13.asin() + r23.asin()) / (4.0 * std::f64::consts::PI)
}

fn h_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Exact conditional mutual information I(A:B|E) of the sign bits of a
/// trivariate Gaussian with the given correlations, in bits.
pub fn sign_bit_cmi(r_ab: f64, r_ae: f64, r_be: f64) -> f64 {
    let p = orthant_probabilities(r_ab, r_ae, r_be);
    let mut ae = [0.0; 4];
    let mut be = [0.0; 4];
    let mut e = [0.0; 2];
    for (idx, &pr) in p.iter().enumerate() {
        let (a, b, ev) = (idx >> 2, (idx >> 1) & 1, idx & 1);
        ae[(a << 1) | ev] += pr;
        be[(b << 1) | ev] += pr;
        e[ev] += pr;
    }
    h_bits(&ae) + h_bits(&be) - h_bits(&e) - h_bits(&p)
}

/// Correlation coefficients of the x quadratures of three modes of a state.
pub fn x_correlations(
    state: &thermal_sim::gaussian::GaussianState,
    modes: [usize; 3],
) -> (f64, f64, f64) {
    let c = |i: usize, j: usize| state.cov_entry(modes[i], 0, modes[j], 0);
    let d = [c(0, 0).sqrt(), c(1, 1).sqrt(), c(2, 2).sqrt()];
    (
        c(0, 1) / (d[0] * d[1]),
        c(0, 2) / (d[0] * d[2]),
        c(1, 2) / (d[1] * d[2]),
    )
}

/// Simple deterministic uniform RNG for parameter draws in property tests.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}
