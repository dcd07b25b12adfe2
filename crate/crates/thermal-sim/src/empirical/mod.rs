//! Monte Carlo emulation of the experiment: draw quadrature samples with the
//! protocol covariance, slice fluctuations into bits, and estimate the
//! information and intensity statistics the parties would measure.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gaussian::{check_physical, GaussianState};
use crate::oplog;

mod estimators;

pub use estimators::{
    empirical_cmi, empirical_cmi_with_se, g2_auto, g2_cross, joint_counts, shannon_entropy,
    shannon_entropy_miller_madow, G2Estimate, DEFAULT_CMI_BATCHES,
};

/// FNV-1a over the little-endian bytes of the covariance entries; ties a
/// batch to the matrix that generated it.
fn covariance_fingerprint(state: &GaussianState) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for v in state.cov().iter() {
        for byte in v.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    }
    hash
}

/// splitmix64: derives statistically independent per-grid-point seeds from a
/// master seed and a point index.
pub fn derive_point_seed(master_seed: u64, point_index: u64) -> u64 {
    let mut z = master_seed ^ point_index.wrapping_mul(0x9e3779b97f4a7c15);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A batch of i.i.d. quadrature draws from one Gaussian state, stored as one
/// x series and one p series per mode.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    n_samples: usize,
    labels: Vec<String>,
    x: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    seed: u64,
    fingerprint: u64,
}

impl SampleBatch {
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fingerprint of the generating covariance matrix.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn x(&self, mode: usize) -> &[f64] {
        &self.x[mode]
    }

    pub fn p(&self, mode: usize) -> &[f64] {
        &self.p[mode]
    }

    /// Sample covariance between two quadrature series (mean-subtracted,
    /// 1/n normalization).
    pub fn sample_cov(a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        Ok(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n)
    }
}

/// Draw `n` i.i.d. samples from the zero-mean (plus displacement)
/// multivariate normal with the state's covariance, via its Cholesky factor.
/// Deterministic for a given seed.
pub fn sample_quadratures(state: &GaussianState, n: usize, seed: u64) -> Result<SampleBatch> {
    oplog::record("empirical.sample_quadratures");
    if n == 0 {
        return Err(Error::Domain {
            context: "sample_quadratures",
            message: "need at least one sample".into(),
        });
    }
    if !check_physical(state).is_ok() {
        return Err(Error::Unphysical {
            stage: "sample_quadratures",
            min_nu: f64::NAN,
        });
    }
    let chol = state
        .cov()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::FactorizationFailure("covariance is not positive definite".into()))?;
    let l = chol.l();
    let dim = state.cov().nrows();
    let n_modes = state.n_modes();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut x = vec![Vec::with_capacity(n); n_modes];
    let mut p = vec![Vec::with_capacity(n); n_modes];
    let mut z = DVector::zeros(dim);
    for _ in 0..n {
        for k in 0..dim {
            z[k] = normal.sample(&mut rng);
        }
        let sample = &l * &z + state.disp();
        for m in 0..n_modes {
            x[m].push(sample[2 * m]);
            p[m].push(sample[2 * m + 1]);
        }
    }
    Ok(SampleBatch {
        n_samples: n,
        labels: state.labels().to_vec(),
        x,
        p,
        seed,
        fingerprint: covariance_fingerprint(state),
    })
}

/// A binary reduction of one quadrature series.
#[derive(Debug, Clone)]
pub struct BitStream {
    bits: Vec<bool>,
    origin: String,
    rule: &'static str,
}

impl BitStream {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn rule(&self) -> &str {
        self.rule
    }

    /// Fraction of ones.
    pub fn mean(&self) -> f64 {
        self.bits.iter().filter(|&&b| b).count() as f64 / self.bits.len() as f64
    }
}

/// Slice a series into bits about its empirical mean: strictly above maps to
/// 1, at-or-below (including exact ties, a measure-zero event for continuous
/// data) maps to 0.
pub fn slice_bits(series: &[f64], origin: impl Into<String>) -> Result<BitStream> {
    oplog::record("empirical.slice_bits");
    if series.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    Ok(BitStream {
        bits: series.iter().map(|&v| v > mean).collect(),
        origin: origin.into(),
        rule: "above-mean",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::direct_sum;
    use approx::assert_relative_eq;

    #[test]
    fn standard_normal_sample_variances() {
        let vac = direct_sum(&[GaussianState::vacuum("a")]).unwrap();
        let batch = sample_quadratures(&vac, 1_000_000, 11).unwrap();
        let vx = SampleBatch::sample_cov(batch.x(0), batch.x(0)).unwrap();
        let vp = SampleBatch::sample_cov(batch.p(0), batch.p(0)).unwrap();
        assert!((0.99..=1.01).contains(&vx), "vx = {vx}");
        assert!((0.99..=1.01).contains(&vp), "vp = {vp}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = GaussianState::thermal(5.0, "s").unwrap();
        let a = sample_quadratures(&s, 1000, 42).unwrap();
        let b = sample_quadratures(&s, 1000, 42).unwrap();
        assert_eq!(a.x(0), b.x(0));
        assert_eq!(a.p(0), b.p(0));
        let c = sample_quadratures(&s, 1000, 43).unwrap();
        assert_ne!(a.x(0), c.x(0));
    }

    #[test]
    fn fingerprint_tracks_covariance() {
        let a = sample_quadratures(&GaussianState::thermal(5.0, "s").unwrap(), 10, 1).unwrap();
        let b = sample_quadratures(&GaussianState::thermal(5.0, "s").unwrap(), 10, 2).unwrap();
        let c = sample_quadratures(&GaussianState::thermal(6.0, "s").unwrap(), 10, 1).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn unphysical_input_is_rejected() {
        let bad = GaussianState::new(
            nalgebra::DMatrix::identity(2, 2) * 0.5,
            DVector::zeros(2),
            vec!["m".into()],
        )
        .unwrap();
        assert!(sample_quadratures(&bad, 10, 0).is_err());
        assert!(sample_quadratures(&GaussianState::vacuum("v"), 0, 0).is_err());
    }

    #[test]
    fn displacement_shifts_the_mean() {
        let s = GaussianState::vacuum("s")
            .with_displacement(DVector::from_vec(vec![10.0, 0.0]))
            .unwrap();
        let batch = sample_quadratures(&s, 100_000, 3).unwrap();
        let mx = batch.x(0).iter().sum::<f64>() / 100_000.0;
        assert_relative_eq!(mx, 10.0, epsilon = 0.05);
    }

    #[test]
    fn slicing_about_the_mean() {
        let bits = slice_bits(&[-1.0, 1.0, -2.0, 2.0], "test").unwrap();
        assert_eq!(bits.bits(), &[false, true, false, true]);
        // constant series: everything at the mean maps to 0
        let bits = slice_bits(&[3.0; 8], "const").unwrap();
        assert!(bits.bits().iter().all(|&b| !b));
        assert!(slice_bits(&[], "empty").is_err());
    }

    #[test]
    fn slicing_flips_with_sign() {
        let s = GaussianState::thermal(9.0, "s").unwrap();
        let batch = sample_quadratures(&s, 4096, 9).unwrap();
        let series: Vec<f64> = batch.x(0).to_vec();
        let flipped: Vec<f64> = series.iter().map(|v| -v).collect();
        let b1 = slice_bits(&series, "s").unwrap();
        let b2 = slice_bits(&flipped, "s").unwrap();
        for (u, v) in b1.bits().iter().zip(b2.bits()) {
            assert_ne!(u, v);
        }
    }

    #[test]
    fn thermal_bits_are_balanced() {
        let s = GaussianState::thermal(2619.0, "s").unwrap();
        let batch = sample_quadratures(&s, 1_000_000, 17).unwrap();
        let bits = slice_bits(batch.x(0), "s").unwrap();
        assert!((bits.mean() - 0.5).abs() < 0.002, "frequency {}", bits.mean());
    }

    #[test]
    fn point_seeds_differ() {
        let s = derive_point_seed(1234, 0);
        let t = derive_point_seed(1234, 1);
        let u = derive_point_seed(1235, 0);
        assert_ne!(s, t);
        assert_ne!(s, u);
        assert_eq!(s, derive_point_seed(1234, 0));
    }
}
