//! Estimators on sampled data: plug-in Shannon entropies, empirical
//! conditional mutual information, and normalized intensity correlations.

use crate::error::{Error, Result};
use crate::oplog;

use super::BitStream;

/// Batch count for the batch-means standard error of the empirical CMI.
pub const DEFAULT_CMI_BATCHES: usize = 16;

/// Plug-in Shannon entropy of a frequency table, in bits (0 log 0 := 0).
pub fn shannon_entropy(counts: &[u64]) -> f64 {
    oplog::record("empirical.shannon_entropy");
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Miller-Madow corrected entropy: plug-in plus (k_occupied - 1) / (2 n ln 2).
/// Useful for small-sample studies; the default estimators stay uncorrected.
pub fn shannon_entropy_miller_madow(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let occupied = counts.iter().filter(|&&c| c > 0).count();
    shannon_entropy(counts) + (occupied as f64 - 1.0) / (2.0 * total as f64 * std::f64::consts::LN_2)
}

/// Joint frequency table over k bit streams: cell index is the bits read as a
/// big-endian k-bit integer, table size 2^k.
pub fn joint_counts(streams: &[&BitStream]) -> Result<Vec<u64>> {
    if streams.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = streams[0].len();
    for s in streams {
        if s.len() != n {
            return Err(Error::LengthMismatch(n, s.len()));
        }
    }
    let k = streams.len();
    let mut counts = vec![0u64; 1 << k];
    for t in 0..n {
        let mut cell = 0usize;
        for s in streams {
            cell = (cell << 1) | s.bits()[t] as usize;
        }
        counts[cell] += 1;
    }
    Ok(counts)
}

fn cmi_from_range(a: &BitStream, b: &BitStream, e: &BitStream, lo: usize, hi: usize) -> f64 {
    let mut abe = [0u64; 8];
    for t in lo..hi {
        let cell = ((a.bits()[t] as usize) << 2) | ((b.bits()[t] as usize) << 1) | e.bits()[t] as usize;
        abe[cell] += 1;
    }
    let mut ae = [0u64; 4];
    let mut be = [0u64; 4];
    let mut ee = [0u64; 2];
    for cell in 0..8 {
        let (ai, bi, ei) = (cell >> 2, (cell >> 1) & 1, cell & 1);
        ae[(ai << 1) | ei] += abe[cell];
        be[(bi << 1) | ei] += abe[cell];
        ee[ei] += abe[cell];
    }
    shannon_entropy(&ae) + shannon_entropy(&be) - shannon_entropy(&ee) - shannon_entropy(&abe)
}

/// Empirical conditional mutual information between bit streams,
/// H(AE) + H(BE) - H(E) - H(ABE), from plug-in entropies of the joint
/// frequency tables.
pub fn empirical_cmi(a: &BitStream, b: &BitStream, e: &BitStream) -> Result<f64> {
    oplog::record("empirical.empirical_cmi");
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() != e.len() {
        return Err(Error::LengthMismatch(a.len(), e.len()));
    }
    if a.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(cmi_from_range(a, b, e, 0, a.len()))
}

/// Empirical CMI together with a batch-means standard error: the streams are
/// split into `n_batches` contiguous blocks, the CMI of each block is
/// computed, and SE = std(blocks) / sqrt(n_batches). The point estimate is
/// the full-sample plug-in value.
pub fn empirical_cmi_with_se(
    a: &BitStream,
    b: &BitStream,
    e: &BitStream,
    n_batches: usize,
) -> Result<(f64, f64)> {
    let value = empirical_cmi(a, b, e)?;
    let n = a.len();
    if n_batches < 2 || n < 2 * n_batches {
        return Err(Error::Domain {
            context: "empirical_cmi_with_se",
            message: format!("need >= 2 batches with >= 2 samples each, got {n_batches} over {n}"),
        });
    }
    let m = n / n_batches;
    let vals: Vec<f64> = (0..n_batches)
        .map(|k| cmi_from_range(a, b, e, k * m, (k + 1) * m))
        .collect();
    let mean = vals.iter().sum::<f64>() / n_batches as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_batches as f64 - 1.0);
    Ok((value, (var / n_batches as f64).sqrt()))
}

/// A normalized intensity-correlation estimate with its delta-method
/// standard error.
#[derive(Debug, Clone, Copy)]
pub struct G2Estimate {
    pub value: f64,
    pub std_error: f64,
}

fn intensities(x: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.len() {
        return Err(Error::LengthMismatch(x.len(), p.len()));
    }
    if x.len() < 2 {
        return Err(Error::Domain {
            context: "g2",
            message: "need at least two samples".into(),
        });
    }
    Ok(x.iter().zip(p).map(|(a, b)| 0.5 * (a * a + b * b)).collect())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Zero-delay normalized second moment of the intensity I = (x^2 + p^2)/2:
/// g2 = <I^2> / <I>^2. Thermal light gives 2, a strong stable carrier
/// approaches 1. The standard error comes from the influence function of the
/// ratio statistic.
pub fn g2_auto(x: &[f64], p: &[f64]) -> Result<G2Estimate> {
    oplog::record("empirical.g2_auto");
    let intens = intensities(x, p)?;
    let m1 = mean(&intens);
    if m1.abs() < 1e-300 {
        return Err(Error::ZeroMeanIntensity);
    }
    let sq: Vec<f64> = intens.iter().map(|i| i * i).collect();
    let m2 = mean(&sq);
    let value = m2 / (m1 * m1);
    // influence: psi_t = (I_t^2 - m2)/m1^2 - 2 m2 (I_t - m1)/m1^3
    let n = intens.len() as f64;
    let var_psi = intens
        .iter()
        .map(|&i| (i * i - m2) / (m1 * m1) - 2.0 * m2 * (i - m1) / (m1 * m1 * m1))
        .map(|psi| psi * psi)
        .sum::<f64>()
        / n;
    Ok(G2Estimate {
        value,
        std_error: (var_psi / n).sqrt(),
    })
}

/// Cross-correlation of two parties' intensities:
/// g2 = <I_A I_B> / (<I_A> <I_B>). Values above 1 indicate bunched
/// cross-correlations on the shared beam.
pub fn g2_cross(a_x: &[f64], a_p: &[f64], b_x: &[f64], b_p: &[f64]) -> Result<G2Estimate> {
    oplog::record("empirical.g2_cross");
    let ia = intensities(a_x, a_p)?;
    let ib = intensities(b_x, b_p)?;
    if ia.len() != ib.len() {
        return Err(Error::LengthMismatch(ia.len(), ib.len()));
    }
    let ma = mean(&ia);
    let mb = mean(&ib);
    if ma.abs() < 1e-300 || mb.abs() < 1e-300 {
        return Err(Error::ZeroMeanIntensity);
    }
    let prod: Vec<f64> = ia.iter().zip(&ib).map(|(u, v)| u * v).collect();
    let m11 = mean(&prod);
    let value = m11 / (ma * mb);
    // influence: psi_t = (IA IB - m11)/(ma mb) - m11 (IA - ma)/(ma^2 mb)
    //                  - m11 (IB - mb)/(ma mb^2)
    let n = ia.len() as f64;
    let var_psi = ia
        .iter()
        .zip(&ib)
        .map(|(&u, &v)| {
            (u * v - m11) / (ma * mb) - m11 * (u - ma) / (ma * ma * mb) - m11 * (v - mb) / (ma * mb * mb)
        })
        .map(|psi| psi * psi)
        .sum::<f64>()
        / n;
    Ok(G2Estimate {
        value,
        std_error: (var_psi / n).sqrt(),
    })
}
