//! Symplectic spectra and the entropy of Gaussian states.

use crate::error::{Error, Result};
use crate::oplog;

use super::{symplectic_form, GaussianState, PHYSICALITY_TOL};

/// Symplectic eigenvalues of a state: the moduli of the eigenvalues of
/// `i Omega cov`, which come in pairs `{+nu, -nu}` and are deduplicated to N
/// values, sorted descending. Physical states satisfy `nu >= 1`.
///
/// Computed through the Cholesky factor cov = L L^T: `Omega cov` shares its
/// eigenvalues with the real antisymmetric matrix K = L^T Omega L (the same
/// two factors multiplied in the opposite order), and the eigenvalues of an
/// antisymmetric matrix are +-i times its paired singular values. The SVD
/// route stays robust on the exactly-degenerate spectra the protocol
/// produces, where a plain QR eigeniteration can fail to converge.
pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<Vec<f64>> {
    oplog::record("gaussian.symplectic_eigenvalues");
    let cov = state.cov();
    if cov.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure(
            "covariance contains non-finite entries".into(),
        ));
    }
    let n = state.n_modes();
    let chol = cov
        .clone()
        .cholesky()
        .ok_or_else(|| Error::EigenFailure("covariance is not positive definite".into()))?;
    let l = chol.l();
    let k = l.transpose() * symplectic_form(n) * &l;
    let k = (&k - k.transpose()) * 0.5; // restore exact antisymmetry
    let svd = k
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenFailure("singular value iteration did not converge".into()))?;
    let mut mags: Vec<f64> = svd.singular_values.iter().copied().collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // adjacent entries form the +-pairs; average them to halve the noise
    let nus = (0..n).map(|k| 0.5 * (mags[2 * k] + mags[2 * k + 1])).collect();
    Ok(nus)
}

/// Entropy contribution of one symplectic eigenvalue, in bits:
///
/// ```text
///   g(nu) = (nu+1)/2 log2((nu+1)/2) - (nu-1)/2 log2((nu-1)/2)
/// ```
///
/// The second term vanishes as nu -> 1 and is clamped to 0 for
/// |nu - 1| <= 1e-9; eigenvalues below 1 - 1e-9 are rejected as unphysical
/// rather than silently clamped.
pub fn entropy_kernel(nu: f64) -> Result<f64> {
    if !nu.is_finite() || nu < 1.0 - PHYSICALITY_TOL {
        return Err(Error::Unphysical {
            stage: "entropy_kernel",
            min_nu: nu,
        });
    }
    let up = (nu + 1.0) / 2.0;
    let first = up * up.log2();
    if (nu - 1.0).abs() <= PHYSICALITY_TOL {
        return Ok(first);
    }
    let dn = (nu - 1.0) / 2.0;
    Ok(first - dn * dn.log2())
}

/// Von Neumann entropy of a Gaussian state in bits: the sum of
/// [`entropy_kernel`] over the symplectic spectrum.
pub fn von_neumann_entropy(state: &GaussianState) -> Result<f64> {
    oplog::record("gaussian.von_neumann_entropy");
    let nus = symplectic_eigenvalues(state)?;
    let mut total = 0.0;
    for nu in nus {
        total += entropy_kernel(nu).map_err(|_| Error::Unphysical {
            stage: "von_neumann_entropy",
            min_nu: nu,
        })?;
    }
    Ok(total)
}
