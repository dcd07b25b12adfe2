//! Symplectic transforms on quadrature vectors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::oplog;

use super::GaussianState;

/// Max tolerated defect `||S Omega S^T - Omega||_inf` for a valid transform.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// The symplectic form for `n_modes` modes: block-diagonal with per-mode
/// blocks [[0, 1], [-1, 0]] in (x, p) ordering.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// A linear transform of the quadrature vector that preserves the canonical
/// commutation relations: `S Omega S^T = Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Wrap an arbitrary matrix, verifying symplecticity within
    /// [`SYMPLECTIC_TOL`].
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim % 2 != 0 || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "transform must be square with even dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let t = Self { matrix };
        let defect = t.symplectic_defect();
        if defect > SYMPLECTIC_TOL {
            return Err(Error::Domain {
                context: "SymplecticTransform::from_matrix",
                message: format!("matrix is not symplectic (defect {defect:.3e})"),
            });
        }
        Ok(t)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Two-port beamsplitter of transmittance `eta` embedded in an `n_modes`
    /// identity. Port 1 is `mode_i`, port 2 is `mode_j`; with mu = sqrt(1 -
    /// eta) the port-1 output picks up `+mu` of port 2 and the port-2 output
    /// `-mu` of port 1:
    ///
    /// ```text
    ///   out_i = sqrt(eta) in_i + mu in_j
    ///   out_j = -mu in_i + sqrt(eta) in_j
    /// ```
    pub fn beamsplitter(eta: f64, mode_i: usize, mode_j: usize, n_modes: usize) -> Result<Self> {
        oplog::record("gaussian.beamsplitter");
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain {
                context: "beamsplitter",
                message: format!("transmittance must lie in [0, 1], got {eta}"),
            });
        }
        if mode_i >= n_modes {
            return Err(Error::ModeIndexOutOfRange { index: mode_i, n_modes });
        }
        if mode_j >= n_modes {
            return Err(Error::ModeIndexOutOfRange { index: mode_j, n_modes });
        }
        if mode_i == mode_j {
            return Err(Error::Domain {
                context: "beamsplitter",
                message: "ports must address two distinct modes".into(),
            });
        }
        let mu = (1.0 - eta).sqrt();
        let root_eta = eta.sqrt();
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for q in 0..2 {
            m[(2 * mode_i + q, 2 * mode_i + q)] = root_eta;
            m[(2 * mode_j + q, 2 * mode_j + q)] = root_eta;
            m[(2 * mode_i + q, 2 * mode_j + q)] = mu;
            m[(2 * mode_j + q, 2 * mode_i + q)] = -mu;
        }
        Ok(Self { matrix: m })
    }

    /// Mode permutation: output mode `k` is input mode `new_order[k]`.
    ///
    /// `apply` keeps labels positional, so applying a permutation leaves the
    /// old labels in place. To reorder a state together with its labels use
    /// [`GaussianState::reduce`] with the full mode list; this constructor
    /// exists for matrix-level ordering checks and composition.
    pub fn mode_permutation(new_order: &[usize]) -> Result<Self> {
        let n = new_order.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (new, &old) in new_order.iter().enumerate() {
            if old >= n {
                return Err(Error::ModeIndexOutOfRange { index: old, n_modes: n });
            }
            if new_order[..new].contains(&old) {
                return Err(Error::OverlappingSubsets(old));
            }
            m[(2 * new, 2 * old)] = 1.0;
            m[(2 * new + 1, 2 * old + 1)] = 1.0;
        }
        Ok(Self { matrix: m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `self` applied after `earlier` (matrix product).
    pub fn compose(&self, earlier: &SymplecticTransform) -> Result<SymplecticTransform> {
        if self.matrix.ncols() != earlier.matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}-mode with {}-mode transform",
                self.n_modes(),
                earlier.n_modes()
            )));
        }
        Ok(SymplecticTransform {
            matrix: &self.matrix * &earlier.matrix,
        })
    }

    /// `||S Omega S^T - Omega||_inf`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.n_modes());
        (&self.matrix * &omega * self.matrix.transpose() - &omega)
            .abs()
            .max()
    }

    /// Propagate a state: cov' = S cov S^T, disp' = S disp.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        oplog::record("gaussian.apply");
        if self.matrix.ncols() != state.cov().nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{}-mode transform applied to {}-mode state",
                self.n_modes(),
                state.n_modes()
            )));
        }
        let cov = &self.matrix * state.cov() * self.matrix.transpose();
        let disp = &self.matrix * state.disp();
        GaussianState::new(cov, disp, state.labels().to_vec())
    }
}
