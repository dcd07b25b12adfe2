//! Covariance-matrix algebra for multimode Gaussian states.
//!
//! States live in shot-noise units (SNU): the vacuum quadrature variance is 1.
//! Quadratures are interleaved as (x1, p1, x2, p2, ...), so an N-mode state
//! carries a symmetric 2N x 2N covariance matrix and a 2N displacement vector.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::oplog;

mod spectrum;
mod symplectic;

pub use spectrum::{entropy_kernel, symplectic_eigenvalues, von_neumann_entropy};
pub use symplectic::{symplectic_form, SymplecticTransform};

/// Max tolerated asymmetry of a covariance matrix before construction fails.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Symplectic eigenvalues below `1 - PHYSICALITY_TOL` mark an unphysical state.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// CODATA 2018 reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// CODATA 2018 Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Mean thermal occupancy of a mode at angular frequency `omega_angular`
/// (rad/s) in equilibrium at temperature `temperature` (K).
pub fn bose_einstein_nbar(omega_angular: f64, temperature: f64) -> Result<f64> {
    oplog::record("gaussian.bose_einstein_nbar");
    if !(omega_angular > 0.0) {
        return Err(Error::Domain {
            context: "bose_einstein_nbar",
            message: format!("angular frequency must be > 0, got {omega_angular}"),
        });
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain {
            context: "bose_einstein_nbar",
            message: format!("temperature must be > 0, got {temperature}"),
        });
    }
    let x = HBAR * omega_angular / (BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Mapping from mean occupancy to thermal quadrature variance in SNU.
///
/// `TwoNPlusOne` (V = 2 nbar + 1) is the convention under which V = 1 SNU is
/// the vacuum; `TwoNPlusTwo` (V = 2(nbar + 1)) is kept as a switch for
/// sensitivity studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalVarianceConvention {
    #[default]
    TwoNPlusOne,
    TwoNPlusTwo,
}

impl ThermalVarianceConvention {
    pub fn variance(self, nbar: f64) -> f64 {
        match self {
            ThermalVarianceConvention::TwoNPlusOne => 2.0 * nbar + 1.0,
            ThermalVarianceConvention::TwoNPlusTwo => 2.0 * (nbar + 1.0),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "2n+1" => Ok(ThermalVarianceConvention::TwoNPlusOne),
            "2n+2" => Ok(ThermalVarianceConvention::TwoNPlusTwo),
            other => Err(Error::Config(format!(
                "unknown thermal variance convention {other:?}; valid values: 2n+1, 2n+2"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ThermalVarianceConvention::TwoNPlusOne => "2n+1",
            ThermalVarianceConvention::TwoNPlusTwo => "2n+2",
        }
    }
}

/// Zero-mean-by-default Gaussian state of N modes: covariance + displacement
/// in SNU, with one label per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: DMatrix<f64>,
    disp: DVector<f64>,
    labels: Vec<String>,
}

impl GaussianState {
    /// Build a state from raw parts. The covariance is symmetrized after
    /// checking that its asymmetry stays within [`SYMMETRY_TOL`]; labels must
    /// be unique and match the matrix dimension. Physicality (uncertainty
    /// relation) is deliberately *not* enforced here — see [`check_physical`].
    pub fn new(cov: DMatrix<f64>, disp: DVector<f64>, labels: Vec<String>) -> Result<Self> {
        let dim = cov.nrows();
        if cov.ncols() != dim || dim % 2 != 0 || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be square with even dimension, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if disp.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "displacement length {} does not match covariance dimension {dim}",
                disp.len()
            )));
        }
        if labels.len() != dim / 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} modes",
                labels.len(),
                dim / 2
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        let asym = (&cov - cov.transpose()).abs().max();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { cov, disp, labels })
    }

    /// Single-mode vacuum: identity covariance, zero mean.
    pub fn vacuum(label: impl Into<String>) -> Self {
        Self {
            cov: DMatrix::identity(2, 2),
            disp: DVector::zeros(2),
            labels: vec![label.into()],
        }
    }

    /// Single-mode thermal state of quadrature variance `variance` SNU
    /// (V = 1 is the vacuum). Variances below 1 are unphysical.
    pub fn thermal(variance: f64, label: impl Into<String>) -> Result<Self> {
        oplog::record("gaussian.make_thermal");
        if !(variance >= 1.0) {
            return Err(Error::InvalidVariance(variance));
        }
        Ok(Self {
            cov: DMatrix::identity(2, 2) * variance,
            disp: DVector::zeros(2),
            labels: vec![label.into()],
        })
    }

    /// Thermal state specified by mean occupancy instead of variance.
    pub fn thermal_from_occupancy(
        nbar: f64,
        convention: ThermalVarianceConvention,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(nbar >= 0.0) {
            return Err(Error::Domain {
                context: "thermal_from_occupancy",
                message: format!("mean occupancy must be >= 0, got {nbar}"),
            });
        }
        Self::thermal(convention.variance(nbar), label)
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn disp(&self) -> &DVector<f64> {
        &self.disp
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of the mode carrying `label`.
    pub fn mode_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Covariance entry between quadrature `qi` of mode `i` and quadrature
    /// `qj` of mode `j` (quadrature 0 = x, 1 = p).
    pub fn cov_entry(&self, i: usize, qi: usize, j: usize, qj: usize) -> f64 {
        self.cov[(2 * i + qi, 2 * j + qj)]
    }

    /// Replace a mode label (used when a beamsplitter port changes a mode's
    /// role, e.g. a vacuum input becoming Bob's output).
    pub fn relabel(&mut self, mode: usize, label: impl Into<String>) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::ModeIndexOutOfRange {
                index: mode,
                n_modes: self.n_modes(),
            });
        }
        let label = label.into();
        if self.labels.iter().enumerate().any(|(i, l)| i != mode && *l == label) {
            return Err(Error::LabelCollision(label));
        }
        self.labels[mode] = label;
        Ok(())
    }

    /// Overwrite the displacement vector (length-checked).
    pub fn with_displacement(mut self, disp: DVector<f64>) -> Result<Self> {
        if disp.len() != self.cov.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "displacement length {} for dimension {}",
                disp.len(),
                self.cov.nrows()
            )));
        }
        self.disp = disp;
        Ok(self)
    }

    /// Partial trace: keep `modes` in the given order, dropping the rest.
    /// Passing every mode in a new order doubles as a mode permutation.
    pub fn reduce(&self, modes: &[usize]) -> Result<GaussianState> {
        oplog::record("gaussian.reduce");
        if modes.is_empty() {
            return Err(Error::EmptySubset);
        }
        for (k, &m) in modes.iter().enumerate() {
            if m >= self.n_modes() {
                return Err(Error::ModeIndexOutOfRange {
                    index: m,
                    n_modes: self.n_modes(),
                });
            }
            if modes[..k].contains(&m) {
                return Err(Error::OverlappingSubsets(m));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let cov = self.cov.select_rows(&idx).select_columns(&idx);
        let disp = DVector::from_iterator(idx.len(), idx.iter().map(|&q| self.disp[q]));
        let labels = modes.iter().map(|&m| self.labels[m].clone()).collect();
        Ok(GaussianState { cov, disp, labels })
    }

    /// Total mean photon number, n = (tr cov - 2N) / 4 for zero-mean states
    /// (displacement contributes |d|^2 / 4).
    pub fn mean_photon_number(&self) -> f64 {
        let n = self.n_modes() as f64;
        (self.cov.trace() - 2.0 * n) / 4.0 + self.disp.norm_squared() / 4.0
    }
}

/// Combine independent states into one: block-diagonal covariance,
/// concatenated displacements and labels. No cross-correlations are
/// introduced.
pub fn direct_sum(states: &[GaussianState]) -> Result<GaussianState> {
    oplog::record("gaussian.direct_sum");
    if states.is_empty() {
        return Err(Error::EmptySubset);
    }
    let dim: usize = states.iter().map(|s| s.cov.nrows()).sum();
    let mut cov = DMatrix::zeros(dim, dim);
    let mut disp = DVector::zeros(dim);
    let mut labels = Vec::new();
    let mut offset = 0;
    for s in states {
        let d = s.cov.nrows();
        cov.view_mut((offset, offset), (d, d)).copy_from(&s.cov);
        disp.rows_mut(offset, d).copy_from(&s.disp);
        for l in &s.labels {
            if labels.contains(l) {
                return Err(Error::LabelCollision(l.clone()));
            }
            labels.push(l.clone());
        }
        offset += d;
    }
    Ok(GaussianState { cov, disp, labels })
}

/// Outcome of a physicality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physicality {
    Ok,
    /// How far the state sits outside the physical set: the larger of the
    /// uncertainty-relation deficit `1 - min nu` and any residual asymmetry.
    Violation { magnitude: f64 },
}

impl Physicality {
    pub fn is_ok(&self) -> bool {
        matches!(self, Physicality::Ok)
    }
}

/// Total check of the uncertainty relation: every symplectic eigenvalue must
/// reach 1 within [`PHYSICALITY_TOL`], and the stored matrix must be
/// symmetric. Never fails; unphysical inputs yield a `Violation` verdict.
pub fn check_physical(state: &GaussianState) -> Physicality {
    oplog::record("gaussian.check_physical");
    let asym = (&state.cov - state.cov.transpose()).abs().max();
    let min_nu = match symplectic_eigenvalues(state) {
        Ok(nus) => nus.last().copied().unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    if !min_nu.is_finite() {
        return Physicality::Violation { magnitude: f64::INFINITY };
    }
    let deficit = (1.0 - min_nu).max(asym);
    if min_nu >= 1.0 - PHYSICALITY_TOL && asym <= SYMMETRY_TOL {
        Physicality::Ok
    } else {
        Physicality::Violation { magnitude: deficit }
    }
}
