//! The central-broadcast beamsplitter network.
//!
//! A source mode s (thermal or coherent) is tapped by an eavesdropper through
//! a beamsplitter of transmittance eta1 whose second input carries her own
//! thermal mode e; the surviving signal is split between Alice and Bob at a
//! trusted beamsplitter eta2 (vacuum on the idle port); each party's branch
//! then passes a lossy thermal channel (eta3 with environment variance N3 for
//! Alice, eta4/N4 for Bob).
//!
//! Mode bookkeeping:
//!   * post-splitter state: (b, a, e)
//!   * channel output state: (v, a, e, b, v'), where v and v' are the
//!     environment output ports of the two channels.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gaussian::{
    check_physical, direct_sum, GaussianState, SymplecticTransform, ThermalVarianceConvention,
};
use crate::oplog;

mod closed_form;

pub use closed_form::{channel_output_cov, post_splitter_cov};

/// Mode indices of the 3-mode post-splitter state (b, a, e).
pub mod post_splitter_mode {
    pub const B: usize = 0;
    pub const A: usize = 1;
    pub const E: usize = 2;
}

/// Mode indices of the 5-mode channel output state (v, a, e, b, v').
pub mod output_mode {
    pub const V: usize = 0;
    pub const A: usize = 1;
    pub const E: usize = 2;
    pub const B: usize = 3;
    pub const V_PRIME: usize = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Thermal,
    Coherent,
}

impl SourceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::Thermal => "thermal",
            SourceKind::Coherent => "coherent",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "thermal" => Ok(SourceKind::Thermal),
            "coherent" => Ok(SourceKind::Coherent),
            other => Err(Error::Config(format!(
                "unknown source kind {other:?}; valid values: thermal, coherent"
            ))),
        }
    }
}

/// Every dial of the protocol in one place.
///
/// For a thermal source `v_s` is the source quadrature variance in SNU
/// (v_s = 2 nbar + 1 under the default convention). A coherent source has
/// unit-variance fluctuations (v_s = 1); its mean field strength only matters
/// to the Monte Carlo intensity statistics and is carried as `carrier_nbar`
/// (mean photon number of the carrier), entering the network as an
/// x-displacement of 2 sqrt(carrier_nbar) on the source mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    pub source: SourceKind,
    pub v_s: f64,
    pub v_e: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub carrier_nbar: f64,
    pub convention: ThermalVarianceConvention,
}

impl ProtocolParams {
    /// Thermal source of the given quadrature variance (SNU).
    pub fn thermal(v_s: f64) -> Self {
        Self {
            source: SourceKind::Thermal,
            v_s,
            ..Self::base()
        }
    }

    /// Thermal source specified by mean occupancy; the variance follows the
    /// active convention (default V = 2 nbar + 1).
    pub fn thermal_from_occupancy(nbar: f64) -> Self {
        let convention = ThermalVarianceConvention::default();
        Self {
            source: SourceKind::Thermal,
            v_s: convention.variance(nbar),
            convention,
            ..Self::base()
        }
    }

    /// Coherent source: unit-variance fluctuations around a carrier of mean
    /// photon number `carrier_nbar`.
    pub fn coherent(carrier_nbar: f64) -> Self {
        Self {
            source: SourceKind::Coherent,
            v_s: 1.0,
            carrier_nbar,
            ..Self::base()
        }
    }

    fn base() -> Self {
        // figure defaults: eta2 = 0.5, eta3 = eta4 = 0.2, eps = 1e-2, V_e = 1
        Self {
            source: SourceKind::Thermal,
            v_s: 1.0,
            v_e: 1.0,
            eta1: 0.5,
            eta2: 0.5,
            eta3: 0.2,
            eta4: 0.2,
            eps3: 1e-2,
            eps4: 1e-2,
            carrier_nbar: 0.0,
            convention: ThermalVarianceConvention::default(),
        }
    }

    pub fn with_eta1(mut self, eta1: f64) -> Self {
        self.eta1 = eta1;
        self
    }

    pub fn with_eta2(mut self, eta2: f64) -> Self {
        self.eta2 = eta2;
        self
    }

    pub fn with_ve(mut self, v_e: f64) -> Self {
        self.v_e = v_e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.source == SourceKind::Coherent && self.v_s != 1.0 {
            return Err(Error::Domain {
                context: "ProtocolParams",
                message: format!(
                    "a coherent source has vacuum-variance fluctuations; v_s must be 1, got {}",
                    self.v_s
                ),
            });
        }
        if !(self.v_s >= 1.0) {
            return Err(Error::InvalidVariance(self.v_s));
        }
        if !(self.v_e >= 1.0) {
            return Err(Error::InvalidVariance(self.v_e));
        }
        for (name, eta) in [
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("eta3", self.eta3),
            ("eta4", self.eta4),
        ] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::Domain {
                    context: "ProtocolParams",
                    message: format!("{name} must lie in [0, 1], got {eta}"),
                });
            }
        }
        for (name, eps) in [("eps3", self.eps3), ("eps4", self.eps4)] {
            if !(eps >= 0.0) {
                return Err(Error::Domain {
                    context: "ProtocolParams",
                    message: format!("{name} must be >= 0, got {eps}"),
                });
            }
        }
        // the environment variance N = 1 + eta*eps/(1-eta) diverges at eta = 1
        if self.eps3 > 0.0 && !(self.eta3 > 0.0 && self.eta3 < 1.0) {
            return Err(Error::Domain {
                context: "ProtocolParams",
                message: format!(
                    "eta3 must lie in (0, 1) when eps3 > 0 (got eta3 = {})",
                    self.eta3
                ),
            });
        }
        if self.eps4 > 0.0 && !(self.eta4 > 0.0 && self.eta4 < 1.0) {
            return Err(Error::Domain {
                context: "ProtocolParams",
                message: format!(
                    "eta4 must lie in (0, 1) when eps4 > 0 (got eta4 = {})",
                    self.eta4
                ),
            });
        }
        if !(self.carrier_nbar >= 0.0) {
            return Err(Error::Domain {
                context: "ProtocolParams",
                message: format!("carrier_nbar must be >= 0, got {}", self.carrier_nbar),
            });
        }
        Ok(())
    }

    /// Environment variances fed into the two channels. Zero excess noise
    /// short-circuits to the pure-loss value N = 1 so that eta in {0, 1}
    /// stays usable.
    pub fn env_variances(&self) -> Result<(f64, f64)> {
        let n3 = if self.eps3 == 0.0 {
            1.0
        } else {
            channel_env_variance(self.eta3, self.eps3)?
        };
        let n4 = if self.eps4 == 0.0 {
            1.0
        } else {
            channel_env_variance(self.eta4, self.eps4)?
        };
        Ok((n3, n4))
    }

    /// Source displacement: zero for thermal, an x-carrier of amplitude
    /// 2 sqrt(carrier_nbar) for coherent.
    fn source_displacement(&self) -> (f64, f64) {
        match self.source {
            SourceKind::Thermal => (0.0, 0.0),
            SourceKind::Coherent => (2.0 * self.carrier_nbar.sqrt(), 0.0),
        }
    }
}

/// Variance of the state a thermal noise channel of transmittance `eta` and
/// excess noise `eps` injects on its idle port:
///
/// ```text
///   N = eta * chi / (1 - eta),   chi = (1 - eta)/eta + eps
/// ```
///
/// which simplifies to N = 1 + eta*eps/(1-eta) >= 1. The formula has a pole
/// at eta = 1 and is undefined at eta = 0; callers wanting the pure-loss
/// limit should use N = 1 directly.
pub fn channel_env_variance(eta: f64, eps: f64) -> Result<f64> {
    oplog::record("network.channel_env_variance");
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain {
            context: "channel_env_variance",
            message: format!(
                "transmittance must lie strictly inside (0, 1), got {eta}; \
                 the pure-loss limit uses N = 1 directly"
            ),
        });
    }
    if !(eps >= 0.0) {
        return Err(Error::Domain {
            context: "channel_env_variance",
            message: format!("excess noise must be >= 0, got {eps}"),
        });
    }
    let chi = (1.0 - eta) / eta + eps;
    Ok(eta * chi / (1.0 - eta))
}

/// Both stages of the propagated network state.
#[derive(Debug, Clone)]
pub struct NetworkOutput {
    /// 3-mode state right after the trusted splitter, ordered (b, a, e).
    pub post_splitter: GaussianState,
    /// Final 5-mode state after both channels, ordered (v, a, e, b, v').
    pub output: GaussianState,
    pub params: ProtocolParams,
}

fn ensure_physical(state: &GaussianState, stage: &'static str) -> Result<()> {
    match check_physical(state) {
        crate::gaussian::Physicality::Ok => Ok(()),
        crate::gaussian::Physicality::Violation { magnitude } => Err(Error::Unphysical {
            stage,
            min_nu: 1.0 - magnitude,
        }),
    }
}

/// Propagate the input states through the full network by symplectic
/// transforms, checking physicality at each stage.
pub fn build_network(params: &ProtocolParams) -> Result<NetworkOutput> {
    oplog::record("network.build_network");
    params.validate()?;

    // stage 1: source and Eve's mode meet at eta1; Eve keeps the reflected
    // port, the transmitted port carries on toward the trusted splitter.
    let source = {
        let s = GaussianState::thermal(params.v_s, "s")?;
        let (dx, dp) = params.source_displacement();
        s.with_displacement(DVector::from_vec(vec![dx, dp]))?
    };
    let eve = GaussianState::thermal(params.v_e, "e")?;
    let input = direct_sum(&[source, eve])?;
    let tap = SymplecticTransform::beamsplitter(params.eta1, 0, 1, 2)?;
    let tapped = tap.apply(&input)?;
    ensure_physical(&tapped, "eavesdropper tap (eta1)")?;

    // stage 2: trusted splitter. Vacuum sits on port 1 and the signal on
    // port 2, so Bob ends up on the reflected (mu2) port at the vacuum's
    // slot and Alice on the transmitted (sqrt eta2) port at the signal's
    // slot; this matches the closed-form cross-covariance signs.
    let with_vacuum = direct_sum(&[tapped, GaussianState::vacuum("vac")])?;
    let splitter = SymplecticTransform::beamsplitter(params.eta2, 2, 0, 3)?;
    let mut split = splitter.apply(&with_vacuum)?;
    split.relabel(0, "a")?;
    split.relabel(2, "b")?;
    let post_splitter = split.reduce(&[2, 0, 1])?; // (b, a, e)
    ensure_physical(&post_splitter, "trusted splitter (eta2)")?;

    // stage 3: thermal noise channels toward Alice (eta3, env N3 on port 1)
    // and Bob (eta4, env N4 on port 2).
    let (n3, n4) = params.env_variances()?;
    let env3 = GaussianState::thermal(n3, "n3")?;
    let env4 = GaussianState::thermal(n4, "n4")?;
    let staged = direct_sum(&[env3, post_splitter.clone(), env4])?; // (n3, b, a, e, n4)
    let chan_a = SymplecticTransform::beamsplitter(params.eta3, 0, 2, 5)?;
    let chan_b = SymplecticTransform::beamsplitter(params.eta4, 1, 4, 5)?;
    let mut out = chan_b.apply(&chan_a.apply(&staged)?)?;
    out.relabel(0, "v")?;
    out.relabel(4, "v'")?;
    let output = out.reduce(&[0, 2, 3, 1, 4])?; // (v, a, e, b, v')
    ensure_physical(&output, "noise channels (eta3/eta4)")?;

    Ok(NetworkOutput {
        post_splitter,
        output,
        params: params.clone(),
    })
}
