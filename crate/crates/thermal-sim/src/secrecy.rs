//! Analytic information quantities on network states: mutual information,
//! conditional mutual information, Gaussian discord via homodyne
//! conditioning, and the resulting secrecy verdict.
//!
//! All quantities are in bits.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::{check_physical, von_neumann_entropy, GaussianState, PHYSICALITY_TOL};
use crate::network::{output_mode, NetworkOutput, ProtocolParams};
use crate::oplog;

/// Positivity threshold separating true zeros from small-but-real secrecy.
pub const VERDICT_TOL: f64 = 1e-6;

fn check_disjoint(subsets: &[&[usize]], n_modes: usize) -> Result<()> {
    let mut seen = vec![false; n_modes];
    for set in subsets {
        if set.is_empty() {
            return Err(Error::EmptySubset);
        }
        for &m in *set {
            if m >= n_modes {
                return Err(Error::ModeIndexOutOfRange { index: m, n_modes });
            }
            if seen[m] {
                return Err(Error::OverlappingSubsets(m));
            }
            seen[m] = true;
        }
    }
    Ok(())
}

fn joint(state: &GaussianState, parts: &[&[usize]]) -> Result<GaussianState> {
    let modes: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    state.reduce(&modes)
}

/// I(A:B) = S(A) + S(B) - S(AB).
pub fn mutual_information(
    state: &GaussianState,
    part_a: &[usize],
    part_b: &[usize],
) -> Result<f64> {
    oplog::record("secrecy.mutual_information");
    check_disjoint(&[part_a, part_b], state.n_modes())?;
    let sa = von_neumann_entropy(&state.reduce(part_a)?)?;
    let sb = von_neumann_entropy(&state.reduce(part_b)?)?;
    let sab = von_neumann_entropy(&joint(state, &[part_a, part_b])?)?;
    Ok(sa + sb - sab)
}

/// I(A:B|E) = S(AE) + S(BE) - S(E) - S(ABE).
pub fn conditional_mutual_information(
    state: &GaussianState,
    part_a: &[usize],
    part_b: &[usize],
    part_e: &[usize],
) -> Result<f64> {
    oplog::record("secrecy.conditional_mutual_information");
    check_disjoint(&[part_a, part_b, part_e], state.n_modes())?;
    let sae = von_neumann_entropy(&joint(state, &[part_a, part_e])?)?;
    let sbe = von_neumann_entropy(&joint(state, &[part_b, part_e])?)?;
    let se = von_neumann_entropy(&state.reduce(part_e)?)?;
    let sabe = von_neumann_entropy(&joint(state, &[part_a, part_b, part_e])?)?;
    Ok(sae + sbe - se - sabe)
}

/// Which quadrature a homodyne detector measures. `Rotated(theta)` measures
/// x cos(theta) + p sin(theta); X and P are theta = 0 and pi/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quadrature {
    X,
    P,
    Rotated(f64),
}

impl Quadrature {
    pub fn angle(self) -> f64 {
        match self {
            Quadrature::X => 0.0,
            Quadrature::P => std::f64::consts::FRAC_PI_2,
            Quadrature::Rotated(theta) => theta,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Quadrature::X => "x",
            Quadrature::P => "p",
            Quadrature::Rotated(_) => "rotated",
        }
    }
}

/// Covariance of `targets` after a homodyne measurement of one quadrature of
/// `measured`:
///
/// ```text
///   cov' = cov_t - C (X cov_m X)^+ C^T
/// ```
///
/// where X projects onto the measured quadrature and ()^+ is the
/// Moore-Penrose pseudo-inverse. X cov_m X has rank one, so the
/// pseudo-inverse inverts the single nonzero scalar u^T cov_m u along the
/// measured direction u.
pub fn conditional_cov_homodyne(
    state: &GaussianState,
    measured: usize,
    targets: &[usize],
    quadrature: Quadrature,
) -> Result<GaussianState> {
    oplog::record("secrecy.conditional_cov_homodyne");
    check_disjoint(&[&[measured], targets], state.n_modes())?;
    let theta = quadrature.angle();
    let u = [theta.cos(), theta.sin()];

    let m = state.reduce(&[measured])?;
    // variance of the measured quadrature: u^T cov_m u
    let mut var = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            var += u[i] * m.cov()[(i, j)] * u[j];
        }
    }
    if var < 1.0 - PHYSICALITY_TOL {
        return Err(Error::Unphysical {
            stage: "conditional_cov_homodyne",
            min_nu: var,
        });
    }
    if var < 1e-12 {
        return Err(Error::SingularMeasurement(var));
    }

    let t = state.reduce(targets)?;
    let dim = 2 * targets.len();
    // cross-covariance C between target quadratures and the measured mode
    let mut cross = DMatrix::zeros(dim, 2);
    for (ti, &tm) in targets.iter().enumerate() {
        for qi in 0..2 {
            for qj in 0..2 {
                cross[(2 * ti + qi, qj)] = state.cov_entry(tm, qi, measured, qj);
            }
        }
    }
    // (X cov X)^+ = u u^T / var for the unit vector u
    let mut cov = t.cov().clone();
    for i in 0..dim {
        for j in 0..dim {
            let ci: f64 = (0..2).map(|q| cross[(i, q)] * u[q]).sum();
            let cj: f64 = (0..2).map(|q| cross[(j, q)] * u[q]).sum();
            cov[(i, j)] -= ci * cj / var;
        }
    }
    GaussianState::new(cov, t.disp().clone(), t.labels().to_vec())
}

/// Gaussian discord D(B|A): correlations revealed by a homodyne measurement
/// on A,
///
/// ```text
///   D(B|A) = S(A) - S(AB) + min_q S(B | q_A)
/// ```
///
/// minimized over the measured quadrature. The protocol states are
/// phase-symmetric, so the default grid {x, p} suffices; see
/// [`discord_over_angles`] for a finer scan.
pub fn discord(state: &GaussianState, measured: usize, target: usize) -> Result<(f64, Quadrature)> {
    oplog::record("secrecy.discord");
    let (value, angle) = discord_general(
        state,
        measured,
        target,
        &[Quadrature::X, Quadrature::P],
    )?;
    Ok((value, angle))
}

/// Discord with the conditional entropy minimized over an arbitrary list of
/// homodyne angles (for robustness studies).
pub fn discord_over_angles(
    state: &GaussianState,
    measured: usize,
    target: usize,
    angles: &[f64],
) -> Result<(f64, Quadrature)> {
    let quads: Vec<Quadrature> = angles.iter().map(|&t| Quadrature::Rotated(t)).collect();
    discord_general(state, measured, target, &quads)
}

fn discord_general(
    state: &GaussianState,
    measured: usize,
    target: usize,
    quads: &[Quadrature],
) -> Result<(f64, Quadrature)> {
    if quads.is_empty() {
        return Err(Error::EmptySubset);
    }
    let sa = von_neumann_entropy(&state.reduce(&[measured])?)?;
    let sab = von_neumann_entropy(&state.reduce(&[measured, target])?)?;
    let mut best: Option<(f64, Quadrature)> = None;
    for &q in quads {
        let cond = conditional_cov_homodyne(state, measured, &[target], q)?;
        let s = von_neumann_entropy(&cond)?;
        if best.is_none_or(|(b, _)| s < b) {
            best = Some((s, q));
        }
    }
    let (s_min, q_min) = best.unwrap();
    Ok((sa - sab + s_min, q_min))
}

/// The secrecy quantities of one parameter point.
#[derive(Debug, Clone)]
pub struct SecrecyReport {
    pub i_ab: f64,
    pub i_ab_given_e: f64,
    pub discord_b_given_a: f64,
    pub discord_quadrature: Quadrature,
    pub physical: bool,
    pub params: ProtocolParams,
}

impl SecrecyReport {
    /// Evaluate all metrics on the channel output state of a network,
    /// with A and B the legal parties' modes and E the eavesdropper's.
    pub fn evaluate(network: &NetworkOutput) -> Result<Self> {
        let state = &network.output;
        let a = &[output_mode::A][..];
        let b = &[output_mode::B][..];
        let e = &[output_mode::E][..];
        let i_ab = mutual_information(state, a, b)?;
        let i_ab_given_e = conditional_mutual_information(state, a, b, e)?;
        let (discord_b_given_a, discord_quadrature) =
            discord(state, output_mode::A, output_mode::B)?;
        let physical = check_physical(&network.post_splitter).is_ok()
            && check_physical(state).is_ok();
        Ok(SecrecyReport {
            i_ab,
            i_ab_given_e,
            discord_b_given_a,
            discord_quadrature,
            physical,
            params: network.params.clone(),
        })
    }
}

/// Secrecy verdict of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Both conditions exceed the tolerance.
    Secret,
    /// Neither condition exceeds the tolerance.
    NotSecret,
    /// Exactly one condition exceeds the tolerance: the two positivity
    /// conditions that should agree disagree numerically, flagged for
    /// inspection rather than silently resolved.
    Marginal,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Secret => "secret",
            Verdict::NotSecret => "not-secret",
            Verdict::Marginal => "marginal",
        }
    }
}

/// Positivity-based verdict: secret iff both I(A:B|E) and D(B|A) exceed
/// [`VERDICT_TOL`].
pub fn secrecy_verdict(report: &SecrecyReport) -> Verdict {
    oplog::record("secrecy.secrecy_verdict");
    let cmi_pos = report.i_ab_given_e > VERDICT_TOL;
    let d_pos = report.discord_b_given_a > VERDICT_TOL;
    match (cmi_pos, d_pos) {
        (true, true) => Verdict::Secret,
        (false, false) => Verdict::NotSecret,
        _ => Verdict::Marginal,
    }
}
