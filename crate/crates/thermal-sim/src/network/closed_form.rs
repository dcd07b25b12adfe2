//! Closed-form covariance blocks of the broadcast network.
//!
//! These expressions give every 2x2 block of the post-splitter and channel
//! output covariance matrices directly in terms of the protocol parameters.
//! They are derived independently of the transform pipeline in
//! [`build_network`](super::build_network) and serve as its cross-check: the
//! two routes must agree entrywise.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::gaussian::GaussianState;
use crate::oplog;

use super::ProtocolParams;

/// x- and p-variances/covariances of one 2x2 diagonal block. The protocol is
/// phase-symmetric (x and p enter identically), but the two slots are kept
/// separate so asymmetric extensions stay expressible.
#[derive(Debug, Clone, Copy)]
struct Block {
    x: f64,
    p: f64,
}

impl Block {
    fn iso(v: f64) -> Self {
        Block { x: v, p: v }
    }
}

/// Assemble an n-mode covariance from per-pair diagonal blocks.
fn assemble(blocks: &[Vec<Block>], labels: &[&str]) -> Result<GaussianState> {
    let n = blocks.len();
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let b = if j >= i { blocks[i][j - i] } else { blocks[j][i - j] };
            cov[(2 * i, 2 * j)] = b.x;
            cov[(2 * i + 1, 2 * j + 1)] = b.p;
        }
    }
    GaussianState::new(
        cov,
        DVector::zeros(2 * n),
        labels.iter().map(|s| s.to_string()).collect(),
    )
}

/// Per-block second moments of the post-splitter state.
struct PostSplitterMoments {
    b: f64,
    a: f64,
    e: f64,
    ea: f64,
    eb: f64,
    ab: f64,
}

fn post_splitter_moments(p: &ProtocolParams) -> PostSplitterMoments {
    let mu1 = (1.0 - p.eta1).sqrt();
    let mu2 = (1.0 - p.eta2).sqrt();
    let sig = p.eta1 * p.v_s + mu1 * mu1 * p.v_e;
    PostSplitterMoments {
        b: p.eta2 + mu2 * mu2 * sig,
        a: mu2 * mu2 + p.eta2 * sig,
        e: mu1 * mu1 * p.v_s + p.eta1 * p.v_e,
        ea: -mu1 * p.eta1.sqrt() * p.eta2.sqrt() * (p.v_s - p.v_e),
        eb: -mu1 * p.eta1.sqrt() * mu2 * (p.v_s - p.v_e),
        ab: mu2 * p.eta2.sqrt() * (sig - 1.0),
    }
}

/// Closed-form 3-mode covariance after the trusted splitter, ordered
/// (b, a, e).
pub fn post_splitter_cov(params: &ProtocolParams) -> Result<GaussianState> {
    oplog::record("network.post_splitter_cov");
    params.validate()?;
    let m = post_splitter_moments(params);
    assemble(
        &[
            vec![Block::iso(m.b), Block::iso(m.ab), Block::iso(m.eb)],
            vec![Block::iso(m.a), Block::iso(m.ea)],
            vec![Block::iso(m.e)],
        ],
        &["b", "a", "e"],
    )
}

/// Closed-form 5-mode covariance after both noise channels, ordered
/// (v, a, e, b, v').
pub fn channel_output_cov(params: &ProtocolParams) -> Result<GaussianState> {
    oplog::record("network.channel_output_cov");
    params.validate()?;
    let m = post_splitter_moments(params);
    let (n3, n4) = params.env_variances()?;
    let (e3, e4) = (params.eta3, params.eta4);
    let (mu3, mu4) = ((1.0 - e3).sqrt(), (1.0 - e4).sqrt());
    let (s3, s4) = (e3.sqrt(), e4.sqrt());

    let v = e3 * n3 + mu3 * mu3 * m.a;
    let a = mu3 * mu3 * n3 + e3 * m.a;
    let b = mu4 * mu4 * n4 + e4 * m.b;
    let vp = e4 * n4 + mu4 * mu4 * m.b;

    let va = mu3 * s3 * (m.a - n3);
    let ve = mu3 * m.ea;
    let vb = mu3 * s4 * m.ab;
    let vvp = -mu3 * mu4 * m.ab;
    let ae = s3 * m.ea;
    let ab = s3 * s4 * m.ab;
    let avp = -s3 * mu4 * m.ab;
    let ebk = s4 * m.eb;
    let evp = -mu4 * m.eb;
    let bvp = mu4 * s4 * (n4 - m.b);

    assemble(
        &[
            vec![Block::iso(v), Block::iso(va), Block::iso(ve), Block::iso(vb), Block::iso(vvp)],
            vec![Block::iso(a), Block::iso(ae), Block::iso(ab), Block::iso(avp)],
            vec![Block::iso(m.e), Block::iso(ebk), Block::iso(evp)],
            vec![Block::iso(b), Block::iso(bvp)],
            vec![Block::iso(vp)],
        ],
        &["v", "a", "e", "b", "v'"],
    )
}

#[cfg(test)]
mod tests {
    use super::super::{build_network, post_splitter_mode};
    use super::*;
    use approx::assert_relative_eq;

    fn max_diff(a: &GaussianState, b: &GaussianState) -> f64 {
        (a.cov() - b.cov()).abs().max()
    }

    #[test]
    fn eve_blocks_vanish_at_transparent_tap() {
        // mu1 = 0 kills both e-cross factors
        let p = ProtocolParams::thermal(7.0).with_eta1(1.0).with_ve(3.0);
        let g = post_splitter_cov(&p).unwrap();
        assert_eq!(g.cov_entry(post_splitter_mode::E, 0, post_splitter_mode::A, 0), 0.0);
        assert_eq!(g.cov_entry(post_splitter_mode::E, 0, post_splitter_mode::B, 0), 0.0);
    }

    #[test]
    fn eve_blocks_vanish_at_matched_variances() {
        // the (Vs - Ve) factor zeroes the cross blocks
        let p = ProtocolParams::thermal(5.0).with_eta1(0.3).with_ve(5.0);
        let g = post_splitter_cov(&p).unwrap();
        assert_eq!(g.cov_entry(post_splitter_mode::E, 0, post_splitter_mode::A, 0), 0.0);
        assert_eq!(g.cov_entry(post_splitter_mode::E, 0, post_splitter_mode::B, 0), 0.0);
    }

    #[test]
    fn generic_point_matches_transform_pipeline() {
        let p = ProtocolParams::thermal(5.0).with_eta1(0.7).with_ve(2.0);
        let net = build_network(&p).unwrap();
        assert!(max_diff(&net.post_splitter, &post_splitter_cov(&p).unwrap()) < 1e-12);
        assert!(max_diff(&net.output, &channel_output_cov(&p).unwrap()) < 1e-12);
    }

    #[test]
    fn transparent_channels_leave_blocks_in_place() {
        // eta3 = eta4 -> 1 (pure loss): the a/b blocks pass through, the
        // cross blocks toward v, v' vanish
        let p = ProtocolParams {
            eta3: 1.0 - 1e-12,
            eta4: 1.0 - 1e-12,
            eps3: 0.0,
            eps4: 0.0,
            ..ProtocolParams::thermal(9.0).with_eta1(0.4).with_ve(2.0)
        };
        let g5 = channel_output_cov(&p).unwrap();
        let g3 = post_splitter_cov(&p).unwrap();
        assert_relative_eq!(
            g5.cov_entry(1, 0, 1, 0),
            g3.cov_entry(post_splitter_mode::A, 0, post_splitter_mode::A, 0),
            epsilon = 1e-8
        );
        assert!(g5.cov_entry(0, 0, 1, 0).abs() < 1e-5); // v-a cross ~ mu3
        assert!(g5.cov_entry(3, 0, 4, 0).abs() < 1e-5); // b-v' cross ~ mu4
    }

    #[test]
    fn matched_env_variance_decouples_v() {
        // N3 = <Xa^2> zeroes the v-a block
        let p = ProtocolParams::thermal(3.0).with_eta1(0.5).with_ve(1.0);
        let m = post_splitter_moments(&p);
        // pick eps3 so that N3 = m.a exactly: N = 1 + eta*eps/(1-eta)
        let eps3 = (m.a - 1.0) * (1.0 - p.eta3) / p.eta3;
        let p = ProtocolParams { eps3, ..p };
        let g5 = channel_output_cov(&p).unwrap();
        assert_relative_eq!(g5.cov_entry(0, 0, 1, 0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn alice_bob_swap_symmetry() {
        // exchanging (eta3, eps3) <-> (eta4, eps4) together with
        // eta2 <-> 1 - eta2 swaps Alice's and Bob's reduced states
        let p = ProtocolParams {
            eta3: 0.3,
            eta4: 0.7,
            eps3: 0.02,
            eps4: 0.05,
            ..ProtocolParams::thermal(20.0)
                .with_eta1(0.6)
                .with_eta2(0.35)
                .with_ve(4.0)
        };
        let q = ProtocolParams {
            eta2: 1.0 - p.eta2,
            eta3: p.eta4,
            eta4: p.eta3,
            eps3: p.eps4,
            eps4: p.eps3,
            ..p.clone()
        };
        let gp = channel_output_cov(&p).unwrap();
        let gq = channel_output_cov(&q).unwrap();
        assert_relative_eq!(gp.cov_entry(1, 0, 1, 0), gq.cov_entry(3, 0, 3, 0), epsilon = 1e-12);
        assert_relative_eq!(gp.cov_entry(3, 0, 3, 0), gq.cov_entry(1, 0, 1, 0), epsilon = 1e-12);
    }
}
