//! Named sweeps reproducing the reference figures.
//!
//! All presets share the figure operating point (eta2 = 0.5,
//! eta3 = eta4 = 0.2, eps3 = eps4 = 1e-2) with the source occupancy derived
//! from 30 GHz detection at 300 K. The eavesdropper-tap transmittance eta1 is
//! always swept over (0, 1].

use crate::error::{Error, Result};
use crate::gaussian::bose_einstein_nbar;
use crate::network::ProtocolParams;

use super::{unit_grid, GridSpec, RunMode, SweepSpec, SweptParam};

pub const PRESET_NAMES: &[&str] = &[
    "fig-condmutinf",
    "fig-discord",
    "fig-thermal",
    "fig-coherent",
];

const GRID_POINTS: usize = 50;

/// Source occupancy at the reference detection conditions (30 GHz angular
/// reading, 300 K).
fn source_occupancy() -> f64 {
    bose_einstein_nbar(3e10, 300.0).expect("fixed positive arguments")
}

fn eta1_grid() -> GridSpec {
    GridSpec {
        param: SweptParam::Eta1,
        values: unit_grid(GRID_POINTS),
    }
}

/// The sweeps belonging to a named preset, or an error naming the valid
/// presets.
pub fn preset_sweeps(name: &str, seed: u64) -> Result<Vec<SweepSpec>> {
    let nbar = source_occupancy();
    let thermal = ProtocolParams::thermal_from_occupancy(nbar);
    match name {
        // conditional mutual information against eta1, one sweep per Eve
        // input variance
        "fig-condmutinf" | "fig-discord" => Ok([1.0, 50.0, 250.0]
            .iter()
            .map(|&ve| SweepSpec {
                name: format!("{name}-ve{ve:.0}"),
                grids: vec![eta1_grid()],
                base: thermal.clone().with_ve(ve),
                mode: RunMode::Analytic,
                samples: 0,
                seed,
                jobs: None,
            })
            .collect()),
        // measured-style CMI surface over (eta1, eta2) for a thermal source
        "fig-thermal" => Ok(vec![SweepSpec {
            name: "fig-thermal".into(),
            grids: vec![
                eta1_grid(),
                GridSpec {
                    param: SweptParam::Eta2,
                    values: unit_grid(GRID_POINTS),
                },
            ],
            base: thermal,
            mode: RunMode::Both,
            samples: 10_000,
            seed,
            jobs: None,
        }]),
        // the coherent contrast: same sweep with vacuum-variance fluctuations
        // around an equal-power carrier
        "fig-coherent" => Ok(vec![SweepSpec {
            name: "fig-coherent".into(),
            grids: vec![eta1_grid()],
            base: ProtocolParams::coherent(nbar),
            mode: RunMode::Both,
            samples: 100_000,
            seed,
            jobs: None,
        }]),
        other => Err(Error::Config(format!(
            "unknown preset {other:?}; valid presets: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}
