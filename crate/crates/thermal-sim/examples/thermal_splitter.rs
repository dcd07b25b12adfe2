//! Gaussian-state basics: split a thermal beam on a balanced beamsplitter
//! and watch the correlations appear.
//!
//! ```bash
//! cargo run -p thermal-sim --example thermal_splitter
//! ```

use thermal_sim::gaussian::{
    check_physical, direct_sum, symplectic_eigenvalues, von_neumann_entropy, GaussianState,
    SymplecticTransform,
};
use thermal_sim::secrecy::mutual_information;

fn main() -> thermal_sim::Result<()> {
    let variance = 9.0;
    let joint = direct_sum(&[
        GaussianState::thermal(variance, "signal")?,
        GaussianState::vacuum("idle"),
    ])?;
    println!("input: thermal({variance} SNU) (+) vacuum");
    println!("input symplectic spectrum: {:?}", symplectic_eigenvalues(&joint)?);

    let splitter = SymplecticTransform::beamsplitter(0.5, 0, 1, 2)?;
    println!("splitter symplectic defect: {:.3e}", splitter.symplectic_defect());
    let out = splitter.apply(&joint)?;
    println!("\nafter a balanced splitter:");
    println!("  port variances: {:.3} / {:.3} SNU", out.cov_entry(0, 0, 0, 0), out.cov_entry(1, 0, 1, 0));
    println!("  x-x cross-covariance: {:.3}", out.cov_entry(0, 0, 1, 0));
    println!("  physical: {}", check_physical(&out).is_ok());
    // a passive transform never changes the joint spectrum
    println!("  output spectrum: {:?}", symplectic_eigenvalues(&out)?);

    let s_joint = von_neumann_entropy(&out)?;
    let s_a = von_neumann_entropy(&out.reduce(&[0])?)?;
    let s_b = von_neumann_entropy(&out.reduce(&[1])?)?;
    println!("\nentropies (bits): joint {s_joint:.4}, marginals {s_a:.4} / {s_b:.4}");
    println!(
        "mutual information between the ports: {:.4} bits",
        mutual_information(&out, &[0], &[1])?
    );
    println!("\nthe same split applied to vacuum leaves everything uncorrelated:");
    let vac = direct_sum(&[GaussianState::vacuum("a"), GaussianState::vacuum("b")])?;
    let vac_out = SymplecticTransform::beamsplitter(0.5, 0, 1, 2)?.apply(&vac)?;
    println!(
        "  mutual information: {:.3e} bits",
        mutual_information(&vac_out, &[0], &[1])?
    );
    Ok(())
}
