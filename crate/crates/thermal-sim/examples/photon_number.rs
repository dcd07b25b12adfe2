//! Mean thermal occupancy across the spectrum.
//!
//! Shows why a room-temperature broadcast is interesting in the microwave
//! band: the Bose-Einstein occupancy at 30 GHz (angular reading) and 300 K
//! is over a thousand photons per mode, while an optical mode is empty.
//!
//! ```bash
//! cargo run -p thermal-sim --example photon_number
//! ```

use thermal_sim::gaussian::{bose_einstein_nbar, ThermalVarianceConvention};

fn main() -> thermal_sim::Result<()> {
    println!("occupancy against angular frequency at 300 K");
    println!("{:>14}  {:>12}  {:>14}", "omega (rad/s)", "nbar", "variance (SNU)");
    for omega in [3e9, 3e10, 2.0 * std::f64::consts::PI * 30e9, 3e12, 2.4e15] {
        let nbar = bose_einstein_nbar(omega, 300.0)?;
        let variance = ThermalVarianceConvention::TwoNPlusOne.variance(nbar);
        println!("{omega:>14.3e}  {nbar:>12.4}  {variance:>14.4}");
    }

    println!("\noccupancy against temperature at 3e10 rad/s");
    println!("{:>8}  {:>12}", "T (K)", "nbar");
    for temp in [3.0, 30.0, 77.0, 300.0, 3000.0] {
        println!("{temp:>8.1}  {:>12.4}", bose_einstein_nbar(3e10, temp)?);
    }

    let anchor = bose_einstein_nbar(3e10, 300.0)?;
    println!("\nreference point: nbar(3e10 rad/s, 300 K) = {anchor:.1}");
    Ok(())
}
