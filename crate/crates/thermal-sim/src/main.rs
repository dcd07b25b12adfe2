use clap::Parser;

fn main() -> std::process::ExitCode {
    thermal_sim::cli::run(thermal_sim::cli::Cli::parse())
}
