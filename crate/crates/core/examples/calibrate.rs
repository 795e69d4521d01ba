//! Prints the constants in `mhd2d::calibration`.
//!
//!     cargo run --release --example calibrate

use mhd2d::calibration::*;
use mhd2d::spectral::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::new(CALIBRATION_N)?;
    let seeds = CALIBRATION_SEEDS;
    println!("BERNSTEIN_P2 = {:e}", bernstein_sup(grid, seeds.clone())?);
    println!("LOG_SOBOLEV_Q4 = {:e}", log_sobolev_sup(grid, seeds.clone())?);
    let series = taylor_green_series(grid)?;
    let windows = random_windows(0.0, 1.0, 200, seeds.start);
    println!("TIME_INTEGRATED_Q4 = {:e}", time_integrated_sup(&series, &windows)?);
    for (probe, name) in [(Probe::Stokes, "STOKES"), (Probe::Poisson, "POISSON")] {
        for (q, tag) in [(4.0 / 3.0, "Q4_3"), (4.0, "Q4")] {
            println!("{name}_{tag} = {:e}", regularity_sup(grid, probe, q, seeds.clone())?);
        }
    }
    Ok(())
}
