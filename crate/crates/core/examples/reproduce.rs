//! Prints the headline volumes and a short Monte Carlo trend.
//!
//! cargo run --release --example reproduce

use constwidth::montecarlo::ratio_trend;
use constwidth::volume::{volume_meissner_average, volume_meissner_closed, volume_u3, U3Method};

fn main() -> constwidth::Result<()> {
    let u3 = volume_u3(U3Method::Cases)?;
    let meissner = volume_meissner_closed();
    let average = volume_meissner_average()?;
    for r in [&u3, &meissner, &average] {
        println!("{:<18} volume {:.15}  ratio {:.15}", r.body.to_string(), r.volume, r.ratio_to_ball);
    }
    println!("U3 exceeds Meissner by {:.4}%", 100.0 * (u3.volume / meissner.volume - 1.0));
    println!("\n n   (Vol M_n / Vol B^n)^(1/n)   3σ interval");
    for row in ratio_trend(2, 12, 1_000_000, 0)? {
        println!(
            "{:>2}   {:.5}                       [{:.5}, {:.5}]",
            row.n, row.ratio_root, row.ratio_root_lo, row.ratio_root_hi
        );
    }
    Ok(())
}
