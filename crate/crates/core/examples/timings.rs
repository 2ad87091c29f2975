//! Crossover time and GHZ timing scales for a strongly coupled super-Ohmic bath.

use spinboson_core::analysis::{channel_for, crossover_time, timing_report, Window};
use spinboson_core::bath::BathParams;

fn main() -> Result<(), spinboson_core::Error> {
    let p = BathParams::default().with_alpha(0.5);
    let channel = channel_for(&p, 1.0, 2001)?;
    let window = Window::scaled(0.0, 10.0, p.omega_c)?;

    let cross = crossover_time(&channel, &window)?;
    println!("s = {}  omega_c tau = {:?}", p.s, cross.omega_c_tau);

    println!("{:>3} {:>10} {:>10} {:>10}", "N", "wc t_c", "wc t_s", "gap");
    for n in 2..=8 {
        let r = timing_report(n, &channel, &window)?;
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!("{n:>3} {:>10} {:>10} {:>10}", fmt(r.t_c.map(|t| t * p.omega_c)), fmt(r.t_s.map(|t| t * p.omega_c)), fmt(r.gap));
    }
    Ok(())
}
