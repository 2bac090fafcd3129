//! Orbit-volume weights of the Kaluza–Klein metric on S³ and the mean
//! curvature of the orbits.

use bsl::diagrams::DiagramId;
use bsl::geometry::{mean_curvature, orbit_profile, MetricSpec, Side};

fn main() -> bsl::Result<()> {
    let m = MetricSpec::default_for(DiagramId::Hopf)?;
    println!("orbit space length {:.6}", m.orbit_space_length());
    for side in [Side::P, Side::M, Side::MPrime] {
        let p = orbit_profile(&m, side, 256)?;
        let h = mean_curvature(&p);
        println!("{:<2} volume {:.10}", side.as_str(), p.volume());
        for i in [16, 64, 128, 192, 240] {
            println!("   t = {:.4}  w = {:.6}  h = {:+.6}", p.t[i], p.w[i], h[i]);
        }
    }
    Ok(())
}
