//! Left and right circle quotients of the round S³ share their basic
//! spectrum: both are the zonal spectrum of the sphere of radius ½.

use bsl::diagrams::DiagramId;
use bsl::geometry::MetricSpec;
use bsl::lab::compare_basic_spectra;

fn main() -> bsl::Result<()> {
    let m = MetricSpec::default_for(DiagramId::Hopf)?;
    let r = compare_basic_spectra(DiagramId::Hopf, &m, 5, 1024)?;
    for p in &r.pairs {
        let l = p.index as f64;
        println!(
            "{}  M {:.10}  M' {:.10}  4l(l+1) = {}  gap {:.1e}",
            p.index,
            p.lambda_m,
            p.lambda_m_prime,
            4.0 * l * (l + 1.0),
            p.relgap
        );
    }
    println!("max gap {:.2e}, tolerance {:.2e}, isospectral {}", r.max_relative_gap, r.tolerance, r.isospectral);
    Ok(())
}
