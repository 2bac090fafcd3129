//! Transporting basic eigenfunctions from M to M' yields eigenfunctions with
//! the same eigenvalue.

use bsl::diagrams::DiagramId;
use bsl::geometry::MetricSpec;
use bsl::lab::joint_eigenfunction_check;

fn main() -> bsl::Result<()> {
    for id in [DiagramId::Hopf, DiagramId::TrivialS2] {
        let m = MetricSpec::default_for(id)?;
        println!("{id}");
        for index in 0..=5 {
            let c = joint_eigenfunction_check(id, &m, index, 1024)?;
            println!(
                "  {index}  lambda {:>14.8}  residual on M' {:.2e}  on M {:.2e}",
                c.lambda, c.residual, c.native_residual
            );
        }
    }
    Ok(())
}
