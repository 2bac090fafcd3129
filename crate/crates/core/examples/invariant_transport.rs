//! Carrying invariant functions across each diagram respects sums, products
//! and round trips.

use bsl::diagrams::{transport_invariant, BasePoint, DiagramId, StarDiagram, Transport};
use bsl::lab::transport_audit;

fn main() -> bsl::Result<()> {
    let hopf = StarDiagram::new(DiagramId::Hopf);
    let f = |x: &BasePoint| x.0[0];
    let tf = transport_invariant(&hopf, f, Transport::ToPrime)?;
    let north = BasePoint(vec![1.0, 0.0, 0.0]);
    println!("hopf: f' at (1, 0, 0) = {}", tf.eval(&north));

    let bad = |x: &BasePoint| x.0[1];
    if let Err(e) = transport_invariant(&hopf, bad, Transport::ToPrime) {
        println!("non-invariant input rejected: {e}");
    }

    for id in DiagramId::ALL {
        let a = transport_audit(id, 1000, 11)?;
        println!(
            "{:<10} additive {:.1e}  multiplicative {:.1e}  involution {:.1e}  unit {:.1e}",
            id.as_str(),
            a.additive,
            a.multiplicative,
            a.involution,
            a.unit
        );
    }
    Ok(())
}
