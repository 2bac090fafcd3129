//! Warping the fiber of the Hopf bundle by `e^{2cu}` moves λ₁ on M' while M
//! is untouched.

use bsl::diagrams::DiagramId;
use bsl::geometry::MetricSpec;
use bsl::lab::{inequality_audit, warp_break};

fn main() -> bsl::Result<()> {
    let m = MetricSpec::default_for(DiagramId::Hopf)?;
    let scales = [0.0, 0.25, 0.5, 1.0, 2.0];
    for r in warp_break(DiagramId::Hopf, &m, &scales, 3, 1024)? {
        let audit = inequality_audit(&r);
        println!(
            "c = {:<5} λ₁ {:.10} -> {:.10} (±{:.1e})  broke {}  fiber variation {:.3}  audit {:?}",
            r.scale,
            r.lambda1_unwarped,
            r.lambda1_warped,
            r.err_warped,
            r.broke_isospectrality,
            r.fiber_volume_variation,
            audit.verdict
        );
    }
    Ok(())
}
