//! Basic spectrum of the round unit S² under rotation: ℓ(ℓ + 1).

use bsl::diagrams::DiagramId;
use bsl::eigen::basic_spectrum;
use bsl::geometry::{MetricSpec, Side};

fn main() -> bsl::Result<()> {
    let m = MetricSpec::default_for(DiagramId::TrivialS2)?;
    let s = basic_spectrum(&m, Side::M, 1024, 6)?;
    println!("{:>3} {:>16} {:>10} {:>8}", "l", "lambda", "err", "l(l+1)");
    for (l, v) in (1..).zip(&s.values) {
        println!("{l:>3} {:>16.10} {:>10.1e} {:>8}", v.lambda, v.err, l * (l + 1));
    }
    Ok(())
}
