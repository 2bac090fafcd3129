//! On S² × S¹ the product (flat) connection gives M' the metric of a Cheeger
//! deformation, and the two basic spectra separate. The balanced connection
//! keeps them equal.

use bsl::diagrams::DiagramId;
use bsl::geometry::{Connection, MetricSpec};
use bsl::lab::compare_basic_spectra;

fn main() -> bsl::Result<()> {
    for c in [Connection::Standard, Connection::Flat] {
        let m = MetricSpec::default_for(DiagramId::TrivialS2)?.with_connection(c);
        let r = compare_basic_spectra(DiagramId::TrivialS2, &m, 4, 512)?;
        println!("{c:?}: isospectral {} (max gap {:.2e})", r.isospectral, r.max_relative_gap);
        for p in &r.pairs {
            println!("  {:.8}  {:.8}", p.lambda_m, p.lambda_m_prime);
        }
    }
    Ok(())
}
