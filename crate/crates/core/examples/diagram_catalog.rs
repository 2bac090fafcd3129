//! Lists the catalogued star diagrams and checks that both projections are
//! constant on orbits.

use bsl::diagrams::{catalog_entries, check_projection_invariance, StarDiagram};

fn main() {
    for e in catalog_entries() {
        let d = StarDiagram::new(e.id);
        let (pb, ps) = check_projection_invariance(&d, 500, 3);
        println!("{} ({:?})", e.id, e.group);
        println!("  {} -> {} and {}", e.total_space, e.quotient_m, e.quotient_m_prime);
        println!("  cohomogeneity one: {}", e.cohomogeneity_one);
        println!("  projection defects: • {pb:.1e}, ⋆ {ps:.1e}");
    }
}
