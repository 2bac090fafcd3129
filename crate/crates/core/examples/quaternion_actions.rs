//! The two circle actions on S³ by left and right multiplication, and the
//! Gromoll–Meyer actions on Sp(2).
//!
//! ```text
//! cargo run --example quaternion_actions
//! ```

use bsl::algebra::{quat_mul, Quaternion};
use bsl::diagrams::{check_commute, check_membership, DiagramId, StarDiagram};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let i = Quaternion::I;
    let j = Quaternion::J;
    println!("i·j = {:?}", quat_mul(i, j));
    println!("j·i = {:?}", quat_mul(j, i));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let hopf = StarDiagram::new(DiagramId::Hopf);
    let p = hopf.random_point(&mut rng);
    let g = hopf.random_element(&mut rng);
    let h = hopf.random_element(&mut rng);
    let a = hopf.bullet(&g, &hopf.star(&h, &p));
    let b = hopf.star(&h, &hopf.bullet(&g, &p));
    println!("hopf: |g•(h⋆p) − h⋆(g•p)| = {:.2e}", a.distance(&b));

    for id in DiagramId::ALL {
        let d = StarDiagram::new(id);
        let (mb, ms) = check_membership(&d, 1000, 7);
        println!(
            "{:<10} commute {:.2e}  membership • {:.2e}  ⋆ {:.2e}",
            id.as_str(),
            check_commute(&d, 1000, 7),
            mb,
            ms
        );
    }
}
