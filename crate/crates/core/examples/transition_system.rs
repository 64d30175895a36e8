//! Lower the filter model to a transition system and print its conjuncts,
//! the system restricted to a core, and a VMT dump.

use ivc_kind::model::LoadedModel;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/models/filter.lus");
    let m = LoadedModel::from_file(path.as_ref()).expect("model loads");
    for c in &m.ts.conjuncts {
        let tag = if c.candidate { "candidate" } else { "fixed" };
        println!("{:<10} {:<10} {}", c.name, tag, c.formula.to_smt());
    }
    let restricted = m.ts.restrict_to_core(&["b", "y"]).expect("known conjuncts");
    println!("\nafter restricting to {{b, y}}: {} conjuncts", restricted.conjuncts.len());
    println!("\n{}", m.ts.to_vmt());
}
