//! Prove one property and falsify another.

use ivc_kind::engine::{prove, ProveOutcome, ProverConfig};
use ivc_kind::model::LoadedModel;
use ivc_kind::smt::{SessionConfig, SolverSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ProverConfig::new(SessionConfig::new(SolverSpec::from_env()?));
    for name in ["counter.lus", "counter_bound.lus"] {
        let path = format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"));
        let m = LoadedModel::from_file(path.as_ref())?;
        match prove(&cfg, &m.ts, m.property()?)? {
            ProveOutcome::Proved(p) => {
                println!("{name}: proved at k = {} using {:?}", p.k, p.invariant_names())
            }
            ProveOutcome::Falsified(c) => {
                println!("{name}: falsified after {} steps", c.length);
                for (i, state) in c.trace.iter().skip(1).enumerate() {
                    println!("  step {i}: c = {}", state["c"]);
                }
            }
            ProveOutcome::Unknown(why) => println!("{name}: unknown ({why})"),
        }
    }
    Ok(())
}
