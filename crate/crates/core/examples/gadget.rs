//! The two-conjunct wrapper is a minimal core exactly when the wrapped
//! property fails.

use ivc_kind::analysis::{gadget, GADGET_BASE};
use ivc_kind::engine::ProverConfig;
use ivc_kind::ivc::{check_ivc, is_minimal};
use ivc_kind::model::LoadedModel;
use ivc_kind::smt::{SessionConfig, SolverSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ProverConfig::new(SessionConfig::new(SolverSpec::from_env()?));
    for name in ["counter.lus", "counter_bound.lus"] {
        let path = format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"));
        let g = gadget(&LoadedModel::from_file(path.as_ref())?.ts)?;
        println!(
            "{name}: pair minimal {:?}, base alone {:?}",
            is_minimal(&cfg, &g.ts, &g.property, &g.core)?,
            check_ivc(&cfg, &g.ts, &g.property, &[GADGET_BASE])?
        );
    }
    Ok(())
}
