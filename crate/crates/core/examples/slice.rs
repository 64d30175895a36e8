//! Compare backward slices with the cores that actually carry the proofs.

use ivc_kind::engine::ProverConfig;
use ivc_kind::ivc::{run, Algorithm, IvcConfig, IvcOutcome};
use ivc_kind::model::LoadedModel;
use ivc_kind::smt::{SessionConfig, SolverSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = IvcConfig::new(ProverConfig::new(SessionConfig::new(SolverSpec::from_env()?)));
    for name in ["filter.lus", "mutex.lus", "cruise.lus", "two_counters.lus"] {
        let path = format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"));
        let m = LoadedModel::from_file(path.as_ref())?;
        let prop = m.property()?;
        let slice = m.slice(prop)?;
        let core = match run(&cfg, &m.ts, prop, Algorithm::Ucbf)? {
            IvcOutcome::Core { ivc, .. } => ivc.core,
            _ => continue,
        };
        println!("{name:<18} slice {slice:?}  core {core:?}");
    }
    Ok(())
}
