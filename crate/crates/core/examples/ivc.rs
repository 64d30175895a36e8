//! All three core algorithms on the filter model and on a model where the
//! UNSAT-core result carries an unneeded equation.

use ivc_kind::engine::ProverConfig;
use ivc_kind::ivc::{is_minimal, run, Algorithm, IvcConfig, IvcOutcome};
use ivc_kind::model::LoadedModel;
use ivc_kind::smt::{SessionConfig, SolverSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prover = ProverConfig::new(SessionConfig::new(SolverSpec::from_env()?));
    let cfg = IvcConfig::new(prover.clone());
    for name in ["filter.lus", "redundant.lus"] {
        let path = format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"));
        let m = LoadedModel::from_file(path.as_ref())?;
        let prop = m.property()?;
        println!("{name} (candidates {:?})", m.ts.candidates());
        for alg in Algorithm::ALL {
            if let IvcOutcome::Core { ivc, .. } = run(&cfg, &m.ts, prop, alg)? {
                let checked = is_minimal(&prover, &m.ts, prop, &ivc.core)?;
                println!("  {alg:<4} {:?} minimal: {checked:?}", ivc.core);
            }
        }
    }
    Ok(())
}
