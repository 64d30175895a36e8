//! Talk to a solver directly: guard three facts with activation literals,
//! ask for a contradiction, and shrink the core the solver reports.

use ivc_kind::lustre::Type;
use ivc_kind::smt::{SatResult, Session, SessionConfig, SolverSpec};
use ivc_kind::ts::{Cmp, Formula, Step};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SessionConfig::new(SolverSpec::from_env()?);
    let mut s = Session::open(&cfg, "QF_LIA")?;
    s.declare("x", Type::Int)?;
    let x = || Formula::var("x", Step::Cur);

    let facts = [
        ("x > 5", Formula::cmp(Cmp::Gt, x(), Formula::int(5))),
        ("x > 0", Formula::cmp(Cmp::Gt, x(), Formula::int(0))),
        ("x < 3", Formula::cmp(Cmp::Lt, x(), Formula::int(3))),
    ];
    let mut lits = Vec::new();
    for (name, f) in facts {
        let lit = s.new_actlit(name)?;
        s.assert_guarded(&lit, &f)?;
        lits.push(lit);
    }

    match s.check_sat(&lits[1..], &Formula::Bool(true))? {
        SatResult::Sat(model) => println!("x > 0 and x < 3: sat with x = {}", model.get("x").unwrap()),
        other => println!("unexpected: {other:?}"),
    }
    let core = s.minimize_core(&lits, &Formula::Bool(true))?;
    let names: Vec<&str> = core.iter().map(|l| l.payload.as_str()).collect();
    println!("all three: unsat, minimal core {names:?}");
    Ok(())
}
