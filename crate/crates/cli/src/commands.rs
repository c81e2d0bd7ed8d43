//! One pipeline per subcommand. Each returns the `result` payload of the
//! report and, for checking commands, the reason verification failed.

use brauer_weingarten::brauer_linalg::{gram_matrix, weingarten_matrix};
use brauer_weingarten::designs::{
    construct_design_state, design_constraints, design_family_state, exact_design_check, impossibility_report,
};
use brauer_weingarten::exact::ExactRational;
use brauer_weingarten::sampling::{empirical_moment_seeded, helstrom_experiment, EnsembleSpec};
use brauer_weingarten::tensor_rep::{closed_form_distance, rho_br, rho_sym, trace_distance, StateVector};
use brauer_weingarten::verify::{run_all, VerifyOptions};
use brauer_weingarten::PairingBasis;
use serde_json::{json, Value};

use crate::{CliError, Command, Ensemble, RunConfig};

pub struct Outcome {
    pub result: Value,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self { result, failure: None }
    }
}

fn to_value<T: serde::Serialize + ?Sized>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Encode(e.to_string()))
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        Command::Gram => Ok(Outcome::ok(to_value(&gram_matrix(config.t()?, config.d()?)?)?)),
        Command::Weingarten => {
            let (t, d) = (config.t()?, config.d()?);
            let w = weingarten_matrix(t, d)?;
            let mut value = to_value(&w)?;
            value["basis"] = to_value(PairingBasis::new(t)?.as_slice())?;
            Ok(Outcome::ok(value))
        }
        Command::TraceDistance => {
            let (t, d) = (config.t()?, config.d()?);
            let numeric = trace_distance(&rho_br(d, t)?, &rho_sym(d, t)?)?;
            let closed = ExactRational::from(closed_form_distance(d, t));
            let closed_value = closed.to_f64();
            Ok(Outcome::ok(json!({
                "numeric": numeric,
                "closed_form": closed,
                "closed_form_value": closed_value,
                "difference": numeric - closed_value,
            })))
        }
        Command::DesignCheck => {
            let (t, d) = (config.t()?, config.d()?);
            let psi = match config.overlap {
                Some(s) => design_family_state(d, s)?,
                None => construct_design_state(d)?,
            };
            let report = exact_design_check(&psi, t)?;
            Ok(Outcome::ok(json!({ "state": to_value(&psi)?, "report": to_value(&report)? })))
        }
        Command::Constraints => Ok(Outcome::ok(to_value(&design_constraints(config.t()?, config.d()?)?)?)),
        Command::Impossibility => Ok(Outcome::ok(to_value(&impossibility_report(config.t()?, config.d()?)?)?)),
        Command::SampleMoment => sample_moment(config),
        Command::Helstrom => {
            let result = helstrom_experiment(config.t()?, config.d()?, config.n_samples, config.seed, config.workers)?;
            Ok(Outcome::ok(to_value(&result)?))
        }
        Command::VerifyAll => {
            if config.t.is_some() || config.d.is_some() {
                return Err(CliError::Config("verify-all runs a fixed grid and takes no --t/--d".into()));
            }
            let criteria = run_all(&VerifyOptions { seed: config.seed, workers: config.workers });
            let failed: Vec<String> = criteria.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
            let result = json!({
                "criteria": to_value(&criteria)?,
                "passed": criteria.len() - failed.len(),
                "total": criteria.len(),
            });
            let failure = (!failed.is_empty()).then(|| format!("criteria {} failed", failed.join(", ")));
            Ok(Outcome { result, failure })
        }
    }
}

fn sample_moment(config: &RunConfig) -> Result<Outcome, CliError> {
    let (t, d) = (config.t()?, config.d()?);
    let (spec, exact, name) = match config.ensemble {
        Ensemble::UnitaryHaar => (EnsembleSpec::unitary_haar(d, t)?, rho_sym(d, t)?, "unitary-haar"),
        Ensemble::OrthogonalOrbit => {
            (EnsembleSpec::orthogonal_orbit(StateVector::basis(d, 0)?, t)?, rho_br(d, t)?, "orthogonal-orbit")
        }
    };
    let moment = empirical_moment_seeded(&spec, config.n_samples, config.seed, config.workers)?;
    Ok(Outcome::ok(json!({
        "ensemble": name,
        "n_samples": config.n_samples,
        "trace": moment.trace().re,
        "max_abs_deviation": moment.max_abs_diff(&exact)?,
        "trace_distance_to_exact": trace_distance(&moment, &exact)?,
    })))
}
