use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gateopt::conflict::{calibrate, default_grid, DelayDist, DelayModel, FitTarget, DEFAULT_SAMPLES};
use gateopt::feasibility::{gate_violation_pairs, is_feasible};
use gateopt::io::{load_assignment, load_instance, save_instance, save_run, write_report, ScenarioRun};
use gateopt::objectives::normalize_weights;
use gateopt::tabu::derive_seed;
use gateopt::{
    generate, initial_solution, obj_composite, solve, Error, GenParams, Instance, ScenarioWeights,
    SolveResult, TabuParams,
};

#[derive(Parser)]
#[command(name = "gateopt", version, about = "Passenger-weighted airport gate assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic hub instance.
    Gen(GenArgs),
    /// Check an instance file, and optionally an assignment against it.
    Validate(ValidateArgs),
    /// Solve one weight scenario with tabu search.
    Solve(SolveArgs),
    /// Solve several scenarios and write a comparison report.
    Compare(CompareArgs),
    /// Fit the gate-conflict kernel by Monte Carlo.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    flights: usize,
    #[arg(long, default_value_t = 12)]
    gates: usize,
    #[arg(long, default_value_t = 3)]
    banks: usize,
    #[arg(long)]
    out: PathBuf,
    /// Start of the operating day, minutes since midnight.
    #[arg(long, default_value_t = 360.0)]
    day_start: f64,
    #[arg(long, default_value_t = 1080.0)]
    day_span: f64,
    #[arg(long, default_value_t = 30.0)]
    turn_min: f64,
    #[arg(long, default_value_t = 75.0)]
    turn_max: f64,
    #[arg(long, default_value_t = 0.3)]
    transfer_fraction: f64,
    #[arg(long, default_value_t = 100)]
    seats_min: u32,
    #[arg(long, default_value_t = 200)]
    seats_max: u32,
    #[arg(long, default_value_t = 1500.0)]
    concourse_length: f64,
    #[arg(long, default_value_t = 750.0)]
    checkpoint: f64,
    #[arg(long, default_value_t = 750.0)]
    bagclaim: f64,
    #[arg(long, default_value_t = 100.0)]
    spot_offset: f64,
    /// Minimum gate separation, minutes.
    #[arg(long, default_value_t = 15.0)]
    buffer: f64,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    assignment: Option<PathBuf>,
}

#[derive(Args)]
struct TabuArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, default_value_t = 500)]
    stall_limit: usize,
    #[arg(long, default_value_t = 10)]
    tenure: usize,
    #[arg(long, default_value_t = 50)]
    exchange_period: usize,
    #[arg(long, default_value_t = 20)]
    exchange_candidates: usize,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// Divide each weight by the greedy assignment's value of that objective.
    #[arg(long)]
    normalize: bool,
}

impl TabuArgs {
    fn params(&self, seed: u64) -> TabuParams {
        TabuParams {
            max_iter: self.max_iter,
            stall_limit: self.stall_limit,
            tenure: self.tenure,
            exchange_period: self.exchange_period,
            exchange_candidates: self.exchange_candidates,
            restarts: self.restarts,
            rng_seed: seed,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Preset 1-5.
    #[arg(long, conflicts_with = "weights", value_parser = clap::value_parser!(u8).range(1..=5))]
    scenario: Option<u8>,
    /// Custom weights `W_PAX,W_TAXI,W_ROBUST`.
    #[arg(long)]
    weights: Option<String>,
    #[command(flatten)]
    tabu: TabuArgs,
    /// Write the result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "1,2,3,4,5")]
    scenarios: String,
    #[command(flatten)]
    tabu: TabuArgs,
    /// Existing assignment to evaluate alongside the scenarios.
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Departure delay of the earlier turn, e.g. `exp:1` or `lognormal:2,1,-5`.
    #[arg(long)]
    dep_delay: Option<String>,
    /// Arrival delay of the later turn, e.g. `const:0`.
    #[arg(long)]
    arr_delay: Option<String>,
    #[arg(long, default_value_t = 2011)]
    seed: u64,
    /// Separations as `START:STOP:STEP` or a comma-separated list.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// `expected` or `conditional`.
    #[arg(long, default_value = "expected")]
    target: String,
    /// Store the fitted kernel in this instance file.
    #[arg(long)]
    apply: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoFeasibleGate { .. } | Error::NoFeasibleAssignment => 3,
        Error::Fit(_) => 4,
        _ => 2,
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn parse_weights(s: &str) -> Result<ScenarioWeights, Error> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("cannot parse weights '{s}'")))?;
    match parts.as_slice() {
        [p, t, r] => ScenarioWeights::new(*p, *t, *r),
        _ => Err(invalid(format!("expected three weights, got '{s}'"))),
    }
}

fn parse_scenarios(s: &str) -> Result<Vec<usize>, Error> {
    let list: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| invalid(format!("cannot parse scenarios '{s}'")))?;
    if list.is_empty() || list.iter().any(|n| !(1..=5).contains(n)) {
        return Err(invalid("scenarios must be in 1..=5"));
    }
    let mut seen = list.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != list.len() {
        return Err(invalid("scenarios must not repeat"));
    }
    Ok(list)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let bad = || invalid(format!("cannot parse grid '{s}'"));
    if let [a, b, c] = s.split(':').collect::<Vec<_>>().as_slice() {
        let (start, stop, step): (f64, f64, f64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            c.trim().parse().map_err(|_| bad())?,
        );
        if !(step > 0.0 && stop >= start) {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect()
}

fn print_result(w: &ScenarioWeights, r: &SolveResult) {
    let b = &r.breakdown;
    println!("weights: {w}");
    println!("pax: {}", b.pax);
    println!("taxi: {}", b.taxi);
    println!("robust: {}", b.robust);
    println!("composite: {}", b.composite);
    println!(
        "iterations: {} (best at {}), restarts: {}, wall time: {:.3}s",
        r.iterations, r.best_iteration, r.restarts_used, r.wall_time
    );
}

/// Weights actually optimized, after optional normalization.
fn effective_weights(inst: &Instance, w: ScenarioWeights, normalize: bool) -> Result<ScenarioWeights, Error> {
    if !normalize {
        return Ok(w);
    }
    let greedy = initial_solution(inst)?;
    Ok(normalize_weights(&w, &obj_composite(inst, &greedy, &w)))
}

fn cmd_gen(a: GenArgs) -> Result<(), Error> {
    let defaults = GenParams::default();
    let p = GenParams {
        n_flights: a.flights,
        n_gates: a.gates,
        n_banks: a.banks,
        day_start: a.day_start,
        day_span: a.day_span,
        turn_time: (a.turn_min, a.turn_max),
        transfer_fraction: a.transfer_fraction,
        seats: (a.seats_min, a.seats_max),
        concourse_length: a.concourse_length,
        checkpoint_position: a.checkpoint,
        bagclaim_position: a.bagclaim,
        spot_offset: a.spot_offset,
        rng_seed: a.seed,
        params: gateopt::GlobalParams {
            t_buff: a.buffer,
            ..defaults.params
        },
    };
    let inst = generate(&p)?;
    save_instance(&inst, &a.out)?;
    println!(
        "wrote {} flights, {} gates, {} transfer passengers to {}",
        inst.n_flights(),
        inst.n_gates(),
        inst.transfers().total(),
        a.out.display()
    );
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Error> {
    let inst = load_instance(&a.instance)?;
    println!("ok: {} flights, {} gates", inst.n_flights(), inst.n_gates());
    if let Some(path) = a.assignment {
        let asg = load_assignment(&path, &inst)?;
        if !is_feasible(&inst, &asg) {
            for (i, k, g) in gate_violation_pairs(&inst, &asg) {
                eprintln!("flights {i} and {k} at gate {g} violate the buffer");
            }
            return Err(Error::NoFeasibleAssignment);
        }
        println!("assignment feasible");
    }
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<(), Error> {
    let (name, weights) = match (a.scenario, &a.weights) {
        (Some(n), _) => (format!("S{n}"), ScenarioWeights::scenario(n as usize).expect("range-checked")),
        (None, Some(s)) => ("custom".to_string(), parse_weights(s)?),
        (None, None) => return Err(invalid("give --scenario or --weights")),
    };
    let params = a.tabu.params(a.tabu.seed);
    params.validate()?;
    let inst = load_instance(&a.instance)?;
    let w = effective_weights(&inst, weights, a.tabu.normalize)?;
    let result = solve(&inst, &w, &params)?;
    print_result(&w, &result);
    if let Some(out) = a.out {
        let run = ScenarioRun {
            name,
            weights: w,
            seed: Some(params.rng_seed),
            result,
        };
        save_run(&run, out)?;
    }
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<(), Error> {
    let scenarios = parse_scenarios(&a.scenarios)?;
    a.tabu.params(0).validate()?;
    let inst = load_instance(&a.instance)?;
    let baseline = match &a.baseline {
        Some(p) => Some(load_assignment(p, &inst)?),
        None => None,
    };

    let mut runs = Vec::new();
    for &n in &scenarios {
        let seed = derive_seed(a.tabu.seed, n as u64);
        let w = effective_weights(&inst, ScenarioWeights::scenario(n).expect("checked"), a.tabu.normalize)?;
        let result = solve(&inst, &w, &a.tabu.params(seed))?;
        println!(
            "S{n}: composite {} (pax {}, taxi {}, robust {}) in {:.3}s",
            result.breakdown.composite, result.breakdown.pax, result.breakdown.taxi, result.breakdown.robust, result.wall_time
        );
        runs.push(ScenarioRun {
            name: format!("S{n}"),
            weights: w,
            seed: Some(seed),
            result,
        });
    }
    if let Some(asg) = baseline {
        if !is_feasible(&inst, &asg) {
            log::warn!("baseline assignment violates the gate buffer");
        }
        let w = effective_weights(&inst, ScenarioWeights::scenario(5).expect("preset"), a.tabu.normalize)?;
        let breakdown = obj_composite(&inst, &asg, &w);
        println!("baseline: composite {}", breakdown.composite);
        runs.push(ScenarioRun {
            name: "baseline".into(),
            weights: w,
            seed: None,
            result: SolveResult {
                assignment: asg,
                breakdown,
                iterations: 0,
                best_iteration: 0,
                restarts_used: 0,
                wall_time: 0.0,
            },
        });
    }
    let files = write_report(&runs, &inst, &a.out)?;
    println!("summary: {}", files.summary.display());
    Ok(())
}

fn cmd_calibrate(a: CalibrateArgs) -> Result<(), Error> {
    let defaults = DelayModel::default();
    let model = DelayModel {
        dep_delay: match &a.dep_delay {
            Some(s) => s.parse::<DelayDist>()?,
            None => defaults.dep_delay,
        },
        arr_delay: match &a.arr_delay {
            Some(s) => s.parse::<DelayDist>()?,
            None => defaults.arr_delay,
        },
        rng_seed: a.seed,
    };
    let grid = match &a.grid {
        Some(s) => parse_grid(s)?,
        None => default_grid(),
    };
    let target: FitTarget = a.target.parse()?;
    // check the target file before spending time on sampling
    let apply_to = match &a.apply {
        Some(p) => Some(load_instance(p)?),
        None => None,
    };

    let cal = calibrate(&model, &grid, a.samples, target)?;
    let r = &cal.report;
    println!("a = {}", r.fit.a);
    println!("b = {}", r.fit.b);
    println!("r_squared = {}", r.r_squared);
    println!("points_used = {}", r.points_used);
    if r.clamped {
        println!("warning: duration grows with separation; b clamped to 1");
    }
    println!("sep,probability,conditional_mean,expected");
    for p in &cal.points {
        println!(
            "{},{},{},{}",
            p.sep,
            p.estimate.probability,
            p.estimate.conditional_mean,
            p.estimate.expected()
        );
    }

    if let (Some(inst), Some(path)) = (apply_to, &a.apply) {
        let params = gateopt::GlobalParams {
            conflict_fit: r.fit,
            ..*inst.params()
        };
        save_instance(&inst.with_params(params), path)?;
        println!("updated conflict_fit in {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Calibrate(a) => cmd_calibrate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
