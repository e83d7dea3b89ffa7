//! `popmatch` — weighted popular matching toolkit.
//!
//! Exit codes: 0 = success / property holds; 1 = counterexample found
//! (report attached); 2 = input or usage error; 3 = resource cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use popmatch_core::axioms::{
    check_non_wastefulness, check_pareto, check_preserves_dispute_resolutions,
    check_strategy_proofness, check_two_agent_cccr, check_w_popularity, replay, AuditReport,
    Axiom, ProblemFamily, ReplayOutcome,
};
use popmatch_core::constructions::{all_fixtures, independence_family, nonexistence_instance};
use popmatch_core::equilibrium::{
    check_equilibrium_outcome_uniqueness, check_w_popular_in_equilibrium, EquilibriumUniqueness,
    ReportingGame,
};
use popmatch_core::mechanisms::{mechanism_from_spec, Mechanism, PriorityStructure};
use popmatch_core::model::{
    classify_weights, parse_matching, parse_problem, serialize_matching, serialize_problem,
    validate_matching, AgentId, Matching, Problem, WeightProfile,
};
use popmatch_core::popularity::{
    is_w_popular, popularity_digraph, w_popular_set, Verdict, Weighting,
};
use popmatch_core::{Error as CoreError, Limits, Weight};

#[derive(Parser)]
#[command(name = "popmatch", version, about = "Allocation of indivisible objects to weighted agents: solvers, popularity analysis, axiom audits, and reporting-game equilibria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args)]
struct CapArgs {
    /// Cap on enumerated matchings per problem.
    #[arg(long)]
    max_matchings: Option<u64>,
    /// Cap on report profiles and audit family instances.
    #[arg(long)]
    max_profiles: Option<u64>,
}

impl CapArgs {
    fn limits(&self) -> Limits {
        let mut limits = limits_from_env();
        if let Some(v) = self.max_matchings {
            limits.max_matchings = v;
        }
        if let Some(v) = self.max_profiles {
            limits.max_profiles = v;
        }
        limits
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism (serial dictatorship by default) on one problem.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Agent ordering: `weights` or a comma-separated agent list.
        #[arg(long, default_value = "weights", conflicts_with = "mechanism")]
        ordering: String,
        /// Full mechanism spec (overrides --ordering).
        #[arg(long)]
        mechanism: Option<String>,
        /// Write the matching file here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Compute the w-popular set, or test one matching for w-popularity.
    Popular {
        #[arg(long)]
        input: PathBuf,
        /// Matching file to test; omit to enumerate the whole w-popular set.
        #[arg(long)]
        matching: Option<PathBuf>,
        /// Count one vote per agent instead of using the weights.
        #[arg(long)]
        unit: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Classify a weight profile.
    Classify {
        /// Comma-separated weights (agents named i1, i2, … in order).
        #[arg(long, conflicts_with = "input")]
        weights: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Audit a mechanism against axioms over a problem family.
    Check {
        #[arg(long)]
        mechanism: String,
        /// strategy-proofness | w-popularity | non-wastefulness | pareto |
        /// dispute-resolutions | two-agent-cccr | all
        #[arg(long)]
        axiom: String,
        /// Base problem for the family; defaults to the fixture mechanism's
        /// own family.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated free agents (default: all agents of the input).
        #[arg(long)]
        free: Option<String>,
        /// Write the JSON report(s) here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Enumerate pure Nash equilibria of the reporting game; optionally
    /// audit equilibrium outcomes for w-popularity and uniqueness.
    Equilibria {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "sd:weights")]
        mechanism: String,
        /// Also check w-popularity in equilibrium and outcome uniqueness.
        #[arg(long)]
        audit: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Export the popularity digraph of a problem.
    Digraph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        unit: bool,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// List or emit the built-in problem fixtures.
    Fixtures {
        /// Fixture name, `thm2-independence` for the whole independence
        /// group, or `nonexistence` / `manipulation` with --weights.
        #[arg(long)]
        name: Option<String>,
        /// Weights for the parameterised constructions, e.g. `4,3,2`.
        #[arg(long)]
        weights: Option<String>,
        /// Write `<name>.json` problem files into this directory.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
    },
    /// Replay the witness of an audit report.
    Verify {
        #[arg(long)]
        report: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::Resource { .. } => 3,
            _ => 2,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

fn io_error(path: &Path, err: std::io::Error) -> CliError {
    CliError {
        code: 2,
        message: format!("{}: {err}", path.display()),
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

fn limits_from_env() -> Limits {
    let mut limits = Limits::default();
    let read = |name: &str| std::env::var(name).ok().and_then(|v| v.parse::<u64>().ok());
    if let Some(v) = read("POPMATCH_MAX_MATCHINGS") {
        limits.max_matchings = v;
    }
    if let Some(v) = read("POPMATCH_MAX_ORDERINGS") {
        limits.max_orderings = v;
    }
    if let Some(v) = read("POPMATCH_MAX_PROFILES") {
        limits.max_profiles = v;
    }
    if let Some(v) = read("POPMATCH_MAX_UNIVERSE_OBJECTS") {
        limits.max_universe_objects = v as usize;
    }
    limits
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn load_problem(path: &Path) -> Result<Problem<Weight>, CliError> {
    Ok(parse_problem(&read_to_string(path)?)?)
}

fn da_loader(name: &str) -> Result<PriorityStructure, CoreError> {
    let text = fs::read_to_string(name).map_err(|e| {
        CoreError::Invalid {
            path: format!("da:{name}"),
            message: format!("cannot read priority file: {e}"),
        }
    })?;
    serde_json::from_str(&text).map_err(|e| CoreError::Json(e.to_string()))
}

fn resolve_mechanism(spec: &str) -> Result<Box<dyn Mechanism<Weight>>, CliError> {
    Ok(mechanism_from_spec(spec, &da_loader)?)
}

fn weights_from_list(list: &str) -> Result<WeightProfile<Weight>, CliError> {
    let mut pairs = Vec::new();
    for (i, part) in list.split(',').enumerate() {
        let value: Weight = part
            .trim()
            .parse()
            .map_err(|_| input_error(format!("invalid weight `{part}`")))?;
        pairs.push((AgentId::new(format!("i{}", i + 1)), value));
    }
    Ok(WeightProfile::from_pairs(pairs)?)
}

/// Canonical text rendering: one `agent→object` line per agent, in
/// canonical (weight, id) order.
fn render_matching(problem: &Problem<Weight>, matching: &Matching) -> String {
    problem
        .weights()
        .canonical_order()
        .iter()
        .map(|agent| match matching.assigned(agent) {
            Some(object) => format!("{agent}→{object}"),
            None => format!("{agent}→∅"),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Solve {
            input,
            ordering,
            mechanism,
            output,
            format,
            caps,
        } => cmd_solve(&input, &ordering, mechanism.as_deref(), output, format, &caps.limits()),
        Command::Popular {
            input,
            matching,
            unit,
            format,
            caps,
        } => cmd_popular(&input, matching, unit, format, &caps.limits()),
        Command::Classify {
            weights,
            input,
            format,
        } => cmd_classify(weights, input, format),
        Command::Check {
            mechanism,
            axiom,
            input,
            free,
            report,
            format,
            caps,
        } => cmd_check(&mechanism, &axiom, input, free, report, format, &caps.limits()),
        Command::Equilibria {
            input,
            mechanism,
            audit,
            format,
            caps,
        } => cmd_equilibria(&input, &mechanism, audit, format, &caps.limits()),
        Command::Digraph {
            input,
            unit,
            format,
            caps,
        } => cmd_digraph(&input, unit, format, &caps.limits()),
        Command::Fixtures {
            name,
            weights,
            emit_dir,
        } => cmd_fixtures(name, weights, emit_dir),
        Command::Verify { report, caps } => cmd_verify(&report, &caps.limits()),
    }
}

fn cmd_solve(
    input: &Path,
    ordering: &str,
    mechanism: Option<&str>,
    output: Option<PathBuf>,
    format: Format,
    limits: &Limits,
) -> Result<u8, CliError> {
    let problem = load_problem(input)?;
    let mech: Box<dyn Mechanism<Weight>> = match mechanism {
        Some(spec) => resolve_mechanism(spec)?,
        None if ordering == "weights" => resolve_mechanism("sd:weights")?,
        None => resolve_mechanism(&format!("sd:{ordering}"))?,
    };
    let _ = limits;
    let matching = mech.evaluate(&problem)?;
    let file = serialize_matching(&problem, &matching);
    if let Some(path) = &output {
        fs::write(path, &file).map_err(|e| io_error(path, e))?;
    }
    match format {
        Format::Json => print!("{file}"),
        _ => println!("{}", render_matching(&problem, &matching)),
    }
    Ok(0)
}

fn cmd_popular(
    input: &Path,
    matching: Option<PathBuf>,
    unit: bool,
    format: Format,
    limits: &Limits,
) -> Result<u8, CliError> {
    let problem = load_problem(input)?;
    let weighting = if unit {
        Weighting::Unit
    } else {
        Weighting::Weighted
    };
    match matching {
        Some(path) => {
            let m = parse_matching(&read_to_string(&path)?)?;
            validate_matching(&problem, &m)
                .map_err(|v| input_error(format!("invalid matching: {v}")))?;
            match is_w_popular(&problem, &m, weighting, limits)? {
                Verdict::Holds => {
                    match format {
                        Format::Json => println!("{}", serde_json::json!({"w_popular": true})),
                        _ => println!("w-popular: yes"),
                    }
                    Ok(0)
                }
                Verdict::Fails(challenger) => {
                    match format {
                        Format::Json => println!(
                            "{}",
                            serde_json::to_string_pretty(&serde_json::json!({
                                "w_popular": false,
                                "challenger": challenger.matching,
                                "margin": challenger.margin,
                            }))
                            .unwrap()
                        ),
                        _ => {
                            println!("w-popular: no");
                            println!("challenger (margin +{}):", challenger.margin);
                            println!("{}", render_matching(&problem, &challenger.matching));
                        }
                    }
                    Ok(1)
                }
            }
        }
        None => {
            let set = w_popular_set(&problem, weighting, limits)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({"w_popular_set": set}))
                        .unwrap()
                ),
                _ => {
                    if set.is_empty() {
                        println!("w-popular set: empty");
                    } else {
                        println!("w-popular set: {} matching(s)", set.len());
                        for m in &set {
                            println!("---");
                            println!("{}", render_matching(&problem, m));
                        }
                    }
                }
            }
            Ok(0)
        }
    }
}

fn cmd_classify(
    weights: Option<String>,
    input: Option<PathBuf>,
    format: Format,
) -> Result<u8, CliError> {
    let profile = match (&weights, &input) {
        (Some(list), _) => weights_from_list(list)?,
        (None, Some(path)) => load_problem(path)?.weights().clone(),
        (None, None) => return Err(input_error("supply --weights or --input")),
    };
    let class = classify_weights(&profile)?;
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "distinct": class.distinct,
                "essentially_distinct": class.essentially_distinct,
                "cumulatively_ordered": class.cumulatively_ordered,
                "canonical_order": class.canonical_order,
            }))
            .unwrap()
        ),
        _ => {
            println!("{}", class.summary());
            println!(
                "canonical order: {}",
                class
                    .canonical_order
                    .iter()
                    .map(|a| a.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
    }
    Ok(0)
}

fn parse_axioms(axiom: &str) -> Result<Vec<Axiom>, CliError> {
    if axiom == "all" {
        return Ok(vec![
            Axiom::StrategyProofness,
            Axiom::WPopularity,
            Axiom::NonWastefulness,
            Axiom::ParetoEfficiency,
            Axiom::PreservesDisputeResolutions,
            Axiom::TwoAgentConsistentConflictResolution,
        ]);
    }
    Ok(vec![axiom.parse::<Axiom>()?])
}

fn family_for_check(
    spec: &str,
    input: Option<PathBuf>,
    free: Option<String>,
    limits: &mut Limits,
) -> Result<ProblemFamily<Weight>, CliError> {
    if let Some(path) = input {
        let problem = load_problem(&path)?;
        *limits = limits.with_universe_objects(problem.object_count());
        let universe =
            popmatch_core::axioms::preference_universe(problem.objects(), limits)?;
        let free_agents: Vec<AgentId> = match free {
            Some(list) => list.split(',').map(|s| AgentId::new(s.trim())).collect(),
            None => problem.agents().to_vec(),
        };
        return Ok(ProblemFamily::new(
            format!("file:{}", path.display()),
            problem,
            free_agents,
            universe,
        )?);
    }
    if let Some(name) = spec.strip_prefix("fixture:") {
        // Fixture families are curated; admit their own object counts.
        *limits = limits.with_universe_objects(6);
        return Ok(independence_family::<Weight>(name, limits)?);
    }
    Err(input_error(
        "supply --input, or audit a fixture mechanism (its family is built in)",
    ))
}

fn cmd_check(
    mechanism: &str,
    axiom: &str,
    input: Option<PathBuf>,
    free: Option<String>,
    report_path: Option<PathBuf>,
    format: Format,
    limits: &Limits,
) -> Result<u8, CliError> {
    let mech = resolve_mechanism(mechanism)?;
    let axioms = parse_axioms(axiom)?;
    let mut limits = limits.clone();
    let family = family_for_check(mechanism, input, free, &mut limits)?;

    let mut reports: Vec<AuditReport<Weight>> = Vec::new();
    for ax in axioms {
        let report = match ax {
            Axiom::StrategyProofness => check_strategy_proofness(mech.as_ref(), &family, &limits),
            Axiom::WPopularity => check_w_popularity(mech.as_ref(), &family, &limits),
            Axiom::NonWastefulness => check_non_wastefulness(mech.as_ref(), &family, &limits),
            Axiom::ParetoEfficiency => check_pareto(mech.as_ref(), &family, &limits),
            Axiom::PreservesDisputeResolutions => {
                check_preserves_dispute_resolutions(mech.as_ref(), &family, &limits)
            }
            Axiom::TwoAgentConsistentConflictResolution => {
                check_two_agent_cccr(mech.as_ref(), &family, &limits)
            }
            Axiom::WPopularInEquilibrium => Err(CoreError::Precondition(
                "w-popular-in-equilibrium is audited by `equilibria --audit`".into(),
            )),
        }?;
        reports.push(report);
    }

    if let Some(path) = &report_path {
        let payload = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0]).unwrap() + "\n"
        } else {
            serde_json::to_string_pretty(&reports).unwrap() + "\n"
        };
        fs::write(path, payload).map_err(|e| io_error(path, e))?;
    }

    let mut failed = false;
    for report in &reports {
        if format == Format::Json {
            print!("{}", report.to_json());
        } else if report.holds() {
            println!(
                "{}: holds on family `{}` ({} instances)",
                report.axiom,
                report.family,
                report.instances_checked
            );
        } else {
            println!(
                "{}: counterexample after {} instance(s)",
                report.axiom, report.instances_checked
            );
            print!("{}", report.to_json());
        }
        failed |= !report.holds();
    }
    Ok(if failed { 1 } else { 0 })
}

fn cmd_equilibria(
    input: &Path,
    mechanism: &str,
    audit: bool,
    format: Format,
    limits: &Limits,
) -> Result<u8, CliError> {
    let problem = load_problem(input)?;
    let mech = resolve_mechanism(mechanism)?;
    let limits = limits.with_universe_objects(problem.object_count());
    let game = ReportingGame::new(mech.as_ref(), &problem, &limits)?;
    let equilibria = game.pure_nash_equilibria()?;

    if format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "mechanism": mech.name(),
                "pure_nash_equilibria": equilibria,
            }))
            .unwrap()
        );
    } else {
        println!("pure Nash equilibria: {}", equilibria.len());
    }

    if !audit {
        return Ok(0);
    }

    let uniqueness = check_equilibrium_outcome_uniqueness(mech.as_ref(), &problem, &limits)?;
    match &uniqueness {
        EquilibriumUniqueness::NoEquilibrium => println!("equilibrium outcomes: none"),
        EquilibriumUniqueness::Unique(m) => {
            println!("equilibrium outcomes: unique");
            println!("{}", render_matching(&problem, m));
        }
        EquilibriumUniqueness::Multiple(outcomes) => {
            println!("equilibrium outcomes: {} distinct", outcomes.len());
        }
    }

    let report = check_w_popular_in_equilibrium(mech.as_ref(), &problem, &limits)?;
    if report.holds() {
        println!("w-popular-in-equilibrium: holds");
        Ok(0)
    } else {
        println!("w-popular-in-equilibrium: counterexample");
        print!("{}", report.to_json());
        Ok(1)
    }
}

fn cmd_digraph(
    input: &Path,
    unit: bool,
    format: Format,
    limits: &Limits,
) -> Result<u8, CliError> {
    let problem = load_problem(input)?;
    let weighting = if unit {
        Weighting::Unit
    } else {
        Weighting::Weighted
    };
    let digraph = popularity_digraph(&problem, weighting, limits)?;
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "nodes": digraph.nodes,
                "edges": digraph.edges,
            }))
            .unwrap()
        ),
        _ => print!("{}", digraph.to_dot()),
    }
    Ok(0)
}

fn cmd_fixtures(
    name: Option<String>,
    weights: Option<String>,
    emit_dir: Option<PathBuf>,
) -> Result<u8, CliError> {
    let fixtures = all_fixtures::<Weight>();
    let name = match (name, &emit_dir) {
        (Some(name), _) => name,
        // Without a name, --emit-dir writes every static fixture.
        (None, Some(_)) => "all".to_string(),
        (None, None) => {
            println!("available fixtures:");
            for fixture in &fixtures {
                println!("  {}", fixture.name);
            }
            println!("  thm2-independence (group: thm2-dispute, thm2-wasteful, thm2-nonsp, thm2-da)");
            println!("  nonexistence (requires --weights)");
            println!("  manipulation (requires --weights, also emits the derived problem)");
            return Ok(0);
        }
    };

    let selected: Vec<(String, Problem<Weight>)> = match name.as_str() {
        "all" => fixtures
            .iter()
            .map(|f| (f.name.clone(), f.problem.clone()))
            .collect(),
        "thm2-independence" => fixtures
            .iter()
            .filter(|f| f.name.starts_with("thm2-"))
            .map(|f| (f.name.clone(), f.problem.clone()))
            .collect(),
        "nonexistence" => {
            let list = weights.ok_or_else(|| input_error("nonexistence needs --weights"))?;
            let fixture = nonexistence_instance(&weights_from_list(&list)?)?;
            vec![(fixture.name, fixture.problem)]
        }
        "manipulation" => {
            let list = weights.ok_or_else(|| input_error("manipulation needs --weights"))?;
            let manipulation = popmatch_core::constructions::manipulation_instance(
                &weights_from_list(&list)?,
            )?;
            vec![
                (manipulation.fixture.name.clone(), manipulation.fixture.problem),
                ("manipulation-derived".to_string(), manipulation.derived),
            ]
        }
        other => {
            let fixture = fixtures
                .into_iter()
                .find(|f| f.name == other)
                .ok_or_else(|| input_error(format!("unknown fixture `{other}`")))?;
            vec![(fixture.name, fixture.problem)]
        }
    };

    for (fixture_name, problem) in &selected {
        let text = serialize_problem(problem)?;
        match &emit_dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
                let path = dir.join(format!("{fixture_name}.json"));
                fs::write(&path, &text).map_err(|e| io_error(&path, e))?;
                println!("wrote {}", path.display());
            }
            None if selected.len() == 1 => print!("{text}"),
            None => {
                println!("# {fixture_name}");
                print!("{text}");
            }
        }
    }
    Ok(0)
}

fn cmd_verify(report_path: &Path, limits: &Limits) -> Result<u8, CliError> {
    let text = read_to_string(report_path)?;
    let reports: Vec<AuditReport<Weight>> = match AuditReport::from_json(&text) {
        Ok(single) => vec![single],
        Err(_) => serde_json::from_str(&text)
            .map_err(|e| input_error(format!("not an audit report (or array): {e}")))?,
    };

    let mut any_counterexample = false;
    for report in &reports {
        let mech = resolve_mechanism(&report.mechanism)?;
        let limits = limits.with_universe_objects(6);
        match replay(report, mech.as_ref(), &limits)? {
            ReplayOutcome::Confirmed => {
                any_counterexample = true;
                println!("confirmed: {} counterexample replays identically", report.axiom);
                print!("{}", report.to_json());
            }
            ReplayOutcome::NothingToReplay => {
                println!("{}: verdict holds-on-family (nothing to replay)", report.axiom);
            }
            ReplayOutcome::Mismatch(reason) => {
                return Err(input_error(format!(
                    "witness replay mismatch for {}: {reason}",
                    report.axiom
                )));
            }
        }
    }
    Ok(if any_counterexample { 1 } else { 0 })
}

