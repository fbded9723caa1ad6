use clap::{Arg, ArgAction, ArgMatches, Command};
use emergence_core::harness::{
    param_specs, run_experiment, write_manifest, ConfigFile, Experiment, ExperimentConfig, HarnessError,
};
use std::process::ExitCode;

fn about(exp: Experiment) -> &'static str {
    match exp {
        Experiment::Classical => "Leapfrog trajectory, action table and Hamilton-Jacobi residual",
        Experiment::Langevin => "Euler-Maruyama ensemble and Kramers-Moyal coefficients",
        Experiment::FokkerPlanck => "Chang-Cooper evolution or stationary density",
        Experiment::PathMc => "Metropolis sampling of the Euclidean lattice path measure",
        Experiment::OsCheck => "Reflection positivity, translations and Wick continuation of a free field",
        Experiment::Pipeline => "All five stages end to end",
    }
}

fn cli() -> Command {
    let mut cmd = Command::new("emergence")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Reproducible numerical experiments: classical, Langevin, Fokker-Planck, path Monte Carlo, Osterwalder-Schrader")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value file with [experiment] sections"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .global(true)
                .value_parser(clap::value_parser!(u64))
                .help("global random seed (default 0)"),
        )
        .arg(
            Arg::new("out-dir")
                .long("out-dir")
                .global(true)
                .env("EMERGENCE_OUT_DIR")
                .value_name("DIR")
                .help("output directory (default ./out)"),
        )
        .arg(
            Arg::new("json-manifest")
                .long("json-manifest")
                .global(true)
                .action(ArgAction::SetTrue)
                .help("write manifest.json instead of manifest.txt"),
        );
    for exp in Experiment::ALL {
        let mut sub = Command::new(exp.name()).about(about(exp));
        for spec in param_specs(exp) {
            let arg = Arg::new(spec.key).long(spec.key).help(format!("{} [default: {}]", spec.help, spec.default));
            sub = sub.arg(if spec.flag {
                arg.action(ArgAction::SetTrue)
            } else {
                arg.value_name("VALUE")
            });
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn build_config(m: &ArgMatches) -> Result<(ExperimentConfig, bool), HarnessError> {
    let (name, sub) = m.subcommand().expect("subcommand is required");
    let exp = Experiment::parse(name).expect("subcommands mirror experiments");
    let file = match sub.get_one::<String>("config") {
        Some(path) => ConfigFile::parse(
            &std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Usage(format!("cannot read config {path}: {e}")))?,
        )?,
        None => ConfigFile::default(),
    };
    if let Some(other) = file.experiment.filter(|e| *e != exp) {
        return Err(HarnessError::Usage(format!(
            "config names experiment {} but {} was requested",
            other.name(),
            exp.name()
        )));
    }
    let mut overrides: Vec<(String, String)> = file.section(exp).to_vec();
    for spec in param_specs(exp) {
        if spec.flag {
            if sub.get_flag(spec.key) {
                overrides.push((spec.key.into(), "true".into()));
            }
        } else if let Some(v) = sub.get_one::<String>(spec.key) {
            overrides.push((spec.key.into(), v.clone()));
        }
    }
    let seed = sub.get_one::<u64>("seed").copied().or(file.seed).unwrap_or(0);
    let out_dir = match sub.value_source("out-dir") {
        Some(clap::parser::ValueSource::CommandLine) => sub.get_one::<String>("out-dir").cloned(),
        _ => file.out_dir.clone().or_else(|| sub.get_one::<String>("out-dir").cloned()),
    }
    .unwrap_or_else(|| "out".into());
    let cfg = ExperimentConfig::new(
        exp,
        overrides.iter().map(|(k, v)| (k.as_str(), v.as_str())),
        seed,
        out_dir,
    )?;
    Ok((cfg, sub.get_flag("json-manifest")))
}

fn run(m: &ArgMatches) -> Result<bool, HarnessError> {
    let (cfg, json) = build_config(m)?;
    let manifest = run_experiment(&cfg)?;
    let path = write_manifest(&manifest, json)?;
    for st in &manifest.stages {
        println!("stage {:<16} {:?}: {}", st.name, st.status, st.reason);
    }
    for c in &manifest.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("manifest: {}", path.display());
    Ok(manifest.passed())
}

fn main() -> ExitCode {
    let m = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&m) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("emergence: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
