//! Thin command-line front end: each subcommand wraps one library
//! orchestration call. Exit codes: 0 success, 2 configuration error,
//! 3 numerical failure.

use bilinear_sme::complexity::ComplexityInputs;
use bilinear_sme::error::Error;
use bilinear_sme::experiment::{
    run_bound, run_constants, run_diam, run_simulate, run_sweep, ExperimentConfig,
};
use bilinear_sme::stochastic::trajectory_from_csv;
use std::path::{Path, PathBuf};

const USAGE: &str = "\
bilinear-sme — set-membership identification experiments for bilinear systems

USAGE:
    bilinear-sme <SUBCOMMAND> [OPTIONS]

SUBCOMMANDS:
    simulate    write seeded trajectory CSVs, the system JSON, and metadata
    sweep       run the contraction sweep; writes sweep.csv and summary.csv
    bound       evaluate the sample-size bound from an inputs JSON file
    constants   estimate excitation and boundary-mass constants
    diam        ad-hoc feasible-set diameter query on a trajectory CSV

OPTIONS:
    --config <FILE>        experiment config JSON (defaults apply if omitted)
    --seed <N>             override master_seed
    --out <DIR>            override output directory
    --replications <N>     override replication count
    --inputs <FILE>        (bound) ComplexityInputs JSON
    --traj <FILE>          (diam) trajectory CSV
    --t <N>                (diam) use only the first N samples
    --export-set <FILE>    (diam) also write the halfspace JSON
    -h, --help             print this help
";

struct Cli {
    subcommand: String,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<String>,
    replications: Option<usize>,
    inputs: Option<PathBuf>,
    traj: Option<PathBuf>,
    t: Option<usize>,
    export_set: Option<PathBuf>,
}

fn parse_args() -> Result<Cli, String> {
    let mut args = std::env::args().skip(1);
    let subcommand = match args.next() {
        Some(s) if s == "-h" || s == "--help" => {
            print!("{USAGE}");
            std::process::exit(0);
        }
        Some(s) => s,
        None => return Err("missing subcommand".into()),
    };
    let mut cli = Cli {
        subcommand,
        config: None,
        seed: None,
        out: None,
        replications: None,
        inputs: None,
        traj: None,
        t: None,
        export_set: None,
    };
    while let Some(flag) = args.next() {
        if flag == "-h" || flag == "--help" {
            print!("{USAGE}");
            std::process::exit(0);
        }
        let mut value = || args.next().ok_or(format!("flag {flag} needs a value"));
        match flag.as_str() {
            "--config" => cli.config = Some(PathBuf::from(value()?)),
            "--seed" => {
                cli.seed = Some(value()?.parse().map_err(|_| "bad --seed".to_string())?)
            }
            "--out" => cli.out = Some(value()?),
            "--replications" => {
                cli.replications =
                    Some(value()?.parse().map_err(|_| "bad --replications".to_string())?)
            }
            "--inputs" => cli.inputs = Some(PathBuf::from(value()?)),
            "--traj" => cli.traj = Some(PathBuf::from(value()?)),
            "--t" => cli.t = Some(value()?.parse().map_err(|_| "bad --t".to_string())?),
            "--export-set" => cli.export_set = Some(PathBuf::from(value()?)),
            other => return Err(format!("unknown flag {other}")),
        }
    }
    Ok(cli)
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(reps) = cli.replications {
        config.replications = reps;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), Error> {
    match cli.subcommand.as_str() {
        "simulate" => {
            let config = load_config(cli)?;
            let out = run_simulate(&config)?;
            println!(
                "wrote {} trajectories to {}",
                out.trajectory_files.len(),
                out.dir.display()
            );
            Ok(())
        }
        "sweep" => {
            let config = load_config(cli)?;
            let out = run_sweep(&config)?;
            let failed = out.rows.iter().filter(|r| r.failed).count();
            println!(
                "wrote {} rows ({failed} failed) to {}",
                out.rows.len(),
                out.sweep_csv.display()
            );
            Ok(())
        }
        "bound" => {
            let path = cli
                .inputs
                .as_ref()
                .ok_or_else(|| Error::Config("bound needs --inputs <FILE>".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read inputs {path:?}: {e}")))?;
            let inputs: ComplexityInputs = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad inputs file: {e}")))?;
            let report = run_bound(&inputs)?;
            let rendered = serde_json::to_string_pretty(&report)?;
            println!("{rendered}");
            if let Some(out) = &cli.out {
                std::fs::create_dir_all(out)?;
                std::fs::write(Path::new(out).join("bound.json"), rendered + "\n")?;
            }
            Ok(())
        }
        "constants" => {
            let config = load_config(cli)?;
            let report = run_constants(&config)?;
            let rendered = serde_json::to_string_pretty(&report)?;
            println!("{rendered}");
            std::fs::create_dir_all(&config.out_dir)?;
            std::fs::write(
                Path::new(&config.out_dir).join("constants.json"),
                rendered + "\n",
            )?;
            Ok(())
        }
        "diam" => {
            let config = load_config(cli)?;
            let path = cli
                .traj
                .as_ref()
                .ok_or_else(|| Error::Config("diam needs --traj <FILE>".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read trajectory {path:?}: {e}")))?;
            let traj = trajectory_from_csv(&text)?;
            let out = run_diam(&config, &traj, cli.t, cli.export_set.is_some())?;
            print!("{}", out.csv);
            println!(
                "total,{},{},{}",
                out.samples, out.report.lower, out.report.upper
            );
            std::fs::create_dir_all(&config.out_dir)?;
            std::fs::write(Path::new(&config.out_dir).join("diam.csv"), out.csv)?;
            if let (Some(path), Some(json)) = (&cli.export_set, &out.set_json) {
                std::fs::write(path, json.clone() + "\n")?;
            }
            Ok(())
        }
        other => Err(Error::Config(format!("unknown subcommand {other:?}"))),
    }
}

fn main() {
    let cli = match parse_args() {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("error: {msg}\n\n{USAGE}");
            std::process::exit(2);
        }
    };
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
