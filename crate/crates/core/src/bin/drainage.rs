use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Arg, ArgAction, Command as App};

use drainage::cli::config::{parse_config_file, KEYS, SEED_ENV};
use drainage::cli::output::render;
use drainage::cli::{execute, metadata, write_document, Command, RunConfig};
use drainage::Error;

const SWITCHES: &[&str] = &["overwrite", "all_open"];

fn help_for(key: &str) -> &'static str {
    match key {
        "d" => "lattice dimension (spatial dimension d-1)",
        "p" => "probability that a vertex is open",
        "seed" => "master seed [env: DRAINAGE_SEED]",
        "max_search_height" => "levels searched above a vertex before giving up",
        "n_replicates" => "independent replicates",
        "height" => "trace horizon / box height / survival height",
        "t_cap" => "level cap for coalescence runs",
        "format" => "csv or json (JSON lines)",
        "out" => "output file (stdout when absent)",
        "threads" => "worker threads (all cores when absent)",
        "overwrite" => "replace an existing output file",
        "x" => "coalesce: comma-separated pair offsets",
        "t_min" | "t_max" | "t_points" => "coalesce: log-spaced level grid",
        "gaps" => "triple: gap pairs as AxB,AxB,...",
        "n_scale" => "scaling/eta: diffusive index n",
        "t" => "scaling/eta: macroscopic time",
        "epsilon" => "eta: comma-separated window half-widths",
        "start_gap" => "regen: initial spacing of the pair",
        "renewals" => "regen: renewals per replicate",
        "spacing" => "treescan pairs: initial spacing",
        "half_width" => "treescan box: half-width of the base",
        "mode" => "treescan: pairs or box",
        "all_open" => "treescan box: start from every open vertex, not just the base row",
        "m_max" => "exact: largest m for the tail table",
        _ => "",
    }
}

fn app() -> App {
    let mut app = App::new("drainage")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Simulates the discrete drainage network and its joint renewal process")
        .arg(
            Arg::new("command")
                .required(true)
                .value_parser(clap::builder::EnumValueParser::<Command>::new())
                .help("experiment to run"),
        )
        .arg(Arg::new("config").long("config").value_name("FILE").help("flat key = value config file"));
    for &key in KEYS {
        let arg = Arg::new(key).long(key.replace('_', "-")).help(help_for(key));
        let arg = if SWITCHES.contains(&key) { arg.action(ArgAction::SetTrue) } else { arg.value_name("V") };
        app = app.arg(arg);
    }
    app
}

fn run() -> Result<(), Error> {
    let matches = app().get_matches();
    let cmd = *matches.get_one::<Command>("command").expect("required");
    let file = match matches.get_one::<String>("config") {
        Some(path) => parse_config_file(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let mut flags = BTreeMap::new();
    for &key in KEYS {
        if SWITCHES.contains(&key) {
            if matches.get_flag(key) {
                flags.insert(key.to_string(), "true".to_string());
            }
        } else if let Some(v) = matches.get_one::<String>(key) {
            flags.insert(key.to_string(), v.clone());
        }
    }
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = RunConfig::resolve(&file, &flags, env_seed.as_deref())?;

    let started = Instant::now();
    let table = execute(cmd, &cfg)?;
    let meta = metadata(cmd, &cfg, started.elapsed().as_secs_f64());
    let doc = render(&meta, &table, cfg.format)?;
    match &cfg.out {
        Some(path) => write_document(path, &doc, cfg.overwrite),
        None => {
            std::io::stdout().lock().write_all(doc.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("drainage: {e}");
            match e {
                Error::SearchExceeded { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
