//! `proptime`: simulate, observe and verify automaton collectives.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use proptime_core::harness::{
    observables_table, open_scenario, run_verification_with, svg_diagram, text_diagram, trace_csv, Run, Scenario,
    VerificationReport, ABSOLUTE,
};
use proptime_core::rational::full;
use proptime_core::{affine_isomorphic, BodyFrame, Limits, RelativeKinematics};

/// Caps simulated horizons and period searches.
const MAX_STEPS_ENV: &str = "PROPTIME_MAX_STEPS";

#[derive(Parser)]
#[command(
    name = "proptime",
    version,
    about = "Proper time of automaton collectives on a 1D lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a world and write its trace as CSV.
    Simulate {
        /// Scenario file or bundled scenario name.
        scenario: String,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// World to simulate (defaults to the first).
        #[arg(long)]
        world: Option<String>,
    },
    /// Draw a time-space diagram.
    Diagram {
        scenario: String,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        world: Option<String>,
        /// Number of periods drawn for periodic worlds.
        #[arg(long, default_value_t = 3)]
        window: u32,
    },
    /// Print x_B, v_B, w_B and tau_B of a body.
    Observe {
        scenario: String,
        #[arg(long)]
        body: String,
    },
    /// Print the kinematics of A relative to B and the map L_AB.
    Frames {
        scenario: String,
        /// `A,B`; either may be `absolute`.
        #[arg(long, value_parser = parse_pair)]
        pair: (String, String),
    },
    /// Search for an affine isomorphism between two bodies.
    Isocheck {
        scenario: String,
        #[arg(long, value_parser = parse_pair)]
        pair: (String, String),
    },
    /// Run every check; exits 0 iff all pass.
    Verify {
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Text,
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => Ok((a.trim().into(), b.trim().into())),
        _ => Err(format!("expected `A,B`, got `{s}`")),
    }
}

fn limits() -> Result<Limits> {
    match std::env::var(MAX_STEPS_ENV) {
        Ok(v) => Ok(Limits {
            max_steps: v
                .parse()
                .with_context(|| format!("{MAX_STEPS_ENV}={v} is not an integer"))?,
        }),
        Err(_) => Ok(Limits::default()),
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_run(scenario: &str, horizon: Option<u64>) -> Result<Run> {
    let scenario = open_scenario(scenario)?;
    let horizon = horizon.unwrap_or(scenario.horizon);
    Ok(Run::with_horizon(horizon, scenario, &limits()?)?)
}

fn frame(run: &Run, name: &str) -> Result<BodyFrame> {
    if name == ABSOLUTE {
        return Ok(BodyFrame::absolute());
    }
    let (trace, members) = run.body(name)?;
    BodyFrame::new(trace, &members, run.scenario.p_max).with_context(|| format!("body {name} has no inertial frame"))
}

fn print_kinematics(label: &str, rk: &RelativeKinematics) {
    println!(
        "{label}: v={} w={} x0={} tau0={}",
        full(&rk.v),
        full(&rk.w),
        full(&rk.x0),
        full(&rk.tau0)
    );
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate {
            scenario,
            horizon,
            out,
            world,
        } => {
            let run = load_run(&scenario, horizon)?;
            let (_, trace) = run.world(world.as_deref())?;
            write(&out, &trace_csv(trace)?)?;
        }
        Command::Diagram {
            scenario,
            format,
            out,
            world,
            window,
        } => {
            let run = load_run(&scenario, None)?;
            let (_, trace) = run.world(world.as_deref())?;
            let text = match format {
                Format::Svg => svg_diagram(trace, window)?,
                Format::Text => text_diagram(trace, window)?,
            };
            write(&out, &text)?;
        }
        Command::Observe { scenario, body } => {
            let run = load_run(&scenario, None)?;
            let (trace, members) = run.body(&body)?;
            let signature = trace.inertial_signature(&members, run.scenario.p_max)?;
            print!("{}", observables_table(trace, &members, signature.as_ref())?);
        }
        Command::Frames { scenario, pair: (a, b) } => {
            let run = load_run(&scenario, None)?;
            let (fa, fb) = (frame(&run, &a)?, frame(&run, &b)?);
            let l_ab = fa.map_into(&fb);
            print_kinematics(&format!("{a} in {b}"), &RelativeKinematics::from_map(&l_ab)?);
            print_kinematics(&format!("{b} in {a}"), &fb.relative_to(&fa)?);
            println!("L_AB = {l_ab}");
        }
        Command::Isocheck { scenario, pair: (a, b) } => {
            let run = load_run(&scenario, None)?;
            let (ta, ma) = run.body(&a)?;
            let (tb, mb) = run.body(&b)?;
            match affine_isomorphic(ta, &ma, tb, &mb, run.scenario.p_max)? {
                Some(w) => {
                    println!("isomorphic: tau_A={} tau_B={}", full(&w.tau_a), full(&w.tau_b));
                    for (x, y) in &w.pairs {
                        println!("  {x} -> {y}");
                    }
                    let coords: Vec<String> = w.coordinates.iter().map(|(c, x)| format!("{c}:{}", full(x))).collect();
                    println!("coordinates: {}", coords.join(" "));
                    println!("L_BA = {}", w.frame_b_to_a);
                }
                None => println!("not isomorphic"),
            }
        }
        Command::Verify { scenarios, json } => {
            let limits = limits()?;
            let loaded = scenarios
                .iter()
                .map(|s| open_scenario(s))
                .collect::<Result<Vec<Scenario>, _>>()?;
            // Each scenario's pipeline is independent and single-threaded.
            let reports: Vec<VerificationReport> = thread::scope(|scope| {
                let handles: Vec<_> = loaded
                    .iter()
                    .map(|s| scope.spawn(move || run_verification_with(s, &limits)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("verifier thread"))
                    .collect()
            });
            for r in &reports {
                println!("{r}");
            }
            if let Some(path) = json {
                let text = match reports.as_slice() {
                    [one] => one.to_json(),
                    many => serde_json::to_string_pretty(many)?,
                };
                write(&path, &text)?;
            }
            return Ok(reports.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
