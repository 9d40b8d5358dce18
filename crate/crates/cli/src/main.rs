mod args;
mod io;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use discordium::channels::dephasing_channel;
use discordium::discord::{
    certify_classical, discord, mutual_information_loss, Certification, CertifyConfig, DiscordConfig,
};
use discordium::linalg::{distance, hermitian_eig, Norm};
use discordium::measures::{entropy_of_spectrum, mutual_information, von_neumann_entropy};
use discordium::petz::{build_petz, reconstruct_cq, recovery_residual};
use discordium::states::{random_cq_state, random_state, BipartiteState};
use discordium::zeroing::run_counterexample;
use serde_json::json;
use sha2::{Digest, Sha256};

use args::{Cli, Command, Global, Kind};
use io::{load, InputError, StateFile, VALIDATION_TOL};
use report::{matrix_rows, Report};

/// Process exit status: 0 success or classical, 1 witness of
/// non-classicality or a failed check, 2 bad input.
enum Outcome {
    Success,
    Negative,
}

enum Failure {
    Input(InputError),
    Library(discordium::Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Self::Input(e)
    }
}

impl From<discordium::Error> for Failure {
    fn from(e: discordium::Error) -> Self {
        Self::Library(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::iter::once("discordium".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ");
    let start = Instant::now();
    let mut report = Report::new(echo);
    match run(&cli.command, &cli.global, &mut report) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(outcome)) => {
            if cli.global.timing {
                report.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            print!("{}", report.render(cli.global.json));
            if cli.global.json {
                println!();
            }
            match outcome {
                Outcome::Success => ExitCode::SUCCESS,
                Outcome::Negative => ExitCode::from(1),
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(None)` means the command wrote its own output.
fn run(cmd: &Command, g: &Global, report: &mut Report) -> Result<Option<Outcome>, Failure> {
    match cmd {
        Command::Entropy { state } => {
            let loaded = load(state)?;
            report.input("state", loaded.digest);
            let spectrum = if g.raw {
                hermitian_eig(&loaded.file.hermitian()?)?.eigenvalues
            } else {
                report.tol("validation", VALIDATION_TOL);
                loaded.file.density(false)?.spectrum().to_vec()
            };
            report
                .set("dim", spectrum.len())
                .set("entropy_bits", entropy_of_spectrum(&spectrum))
                .set("spectrum", spectrum);
            Ok(Some(Outcome::Success))
        }
        Command::Discord { state } => {
            let loaded = load(state)?;
            report.input("state", loaded.digest);
            let s = loaded.file.bipartite(g.raw)?;
            let cfg = discord_config(g, g.enlarge);
            let r = discord(&s, &cfg)?;
            report.seed = Some(g.seed);
            report
                .set("value_bits", r.value)
                .set("mutual_information_bits", mutual_information(&s))
                .set("below_tol", r.value <= g.tol)
                .set("converged", r.converged)
                .set("enlarged", r.enlarged)
                .set("restarts_used", r.restarts_used)
                .set("iterations", r.iterations)
                .set("best_basis", matrix_rows(&r.best_basis));
            report
                .tol("zero_discord", g.tol)
                .tol("step", cfg.step_tol)
                .tol("validation", VALIDATION_TOL);
            Ok(Some(Outcome::Success))
        }
        Command::Certify { state } => {
            let loaded = load(state)?;
            report.input("state", loaded.digest);
            let s = loaded.file.bipartite(g.raw)?;
            let cfg = CertifyConfig {
                discord: discord_config(g, false),
                ..CertifyConfig::default()
            };
            report.seed = Some(g.seed);
            report
                .tol("zero_discord", g.tol)
                .tol("grouping", cfg.peel.group_tol)
                .tol("convex_combination", cfg.peel.convex_tol)
                .tol("cross_term", cfg.cross_tol)
                .tol("offdiag_relative", cfg.offdiag_rel_tol)
                .tol("validation", VALIDATION_TOL);
            match certify_classical(&s, g.tol, &cfg)? {
                Certification::Classical(c) => {
                    report
                        .set("classical", true)
                        .set("discord_bits", c.discord_value)
                        .set("partition", &c.partition)
                        .set("residual", c.residual)
                        .set("max_offdiag_relative", c.max_offdiag)
                        .set("peel_rounds", c.peel.rounds.len())
                        .set("basis", matrix_rows(&c.basis))
                        .set(
                            "conditional_states",
                            c.conditional_states
                                .iter()
                                .map(|r| matrix_rows(r.matrix()))
                                .collect::<Vec<_>>(),
                        );
                    Ok(Some(Outcome::Success))
                }
                Certification::NotClassical(w) => {
                    report.set("classical", false).set(
                        "witness",
                        json!({
                            "discord_bits": w.value,
                            "residual": w.residual,
                            "basis": matrix_rows(&w.basis),
                        }),
                    );
                    Ok(Some(Outcome::Negative))
                }
            }
        }
        Command::PetzVerify { state, basis } => {
            let loaded = load(state)?;
            let b = load(basis)?;
            report.input("state", loaded.digest).input("basis", b.digest);
            let s = loaded.file.bipartite(g.raw)?;
            let u = b.file.to_matrix()?;
            if u.rows() != s.d_a() {
                return Err(discordium::Error::DimensionMismatch {
                    expected: s.d_a().to_string(),
                    found: u.rows().to_string(),
                }
                .into());
            }
            let closed = reconstruct_cq(&s, &u)?;
            let d = dephasing_channel(&u, s.d_a(), s.d_b())?;
            let reference = BipartiteState::product(&s.rho_a(), &s.rho_b());
            let petz = build_petz(&d, reference.state())?;
            let general = petz.apply(&d.apply_operator(s.matrix())?)?;
            report
                .set("residual", recovery_residual(&s, &u)?)
                .set(
                    "reconstruction_error_frobenius",
                    distance(s.matrix(), &closed, Norm::Frobenius)?,
                )
                .set("closed_form_vs_petz", distance(&closed, &general, Norm::Frobenius)?)
                .set("information_loss_bits", mutual_information_loss(&s, &u)?);
            report.tol("validation", VALIDATION_TOL);
            Ok(Some(Outcome::Success))
        }
        Command::Zeroing => {
            let (first, second) = run_counterexample();
            let checks = json!({
                "original_entropy_1.7555": (first.original_entropy - 1.7555).abs() <= 5e-4,
                "zeroed_00_11_entropy_1.7546": (first.modified_entropy - 1.7546).abs() <= 5e-4,
                "zeroed_00_11_decreases": first.entropy_delta < 0.0,
                "zeroed_01_10_decreases": second.entropy_delta < 0.0,
            });
            let passed = checks.as_object().expect("object").values().all(|v| v == &json!(true));
            report
                .set("reports", [&first, &second])
                .set("checks", checks)
                .set("passed", passed);
            report.tol("published_digits", 5e-4);
            Ok(Some(if passed { Outcome::Success } else { Outcome::Negative }))
        }
        Command::Random {
            kind,
            da,
            db,
            rank,
            output,
        } => {
            let (da, db) = (*da, *db);
            let s = match kind {
                Kind::Haar => {
                    let rho = random_state::<f64>(da * db, rank.unwrap_or(da * db), g.seed)?;
                    BipartiteState::new(rho, da, db)?
                }
                Kind::Cq => random_cq_state::<f64>(da, db, g.seed)?,
            };
            let text = io::to_json(&StateFile::from_matrix(vec![da, db], s.matrix()));
            let Some(path) = output else {
                println!("{text}");
                return Ok(None);
            };
            std::fs::write(path, &text).map_err(|e| InputError::Io(format!("{}: {e}", path.display())))?;
            report.seed = Some(g.seed);
            report
                .set("kind", format!("{kind:?}").to_lowercase())
                .set("dims", [da, db])
                .set("entropy_bits", von_neumann_entropy(s.state()))
                .set("output", path.display().to_string())
                .set("output_sha256", hex::encode(Sha256::digest(text.as_bytes())));
            Ok(Some(Outcome::Success))
        }
    }
}

fn discord_config(g: &Global, enlarge: bool) -> DiscordConfig {
    DiscordConfig {
        restarts: g.restarts,
        enlarge,
        seed: g.seed,
        ..DiscordConfig::default()
    }
}
