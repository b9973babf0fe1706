use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use k3cert::chamber::DEFAULT_REDUCTION_CAP;
use k3cert::lattice::LatticeVector;
use k3cert::pell::{DEFAULT_K_BOUND, MIN_ELL};
use k3cert::quartic::QuarticContext;
use k3cert::report::{timed, Checks, ReportItem, Status, VerificationReport};
use k3cert::weierstrass;

#[derive(Parser, Debug)]
#[command(name = "k3cert", version, about = "Exact verification of K3 automorphism computations")]
struct Cli {
    /// Also write the report as JSON.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// List lattice classes.
    Enumerate {
        #[command(subcommand)]
        what: Enumeration,
    },
    /// Reflect a class of the quartic lattice into the fundamental chamber.
    Reduce {
        /// Integer coordinates, e.g. "1,0,0".
        #[arg(long, value_parser = parse_class, allow_hyphen_values = true)]
        class: Class,
        #[arg(long, value_enum, default_value_t = Basis::Hlm)]
        basis: Basis,
    },
    /// Orbit of H under reduced words of length at most K.
    Orbit {
        #[arg(long = "len", value_name = "K")]
        len: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Suite {
    /// Every suite.
    All,
    /// The rank-3 quartic lattice.
    Quartic,
    /// The rank-2 family; defaults to ℓ = 6..12.
    Pell {
        #[arg(long, value_parser = parse_ell, conflicts_with = "ell_range")]
        ell: Option<i64>,
        /// Inclusive range `A..B`.
        #[arg(long, value_parser = parse_ell_range)]
        ell_range: Option<(i64, i64)>,
        /// Largest matrix entry in the isometry search; defaults to max(300, 17ℓ⁴).
        #[arg(long)]
        entry_bound: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_K_BOUND)]
        k_bound: i64,
    },
    /// Plane cubic translation maps and automorphisms.
    Weierstrass,
}

#[derive(Subcommand, Debug)]
enum Enumeration {
    /// Sections of the elliptic fibration `|f|`.
    Sections {
        #[arg(long, value_name = "K")]
        n_bound: i64,
    },
    /// Norm-4 classes in the fundamental chamber.
    Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Basis {
    #[value(name = "HLM", alias = "hlm")]
    Hlm,
    #[value(name = "fev", alias = "FEV")]
    Fev,
}

#[derive(Clone, Debug)]
struct Class([i64; 3]);

fn parse_class(s: &str) -> Result<Class, String> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad coordinate {c:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let coords: [i64; 3] = coords
        .try_into()
        .map_err(|c: Vec<i64>| format!("expected 3 comma-separated integers, got {}", c.len()))?;
    Ok(Class(coords))
}

fn parse_ell(s: &str) -> Result<i64, String> {
    let ell: i64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if ell < MIN_ELL {
        return Err(format!("ℓ must be at least {MIN_ELL}"));
    }
    Ok(ell)
}

fn parse_ell_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let (a, b) = (parse_ell(a)?, parse_ell(b)?);
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn enumerate_sections(n_bound: i64) -> ReportItem {
    timed("enumerate/sections", "Prop 3.3", || {
        let ctx = QuarticContext::new();
        let box_size = 10 * n_bound * n_bound + 20 * n_bound;
        match ctx.enumerate_sections(n_bound, box_size) {
            Err(err) => (Status::Fail, err.to_string()),
            Ok(data) => {
                let mut c = Checks::new();
                for (n, s) in &data.section_classes {
                    c.note(format!("n = {n}: {} = {} (H, L, M)", ctx.render_fev(s), ctx.render(&ctx.from_fev(s))));
                }
                let fit = &data.fit;
                c.finish(format!(
                    "{} sections for |n| ≤ {n_bound}; f-coefficient fits (n², n, 1) ↦ ({}, {}, {})",
                    data.section_classes.len(),
                    fit.a2,
                    fit.a1,
                    fit.a0
                ))
            }
        }
    })
}

fn enumerate_q() -> ReportItem {
    timed("enumerate/q", "Lemma 3.9", || {
        let ctx = QuarticContext::new();
        match ctx.enumerate_q_bruteforce(12) {
            Err(err) => (Status::Fail, err.to_string()),
            Ok(classes) => {
                let mut c = Checks::new();
                for a in &classes {
                    match ctx.classify_polarization(a) {
                        Ok(cl) => c.note(format!("{}: {:?}", ctx.render(a), cl.kind)),
                        Err(err) => c.fail(format!("{}: {err}", ctx.render(a))),
                    }
                }
                let names: Vec<String> = classes.iter().map(|a| ctx.render(a)).collect();
                c.finish(format!("Q = {{{}}}", names.join(", ")))
            }
        }
    })
}

fn reduce(coords: &[i64], basis: Basis) -> ReportItem {
    timed("reduce", "Lemma 3.10", || {
        let ctx = QuarticContext::new();
        let given = LatticeVector::from_i64(coords);
        let x = match basis {
            Basis::Hlm => given,
            Basis::Fev => ctx.from_fev(&given),
        };
        // Reflections only terminate on the closed positive cone; classes already on the chamber side need none.
        let settled = ctx.chamber.reduce_to_chamber(&x, 0).is_ok();
        if !settled && !ctx.chamber.in_positive_cone(&x) {
            return (Status::Fail, format!("{} is outside the positive cone; reduction is undefined", ctx.render(&x)));
        }
        match ctx.chamber.reduce_to_chamber(&x, DEFAULT_REDUCTION_CAP) {
            Err(err) => (Status::Fail, format!("{}: {err}", ctx.render(&x))),
            Ok(trace) => {
                let mut c = Checks::new();
                c.expect(ctx.chamber.replay(&trace) == x, || "replaying the word does not recover the input".into());
                let letters: Vec<String> = trace.word.iter().map(|i| format!("ι{}", i + 1)).collect();
                c.note(format!("wall indices (0-based, first applied first): {:?}", trace.word));
                c.note(format!("result in (f, e, v): {}", ctx.render_fev(&ctx.to_fev(&trace.result))));
                c.note(format!("satisfies every chamber face: {}", trace.in_chamber));
                c.finish(format!(
                    "{} ↦ {} via [{}]",
                    ctx.render(&x),
                    ctx.render(&trace.result),
                    letters.join(", ")
                ))
            }
        }
    })
}

fn orbit(len: usize) -> ReportItem {
    timed("orbit", "Lemma 3.13", || {
        let ctx = QuarticContext::new();
        match ctx.chamber.orbit_of_anchor(len) {
            Err(err) => (Status::Fail, err.to_string()),
            Ok(classes) => {
                let mut c = Checks::new();
                for x in &classes {
                    c.note(format!("{} (norm {})", ctx.render(x), ctx.lattice.norm(x).expect("rank 3")));
                }
                c.finish(format!("{} distinct classes g*H for reduced words of length ≤ {len}", classes.len()))
            }
        }
    })
}

fn run(cli: Cli) -> VerificationReport {
    let mut show_details = false;
    let report = match cli.command {
        Command::Verify { suite } => match suite {
            Suite::All => k3cert::full_report(),
            Suite::Quartic => QuarticContext::new().full_certificate(),
            Suite::Pell { ell, ell_range, entry_bound, k_bound } => {
                let ells: Vec<i64> = match (ell, ell_range) {
                    (Some(l), _) => vec![l],
                    (None, Some((a, b))) => (a..=b).collect(),
                    (None, None) => k3cert::DEFAULT_ELLS.collect(),
                };
                k3cert::pell_report(&ells, entry_bound, k_bound)
            }
            Suite::Weierstrass => weierstrass::plane_cubic_certificate(),
        },
        Command::Enumerate { what } => {
            show_details = true;
            VerificationReport::new(vec![match what {
                Enumeration::Sections { n_bound } => enumerate_sections(n_bound),
                Enumeration::Q => enumerate_q(),
            }])
        }
        Command::Reduce { class, basis } => {
            show_details = true;
            VerificationReport::new(vec![reduce(&class.0, basis)])
        }
        Command::Orbit { len } => {
            show_details = true;
            VerificationReport::new(vec![orbit(len)])
        }
    };
    let mut text = String::new();
    if show_details {
        for item in &report.items {
            text.push_str(&item.human_line());
            text.push('\n');
            for line in item.details.lines().skip(1) {
                text.push_str(&format!("    {line}\n"));
            }
        }
    } else {
        text.push_str(&report.human());
        text.push('\n');
    }
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    report
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json.clone();
    if let Some(n) = match &cli.command {
        Command::Enumerate { what: Enumeration::Sections { n_bound } } if *n_bound < 0 => Some(*n_bound),
        _ => None,
    } {
        eprintln!("error: --n-bound must be non-negative, got {n}");
        return ExitCode::from(2);
    }
    let report = run(cli);
    if let Some(path) = json {
        if let Err(err) = std::fs::write(&path, report.to_json()) {
            eprintln!("error: cannot write {}: {err}", path.display());
            return ExitCode::FAILURE;
        }
    }
    if report.is_success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
