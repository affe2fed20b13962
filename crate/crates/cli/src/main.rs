//! Command-line front end: build coverings and solutions, verify the
//! solution axioms, evaluate the selection energy with tail certificates,
//! construct accordion maps, and emit SVG figures.
//!
//! Exit codes: 0 success, 2 input error, 3 mathematical precondition
//! failure, 4 internal invariant violation.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ortho2d::accordion::{build_accordion, AccordionSpec, Sequence};
use ortho2d::covering::{
    alpha_compatible, rect_region_covering, transform_covering, triangle_covering,
    vitali_dyadic_covering, Covering, CoveringError, Piece, Provenance,
};
use ortho2d::energy::{energy_report, tail_bound_triangle, EnergyError};
use ortho2d::report;
use ortho2d::scalar::{Dyadic, Scalar};
use ortho2d::solution::{build_solution, verify_solution, Solution};

#[derive(Parser)]
#[command(
    name = "ortho2d",
    version,
    about = "piecewise-affine gradient-constrained maps: coverings, solutions, energies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DomainArgs {
    /// Domain specification file (JSON).
    #[arg(long)]
    domain: PathBuf,
    /// Block truncation depth (levels of the square construction).
    #[arg(long, default_value_t = 4)]
    depth: u32,
    /// Use the dyadic selection covering with this many stages instead of
    /// the per-piece greedy/word coverings.
    #[arg(long)]
    vitali: Option<u32>,
    /// Word-expansion steps for triangular pieces.
    #[arg(long, default_value_t = 4)]
    tri_steps: u32,
    /// Cap on greedy squares per rectangular piece.
    #[arg(long, default_value_t = 4096)]
    max_squares: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the covering of a domain and write it out.
    Cover {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the solution on the covering and export the cell map.
    Build {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the solution axioms on samples.
    Verify {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Core offsets for the connectivity/length checks.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.125])]
        delta: Vec<f64>,
    },
    /// Evaluate the selection energy over a truncation grid.
    Energy {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0])]
        delta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0])]
        h: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Demand a certified tail bound (fails on coverings without one).
        #[arg(long)]
        certify_tail: bool,
        /// Evaluate a whole depth sweep into one report (overrides --depth).
        #[arg(long, value_delimiter = ',')]
        depth_list: Option<Vec<u32>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an accordion map on nested double frames.
    Accordion {
        #[arg(long, default_value_t = 5)]
        frames: usize,
        /// harmonic | limit-half | geometric:<q>
        #[arg(long, default_value = "harmonic")]
        sequence: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit SVG figures (cell map with skeleton, covering layout).
    Plot {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        out: PathBuf,
        /// Canvas size in pixels.
        #[arg(long, default_value_t = 900.0)]
        px: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(move || run(cli)) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("internal invariant violation");
            ExitCode::from(4)
        }
    }
}

fn run(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Cover { domain, out } => cmd_cover(&domain, &out),
        Command::Build { domain, out } => cmd_build(&domain, &out),
        Command::Verify {
            domain,
            samples,
            seed,
            delta,
        } => cmd_verify(&domain, samples, seed, &delta),
        Command::Energy {
            domain,
            alpha,
            delta,
            h,
            threads,
            certify_tail,
            depth_list,
            out,
        } => cmd_energy(
            &domain,
            alpha,
            &delta,
            &h,
            threads,
            certify_tail,
            depth_list,
            &out,
        ),
        Command::Accordion {
            frames,
            sequence,
            out,
        } => cmd_accordion(frames, &sequence, &out),
        Command::Plot { domain, out, px } => cmd_plot(&domain, &out, px),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: msg.into(),
        }
    }

    fn math(msg: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: msg.into(),
        }
    }
}

impl From<CoveringError> for CliError {
    fn from(e: CoveringError) -> Self {
        match &e {
            CoveringError::NotCompatible { .. } => CliError::math(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<EnergyError> for CliError {
    fn from(e: EnergyError) -> Self {
        CliError::math(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

/// One covered piece of the domain, ready for solution assembly.
struct CoveredPiece {
    covering: Covering<f64>,
    step_tail: StepTail,
    label: String,
}

/// How the covering squares beyond the generated ones are certified.
enum StepTail {
    Complete,
    Triangle {
        tri: ortho2d::covering::TriangularDomain,
        steps: u32,
    },
    Uncertified,
}

fn load_pieces(args: &DomainArgs) -> Result<(f64, Vec<Piece>), CliError> {
    let text = fs::read_to_string(&args.domain)
        .map_err(|e| CliError::input(format!("{}: {e}", args.domain.display())))?;
    let parsed = report::parse_domain_spec(&text)?;
    Ok(parsed)
}

fn cover_pieces(args: &DomainArgs, pieces: &[Piece]) -> Result<Vec<CoveredPiece>, CliError> {
    let mut out = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        if let Some(n_max) = args.vitali {
            let covering = vitali_dyadic_covering(&piece.outline(), n_max);
            out.push(CoveredPiece {
                covering,
                step_tail: StepTail::Uncertified,
                label: format!("piece{i}-vitali"),
            });
            continue;
        }
        match piece {
            Piece::Rect { x0, y0, x1, y1 } => {
                let covering = rect_region_covering(*x0, *y0, *x1, *y1, args.max_squares);
                let step_tail = if covering.complete {
                    StepTail::Complete
                } else {
                    StepTail::Uncertified
                };
                out.push(CoveredPiece {
                    covering,
                    step_tail,
                    label: format!("piece{i}-rect"),
                });
            }
            Piece::Tri {
                tri,
                rotation,
                translate,
            } => {
                let covering = triangle_covering(tri, args.tri_steps)?;
                let covering = transform_covering(&covering, *rotation, *translate);
                out.push(CoveredPiece {
                    covering,
                    step_tail: StepTail::Triangle {
                        tri: tri.clone(),
                        steps: args.tri_steps,
                    },
                    label: format!("piece{i}-tri"),
                });
            }
        }
    }
    Ok(out)
}

fn covering_summary(cov: &Covering<f64>) -> String {
    use std::collections::BTreeMap;
    let mut per_gen: BTreeMap<String, usize> = BTreeMap::new();
    for sq in &cov.squares {
        let key = match &sq.tag {
            Provenance::RectangleStep(_) => "greedy".to_string(),
            Provenance::TriangleWord(w) => format!("step{}", w.len()),
            Provenance::VitaliLevel(n) => format!("level{n}"),
        };
        *per_gen.entry(key).or_default() += 1;
    }
    let gens: Vec<String> = per_gen.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "{} squares, sum of sides {}, residual area {}, [{}]",
        cov.squares.len(),
        report::sig12(cov.sum_sides()),
        report::sig12(cov.residual_area),
        gens.join(" ")
    )
}

fn export_covering(cov: &Covering<f64>) -> String {
    use std::fmt::Write as _;
    let mut s = String::from("covering v1\n");
    let _ = writeln!(s, "squares {}", cov.squares.len());
    for sq in &cov.squares {
        let _ = writeln!(
            s,
            "{} rot{} {} {} {}",
            sq.tag.label(),
            sq.rotation,
            Dyadic::from_f64_exact(sq.min.x).to_dyadic_string(),
            Dyadic::from_f64_exact(sq.min.y).to_dyadic_string(),
            Dyadic::from_f64_exact(sq.side).to_dyadic_string(),
        );
    }
    s
}

fn cmd_cover(args: &DomainArgs, out: &Path) -> Result<(), CliError> {
    let (_, pieces) = load_pieces(args)?;
    let covered = cover_pieces(args, &pieces)?;
    fs::create_dir_all(out)?;
    for cp in &covered {
        let path = out.join(format!("covering-{}.txt", cp.label));
        fs::write(&path, export_covering(&cp.covering))?;
        println!("{}: {}", cp.label, covering_summary(&cp.covering));
    }
    Ok(())
}

fn build_piece_solutions(
    args: &DomainArgs,
    covered: &[CoveredPiece],
) -> Result<Vec<Solution<f64>>, CliError> {
    covered
        .iter()
        .map(|cp| build_solution(&cp.covering, args.depth).map_err(CliError::from))
        .collect()
}

fn cmd_build(args: &DomainArgs, out: &Path) -> Result<(), CliError> {
    let (_, pieces) = load_pieces(args)?;
    let covered = cover_pieces(args, &pieces)?;
    let sols = build_piece_solutions(args, &covered)?;
    fs::create_dir_all(out)?;
    for (cp, sol) in covered.iter().zip(&sols) {
        let path = out.join(format!("solution-{}.txt", cp.label));
        fs::write(&path, report::export_map(&sol.map))?;
        println!(
            "{}: {} cells, skeleton length {}, depth {}",
            cp.label,
            sol.map.cells.len(),
            report::sig12(sol.sigma.length()),
            sol.depth
        );
    }
    Ok(())
}

fn cmd_verify(
    args: &DomainArgs,
    samples: usize,
    seed: u64,
    deltas: &[f64],
) -> Result<(), CliError> {
    let (_, pieces) = load_pieces(args)?;
    let covered = cover_pieces(args, &pieces)?;
    let sols = build_piece_solutions(args, &covered)?;
    let mut all_ok = true;
    for (cp, sol) in covered.iter().zip(&sols) {
        let rep = verify_solution(sol, samples, seed, deltas);
        println!(
            "{}: gradient-ok {:.6}, edge-defect {} ({}), boundary-ratio {:.4}, passed {}",
            cp.label,
            rep.gradient_ok_fraction,
            report::sig12(rep.max_edge_defect),
            if rep.edge_defect_exact_zero {
                "exact zero"
            } else {
                "float"
            },
            rep.boundary_sup_ratio,
            rep.passed
        );
        for (d, conn) in &rep.h1_connected {
            let txt = match conn {
                Some(true) => "connected",
                Some(false) => "DISCONNECTED",
                None => "not evaluated (non-convex)",
            };
            println!("  core {d}: skeleton {txt}");
        }
        all_ok &= rep.passed;
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::math("verification failed"))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_energy(
    args: &DomainArgs,
    alpha: f64,
    deltas: &[f64],
    hs: &[f64],
    threads: usize,
    certify_tail: bool,
    depth_list: Option<Vec<u32>>,
    out: &Path,
) -> Result<(), CliError> {
    let (_, pieces) = load_pieces(args)?;
    if certify_tail && alpha <= 0.0 {
        return Err(CliError::math(
            "tail certificate requires a positive weight exponent",
        ));
    }
    let covered = cover_pieces(args, &pieces)?;
    // Resolve per-piece covering-step tails first so precondition failures
    // surface before any heavy work.
    let mut step_tails = Vec::new();
    for cp in &covered {
        let tail = match &cp.step_tail {
            StepTail::Complete => Some(0.0),
            StepTail::Triangle { tri, steps } => {
                let (ok, r_b, r_h) = alpha_compatible(tri, alpha);
                if !ok {
                    let r = r_b.max(r_h);
                    let threshold = (2.0f64).ln() / (1.0 / r).ln() - 1.0;
                    let msg = format!(
                        "triangle not compatible at alpha={alpha}: needs alpha > {threshold:.6}"
                    );
                    if certify_tail {
                        return Err(CliError::math(msg));
                    }
                    eprintln!("note: {msg}; tail omitted");
                    None
                } else {
                    Some(tail_bound_triangle(tri, alpha, *steps)?)
                }
            }
            StepTail::Uncertified => {
                if certify_tail {
                    return Err(CliError::math("no tail certificate for this covering type"));
                }
                None
            }
        };
        step_tails.push(tail);
    }
    let depths = depth_list.unwrap_or_else(|| vec![args.depth]);
    fs::create_dir_all(out)?;
    let mut total_csv = String::new();
    for (cp, step_tail) in covered.iter().zip(step_tails) {
        let mut reports = Vec::new();
        for &depth in &depths {
            let sol = build_solution(&cp.covering, depth)?;
            reports.extend(energy_report(&sol, alpha, deltas, hs, threads, step_tail)?.reports);
        }
        let sweep = ortho2d::energy::EnergySweep { reports };
        fs::write(
            out.join(format!("energy-{}.json", cp.label)),
            report::energy_json(&sweep),
        )?;
        let csv = report::energy_csv(&sweep);
        fs::write(out.join(format!("energy-{}.csv", cp.label)), &csv)?;
        total_csv.push_str(&csv);
        for r in &sweep.reports {
            println!(
                "{}: depth {} delta {} h {} -> F1 {}{} F2 {} tail {}",
                cp.label,
                r.depth,
                report::sig12(r.delta),
                report::sig12(r.h),
                report::sig12(r.f1),
                if r.f1_exact_zero { " (exact 0)" } else { "" },
                report::sig12(r.f2_total),
                r.tail_bound
                    .map(report::sig12)
                    .unwrap_or_else(|| "none".into())
            );
        }
    }
    fs::write(out.join("energy.csv"), total_csv)?;
    Ok(())
}

fn cmd_accordion(frames: usize, sequence: &str, out: &Path) -> Result<(), CliError> {
    let seq = parse_sequence(sequence)?;
    let spec = AccordionSpec::new(seq, frames).map_err(|e| CliError::input(e.to_string()))?;
    let map = build_accordion(&spec).map_err(|e| CliError::input(e.to_string()))?;
    fs::create_dir_all(out)?;
    fs::write(out.join("accordion.txt"), report::export_map(&map))?;
    let mut csv = String::from("n,s_2n,even_value,s_2n+1,odd_value\n");
    use std::fmt::Write as _;
    for n in 1..=frames {
        let _ = writeln!(
            csv,
            "{n},{},{},{},{}",
            report::sig12(spec.s(2 * n)),
            report::sig12(spec.axis_value_even(n)),
            report::sig12(spec.s(2 * n + 1)),
            report::sig12(spec.axis_value_odd(n)),
        );
    }
    fs::write(out.join("axis-values.csv"), csv)?;
    fs::write(
        out.join("accordion.svg"),
        svg::render_map(&map, None, 900.0),
    )?;
    println!(
        "{} frames, {} cells, frame-square jump length {}",
        frames,
        map.cells.len(),
        report::sig12(spec.jump_boundary_length(frames))
    );
    Ok(())
}

fn parse_sequence(text: &str) -> Result<Sequence, CliError> {
    match text {
        "harmonic" => Ok(Sequence::Harmonic),
        "limit-half" => Ok(Sequence::LimitHalf),
        other => {
            if let Some(q) = other.strip_prefix("geometric:") {
                let q: f64 = q
                    .parse()
                    .map_err(|_| CliError::input(format!("bad ratio in {other:?}")))?;
                if !(q > 0.0 && q < 1.0) {
                    return Err(CliError::input("geometric ratio must be in (0, 1)"));
                }
                Ok(Sequence::Geometric { q })
            } else {
                Err(CliError::input(format!(
                    "unknown sequence {other:?} (harmonic | limit-half | geometric:<q>)"
                )))
            }
        }
    }
}

fn cmd_plot(args: &DomainArgs, out: &Path, px: f64) -> Result<(), CliError> {
    let (_, pieces) = load_pieces(args)?;
    let covered = cover_pieces(args, &pieces)?;
    let sols = build_piece_solutions(args, &covered)?;
    fs::create_dir_all(out)?;
    for (cp, sol) in covered.iter().zip(&sols) {
        fs::write(
            out.join(format!("covering-{}.svg", cp.label)),
            svg::render_covering(&cp.covering, px),
        )?;
        fs::write(
            out.join(format!("cells-{}.svg", cp.label)),
            svg::render_map(&sol.map, Some(&sol.sigma), px),
        )?;
        println!(
            "{}: wrote covering and cell map ({} squares, {} cells)",
            cp.label,
            cp.covering.squares.len(),
            sol.map.cells.len()
        );
    }
    Ok(())
}
