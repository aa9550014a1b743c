use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use chen_reciprocity::forms::PolePoint;
use chen_reciprocity::harness::{emit_report, load_scene, parse_checks, run_checks, Format};
use chen_reciprocity::modular::{lvalue_iterated, lvalue_oracle, QExpansion};
use chen_reciprocity::ncseries::all_words;
use chen_reciprocity::reciprocity::{chart_forms, layout};
use chen_reciprocity::regularization::tame_symbol;
use chen_reciprocity::Error;

#[derive(Parser)]
#[command(
    name = "chenrec",
    version,
    about = "Iterated integrals and reciprocity laws on punctured Riemann surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run reciprocity checks on a scene file.
    Verify {
        #[arg(long)]
        scene: PathBuf,
        /// Comma-separated subset of residue,riemann,weil,triple,global,shuffle.
        /// Defaults to the scene's own list.
        #[arg(long)]
        checks: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
        /// Overrides every tolerance in the scene.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "text")]
        report: String,
    },
    /// L-value of a cusp form from its q-expansion, by iterated integrals and
    /// by incomplete-gamma summation.
    Lvalue {
        #[arg(long)]
        qexp: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Tame symbol at one pole of a scene; poles are numbered in loop order.
    TameSymbol {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        pole: usize,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

/// Input problems exit with 2, failed checks with 1.
enum Failure {
    Input(Error),
    Failed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.16e} {:+.16e}i", z.re, z.im)
}

fn verify(
    scene: PathBuf,
    checks: Option<String>,
    degree: Option<usize>,
    tol: Option<f64>,
    report: String,
) -> Result<(), Failure> {
    let format: Format = report.parse()?;
    let mut spec = load_scene(&scene)?;
    if let Some(d) = degree {
        if !(1..=8).contains(&d) {
            return Err(Error::Precondition(format!("degree must lie in 1..=8, got {d}")).into());
        }
        spec.degree = d;
    }
    if let Some(t) = tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::Precondition(format!("tolerance must be positive, got {t}")).into());
        }
        spec.set_tolerance(t);
    }
    let checks = match checks {
        Some(list) => parse_checks(&list)?,
        None => spec.checks.clone(),
    };
    let r = run_checks(&spec, &checks);
    print!("{}", emit_report(&r, format));
    if r.passed {
        Ok(())
    } else {
        Err(Failure::Failed)
    }
}

fn lvalue(qexp: PathBuf, n: usize, tol: f64) -> Result<(), Failure> {
    let f = QExpansion::load(&qexp)?;
    let it = lvalue_iterated(&f, n, tol)?;
    let lam = lvalue_oracle(&f, n as f64 + 1.0, 1e-8)?;
    let expected = Complex64::new(0.0, -1.0).powu(n as u32 + 1) * lam.value * (n as f64 + 1.0);
    let rel = (it - expected).norm() / expected.norm();
    println!("iterated      {}", fmt_c(it));
    println!("Lambda(f,{})  {}", n + 1, fmt_c(lam.value));
    println!("oracle        {}", fmt_c(expected));
    println!("relative_diff {rel:.3e}");
    println!("self_check    {:.3e}", lam.self_check);
    if rel < 1e-6 {
        Ok(())
    } else {
        Err(Failure::Failed)
    }
}

fn tame(scene: PathBuf, pole: usize, degree: Option<usize>, tol: f64) -> Result<(), Failure> {
    let spec = load_scene(&scene)?;
    let degree = degree.unwrap_or(spec.degree);
    let lay = layout(&spec.scene)?;
    let pl = lay.loops.get(pole).ok_or_else(|| {
        Error::Precondition(format!(
            "pole index {pole} out of range; the scene has {} poles",
            lay.loops.len()
        ))
    })?;
    let omega = chart_forms(&spec.scene.omega, pl.chart)?;
    let t = tame_symbol(&omega, &pl.keyhole, degree, tol)?;
    match pl.point {
        PolePoint::Finite(z) => println!("pole {pole} at {}", fmt_c(z)),
        PolePoint::Infinity => println!("pole {pole} at infinity"),
    }
    for w in all_words(spec.scene.omega.len(), degree) {
        println!(
            "{:<10} {}",
            if w.is_empty() {
                "1".to_string()
            } else {
                w.to_string()
            },
            fmt_c(t.series.coeff(&w))
        );
    }
    println!("inverse_defect {:.3e}", t.inverse_defect);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            scene,
            checks,
            degree,
            tol,
            report,
        } => verify(scene, checks, degree, tol, report),
        Command::Lvalue { qexp, n, tol } => lvalue(qexp, n, tol),
        Command::TameSymbol {
            scene,
            pole,
            degree,
            tol,
        } => tame(scene, pole, degree, tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
