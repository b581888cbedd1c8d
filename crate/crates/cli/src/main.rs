//! Command-line front end for orthospectrum computations.

mod input;
mod output;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orthospec::develop::{develop, verify_development, DevelopmentReport};
use orthospec::enumerate::{enumerate_orthogeodesics, EnumParams};
use orthospec::rigidity::rigidity_roundtrip;
use orthospec::spectra::{
    basmajian_report, check_inequalities, compactness_probe, simple_basmajian_lower_bound, spectrum_from,
    BasmajianReport, InequalityInput, InequalityReport, SimpleBasmajianReport, Spectrum, SpectrumKind,
};
use orthospec::surface::{builtin, Builtin, UshijimaPoint};
use orthospec::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::input::SurfaceFile;
use crate::output::{fmt_f64, to_json, Envelope, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    CheckFailed(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("{0}")]
    NeedsLargerCutoff(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) | CliError::Numeric(_) | CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Resource(_) => 3,
            CliError::NeedsLargerCutoff(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Domain(_)
            | Error::Structural(_)
            | Error::Disconnected { .. }
            | Error::TopologyMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::KindMismatch(_)
            | Error::InvalidArgument(_) => CliError::Validation(msg),
            Error::Resource { .. } => CliError::Resource(msg),
            Error::NeedsLargerCutoff { .. } => CliError::NeedsLargerCutoff(msg),
            Error::Numeric(_) | Error::NotHyperbolic { .. } | Error::SameCarrier | Error::Precision { .. } => {
                CliError::Numeric(msg)
            }
        }
    }
}

#[derive(Parser)]
#[command(name = "orthospec", version, about = "Orthospectra of hyperbolic surfaces with geodesic boundary")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpectrumFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureFormat {
    Svg,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Orthospectrum (or simple orthospectrum) up to a cutoff.
    Spectrum {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        cutoff: f64,
        #[arg(long)]
        simple: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: SpectrumFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Basmajian sums and the inequality checks.
    Verify {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        cutoff: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a one-holed torus from its three shortest simple orthogeodesics.
    Reconstruct {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        cutoff: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the developed fundamental domain.
    Develop {
        #[arg(long)]
        surface: PathBuf,
        /// Also draw orthogeodesic lifts up to this length.
        #[arg(long)]
        orthos: Option<f64>,
        #[arg(long, value_enum, default_value = "svg")]
        format: FigureFormat,
        /// Visible window XMIN XMAX YMAX of the half-plane.
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["XMIN", "XMAX", "YMAX"])]
        window: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orthosystole-window probe over random surfaces.
    Probe {
        #[arg(long)]
        builtin: String,
        #[arg(long)]
        samples: usize,
        #[arg(long, required = true, num_args = 2, allow_negative_numbers = true, value_names = ["LO", "HI"])]
        range: Vec<f64>,
        #[arg(long)]
        eps1: f64,
        #[arg(long)]
        eps2: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_cutoff(cutoff: f64) -> Result<(), CliError> {
    if cutoff > 0.0 && cutoff.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("cutoff must be positive, got {cutoff}")))
    }
}

#[derive(Serialize)]
struct SpectrumBody<'a> {
    kind: SpectrumKind,
    cutoff: f64,
    entries: &'a [(f64, usize)],
}

fn spectrum_csv(sp: &Spectrum) -> String {
    let mut s = String::from("length,multiplicity\n");
    for (l, m) in &sp.entries {
        s.push_str(&format!("{},{m}\n", fmt_f64(*l)));
    }
    s
}

fn cmd_spectrum(surface: PathBuf, cutoff: f64, simple: bool, format: SpectrumFormat, out: Option<PathBuf>) -> Result<(), CliError> {
    check_cutoff(cutoff)?;
    let loaded = SurfaceFile::load(&surface)?.build()?;
    let d = develop(&loaded.surface)?;
    let list = enumerate_orthogeodesics(&d, &EnumParams::new(cutoff)?)?;
    let kind = if simple { SpectrumKind::Simple } else { SpectrumKind::Full };
    let sp = spectrum_from(&list, kind, cutoff);
    let text = match format {
        SpectrumFormat::Json => to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            command: "spectrum",
            surface: &loaded.name,
            body: SpectrumBody { kind, cutoff, entries: &sp.entries },
        }),
        SpectrumFormat::Csv => spectrum_csv(&sp),
    };
    emit(&out, &text)
}

#[derive(Serialize)]
struct VerifyBody {
    cutoff: f64,
    development: DevelopmentReport,
    basmajian: BasmajianReport,
    simple_basmajian: SimpleBasmajianReport,
    inequalities: InequalityReport,
    pass: bool,
}

fn cmd_verify(surface: PathBuf, cutoff: f64, out: Option<PathBuf>) -> Result<(), CliError> {
    check_cutoff(cutoff)?;
    let loaded = SurfaceFile::load(&surface)?.build()?;
    let s = &loaded.surface;
    let d = develop(s)?;
    let development = verify_development(&d);
    let list = enumerate_orthogeodesics(&d, &EnumParams::new(cutoff)?)?;
    let basmajian = basmajian_report(s, &spectrum_from(&list, SpectrumKind::Full, cutoff))?;
    let simple_basmajian = simple_basmajian_lower_bound(s, &spectrum_from(&list, SpectrumKind::Simple, cutoff))?;
    let inequalities = check_inequalities(&InequalityInput { surface: s, domain: &d, orthogeodesics: list, cutoff })?;
    let mut failed: Vec<String> = Vec::new();
    if !development.pass {
        failed.push("development".into());
    }
    if basmajian.residual < 0.0 {
        failed.push("basmajian".into());
    }
    if !simple_basmajian.holds {
        failed.push("simple_basmajian".into());
    }
    failed.extend(inequalities.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()));
    let pass = failed.is_empty();
    let body = VerifyBody { cutoff, development, basmajian, simple_basmajian, inequalities, pass };
    emit(&out, &to_json(&Envelope { schema_version: SCHEMA_VERSION, command: "verify", surface: &loaded.name, body }))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("checks failed: {}", failed.join(", "))))
    }
}

fn cmd_reconstruct(surface: PathBuf, cutoff: f64, out: Option<PathBuf>) -> Result<(), CliError> {
    check_cutoff(cutoff)?;
    let loaded = SurfaceFile::load(&surface)?.build()?;
    let report = rigidity_roundtrip(&loaded.surface, cutoff)?;
    let pass = report.pass;
    emit(
        &out,
        &to_json(&Envelope { schema_version: SCHEMA_VERSION, command: "reconstruct", surface: &loaded.name, body: report }),
    )?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed("round trip failed".into()))
    }
}

fn cmd_develop(
    surface: PathBuf,
    orthos: Option<f64>,
    format: FigureFormat,
    window: Option<Vec<f64>>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let loaded = SurfaceFile::load(&surface)?.build()?;
    let d = develop(&loaded.surface)?;
    let list = match orthos {
        Some(l) => {
            check_cutoff(l)?;
            enumerate_orthogeodesics(&d, &EnumParams::new(l)?)?
        }
        None => Vec::new(),
    };
    let g = svg::geometry(&d, &list);
    let text = match format {
        FigureFormat::Json => {
            to_json(&Envelope { schema_version: SCHEMA_VERSION, command: "develop", surface: &loaded.name, body: &g })
        }
        FigureFormat::Svg => {
            let w = match window.as_deref() {
                Some(&[xmin, xmax, ymax]) if xmin < xmax && ymax > 0.0 => svg::Window { xmin, xmax, ymax },
                Some(_) => return Err(CliError::Validation("window needs XMIN < XMAX and YMAX > 0".into())),
                None => svg::Window::fit(&g),
            };
            svg::render(&g, w)
        }
    };
    emit(&out, &text)
}

fn cmd_probe(
    which: String,
    samples: usize,
    range: Vec<f64>,
    eps1: f64,
    eps2: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let b: Builtin = which.parse()?;
    let (lo, hi) = (range[0], range[1]);
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(CliError::Validation(format!("range needs 0 < LO < HI, got {lo} {hi}")));
    }
    let comb = builtin(b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..samples)
        .map(|_| UshijimaPoint::new((0..comb.arc_count()).map(|_| rng.gen_range(lo..hi)).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    let report = compactness_probe(&points, &comb, eps1, eps2)?;
    let pass = report.pass;
    #[derive(Serialize)]
    struct ProbeBody<'a> {
        seed: u64,
        range: [f64; 2],
        eps1: f64,
        eps2: f64,
        #[serde(flatten)]
        report: &'a orthospec::spectra::ProbeReport,
    }
    let body = ProbeBody { seed, range: [lo, hi], eps1, eps2, report: &report };
    emit(&out, &to_json(&Envelope { schema_version: SCHEMA_VERSION, command: "probe", surface: b.name(), body }))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("boundary bound violated by samples {:?}", report.violations)))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum { surface, cutoff, simple, format, out } => cmd_spectrum(surface, cutoff, simple, format, out),
        Command::Verify { surface, cutoff, out } => cmd_verify(surface, cutoff, out),
        Command::Reconstruct { surface, cutoff, out } => cmd_reconstruct(surface, cutoff, out),
        Command::Develop { surface, orthos, format, window, out } => cmd_develop(surface, orthos, format, window, out),
        Command::Probe { builtin, samples, range, eps1, eps2, seed, out } => {
            cmd_probe(builtin, samples, range, eps1, eps2, seed, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("orthospec: validation error: thread count must be at least 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("orthospec: cannot start worker threads: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("orthospec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
