use std::fs;
use std::io::Write;
use std::path::Path;

use amulab::amu::{find_amu_state, scan_amu};
use amulab::models::{fredholm_index, fredholm_index_with_edge, t_hbar_operator, ModelDescriptor};
use amulab::numkernel::{ComplexMatrix, HermitianMatrix};
use amulab::spectrum::{euclidean_synthetic_spectrum, spherical_synthetic_spectrum, SyntheticSpectrum};
use amulab::transforms::{bar_transform, bounded_transform, resolvent_reparam, tilde_transform};
use amulab::tuples::{random_almost_commuting, OperatorTuple};
use amulab::verify::{run_acceptance_with, AcceptanceConfig, Status};
use serde::Serialize;

use crate::args::{AmuArgs, GenArgs, GenModel, IndexArgs, SpectrumArgs, TransformArgs, TransformKind, VariantArg, VerifyArgs};
use crate::error::CliError;

type CmdResult = Result<(), CliError>;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> CmdResult {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    fill(tmp.as_file_mut())?;
    tmp.as_file_mut().flush().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    write_atomic(path, |w| {
        w.write_all(text.as_bytes()).and_then(|_| w.write_all(b"\n")).map_err(|e| CliError::io(path, e))
    })
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    println!("{}", serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?);
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{what} {}: {e}", path.display())))
}

fn parse_point(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad coordinate {s:?} in {text:?}"))))
        .collect()
}

fn require_out(out: &Option<std::path::PathBuf>) -> Result<&Path, CliError> {
    out.as_deref().ok_or_else(|| CliError::Usage("missing --out".into()))
}

pub fn gen(args: &GenArgs) -> CmdResult {
    let out = require_out(&args.out)?;
    let tuple = match &args.model {
        GenModel::Hermite { n, hbar } => ModelDescriptor::HermiteXp { n: *n, hbar: *hbar }.build()?,
        GenModel::Spin { j, hbar } => ModelDescriptor::AngularMomentum { j: *j, hbar: *hbar }.build()?,
        GenModel::Commuting { points, dim } => {
            let points = points.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>, _>>()?;
            ModelDescriptor::CommutingDiagonal { points, dim: *dim }.build()?
        }
        GenModel::Random { n, dim, delta, seed } => random_almost_commuting(*n, *dim, *delta, *seed)?,
        GenModel::Descriptor { file } => read_json::<ModelDescriptor>(file, "descriptor")?.build()?,
    };
    write_json(out, &tuple)?;
    println!("wrote {} (n = {}, dim = {})", tuple.label(), tuple.n(), tuple.dim());
    Ok(())
}

fn validate_spectrum_params(m: f64, eta: f64) -> CmdResult {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(CliError::Usage(format!("--eta must lie in (0, 1), got {eta}")));
    }
    if !(m > 1.0 && m.is_finite()) {
        return Err(CliError::Usage(format!("--M must exceed 1, got {m}")));
    }
    Ok(())
}

pub fn spectrum(args: &SpectrumArgs) -> CmdResult {
    validate_spectrum_params(args.m, args.eta)?;
    let tuple: OperatorTuple = read_json(&args.tuple, "tuple file")?;
    let s = match args.variant {
        VariantArg::Euclidean => euclidean_synthetic_spectrum(&tuple, args.m, args.eta)?,
        VariantArg::Spherical => spherical_synthetic_spectrum(&tuple, args.m, args.eta)?,
    };
    write_json(&args.out, &s)?;
    if let Some(csv) = &args.csv {
        write_atomic(csv, |w| s.write_csv(w).map_err(CliError::from))?;
    }
    println!(
        "{:?} spectrum of {}: accepted {} of {} grid points (M = {}, eta = {})",
        s.variant,
        tuple.label(),
        s.len(),
        s.grid.len(),
        args.m,
        args.eta
    );
    Ok(())
}

pub fn amu(args: &AmuArgs) -> CmdResult {
    if !(args.epsilon >= 0.0 && args.epsilon.is_finite()) {
        return Err(CliError::Usage(format!("--epsilon must be finite and nonnegative, got {}", args.epsilon)));
    }
    let lambda = args.lambda.as_deref().map(parse_point).transpose()?;
    let tuple: OperatorTuple = read_json(&args.tuple, "tuple file")?;
    if let Some(lambda) = lambda {
        let w = find_amu_state(&tuple, &lambda)?;
        let pass = w.max_residual < args.epsilon;
        match &args.out {
            Some(out) => write_json(out, &w)?,
            None => print_json(&w)?,
        }
        println!("max residual {:.6e} at {:?}: {}", w.max_residual, lambda, if pass { "pass" } else { "fail" });
        return if pass { Ok(()) } else { Err(CliError::Failed(format!("residual {} >= epsilon {}", w.max_residual, args.epsilon))) };
    }
    let path = args.spectrum.as_deref().ok_or_else(|| CliError::Usage("need --spectrum or --lambda".into()))?;
    let s: SyntheticSpectrum = read_json(path, "spectrum file")?;
    let scan = scan_amu(&tuple, &s, args.epsilon)?;
    match &args.out {
        Some(out) => write_json(out, &scan)?,
        None => println!("{}", serde_json::to_string(&scan.failures).unwrap_or_default()),
    }
    if let Some(csv) = &args.csv {
        write_atomic(csv, |w| scan.write_csv(w).map_err(CliError::from))?;
    }
    println!(
        "{} centers, {} failures, worst residual {:.6e} (epsilon {})",
        scan.witnesses.len(),
        scan.failures.len(),
        scan.worst_residual,
        args.epsilon
    );
    if scan.passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} of {} centers exceed epsilon", scan.failures.len(), scan.witnesses.len())))
    }
}

pub fn index(args: &IndexArgs) -> CmdResult {
    let t = t_hbar_operator(args.n, args.hbar)?;
    let r = match args.edge {
        Some(e) => fredholm_index_with_edge(&t, args.ratio, e)?,
        None => fredholm_index(&t, args.ratio)?,
    };
    match &args.out {
        Some(out) => write_json(out, &r)?,
        None => print_json(&r)?,
    }
    let index = r.index.map_or("none".to_string(), |i| i.to_string());
    println!("index {index} ({:?}, kernel {}, cokernel {}, gap {:.3e})", r.status, r.kernel_dim, r.cokernel_dim, r.singular_gap);
    Ok(())
}

#[derive(Serialize)]
struct BoundedOutput {
    a: HermitianMatrix,
    b: Vec<ComplexMatrix>,
    identity_residual: f64,
}

pub fn transform(args: &TransformArgs) -> CmdResult {
    let s = match (args.kind, args.s) {
        (TransformKind::Reparam, None) => return Err(CliError::Usage("--kind reparam needs --s".into())),
        (TransformKind::Reparam, Some(s)) if !(s > 0.0 && s <= 1.0) => {
            return Err(CliError::Usage(format!("--s must lie in (0, 1], got {s}")))
        }
        (_, s) => s,
    };
    let tuple: OperatorTuple = read_json(&args.tuple, "tuple file")?;
    match args.kind {
        TransformKind::Bounded => {
            let bt = bounded_transform(&tuple)?;
            let identity_residual = bt.identity_residual();
            println!("bounded transform: |sum b*b + a^2 - I| = {identity_residual:.3e}");
            write_json(&args.out, &BoundedOutput { a: bt.a, b: bt.b, identity_residual })
        }
        TransformKind::Tilde => write_json(&args.out, &tilde_transform(&tuple)?),
        TransformKind::Bar => {
            let bar = OperatorTuple::new(format!("bar({})", tuple.label()), bar_transform(&tuple)?, tuple.interior_dim())?;
            write_json(&args.out, &bar)
        }
        TransformKind::Reparam => write_json(&args.out, &resolvent_reparam(&tuple, s.unwrap_or(1.0))?),
    }
}

pub fn verify(args: &VerifyArgs, config: Option<AcceptanceConfig>) -> CmdResult {
    let mut cfg = config.unwrap_or_default();
    if !args.only.is_empty() {
        cfg.only = args.only.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let report = run_acceptance_with(&cfg, |line| println!("{}", line.summary_line()))?;
    if let Some(path) = &args.report {
        write_json(path, &report)?;
    }
    if let Some(path) = &args.csv {
        write_atomic(path, |w| report.write_csv(w).map_err(CliError::from))?;
    }
    let passed = report.criteria.iter().filter(|c| c.status == Status::Pass).count();
    println!("{passed}/{} criteria passed", report.criteria.len());
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} criteria failed", report.criteria.len() - passed)))
    }
}
