//! Subcommand implementations and artifact layout.
//!
//! A solve run writes into its own directory:
//!
//! ```text
//! u_plus.field / u_minus.field      solution fields (text format)
//! report_plus.json / report_minus.json
//! diagnostics_plus.csv / diagnostics_minus.csv
//! manifest.json                     config echo, config hash, versions
//! ```
//!
//! Artifacts are deterministic for a fixed (config, seed): no timestamps,
//! stable field order, one thread.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use hartree_core::{
    green_potential, io, run_hypotheses, run_verify, solve_both_signs, ArVerdict, BothSigns,
    Dimension, SolveReport, SpectralField, Verdict, VerifyOptions,
};

use crate::config::RunConfig;
use crate::CliError;

const MANIFEST_FORMAT: &str = "HARTREE-RUN v1";

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    config_sha256: String,
    core_version: &'static str,
    cli_version: &'static str,
    config: &'a RunConfig,
}

fn config_hash(config: &RunConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config.canonical_json().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Default artifact root: HARTREE_OUT or ./hartree-out, with a per-config
/// subdirectory named by the config hash.
pub fn resolve_out_dir(out: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    match out {
        Some(dir) => dir,
        None => {
            let root = std::env::var_os("HARTREE_OUT")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("hartree-out"));
            root.join(format!("run-{}", &config_hash(config)[..12]))
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serialize {}: {e}", path.display())))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn diagnostics_rows(report: &SolveReport) -> Vec<Vec<f64>> {
    let d = &report.cerami;
    (0..d.products.len())
        .map(|i| {
            vec![
                i as f64,
                d.energies[i],
                d.dual_norms[i],
                d.products[i],
                d.sigma_integrals[i],
                d.quartic_integrals[i],
            ]
        })
        .collect()
}

fn write_run_artifacts(dir: &Path, config: &RunConfig, both: &BothSigns) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let io_err = |e: hartree_core::Error| CliError::Io(e.to_string());
    io::write_field(
        &dir.join("u_plus.field"),
        &both.u_plus,
        io::FieldRepr::Spectral,
        io::Encoding::Text,
    )
    .map_err(io_err)?;
    io::write_field(
        &dir.join("u_minus.field"),
        &both.u_minus,
        io::FieldRepr::Spectral,
        io::Encoding::Text,
    )
    .map_err(io_err)?;
    write_json(&dir.join("report_plus.json"), &both.report_plus)?;
    write_json(&dir.join("report_minus.json"), &both.report_minus)?;
    let header = "iteration,energy,gradnorm,cerami_product,sigma_integral,quartic_integral";
    io::write_csv(
        &dir.join("diagnostics_plus.csv"),
        header,
        &diagnostics_rows(&both.report_plus),
    )
    .map_err(io_err)?;
    io::write_csv(
        &dir.join("diagnostics_minus.csv"),
        header,
        &diagnostics_rows(&both.report_minus),
    )
    .map_err(io_err)?;
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            format: MANIFEST_FORMAT,
            config_sha256: config_hash(config),
            core_version: env!("CARGO_PKG_VERSION"),
            cli_version: env!("CARGO_PKG_VERSION"),
            config,
        },
    )?;
    Ok(())
}

pub fn run_solve(config_path: &Path, out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let config = RunConfig::load(config_path)?;
    let ctx = config.build_context()?;
    let solve_config = config.solve_config();
    solve_config
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let both = solve_both_signs(&ctx, &solve_config).map_err(CliError::from)?;
    let dir = resolve_out_dir(out, &config);
    write_run_artifacts(&dir, &config, &both)?;
    println!(
        "J+ = {:.8} (grad {:.2e}), J- = {:.8} (grad {:.2e}) -> {}",
        both.report_plus.critical_value,
        both.report_plus.gradient_norm,
        both.report_minus.critical_value,
        both.report_minus.gradient_norm,
        dir.display()
    );
    if !(both.report_plus.converged && both.report_minus.converged) {
        return Err(CliError::Unconverged(format!(
            "best iterates written to {}; gradient norms {:.3e} / {:.3e}",
            dir.display(),
            both.report_plus.gradient_norm,
            both.report_minus.gradient_norm
        )));
    }
    Ok(dir)
}

pub fn run_verify_cmd(
    quick: bool,
    n: Option<usize>,
    dimension: u8,
    seed: u64,
) -> Result<(), CliError> {
    let dim = match dimension {
        1 => Dimension::One,
        2 => Dimension::Two,
        d => {
            return Err(CliError::Validation(format!(
                "dimension must be 1 or 2, got {d}"
            )))
        }
    };
    let mut opts = if quick {
        VerifyOptions::quick()
    } else {
        VerifyOptions::default()
    };
    opts.dimension = dim;
    if dim == Dimension::Two && n.is_none() {
        opts.n = if quick { 15 } else { 63 };
    }
    if let Some(n) = n {
        opts.n = n;
    }
    opts.seed = seed;
    let report = run_verify(&opts).map_err(CliError::from)?;
    for line in report.summary_lines() {
        println!("{line}");
    }
    if report.all_passed() {
        println!("verification suite: all {} checks passed", report.checks.len());
        Ok(())
    } else {
        Err(CliError::Verification(
            "one or more verification checks failed".into(),
        ))
    }
}

pub fn run_hypotheses_cmd(config_path: &Path) -> Result<(), CliError> {
    let config = RunConfig::load(config_path)?;
    let dim = config.dimension_enum()?;
    let spec = config.nonlinearity_spec(dim)?;
    let bundle = run_hypotheses(&spec, config.m, config.omega, config.seed)
        .map_err(CliError::from)?;
    println!("reaction: {}", spec.name());
    println!("{:<22} {:<14} margin", "hypothesis", "verdict");
    for rep in [
        &bundle.growth,
        &bundle.superquadratic,
        &bundle.quasimonotone,
        &bundle.small_s,
        &bundle.consistency,
    ] {
        let verdict = match rep.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "inconclusive",
        };
        println!("{:<22} {:<14} {:+.3e}", rep.hypothesis, verdict, rep.margin);
    }
    for (mu, verdict) in &bundle.ar {
        match verdict {
            ArVerdict::Holds { scanned_to } => {
                println!(
                    "{:<22} {:<14} no violation up to |s| = {scanned_to:.1e}",
                    format!("A-R (mu={mu})"),
                    "holds"
                );
            }
            ArVerdict::Fails {
                witness_s, mu_f, sf, ..
            } => {
                println!(
                    "{:<22} {:<14} witness s = {witness_s:.4e} (mu F = {mu_f:.4e} > s f = {sf:.4e})",
                    format!("A-R (mu={mu})"),
                    "fails"
                );
            }
        }
    }
    Ok(())
}

fn read_report_value(path: &Path) -> Result<serde_json::Value, CliError> {
    let bytes =
        fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn run_export(dir: &Path) -> Result<(), CliError> {
    for required in [
        "manifest.json",
        "u_plus.field",
        "u_minus.field",
        "report_plus.json",
        "report_minus.json",
    ] {
        if !dir.join(required).exists() {
            return Err(CliError::Io(format!(
                "missing artifact {} in {}",
                required,
                dir.display()
            )));
        }
    }
    let manifest = read_report_value(&dir.join("manifest.json"))?;
    let config: RunConfig = serde_json::from_value(
        manifest
            .get("config")
            .cloned()
            .ok_or_else(|| CliError::Io("manifest lacks the config echo".into()))?,
    )
    .map_err(|e| CliError::Io(format!("manifest config: {e}")))?;

    let u_plus = io::read_field(&dir.join("u_plus.field"))
        .map_err(|e| CliError::Io(e.to_string()))?
        .field;
    let u_minus = io::read_field(&dir.join("u_minus.field"))
        .map_err(|e| CliError::Io(e.to_string()))?
        .field;
    let phi = green_potential(&u_plus);

    let export = dir.join("export");
    fs::create_dir_all(&export).map_err(|e| CliError::Io(format!("{}: {e}", export.display())))?;
    let io_err = |e: hartree_core::Error| CliError::Io(e.to_string());

    let dom = u_plus.domain();
    match dom.dimension() {
        Dimension::One => {
            let rows: Vec<Vec<f64>> = (0..dom.len())
                .map(|j| {
                    vec![
                        dom.node(j)[0],
                        u_plus.grid_values()[j],
                        u_minus.grid_values()[j],
                        phi.field().grid_values()[j],
                    ]
                })
                .collect();
            io::write_csv(&export.join("profile.csv"), "x,u_plus,u_minus,phi", &rows)
                .map_err(io_err)?;
        }
        Dimension::Two => {
            for (name, field) in [
                ("u_plus.csv", &u_plus),
                ("u_minus.csv", &u_minus),
                ("potential.csv", phi.field()),
            ] {
                let rows: Vec<Vec<f64>> = (0..dom.len())
                    .map(|j| {
                        let x = dom.node(j);
                        vec![x[0], x[1], field.grid_values()[j]]
                    })
                    .collect();
                io::write_csv(&export.join(name), "x1,x2,value", &rows).map_err(io_err)?;
            }
        }
    }

    for (report_name, out_name) in [
        ("report_plus.json", "path_energy_plus.csv"),
        ("report_minus.json", "path_energy_minus.csv"),
    ] {
        let report = read_report_value(&dir.join(report_name))?;
        let energies: Vec<f64> = report
            .get("path_energies")
            .and_then(|v| v.as_array())
            .map(|a| a.iter().filter_map(|x| x.as_f64()).collect())
            .unwrap_or_default();
        let rows: Vec<Vec<f64>> = energies
            .iter()
            .enumerate()
            .map(|(i, e)| vec![i as f64, *e])
            .collect();
        io::write_csv(&export.join(out_name), "node,energy", &rows).map_err(io_err)?;
    }

    // ray table J+(t v0) along the default seed direction
    let ctx = config.build_context()?.with_sign(hartree_core::SignMode::Plus);
    let v0 = SpectralField::eigenfunction(dom, dom.multi_index(0)).positive_part();
    let scan = ctx
        .ray_divergence(&v0, config.t_max)
        .map_err(CliError::from)?;
    let rows: Vec<Vec<f64>> = scan.samples.iter().map(|(t, j)| vec![*t, *j]).collect();
    io::write_csv(&export.join("ray_plus.csv"), "t,energy", &rows).map_err(io_err)?;

    println!("export written to {}", export.display());
    Ok(())
}

pub fn run_sweep(
    config_path: &Path,
    param: &str,
    values: &str,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let base = RunConfig::load(config_path)?;
    let parsed: Vec<f64> = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Validation(format!("bad sweep value '{v}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    if parsed.is_empty() {
        return Err(CliError::Validation("empty sweep value list".into()));
    }
    let root = resolve_out_dir(out, &base).join(format!("sweep_{param}"));
    let mut worst: Option<CliError> = None;
    for value in parsed {
        let mut config = base.clone();
        match param {
            "lambda" => config.lambda = value,
            "omega" => config.omega = value,
            "m" => config.m = value,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown sweep parameter '{other}' (expected lambda, omega, or m)"
                )))
            }
        }
        let dir = root.join(format!("{param}_{value}"));
        let outcome = (|| -> Result<(), CliError> {
            let ctx = config.build_context()?;
            let both = solve_both_signs(&ctx, &config.solve_config()).map_err(CliError::from)?;
            write_run_artifacts(&dir, &config, &both)?;
            println!(
                "{param} = {value}: J+ = {:.8}, converged = {}",
                both.report_plus.critical_value,
                both.report_plus.converged && both.report_minus.converged
            );
            if !(both.report_plus.converged && both.report_minus.converged) {
                return Err(CliError::Unconverged(format!("{param} = {value}")));
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            println!("{param} = {value}: {e}");
            if worst.is_none() {
                worst = Some(e);
            }
        }
    }
    match worst {
        None => Ok(()),
        Some(e) => Err(e),
    }
}
