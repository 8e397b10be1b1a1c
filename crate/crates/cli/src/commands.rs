use nalgebra::DMatrix;
use symdiag::apps::{gaussian_normal_modes, partition_function, PREFACTOR_NOTE};
use symdiag::instancegen::{
    random_commuting_family, random_psd_with_spectrum, random_symplectic, GenConfig,
};
use symdiag::matcore::{diagonalization_residual, symplectic_residual, SymMatrix, ToleranceConfig};
use symdiag::psdnf::{hamilton_action_residual, psd_normal_form_family};
use symdiag::simdiag::{poisson_bracket_gram, simdiag_pd_family, symplectically_commutes};
use symdiag::williamson::{symplectic_eigenvalues, williamson};

use crate::matrix_io::{self, rows_of, Format};
use crate::report::{InputInfo, Report};
use crate::{Cli, CliError, Command};

pub struct Output {
    pub text: String,
    pub exit: u8,
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let cfg = tolerances(cli)?;
    if let Command::Gen = cli.command {
        return generate(cli).map(|text| Output { text, exit: 0 });
    }
    let inputs = load_inputs(cli)?;
    let info = inputs
        .iter()
        .map(|(source, m)| InputInfo {
            source: source.clone(),
            dim: m.dim(),
        })
        .collect();
    let matrices: Vec<SymMatrix> = inputs.into_iter().map(|(_, m)| m).collect();
    let mut report = Report::new(name(cli.command), info, &cfg);
    let outcome = match cli.command {
        Command::Williamson => cmd_williamson(&mut report, &matrices, &cfg),
        Command::SymplecticEigs => cmd_eigs(&mut report, &matrices, &cfg),
        Command::CheckCommute => cmd_check_commute(&mut report, &matrices, &cfg),
        Command::Bracket => cmd_bracket(&mut report, &matrices, &cfg),
        Command::Simdiag => cmd_simdiag(&mut report, &matrices, &cfg),
        Command::NormalForm => cmd_normal_form(&mut report, &matrices, &cfg),
        Command::GaussianModes => cmd_gaussian(&mut report, &matrices, &cfg),
        Command::Partition => cmd_partition(cli, &mut report, &matrices, &cfg),
        Command::Gen => unreachable!("handled above"),
    };
    let exit = match outcome {
        Ok(()) => 0,
        Err(CliError::Library(e)) => match e.violated_hypothesis() {
            Some(h) => {
                report.rejection(&e, h);
                2
            }
            None => return Err(CliError::Library(e)),
        },
        Err(e) => return Err(e),
    };
    Ok(Output {
        text: report.to_json(),
        exit,
    })
}

fn name(c: Command) -> &'static str {
    match c {
        Command::Williamson => "williamson",
        Command::SymplecticEigs => "symplectic-eigs",
        Command::CheckCommute => "check-commute",
        Command::Bracket => "bracket",
        Command::Simdiag => "simdiag",
        Command::NormalForm => "normal-form",
        Command::GaussianModes => "gaussian-modes",
        Command::Partition => "partition",
        Command::Gen => "gen",
    }
}

fn tolerances(cli: &Cli) -> Result<ToleranceConfig, CliError> {
    let mut cfg = ToleranceConfig::default();
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.tol_pd, cli.tol_pd);
    set(&mut cfg.tol_rank, cli.tol_rank);
    set(&mut cfg.tol_commute, cli.tol_commute);
    set(&mut cfg.tol_residual, cli.tol_residual);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn load_inputs(cli: &Cli) -> Result<Vec<(String, SymMatrix)>, CliError> {
    if cli.input.is_empty() {
        return Err(CliError::Usage("at least one --input is required".into()));
    }
    if cli.input.iter().filter(|p| *p == "-").count() > 1 {
        return Err(CliError::Usage(
            "standard input can be read only once".into(),
        ));
    }
    let mut out = Vec::new();
    for path in &cli.input {
        for loaded in matrix_io::load(path, cli.format)? {
            let m = SymMatrix::new(loaded.matrix)
                .map_err(|e| CliError::Parse(format!("{}: {e}", loaded.source)))?;
            out.push((loaded.source, m));
        }
    }
    Ok(out)
}

fn arity(ms: &[SymMatrix], expected: usize) -> Result<(), CliError> {
    if ms.len() != expected {
        return Err(CliError::Usage(format!(
            "expected {expected} matrices, got {}",
            ms.len()
        )));
    }
    Ok(())
}

fn congruence_residuals(
    report: &mut Report,
    s: &DMatrix<f64>,
    ms: &[SymMatrix],
    spectra: &[Vec<f64>],
) {
    report.residual("symplectic", symplectic_residual(s));
    for (i, (m, sp)) in ms.iter().zip(spectra).enumerate() {
        report.residual(
            format!("diagonalization_{i}"),
            diagonalization_residual(m, s, sp),
        );
    }
}

fn cmd_williamson(
    report: &mut Report,
    ms: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<(), CliError> {
    arity(ms, 1)?;
    let w = williamson(&ms[0], cfg)?;
    report.set("S", rows_of(&w.s)).set("spectra", [&w.d]);
    congruence_residuals(report, &w.s, ms, std::slice::from_ref(&w.d));
    report.warnings.extend(w.warnings);
    Ok(())
}

fn cmd_eigs(report: &mut Report, ms: &[SymMatrix], cfg: &ToleranceConfig) -> Result<(), CliError> {
    arity(ms, 1)?;
    let d = symplectic_eigenvalues(&ms[0], cfg)?;
    report.set("spectra", [d]);
    Ok(())
}

fn cmd_check_commute(
    report: &mut Report,
    ms: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<(), CliError> {
    arity(ms, 2)?;
    let c = symplectically_commutes(&ms[0], &ms[1], cfg)?;
    report
        .set("commutes", c.commutes)
        .set("threshold", c.threshold)
        .set("relative_residual", c.relative_residual(cfg))
        .residual("commutation", c.residual);
    Ok(())
}

fn cmd_bracket(
    report: &mut Report,
    ms: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<(), CliError> {
    arity(ms, 2)?;
    let c = poisson_bracket_gram(&ms[0], &ms[1])?;
    let check = symplectically_commutes(&ms[0], &ms[1], cfg)?;
    report
        .set("bracket", rows_of(&c))
        .set("vanishes", check.commutes)
        .residual("bracket", c.norm());
    Ok(())
}

fn cmd_simdiag(
    report: &mut Report,
    ms: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<(), CliError> {
    let r = simdiag_pd_family(ms, cfg)?;
    report.set("S", rows_of(&r.s)).set("spectra", &r.spectra);
    congruence_residuals(report, &r.s, ms, &r.spectra);
    report.warnings.extend(r.warnings);
    Ok(())
}

fn cmd_normal_form(
    report: &mut Report,
    ms: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<(), CliError> {
    let nf = psd_normal_form_family(ms, cfg)?;
    report
        .set("S", rows_of(&nf.s))
        .set("spectra", &nf.spectra)
        .set("k", nf.k)
        .set("kernel_dim", nf.kernel_dim);
    congruence_residuals(report, &nf.s, ms, &nf.spectra);
    for (i, (m, sp)) in ms.iter().zip(&nf.spectra).enumerate() {
        let h = hamilton_action_residual(m, &nf.s, sp, cfg)?;
        report.residual(format!("hamilton_action_{i}"), h.residual);
    }
    report.warnings.extend(nf.warnings);
    Ok(())
}

fn cmd_gaussian(
    report: &mut Report,
    ms: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<(), CliError> {
    arity(ms, 2)?;
    let g = gaussian_normal_modes(&ms[0], &ms[1], cfg)?;
    report
        .set("S", rows_of(&g.s))
        .set("nu1", &g.nu1)
        .set("nu2", &g.nu2);
    congruence_residuals(report, &g.s, ms, &[g.nu1.clone(), g.nu2.clone()]);
    report.warnings.extend(g.warnings);
    Ok(())
}

fn cmd_partition(
    cli: &Cli,
    report: &mut Report,
    ms: &[SymMatrix],
    cfg: &ToleranceConfig,
) -> Result<(), CliError> {
    let beta = cli
        .beta
        .ok_or_else(|| CliError::Usage("partition requires --beta".into()))?;
    let d = cli
        .d
        .ok_or_else(|| CliError::Usage("partition requires --d".into()))?;
    let particles = cli.particles.unwrap_or(ms.len());
    let p = partition_function(ms, beta, cli.planck, d, particles, cfg)?;
    report
        .set("log_z", p.log_z)
        .set("Z", p.z)
        .set("log_z_pi_prefactor", p.log_z_pi_prefactor)
        .set("prefactor_convention", PREFACTOR_NOTE)
        .set("mode_sums", &p.mode_sums)
        .set("beta", beta)
        .set("h", cli.planck)
        .set("d", d)
        .set("N", particles)
        .residual("log_det_identity", p.log_det_residual);
    report.warnings.extend(p.warnings);
    Ok(())
}

/// `gen` emits a matrix file, not a report, so it can be fed back as input.
///
/// No `--spectrum`: a random symplectic matrix. One: a matrix with that
/// symplectic spectrum (zeros give a symplectic kernel). Several: a
/// symplectically commuting family sharing one congruence.
fn generate(cli: &Cli) -> Result<String, CliError> {
    let n = match (cli.n, cli.spectrum.first()) {
        (Some(n), _) => n,
        (None, Some(sp)) => sp.0.len(),
        (None, None) => return Err(CliError::Usage("gen requires --n or --spectrum".into())),
    };
    let g = GenConfig::new(cli.seed, n).with_spread(cli.spread);
    let matrices: Vec<DMatrix<f64>> = match cli.spectrum.as_slice() {
        [] => vec![random_symplectic(&g)?],
        [one] => vec![random_psd_with_spectrum(&g, &one.0)?.into_inner()],
        many => {
            let spectra: Vec<Vec<f64>> = many.iter().map(|s| s.0.clone()).collect();
            random_commuting_family(&g, &spectra)?
                .into_iter()
                .map(SymMatrix::into_inner)
                .collect()
        }
    };
    matrix_io::render(&matrices, cli.format.unwrap_or(Format::Json))
}
