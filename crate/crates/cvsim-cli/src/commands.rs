//! The five subcommands: bounds, decompose, simulate, estimate, compare.

use std::path::Path;
use std::time::Instant;

use cvsim::bounds::{self, circuit_exp_energy_bound, energy_bound, t_schedule};
use cvsim::circuit::CircuitIr;
use cvsim::cutting::{self, CutPlan};
use cvsim::fock_backend;
use cvsim::kerr::{self, KerrKind};
use cvsim::superposition::{self, RationalizedCircuit, SuperposError};
use cvsim::Complex64;

use crate::format::{self, format_complex, format_f64, parse_complex};
use crate::output::{emit_probability_records, emit_report, emit_table, OutputFormat, ProbabilityRecord};

/// CLI failure with its process exit code: 2 parse, 3 resource cap,
/// 4 incompatible backend, 1 anything else.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
    pub fn resource(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
    pub fn incompatible(message: impl Into<String>) -> Self {
        CliError { code: 4, message: message.into() }
    }
    pub fn other(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

fn superpos_error(e: SuperposError) -> CliError {
    match e {
        SuperposError::TermCapExceeded(n, cap) => {
            CliError::resource(format!("term count {n} exceeds cap {cap}"))
        }
        SuperposError::NotRational(layer) => CliError::incompatible(format!(
            "layer {} has a non-rational gate; pass --rationalize <delta>",
            layer + 1
        )),
        other => CliError::other(other.to_string()),
    }
}

pub fn load_circuit(path: &Path) -> Result<CircuitIr, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

/// Parse `--alphas "re+imi,re+imi;re+imi,re+imi"`: points split by ';',
/// per-mode components by ','.
pub fn parse_alpha_points(spec: &str, arity: usize) -> Result<Vec<Vec<Complex64>>, CliError> {
    let mut points = Vec::new();
    for chunk in spec.split(';') {
        let components: Result<Vec<Complex64>, String> =
            chunk.split(',').map(|t| parse_complex(t)).collect();
        let components = components.map_err(CliError::parse)?;
        if components.len() != arity {
            return Err(CliError::parse(format!(
                "alpha point '{chunk}' has {} components, expected {arity}",
                components.len()
            )));
        }
        points.push(components);
    }
    Ok(points)
}

fn alpha_points(
    alphas: &Option<String>,
    grid: &Option<String>,
    modes: usize,
) -> Result<Vec<Vec<Complex64>>, CliError> {
    match (alphas, grid) {
        (Some(_), Some(_)) => Err(CliError::parse("pass either --alphas or --grid, not both")),
        (Some(spec), None) => parse_alpha_points(spec, modes),
        (None, Some(spec)) => {
            if modes != 1 {
                return Err(CliError::parse("--grid requires a single-mode circuit"));
            }
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(CliError::parse("--grid syntax is min:max:count"));
            }
            let min: f64 =
                parts[0].parse().map_err(|_| CliError::parse("bad grid minimum"))?;
            let max: f64 =
                parts[1].parse().map_err(|_| CliError::parse("bad grid maximum"))?;
            let count: usize =
                parts[2].parse().map_err(|_| CliError::parse("bad grid count"))?;
            if count < 2 || max <= min {
                return Err(CliError::parse("grid needs count >= 2 and max > min"));
            }
            let step = (max - min) / (count - 1) as f64;
            let mut points = Vec::with_capacity(count * count);
            for i in 0..count {
                for j in 0..count {
                    points.push(vec![Complex64::new(
                        min + i as f64 * step,
                        min + j as f64 * step,
                    )]);
                }
            }
            Ok(points)
        }
        (None, None) => Ok(vec![vec![Complex64::new(0.0, 0.0); modes]]),
    }
}

pub fn cmd_bounds(
    path: &Path,
    s_override: Option<f64>,
    eps: f64,
    format: OutputFormat,
) -> Result<(), CliError> {
    let circuit = load_circuit(path)?;
    let env = circuit.envelope();
    let cert = circuit_exp_energy_bound(&env);
    let schedule = t_schedule(env.r_max, env.layers);
    let n_bound = energy_bound(&env);
    let mut pairs: Vec<(&str, String)> = vec![
        ("modes", env.modes.to_string()),
        ("layers", env.layers.to_string()),
        ("alpha_max", format_f64(env.alpha_max)),
        ("r_max", format_f64(env.r_max)),
        ("t_first", format_f64(schedule[0])),
        ("t_last", format_f64(cert.base)),
        ("exp_energy_bound", format_f64(cert.bound)),
        ("exp_energy_exponent", format_f64(cert.exponent)),
        ("energy_bound", format_f64(n_bound)),
        ("eps", format_f64(eps)),
    ];
    if env.alpha_max == 0.0 && env.r_max == 0.0 {
        // passive circuit on vacuum: the output is exactly the vacuum state,
        // certified at E = 0 for every base
        pairs.push(("certificate", "vacuum".to_string()));
        pairs.push(("exp_energy_cutoff", "0".to_string()));
        pairs.push(("energy_cutoff", "0".to_string()));
    } else {
        let base = match s_override {
            Some(s) => {
                if s <= 1.0 || s > cert.base {
                    return Err(CliError::other(format!(
                        "--s must lie in (1, t_last = {}]",
                        format_f64(cert.base)
                    )));
                }
                s
            }
            None => cert.base,
        };
        // the certificate transfers to smaller bases with the same exponent
        // proxy log_t(bound)
        let energy_proxy = cert.bound.ln() / cert.base.ln();
        let exp_cutoff = bounds::exp_energy_cutoff(energy_proxy, base, eps)
            .map_err(|e| CliError::other(e.to_string()))?;
        let energy_cutoff = bounds::energy_cutoff(n_bound, eps)
            .map_err(|e| CliError::other(e.to_string()))?;
        pairs.push(("s", format_f64(base)));
        pairs.push(("exp_energy_cutoff", exp_cutoff.to_string()));
        pairs.push(("energy_cutoff", energy_cutoff.to_string()));
    }
    emit_report(format, &pairs);
    Ok(())
}

pub fn cmd_decompose(
    p: Option<i64>,
    q: Option<u64>,
    x: Option<f64>,
    q_max: u64,
    kind: KerrKind,
    format: OutputFormat,
) -> Result<(), CliError> {
    let (p, q, convergent_info) = match (p, q, x) {
        (Some(p), Some(q), None) => {
            if q == 0 {
                return Err(CliError::parse("--q must be positive"));
            }
            (p, q, None)
        }
        (None, None, Some(x)) => {
            let (p, q) = kerr::diophantine_approx(x, q_max)
                .map_err(|e| CliError::parse(e.to_string()))?;
            let err = (x - p as f64 / q as f64).abs();
            let hurwitz = 1.0 / (5f64.sqrt() * (q as f64) * (q as f64));
            (p, q, Some((x, err, hurwitz)))
        }
        _ => {
            return Err(CliError::parse(
                "pass either --p and --q, or --x (with optional --qmax)",
            ))
        }
    };
    let targets: &[usize] = match kind {
        KerrKind::SelfKerr => &[0],
        KerrKind::CrossKerr => &[0, 1],
    };
    let decomposition = kerr::decompose_kerr(p, q, kind, targets);
    let mut pairs: Vec<(&str, String)> = vec![
        (
            "gate",
            match kind {
                KerrKind::SelfKerr => format!("self-Kerr x = {p}/{q}"),
                KerrKind::CrossKerr => format!("cross-Kerr x = {p}/{q}"),
            },
        ),
        ("branches", decomposition.branches.len().to_string()),
        ("one_norm", format_f64(decomposition.one_norm())),
    ];
    if let Some((x, err, hurwitz)) = convergent_info {
        pairs.push(("x", format_f64(x)));
        pairs.push(("convergent", format!("{p}/{q}")));
        pairs.push(("hurwitz_error", format_f64(err)));
        pairs.push(("hurwitz_bound", format_f64(hurwitz)));
    }
    emit_report(format, &pairs);
    let header: &[&str] = match kind {
        KerrKind::SelfKerr => &["branch", "coeff_re", "coeff_im", "angle"],
        KerrKind::CrossKerr => &["branch", "coeff_re", "coeff_im", "angle_1", "angle_2"],
    };
    let rows: Vec<Vec<String>> = decomposition
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut row = vec![
                i.to_string(),
                format_f64(b.coefficient.re),
                format_f64(b.coefficient.im),
            ];
            row.extend(b.phases.iter().map(|a| format_f64(*a)));
            row
        })
        .collect();
    emit_table(format, header, &rows);
    Ok(())
}

pub enum Backend {
    Fock,
    Superpos,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_simulate(
    path: &Path,
    backend: Backend,
    eps: Option<f64>,
    cutoff: Option<u32>,
    rationalize_budget: Option<f64>,
    alphas: &Option<String>,
    grid: &Option<String>,
    term_cap: usize,
    format: OutputFormat,
) -> Result<(), CliError> {
    let circuit = load_circuit(path)?;
    let points = alpha_points(alphas, grid, circuit.modes())?;
    let start = Instant::now();
    match backend {
        Backend::Fock => {
            let cert = circuit.exp_energy_certificate();
            let (k, result) = match (cutoff, eps) {
                (Some(k), None) => {
                    let result = fock_backend::simulate(&circuit, k)
                        .map_err(|e| CliError::other(e.to_string()))?;
                    (k, result)
                }
                (None, Some(eps)) => {
                    let k = fock_backend::plan_cutoff(&circuit, cert.base, cert.bound, eps)
                        .map_err(|e| CliError::other(e.to_string()))?;
                    let result =
                        fock_backend::simulate_certified(&circuit, k, cert.base, cert.bound)
                            .map_err(|e| CliError::other(e.to_string()))?;
                    (k, result)
                }
                (Some(k), Some(_)) => {
                    let result = fock_backend::simulate(&circuit, k)
                        .map_err(|e| CliError::other(e.to_string()))?;
                    (k, result)
                }
                (None, None) => {
                    let k = 40;
                    let result = fock_backend::simulate(&circuit, k)
                        .map_err(|e| CliError::other(e.to_string()))?;
                    (k, result)
                }
            };
            let records: Vec<ProbabilityRecord> = points
                .iter()
                .map(|alphas| {
                    fock_backend::heterodyne_probability(&result.state, alphas)
                        .map(|p| {
                            ProbabilityRecord::new(alphas, p, result.total_error_bound, "fock")
                        })
                        .map_err(|e| CliError::other(e.to_string()))
                })
                .collect::<Result<_, _>>()?;
            emit_probability_records(format, &records);
            emit_report(
                format,
                &[
                    ("backend", "fock".to_string()),
                    ("cutoff", k.to_string()),
                    ("total_error_bound", format_f64(result.total_error_bound)),
                    ("terms", result.state.term_count().to_string()),
                    ("wall_ms", format!("{:.3}", start.elapsed().as_secs_f64() * 1e3)),
                ],
            );
        }
        Backend::Superpos => {
            let (rationalized, rat_bound) =
                prepare_rational(&circuit, rationalize_budget)?;
            let sup = superposition::simulate(&rationalized, term_cap)
                .map_err(superpos_error)?;
            let records: Vec<ProbabilityRecord> = points
                .iter()
                .map(|alphas| {
                    superposition::probability(&sup, alphas)
                        .map(|p| ProbabilityRecord::new(alphas, p, rat_bound, "superpos"))
                        .map_err(superpos_error)
                })
                .collect::<Result<_, _>>()?;
            emit_probability_records(format, &records);
            emit_report(
                format,
                &[
                    ("backend", "superpos".to_string()),
                    ("terms", sup.term_count().to_string()),
                    ("rationalization_bound", format_f64(rat_bound)),
                    ("wall_ms", format!("{:.3}", start.elapsed().as_secs_f64() * 1e3)),
                ],
            );
        }
    }
    Ok(())
}

fn prepare_rational(
    circuit: &CircuitIr,
    budget: Option<f64>,
) -> Result<(RationalizedCircuit, f64), CliError> {
    if circuit.is_rational() {
        let rc = RationalizedCircuit::exact(circuit.clone()).map_err(superpos_error)?;
        return Ok((rc, 0.0));
    }
    match budget {
        Some(delta) => {
            let rc = superposition::rationalize(circuit, delta, 1 << 40).map_err(|e| match e {
                SuperposError::BudgetUnreachable { .. } => CliError::resource(e.to_string()),
                other => superpos_error(other),
            })?;
            let bound = rc.total_error_bound;
            Ok((rc, bound))
        }
        None => Err(CliError::incompatible(
            "circuit has irrational Kerr parameters; pass --rationalize <delta>",
        )),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_estimate(
    path: &Path,
    eps: f64,
    delta: f64,
    seed: u64,
    rationalize_budget: Option<f64>,
    alphas: &Option<String>,
    format: OutputFormat,
) -> Result<(), CliError> {
    let circuit = load_circuit(path)?;
    let points = match alphas {
        Some(spec) => parse_alpha_points(spec, circuit.modes())?,
        None => vec![vec![Complex64::new(0.0, 0.0); circuit.modes()]],
    };
    let (rationalized, rat_bound) = prepare_rational(&circuit, rationalize_budget)?;
    let plan = CutPlan::new(rationalized, eps, delta, seed)
        .map_err(|e| CliError::other(e.to_string()))?;
    let start = Instant::now();
    for point in &points {
        let estimate = cutting::estimate(&plan, point).map_err(|e| CliError::other(e.to_string()))?;
        emit_report(
            format,
            &[
                ("alpha", point.iter().map(|a| format_complex(*a)).collect::<Vec<_>>().join(" ")),
                ("estimate", format_f64(estimate.value)),
                ("half_width", format_f64(estimate.half_width)),
                ("samples", estimate.samples.to_string()),
                ("one_norm_pair", format_f64(estimate.one_norm_pair)),
                ("exact", estimate.exact.to_string()),
                ("rationalization_bound", format_f64(rat_bound)),
                ("seed", seed.to_string()),
                ("wall_ms", format!("{:.3}", start.elapsed().as_secs_f64() * 1e3)),
            ],
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_compare(
    path: &Path,
    cutoff: u32,
    rationalize_budget: Option<f64>,
    alphas: &Option<String>,
    grid: &Option<String>,
    term_cap: usize,
    format: OutputFormat,
) -> Result<(), CliError> {
    let circuit = load_circuit(path)?;
    let points = alpha_points(alphas, grid, circuit.modes())?;
    let fock_run = fock_backend::simulate(&circuit, cutoff)
        .map_err(|e| CliError::other(e.to_string()))?;
    let (rationalized, rat_bound) = prepare_rational(&circuit, rationalize_budget)?;
    let sup = superposition::simulate(&rationalized, term_cap).map_err(superpos_error)?;
    let allowed = fock_run.total_error_bound + rat_bound + 1e-8;
    let mut rows = Vec::new();
    let mut all_within = true;
    for point in &points {
        let p_fock = fock_backend::heterodyne_probability(&fock_run.state, point)
            .map_err(|e| CliError::other(e.to_string()))?;
        let p_sup = superposition::probability(&sup, point).map_err(superpos_error)?;
        let gap = (p_fock - p_sup).abs();
        let within = gap <= allowed;
        all_within &= within;
        rows.push(vec![
            point.iter().map(|a| format_complex(*a)).collect::<Vec<_>>().join(" "),
            format_f64(p_fock),
            format_f64(p_sup),
            format_f64(gap),
            format_f64(allowed),
            within.to_string(),
        ]);
    }
    emit_table(
        format,
        &["alpha", "p_fock", "p_superpos", "abs_diff", "allowed", "within"],
        &rows,
    );
    if !all_within {
        return Err(CliError::other("backends disagree beyond the certified bound"));
    }
    Ok(())
}
