use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::warn;
use serde_json::{json, Value};

use pauli_lens::coherence::cohering_power_search;
use pauli_lens::gaussian::{gaussian_circuit_sensitivity, is_matchgate};
use pauli_lens::harness::{classify_gate_with_tol, complexity_certificate, CertificateConfig, Normalization};
use pauli_lens::io::{
    parse, parse_audit_input, pauli_label_string, read_json, report, to_csv, AuditInput, OperatorJson, OtocInput,
    SpectrumInput,
};
use pauli_lens::magic::{magic_entropy, magic_power_search};
use pauli_lens::otoc::{avg_4pt_weight_m, avg_8pt, avg_otoc_weight1, otoc};
use pauli_lens::search::SearchConfig;
use pauli_lens::sensitivity::circuit_sensitivity;
use pauli_lens::spectrum::{
    fourier_entropy, fourier_min_entropy, fourier_renyi_entropy, influence_local, influence_total, pauli_spectrum,
    qfei_gap, weight_distribution,
};
use pauli_lens::tensor::Operator;
use pauli_lens::wigner::wigner_function;
use pauli_lens::{Error, Result};

#[derive(Parser)]
#[command(name = "pauli-lens", version, about = "Pauli-spectral diagnostics of quantum operators and circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON input file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random restarts for the magic and coherence searches.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Ascent steps per search start.
    #[arg(long, global = true, default_value_t = 2000)]
    max_steps: usize,
    /// Numerical tolerance for classification thresholds.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Pauli spectrum and Fourier entropies of an operator or Boolean function.
    Spectrum,
    /// Local and total influence, with the weak entropy-influence check.
    Influence,
    /// Circuit sensitivity of a unitary.
    Cis,
    /// Gaussian circuit sensitivity and matchgate test (qubits).
    CisGaussian,
    /// Clifford / stable / Gaussian-stable taxonomy of a unitary.
    Classify,
    /// Magic entropy and a magic-power lower bound.
    Magic,
    /// Cohering-power lower bound.
    Coherence,
    /// OTOC and averaged OTOC identities.
    Otoc,
    /// Discrete Wigner function of a qubit operator.
    Wigner,
    /// Certify a circuit path, or re-check an emitted certificate.
    CostAudit {
        /// Reject terms whose operator norm is not 1 instead of rescaling.
        #[arg(long)]
        strict: bool,
    },
}

/// A rendered report and the process exit code.
struct Outcome {
    body: Value,
    code: u8,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Self { body, code: 0 }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            warn!("could not configure {t} threads: {e}");
        }
    }
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.body).expect("reports serialize") + "\n",
                Format::Csv => to_csv(&out.body),
            };
            print!("{text}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn input(cli: &Cli) -> Result<Value> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| Error::Argument("--input <path> is required".into()))?;
    read_json(path)
}

fn operator(cli: &Cli) -> Result<Operator> {
    parse::<OperatorJson>(input(cli)?)?.to_operator()
}

fn search_config(cli: &Cli) -> SearchConfig {
    SearchConfig { restarts: cli.restarts, max_steps: cli.max_steps, seed: cli.seed, ..SearchConfig::default() }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Spectrum => spectrum(cli),
        Command::Influence => influence(cli),
        Command::Cis => {
            let u = operator(cli)?;
            let r = circuit_sensitivity(&u)?;
            Ok(Outcome::ok(report(
                "cis",
                json!({ "d": u.d(), "n": u.n(), "cis": r.value, "stable": r.value <= cli.tol,
                        "degenerate": r.degenerate, "iterations": r.iterations }),
            )))
        }
        Command::CisGaussian => {
            let u = operator(cli)?;
            let r = gaussian_circuit_sensitivity(&u)?;
            Ok(Outcome::ok(report(
                "cis-gaussian",
                json!({ "n": u.n(), "cis_gaussian": r.value, "matchgate": is_matchgate(&u, cli.tol)?,
                        "degenerate": r.degenerate }),
            )))
        }
        Command::Classify => {
            let u = operator(cli)?;
            Ok(Outcome::ok(report("classify", to_value(&classify_gate_with_tol(&u, cli.tol)?))))
        }
        Command::Magic => {
            let u = operator(cli)?;
            let power = magic_power_search(&u, &search_config(cli))?;
            Ok(Outcome::ok(report(
                "magic",
                json!({ "magic_entropy": magic_entropy(&u)?, "magic_power": to_value(&power) }),
            )))
        }
        Command::Coherence => {
            let u = operator(cli)?;
            let power = cohering_power_search(&u, &search_config(cli))?;
            Ok(Outcome::ok(report("coherence", json!({ "cohering_power": to_value(&power) }))))
        }
        Command::Otoc => otoc_command(cli),
        Command::Wigner => {
            let o = operator(cli)?;
            let w = wigner_function(&o)?;
            let labels: Vec<String> = (0..w.values.len()).map(|a| pauli_label_string(a, 2, w.n)).collect();
            Ok(Outcome::ok(report(
                "wigner",
                json!({ "n": w.n, "points": labels,
                        "re": w.values.iter().map(|z| z.re).collect::<Vec<_>>(),
                        "im": w.values.iter().map(|z| z.im).collect::<Vec<_>>() }),
            )))
        }
        Command::CostAudit { strict } => cost_audit(cli, *strict),
    }
}

fn spectrum(cli: &Cli) -> Result<Outcome> {
    let raw = parse::<SpectrumInput>(input(cli)?)?.to_operator()?;
    let o = raw.normalized()?;
    let s = pauli_spectrum(&o)?;
    let terms: Vec<Value> = s
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-15)
        .map(|(label, &p)| {
            let c = s.coeffs()[label];
            json!({ "label": label, "pauli": pauli_label_string(label, o.d(), o.n()), "prob": p,
                    "re": c.re, "im": c.im })
        })
        .collect();
    Ok(Outcome::ok(report(
        "spectrum",
        json!({ "d": o.d(), "n": o.n(), "input_norm": raw.l2_norm(),
                "entropy": fourier_entropy(&s), "min_entropy": fourier_min_entropy(&s),
                "renyi2_entropy": fourier_renyi_entropy(&s, 2.0)?,
                "influence": influence_total(&s), "weights": weight_distribution(&s).w,
                "terms": terms }),
    )))
}

fn influence(cli: &Cli) -> Result<Outcome> {
    let o = parse::<SpectrumInput>(input(cli)?)?.to_operator()?.normalized()?;
    let s = pauli_spectrum(&o)?;
    let local = (0..o.n()).map(|j| influence_local(&s, j)).collect::<Result<Vec<_>>>()?;
    Ok(Outcome::ok(report(
        "influence",
        json!({ "d": o.d(), "n": o.n(), "local": local, "total": influence_total(&s),
                "qfei": to_value(&qfei_gap(&o)?) }),
    )))
}

fn otoc_command(cli: &Cli) -> Result<Outcome> {
    let inp: OtocInput = parse(input(cli)?)?;
    let o_d = inp.o_d.to_operator()?;
    let u = match &inp.evolution {
        Some(u) => u.to_operator()?,
        None => Operator::identity(o_d.d(), o_d.n())?,
    };
    let evolved = o_d.conjugate_by(&u);
    let mut body = json!({ "d": o_d.d(), "n": o_d.n() });
    if let Some(a) = &inp.o_a {
        body["otoc"] = json!(otoc(&u, &o_d, &a.to_operator()?)?);
    }
    if o_d.n() >= 2 {
        body["weight1"] = to_value(&avg_otoc_weight1(&evolved)?);
    }
    if let (Some(k), Some(m)) = (inp.k, inp.m) {
        body["four_point"] = to_value(&avg_4pt_weight_m(&evolved, k, m)?);
        body["eight_point"] = to_value(&avg_8pt(&evolved, k, m)?);
    }
    Ok(Outcome::ok(report("otoc", body)))
}

fn cost_audit(cli: &Cli, strict: bool) -> Result<Outcome> {
    let mode = if strict { Normalization::Strict } else { Normalization::Rescale };
    match parse_audit_input(input(cli)?)? {
        AuditInput::Path(p) => {
            let path = p.to_path(mode)?;
            let config = CertificateConfig { search: search_config(cli), substeps: 1 };
            let cert = complexity_certificate(&path, &config)?;
            let code = if cert.all_bounds_hold { 0 } else { 2 };
            Ok(Outcome { body: report("cost-audit", json!({ "certificate": to_value(&cert) })), code })
        }
        AuditInput::Report(cert) => {
            let sound = cert.is_consistent_and_sound();
            if !sound {
                warn!("certificate is inconsistent or violates a bound");
            }
            Ok(Outcome {
                body: report(
                    "cost-audit",
                    json!({ "certificate": to_value(&*cert), "recomputed_bounds_hold": cert.bounds_hold(),
                            "sound": sound }),
                ),
                code: if sound { 0 } else { 2 },
            })
        }
    }
}
