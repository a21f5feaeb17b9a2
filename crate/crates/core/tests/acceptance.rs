//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use pauli_lens::coherence::{coherence_rate, coherence_rate_local_bound_check, rel_entropy_coherence, DensityOperator};
use pauli_lens::gates::{clock, cnot, cz, gzx, phase_t, swap};
use pauli_lens::gaussian::{gamma_basis, gamma_monomial, gaussian_circuit_sensitivity, is_matchgate};
use pauli_lens::harness::{classify_gate, complexity_certificate, random_two_local_path, CertificateConfig, CertificateReport};
use pauli_lens::io::CircuitPathJson;
use pauli_lens::magic::{magic_entropy, magic_power_search, magic_rate, magic_rate_bound_check};
use pauli_lens::otoc::{
    avg_4pt_weight_m, avg_8pt, avg_8pt_convolution_form, avg_otoc_weight1, krawtchouk, krawtchouk_alt,
};
use pauli_lens::random::{
    random_density, random_local_unitary, random_operator, random_pure_state, random_traceless_hermitian,
    random_unitary,
};
use pauli_lens::search::SearchConfig;
use pauli_lens::sensitivity::{circuit_sensitivity, influence_change, influence_rate, influence_rate_bound_check};
use pauli_lens::spectrum::{fourier_entropy, influence_total, pauli_spectrum, qfei_gap};
use pauli_lens::tensor::{avg_renyi2_entanglement, embed, expm_hermitian, from_pauli_coefficients, projector, Operator, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_vector(len: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..len).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Alternating layers of single-qudit unitaries and swaps of random pairs.
fn random_stable_unitary(d: usize, n: usize, layers: usize, rng: &mut ChaCha8Rng) -> Operator {
    let mut u = Operator::identity(d, n).unwrap();
    for _ in 0..layers {
        u = &random_local_unitary(d, n, rng).unwrap() * &u;
        if n >= 2 {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            u = &embed(&swap(d), &[a, b], n).unwrap() * &u;
        }
    }
    u
}

fn z_last(d: usize, n: usize) -> Operator {
    embed(&clock(d), &[n - 1], n).unwrap()
}

/// Criterion 1: the eigen-solver value dominates random probing and its
/// witness attains it.
fn sensitivity_quadratic_form() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut worst_gap = f64::INFINITY;
    let mut worst_witness: f64 = 0.0;
    for i in 0..100 {
        let n = 2 + i % 2;
        let u = random_unitary(2, n, &mut r).unwrap();
        let rep = circuit_sensitivity(&u).unwrap();
        let mut best: f64 = 0.0;
        for _ in 0..10_000 {
            let c = unit_vector(1 << (2 * n), &mut r);
            let o = from_pauli_coefficients(2, n, &c).unwrap();
            best = best.max(influence_change(&u, &o).unwrap().abs());
        }
        worst_gap = worst_gap.min(rep.value - best);
        let w = from_pauli_coefficients(2, n, &rep.witness).unwrap();
        worst_witness = worst_witness.max((influence_change(&u, &w).unwrap().abs() - rep.value).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst_gap >= 0.0 && worst_witness <= 1e-7 && elapsed <= Duration::from_secs(60),
        format!("min(CiS - best probe) = {worst_gap:.3e}, max witness error = {worst_witness:.1e}, {elapsed:.1?} (limit 60 s)"),
    )
}

/// Criterion 2: stable products have zero sensitivity; entangling gates do not.
fn stable_gate_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(202);
    let mut max_stable: f64 = 0.0;
    for i in 0..200 {
        let (d, n) = if i % 10 == 9 { (3, 2) } else { (2, 2 + i % 3) };
        let u = random_stable_unitary(d, n, 3, &mut r);
        max_stable = max_stable.max(circuit_sensitivity(&u).unwrap().value);
    }
    let mut entangling = vec![cnot(2), cz(2)];
    for _ in 0..50 {
        entangling.push(random_unitary(2, 2, &mut r).unwrap());
    }
    let min_entangling = entangling
        .iter()
        .map(|u| circuit_sensitivity(u).unwrap().value)
        .fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    outcome(
        max_stable <= 1e-7 && min_entangling >= 0.1 && elapsed <= Duration::from_secs(120),
        format!("max CiS over 200 stable = {max_stable:.1e} (<= 1e-7), min CiS over 52 entangling = {min_entangling:.3} (>= 0.1), {elapsed:.1?} (limit 120 s)"),
    )
}

fn quadratic_exponential(n: usize, rng: &mut ChaCha8Rng) -> Operator {
    let b = gamma_basis(n).unwrap();
    let mut h = Operator::zeros(2, n).unwrap();
    for j in 0..2 * n {
        for k in j + 1..2 * n {
            let term = gamma_monomial(&b, (1 << j) | (1 << k)).unwrap().scale(C64::new(0.0, 1.0));
            h = &h + &term.scale_re(rng.sample::<f64, _>(StandardNormal));
        }
    }
    expm_hermitian(&h, 1.0).unwrap()
}

/// Criterion 3: quadratic-Hamiltonian exponentials are matchgates, SWAP and
/// T⊗I are not, and the stable / Gaussian-stable taxonomy.
fn matchgate_equivalence() -> Outcome {
    let mut r = rng(303);
    let mut max_quadratic: f64 = 0.0;
    let mut all_matchgates = true;
    for i in 0..100 {
        let u = quadratic_exponential(1 + i % 3, &mut r);
        max_quadratic = max_quadratic.max(gaussian_circuit_sensitivity(&u).unwrap().value);
        all_matchgates &= is_matchgate(&u, 1e-8).unwrap();
    }
    let mut lines = vec![format!(
        "100 quadratic exponentials: max CiS^G = {max_quadratic:.1e} (<= 1e-6), all matchgates = {all_matchgates}"
    )];
    let mut pass = max_quadratic <= 1e-6 && all_matchgates;
    let t_id = phase_t().kron(&Operator::identity(2, 1).unwrap()).unwrap();
    for (name, u) in [("SWAP", swap(2)), ("T⊗I", t_id.clone())] {
        let cis = gaussian_circuit_sensitivity(&u).unwrap().value;
        let mg = is_matchgate(&u, 1e-8).unwrap();
        let ok = cis >= 0.05 && !mg;
        pass &= ok;
        lines.push(format!("{name}: CiS^G = {cis:.3e} (want >= 0.05), matchgate = {mg} (want false) -> {}", verdict(ok)));
    }
    // (gate, clifford, stable, gaussian_stable)
    let taxonomy: [(&str, Operator, Option<bool>, bool, bool); 6] = [
        ("SWAP", swap(2), Some(true), true, false),
        ("G(Z,X)", gzx(), None, false, true),
        ("U1 = T⊗I", t_id, None, true, true),
        ("I", Operator::identity(2, 2).unwrap(), Some(true), true, true),
        ("CNOT", cnot(2), Some(true), false, false),
        ("T", phase_t(), Some(false), true, false),
    ];
    for (name, u, clifford, stable, gaussian) in taxonomy {
        let c = classify_gate(&u).unwrap();
        let mut ok = c.stable == stable && c.gaussian_stable == Some(gaussian);
        ok &= clifford.is_none_or(|cl| cl == c.clifford);
        if name == "T" {
            ok &= (c.magic_entropy - 1.0).abs() <= 1e-9;
        }
        pass &= ok;
        lines.push(format!(
            "taxonomy {name}: clifford = {}, stable = {}, gaussian_stable = {:?}, magic_entropy = {:.6} (want stable = {stable}, gaussian_stable = {gaussian}) -> {}",
            c.clifford, c.stable, c.gaussian_stable, c.magic_entropy, verdict(ok)
        ));
    }
    outcome(pass, lines.join("\n      "))
}

/// Criterion 4: weak entropy-influence inequality with constant 2.
fn weak_qfei() -> Outcome {
    let mut r = rng(404);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..2000 {
        let d = 2 + i % 2;
        let n = 1 + (i / 2) % 3;
        let o = random_operator(d, n, &mut r).unwrap();
        let rep = qfei_gap(&o).unwrap();
        worst = worst.max(rep.entropy - rep.bound);
        if rep.entropy > rep.bound + 1e-9 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("2000 operators, {violations} violations, max(H - bound) = {worst:.3}"))
}

fn central_difference(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1e-5;
    (f(h) - f(-h)) / (2.0 * h)
}

/// Criterion 5: the three rates against central differences, and their
/// k-local bounds.
fn rates_vs_finite_differences() -> Outcome {
    let mut r = rng(505);
    let (mut e_inf, mut e_mag, mut e_coh): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut bounds_hold = true;
    for i in 0..100 {
        let d = 2 + i % 2;
        let n = 2;
        let k = 1 + (i / 2) % 2;
        let h = if k == 1 {
            embed(&random_traceless_hermitian(d, 1, &mut r).unwrap(), &[i % n], n).unwrap()
        } else {
            random_traceless_hermitian(d, 2, &mut r).unwrap()
        };
        let o = random_operator(d, n, &mut r).unwrap();
        let rho = DensityOperator::new(random_density(d, n, &mut r).unwrap()).unwrap();
        let evolve = |t: f64, a: &Operator| a.conjugate_by(&expm_hermitian(&h, t).unwrap());

        let fd = central_difference(|t| influence_total(&pauli_spectrum(&evolve(t, &o)).unwrap()));
        e_inf = e_inf.max((influence_rate(&h, &o).unwrap() - fd).abs());
        let fd = central_difference(|t| fourier_entropy(&pauli_spectrum(&evolve(t, &o)).unwrap()));
        e_mag = e_mag.max((magic_rate(&h, &o).unwrap() - fd).abs());
        let fd = central_difference(|t| {
            rel_entropy_coherence(&DensityOperator::new(evolve(t, rho.operator())).unwrap())
        });
        e_coh = e_coh.max((coherence_rate(&h, &rho).unwrap() - fd).abs());

        bounds_hold &= influence_rate_bound_check(&h, &o, k).unwrap().satisfied;
        bounds_hold &= magic_rate_bound_check(&h, &o, k).unwrap().satisfied;
        bounds_hold &= coherence_rate_local_bound_check(&h, &rho, k).unwrap().satisfied;
    }
    outcome(
        e_inf <= 1e-5 && e_mag <= 1e-5 && e_coh <= 1e-5 && bounds_hold,
        format!("max |rate - FD|: influence {e_inf:.1e}, magic {e_mag:.1e}, coherence {e_coh:.1e} (<= 1e-5); k-local bounds hold = {bounds_hold}"),
    )
}

/// Criterion 6: averaged OTOC identities and Krawtchouk forms.
fn otoc_identities() -> Outcome {
    let mut r = rng(606);
    let shapes = [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)];
    let mut max_w1: f64 = 0.0;
    for i in 0..100 {
        let (d, n) = shapes[i % shapes.len()];
        let u = random_unitary(d, n, &mut r).unwrap();
        max_w1 = max_w1.max(avg_otoc_weight1(&z_last(d, n).conjugate_by(&u)).unwrap().abs_err);
    }
    let (mut max_4pt, mut max_8pt, mut cases): (f64, f64, usize) = (0.0, 0.0, 0);
    for n in 2..=4 {
        for k in 0..=n {
            for m in 0..=2.min(n - k) {
                let u = random_unitary(2, n, &mut r).unwrap();
                let o = z_last(2, n).conjugate_by(&u);
                max_4pt = max_4pt.max(avg_4pt_weight_m(&o, k, m).unwrap().abs_err);
                max_8pt = max_8pt.max(avg_8pt(&o, k, m).unwrap().abs_err);
                cases += 1;
            }
        }
    }
    let mut max_diag: f64 = 0.0;
    for n in 2..=4 {
        let diag: Vec<f64> = (0..1 << n).map(|_| r.random_range(-1.0..1.0)).collect();
        let mat = nalgebra::DMatrix::from_fn(1 << n, 1 << n, |a, b| {
            C64::new(if a == b { diag[a] } else { 0.0 }, 0.0)
        });
        let o = Operator::new(2, n, mat).unwrap().normalized().unwrap();
        for m in 0..=2.min(n - 1) {
            max_diag = max_diag.max(avg_8pt_convolution_form(&o, 1, m).unwrap().abs_err);
        }
    }
    let mut kraw_mismatch = 0;
    for n in 0..=8u64 {
        for m in 0..=n {
            for x in 0..=n {
                for q in [2, 4] {
                    if krawtchouk(m, x, n, q).unwrap() != krawtchouk_alt(m, x, n, q).unwrap() {
                        kraw_mismatch += 1;
                    }
                }
            }
        }
    }
    outcome(
        max_w1 <= 1e-9 && max_4pt <= 1e-8 && max_8pt <= 1e-8 && max_diag <= 1e-8 && kraw_mismatch == 0,
        format!(
            "weight-1 max err {max_w1:.1e} (<= 1e-9, 100 cases incl. d=3); {cases} (n,k,m) cases: 4-point max err {max_4pt:.1e}, 8-point max err {max_8pt:.1e} (<= 1e-8); convolution form on diagonal inputs {max_diag:.1e}; Krawtchouk mismatches {kraw_mismatch}"
        ),
    )
}

/// Criterion 7: reference constants.
fn reference_constants() -> Outcome {
    let t = phase_t();
    let tt = t.kron(&t).unwrap();
    let m_t = magic_entropy(&t).unwrap();
    let m_tt = magic_entropy(&tt).unwrap();
    let power_tt = magic_power_search(&tt, &SearchConfig::default()).unwrap().value;
    let cis_cnot = circuit_sensitivity(&cnot(2)).unwrap().value;
    let pass = (m_t - 1.0).abs() <= 1e-9
        && power_tt >= 2.0 - 1e-3
        && (m_tt - 1.0).abs() <= 1e-9
        && (cis_cnot - 1.0).abs() <= 1e-9;
    outcome(pass, format!("M[T] = {m_t:.12}, magic power[T⊗T] >= {power_tt:.6}, M[T⊗T] = {m_tt:.12}, CiS[CNOT] = {cis_cnot:.12}"))
}

fn run_audit(bin: &str, input: &PathBuf, seed: u64) -> (i32, Option<CertificateReport>) {
    let out = Command::new(bin)
        .args(["cost-audit", "--restarts", "2", "--max-steps", "50", "--seed"])
        .arg(seed.to_string())
        .arg("--input")
        .arg(input)
        .output()
        .expect("run pauli-lens");
    let code = out.status.code().unwrap_or(-1);
    let cert = serde_json::from_slice::<serde_json::Value>(&out.stdout)
        .ok()
        .and_then(|v| serde_json::from_value(v["certificate"].clone()).ok());
    (code, cert)
}

/// Criterion 8: certificates on random paths hold, the CLI agrees, and a
/// corrupted certificate is rejected with exit code 2.
fn cost_audit_soundness() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pauli-lens");
    let dir = std::env::temp_dir().join(format!("pauli-lens-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut r = rng(808);
    let (mut lib_fail, mut cli_fail, mut mismatch) = (0, 0, 0);
    let mut max_ratio: f64 = 0.0;
    for i in 0..200u64 {
        let path = random_two_local_path(2, 3, 3, 2, 1.0, &mut r).unwrap();
        let config = CertificateConfig {
            search: SearchConfig { restarts: 2, max_steps: 50, seed: i, ..SearchConfig::default() },
            substeps: 1,
        };
        let cert = complexity_certificate(&path, &config).unwrap();
        if !cert.all_bounds_hold {
            lib_fail += 1;
        }
        max_ratio = max_ratio.max(cert.max_bound() / cert.path_cost);
        let file = dir.join(format!("path-{i}.json"));
        std::fs::write(&file, serde_json::to_string(&CircuitPathJson::from_path(&path)).unwrap()).unwrap();
        let (code, cli_cert) = run_audit(bin, &file, i);
        if code != 0 {
            cli_fail += 1;
        }
        match cli_cert {
            Some(c) if c.compiled_unitary_hash == cert.compiled_unitary_hash && (c.max_bound() - cert.max_bound()).abs() <= 1e-9 => {}
            _ => mismatch += 1,
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let (good_code, _) = run_audit(bin, &fixtures.join("cnot_path.json"), 0);
    let (bad_code, _) = run_audit(bin, &fixtures.join("corrupted_certificate.json"), 0);
    outcome(
        lib_fail == 0 && cli_fail == 0 && mismatch == 0 && good_code == 0 && bad_code == 2,
        format!(
            "200 paths: {lib_fail} library violations, {cli_fail} nonzero CLI exits, {mismatch} CLI/library mismatches, max bound/cost = {max_ratio:.3}; CNOT path exit {good_code}, corrupted certificate exit {bad_code} (want 2)"
        ),
    )
}

/// Criterion 9: stable unitaries preserve the average Rényi-2 entanglement.
fn entanglement_invariance() -> Outcome {
    let mut r = rng(909);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (d, n) = if i % 5 == 4 { (3, 2 + i % 2) } else { (2, 2 + i % 3) };
        let psi = random_pure_state(d, n, &mut r).unwrap();
        let u = random_stable_unitary(d, n, 3, &mut r);
        let before = avg_renyi2_entanglement(&projector(d, n, &psi).unwrap()).unwrap();
        let after = avg_renyi2_entanglement(&projector(d, n, &psi).unwrap().conjugate_by(&u)).unwrap();
        worst = worst.max((before - after).abs());
    }
    outcome(worst <= 1e-9, format!("max |ΔE| over 100 states = {worst:.1e} (<= 1e-9)"))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let suite = Instant::now();
    let criteria: [Criterion; 9] = [
        ("sensitivity quadratic form", sensitivity_quadratic_form),
        ("stable-gate equivalence", stable_gate_equivalence),
        ("matchgate equivalence and taxonomy", matchgate_equivalence),
        ("weak entropy-influence inequality", weak_qfei),
        ("rates vs finite differences", rates_vs_finite_differences),
        ("OTOC identities", otoc_identities),
        ("reference constants", reference_constants),
        ("cost-audit soundness", cost_audit_soundness),
        ("entanglement invariance", entanglement_invariance),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        println!("[{}] criterion {}: {name}: {} ({:.1?})", verdict(out.pass), i + 1, out.detail, start.elapsed());
        if !out.pass {
            failed.push(i + 1);
        }
    }
    let total = suite.elapsed();
    let in_budget = total <= Duration::from_secs(600);
    println!("[{}] suite runtime {total:.1?} (limit 10 min)", verdict(in_budget));
    if !in_budget {
        failed.push(0);
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
