//! Runs every primary acceptance criterion and prints one PASS/FAIL line each.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{groups_commute_internally, is_exact_union, min_commuting_cover, molecule};
use hampart::fermionic::{
    fold_one_body, gfro_decompose, lcu_postprocess, lr_decompose, reconstruct, FitOptions,
};
use hampart::hamiltonian::MolecularTensors;
use hampart::metrics::TrotterReport;
use hampart::pipeline::{run, Method, Partition, PartitionOutcome, PipelineConfig};
use hampart::qubit::{
    find_pauli_symmetries, group_lf, group_si, in_span, map_tensors, Mapping, PauliString,
    PauliSum, C64,
};
use hampart::spectra::{
    dense_spectrum, extreme_eigenvalues, fermionic_sector, project, tensors_to_sparse, EigenConfig,
    LinearOperator, DEFAULT_MAX_QUBITS,
};
use rand::{Rng, SeedableRng};

const BOUND_METHODS: [Method; 7] = [
    Method::Lr,
    Method::Gfro,
    Method::SdGfro,
    Method::LrLcu,
    Method::GfroLcu,
    Method::FcLf,
    Method::FcSi,
];
const CHAIN_TOL: f64 = 1e-8;
/// Fragment cap for the fermionic methods on LiH; keeps the suite within its time budget.
const LIH_FRAGMENT_CAP: usize = 8;

struct Outcome {
    name: &'static str,
    pass: bool,
    soft: bool,
    detail: String,
}

struct Run {
    molecule: &'static str,
    outcome: PartitionOutcome,
    report: TrotterReport,
}

fn config(mol: &str, method: Method) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        method,
        mapping: if method.is_qubit() {
            Mapping::Bk
        } else {
            Mapping::Jw
        },
        ..PipelineConfig::default()
    };
    if mol == "lih" && !method.is_qubit() {
        cfg.max_fragments = LIH_FRAGMENT_CAP;
    }
    cfg
}

fn bound_chain(runs: &[Run], elapsed: f64) -> Outcome {
    let mut failures = Vec::new();
    for r in runs {
        let p = &r.report;
        let checks = [
            ("2ᾱ ≤ α", 2.0 * p.alpha_ordered <= p.alpha + CHAIN_TOL),
            ("α ≤ β", p.alpha <= p.beta + CHAIN_TOL),
            ("α_Q ≤ α", p.alpha_q <= p.alpha + CHAIN_TOL),
            ("β_Q ≤ β", p.beta_q <= p.beta + CHAIN_TOL),
        ];
        for (what, ok) in checks {
            if !ok {
                failures.push(format!("{} {} {what}", r.molecule, p.method));
            }
        }
    }
    let in_time = elapsed <= 600.0;
    Outcome {
        name: "bound chain",
        pass: failures.is_empty() && in_time,
        soft: false,
        detail: format!(
            "{} partitions in {elapsed:.0} s; violations: {:?}",
            runs.len(),
            failures
        ),
    }
}

fn beta_identity(runs: &[Run]) -> Outcome {
    let mut worst: f64 = 0.0;
    for r in runs {
        let p = &r.report;
        worst = worst.max((p.beta - 0.5 * p.c * p.c * p.s_l).abs());
        worst = worst.max((p.beta_q - 0.5 * p.c_q * p.c_q * p.s_l_q).abs());
    }
    Outcome {
        name: "beta identity",
        pass: worst <= 1e-10,
        soft: false,
        detail: format!(
            "largest |β − C²S_L/2| = {worst:.2e} over {} partitions",
            runs.len()
        ),
    }
}

fn reconstruction(h2: &MolecularTensors, lih: &MolecularTensors, runs: &[Run]) -> Outcome {
    let lr_h2 = lr_decompose(h2, 0.0).unwrap().residual_l1;
    let lr_lih = lr_decompose(lih, 0.0).unwrap().residual_l1;
    let gfro = gfro_decompose(h2, 1e-6, 20, &FitOptions::default()).unwrap();
    let decreasing = |h: &[f64]| h.windows(2).all(|w| w[1] < w[0]);
    let mut histories = vec![gfro.residual_history.clone()];
    for r in runs.iter().filter(|r| r.report.method == "gfro") {
        if let Partition::Fermion(p) = &r.outcome.partition {
            histories.push(p.residual_history.clone());
        }
    }
    let all_decreasing = histories.iter().all(|h| decreasing(h));
    Outcome {
        name: "reconstruction",
        pass: lr_h2 <= 1e-10 && lr_lih <= 1e-10 && gfro.residual_l1 <= 1e-6 && gfro.two_body_count() <= 20 && all_decreasing,
        soft: false,
        detail: format!(
            "LR residual H2 {lr_h2:.1e}, LiH {lr_lih:.1e}; GFRO H2 residual {:.1e} with {} fragments; {} histories strictly decreasing: {all_decreasing}",
            gfro.residual_l1,
            gfro.two_body_count(),
            histories.len()
        ),
    }
}

fn spectrum_of(t: &MolecularTensors) -> Vec<f64> {
    dense_spectrum(&tensors_to_sparse(t, DEFAULT_MAX_QUBITS).unwrap().to_dense())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn spectrum_preservation(h2: &MolecularTensors, lih: &MolecularTensors) -> Outcome {
    let reference = spectrum_of(h2);
    let fold = max_diff(&reference, &spectrum_of(&fold_one_body(h2).tensors));
    let lcu_lr = max_diff(
        &reference,
        &spectrum_of(&reconstruct(
            &lcu_postprocess(&lr_decompose(h2, 0.0).unwrap()).unwrap(),
        )),
    );
    let gfro = gfro_decompose(h2, 1e-10, 20, &FitOptions::default()).unwrap();
    let lcu_gfro = max_diff(
        &spectrum_of(&reconstruct(&gfro)),
        &spectrum_of(&reconstruct(&lcu_postprocess(&gfro).unwrap())),
    );
    let h2_worst = fold.max(lcu_lr).max(lcu_gfro);

    let cfg = EigenConfig::default();
    let extremes = |t: &MolecularTensors| {
        let e =
            extreme_eigenvalues(&tensors_to_sparse(t, DEFAULT_MAX_QUBITS).unwrap(), &cfg).unwrap();
        [e.min, e.max]
    };
    let reference = extremes(lih);
    let folded = extremes(&fold_one_body(lih).tensors);
    let lcu = extremes(&reconstruct(
        &lcu_postprocess(&lr_decompose(lih, 0.0).unwrap()).unwrap(),
    ));
    let lih_worst = max_diff(&reference, &folded).max(max_diff(&reference, &lcu));
    Outcome {
        name: "spectrum preservation",
        pass: h2_worst <= 1e-8 && lih_worst <= 1e-7,
        soft: false,
        detail: format!(
            "H2 full spectrum drift {h2_worst:.1e}; LiH extreme eigenvalue drift {lih_worst:.1e}"
        ),
    }
}

fn random_instance(rng: &mut impl Rng, n_qubits: usize, n_terms: usize) -> PauliSum {
    let mut strings = std::collections::BTreeSet::new();
    while strings.len() < n_terms {
        let x = rng.random_range(0..1u64 << n_qubits);
        let z = rng.random_range(0..1u64 << n_qubits);
        if x | z != 0 {
            strings.insert(PauliString::new(x, z));
        }
    }
    PauliSum::from_terms(
        n_qubits,
        strings
            .into_iter()
            .map(|p| (p, C64::new(rng.random_range(-1.0..1.0), 0.0))),
    )
}

fn grouping_soundness(runs: &[Run]) -> Outcome {
    let mut sound = true;
    let mut checked = 0;
    for r in runs {
        if let Partition::Qubit(q) = &r.outcome.partition {
            let sums = q.group_sums();
            sound &= groups_commute_internally(&sums) && is_exact_union(&sums, &q.source);
            checked += 1;
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (mut instances, mut optimal_hits, mut above_oracle) = (0, 0, true);
    for n_terms in 6..=12 {
        for _ in 0..6 {
            let h = random_instance(&mut rng, 3, n_terms);
            let strings: Vec<PauliString> = h.non_identity().map(|(p, _)| *p).collect();
            let best = min_commuting_cover(&strings);
            for q in [group_lf(&h).unwrap(), group_si(&h).unwrap()] {
                let sums = q.group_sums();
                sound &= groups_commute_internally(&sums) && is_exact_union(&sums, &h);
                above_oracle &= q.len() >= best;
                optimal_hits += usize::from(q.len() == best);
            }
            instances += 1;
        }
    }
    Outcome {
        name: "grouping soundness",
        pass: sound && checked == 4 && above_oracle,
        soft: false,
        detail: format!(
            "{checked} molecular partitions sound: {sound}; {instances} brute-force instances, heuristics optimal in {optimal_hits} of {}",
            2 * instances
        ),
    }
}

fn symmetry_sectors(h2: &MolecularTensors) -> Outcome {
    let sector = fermionic_sector(4, 2, 0, Some(0)).unwrap();
    let h = tensors_to_sparse(h2, DEFAULT_MAX_QUBITS).unwrap();
    let full_ground = dense_spectrum(&h.to_dense())[0];
    let projected_ground = dense_spectrum(&project(&h, &sector).unwrap().matrix.0)[0];
    let ground_gap = (full_ground - projected_ground).abs();

    let jw = map_tensors(h2, Mapping::Jw).unwrap();
    let mut sums = group_si(&jw).unwrap().group_sums();
    sums.extend(group_lf(&jw).unwrap().group_sums());
    let syms = find_pauli_symmetries(&sums).unwrap();
    let global = PauliString::z_string(0b1111);
    let spin_up = PauliString::z_string(0b0101);
    let contains = in_span(&syms, &global) && in_span(&syms, &spin_up);
    let exact = [global, spin_up].iter().chain(&syms).all(|s| {
        sums.iter()
            .all(|g| g.non_identity().all(|(p, _)| p.commutes(s)))
    });
    Outcome {
        name: "symmetry sectors",
        pass: sector.dim() == 3 && ground_gap <= 1e-8 && contains && exact,
        soft: false,
        detail: format!(
            "singlet sector dimension {}; ground energy gap {ground_gap:.1e}; {} symmetries found, parities in span: {contains}",
            sector.dim(),
            syms.len()
        ),
    }
}

fn tgate(runs: &[Run]) -> Outcome {
    let published = [("h2", 9.45e8), ("lih", 1.94e12)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (mol, target) in published {
        let r = runs
            .iter()
            .find(|r| r.molecule == mol && r.report.method == "fc-si")
            .unwrap();
        match r.report.n_t {
            Some(n) => {
                let ratio = n / target;
                pass &= (1.0 / 3.0..=3.0).contains(&ratio);
                parts.push(format!("{mol} N_T = {n:.3e} (ratio {ratio:.2})"));
            }
            None => {
                pass = false;
                parts.push(format!("{mol} has no estimate"));
            }
        }
    }
    Outcome {
        name: "T-gate model",
        pass,
        soft: false,
        detail: parts.join("; "),
    }
}

fn greedy_trend(h2: &MolecularTensors, lih: &MolecularTensors, runs: &[Run]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (mol, t, gamma) in [("h2", h2, None), ("lih", lih, Some(4))] {
        let mut greedy = config(mol, Method::Gfro);
        let gfro = match gamma {
            Some(g) => {
                greedy.max_fragments = g + 1;
                run(t, mol, &greedy).unwrap()
            }
            None => {
                let r = runs
                    .iter()
                    .find(|r| r.molecule == mol && r.report.method == "gfro")
                    .unwrap();
                (r.outcome.clone(), r.report.clone())
            }
        };
        let Partition::Fermion(p) = &gfro.0.partition else {
            unreachable!()
        };
        let fro_cfg = PipelineConfig {
            method: Method::Fro,
            fro_fragments: p.two_body_count(),
            ..config(mol, Method::Fro)
        };
        let fro = run(t, mol, &fro_cfg).unwrap().1;
        pass &= gfro.1.alpha <= fro.alpha + CHAIN_TOL;
        parts.push(format!(
            "{mol} Γ={}: α(GFRO) = {:.4e}, α(FRO) = {:.4e}",
            p.two_body_count(),
            gfro.1.alpha,
            fro.alpha
        ));
    }
    for mol in ["h2", "lih"] {
        let find = |m: &str| {
            runs.iter()
                .find(|r| r.molecule == mol && r.report.method == m)
                .unwrap()
        };
        let (si, lf) = (find("fc-si").report.alpha, find("fc-lf").report.alpha);
        let dir = if si <= lf { "≤" } else { ">" };
        parts.push(format!(
            "{mol} α(FC-SI) {dir} α(FC-LF) ({si:.4e} vs {lf:.4e})"
        ));
    }
    Outcome {
        name: "greedy trend",
        pass,
        soft: true,
        detail: parts.join("; "),
    }
}

fn determinism(h2: &MolecularTensors, lih: &MolecularTensors, runs: &[Run]) -> Outcome {
    let mut same = true;
    for (mol, t, method) in [("h2", h2, Method::GfroLcu), ("lih", lih, Method::Lr)] {
        let first = runs
            .iter()
            .find(|r| r.molecule == mol && r.report.method == method.as_str())
            .unwrap();
        let (outcome, report) = run(t, mol, &config(mol, method)).unwrap();
        same &= report.to_json().unwrap() == first.report.to_json().unwrap();
        same &= outcome.partition.to_json().unwrap() == first.outcome.partition.to_json().unwrap();
    }
    Outcome {
        name: "determinism",
        pass: same,
        soft: false,
        detail: "repeated H2 gfro-lcu and LiH lr runs compared byte for byte".into(),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let h2 = molecule("h2");
    let lih = molecule("lih");
    let mut runs = Vec::new();
    for (mol, t) in [("h2", &h2), ("lih", &lih)] {
        for method in BOUND_METHODS {
            let (outcome, report) = run(t, mol, &config(mol, method)).expect("pipeline runs");
            runs.push(Run {
                molecule: mol,
                outcome,
                report,
            });
        }
    }
    let chain_time = start.elapsed().as_secs_f64();
    let outcomes = [
        bound_chain(&runs, chain_time),
        beta_identity(&runs),
        reconstruction(&h2, &lih, &runs),
        spectrum_preservation(&h2, &lih),
        grouping_soundness(&runs),
        symmetry_sectors(&h2),
        tgate(&runs),
        greedy_trend(&h2, &lih, &runs),
        determinism(&h2, &lih, &runs),
    ];
    let mut hard_failure = false;
    for o in &outcomes {
        let tag = match (o.pass, o.soft) {
            (true, _) => "PASS",
            (false, true) => "FAIL (soft)",
            (false, false) => "FAIL",
        };
        hard_failure |= !o.pass && !o.soft;
        println!("{tag} {}: {}", o.name, o.detail);
    }
    println!(
        "acceptance suite finished in {:.0} s",
        start.elapsed().as_secs_f64()
    );
    if hard_failure {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
