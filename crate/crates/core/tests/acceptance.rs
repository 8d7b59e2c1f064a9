//! Acceptance criteria. One line per criterion; the process fails if any
//! criterion fails other than those listed in `KNOWN_UNATTAINABLE`.

use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::Rng;

use chanid::geometry::{outer_cover, pack_offsets, GridSupport, Rect, RectUnion};
use chanid::ident::{
    recover, relative_error, row_matrix, simulate_output, stability_bounds, IdentError, MimoChannel, PilotSet,
};
use chanid::linalg::{self, CMatrix};
use chanid::necessity::composition::{CompositionSetup, DEFAULT_SIDES, INSTABILITY_FLOOR};
use chanid::necessity::*;
use chanid::rng;
use chanid::spark::{full_spark_check, search_identifier, SparkMode, DEFAULT_BUDGET};
use chanid::tf::*;

/// Criteria that cannot hold as stated; they still run and print FAIL.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(
    1,
    "K > L repeats blocks of A(c) (A_{k+L} = A_k), so L=2, K=3 has duplicate columns",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, limit_s: u64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took < Duration::from_secs(limit_s);
    let pass = out.pass && in_time;
    let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id);
    let tag = match (pass, known) {
        (true, _) => "PASS",
        (false, Some(_)) => "FAIL (known)",
        (false, None) => "FAIL",
    };
    println!(
        "criterion {id:>2} [{tag}] {name}: {} ({:.2} s, limit {limit_s} s)",
        out.detail,
        took.as_secs_f64()
    );
    if let (false, Some((_, why))) = (pass, known) {
        println!("             reason: {why}");
    }
    pass || known.is_some()
}

fn full_spark_existence() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for l in [2usize, 3, 5] {
        for k in 1..=3 {
            let (c, _) =
                search_identifier::<f64>(l, k, 10, 7 + (l * 10 + k) as u64, DEFAULT_BUDGET).expect("prime period");
            let r = full_spark_check(&c, k, SparkMode::Exhaustive, DEFAULT_BUDGET).expect("within budget");
            if r.is_full_spark() {
                worst = worst.min(r.min_sigma_min / r.matrix_norm);
            } else {
                failures.push(format!("L={l},K={k} (sigma_min={:.1e})", r.min_sigma_min));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} of 9 (L,K) pairs certified, worst passing sigma_min/|A| = {worst:.3e}; failing: [{}]",
            9 - failures.len(),
            failures.join(", ")
        ),
    }
}

fn identifiability() -> Outcome {
    let s = |cells: &[(usize, usize)]| GridSupport::new(2, 7, cells.iter().copied()).unwrap();
    let plan = pack_offsets(vec![
        vec![s(&[(0, 0), (1, 1)]), s(&[(0, 0), (1, 0), (1, 2)])],
        vec![s(&[(0, 1)]), s(&[(1, 0), (1, 2)])],
    ])
    .unwrap();
    let merged_ok = (0..plan.rows()).all(|m| plan.merged(m).len() <= 7);
    let (c, _) = search_identifier::<f64>(7, 2, 3, 2024, DEFAULT_BUDGET).unwrap();
    let pilots = PilotSet::for_plan(c, &plan);
    let (a, b) = stability_bounds(&plan, pilots.identifier()).unwrap();
    let mut max_err = 0f64;
    let mut frame_ok = true;
    for trial in 0..100 {
        let ch = MimoChannel::random(plan.clone(), &mut rng::stream(1, trial));
        let y = simulate_output(&ch, &pilots, 0.0, &mut rng::stream(2, trial)).unwrap();
        let res = recover(&y, &plan, &pilots).unwrap();
        max_err = max_err.max(relative_error(&ch, &res.recovered));
        let ynorm = y.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
        let h = ch.hs_norm();
        frame_ok &= a * h <= ynorm * (1.0 + 1e-12) && ynorm <= b * h * (1.0 + 1e-12);
    }
    Outcome {
        pass: merged_ok && max_err <= 1e-10 && frame_ok,
        detail: format!("100 trials, max relative error {max_err:.2e}, A_est={a:.4}, B_est={b:.4}, frame inequality held: {frame_ok}"),
    }
}

fn pigeonhole() -> Outcome {
    let mut ok = true;
    let mut worst_ratio = 0f64;
    for (idx, l) in [3usize, 5, 7].into_iter().enumerate() {
        let (c, _) = search_identifier::<f64>(l, 2, 2, 50 + idx as u64, DEFAULT_BUDGET).unwrap();
        let mut r = rng::stream(90, idx as u64);
        for _ in 0..10 {
            let mut cells = std::collections::BTreeSet::new();
            while cells.len() < l + 1 {
                cells.insert((r.random_range(0..2), r.random_range(0..l)));
            }
            let plan = pack_offsets(vec![vec![GridSupport::new(2, l, cells).unwrap()]]).unwrap();
            let a = row_matrix(&plan, &c, 0).unwrap();
            let (lo, hi) = linalg::sigma_extremes(&a);
            worst_ratio = worst_ratio.max(lo / hi);
            let pilots = PilotSet::for_plan(c.clone(), &plan);
            let y = simulate_output(&MimoChannel::zeros(plan.clone()), &pilots, 0.0, &mut rng::stream(0, 0)).unwrap();
            let rank_deficient = matches!(
                recover(&y, &plan, &pilots),
                Err(IdentError::RankDeficient { row: 0, .. })
            );
            ok &= a.shape() == (l, l + 1) && lo < 1e-10 * hi && rank_deficient;
        }
    }
    Outcome {
        pass: ok,
        detail: format!(
            "30 plans with L+1 cells at L in {{3,5,7}}: all RankDeficient; max sigma_min/sigma_max = {worst_ratio:.1e}"
        ),
    }
}

fn appendix_instability() -> Outcome {
    let reports: Vec<_> = (1..=4)
        .map(|k1| {
            let mut spec = SlantedMatrixSpec::new(2.0, 1, k1);
            spec.decay_power = 4.0;
            kernel_vector(&spec).unwrap()
        })
        .collect();
    let decreasing = reports.windows(2).all(|w| w[1].norm_mx < w[0].norm_mx);
    let dominated = reports.iter().all(|r| r.norm_mx * r.norm_mx <= r.appendix_bound);
    let exact = reports.iter().all(|r| r.inner_residual < 1e-10);
    let curve: Vec<String> = reports
        .iter()
        .map(|r| format!("{:.2e}<={:.2e}", r.norm_mx * r.norm_mx, r.appendix_bound))
        .collect();
    let largest = reports
        .last()
        .map(|r| ((2 * r.n_tilde + 1).pow(2), (2 * r.n + 1).pow(2)))
        .unwrap();
    Outcome {
        pass: decreasing && dominated && exact,
        detail: format!(
            "|Mx|^2 vs bound over K1=1..4: [{}]; decreasing: {decreasing}; largest section {}x{}",
            curve.join(", "),
            largest.0,
            largest.1
        ),
    }
}

fn tail_limit() -> Outcome {
    let default = tail_sum(&PowerWeight::new(4.0f64), 1, &[2, 4, 8, 16]).unwrap();
    let boundary = tail_sum(&PowerWeight::new(3.0f64), 1, &[2, 4, 8, 16]).unwrap();
    let drop = default[0] / default[3];
    let boundary_drop = boundary[0] / boundary[3];
    Outcome {
        pass: drop >= 2.0 && boundary_drop < 2.0,
        detail: format!(
            "decay 4: K1=2 -> 16 shrinks {drop:.1}x; decay 3 (boundary): {boundary_drop:.2}x, does not decrease by 2x"
        ),
    }
}

fn random_op(p: usize, seed: u64) -> LinOp<f64> {
    let mut r = rng::stream(seed, 0);
    LinOp::new(CMatrix::from_fn(p, p, |_, _| rng::unit_complex_gaussian(&mut r))).unwrap()
}

fn random_signal(p: usize, seed: u64, index: u64) -> Signal<f64> {
    let mut r = rng::stream(seed, index);
    Signal::new((0..p).map(|_| rng::unit_complex_gaussian(&mut r)).collect()).unwrap()
}

fn norm_and_pairing() -> Outcome {
    let mut worst_norm = 0f64;
    let mut worst_pair = 0f64;
    for p in [3usize, 4, 5, 8] {
        for trial in 0..100 {
            let seed = 7_000 + 1_000 * p as u64 + trial;
            let h = random_op(p, seed);
            let eta = spreading_of(&h);
            worst_norm = worst_norm.max((eta.norm() * (p as f64).sqrt() - h.hs_norm()).abs() / h.hs_norm());
            let f = random_signal(p, seed, 1);
            let g = random_signal(p, seed, 2);
            let lhs = h.apply(&f).unwrap().inner(&g).unwrap();
            let v = stft(&g, &f).unwrap();
            let rhs = eta
                .coefficients()
                .iter()
                .zip(v.iter())
                .fold(Complex::default(), |a, (e, w)| a + e * w.conj());
            worst_pair = worst_pair.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
        }
    }
    Outcome {
        pass: worst_norm <= 1e-12 && worst_pair <= 1e-12,
        detail: format!("400 instances, worst relative norm gap {worst_norm:.1e}, worst pairing gap {worst_pair:.1e}"),
    }
}

fn conjugation() -> Outcome {
    let mut worst = 0f64;
    for p in [4usize, 5, 7] {
        let mut r = rng::stream(p as u64, 77);
        for trial in 0..100 {
            let h = random_op(p, 20_000 + 100 * p as u64 + trial);
            let pi = p as i64;
            let c = Conjugation::new(
                r.random_range(0..pi),
                r.random_range(0..pi),
                r.random_range(0..pi),
                r.random_range(0..pi),
            );
            let direct = spreading_of(&conjugate_operator(&h, c));
            let closed = conjugate_spreading(&spreading_of(&h), c);
            worst = worst.max((direct.coefficients() - closed.coefficients()).camax());
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!("300 tuples, worst coefficient gap {worst:.1e}"),
    }
}

fn gaussian_frames() -> Outcome {
    let mut values = Vec::new();
    for d in [0.8, 1.0, 1.25] {
        let (a, b) = balanced_steps(60, d).unwrap();
        let (lo, hi) = gaussian_frame_bounds::<f64>(&GaborFrameSpec::new(60, a, b).unwrap());
        values.push((d, a, b, lo, hi));
    }
    let positive = values[0].3 > 1e-10 * values[0].4;
    let non_increasing = values.windows(2).all(|w| w[1].3 <= w[0].3 + 1e-12 * w[0].4);
    let strict = values.windows(2).all(|w| w[1].3 < w[0].3);
    let shown: Vec<String> = values
        .iter()
        .map(|(d, a, b, lo, _)| format!("{d} ({a}x{b}): A={lo:.3e}"))
        .collect();
    Outcome {
        pass: positive && non_increasing,
        detail: format!(
            "P=60 [{}]; non-increasing: {non_increasing}; strictly decreasing: {strict}",
            shown.join(", ")
        ),
    }
}

fn cover_convergence() -> Outcome {
    let s = RectUnion::new(vec![Rect::new(0.0, 0.3, 0.0, 0.3)]).unwrap();
    let m = outer_cover(&s, 100, 997).unwrap().measure::<f64>();
    let rel = (m - 0.09) / 0.09;
    Outcome {
        pass: (0.0..=0.15).contains(&rel),
        detail: format!("K=100, L=997: measure {m:.5} vs area 0.09 ({:.1}% over)", 100.0 * rel),
    }
}

fn composition() -> Outcome {
    let over = CompositionSetup::<f64>::standard(4, 1).unwrap();
    let curve = composition_instability(&over, &DEFAULT_SIDES).unwrap();
    let control = CompositionSetup::<f64>::standard(3, 1).unwrap();
    let ctrl = composition_sections(&control, &DEFAULT_SIDES).unwrap();
    let fmt = |c: &CompositionCurve<f64>| {
        c.points
            .iter()
            .map(|p| format!("{}:{:.2e}", p.members, p.sigma_min / p.sigma_max))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Outcome {
        pass: curve.is_unstable(INSTABILITY_FLOOR) && ctrl.stays_above(INSTABILITY_FLOOR),
        detail: format!(
            "P={}, L=3, analysis {}x{} (density {}); J=4 sigma_min/sigma_max [{}]; control J=3 [{}]",
            curve.period,
            curve.analysis_steps.0,
            curve.analysis_steps.1,
            curve.analysis_density,
            fmt(&curve),
            fmt(&ctrl)
        ),
    }
}

fn main() {
    let results = [
        run(1, "full-spark existence", 60, full_spark_existence),
        run(2, "MIMO identifiability", 30, identifiability),
        run(3, "non-identifiability pigeonhole", 5, pigeonhole),
        run(4, "slanted-matrix instability", 120, appendix_instability),
        run(5, "tail-sum limit", 5, tail_limit),
        run(6, "norm and pairing identities", 5, norm_and_pairing),
        run(7, "conjugation law", 5, conjugation),
        run(8, "Gaussian Gabor frames", 30, gaussian_frames),
        run(9, "cover convergence", 10, cover_convergence),
        run(10, "composition instability", 120, composition),
    ];
    if results.iter().any(|ok| !ok) {
        eprintln!("acceptance: unexpected failure");
        std::process::exit(1);
    }
}
