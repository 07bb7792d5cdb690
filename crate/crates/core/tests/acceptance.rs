//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use pickands::estimators::{bdv_eta, bdv_g, estimate_bdv_mm, Estimator, GammaSamples, NonparametricModel};
use pickands::experiments::{mean_std, pickands_fit_cell, rank_uniformized, sampler_cell, survival_cell};
use pickands::icnn::{backprop, icnn_forward, mle_loss, pickands_from_icnn, IcnnArchitecture, IcnnParams, TrainConfig};
use pickands::pipeline::UniformizedDataset;
use pickands::sampling::{
    generator_mean, generator_pickands, sample_symmetric_logistic, train_generator, GenTrainConfig,
};
use pickands::simplex::simplex_grid_2d;
use pickands::{
    rng, sample_simplex_uniform, CompleteDependence, Independence, PickandsFunction, SimplexPoint, SymmetricLogistic,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mean(xs: &[f64]) -> f64 {
    mean_std(xs).0
}

fn estimator_consistency() -> Outcome {
    let truth = SymmetricLogistic::new(0.5).unwrap();
    let data = rank_uniformized(sample_symmetric_logistic(2, 0.5, 100_000, &mut rng::seeded(1)).unwrap()).unwrap();
    let w = SimplexPoint::barycenter(2).unwrap();
    let target = truth.eval(&w);
    let mut pass = true;
    let mut parts = vec![format!("A={target:.4}")];
    for kind in [Estimator::Pickands, Estimator::CfgCorrected, Estimator::Bdv, Estimator::BdvMm] {
        let est = NonparametricModel::new(data.clone(), kind).unwrap().eval(&w);
        pass &= (est - target).abs() <= 0.02;
        parts.push(format!("{kind}={est:.4}"));
    }
    outcome(pass, parts.join(" "))
}

/// Kolmogorov–Smirnov distance between a sample and Exp(rate).
fn ks_exponential(mut z: Vec<f64>, rate: f64) -> f64 {
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    z.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn exponential_law() -> Outcome {
    let truth = SymmetricLogistic::new(0.5).unwrap();
    let b = 5000;
    // Asymptotic 1% critical value of the one-sample KS statistic.
    let critical = 1.62762 / (b as f64).sqrt();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, d) in [2usize, 5].into_iter().enumerate() {
        let x = sample_symmetric_logistic(d, 0.5, b, &mut rng::split(2, i as u64)).unwrap();
        let data = UniformizedDataset::new(x.mapv(|v| (-1.0 / v).exp())).unwrap();
        let points = sample_simplex_uniform::<f64, _>(d, 100, &mut rng::split(3, i as u64)).unwrap();
        let accepted =
            points.iter().filter(|w| ks_exponential(data.z_samples(w).unwrap(), truth.eval(w)) < critical).count();
        pass &= accepted >= 95;
        parts.push(format!("d={d}: {accepted}/100 accepted"));
    }
    outcome(pass, parts.join(", "))
}

fn perturbed_params(d: usize, arch: IcnnArchitecture, seed: u64) -> IcnnParams {
    let mut rng = rng::seeded(seed);
    let mut p = IcnnParams::init(d, arch, &mut rng).unwrap();
    for t in p.tensors_mut() {
        for v in t.iter_mut() {
            *v += rng.random_range(-1.0..1.0);
        }
    }
    p.project();
    p
}

fn icnn_structure() -> Outcome {
    let archs = [IcnnArchitecture::synthetic(), IcnnArchitecture::real_data()];

    let mut pin_err: f64 = 0.0;
    for (i, arch) in archs.iter().enumerate() {
        for d in [2usize, 5, 16] {
            let p = perturbed_params(d, arch.clone(), 10 + i as u64 * 100 + d as u64);
            for k in 0..d {
                let v = pickands_from_icnn(&p, &SimplexPoint::vertex(d, k).unwrap()).unwrap();
                pin_err = pin_err.max((v - 1.0).abs());
            }
        }
    }

    let mut violations = 0;
    let mut rng = rng::seeded(20);
    for (i, arch) in archs.iter().enumerate() {
        let p = perturbed_params(3, arch.clone(), 30 + i as u64);
        let a = sample_simplex_uniform::<f64, _>(3, 5000, &mut rng).unwrap();
        let b = sample_simplex_uniform::<f64, _>(3, 5000, &mut rng).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let mid = x.midpoint(y).unwrap();
            let gap =
                icnn_forward(&p, &mid).unwrap() - 0.5 * (icnn_forward(&p, x).unwrap() + icnn_forward(&p, y).unwrap());
            if gap > 1e-9 {
                violations += 1;
            }
        }
    }

    let h = 1e-5;
    let mut worst_rel: f64 = 0.0;
    for setting in 0..5u64 {
        let arch = IcnnArchitecture { widths: vec![6, 5, 4], negative_slope: 0.01 };
        let p = perturbed_params(3, arch, 40 + setting);
        let mut r = rng::seeded(50 + setting);
        let w = sample_simplex_uniform::<f64, _>(3, 1, &mut r).unwrap().remove(0);
        let z: f64 = r.random_range(0.2..3.0);
        let (_, grad) = backprop(&p, &w, z).unwrap();
        let analytic: Vec<f64> = grad.tensors().iter().flat_map(|t| t.iter().copied()).collect();
        let loss = |q: &IcnnParams| mle_loss(pickands_from_icnn(q, &w).unwrap(), z);
        let mut q = p.clone();
        let mut numeric = Vec::with_capacity(analytic.len());
        for t in 0..q.tensors().len() {
            for i in 0..q.tensors()[t].len() {
                let orig = q.tensors()[t][i];
                q.tensors_mut()[t][i] = orig + h;
                let up = loss(&q);
                q.tensors_mut()[t][i] = orig - h;
                let down = loss(&q);
                q.tensors_mut()[t][i] = orig;
                numeric.push((up - down) / (2.0 * h));
            }
        }
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst_rel = worst_rel.max(diff / norm.max(f64::MIN_POSITIVE));
    }

    let pass = pin_err <= 1e-12 && violations == 0 && worst_rel < 1e-4;
    outcome(
        pass,
        format!("max |A(e_k)-1|={pin_err:.1e}, convexity violations={violations}/10000, worst gradient rel err={worst_rel:.1e}"),
    )
}

fn icnn_fit_quality() -> Outcome {
    let cfg = TrainConfig::default();
    let cells: Vec<_> =
        (0..5).map(|seed| pickands_fit_cell(2, 0.5, 5000, 1000, &[Estimator::Pickands], &cfg, seed).unwrap()).collect();
    let icnn = mean(&cells.iter().map(|c| c.icnn).collect::<Vec<_>>());
    let pickands = mean(&cells.iter().map(|c| c.classical_mse(Estimator::Pickands).unwrap()).collect::<Vec<_>>());
    outcome(
        icnn <= 5e-3 && icnn <= 2.0 * pickands,
        format!("icnn MSE={icnn:.3e}, pickands MSE={pickands:.3e}, ratio={:.2}", icnn / pickands),
    )
}

fn survival_ordering() -> Outcome {
    let cfg = TrainConfig::default();
    let classical = [Estimator::Pickands, Estimator::Cfg, Estimator::Bdv];
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        let cells: Vec<_> =
            (0..5).map(|seed| survival_cell(alpha, 100, 50, 0.75, &classical, &cfg, seed).unwrap()).collect();
        let icnn = mean(&cells.iter().map(|c| c.icnn).collect::<Vec<_>>());
        let (best_kind, best) = classical
            .iter()
            .map(|&k| (k, mean(&cells.iter().map(|c| c.classical_mse(k).unwrap()).collect::<Vec<_>>())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        pass &= icnn <= 1.5 * best;
        parts.push(format!("alpha={alpha}: icnn {icnn:.3e} vs {best_kind} {best:.3e} ({:.2}x)", icnn / best));
    }
    outcome(pass, parts.join("; "))
}

fn high_dimensional_fit() -> Outcome {
    let cfg = TrainConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [16usize, 64] {
        let mses: Vec<f64> =
            (0..5).map(|seed| pickands_fit_cell(d, 0.5, 2000, 1000, &[], &cfg, seed).unwrap().icnn).collect();
        let m = mean(&mses);
        pass &= m <= 1e-2;
        parts.push(format!("d={d}: MSE {m:.3e}"));
    }
    outcome(pass, parts.join(", "))
}

fn generator_recovery() -> Outcome {
    let targets: [(&str, Box<dyn PickandsFunction<f64>>); 3] = [
        ("independence", Box::new(Independence)),
        ("comonotone", Box::new(CompleteDependence)),
        ("sl(0.5)", Box::new(SymmetricLogistic::new(0.5).unwrap())),
    ];
    let grid = simplex_grid_2d::<f64>(21);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, target)) in targets.iter().enumerate() {
        let cfg = GenTrainConfig { seed: 70 + i as u64, ..GenTrainConfig::default() };
        let (gen, _) = train_generator(target.as_ref(), 2, &cfg).unwrap();
        let mut r = rng::seeded(80 + i as u64);
        let est = generator_pickands(&gen, &grid, 200_000, &mut r).unwrap();
        let a_err = grid.iter().zip(&est).map(|(w, e)| (e - target.eval(w)).abs()).fold(0.0, f64::max);
        let m_err = generator_mean(&gen, 200_000, &mut r).unwrap().iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
        pass &= a_err <= 0.02 && m_err <= 0.02;
        parts.push(format!("{name}: max|A err|={a_err:.4} max|mean-1|={m_err:.4}"));
    }
    outcome(pass, parts.join("; "))
}

fn sampler_fidelity() -> Outcome {
    let cfg = GenTrainConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, alpha) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let cell = sampler_cell(2, alpha, 10_000, 500, 1000, 5, &cfg, 90 + i as u64).unwrap();
        pass &= cell.learned <= 2.0 * cell.exact;
        parts.push(format!(
            "alpha={alpha}: learned {:.3e} vs exact {:.3e} ({:.2}x)",
            cell.learned,
            cell.exact,
            cell.learned / cell.exact
        ));
    }
    outcome(pass, parts.join("; "))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn closed_forms() -> Outcome {
    let h = |y: f64| 1.0 / y.ln();
    let h_star = |y: f64| h(y) * y.ln().powi(2);
    let tol = 1e-13;
    let b_h = quadrature::integrate(h_star, 0.0, 1.0, tol).integral;
    let mut worst: f64 = 0.0;
    for i in 1..=100 {
        let x = i as f64 / 100.0;
        let g = -quadrature::integrate(|y| h_star(y) / y.ln(), 0.0, x, tol).integral / b_h;
        let eta = quadrature::integrate(h_star, 0.0, x, tol).integral / b_h;
        worst = worst.max(rel_err(bdv_g(x), g)).max(rel_err(bdv_eta(x), eta));
    }
    let w = SimplexPoint::barycenter(2).unwrap();
    let example = estimate_bdv_mm(&GammaSamples::new(vec![(-1.0f64).exp()]).unwrap(), &w).unwrap();
    outcome(
        worst < 1e-6 && (example - 0.8678794).abs() <= 1e-7,
        format!("worst quadrature rel err={worst:.1e}, B=1 example={example:.7}"),
    )
}

fn extremal_coefficient() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut cell = 0;
    for d in [2usize, 5, 10] {
        for alpha in [0.3, 0.5, 0.7] {
            cell += 1;
            let x = sample_symmetric_logistic(d, alpha, 100_000, &mut rng::split(100, cell)).unwrap();
            let model = NonparametricModel::new(rank_uniformized(x).unwrap(), Estimator::Cfg).unwrap();
            let theta = d as f64 * model.eval(&SimplexPoint::barycenter(d).unwrap());
            let err = rel_err(theta, (d as f64).powf(alpha));
            worst = worst.max(err);
            pass &= err <= 0.05;
        }
    }
    outcome(pass, format!("worst relative error={:.2}% over 9 cells", 100.0 * worst))
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "estimator consistency", 60, estimator_consistency),
        (2, "exponential law of Z_w", 120, exponential_law),
        (3, "ICNN structural guarantees", 60, icnn_structure),
        (4, "ICNN fit quality, d=2", 900, icnn_fit_quality),
        (5, "survival MSE ordering", 1200, survival_ordering),
        (6, "higher-dimensional fit", 1800, high_dimensional_fit),
        (7, "generator recovery", 600, generator_recovery),
        (8, "sampling heuristic fidelity", 900, sampler_fidelity),
        (9, "closed-form oracles", 1, closed_forms),
        (10, "extremal coefficient", 300, extremal_coefficient),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = result.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.1}s of {budget}s{}]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" },
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
