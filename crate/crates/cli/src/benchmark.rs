//! Benchmark sweeps. Each (parameter, seed) cell draws its own seed from
//! the master seed, and every curve is written as `x, mean, stddev`.

use std::collections::BTreeMap;

use rand::Rng;

use pickands::estimators::Estimator;
use pickands::experiments::{mean_std, pickands_fit_cell, sampler_cell, survival_cell, CellResult};
use pickands::rng;
use pickands::sampling::GenTrainConfig;

use crate::args::{BenchmarkArgs, CommonArgs};
use crate::commands::{seed_and_out, ConfigFile};
use crate::config::Resolver;
use crate::data;
use crate::error::CliError;
use crate::output::write_csv;

const CLASSICAL: [Estimator; 5] =
    [Estimator::Pickands, Estimator::Cfg, Estimator::CfgCorrected, Estimator::Bdv, Estimator::BdvMm];

fn cell_seed(master: u64, cell: u64) -> u64 {
    rng::split(master, cell).random()
}

/// Curve name → rows of (x, per-seed values).
type Curves = BTreeMap<String, Vec<(f64, Vec<f64>)>>;

fn push(curves: &mut Curves, name: &str, x: f64, values: Vec<f64>) {
    curves.entry(name.to_string()).or_default().push((x, values));
}

fn fit_curves(curves: &mut Curves, x: f64, cells: &[CellResult]) {
    push(curves, "icnn", x, cells.iter().map(|c| c.icnn).collect());
    for kind in CLASSICAL {
        push(curves, kind.name(), x, cells.iter().filter_map(|c| c.classical_mse(kind)).collect());
    }
}

pub fn run(common: &CommonArgs, file: ConfigFile, a: BenchmarkArgs) -> Result<(), CliError> {
    let mut r = Resolver::new("benchmark", file);
    r.get("benchmark", Some(a.name.clone()), String::new())?;
    let (seed, out) = seed_and_out(common, &mut r)?;
    let seeds = r.get("seeds", a.seeds, 5usize)?;
    let mut curves = Curves::new();
    let mut cell = 0u64;
    let mut next_seed = || {
        cell += 1;
        cell_seed(seed, cell)
    };
    match a.name.as_str() {
        "survival-mse" => {
            let alphas: Vec<f64> = r.get_list("alphas", a.alphas.clone(), "0.1,0.3,0.5,0.7,0.9")?;
            let blocks = r.get("blocks", a.blocks, 100usize)?;
            let count = r.get("thresholds", a.thresholds, 50usize)?;
            let floor = r.get("floor", a.floor, 0.75)?;
            let cfg = data::train_config(&a.train, &mut r, seed, true, blocks)?;
            eprintln!("{}", r.header());
            for &alpha in &alphas {
                let cells = (0..seeds)
                    .map(|_| survival_cell(alpha, blocks, count, floor, &CLASSICAL, &cfg, next_seed()))
                    .collect::<Result<Vec<_>, _>>()?;
                fit_curves(&mut curves, alpha, &cells);
                eprintln!("alpha {alpha}: done");
            }
        }
        "pickands-mse" => {
            let dims: Vec<usize> = r.get_list("dims", a.dims.clone(), "16,64,256")?;
            let alpha = r.get("alpha", a.alpha, 0.5)?;
            let blocks = r.get("blocks", a.blocks, 2000usize)?;
            let points = r.get("points", a.points, 1000usize)?;
            let cfg = data::train_config(&a.train, &mut r, seed, true, blocks)?;
            eprintln!("{}", r.header());
            for &d in &dims {
                let cells = (0..seeds)
                    .map(|_| pickands_fit_cell(d, alpha, blocks, points, &CLASSICAL, &cfg, next_seed()))
                    .collect::<Result<Vec<_>, _>>()?;
                fit_curves(&mut curves, d as f64, &cells);
                eprintln!("d {d}: done");
            }
        }
        "sampler-cfg" => {
            let d = r.get("d", a.d, 2usize)?;
            let alphas: Vec<f64> = r.get_list("alphas", a.alphas.clone(), "0.3,0.5,0.7")?;
            let samples = r.get("samples", a.samples, 10_000usize)?;
            let events = r.get("events", a.events, 500usize)?;
            let points = r.get("points", a.points, 1000usize)?;
            let base = GenTrainConfig::default();
            let gen = GenTrainConfig { epochs: r.get("gen-epochs", a.gen_epochs, base.epochs)?, ..base };
            eprintln!("{}", r.header());
            for &alpha in &alphas {
                let cells = (0..seeds)
                    .map(|_| sampler_cell(d, alpha, samples, events, points, 1, &gen, next_seed()))
                    .collect::<Result<Vec<_>, _>>()?;
                push(&mut curves, "learned", alpha, cells.iter().map(|c| c.learned).collect());
                push(&mut curves, "exact", alpha, cells.iter().map(|c| c.exact).collect());
                eprintln!("alpha {alpha}: done");
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown benchmark {other:?} (survival-mse, pickands-mse, sampler-cfg)"
            )))
        }
    }
    let header = r.header();
    let x_name = if a.name == "pickands-mse" { "d" } else { "alpha" };
    for (curve, rows) in &curves {
        let path = out.join(format!("{}_{curve}.csv", a.name));
        write_csv(
            &path,
            &header,
            &[x_name.to_string(), "mean".into(), "stddev".into()],
            rows.iter().map(|(x, v)| {
                let (m, s) = mean_std(v);
                vec![*x, m, s]
            }),
        )?;
        println!("{}", path.display());
    }
    Ok(())
}
