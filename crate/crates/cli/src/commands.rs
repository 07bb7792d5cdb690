use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pickands::estimators::{Estimator, NonparametricModel};
use pickands::icnn::{train_pickands_icnn, IcnnModel};
use pickands::pipeline::uniformize;
use pickands::sampling::{sample_mev_heuristic_batch, train_generator, GenTrainConfig, GeneratorParams};
use pickands::simplex::simplex_grid_2d;
use pickands::survival::{
    empirical_accuracy, empirical_exceedance, exact_survival_bivariate, survival_probability, threshold_grid,
    ThresholdVector,
};
use pickands::{
    rng, sample_simplex_uniform, CompleteDependence, Independence, PickandsFunction, Provenance, SimplexPoint,
};

use crate::args::{CommonArgs, EstimateArgs, FitArgs, SampleArgs, SurvivalArgs};
use crate::config::{parse_list, Resolver};
use crate::data;
use crate::error::CliError;
use crate::output::{coordinate_names, out_dir, read_text, write_csv, write_text};

pub type ConfigFile = BTreeMap<String, String>;

pub fn seed_and_out(common: &CommonArgs, r: &mut Resolver) -> Result<(u64, PathBuf), CliError> {
    let seed = r.get("seed", common.seed, 0u64)?;
    let out = r.get_unrecorded("out", common.out.as_ref().map(|p| p.display().to_string()), ".".to_string())?;
    Ok((seed, out_dir(Path::new(&out))?))
}

fn load_icnn(path: &Path) -> Result<IcnnModel, CliError> {
    IcnnModel::from_json(&read_text(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn fit(common: &CommonArgs, file: ConfigFile, a: FitArgs) -> Result<(), CliError> {
    let mut r = Resolver::new("fit", file);
    let (seed, out) = seed_and_out(common, &mut r)?;
    let loaded = data::load(&a.data, &mut r, seed)?;
    let reflect = r.get_switch("reflect", a.reflect, false)?;
    let cfg = data::train_config(&a.train, &mut r, seed, loaded.synthetic, loaded.maxima.n_blocks())?;
    eprintln!("{}", r.header());
    let u = uniformize(&loaded.maxima);
    let u = if reflect { u.reflected() } else { u };
    let (model, log) = train_pickands_icnn(&u, &cfg)?;
    let model_path = out.join("model.json");
    write_text(&model_path, &model.to_json()?)?;
    let log_path = out.join("training_log.csv");
    write_csv(
        &log_path,
        &r.header(),
        &["epoch".into(), "loss".into()],
        log.epoch_loss.iter().enumerate().map(|(i, &l)| vec![(i + 1) as f64, l]),
    )?;
    println!("model: {}", model_path.display());
    println!("training log: {}", log_path.display());
    if let Some(last) = log.epoch_loss.last() {
        println!("final loss: {last}");
    }
    Ok(())
}

enum Column {
    Classical(NonparametricModel<f64>),
    Icnn(IcnnModel),
}

pub fn estimate(common: &CommonArgs, file: ConfigFile, a: EstimateArgs) -> Result<(), CliError> {
    let mut r = Resolver::new("estimate", file);
    let (seed, out) = seed_and_out(common, &mut r)?;
    let loaded = data::load(&a.data, &mut r, seed)?;
    let d = loaded.d();
    let reflect = r.get_switch("reflect", a.reflect, false)?;
    let model_path = r.get_opt("model", a.model.as_ref().map(|p| p.display().to_string()))?;
    let default_list = if model_path.is_some() {
        "pickands,cfg,cfg-corrected,bdv,bdv-mm,icnn"
    } else {
        "pickands,cfg,cfg-corrected,bdv,bdv-mm"
    };
    let names: Vec<String> = r.get_list("estimators", a.estimators.clone(), default_list)?;
    let u = uniformize(&loaded.maxima);
    let u = if reflect { u.reflected() } else { u };
    let mut columns = Vec::with_capacity(names.len());
    for name in &names {
        if name == "icnn" {
            let path = model_path.as_ref().ok_or_else(|| CliError::Usage("the icnn estimator needs --model".into()))?;
            let model = load_icnn(Path::new(path))?;
            if model.dim() != Some(d) {
                return Err(CliError::Usage(format!(
                    "model dimension {:?} does not match data dimension {d}",
                    model.dim()
                )));
            }
            columns.push(Column::Icnn(model));
        } else {
            let kind = Estimator::from_str(name).map_err(|e| CliError::Usage(e.to_string()))?;
            columns.push(Column::Classical(NonparametricModel::new(u.clone(), kind)?));
        }
    }
    let grid = r.get_opt("grid", a.grid)?;
    let n_points = r.get_opt("points", a.points)?;
    let points: Vec<SimplexPoint<f64>> = match (grid, n_points) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--grid and --points are mutually exclusive".into())),
        (Some(_), None) if d != 2 => return Err(CliError::Usage("--grid needs d = 2; use --points".into())),
        (Some(g), None) => simplex_grid_2d(g),
        (None, Some(n)) => sample_simplex_uniform(d, n, &mut rng::split(seed, 1))?,
        (None, None) if d == 2 => simplex_grid_2d(r.get("grid", None, 101usize)?),
        (None, None) => sample_simplex_uniform(d, r.get("points", None, 1000usize)?, &mut rng::split(seed, 1))?,
    };
    let mut header = coordinate_names("w", d);
    if loaded.truth.is_some() {
        header.push("analytic".into());
    }
    header.extend(names.iter().cloned());
    let rows = points.iter().map(|w| {
        let mut row = w.as_slice().to_vec();
        if let Some(t) = &loaded.truth {
            row.push(t.eval(w));
        }
        for c in &columns {
            row.push(match c {
                Column::Classical(m) => m.eval(w),
                Column::Icnn(m) => m.eval(w),
            });
        }
        row
    });
    let path = out.join("estimate.csv");
    write_csv(&path, &r.header(), &header, rows)?;
    println!("estimates: {} ({} points)", path.display(), points.len());
    Ok(())
}

pub fn survival(common: &CommonArgs, file: ConfigFile, a: SurvivalArgs) -> Result<(), CliError> {
    let mut r = Resolver::new("survival", file);
    let (seed, out) = seed_and_out(common, &mut r)?;
    let model_path = r.get_opt("model", a.model.as_ref().map(|p| p.display().to_string()))?;
    let estimator = r.get_opt("estimator", a.estimator.clone())?;
    let baseline = r.get_opt("baseline", a.baseline.clone())?;
    let chosen = [model_path.is_some(), estimator.is_some(), baseline.is_some()].iter().filter(|&&b| b).count();
    if chosen != 1 {
        return Err(CliError::Usage("choose exactly one of --model, --estimator or --baseline".into()));
    }
    let loaded = data::load(&a.data, &mut r, seed)?;
    let d = loaded.d();
    let model: Box<dyn PickandsFunction<f64>> = if let Some(path) = &model_path {
        let m = load_icnn(Path::new(path))?;
        if m.provenance() == Provenance::Original {
            return Err(CliError::Provenance(format!(
                "{path} was fitted to unreflected maxima, so its copula describes joint non-exceedance; \
                 refit with `pickands fit --reflect` before estimating survival probabilities"
            )));
        }
        if m.dim() != Some(d) {
            return Err(CliError::Usage(format!("model dimension {:?} does not match data dimension {d}", m.dim())));
        }
        Box::new(m)
    } else if let Some(name) = &estimator {
        let kind = Estimator::from_str(name).map_err(|e| CliError::Usage(e.to_string()))?;
        Box::new(NonparametricModel::new(uniformize(&loaded.maxima).reflected(), kind)?)
    } else {
        match baseline.as_deref() {
            Some("independence") => Box::new(Independence),
            Some("comonotone") => Box::new(CompleteDependence),
            other => return Err(CliError::Usage(format!("unknown baseline {other:?} (independence, comonotone)"))),
        }
    };
    let floor = r.get("floor", a.floor, 0.75)?;
    let explicit = r.get_opt("threshold-probs", a.threshold_probs.clone())?;
    let thresholds = match explicit {
        Some(raw) => {
            let probs: Vec<f64> = parse_list("threshold-probs", &raw)?;
            if probs.len() != d {
                return Err(CliError::Usage(format!("--threshold-probs needs {d} values, got {}", probs.len())));
            }
            if let Some(p) = probs.iter().find(|&&p| p < floor) {
                return Err(CliError::Usage(format!("threshold probability {p} is below the floor {floor}")));
            }
            vec![ThresholdVector::from_data_probabilities(&loaded.maxima, probs)?]
        }
        None => {
            let count = r.get("thresholds", a.thresholds, 50usize)?;
            threshold_grid(&loaded.maxima, floor, count, &mut rng::split(seed, 1))?
        }
    };
    let exact_model = loaded.truth.as_ref().filter(|_| d == 2);
    let mut header = coordinate_names("p", d);
    header.extend(["empirical".to_string(), "model".to_string()]);
    if exact_model.is_some() {
        header.push("exact".into());
    }
    let mut rows = Vec::with_capacity(thresholds.len());
    let mut exact_se = 0.0;
    for t in &thresholds {
        let mut row = t.probabilities().to_vec();
        row.push(empirical_exceedance(&loaded.maxima, t)?);
        let p = survival_probability(model.as_ref(), t)?;
        row.push(p);
        if let Some(truth) = exact_model {
            let e = exact_survival_bivariate(truth.as_ref(), t.probabilities()[0], t.probabilities()[1])?;
            exact_se += (p - e).powi(2);
            row.push(e);
        }
        rows.push(row);
    }
    let path = out.join("survival.csv");
    write_csv(&path, &r.header(), &header, rows)?;
    if thresholds.is_empty() {
        println!("survival: {} (no thresholds)", path.display());
        return Ok(());
    }
    let accuracy = empirical_accuracy(&loaded.maxima, |t| survival_probability(model.as_ref(), t), &thresholds)?;
    let mut summary = format!("thresholds={} accuracy_mse={accuracy:e}", thresholds.len());
    if exact_model.is_some() {
        summary.push_str(&format!(" exact_mse={:e}", exact_se / thresholds.len() as f64));
    }
    println!("survival: {}", path.display());
    println!("{summary}");
    Ok(())
}

fn on_off(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        other => Err(CliError::Usage(format!("{key} must be on or off, got {other:?}"))),
    }
}

pub fn sample(common: &CommonArgs, file: ConfigFile, a: SampleArgs) -> Result<(), CliError> {
    let mut r = Resolver::new("sample", file);
    let (seed, out) = seed_and_out(common, &mut r)?;
    let exact = r.get_opt("exact", a.exact.clone())?;
    let learned = r.get_switch("learned", a.learned, false)?;
    let n = r.get("n", a.n, 1000usize)?;
    let path = out.join("samples.csv");
    match (exact, learned) {
        (Some(_), true) => Err(CliError::Usage("--exact and --learned are mutually exclusive".into())),
        (None, false) => Err(CliError::Usage("choose --exact FAMILY or --learned".into())),
        (Some(family), false) => {
            let d = r.get("d", a.d, 2usize)?;
            let alpha = r.get("alpha", a.alpha, 0.5)?;
            let (x, _) = data::exact_samples(&family, d, alpha, n, &mut rng::split(seed, 0))?;
            write_csv(&path, &r.header(), &coordinate_names("x", d), x.rows().into_iter().map(|row| row.to_vec()))?;
            println!("samples: {} ({n} x {d})", path.display());
            Ok(())
        }
        (None, true) => {
            let events = r.get("events", a.events, 500usize)?;
            let normalize = on_off("normalize", &r.get("normalize", a.normalize.clone(), "on".to_string())?)?;
            let gen_file = r.get_opt("generator", a.generator.as_ref().map(|p| p.display().to_string()))?;
            let gen = match gen_file {
                Some(p) => {
                    let text = read_text(Path::new(&p))?;
                    GeneratorParams::from_json(&text).map_err(|e| CliError::Usage(format!("{p}: {e}")))?.0
                }
                None => {
                    let (target, d) = learned_target(&a, &mut r, seed)?;
                    let base = GenTrainConfig::default();
                    let cfg = GenTrainConfig {
                        epochs: r.get("gen-epochs", a.gen_epochs, base.epochs)?,
                        learning_rate: r.get("gen-lr", a.gen_lr, base.learning_rate)?,
                        lr_decay: r.get("gen-lr-decay", a.gen_lr_decay, base.lr_decay)?,
                        widths: r.get_list("gen-widths", a.gen_widths.clone(), "256,256")?,
                        latent_dim: r.get_opt("latent", a.latent)?,
                        n_simplex: r.get("n-simplex", a.n_simplex, base.n_simplex)?,
                        n_gen: r.get("n-gen", a.n_gen, base.n_gen)?,
                        seed,
                        ..base
                    };
                    eprintln!("{}", r.header());
                    let (gen, report) = train_generator(target.as_ref(), d, &cfg)?;
                    let gen_path = out.join("generator.json");
                    write_text(&gen_path, &gen.to_json(Some(&cfg))?)?;
                    println!("generator: {} (final loss {:e})", gen_path.display(), report.final_loss);
                    gen
                }
            };
            let x = sample_mev_heuristic_batch(&gen, n, events, normalize, &mut rng::split(seed, 2))?;
            let d = gen.dim();
            write_csv(&path, &r.header(), &coordinate_names("x", d), x.rows().into_iter().map(|row| row.to_vec()))?;
            println!("samples: {} ({n} x {d})", path.display());
            Ok(())
        }
    }
}

fn learned_target(
    a: &SampleArgs,
    r: &mut Resolver,
    seed: u64,
) -> Result<(Box<dyn PickandsFunction<f64>>, usize), CliError> {
    let target = r.get_opt("target", a.target.as_ref().map(|p| p.display().to_string()))?;
    if let Some(path) = target {
        let model = load_icnn(Path::new(&path))?;
        let d = model.dim().expect("ICNN models know their dimension");
        return Ok((Box::new(model), d));
    }
    let family = r.get("target-family", a.target_family.clone(), "sl".to_string())?;
    let d = r.get("d", a.d, 2usize)?;
    let alpha = r.get("alpha", a.alpha, 0.5)?;
    Ok((data::family(&family, d, alpha, &mut rng::split(seed, 0))?, d))
}
