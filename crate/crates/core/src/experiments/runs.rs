use serde::{Deserialize, Serialize};

use super::report::{fmt_num, ExperimentReport, PlotSpec, Record, Table};
use super::{run_cells, EXPERIMENT_NAMES};
use crate::aldg::{
    aldg, aldg_curve, default_inflection_grid, default_n_shuffles, influence_approx,
    shuffled_curves, ThresholdRule,
};
use crate::error::{Error, Result};
use crate::inference::permutation_test;
use crate::kde::{GaussianSpec, KdeConfig};
use crate::measures::{measure, pearson, MeasureKind, MEASURE_NAMES};
use crate::rng::{derive_labeled, derive_seed, rng};
use crate::sample::PairedSample;
use crate::synth::{
    contaminate, gauss_mix3, generate, nb_mix3, ContaminationSpec, Family, SynthSpec,
};

use rand_distr::{Distribution, StandardNormal};

pub fn all_measures() -> Vec<MeasureKind> {
    MEASURE_NAMES
        .iter()
        .map(|n| MeasureKind::from_name(n).expect("registered name"))
        .collect()
}

pub fn functional_families() -> Vec<Family> {
    vec![
        Family::Linear,
        Family::Quadratic,
        Family::Cubic,
        Family::Sine { freq: 1.0 },
        Family::Step,
    ]
}

/// Every registered shape with default parameters; mixtures use three
/// correlated components.
pub fn shape_families() -> Vec<Family> {
    vec![
        Family::Independent,
        Family::Linear,
        Family::Quadratic,
        Family::Cubic,
        Family::Sine { freq: 1.0 },
        Family::Circle,
        Family::Step,
        Family::Checkerboard,
        Family::Spiral { turns: 2.0 },
        Family::XCross,
        Family::GaussMix3 { m: 3 },
        Family::NbMix3 { m: 3 },
        Family::UnifPointMass {
            alpha: 0.1,
            r: 0.01,
        },
    ]
}

fn grid_values(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|k| lo + (hi - lo) * k as f64 / steps as f64)
        .collect()
}

fn err_text(e: Error) -> String {
    e.to_string()
}

/// Runs every measure on `sample`; aLDG seeds come from `seed`.
fn eval_measures(
    measures: &[MeasureKind],
    sample: &PairedSample,
    seed: u64,
) -> Vec<std::result::Result<f64, String>> {
    measures
        .iter()
        .map(|k| measure(&k.with_seed(seed), sample).map_err(err_text))
        .collect()
}

/// Mean over trials for each (grid row, measure). `outs[row * trials + t][m]`.
fn average(
    rows: &[Vec<String>],
    labels: &[String],
    trials: usize,
    outs: &[Vec<std::result::Result<f64, String>>],
) -> Vec<Record> {
    let mut records = Vec::new();
    for (r, grid) in rows.iter().enumerate() {
        for (m, label) in labels.iter().enumerate() {
            let cell = &outs[r * trials..(r + 1) * trials];
            let failed: Vec<&String> = cell.iter().filter_map(|o| o[m].as_ref().err()).collect();
            let res = if let Some(first) = failed.first() {
                Err(format!(
                    "{} of {trials} trials failed: {first}",
                    failed.len()
                ))
            } else {
                Ok(cell
                    .iter()
                    .map(|o| *o[m].as_ref().expect("checked"))
                    .sum::<f64>()
                    / trials as f64)
            };
            records.push(Record::from_result(grid.clone(), label.clone(), res));
        }
    }
    records
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

fn labels(measures: &[MeasureKind]) -> Vec<String> {
    measures.iter().map(|m| m.name().to_string()).collect()
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("config serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityConfig {
    pub n: usize,
    pub trials: usize,
    pub noise_levels: Vec<f64>,
    pub families: Vec<Family>,
    pub measures: Vec<MeasureKind>,
    pub seed: u64,
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        NonlinearityConfig {
            n: 200,
            trials: 20,
            noise_levels: vec![0.0, 0.3, 0.6],
            families: shape_families(),
            measures: all_measures(),
            seed: 0,
        }
    }
}

impl NonlinearityConfig {
    pub fn full() -> Self {
        NonlinearityConfig {
            trials: 50,
            noise_levels: grid_values(0.0, 1.0, 4),
            ..Self::default()
        }
    }
}

/// Mean of every measure on every shape and noise level.
pub fn run_nonlinearity_grid(cfg: &NonlinearityConfig) -> Result<ExperimentReport> {
    const NAME: &str = "nonlinearity_grid";
    check_trials(cfg.trials)?;
    let mut rows = Vec::new();
    let mut specs = Vec::new();
    for fam in &cfg.families {
        for &c in &cfg.noise_levels {
            specs.push(SynthSpec::new(fam.clone(), c, cfg.n, 0)?);
            rows.push(vec![fam.name().to_string(), fmt_num(c)]);
        }
    }
    let (outs, timing) = run_cells(specs.len() * cfg.trials, |i| {
        let cell_seed = derive_labeled(cfg.seed, NAME, i as u64);
        match generate(&specs[i / cfg.trials].with_seed(derive_seed(cell_seed, 0))) {
            Ok(s) => eval_measures(&cfg.measures, &s, derive_seed(cell_seed, 1)),
            Err(e) => vec![Err(err_text(e)); cfg.measures.len()],
        }
    });
    Ok(ExperimentReport {
        name: NAME.into(),
        seed: cfg.seed,
        params: to_json(cfg),
        grid_columns: vec!["family".into(), "noise_level".into()],
        records: average(&rows, &labels(&cfg.measures), cfg.trials, &outs),
        tables: vec![],
        plot: Some(PlotSpec {
            x_column: "noise_level".into(),
            measures: vec!["aldg".into()],
        }),
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub n: usize,
    pub trials: usize,
    pub c_grid: Vec<f64>,
    pub families: Vec<Family>,
    pub measures: Vec<MeasureKind>,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            n: 100,
            trials: 50,
            c_grid: grid_values(0.0, 1.0, 10),
            families: functional_families(),
            measures: all_measures(),
            seed: 0,
        }
    }
}

impl NoiseConfig {
    pub fn full() -> Self {
        Self::default()
    }
}

/// Mean measure values as the noise level grows, per functional family.
pub fn run_noise_monotonicity(cfg: &NoiseConfig) -> Result<ExperimentReport> {
    const NAME: &str = "noise_monotonicity";
    let inner = NonlinearityConfig {
        n: cfg.n,
        trials: cfg.trials,
        noise_levels: cfg.c_grid.clone(),
        families: cfg.families.clone(),
        measures: cfg.measures.clone(),
        seed: derive_labeled(cfg.seed, NAME, 0),
    };
    let mut r = run_nonlinearity_grid(&inner)?;
    r.name = NAME.into();
    r.seed = cfg.seed;
    r.params = to_json(cfg);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub n: usize,
    pub trials: usize,
    pub measures: Vec<MeasureKind>,
    pub seed: u64,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        MixtureConfig {
            n: 200,
            trials: 50,
            measures: all_measures(),
            seed: 0,
        }
    }
}

impl MixtureConfig {
    pub fn full() -> Self {
        Self::default()
    }
}

/// Gaussian and negative binomial mixtures with 0..=3 correlated components.
pub fn run_mixture_accumulation(cfg: &MixtureConfig) -> Result<ExperimentReport> {
    const NAME: &str = "mixture_accumulation";
    check_trials(cfg.trials)?;
    let cells: Vec<(&str, usize)> = ["gauss", "nb"]
        .iter()
        .flat_map(|&k| (0..=3).map(move |m| (k, m)))
        .collect();
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|(k, m)| vec![k.to_string(), m.to_string()])
        .collect();
    let (outs, timing) = run_cells(cells.len() * cfg.trials, |i| {
        let cell_seed = derive_labeled(cfg.seed, NAME, i as u64);
        let (kind, m) = cells[i / cfg.trials];
        let data_seed = derive_seed(cell_seed, 0);
        let sample = if kind == "gauss" {
            gauss_mix3(m, cfg.n, data_seed)
        } else {
            nb_mix3(m, cfg.n, data_seed)
        };
        match sample {
            Ok(s) => eval_measures(&cfg.measures, &s, derive_seed(cell_seed, 1)),
            Err(e) => vec![Err(err_text(e)); cfg.measures.len()],
        }
    });
    Ok(ExperimentReport {
        name: NAME.into(),
        seed: cfg.seed,
        params: to_json(cfg),
        grid_columns: vec!["mixture".into(), "m".into()],
        records: average(&rows, &labels(&cfg.measures), cfg.trials, &outs),
        tables: vec![],
        plot: Some(PlotSpec {
            x_column: "m".into(),
            measures: vec!["aldg".into()],
        }),
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub n_grid: Vec<usize>,
    pub families: Vec<Family>,
    pub noise_level: f64,
    pub level: f64,
    pub n_perms: usize,
    pub trials: usize,
    pub measures: Vec<MeasureKind>,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            n_grid: vec![50, 100, 200],
            families: vec![
                Family::Independent,
                Family::Linear,
                Family::Quadratic,
                Family::Sine { freq: 1.0 },
                Family::Circle,
                Family::XCross,
            ],
            noise_level: 0.5,
            level: 0.05,
            n_perms: 200,
            trials: 50,
            measures: all_measures(),
            seed: 0,
        }
    }
}

impl PowerConfig {
    pub fn full() -> Self {
        PowerConfig {
            n_grid: vec![50, 100, 200, 500],
            families: {
                let mut f = shape_families();
                f.retain(|f| !matches!(f, Family::UnifPointMass { .. }));
                f.extend([Family::GaussMix3 { m: 1 }, Family::NbMix3 { m: 1 }]);
                f
            },
            ..Self::default()
        }
    }
}

/// Rejection rate of the permutation test for each family, size and measure.
/// The independent family's rate is the type-I error.
pub fn run_power_suite(cfg: &PowerConfig) -> Result<ExperimentReport> {
    const NAME: &str = "power_suite";
    check_trials(cfg.trials)?;
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "level={} must be in (0,1)",
            cfg.level
        )));
    }
    let mut rows = Vec::new();
    let mut specs = Vec::new();
    for fam in &cfg.families {
        for &n in &cfg.n_grid {
            specs.push(SynthSpec::new(fam.clone(), cfg.noise_level, n, 0)?);
            rows.push(vec![fam.name().to_string(), n.to_string()]);
        }
    }
    let (outs, timing) = run_cells(specs.len() * cfg.trials, |i| {
        let cell_seed = derive_labeled(cfg.seed, NAME, i as u64);
        let sample = match generate(&specs[i / cfg.trials].with_seed(derive_seed(cell_seed, 0))) {
            Ok(s) => s,
            Err(e) => return vec![Err(err_text(e)); cfg.measures.len()],
        };
        cfg.measures
            .iter()
            .enumerate()
            .map(|(m, k)| {
                let kind = k.with_seed(derive_seed(cell_seed, 1));
                permutation_test(
                    &kind,
                    &sample,
                    cfg.n_perms,
                    derive_seed(cell_seed, 2 + m as u64),
                )
                .map(|r| if r.p_value <= cfg.level { 1.0 } else { 0.0 })
                .map_err(err_text)
            })
            .collect()
    });
    Ok(ExperimentReport {
        name: NAME.into(),
        seed: cfg.seed,
        params: to_json(cfg),
        grid_columns: vec!["family".into(), "n".into()],
        records: average(&rows, &labels(&cfg.measures), cfg.trials, &outs),
        tables: vec![],
        plot: Some(PlotSpec {
            x_column: "n".into(),
            measures: vec!["aldg".into(), "hhg".into(), "pearson".into()],
        }),
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub n_grid: Vec<usize>,
    pub rho_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            n_grid: vec![100, 1000],
            rho_grid: vec![0.0, 0.3, 0.6, 0.9],
            trials: 20,
            seed: 0,
        }
    }
}

impl ThresholdConfig {
    pub fn full() -> Self {
        ThresholdConfig {
            rho_grid: grid_values(0.0, 0.9, 9),
            ..Self::default()
        }
    }
}

pub const THRESHOLD_RULES: [&str; 3] = ["uniform_error", "asymptotic_norm", "inflection_point"];

fn gaussian_sample(rho: f64, n: usize, seed: u64) -> Result<PairedSample> {
    let spec = GaussianSpec::standard(rho)?;
    let mut r = rng(seed);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let z1: f64 = StandardNormal.sample(&mut r);
            let z2: f64 = StandardNormal.sample(&mut r);
            spec.draw(z1, z2)
        })
        .collect();
    PairedSample::from_pairs(&pairs)
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, var.sqrt())
}

fn rule_for(name: &str, seed: u64) -> ThresholdRule {
    match name {
        "uniform_error" => ThresholdRule::UniformError {
            n_shuffles: None,
            seed,
        },
        "asymptotic_norm" => ThresholdRule::AsymptoticNorm,
        _ => ThresholdRule::InflectionPoint {
            grid: None,
            n_shuffles: None,
            seed,
        },
    }
}

/// Thresholds and estimates from the three rules on Gaussian data, with the
/// observed and shuffled `aLDG_t` curves of each setting's first trial.
pub fn run_threshold_comparison(cfg: &ThresholdConfig) -> Result<ExperimentReport> {
    const NAME: &str = "threshold_comparison";
    check_trials(cfg.trials)?;
    let settings: Vec<(usize, f64)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| cfg.rho_grid.iter().map(move |&r| (n, r)))
        .collect();
    type Cell = (
        Vec<std::result::Result<(f64, f64), String>>,
        Option<Vec<Vec<String>>>,
    );
    let (outs, timing) = run_cells(settings.len() * cfg.trials, |i| -> Cell {
        let cell_seed = derive_labeled(cfg.seed, NAME, i as u64);
        let (n, rho) = settings[i / cfg.trials];
        let sample = match gaussian_sample(rho, n, derive_seed(cell_seed, 0)) {
            Ok(s) => s,
            Err(e) => return (vec![Err(err_text(e)); 3], None),
        };
        let rule_seed = derive_seed(cell_seed, 1);
        let results = THRESHOLD_RULES
            .iter()
            .map(|r| {
                aldg(&sample, &rule_for(r, rule_seed), None)
                    .map(|a| (a.t_used, a.value))
                    .map_err(err_text)
            })
            .collect();
        let curves = (i % cfg.trials == 0)
            .then(|| curve_rows(&sample, n, rho, rule_seed))
            .and_then(|c| c.ok());
        (results, curves)
    });
    let mut records = Vec::new();
    let mut trial_rows = Vec::new();
    let mut curve_table = Vec::new();
    for (s, &(n, rho)) in settings.iter().enumerate() {
        let cell = &outs[s * cfg.trials..(s + 1) * cfg.trials];
        if let Some(c) = &cell[0].1 {
            curve_table.extend(c.iter().cloned());
        }
        for (k, rule) in THRESHOLD_RULES.iter().enumerate() {
            let grid = vec![n.to_string(), fmt_num(rho), rule.to_string()];
            let mut ts = Vec::new();
            let mut vs = Vec::new();
            let mut first_err = None;
            for (t, o) in cell.iter().enumerate() {
                match &o.0[k] {
                    Ok((tu, v)) => {
                        ts.push(*tu);
                        vs.push(*v);
                        trial_rows.push(vec![
                            n.to_string(),
                            fmt_num(rho),
                            rule.to_string(),
                            t.to_string(),
                            fmt_num(*tu),
                            fmt_num(*v),
                        ]);
                    }
                    Err(e) => {
                        first_err.get_or_insert_with(|| e.clone());
                        trial_rows.push(vec![
                            n.to_string(),
                            fmt_num(rho),
                            rule.to_string(),
                            t.to_string(),
                            String::new(),
                            String::new(),
                        ]);
                    }
                }
            }
            if let Some(e) = first_err {
                for m in ["t_mean", "aldg_mean", "aldg_sd"] {
                    records.push(Record::from_result(
                        grid.clone(),
                        m,
                        Err(format!(
                            "{} of {} trials failed: {e}",
                            cfg.trials - vs.len(),
                            cfg.trials
                        )),
                    ));
                }
                continue;
            }
            let (tm, _) = mean_sd(&ts);
            let (vm, vsd) = mean_sd(&vs);
            records.push(Record::ok(grid.clone(), "t_mean", tm));
            records.push(Record::ok(grid.clone(), "aldg_mean", vm));
            records.push(Record::ok(grid, "aldg_sd", vsd));
        }
    }
    let cols = |c: &[&str]| c.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Ok(ExperimentReport {
        name: NAME.into(),
        seed: cfg.seed,
        params: to_json(cfg),
        grid_columns: cols(&["n", "rho", "rule"]),
        records,
        tables: vec![
            Table {
                suffix: "trials".into(),
                columns: cols(&["n", "rho", "rule", "trial", "t_used", "aldg"]),
                rows: trial_rows,
            },
            Table {
                suffix: "curves".into(),
                columns: cols(&["n", "rho", "curve", "t", "aldg"]),
                rows: curve_table,
            },
        ],
        plot: Some(PlotSpec {
            x_column: "rho".into(),
            measures: vec!["aldg_mean".into()],
        }),
        timing,
    })
}

/// Observed curve plus one curve per shuffle, on the default inflection grid.
fn curve_rows(sample: &PairedSample, n: usize, rho: f64, seed: u64) -> Result<Vec<Vec<String>>> {
    let cfg = KdeConfig::default_for(sample)?;
    let n_shuffles = default_n_shuffles(n);
    let grid = default_inflection_grid(sample, &cfg, n_shuffles, seed)?;
    let mut curves = vec![("observed".to_string(), aldg_curve(sample, &cfg, &grid)?)];
    for (b, c) in shuffled_curves(sample, &cfg, &grid, n_shuffles, seed)
        .into_iter()
        .enumerate()
    {
        curves.push((format!("shuffle_{b}"), c));
    }
    let mut rows = Vec::new();
    for (label, c) in curves {
        for (t, v) in grid.iter().zip(c) {
            rows.push(vec![
                n.to_string(),
                fmt_num(rho),
                label.clone(),
                fmt_num(*t),
                fmt_num(v),
            ]);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessConfig {
    pub n: usize,
    pub trials: usize,
    pub d_n: usize,
    pub point: (f64, f64),
    pub eps: f64,
    pub t_grid: Vec<f64>,
    pub influence_point: (f64, f64),
    pub n_mc: usize,
    pub seed: u64,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            n: 1000,
            trials: 50,
            d_n: 10,
            point: (50.0, 50.0),
            eps: 1e-6,
            t_grid: vec![0.0, 0.01, 0.02, 0.05, 0.1, 0.2],
            influence_point: (0.0, 0.0),
            n_mc: 200_000,
            seed: 0,
        }
    }
}

impl RobustnessConfig {
    pub fn full() -> Self {
        RobustnessConfig {
            n_mc: 1_000_000,
            ..Self::default()
        }
    }
}

/// Far-point contamination of independent Gaussian data, and the
/// approximate influence function of population `aLDG_t` at independence.
pub fn run_robustness(cfg: &RobustnessConfig) -> Result<ExperimentReport> {
    const NAME: &str = "robustness";
    check_trials(cfg.trials)?;
    let influence_cells = cfg.t_grid.len();
    let (outs, timing) = run_cells(
        cfg.trials + influence_cells,
        |i| -> Vec<(String, std::result::Result<f64, String>)> {
            let cell_seed = derive_labeled(cfg.seed, NAME, i as u64);
            if i >= cfg.trials {
                let t = cfg.t_grid[i - cfg.trials];
                let v = GaussianSpec::standard(0.0)
                    .and_then(|g| {
                        influence_approx(&g, t, cfg.eps, cfg.influence_point, cfg.n_mc, cell_seed)
                    })
                    .map_err(err_text);
                return vec![("influence".into(), v)];
            }
            let run = || -> Result<Vec<(String, f64)>> {
                let clean = gaussian_sample(0.0, cfg.n, derive_seed(cell_seed, 0))?;
                let dirty = contaminate(
                    &clean,
                    &ContaminationSpec {
                        d_n: cfg.d_n,
                        point: cfg.point,
                    },
                )?;
                let rule = ThresholdRule::Auto {
                    seed: derive_seed(cell_seed, 1),
                };
                let a0 = aldg(&clean, &rule, None)?.value;
                let a1 = aldg(&dirty, &rule, None)?.value;
                let p0 = pearson(clean.xs(), clean.ys())?;
                let p1 = pearson(dirty.xs(), dirty.ys())?;
                Ok(vec![
                    ("aldg_clean".into(), a0),
                    ("aldg_contaminated".into(), a1),
                    ("aldg_shift".into(), (a1 - a0).abs()),
                    ("pearson_clean".into(), p0),
                    ("pearson_contaminated".into(), p1),
                    ("abs_pearson_shift".into(), (p1.abs() - p0.abs()).abs()),
                ])
            };
            match run() {
                Ok(v) => v.into_iter().map(|(k, x)| (k, Ok(x))).collect(),
                Err(e) => vec![("aldg_shift".into(), Err(err_text(e)))],
            }
        },
    );
    let mut records = Vec::new();
    for (i, cell) in outs.into_iter().enumerate() {
        let grid = if i < cfg.trials {
            vec!["contamination".into(), i.to_string(), String::new()]
        } else {
            vec![
                "influence".into(),
                String::new(),
                fmt_num(cfg.t_grid[i - cfg.trials]),
            ]
        };
        for (m, v) in cell {
            records.push(Record::from_result(grid.clone(), m, v));
        }
    }
    Ok(ExperimentReport {
        name: NAME.into(),
        seed: cfg.seed,
        params: to_json(cfg),
        grid_columns: vec!["part".into(), "trial".into(), "t".into()],
        records,
        tables: vec![],
        plot: Some(PlotSpec {
            x_column: "t".into(),
            measures: vec!["influence".into()],
        }),
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingConfig {
    pub n_grid: Vec<usize>,
    pub measures: Vec<MeasureKind>,
    /// Each timed batch repeats the call until it has run this long.
    pub min_batch_ms: f64,
    pub batches: usize,
    pub seed: u64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            n_grid: vec![100, 200, 400, 800],
            measures: vec![
                MeasureKind::Aldg {
                    rule: ThresholdRule::AsymptoticNorm,
                },
                MeasureKind::Hhg,
                MeasureKind::DCor,
                MeasureKind::Hsic { width: None },
                MeasureKind::HoeffD,
                MeasureKind::Kendall,
            ],
            min_batch_ms: 30.0,
            batches: 3,
            seed: 0,
        }
    }
}

impl TimingConfig {
    pub fn full() -> Self {
        TimingConfig {
            n_grid: vec![100, 200, 400, 800, 1600],
            batches: 5,
            ..Self::default()
        }
    }
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (
        lx.iter().sum::<f64>() / lx.len() as f64,
        ly.iter().sum::<f64>() / ly.len() as f64,
    );
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Seconds per call, median over batches.
fn time_call(f: &dyn Fn() -> Result<f64>, min_batch_ms: f64, batches: usize) -> Result<f64> {
    f()?;
    let mut per_call = Vec::with_capacity(batches);
    for _ in 0..batches.max(1) {
        let t0 = std::time::Instant::now();
        let mut reps = 0u32;
        while reps == 0 || t0.elapsed().as_secs_f64() * 1e3 < min_batch_ms {
            std::hint::black_box(f()?);
            reps += 1;
        }
        per_call.push(t0.elapsed().as_secs_f64() / reps as f64);
    }
    per_call.sort_by(f64::total_cmp);
    Ok(per_call[per_call.len() / 2])
}

/// Wall time per call against sample size, with fitted log-log slopes.
/// Runs sequentially; the values are measurements and vary between runs.
pub fn run_timing(cfg: &TimingConfig) -> Result<ExperimentReport> {
    const NAME: &str = "timing";
    if cfg.n_grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "timing needs at least two sample sizes".into(),
        ));
    }
    let started = std::time::Instant::now();
    let mut records = Vec::new();
    let mut cell_ms = Vec::new();
    let mut per_measure: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cfg.measures.len()];
    for (k, &n) in cfg.n_grid.iter().enumerate() {
        let sample = generate(&SynthSpec::new(
            Family::Linear,
            0.5,
            n,
            derive_labeled(cfg.seed, NAME, k as u64),
        )?)?;
        for (m, kind) in cfg.measures.iter().enumerate() {
            let c0 = std::time::Instant::now();
            let secs = time_call(&|| measure(kind, &sample), cfg.min_batch_ms, cfg.batches)
                .map_err(err_text);
            cell_ms.push(c0.elapsed().as_secs_f64() * 1e3);
            if let Ok(s) = secs {
                per_measure[m].push((n as f64, s));
            }
            records.push(Record::from_result(vec![n.to_string()], kind.name(), secs));
        }
    }
    let slopes = cfg
        .measures
        .iter()
        .zip(&per_measure)
        .map(|(kind, pts)| {
            vec![
                kind.name().to_string(),
                if pts.len() >= 2 {
                    fmt_num(log_log_slope(pts))
                } else {
                    String::new()
                },
            ]
        })
        .collect();
    Ok(ExperimentReport {
        name: NAME.into(),
        seed: cfg.seed,
        params: to_json(cfg),
        grid_columns: vec!["n".into()],
        records,
        tables: vec![Table {
            suffix: "slopes".into(),
            columns: vec!["measure".into(), "slope".into()],
            rows: slopes,
        }],
        plot: Some(PlotSpec {
            x_column: "n".into(),
            measures: vec![],
        }),
        timing: super::Timing {
            started_unix_ms: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            total_ms: started.elapsed().as_secs_f64() * 1e3,
            cell_ms,
        },
    })
}

/// Size of the run: the reduced defaults or the larger preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    #[default]
    Default,
    Full,
}

/// Optional overrides applied on top of a preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub n_perms: Option<usize>,
}

/// Runs an experiment by name.
pub fn run_named(name: &str, preset: Preset, seed: u64, o: &Overrides) -> Result<ExperimentReport> {
    let full = preset == Preset::Full;
    match name {
        "nonlinearity_grid" => {
            let mut c = if full {
                NonlinearityConfig::full()
            } else {
                NonlinearityConfig::default()
            };
            c.seed = seed;
            c.n = o.n.unwrap_or(c.n);
            c.trials = o.trials.unwrap_or(c.trials);
            run_nonlinearity_grid(&c)
        }
        "noise_monotonicity" => {
            let mut c = if full {
                NoiseConfig::full()
            } else {
                NoiseConfig::default()
            };
            c.seed = seed;
            c.n = o.n.unwrap_or(c.n);
            c.trials = o.trials.unwrap_or(c.trials);
            run_noise_monotonicity(&c)
        }
        "mixture_accumulation" => {
            let mut c = if full {
                MixtureConfig::full()
            } else {
                MixtureConfig::default()
            };
            c.seed = seed;
            c.n = o.n.unwrap_or(c.n);
            c.trials = o.trials.unwrap_or(c.trials);
            run_mixture_accumulation(&c)
        }
        "power_suite" => {
            let mut c = if full {
                PowerConfig::full()
            } else {
                PowerConfig::default()
            };
            c.seed = seed;
            if let Some(n) = o.n {
                c.n_grid = vec![n];
            }
            c.trials = o.trials.unwrap_or(c.trials);
            c.n_perms = o.n_perms.unwrap_or(c.n_perms);
            run_power_suite(&c)
        }
        "threshold_comparison" => {
            let mut c = if full {
                ThresholdConfig::full()
            } else {
                ThresholdConfig::default()
            };
            c.seed = seed;
            if let Some(n) = o.n {
                c.n_grid = vec![n];
            }
            c.trials = o.trials.unwrap_or(c.trials);
            run_threshold_comparison(&c)
        }
        "robustness" => {
            let mut c = if full {
                RobustnessConfig::full()
            } else {
                RobustnessConfig::default()
            };
            c.seed = seed;
            c.n = o.n.unwrap_or(c.n);
            c.trials = o.trials.unwrap_or(c.trials);
            run_robustness(&c)
        }
        "timing" => {
            let mut c = if full {
                TimingConfig::full()
            } else {
                TimingConfig::default()
            };
            c.seed = seed;
            run_timing(&c)
        }
        other => {
            debug_assert!(!EXPERIMENT_NAMES.contains(&other));
            Err(Error::UnknownExperiment(other.to_string()))
        }
    }
}
