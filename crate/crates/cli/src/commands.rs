use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::ValueEnum;
use depgap::experiments::{run_named, Overrides, Preset, EXPERIMENT_NAMES};
use depgap::measures::{measure_detailed, pairwise_matrix, MeasureKind};
use depgap::{generate, permutation_test, PairedSample, SynthSpec};
use serde::Serialize;

use crate::ingest::{export, ingest, ExpressionMatrix, Format};
use crate::table::{read_pairs, write_matrix, write_pairs};
use crate::{
    Command, ExperimentArgs, MatrixArgs, MatrixInput, MeasureArgs, MeasureName, MeasureSpec,
    RuleName, SampleSource, SimulateArgs, TestArgs,
};

/// Bad flag combinations caught after parsing; exits with the usage code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Measure(a) => cmd_measure(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Test(a) => cmd_test(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

fn measure_kind(spec: &MeasureSpec) -> anyhow::Result<MeasureKind> {
    let name = spec
        .measure
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let mut params = BTreeMap::new();
    for p in &spec.params {
        let Some((k, v)) = p.split_once('=') else {
            return Err(usage(format!("--param expects KEY=VALUE, got {p:?}")));
        };
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    let thresholded = spec.threshold_rule.is_some() || spec.t.is_some();
    if thresholded && spec.measure != MeasureName::Aldg {
        return Err(usage(
            "--threshold-rule and --t only apply to --measure aldg",
        ));
    }
    if let Some(rule) = spec.threshold_rule {
        let rule = rule.to_possible_value().expect("no skipped variants");
        params.insert("rule".into(), rule.get_name().to_string());
        if spec.t.is_none() && spec.threshold_rule == Some(RuleName::Fixed) {
            return Err(usage("--threshold-rule fixed requires --t"));
        }
    }
    if let Some(t) = spec.t {
        params.insert("t".into(), t.to_string());
    }
    let kind = MeasureKind::parse(&name, &params).map_err(|e| usage(e.to_string()))?;
    Ok(kind.with_seed(spec.seed))
}

fn format_for(path: &Path, format: Option<Format>) -> Format {
    format.unwrap_or_else(|| Format::from_path(path))
}

fn load_matrix(input: &MatrixInput) -> anyhow::Result<ExpressionMatrix> {
    let fmt = format_for(&input.input, input.format);
    Ok(ingest(&input.input, fmt, input.transform)?)
}

fn load_sample(src: &SampleSource) -> anyhow::Result<PairedSample> {
    if let Some(path) = &src.pairs {
        let file =
            fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
        return read_pairs(file).with_context(|| format!("in {}", path.display()));
    }
    let path = src
        .input
        .as_ref()
        .expect("clap requires --input or --pairs");
    let m = ingest(path, format_for(path, src.format), src.transform)?;
    let row = |key: &Option<String>| -> anyhow::Result<Vec<f64>> {
        let key = key.as_deref().expect("clap requires the row flags");
        match m.row_index(key) {
            Some(i) => Ok(m.values[i].clone()),
            None => bail!(
                "no row {key:?} in {} (gene id or 0-based index)",
                path.display()
            ),
        }
    };
    Ok(PairedSample::new(row(&src.x_row)?, row(&src.y_row)?)?)
}

fn print_json(v: &impl Serialize) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct MeasureReport {
    measure: String,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_used: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
    runtime_ms: f64,
}

fn cmd_measure(a: MeasureArgs) -> anyhow::Result<()> {
    let kind = measure_kind(&a.spec)?;
    let sample = load_sample(&a.source)?;
    let start = Instant::now();
    let out = measure_detailed(&kind, &sample).with_context(|| format!("measure {kind}"))?;
    print_json(&MeasureReport {
        measure: kind.name().to_string(),
        value: out.value,
        t_used: out.t_used,
        rule: out.rule.map(|r| r.name().to_string()),
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Serialize)]
struct FailedPair<'a> {
    row: &'a str,
    column: &'a str,
    error: &'a str,
}

#[derive(Serialize)]
struct MatrixDiagnostics<'a> {
    measure: String,
    genes: usize,
    cells: usize,
    computed_pairs: usize,
    failed_pairs: Vec<FailedPair<'a>>,
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".diagnostics.json");
    PathBuf::from(s)
}

fn cmd_matrix(a: MatrixArgs) -> anyhow::Result<()> {
    let kind = measure_kind(&a.spec)?;
    let m = load_matrix(&a.input)?;
    if let Some(path) = &a.save_input {
        let mut buf = Vec::new();
        export(&m, &mut buf, format_for(&a.input.input, a.input.format))?;
        fs::write(path, buf).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let pm = pairwise_matrix(&m.values, &kind).with_context(|| format!("matrix for {kind}"))?;
    let p = m.gene_ids.len();
    let failed_off_diag = pm.diagnostics.iter().filter(|d| d.i != d.j).count();
    let diag = MatrixDiagnostics {
        measure: kind.to_string(),
        genes: p,
        cells: m.cell_ids.len(),
        computed_pairs: p * (p - 1) / 2 - failed_off_diag,
        failed_pairs: pm
            .diagnostics
            .iter()
            .map(|d| FailedPair {
                row: &m.gene_ids[d.i],
                column: &m.gene_ids[d.j],
                error: &d.error,
            })
            .collect(),
    };
    let mut buf = Vec::new();
    write_matrix(&pm, &m.gene_ids, &mut buf)?;
    fs::write(&a.out, buf).with_context(|| format!("cannot write {}", a.out.display()))?;
    let side = sidecar_path(&a.out);
    let mut json = serde_json::to_string_pretty(&diag)?;
    json.push('\n');
    fs::write(&side, json).with_context(|| format!("cannot write {}", side.display()))?;
    if !diag.failed_pairs.is_empty() {
        eprintln!(
            "{} pair(s) failed, see {}",
            diag.failed_pairs.len(),
            side.display()
        );
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let text = if a.spec.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        fs::read_to_string(&a.spec).with_context(|| format!("cannot read {}", a.spec.display()))?
    };
    let mut spec =
        SynthSpec::from_json(&text).with_context(|| format!("spec {}", a.spec.display()))?;
    if let Some(seed) = a.seed {
        spec = spec.with_seed(seed);
    }
    let sample = generate(&spec).context("simulate")?;
    match &a.out {
        Some(path) => {
            let mut buf = Vec::new();
            write_pairs(&sample, &mut buf)?;
            fs::write(path, buf).with_context(|| format!("cannot write {}", path.display()))
        }
        None => write_pairs(&sample, std::io::stdout().lock()),
    }
}

#[derive(Serialize)]
struct TestReport {
    measure: String,
    #[serde(flatten)]
    result: depgap::PermTestResult,
}

fn cmd_test(a: TestArgs) -> anyhow::Result<()> {
    let kind = measure_kind(&a.spec)?;
    let sample = load_sample(&a.source)?;
    let result = permutation_test(&kind, &sample, a.n_perms, a.spec.seed)
        .with_context(|| format!("permutation test for {kind}"))?;
    print_json(&TestReport {
        measure: kind.name().to_string(),
        result,
    })
}

fn cmd_experiment(a: ExperimentArgs) -> anyhow::Result<()> {
    if a.name == "list" {
        let mut out = std::io::stdout().lock();
        for name in EXPERIMENT_NAMES {
            writeln!(out, "{name}")?;
        }
        return Ok(());
    }
    let preset = if a.full {
        Preset::Full
    } else {
        Preset::Default
    };
    let overrides = Overrides {
        n: a.n,
        trials: a.trials,
        n_perms: a.n_perms,
    };
    let report = run_named(&a.name, preset, a.seed, &overrides)
        .with_context(|| format!("experiment {}", a.name))?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let files = report
        .write(&a.out)
        .with_context(|| format!("writing into {}", a.out.display()))?;
    let errors = report.records.iter().filter(|r| r.error.is_some()).count();
    let mut out = std::io::stdout().lock();
    for f in files {
        writeln!(out, "{}", f.display())?;
    }
    if errors > 0 {
        eprintln!("{errors} cell(s) recorded an error, see the error column");
    }
    Ok(())
}
