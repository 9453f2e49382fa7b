//! The five subcommand implementations. Each writes its primary artefact to
//! the output directory (or stdout when none is given) plus a run report;
//! diagnostics go to stderr only.

use std::fs;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use tcpdiv_core::corpus::{
    encode_bytecode, encode_text, load_corpus, read_encoded_corpus, write_encoded_corpus,
    EncodedArtifact, EncodingConfig, TestCaseRecord,
};
use tcpdiv_core::classfile::TestDetectionConfig;
use tcpdiv_core::distance::{build_matrix, matrix_to_csv, read_matrix_csv, write_matrix_csv};
use tcpdiv_core::evaluate::{evaluate_order, read_fault_map_csv, read_kill_map_csv};
use tcpdiv_core::prioritize::{
    fast_pw, greedy_additional, greedy_total, ledru_prioritize, random_order, read_coverage_csv,
    Approach, PrioritizedOrder,
};

use crate::bench::generate;
use crate::config::{ensure_out_dir, RunConfig};
use crate::report::{read_key_values, Report};

/// The encoded artefacts a command works on: a pre-encoded corpus file if
/// given, otherwise classes and/or texts encoded on the fly (bytecode wins
/// when both sources are present).
fn resolve_artifacts(config: &RunConfig) -> Result<Vec<EncodedArtifact>> {
    if let Some(path) = &config.encoded {
        return Ok(read_encoded_corpus(path)?);
    }
    if config.classes.is_none() && config.texts.is_none() {
        bail!("no corpus given: pass --encoded, --classes, or --texts");
    }
    let load = load_corpus(
        config.classes.as_deref(),
        config.texts.as_deref(),
        &TestDetectionConfig::default(),
    )?;
    for warning in &load.warnings {
        eprintln!("warning: {warning}");
    }
    if config.classes.is_some() {
        let encoding = EncodingConfig { mode: config.mode, filter: config.filter.clone() };
        load.records
            .iter()
            .filter(|r| r.instructions.is_some())
            .map(|r| Ok(encode_bytecode(r, &encoding)?))
            .collect()
    } else {
        load.records.iter().map(|r| Ok(encode_text(r)?)).collect()
    }
}

pub fn extract(config: &RunConfig) -> Result<()> {
    if config.classes.is_none() && config.texts.is_none() {
        bail!("extract needs --classes and/or --texts");
    }
    let Some(out) = ensure_out_dir(config)? else {
        bail!("extract needs --out DIR (it writes one file per artefact kind)");
    };

    let started = Instant::now();
    let load = load_corpus(
        config.classes.as_deref(),
        config.texts.as_deref(),
        &TestDetectionConfig::default(),
    )?;
    for warning in &load.warnings {
        eprintln!("warning: {warning}");
    }
    if load.records.is_empty() {
        bail!("no test cases found in the given sources");
    }

    let mut report = Report::new("extract");
    report.put("seed", config.seed);

    if config.texts.is_some() {
        let artifacts: Vec<EncodedArtifact> = load
            .records
            .iter()
            .filter(|r| r.text.is_some())
            .map(encode_text)
            .collect::<Result<_, _>>()?;
        write_encoded_corpus(&artifacts, &out.join("text.corpus"))?;
        report.put("text.records", artifacts.len());
    }
    if config.classes.is_some() {
        let with_code: Vec<&TestCaseRecord> =
            load.records.iter().filter(|r| r.instructions.is_some()).collect();
        let full = EncodingConfig { mode: config.mode, filter: None };
        let artifacts: Vec<EncodedArtifact> =
            with_code.iter().map(|r| encode_bytecode(r, &full)).collect::<Result<_, _>>()?;
        write_encoded_corpus(&artifacts, &out.join("bytecode.corpus"))?;
        report.put("bytecode.records", artifacts.len());

        if let Some(filter) = &config.filter {
            let narrowed = EncodingConfig { mode: config.mode, filter: Some(filter.clone()) };
            let artifacts: Vec<EncodedArtifact> = with_code
                .iter()
                .map(|r| encode_bytecode(r, &narrowed))
                .collect::<Result<_, _>>()?;
            write_encoded_corpus(&artifacts, &out.join("bytecode-filtered.corpus"))?;
            report.put("bytecode-filtered.records", artifacts.len());
        }
    }
    report.put_seconds("extract_seconds", started.elapsed().as_secs_f64());
    report.write(&out.join("report.txt"))
}

pub fn matrix(config: &RunConfig) -> Result<()> {
    let artifacts = resolve_artifacts(config)?;
    let started = Instant::now();
    let matrix = build_matrix(&artifacts)?;
    let preparation_seconds = started.elapsed().as_secs_f64();

    let mut report = Report::new("matrix");
    report.put("n", matrix.n());
    report.put("seed", config.seed);
    report.put_seconds("preparation_seconds", preparation_seconds);

    match ensure_out_dir(config)? {
        Some(out) => {
            write_matrix_csv(&matrix, &out.join("matrix.csv"))?;
            report.write(&out.join("report.txt"))
        }
        None => {
            print!("{}", matrix_to_csv(&matrix)?);
            Ok(())
        }
    }
}

pub fn prioritize(config: &RunConfig) -> Result<()> {
    let Some(algo) = config.algo else {
        bail!("prioritize needs --algo");
    };
    let order = run_algorithm(config, algo)?;

    let mut report = Report::new("prioritize");
    report.put("approach", order.approach.label());
    report.put("n", order.ids.len());
    report.put("seed", config.seed);
    if algo == Approach::FastPw {
        report.put("params.hashes", config.minhash.num_hashes);
        report.put("params.shingle", config.minhash.shingle_k);
        report.put("params.bands", config.minhash.bands);
        report.put("params.rows", config.minhash.rows);
    }
    report.put_seconds("preparation_seconds", order.preparation_seconds);
    report.put_seconds("prioritisation_seconds", order.prioritisation_seconds);

    let mut listing = String::new();
    for id in &order.ids {
        listing.push_str(id);
        listing.push('\n');
    }
    match ensure_out_dir(config)? {
        Some(out) => {
            fs::write(out.join("order.txt"), listing)
                .with_context(|| format!("cannot write {}", out.join("order.txt").display()))?;
            report.write(&out.join("report.txt"))
        }
        None => {
            print!("{listing}");
            Ok(())
        }
    }
}

fn run_algorithm(config: &RunConfig, algo: Approach) -> Result<PrioritizedOrder> {
    match algo {
        Approach::LedruTcp => {
            let path =
                config.matrix.as_ref().context("--algo ledru needs --matrix FILE")?;
            Ok(ledru_prioritize(&read_matrix_csv(path)?)?)
        }
        Approach::FastPw => {
            let artifacts = resolve_artifacts(config)?;
            Ok(fast_pw(&artifacts, &config.minhash)?)
        }
        Approach::GreedyTotal | Approach::GreedyAdditional => {
            let path = config
                .coverage
                .as_ref()
                .context("the greedy algorithms need --coverage FILE")?;
            let coverage = read_coverage_csv(path)?;
            Ok(if algo == Approach::GreedyTotal {
                greedy_total(&coverage)?
            } else {
                greedy_additional(&coverage)?
            })
        }
        Approach::Random => {
            let ids: Vec<String> = if config.encoded.is_some()
                || config.classes.is_some()
                || config.texts.is_some()
            {
                resolve_artifacts(config)?.into_iter().map(|a| a.id).collect()
            } else if let Some(path) = &config.matrix {
                read_matrix_csv(path)?.ids().to_vec()
            } else if let Some(path) = &config.coverage {
                read_coverage_csv(path)?.ids().to_vec()
            } else {
                bail!("--algo random needs a corpus, matrix, or coverage input for the id list");
            };
            Ok(random_order(&ids, config.seed)?)
        }
    }
}

pub fn evaluate(config: &RunConfig) -> Result<()> {
    let order_path = config.order.as_ref().context("evaluate needs --order FILE")?;
    let raw = fs::read_to_string(order_path)
        .with_context(|| format!("cannot read order file {}", order_path.display()))?;
    let order: Vec<String> = raw.lines().filter(|l| !l.is_empty()).map(str::to_string).collect();

    if config.killmap.is_none() && config.faults.is_none() {
        bail!("evaluate needs --killmap and/or --faults");
    }
    let kills = config.killmap.as_ref().map(|p| read_kill_map_csv(p)).transpose()?;
    let faults = config.faults.as_ref().map(|p| read_fault_map_csv(p)).transpose()?;

    // The prioritisation's run report, when given, supplies the approach
    // label and the timings to carry over.
    let mut approach =
        config.algo.map(|a| a.label().to_string()).unwrap_or_else(|| "unspecified".to_string());
    let mut preparation_seconds = 0.0;
    let mut prioritisation_seconds = 0.0;
    if let Some(path) = &config.report {
        for (key, value) in read_key_values(path)? {
            match key.as_str() {
                "approach" if config.algo.is_none() => approach = value,
                "timing.preparation_seconds" => {
                    preparation_seconds = value.parse().unwrap_or(0.0);
                }
                "timing.prioritisation_seconds" => {
                    prioritisation_seconds = value.parse().unwrap_or(0.0);
                }
                _ => {}
            }
        }
    }

    let evaluation = evaluate_order(
        &approach,
        &order,
        kills.as_ref(),
        faults.as_ref(),
        preparation_seconds,
        prioritisation_seconds,
    )?;

    let mut report = Report::new("evaluate");
    report.put("approach", &evaluation.approach);
    report.put("n", evaluation.n);
    report.put("seed", config.seed);
    match &evaluation.apfd {
        Some(apfd) => {
            report.put("apfd", format!("{:.6}", apfd.value));
            report.put("apfd.killable_mutants", apfd.m);
            report.put("apfd.excluded_unkillable", apfd.excluded_unkillable);
        }
        None if config.killmap.is_some() => {
            eprintln!("warning: kill map contains no killable mutant; APFD omitted");
        }
        None => {}
    }
    for (fault, position) in &evaluation.first_fault_positions {
        let rendered = match position {
            Some(p) => p.to_string(),
            None => "none".to_string(),
        };
        report.put(&format!("position.{fault}"), rendered);
    }
    if let Some(median) = evaluation.median_first_fault {
        report.put("median_first_fault", median);
    }
    report.put_seconds("preparation_seconds", evaluation.preparation_seconds);
    report.put_seconds("prioritisation_seconds", evaluation.prioritisation_seconds);

    match ensure_out_dir(config)? {
        Some(out) => report.write(&out.join("evaluation.txt")),
        None => {
            print!("{}", report.render());
            Ok(())
        }
    }
}

pub fn bench(config: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let corpus = generate(config.count, config.text_len, config.byte_len, config.seed)?;

    // Builds are deterministic, so fast phases are repeated and the minimum
    // single-build time reported; one scheduler stall would otherwise swamp
    // a measurement in the tens of milliseconds.
    let time_matrix = |artifacts: &[EncodedArtifact]| -> Result<f64> {
        let mut best = f64::INFINITY;
        let phase = Instant::now();
        for _ in 0..12 {
            let t = Instant::now();
            build_matrix(artifacts)?;
            best = best.min(t.elapsed().as_secs_f64());
            if phase.elapsed().as_secs_f64() >= 0.5 {
                break;
            }
        }
        Ok(best)
    };
    let text_seconds = time_matrix(&corpus.texts)?;
    let bytecode_seconds = time_matrix(&corpus.bytecode)?;
    let filtered_seconds = time_matrix(&corpus.filtered)?;

    let mean_filtered = corpus.filtered.iter().map(|f| f.len() as f64).sum::<f64>()
        / corpus.filtered.len().max(1) as f64;

    let mut report = Report::new("bench");
    report.put("count", config.count);
    report.put("text_length", config.text_len);
    report.put("bytecode_length", config.byte_len);
    report.put("filtered_mean_length", format!("{mean_filtered:.1}"));
    report.put("seed", config.seed);
    report.put_seconds("text_matrix_seconds", text_seconds);
    report.put_seconds("bytecode_matrix_seconds", bytecode_seconds);
    report.put_seconds("filtered_matrix_seconds", filtered_seconds);
    report.put_timing_derived(
        "text_over_bytecode_ratio",
        format!("{:.2}", text_seconds / bytecode_seconds),
    );
    report.put_timing_derived(
        "bytecode_over_filtered_ratio",
        format!("{:.2}", bytecode_seconds / filtered_seconds),
    );
    report.put_seconds("total_seconds", started.elapsed().as_secs_f64());

    match ensure_out_dir(config)? {
        Some(out) => {
            write_encoded_corpus(&corpus.texts, &out.join("text.corpus"))?;
            write_encoded_corpus(&corpus.bytecode, &out.join("bytecode.corpus"))?;
            write_encoded_corpus(&corpus.filtered, &out.join("bytecode-filtered.corpus"))?;
            report.write(&out.join("report.txt"))
        }
        None => {
            print!("{}", report.render());
            Ok(())
        }
    }
}
