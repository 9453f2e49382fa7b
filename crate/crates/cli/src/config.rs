//! Flag handling: raw command-line arguments, the optional `key = value`
//! configuration file, and the resolved [`RunConfig`] commands consume.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use tcpdiv_core::corpus::{EncodingMode, FilterSet};
use tcpdiv_core::lsh::MinHashParams;
use tcpdiv_core::prioritize::Approach;

#[derive(clap::Args, Debug, Default, Clone)]
pub struct RawArgs {
    /// Configuration file with `key = value` lines (keys named like the
    /// long flags); values here fill in flags not given on the command line.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory searched recursively for .class files.
    #[arg(long, value_name = "DIR")]
    pub classes: Option<PathBuf>,
    /// Text corpus file: one `id<TAB>escaped-source` record per line.
    #[arg(long, value_name = "FILE")]
    pub texts: Option<PathBuf>,
    /// Previously extracted encoded corpus file.
    #[arg(long, value_name = "FILE")]
    pub encoded: Option<PathBuf>,
    /// What each bytecode token keeps [default: opcode-imm].
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Instruction filter applied before encoding [default: off].
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
    /// Prioritisation algorithm.
    #[arg(long, value_enum)]
    pub algo: Option<AlgoArg>,
    /// Distance matrix CSV (input for ledru and random).
    #[arg(long, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// Coverage CSV `test_id,e1;e2;...` (input for the greedy algorithms).
    #[arg(long, value_name = "FILE")]
    pub coverage: Option<PathBuf>,
    /// Kill map CSV `mutant_id,test1;test2;...`.
    #[arg(long, value_name = "FILE")]
    pub killmap: Option<PathBuf>,
    /// Fault map CSV `fault_id,test1;test2;...`.
    #[arg(long, value_name = "FILE")]
    pub faults: Option<PathBuf>,
    /// Order file to evaluate: one test identifier per line.
    #[arg(long, value_name = "FILE")]
    pub order: Option<PathBuf>,
    /// Run report of the prioritisation being evaluated; its approach and
    /// timing keys are copied into the evaluation report.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Seed for every randomised component [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// MinHash signature width [default: 256].
    #[arg(long)]
    pub hashes: Option<usize>,
    /// LSH band count; bands * rows must equal hashes [default: 32].
    #[arg(long)]
    pub bands: Option<usize>,
    /// Rows per LSH band [default: 8].
    #[arg(long)]
    pub rows: Option<usize>,
    /// Shingle window length in tokens [default: 5].
    #[arg(long)]
    pub shingle: Option<usize>,
    /// Worker threads for matrix construction [default: all cores].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory; without it the primary artefact goes to stdout.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Synthetic corpus size for bench [default: 500].
    #[arg(long)]
    pub count: Option<usize>,
    /// Synthetic text length in characters for bench [default: 700].
    #[arg(long)]
    pub text_len: Option<usize>,
    /// Synthetic bytecode length in opcodes for bench [default: 40].
    #[arg(long)]
    pub byte_len: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    /// One token per instruction: the opcode byte.
    OpcodeOnly,
    /// Opcode plus immediate operand bytes (never constant-pool indices).
    OpcodeImm,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterArg {
    /// Keep every instruction.
    Off,
    /// Constant pushes, field access, and invocations.
    Semantic,
    /// Inline constant pushes, field access, invocations, dup, and return.
    Figure3,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoArg {
    /// Farthest-first traversal of a distance matrix.
    Ledru,
    /// MinHash/LSH pairwise diversity.
    FastPw,
    /// Descending total coverage.
    GreedyTotal,
    /// Maximum additional coverage with stacking reset.
    GreedyAdditional,
    /// Seeded random shuffle.
    Random,
}

impl AlgoArg {
    fn approach(self) -> Approach {
        match self {
            AlgoArg::Ledru => Approach::LedruTcp,
            AlgoArg::FastPw => Approach::FastPw,
            AlgoArg::GreedyTotal => Approach::GreedyTotal,
            AlgoArg::GreedyAdditional => Approach::GreedyAdditional,
            AlgoArg::Random => Approach::Random,
        }
    }
}

/// Everything a command needs, with defaults applied and the configuration
/// file merged in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub classes: Option<PathBuf>,
    pub texts: Option<PathBuf>,
    pub encoded: Option<PathBuf>,
    pub mode: EncodingMode,
    pub filter: Option<FilterSet>,
    pub algo: Option<Approach>,
    pub matrix: Option<PathBuf>,
    pub coverage: Option<PathBuf>,
    pub killmap: Option<PathBuf>,
    pub faults: Option<PathBuf>,
    pub order: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub minhash: MinHashParams,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub count: usize,
    pub text_len: usize,
    pub byte_len: usize,
}

impl RunConfig {
    pub fn resolve(mut raw: RawArgs) -> Result<Self> {
        apply_config_file(&mut raw)?;

        let seed = raw.seed.unwrap_or(1);
        let minhash = MinHashParams {
            num_hashes: raw.hashes.unwrap_or(256),
            shingle_k: raw.shingle.unwrap_or(5),
            bands: raw.bands.unwrap_or(32),
            rows: raw.rows.unwrap_or(8),
            seed,
        };
        minhash.validate().context("invalid MinHash parameters")?;

        let config = RunConfig {
            classes: raw.classes,
            texts: raw.texts,
            encoded: raw.encoded,
            mode: match raw.mode.unwrap_or(ModeArg::OpcodeImm) {
                ModeArg::OpcodeOnly => EncodingMode::OpcodeOnly,
                ModeArg::OpcodeImm => EncodingMode::OpcodeImm,
            },
            filter: match raw.filter.unwrap_or(FilterArg::Off) {
                FilterArg::Off => None,
                FilterArg::Semantic => Some(FilterSet::Semantic),
                FilterArg::Figure3 => Some(FilterSet::Figure3),
            },
            algo: raw.algo.map(AlgoArg::approach),
            matrix: raw.matrix,
            coverage: raw.coverage,
            killmap: raw.killmap,
            faults: raw.faults,
            order: raw.order,
            report: raw.report,
            minhash,
            seed,
            threads: raw.threads,
            out: raw.out,
            count: raw.count.unwrap_or(500),
            text_len: raw.text_len.unwrap_or(700),
            byte_len: raw.byte_len.unwrap_or(40),
        };
        config.check_input_paths()?;
        Ok(config)
    }

    /// Every referenced input must exist before any work starts.
    fn check_input_paths(&self) -> Result<()> {
        let inputs: [(&str, &Option<PathBuf>); 8] = [
            ("--classes", &self.classes),
            ("--texts", &self.texts),
            ("--encoded", &self.encoded),
            ("--matrix", &self.matrix),
            ("--coverage", &self.coverage),
            ("--killmap", &self.killmap),
            ("--faults", &self.faults),
            ("--order", &self.order),
        ];
        for (flag, path) in inputs {
            if let Some(path) = path {
                if !path.exists() {
                    bail!("{flag} path does not exist: {}", path.display());
                }
            }
        }
        if let Some(path) = &self.report {
            if !path.exists() {
                bail!("--report path does not exist: {}", path.display());
            }
        }
        Ok(())
    }
}

/// Fills empty `raw` slots from the configuration file, if one was given.
/// Unknown and duplicate keys are errors; values use the same spellings as
/// the command line.
fn apply_config_file(raw: &mut RawArgs) -> Result<()> {
    let Some(path) = raw.config.clone() else {
        return Ok(());
    };
    let text = fs::read_to_string(&path)
        .with_context(|| format!("cannot read configuration file {}", path.display()))?;
    let mut seen: HashSet<String> = HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |reason: String| format!("{}:{}: {reason}", path.display(), lineno + 1);
        let (key, value) = line
            .split_once('=')
            .with_context(|| at("expected `key = value`".to_string()))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            bail!("{}", at(format!("duplicate key `{key}`")));
        }
        set_key(raw, key, value).with_context(|| at(format!("key `{key}`")))?;
    }
    Ok(())
}

fn parse_enum<T: ValueEnum>(value: &str) -> Result<T> {
    T::from_str(value, false).map_err(|e| anyhow::anyhow!("{e}"))
}

fn set_key(raw: &mut RawArgs, key: &str, value: &str) -> Result<()> {
    fn fill_path(slot: &mut Option<PathBuf>, value: &str) {
        slot.get_or_insert_with(|| PathBuf::from(value));
    }
    fn fill_usize(slot: &mut Option<usize>, value: &str) -> Result<()> {
        if slot.is_none() {
            *slot = Some(value.parse().context("expected a non-negative integer")?);
        }
        Ok(())
    }
    match key {
        "classes" => fill_path(&mut raw.classes, value),
        "texts" => fill_path(&mut raw.texts, value),
        "encoded" => fill_path(&mut raw.encoded, value),
        "matrix" => fill_path(&mut raw.matrix, value),
        "coverage" => fill_path(&mut raw.coverage, value),
        "killmap" => fill_path(&mut raw.killmap, value),
        "faults" => fill_path(&mut raw.faults, value),
        "order" => fill_path(&mut raw.order, value),
        "report" => fill_path(&mut raw.report, value),
        "out" => fill_path(&mut raw.out, value),
        "mode" => {
            if raw.mode.is_none() {
                raw.mode = Some(parse_enum(value)?);
            }
        }
        "filter" => {
            if raw.filter.is_none() {
                raw.filter = Some(parse_enum(value)?);
            }
        }
        "algo" => {
            if raw.algo.is_none() {
                raw.algo = Some(parse_enum(value)?);
            }
        }
        "seed" => {
            if raw.seed.is_none() {
                raw.seed = Some(value.parse().context("expected a non-negative integer")?);
            }
        }
        "hashes" => fill_usize(&mut raw.hashes, value)?,
        "bands" => fill_usize(&mut raw.bands, value)?,
        "rows" => fill_usize(&mut raw.rows, value)?,
        "shingle" => fill_usize(&mut raw.shingle, value)?,
        "threads" => fill_usize(&mut raw.threads, value)?,
        "count" => fill_usize(&mut raw.count, value)?,
        "text-len" => fill_usize(&mut raw.text_len, value)?,
        "byte-len" => fill_usize(&mut raw.byte_len, value)?,
        other => bail!("unknown configuration key `{other}`"),
    }
    Ok(())
}

/// Creates the output directory if configured and returns it.
pub fn ensure_out_dir(config: &RunConfig) -> Result<Option<&Path>> {
    match &config.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("cannot create output directory {}", dir.display()))?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}
