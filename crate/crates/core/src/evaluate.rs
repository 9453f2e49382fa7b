//! Ordering quality metrics and statistical comparisons.
//!
//! APFD (average percentage of faults detected) over a kill map, first
//! fault-revealing positions over a map of real faults, and two
//! nonparametric comparisons for sets of scores: the Vargha-Delaney A12
//! effect size and the Mann-Whitney U test with midranks, tie-corrected
//! variance, and a continuity-corrected normal approximation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvaluateError {
    #[error("sample is empty")]
    EmptySample,
    #[error("no killable faults: every mutant's killer set is empty")]
    NoKillableFaults,
    #[error("test {id} appears in the map but not in the ordering")]
    UnknownTestId { id: String },
    #[error("duplicate identifier {id}")]
    DuplicateId { id: String },
    #[error("{path}:{line}: malformed row: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Mutant identifier to the set of tests that kill it. Unkillable mutants
/// (empty sets) stay in the map; APFD excludes them from the fault count.
pub type KillMap = BTreeMap<String, BTreeSet<String>>;

/// Fault identifier to the set of tests that reveal it.
pub type FaultRevealMap = BTreeMap<String, BTreeSet<String>>;

/// Parses rows of the form `key,test1;test2;...` (no header; an empty test
/// field means an empty set). Used for both kill maps and fault maps.
fn read_id_set_csv(path: &Path) -> Result<BTreeMap<String, BTreeSet<String>>, EvaluateError> {
    let raw = fs::read_to_string(path)
        .map_err(|source| EvaluateError::Io { path: path.to_path_buf(), source })?;
    let mut map = BTreeMap::new();
    for (number, line) in raw.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let malformed = |reason: &str| EvaluateError::Malformed {
            path: path.to_path_buf(),
            line: number + 1,
            reason: reason.to_string(),
        };
        let (id, tests) = line.split_once(',').ok_or_else(|| malformed("missing ','"))?;
        if id.is_empty() {
            return Err(malformed("empty identifier"));
        }
        let set: BTreeSet<String> =
            tests.split(';').filter(|t| !t.is_empty()).map(str::to_string).collect();
        if map.insert(id.to_string(), set).is_some() {
            return Err(EvaluateError::DuplicateId { id: id.to_string() });
        }
    }
    Ok(map)
}

pub fn read_kill_map_csv(path: &Path) -> Result<KillMap, EvaluateError> {
    read_id_set_csv(path)
}

pub fn read_fault_map_csv(path: &Path) -> Result<FaultRevealMap, EvaluateError> {
    read_id_set_csv(path)
}

/// APFD of one ordering, with the counts that went into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Apfd {
    pub value: f64,
    /// Suite size n.
    pub n: usize,
    /// Killable fault count m.
    pub m: usize,
    /// Mutants dropped because nothing kills them.
    pub excluded_unkillable: usize,
}

fn position_map(order: &[String]) -> Result<HashMap<&str, usize>, EvaluateError> {
    let mut positions = HashMap::with_capacity(order.len());
    for (i, id) in order.iter().enumerate() {
        if positions.insert(id.as_str(), i + 1).is_some() {
            return Err(EvaluateError::DuplicateId { id: id.clone() });
        }
    }
    Ok(positions)
}

/// Average percentage of faults detected:
/// `1 − (Σ TF_i) / (n·m) + 1/(2n)`, where `TF_i` is the 1-based position
/// in `order` of the earliest test killing mutant `i`. Mutants nothing
/// kills are excluded from `m`; a killer test missing from `order` is an
/// error.
pub fn apfd(order: &[String], kills: &KillMap) -> Result<Apfd, EvaluateError> {
    if order.is_empty() {
        return Err(EvaluateError::EmptySample);
    }
    let positions = position_map(order)?;
    let n = order.len();
    let mut excluded_unkillable = 0usize;
    let mut tf_sum = 0usize;
    let mut m = 0usize;
    for killers in kills.values() {
        if killers.is_empty() {
            excluded_unkillable += 1;
            continue;
        }
        let mut first = usize::MAX;
        for killer in killers {
            let position = positions
                .get(killer.as_str())
                .ok_or_else(|| EvaluateError::UnknownTestId { id: killer.clone() })?;
            first = first.min(*position);
        }
        tf_sum += first;
        m += 1;
    }
    if m == 0 {
        return Err(EvaluateError::NoKillableFaults);
    }
    let value = 1.0 - tf_sum as f64 / (n as f64 * m as f64) + 1.0 / (2.0 * n as f64);
    Ok(Apfd { value, n, m, excluded_unkillable })
}

/// For each fault, the 1-based position of the first revealing test, or
/// `None` when no test in the ordering reveals it (the revealing set is
/// empty or entirely outside the suite).
pub fn first_fault_position(
    order: &[String],
    faults: &FaultRevealMap,
) -> BTreeMap<String, Option<usize>> {
    let mut positions = HashMap::with_capacity(order.len());
    for (i, id) in order.iter().enumerate() {
        positions.entry(id.as_str()).or_insert(i + 1);
    }
    faults
        .iter()
        .map(|(fault, revealers)| {
            let first = revealers.iter().filter_map(|t| positions.get(t.as_str())).min().copied();
            (fault.clone(), first)
        })
        .collect()
}

/// Median of the detected positions (even counts average the middle pair);
/// `None` when nothing was detected.
pub fn median_position(positions: &BTreeMap<String, Option<usize>>) -> Option<f64> {
    let mut detected: Vec<usize> = positions.values().filter_map(|p| *p).collect();
    if detected.is_empty() {
        return None;
    }
    detected.sort_unstable();
    let mid = detected.len() / 2;
    Some(if detected.len() % 2 == 1 {
        detected[mid] as f64
    } else {
        (detected[mid - 1] + detected[mid]) as f64 / 2.0
    })
}

/// Vargha-Delaney effect size: the probability that a random draw from `x`
/// exceeds one from `y`, counting ties as half.
pub fn a12(x: &[f64], y: &[f64]) -> Result<f64, EvaluateError> {
    if x.is_empty() || y.is_empty() {
        return Err(EvaluateError::EmptySample);
    }
    let mut favourable = 0.0f64;
    for &a in x {
        for &b in y {
            if a > b {
                favourable += 1.0;
            } else if a == b {
                favourable += 0.5;
            }
        }
    }
    Ok(favourable / (x.len() as f64 * y.len() as f64))
}

/// Mann-Whitney U outcome for the first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MannWhitney {
    /// U statistic of the first sample (midranks for ties).
    pub u: f64,
    /// Two-sided p from the tie-corrected normal approximation with
    /// continuity correction; exactly 1 when the variance degenerates
    /// (all observations identical).
    pub p_value: f64,
}

/// Rank-sum Mann-Whitney U test, two-sided.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<MannWhitney, EvaluateError> {
    if x.is_empty() || y.is_empty() {
        return Err(EvaluateError::EmptySample);
    }
    let nx = x.len() as f64;
    let ny = y.len() as f64;
    let total = nx + ny;

    let mut combined: Vec<(f64, bool)> = x
        .iter()
        .map(|&v| (v, true))
        .chain(y.iter().map(|&v| (v, false)))
        .collect();
    combined.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rank_sum_x = 0.0f64;
    let mut tie_term = 0.0f64; // Σ (t³ − t) over tie groups
    let mut i = 0;
    while i < combined.len() {
        let mut j = i;
        while j < combined.len() && combined[j].0 == combined[i].0 {
            j += 1;
        }
        let run = (j - i) as f64;
        let midrank = (i + j + 1) as f64 / 2.0; // mean of ranks i+1 ..= j
        for entry in &combined[i..j] {
            if entry.1 {
                rank_sum_x += midrank;
            }
        }
        tie_term += run * run * run - run;
        i = j;
    }

    let u = rank_sum_x - nx * (nx + 1.0) / 2.0;
    let mean = nx * ny / 2.0;
    let variance = nx * ny / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if variance <= 0.0 {
        return Ok(MannWhitney { u, p_value: 1.0 });
    }
    let delta = u - mean;
    // Continuity correction: pull the statistic half a step toward the mean.
    let corrected = if delta > 0.0 {
        delta - 0.5
    } else if delta < 0.0 {
        delta + 0.5
    } else {
        0.0
    };
    let z = corrected / variance.sqrt();
    let p = erfc(z.abs() / std::f64::consts::SQRT_2);
    Ok(MannWhitney { u, p_value: p.clamp(0.0, 1.0) })
}

/// Complementary error function, rational approximation good to ~1.2e-7
/// everywhere — ample for reporting approximate significance levels.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98
                                    + t * (1.488_515_87
                                        + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Everything the evaluation stage reports about one ordering.
#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub approach: String,
    /// `None` when no kill map was supplied or no mutant was killable.
    pub apfd: Option<Apfd>,
    pub first_fault_positions: BTreeMap<String, Option<usize>>,
    pub median_first_fault: Option<f64>,
    pub preparation_seconds: f64,
    pub prioritisation_seconds: f64,
    /// Suite size.
    pub n: usize,
}

/// Scores `order` against whichever maps are present. A kill map with no
/// killable mutant yields `apfd: None` rather than an error; a killer test
/// missing from the ordering is still an error.
pub fn evaluate_order(
    approach: &str,
    order: &[String],
    kills: Option<&KillMap>,
    faults: Option<&FaultRevealMap>,
    preparation_seconds: f64,
    prioritisation_seconds: f64,
) -> Result<EvaluationReport, EvaluateError> {
    if order.is_empty() {
        return Err(EvaluateError::EmptySample);
    }
    let apfd_result = match kills {
        Some(map) => match apfd(order, map) {
            Ok(result) => Some(result),
            Err(EvaluateError::NoKillableFaults) => None,
            Err(other) => return Err(other),
        },
        None => None,
    };
    let first_fault_positions = match faults {
        Some(map) => first_fault_position(order, map),
        None => BTreeMap::new(),
    };
    let median_first_fault = median_position(&first_fault_positions);
    Ok(EvaluationReport {
        approach: approach.to_string(),
        apfd: apfd_result,
        first_fault_positions,
        median_first_fault,
        preparation_seconds,
        prioritisation_seconds,
        n: order.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(ids: &[&str]) -> Vec<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn apfd_worked_example() {
        // n = 5, faults first detected at positions 1 and 3:
        // 1 − 4/10 + 1/10 = 0.7.
        let order = order(&["t1", "t2", "t3", "t4", "t5"]);
        let mut kills = KillMap::new();
        kills.insert("m1".into(), set(&["t1", "t4"]));
        kills.insert("m2".into(), set(&["t3"]));
        let result = apfd(&order, &kills).unwrap();
        assert!((result.value - 0.7).abs() < 1e-12);
        assert_eq!((result.n, result.m, result.excluded_unkillable), (5, 2, 0));
    }

    #[test]
    fn apfd_extremes() {
        let order = order(&["a", "b", "c", "d"]);
        let mut first = KillMap::new();
        first.insert("m1".into(), set(&["a"]));
        first.insert("m2".into(), set(&["a", "c"]));
        let hi = apfd(&order, &first).unwrap().value;
        assert!((hi - (1.0 - 1.0 / 8.0)).abs() < 1e-12);
        let mut last = KillMap::new();
        last.insert("m1".into(), set(&["d"]));
        let lo = apfd(&order, &last).unwrap().value;
        assert!((lo - 1.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn apfd_excludes_unkillable_mutants() {
        let order = order(&["a", "b"]);
        let mut kills = KillMap::new();
        kills.insert("dead".into(), BTreeSet::new());
        kills.insert("live".into(), set(&["b"]));
        let result = apfd(&order, &kills).unwrap();
        assert_eq!(result.m, 1);
        assert_eq!(result.excluded_unkillable, 1);
        // TF = 2, n = 2: 1 − 2/2 + 1/4 = 0.25.
        assert!((result.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn apfd_error_cases() {
        let order = order(&["a"]);
        let mut unknown = KillMap::new();
        unknown.insert("m".into(), set(&["ghost"]));
        assert!(matches!(apfd(&order, &unknown), Err(EvaluateError::UnknownTestId { .. })));
        let mut hopeless = KillMap::new();
        hopeless.insert("m".into(), BTreeSet::new());
        assert!(matches!(apfd(&order, &hopeless), Err(EvaluateError::NoKillableFaults)));
        assert!(matches!(apfd(&order, &KillMap::new()), Err(EvaluateError::NoKillableFaults)));
        assert!(matches!(
            apfd(&[], &KillMap::new()),
            Err(EvaluateError::EmptySample)
        ));
    }

    #[test]
    fn apfd_improves_when_a_fault_is_found_earlier() {
        let mut kills = KillMap::new();
        kills.insert("m".into(), set(&["x"]));
        let early = apfd(&order(&["x", "a", "b"]), &kills).unwrap().value;
        let late = apfd(&order(&["a", "b", "x"]), &kills).unwrap().value;
        assert!(early > late);
    }

    #[test]
    fn first_positions_and_median() {
        let order = order(&["a", "b", "c", "d"]);
        let mut faults = FaultRevealMap::new();
        faults.insert("f1".into(), set(&["a"]));
        faults.insert("f2".into(), set(&["d", "c"]));
        faults.insert("f3".into(), BTreeSet::new());
        faults.insert("f4".into(), set(&["ghost"]));
        let positions = first_fault_position(&order, &faults);
        assert_eq!(positions["f1"], Some(1));
        assert_eq!(positions["f2"], Some(3));
        assert_eq!(positions["f3"], None);
        assert_eq!(positions["f4"], None);
        assert_eq!(median_position(&positions), Some(2.0));
        let nothing = first_fault_position(&order, &FaultRevealMap::new());
        assert_eq!(median_position(&nothing), None);
    }

    #[test]
    fn a12_worked_values() {
        assert_eq!(a12(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.5);
        assert_eq!(a12(&[5.0, 6.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(a12(&[1.0, 2.0], &[2.0, 3.0]).unwrap(), 0.125);
        assert!(matches!(a12(&[], &[1.0]), Err(EvaluateError::EmptySample)));
    }

    #[test]
    fn a12_complement_identity_without_ties() {
        let x = [0.3, 1.7, 2.2, 9.1];
        let y = [0.1, 1.9, 5.5];
        let forward = a12(&x, &y).unwrap();
        let backward = a12(&y, &x).unwrap();
        assert!((forward + backward - 1.0).abs() < 1e-12);
    }

    #[test]
    fn u_statistic_worked_values() {
        let separated = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(separated.u, 0.0);
        assert!(separated.p_value > 0.0 && separated.p_value < 0.12);

        let identical = mann_whitney_u(&[2.0, 2.0], &[2.0, 2.0]).unwrap();
        assert_eq!(identical.u, 2.0); // nx·ny/2 via midranks
        assert_eq!(identical.p_value, 1.0); // fully tied → degenerate variance

        assert!(matches!(mann_whitney_u(&[], &[1.0]), Err(EvaluateError::EmptySample)));
    }

    #[test]
    fn u_statistic_matches_pair_counting() {
        // xorshift-style generator; no external randomness in tests.
        let mut state = 0x1234_5678_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 13) as f64 / 2.0
        };
        for _ in 0..50 {
            let x: Vec<f64> = (0..6).map(|_| next()).collect();
            let y: Vec<f64> = (0..9).map(|_| next()).collect();
            let from_ranks = mann_whitney_u(&x, &y).unwrap().u;
            let mut pairs = 0.0;
            for &a in &x {
                for &b in &y {
                    if a > b {
                        pairs += 1.0;
                    } else if a == b {
                        pairs += 0.5;
                    }
                }
            }
            assert!((from_ranks - pairs).abs() < 1e-9, "{from_ranks} vs {pairs}");
        }
    }

    #[test]
    fn erfc_reference_points() {
        assert!((erfc(0.0) - 1.0).abs() < 1e-7);
        assert!(erfc(4.0) < 1e-7);
        assert!((erfc(-1.0) + erfc(1.0) - 2.0).abs() < 1e-7);
        // erfc(1/√2) leaves the two-sided tail of z = 1: ≈ 0.3173.
        assert!((erfc(1.0 / std::f64::consts::SQRT_2) - 0.317_31).abs() < 1e-4);
    }

    #[test]
    fn map_files_parse_and_validate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kills.csv");
        fs::write(&path, "m1,t1;t2\nm2,\nm3,t3\n").unwrap();
        let kills = read_kill_map_csv(&path).unwrap();
        assert_eq!(kills.len(), 3);
        assert!(kills["m2"].is_empty());
        assert_eq!(kills["m1"], set(&["t1", "t2"]));

        fs::write(&path, "no-separator\n").unwrap();
        assert!(matches!(read_kill_map_csv(&path), Err(EvaluateError::Malformed { .. })));
        fs::write(&path, "m1,a\nm1,b\n").unwrap();
        assert!(matches!(read_kill_map_csv(&path), Err(EvaluateError::DuplicateId { .. })));
    }

    #[test]
    fn report_assembly_handles_missing_maps() {
        let ids = order(&["a", "b", "c"]);
        let mut kills = KillMap::new();
        kills.insert("m".into(), set(&["b"]));
        let mut faults = FaultRevealMap::new();
        faults.insert("f".into(), set(&["c"]));
        let full =
            evaluate_order("ledru", &ids, Some(&kills), Some(&faults), 1.5, 0.25).unwrap();
        assert!(full.apfd.is_some());
        assert_eq!(full.first_fault_positions["f"], Some(3));
        assert_eq!(full.median_first_fault, Some(3.0));
        assert_eq!(full.n, 3);
        assert_eq!(full.preparation_seconds, 1.5);

        // An all-unkillable kill map downgrades APFD to absent, keeping
        // fault positions.
        let mut dead = KillMap::new();
        dead.insert("m".into(), BTreeSet::new());
        let partial = evaluate_order("ledru", &ids, Some(&dead), Some(&faults), 0.0, 0.0).unwrap();
        assert!(partial.apfd.is_none());
        assert_eq!(partial.first_fault_positions.len(), 1);

        let bare = evaluate_order("random", &ids, None, None, 0.0, 0.0).unwrap();
        assert!(bare.apfd.is_none());
        assert!(bare.first_fault_positions.is_empty());
        assert_eq!(bare.median_first_fault, None);
    }
}
