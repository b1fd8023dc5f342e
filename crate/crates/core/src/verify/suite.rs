use std::collections::BTreeMap;

use super::probes::{probe, probe_names, ProbeReport, ProbeSpec, CSV_HEADER};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
struct Overrides {
    trials: Option<usize>,
    seed: Option<u64>,
    n: Option<usize>,
    j: Option<i32>,
    k: Option<i32>,
    sparsity: Option<f64>,
    refine: Option<i32>,
}

/// Parsed suite configuration.
///
/// One `key = value` per line, `#` starts a comment. Global keys are `probes` (`all` or a
/// comma list), `trials`, `seed` and `threads`; per-probe keys are
/// `<probe>.{trials,seed,n,J,K,sparsity,refine}`. An empty file selects no probes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteConfig {
    pub probes: Vec<String>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    overrides: BTreeMap<String, Overrides>,
}

fn parse_val<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config { line, msg: format!("bad value {v:?} for {key}") })
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let known = probe_names();
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, val) = body
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Config { line, msg: format!("expected key = value, got {body:?}") })?;
            match key {
                "probes" => {
                    cfg.probes = if val == "all" {
                        known.iter().map(|s| s.to_string()).collect()
                    } else {
                        val.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(String::from).collect()
                    };
                    if let Some(bad) = cfg.probes.iter().find(|p| !known.contains(&p.as_str())) {
                        return Err(Error::UnknownProbe(bad.clone()));
                    }
                }
                "trials" => cfg.trials = Some(parse_val(line, key, val)?),
                "seed" => cfg.seed = Some(parse_val(line, key, val)?),
                "threads" => cfg.threads = Some(parse_val(line, key, val)?),
                _ => {
                    let (name, field) = key
                        .split_once('.')
                        .ok_or_else(|| Error::Config { line, msg: format!("unknown key {key:?}") })?;
                    if !known.contains(&name) {
                        return Err(Error::UnknownProbe(name.to_string()));
                    }
                    let o = cfg.overrides.entry(name.to_string()).or_default();
                    match field {
                        "trials" => o.trials = Some(parse_val(line, key, val)?),
                        "seed" => o.seed = Some(parse_val(line, key, val)?),
                        "n" => o.n = Some(parse_val(line, key, val)?),
                        "J" => o.j = Some(parse_val(line, key, val)?),
                        "K" => o.k = Some(parse_val(line, key, val)?),
                        "sparsity" => o.sparsity = Some(parse_val(line, key, val)?),
                        "refine" => o.refine = Some(parse_val(line, key, val)?),
                        _ => return Err(Error::Config { line, msg: format!("unknown field {field:?}") }),
                    }
                }
            }
        }
        Ok(cfg)
    }

    /// The fully resolved spec for each selected probe, in order.
    pub fn specs(&self) -> Result<Vec<ProbeSpec>> {
        self.probes
            .iter()
            .map(|name| {
                let mut s = ProbeSpec::default_for(name)?;
                let o = self.overrides.get(name).cloned().unwrap_or_default();
                s.trials = o.trials.or(self.trials).unwrap_or(s.trials);
                s.seed = o.seed.or(self.seed).unwrap_or(s.seed);
                s.gen.n = o.n.unwrap_or(s.gen.n);
                s.gen.j = o.j.unwrap_or(s.gen.j);
                s.gen.k = o.k.unwrap_or(s.gen.k);
                s.gen.sparsity = o.sparsity.unwrap_or(s.gen.sparsity);
                s.refine = o.refine.unwrap_or(s.refine);
                Ok(s)
            })
            .collect()
    }
}

/// Runs every selected probe on a pool of `threads` workers (`None` uses the rayon default).
/// Reports do not depend on the thread count.
pub fn run_suite(cfg: &SuiteConfig, threads: Option<usize>) -> Result<Vec<ProbeReport>> {
    run_specs(&cfg.specs()?, threads.or(cfg.threads))
}

/// Runs the given probes in order on a pool of `threads` workers.
pub fn run_specs(specs: &[ProbeSpec], threads: Option<usize>) -> Result<Vec<ProbeReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    pool.install(|| specs.iter().map(probe).collect())
}

/// CSV with header, one row per report.
pub fn to_csv(reports: &[ProbeReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
