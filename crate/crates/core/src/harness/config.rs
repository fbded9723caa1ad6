//! Line-oriented experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! seed = 7
//! out_dir = results
//!
//! [langevin]
//! n-traj = 20000
//! diffusion = 0.25
//! ```
//!
//! Top-level keys are `seed`, `out_dir` and `experiment`. Every section is
//! named after an experiment and holds that experiment's parameters.

use super::{Experiment, HarnessError, Params};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out_dir: Option<String>,
    pub experiment: Option<Experiment>,
    pub sections: BTreeMap<Experiment, Vec<(String, String)>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = ConfigFile::default();
        let mut section: Option<Experiment> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| HarnessError::Config {
                line: no + 1,
                message: msg,
            };
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header {line:?}")))?;
                let exp = Experiment::parse(name.trim()).ok_or_else(|| err(format!("unknown section [{name}]")))?;
                cfg.sections.entry(exp).or_default();
                section = Some(exp);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match section {
                Some(exp) => {
                    // Validate against the experiment's table right away.
                    Params::resolve(exp, [(key, value)]).map_err(|e| err(e.to_string()))?;
                    cfg.sections
                        .entry(exp)
                        .or_default()
                        .push((key.to_string(), value.to_string()));
                }
                None => match key {
                    "seed" => {
                        cfg.seed = Some(value.parse().map_err(|_| err(format!("seed {value:?} is not a u64")))?)
                    }
                    "out_dir" | "out-dir" => cfg.out_dir = Some(value.to_string()),
                    "experiment" => {
                        cfg.experiment =
                            Some(Experiment::parse(value).ok_or_else(|| err(format!("unknown experiment {value:?}")))?)
                    }
                    other => return Err(err(format!("unknown top-level key {other:?}"))),
                },
            }
        }
        Ok(cfg)
    }

    pub fn section(&self, exp: Experiment) -> &[(String, String)] {
        self.sections.get(&exp).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_globals() {
        let cfg = ConfigFile::parse(
            "seed = 9  # trailing\nout_dir = res\n\n[langevin]\nn-traj = 100\n[path-mc]\nhbar=0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.out_dir.as_deref(), Some("res"));
        assert_eq!(cfg.section(Experiment::Langevin), &[("n-traj".to_string(), "100".to_string())]);
        assert_eq!(cfg.section(Experiment::PathMc).len(), 1);
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let e = ConfigFile::parse("[langevin]\n\nfoo = 1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 3") && msg.contains("foo"), "{msg}");
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("[nope]").is_err());
    }
}
