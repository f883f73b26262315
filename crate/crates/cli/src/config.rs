//! Run configuration: suite selection, generator bounds and output path.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Largest step poset the generator may emit.
pub const MAX_POSET_CAP: usize = 5;
pub const MAX_STAGES_CAP: usize = 3;
pub const MAX_RANK_CAP: usize = 3;
pub const UNIVERSE_CAP: usize = 4096;
pub const DRAWS_CAP: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` = {value} is outside 0..={max}")]
    OutOfRange {
        key: String,
        value: usize,
        max: usize,
    },
    #[error("`{key}` must be at least 1")]
    Zero { key: String },
    #[error("`{key}`: `{value}` is not a natural number")]
    NotANumber { key: String, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma1,
    Theorem2,
    ProjectionLemmas,
    Theorem16,
    Corollary15,
    Cifs,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 6] = [
        Suite::Lemma1,
        Suite::Theorem2,
        Suite::ProjectionLemmas,
        Suite::Theorem16,
        Suite::Corollary15,
        Suite::Cifs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Theorem2 => "theorem2",
            Suite::ProjectionLemmas => "projection-lemmas",
            Suite::Theorem16 => "theorem16",
            Suite::Corollary15 => "corollary15",
            Suite::Cifs => "cifs",
            Suite::All => "all",
        }
    }

    /// The concrete suites this selector runs.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::CONCRETE.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Suite, ConfigError> {
        Suite::CONCRETE
            .iter()
            .chain([Suite::All].iter())
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| ConfigError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub suite: Suite,
    /// Largest step poset, in elements.
    pub max_poset: usize,
    pub max_stages: usize,
    /// Rank bound of the name universes.
    pub max_rank: usize,
    /// Largest universe enumerated exhaustively; larger ones are sampled.
    pub cap: usize,
    /// Names sampled per rank above the exhaustive part.
    pub draws: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: Suite::All,
            max_poset: 3,
            max_stages: 2,
            max_rank: 2,
            cap: 300,
            draws: 40,
            seed: 0,
            out: PathBuf::from("forcinglab-report.jsonl"),
        }
    }
}

impl ExperimentConfig {
    /// Checks every bound against its hard cap.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bounds = [
            ("max-poset", self.max_poset, MAX_POSET_CAP),
            ("max-stages", self.max_stages, MAX_STAGES_CAP),
            ("max-rank", self.max_rank, MAX_RANK_CAP),
            ("cap", self.cap, UNIVERSE_CAP),
            ("draws", self.draws, DRAWS_CAP),
        ];
        for (key, value, max) in bounds {
            if value > max {
                return Err(ConfigError::OutOfRange {
                    key: key.into(),
                    value,
                    max,
                });
            }
        }
        for (key, value) in [("max-poset", self.max_poset), ("cap", self.cap)] {
            if value == 0 {
                return Err(ConfigError::Zero { key: key.into() });
            }
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let num = |v: &str| {
            v.parse::<u64>().map_err(|_| ConfigError::NotANumber {
                key: key.into(),
                value: v.into(),
            })
        };
        match key {
            "suite" => self.suite = value.parse()?,
            "max-poset" => self.max_poset = num(value)? as usize,
            "max-stages" => self.max_stages = num(value)? as usize,
            "max-rank" => self.max_rank = num(value)? as usize,
            "cap" => self.cap = num(value)? as usize,
            "draws" => self.draws = num(value)? as usize,
            "seed" => self.seed = num(value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Reads `key = value` lines over the defaults. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut config = ExperimentConfig::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax {
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                ConfigError::Syntax { .. } => e,
                other => ConfigError::Syntax {
                    line: i + 1,
                    message: other.to_string(),
                },
            })?;
        }
        Ok(())
    }

    /// The configuration as `key = value` text that [`ExperimentConfig::parse`]
    /// reads back.
    pub fn to_text(&self) -> String {
        format!(
            "suite = {}\nmax-poset = {}\nmax-stages = {}\nmax-rank = {}\ncap = {}\ndraws = {}\nseed = {}\nout = {}\n",
            self.suite,
            self.max_poset,
            self.max_stages,
            self.max_rank,
            self.cap,
            self.draws,
            self.seed,
            self.out.display()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = ExperimentConfig {
            suite: Suite::ProjectionLemmas,
            seed: 9,
            ..ExperimentConfig::default()
        };
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn comments_and_errors() {
        let c = ExperimentConfig::parse("# sweep\n\nsuite = lemma1\nmax-poset=4\n").unwrap();
        assert_eq!(c.suite, Suite::Lemma1);
        assert_eq!(c.max_poset, 4);
        assert!(matches!(
            ExperimentConfig::parse("suite = nope"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(ExperimentConfig::parse("max-poset").is_err());
        assert!(ExperimentConfig::parse("colour = red").is_err());
    }

    #[test]
    fn caps_are_enforced() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.max_stages = MAX_STAGES_CAP + 1;
        assert!(matches!(c.validate(), Err(ConfigError::OutOfRange { .. })));
    }
}
