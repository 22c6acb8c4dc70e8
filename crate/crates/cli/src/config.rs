//! Experiment configuration: one TOML file per run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qfe_core::dataset::NormMode;
use qfe_core::downstream::ClassifierKind;
use qfe_core::hamiltonian::Schedule;
use qfe_core::pipeline::{LambdaChoice, PipelineSettings};
use qfe_core::qsim::ShotMode;
use qfe_core::surrogate::{default_lambda_grid, LiftSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Required: every random choice in the pipeline derives from it.
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub dataset: DatasetSection,
    #[serde(default)]
    pub subsample: SubsampleSection,
    #[serde(default)]
    pub hamiltonian: HamiltonianSection,
    #[serde(default)]
    pub quantum: QuantumSection,
    #[serde(default)]
    pub surrogate: SurrogateSection,
    #[serde(default)]
    pub classifier: ClassifierSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("run")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub path: PathBuf,
    #[serde(default = "default_label")]
    pub label_column: String,
    #[serde(default = "default_norm")]
    pub normalization: String,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
}

fn default_label() -> String {
    "label".into()
}
fn default_norm() -> String {
    NormMode::default().as_str().into()
}
fn default_test_fraction() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubsampleSection {
    /// Omit for one fifth of the dataset.
    pub size: Option<usize>,
    pub max_medoid_iters: usize,
}

impl Default for SubsampleSection {
    fn default() -> Self {
        SubsampleSection {
            size: None,
            max_medoid_iters: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HamiltonianSection {
    pub topology: String,
    pub max_locality: usize,
    pub bins: usize,
    pub coupling_strength: f64,
}

impl Default for HamiltonianSection {
    fn default() -> Self {
        HamiltonianSection {
            topology: "line".into(),
            max_locality: 2,
            bins: 4,
            coupling_strength: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumSection {
    pub schedule: String,
    pub total_time: f64,
    pub steps: usize,
    pub counterdiabatic: bool,
    /// Omit for exact expectation values.
    pub shots: Option<u64>,
    /// Shot-sampling seed; defaults to the top-level seed.
    pub shot_seed: Option<u64>,
    pub driver_strength: f64,
}

impl Default for QuantumSection {
    fn default() -> Self {
        let s = Schedule::default();
        QuantumSection {
            schedule: s.kind.as_str().into(),
            total_time: s.total_time,
            steps: s.steps,
            counterdiabatic: true,
            shots: None,
            shot_seed: None,
            driver_strength: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateSection {
    /// Fixed regularization; omit to cross-validate over `lambda_grid`.
    pub lambda: Option<f64>,
    pub lambda_grid: Vec<f64>,
    pub cv_folds: usize,
    pub lift: LiftSection,
}

impl Default for SurrogateSection {
    fn default() -> Self {
        SurrogateSection {
            lambda: None,
            lambda_grid: default_lambda_grid(),
            cv_folds: 5,
            lift: LiftSection::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LiftSection {
    Identity,
    Polynomial {
        degree: usize,
    },
    RandomFourier {
        n_features: usize,
        bandwidth: Option<f64>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub kind: String,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        ClassifierSection {
            kind: ClassifierKind::MultinomialLogistic.as_str().into(),
        }
    }
}

/// A parsed configuration plus the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: PipelineConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config = PipelineConfig::parse(&text).with_context(|| format!("in config {}", path.display()))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig { config, base_dir })
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.base_dir.join(&self.config.dataset.path)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.base_dir.join(&self.config.output_dir)
    }

    /// Checks that need the filesystem.
    pub fn validate_paths(&self) -> Result<()> {
        let p = self.dataset_path();
        if !p.is_file() {
            bail!("dataset.path: {} does not exist", p.display());
        }
        Ok(())
    }
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: PipelineConfig = toml::from_str(text)?;
        config.settings()?;
        Ok(config)
    }

    /// Translate to library settings, reporting every invalid field at once.
    pub fn settings(&self) -> Result<PipelineSettings> {
        let mut problems = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                problems.push(msg);
            }
        };
        let d = &self.dataset;
        check(
            d.test_fraction > 0.0 && d.test_fraction < 1.0,
            format!("dataset.test_fraction: must lie in (0, 1), got {}", d.test_fraction),
        );
        if let Some(size) = self.subsample.size {
            check(size >= 1, "subsample.size: must be at least 1".into());
        }
        let h = &self.hamiltonian;
        check(
            h.max_locality >= 2,
            format!("hamiltonian.max_locality: must be at least 2, got {}", h.max_locality),
        );
        check(
            h.bins >= 2,
            format!("hamiltonian.bins: must be at least 2, got {}", h.bins),
        );
        check(
            h.coupling_strength.is_finite(),
            "hamiltonian.coupling_strength: must be finite".into(),
        );
        let q = &self.quantum;
        check(q.steps >= 1, "quantum.steps: must be at least 1".into());
        check(
            q.total_time > 0.0 && q.total_time.is_finite(),
            format!("quantum.total_time: must be positive, got {}", q.total_time),
        );
        check(
            q.shots != Some(0),
            "quantum.shots: must be at least 1 (omit for exact mode)".into(),
        );
        check(
            q.driver_strength.is_finite(),
            "quantum.driver_strength: must be finite".into(),
        );
        let s = &self.surrogate;
        if let Some(l) = s.lambda {
            check(
                l > 0.0 && l.is_finite(),
                format!("surrogate.lambda: must be positive, got {l}"),
            );
        } else {
            check(
                !s.lambda_grid.is_empty(),
                "surrogate.lambda_grid: must not be empty".into(),
            );
            check(
                s.lambda_grid.iter().all(|l| *l > 0.0 && l.is_finite()),
                "surrogate.lambda_grid: every value must be positive".into(),
            );
            check(
                s.cv_folds >= 2,
                format!("surrogate.cv_folds: must be at least 2, got {}", s.cv_folds),
            );
        }
        match s.lift {
            LiftSection::Polynomial { degree } => check(
                (1..=3).contains(&degree),
                format!("surrogate.lift.degree: must be 1, 2 or 3, got {degree}"),
            ),
            LiftSection::RandomFourier {
                n_features, bandwidth, ..
            } => {
                check(n_features >= 1, "surrogate.lift.n_features: must be at least 1".into());
                if let Some(b) = bandwidth {
                    check(
                        b > 0.0 && b.is_finite(),
                        format!("surrogate.lift.bandwidth: must be positive, got {b}"),
                    );
                }
            }
            LiftSection::Identity => {}
        }

        let norm_mode = field(&d.normalization, "dataset.normalization", &mut problems);
        let topology = field(&h.topology, "hamiltonian.topology", &mut problems);
        let schedule_kind = field(&q.schedule, "quantum.schedule", &mut problems);
        let classifier = field(&self.classifier.kind, "classifier.kind", &mut problems);
        if !problems.is_empty() {
            bail!("invalid configuration:\n  {}", problems.join("\n  "));
        }

        Ok(PipelineSettings {
            norm_mode: norm_mode.unwrap(),
            test_fraction: d.test_fraction,
            subsample_size: self.subsample.size,
            max_medoid_iters: self.subsample.max_medoid_iters,
            topology: topology.unwrap(),
            max_locality: h.max_locality,
            bins: h.bins,
            coupling_strength: h.coupling_strength,
            schedule: Schedule {
                kind: schedule_kind.unwrap(),
                total_time: q.total_time,
                steps: q.steps,
            },
            cd_enabled: q.counterdiabatic,
            shots: q.shots.map_or(ShotMode::Exact, ShotMode::Shots),
            shot_seed: q.shot_seed,
            driver_strength: q.driver_strength,
            lambda: match s.lambda {
                Some(l) => LambdaChoice::Fixed(l),
                None => LambdaChoice::CrossValidated {
                    grid: s.lambda_grid.clone(),
                    folds: s.cv_folds,
                },
            },
            lift: match s.lift {
                LiftSection::Identity => LiftSpec::Identity,
                LiftSection::Polynomial { degree } => LiftSpec::Polynomial { degree },
                LiftSection::RandomFourier {
                    n_features,
                    bandwidth,
                    seed,
                } => LiftSpec::RandomFourier {
                    n_features,
                    bandwidth,
                    seed: seed.unwrap_or(self.seed),
                },
            },
            classifier: classifier.unwrap(),
            seed: self.seed,
        })
    }
}

fn field<T>(value: &str, name: &str, problems: &mut Vec<String>) -> Option<T>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| problems.push(format!("{name}: {e}"))).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "seed = 3\n[dataset]\npath = \"d.csv\"\n";

    #[test]
    fn defaults_fill_missing_sections() {
        let c = PipelineConfig::parse(MINIMAL).unwrap();
        let s = c.settings().unwrap();
        assert_eq!(s.seed, 3);
        assert_eq!(s.schedule, Schedule::default());
        assert_eq!(s.lift, LiftSpec::Identity);
        assert!(matches!(s.lambda, LambdaChoice::CrossValidated { folds: 5, .. }));
        assert_eq!(c.output_dir, PathBuf::from("run"));
    }

    #[test]
    fn seed_is_mandatory() {
        let err = PipelineConfig::parse("[dataset]\npath = \"d.csv\"\n").unwrap_err();
        assert!(format!("{err:#}").contains("seed"));
    }

    #[test]
    fn every_bad_field_is_reported() {
        let text = format!(
            "{MINIMAL}[quantum]\nsteps = 0\nschedule = \"cubic\"\n[surrogate]\nlambda = -1.0\n[surrogate.lift]\nkind = \"polynomial\"\ndegree = 7\n"
        );
        let msg = format!("{:#}", PipelineConfig::parse(&text).unwrap_err());
        for f in [
            "quantum.steps",
            "quantum.schedule",
            "surrogate.lambda",
            "surrogate.lift.degree",
        ] {
            assert!(msg.contains(f), "{msg}");
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}[quantum]\nstepz = 4\n");
        assert!(PipelineConfig::parse(&text).is_err());
    }

    #[test]
    fn lift_sections_parse() {
        let text = format!("{MINIMAL}[surrogate.lift]\nkind = \"random-fourier\"\nn_features = 64\n");
        let s = PipelineConfig::parse(&text).unwrap().settings().unwrap();
        assert_eq!(
            s.lift,
            LiftSpec::RandomFourier {
                n_features: 64,
                bandwidth: None,
                seed: 3
            }
        );
    }
}
