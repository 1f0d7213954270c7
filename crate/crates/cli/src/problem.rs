//! Problem files: a JSON document describing either an explicit system or a
//! named scenario. Complex entries are `[re, im]` pairs (plain numbers are
//! accepted as real), matrices are row-major nested arrays.

use ejof_core::effective::Perturbation;
use ejof_core::lindblad::StructuredLindbladian;
use ejof_core::operator::{c64, zeros, DEFAULT_TOL};
use ejof_core::{DfsProjector, Operator};
use serde::Deserialize;

use crate::error::CliError;
use crate::scenario::{Scenario, ScenarioParams};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type Matrix = Vec<Vec<Entry>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DfsSpec {
    Indices(Vec<usize>),
    Projector { projector: Matrix },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub v: Option<Matrix>,
    pub f: Option<Vec<Matrix>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Structural validation.
    pub structure: Option<f64>,
    /// Dual-route agreement.
    pub equivalence: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub hilbert_dim: Option<usize>,
    pub dfs: Option<DfsSpec>,
    pub hamiltonian: Option<Matrix>,
    pub jumps: Option<Vec<Matrix>>,
    pub perturbation: Option<PerturbationSpec>,
    pub scenario: Option<ScenarioParams>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

/// Parsed and dimension-checked problem.
pub struct Problem {
    pub file: ProblemFile,
    pub system: System,
}

pub enum System {
    Explicit {
        l: StructuredLindbladian,
        pert: Perturbation,
    },
    Named(Scenario),
}

impl Problem {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Input(format!(
                "parse error at line {} column {} (key '{}'): {}",
                inner.line(),
                inner.column(),
                path,
                inner
            ))
        })?;
        if file.version != FORMAT_VERSION {
            return Err(CliError::Input(format!(
                "version: unsupported format version {} (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        let explicit = file.hilbert_dim.is_some()
            || file.dfs.is_some()
            || file.hamiltonian.is_some()
            || file.jumps.is_some()
            || file.perturbation.is_some();
        let system = match (explicit, &file.scenario) {
            (true, Some(_)) => {
                return Err(CliError::Input(
                    "scenario: give either an explicit system or a named scenario, not both".into(),
                ))
            }
            (false, None) => {
                return Err(CliError::Input(
                    "file describes neither an explicit system nor a named scenario".into(),
                ))
            }
            (false, Some(params)) => {
                let scenario = Scenario::from_params(params, file.seed.unwrap_or(0))
                    .map_err(|e| CliError::Input(format!("scenario: {e}")))?;
                System::Named(scenario)
            }
            (true, None) => explicit_system(&file)?,
        };
        Ok(Self { file, system })
    }

    pub fn structure_tol(&self) -> f64 {
        self.file.tolerances.structure.unwrap_or(DEFAULT_TOL)
    }

    pub fn equivalence_tol(&self) -> Option<f64> {
        self.file.tolerances.equivalence
    }

    /// The system and perturbation; named scenarios are built on demand.
    pub fn build(&self) -> Result<(StructuredLindbladian, Perturbation), CliError> {
        match &self.system {
            System::Explicit { l, pert } => Ok((l.clone(), pert.clone())),
            System::Named(s) => Ok(s.build()?.into_system()),
        }
    }
}

fn explicit_system(file: &ProblemFile) -> Result<System, CliError> {
    let dim = file
        .hilbert_dim
        .ok_or_else(|| CliError::Input("hilbert_dim: missing".into()))?;
    if dim == 0 {
        return Err(CliError::Input("hilbert_dim: must be positive".into()));
    }
    let dfs = match &file.dfs {
        None => return Err(CliError::Input("dfs: missing".into())),
        Some(DfsSpec::Indices(idx)) => DfsProjector::from_indices(dim, idx)
            .map_err(|e| CliError::Input(format!("dfs: {e}")))?,
        Some(DfsSpec::Projector { projector }) => {
            let p = to_operator(projector, dim, "dfs.projector")?;
            DfsProjector::from_matrix(&p, DEFAULT_TOL)
                .map_err(|e| CliError::Input(format!("dfs.projector: {e}")))?
        }
    };
    let h = match &file.hamiltonian {
        Some(m) => to_operator(m, dim, "hamiltonian")?,
        None => zeros(dim),
    };
    let jumps = file
        .jumps
        .as_deref()
        .unwrap_or_default()
        .iter()
        .enumerate()
        .map(|(k, m)| to_operator(m, dim, &format!("jumps[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = file.perturbation.clone().unwrap_or_default();
    let v = match &spec.v {
        Some(m) => to_operator(m, dim, "perturbation.v")?,
        None => zeros(dim),
    };
    let fs = spec
        .f
        .as_deref()
        .unwrap_or_default()
        .iter()
        .enumerate()
        .map(|(k, m)| to_operator(m, dim, &format!("perturbation.f[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    if fs.len() > jumps.len() {
        return Err(CliError::Input(format!(
            "perturbation.f: {} entries for {} jumps",
            fs.len(),
            jumps.len()
        )));
    }
    let pert = Perturbation::new(v, fs)
        .map_err(|e| CliError::Input(format!("perturbation.v: {e}")))?
        .padded(jumps.len());
    let l =
        StructuredLindbladian::new(h, jumps, dfs).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(System::Explicit { l, pert })
}

pub fn to_operator(m: &Matrix, dim: usize, key: &str) -> Result<Operator, CliError> {
    if m.len() != dim {
        return Err(CliError::Input(format!(
            "{key}: {} rows, expected {dim}",
            m.len()
        )));
    }
    let mut out = zeros(dim);
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            return Err(CliError::Input(format!(
                "{key}[{i}]: row has {} entries, expected {dim}",
                row.len()
            )));
        }
        for (j, e) in row.iter().enumerate() {
            let (re, im) = match *e {
                Entry::Real(x) => (x, 0.0),
                Entry::Complex([a, b]) => (a, b),
            };
            if !re.is_finite() || !im.is_finite() {
                return Err(CliError::Input(format!(
                    "{key}[{i}][{j}]: non-finite entry"
                )));
            }
            out[(i, j)] = c64(re, im);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE_LEVEL: &str = r#"{
        "version": 1,
        "hilbert_dim": 3,
        "dfs": [0, 1],
        "hamiltonian": [[0, 0, 0], [0, 0, 0], [0, 0, 1]],
        "jumps": [[[0, 0, [1.4142135623730951, 0]], [0, 0, 0], [0, 0, 0]]],
        "perturbation": {"f": [[[0, 0.2, 0], [0, 0, 0], [0, 0, 0]]]}
    }"#;

    #[test]
    fn parses_explicit_system() {
        let p = Problem::parse(THREE_LEVEL).unwrap();
        let (l, pert) = p.build().unwrap();
        assert_eq!(l.dim(), 3);
        assert_eq!(pert.fs.len(), 1);
        assert_eq!(pert.fs[0][(0, 1)], c64(0.2, 0.0));
        assert_eq!(l.jumps()[0][(0, 2)], c64(2f64.sqrt(), 0.0));
    }

    #[test]
    fn malformed_row_names_the_key() {
        let bad = THREE_LEVEL.replace("[0, 0, 0], [0, 0, 1]]", "[0, 0], [0, 0, 1]]");
        let err = Problem::parse(&bad).err().unwrap();
        assert!(err.to_string().contains("hamiltonian[1]"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn type_errors_carry_location() {
        let bad = THREE_LEVEL.replace("\"hilbert_dim\": 3", "\"hilbert_dim\": \"three\"");
        let err = Problem::parse(&bad).err().unwrap().to_string();
        assert!(
            err.contains("hilbert_dim") && err.contains("line 3"),
            "{err}"
        );
    }

    #[test]
    fn both_or_neither_is_rejected() {
        let both = THREE_LEVEL.replace(
            "\"version\": 1,",
            "\"version\": 1, \"scenario\": {\"name\": \"three-level\"},",
        );
        assert!(Problem::parse(&both).is_err());
        assert!(Problem::parse(r#"{"version": 1}"#).is_err());
        assert!(Problem::parse(r#"{"version": 2, "scenario": {"name": "three-level"}}"#).is_err());
    }

    #[test]
    fn named_scenario() {
        let p = Problem::parse(
            r#"{"version": 1, "scenario": {"name": "three-level", "delta": 0, "Gamma": 2, "gamma": 0.04}}"#,
        )
        .unwrap();
        let (l, _) = p.build().unwrap();
        assert_eq!(l.dim(), 3);
        let bad = r#"{"version": 1, "scenario": {"name": "four-level"}}"#;
        let err = Problem::parse(bad).err().unwrap().to_string();
        assert!(err.contains("three-level"), "{err}");
    }
}
