//! JSON input files. Complex numbers are `[re, im]` pairs.

use std::path::Path;

use degenex_core::degeneration::{validate, CombinatorialSpec, Degeneration, Hypergraph, ValidationReport};
use degenex_core::laurent::LaurentMatrix;
use degenex_core::linalg::CMatrix;
use degenex_core::state::MultipartiteState;
use degenex_core::C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub type ComplexJson = [f64; 2];

fn to_c64(c: &ComplexJson) -> C64 {
    C64::new(c[0], c[1])
}

fn from_c64(c: &C64) -> ComplexJson {
    [c.re, c.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub power: i32,
    pub matrix: Vec<Vec<ComplexJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentJson {
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<ComplexJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegenerationJson {
    pub k: usize,
    pub maps: Vec<LaurentJson>,
    pub psi: StateJson,
    pub phi: StateJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntryJson {
    pub index: Vec<usize>,
    pub amplitude: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinatorialJson {
    pub k: usize,
    pub index_sizes: Vec<usize>,
    pub psi_support: Vec<SupportEntryJson>,
    pub phi: Vec<Vec<usize>>,
    pub u: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphJson {
    pub vertices: usize,
    pub edges: Vec<Vec<usize>>,
}

/// A parsed input file, before any mathematical validation.
#[derive(Debug, Clone, PartialEq)]
pub enum InputFile {
    Degeneration(DegenerationJson),
    Combinatorial(CombinatorialJson),
    Hypergraph(HypergraphJson),
}

impl InputFile {
    pub fn kind(&self) -> &'static str {
        match self {
            InputFile::Degeneration(_) => "degeneration",
            InputFile::Combinatorial(_) => "combinatorial",
            InputFile::Hypergraph(_) => "hypergraph",
        }
    }

    pub fn to_json_string(&self) -> String {
        let text = match self {
            InputFile::Degeneration(d) => serde_json::to_string_pretty(d),
            InputFile::Combinatorial(c) => serde_json::to_string_pretty(c),
            InputFile::Hypergraph(h) => serde_json::to_string_pretty(h),
        };
        text.expect("plain data always serializes") + "\n"
    }
}

/// serde_json appends the position to its messages; it is reported separately.
fn message(e: &serde_json::Error) -> String {
    let text = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    text.strip_suffix(&suffix).map(str::to_string).unwrap_or(text)
}

fn typed<T: DeserializeOwned>(file: &str, text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Schema {
            file: file.to_string(),
            line: inner.line(),
            column: inner.column(),
            message: if path == "." { message(&inner) } else { format!("at `{path}`: {}", message(&inner)) },
        }
    })
}

/// Parses a document, picking the schema from its distinguishing key:
/// `maps` for degenerations, `u` for combinatorial data, `edges` for
/// hypergraphs.
pub fn parse_input(file: &str, text: &str) -> Result<InputFile, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Schema {
        file: file.to_string(),
        line: e.line(),
        column: e.column(),
        message: message(&e),
    })?;
    let Some(object) = value.as_object() else {
        return Err(CliError::Schema { file: file.to_string(), line: 1, column: 1, message: "expected a JSON object".into() });
    };
    if object.contains_key("maps") {
        Ok(InputFile::Degeneration(typed(file, text)?))
    } else if object.contains_key("u") {
        Ok(InputFile::Combinatorial(typed(file, text)?))
    } else if object.contains_key("edges") {
        Ok(InputFile::Hypergraph(typed(file, text)?))
    } else {
        Err(CliError::Schema {
            file: file.to_string(),
            line: 1,
            column: 1,
            message: "cannot tell the input kind: expected a `maps`, `u` or `edges` key".into(),
        })
    }
}

pub fn read_input(path: &Path) -> Result<InputFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&path.display().to_string(), &text)
}

fn shape(message: String) -> CliError {
    CliError::Validation(message)
}

impl LaurentJson {
    pub fn to_core(&self) -> Result<LaurentMatrix, CliError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, term) in self.terms.iter().enumerate() {
            if term.matrix.len() != self.rows || term.matrix.iter().any(|r| r.len() != self.cols) {
                return Err(shape(format!("term {t} (power {}) is not {}x{}", term.power, self.rows, self.cols)));
            }
            let rows: Vec<Vec<C64>> = term.matrix.iter().map(|r| r.iter().map(to_c64).collect()).collect();
            let matrix = if self.rows == 0 { CMatrix::zeros(0, self.cols) } else { CMatrix::from_rows(&rows)? };
            terms.push((term.power, matrix));
        }
        Ok(LaurentMatrix::new(self.rows, self.cols, terms)?)
    }

    pub fn from_core(map: &LaurentMatrix) -> Self {
        let terms = map
            .terms()
            .map(|(power, m)| TermJson {
                power,
                matrix: (0..m.rows()).map(|i| m.row(i).iter().map(from_c64).collect()).collect(),
            })
            .collect();
        Self { rows: map.rows(), cols: map.cols(), terms }
    }
}

impl StateJson {
    pub fn to_core(&self) -> Result<MultipartiteState, CliError> {
        Ok(MultipartiteState::new(self.dims.clone(), self.amplitudes.iter().map(to_c64).collect())?)
    }

    pub fn from_core(state: &MultipartiteState) -> Self {
        Self { dims: state.dims().to_vec(), amplitudes: state.amplitudes().iter().map(from_c64).collect() }
    }
}

/// Maps and states converted to core types, before the degeneration check.
pub struct DegenerationParts {
    pub maps: Vec<LaurentMatrix>,
    pub psi: MultipartiteState,
    pub phi: MultipartiteState,
}

impl DegenerationParts {
    pub fn report(&self, tol: f64) -> Result<ValidationReport, CliError> {
        Ok(validate(&self.maps, &self.psi, &self.phi, tol)?)
    }

    pub fn build(self, tol: f64) -> Result<Degeneration, CliError> {
        Ok(Degeneration::new(self.maps, self.psi, self.phi, tol)?)
    }
}

impl DegenerationJson {
    pub fn parts(&self) -> Result<DegenerationParts, CliError> {
        if self.maps.len() != self.k || self.psi.dims.len() != self.k || self.phi.dims.len() != self.k {
            return Err(shape(format!(
                "k = {} but there are {} maps, {} psi factors and {} phi factors",
                self.k,
                self.maps.len(),
                self.psi.dims.len(),
                self.phi.dims.len()
            )));
        }
        let maps = self.maps.iter().map(LaurentJson::to_core).collect::<Result<_, _>>()?;
        Ok(DegenerationParts { maps, psi: self.psi.to_core()?, phi: self.phi.to_core()? })
    }

    pub fn from_core(deg: &Degeneration) -> Self {
        Self {
            k: deg.k(),
            maps: deg.maps().iter().map(LaurentJson::from_core).collect(),
            psi: StateJson::from_core(deg.psi()),
            phi: StateJson::from_core(deg.phi()),
        }
    }
}

impl CombinatorialJson {
    pub fn to_core(&self) -> Result<CombinatorialSpec, CliError> {
        if self.index_sizes.len() != self.k {
            return Err(shape(format!("k = {} but index_sizes has {} entries", self.k, self.index_sizes.len())));
        }
        let spec = CombinatorialSpec {
            index_sizes: self.index_sizes.clone(),
            psi_support: self.psi_support.iter().map(|e| (e.index.clone(), to_c64(&e.amplitude))).collect(),
            phi: self.phi.clone(),
            u: self.u.clone(),
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn from_core(spec: &CombinatorialSpec) -> Self {
        Self {
            k: spec.index_sizes.len(),
            index_sizes: spec.index_sizes.clone(),
            psi_support: spec
                .psi_support
                .iter()
                .map(|(index, a)| SupportEntryJson { index: index.clone(), amplitude: from_c64(a) })
                .collect(),
            phi: spec.phi.clone(),
            u: spec.u.clone(),
        }
    }
}

impl HypergraphJson {
    pub fn to_core(&self) -> Result<Hypergraph, CliError> {
        Ok(Hypergraph::new(self.vertices, self.edges.clone())?)
    }

    pub fn from_core(h: &Hypergraph) -> Self {
        Self { vertices: h.vertices(), edges: h.edges().to_vec() }
    }
}
