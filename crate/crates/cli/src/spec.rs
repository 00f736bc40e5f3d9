//! JSON model-spec files.
//!
//! ```json
//! {
//!   "name": "kt",
//!   "kind": "lie_algebra",
//!   "dim": 4,
//!   "J": [["0","-1","0","0"], ["1","0","0","0"], ["0","0","0","-1"], ["0","0","1","0"]],
//!   "structure_constants": [{"i": 1, "j": 2, "k": 4, "c": "-1"}],
//!   "windows": [1, 2]
//! }
//! ```
//!
//! `J[r][c]` is the `e_r` component of `J e_c`. Entries are expressions in
//! the syntax of [`crate::expr`]. `c` may be an integer or a rational string.
//! `c^k_{ij} = c` means `[e_i, e_j] = Σ_k c^k_{ij} e_k` (1-based).

use std::sync::Arc;

use nijenhuis_core::coeffring::{Rational, TrigPoly};
use nijenhuis_core::complexes::Window;
use nijenhuis_core::frames::{validate_model, FrameKind, ModelError, RawModel, RingKind, VectorForm};
use nijenhuis_core::models::{AlmostComplexModel, BuildError};
use serde::Deserialize;
use thiserror::Error;

use crate::expr::{parse_expr, ExprError};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("malformed model spec: {0}")]
    Json(String),
    #[error("J entry ({row}, {col}): {source}")]
    Expr { row: usize, col: usize, source: ExprError },
    #[error("J must be a {0}x{0} matrix")]
    Shape(usize),
    #[error("bad structure constant {0:?}")]
    Constant(String),
    #[error("invalid model: {}", list(.0))]
    Model(Vec<ModelError>),
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn list(errors: &[ModelError]) -> String {
    errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    #[serde(alias = "coordinate_torus")]
    Torus,
    LieAlgebra,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
pub struct SpecConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Number,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub kind: SpecKind,
    pub dim: usize,
    #[serde(rename = "J")]
    pub j: Vec<Vec<String>>,
    #[serde(default)]
    pub structure_constants: Vec<SpecConstant>,
    #[serde(default)]
    pub windows: Vec<usize>,
}

/// A parsed spec file: the structure and its preferred windows.
#[derive(Debug)]
pub struct LoadedSpec {
    pub model: AlmostComplexModel,
    pub windows: Vec<Window>,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))
    }

    pub fn build(&self) -> Result<LoadedSpec, SpecError> {
        let n = self.dim;
        let kind = match self.kind {
            SpecKind::Torus => FrameKind::CoordinateTorus,
            SpecKind::LieAlgebra => FrameKind::LieAlgebra,
        };
        let ring = match kind {
            FrameKind::CoordinateTorus => RingKind::TrigPoly,
            FrameKind::LieAlgebra => RingKind::Constants,
        };
        let mut constants = Vec::new();
        for sc in &self.structure_constants {
            let c = match &sc.c {
                Number::Int(v) => Rational::from_integer((*v).into()),
                Number::Text(s) => s.trim().parse::<Rational>().map_err(|_| SpecError::Constant(s.clone()))?,
            };
            constants.push((sc.i, sc.j, sc.k, c));
        }
        let raw = RawModel { name: self.name.clone(), n, kind, ring, constants };
        let model = Arc::new(validate_model(raw).map_err(SpecError::Model)?);
        if self.j.len() != n || self.j.iter().any(|r| r.len() != n) {
            return Err(SpecError::Shape(n));
        }
        let mut m: Vec<Vec<TrigPoly>> = Vec::with_capacity(n);
        for (r, row) in self.j.iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (c, text) in row.iter().enumerate() {
                let p = parse_expr(text, n).map_err(|source| SpecError::Expr { row: r + 1, col: c + 1, source })?;
                out.push(p);
            }
            m.push(out);
        }
        let j = VectorForm::from_matrix(&model, &m);
        let acs = AlmostComplexModel::new(model, j)?;
        let windows = match kind {
            FrameKind::LieAlgebra => vec![Window::Invariant],
            FrameKind::CoordinateTorus if self.windows.is_empty() => vec![Window::Modes(1)],
            FrameKind::CoordinateTorus => self.windows.iter().map(|&w| Window::Modes(w)).collect(),
        };
        Ok(LoadedSpec { model: acs, windows })
    }
}

pub fn load_spec(path: &str) -> Result<LoadedSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Io { path: path.into(), msg: e.to_string() })?;
    ModelSpec::from_json(&text)?.build()
}
