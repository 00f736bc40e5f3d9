//! Built-in almost complex models.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::coeffring::{rat_int, Rational, TrigPoly};
use crate::derivations::{jn_twist_tensor, nijenhuis, DerivationError};
use crate::frames::{FrameKind, Model, ModelError, VectorForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("J does not square to -I")]
    NotAlmostComplex,
    #[error("structure is not integrable")]
    NotIntegrable,
    #[error("invalid model: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Model(Vec<ModelError>),
}

impl From<DerivationError> for BuildError {
    fn from(e: DerivationError) -> Self {
        match e {
            DerivationError::NotAlmostComplex => BuildError::NotAlmostComplex,
            DerivationError::Frame(f) => BuildError::BadParameter(f.to_string()),
        }
    }
}

/// A model with an almost complex structure and its derived tensors.
#[derive(Clone, Debug)]
pub struct AlmostComplexModel {
    pub model: Arc<Model>,
    pub j: VectorForm,
    pub n: VectorForm,
    /// `J·N`
    pub jn: VectorForm,
}

impl AlmostComplexModel {
    /// Checks `J² = -I` exactly and computes `N` and `J·N`. On Lie algebra
    /// frames the entries of `J` must be constant.
    pub fn new(model: Arc<Model>, j: VectorForm) -> Result<Self, BuildError> {
        if model.kind() == FrameKind::LieAlgebra && j.matrix().iter().flatten().any(|e| !e.is_constant()) {
            return Err(BuildError::BadParameter("J must have constant entries on a Lie algebra frame".into()));
        }
        if j.matrix().iter().flatten().any(|e| !e.reality()) {
            return Err(BuildError::BadParameter("J must be real".into()));
        }
        let n = nijenhuis(&j)?;
        let jn = jn_twist_tensor(&j, &n)?;
        Ok(Self { model, j, n, jn })
    }

    pub fn name(&self) -> &str {
        self.model.name()
    }

    pub fn dim(&self) -> usize {
        self.model.n()
    }

    pub fn is_integrable(&self) -> bool {
        self.n.is_zero()
    }
}

/// Optional parameters of the built-in constructors.
#[derive(Clone, Debug, Default)]
pub struct BuiltinParams {
    pub p: Option<TrigPoly>,
    pub f: Option<TrigPoly>,
    pub g: Option<TrigPoly>,
    pub n: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub params: &'static str,
    pub description: &'static str,
    pub origin: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "example27",
        aliases: &["example27_torus"],
        params: "p: function of x1 (default sin(x1))",
        description: "T^4 with J rows (0,1,p,0), (-1,0,0,p), (0,0,0,-1), (0,0,1,0); integrable iff p is constant",
        origin: "literature example, compact case",
    },
    CatalogEntry {
        name: "t4",
        aliases: &["t4_nonstandard"],
        params: "f, g: functions on T^4 (default f = sin(x1), g = 0)",
        description: "T^4 with J rows (0,1,f,-g), (-1,0,g,f), (0,0,0,-1), (0,0,1,0); integrable iff f, g are constant in x1, x2",
        origin: "literature example",
    },
    CatalogEntry {
        name: "iwasawa",
        aliases: &[],
        params: "none",
        description: "6-dim complex Heisenberg algebra, de5 = e24 - e13, de6 = -e14 - e23, J e1 = e2, J e3 = e4, J e5 = e6",
        origin: "literature example (invariant complex)",
    },
    CatalogEntry {
        name: "kodaira_thurston",
        aliases: &["kt"],
        params: "none",
        description: "de4 = e12 with J e1 = e2, J e3 = e4 (extra test bed)",
        origin: "extra test bed",
    },
    CatalogEntry {
        name: "flat_kahler_torus",
        aliases: &["flat"],
        params: "n: even dimension (default 4)",
        description: "flat torus with the standard constant J",
        origin: "Kähler control model",
    },
    CatalogEntry {
        name: "abelian",
        aliases: &[],
        params: "n: even dimension (default 4)",
        description: "abelian Lie algebra with the standard constant J",
        origin: "control model",
    },
];

fn canonical(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|e| e.name == name || e.aliases.contains(&name)).map(|e| e.name)
}

fn cst(n: usize, v: i64) -> TrigPoly {
    TrigPoly::from_rational(n, rat_int(v))
}

/// Standard `J e_{2b-1} = e_{2b}` block matrix.
pub fn standard_j_matrix(n: usize) -> Vec<Vec<TrigPoly>> {
    let mut rows = vec![vec![cst(n, 0); n]; n];
    for b in 0..n / 2 {
        rows[2 * b + 1][2 * b] = cst(n, 1);
        rows[2 * b][2 * b + 1] = cst(n, -1);
    }
    rows
}

fn check_fn(name: &str, f: &TrigPoly, n: usize) -> Result<(), BuildError> {
    if f.dim() != n {
        return Err(BuildError::BadParameter(format!("{name} must be a function of x1..x{n}")));
    }
    if !f.reality() {
        return Err(BuildError::BadParameter(format!("{name} must be real")));
    }
    Ok(())
}

fn model_err(e: Vec<ModelError>) -> BuildError {
    BuildError::Model(e)
}

pub fn example27(p: TrigPoly) -> Result<AlmostComplexModel, BuildError> {
    check_fn("p", &p, 4)?;
    if !(1..4).all(|a| p.independent_of(a)) {
        return Err(BuildError::BadParameter("p must depend on x1 only".into()));
    }
    let m = Model::torus("example27", 4).map_err(model_err)?;
    let (z, o, mo) = (cst(4, 0), cst(4, 1), cst(4, -1));
    let j = VectorForm::from_matrix(
        &m,
        &[
            vec![z.clone(), o.clone(), p.clone(), z.clone()],
            vec![mo.clone(), z.clone(), z.clone(), p],
            vec![z.clone(), z.clone(), z.clone(), mo],
            vec![z.clone(), z, o, cst(4, 0)],
        ],
    );
    AlmostComplexModel::new(m, j)
}

pub fn t4_nonstandard(f: TrigPoly, g: TrigPoly) -> Result<AlmostComplexModel, BuildError> {
    check_fn("f", &f, 4)?;
    check_fn("g", &g, 4)?;
    let m = Model::torus("t4", 4).map_err(model_err)?;
    let (z, o, mo) = (cst(4, 0), cst(4, 1), cst(4, -1));
    let j = VectorForm::from_matrix(
        &m,
        &[
            vec![z.clone(), o.clone(), f.clone(), -&g],
            vec![mo.clone(), z.clone(), g, f],
            vec![z.clone(), z.clone(), z.clone(), mo],
            vec![z.clone(), z.clone(), o, z],
        ],
    );
    AlmostComplexModel::new(m, j)
}

/// Structure constants `(i, j, k, c^k_{ij})`, 1-based.
pub fn iwasawa_constants() -> Vec<(usize, usize, usize, Rational)> {
    vec![(1, 3, 5, rat_int(1)), (2, 4, 5, rat_int(-1)), (1, 4, 6, rat_int(1)), (2, 3, 6, rat_int(1))]
}

pub fn iwasawa() -> Result<AlmostComplexModel, BuildError> {
    let m = Model::lie_algebra("iwasawa", 6, iwasawa_constants()).map_err(model_err)?;
    let j = VectorForm::from_matrix(&m, &standard_j_matrix(6));
    let s = AlmostComplexModel::new(m, j)?;
    if !s.is_integrable() {
        return Err(BuildError::NotIntegrable);
    }
    Ok(s)
}

pub fn kodaira_thurston() -> Result<AlmostComplexModel, BuildError> {
    let m = Model::lie_algebra("kodaira_thurston", 4, vec![(1, 2, 4, rat_int(-1))]).map_err(model_err)?;
    let j = VectorForm::from_matrix(&m, &standard_j_matrix(4));
    AlmostComplexModel::new(m, j)
}

pub fn flat_kahler_torus(n: usize) -> Result<AlmostComplexModel, BuildError> {
    let m = Model::torus("flat_kahler_torus", n).map_err(model_err)?;
    let j = VectorForm::from_matrix(&m, &standard_j_matrix(n));
    AlmostComplexModel::new(m, j)
}

pub fn abelian(n: usize) -> Result<AlmostComplexModel, BuildError> {
    let m = Model::lie_algebra("abelian", n, vec![]).map_err(model_err)?;
    let j = VectorForm::from_matrix(&m, &standard_j_matrix(n));
    AlmostComplexModel::new(m, j)
}

/// Looks up a catalog entry by name or alias and applies parameters.
pub fn builtin(name: &str, params: &BuiltinParams) -> Result<AlmostComplexModel, BuildError> {
    let canon = canonical(name).ok_or_else(|| BuildError::UnknownModel(name.to_string()))?;
    let dim = params.n.unwrap_or(4);
    let default_sin = || TrigPoly::sin_mode(vec![1, 0, 0, 0]);
    match canon {
        "example27" => example27(params.p.clone().unwrap_or_else(default_sin)),
        "t4" => t4_nonstandard(
            params.f.clone().unwrap_or_else(default_sin),
            params.g.clone().unwrap_or_else(|| TrigPoly::zero(4)),
        ),
        "iwasawa" => iwasawa(),
        "kodaira_thurston" => kodaira_thurston(),
        "flat_kahler_torus" => flat_kahler_torus(dim),
        "abelian" => abelian(dim),
        _ => unreachable!("catalog names are exhaustive"),
    }
}

/// One representative of every catalog entry with default parameters.
pub fn catalog_defaults() -> Vec<AlmostComplexModel> {
    CATALOG.iter().map(|e| builtin(e.name, &BuiltinParams::default()).expect("defaults are valid")).collect()
}
