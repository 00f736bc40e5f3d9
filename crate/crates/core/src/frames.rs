//! Models, differential forms, vector fields and the exterior derivative.
//!
//! A model is either the coordinate torus (frame `e_i = ∂/∂x_i`, coefficients
//! are trigonometric polynomials) or a Lie algebra frame with structure
//! constants `[e_i, e_j] = c^k_{ij} e_k` and constant coefficients. The
//! structure equations use `de^k = -Σ_{i<j} c^k_{ij} e^i ∧ e^j`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeffring::{GaussianRational, Rational, TrigPoly};

/// Strictly increasing list of 0-based frame indices.
pub type MultiIndex = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FrameKind {
    CoordinateTorus,
    LieAlgebra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum RingKind {
    Constants,
    TrigPoly,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("frame dimension {0} is odd")]
    OddDimension(usize),
    #[error("frame dimension must be positive")]
    EmptyModel,
    #[error("index out of range in structure constant c^{k}_{{{i}{j}}}")]
    IndexOutOfRange { i: usize, j: usize, k: usize },
    #[error("structure constants violate antisymmetry at c^{k}_{{{i}{j}}}")]
    Antisymmetry { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails for (e{i}, e{j}, e{k}) in component e{l}")]
    JacobiViolation { i: usize, j: usize, k: usize, l: usize },
    #[error("nonconstant coefficients with nonzero structure constants are unsupported")]
    MixedRing,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("operands live on different models ({0} vs {1})")]
    ModelMismatch(String, String),
    #[error("coefficient is not constant on a Lie algebra model")]
    NonConstantCoefficient,
}

/// Unvalidated model description (1-based indices in `constants`).
#[derive(Clone, Debug)]
pub struct RawModel {
    pub name: String,
    pub n: usize,
    pub kind: FrameKind,
    pub ring: RingKind,
    /// Entries `(i, j, k, c)` meaning `c^k_{ij} = c`, 1-based.
    pub constants: Vec<(usize, usize, usize, Rational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    name: String,
    n: usize,
    kind: FrameKind,
    ring: RingKind,
    /// `structure[i][j][k] = c^k_{ij}`, 0-based.
    structure: Vec<Vec<Vec<Rational>>>,
}

/// Validates a raw description, collecting every violated invariant.
pub fn validate_model(raw: RawModel) -> Result<Model, Vec<ModelError>> {
    let n = raw.n;
    let mut errors = Vec::new();
    if n == 0 {
        return Err(vec![ModelError::EmptyModel]);
    }
    if n % 2 == 1 {
        errors.push(ModelError::OddDimension(n));
    }
    let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
    let mut seen = vec![vec![vec![false; n]; n]; n];
    for (i, j, k, v) in &raw.constants {
        let (i, j, k) = (*i, *j, *k);
        if i == 0 || j == 0 || k == 0 || i > n || j > n || k > n {
            errors.push(ModelError::IndexOutOfRange { i, j, k });
            continue;
        }
        let (a, b, t) = (i - 1, j - 1, k - 1);
        if a == b {
            if !v.is_zero() {
                errors.push(ModelError::Antisymmetry { i, j, k });
            }
            continue;
        }
        if (seen[a][b][t] && c[a][b][t] != *v) || (seen[b][a][t] && c[b][a][t] != -v.clone()) {
            errors.push(ModelError::Antisymmetry { i, j, k });
            continue;
        }
        c[a][b][t] = v.clone();
        c[b][a][t] = -v.clone();
        seen[a][b][t] = true;
        seen[b][a][t] = true;
    }
    let has_constants = c.iter().flatten().flatten().any(|x| !x.is_zero());
    match raw.kind {
        FrameKind::CoordinateTorus => {
            if has_constants {
                errors.push(ModelError::MixedRing);
            }
        }
        FrameKind::LieAlgebra => {
            if raw.ring == RingKind::TrigPoly && has_constants {
                errors.push(ModelError::MixedRing);
            }
        }
    }
    if errors.is_empty() {
        if let Some(v) = jacobi_violation(&c) {
            errors.push(v);
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let ring = match raw.kind {
        FrameKind::CoordinateTorus => RingKind::TrigPoly,
        FrameKind::LieAlgebra => RingKind::Constants,
    };
    Ok(Model { name: raw.name, n, kind: raw.kind, ring, structure: c })
}

/// First (i<j<k, l) where `Σ_m c^m_{ij} c^l_{mk} + cyclic ≠ 0`, 1-based.
fn jacobi_violation(c: &[Vec<Vec<Rational>>]) -> Option<ModelError> {
    let n = c.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in 0..n {
                    let mut s = Rational::zero();
                    for m in 0..n {
                        s += &c[i][j][m] * &c[m][k][l];
                        s += &c[j][k][m] * &c[m][i][l];
                        s += &c[k][i][m] * &c[m][j][l];
                    }
                    if !s.is_zero() {
                        return Some(ModelError::JacobiViolation { i: i + 1, j: j + 1, k: k + 1, l: l + 1 });
                    }
                }
            }
        }
    }
    None
}

impl Model {
    /// Flat coordinate torus of even dimension `n`.
    pub fn torus(name: &str, n: usize) -> Result<Arc<Model>, Vec<ModelError>> {
        validate_model(RawModel {
            name: name.to_string(),
            n,
            kind: FrameKind::CoordinateTorus,
            ring: RingKind::TrigPoly,
            constants: vec![],
        })
        .map(Arc::new)
    }

    /// Lie algebra frame from 1-based `(i, j, k, c^k_{ij})` entries.
    pub fn lie_algebra(
        name: &str,
        n: usize,
        constants: Vec<(usize, usize, usize, Rational)>,
    ) -> Result<Arc<Model>, Vec<ModelError>> {
        validate_model(RawModel {
            name: name.to_string(),
            n,
            kind: FrameKind::LieAlgebra,
            ring: RingKind::Constants,
            constants,
        })
        .map(Arc::new)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn kind(&self) -> FrameKind {
        self.kind
    }
    pub fn ring(&self) -> RingKind {
        self.ring
    }

    /// `c^k_{ij}`, 0-based.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.structure[i][j][k]
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().flatten().flatten().all(|x| x.is_zero())
    }

    /// `e_i(f)`: coordinate derivative on the torus, zero on invariant
    /// (constant) coefficients.
    pub fn frame_derivative(&self, f: &TrigPoly, i: usize) -> TrigPoly {
        match self.kind {
            FrameKind::CoordinateTorus => f.partial0(i),
            FrameKind::LieAlgebra => TrigPoly::zero(f.dim()),
        }
    }

    pub fn zero_fn(&self) -> TrigPoly {
        TrigPoly::zero(self.n)
    }

    pub fn const_fn(&self, c: GaussianRational) -> TrigPoly {
        TrigPoly::constant(self.n, c)
    }
}

pub(crate) fn same_model(a: &Arc<Model>, b: &Arc<Model>) -> Result<(), FrameError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(FrameError::ModelMismatch(a.name.clone(), b.name.clone()))
    }
}

/// Sign and merged index of `e^a ∧ e^b`; `None` if they share an index.
pub fn merge_indices(a: &[usize], b: &[usize]) -> Option<(MultiIndex, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1;
    let (mut p, mut q) = (0, 0);
    while p < a.len() || q < b.len() {
        if q == b.len() || (p < a.len() && a[p] < b[q]) {
            out.push(a[p]);
            p += 1;
        } else if p == a.len() || b[q] < a[p] {
            // b[q] jumps over the remaining a's
            if (a.len() - p) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[q]);
            q += 1;
        } else {
            return None;
        }
    }
    Some((out, sign))
}

/// Sorts an arbitrary index tuple; `None` on repeats, else the sign of the
/// sorting permutation (counted transpositions).
pub fn sort_with_sign(idx: &[usize]) -> Option<(MultiIndex, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All strictly increasing k-subsets of `0..n` in lexicographic order.
pub fn multi_indices(n: usize, k: usize) -> Vec<MultiIndex> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// A degree-k form `Σ_I α_I e^I`. Forms of degree above `n` are always zero.
#[derive(Clone, Debug)]
pub struct Form {
    model: Arc<Model>,
    degree: usize,
    comps: BTreeMap<MultiIndex, TrigPoly>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.comps == other.comps && same_model(&self.model, &other.model).is_ok()
    }
}

impl Form {
    pub fn zero(model: &Arc<Model>, degree: usize) -> Self {
        Self { model: model.clone(), degree, comps: BTreeMap::new() }
    }

    pub fn function(model: &Arc<Model>, f: TrigPoly) -> Self {
        let mut out = Self::zero(model, 0);
        out.add_term(vec![], f);
        out
    }

    /// The basis form `e^I`; `idx` is sorted (with sign) first.
    pub fn basis(model: &Arc<Model>, idx: &[usize]) -> Self {
        Self::monomial(model, idx, TrigPoly::one(model.n()))
    }

    /// `f e^{i1} ∧ … ∧ e^{ik}` for an arbitrary index tuple.
    pub fn monomial(model: &Arc<Model>, idx: &[usize], f: TrigPoly) -> Self {
        let mut out = Self::zero(model, idx.len());
        if let Some((sorted, sign)) = sort_with_sign(idx) {
            let f = if sign < 0 { -f } else { f };
            out.add_term(sorted, f);
        }
        out
    }

    pub fn from_components(model: &Arc<Model>, degree: usize, comps: impl IntoIterator<Item = (MultiIndex, TrigPoly)>) -> Self {
        let mut out = Self::zero(model, degree);
        for (i, f) in comps {
            assert_eq!(i.len(), degree);
            out.add_term(i, f);
        }
        out
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
    pub fn components(&self) -> &BTreeMap<MultiIndex, TrigPoly> {
        &self.comps
    }

    pub fn component(&self, idx: &[usize]) -> TrigPoly {
        self.comps.get(idx).cloned().unwrap_or_else(|| self.model.zero_fn())
    }

    /// Value on a tuple of frame vectors (any order, repeats give 0).
    pub fn eval_frame(&self, idx: &[usize]) -> TrigPoly {
        assert_eq!(idx.len(), self.degree);
        match sort_with_sign(idx) {
            Some((s, sign)) => {
                let c = self.component(&s);
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
            None => self.model.zero_fn(),
        }
    }

    pub(crate) fn add_term(&mut self, idx: MultiIndex, f: TrigPoly) {
        if f.is_zero() || self.degree > self.model.n() {
            return;
        }
        debug_assert_eq!(idx.len(), self.degree);
        match self.comps.get_mut(&idx) {
            Some(v) => {
                *v = &*v + &f;
                if v.is_zero() {
                    self.comps.remove(&idx);
                }
            }
            None => {
                self.comps.insert(idx, f);
            }
        }
    }

    pub fn try_add(&self, other: &Form) -> Result<Form, FrameError> {
        same_model(&self.model, &other.model)?;
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (i, f) in &other.comps {
            out.add_term(i.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn scale_fn(&self, f: &TrigPoly) -> Form {
        let mut out = Form::zero(&self.model, self.degree);
        for (i, g) in &self.comps {
            out.add_term(i.clone(), g * f);
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Form {
        let mut out = Form::zero(&self.model, self.degree);
        for (i, g) in &self.comps {
            out.add_term(i.clone(), g.scale(c));
        }
        out
    }

    pub fn conj(&self) -> Form {
        let mut out = Form::zero(&self.model, self.degree);
        for (i, g) in &self.comps {
            out.add_term(i.clone(), g.conj());
        }
        out
    }

    /// Largest mode sup-norm among the coefficients.
    pub fn max_mode_norm(&self) -> i64 {
        self.comps.values().map(|f| f.max_mode_norm()).max().unwrap_or(0)
    }

    pub(crate) fn wedge_unchecked(&self, other: &Form) -> Form {
        let mut out = Form::zero(&self.model, self.degree + other.degree);
        if self.degree + other.degree > self.model.n() {
            return out;
        }
        for (a, f) in &self.comps {
            for (b, g) in &other.comps {
                if let Some((idx, sign)) = merge_indices(a, b) {
                    let p = f * g;
                    out.add_term(idx, if sign < 0 { -p } else { p });
                }
            }
        }
        out
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, FrameError> {
        same_model(&self.model, &other.model)?;
        Ok(self.wedge_unchecked(other))
    }

    /// `ι_{e_j}` contracting in the first slot.
    pub fn interior_frame(&self, j: usize) -> Form {
        if self.degree == 0 {
            return Form::zero(&self.model, 0);
        }
        let mut out = Form::zero(&self.model, self.degree - 1);
        for (idx, f) in &self.comps {
            if let Some(pos) = idx.iter().position(|&x| x == j) {
                let mut rest = idx.clone();
                rest.remove(pos);
                out.add_term(rest, if pos % 2 == 1 { -f } else { f.clone() });
            }
        }
        out
    }
}

impl<'a> std::ops::Add<&'a Form> for &'a Form {
    type Output = Form;
    fn add(self, o: &Form) -> Form {
        self.try_add(o).expect("forms on different models")
    }
}

impl<'a> std::ops::Sub<&'a Form> for &'a Form {
    type Output = Form;
    fn sub(self, o: &Form) -> Form {
        self + &(-o)
    }
}

impl<'a> std::ops::Neg for &'a Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(&-GaussianRational::one())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(idx, c)| {
                if idx.is_empty() {
                    format!("({c})")
                } else {
                    let name: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
                    format!("({c}) e^{}", name.join(""))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `X = X^j e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    model: Arc<Model>,
    comps: Vec<TrigPoly>,
}

impl VectorField {
    pub fn new(model: &Arc<Model>, comps: Vec<TrigPoly>) -> Self {
        assert_eq!(comps.len(), model.n(), "vector field length must equal n");
        Self { model: model.clone(), comps }
    }

    pub fn zero(model: &Arc<Model>) -> Self {
        Self::new(model, vec![model.zero_fn(); model.n()])
    }

    pub fn frame(model: &Arc<Model>, j: usize) -> Self {
        let mut v = Self::zero(model);
        v.comps[j] = TrigPoly::one(model.n());
        v
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }
    pub fn components(&self) -> &[TrigPoly] {
        &self.comps
    }
    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn scale_fn(&self, f: &TrigPoly) -> Self {
        Self { model: self.model.clone(), comps: self.comps.iter().map(|c| c * f).collect() }
    }

    pub fn add(&self, o: &VectorField) -> Self {
        Self { model: self.model.clone(), comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { model: self.model.clone(), comps: self.comps.iter().map(|a| -a).collect() }
    }
}

/// `[X, Y]^k = X^i e_i(Y^k) - Y^i e_i(X^k) + X^i Y^j c^k_{ij}`.
pub fn vf_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, FrameError> {
    same_model(&x.model, &y.model)?;
    let m = &x.model;
    let n = m.n();
    let mut out = vec![m.zero_fn(); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = m.zero_fn();
        for i in 0..n {
            if !x.comps[i].is_zero() {
                acc = &acc + &(&x.comps[i] * &m.frame_derivative(&y.comps[k], i));
            }
            if !y.comps[i].is_zero() {
                acc = &acc - &(&y.comps[i] * &m.frame_derivative(&x.comps[k], i));
            }
        }
        if m.kind() == FrameKind::LieAlgebra {
            for i in 0..n {
                for j in 0..n {
                    let c = m.structure_constant(i, j, k);
                    if c.is_zero() || x.comps[i].is_zero() || y.comps[j].is_zero() {
                        continue;
                    }
                    let p = (&x.comps[i] * &y.comps[j]).scale(&GaussianRational::real(c.clone()));
                    acc = &acc + &p;
                }
            }
        }
        *slot = acc;
    }
    Ok(VectorField::new(m, out))
}

/// `de^k = -Σ_{i<j} c^k_{ij} e^i ∧ e^j`.
pub fn d_coframe(model: &Arc<Model>, k: usize) -> Form {
    let n = model.n();
    let mut out = Form::zero(model, 2);
    if model.kind() == FrameKind::LieAlgebra {
        for i in 0..n {
            for j in i + 1..n {
                let c = model.structure_constant(i, j, k);
                if !c.is_zero() {
                    out.add_term(vec![i, j], model.const_fn(GaussianRational::real(-c.clone())));
                }
            }
        }
    }
    out
}

/// Exterior derivative: coordinate formula on the torus,
/// Chevalley–Eilenberg differential on Lie algebra frames.
pub fn ext_d(alpha: &Form) -> Form {
    let m = alpha.model.clone();
    let n = m.n();
    let mut out = Form::zero(&m, alpha.degree + 1);
    if alpha.degree >= n {
        return out;
    }
    let lie = m.kind() == FrameKind::LieAlgebra && !m.is_abelian();
    let dcoframe: Vec<Form> = if lie { (0..n).map(|k| d_coframe(&m, k)).collect() } else { vec![] };
    for (idx, f) in &alpha.comps {
        // df ∧ e^I
        for i in 0..n {
            if idx.contains(&i) {
                continue;
            }
            let df = m.frame_derivative(f, i);
            if df.is_zero() {
                continue;
            }
            if let Some((merged, sign)) = merge_indices(&[i], idx) {
                out.add_term(merged, if sign < 0 { -df } else { df });
            }
        }
        // f d(e^I), antiderivation over the coframe factors
        if lie {
            for (r, &ir) in idx.iter().enumerate() {
                let de = &dcoframe[ir];
                if de.is_zero() {
                    continue;
                }
                let before = Form::basis(&m, &idx[..r]);
                let after = Form::basis(&m, &idx[r + 1..]);
                let mut term = before.wedge_unchecked(de).wedge_unchecked(&after);
                if r % 2 == 1 {
                    term = -&term;
                }
                for (j, g) in term.comps {
                    out.add_term(j, &g * f);
                }
            }
        }
    }
    out
}

/// Vector-valued k-form `K = K^j ⊗ e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorForm {
    model: Arc<Model>,
    degree: usize,
    parts: Vec<Form>,
}

impl VectorForm {
    pub fn new(model: &Arc<Model>, degree: usize, parts: Vec<Form>) -> Self {
        assert_eq!(parts.len(), model.n(), "vector form needs n parts");
        assert!(parts.iter().all(|p| p.degree() == degree), "parts must share the degree");
        Self { model: model.clone(), degree, parts }
    }

    pub fn zero(model: &Arc<Model>, degree: usize) -> Self {
        Self::new(model, degree, vec![Form::zero(model, degree); model.n()])
    }

    /// Endomorphism with `K e_c = Σ_r m[r][c] e_r`, i.e. `K^r = Σ_c m[r][c] e^c`.
    pub fn from_matrix(model: &Arc<Model>, m: &[Vec<TrigPoly>]) -> Self {
        let n = model.n();
        assert_eq!(m.len(), n, "matrix must be n x n");
        let parts = m
            .iter()
            .map(|row| {
                assert_eq!(row.len(), n, "matrix must be n x n");
                Form::from_components(model, 1, row.iter().enumerate().map(|(c, f)| (vec![c], f.clone())))
            })
            .collect();
        Self::new(model, 1, parts)
    }

    pub fn identity(model: &Arc<Model>) -> Self {
        Self::new(model, 1, (0..model.n()).map(|j| Form::basis(model, &[j])).collect())
    }

    /// Builds `K` from its values on increasing frame tuples.
    pub fn from_frame_values(model: &Arc<Model>, degree: usize, value: impl Fn(&[usize]) -> VectorField) -> Self {
        let n = model.n();
        let mut parts = vec![Form::zero(model, degree); n];
        for idx in multi_indices(n, degree) {
            let v = value(&idx);
            for (r, c) in v.components().iter().enumerate() {
                parts[r].add_term(idx.clone(), c.clone());
            }
        }
        Self::new(model, degree, parts)
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn parts(&self) -> &[Form] {
        &self.parts
    }
    pub fn part(&self, j: usize) -> &Form {
        &self.parts[j]
    }
    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    /// Matrix entry `K^r(e_c)` of a degree-1 vector form.
    pub fn entry(&self, r: usize, c: usize) -> TrigPoly {
        assert_eq!(self.degree, 1);
        self.parts[r].component(&[c])
    }

    pub fn matrix(&self) -> Vec<Vec<TrigPoly>> {
        let n = self.model.n();
        (0..n).map(|r| (0..n).map(|c| self.entry(r, c)).collect()).collect()
    }

    /// `K(e_{i1}, …, e_{ik})` for any index tuple.
    pub fn eval_frame(&self, idx: &[usize]) -> VectorField {
        VectorField::new(&self.model, self.parts.iter().map(|p| p.eval_frame(idx)).collect())
    }

    /// `K(X)` for a degree-1 vector form.
    pub fn apply(&self, x: &VectorField) -> VectorField {
        assert_eq!(self.degree, 1);
        let n = self.model.n();
        let comps = (0..n)
            .map(|r| {
                let mut acc = self.model.zero_fn();
                for (c, xc) in x.components().iter().enumerate() {
                    if xc.is_zero() {
                        continue;
                    }
                    let e = self.entry(r, c);
                    if !e.is_zero() {
                        acc = &acc + &(&e * xc);
                    }
                }
                acc
            })
            .collect();
        VectorField::new(&self.model, comps)
    }

    /// Composition of degree-1 vector forms as endomorphisms.
    pub fn compose(&self, other: &VectorForm) -> VectorForm {
        VectorForm::from_frame_values(&self.model, 1, |idx| self.apply(&other.eval_frame(idx)))
    }

    /// `K ∘ K = -I`, checked exactly.
    pub fn is_almost_complex(&self) -> bool {
        self.degree == 1 && self.compose(self) == self.neg_identity()
    }

    fn neg_identity(&self) -> VectorForm {
        VectorForm::identity(&self.model).neg()
    }

    pub fn neg(&self) -> VectorForm {
        Self { model: self.model.clone(), degree: self.degree, parts: self.parts.iter().map(|p| -p).collect() }
    }

    pub fn add(&self, other: &VectorForm) -> VectorForm {
        assert_eq!(self.degree, other.degree);
        Self {
            model: self.model.clone(),
            degree: self.degree,
            parts: self.parts.iter().zip(&other.parts).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest mode sup-norm in any coefficient.
    pub fn max_mode_norm(&self) -> i64 {
        self.parts.iter().map(|p| p.max_mode_norm()).max().unwrap_or(0)
    }

    /// All Fourier modes occurring in coefficients.
    pub fn modes(&self) -> std::collections::BTreeSet<Vec<i64>> {
        self.parts
            .iter()
            .flat_map(|p| p.components().values().flat_map(|f| f.terms().keys().cloned()).collect::<Vec<_>>())
            .collect()
    }
}

/// `ι_X α` (contraction in the first slot; zero on functions).
pub fn interior_vector(x: &VectorField, alpha: &Form) -> Result<Form, FrameError> {
    same_model(&x.model, &alpha.model)?;
    let m = &alpha.model;
    if alpha.degree == 0 {
        return Ok(Form::zero(m, 0));
    }
    let mut out = Form::zero(m, alpha.degree - 1);
    for (j, xj) in x.comps.iter().enumerate() {
        if xj.is_zero() {
            continue;
        }
        out = &out + &alpha.interior_frame(j).scale_fn(xj);
    }
    Ok(out)
}
