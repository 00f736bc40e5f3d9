//! Finite realizations of the form complexes and their cohomologies.
//!
//! On a Lie algebra frame the complex of invariant forms is finite and is
//! used as is. On the coordinate torus the window `V_N` consists of forms
//! whose coefficients have Fourier modes of sup-norm at most `N`.
//!
//! Computations run in the complex exponential basis `e^I · exp(i m·x)`.
//! The operators are real, so complex dimensions of kernels, images and
//! quotients equal the real dimensions of the real complexes. The window is
//! split into mode blocks that no operator couples: modes `m, m'` share a
//! block when `m - m'` is a difference of two modes occurring in `J` or `N`
//! (or zero). Kernels are genuine: the defining equation is imposed on the
//! full, grown codomain. Images of an operator with mode growth `g` are taken
//! from the shrunk domain `V_{N-g}`.
//!
//! A real cosine/sine basis ([`basis_window`], [`assemble`]) is provided as
//! an independent route for cross-checks.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coeffring::{GaussianRational as GR, Mode, Rational, TrigPoly};
use crate::derivations::{iota_vform, lie_vform};
use crate::frames::{ext_d, multi_indices, Form, FrameKind, Model, MultiIndex};
use crate::linalg::{kernel_basis, quotient_dim, ExactMatrix, LinalgError, SparseVec, Subspace};
use crate::models::AlmostComplexModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("window {window} is not valid for a {kind} model")]
    InvalidWindow { window: String, kind: String },
    #[error("degree {0} out of range")]
    DegreeOutOfRange(usize),
    #[error("subspace containment failed in {context}: {source}")]
    NotASubspace { context: String, source: LinalgError },
    #[error("operator image leaves the target window in {0}")]
    WindowOverflow(String),
}

/// Truncation window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Window {
    Invariant,
    Modes(usize),
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Invariant => write!(f, "invariant"),
            Window::Modes(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Window::Invariant => s.serialize_str("invariant"),
            Window::Modes(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl Window {
    fn bound(self) -> i64 {
        match self {
            Window::Invariant => 0,
            Window::Modes(n) => n as i64,
        }
    }
}

/// The default window for a model: invariant for Lie algebras, `N = 1` on tori.
pub fn default_window(model: &Model) -> Window {
    match model.kind() {
        FrameKind::LieAlgebra => Window::Invariant,
        FrameKind::CoordinateTorus => Window::Modes(1),
    }
}

fn check_window(model: &Model, w: Window) -> Result<(), ComplexError> {
    let ok = matches!(
        (model.kind(), w),
        (FrameKind::LieAlgebra, Window::Invariant) | (FrameKind::CoordinateTorus, Window::Modes(_))
    );
    if ok {
        Ok(())
    } else {
        Err(ComplexError::InvalidWindow {
            window: w.to_string(),
            kind: format!("{:?}", model.kind()),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Operator {
    D,
    LJ,
    LN,
    IotaJ,
    DLJ,
}

impl Operator {
    pub fn degree_shift(self) -> usize {
        match self {
            Operator::D | Operator::LJ => 1,
            Operator::LN | Operator::DLJ => 2,
            Operator::IotaJ => 0,
        }
    }

    /// Measured mode growth: the largest sup-norm of a mode in `J` or `N`.
    pub fn growth(self, s: &AlmostComplexModel) -> i64 {
        match self {
            Operator::D => 0,
            Operator::LJ | Operator::IotaJ | Operator::DLJ => s.j.max_mode_norm(),
            Operator::LN => s.n.max_mode_norm(),
        }
    }

    pub fn apply(self, s: &AlmostComplexModel, a: &Form) -> Form {
        match self {
            Operator::D => ext_d(a),
            Operator::LJ => lie_vform(&s.j, a).expect("same model"),
            Operator::LN => lie_vform(&s.n, a).expect("same model"),
            Operator::IotaJ => iota_vform(&s.j, a).expect("same model"),
            Operator::DLJ => ext_d(&lie_vform(&s.j, a).expect("same model")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Theory {
    #[serde(rename = "deRham")]
    DeRham,
    J,
    N,
    Ntwist,
}

impl std::str::FromStr for Theory {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "deRham" | "derham" | "dR" => Ok(Theory::DeRham),
            "J" => Ok(Theory::J),
            "N" => Ok(Theory::N),
            "Ntwist" | "ntwist" => Ok(Theory::Ntwist),
            _ => Err(format!("unknown theory '{s}'")),
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theory::DeRham => "deRham",
            Theory::J => "J",
            Theory::N => "N",
            Theory::Ntwist => "Ntwist",
        };
        write!(f, "{s}")
    }
}

/// All modes in `{-bound..=bound}^n`, lexicographic.
pub fn box_modes(n: usize, bound: i64) -> Vec<Mode> {
    let mut out: Vec<Mode> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|m| {
                (-bound..=bound).map(move |v| {
                    let mut m = m.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
    }
    out
}

fn norm(m: &[i64]) -> i64 {
    m.iter().map(|x| x.abs()).max().unwrap_or(0)
}

fn is_positive(m: &[i64]) -> bool {
    m.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Mode blocks of `box(bound)` that the operators of `s` never couple.
pub fn mode_blocks(s: &AlmostComplexModel, window: Window) -> Vec<Vec<Mode>> {
    let n = s.dim();
    if window == Window::Invariant {
        return vec![vec![vec![0; n]]];
    }
    let bound = window.bound();
    let mut support: BTreeSet<Mode> = s.j.modes();
    support.extend(s.n.modes());
    support.insert(vec![0; n]);
    let diffs: BTreeSet<Mode> = support
        .iter()
        .flat_map(|a| support.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x - y).collect::<Mode>()))
        .filter(|d| d.iter().any(|&x| x != 0))
        .collect();
    let modes = box_modes(n, bound);
    let index: HashMap<&Mode, usize> = modes.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut parent: Vec<usize> = (0..modes.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, m) in modes.iter().enumerate() {
        for d in &diffs {
            let t: Mode = m.iter().zip(d).map(|(a, b)| a + b).collect();
            if let Some(&k) = index.get(&t) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Mode>> = BTreeMap::new();
    for (i, m) in modes.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(m.clone());
    }
    groups.into_values().collect()
}

type Key = (MultiIndex, Mode);
type Column = BTreeMap<Key, GR>;

/// Complex basis `e^I exp(i m·x)` of one block in one degree and bound.
#[derive(Debug)]
struct Space {
    basis: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl Space {
    fn len(&self) -> usize {
        self.basis.len()
    }
}

fn form_to_column(f: &Form) -> Column {
    let mut col = Column::new();
    for (idx, p) in f.components() {
        for (m, c) in p.terms() {
            col.insert((idx.clone(), m.clone()), c.clone());
        }
    }
    col
}

fn basis_form(model: &Arc<Model>, key: &Key) -> Form {
    Form::monomial(model, &key.0, TrigPoly::monomial(key.1.clone(), GR::one()))
}

/// Per-block computation context with memoized operator columns.
struct Block<'a> {
    s: &'a AlmostComplexModel,
    modes: Vec<Mode>,
    spaces: RefCell<HashMap<(usize, i64), Rc<Space>>>,
    columns: RefCell<HashMap<(Operator, usize, i64), Rc<Vec<Column>>>>,
}

impl<'a> Block<'a> {
    fn new(s: &'a AlmostComplexModel, modes: Vec<Mode>) -> Self {
        Self { s, modes, spaces: RefCell::new(HashMap::new()), columns: RefCell::new(HashMap::new()) }
    }

    fn space(&self, k: usize, bound: i64) -> Rc<Space> {
        if let Some(sp) = self.spaces.borrow().get(&(k, bound)) {
            return sp.clone();
        }
        let n = self.s.dim();
        let mut basis = Vec::new();
        if bound >= 0 && k <= n {
            for idx in multi_indices(n, k) {
                for m in self.modes.iter().filter(|m| norm(m) <= bound) {
                    basis.push((idx.clone(), m.clone()));
                }
            }
        }
        let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let sp = Rc::new(Space { basis, index });
        self.spaces.borrow_mut().insert((k, bound), sp.clone());
        sp
    }

    fn columns(&self, op: Operator, k: usize, bound: i64) -> Rc<Vec<Column>> {
        if let Some(c) = self.columns.borrow().get(&(op, k, bound)) {
            return c.clone();
        }
        let sp = self.space(k, bound);
        let cols: Vec<Column> = sp
            .basis
            .iter()
            .map(|key| form_to_column(&op.apply(self.s, &basis_form(&self.s.model, key))))
            .collect();
        let cols = Rc::new(cols);
        self.columns.borrow_mut().insert((op, k, bound), cols.clone());
        cols
    }

    /// `⋂ ker op` on `space(k, bound)`, with every codomain entry kept.
    fn kernel(&self, ops: &[Operator], k: usize, bound: i64) -> Subspace {
        let sp = self.space(k, bound);
        if ops.is_empty() {
            return Subspace::full(sp.len());
        }
        let mut row_index: HashMap<(usize, &Key), usize> = HashMap::new();
        let all: Vec<Rc<Vec<Column>>> = ops.iter().map(|op| self.columns(*op, k, bound)).collect();
        let mut sparse_cols = vec![SparseVec::new(); sp.len()];
        for (t, cols) in all.iter().enumerate() {
            for (j, col) in cols.iter().enumerate() {
                for (key, c) in col {
                    let len = row_index.len();
                    let r = *row_index.entry((t, key)).or_insert(len);
                    sparse_cols[j].0.insert(r, c.clone());
                }
            }
        }
        kernel_basis(&ExactMatrix::from_columns(row_index.len(), &sparse_cols))
    }

    /// Image of `sub ⊆ space(k, bound)` under `op`, inside `space(k', target)`.
    fn image(&self, op: Operator, sub: &Subspace, k: usize, bound: i64, target: i64) -> Result<Subspace, ComplexError> {
        let tk = k + op.degree_shift();
        let tsp = self.space(tk, target);
        if sub.dim() == 0 {
            return Ok(Subspace::zero(tsp.len()));
        }
        let cols = self.columns(op, k, bound);
        let mut vecs = Vec::with_capacity(sub.dim());
        for v in sub.basis() {
            let mut out = SparseVec::new();
            for (j, c) in &v.0 {
                for (key, x) in &cols[*j] {
                    let r = *tsp
                        .index
                        .get(key)
                        .ok_or_else(|| ComplexError::WindowOverflow(format!("{op:?} in degree {k}")))?;
                    out.add_entry(r, &(c * x));
                }
            }
            vecs.push(out);
        }
        Ok(Subspace::span(tsp.len(), vecs))
    }

    fn full(&self, k: usize, bound: i64) -> Subspace {
        Subspace::full(self.space(k, bound).len())
    }

    fn restricting(&self, theory: Theory) -> Vec<Operator> {
        match theory {
            Theory::DeRham => vec![],
            Theory::J => vec![Operator::LJ],
            Theory::N | Theory::Ntwist => vec![Operator::LN],
        }
    }

    /// (numerator, denominator) in `space(k, N)`.
    fn cohomology(&self, theory: Theory, k: usize, nb: i64) -> Result<(Subspace, Subspace), ComplexError> {
        let n = self.s.dim();
        let restrict = self.restricting(theory);
        let (diff, num_ops) = match theory {
            Theory::Ntwist => (Operator::LJ, vec![Operator::LN, Operator::LJ]),
            _ => {
                let mut v = restrict.clone();
                v.push(Operator::D);
                (Operator::D, v)
            }
        };
        let num = if k <= n { self.kernel(&num_ops, k, nb) } else { Subspace::zero(0) };
        let den = if k == 0 {
            Subspace::zero(num.ambient())
        } else {
            let b = nb - diff.growth(self.s);
            if b < 0 {
                Subspace::zero(num.ambient())
            } else {
                let src = self.kernel(&restrict, k - 1, b);
                self.image(diff, &src, k - 1, b, nb)?
            }
        };
        ensure_contained(&num, &den, &format!("{theory} cohomology, degree {k}"))?;
        Ok((num, den))
    }

    fn lemma(&self, k: usize, nb: i64) -> Result<(Subspace, Subspace), ComplexError> {
        let g = Operator::LJ.growth(self.s);
        let amb = self.space(k, nb).len();
        let closed = self.kernel(&[Operator::D], k, nb);
        let im_lj = if k >= 1 && nb - g >= 0 {
            self.image(Operator::LJ, &self.full(k - 1, nb - g), k - 1, nb - g, nb)?
        } else {
            Subspace::zero(amb)
        };
        let num = im_lj.intersect(&closed).expect("same ambient");
        let den = if k >= 2 && nb - g >= 0 {
            self.image(Operator::DLJ, &self.full(k - 2, nb - g), k - 2, nb - g, nb)?
        } else {
            Subspace::zero(amb)
        };
        ensure_contained(&num, &den, &format!("dL_J quotient, degree {k}"))?;
        Ok((num, den))
    }

    /// (rank, source, target) of `H^k_J → H^k_dR`.
    fn phi(&self, k: usize, nb: i64) -> Result<(usize, usize, usize), ComplexError> {
        let (zj, bj) = self.cohomology(Theory::J, k, nb)?;
        let (zd, bd) = self.cohomology(Theory::DeRham, k, nb)?;
        ensure_contained(&zd, &zj, "H_J cocycles inside closed forms")?;
        ensure_contained(&bd, &bj, "H_J coboundaries inside exact forms")?;
        let sum = zj.sum(&bd).expect("same ambient");
        Ok((sum.dim() - bd.dim(), zj.dim() - bj.dim(), zd.dim() - bd.dim()))
    }

    fn connecting(&self, k: usize, nb: i64) -> Result<usize, ComplexError> {
        if k == 0 {
            return Ok(0);
        }
        let n = self.s.dim();
        let amb = self.space(k, nb).len();
        // v ∈ V^{k-1}_N, u over every mode L_J v reaches
        let vsp = self.space(k - 1, nb);
        let lj = self.columns(Operator::LJ, k - 1, nb);
        let umodes: BTreeSet<Mode> = lj.iter().flat_map(|c| c.keys().map(|(_, m)| m.clone())).collect();
        let ubasis: Vec<Key> = multi_indices(n, k - 1)
            .into_iter()
            .flat_map(|i| umodes.iter().map(move |m| (i.clone(), m.clone())))
            .collect();
        let ducols: Vec<Column> =
            ubasis.iter().map(|key| form_to_column(&ext_d(&basis_form(&self.s.model, key)))).collect();
        let mut rows: HashMap<Key, usize> = HashMap::new();
        let mut cols: Vec<SparseVec> = Vec::new();
        let minus = -GR::one();
        for col in lj.iter() {
            cols.push(to_sparse(col, &mut rows, &GR::one()));
        }
        for col in &ducols {
            cols.push(to_sparse(col, &mut rows, &minus));
        }
        let ker = kernel_basis(&ExactMatrix::from_columns(rows.len(), &cols));
        let vs: Vec<SparseVec> = ker
            .basis()
            .into_iter()
            .map(|x| SparseVec(x.0.into_iter().filter(|(i, _)| *i < vsp.len()).collect()))
            .collect();
        let vspan = Subspace::span(vsp.len(), vs);
        let dv = self.image(Operator::D, &vspan, k - 1, nb, nb)?;
        let dker = self.image(Operator::D, &self.kernel(&[Operator::LJ], k - 1, nb), k - 1, nb, nb)?;
        let num = dv.sum(&dker).expect("same ambient");
        debug_assert_eq!(num.ambient(), amb);
        ensure_contained(&num, &dker, &format!("connecting image, degree {k}"))?;
        Ok(num.dim() - dker.dim())
    }

    fn to_form(&self, v: &SparseVec, k: usize, bound: i64) -> Form {
        let sp = self.space(k, bound);
        let mut f = Form::zero(&self.s.model, k);
        for (i, c) in &v.0 {
            let key = &sp.basis[*i];
            let t = Form::monomial(&self.s.model, &key.0, TrigPoly::monomial(key.1.clone(), c.clone()));
            f = &f + &t;
        }
        f
    }
}

fn to_sparse(col: &Column, rows: &mut HashMap<Key, usize>, scale: &GR) -> SparseVec {
    let mut v = SparseVec::new();
    for (key, c) in col {
        let len = rows.len();
        let r = *rows.entry(key.clone()).or_insert(len);
        v.add_entry(r, &(c * scale));
    }
    v
}

fn ensure_contained(num: &Subspace, den: &Subspace, context: &str) -> Result<(), ComplexError> {
    quotient_dim(num, den)
        .map(|_| ())
        .map_err(|source| ComplexError::NotASubspace { context: context.to_string(), source })
}

fn check_degree(s: &AlmostComplexModel, k: usize) -> Result<(), ComplexError> {
    if k > s.dim() {
        Err(ComplexError::DegreeOutOfRange(k))
    } else {
        Ok(())
    }
}

/// Runs `f` on every block in parallel and sums the results.
fn over_blocks<T, F>(s: &AlmostComplexModel, window: Window, zero: T, f: F) -> Result<T, ComplexError>
where
    T: Send + std::ops::Add<Output = T> + Clone,
    F: Fn(&Block) -> Result<T, ComplexError> + Sync,
{
    check_window(&s.model, window)?;
    let blocks = mode_blocks(s, window);
    let parts: Vec<Result<T, ComplexError>> = blocks
        .into_par_iter()
        .map(|modes| {
            let b = Block::new(s, modes);
            f(&b)
        })
        .collect();
    let mut acc = zero;
    for p in parts {
        acc = acc + p?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Dims(usize, usize);

impl std::ops::Add for Dims {
    type Output = Dims;
    fn add(self, o: Dims) -> Dims {
        Dims(self.0 + o.0, self.1 + o.1)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Triple(usize, usize, usize);

impl std::ops::Add for Triple {
    type Output = Triple;
    fn add(self, o: Triple) -> Triple {
        Triple(self.0 + o.0, self.1 + o.1, self.2 + o.2)
    }
}

/// Dimensions at one window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowDims {
    #[serde(rename = "N")]
    pub window: Window,
    pub numerator_dim: usize,
    pub denominator_dim: usize,
    pub dim: usize,
    /// Window of the codomain the defining operators were evaluated in.
    pub codomain_window: Option<i64>,
    /// Window of the domain used for the incoming differential.
    pub image_domain_window: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CohomologyReport {
    pub model: String,
    pub theory: Theory,
    pub degree: usize,
    pub windows: Vec<WindowDims>,
    pub stabilized: bool,
    #[serde(skip)]
    pub representatives: Vec<Form>,
}

impl CohomologyReport {
    pub fn dims(&self) -> Vec<usize> {
        self.windows.iter().map(|w| w.dim).collect()
    }

    pub fn last_dim(&self) -> usize {
        self.windows.last().map_or(0, |w| w.dim)
    }
}

fn theory_growth(s: &AlmostComplexModel, theory: Theory) -> (i64, i64) {
    // (codomain growth of the restricting operators, growth of the incoming differential)
    match theory {
        Theory::DeRham => (0, 0),
        Theory::J => (Operator::LJ.growth(s), 0),
        Theory::N => (Operator::LN.growth(s), 0),
        Theory::Ntwist => (Operator::LN.growth(s).max(Operator::LJ.growth(s)), Operator::LJ.growth(s)),
    }
}

fn window_dims(s: &AlmostComplexModel, theory: Theory, k: usize, window: Window) -> Result<WindowDims, ComplexError> {
    check_degree(s, k)?;
    let nb = window.bound();
    let d = over_blocks(s, window, Dims::default(), |b| {
        let (num, den) = b.cohomology(theory, k, nb)?;
        Ok(Dims(num.dim(), den.dim()))
    })?;
    let (cg, ig) = theory_growth(s, theory);
    let torus = window != Window::Invariant;
    Ok(WindowDims {
        window,
        numerator_dim: d.0,
        denominator_dim: d.1,
        dim: d.0 - d.1,
        codomain_window: torus.then_some(nb + cg),
        image_domain_window: torus.then_some(nb - ig),
    })
}

/// Cohomology of one theory in degree `k` over a list of windows.
pub fn cohomology(
    s: &AlmostComplexModel,
    theory: Theory,
    k: usize,
    windows: &[Window],
) -> Result<CohomologyReport, ComplexError> {
    let mut out = Vec::new();
    for w in windows {
        out.push(window_dims(s, theory, k, *w)?);
    }
    let stabilized = match out.len() {
        0 => false,
        1 => out[0].window == Window::Invariant,
        l => out[l - 1].dim == out[l - 2].dim,
    };
    let representatives = match windows.last() {
        Some(Window::Invariant) => representatives(s, theory, k)?,
        _ => vec![],
    };
    Ok(CohomologyReport {
        model: s.name().to_string(),
        theory,
        degree: k,
        windows: out,
        stabilized,
        representatives,
    })
}

/// Numerator basis vectors not in the denominator span (invariant models).
fn representatives(s: &AlmostComplexModel, theory: Theory, k: usize) -> Result<Vec<Form>, ComplexError> {
    let b = Block::new(s, vec![vec![0; s.dim()]]);
    let (num, den) = b.cohomology(theory, k, 0)?;
    let mut acc = den;
    let mut reps = Vec::new();
    for v in num.basis() {
        if !acc.contains(&v) {
            acc = acc.sum(&Subspace::span(acc.ambient(), [v.clone()])).expect("same ambient");
            reps.push(b.to_form(&v, k, 0));
        }
    }
    Ok(reps)
}

/// Natural map between two cohomologies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapReport {
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl MapReport {
    pub fn new(rank: usize, source_dim: usize, target_dim: usize) -> Self {
        assert!(rank <= source_dim.min(target_dim));
        Self { source_dim, target_dim, rank, injective: rank == source_dim, surjective: rank == target_dim }
    }

    pub fn bijective(&self) -> bool {
        self.injective && self.surjective
    }
}

/// `φ^k : H^k_J → H^k_dR`.
pub fn phi_map(s: &AlmostComplexModel, k: usize, window: Window) -> Result<MapReport, ComplexError> {
    check_degree(s, k)?;
    let nb = window.bound();
    let t = over_blocks(s, window, Triple::default(), |b| {
        let (r, src, tgt) = b.phi(k, nb)?;
        Ok(Triple(r, src, tgt))
    })?;
    Ok(MapReport::new(t.0, t.1, t.2))
}

/// Quotient dimension of `(im L_J ∩ ker d) / im dL_J` in degree `k`.
pub fn lemma_check(s: &AlmostComplexModel, k: usize, window: Window) -> Result<usize, ComplexError> {
    check_degree(s, k)?;
    let nb = window.bound();
    let d = over_blocks(s, window, Dims::default(), |b| {
        let (num, den) = b.lemma(k, nb)?;
        Ok(Dims(num.dim(), den.dim()))
    })?;
    Ok(d.0 - d.1)
}

/// Dimension of `({dv : L_J v ∈ im d} + d ker L_J) / d ker L_J` in degree `k`.
pub fn connecting_image(s: &AlmostComplexModel, k: usize, window: Window) -> Result<usize, ComplexError> {
    check_degree(s, k)?;
    let nb = window.bound();
    over_blocks(s, window, 0usize, |b| b.connecting(k, nb))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosscheckRow {
    pub degree: usize,
    pub lemma_quotient: usize,
    pub lemma_holds: bool,
    pub phi_injective: bool,
    pub phi_prev_surjective: bool,
    pub criteria_hold: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub model: String,
    pub window: Window,
    pub rows: Vec<CrosscheckRow>,
    pub violations: Vec<usize>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares the dL_J quotient with the injectivity/surjectivity criterion in
/// every degree.
pub fn theorem313_crosscheck(s: &AlmostComplexModel, window: Window) -> Result<CrosscheckReport, ComplexError> {
    let n = s.dim();
    let phis: Vec<MapReport> = (0..=n).map(|k| phi_map(s, k, window)).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for k in 0..=n {
        let q = lemma_check(s, k, window)?;
        let inj = phis[k].injective;
        let prev = if k == 0 { true } else { phis[k - 1].surjective };
        let criteria = inj && prev;
        let agree = (q == 0) == criteria;
        if !agree {
            violations.push(k);
        }
        rows.push(CrosscheckRow {
            degree: k,
            lemma_quotient: q,
            lemma_holds: q == 0,
            phi_injective: inj,
            phi_prev_surjective: prev,
            criteria_hold: criteria,
            agree,
        });
    }
    Ok(CrosscheckReport { model: s.name().to_string(), window, rows, violations })
}

/// Real basis element: `e^I · cos(m·x)`, `e^I · sin(m·x)`, or `e^I` for `m = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RealBasisElement {
    pub index: MultiIndex,
    pub mode: Mode,
    pub part: RealPart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RealPart {
    Cos,
    Sin,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisDescriptor {
    pub degree: usize,
    pub window: Window,
    pub elements: Vec<RealBasisElement>,
}

impl BasisDescriptor {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn form(&self, model: &Arc<Model>, i: usize) -> Form {
        let e = &self.elements[i];
        let f = if e.mode.iter().all(|&x| x == 0) {
            TrigPoly::one(model.n())
        } else {
            match e.part {
                RealPart::Cos => TrigPoly::cos_mode(e.mode.clone()),
                RealPart::Sin => TrigPoly::sin_mode(e.mode.clone()),
            }
        };
        Form::monomial(model, &e.index, f)
    }
}

/// Real basis of `Ω^k` in a window, ordered by multi-index, mode and part.
pub fn basis_window(model: &Model, k: usize, window: Window) -> Result<BasisDescriptor, ComplexError> {
    check_window(model, window)?;
    let n = model.n();
    if k > n {
        return Err(ComplexError::DegreeOutOfRange(k));
    }
    let modes: Vec<Mode> =
        box_modes(n, window.bound()).into_iter().filter(|m| m.iter().all(|&x| x == 0) || is_positive(m)).collect();
    let mut elements = Vec::new();
    for idx in multi_indices(n, k) {
        for m in &modes {
            elements.push(RealBasisElement { index: idx.clone(), mode: m.clone(), part: RealPart::Cos });
            if m.iter().any(|&x| x != 0) {
                elements.push(RealBasisElement { index: idx.clone(), mode: m.clone(), part: RealPart::Sin });
            }
        }
    }
    Ok(BasisDescriptor { degree: k, window, elements })
}

/// Operator matrix in real bases, from `window` to the grown codomain window.
#[derive(Clone, Debug)]
pub struct AssembledOperator {
    pub operator: Operator,
    pub matrix: ExactMatrix,
    pub domain: BasisDescriptor,
    pub codomain: BasisDescriptor,
    pub codomain_window: Window,
}

pub fn assemble(s: &AlmostComplexModel, op: Operator, k: usize, window: Window) -> Result<AssembledOperator, ComplexError> {
    let domain = basis_window(&s.model, k, window)?;
    let grown = match window {
        Window::Invariant => Window::Invariant,
        Window::Modes(nn) => Window::Modes(nn + op.growth(s) as usize),
    };
    let tk = k + op.degree_shift();
    let codomain = if tk <= s.dim() {
        basis_window(&s.model, tk, grown)?
    } else {
        BasisDescriptor { degree: tk, window: grown, elements: vec![] }
    };
    let index: HashMap<(&MultiIndex, &Mode, RealPart), usize> =
        codomain.elements.iter().enumerate().map(|(i, e)| ((&e.index, &e.mode, e.part), i)).collect();
    let two = GR::from_int(2);
    let cols: Vec<SparseVec> = (0..domain.len())
        .into_par_iter()
        .map(|c| {
            let img = op.apply(s, &domain.form(&s.model, c));
            let mut v = SparseVec::new();
            for (idx, f) in img.components() {
                for (m, coef) in f.terms() {
                    let zero = m.iter().all(|&x| x == 0);
                    if zero {
                        v.add_entry(index[&(idx, m, RealPart::Cos)], coef);
                    } else if is_positive(m) {
                        // c e^{imx} + conj(c) e^{-imx} = 2 Re c cos - 2 Im c sin
                        let re = GR::real(coef.re.clone());
                        let im = GR::real(-coef.im.clone());
                        v.add_entry(index[&(idx, m, RealPart::Cos)], &(&re * &two));
                        v.add_entry(index[&(idx, m, RealPart::Sin)], &(&im * &two));
                    }
                }
            }
            v
        })
        .collect();
    let matrix = ExactMatrix::from_columns(codomain.len(), &cols);
    Ok(AssembledOperator { operator: op, matrix, domain, codomain, codomain_window: grown })
}

/// Real embedding of a smaller window's basis into a larger one.
pub fn embed_real(from: &BasisDescriptor, into: &BasisDescriptor) -> ExactMatrix {
    let index: HashMap<&RealBasisElement, usize> = into.elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let cols: Vec<SparseVec> = from
        .elements
        .iter()
        .map(|e| {
            let mut v = SparseVec::new();
            v.add_entry(index[e], &GR::one());
            v
        })
        .collect();
    ExactMatrix::from_columns(into.len(), &cols)
}

/// Real rational entries only (sanity check for assembled real operators).
pub fn is_real_matrix(m: &ExactMatrix) -> bool {
    m.row_vectors().iter().all(|r| r.0.values().all(|c| c.im == Rational::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::rat_int;
    use crate::linalg::image_basis;
    use crate::models::{abelian, example27, flat_kahler_torus, iwasawa, kodaira_thurston, t4_nonstandard};

    fn sin1() -> TrigPoly {
        TrigPoly::sin_mode(vec![1, 0, 0, 0])
    }

    #[test]
    fn basis_sizes() {
        let iw = iwasawa().unwrap();
        assert_eq!(basis_window(&iw.model, 1, Window::Invariant).unwrap().len(), 6);
        let t = flat_kahler_torus(4).unwrap();
        assert_eq!(basis_window(&t.model, 0, Window::Modes(0)).unwrap().len(), 1);
        assert_eq!(basis_window(&t.model, 1, Window::Modes(1)).unwrap().len(), 324);
        assert!(basis_window(&t.model, 1, Window::Invariant).is_err());
        assert!(basis_window(&iw.model, 1, Window::Modes(1)).is_err());
    }

    #[test]
    fn blocks_partition_window() {
        let s = example27(sin1()).unwrap();
        let blocks = mode_blocks(&s, Window::Modes(2));
        assert_eq!(blocks.iter().map(|b| b.len()).sum::<usize>(), 625);
        assert_eq!(blocks.len(), 125);
        let f = flat_kahler_torus(4).unwrap();
        assert_eq!(mode_blocks(&f, Window::Modes(1)).len(), 81);
    }

    #[test]
    fn assemble_examples() {
        let t = flat_kahler_torus(4).unwrap();
        let d0 = assemble(&t, Operator::D, 0, Window::Modes(0)).unwrap();
        assert!(d0.matrix.is_zero());
        // L_J = ι_J d on functions, matrix level
        let s = t4_nonstandard(sin1(), TrigPoly::zero(4)).unwrap();
        let w = Window::Modes(1);
        let lj = assemble(&s, Operator::LJ, 0, w).unwrap();
        let d = assemble(&s, Operator::D, 0, w).unwrap();
        let ij = assemble(&s, Operator::IotaJ, 1, w).unwrap();
        assert_eq!(lj.matrix, ij.matrix.mul(&d.matrix));
        assert!(is_real_matrix(&lj.matrix));
    }

    #[test]
    fn assemble_lj_squared() {
        // L_J(k+1) L_J(k) = -L_N(k) after embedding codomains
        let s = example27(sin1()).unwrap();
        let w = Window::Modes(1);
        let a = assemble(&s, Operator::LJ, 0, w).unwrap();
        let b = assemble(&s, Operator::LJ, 1, a.codomain_window).unwrap();
        let ln = assemble(&s, Operator::LN, 0, w).unwrap();
        let lhs = b.matrix.mul(&a.matrix);
        let emb = embed_real(&ln.codomain, &b.codomain);
        let rhs = emb.mul(&ln.matrix);
        let neg: Vec<SparseVec> = rhs.columns().iter().map(|c| c.scale(&-GR::one())).collect();
        assert_eq!(lhs, ExactMatrix::from_columns(rhs.rows(), &neg));
    }

    #[test]
    fn de_rham_torus_real_route() {
        // independent route: real bases, full window, rank computations
        let t = flat_kahler_torus(4).unwrap();
        let w = Window::Modes(1);
        let mut dims = vec![];
        for k in 0..=4 {
            let z = if k < 4 { kernel_basis(&assemble(&t, Operator::D, k, w).unwrap().matrix).dim() } else { 81 };
            let b = if k > 0 { image_basis(&assemble(&t, Operator::D, k - 1, w).unwrap().matrix).dim() } else { 0 };
            dims.push(z - b);
        }
        assert_eq!(dims, vec![1, 4, 6, 4, 1]);
        for k in 0..=4 {
            let r = cohomology(&t, Theory::DeRham, k, &[w]).unwrap();
            assert_eq!(r.last_dim(), dims[k]);
        }
    }

    #[test]
    fn lie_algebra_basics() {
        let w = Window::Invariant;
        let iw = iwasawa().unwrap();
        let dr: Vec<usize> = (0..=6).map(|k| cohomology(&iw, Theory::DeRham, k, &[w]).unwrap().last_dim()).collect();
        // Betti numbers of the Iwasawa manifold
        assert_eq!(dr, vec![1, 4, 8, 10, 8, 4, 1]);
        let ab = abelian(4).unwrap();
        for k in 0..=4 {
            assert_eq!(lemma_check(&ab, k, w).unwrap(), 0);
            assert_eq!(connecting_image(&ab, k, w).unwrap(), 0);
        }
        assert!(theorem313_crosscheck(&kodaira_thurston().unwrap(), w).unwrap().passed());
    }

    #[test]
    fn representatives_are_cocycles() {
        let iw = iwasawa().unwrap();
        let r = cohomology(&iw, Theory::J, 1, &[Window::Invariant]).unwrap();
        assert_eq!(r.representatives.len(), r.last_dim());
        for f in &r.representatives {
            assert!(ext_d(f).is_zero());
            assert!(lie_vform(&iw.j, f).unwrap().is_zero());
        }
    }

    #[test]
    fn constant_example27_matches_de_rham() {
        let s = example27(TrigPoly::from_rational(4, rat_int(2))).unwrap();
        for k in 0..=2 {
            let a = cohomology(&s, Theory::N, k, &[Window::Modes(1)]).unwrap();
            let b = cohomology(&s, Theory::DeRham, k, &[Window::Modes(1)]).unwrap();
            assert_eq!(a.dims(), b.dims());
        }
    }
}
