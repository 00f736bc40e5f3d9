//! Algebraic and Nijenhuis–Lie derivations, the Nijenhuis tensor, the action
//! of J on forms, the twisted differential and a seeded identity suite.

use std::sync::Arc;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coeffring::{rat, GaussianRational, TrigPoly};
use crate::frames::{
    ext_d, multi_indices, same_model, vf_bracket, Form, FrameError, FrameKind, Model, VectorField, VectorForm,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("J does not square to -I")]
    NotAlmostComplex,
}

/// `ι_K α = Σ_j K^j ∧ ι_{e_j} α`.
pub fn iota_vform(k: &VectorForm, alpha: &Form) -> Result<Form, DerivationError> {
    same_model(k.model(), alpha.model())?;
    let m = alpha.model();
    let deg = (alpha.degree() + k.degree()).saturating_sub(1);
    let mut out = Form::zero(m, deg);
    if alpha.degree() == 0 {
        return Ok(out);
    }
    for j in 0..m.n() {
        let kj = k.part(j);
        if kj.is_zero() {
            continue;
        }
        let c = alpha.interior_frame(j);
        if c.is_zero() {
            continue;
        }
        out = &out + &kj.wedge_unchecked(&c);
    }
    Ok(out)
}

/// `L_K α = ι_K dα - (-1)^{k-1} d ι_K α`.
pub fn lie_vform(k: &VectorForm, alpha: &Form) -> Result<Form, DerivationError> {
    let a = iota_vform(k, &ext_d(alpha))?;
    let b = ext_d(&iota_vform(k, alpha)?);
    // the degree-0 case of ι_K α is the zero form of degree k-1
    if k.degree() % 2 == 1 {
        Ok(&a - &b)
    } else {
        Ok(&a + &b)
    }
}

fn check_acs(j: &VectorForm) -> Result<(), DerivationError> {
    if j.is_almost_complex() {
        Ok(())
    } else {
        Err(DerivationError::NotAlmostComplex)
    }
}

/// `N(X,Y) = [X,Y] + J[JX,Y] + J[X,JY] - [JX,JY]` on frame pairs.
pub fn nijenhuis(j: &VectorForm) -> Result<VectorForm, DerivationError> {
    check_acs(j)?;
    Ok(nijenhuis_unchecked(j))
}

pub(crate) fn nijenhuis_unchecked(j: &VectorForm) -> VectorForm {
    let m = j.model().clone();
    VectorForm::from_frame_values(&m, 2, |idx| {
        let x = VectorField::frame(&m, idx[0]);
        let y = VectorField::frame(&m, idx[1]);
        let jx = j.apply(&x);
        let jy = j.apply(&y);
        let br = |a: &VectorField, b: &VectorField| vf_bracket(a, b).expect("same model");
        br(&x, &y)
            .add(&j.apply(&br(&jx, &y)))
            .add(&j.apply(&br(&x, &jy)))
            .add(&br(&jx, &jy).neg())
    })
}

/// `(J·N)(X,Y) = J(N(JX, JY))`.
pub fn jn_twist_tensor(j: &VectorForm, n: &VectorForm) -> Result<VectorForm, DerivationError> {
    same_model(j.model(), n.model())?;
    let m = j.model().clone();
    let jcols: Vec<VectorField> = (0..m.n()).map(|c| j.eval_frame(&[c])).collect();
    Ok(VectorForm::from_frame_values(&m, 2, |idx| {
        let (jx, jy) = (&jcols[idx[0]], &jcols[idx[1]]);
        // N(JX, JY) by bilinear expansion over frame pairs
        let mut acc = VectorField::zero(&m);
        for (a, xa) in jx.components().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in jy.components().iter().enumerate() {
                if yb.is_zero() || a == b {
                    continue;
                }
                acc = acc.add(&n.eval_frame(&[a, b]).scale_fn(&(xa * yb)));
            }
        }
        j.apply(&acc)
    }))
}

/// The algebra automorphism with `(J·α)(X_1, …) = α(JX_1, …)`.
pub fn form_j_action(j: &VectorForm, alpha: &Form) -> Result<Form, DerivationError> {
    same_model(j.model(), alpha.model())?;
    let m = alpha.model();
    let mut out = Form::zero(m, alpha.degree());
    for (idx, f) in alpha.components() {
        let mut term = Form::function(m, f.clone());
        for &a in idx {
            term = term.wedge_unchecked(j.part(a));
        }
        out = &out + &term;
    }
    Ok(out)
}

/// `J^{-1}·α`, using `J^{-1} = -J` on vectors.
pub fn form_j_inverse_action(j: &VectorForm, alpha: &Form) -> Result<Form, DerivationError> {
    let a = form_j_action(j, alpha)?;
    Ok(if alpha.degree() % 2 == 1 { -&a } else { a })
}

/// `d^c α = J^{-1} d (J·α)`.
pub fn dc(j: &VectorForm, alpha: &Form) -> Result<Form, DerivationError> {
    form_j_inverse_action(j, &ext_d(&form_j_action(j, alpha)?))
}

/// Same twist with the opposite convention `J d J^{-1}`.
pub fn dc_pullback_inverse(j: &VectorForm, alpha: &Form) -> Result<Form, DerivationError> {
    form_j_action(j, &ext_d(&form_j_inverse_action(j, alpha)?))
}

/// `-L_J α - ι_{J·N} α`.
pub fn dks_rhs(j: &VectorForm, jn: &VectorForm, alpha: &Form) -> Result<Form, DerivationError> {
    let a = lie_vform(j, alpha)?;
    let b = iota_vform(jn, alpha)?;
    Ok(-&(&a + &b))
}

/// Result of one identity family.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityResult {
    pub name: String,
    pub checks: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityReport {
    pub model: String,
    pub seed: u64,
    pub samples: usize,
    pub results: Vec<IdentityResult>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

pub const IDENTITY_NAMES: [&str; 7] = [
    "derivation",
    "alg_derivation_on_1forms",
    "d_commutes",
    "lj_squared",
    "lj_ln_commute",
    "lj_special",
    "dks",
];

/// Pseudorandom real form: each component nonzero with probability 1/2;
/// coefficients use modes with sup-norm at most 1 on the torus and are
/// constants on Lie algebra frames.
pub fn random_form(model: &Arc<Model>, degree: usize, rng: &mut impl Rng) -> Form {
    let n = model.n();
    let mut comps = Vec::new();
    for idx in multi_indices(n, degree) {
        if rng.gen_bool(0.5) {
            comps.push((idx, random_function(model, rng)));
        }
    }
    Form::from_components(model, degree, comps)
}

pub fn random_function(model: &Arc<Model>, rng: &mut impl Rng) -> TrigPoly {
    let n = model.n();
    let small = |rng: &mut dyn rand::RngCore| rat(rng.gen_range(-3..=3), rng.gen_range(1..=2));
    match model.kind() {
        FrameKind::LieAlgebra => TrigPoly::from_rational(n, small(rng)),
        FrameKind::CoordinateTorus => {
            let mut p = TrigPoly::from_rational(n, small(rng));
            for _ in 0..rng.gen_range(0..=2) {
                let mode: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
                let c = GaussianRational::new(small(rng), small(rng));
                let t = TrigPoly::monomial(mode, c);
                p = &p + &(&t + &t.conj());
            }
            p
        }
    }
}

struct Checker {
    name: &'static str,
    checks: usize,
    failure: Option<String>,
}

impl Checker {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failure: None }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(witness());
        }
    }

    fn merge(&mut self, other: Checker) {
        self.checks += other.checks;
        if self.failure.is_none() {
            self.failure = other.failure;
        }
    }

    fn finish(self) -> IdentityResult {
        IdentityResult {
            name: self.name.to_string(),
            checks: self.checks,
            passed: self.failure.is_none(),
            counterexample: self.failure,
        }
    }
}

fn wedge_sign(parity: usize) -> GaussianRational {
    if parity % 2 == 0 {
        GaussianRational::one()
    } else {
        -GaussianRational::one()
    }
}

/// Forms spanning the window `|mode| ≤ 1` (torus) or the invariant forms,
/// in degree `k`.
pub fn spanning_forms(model: &Arc<Model>, k: usize) -> Vec<Form> {
    let n = model.n();
    let modes: Vec<Vec<i64>> = match model.kind() {
        FrameKind::LieAlgebra => vec![vec![0; n]],
        FrameKind::CoordinateTorus => crate::complexes::box_modes(n, 1),
    };
    let mut out = Vec::new();
    for idx in multi_indices(n, k) {
        for m in &modes {
            let f = TrigPoly::monomial(m.clone(), GaussianRational::one());
            out.push(Form::monomial(model, &idx, f));
        }
    }
    out
}

/// Runs the seven identity families on `samples` random forms per degree.
/// `n_override` replaces the computed Nijenhuis tensor (used for mutation
/// testing).
pub fn identity_suite(
    j: &VectorForm,
    samples: usize,
    seed: u64,
    n_override: Option<&VectorForm>,
) -> Result<IdentityReport, DerivationError> {
    check_acs(j)?;
    let model = j.model().clone();
    let n = model.n();
    let nt = match n_override {
        Some(t) => t.clone(),
        None => nijenhuis_unchecked(j),
    };
    let jn = jn_twist_tensor(j, &nt)?;

    // one deterministic rng per (degree, sample)
    let tasks: Vec<(usize, usize)> = (0..=n).flat_map(|k| (0..samples).map(move |s| (k, s))).collect();
    let per_sample: Vec<[Checker; 7]> = tasks
        .par_iter()
        .map(|&(k, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 32) ^ (s as u64).wrapping_mul(0x9E37_79B9));
            sample_checks(j, &nt, &jn, k, &mut rng)
        })
        .collect();

    let mut totals = IDENTITY_NAMES.map(Checker::new);
    for group in per_sample {
        for (t, c) in totals.iter_mut().zip(group) {
            t.merge(c);
        }
    }

    // operator-level (L_J)^2 = -L_N on a spanning set of the mode-1 window
    let spanning: Vec<Form> = (0..=n).flat_map(|k| spanning_forms(&model, k)).collect();
    let op_failures: Vec<Option<String>> = spanning
        .par_iter()
        .map(|a| {
            let lhs = lie_vform(j, &lie_vform(j, a).ok()?).ok()?;
            let rhs = -&lie_vform(&nt, a).ok()?;
            if lhs == rhs {
                None
            } else {
                Some(format!("(L_J)^2 + L_N nonzero on basis form {a}"))
            }
        })
        .collect();
    for f in op_failures {
        totals[3].check(f.is_none(), || f.unwrap_or_default());
    }

    Ok(IdentityReport {
        model: model.name().to_string(),
        seed,
        samples,
        results: totals.into_iter().map(Checker::finish).collect(),
    })
}

fn sample_checks(j: &VectorForm, nt: &VectorForm, jn: &VectorForm, k: usize, rng: &mut ChaCha8Rng) -> [Checker; 7] {
    let model = j.model().clone();
    let n = model.n();
    let mut c = IDENTITY_NAMES.map(Checker::new);
    let a = random_form(&model, k, rng);
    let lj = |x: &Form| lie_vform(j, x).expect("same model");
    let ln = |x: &Form| lie_vform(nt, x).expect("same model");

    // (i) derivation property with a partner of random degree
    let l = rng.gen_range(0..=n - k);
    let b = random_form(&model, l, rng);
    let ab = a.wedge_unchecked(&b);
    for kform in [j, nt] {
        let deg = kform.degree();
        let i = |x: &Form| iota_vform(kform, x).expect("same model");
        let lhs = i(&ab);
        let rhs = &i(&a).wedge_unchecked(&b) + &a.wedge_unchecked(&i(&b)).scale(&wedge_sign((deg + 1) * k));
        c[0].check(lhs == rhs, || format!("iota_K derivation fails for K of degree {deg}, alpha = {a}, beta = {b}"));
        let lk = |x: &Form| lie_vform(kform, x).expect("same model");
        let lhs = lk(&ab);
        let rhs = &lk(&a).wedge_unchecked(&b) + &a.wedge_unchecked(&lk(&b)).scale(&wedge_sign(deg * k));
        c[0].check(lhs == rhs, || format!("L_K derivation fails for K of degree {deg}, alpha = {a}, beta = {b}"));
    }

    // (ii) (ι_K α)(X_1..X_k) = α(K(X_1..X_k)) on 1-forms
    if k == 1 {
        for kform in [j, nt] {
            let ia = iota_vform(kform, &a).expect("same model");
            for idx in multi_indices(n, kform.degree()) {
                let kv = kform.eval_frame(&idx);
                let mut val = model.zero_fn();
                for (r, x) in kv.components().iter().enumerate() {
                    val = &val + &(&a.component(&[r]) * x);
                }
                c[1].check(ia.eval_frame(&idx) == val, || format!("alg-derivation fails on {a} at {idx:?}"));
            }
        }
    }

    // (iii) [d, L_J] = d L_J + L_J d = 0 and [d, L_N] = d L_N - L_N d = 0
    let ja = lj(&a);
    let na = ln(&a);
    let da = ext_d(&a);
    c[2].check((&ext_d(&ja) + &lj(&da)).is_zero(), || format!("d L_J + L_J d nonzero on {a}"));
    c[2].check((&ext_d(&na) - &ln(&da)).is_zero(), || format!("d L_N - L_N d nonzero on {a}"));

    // (iv) (L_J)^2 = -L_N
    c[3].check((&lj(&ja) + &na).is_zero(), || format!("(L_J)^2 + L_N nonzero on {a}"));

    // (v) L_J L_N - L_N L_J = 0
    c[4].check(lj(&na) == ln(&ja), || format!("[L_J, L_N] nonzero on {a}"));

    // (vi) L_J = ι_J d on functions, -d ι_J on top forms
    if k == 0 {
        c[5].check(ja == iota_vform(j, &da).expect("same model"), || format!("L_J f != iota_J df for f = {a}"));
    }
    if k == n {
        c[5].check(ja == -&ext_d(&iota_vform(j, &a).expect("same model")), || {
            format!("L_J != -d iota_J on top form {a}")
        });
    }

    // (vii) d^c = -L_J - ι_{J·N}
    let lhs = dc(j, &a).expect("same model");
    let rhs = dks_rhs(j, jn, &a).expect("same model");
    c[6].check(lhs == rhs, || format!("d^c != -L_J - iota_(J.N) on {a}"));
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::rat_int;

    fn t4() -> Arc<Model> {
        Model::torus("T4", 4).unwrap()
    }

    fn c(n: usize, v: i64) -> TrigPoly {
        TrigPoly::from_rational(n, rat_int(v))
    }

    fn sin1() -> TrigPoly {
        TrigPoly::sin_mode(vec![1, 0, 0, 0])
    }
    fn cos1() -> TrigPoly {
        TrigPoly::cos_mode(vec![1, 0, 0, 0])
    }

    fn ex27(m: &Arc<Model>, p: TrigPoly) -> VectorForm {
        let z = c(4, 0);
        let o = c(4, 1);
        let mo = c(4, -1);
        VectorForm::from_matrix(
            m,
            &[
                vec![z.clone(), o.clone(), p.clone(), z.clone()],
                vec![mo.clone(), z.clone(), z.clone(), p],
                vec![z.clone(), z.clone(), z.clone(), mo],
                vec![z.clone(), z.clone(), o, z],
            ],
        )
    }

    fn std_j(m: &Arc<Model>) -> VectorForm {
        let n = m.n();
        let mut rows = vec![vec![c(n, 0); n]; n];
        for b in 0..n / 2 {
            rows[2 * b + 1][2 * b] = c(n, 1);
            rows[2 * b][2 * b + 1] = c(n, -1);
        }
        VectorForm::from_matrix(m, &rows)
    }

    #[test]
    fn iota_examples() {
        let m = t4();
        let j = ex27(&m, sin1());
        assert!(iota_vform(&j, &Form::function(&m, sin1())).unwrap().is_zero());
        let r = iota_vform(&j, &Form::basis(&m, &[0])).unwrap();
        let expect = &Form::basis(&m, &[1]) + &Form::monomial(&m, &[2], sin1());
        assert_eq!(r, expect);
        let a = &Form::monomial(&m, &[0], cos1()) + &Form::basis(&m, &[3]);
        assert_eq!(iota_vform(&VectorForm::identity(&m), &a).unwrap(), a);
    }

    #[test]
    fn lie_identity_is_d() {
        let m = t4();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..=4 {
            let a = random_form(&m, k, &mut rng);
            assert_eq!(lie_vform(&VectorForm::identity(&m), &a).unwrap(), ext_d(&a));
        }
        let j = ex27(&m, sin1());
        assert!(lie_vform(&j, &Form::function(&m, c(4, 5))).unwrap().is_zero());
    }

    #[test]
    fn nijenhuis_example27() {
        let m = t4();
        let j = ex27(&m, sin1());
        let n = nijenhuis(&j).unwrap();
        let e = |i: usize, f: TrigPoly| {
            let mut v = vec![c(4, 0); 4];
            v[i] = f;
            VectorField::new(&m, v)
        };
        let pp = &sin1() * &cos1();
        assert!(n.eval_frame(&[0, 1]).is_zero());
        assert_eq!(n.eval_frame(&[0, 2]), e(1, -cos1()));
        assert_eq!(n.eval_frame(&[0, 3]), e(0, cos1()));
        assert_eq!(n.eval_frame(&[1, 2]), e(0, -cos1()));
        assert_eq!(n.eval_frame(&[1, 3]), e(1, -cos1()));
        assert_eq!(n.eval_frame(&[2, 3]), e(1, -pp));
        assert!(nijenhuis(&ex27(&m, c(4, 3))).unwrap().is_zero());
        assert!(nijenhuis(&std_j(&m)).unwrap().is_zero());
    }

    #[test]
    fn not_almost_complex() {
        let m = t4();
        assert_eq!(nijenhuis(&VectorForm::identity(&m)), Err(DerivationError::NotAlmostComplex));
    }

    #[test]
    fn jn_twist_properties() {
        let m = t4();
        let j = ex27(&m, sin1());
        let n = nijenhuis(&j).unwrap();
        let jn = jn_twist_tensor(&j, &n).unwrap();
        // brute force J(N(Je_i, Je_j)) via vector fields
        for idx in multi_indices(4, 2) {
            let x = j.apply(&VectorField::frame(&m, idx[0]));
            let y = j.apply(&VectorField::frame(&m, idx[1]));
            let mut nxy = VectorField::zero(&m);
            for a in 0..4 {
                for b in 0..4 {
                    let s = &x.components()[a] * &y.components()[b];
                    if a != b && !s.is_zero() {
                        nxy = nxy.add(&n.eval_frame(&[a, b]).scale_fn(&s));
                    }
                }
            }
            assert_eq!(jn.eval_frame(&idx), j.apply(&nxy));
        }
        let jjn = jn_twist_tensor(&j, &jn).unwrap();
        assert_eq!(jjn, n.neg());
        let s = std_j(&m);
        assert!(jn_twist_tensor(&s, &nijenhuis(&s).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn j_action_properties() {
        let m = t4();
        let j = ex27(&m, sin1());
        let f = Form::function(&m, sin1());
        assert_eq!(form_j_action(&j, &f).unwrap(), f);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..=4 {
            for idx in multi_indices(4, k) {
                let b = Form::basis(&m, &idx);
                let jj = form_j_action(&j, &form_j_action(&j, &b).unwrap()).unwrap();
                assert_eq!(jj, b.scale(&wedge_sign(k)));
            }
            let a = random_form(&m, k, &mut rng);
            let b = random_form(&m, 4 - k, &mut rng);
            assert_eq!(
                form_j_action(&j, &a.wedge(&b).unwrap()).unwrap(),
                form_j_action(&j, &a).unwrap().wedge(&form_j_action(&j, &b).unwrap()).unwrap()
            );
        }
        // (J·α)(X) = α(JX) on 1-forms
        let a = random_form(&m, 1, &mut rng);
        let ja = form_j_action(&j, &a).unwrap();
        for x in 0..4 {
            let jx = j.apply(&VectorField::frame(&m, x));
            let mut v = m.zero_fn();
            for r in 0..4 {
                v = &v + &(&a.component(&[r]) * &jx.components()[r]);
            }
            assert_eq!(ja.component(&[x]), v);
        }
    }

    #[test]
    fn dc_matches_dks() {
        let m = t4();
        let j = ex27(&m, sin1());
        let n = nijenhuis(&j).unwrap();
        let jn = jn_twist_tensor(&j, &n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..=4 {
            for _ in 0..3 {
                let a = random_form(&m, k, &mut rng);
                assert_eq!(dc(&j, &a).unwrap(), dks_rhs(&j, &jn, &a).unwrap(), "degree {k}");
            }
        }
        let s = std_j(&m);
        for k in 0..=4 {
            let a = random_form(&m, k, &mut rng);
            assert_eq!(dc(&s, &a).unwrap(), -&lie_vform(&s, &a).unwrap());
        }
        assert!(dc(&j, &Form::function(&m, c(4, 2))).unwrap().is_zero());
    }

    #[test]
    fn suite_flat_and_example27() {
        let m = t4();
        let r = identity_suite(&std_j(&m), 4, 1, None).unwrap();
        assert!(r.all_passed(), "{r:?}");
        let j = ex27(&m, sin1());
        let r = identity_suite(&j, 3, 2, None).unwrap();
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn suite_detects_mutation() {
        let m = t4();
        let j = ex27(&m, sin1());
        let n = nijenhuis(&j).unwrap();
        // flip the sign of one component: N_13 -> -N_13
        let mut parts = n.parts().to_vec();
        let comp = parts[1].component(&[0, 2]);
        parts[1] = &parts[1] - &Form::monomial(&m, &[0, 2], &comp + &comp);
        let bad = VectorForm::new(&m, 2, parts);
        let r = identity_suite(&j, 3, 2, Some(&bad)).unwrap();
        let sq = r.get("lj_squared").unwrap();
        assert!(!sq.passed);
        assert!(sq.counterexample.is_some());
    }
}
