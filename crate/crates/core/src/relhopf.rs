//! Comodule *-algebras, relative Hopf modules, the twist functor `Gamma`,
//! the monoidal isomorphism `phi`, the bar-category structure, and the
//! isomorphisms `N` (conjugation vs twist) and `S` (Hom vs twist).
//!
//! Modules are free left modules on a finite basis `e_i` with grouplike
//! weights, `delta(e_i) = g_i (x) e_i`, and diagonal right straightening
//! `e_i b = rho_i(b) e_i`. An element `sum c (b e_i)` is stored as
//! `Lin<(Label, usize)>` in the module's own left-normal form.

use std::fmt;
use std::sync::Arc;

use crate::cocycle::{CocycleData, TwistedHopf};
use crate::hopf::HopfRef;
use crate::linear::{Elem, Label, Lin, Tensor};
use crate::report::{for_all, SampleSpec, VerificationReport};
use crate::scalars::Cyc;

pub type ModElem = Lin<(Label, usize)>;
/// `sum a (x) m` with `a` a basis label of the Hopf algebra.
pub type CoElem = Lin<(Label, (Label, usize))>;

/// A left `A`-comodule *-algebra `B` on a basis.
pub trait CoAlgebra: Send + Sync {
    fn name(&self) -> String;
    fn hopf(&self) -> HopfRef;
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem;
    fn unit(&self) -> Elem;
    /// Two legs: `[A label, B label]`.
    fn coaction_basis(&self, b: &Label) -> Tensor;
    fn star_basis(&self, b: &Label) -> Elem;
    fn box_labels(&self, radius: i64) -> Vec<Label>;
    fn has_star(&self) -> bool {
        true
    }
    fn label_name(&self, l: &Label) -> String {
        l.to_string()
    }

    fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (a, c) in x.iter() {
            for (b, d) in y.iter() {
                out.add_scaled(&self.mul_basis(a, b), &(c * d));
            }
        }
        out
    }
    fn coaction(&self, x: &Elem) -> Tensor {
        x.map_linear(|b| self.coaction_basis(b))
    }
    fn star(&self, x: &Elem) -> Elem {
        x.map_antilinear(|b| self.star_basis(b))
    }
}

pub type AlgRef = Arc<dyn CoAlgebra>;

pub fn show_elem(alg: &dyn CoAlgebra, x: &Elem) -> String {
    crate::linear::show(x, |l| alg.label_name(l))
}

/// `B = A` with `delta = Delta`.
pub struct Regular {
    pub hopf: HopfRef,
    /// Generator names for monomial display on lattices, e.g. `["x", "y"]`.
    pub vars: Option<Vec<String>>,
}

impl Regular {
    pub fn new(hopf: HopfRef) -> Self {
        Regular { hopf, vars: None }
    }

    pub fn monomials(hopf: HopfRef, vars: &[&str]) -> Self {
        Regular { hopf, vars: Some(vars.iter().map(|s| s.to_string()).collect()) }
    }
}

pub fn monomial_name(vars: &[String], l: &Label) -> String {
    let parts: Vec<String> = l
        .0
        .iter()
        .zip(vars)
        .filter(|(e, _)| **e != 0)
        .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl CoAlgebra for Regular {
    fn name(&self) -> String {
        format!("{} (regular)", self.hopf.name())
    }
    fn hopf(&self) -> HopfRef {
        self.hopf.clone()
    }
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem {
        self.hopf.mul_basis(a, b)
    }
    fn unit(&self) -> Elem {
        self.hopf.unit()
    }
    fn coaction_basis(&self, b: &Label) -> Tensor {
        self.hopf.coproduct_basis(b)
    }
    fn star_basis(&self, b: &Label) -> Elem {
        self.hopf.star_basis(b)
    }
    fn box_labels(&self, radius: i64) -> Vec<Label> {
        self.hopf.box_labels(radius)
    }
    fn label_name(&self, l: &Label) -> String {
        match &self.vars {
            Some(v) => monomial_name(v, l),
            None => self.hopf.label_name(l),
        }
    }
}

/// A twist: the verified cocycle together with `A_gamma`.
#[derive(Clone)]
pub struct Twist {
    pub data: CocycleData,
    pub a_gamma: Arc<TwistedHopf>,
}

impl fmt::Debug for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Twist({})", self.data.gamma.name)
    }
}

impl Twist {
    pub fn new(data: &CocycleData) -> Result<Self, crate::cocycle::CocycleError> {
        let a = crate::cocycle::twist_hopf(data, data.flags.unitary)?;
        Ok(Twist { data: data.clone(), a_gamma: Arc::new(a) })
    }

    pub fn unitary(&self) -> bool {
        self.data.flags.unitary
    }

    /// The twist by `gammabar` on `A_gamma`; certifies it on `spec`.
    pub fn reverse(&self, spec: &SampleSpec) -> Result<(Twist, VerificationReport), crate::cocycle::CocycleError> {
        let mut back = self.data.reversed_on(self.a_gamma.clone());
        let r = back.certify(spec);
        Ok((Twist::new(&back)?, r))
    }

    /// `sum gamma(a, g) b` over `delta(x) = sum a (x) b`.
    pub fn gamma_right(&self, alg: &dyn CoAlgebra, x: &Elem, g: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (k, c) in alg.coaction(x).iter() {
            let v = self.data.g(&Elem::basis(k[0].clone()), g);
            out.add_term(k[1].clone(), c * &v);
        }
        out
    }

    pub fn gamma_bar_right(&self, alg: &dyn CoAlgebra, x: &Elem, g: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (k, c) in alg.coaction(x).iter() {
            let v = self.data.gb(&Elem::basis(k[0].clone()), g);
            out.add_term(k[1].clone(), c * &v);
        }
        out
    }

    /// `sum gamma(g, a) b` over `delta(x) = sum a (x) b`.
    pub fn gamma_left(&self, alg: &dyn CoAlgebra, g: &Elem, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (k, c) in alg.coaction(x).iter() {
            let v = self.data.g(g, &Elem::basis(k[0].clone()));
            out.add_term(k[1].clone(), c * &v);
        }
        out
    }

    pub fn gamma_bar_left(&self, alg: &dyn CoAlgebra, g: &Elem, x: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (k, c) in alg.coaction(x).iter() {
            let v = self.data.gb(g, &Elem::basis(k[0].clone()));
            out.add_term(k[1].clone(), c * &v);
        }
        out
    }
}

/// `B_gamma`: `a ._gamma b = gamma(a_-1, b_-1) a_0 b_0`, `b^*gamma = Vbar(b_-1*) b_0*`.
pub struct TwistedAlgebra {
    pub base: AlgRef,
    pub twist: Twist,
}

pub fn twist_comodule_algebra(base: AlgRef, twist: &Twist) -> Arc<TwistedAlgebra> {
    Arc::new(TwistedAlgebra { base, twist: twist.clone() })
}

impl CoAlgebra for TwistedAlgebra {
    fn name(&self) -> String {
        format!("{}_{}", self.base.name(), self.twist.data.gamma.name)
    }
    fn hopf(&self) -> HopfRef {
        self.twist.a_gamma.clone()
    }
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem {
        let (da, db) = (self.base.coaction_basis(a), self.base.coaction_basis(b));
        let mut out = Elem::zero();
        for (ka, ca) in da.iter() {
            for (kb, cb) in db.iter() {
                let v = self.twist.data.gamma.eval(&ka[0], &kb[0]);
                if v.is_zero() {
                    continue;
                }
                out.add_scaled(&self.base.mul_basis(&ka[1], &kb[1]), &(&(ca * cb) * &v));
            }
        }
        out
    }
    fn unit(&self) -> Elem {
        self.base.unit()
    }
    fn coaction_basis(&self, b: &Label) -> Tensor {
        self.base.coaction_basis(b)
    }
    fn star_basis(&self, b: &Label) -> Elem {
        assert!(self.has_star(), "twisted star needs a unitary cocycle");
        let a = self.base.hopf();
        let mut out = Elem::zero();
        for (k, c) in self.base.coaction_basis(b).iter() {
            let v = self.twist.data.vbar_elem(&a.star_basis(&k[0]));
            out.add_scaled(&self.base.star_basis(&k[1]), &(&c.conj() * &v));
        }
        out
    }
    fn has_star(&self) -> bool {
        self.twist.unitary() && self.base.has_star()
    }
    fn box_labels(&self, radius: i64) -> Vec<Label> {
        self.base.box_labels(radius)
    }
    fn label_name(&self, l: &Label) -> String {
        self.base.label_name(l)
    }
}

/// Algebra, comodule and *-compatibility of a comodule algebra on the box.
pub fn verify_comodule_algebra(b: &dyn CoAlgebra, spec: &SampleSpec) -> VerificationReport {
    let a = b.hopf();
    let labels = b.box_labels(spec.radius);
    let (pairs, ex2) = spec.tuples(&labels, 2, 41);
    let (triples, ex3) = spec.tuples(&labels, 3, 42);
    let d1 = spec.describe(true, labels.len());
    let d2 = spec.describe(ex2, pairs.len());
    let d3 = spec.describe(ex3, triples.len());
    let n = |l: &Label| b.label_name(l);
    let mut r = VerificationReport::new();
    let one = b.unit();
    r.check("comodule_algebra.associativity", "plumbing", d3, || {
        for_all(&triples, |t| {
            let (x, y, z) = (Elem::basis(t[0].clone()), Elem::basis(t[1].clone()), Elem::basis(t[2].clone()));
            if b.mul(&b.mul(&x, &y), &z) != b.mul(&x, &b.mul(&y, &z)) {
                return Err(format!("({}, {}, {})", n(&t[0]), n(&t[1]), n(&t[2])));
            }
            Ok(())
        })
    });
    r.check("comodule_algebra.unit", "plumbing", d1.clone(), || {
        for_all(&labels, |l| {
            let x = Elem::basis(l.clone());
            if b.mul(&one, &x) != x || b.mul(&x, &one) != x {
                return Err(n(l));
            }
            Ok(())
        })
    });
    r.check("comodule_algebra.coaction_counital", "comodule algebra coaction", d1.clone(), || {
        for_all(&labels, |l| {
            let c = b.coaction_basis(l);
            let back = crate::hopf::contract_leg(&c, 0, |x| a.counit_basis(x)).map_keys(|k| k[0].clone());
            if back != Elem::basis(l.clone()) {
                return Err(n(l));
            }
            Ok(())
        })
    });
    r.check("comodule_algebra.coaction_coassociative", "comodule algebra coaction", d1.clone(), || {
        for_all(&labels, |l| {
            let c = b.coaction_basis(l);
            let lhs = crate::hopf::split_leg(&*a, &c, 0);
            let rhs = c.map_linear(|k| {
                b.coaction_basis(&k[1]).map_keys(|k2| vec![k[0].clone(), k2[0].clone(), k2[1].clone()])
            });
            if lhs != rhs {
                return Err(n(l));
            }
            Ok(())
        })
    });
    r.check("comodule_algebra.coaction_multiplicative", "comodule algebra coaction", d2.clone(), || {
        for_all(&pairs, |p| {
            let lhs = b.coaction(&b.mul_basis(&p[0], &p[1]));
            let (c0, c1) = (b.coaction_basis(&p[0]), b.coaction_basis(&p[1]));
            let mut rhs = Tensor::zero();
            for (k0, x0) in c0.iter() {
                for (k1, x1) in c1.iter() {
                    let aa = a.mul_basis(&k0[0], &k1[0]);
                    let bb = b.mul_basis(&k0[1], &k1[1]);
                    rhs.add_scaled(&crate::hopf::tensor2(&aa, &bb), &(x0 * x1));
                }
            }
            if lhs != rhs {
                return Err(format!("({}, {})", n(&p[0]), n(&p[1])));
            }
            Ok(())
        })
    });
    if b.has_star() {
        r.check("comodule_algebra.star", "comodule *-algebra", d2, || {
            for_all(&labels, |l| {
                let x = Elem::basis(l.clone());
                if b.star(&b.star(&x)) != x {
                    return Err(format!("not involutive at {}", n(l)));
                }
                let lhs = b.coaction(&b.star(&x));
                let rhs = b.coaction_basis(l).map_antilinear(|k| {
                    crate::hopf::tensor2(&a.star_basis(&k[0]), &b.star_basis(&k[1]))
                });
                if lhs != rhs {
                    return Err(format!("coaction not a *-map at {}", n(l)));
                }
                Ok(())
            })?;
            for_all(&pairs, |p| {
                let (x, y) = (Elem::basis(p[0].clone()), Elem::basis(p[1].clone()));
                if b.star(&b.mul(&x, &y)) != b.mul(&b.star(&y), &b.star(&x)) {
                    return Err(format!("not antimultiplicative at ({}, {})", n(&p[0]), n(&p[1])));
                }
                Ok(())
            })
        });
    }
    r
}

/// A free relative Hopf module.
pub trait Module: Send + Sync {
    fn name(&self) -> String;
    fn algebra(&self) -> AlgRef;
    fn rank(&self) -> usize;
    /// Grouplike weight `g_i`: `delta(e_i) = g_i (x) e_i`.
    fn weight(&self, i: usize) -> Elem;
    /// `e_i b = rho_i(b) e_i`.
    fn rho(&self, i: usize, b: &Label) -> Elem;
    fn rho_inv(&self, i: usize, b: &Label) -> Elem;
    fn basis_name(&self, i: usize) -> String;
    /// `e_i*` when the module carries a star.
    fn star_basis(&self, _i: usize) -> Option<ModElem> {
        None
    }
    /// `(b e_i)* = e_i* b*` by default.
    fn star(&self, x: &ModElem) -> Option<ModElem> {
        let alg = self.algebra();
        let mut out = ModElem::zero();
        for ((b, i), c) in x.iter() {
            let ei = self.star_basis(*i)?;
            let bs = alg.star_basis(b);
            // e_i* b* in left-normal form
            for ((l, j), d) in ei.iter() {
                let r = bs.map_linear(|k| self.rho(*j, k));
                out.add_scaled(&embed(&alg.mul(&Elem::basis(l.clone()), &r), *j), &(&c.conj() * d));
            }
        }
        Some(out)
    }
    fn has_star(&self) -> bool {
        self.rank() == 0 || self.star_basis(0).is_some()
    }
}

pub type ModRef = Arc<dyn Module>;

pub fn rho_elem(m: &dyn Module, i: usize, x: &Elem) -> Elem {
    x.map_linear(|b| m.rho(i, b))
}

pub fn rho_inv_elem(m: &dyn Module, i: usize, x: &Elem) -> Elem {
    x.map_linear(|b| m.rho_inv(i, b))
}

/// `b e_i` for an algebra element `b`.
pub fn embed(b: &Elem, i: usize) -> ModElem {
    b.map_keys(|l| (l.clone(), i))
}

/// `1 e_i`.
pub fn basis_elem(m: &dyn Module, i: usize) -> ModElem {
    embed(&m.algebra().unit(), i)
}

/// Coefficient of `e_i` in left-normal form.
pub fn coefficient(x: &ModElem, i: usize) -> Elem {
    let mut out = Elem::zero();
    for ((b, j), c) in x.iter() {
        if *j == i {
            out.add_term(b.clone(), c.clone());
        }
    }
    out
}

pub fn lmul(m: &dyn Module, b: &Elem, x: &ModElem) -> ModElem {
    let alg = m.algebra();
    let mut out = ModElem::zero();
    for ((l, i), c) in x.iter() {
        out.add_scaled(&embed(&alg.mul(b, &Elem::basis(l.clone())), *i), c);
    }
    out
}

pub fn rmul(m: &dyn Module, x: &ModElem, b: &Elem) -> ModElem {
    let alg = m.algebra();
    let mut out = ModElem::zero();
    for ((l, i), c) in x.iter() {
        let r = rho_elem(m, *i, b);
        out.add_scaled(&embed(&alg.mul(&Elem::basis(l.clone()), &r), *i), c);
    }
    out
}

/// `delta(b e_i) = b_-1 g_i (x) b_0 e_i`.
pub fn coact(m: &dyn Module, x: &ModElem) -> CoElem {
    let alg = m.algebra();
    let a = alg.hopf();
    let mut out = CoElem::zero();
    for ((l, i), c) in x.iter() {
        let g = m.weight(*i);
        for (k, d) in alg.coaction_basis(l).iter() {
            let ag = a.mul(&Elem::basis(k[0].clone()), &g);
            for (al, e) in ag.iter() {
                out.add_term((al.clone(), (k[1].clone(), *i)), &(c * d) * e);
            }
        }
    }
    out
}

/// Applies a linear map to the module leg of a coaction value.
pub fn map_co<F: FnMut(&ModElem) -> ModElem>(x: &CoElem, mut f: F) -> CoElem {
    let mut out = CoElem::zero();
    for ((a, m), c) in x.iter() {
        for (k, d) in f(&ModElem::basis(m.clone())).iter() {
            out.add_term((a.clone(), k.clone()), c * d);
        }
    }
    out
}

/// Contracts the Hopf leg of a coaction value with a functional.
pub fn contract_co<F: FnMut(&Label) -> Cyc>(x: &CoElem, mut f: F) -> ModElem {
    let mut out = ModElem::zero();
    for ((a, m), c) in x.iter() {
        out.add_term(m.clone(), c * &f(a));
    }
    out
}

pub fn show_mod(m: &dyn Module, x: &ModElem) -> String {
    let alg = m.algebra();
    crate::linear::show(x, |(b, i)| format!("{}.{}", alg.label_name(b), m.basis_name(*i)))
}

type RhoFn = Arc<dyn Fn(usize, &Label) -> Elem + Send + Sync>;

/// Free module given by tables.
pub struct FreeModule {
    pub name: String,
    pub alg: AlgRef,
    pub names: Vec<String>,
    pub weights: Vec<Elem>,
    pub rho: Option<(RhoFn, RhoFn)>,
    pub stars: Option<Vec<ModElem>>,
}

impl FreeModule {
    /// Coinvariant central basis: weights `1`, `rho = id`.
    pub fn central(name: &str, alg: AlgRef, names: &[&str]) -> Self {
        let one = alg.hopf().unit();
        FreeModule {
            name: name.to_string(),
            weights: vec![one; names.len()],
            alg,
            names: names.iter().map(|s| s.to_string()).collect(),
            rho: None,
            stars: None,
        }
    }

    pub fn with_stars(mut self, stars: Vec<ModElem>) -> Self {
        self.stars = Some(stars);
        self
    }

    /// `B` as a module over itself, basis `1`, star from `B`.
    pub fn algebra_itself(alg: AlgRef) -> Self {
        let one = embed(&alg.unit(), 0);
        FreeModule::central("B", alg, &["1"]).with_stars(vec![one])
    }
}

impl Module for FreeModule {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn algebra(&self) -> AlgRef {
        self.alg.clone()
    }
    fn rank(&self) -> usize {
        self.names.len()
    }
    fn weight(&self, i: usize) -> Elem {
        self.weights[i].clone()
    }
    fn rho(&self, i: usize, b: &Label) -> Elem {
        match &self.rho {
            Some((f, _)) => f(i, b),
            None => Elem::basis(b.clone()),
        }
    }
    fn rho_inv(&self, i: usize, b: &Label) -> Elem {
        match &self.rho {
            Some((_, g)) => g(i, b),
            None => Elem::basis(b.clone()),
        }
    }
    fn basis_name(&self, i: usize) -> String {
        self.names[i].clone()
    }
    fn star_basis(&self, i: usize) -> Option<ModElem> {
        self.stars.as_ref().map(|s| s[i].clone())
    }
}

/// `Gamma(E)`: the same vector space and coaction, with
/// `b ._gamma m = gamma(b_-1, m_-1) b_0 m_0` and `m ._gamma b = gamma(m_-1, b_-1) m_0 b_0`.
pub struct TwistedModule {
    pub inner: ModRef,
    pub alg: Arc<TwistedAlgebra>,
}

pub fn twist_module(inner: ModRef, alg: &Arc<TwistedAlgebra>) -> Arc<TwistedModule> {
    Arc::new(TwistedModule { inner, alg: alg.clone() })
}

impl TwistedModule {
    fn base_alg(&self) -> AlgRef {
        self.inner.algebra()
    }

    fn twist(&self) -> &Twist {
        &self.alg.twist
    }

    /// `lambda_i(b) = gamma(b_-1, g_i) b_0`, so that `b ._gamma e_i = lambda_i(b) e_i`.
    pub fn lambda(&self, i: usize, b: &Elem) -> Elem {
        self.twist().gamma_right(&*self.base_alg(), b, &self.inner.weight(i))
    }

    pub fn lambda_inv(&self, i: usize, b: &Elem) -> Elem {
        self.twist().gamma_bar_right(&*self.base_alg(), b, &self.inner.weight(i))
    }

    /// Twisted normal form to the underlying element of `E`.
    pub fn to_inner(&self, x: &ModElem) -> ModElem {
        let mut out = ModElem::zero();
        for ((b, i), c) in x.iter() {
            out.add_scaled(&embed(&self.lambda(*i, &Elem::basis(b.clone())), *i), c);
        }
        out
    }

    pub fn from_inner(&self, x: &ModElem) -> ModElem {
        let mut out = ModElem::zero();
        for ((b, i), c) in x.iter() {
            out.add_scaled(&embed(&self.lambda_inv(*i, &Elem::basis(b.clone())), *i), c);
        }
        out
    }
}

impl Module for TwistedModule {
    fn name(&self) -> String {
        format!("Gamma({})", self.inner.name())
    }
    fn algebra(&self) -> AlgRef {
        self.alg.clone()
    }
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    fn weight(&self, i: usize) -> Elem {
        self.inner.weight(i)
    }
    /// `lambda_i^-1 . rho_i . mu_i` with `mu_i(c) = gamma(g_i, c_-1) c_0`.
    fn rho(&self, i: usize, b: &Label) -> Elem {
        let mu = self.twist().gamma_left(&*self.base_alg(), &self.inner.weight(i), &Elem::basis(b.clone()));
        self.lambda_inv(i, &rho_elem(&*self.inner, i, &mu))
    }
    fn rho_inv(&self, i: usize, b: &Label) -> Elem {
        let l = self.lambda(i, &Elem::basis(b.clone()));
        let r = rho_inv_elem(&*self.inner, i, &l);
        self.twist().gamma_bar_left(&*self.base_alg(), &self.inner.weight(i), &r)
    }
    fn basis_name(&self, i: usize) -> String {
        self.inner.basis_name(i)
    }
    fn star_basis(&self, i: usize) -> Option<ModElem> {
        self.star(&basis_elem(self, i))
    }
    /// `x^*gamma = Vbar(x_-1*) x_0*`.
    fn star(&self, x: &ModElem) -> Option<ModElem> {
        if !self.alg.has_star() || !self.inner.has_star() {
            return None;
        }
        let a = self.base_alg().hopf();
        let d = &self.twist().data;
        let u = self.to_inner(x);
        let mut out = ModElem::zero();
        for ((al, m), c) in coact(&*self.inner, &u).iter() {
            let v = d.vbar_elem(&a.star_basis(al));
            let s = self.inner.star(&ModElem::basis(m.clone()))?;
            out.add_scaled(&s, &(&c.conj() * &v));
        }
        Some(self.from_inner(&out))
    }
}

/// `E (x)_B F` with basis `e_i (x) f_j` at index `i * rank(F) + j`.
pub struct TensorModule {
    pub left: ModRef,
    pub right: ModRef,
}

pub fn tensor_module(left: ModRef, right: ModRef) -> Arc<TensorModule> {
    Arc::new(TensorModule { left, right })
}

impl TensorModule {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.right.rank() + j
    }

    pub fn split_index(&self, k: usize) -> (usize, usize) {
        (k / self.right.rank(), k % self.right.rank())
    }

    /// `x (x) y` in left-normal form.
    pub fn tensor(&self, x: &ModElem, y: &ModElem) -> ModElem {
        let alg = self.left.algebra();
        let mut out = ModElem::zero();
        for ((b, i), c) in x.iter() {
            for ((b2, j), c2) in y.iter() {
                let r = self.left.rho(*i, b2);
                let coef = alg.mul(&Elem::basis(b.clone()), &r);
                out.add_scaled(&embed(&coef, self.index(*i, *j)), &(c * c2));
            }
        }
        out
    }

    /// `z = sum (b e_i) (x) f_j`, returned as pairs `(b e_i, j)`.
    pub fn split(&self, z: &ModElem) -> Vec<(ModElem, usize)> {
        let mut out: Vec<(ModElem, usize)> = Vec::new();
        for ((b, k), c) in z.iter() {
            let (i, j) = self.split_index(*k);
            out.push((ModElem::single((b.clone(), i), c.clone()), j));
        }
        out
    }

    /// `(f (x) g)(z)` into `target`, for bimodule maps `f`, `g`.
    pub fn map_pair<F, G>(&self, target: &TensorModule, z: &ModElem, f: F, g: G) -> ModElem
    where
        F: Fn(&ModElem) -> ModElem,
        G: Fn(&ModElem) -> ModElem,
    {
        let mut out = ModElem::zero();
        for (x, j) in self.split(z) {
            let y = basis_elem(&*self.right, j);
            out = out.add(&target.tensor(&f(&x), &g(&y)));
        }
        out
    }
}

impl Module for TensorModule {
    fn name(&self) -> String {
        format!("{} (x) {}", self.left.name(), self.right.name())
    }
    fn algebra(&self) -> AlgRef {
        self.left.algebra()
    }
    fn rank(&self) -> usize {
        self.left.rank() * self.right.rank()
    }
    fn weight(&self, k: usize) -> Elem {
        let (i, j) = self.split_index(k);
        self.algebra().hopf().mul(&self.left.weight(i), &self.right.weight(j))
    }
    fn rho(&self, k: usize, b: &Label) -> Elem {
        let (i, j) = self.split_index(k);
        rho_elem(&*self.left, i, &self.right.rho(j, b))
    }
    fn rho_inv(&self, k: usize, b: &Label) -> Elem {
        let (i, j) = self.split_index(k);
        rho_inv_elem(&*self.right, j, &self.left.rho_inv(i, b))
    }
    fn basis_name(&self, k: usize) -> String {
        let (i, j) = self.split_index(k);
        format!("{}(x){}", self.left.basis_name(i), self.right.basis_name(j))
    }
}

/// Conjugate module: `b . xbar = (x b*)bar`, `xbar . b = (b* x)bar`,
/// `delta(xbar) = x_-1* (x) xbar_0`.
pub struct ConjModule {
    pub inner: ModRef,
}

pub fn conj_module(inner: ModRef) -> Arc<ConjModule> {
    Arc::new(ConjModule { inner })
}

impl ConjModule {
    /// `x -> xbar`, antilinear: `(b e_i)bar = rho_i^-1(b)* . ebar_i`.
    pub fn conj_in(&self, x: &ModElem) -> ModElem {
        let alg = self.inner.algebra();
        let mut out = ModElem::zero();
        for ((b, i), c) in x.iter() {
            let s = alg.star(&self.inner.rho_inv(*i, b));
            out.add_scaled(&embed(&s, *i), &c.conj());
        }
        out
    }

    /// Inverse of [`ConjModule::conj_in`]: `b . ebar_i = (rho_i(b*) e_i)bar`.
    pub fn conj_out(&self, y: &ModElem) -> ModElem {
        let alg = self.inner.algebra();
        let mut out = ModElem::zero();
        for ((b, i), c) in y.iter() {
            let r = rho_elem(&*self.inner, *i, &alg.star_basis(b));
            out.add_scaled(&embed(&r, *i), &c.conj());
        }
        out
    }
}

impl Module for ConjModule {
    fn name(&self) -> String {
        format!("conj({})", self.inner.name())
    }
    fn algebra(&self) -> AlgRef {
        self.inner.algebra()
    }
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    fn weight(&self, i: usize) -> Elem {
        self.algebra().hopf().star(&self.inner.weight(i))
    }
    fn rho(&self, i: usize, b: &Label) -> Elem {
        let alg = self.algebra();
        alg.star(&rho_inv_elem(&*self.inner, i, &alg.star_basis(b)))
    }
    fn rho_inv(&self, i: usize, b: &Label) -> Elem {
        let alg = self.algebra();
        alg.star(&rho_elem(&*self.inner, i, &alg.star_basis(b)))
    }
    fn basis_name(&self, i: usize) -> String {
        format!("bar({})", self.inner.basis_name(i))
    }
}

/// Left-linear maps `E -> B`, `(b . f)(e) = f(e b)`, `(f . b)(e) = f(e) b`,
/// with dual basis `f^j(e_i) = delta_ij`.
pub struct DualModule {
    pub inner: ModRef,
}

pub fn dual_module(inner: ModRef) -> Arc<DualModule> {
    Arc::new(DualModule { inner })
}

impl DualModule {
    /// `f(e_i)`.
    pub fn value(&self, f: &ModElem, i: usize) -> Elem {
        rho_elem(&*self.inner, i, &coefficient(f, i))
    }

    /// `ev(x (x) f) = f(x)`.
    pub fn eval(&self, f: &ModElem, x: &ModElem) -> Elem {
        let alg = self.inner.algebra();
        let mut out = Elem::zero();
        for ((b, i), c) in x.iter() {
            out.add_scaled(&alg.mul(&Elem::basis(b.clone()), &self.value(f, *i)), c);
        }
        out
    }

    /// The map with `e_i -> values[i]`.
    pub fn from_values(&self, values: &[Elem]) -> ModElem {
        let mut out = ModElem::zero();
        for (i, v) in values.iter().enumerate() {
            out = out.add(&embed(&rho_inv_elem(&*self.inner, i, v), i));
        }
        out
    }
}

impl Module for DualModule {
    fn name(&self) -> String {
        format!("Hom({}, B)", self.inner.name())
    }
    fn algebra(&self) -> AlgRef {
        self.inner.algebra()
    }
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    /// `f_-1 (x) f_0(e) = S(e_-1) f(e_0)_-1 (x) f(e_0)_0` gives `S(g_j)` on `f^j`.
    fn weight(&self, i: usize) -> Elem {
        self.algebra().hopf().antipode(&self.inner.weight(i))
    }
    fn rho(&self, i: usize, b: &Label) -> Elem {
        self.inner.rho_inv(i, b)
    }
    fn rho_inv(&self, i: usize, b: &Label) -> Elem {
        self.inner.rho(i, b)
    }
    fn basis_name(&self, i: usize) -> String {
        format!("{}^", self.inner.basis_name(i))
    }
}

/// A map between modules, evaluated by formula.
#[derive(Clone)]
pub struct Morphism {
    pub name: String,
    pub source: ModRef,
    pub target: ModRef,
    map: Arc<dyn Fn(&ModElem) -> ModElem + Send + Sync>,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism({}: {} -> {})", self.name, self.source.name(), self.target.name())
    }
}

impl Morphism {
    pub fn new<F>(name: impl Into<String>, source: ModRef, target: ModRef, f: F) -> Self
    where
        F: Fn(&ModElem) -> ModElem + Send + Sync + 'static,
    {
        Morphism { name: name.into(), source, target, map: Arc::new(f) }
    }

    /// Left-linear map from basis images.
    pub fn from_basis(name: impl Into<String>, source: ModRef, target: ModRef, images: Vec<ModElem>) -> Self {
        let t = target.clone();
        Morphism::new(name, source, target, move |x| {
            let mut out = ModElem::zero();
            for ((b, i), c) in x.iter() {
                out.add_scaled(&lmul(&*t, &Elem::basis(b.clone()), &images[*i]), c);
            }
            out
        })
    }

    pub fn identity(m: ModRef) -> Self {
        Morphism::new("id", m.clone(), m, |x| x.clone())
    }

    pub fn apply(&self, x: &ModElem) -> ModElem {
        (self.map)(x)
    }

    pub fn compose(&self, first: &Morphism) -> Morphism {
        let (f, g) = (self.clone(), first.clone());
        Morphism::new(format!("{} . {}", self.name, first.name), first.source.clone(), self.target.clone(), move |x| {
            f.apply(&g.apply(x))
        })
    }

    /// Images of `1 e_i`.
    pub fn basis_table(&self) -> Vec<ModElem> {
        (0..self.source.rank()).map(|i| self.apply(&basis_elem(&*self.source, i))).collect()
    }
}

/// Sample elements `b e_i` of a module, `b` from the box.
pub fn sample_elems(m: &dyn Module, spec: &SampleSpec, stream: u64) -> Vec<ModElem> {
    let labels = m.algebra().box_labels(spec.radius);
    let mut all = Vec::new();
    for i in 0..m.rank() {
        for b in &labels {
            all.push(ModElem::basis((b.clone(), i)));
        }
    }
    spec.pick(&all, stream)
}

/// Left/right linearity and covariance of a morphism on samples.
pub fn verify_morphism(f: &Morphism, spec: &SampleSpec, id: &str, anchor: &str) -> VerificationReport {
    let src = &*f.source;
    let tgt = &*f.target;
    let xs = sample_elems(src, spec, 51);
    let bs = spec.pick(&src.algebra().box_labels(spec.radius.min(2)), 52);
    let d = spec.describe(false, xs.len() * bs.len());
    let mut r = VerificationReport::new();
    r.check(&format!("{id}.left_linear"), anchor, d.clone(), || {
        for_all(&xs, |x| {
            for b in &bs {
                let be = Elem::basis(b.clone());
                if f.apply(&lmul(src, &be, x)) != lmul(tgt, &be, &f.apply(x)) {
                    return Err(format!("{} at {} . {}", f.name, src.algebra().label_name(b), show_mod(src, x)));
                }
            }
            Ok(())
        })
    });
    r.check(&format!("{id}.right_linear"), anchor, d.clone(), || {
        for_all(&xs, |x| {
            for b in &bs {
                let be = Elem::basis(b.clone());
                if f.apply(&rmul(src, x, &be)) != rmul(tgt, &f.apply(x), &be) {
                    return Err(format!("{} at {} . {}", f.name, show_mod(src, x), src.algebra().label_name(b)));
                }
            }
            Ok(())
        })
    });
    r.check(&format!("{id}.covariant"), anchor, spec.describe(false, xs.len()), || {
        for_all(&xs, |x| {
            if coact(tgt, &f.apply(x)) != map_co(&coact(src, x), |m| f.apply(m)) {
                return Err(format!("{} at {}", f.name, show_mod(src, x)));
            }
            Ok(())
        })
    });
    r
}

/// Relative Hopf module axioms: `rho_i` multiplicative and unital, coaction
/// compatible with both actions.
pub fn verify_module(m: &dyn Module, spec: &SampleSpec, id: &str) -> VerificationReport {
    let alg = m.algebra();
    let labels = alg.box_labels(spec.radius.min(2));
    let (pairs, ex) = spec.tuples(&labels, 2, 61);
    let xs = sample_elems(m, spec, 62);
    let mut r = VerificationReport::new();
    r.check(&format!("{id}.right_action"), "relative Hopf module", spec.describe(ex, pairs.len() * m.rank()), || {
        for i in 0..m.rank() {
            if rho_elem(m, i, &alg.unit()) != alg.unit() {
                return Err(format!("rho_{} not unital", m.basis_name(i)));
            }
            for p in &pairs {
                let lhs = rho_elem(m, i, &alg.mul_basis(&p[0], &p[1]));
                let rhs = alg.mul(&m.rho(i, &p[0]), &m.rho(i, &p[1]));
                if lhs != rhs {
                    return Err(format!("rho_{} at ({}, {})", m.basis_name(i), alg.label_name(&p[0]), alg.label_name(&p[1])));
                }
                if rho_elem(m, i, &m.rho_inv(i, &p[0])) != Elem::basis(p[0].clone()) {
                    return Err(format!("rho_{} not inverted at {}", m.basis_name(i), alg.label_name(&p[0])));
                }
            }
        }
        Ok(())
    });
    r.check(&format!("{id}.coaction_compatible"), "relative Hopf module", spec.describe(false, xs.len()), || {
        let a = alg.hopf();
        for_all(&xs, |x| {
            for b in &labels {
                let be = Elem::basis(b.clone());
                for (side, lhs) in [("left", coact(m, &lmul(m, &be, x))), ("right", coact(m, &rmul(m, x, &be)))] {
                    let cx = coact(m, x);
                    let cb = alg.coaction_basis(b);
                    let mut rhs = CoElem::zero();
                    for ((ax, mx), c1) in cx.iter() {
                        for (kb, c2) in cb.iter() {
                            let me = ModElem::basis(mx.clone());
                            let (aa, mm) = if side == "left" {
                                (a.mul_basis(&kb[0], ax), lmul(m, &Elem::basis(kb[1].clone()), &me))
                            } else {
                                (a.mul_basis(ax, &kb[0]), rmul(m, &me, &Elem::basis(kb[1].clone())))
                            };
                            for (al, c3) in aa.iter() {
                                for (mk, c4) in mm.iter() {
                                    rhs.add_term((al.clone(), mk.clone()), &(&(c1 * c2) * c3) * c4);
                                }
                            }
                        }
                    }
                    if lhs != rhs {
                        return Err(format!("{side} action at {} and {}", show_mod(m, x), alg.label_name(b)));
                    }
                }
            }
            Ok(())
        })
    });
    r
}

/// The objects involved in `phi_{V,W}`.
pub struct TwistedPair {
    pub tens: Arc<TensorModule>,
    pub tw_v: Arc<TwistedModule>,
    pub tw_w: Arc<TwistedModule>,
    /// `Gamma(V (x) W)`.
    pub tw_tens: Arc<TwistedModule>,
    /// `Gamma(V) (x) Gamma(W)`.
    pub tens_tw: Arc<TensorModule>,
}

impl TwistedPair {
    pub fn new(v: ModRef, w: ModRef, alg: &Arc<TwistedAlgebra>) -> Self {
        let tens = tensor_module(v.clone(), w.clone());
        let tw_v = twist_module(v, alg);
        let tw_w = twist_module(w, alg);
        let tw_tens = twist_module(tens.clone(), alg);
        let tens_tw = tensor_module(tw_v.clone(), tw_w.clone());
        TwistedPair { tens, tw_v, tw_w, tw_tens, tens_tw }
    }

    fn twist(&self) -> &Twist {
        &self.tw_v.alg.twist
    }

    /// `phi(v (x) w) = gamma(v_-1, w_-1) v_0 (x) w_0`.
    pub fn phi(&self, x: &ModElem) -> ModElem {
        let d = &self.twist().data;
        let mut out = ModElem::zero();
        for ((c, k), s) in x.iter() {
            let (i, j) = self.tens_tw.split_index(*k);
            let v = self.tw_v.to_inner(&ModElem::basis((c.clone(), i)));
            let hj = self.tw_w.inner.weight(j);
            let fj = basis_elem(&*self.tw_w.inner, j);
            for ((a, m), t) in coact(&*self.tw_v.inner, &v).iter() {
                let g = d.g(&Elem::basis(a.clone()), &hj);
                if g.is_zero() {
                    continue;
                }
                let z = self.tens.tensor(&ModElem::basis(m.clone()), &fj);
                out.add_scaled(&z, &(&(s * t) * &g));
            }
        }
        self.tw_tens.from_inner(&out)
    }

    /// `phi^-1(v (x) w) = gammabar(v_-1, w_-1) v_0 (x)_gamma w_0`.
    pub fn phi_inv(&self, y: &ModElem) -> ModElem {
        let d = &self.twist().data;
        let u = self.tw_tens.to_inner(y);
        let mut out = ModElem::zero();
        for ((b, k), s) in u.iter() {
            let (i, j) = self.tens.split_index(*k);
            let v = ModElem::basis((b.clone(), i));
            let hj = self.tw_w.inner.weight(j);
            let fj = basis_elem(&*self.tw_w, j);
            for ((a, m), t) in coact(&*self.tw_v.inner, &v).iter() {
                let g = d.gb(&Elem::basis(a.clone()), &hj);
                if g.is_zero() {
                    continue;
                }
                let vm = self.tw_v.from_inner(&ModElem::basis(m.clone()));
                out.add_scaled(&self.tens_tw.tensor(&vm, &fj), &(&(s * t) * &g));
            }
        }
        out
    }

    pub fn phi_morphism(&self) -> Morphism {
        let me = self.clone_refs();
        Morphism::new("phi", self.tens_tw.clone(), self.tw_tens.clone(), move |x| me.phi(x))
    }

    pub fn phi_inv_morphism(&self) -> Morphism {
        let me = self.clone_refs();
        Morphism::new("phi^-1", self.tw_tens.clone(), self.tens_tw.clone(), move |x| me.phi_inv(x))
    }

    fn clone_refs(&self) -> TwistedPair {
        TwistedPair {
            tens: self.tens.clone(),
            tw_v: self.tw_v.clone(),
            tw_w: self.tw_w.clone(),
            tw_tens: self.tw_tens.clone(),
            tens_tw: self.tens_tw.clone(),
        }
    }
}

/// `Gamma(f)`: the same underlying map between twisted modules.
pub fn gamma_map(f: &Morphism, src: &Arc<TwistedModule>, tgt: &Arc<TwistedModule>) -> Morphism {
    let (f2, s, t) = (f.clone(), src.clone(), tgt.clone());
    Morphism::new(format!("Gamma({})", f.name), src.clone(), tgt.clone(), move |x| {
        t.from_inner(&f2.apply(&s.to_inner(x)))
    })
}

/// `T_gamma = phi^-1 . Gamma(T) . phi` for `T: V (x) W -> V' (x) W'`.
pub fn twist_morphism(t: &Morphism, src: &TwistedPair, tgt: &TwistedPair) -> Morphism {
    let g = gamma_map(t, &src.tw_tens, &tgt.tw_tens);
    tgt.phi_inv_morphism().compose(&g).compose(&src.phi_morphism())
}

/// `S_gamma = Gamma(S) . phi` for `S: V (x) W -> X`.
pub fn twist_to_single(s: &Morphism, src: &TwistedPair, tgt: &Arc<TwistedModule>) -> Morphism {
    gamma_map(s, &src.tw_tens, tgt).compose(&src.phi_morphism())
}

/// `fbar: xbar -> f(x)bar`.
pub fn conj_map(f: &Morphism, src: &Arc<ConjModule>, tgt: &Arc<ConjModule>) -> Morphism {
    let (f2, s, t) = (f.clone(), src.clone(), tgt.clone());
    Morphism::new(format!("conj({})", f.name), src.clone(), tgt.clone(), move |x| {
        t.conj_in(&f2.apply(&s.conj_out(x)))
    })
}

/// `Upsilon: (e (x) f)bar -> fbar (x) ebar`.
pub fn upsilon(src: &Arc<ConjModule>, tens: &Arc<TensorModule>, target: &Arc<TensorModule>) -> Morphism {
    // target = conj(F) (x) conj(E)
    let (s, t, tg) = (src.clone(), tens.clone(), target.clone());
    let cf = conj_module(t.right.clone());
    let ce = conj_module(t.left.clone());
    Morphism::new("Upsilon", src.clone(), target.clone(), move |x| {
        let z = s.conj_out(x);
        let mut out = ModElem::zero();
        for ((b, k), c) in z.iter() {
            let (i, j) = t.split_index(*k);
            let fbar = cf.conj_in(&basis_elem(&*t.right, j));
            let ebar = ce.conj_in(&ModElem::basis((b.clone(), i)));
            out.add_scaled(&tg.tensor(&fbar, &ebar), &c.conj());
        }
        out
    })
}

/// `bb: e -> (ebar)bar`.
pub fn bb(e: ModRef) -> (Arc<ConjModule>, Arc<ConjModule>, Morphism) {
    let c1 = conj_module(e.clone());
    let c2 = conj_module(c1.clone());
    let (a, b) = (c1.clone(), c2.clone());
    let m = Morphism::new("bb", e, c2.clone(), move |x| b.conj_in(&a.conj_in(x)));
    (c1, c2, m)
}

/// The objects around `N_E: conj(Gamma(E)) -> Gamma(conj(E))`.
pub struct BarTwist {
    pub e: ModRef,
    pub tw: Arc<TwistedModule>,
    pub conj_tw: Arc<ConjModule>,
    pub conj: Arc<ConjModule>,
    pub tw_conj: Arc<TwistedModule>,
}

impl BarTwist {
    pub fn new(e: ModRef, alg: &Arc<TwistedAlgebra>) -> Self {
        let tw = twist_module(e.clone(), alg);
        let conj_tw = conj_module(tw.clone());
        let conj = conj_module(e.clone());
        let tw_conj = twist_module(conj.clone(), alg);
        BarTwist { e, tw, conj_tw, conj, tw_conj }
    }

    fn twist(&self) -> &Twist {
        &self.tw.alg.twist
    }

    /// `N(xbar) = Vbar(x_-1*) xbar_0`; with `omit_vbar` the factor is dropped.
    pub fn frak_n_with(&self, omit_vbar: bool) -> Morphism {
        let (c_tw, tw, conj, tw_conj) = (self.conj_tw.clone(), self.tw.clone(), self.conj.clone(), self.tw_conj.clone());
        let d = self.twist().data.clone();
        let name = if omit_vbar { "N (Vbar omitted)" } else { "N" };
        Morphism::new(name, self.conj_tw.clone(), self.tw_conj.clone(), move |y| {
            let x = tw.to_inner(&c_tw.conj_out(y));
            let xbar = conj.conj_in(&x);
            let mut out = ModElem::zero();
            for ((a, m), c) in coact(&*conj, &xbar).iter() {
                let v = if omit_vbar { Cyc::one() } else { d.vbar(a) };
                out.add_term(m.clone(), c * &v);
            }
            tw_conj.from_inner(&out)
        })
    }

    pub fn frak_n(&self) -> Morphism {
        self.frak_n_with(false)
    }

    /// `N^-1(Gamma(ebar)) = V(e_-1*) conj(Gamma(e_0))`.
    pub fn frak_n_inv(&self) -> Morphism {
        let (c_tw, tw, conj, tw_conj) = (self.conj_tw.clone(), self.tw.clone(), self.conj.clone(), self.tw_conj.clone());
        let d = self.twist().data.clone();
        Morphism::new("N^-1", self.tw_conj.clone(), self.conj_tw.clone(), move |y| {
            let ebar = tw_conj.to_inner(y);
            let mut out = ModElem::zero();
            for ((a, m), c) in coact(&*conj, &ebar).iter() {
                let e0 = conj.conj_out(&ModElem::basis(m.clone()));
                let x = c_tw.conj_in(&tw.from_inner(&e0));
                out.add_scaled(&x, &(c * &d.v(a)));
            }
            out
        })
    }
}

/// Options for fault injection in [`verify_bar_functor`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BarOptions {
    /// Replace `N` by the identity on underlying elements.
    pub identity_n: bool,
}

/// The bar-functor conditions for `Gamma` on `E`, `F` (hexagon, `bb`),
/// `N N^-1 = id`, and the star-object transport `star_gamma = N^-1 Gamma(star)` on `E`.
pub fn verify_bar_functor(
    e: ModRef,
    f: ModRef,
    alg: &Arc<TwistedAlgebra>,
    spec: &SampleSpec,
    opts: BarOptions,
    prefix: &str,
) -> VerificationReport {
    let mut r = VerificationReport::new();
    let be = BarTwist::new(e.clone(), alg);
    let bf = BarTwist::new(f.clone(), alg);
    let pair = TwistedPair::new(e.clone(), f.clone(), alg);
    let bef = BarTwist::new(pair.tens.clone(), alg);
    let conj_tens_tw = conj_module(pair.tens_tw.clone());
    let cgf_cge = tensor_module(bf.conj_tw.clone(), be.conj_tw.clone());
    let gfb_geb = TwistedPair::new(bf.conj.clone(), be.conj.clone(), alg);
    let n_e = be.frak_n_with(opts.identity_n);
    let n_f = bf.frak_n_with(opts.identity_n);
    let n_ef = bef.frak_n_with(opts.identity_n);

    let samples = sample_elems(&*bef.conj_tw, spec, 71);
    r.check(&format!("{prefix}.hexagon"), "bar functor: hexagon for Upsilon", spec.describe(false, samples.len()), || {
        let ups_tw = upsilon(&conj_tens_tw, &pair.tens_tw, &cgf_cge);
        let phi_inv_conj = conj_map(&pair.phi_inv_morphism(), &bef.conj_tw, &conj_tens_tw);
        let ups_plain = upsilon(&bef.conj, &pair.tens, &gfb_geb.tens);
        let gu = gamma_map(&ups_plain, &bef.tw_conj, &gfb_geb.tw_tens);
        for_all(&samples, |x| {
            let step = ups_tw.apply(&phi_inv_conj.apply(x));
            let lhs = cgf_cge.map_pair(&gfb_geb.tens_tw, &step, |y| n_f.apply(y), |y| n_e.apply(y));
            let rhs = gfb_geb.phi_inv(&gu.apply(&n_ef.apply(x)));
            if lhs != rhs {
                return Err(format!(
                    "at {}: lhs = {}, rhs = {}",
                    show_mod(&*bef.conj_tw, x),
                    show_mod(&*gfb_geb.tens_tw, &lhs),
                    show_mod(&*gfb_geb.tens_tw, &rhs)
                ));
            }
            Ok(())
        })
    });

    // Gamma(bb_E) = N_{Ebar} . conj(N_E) . bb_{Gamma(E)}
    let xs = sample_elems(&*be.tw, spec, 72);
    r.check(&format!("{prefix}.bb"), "bar functor: bb condition", spec.describe(false, xs.len()), || {
        let (_, cc, bb_e) = bb(e.clone());
        let tw_cc = twist_module(cc.clone(), alg);
        let g_bb = gamma_map(&bb_e, &be.tw, &tw_cc);
        let (_, _, bb_tw) = bb(be.tw.clone());
        let bconj = BarTwist::new(be.conj.clone(), alg);
        let n_conj = bconj.frak_n_with(opts.identity_n);
        let c_n = conj_map(&n_e, &conj_module(be.conj_tw.clone()), &bconj.conj_tw);
        for_all(&xs, |x| {
            let lhs = g_bb.apply(x);
            let rhs = n_conj.apply(&c_n.apply(&bb_tw.apply(x)));
            if lhs != rhs {
                return Err(format!("at {}", show_mod(&*be.tw, x)));
            }
            Ok(())
        })
    });

    let ys = sample_elems(&*be.conj_tw, spec, 73);
    r.check(&format!("{prefix}.n_inverse"), "N and its inverse", spec.describe(false, ys.len()), || {
        let n_inv = be.frak_n_inv();
        for_all(&ys, |y| {
            if n_inv.apply(&n_e.apply(y)) != *y {
                return Err(format!("N^-1 N at {}", show_mod(&*be.conj_tw, y)));
            }
            let z = be.tw_conj.from_inner(&be.tw_conj.to_inner(y));
            if n_e.apply(&n_inv.apply(&z)) != z {
                return Err(format!("N N^-1 at {}", show_mod(&*be.tw_conj, &z)));
            }
            Ok(())
        })
    });

    if e.has_star() && alg.has_star() {
        r.check(&format!("{prefix}.star_object"), "star object: star_gamma = N^-1 Gamma(star)", spec.describe(false, xs.len()), || {
            let n_inv = be.frak_n_inv();
            let star_plain = star_object_map(e.clone(), be.conj.clone());
            let g_star = gamma_map(&star_plain, &be.tw, &be.tw_conj);
            for_all(&xs, |x| {
                let tw_star = be.tw.star(x).ok_or("no twisted star")?;
                let lhs = be.conj_tw.conj_in(&tw_star);
                let rhs = n_inv.apply(&g_star.apply(x));
                if lhs != rhs {
                    return Err(format!(
                        "at {}: lhs = {}, rhs = {}",
                        show_mod(&*be.tw, x),
                        show_mod(&*be.conj_tw, &lhs),
                        show_mod(&*be.conj_tw, &rhs)
                    ));
                }
                Ok(())
            })
        });
        let bs = spec.pick(&alg.box_labels(spec.radius.min(2)), 74);
        r.check(&format!("{prefix}.twisted_star"), "twisted star is an involutive bimodule star", spec.describe(false, xs.len() * bs.len()), || {
            let m = &*be.tw;
            for_all(&xs, |x| {
                let s = m.star(x).ok_or("no twisted star")?;
                if m.star(&s).ok_or("no twisted star")? != *x {
                    return Err(format!("not involutive at {}", show_mod(m, x)));
                }
                for b in &bs {
                    let be_ = Elem::basis(b.clone());
                    let lhs = m.star(&lmul(m, &be_, x)).ok_or("no twisted star")?;
                    let rhs = rmul(m, &s, &alg.star(&be_));
                    if lhs != rhs {
                        return Err(format!("(b x)* at {} and {}", alg.label_name(b), show_mod(m, x)));
                    }
                }
                Ok(())
            })
        });
    } else {
        r.skip(&format!("{prefix}.star_object"), "star object", "module has no star");
    }
    r
}

/// `star: E -> conj(E)`, `x -> (x*)bar`.
pub fn star_object_map(e: ModRef, conj: Arc<ConjModule>) -> Morphism {
    let (e2, c) = (e.clone(), conj.clone());
    Morphism::new("star", e, conj, move |x| c.conj_in(&e2.star(x).expect("module star")))
}

/// `S: Gamma(Hom(E, B)) -> Hom(Gamma(E), B_gamma)`,
/// `S(f)(v) = gamma(v_-2 (x) S(v_-1) f(v_0)_-1) f(v_0)_0`.
pub struct HomTwist {
    pub dual: Arc<DualModule>,
    pub tw_dual: Arc<TwistedModule>,
    pub tw: Arc<TwistedModule>,
    pub dual_tw: Arc<DualModule>,
}

impl HomTwist {
    pub fn new(e: ModRef, alg: &Arc<TwistedAlgebra>) -> Self {
        let dual = dual_module(e.clone());
        let tw_dual = twist_module(dual.clone(), alg);
        let tw = twist_module(e, alg);
        let dual_tw = dual_module(tw.clone());
        HomTwist { dual, tw_dual, tw, dual_tw }
    }

    pub fn frak_s(&self) -> Morphism {
        let (dual, tw_dual, tw, dual_tw) = (self.dual.clone(), self.tw_dual.clone(), self.tw.clone(), self.dual_tw.clone());
        Morphism::new("S", self.tw_dual.clone(), self.dual_tw.clone(), move |y| {
            let f = tw_dual.to_inner(y);
            let base = tw.inner.algebra();
            let a = base.hopf();
            let d = &tw.alg.twist.data;
            let values: Vec<Elem> = (0..tw.rank())
                .map(|i| {
                    // 1 e_i in Gamma(E) is e_i, with v_-2 (x) v_-1 = g_i (x) g_i
                    let g = tw.inner.weight(i);
                    let sg = a.antipode(&g);
                    let fv = dual.value(&f, i);
                    let mut out = Elem::zero();
                    for (k, c) in base.coaction(&fv).iter() {
                        let arg = a.mul(&sg, &Elem::basis(k[0].clone()));
                        out.add_term(k[1].clone(), c * &d.g(&g, &arg));
                    }
                    out
                })
                .collect();
            dual_tw.from_values(&values)
        })
    }
}

/// `ev(e (x) f) = f(e)` is covariant for the Hom coaction.
pub fn verify_hom_coaction(e: ModRef, spec: &SampleSpec, id: &str) -> VerificationReport {
    let dual = dual_module(e.clone());
    let alg = e.algebra();
    let a = alg.hopf();
    let xs = sample_elems(&*e, spec, 81);
    let fs = sample_elems(&*dual, spec, 82);
    let mut r = VerificationReport::new();
    r.check(&format!("{id}.ev_covariant"), "Hom coaction", spec.describe(false, xs.len() * fs.len()), || {
        for_all(&xs, |x| {
            for f in &fs {
                let lhs = alg.coaction(&dual.eval(f, x));
                let mut rhs = Tensor::zero();
                for ((a1, m1), c1) in coact(&*e, x).iter() {
                    for ((a2, m2), c2) in coact(&*dual, f).iter() {
                        let ev = dual.eval(&ModElem::basis(m2.clone()), &ModElem::basis(m1.clone()));
                        let aa = a.mul_basis(a1, a2);
                        rhs.add_scaled(&crate::hopf::tensor2(&aa, &ev), &(c1 * c2));
                    }
                }
                if lhs != rhs {
                    return Err(format!("at {} and {}", show_mod(&*e, x), show_mod(&*dual, f)));
                }
            }
            Ok(())
        })
    });
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{bicharacter_cocycle, theta_2d, theta_cocycle, Bicharacter};
    use crate::hopf::{AbelianGroup, FiniteGroup, FunAlgebra, GroupAlgebra};
    use crate::scalars::Q;

    fn spec() -> SampleSpec {
        SampleSpec::new(2, 12, 42)
    }

    fn u(m: &[i64]) -> Elem {
        Elem::basis(Label::new(m))
    }

    fn certified(mut d: CocycleData) -> Twist {
        let r = d.certify(&SampleSpec::new(2, 40, 42));
        assert!(r.all_pass(), "{}", r.to_text());
        Twist::new(&d).unwrap()
    }

    fn torus() -> (AlgRef, Arc<TwistedAlgebra>) {
        let t = certified(theta_cocycle(theta_2d(1, 3), 3).unwrap());
        let b: AlgRef = Arc::new(Regular::monomials(t.data.hopf.clone(), &["x", "y"]));
        let bg = twist_comodule_algebra(b.clone(), &t);
        (b, bg)
    }

    fn omega1(b: &AlgRef) -> ModRef {
        let m = |i| embed(&b.unit(), i).neg();
        Arc::new(FreeModule::central("Omega1", b.clone(), &["w1", "w2"]).with_stars(vec![m(0), m(1)]))
    }

    /// `C[Z_3 x Z_3]` with the non-skew bicharacter `[[0, 1/3], [0, 0]]`.
    fn instrument() -> (AlgRef, Arc<TwistedAlgebra>) {
        let h: HopfRef = Arc::new(GroupAlgebra::new(AbelianGroup::finite(&[3, 3])));
        let z = Q::from_integer(0.into());
        let b = Bicharacter::new(vec![vec![z.clone(), Q::new(1.into(), 3.into())], vec![z.clone(), z]], 3).unwrap();
        let t = certified(bicharacter_cocycle(h.clone(), b, "gamma"));
        let alg: AlgRef = Arc::new(Regular::new(h));
        let bg = twist_comodule_algebra(alg.clone(), &t);
        (alg, bg)
    }

    /// Rank 2 with weights `u(1,0)`, `u(-1,0)` and `e_0* = e_1`.
    fn weighted(b: &AlgRef) -> ModRef {
        Arc::new(FreeModule {
            name: "W".into(),
            alg: b.clone(),
            names: vec!["e0".into(), "e1".into()],
            weights: vec![u(&[1, 0]), u(&[2, 0])],
            rho: None,
            stars: Some(vec![embed(&b.unit(), 1), embed(&b.unit(), 0)]),
        })
    }

    #[test]
    fn twisted_algebras_are_comodule_star_algebras() {
        for (b, bg) in [torus(), instrument()] {
            let r = verify_comodule_algebra(&*b, &spec());
            assert!(r.all_pass(), "{}", r.to_text());
            let r = verify_comodule_algebra(&*bg, &spec());
            assert!(r.all_pass(), "{}", r.to_text());
        }
    }

    #[test]
    fn torus_twisted_product() {
        let (_, bg) = torus();
        let yx = bg.mul(&u(&[0, 1]), &u(&[1, 0]));
        let xy = bg.mul(&u(&[1, 0]), &u(&[0, 1]));
        assert_eq!(xy, u(&[1, 1]).scale(&Cyc::root(3, -1).unwrap()));
        assert_eq!(yx, xy.scale(&Cyc::root(3, 2).unwrap()));
    }

    #[test]
    fn twisted_modules_satisfy_axioms() {
        let (b, bg) = instrument();
        let e: ModRef = Arc::new(FreeModule::algebra_itself(b.clone()));
        let w = weighted(&b);
        let tw: Vec<ModRef> = vec![
            twist_module(e.clone(), &bg),
            twist_module(w.clone(), &bg),
            tensor_module(w.clone(), w.clone()),
            conj_module(w.clone()),
            dual_module(w.clone()),
            conj_module(twist_module(w.clone(), &bg)),
            dual_module(twist_module(w.clone(), &bg)),
        ];
        for m in tw {
            let r = verify_module(&*m, &spec(), "module");
            assert!(r.all_pass(), "{}: {}", m.name(), r.to_text());
        }
    }

    #[test]
    fn twisted_coaction_is_underlying_coaction() {
        let (b, bg) = instrument();
        let t = twist_module(weighted(&b), &bg);
        for x in sample_elems(&*t, &spec(), 1) {
            let direct = coact(&*t, &x);
            let via = map_co(&coact(&*t.inner, &t.to_inner(&x)), |m| t.from_inner(m));
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn phi_on_torus_forms() {
        let (b, bg) = torus();
        let w = omega1(&b);
        let p = TwistedPair::new(w.clone(), w.clone(), &bg);
        let x = p.tens_tw.tensor(&embed(&u(&[1, 0]), 0), &embed(&u(&[0, 1]), 1));
        let plain = p.tens.tensor(&embed(&u(&[1, 0]), 0), &embed(&u(&[0, 1]), 1));
        assert_eq!(p.tw_tens.to_inner(&p.phi(&x)), plain.scale(&Cyc::root(3, -1).unwrap()));
    }

    #[test]
    fn phi_is_an_invertible_bimodule_map() {
        let (b, bg) = instrument();
        let w = weighted(&b);
        let p = TwistedPair::new(w.clone(), w.clone(), &bg);
        let s = spec();
        let r = verify_morphism(&p.phi_morphism(), &s, "phi", "phi");
        assert!(r.all_pass(), "{}", r.to_text());
        for x in sample_elems(&*p.tens_tw, &s, 3) {
            assert_eq!(p.phi_inv(&p.phi(&x)), x);
        }
        for y in sample_elems(&*p.tw_tens, &s, 4) {
            assert_eq!(p.phi(&p.phi_inv(&y)), y);
        }
    }

    #[test]
    fn n_is_trivial_on_torus_forms() {
        let (b, bg) = torus();
        let bt = BarTwist::new(omega1(&b), &bg);
        let n = bt.frak_n();
        for i in 0..2 {
            assert_eq!(n.apply(&embed(&b.unit(), i)), embed(&b.unit(), i));
        }
    }

    #[test]
    fn bar_functor_on_instrument_and_fault() {
        let (b, bg) = instrument();
        let w = weighted(&b);
        let e: ModRef = Arc::new(FreeModule::algebra_itself(b.clone()));
        let s = spec();
        for (x, y) in [(e.clone(), e.clone()), (w.clone(), e.clone()), (w.clone(), w.clone())] {
            let r = verify_bar_functor(x, y, &bg, &s, BarOptions::default(), "bar");
            assert!(r.all_pass(), "{}", r.to_text());
        }
        let r = verify_bar_functor(e.clone(), e, &bg, &s, BarOptions { identity_n: true }, "bar");
        assert!(!r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn bar_functor_on_torus() {
        let (b, bg) = torus();
        let w = omega1(&b);
        let r = verify_bar_functor(w.clone(), w, &bg, &spec(), BarOptions::default(), "bar");
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn frak_s_is_identity_for_trivial_cocycle() {
        let fun: HopfRef = Arc::new(FunAlgebra::new(FiniteGroup::symmetric(3)));
        let t = certified(CocycleData::trivial(fun.clone()));
        let b: AlgRef = Arc::new(Regular::new(fun));
        let bg = twist_comodule_algebra(b.clone(), &t);
        let e: ModRef = Arc::new(FreeModule::central("E", b, &["e0", "e1"]));
        let h = HomTwist::new(e, &bg);
        let s = h.frak_s();
        for y in sample_elems(&*h.tw_dual, &spec(), 5) {
            let f = h.tw_dual.to_inner(&y);
            let g = s.apply(&y);
            for i in 0..2 {
                assert_eq!(h.dual_tw.value(&g, i), h.dual.value(&f, i));
            }
        }
    }

    #[test]
    fn frak_s_is_a_bimodule_map() {
        let (b, bg) = instrument();
        let h = HomTwist::new(weighted(&b), &bg);
        let r = verify_morphism(&h.frak_s(), &spec(), "frak_s", "Hom vs twist");
        assert!(r.all_pass(), "{}", r.to_text());
        let r = verify_hom_coaction(weighted(&b), &spec(), "hom");
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn twisting_back_recovers_module() {
        let (b, bg) = instrument();
        let w = weighted(&b);
        let t1 = twist_module(w.clone(), &bg);
        let (back, r) = bg.twist.reverse(&spec()).unwrap();
        assert!(r.all_pass(), "{}", r.to_text());
        let bgg = twist_comodule_algebra(bg.clone(), &back);
        let t2 = twist_module(t1.clone(), &bgg);
        let labels = b.box_labels(1);
        for x in &labels {
            for y in &labels {
                assert_eq!(bgg.mul_basis(x, y), b.mul_basis(x, y));
            }
            for i in 0..2 {
                assert_eq!(t2.rho(i, x), w.rho(i, x));
            }
        }
    }
}
