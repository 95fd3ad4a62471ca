//! Covariant *-differential calculi on free modules, their twists, complex
//! structures, factorization, holomorphic bimodules and Kähler forms.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::linalg::{self, Row};
use crate::linear::{Elem, Label};
use crate::relhopf::{
    basis_elem, coact, coefficient, embed, lmul, map_co, rmul, sample_elems, show_mod, tensor_module, twist_module,
    AlgRef, FreeModule, ModElem, ModRef, Module, Morphism, TensorModule, TwistedAlgebra, TwistedModule, TwistedPair,
};
use crate::report::{SampleSpec, VerificationReport};
use crate::scalars::Cyc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalculusError {
    #[error("not factorizable: the wedge map onto {target} is singular")]
    NotFactorizable { target: String },
    #[error("adapted basis in degree {degree} is not invertible")]
    SingularAdaptedBasis { degree: usize },
    #[error("structure constant is not a scalar: {what}")]
    NotScalar { what: String },
    #[error("twisted star needs a unitary cocycle")]
    MissingUnitarity,
}

/// A graded differential calculus `(Omega^k, wedge, d)` with `Omega^0 = B`.
pub trait Calc: Send + Sync {
    fn name(&self) -> String;
    fn alg(&self) -> AlgRef;
    fn top(&self) -> usize;
    /// `Omega^k`; degree 0 is `B` over itself with basis `1`.
    fn module(&self, k: usize) -> ModRef;
    fn wedge(&self, k: usize, x: &ModElem, l: usize, y: &ModElem) -> ModElem;
    fn d(&self, k: usize, x: &ModElem) -> ModElem;
    fn star(&self, k: usize, x: &ModElem) -> Option<ModElem> {
        self.module(k).star(x)
    }
}

pub type CalcRef = Arc<dyn Calc>;

/// `b` as a 0-form.
pub fn function(b: &Elem) -> ModElem {
    embed(b, 0)
}

/// The coefficient of a unit-label-only element, if it is a scalar.
pub fn as_scalar(alg: &AlgRef, x: &Elem) -> Option<Cyc> {
    let one = alg.unit();
    let (u, _) = one.iter().next()?;
    if x.keys().all(|k| k == u) {
        Some(x.coeff(u))
    } else {
        None
    }
}

/// Coordinates of a form with scalar coefficients in the module basis.
pub fn scalar_coords(m: &dyn Module, x: &ModElem) -> Option<Vec<Cyc>> {
    let alg = m.algebra();
    (0..m.rank()).map(|i| as_scalar(&alg, &coefficient(x, i))).collect()
}

pub fn from_coords(m: &dyn Module, c: &[Cyc]) -> ModElem {
    let one = m.algebra().unit();
    let mut out = ModElem::zero();
    for (i, v) in c.iter().enumerate() {
        out.add_scaled(&embed(&one, i), v);
    }
    out
}

type DAlg = Arc<dyn Fn(&Label) -> ModElem + Send + Sync>;

/// A calculus given by tables on central coinvariant basis forms.
pub struct BasisCalculus {
    pub name: String,
    pub alg: AlgRef,
    pub modules: Vec<ModRef>,
    /// `(k, i, l, j) -> e^k_i wedge e^l_j` for `k, l >= 1`.
    pub wedge_table: HashMap<(usize, usize, usize, usize), ModElem>,
    /// `d` on algebra basis labels, valued in `Omega^1`.
    pub d_alg: DAlg,
    /// `d e^k_i` for `k >= 1`.
    pub d_basis: Vec<Vec<ModElem>>,
    /// Witnesses that `Omega^1` is generated by `B dB`: `e_i = sum a d(u_l)`.
    pub generators: Vec<Vec<(Elem, Label)>>,
}

impl Calc for BasisCalculus {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn alg(&self) -> AlgRef {
        self.alg.clone()
    }
    fn top(&self) -> usize {
        self.modules.len() - 1
    }
    fn module(&self, k: usize) -> ModRef {
        self.modules[k].clone()
    }
    fn wedge(&self, k: usize, x: &ModElem, l: usize, y: &ModElem) -> ModElem {
        if k + l > self.top() {
            return ModElem::zero();
        }
        if k == 0 {
            return lmul(&*self.modules[l], &coefficient(x, 0), y);
        }
        if l == 0 {
            return rmul(&*self.modules[k], x, &coefficient(y, 0));
        }
        let (mk, target) = (&self.modules[k], &self.modules[k + l]);
        let mut out = ModElem::zero();
        for ((b, i), c) in x.iter() {
            for ((b2, j), c2) in y.iter() {
                let Some(w) = self.wedge_table.get(&(k, *i, l, *j)) else { continue };
                let coef = self.alg.mul(&Elem::basis(b.clone()), &mk.rho(*i, b2));
                out = out.add(&lmul(&**target, &coef, w).scale(&(c * c2)));
            }
        }
        out
    }
    fn d(&self, k: usize, x: &ModElem) -> ModElem {
        if k >= self.top() {
            return ModElem::zero();
        }
        let mut out = ModElem::zero();
        for ((b, i), c) in x.iter() {
            let db = (self.d_alg)(b);
            if k == 0 {
                out.add_scaled(&db, c);
                continue;
            }
            let ei = basis_elem(&*self.modules[k], *i);
            out.add_scaled(&self.wedge(1, &db, k, &ei), c);
            out.add_scaled(&lmul(&*self.modules[k + 1], &Elem::basis(b.clone()), &self.d_basis[k][*i]), c);
        }
        out
    }
}

/// `(Omega_gamma, wedge_gamma, d_gamma)`: `Gamma` applied degreewise,
/// `x wedge_gamma y = gamma(x_-1, y_-1) x_0 wedge y_0`, `d_gamma = Gamma(d)`.
pub struct TwistedCalculus {
    pub base: CalcRef,
    pub alg: Arc<TwistedAlgebra>,
    pub modules: Vec<Arc<TwistedModule>>,
}

pub fn twist_calculus(base: CalcRef, alg: &Arc<TwistedAlgebra>) -> Arc<TwistedCalculus> {
    let modules = (0..=base.top()).map(|k| twist_module(base.module(k), alg)).collect();
    Arc::new(TwistedCalculus { base, alg: alg.clone(), modules })
}

impl Calc for TwistedCalculus {
    fn name(&self) -> String {
        format!("{}_{}", self.base.name(), self.alg.twist.data.gamma.name)
    }
    fn alg(&self) -> AlgRef {
        self.alg.clone()
    }
    fn top(&self) -> usize {
        self.base.top()
    }
    fn module(&self, k: usize) -> ModRef {
        self.modules[k].clone()
    }
    fn wedge(&self, k: usize, x: &ModElem, l: usize, y: &ModElem) -> ModElem {
        if k + l > self.top() {
            return ModElem::zero();
        }
        let d = &self.alg.twist.data;
        let (u, v) = (self.modules[k].to_inner(x), self.modules[l].to_inner(y));
        let (cu, cv) = (coact(&*self.base.module(k), &u), coact(&*self.base.module(l), &v));
        let mut out = ModElem::zero();
        for ((a, m), c) in cu.iter() {
            for ((a2, m2), c2) in cv.iter() {
                let g = d.gamma.eval(a, a2);
                if g.is_zero() {
                    continue;
                }
                let w = self.base.wedge(k, &ModElem::basis(m.clone()), l, &ModElem::basis(m2.clone()));
                out.add_scaled(&w, &(&(c * c2) * &g));
            }
        }
        self.modules[k + l].from_inner(&out)
    }
    fn d(&self, k: usize, x: &ModElem) -> ModElem {
        if k >= self.top() {
            return ModElem::zero();
        }
        self.modules[k + 1].from_inner(&self.base.d(k, &self.modules[k].to_inner(x)))
    }
}

fn sign(k: usize) -> Cyc {
    if k % 2 == 0 {
        Cyc::one()
    } else {
        Cyc::from_int(-1)
    }
}

fn samples(c: &dyn Calc, k: usize, spec: &SampleSpec, stream: u64) -> Vec<ModElem> {
    sample_elems(&*c.module(k), spec, stream)
}

/// Differential-calculus laws on samples; `*` laws when every degree has a star.
pub fn verify_calculus(c: &dyn Calc, spec: &SampleSpec, generators: Option<&[Vec<(Elem, Label)>]>) -> VerificationReport {
    let mut r = VerificationReport::new();
    let top = c.top();
    let small = SampleSpec { samples: spec.samples.min(30), ..spec.clone() };
    let per_deg: Vec<Vec<ModElem>> = (0..=top).map(|k| samples(c, k, &small, 100 + k as u64)).collect();
    let desc = small.describe(false, per_deg.iter().map(|v| v.len()).sum());
    let show = |k: usize, x: &ModElem| show_mod(&*c.module(k), x);
    r.check("calculus.d_squared", "covariant calculus: d^2 = 0", desc.clone(), || {
        for k in 0..top.saturating_sub(1) {
            for x in &per_deg[k] {
                let dd = c.d(k + 1, &c.d(k, x));
                if !dd.is_zero() {
                    return Err(format!("d d({}) = {}", show(k, x), show(k + 2, &dd)));
                }
            }
        }
        Ok(())
    });
    r.check("calculus.leibniz", "covariant calculus: graded Leibniz", desc.clone(), || {
        for k in 0..top {
            for l in 0..top - k {
                for (x, y) in per_deg[k].iter().zip(per_deg[l].iter().rev()).take(12) {
                    let lhs = c.d(k + l, &c.wedge(k, x, l, y));
                    let rhs = c.wedge(k + 1, &c.d(k, x), l, y).add(&c.wedge(k, x, l + 1, &c.d(l, y)).scale(&sign(k)));
                    if lhs != rhs {
                        return Err(format!("at ({}, {})", show(k, x), show(l, y)));
                    }
                }
            }
        }
        Ok(())
    });
    r.check("calculus.wedge_associative", "covariant calculus: associativity", desc.clone(), || {
        for k in 0..=top {
            for l in 0..=top - k {
                for m in 0..=top - k - l {
                    for ((x, y), z) in per_deg[k].iter().zip(per_deg[l].iter().rev()).zip(per_deg[m].iter().skip(1)).take(6) {
                        let lhs = c.wedge(k + l, &c.wedge(k, x, l, y), m, z);
                        let rhs = c.wedge(k, x, l + m, &c.wedge(l, y, m, z));
                        if lhs != rhs {
                            return Err(format!("at ({}, {}, {})", show(k, x), show(l, y), show(m, z)));
                        }
                    }
                }
            }
        }
        Ok(())
    });
    r.check("calculus.covariant", "covariant calculus: d and wedge covariant", desc.clone(), || {
        for k in 0..=top {
            let mk = c.module(k);
            for x in &per_deg[k] {
                if k < top {
                    let lhs = coact(&*c.module(k + 1), &c.d(k, x));
                    let rhs = map_co(&coact(&*mk, x), |m| c.d(k, m));
                    if lhs != rhs {
                        return Err(format!("d at {}", show(k, x)));
                    }
                }
                for l in 1..=top - k {
                    let y = &per_deg[l][0];
                    let lhs = coact(&*c.module(k + l), &c.wedge(k, x, l, y));
                    let a = c.alg().hopf();
                    let mut rhs = crate::relhopf::CoElem::zero();
                    for ((a1, m1), c1) in coact(&*mk, x).iter() {
                        for ((a2, m2), c2) in coact(&*c.module(l), y).iter() {
                            let w = c.wedge(k, &ModElem::basis(m1.clone()), l, &ModElem::basis(m2.clone()));
                            for (al, c3) in a.mul_basis(a1, a2).iter() {
                                for (mk2, c4) in w.iter() {
                                    rhs.add_term((al.clone(), mk2.clone()), &(&(c1 * c2) * c3) * c4);
                                }
                            }
                        }
                    }
                    if lhs != rhs {
                        return Err(format!("wedge at ({}, {})", show(k, x), show(l, y)));
                    }
                }
            }
        }
        Ok(())
    });
    if let Some(gens) = generators {
        r.check("calculus.generated", "covariant calculus: generated by B and dB", small.describe(true, gens.len()), || {
            let m1 = c.module(1);
            for (i, g) in gens.iter().enumerate() {
                let mut s = ModElem::zero();
                for (a, l) in g {
                    s = s.add(&lmul(&*m1, a, &c.d(0, &function(&Elem::basis(l.clone())))));
                }
                if s != basis_elem(&*m1, i) {
                    return Err(format!("{} is not {}", m1.basis_name(i), show(1, &s)));
                }
            }
            for k in 2..=top {
                let mk = c.module(k);
                for j in 0..mk.rank() {
                    let hit = (0..m1.rank()).any(|i| {
                        (0..c.module(k - 1).rank()).any(|i2| {
                            let w = c.wedge(1, &basis_elem(&*m1, i), k - 1, &basis_elem(&*c.module(k - 1), i2));
                            scalar_coords(&*mk, &w).map(|v| {
                                v.iter().enumerate().all(|(t, x)| if t == j { !x.is_zero() } else { x.is_zero() })
                            }) == Some(true)
                        })
                    });
                    if !hit {
                        return Err(format!("{} is not a wedge of 1-forms", mk.basis_name(j)));
                    }
                }
            }
            Ok(())
        });
    }
    let has_star = (0..=top).all(|k| c.module(k).has_star());
    if has_star {
        r.check("calculus.star_d", "*-calculus: (d w)* = d(w*)", desc.clone(), || {
            for k in 0..top {
                for x in &per_deg[k] {
                    let lhs = c.star(k + 1, &c.d(k, x)).ok_or("no star")?;
                    let rhs = c.d(k, &c.star(k, x).ok_or("no star")?);
                    if lhs != rhs {
                        return Err(format!("at {}", show(k, x)));
                    }
                }
            }
            Ok(())
        });
        r.check("calculus.star_wedge", "*-calculus: graded antimultiplicative", desc, || {
            for k in 0..=top {
                for l in 0..=top - k {
                    for (x, y) in per_deg[k].iter().zip(per_deg[l].iter().rev()).take(10) {
                        let lhs = c.star(k + l, &c.wedge(k, x, l, y)).ok_or("no star")?;
                        let (xs, ys) = (c.star(k, x).ok_or("no star")?, c.star(l, y).ok_or("no star")?);
                        let rhs = c.wedge(l, &ys, k, &xs).scale(&sign(k * l));
                        if lhs != rhs {
                            return Err(format!("at ({}, {})", show(k, x), show(l, y)));
                        }
                    }
                }
            }
            Ok(())
        });
    } else {
        r.skip("calculus.star_d", "*-calculus", "calculus has no star");
    }
    r
}

pub type Bigrade = (usize, usize);

/// A bigrading by an adapted basis of scalar combinations of the basis forms.
#[derive(Clone)]
pub struct ComplexStructure {
    pub calc: CalcRef,
    /// Per degree: adapted vectors (coordinates in the module basis) with bigrade.
    pub adapted: Vec<Vec<(Vec<Cyc>, Bigrade)>>,
    /// Per degree: `inverse[i][a]` with `e_i = sum_a inverse[i][a] f_a`.
    inverse: Vec<Vec<Vec<Cyc>>>,
}

fn invert(m: &[Vec<Cyc>]) -> Option<Vec<Vec<Cyc>>> {
    // rows of m are the adapted vectors f_a = sum_i m[a][i] e_i; solve for e_i
    let n = m.len();
    let mut out = vec![vec![Cyc::zero(); n]; n];
    for i in 0..n {
        // sum_a x_a m[a][j] = delta_ij
        let rows: Vec<Row> = (0..n)
            .map(|j| (0..n).filter(|a| !m[*a][j].is_zero()).map(|a| (a, m[a][j].clone())).collect::<BTreeMap<_, _>>())
            .collect();
        let rhs: Vec<Cyc> = (0..n).map(|j| if i == j { Cyc::one() } else { Cyc::zero() }).collect();
        let s = linalg::solve(&rows, &rhs, n).ok()?;
        if !s.is_unique() {
            return None;
        }
        out[i] = s.particular;
    }
    Some(out)
}

impl ComplexStructure {
    pub fn new(calc: CalcRef, adapted: Vec<Vec<(Vec<Cyc>, Bigrade)>>) -> Result<Self, CalculusError> {
        let mut inverse = Vec::new();
        for (k, a) in adapted.iter().enumerate() {
            let m: Vec<Vec<Cyc>> = a.iter().map(|(v, _)| v.clone()).collect();
            if m.len() != calc.module(k).rank() {
                return Err(CalculusError::SingularAdaptedBasis { degree: k });
            }
            inverse.push(invert(&m).ok_or(CalculusError::SingularAdaptedBasis { degree: k })?);
        }
        Ok(ComplexStructure { calc, adapted, inverse })
    }

    /// The same adapted basis on another calculus, e.g. the twisted one.
    pub fn on(&self, calc: CalcRef) -> Self {
        ComplexStructure { calc, adapted: self.adapted.clone(), inverse: self.inverse.clone() }
    }

    /// Swaps `(p, q)` to `(q, p)`.
    pub fn opposite(&self) -> Self {
        let adapted = self.adapted.iter().map(|d| d.iter().map(|(v, (p, q))| (v.clone(), (*q, *p))).collect()).collect();
        ComplexStructure { calc: self.calc.clone(), adapted, inverse: self.inverse.clone() }
    }

    pub fn vector(&self, k: usize, a: usize) -> ModElem {
        from_coords(&*self.calc.module(k), &self.adapted[k][a].0)
    }

    pub fn indices(&self, k: usize, pq: Bigrade) -> Vec<usize> {
        (0..self.adapted[k].len()).filter(|a| self.adapted[k][*a].1 == pq).collect()
    }

    /// Coordinates of a form in the adapted basis, with algebra coefficients.
    pub fn adapted_coords(&self, k: usize, x: &ModElem) -> Vec<Elem> {
        let m = self.calc.module(k);
        let n = self.adapted[k].len();
        let mut out = vec![Elem::zero(); n];
        for i in 0..m.rank() {
            let ci = coefficient(x, i);
            for (a, slot) in out.iter_mut().enumerate() {
                let s = &self.inverse[k][i][a];
                if !s.is_zero() {
                    slot.add_scaled(&ci, s);
                }
            }
        }
        out
    }

    /// `pi^{p,q}` on `Omega^k`.
    pub fn proj(&self, k: usize, pq: Bigrade, x: &ModElem) -> ModElem {
        let m = self.calc.module(k);
        let coords = self.adapted_coords(k, x);
        let mut out = ModElem::zero();
        for a in self.indices(k, pq) {
            out = out.add(&lmul(&*m, &coords[a], &self.vector(k, a)));
        }
        out
    }

    pub fn del(&self, k: usize, p: usize, x: &ModElem) -> ModElem {
        self.proj(k + 1, (p + 1, k - p), &self.calc.d(k, &self.proj(k, (p, k - p), x)))
    }

    /// `dbar` restricted to the `(p, k - p)` part.
    pub fn delbar(&self, k: usize, p: usize, x: &ModElem) -> ModElem {
        self.proj(k + 1, (p, k - p + 1), &self.calc.d(k, &self.proj(k, (p, k - p), x)))
    }

    pub fn bigrades(&self, k: usize) -> Vec<Bigrade> {
        let mut v: Vec<Bigrade> = self.adapted[k].iter().map(|(_, b)| *b).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `Omega^{(p,q)}` in degree `k` as its own free module with inclusion and projection.
    pub fn summand(&self, k: usize, pq: Bigrade) -> Summand {
        let m = self.calc.module(k);
        let idx = self.indices(k, pq);
        let names: Vec<String> = idx.iter().map(|a| format!("f{k}_{}{}_{a}", pq.0, pq.1)).collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let module: ModRef = Arc::new(FreeModule::central(&format!("Omega^({},{})", pq.0, pq.1), self.calc.alg(), &name_refs));
        let incl = Morphism::from_basis("incl", module.clone(), m.clone(), idx.iter().map(|a| self.vector(k, *a)).collect());
        let me = self.clone();
        let (idx2, module2) = (idx.clone(), module.clone());
        let proj = Morphism::new("proj", m, module.clone(), move |x| {
            let coords = me.adapted_coords(k, x);
            let mut out = ModElem::zero();
            for (t, a) in idx2.iter().enumerate() {
                out = out.add(&embed(&coords[*a], t));
            }
            let _ = &module2;
            out
        });
        Summand { degree: k, bigrade: pq, module, incl, proj }
    }
}

/// `Omega^{(p,q)}` with `incl: Omega^{(p,q)} -> Omega^k` and `proj: Omega^k -> Omega^{(p,q)}`.
#[derive(Clone)]
pub struct Summand {
    pub degree: usize,
    pub bigrade: Bigrade,
    pub module: ModRef,
    pub incl: Morphism,
    pub proj: Morphism,
}

impl Summand {
    /// `Gamma` of the summand inside the twisted calculus.
    pub fn twisted(&self, tcalc: &TwistedCalculus) -> Summand {
        self.twisted_as(twist_module(self.module.clone(), &tcalc.alg), tcalc)
    }

    /// As [`Summand::twisted`], reusing an existing `Gamma(module)`.
    pub fn twisted_as(&self, tw: Arc<TwistedModule>, tcalc: &TwistedCalculus) -> Summand {
        let tk = tcalc.modules[self.degree].clone();
        let tk_ref: ModRef = tk.clone();
        let (inc, pr) = (self.incl.clone(), self.proj.clone());
        let (a, b) = (tw.clone(), tk.clone());
        let incl = Morphism::new("Gamma(incl)", tw.clone(), tk_ref.clone(), move |x| b.from_inner(&inc.apply(&a.to_inner(x))));
        let (a, b) = (tw.clone(), tk);
        let proj = Morphism::new("Gamma(proj)", tk_ref, tw.clone(), move |x| a.from_inner(&pr.apply(&b.to_inner(x))));
        Summand { degree: self.degree, bigrade: self.bigrade, module: tw, incl, proj }
    }
}

/// Bigrading laws of a complex structure on samples.
pub fn verify_complex_structure(cs: &ComplexStructure, spec: &SampleSpec) -> VerificationReport {
    let c = &*cs.calc;
    let top = c.top();
    let small = SampleSpec { samples: spec.samples.min(30), ..spec.clone() };
    let per_deg: Vec<Vec<ModElem>> = (0..=top).map(|k| samples(c, k, &small, 200 + k as u64)).collect();
    let desc = small.describe(false, per_deg.iter().map(|v| v.len()).sum());
    let show = |k: usize, x: &ModElem| show_mod(&*c.module(k), x);
    let mut r = VerificationReport::new();
    r.check("complex.decomposition", "complex structure: direct sum decomposition", desc.clone(), || {
        for k in 0..=top {
            let grades = cs.bigrades(k);
            if grades.iter().any(|(p, q)| p + q != k) {
                return Err(format!("bigrade of wrong total degree in degree {k}"));
            }
            for x in &per_deg[k] {
                let mut sum = ModElem::zero();
                for pq in &grades {
                    let p = cs.proj(k, *pq, x);
                    if cs.proj(k, *pq, &p) != p {
                        return Err(format!("pi^{pq:?} not idempotent at {}", show(k, x)));
                    }
                    sum = sum.add(&p);
                }
                if sum != *x {
                    return Err(format!("projections do not sum to id at {}", show(k, x)));
                }
            }
        }
        Ok(())
    });
    r.check("complex.covariant", "complex structure: covariant bigrading", desc.clone(), || {
        for k in 0..=top {
            let m = c.module(k);
            let unit = c.alg().hopf().unit();
            for (a, (_, pq)) in cs.adapted[k].iter().enumerate() {
                let f = cs.vector(k, a);
                if coact(&*m, &f).keys().any(|(al, _)| unit.coeff(al).is_zero()) {
                    return Err(format!("adapted vector {a} of bigrade {pq:?} in degree {k} is not coinvariant"));
                }
            }
            for x in &per_deg[k] {
                for pq in cs.bigrades(k) {
                    let lhs = coact(&*m, &cs.proj(k, pq, x));
                    let rhs = map_co(&coact(&*m, x), |y| cs.proj(k, pq, y));
                    if lhs != rhs {
                        return Err(format!("pi^{pq:?} at {}", show(k, x)));
                    }
                }
            }
        }
        Ok(())
    });
    r.check("complex.d_bidegree", "complex structure: d has bidegree (1,0) + (0,1)", desc.clone(), || {
        for k in 0..top {
            for x in &per_deg[k] {
                for (p, q) in cs.bigrades(k) {
                    let dx = c.d(k, &cs.proj(k, (p, q), x));
                    let rest = dx.sub(&cs.proj(k + 1, (p + 1, q), &dx)).sub(&cs.proj(k + 1, (p, q + 1), &dx));
                    if !rest.is_zero() {
                        return Err(format!("d of the ({p},{q}) part of {}", show(k, x)));
                    }
                }
            }
        }
        Ok(())
    });
    r.check("complex.del_squares", "complex structure: del^2 = delbar^2 = del delbar + delbar del = 0", desc.clone(), || {
        if top < 2 {
            return Ok(());
        }
        for x in &per_deg[0] {
            let dd = cs.del(1, 1, &cs.del(0, 0, x));
            let bb = cs.delbar(1, 0, &cs.delbar(0, 0, x));
            let mixed = cs.delbar(1, 1, &cs.del(0, 0, x)).add(&cs.del(1, 0, &cs.delbar(0, 0, x)));
            if !dd.is_zero() || !bb.is_zero() || !mixed.is_zero() {
                return Err(format!("at {}", show(0, x)));
            }
        }
        Ok(())
    });
    let has_star = (0..=top).all(|k| c.module(k).has_star());
    if has_star {
        r.check("complex.star_swap", "complex structure: (Omega^(p,q))* = Omega^(q,p)", desc, || {
            for k in 0..=top {
                for x in &per_deg[k] {
                    for (p, q) in cs.bigrades(k) {
                        let s = c.star(k, &cs.proj(k, (p, q), x)).ok_or("no star")?;
                        if cs.proj(k, (q, p), &s) != s {
                            return Err(format!("star of the ({p},{q}) part of {}", show(k, x)));
                        }
                    }
                }
            }
            Ok(())
        });
    }
    r
}

/// Checks that `Gamma(pi^{p,q})` agrees with the projections of the twisted complex structure.
pub fn verify_twisted_projections(cs: &ComplexStructure, tcalc: &Arc<TwistedCalculus>, spec: &SampleSpec) -> VerificationReport {
    let tcs = cs.on(tcalc.clone());
    let mut r = VerificationReport::new();
    let small = SampleSpec { samples: spec.samples.min(20), ..spec.clone() };
    r.check("complex.twist_projections", "twisted complex structure: pi_gamma = Gamma(pi)", small.describe(false, 0), || {
        for k in 0..=tcalc.top() {
            let tm = &tcalc.modules[k];
            let mut xs: Vec<ModElem> = (0..tm.rank()).map(|i| basis_elem(&**tm, i)).collect();
            xs.extend(samples(&**tcalc, k, &small, 300 + k as u64));
            for pq in cs.bigrades(k) {
                for x in &xs {
                    let gamma_pi = tm.from_inner(&cs.proj(k, pq, &tm.to_inner(x)));
                    if gamma_pi != tcs.proj(k, pq, x) {
                        return Err(format!("pi^{pq:?} at {}", show_mod(&**tm, x)));
                    }
                }
            }
        }
        Ok(())
    });
    r
}

/// `wedge: Omega^{(0,1)} (x) Omega^{(1,0)} -> Omega^{(1,1)}` and its inverse.
#[derive(Clone)]
pub struct Factorization {
    pub s01: Summand,
    pub s10: Summand,
    pub s11: Summand,
    /// `Omega^{(0,1)} (x)_B Omega^{(1,0)}`.
    pub tens: Arc<TensorModule>,
    pub wedge: Morphism,
    /// The left factorization inverse `theta^{(1,1)}_l`.
    pub theta: Morphism,
}

/// Inverts the wedge map `Omega^{(0,1)} (x) Omega^{(1,0)} -> Omega^{(1,1)}` by an exact scalar solve.
pub fn factorization_inverse(cs: &ComplexStructure) -> Result<Factorization, CalculusError> {
    let c = &cs.calc;
    let (s01, s10, s11) = (cs.summand(1, (0, 1)), cs.summand(1, (1, 0)), cs.summand(2, (1, 1)));
    let tens = tensor_module(s01.module.clone(), s10.module.clone());
    let (n01, n10, n11) = (s01.module.rank(), s10.module.rank(), s11.module.rank());
    let not_fact = || CalculusError::NotFactorizable { target: format!("Omega^(1,1) of {}", c.name()) };
    // columns: pairs (a, b); rows: coordinates in Omega^(1,1)
    let mut rows: Vec<Row> = vec![Row::new(); n11];
    let mut wedge_images = Vec::new();
    for a in 0..n01 {
        for b in 0..n10 {
            let w = c.wedge(1, &s01.incl.apply(&basis_elem(&*s01.module, a)), 1, &s10.incl.apply(&basis_elem(&*s10.module, b)));
            let p = s11.proj.apply(&w);
            let coords = scalar_coords(&*s11.module, &p)
                .ok_or_else(|| CalculusError::NotScalar { what: format!("wedge of basis forms {a}, {b}") })?;
            for (t, v) in coords.iter().enumerate() {
                if !v.is_zero() {
                    rows[t].insert(tens.index(a, b), v.clone());
                }
            }
            wedge_images.push(p);
        }
    }
    let ncols = n01 * n10;
    if ncols != n11 {
        return Err(not_fact());
    }
    let mut theta_images = Vec::new();
    for t in 0..n11 {
        let rhs: Vec<Cyc> = (0..n11).map(|u| if u == t { Cyc::one() } else { Cyc::zero() }).collect();
        let sol = linalg::solve(&rows, &rhs, ncols).map_err(|_| not_fact())?;
        if !sol.is_unique() {
            return Err(not_fact());
        }
        theta_images.push(from_coords(&*tens, &sol.particular));
    }
    let wedge = Morphism::from_basis("wedge_(0,1),(1,0)", tens.clone(), s11.module.clone(), wedge_images);
    let theta = Morphism::from_basis("theta_l", s11.module.clone(), tens.clone(), theta_images);
    Ok(Factorization { s01, s10, s11, tens, wedge, theta })
}

/// `theta . wedge = id` and `wedge . theta = id` on basis and samples.
pub fn verify_factorization(f: &Factorization, spec: &SampleSpec) -> VerificationReport {
    let mut r = VerificationReport::new();
    let xs = sample_elems(&*f.tens, spec, 401);
    let ys = sample_elems(&*f.s11.module, spec, 402);
    r.check("factorization.inverse", "factorizable complex structure: left factorization inverse", spec.describe(false, xs.len() + ys.len()), || {
        for x in (0..f.tens.rank()).map(|i| basis_elem(&*f.tens, i)).chain(xs.iter().cloned()) {
            if f.theta.apply(&f.wedge.apply(&x)) != x {
                return Err(format!("theta . wedge at {}", show_mod(&*f.tens, &x)));
            }
        }
        for y in (0..f.s11.module.rank()).map(|i| basis_elem(&*f.s11.module, i)).chain(ys.iter().cloned()) {
            if f.wedge.apply(&f.theta.apply(&y)) != y {
                return Err(format!("wedge . theta at {}", show_mod(&*f.s11.module, &y)));
            }
        }
        Ok(())
    });
    r
}

type DbarFn = Arc<dyn Fn(&ModElem) -> ModElem + Send + Sync>;

/// A module `E` with `dbar_E: E -> Omega^{(0,1)} (x) E`.
#[derive(Clone)]
pub struct HoloModule {
    pub name: String,
    pub calc: CalcRef,
    pub e: ModRef,
    /// `Omega^{(1,0)}`, which carries the free part of a connection on `E`.
    pub s10: Summand,
    pub s01: Summand,
    pub s02: Summand,
    /// `Omega^{(0,1)} (x) E`.
    pub tens: Arc<TensorModule>,
    /// `Omega^{(0,2)} (x) E`.
    pub tens2: Arc<TensorModule>,
    pub dbar_e: DbarFn,
}

impl HoloModule {
    pub fn new(name: &str, calc: CalcRef, e: ModRef, sums: [Summand; 3], dbar_e: DbarFn) -> Self {
        let [s10, s01, s02] = sums;
        let tens = tensor_module(s01.module.clone(), e.clone());
        let tens2 = tensor_module(s02.module.clone(), e.clone());
        HoloModule { name: name.to_string(), calc, e, s10, s01, s02, tens, tens2, dbar_e }
    }

    pub fn dbar_e(&self, x: &ModElem) -> ModElem {
        (self.dbar_e)(x)
    }

    /// `dbar b` in `Omega^{(0,1)}`.
    pub fn dbar_fn(&self, b: &Elem) -> ModElem {
        self.s01.proj.apply(&self.calc.d(0, &function(b)))
    }

    /// `dbar (x) id - id wedge dbar_E` on `Omega^{(0,1)} (x) E`.
    pub fn curvature_op(&self, z: &ModElem) -> ModElem {
        let mut out = ModElem::zero();
        for (x, j) in self.tens.split(z) {
            let ej = basis_elem(&*self.e, j);
            let dx = self.s02.proj.apply(&self.calc.d(1, &self.s01.incl.apply(&x)));
            out = out.add(&self.tens2.tensor(&dx, &ej));
            for (eta, k) in self.tens.split(&self.dbar_e(&ej)) {
                let w = self.calc.wedge(1, &self.s01.incl.apply(&x), 1, &self.s01.incl.apply(&eta));
                let w = self.s02.proj.apply(&w);
                out = out.sub(&self.tens2.tensor(&w, &basis_elem(&*self.e, k)));
            }
        }
        out
    }

    /// `R^Hol_E = (dbar (x) id - id wedge dbar_E) dbar_E`.
    pub fn curvature(&self, x: &ModElem) -> ModElem {
        self.curvature_op(&self.dbar_e(x))
    }
}

/// Leibniz, covariance and vanishing holomorphic curvature on basis and samples.
pub fn verify_holomorphic(h: &HoloModule, spec: &SampleSpec, id: &str) -> VerificationReport {
    let e = &*h.e;
    let alg = e.algebra();
    let mut xs: Vec<ModElem> = (0..e.rank()).map(|i| basis_elem(e, i)).collect();
    xs.extend(sample_elems(e, spec, 501));
    let bs = spec.pick(&alg.box_labels(spec.radius.min(2)), 502);
    let mut r = VerificationReport::new();
    let desc = spec.describe(false, xs.len() * bs.len());
    r.check(&format!("{id}.leibniz"), "holomorphic structure: Leibniz rule", desc.clone(), || {
        for x in &xs {
            for b in &bs {
                let be = Elem::basis(b.clone());
                let lhs = h.dbar_e(&lmul(e, &be, x));
                let rhs = lmul(&*h.tens, &be, &h.dbar_e(x)).add(&h.tens.tensor(&h.dbar_fn(&be), x));
                if lhs != rhs {
                    return Err(format!("at {} . {}", alg.label_name(b), show_mod(e, x)));
                }
            }
        }
        Ok(())
    });
    r.check(&format!("{id}.covariant"), "holomorphic structure: covariant", spec.describe(false, xs.len()), || {
        for x in &xs {
            if coact(&*h.tens, &h.dbar_e(x)) != map_co(&coact(e, x), |m| h.dbar_e(m)) {
                return Err(format!("at {}", show_mod(e, x)));
            }
        }
        Ok(())
    });
    r.check(&format!("{id}.curvature"), "holomorphic structure: vanishing holomorphic curvature", spec.describe(false, xs.len()), || {
        for x in &xs {
            let c = h.curvature(x);
            if !c.is_zero() {
                return Err(format!("R^Hol({}) = {}", show_mod(e, x), show_mod(&*h.tens2, &c)));
            }
        }
        Ok(())
    });
    r
}

/// `dbar_{Omega^{(1,0)}} = theta . dbar` on `Omega^{(1,0)}`.
pub fn holomorphic_from_factorizable(cs: &ComplexStructure) -> Result<(HoloModule, Factorization), CalculusError> {
    let f = factorization_inverse(cs)?;
    let s02 = cs.summand(2, (0, 2));
    let (s10, s11, theta, calc) = (f.s10.clone(), f.s11.clone(), f.theta.clone(), cs.calc.clone());
    let dbar_e: DbarFn = Arc::new(move |x: &ModElem| theta.apply(&s11.proj.apply(&calc.d(1, &s10.incl.apply(x)))));
    let h = HoloModule::new("Omega^(1,0)", cs.calc.clone(), f.s10.module.clone(), [f.s10.clone(), f.s01.clone(), s02], dbar_e);
    Ok((h, f))
}

/// `Gamma(E)` with `dbar_{Gamma(E)} = phi^-1 . Gamma(dbar_E)`.
pub struct TwistedHolo {
    pub holo: HoloModule,
    /// `phi_{Omega^{(0,1)}, E}` data.
    pub pair01: TwistedPair,
    pub pair02: TwistedPair,
}

pub fn twist_holomorphic(h: &HoloModule, tcalc: &Arc<TwistedCalculus>) -> TwistedHolo {
    let alg = &tcalc.alg;
    let pair01 = TwistedPair::new(h.s01.module.clone(), h.e.clone(), alg);
    let pair02 = TwistedPair::new(h.s02.module.clone(), h.e.clone(), alg);
    let s10 = h.s10.twisted_as(pair01.tw_w.clone(), tcalc);
    let s01 = h.s01.twisted_as(pair01.tw_v.clone(), tcalc);
    let s02 = h.s02.twisted_as(pair02.tw_v.clone(), tcalc);
    let tw_e = pair01.tw_w.clone();
    let (inner, p, te) = (h.dbar_e.clone(), TwistedPair::new(h.s01.module.clone(), h.e.clone(), alg), tw_e.clone());
    let dbar_e: DbarFn = Arc::new(move |x: &ModElem| p.phi_inv(&p.tw_tens.from_inner(&inner(&te.to_inner(x)))));
    let mut holo = HoloModule::new(&format!("Gamma({})", h.name), tcalc.clone(), tw_e, [s10, s01, s02], dbar_e);
    // reuse the exact tensor objects phi^-1 lands in
    holo.tens = pair01.tens_tw.clone();
    holo.tens2 = pair02.tens_tw.clone();
    TwistedHolo { holo, pair01, pair02 }
}

/// `phi (dbar_gamma (x) id - id wedge_gamma dbar_{Gamma E}) phi^-1 = Gamma(dbar (x) id - id wedge dbar_E)`.
pub fn verify_curvature_transport(h: &HoloModule, t: &TwistedHolo, spec: &SampleSpec) -> VerificationReport {
    let src = &t.pair01.tw_tens;
    let mut xs: Vec<ModElem> = (0..src.rank()).map(|i| basis_elem(&**src, i)).collect();
    xs.extend(sample_elems(&**src, spec, 601));
    let mut r = VerificationReport::new();
    r.check("holomorphic.curvature_transport", "twisted holomorphic structure: transported curvature operator", spec.describe(false, xs.len()), || {
        for z in &xs {
            let lhs = t.pair02.phi(&t.holo.curvature_op(&t.pair01.phi_inv(z)));
            let rhs = t.pair02.tw_tens.from_inner(&h.curvature_op(&src.to_inner(z)));
            if lhs != rhs {
                return Err(format!("at {}", show_mod(&**src, z)));
            }
        }
        Ok(())
    });
    r
}

/// The complex operator `I = i pi^{1,0} - i pi^{0,1}` on `Omega^1`.
pub fn complex_operator(cs: &ComplexStructure, x: &ModElem) -> ModElem {
    let i = Cyc::i();
    cs.proj(1, (1, 0), x).scale(&i).sub(&cs.proj(1, (0, 1), x).scale(&i))
}

/// `kappa = wedge (I^-1 (x) id)(g)` for `g` in `Omega^1 (x) Omega^1` (basis order of `tensor_module`).
pub fn fundamental_form(cs: &ComplexStructure, g: &ModElem) -> ModElem {
    let c = &cs.calc;
    let m1 = c.module(1);
    let tens = tensor_module(m1.clone(), m1.clone());
    let mut out = ModElem::zero();
    for (x, j) in tens.split(g) {
        let ix = complex_operator(cs, &x).neg();
        out = out.add(&c.wedge(1, &ix, 1, &basis_elem(&*m1, j)));
    }
    out
}

/// Hermitian/Kähler form checks for `kappa` in `Omega^2` of `cs.calc`, with `n` the complex dimension.
pub fn kahler_checks(cs: &ComplexStructure, kappa: &ModElem, n: usize, spec: &SampleSpec, id: &str) -> VerificationReport {
    let c = &*cs.calc;
    let m2 = c.module(2);
    let small = SampleSpec { samples: spec.samples.min(30), ..spec.clone() };
    let per_deg: Vec<Vec<ModElem>> = (0..=c.top()).map(|k| samples(c, k, &small, 700 + k as u64)).collect();
    let mut r = VerificationReport::new();
    r.check(&format!("{id}.bigrade"), "Hermitian form: kappa in Omega^(1,1)", "kappa", || {
        if cs.proj(2, (1, 1), kappa) != *kappa {
            return Err(format!("kappa = {} is not of type (1,1)", show_mod(&*m2, kappa)));
        }
        Ok(())
    });
    r.check(&format!("{id}.central"), "Hermitian form: kappa central", small.describe(false, per_deg.iter().map(|v| v.len()).sum()), || {
        for (k, xs) in per_deg.iter().enumerate() {
            for x in xs {
                if c.wedge(2, kappa, k, x) != c.wedge(k, x, 2, kappa) {
                    return Err(format!("does not commute with {}", show_mod(&*c.module(k), x)));
                }
            }
        }
        Ok(())
    });
    r.check(&format!("{id}.real"), "Hermitian form: kappa real", "kappa", || {
        let s = c.star(2, kappa).ok_or("no star on Omega^2")?;
        if s != *kappa {
            return Err(format!("kappa* = {}", show_mod(&*m2, &s)));
        }
        Ok(())
    });
    r.check(&format!("{id}.coinvariant"), "Hermitian form: kappa coinvariant", "kappa", || {
        let unit = c.alg().hopf().unit();
        let (u, _) = unit.iter().next().ok_or("no unit")?;
        if coact(&*m2, kappa).keys().any(|(a, _)| a != u) {
            return Err("kappa is not coinvariant".into());
        }
        Ok(())
    });
    r.check(&format!("{id}.closed"), "Kähler form: d kappa = 0", "kappa", || {
        let dk = c.d(2, kappa);
        if !dk.is_zero() {
            return Err(format!("d kappa = {}", show_mod(&*c.module(3.min(c.top())), &dk)));
        }
        Ok(())
    });
    r.check(&format!("{id}.lefschetz"), "Hermitian form: Lefschetz maps bijective", "basis", || {
        for k in 0..n {
            let (src, tgt) = (c.module(k), c.module(2 * n - k));
            if src.rank() != tgt.rank() {
                return Err(format!("rank of Omega^{k} differs from Omega^{}", 2 * n - k));
            }
            let mut rows: Vec<Row> = vec![Row::new(); tgt.rank()];
            for i in 0..src.rank() {
                let mut y = basis_elem(&*src, i);
                let mut deg = k;
                for _ in 0..n - k {
                    y = c.wedge(deg, &y, 2, kappa);
                    deg += 2;
                }
                let coords = scalar_coords(&*tgt, &y).ok_or("non-scalar Lefschetz image")?;
                for (t, v) in coords.into_iter().enumerate() {
                    if !v.is_zero() {
                        rows[t].insert(i, v);
                    }
                }
            }
            let zero = vec![Cyc::zero(); tgt.rank()];
            let sol = linalg::solve(&rows, &zero, src.rank()).map_err(|e| e.to_string())?;
            if !sol.is_unique() {
                return Err(format!("L^{} is singular on Omega^{k}", n - k));
            }
        }
        Ok(())
    });
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for mut rest in subsets(n, k - 1) {
            if rest.first().map_or(true, |r| *r > first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

/// Faults that can be injected into the lattice calculus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LatticeFaults {
    /// Sets `w2 wedge w1 = + w1 wedge w2`, which kills `w+ wedge w-`.
    pub symmetric_wedge: bool,
    /// Sets `w1* = + w1` instead of `- w1`.
    pub real_form_star: bool,
}

/// The calculus on `C[Z^n]` with central coinvariant basis `w_i = u_i^-1 d u_i`,
/// `d u_m = u_m sum m_i w_i`, `d w_i = 0` and `w_i* = -w_i`.
pub fn lattice_calculus(alg: AlgRef, n: usize, faults: LatticeFaults) -> BasisCalculus {
    let per_deg: Vec<Vec<Vec<usize>>> = (0..=n).map(|k| subsets(n, k)).collect();
    let one = alg.unit();
    let mut modules: Vec<ModRef> = Vec::new();
    for (k, subs) in per_deg.iter().enumerate() {
        if k == 0 {
            modules.push(Arc::new(FreeModule::algebra_itself(alg.clone())));
            continue;
        }
        let names: Vec<String> =
            subs.iter().map(|s| s.iter().map(|i| format!("w{}", i + 1)).collect::<Vec<_>>().join("^")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        // (w_S)* = (-1)^k w_S
        let mut stars: Vec<ModElem> = (0..subs.len()).map(|i| embed(&one, i).scale(&sign(k))).collect();
        if faults.real_form_star && k == 1 {
            stars[0] = embed(&one, 0);
        }
        modules.push(Arc::new(FreeModule::central(&format!("Omega^{k}"), alg.clone(), &refs).with_stars(stars)));
    }
    let mut wedge_table = HashMap::new();
    for k in 1..=n {
        for l in 1..=n - k {
            for (i, s) in per_deg[k].iter().enumerate() {
                for (j, t) in per_deg[l].iter().enumerate() {
                    if s.iter().any(|a| t.contains(a)) {
                        continue;
                    }
                    let mut merged: Vec<usize> = s.iter().chain(t).copied().collect();
                    let inversions = (0..merged.len())
                        .flat_map(|a| (a + 1..merged.len()).map(move |b| (a, b)))
                        .filter(|(a, b)| merged[*a] > merged[*b])
                        .count();
                    merged.sort();
                    let idx = per_deg[k + l].iter().position(|u| *u == merged).unwrap();
                    wedge_table.insert((k, i, l, j), embed(&one, idx).scale(&sign(inversions)));
                }
            }
        }
    }
    if faults.symmetric_wedge && n >= 2 {
        wedge_table.insert((1, 1, 1, 0), embed(&one, 0));
    }
    let d_alg: DAlg = Arc::new(move |m: &Label| {
        let mut out = ModElem::zero();
        for (i, e) in m.0.iter().enumerate() {
            if *e != 0 {
                out.add_term((m.clone(), i), Cyc::from_int(*e));
            }
        }
        out
    });
    let d_basis = per_deg.iter().map(|subs| vec![ModElem::zero(); subs.len()]).collect();
    let generators = (0..n)
        .map(|i| {
            let mut minus = vec![0; n];
            minus[i] = -1;
            let plus: Vec<i64> = minus.iter().map(|x| -x).collect();
            vec![(Elem::basis(Label::new(&minus)), Label::new(&plus))]
        })
        .collect();
    BasisCalculus { name: format!("Omega(Z^{n})"), alg, modules, wedge_table, d_alg, d_basis, generators }
}

/// Modulus `tau = i` on the 2-torus: `w+ = w1 + i w2` spans `(1,0)`, `w- = w1 - i w2` spans `(0,1)`.
pub fn torus_complex_structure(calc: CalcRef) -> Result<ComplexStructure, CalculusError> {
    let (o, i) = (Cyc::one(), Cyc::i());
    ComplexStructure::new(
        calc,
        vec![
            vec![(vec![o.clone()], (0, 0))],
            vec![(vec![o.clone(), i.clone()], (1, 0)), (vec![o.clone(), -&i], (0, 1))],
            vec![(vec![o], (1, 1))],
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{theta_2d, theta_cocycle, CocycleData};
    use crate::relhopf::{twist_comodule_algebra, CoAlgebra, Regular, Twist};

    fn spec() -> SampleSpec {
        SampleSpec::new(2, 12, 7)
    }

    fn u(m: &[i64]) -> Elem {
        Elem::basis(Label::new(m))
    }

    fn torus_twist() -> Twist {
        let mut d: CocycleData = theta_cocycle(theta_2d(1, 3), 3).unwrap();
        assert!(d.certify(&SampleSpec::new(2, 30, 1)).all_pass());
        Twist::new(&d).unwrap()
    }

    fn torus(faults: LatticeFaults) -> (Arc<BasisCalculus>, Arc<TwistedCalculus>) {
        let t = torus_twist();
        let b: AlgRef = Arc::new(Regular::monomials(t.data.hopf.clone(), &["x", "y"]));
        let c = Arc::new(lattice_calculus(b.clone(), 2, faults));
        let bg = twist_comodule_algebra(b, &t);
        let tc = twist_calculus(c.clone(), &bg);
        (c, tc)
    }

    #[test]
    fn torus_calculus_and_twist_pass_checks() {
        let (c, tc) = torus(LatticeFaults::default());
        let r = verify_calculus(&*c, &spec(), Some(&c.generators));
        assert!(r.all_pass(), "{}", r.to_text());
        let r = verify_calculus(&*tc, &spec(), None);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn twisted_wedge_of_coefficients() {
        let (_, tc) = torus(LatticeFaults::default());
        let w = tc.wedge(1, &embed(&u(&[1, 0]), 0), 1, &embed(&u(&[0, 1]), 1));
        assert_eq!(w, embed(&tc.alg.mul(&u(&[1, 0]), &u(&[0, 1])), 0));
        // x wedge_gamma y in the twisted normal form is zeta_3^-1 xy
        assert_eq!(tc.alg.mul(&u(&[1, 0]), &u(&[0, 1])), u(&[1, 1]).scale(&Cyc::root(3, -1).unwrap()));
        let basis = tc.wedge(1, &embed(&u(&[0, 0]), 0), 1, &embed(&u(&[0, 0]), 1));
        assert_eq!(basis, embed(&u(&[0, 0]), 0));
    }

    #[test]
    fn complex_structure_and_its_twist() {
        let (c, tc) = torus(LatticeFaults::default());
        let cs = torus_complex_structure(c.clone()).unwrap();
        let r = verify_complex_structure(&cs, &spec());
        assert!(r.all_pass(), "{}", r.to_text());
        let tcs = cs.on(tc.clone());
        let r = verify_complex_structure(&tcs, &spec());
        assert!(r.all_pass(), "{}", r.to_text());
        let r = verify_twisted_projections(&cs, &tc, &spec());
        assert!(r.all_pass(), "{}", r.to_text());
        // (x w+)^* lies in Omega^(0,1)_gamma
        let xwp = lmul(&*tc.module(1), &u(&[1, 0]), &tcs.vector(1, 0));
        let s = tc.star(1, &xwp).unwrap();
        assert_eq!(tcs.proj(1, (0, 1), &s), s);
        assert!(!s.is_zero());
    }

    #[test]
    fn factorization_on_torus() {
        let (c, _) = torus(LatticeFaults::default());
        let cs = torus_complex_structure(c).unwrap();
        let f = factorization_inverse(&cs).unwrap();
        // theta(w1 ^ w2) = (-i/2) w- (x) w+
        let img = f.theta.apply(&basis_elem(&*f.s11.module, 0));
        let expect = embed(&u(&[0, 0]), f.tens.index(0, 0)).scale(&(&Cyc::i() * &Cyc::frac(-1, 2)));
        assert_eq!(img, expect);
        let r = verify_factorization(&f, &spec());
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn symmetric_wedge_is_not_factorizable() {
        let (c, _) = torus(LatticeFaults { symmetric_wedge: true, ..Default::default() });
        let cs = torus_complex_structure(c).unwrap();
        let Err(err) = factorization_inverse(&cs) else { panic!("factorized a singular wedge") };
        assert!(err.to_string().contains("not factorizable"), "{err}");
    }

    #[test]
    fn holomorphic_one_forms() {
        let (c, tc) = torus(LatticeFaults::default());
        let cs = torus_complex_structure(c.clone()).unwrap();
        let (h, f) = holomorphic_from_factorizable(&cs).unwrap();
        let wp = basis_elem(&*h.e, 0);
        assert!(h.dbar_e(&wp).is_zero());
        let x = u(&[1, 0]);
        let lhs = h.dbar_e(&lmul(&*h.e, &x, &wp));
        // dbar x = (x/2) w-
        let dbar_x = h.dbar_fn(&x);
        assert_eq!(dbar_x, embed(&x, 0).scale(&Cyc::frac(1, 2)));
        assert_eq!(lhs, f.tens.tensor(&dbar_x, &wp));
        let r = verify_holomorphic(&h, &spec(), "holomorphic");
        assert!(r.all_pass(), "{}", r.to_text());
        let t = twist_holomorphic(&h, &tc);
        assert!(t.holo.dbar_e(&basis_elem(&*t.holo.e, 0)).is_zero());
        let r = verify_holomorphic(&t.holo, &spec(), "holomorphic");
        assert!(r.all_pass(), "{}", r.to_text());
        let r = verify_curvature_transport(&h, &t, &spec());
        assert!(r.all_pass(), "{}", r.to_text());
        // opposite structure on Omega^(0,1)
        let (hop, _) = holomorphic_from_factorizable(&cs.opposite()).unwrap();
        assert_eq!(hop.e.rank(), 1);
        assert!(hop.dbar_e(&basis_elem(&*hop.e, 0)).is_zero());
        let r = verify_holomorphic(&hop, &spec(), "holomorphic");
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn kahler_form_on_torus() {
        let (c, tc) = torus(LatticeFaults::default());
        let cs = torus_complex_structure(c.clone()).unwrap();
        let one = c.alg.unit();
        let tens = tensor_module(c.module(1), c.module(1));
        let g = embed(&one, tens.index(0, 0)).add(&embed(&one, tens.index(1, 1)));
        let kappa = fundamental_form(&cs, &g);
        assert_eq!(kappa, embed(&one, 0).scale(&Cyc::from_int(-2)));
        let r = kahler_checks(&cs, &kappa, 1, &spec(), "kahler");
        assert!(r.all_pass(), "{}", r.to_text());
        let tcs = cs.on(tc.clone());
        let r = kahler_checks(&tcs, &tc.modules[2].from_inner(&kappa), 1, &spec(), "kahler");
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn untwisting_recovers_the_calculus() {
        let (c, tc) = torus(LatticeFaults::default());
        let (rev, rep) = tc.alg.twist.reverse(&SampleSpec::new(2, 20, 3)).unwrap();
        assert!(rep.all_pass(), "{}", rep.to_text());
        let back = twist_calculus(tc.clone(), &twist_comodule_algebra(tc.alg.clone(), &rev));
        let sp = spec();
        for k in 0..=2 {
            for l in 0..=2 - k {
                for (x, y) in samples(&*c, k, &sp, 1).iter().zip(samples(&*c, l, &sp, 2)) {
                    assert_eq!(back.wedge(k, x, l, &y), c.wedge(k, x, l, &y));
                }
            }
            for x in samples(&*c, k, &sp, 3) {
                assert_eq!(back.d(k, &x), c.d(k, &x));
            }
        }
    }
}
