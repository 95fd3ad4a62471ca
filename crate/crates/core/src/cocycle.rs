//! Two-cocycles on Hopf *-algebras: convolution, inverses, the functionals
//! `U, Ubar, V, Vbar`, identity suites, and the twisted Hopf algebra `A_gamma`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::Zero;

use crate::hopf::{star_tensor, FunAlgebra, Hopf, HopfRef};
use crate::linalg::{self, Row};
use crate::linear::{Elem, Label, Tensor};
use crate::report::{for_all, SampleSpec, VerificationReport};
use crate::scalars::{Cyc, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CocycleError {
    #[error("gamma is not convolution invertible: gamma({a}, {b}) = 0")]
    NonInvertible { a: String, b: String },
    #[error("inverse is not determined by the convolution equations at ({a}, {b})")]
    Underdetermined { a: String, b: String },
    #[error("supplied inverse fails the convolution equation at ({a}, {b})")]
    InverseMismatch { a: String, b: String },
    #[error("pointwise inversion needs a grouplike basis; {0} has none")]
    NotGrouplike(String),
    #[error("table solving needs a finite algebra; {0} is infinite")]
    NotFinite(String),
    #[error("theta is not skew-symmetric at entry ({i}, {j})")]
    NotSkew { i: usize, j: usize },
    #[error("matrix entry {entry} has a denominator not dividing the cyclotomic order {order}")]
    Denominator { entry: String, order: u32 },
    #[error("matrix shape does not match the group rank")]
    Shape,
    #[error("cocycle has not passed verification")]
    NotVerified,
    #[error("star structure requested for a cocycle not verified unitary")]
    MissingUnitarity,
}

/// `exp(2 pi i m^T B n)` for a rational matrix `B` whose entries have
/// denominators dividing `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bicharacter {
    pub matrix: Vec<Vec<Q>>,
    pub order: u32,
}

impl Bicharacter {
    pub fn new(matrix: Vec<Vec<Q>>, order: u32) -> Result<Self, CocycleError> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) || order == 0 {
            return Err(CocycleError::Shape);
        }
        for row in &matrix {
            for e in row {
                let scaled = e * Q::from_integer(order.into());
                if !scaled.is_integer() {
                    return Err(CocycleError::Denominator { entry: e.to_string(), order });
                }
            }
        }
        Ok(Bicharacter { matrix, order })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Exponent `m^T B n` scaled by the order, reduced mod the order.
    pub fn exponent(&self, m: &Label, n: &Label) -> i64 {
        let mut t = Q::zero();
        for (i, mi) in m.0.iter().enumerate() {
            for (j, nj) in n.0.iter().enumerate() {
                let b = &self.matrix[i][j];
                if !b.is_zero() {
                    t += b * Q::from_integer((mi * nj).into());
                }
            }
        }
        let k = (t * Q::from_integer(self.order.into())).to_integer();
        let r: i64 = (k % num_bigint::BigInt::from(self.order)).try_into().unwrap();
        r.rem_euclid(self.order as i64)
    }

    pub fn value(&self, m: &Label, n: &Label) -> Cyc {
        Cyc::root(self.order, self.exponent(m, n)).unwrap()
    }

    pub fn neg(&self) -> Bicharacter {
        Bicharacter { matrix: self.matrix.iter().map(|r| r.iter().map(|x| -x).collect()).collect(), order: self.order }
    }

    pub fn transpose(&self) -> Bicharacter {
        let n = self.dim();
        Bicharacter {
            matrix: (0..n).map(|i| (0..n).map(|j| self.matrix[j][i].clone()).collect()).collect(),
            order: self.order,
        }
    }

    pub fn is_skew(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == -self.matrix[j][i].clone()))
    }
}

pub type PairFn = Arc<dyn Fn(&Label, &Label) -> Cyc + Send + Sync>;

/// A linear functional on `A (x) A`, given on basis pairs.
#[derive(Clone)]
pub struct PairFunctional {
    pub name: String,
    eval: PairFn,
    pub closed_form: Option<Bicharacter>,
}

impl fmt::Debug for PairFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairFunctional").field("name", &self.name).field("closed_form", &self.closed_form).finish()
    }
}

impl PairFunctional {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Label, &Label) -> Cyc + Send + Sync + 'static,
    {
        PairFunctional { name: name.into(), eval: Arc::new(f), closed_form: None }
    }

    pub fn from_bicharacter(name: impl Into<String>, b: Bicharacter) -> Self {
        let bb = b.clone();
        PairFunctional { name: name.into(), eval: Arc::new(move |m, n| bb.value(m, n)), closed_form: Some(b) }
    }

    /// `epsilon (x) epsilon`.
    pub fn counit(hopf: HopfRef) -> Self {
        PairFunctional::new("counit", move |a, b| &hopf.counit_basis(a) * &hopf.counit_basis(b))
    }

    pub fn from_table(name: impl Into<String>, table: HashMap<(Label, Label), Cyc>) -> Self {
        PairFunctional::new(name, move |a, b| table.get(&(a.clone(), b.clone())).cloned().unwrap_or_default())
    }

    pub fn eval(&self, a: &Label, b: &Label) -> Cyc {
        (self.eval)(a, b)
    }

    pub fn eval_elems(&self, x: &Elem, y: &Elem) -> Cyc {
        let mut acc = Cyc::zero();
        for (a, c) in x.iter() {
            for (b, d) in y.iter() {
                let v = self.eval(a, b);
                if !v.raw_terms().is_empty() {
                    acc += &(&(c * d) * &v);
                }
            }
        }
        acc
    }

    /// Same functional with the value at one pair replaced.
    pub fn with_value(&self, a: &Label, b: &Label, v: Cyc) -> Self {
        let inner = self.eval.clone();
        let (a, b) = (a.clone(), b.clone());
        PairFunctional::new(format!("{} (patched)", self.name), move |x, y| {
            if *x == a && *y == b {
                v.clone()
            } else {
                inner(x, y)
            }
        })
    }

    /// Same functional with the value at one pair multiplied by `factor`.
    pub fn scaled_at(&self, a: &Label, b: &Label, factor: Cyc) -> Self {
        let v = &self.eval(a, b) * &factor;
        self.with_value(a, b, v)
    }

    pub fn table(&self, labels: &[Label]) -> Vec<((Label, Label), Cyc)> {
        let mut out = Vec::new();
        for a in labels {
            for b in labels {
                out.push(((a.clone(), b.clone()), self.eval(a, b)));
            }
        }
        out
    }
}

/// `(phi * psi)(a (x) b) = phi(a_1 (x) b_1) psi(a_2 (x) b_2)`.
pub fn convolve(phi: &PairFunctional, psi: &PairFunctional, hopf: HopfRef) -> PairFunctional {
    let (f, g) = (phi.clone(), psi.clone());
    PairFunctional::new(format!("({} * {})", phi.name, psi.name), move |a, b| convolve_at(&*hopf, &f, &g, a, b))
}

pub fn convolve_at(h: &dyn Hopf, f: &PairFunctional, g: &PairFunctional, a: &Label, b: &Label) -> Cyc {
    let (da, db) = (h.coproduct_basis(a), h.coproduct_basis(b));
    let mut acc = Cyc::zero();
    for (ka, ca) in da.iter() {
        for (kb, cb) in db.iter() {
            let x = f.eval(&ka[0], &kb[0]);
            if x.raw_terms().is_empty() {
                continue;
            }
            acc += &(&(&(ca * cb) * &x) * &g.eval(&ka[1], &kb[1]));
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub enum InverseStrategy {
    /// Grouplike basis: the inverse is the pointwise reciprocal.
    GrouplikePointwise,
    /// Finite algebra: solve `gamma * psi = epsilon (x) epsilon` as a linear system.
    TableSolve,
    /// Verify a supplied inverse on the sample box.
    UserSupplied(PairFunctional),
}

fn pair_names(h: &dyn Hopf, a: &Label, b: &Label) -> (String, String) {
    (h.label_name(a), h.label_name(b))
}

/// Convolution inverse of `gamma`; invertibility is checked on the pairs of the sample box.
pub fn convolution_inverse(
    gamma: &PairFunctional,
    hopf: HopfRef,
    strategy: InverseStrategy,
    spec: &SampleSpec,
) -> Result<PairFunctional, CocycleError> {
    let labels = hopf.box_labels(spec.radius);
    let name = format!("{}^-1", gamma.name);
    let eps = |a: &Label, b: &Label| &hopf.counit_basis(a) * &hopf.counit_basis(b);
    match strategy {
        InverseStrategy::GrouplikePointwise => {
            if !hopf.grouplike_basis() {
                return Err(CocycleError::NotGrouplike(hopf.name()));
            }
            for a in &labels {
                for b in &labels {
                    if gamma.eval(a, b).is_zero() {
                        let (a, b) = pair_names(&*hopf, a, b);
                        return Err(CocycleError::NonInvertible { a, b });
                    }
                }
            }
            if let Some(bc) = &gamma.closed_form {
                return Ok(PairFunctional::from_bicharacter(name, bc.neg()));
            }
            let g = gamma.clone();
            // zero outside the checked box maps to zero; the inverse check reports it
            Ok(PairFunctional::new(name, move |a, b| g.eval(a, b).inv().unwrap_or_default()))
        }
        InverseStrategy::TableSolve => {
            if !hopf.is_finite() {
                return Err(CocycleError::NotFinite(hopf.name()));
            }
            let n = labels.len();
            let index: HashMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
            let col = |a: &Label, b: &Label| index[a] * n + index[b];
            let mut rows: Vec<Row> = Vec::with_capacity(n * n);
            let mut rhs = Vec::with_capacity(n * n);
            for a in &labels {
                for b in &labels {
                    let mut row = Row::new();
                    let (da, db) = (hopf.coproduct_basis(a), hopf.coproduct_basis(b));
                    for (ka, ca) in da.iter() {
                        for (kb, cb) in db.iter() {
                            let x = gamma.eval(&ka[0], &kb[0]);
                            if x.is_zero() {
                                continue;
                            }
                            let c = col(&ka[1], &kb[1]);
                            let v = row.remove(&c).unwrap_or_default().add_ref(&(&(ca * cb) * &x));
                            if !v.is_zero() {
                                row.insert(c, v);
                            }
                        }
                    }
                    rows.push(row);
                    rhs.push(eps(a, b));
                }
            }
            let sol = match linalg::solve(&rows, &rhs, n * n) {
                Ok(s) => s,
                Err(linalg::LinalgError::Inconsistent { row }) => {
                    let (a, b) = pair_names(&*hopf, &labels[row / n], &labels[row % n]);
                    return Err(CocycleError::NonInvertible { a, b });
                }
            };
            if let Some(&c) = sol.free_columns.first() {
                let (a, b) = pair_names(&*hopf, &labels[c / n], &labels[c % n]);
                return Err(CocycleError::Underdetermined { a, b });
            }
            let mut table = HashMap::new();
            for a in &labels {
                for b in &labels {
                    table.insert((a.clone(), b.clone()), sol.particular[col(a, b)].clone());
                }
            }
            let psi = PairFunctional::from_table(name, table);
            check_inverse(gamma, &psi, &*hopf, &labels)?;
            Ok(psi)
        }
        InverseStrategy::UserSupplied(psi) => {
            check_inverse(gamma, &psi, &*hopf, &labels)?;
            Ok(psi)
        }
    }
}

fn check_inverse(g: &PairFunctional, psi: &PairFunctional, h: &dyn Hopf, labels: &[Label]) -> Result<(), CocycleError> {
    for a in labels {
        for b in labels {
            let e = &h.counit_basis(a) * &h.counit_basis(b);
            if convolve_at(h, g, psi, a, b) != e || convolve_at(h, psi, g, a, b) != e {
                let (a, b) = pair_names(h, a, b);
                return Err(CocycleError::InverseMismatch { a, b });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CocycleFlags {
    pub cocycle_verified: bool,
    pub unital: bool,
    pub unitary: bool,
}

/// `gamma` with its convolution inverse and verification flags.
#[derive(Clone)]
pub struct CocycleData {
    pub hopf: HopfRef,
    pub gamma: PairFunctional,
    pub gamma_bar: PairFunctional,
    pub flags: CocycleFlags,
}

impl fmt::Debug for CocycleData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CocycleData")
            .field("hopf", &self.hopf.name())
            .field("gamma", &self.gamma)
            .field("gamma_bar", &self.gamma_bar)
            .field("flags", &self.flags)
            .finish()
    }
}

impl CocycleData {
    pub fn new(hopf: HopfRef, gamma: PairFunctional, gamma_bar: PairFunctional) -> Self {
        CocycleData { hopf, gamma, gamma_bar, flags: CocycleFlags::default() }
    }

    pub fn trivial(hopf: HopfRef) -> Self {
        let e = PairFunctional::counit(hopf.clone());
        CocycleData::new(hopf, e.clone(), e)
    }

    pub fn is_trivial_name(&self) -> bool {
        self.gamma.name == "counit"
    }

    pub fn g(&self, x: &Elem, y: &Elem) -> Cyc {
        self.gamma.eval_elems(x, y)
    }

    pub fn gb(&self, x: &Elem, y: &Elem) -> Cyc {
        self.gamma_bar.eval_elems(x, y)
    }

    /// `U(k) = gamma(k_1 (x) S(k_2))`.
    pub fn u(&self, k: &Label) -> Cyc {
        let h = &*self.hopf;
        h.legs(k, 2).eval(|l| self.g(&Elem::basis(l[0].clone()), &h.antipode_basis(&l[1])))
    }

    /// `Ubar(k) = gammabar(S(k_1) (x) k_2)`.
    pub fn ubar(&self, k: &Label) -> Cyc {
        let h = &*self.hopf;
        h.legs(k, 2).eval(|l| self.gb(&h.antipode_basis(&l[0]), &Elem::basis(l[1].clone())))
    }

    /// `V(k) = gamma(S^-1(k_2) (x) k_1)`.
    pub fn v(&self, k: &Label) -> Cyc {
        let h = &*self.hopf;
        h.legs(k, 2).eval(|l| self.g(&h.antipode_inv_basis(&l[1]), &Elem::basis(l[0].clone())))
    }

    /// `Vbar(k) = gammabar(k_2 (x) S^-1(k_1))`.
    pub fn vbar(&self, k: &Label) -> Cyc {
        let h = &*self.hopf;
        h.legs(k, 2).eval(|l| self.gb(&Elem::basis(l[1].clone()), &h.antipode_inv_basis(&l[0])))
    }

    pub fn u_elem(&self, x: &Elem) -> Cyc {
        x.eval(|k| self.u(k))
    }
    pub fn ubar_elem(&self, x: &Elem) -> Cyc {
        x.eval(|k| self.ubar(k))
    }
    pub fn v_elem(&self, x: &Elem) -> Cyc {
        x.eval(|k| self.v(k))
    }
    pub fn vbar_elem(&self, x: &Elem) -> Cyc {
        x.eval(|k| self.vbar(k))
    }

    /// Runs both identity suites and sets the flags from their outcome.
    pub fn certify(&mut self, spec: &SampleSpec) -> VerificationReport {
        let mut r = verify_cocycle_identities(self, spec);
        let core = ["cocycle.equation", "cocycle.inverse"];
        self.flags.cocycle_verified = core.iter().all(|id| r.passed(id)) && r.all_pass();
        self.flags.unital = r.passed("cocycle.unital");
        let u = verify_unitarity_suite(self, spec);
        self.flags.unitary = self.flags.cocycle_verified
            && u.passed("cocycle.unitary")
            && u.passed("cocycle.unitary_bar");
        r.extend(u);
        r
    }

    /// `gammabar` viewed as a cocycle on the twisted algebra, with inverse `gamma`.
    pub fn reversed_on(&self, twisted: HopfRef) -> CocycleData {
        CocycleData::new(twisted, self.gamma_bar.clone(), self.gamma.clone())
    }
}

fn names(h: &dyn Hopf, t: &[Label]) -> String {
    let parts: Vec<String> = t.iter().map(|l| h.label_name(l)).collect();
    format!("({})", parts.join(", "))
}

fn mismatch(h: &dyn Hopf, t: &[Label], lhs: &Cyc, rhs: &Cyc) -> String {
    format!("{}: lhs = {lhs}, rhs = {rhs}", names(h, t))
}

fn basis(l: &Label) -> Elem {
    Elem::basis(l.clone())
}

/// Cocycle equation, its three equivalent forms, unitality and the inverse property.
pub fn verify_cocycle_identities(d: &CocycleData, spec: &SampleSpec) -> VerificationReport {
    let h = &*d.hopf;
    let labels = h.box_labels(spec.radius);
    let (pairs, ex2) = spec.tuples(&labels, 2, 21);
    let (triples, ex3) = spec.tuples(&labels, 3, 22);
    let d1 = spec.describe(true, labels.len());
    let d2 = spec.describe(ex2, pairs.len());
    let d3 = spec.describe(ex3, triples.len());
    let mut r = VerificationReport::new();
    let m = |x: &Label, y: &Label| h.mul_basis(x, y);
    let mm = |x: &Elem, y: &Elem| h.mul(x, y);

    let equation = |t: &[Label]| -> (Cyc, Cyc) {
        let (g, hh, k) = (&t[0], &t[1], &t[2]);
        let (lg, lh, lk) = (h.legs(g, 2), h.legs(hh, 2), h.legs(k, 2));
        let lhs = lg.eval(|a| lh.eval(|b| &d.g(&basis(&a[0]), &basis(&b[0])) * &d.g(&m(&a[1], &b[1]), &basis(k))));
        let rhs = lh.eval(|b| lk.eval(|c| &d.g(&basis(&b[0]), &basis(&c[0])) * &d.g(&basis(g), &m(&b[1], &c[1]))));
        (lhs, rhs)
    };

    r.check("cocycle.equation", "cocycle equation", d3.clone(), || {
        for_all(&triples, |t| {
            let (l, rr) = equation(t);
            if l != rr {
                return Err(mismatch(h, t, &l, &rr));
            }
            Ok(())
        })
    });
    r.check("cocycle.equation_bar", "equivalent cocycle identity for gammabar", d3.clone(), || {
        for_all(&triples, |t| {
            let (g, hh, k) = (&t[0], &t[1], &t[2]);
            let (lg, lh, lk) = (h.legs(g, 2), h.legs(hh, 2), h.legs(k, 2));
            let lhs =
                lg.eval(|a| lh.eval(|b| &d.gb(&m(&a[0], &b[0]), &basis(k)) * &d.gb(&basis(&a[1]), &basis(&b[1]))));
            let rhs =
                lh.eval(|b| lk.eval(|c| &d.gb(&basis(g), &m(&b[0], &c[0])) * &d.gb(&basis(&b[1]), &basis(&c[1]))));
            if lhs != rhs {
                return Err(mismatch(h, t, &lhs, &rhs));
            }
            Ok(())
        })
    });
    r.check("cocycle.mixed_left", "equivalent cocycle identity, gamma on the left product", d3.clone(), || {
        for_all(&triples, |t| {
            let (g, hh, k) = (&t[0], &t[1], &t[2]);
            let (lg, lh, lk) = (h.legs(g, 2), h.legs(hh, 2), h.legs(k, 2));
            let lhs = lg.eval(|a| {
                lh.eval(|b| {
                    lk.eval(|c| {
                        let x = d.g(&m(&a[0], &b[0]), &basis(&c[0]));
                        if x.raw_terms().is_empty() {
                            return x;
                        }
                        &x * &d.gb(&basis(&a[1]), &m(&b[1], &c[1]))
                    })
                })
            });
            let rhs = lh.eval(|b| &d.gb(&basis(g), &basis(&b[0])) * &d.g(&basis(&b[1]), &basis(k)));
            if lhs != rhs {
                return Err(mismatch(h, t, &lhs, &rhs));
            }
            Ok(())
        })
    });
    r.check("cocycle.mixed_right", "equivalent cocycle identity, gamma on the right product", d3.clone(), || {
        for_all(&triples, |t| {
            let (g, hh, k) = (&t[0], &t[1], &t[2]);
            let (lg, lh, lk) = (h.legs(g, 2), h.legs(hh, 2), h.legs(k, 2));
            let lhs = lg.eval(|a| {
                lh.eval(|b| {
                    lk.eval(|c| {
                        let x = d.g(&basis(&a[0]), &m(&b[0], &c[0]));
                        if x.raw_terms().is_empty() {
                            return x;
                        }
                        &x * &d.gb(&m(&a[1], &b[1]), &basis(&c[1]))
                    })
                })
            });
            let rhs = lh.eval(|b| &d.g(&basis(g), &basis(&b[1])) * &d.gb(&basis(&b[0]), &basis(k)));
            if lhs != rhs {
                return Err(mismatch(h, t, &lhs, &rhs));
            }
            Ok(())
        })
    });
    let one = h.unit();
    r.check("cocycle.unital", "unital cocycle", d1.clone(), || {
        for_all(&labels, |l| {
            let x = basis(l);
            let e = h.counit_basis(l);
            for (which, v) in [
                ("gamma(h,1)", d.g(&x, &one)),
                ("gamma(1,h)", d.g(&one, &x)),
                ("gammabar(h,1)", d.gb(&x, &one)),
                ("gammabar(1,h)", d.gb(&one, &x)),
            ] {
                if v != e {
                    return Err(format!("{which} at {}: {v} != {e}", h.label_name(l)));
                }
            }
            Ok(())
        })
    });
    r.check("cocycle.inverse", "convolution inverse", d2.clone(), || {
        for_all(&pairs, |p| {
            let e = &h.counit_basis(&p[0]) * &h.counit_basis(&p[1]);
            let a = convolve_at(h, &d.gamma, &d.gamma_bar, &p[0], &p[1]);
            let b = convolve_at(h, &d.gamma_bar, &d.gamma, &p[0], &p[1]);
            if a != e || b != e {
                return Err(format!("{}: gamma*gammabar = {a}, gammabar*gamma = {b}", names(h, p)));
            }
            Ok(())
        })
    });
    if h.grouplike_basis() {
        r.check("cocycle.group_crosscheck", "cocycle equation", d3, || {
            for_all(&triples, |t| {
                let (g, hh, k) = (&t[0], &t[1], &t[2]);
                let gh = mm(&basis(g), &basis(hh));
                let hk = mm(&basis(hh), &basis(k));
                let lhs = &d.gamma.eval(g, hh) * &d.g(&gh, &basis(k));
                let rhs = &d.gamma.eval(hh, k) * &d.g(&basis(g), &hk);
                let (sl, sr) = equation(t);
                if &lhs - &rhs != &sl - &sr {
                    return Err(format!("{}: group path and Sweedler path disagree", names(h, t)));
                }
                Ok(())
            })
        });
    }
    r
}

/// Applies `S` to the first leg, then `*` to every leg.
fn s_first_then_star(h: &dyn Hopf, t: &Tensor) -> Tensor {
    star_tensor(h, &crate::hopf::map_leg(t, 0, |l| h.antipode_basis(l)))
}

/// Unitarity and the exchange identities between `gamma`, `U` and `Vbar`.
pub fn verify_unitarity_suite(d: &CocycleData, spec: &SampleSpec) -> VerificationReport {
    let h = &*d.hopf;
    let labels = h.box_labels(spec.radius);
    let (pairs, ex2) = spec.tuples(&labels, 2, 31);
    let d1 = spec.describe(true, labels.len());
    let d2 = spec.describe(ex2, pairs.len());
    let mut r = VerificationReport::new();
    if !d.flags.cocycle_verified {
        for id in [
            "cocycle.unitary",
            "cocycle.unitary_bar",
            "cocycle.vbar_conjugate",
            "cocycle.vbar_exchange",
            "cocycle.gamma_vbar_exchange",
            "cocycle.u_exchange",
            "cocycle.u_inverse",
            "cocycle.v_inverse",
        ] {
            r.skip(id, "unitary cocycle", "cocycle identities not verified");
        }
        return r;
    }
    let sstar = |l: &Label| h.star(&h.antipode_basis(l));
    r.check("cocycle.unitary", "unitary cocycle: conj gamma(a,b) = gammabar(S(a)*, S(b)*)", d2.clone(), || {
        for_all(&pairs, |p| {
            let lhs = d.gamma.eval(&p[0], &p[1]).conj();
            let rhs = d.gb(&sstar(&p[0]), &sstar(&p[1]));
            if lhs != rhs {
                return Err(mismatch(h, p, &lhs, &rhs));
            }
            Ok(())
        })
    });
    r.check("cocycle.unitary_bar", "unitary cocycle: conj gammabar(a,b) = gamma(S(a)*, S(b)*)", d2.clone(), || {
        for_all(&pairs, |p| {
            let lhs = d.gamma_bar.eval(&p[0], &p[1]).conj();
            let rhs = d.g(&sstar(&p[0]), &sstar(&p[1]));
            if lhs != rhs {
                return Err(mismatch(h, p, &lhs, &rhs));
            }
            Ok(())
        })
    });
    if d.flags.unitary || (r.passed("cocycle.unitary") && r.passed("cocycle.unitary_bar")) {
        r.check("cocycle.vbar_conjugate", "conj Vbar(h*) = V(h)", d1.clone(), || {
            for_all(&labels, |l| {
                let lhs = d.vbar_elem(&h.star(&basis(l))).conj();
                let rhs = d.v(l);
                if lhs != rhs {
                    return Err(mismatch(h, std::slice::from_ref(l), &lhs, &rhs));
                }
                Ok(())
            })
        });
    } else {
        r.skip("cocycle.vbar_conjugate", "conj Vbar(h*) = V(h)", "cocycle not unitary");
    }
    let star2 = |l: &Label| star_tensor(h, &h.legs(l, 2));
    let sstar2 = |l: &Label| s_first_then_star(h, &h.legs(l, 2));
    r.check(
        "cocycle.vbar_exchange",
        "Vbar(k1*)Vbar(h1*)gamma(k2*,h2*) = gammabar(S(h1)*,S(k1)*)Vbar(k2*h2*)",
        d2.clone(),
        || {
            for_all(&pairs, |p| {
                let (hh, k) = (&p[0], &p[1]);
                let (th, tk) = (star2(hh), star2(k));
                let lhs = th.eval(|a| {
                    tk.eval(|b| &(&d.vbar(&b[0]) * &d.vbar(&a[0])) * &d.gamma.eval(&b[1], &a[1]))
                });
                let (sh, sk) = (sstar2(hh), sstar2(k));
                let rhs = sh.eval(|a| {
                    sk.eval(|b| {
                        let x = d.gamma_bar.eval(&a[0], &b[0]);
                        if x.raw_terms().is_empty() {
                            return x;
                        }
                        &x * &d.vbar_elem(&h.mul_basis(&b[1], &a[1]))
                    })
                });
                if lhs != rhs {
                    return Err(mismatch(h, p, &lhs, &rhs));
                }
                Ok(())
            })
        },
    );
    r.check(
        "cocycle.gamma_vbar_exchange",
        "gamma(S(h1)*,S(k1)*)Vbar(k2*)Vbar(h2*) = Vbar(k1*h1*)gammabar(k2*,h2*)",
        d2.clone(),
        || {
            for_all(&pairs, |p| {
                let (hh, k) = (&p[0], &p[1]);
                let (sh, sk) = (sstar2(hh), sstar2(k));
                let lhs = sh.eval(|a| {
                    sk.eval(|b| &(&d.gamma.eval(&a[0], &b[0]) * &d.vbar(&b[1])) * &d.vbar(&a[1]))
                });
                let (th, tk) = (star2(hh), star2(k));
                let rhs = th.eval(|a| {
                    tk.eval(|b| {
                        let x = d.gamma_bar.eval(&b[1], &a[1]);
                        if x.raw_terms().is_empty() {
                            return x;
                        }
                        &d.vbar_elem(&h.mul_basis(&b[0], &a[0])) * &x
                    })
                });
                if lhs != rhs {
                    return Err(mismatch(h, p, &lhs, &rhs));
                }
                Ok(())
            })
        },
    );
    r.check("cocycle.u_exchange", "U(h1)gammabar(S(h2),k) = gamma(h1,S(h2)k)", d2.clone(), || {
        for_all(&pairs, |p| {
            let (hh, k) = (&p[0], &p[1]);
            let lh = h.legs(hh, 2);
            let lhs = lh.eval(|a| &d.u(&a[0]) * &d.gb(&h.antipode_basis(&a[1]), &basis(k)));
            let rhs = lh.eval(|a| d.g(&basis(&a[0]), &h.mul(&h.antipode_basis(&a[1]), &basis(k))));
            if lhs != rhs {
                return Err(mismatch(h, p, &lhs, &rhs));
            }
            Ok(())
        })
    });
    r.check("cocycle.u_inverse", "U and Ubar are convolution inverse", d1.clone(), || {
        for_all(&labels, |l| {
            let t = h.legs(l, 2);
            let a = t.eval(|k| &d.u(&k[0]) * &d.ubar(&k[1]));
            let b = t.eval(|k| &d.ubar(&k[0]) * &d.u(&k[1]));
            let e = h.counit_basis(l);
            if a != e || b != e {
                return Err(format!("{}: U*Ubar = {a}, Ubar*U = {b}", h.label_name(l)));
            }
            Ok(())
        })
    });
    r.check("cocycle.v_inverse", "V and Vbar are convolution inverse", d1, || {
        for_all(&labels, |l| {
            let t = h.legs(l, 2);
            let a = t.eval(|k| &d.v(&k[0]) * &d.vbar(&k[1]));
            let b = t.eval(|k| &d.vbar(&k[0]) * &d.v(&k[1]));
            let e = h.counit_basis(l);
            if a != e || b != e {
                return Err(format!("{}: V*Vbar = {a}, Vbar*V = {b}", h.label_name(l)));
            }
            Ok(())
        })
    });
    r
}

/// `gamma(u_m (x) u_n) = exp(2 pi i <<theta m, n>>)` on `C[Z^n]`, for skew `theta`.
pub fn theta_cocycle(theta: Vec<Vec<Q>>, order: u32) -> Result<CocycleData, CocycleError> {
    let b = Bicharacter::new(theta, order)?;
    let n = b.dim();
    for i in 0..n {
        for j in 0..n {
            if b.matrix[i][j] != -b.matrix[j][i].clone() {
                return Err(CocycleError::NotSkew { i, j });
            }
        }
    }
    // <<theta m, n>> = n^T theta m = m^T theta^T n
    let hopf: HopfRef = Arc::new(crate::hopf::GroupAlgebra::new(crate::hopf::AbelianGroup::lattice(n)));
    Ok(bicharacter_cocycle(hopf, b.transpose(), "gamma_theta"))
}

/// `theta` with a single entry `theta_12 = p/q` (and `theta_21 = -p/q`).
pub fn theta_2d(p: i64, q: i64) -> Vec<Vec<Q>> {
    let t = Q::new(p.into(), q.into());
    vec![vec![Q::zero(), t.clone()], vec![-t, Q::zero()]]
}

/// Bicharacter cocycle `exp(2 pi i m^T B n)` on a group algebra with grouplike inverse.
pub fn bicharacter_cocycle(hopf: HopfRef, b: Bicharacter, name: &str) -> CocycleData {
    let gamma = PairFunctional::from_bicharacter(name, b.clone());
    let gamma_bar = PairFunctional::from_bicharacter(format!("{name}^-1"), b.neg());
    CocycleData::new(hopf, gamma, gamma_bar)
}

/// Dual cocycle on `Fun(G)` induced by an abelian subgroup
/// `H = <g_1> x ... x <g_r>` and a bicharacter `omega` on the dual group of `H`:
/// `gamma(delta_x, delta_y) = |H|^-2 sum_{s,t} omega(s,t) conj(chi_s(x) chi_t(y))`
/// for `x, y` in `H`, zero otherwise. `omega^-1` gives the inverse.
pub fn subgroup_twist(fun: Arc<FunAlgebra>, generators: &[usize], omega: &Bicharacter) -> Result<CocycleData, CocycleError> {
    let grp = &fun.group;
    let orders: Vec<usize> = generators.iter().map(|&g| grp.element_order(g)).collect();
    if omega.dim() != generators.len() {
        return Err(CocycleError::Shape);
    }
    let sub = crate::hopf::AbelianGroup::finite(&orders.iter().map(|&n| n as i64).collect::<Vec<_>>());
    let coords = sub.box_elements(0);
    // element of G for each coordinate vector of H
    let mut at: HashMap<Label, Label> = HashMap::new();
    for c in &coords {
        let mut x = grp.identity;
        for (i, &g) in generators.iter().enumerate() {
            for _ in 0..c.0[i] {
                x = grp.mul(x, g);
            }
        }
        if at.values().any(|l| *l == crate::hopf::lab(x)) {
            return Err(CocycleError::Shape);
        }
        at.insert(c.clone(), crate::hopf::lab(x));
    }
    // chi_s(h) = prod_i zeta_{n_i}^{s_i h_i}
    let chi = |s: &Label, h: &Label| -> Cyc {
        let mut acc = Cyc::one();
        for i in 0..orders.len() {
            acc = &acc * &Cyc::root(orders[i] as u32, s.0[i] * h.0[i]).unwrap();
        }
        acc
    };
    let size = Q::new(1.into(), ((coords.len() * coords.len()) as i64).into());
    let mut g_table = HashMap::new();
    let mut gb_table = HashMap::new();
    for x in &coords {
        for y in &coords {
            let (mut g, mut gb) = (Cyc::zero(), Cyc::zero());
            for s in &coords {
                for t in &coords {
                    let w = &chi(s, x) * &chi(t, y);
                    let o = omega.value(s, t);
                    g += &(&o.conj() * &w).conj();
                    gb += &(&o * &w).conj();
                }
            }
            let key = (at[x].clone(), at[y].clone());
            g_table.insert(key.clone(), g.scale(&size));
            gb_table.insert(key, gb.scale(&size));
        }
    }
    let hopf: HopfRef = fun;
    Ok(CocycleData::new(
        hopf,
        PairFunctional::from_table("gamma_subgroup", g_table),
        PairFunctional::from_table("gamma_subgroup^-1", gb_table),
    ))
}

type Cache<K> = Mutex<HashMap<K, Elem>>;

/// `A_gamma`: same coalgebra, product `gamma(h1,k1) h2 k2 gammabar(h3,k3)`,
/// antipode `U(h1) S(h2) Ubar(h3)` and star `Vbar(h1*) h2* V(h3*)`.
pub struct TwistedHopf {
    pub base: HopfRef,
    pub cocycle: CocycleData,
    with_star: bool,
    product: Cache<(Label, Label)>,
    antipode: Cache<Label>,
    antipode_inv: Cache<Label>,
    star: Cache<Label>,
}

impl fmt::Debug for TwistedHopf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwistedHopf({})", self.name())
    }
}

/// Builds `A_gamma`. The star structure needs a unitary cocycle.
pub fn twist_hopf(data: &CocycleData, with_star: bool) -> Result<TwistedHopf, CocycleError> {
    if !data.flags.cocycle_verified {
        return Err(CocycleError::NotVerified);
    }
    if with_star && !data.flags.unitary {
        return Err(CocycleError::MissingUnitarity);
    }
    Ok(TwistedHopf {
        base: data.hopf.clone(),
        cocycle: data.clone(),
        with_star,
        product: Mutex::default(),
        antipode: Mutex::default(),
        antipode_inv: Mutex::default(),
        star: Mutex::default(),
    })
}

fn cached<K: std::hash::Hash + Eq + Clone, F: FnOnce() -> Elem>(c: &Cache<K>, k: &K, f: F) -> Elem {
    if let Some(v) = c.lock().unwrap().get(k) {
        return v.clone();
    }
    let v = f();
    c.lock().unwrap().insert(k.clone(), v.clone());
    v
}

impl TwistedHopf {
    pub fn has_star(&self) -> bool {
        self.with_star
    }

    fn product_uncached(&self, a: &Label, b: &Label) -> Elem {
        let (h, d) = (&*self.base, &self.cocycle);
        let (la, lb) = (h.legs(a, 3), h.legs(b, 3));
        let mut out = Elem::zero();
        for (ka, ca) in la.iter() {
            for (kb, cb) in lb.iter() {
                let x = d.gamma.eval(&ka[0], &kb[0]);
                if x.is_zero() {
                    continue;
                }
                let y = d.gamma_bar.eval(&ka[2], &kb[2]);
                if y.is_zero() {
                    continue;
                }
                let c = &(&(ca * cb) * &x) * &y;
                out.add_scaled(&h.mul_basis(&ka[1], &kb[1]), &c);
            }
        }
        out
    }
}

impl Hopf for TwistedHopf {
    fn name(&self) -> String {
        format!("{}_{}", self.base.name(), self.cocycle.gamma.name)
    }
    fn contains(&self, l: &Label) -> bool {
        self.base.contains(l)
    }
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem {
        cached(&self.product, &(a.clone(), b.clone()), || self.product_uncached(a, b))
    }
    fn unit(&self) -> Elem {
        self.base.unit()
    }
    fn coproduct_basis(&self, a: &Label) -> Tensor {
        self.base.coproduct_basis(a)
    }
    fn counit_basis(&self, a: &Label) -> Cyc {
        self.base.counit_basis(a)
    }
    fn antipode_basis(&self, a: &Label) -> Elem {
        cached(&self.antipode, a, || {
            let (h, d) = (&*self.base, &self.cocycle);
            let mut out = Elem::zero();
            for (k, c) in h.legs(a, 3).iter() {
                let s = &(c * &d.u(&k[0])) * &d.ubar(&k[2]);
                out.add_scaled(&h.antipode_basis(&k[1]), &s);
            }
            out
        })
    }
    /// `S_gamma^-1(h) = V(h1) S^-1(h2) Vbar(h3)`.
    fn antipode_inv_basis(&self, a: &Label) -> Elem {
        cached(&self.antipode_inv, a, || {
            let (h, d) = (&*self.base, &self.cocycle);
            let mut out = Elem::zero();
            for (k, c) in h.legs(a, 3).iter() {
                let s = &(c * &d.v(&k[0])) * &d.vbar(&k[2]);
                out.add_scaled(&h.antipode_inv_basis(&k[1]), &s);
            }
            out
        })
    }
    fn star_basis(&self, a: &Label) -> Elem {
        assert!(self.with_star, "star structure of {} was not requested", self.name());
        cached(&self.star, a, || {
            let (h, d) = (&*self.base, &self.cocycle);
            let t = star_tensor(h, &h.legs(a, 3));
            let mut out = Elem::zero();
            for (k, c) in t.iter() {
                let s = &(c * &d.vbar(&k[0])) * &d.v(&k[2]);
                out.add_scaled(&basis(&k[1]), &s);
            }
            out
        })
    }
    fn box_labels(&self, radius: i64) -> Vec<Label> {
        self.base.box_labels(radius)
    }
    fn is_finite(&self) -> bool {
        self.base.is_finite()
    }
    fn grouplike_basis(&self) -> bool {
        self.base.grouplike_basis()
    }
    fn label_name(&self, l: &Label) -> String {
        self.base.label_name(l)
    }
}

/// Compares product, antipode and star tables of two presentations on `labels`.
pub fn compare_hopf_tables(a: &dyn Hopf, b: &dyn Hopf, labels: &[Label], with_star: bool) -> Result<(), String> {
    for x in labels {
        for y in labels {
            if a.mul_basis(x, y) != b.mul_basis(x, y) {
                return Err(format!("product differs at {}", names(a, &[x.clone(), y.clone()])));
            }
        }
        if a.antipode_basis(x) != b.antipode_basis(x) {
            return Err(format!("antipode differs at {}", a.label_name(x)));
        }
        if with_star && a.star_basis(x) != b.star_basis(x) {
            return Err(format!("star differs at {}", a.label_name(x)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{verify_hopf_axioms, AbelianGroup, FiniteGroup, GroupAlgebra};

    fn z2() -> HopfRef {
        Arc::new(GroupAlgebra::new(AbelianGroup::lattice(2)))
    }

    fn l(v: &[i64]) -> Label {
        Label::new(v)
    }

    fn torus_gamma() -> CocycleData {
        theta_cocycle(theta_2d(1, 3), 3).unwrap()
    }

    #[test]
    fn theta_value() {
        let d = torus_gamma();
        assert_eq!(d.gamma.eval(&l(&[1, 0]), &l(&[0, 1])), Cyc::root(3, -1).unwrap());
        for m in d.hopf.box_labels(3) {
            assert!(d.gamma.eval(&m, &m).is_one());
            assert!(d.vbar_elem(&d.hopf.star(&Elem::basis(m.clone()))).is_one());
        }
    }

    #[test]
    fn rejects_non_skew() {
        let mut t = theta_2d(1, 3);
        t[1][0] = Q::zero();
        assert_eq!(theta_cocycle(t, 3).unwrap_err(), CocycleError::NotSkew { i: 0, j: 1 });
    }

    #[test]
    fn torus_suites_pass() {
        let mut d = torus_gamma();
        let r = d.certify(&SampleSpec::new(4, 100, 42));
        assert!(r.all_pass(), "{}", r.to_text());
        assert!(d.flags.cocycle_verified && d.flags.unital && d.flags.unitary);
    }

    #[test]
    fn convolution_with_inverse_is_counit() {
        let d = torus_gamma();
        let c = convolve(&d.gamma, &d.gamma_bar, d.hopf.clone());
        for a in d.hopf.box_labels(2) {
            for b in d.hopf.box_labels(2) {
                assert!(c.eval(&a, &b).is_one());
            }
        }
        let e = PairFunctional::counit(d.hopf.clone());
        let c2 = convolve(&e, &d.gamma, d.hopf.clone());
        assert_eq!(c2.eval(&l(&[1, 0]), &l(&[0, 1])), d.gamma.eval(&l(&[1, 0]), &l(&[0, 1])));
    }

    #[test]
    fn zero_value_is_not_invertible() {
        let d = torus_gamma();
        let bad = d.gamma.with_value(&l(&[1, 0]), &l(&[0, 1]), Cyc::zero());
        let err = convolution_inverse(&bad, d.hopf.clone(), InverseStrategy::GrouplikePointwise, &SampleSpec::default())
            .unwrap_err();
        assert_eq!(err, CocycleError::NonInvertible { a: "u(1,0)".into(), b: "u(0,1)".into() });
    }

    #[test]
    fn perturbed_value_breaks_equation() {
        let d = torus_gamma();
        let bad = d.gamma.scaled_at(&l(&[1, 0]), &l(&[0, 1]), Cyc::root(3, 1).unwrap());
        let inv = convolution_inverse(&bad, d.hopf.clone(), InverseStrategy::GrouplikePointwise, &SampleSpec::default())
            .unwrap();
        let mut d2 = CocycleData::new(d.hopf.clone(), bad, inv);
        let spec = SampleSpec { exhaustive_cap: 1_000_000, ..SampleSpec::new(2, 100, 42) };
        let r = d2.certify(&spec);
        assert!(r.failed("cocycle.equation"));
        assert!(r.get("cocycle.equation").unwrap().witness.as_ref().unwrap().contains("u(1,0)"));
    }

    #[test]
    fn scaled_value_breaks_unitarity() {
        let d = torus_gamma();
        let bad = d.gamma.scaled_at(&l(&[1, 0]), &l(&[0, 1]), Cyc::from_int(2));
        let inv = convolution_inverse(&bad, d.hopf.clone(), InverseStrategy::GrouplikePointwise, &SampleSpec::default())
            .unwrap();
        let mut d2 = CocycleData::new(d.hopf.clone(), bad, inv);
        // only pairs touching the perturbed entry; the unitarity check does not need a cocycle there
        d2.flags.cocycle_verified = true;
        let r = verify_unitarity_suite(&d2, &SampleSpec::new(1, 100, 42));
        assert!(r.failed("cocycle.unitary"));
    }

    #[test]
    fn z5_bicharacter_exhaustive() {
        let h: HopfRef = Arc::new(GroupAlgebra::new(AbelianGroup::finite(&[5, 5])));
        let f = Q::new(1.into(), 5.into());
        let b = Bicharacter::new(vec![vec![Q::zero(), f.clone()], vec![-f, Q::zero()]], 5).unwrap();
        let mut d = bicharacter_cocycle(h, b, "gamma_5");
        let r = d.certify(&SampleSpec::default());
        assert!(r.all_pass(), "{}", r.to_text());
        assert!(r.get("cocycle.equation").unwrap().sample_spec.contains("exhaustive n=15625"));
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn s3_twist() -> (Arc<FunAlgebra>, CocycleData) {
        let fun = Arc::new(FunAlgebra::new(FiniteGroup::symmetric(3)));
        let c = (0..6).find(|&g| fun.group.element_order(g) == 3).unwrap();
        let omega = Bicharacter::new(vec![vec![q(1, 3)]], 3).unwrap();
        let d = subgroup_twist(fun.clone(), &[c], &omega).unwrap();
        (fun, d)
    }

    /// Klein four-subgroup `{e, r^2, s, r^2 s}` of `D4` with `omega(s,t) = (-1)^{s_1 t_2}`.
    fn d4_twist() -> (Arc<FunAlgebra>, CocycleData) {
        let fun = Arc::new(FunAlgebra::new(FiniteGroup::dihedral(4)));
        let gens = [fun.group.find("r2s0").unwrap(), fun.group.find("r0s1").unwrap()];
        let omega = Bicharacter::new(vec![vec![q(0, 1), q(1, 2)], vec![q(0, 1), q(0, 1)]], 2).unwrap();
        let d = subgroup_twist(fun.clone(), &gens, &omega).unwrap();
        (fun, d)
    }

    #[test]
    fn cyclic_twist_values() {
        let (fun, d) = s3_twist();
        let c = (0..6).find(|&g| fun.group.element_order(g) == 3).unwrap();
        let c2 = fun.group.mul(c, c);
        let (lc, lc2) = (crate::hopf::lab(c), crate::hopf::lab(c2));
        // (1/3) zeta_3^{-kl}
        assert_eq!(d.gamma.eval(&lc, &lc2), Cyc::root(3, -2).unwrap().scale(&q(1, 3)));
        assert_eq!(d.gamma_bar.eval(&lc, &lc), Cyc::root(3, 1).unwrap().scale(&q(1, 3)));
    }

    #[test]
    fn table_solve_matches_closed_form() {
        for (fun, d) in [s3_twist(), d4_twist()] {
            let psi = convolution_inverse(&d.gamma, fun.clone(), InverseStrategy::TableSolve, &SampleSpec::default())
                .unwrap();
            for a in fun.box_labels(0) {
                for b in fun.box_labels(0) {
                    assert_eq!(psi.eval(&a, &b), d.gamma_bar.eval(&a, &b));
                }
            }
        }
    }

    #[test]
    fn s3_twist_suites_and_axioms() {
        let (fun, mut d) = s3_twist();
        let spec = SampleSpec::default();
        let r = d.certify(&spec);
        assert!(r.all_pass(), "{}", r.to_text());
        assert!(d.flags.unitary);
        let tw = twist_hopf(&d, true).unwrap();
        let ax = verify_hopf_axioms(&tw, &spec);
        assert!(ax.all_pass(), "{}", ax.to_text());
        // a symmetric bicharacter on a cyclic group leaves the product unchanged
        compare_hopf_tables(&tw, &*fun, &fun.box_labels(0), false).unwrap();
    }

    #[test]
    fn d4_twist_is_a_genuine_deformation() {
        let (fun, mut d) = d4_twist();
        let spec = SampleSpec::default();
        let r = d.certify(&spec);
        assert!(r.all_pass(), "{}", r.to_text());
        assert!(d.flags.unitary);
        let tw = twist_hopf(&d, true).unwrap();
        let labels = fun.box_labels(0);
        let diff = compare_hopf_tables(&tw, &*fun, &labels, true);
        assert!(diff.is_err());
        let ax = verify_hopf_axioms(&tw, &spec);
        assert!(ax.all_pass(), "{}", ax.to_text());
    }

    #[test]
    fn d4_round_trip() {
        let (fun, mut d) = d4_twist();
        let spec = SampleSpec::default();
        d.certify(&spec);
        let tw: HopfRef = Arc::new(twist_hopf(&d, true).unwrap());
        let mut back = d.reversed_on(tw.clone());
        let r = back.certify(&spec);
        assert!(r.all_pass(), "{}", r.to_text());
        let tw2 = twist_hopf(&back, true).unwrap();
        compare_hopf_tables(&tw2, &*fun, &fun.box_labels(0), true).unwrap();
    }

    #[test]
    fn cocommutative_collapse_and_trivial_twist() {
        let mut d = torus_gamma();
        d.certify(&SampleSpec::new(2, 100, 42));
        let tw = twist_hopf(&d, true).unwrap();
        compare_hopf_tables(&tw, &*z2(), &z2().box_labels(3), true).unwrap();
        let fun: HopfRef = Arc::new(FunAlgebra::new(FiniteGroup::symmetric(3)));
        let mut t = CocycleData::trivial(fun.clone());
        assert!(t.certify(&SampleSpec::default()).all_pass());
        let tw = twist_hopf(&t, true).unwrap();
        compare_hopf_tables(&tw, &*fun, &fun.box_labels(0), true).unwrap();
    }

    #[test]
    fn star_needs_unitarity() {
        let d = torus_gamma();
        assert_eq!(twist_hopf(&d, false).unwrap_err(), CocycleError::NotVerified);
    }
}
