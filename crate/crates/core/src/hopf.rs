//! Hopf *-algebras presented on a basis: group algebras of finitely generated
//! abelian groups and function algebras of finite groups.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::linear::{Elem, Label, Tensor};
use crate::report::{for_all, SampleSpec, VerificationReport};
use crate::scalars::Cyc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HopfError {
    #[error("label {label} does not belong to {algebra}")]
    ForeignLabel { label: String, algebra: String },
}

/// Structure maps on basis labels. Element-level maps are derived by
/// (anti)linear extension.
pub trait Hopf: Send + Sync {
    fn name(&self) -> String;
    fn contains(&self, l: &Label) -> bool;
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem;
    fn unit(&self) -> Elem;
    fn coproduct_basis(&self, a: &Label) -> Tensor;
    fn counit_basis(&self, a: &Label) -> Cyc;
    fn antipode_basis(&self, a: &Label) -> Elem;
    fn antipode_inv_basis(&self, a: &Label) -> Elem;
    fn star_basis(&self, a: &Label) -> Elem;
    /// Labels in the sampling box; every label for finite algebras.
    fn box_labels(&self, radius: i64) -> Vec<Label>;

    fn is_finite(&self) -> bool {
        false
    }

    /// True when every basis label is grouplike.
    fn grouplike_basis(&self) -> bool {
        false
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

    fn coproduct(&self, x: &Elem) -> Tensor {
        x.map_linear(|a| self.coproduct_basis(a))
    }

    /// `n`-fold Sweedler expansion of a basis label (`n >= 1` legs), obtained
    /// by repeatedly splitting the last leg.
    fn legs(&self, a: &Label, n: usize) -> Tensor {
        assert!(n >= 1);
        if self.grouplike_basis() {
            return Tensor::basis(vec![a.clone(); n]);
        }
        let mut t = Tensor::basis(vec![a.clone()]);
        for _ in 1..n {
            let last = t.keys().next().map(|k| k.len() - 1).unwrap_or(0);
            t = split_leg(self, &t, last);
        }
        t
    }

    /// `Delta^(k)`: arity `k + 1`.
    fn iterated_coproduct(&self, x: &Elem, k: usize) -> Tensor {
        x.map_linear(|a| self.legs(a, k + 1))
    }

    fn counit(&self, x: &Elem) -> Cyc {
        x.eval(|a| self.counit_basis(a))
    }

    fn antipode(&self, x: &Elem) -> Elem {
        x.map_linear(|a| self.antipode_basis(a))
    }

    fn antipode_inv(&self, x: &Elem) -> Elem {
        x.map_linear(|a| self.antipode_inv_basis(a))
    }

    fn star(&self, x: &Elem) -> Elem {
        x.map_antilinear(|a| self.star_basis(a))
    }

    fn check_label(&self, l: &Label) -> Result<(), HopfError> {
        if self.contains(l) {
            Ok(())
        } else {
            Err(HopfError::ForeignLabel { label: l.to_string(), algebra: self.name() })
        }
    }
}

pub type HopfRef = Arc<dyn Hopf>;

/// Applies `Delta` to one leg of a tensor.
pub fn split_leg<H: Hopf + ?Sized>(h: &H, t: &Tensor, leg: usize) -> Tensor {
    t.map_linear(|key| {
        let d = h.coproduct_basis(&key[leg]);
        d.map_keys(|pair| {
            let mut k = key[..leg].to_vec();
            k.extend(pair.iter().cloned());
            k.extend(key[leg + 1..].iter().cloned());
            k
        })
    })
}

/// Applies a linear map `A -> A` to one leg.
pub fn map_leg<F: FnMut(&Label) -> Elem>(t: &Tensor, leg: usize, mut f: F) -> Tensor {
    t.map_linear(|key| {
        f(&key[leg]).map_keys(|l| {
            let mut k = key.clone();
            k[leg] = l.clone();
            k
        })
    })
}

/// Applies a linear functional to one leg, dropping it.
pub fn contract_leg<F: FnMut(&Label) -> Cyc>(t: &Tensor, leg: usize, mut f: F) -> Tensor {
    let mut out = Tensor::zero();
    for (key, c) in t.iter() {
        let mut k = key.clone();
        let l = k.remove(leg);
        out.add_term(k, c * &f(&l));
    }
    out
}

/// Legwise product of two tensors of equal arity.
pub fn tensor_mul<H: Hopf + ?Sized>(h: &H, s: &Tensor, t: &Tensor) -> Tensor {
    let mut out = Tensor::zero();
    for (ks, cs) in s.iter() {
        for (kt, ct) in t.iter() {
            let mut acc = Tensor::basis(Vec::new());
            for (a, b) in ks.iter().zip(kt.iter()) {
                let p = h.mul_basis(a, b);
                acc = acc.map_linear(|pre| {
                    p.map_keys(|l| {
                        let mut k = pre.clone();
                        k.push(l.clone());
                        k
                    })
                });
            }
            out.add_scaled(&acc, &(cs * ct));
        }
    }
    out
}

pub fn tensor2(x: &Elem, y: &Elem) -> Tensor {
    let mut out = Tensor::zero();
    for (a, c) in x.iter() {
        for (b, d) in y.iter() {
            out.add_term(vec![a.clone(), b.clone()], c * d);
        }
    }
    out
}

/// Finitely generated abelian group `Z^r x Z_{n_1} x ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianGroup {
    pub fn lattice(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn finite(orders: &[i64]) -> Self {
        AbelianGroup { free_rank: 0, torsion: orders.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn normalize(&self, mut v: Vec<i64>) -> Label {
        for (i, n) in self.torsion.iter().enumerate() {
            let j = self.free_rank + i;
            v[j] = v[j].rem_euclid(*n);
        }
        Label(v)
    }

    pub fn add(&self, a: &Label, b: &Label) -> Label {
        self.normalize(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self, a: &Label) -> Label {
        self.normalize(a.0.iter().map(|x| -x).collect())
    }

    pub fn identity(&self) -> Label {
        Label(vec![0; self.dim()])
    }

    pub fn contains(&self, l: &Label) -> bool {
        l.0.len() == self.dim()
            && self.torsion.iter().enumerate().all(|(i, n)| (0..*n).contains(&l.0[self.free_rank + i]))
    }

    pub fn box_elements(&self, radius: i64) -> Vec<Label> {
        let mut out: Vec<Vec<i64>> = vec![Vec::new()];
        for i in 0..self.dim() {
            let range: Vec<i64> = if i < self.free_rank {
                (-radius..=radius).collect()
            } else {
                (0..self.torsion[i - self.free_rank]).collect()
            };
            out = out
                .into_iter()
                .flat_map(|p| {
                    range.iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(*x);
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(Label).collect()
    }
}

/// Group algebra `C[G]`: `Delta u = u (x) u`, `S(u_m) = u_{-m}`, `u_m* = u_{-m}`.
#[derive(Debug, Clone)]
pub struct GroupAlgebra {
    pub group: AbelianGroup,
}

impl GroupAlgebra {
    pub fn new(group: AbelianGroup) -> Self {
        GroupAlgebra { group }
    }

    pub fn u(&self, m: &[i64]) -> Elem {
        Elem::basis(self.group.normalize(m.to_vec()))
    }
}

impl Hopf for GroupAlgebra {
    fn name(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if self.group.free_rank > 0 {
            parts.push(format!("Z^{}", self.group.free_rank));
        }
        parts.extend(self.group.torsion.iter().map(|n| format!("Z{n}")));
        format!("C[{}]", parts.join("xx"))
    }
    fn contains(&self, l: &Label) -> bool {
        self.group.contains(l)
    }
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem {
        Elem::basis(self.group.add(a, b))
    }
    fn unit(&self) -> Elem {
        Elem::basis(self.group.identity())
    }
    fn coproduct_basis(&self, a: &Label) -> Tensor {
        Tensor::basis(vec![a.clone(), a.clone()])
    }
    fn counit_basis(&self, _a: &Label) -> Cyc {
        Cyc::one()
    }
    fn antipode_basis(&self, a: &Label) -> Elem {
        Elem::basis(self.group.neg(a))
    }
    fn antipode_inv_basis(&self, a: &Label) -> Elem {
        Elem::basis(self.group.neg(a))
    }
    fn star_basis(&self, a: &Label) -> Elem {
        Elem::basis(self.group.neg(a))
    }
    fn box_labels(&self, radius: i64) -> Vec<Label> {
        self.group.box_elements(radius)
    }
    fn is_finite(&self) -> bool {
        self.group.free_rank == 0
    }
    fn grouplike_basis(&self) -> bool {
        true
    }
    fn label_name(&self, l: &Label) -> String {
        format!("u{l}")
    }
}

/// Finite group by multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub name: String,
    pub names: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
}

impl FiniteGroup {
    fn from_elements<T: Clone + PartialEq, F: Fn(&T, &T) -> T>(
        name: &str,
        elems: Vec<T>,
        names: Vec<String>,
        op: F,
    ) -> Self {
        let n = elems.len();
        let idx = |x: &T| elems.iter().position(|e| e == x).expect("closed under product");
        let table: Vec<Vec<usize>> =
            (0..n).map(|i| (0..n).map(|j| idx(&op(&elems[i], &elems[j]))).collect()).collect();
        let identity = (0..n).find(|&e| (0..n).all(|j| table[e][j] == j)).expect("identity");
        let inverse = (0..n).map(|i| (0..n).find(|&j| table[i][j] == identity).unwrap()).collect();
        FiniteGroup { name: name.to_string(), names, table, identity, inverse }
    }

    /// Symmetric group on `n` points, permutations in lexicographic order.
    pub fn symmetric(n: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..n {
            perms = perms
                .into_iter()
                .flat_map(|p| {
                    (0..n)
                        .filter(|x| !p.contains(x))
                        .map(|x| {
                            let mut q = p.clone();
                            q.push(x);
                            q
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        let names = perms
            .iter()
            .map(|p| p.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(""))
            .collect();
        // (p q)(i) = p(q(i))
        FiniteGroup::from_elements(&format!("S{n}"), perms, names, |p, q| q.iter().map(|&i| p[i]).collect())
    }

    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|k| format!("c{k}")).collect();
        FiniteGroup::from_elements(&format!("Z{n}"), (0..n).collect(), names, move |a, b| (a + b) % n)
    }

    /// Dihedral group of order `2n`, elements `r^k s^e` named `rKsE`.
    pub fn dihedral(n: usize) -> Self {
        let elems: Vec<(usize, usize)> = (0..2).flat_map(|e| (0..n).map(move |k| (k, e))).collect();
        let names = elems.iter().map(|(k, e)| format!("r{k}s{e}")).collect();
        FiniteGroup::from_elements(&format!("D{n}"), elems, names, move |a, b| {
            let k = if a.1 == 0 { a.0 + b.0 } else { a.0 + n - b.0 };
            (k % n, (a.1 + b.1) % 2)
        })
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|x| x == name)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// Smallest k > 0 with g^k = e.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }
}

pub(crate) fn idx(l: &Label) -> usize {
    l.0[0] as usize
}

pub(crate) fn lab(i: usize) -> Label {
    Label(vec![i as i64])
}

/// Function algebra `Fun(G)` with delta basis: `delta_g delta_h = [g=h] delta_g`,
/// `Delta delta_g = sum_{hk=g} delta_h (x) delta_k`, `S delta_g = delta_{g^-1}`.
#[derive(Debug, Clone)]
pub struct FunAlgebra {
    pub group: FiniteGroup,
}

impl FunAlgebra {
    pub fn new(group: FiniteGroup) -> Self {
        FunAlgebra { group }
    }

    pub fn delta(&self, g: usize) -> Elem {
        Elem::basis(lab(g))
    }
}

impl Hopf for FunAlgebra {
    fn name(&self) -> String {
        format!("Fun({})", self.group.name)
    }
    fn contains(&self, l: &Label) -> bool {
        l.0.len() == 1 && (0..self.group.order() as i64).contains(&l.0[0])
    }
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem {
        if a == b {
            Elem::basis(a.clone())
        } else {
            Elem::zero()
        }
    }
    fn unit(&self) -> Elem {
        (0..self.group.order()).map(|g| (lab(g), Cyc::one())).collect()
    }
    fn coproduct_basis(&self, a: &Label) -> Tensor {
        let g = idx(a);
        let n = self.group.order();
        let mut t = Tensor::zero();
        for h in 0..n {
            let k = self.group.mul(self.group.inverse[h], g);
            t.add_term(vec![lab(h), lab(k)], Cyc::one());
        }
        t
    }
    fn counit_basis(&self, a: &Label) -> Cyc {
        if idx(a) == self.group.identity {
            Cyc::one()
        } else {
            Cyc::zero()
        }
    }
    fn antipode_basis(&self, a: &Label) -> Elem {
        Elem::basis(lab(self.group.inverse[idx(a)]))
    }
    fn antipode_inv_basis(&self, a: &Label) -> Elem {
        Elem::basis(lab(self.group.inverse[idx(a)]))
    }
    fn star_basis(&self, a: &Label) -> Elem {
        Elem::basis(a.clone())
    }
    fn box_labels(&self, _radius: i64) -> Vec<Label> {
        (0..self.group.order()).map(lab).collect()
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn label_name(&self, l: &Label) -> String {
        format!("delta[{}]", self.group.names[idx(l)])
    }
}

/// A presentation with some antipode values overridden; used to check that
/// the axiom checks notice single-entry faults.
pub struct PatchedAntipode {
    pub inner: HopfRef,
    pub patch: BTreeMap<Label, Elem>,
}

impl Hopf for PatchedAntipode {
    fn name(&self) -> String {
        format!("{} (patched antipode)", self.inner.name())
    }
    fn contains(&self, l: &Label) -> bool {
        self.inner.contains(l)
    }
    fn mul_basis(&self, a: &Label, b: &Label) -> Elem {
        self.inner.mul_basis(a, b)
    }
    fn unit(&self) -> Elem {
        self.inner.unit()
    }
    fn coproduct_basis(&self, a: &Label) -> Tensor {
        self.inner.coproduct_basis(a)
    }
    fn counit_basis(&self, a: &Label) -> Cyc {
        self.inner.counit_basis(a)
    }
    fn antipode_basis(&self, a: &Label) -> Elem {
        self.patch.get(a).cloned().unwrap_or_else(|| self.inner.antipode_basis(a))
    }
    fn antipode_inv_basis(&self, a: &Label) -> Elem {
        self.inner.antipode_inv_basis(a)
    }
    fn star_basis(&self, a: &Label) -> Elem {
        self.inner.star_basis(a)
    }
    fn box_labels(&self, radius: i64) -> Vec<Label> {
        self.inner.box_labels(radius)
    }
    fn is_finite(&self) -> bool {
        self.inner.is_finite()
    }
    fn grouplike_basis(&self) -> bool {
        false
    }
    fn label_name(&self, l: &Label) -> String {
        self.inner.label_name(l)
    }
}

/// Which structure map [`hopf_eval`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfExpr {
    Product,
    Coproduct,
    IteratedCoproduct(usize),
    Counit,
    Antipode,
    Star,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HopfValue {
    Elem(Elem),
    Tensor(Tensor),
    Scalar(Cyc),
}

/// Evaluates one structure map on elements after checking their labels.
pub fn hopf_eval(a: &dyn Hopf, expr: HopfExpr, args: &[Elem]) -> Result<HopfValue, HopfError> {
    for x in args {
        for l in x.keys() {
            a.check_label(l)?;
        }
    }
    let x = &args[0];
    Ok(match expr {
        HopfExpr::Product => HopfValue::Elem(a.mul(x, &args[1])),
        HopfExpr::Coproduct => HopfValue::Tensor(a.coproduct(x)),
        HopfExpr::IteratedCoproduct(k) => HopfValue::Tensor(a.iterated_coproduct(x, k)),
        HopfExpr::Counit => HopfValue::Scalar(a.counit(x)),
        HopfExpr::Antipode => HopfValue::Elem(a.antipode(x)),
        HopfExpr::Star => HopfValue::Elem(a.star(x)),
    })
}

pub fn tensor_flip(t: &Tensor) -> Tensor {
    t.map_keys(|k| vec![k[1].clone(), k[0].clone()])
}

/// `(x (x) y) -> x y` on a two-leg tensor.
pub fn multiply_legs<H: Hopf + ?Sized>(h: &H, t: &Tensor) -> Elem {
    t.map_linear(|k| h.mul_basis(&k[0], &k[1]))
}

pub fn star_tensor<H: Hopf + ?Sized>(h: &H, t: &Tensor) -> Tensor {
    t.map_antilinear(|k| {
        let mut acc = Tensor::basis(Vec::new());
        for l in k {
            let s = h.star_basis(l);
            acc = acc.map_linear(|pre| {
                s.map_keys(|m| {
                    let mut p = pre.clone();
                    p.push(m.clone());
                    p
                })
            });
        }
        acc
    })
}

/// Checks the Hopf *-algebra axioms on labels from the sampling box.
pub fn verify_hopf_axioms(a: &dyn Hopf, spec: &SampleSpec) -> VerificationReport {
    let labels = a.box_labels(spec.radius);
    let (pairs, ex2) = spec.tuples(&labels, 2, 11);
    let (triples, ex3) = spec.tuples(&labels, 3, 12);
    let d1 = spec.describe(true, labels.len());
    let d2 = spec.describe(ex2, pairs.len());
    let d3 = spec.describe(ex3, triples.len());
    let name = |l: &Label| a.label_name(l);
    let mut r = VerificationReport::new();
    let one = a.unit();

    r.check("hopf.associativity", "algebra axioms", d3.clone(), || {
        for_all(&triples, |t| {
            let (x, y, z) = (Elem::basis(t[0].clone()), Elem::basis(t[1].clone()), Elem::basis(t[2].clone()));
            if a.mul(&a.mul(&x, &y), &z) != a.mul(&x, &a.mul(&y, &z)) {
                return Err(format!("({}, {}, {})", name(&t[0]), name(&t[1]), name(&t[2])));
            }
            Ok(())
        })
    });
    r.check("hopf.unit", "algebra axioms", d1.clone(), || {
        for_all(&labels, |l| {
            let x = Elem::basis(l.clone());
            if a.mul(&one, &x) != x || a.mul(&x, &one) != x {
                return Err(name(l));
            }
            Ok(())
        })
    });
    r.check("hopf.coassociativity", "Sweedler notation", d1.clone(), || {
        for_all(&labels, |l| {
            let d = a.coproduct_basis(l);
            if split_leg(a, &d, 0) != split_leg(a, &d, 1) {
                return Err(name(l));
            }
            Ok(())
        })
    });
    r.check("hopf.counit", "Sweedler notation", d1.clone(), || {
        for_all(&labels, |l| {
            let d = a.coproduct_basis(l);
            let x = Elem::basis(l.clone());
            let left = contract_leg(&d, 0, |m| a.counit_basis(m)).map_keys(|k| k[0].clone());
            let right = contract_leg(&d, 1, |m| a.counit_basis(m)).map_keys(|k| k[0].clone());
            if left != x || right != x {
                return Err(name(l));
            }
            Ok(())
        })
    });
    r.check("hopf.coproduct_multiplicative", "coproduct is a *-homomorphism", d2.clone(), || {
        for_all(&pairs, |p| {
            let lhs = a.coproduct(&a.mul_basis(&p[0], &p[1]));
            let rhs = tensor_mul(a, &a.coproduct_basis(&p[0]), &a.coproduct_basis(&p[1]));
            if lhs != rhs {
                return Err(format!("({}, {})", name(&p[0]), name(&p[1])));
            }
            Ok(())
        })
    });
    r.check("hopf.counit_multiplicative", "algebra axioms", d2.clone(), || {
        for_all(&pairs, |p| {
            if a.counit(&a.mul_basis(&p[0], &p[1])) != &a.counit_basis(&p[0]) * &a.counit_basis(&p[1]) {
                return Err(format!("({}, {})", name(&p[0]), name(&p[1])));
            }
            Ok(())
        })
    });
    r.check("hopf.antipode", "antipode axiom", d1.clone(), || {
        for_all(&labels, |l| {
            let d = a.coproduct_basis(l);
            let e = one.scale(&a.counit_basis(l));
            let left = multiply_legs(a, &map_leg(&d, 0, |m| a.antipode_basis(m)));
            let right = multiply_legs(a, &map_leg(&d, 1, |m| a.antipode_basis(m)));
            if left != e || right != e {
                return Err(name(l));
            }
            Ok(())
        })
    });
    r.check("hopf.antipode_bijective", "antipode axiom", d1.clone(), || {
        for_all(&labels, |l| {
            let x = Elem::basis(l.clone());
            if a.antipode(&a.antipode_inv(&x)) != x || a.antipode_inv(&a.antipode(&x)) != x {
                return Err(name(l));
            }
            Ok(())
        })
    });
    r.check("hopf.star_involutive", "star structure", d2.clone(), || {
        for_all(&labels, |l| {
            let x = Elem::basis(l.clone());
            if a.star(&a.star(&x)) != x {
                return Err(name(l));
            }
            Ok(())
        })?;
        for_all(&pairs, |p| {
            let (x, y) = (Elem::basis(p[0].clone()), Elem::basis(p[1].clone()));
            if a.star(&a.mul(&x, &y)) != a.mul(&a.star(&y), &a.star(&x)) {
                return Err(format!("({}, {})", name(&p[0]), name(&p[1])));
            }
            Ok(())
        })
    });
    r.check("hopf.coproduct_star", "coproduct is a *-homomorphism", d1.clone(), || {
        for_all(&labels, |l| {
            let x = Elem::basis(l.clone());
            if a.coproduct(&a.star(&x)) != star_tensor(a, &a.coproduct(&x)) {
                return Err(name(l));
            }
            Ok(())
        })
    });
    r.check("hopf.s_star_s_star", "S(S(a*)*) = a", d1, || {
        for_all(&labels, |l| {
            let x = Elem::basis(l.clone());
            if a.antipode(&a.star(&a.antipode(&a.star(&x)))) != x {
                return Err(name(l));
            }
            Ok(())
        })
    });
    r
}

/// `flip . Delta = Delta` on the box; true for group algebras of abelian groups.
pub fn is_cocommutative_on(a: &dyn Hopf, labels: &[Label]) -> bool {
    labels.iter().all(|l| {
        let d = a.coproduct_basis(l);
        tensor_flip(&d) == d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FunAlgebra {
        FunAlgebra::new(FiniteGroup::symmetric(3))
    }

    #[test]
    fn group_algebra_examples() {
        let a = GroupAlgebra::new(AbelianGroup::lattice(2));
        let u10 = a.u(&[1, 0]);
        assert_eq!(a.coproduct(&u10), tensor2(&u10, &u10));
        assert_eq!(a.star(&u10), a.u(&[-1, 0]));
        assert_eq!(a.antipode(&a.u(&[2, -3])), a.u(&[-2, 3]));
        assert!(hopf_eval(&a, HopfExpr::Star, &[Elem::basis(Label::new(&[1]))]).is_err());
    }

    #[test]
    fn fun_s3_coproduct_has_six_terms() {
        let a = s3();
        for g in 0..6 {
            let d = a.coproduct_basis(&Label::new(&[g]));
            assert_eq!(d.len(), 6);
            for (k, _) in d.iter() {
                let (h, kk) = (k[0].0[0] as usize, k[1].0[0] as usize);
                assert_eq!(a.group.mul(h, kk), g as usize);
            }
        }
        assert_eq!(a.legs(&Label::new(&[0]), 3).len(), 36);
    }

    #[test]
    fn axioms_hold() {
        let spec = SampleSpec::new(3, 100, 1);
        let r = verify_hopf_axioms(&GroupAlgebra::new(AbelianGroup::lattice(2)), &spec);
        assert!(r.all_pass(), "{}", r.to_text());
        let r = verify_hopf_axioms(&s3(), &spec);
        assert!(r.all_pass(), "{}", r.to_text());
        let r = verify_hopf_axioms(&GroupAlgebra::new(AbelianGroup::finite(&[5, 5])), &spec);
        assert!(r.all_pass(), "{}", r.to_text());
    }

    #[test]
    fn corrupted_antipode_is_caught() {
        let inner: HopfRef = Arc::new(s3());
        // a 3-cycle is not an involution, so S(delta_g) = delta_g is wrong there
        let g = (0..6).find(|&g| s3().group.element_order(g) == 3).unwrap();
        let l = Label::new(&[g as i64]);
        let patched = PatchedAntipode { inner, patch: BTreeMap::from([(l.clone(), Elem::basis(l))]) };
        let r = verify_hopf_axioms(&patched, &SampleSpec::default());
        assert!(r.failed("hopf.antipode"));
        assert!(r.get("hopf.antipode").unwrap().witness.as_ref().unwrap().contains("delta"));
        assert!(r.passed("hopf.coassociativity"));
    }
}
