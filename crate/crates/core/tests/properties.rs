use std::sync::OnceLock;

use proptest::prelude::*;

use twistgeom::calculus::Calc;
use twistgeom::cocycle::{compare_hopf_tables, theta_2d, theta_cocycle};
use twistgeom::hopf::{split_leg, contract_leg, tensor_flip, FiniteGroup, FunAlgebra, Hopf};
use twistgeom::linalg::{self, Row};
use twistgeom::linear::{Elem, Label, Tensor};
use twistgeom::models::{EmitLevel, ModelBundle, ModelSpec, Pairing, Suite};
use twistgeom::relhopf::{embed, Twist};
use twistgeom::report::{SampleSpec, VerificationReport};
use twistgeom::scalars::Cyc;

fn cyc() -> impl Strategy<Value = Cyc> {
    // orders divide 120 so sums and products stay in a modest field
    let order = prop::sample::select(vec![1u32, 2, 3, 4, 5, 6, 8, 12]);
    let term = (-6i64..=6, 1i64..=4, order, 0i64..12)
        .prop_map(|(n, d, order, k)| &Cyc::frac(n, d) * &Cyc::root(order, k).unwrap());
    prop::collection::vec(term, 1..4).prop_map(|ts| ts.into_iter().fold(Cyc::zero(), |a, t| a + t))
}

fn label2(r: i64) -> impl Strategy<Value = Label> {
    (-r..=r, -r..=r).prop_map(|(a, b)| Label::new(&[a, b]))
}

fn add(a: &Label, b: &Label) -> Label {
    Label::new(&[a.0[0] + b.0[0], a.0[1] + b.0[1]])
}

fn small_spec() -> SampleSpec {
    SampleSpec::new(2, 12, 42)
}

fn torus_bundle() -> &'static ModelBundle {
    static B: OnceLock<ModelBundle> = OnceLock::new();
    B.get_or_init(|| ModelBundle::assemble(&ModelSpec::NcTorus { p: 1, q: 3 }, None, &small_spec()).unwrap())
}

fn d4() -> &'static FunAlgebra {
    static A: OnceLock<FunAlgebra> = OnceLock::new();
    A.get_or_init(|| FunAlgebra::new(FiniteGroup::dihedral(4)))
}

fn d4_elem() -> impl Strategy<Value = Elem> {
    prop::collection::vec((0usize..8, -3i64..=3), 1..5).prop_map(|terms| {
        let labels = d4().box_labels(0);
        let mut x = Elem::zero();
        for (i, c) in terms {
            x.add_term(labels[i].clone(), Cyc::from_int(c));
        }
        x
    })
}

fn strip(mut r: VerificationReport) -> Vec<(String, String, Option<String>, String)> {
    r.entries.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    r.entries.into_iter().map(|e| (e.check_id, e.status.to_string(), e.witness, e.sample_spec)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn conjugation_is_an_involutive_homomorphism(a in cyc(), b in cyc()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
    }

    #[test]
    fn embedding_commutes_with_arithmetic(a in cyc(), b in cyc(), f in 1u32..=3) {
        let m = num_integer::lcm(a.order(), b.order()) * f;
        let (ea, eb) = (a.embed(m), b.embed(m));
        prop_assert_eq!(ea.order(), m);
        prop_assert_eq!(&ea, &a);
        prop_assert_eq!(&ea * &eb, &a * &b);
        prop_assert_eq!(&ea + &eb, &a + &b);
        prop_assert_eq!((&a * &b).embed(m * 2), &ea * &eb);
    }

    #[test]
    fn display_round_trips(a in cyc()) {
        prop_assert_eq!(a.to_string().parse::<Cyc>().unwrap(), a);
    }

    #[test]
    fn d4_coproduct_laws(x in d4_elem()) {
        let h = d4();
        let dx = h.coproduct(&x);
        prop_assert_eq!(split_leg(h, &dx, 0), split_leg(h, &dx, 1));
        prop_assert_eq!(split_leg(h, &dx, 0), h.iterated_coproduct(&x, 2));
        let back: Tensor = x.map_linear(|l| Tensor::basis(vec![l.clone()]));
        prop_assert_eq!(contract_leg(&dx, 0, |l| h.counit_basis(l)), back.clone());
        prop_assert_eq!(contract_leg(&dx, 1, |l| h.counit_basis(l)), back);
    }

    #[test]
    fn torus_coproduct_is_cocommutative(m in label2(5), c in -4i64..=4) {
        let h = &torus_bundle().hopf;
        let x = Elem::single(m, Cyc::from_int(c));
        let dx = h.coproduct(&x);
        prop_assert_eq!(tensor_flip(&dx), dx);
    }

    #[test]
    fn theta_cocycle_identities(p in -4i64..=4, q in 1i64..=7, g in label2(6), h in label2(6), k in label2(6)) {
        let d = theta_cocycle(theta_2d(p, q), q as u32).unwrap();
        let e = |l: &Label| Elem::basis(l.clone());
        let lhs = &d.g(&e(&g), &e(&h)) * &d.g(&e(&add(&g, &h)), &e(&k));
        let rhs = &d.g(&e(&h), &e(&k)) * &d.g(&e(&g), &e(&add(&h, &k)));
        prop_assert_eq!(lhs, rhs);
        prop_assert!((&d.g(&e(&g), &e(&h)) * &d.gb(&e(&g), &e(&h))).is_one());
        prop_assert!((&d.u(&g) * &d.ubar(&g)).is_one());
        prop_assert!((&d.v(&g) * &d.vbar(&g)).is_one());
        prop_assert_eq!(d.g(&e(&g), &e(&h)).conj(), d.g(&e(&h), &e(&g)));
    }

    #[test]
    fn linear_solve_recovers_a_unique_solution(
        entries in prop::collection::vec(-5i64..=5, 9),
        x in prop::collection::vec(cyc(), 3),
    ) {
        let rows: Vec<Row> = (0..3)
            .map(|i| (0..3).filter(|&j| entries[3 * i + j] != 0).map(|j| (j, Cyc::from_int(entries[3 * i + j]))).collect())
            .collect();
        let b = linalg::apply(&rows, &x);
        let sol = linalg::solve(&rows, &b, 3).unwrap();
        prop_assert_eq!(linalg::apply(&rows, &sol.particular), b);
        if sol.is_unique() {
            prop_assert_eq!(sol.particular, x);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twisted_calculus_identities(m in label2(3), n in label2(3), k in label2(3), a in -3i64..=3, b in -3i64..=3) {
        let t = torus_bundle().twisted.as_ref().unwrap();
        let c: &dyn Calc = &*t.tcalc;
        let f = embed(&Elem::basis(m.clone()), 0);
        let g = embed(&Elem::basis(n.clone()), 0);
        let alpha = embed(&Elem::single(k.clone(), Cyc::from_int(a)), 0)
            .add(&embed(&Elem::single(m.clone(), Cyc::from_int(b)), 1));
        let beta = embed(&Elem::basis(n.clone()), 1).add(&embed(&Elem::basis(k.clone()), 0));
        // d^2 = 0 and the Leibniz rule on functions
        prop_assert!(c.d(1, &c.d(0, &f)).is_zero());
        let fg = c.wedge(0, &f, 0, &g);
        prop_assert_eq!(c.d(0, &fg), c.wedge(1, &c.d(0, &f), 0, &g).add(&c.wedge(0, &f, 1, &c.d(0, &g))));
        // wedge associativity in every placement of the function
        prop_assert_eq!(c.wedge(1, &c.wedge(0, &f, 1, &alpha), 1, &beta), c.wedge(0, &f, 2, &c.wedge(1, &alpha, 1, &beta)));
        prop_assert_eq!(c.wedge(1, &c.wedge(1, &alpha, 0, &f), 1, &beta), c.wedge(1, &alpha, 1, &c.wedge(0, &f, 1, &beta)));
        prop_assert_eq!(c.wedge(2, &c.wedge(1, &alpha, 1, &beta), 0, &f), c.wedge(1, &alpha, 1, &c.wedge(1, &beta, 0, &f)));
        // d is a degree-one derivation on f ^ alpha
        let lhs = c.d(1, &c.wedge(0, &f, 1, &alpha));
        let rhs = c.wedge(1, &c.d(0, &f), 1, &alpha).add(&c.wedge(0, &f, 2, &c.d(1, &alpha)));
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn twisting_back_restores_the_hopf_tables(p in 0i64..=3, q in 2i64..=6) {
        let spec = SampleSpec::new(2, 20, 1);
        let mut d = theta_cocycle(theta_2d(p, q), q as u32).unwrap();
        prop_assert!(d.certify(&spec).all_pass());
        let t = Twist::new(&d).unwrap();
        let (back, rep) = t.reverse(&spec).unwrap();
        prop_assert!(rep.all_pass(), "{}", rep.to_text());
        let labels = d.hopf.box_labels(3);
        prop_assert_eq!(compare_hopf_tables(&*back.a_gamma, &*d.hopf, &labels, true), Ok(()));
    }

    #[test]
    fn reports_and_bundles_are_deterministic(seed in any::<u64>()) {
        let spec = SampleSpec::new(2, 10, seed);
        let m = ModelSpec::FiniteBicharacter { n: 3, pairing: Pairing::Upper };
        let a = ModelBundle::assemble(&m, None, &spec).unwrap();
        let b = ModelBundle::assemble(&m, None, &spec).unwrap();
        prop_assert_eq!(strip(a.certification.clone()), strip(b.certification.clone()));
        prop_assert_eq!(strip(a.run(Suite::Barfunctor, &spec)), strip(b.run(Suite::Barfunctor, &spec)));
        let (ta, tb) = (torus_bundle(), ModelBundle::assemble(&ModelSpec::NcTorus { p: 1, q: 3 }, None, &small_spec()).unwrap());
        let (ea, eb) = (ta.emit(EmitLevel::Twisted, &spec).unwrap(), tb.emit(EmitLevel::Twisted, &spec).unwrap());
        prop_assert_eq!(serde_json::to_string(&ea).unwrap(), serde_json::to_string(&eb).unwrap());
    }

    #[test]
    fn untwisted_torus_is_the_classical_torus(q in 1i64..=9) {
        let spec = small_spec();
        let c = ModelBundle::assemble(&ModelSpec::ClassicalTorus, None, &spec).unwrap();
        let z = ModelBundle::assemble(&ModelSpec::NcTorus { p: 0, q }, None, &spec).unwrap();
        for level in [EmitLevel::Base, EmitLevel::Twisted] {
            prop_assert_eq!(&c.emit(level, &spec).unwrap()["tables"], &z.emit(level, &spec).unwrap()["tables"]);
        }
    }
}

#[test]
fn all_is_the_disjoint_union_of_the_suites() {
    let spec = small_spec();
    for m in [ModelSpec::NcTorus { p: 1, q: 3 }, ModelSpec::FunGroup { group: "s3".into() }] {
        let b = ModelBundle::assemble(&m, None, &spec).unwrap();
        let mut parts: Vec<String> = Vec::new();
        for s in Suite::PARTS {
            parts.extend(b.run(s, &spec).entries.into_iter().map(|e| e.check_id));
        }
        let n = parts.len();
        parts.sort();
        parts.dedup();
        assert_eq!(parts.len(), n, "suites overlap on {m}");
        let all: Vec<String> = b.run(Suite::All, &spec).entries.into_iter().map(|e| e.check_id).collect();
        assert_eq!(all, parts, "{m}");
    }
}

#[test]
fn pairing_parameter_round_trips() {
    for p in [Pairing::Skew, Pairing::Upper] {
        assert_eq!(p.to_string().parse::<Pairing>().unwrap(), p);
    }
}
