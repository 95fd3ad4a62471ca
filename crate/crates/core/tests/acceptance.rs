//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use twistgeom::calculus::fundamental_form;
use twistgeom::cocycle::compare_hopf_tables;
use twistgeom::hopf::Hopf;
use twistgeom::linear::{Elem, Label};
use twistgeom::models::{EmitLevel, Fault, ModelBundle, ModelSpec, Pairing, Suite};
use twistgeom::relhopf::{embed, CoAlgebra};
use twistgeom::report::{SampleSpec, VerificationReport};
use twistgeom::scalars::Cyc;

type Outcome = Result<String, String>;

fn default_spec() -> SampleSpec {
    SampleSpec::new(4, 100, 42)
}

fn torus(p: i64, q: i64) -> ModelBundle {
    ModelBundle::assemble(&ModelSpec::NcTorus { p, q }, None, &default_spec()).expect("nc_torus assembles")
}

fn u(m: &[i64]) -> Label {
    Label::new(m)
}

/// Every id in `ids` is present and passes; the report as a whole passes.
fn require(r: &VerificationReport, ids: &[&str]) -> Result<(), String> {
    for id in ids {
        match r.get(id) {
            None => return Err(format!("missing check {id}")),
            Some(e) if !r.passed(id) => return Err(format!("{id} failed: {}", e.witness.clone().unwrap_or_default())),
            Some(_) => {}
        }
    }
    if let Some(e) = r.failures().first() {
        return Err(format!("{} failed: {}", e.check_id, e.witness.clone().unwrap_or_default()));
    }
    Ok(())
}

fn within(label: &str, took: Duration, limit: Duration) -> Result<(), String> {
    if took > limit {
        Err(format!("{label} took {:.1}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    } else {
        Ok(())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let spec = default_spec();
    let b = ModelBundle::assemble(&ModelSpec::FiniteBicharacter { n: 5, pairing: Pairing::Skew }, None, &spec)
        .map_err(|e| e.to_string())?;
    let r = b.run(Suite::Cocycle, &spec);
    let ids = [
        "cocycle.equation",
        "cocycle.equation_bar",
        "cocycle.mixed_left",
        "cocycle.mixed_right",
        "cocycle.group_crosscheck",
        "cocycle.unital",
        "cocycle.unitary",
        "cocycle.unitary_bar",
        "cocycle.inverse",
        "cocycle.u_inverse",
        "cocycle.v_inverse",
        "cocycle.vbar_conjugate",
        "cocycle.u_exchange",
        "cocycle.vbar_exchange",
        "cocycle.gamma_vbar_exchange",
    ];
    require(&r, &ids)?;
    for id in ids {
        let e = r.get(id).unwrap();
        if !e.sample_spec.contains("exhaustive") {
            return Err(format!("{id} was sampled, not exhaustive: {}", e.sample_spec));
        }
    }
    for id in ["cocycle.equation", "cocycle.equation_bar", "cocycle.mixed_left", "cocycle.mixed_right"] {
        if !r.get(id).unwrap().sample_spec.ends_with("n=15625") {
            return Err(format!("{id} did not sweep all 5^6 triples"));
        }
    }
    // independent oracle: gamma(u(a,b), u(c,d)) = zeta_5^(ad - bc)
    let labels: Vec<[i64; 2]> = (0..5).flat_map(|a| (0..5).map(move |b| [a, b])).collect();
    for m in &labels {
        for n in &labels {
            let want = Cyc::root(5, m[0] * n[1] - m[1] * n[0]).unwrap();
            let got = b.cocycle.gamma.eval(&u(m), &u(n));
            if got != want {
                return Err(format!("gamma({m:?}, {n:?}) = {got}, expected {want}"));
            }
        }
    }
    // the exponent ad - bc is an additive group 2-cocycle mod 5
    let e = |m: &[i64; 2], n: &[i64; 2]| m[0] * n[1] - m[1] * n[0];
    let add = |m: &[i64; 2], n: &[i64; 2]| [(m[0] + n[0]) % 5, (m[1] + n[1]) % 5];
    for g in &labels {
        for h in &labels {
            for k in &labels {
                let lhs = e(g, h) + e(&add(g, h), k);
                let rhs = e(h, k) + e(g, &add(h, k));
                if (lhs - rhs).rem_euclid(5) != 0 {
                    return Err(format!("exponent cocycle equation fails at {g:?}, {h:?}, {k:?}"));
                }
            }
        }
    }
    let took = start.elapsed();
    within("cocycle suite", took, Duration::from_secs(60))?;
    Ok(format!("{} checks exhaustive, oracle on 625 pairs, {:.1}s", r.entries.len(), took.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let b = torus(1, 3);
    let t = b.twist.as_ref().map_err(|e| e.clone())?;
    let spec = SampleSpec::new(6, 100, 42);
    let r = b.run(Suite::Hopf, &spec);
    require(&r, &["hopf.twisted.cocommutative_collapse"])?;
    let labels = b.hopf.box_labels(6);
    compare_hopf_tables(&*t.a_gamma, &*b.hopf, &labels, true)?;
    // oracle: u_m u_n = u_(m+n), u_m* = u_(-m)
    for m in &labels {
        let star = t.a_gamma.star(&Elem::basis(m.clone()));
        if star != Elem::basis(u(&[-m.0[0], -m.0[1]])) {
            return Err(format!("star of u{m} is not u(-m)"));
        }
        for n in &labels {
            let want = Elem::basis(u(&[m.0[0] + n.0[0], m.0[1] + n.0[1]]));
            if t.a_gamma.mul_basis(m, n) != want {
                return Err(format!("u{m} u{n} is not u(m+n) in the twisted Hopf algebra"));
            }
        }
    }
    Ok(format!("{} labels, {} products", labels.len(), labels.len() * labels.len()))
}

fn criterion_3() -> Outcome {
    let b = torus(1, 3);
    let spec = default_spec();
    let emit = |l| b.emit(l, &spec).map(|v| serde_json::to_string_pretty(&v).unwrap());
    let (base, twisted, round) = (emit(EmitLevel::Base)?, emit(EmitLevel::Twisted)?, emit(EmitLevel::RoundTrip)?);
    if base != round {
        return Err("round-trip tables differ from base tables".into());
    }
    if base == twisted {
        return Err("twisted tables equal base tables; the twist did nothing".into());
    }
    let v: serde_json::Value = serde_json::from_str(&round).unwrap();
    for key in ["product", "star", "wedge", "d", "g", "nabla", "hermitian"] {
        if v["tables"].get(key).is_none() {
            return Err(format!("table '{key}' missing"));
        }
    }
    Ok(format!("{} bytes identical", base.len()))
}

fn criterion_4() -> Outcome {
    let b = torus(1, 3);
    let spec = default_spec();
    let r = b.run(Suite::Hermitian, &spec);
    require(&r, &["hermitian.twisted.coherence", "hermitian.twisted.pairing_relation"])?;
    let e = r.get("hermitian.twisted.pairing_relation").unwrap();
    let n: usize = e
        .sample_spec
        .split_whitespace()
        .find_map(|w| w.strip_prefix("n=").and_then(|x| x.parse().ok()))
        .ok_or("pairing relation reports no sample count")?;
    if n < 100 {
        return Err(format!("pairing relation checked on {n} pairs"));
    }
    let t = b.twisted.as_ref().ok_or("no twisted geometry")?;
    let wp = t.cs.vector(1, 0);
    let got = t.herm.pair(&wp, &t.herm.conj.conj_in(&wp));
    let want = t.alg.unit().scale(&Cyc::from_int(-2));
    if got != want {
        return Err("twisted <w+, bar w+> is not -2".into());
    }
    Ok(format!("coherence on basis, relation on {n} pairs"))
}

fn criterion_5() -> Outcome {
    let b = torus(1, 3);
    let r = b.run(Suite::Metric, &default_spec());
    require(&r, &["metric.twisted.lc.torsion_free", "metric.twisted.lc.metric_compatible", "metric.twisted.lc.leibniz"])?;
    let t = b.twisted.as_ref().ok_or("no twisted geometry")?;
    if !t.lc.table().iter().all(|x| x.is_zero()) {
        return Err("twisted Levi-Civita connection is not zero on the basis".into());
    }
    Ok("torsion free and metric compatible".into())
}

fn criterion_6() -> Outcome {
    let b = torus(1, 3);
    let r = b.run(Suite::Chern, &default_spec());
    let mut ids = vec!["chern.solve".to_string()];
    for part in ["chern10", "chern01"] {
        ids.push(format!("chern.base.{part}.box_independent"));
        ids.push(format!("chern.twisted.{part}.is_twist"));
        for lvl in ["base", "twisted"] {
            ids.push(format!("chern.{lvl}.{part}.compatible"));
            ids.push(format!("chern.{lvl}.{part}.dbar_part"));
        }
    }
    require(&r, &ids.iter().map(String::as_str).collect::<Vec<_>>())?;
    Ok(format!("{} checks", r.entries.len()))
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    for q in [3, 5] {
        let start = Instant::now();
        let b = torus(1, q);
        let r = b.run(Suite::Main, &default_spec());
        require(&r, &["main.base.hypothesis", "main.twisted.lc_is_twist", "main.twisted.decomposition"])
            .map_err(|e| format!("nc_torus(1,{q}): {e}"))?;
        let took = start.elapsed();
        within(&format!("nc_torus(1,{q})"), took, Duration::from_secs(120))?;
        notes.push(format!("nc_torus(1,{q}) {:.1}s", took.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn criterion_8() -> Outcome {
    let spec = default_spec();
    for m in [ModelSpec::NcTorus { p: 1, q: 3 }, ModelSpec::FiniteBicharacter { n: 3, pairing: Pairing::Upper }] {
        let b = ModelBundle::assemble(&m, None, &spec).map_err(|e| e.to_string())?;
        let r = b.run(Suite::Barfunctor, &spec);
        require(&r, &["barfunctor.B_B.hexagon", "barfunctor.B_B.bb", "barfunctor.B_B.twisted_star", "barfunctor.B_B.n_inverse"])
            .map_err(|e| format!("{m}: {e}"))?;
    }
    Ok("nc_torus(1,3) and finite_bicharacter(3,upper)".into())
}

fn criterion_9() -> Outcome {
    let b = torus(1, 3);
    let r = b.run(Suite::Calculus, &default_spec());
    let mut ids = Vec::new();
    for lvl in ["base", "twisted"] {
        for k in ["central", "real", "coinvariant", "closed", "lefschetz"] {
            ids.push(format!("calculus.{lvl}.kahler.{k}"));
        }
    }
    require(&r, &ids.iter().map(String::as_str).collect::<Vec<_>>())?;
    let (g, t) = (b.geometry.as_ref().unwrap(), b.twisted.as_ref().unwrap());
    let kappa = fundamental_form(&g.cs, &g.metric.g);
    if kappa != embed(&g.calc.alg.unit(), 0).scale(&Cyc::from_int(-2)) {
        return Err("kappa is not -2 w1^w2".into());
    }
    let tkappa = fundamental_form(&t.cs, &t.metric.g);
    if tkappa != embed(&t.alg.unit(), 0).scale(&Cyc::from_int(-2)) {
        return Err("twisted kappa is not -2 w1^w2".into());
    }
    Ok("kappa = -2 w1^w2 at both levels".into())
}

fn criterion_10() -> Outcome {
    // full `all` runs per fault on a smaller box keep the run short
    let spec = SampleSpec::new(2, 24, 42);
    for f in Fault::ALL {
        let model = f.model();
        let clean = ModelBundle::assemble(&model, None, &spec).map_err(|e| e.to_string())?;
        if !clean.run(f.target(), &spec).all_pass() {
            return Err(format!("{}: unfaulted {} suite fails on {model}", f.name(), f.target().name()));
        }
        let bad = ModelBundle::assemble(&model, Some(f), &spec).map_err(|e| e.to_string())?;
        let r = bad.run(f.target(), &spec);
        let witnessed = r.failures().iter().any(|e| e.witness.as_deref().is_some_and(|w| !w.is_empty()));
        if !witnessed {
            return Err(format!("{}: {} suite shows no failure with a witness", f.name(), f.target().name()));
        }
        if bad.run(Suite::All, &spec).all_pass() {
            return Err(format!("{}: passes all", f.name()));
        }
    }
    Ok(format!("{} faults caught", Fault::ALL.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cocycle identities on C[Z5 x Z5], exhaustive", criterion_1),
        ("cocommutative collapse on box 6", criterion_2),
        ("twist then untwist reproduces every table", criterion_3),
        ("Hermitian coherence and pairing relation", criterion_4),
        ("twisted Levi-Civita connection", criterion_5),
        ("Chern connections, base and twisted", criterion_6),
        ("Levi-Civita = Chern (1,0) + Chern (0,1)", criterion_7),
        ("bar functor coherence", criterion_8),
        ("Kahler form, base and twisted", criterion_9),
        ("fault sensitivity", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS criterion {:>2}: {name} ({note}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {:>2}: {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
