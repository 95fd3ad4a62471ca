//! Canned model bundles, the named verification suites, structure tables and
//! single-entry fault injection.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use serde_json::{json, Map, Value};

use crate::calculus::{
    factorization_inverse, fundamental_form, holomorphic_from_factorizable, kahler_checks, lattice_calculus,
    torus_complex_structure, twist_calculus, twist_holomorphic, verify_calculus, verify_complex_structure,
    verify_curvature_transport, verify_factorization, verify_holomorphic, verify_twisted_projections, BasisCalculus,
    Calc, CalcRef, ComplexStructure, HoloModule, LatticeFaults, TwistedCalculus, TwistedHolo,
};
use crate::cocycle::{bicharacter_cocycle, compare_hopf_tables, subgroup_twist, theta_2d, theta_cocycle, Bicharacter, CocycleData};
use crate::geometry::{
    chern_solve, compare_connections, compare_hermitian, direct_sum, flip_table, hermitian_from_real, levi_civita_verify,
    split_hermitian, twist_connection, twist_hermitian, twist_metric, verify_chern, verify_conj_twist,
    verify_dagger_transport, verify_diamond, verify_hermitian, verify_metric, verify_pairing_relation,
    verify_real_hermitian, ChernSolution, Connection, Hermitian, Metric,
};
use crate::hopf::{is_cocommutative_on, verify_hopf_axioms, AbelianGroup, FiniteGroup, FunAlgebra, GroupAlgebra, HopfRef, PatchedAntipode};
use crate::linalg::{self, Row};
use crate::linear::{Elem, Label};
use crate::relhopf::{
    basis_elem, embed, show_elem, show_mod, twist_comodule_algebra, twist_module, verify_bar_functor,
    verify_comodule_algebra, verify_hom_coaction, verify_module, verify_morphism, AlgRef, BarOptions,
    FreeModule, HomTwist, ModElem, ModRef, Module, Regular, Twist, TwistedAlgebra, TwistedPair,
};
use crate::report::{SampleSpec, VerificationReport};
use crate::scalars::{Cyc, Q};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    Params(String),
    #[error("{model}: {failures} checks failed during construction")]
    Verification { model: String, failures: usize, report: VerificationReport },
}

/// Bicharacter shape for [`ModelSpec::FiniteBicharacter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// `zeta_n^(ad - bc)`.
    Skew,
    /// `zeta_n^(ad)`, not skew; its `Vbar` is nontrivial.
    Upper,
}

impl FromStr for Pairing {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skew" => Ok(Pairing::Skew),
            "upper" => Ok(Pairing::Upper),
            _ => Err(ModelError::Params(format!("unknown pairing '{s}' (expected skew or upper)"))),
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pairing::Skew => "skew",
            Pairing::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    ClassicalTorus,
    NcTorus { p: i64, q: i64 },
    FiniteBicharacter { n: i64, pairing: Pairing },
    FunGroup { group: String },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::ClassicalTorus => "classical_torus",
            ModelSpec::NcTorus { .. } => "nc_torus",
            ModelSpec::FiniteBicharacter { .. } => "finite_bicharacter",
            ModelSpec::FunGroup { .. } => "fun_group",
        }
    }

    pub fn params(&self) -> Value {
        match self {
            ModelSpec::ClassicalTorus => json!({}),
            ModelSpec::NcTorus { p, q } => json!({ "p": p, "q": q }),
            ModelSpec::FiniteBicharacter { n, pairing } => json!({ "n": n, "pairing": pairing.to_string() }),
            ModelSpec::FunGroup { group } => json!({ "group": group }),
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, ModelSpec::ClassicalTorus | ModelSpec::NcTorus { .. })
    }

    /// Order of the smallest cyclotomic field holding every scalar of the model.
    pub fn field_order(&self) -> u32 {
        match self {
            ModelSpec::ClassicalTorus => 4,
            ModelSpec::NcTorus { p, q } => {
                let den = q / p.gcd(q);
                4i64.lcm(&den) as u32
            }
            ModelSpec::FiniteBicharacter { n, .. } => *n as u32,
            ModelSpec::FunGroup { group } => match group.as_str() {
                "s3" => 3,
                _ => 2,
            },
        }
    }

    /// Builds a model from its name and optional parameters.
    pub fn parse(name: &str, p: Option<i64>, q: Option<i64>, n: Option<i64>, pairing: Option<&str>, group: Option<&str>) -> Result<Self, ModelError> {
        let m = match name {
            "classical_torus" => ModelSpec::ClassicalTorus,
            "nc_torus" => ModelSpec::NcTorus { p: p.unwrap_or(1), q: q.unwrap_or(3) },
            "finite_bicharacter" => ModelSpec::FiniteBicharacter {
                n: n.unwrap_or(5),
                pairing: pairing.map(str::parse).transpose()?.unwrap_or(Pairing::Skew),
            },
            "fun_group" => ModelSpec::FunGroup { group: group.unwrap_or("d4").to_string() },
            _ => return Err(ModelError::Params(format!("unknown model '{name}'"))),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ModelSpec::NcTorus { q, .. } if *q <= 0 => Err(ModelError::Params(format!("q must be positive, got {q}"))),
            ModelSpec::FiniteBicharacter { n, .. } if !(2..=12).contains(n) => {
                Err(ModelError::Params(format!("n must lie in 2..=12, got {n}")))
            }
            ModelSpec::FunGroup { group } if group != "d4" && group != "s3" => {
                Err(ModelError::Params(format!("unknown group '{group}' (expected d4 or s3)")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::ClassicalTorus => write!(f, "classical_torus"),
            ModelSpec::NcTorus { p, q } => write!(f, "nc_torus({p},{q})"),
            ModelSpec::FiniteBicharacter { n, pairing } => write!(f, "finite_bicharacter({n},{pairing})"),
            ModelSpec::FunGroup { group } => write!(f, "fun_group({group})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Hopf,
    Cocycle,
    Barfunctor,
    Calculus,
    Metric,
    Hermitian,
    Chern,
    Main,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 8] = [
        Suite::Hopf,
        Suite::Cocycle,
        Suite::Barfunctor,
        Suite::Calculus,
        Suite::Metric,
        Suite::Hermitian,
        Suite::Chern,
        Suite::Main,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Hopf => "hopf",
            Suite::Cocycle => "cocycle",
            Suite::Barfunctor => "barfunctor",
            Suite::Calculus => "calculus",
            Suite::Metric => "metric",
            Suite::Hermitian => "hermitian",
            Suite::Chern => "chern",
            Suite::Main => "main",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::PARTS
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| ModelError::Params(format!("unknown suite '{s}'")))
    }
}

/// Documented single-entry perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fault {
    /// `gamma(x, y)` multiplied by `zeta_3`.
    CocycleValue,
    /// `gammabar(x, y)` multiplied by `zeta_3`.
    InverseValue,
    /// `S(x)` doubled.
    Antipode,
    /// `sigma(w2 (x) w1)` multiplied by `zeta_3`.
    Sigma,
    /// `(w1, w2) = 1`.
    Pairing,
    /// `N` replaced by the identity.
    IdentityN,
    /// `w2 wedge w1 = + w1 wedge w2`.
    SymmetricWedge,
    /// `nabla w1 = w1 (x) w2`.
    Connection,
    /// `w1* = + w1`.
    FormStar,
    /// `H` multiplied by `i`.
    HermitianScale,
}

impl Fault {
    pub const ALL: [Fault; 10] = [
        Fault::CocycleValue,
        Fault::InverseValue,
        Fault::Antipode,
        Fault::Sigma,
        Fault::Pairing,
        Fault::IdentityN,
        Fault::SymmetricWedge,
        Fault::Connection,
        Fault::FormStar,
        Fault::HermitianScale,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Fault::CocycleValue => "cocycle_value",
            Fault::InverseValue => "inverse_value",
            Fault::Antipode => "antipode",
            Fault::Sigma => "sigma",
            Fault::Pairing => "pairing",
            Fault::IdentityN => "identity_n",
            Fault::SymmetricWedge => "symmetric_wedge",
            Fault::Connection => "connection",
            Fault::FormStar => "form_star",
            Fault::HermitianScale => "hermitian_scale",
        }
    }

    /// The suite expected to catch the fault.
    pub fn target(&self) -> Suite {
        match self {
            Fault::CocycleValue | Fault::InverseValue => Suite::Cocycle,
            Fault::Antipode => Suite::Hopf,
            Fault::Sigma | Fault::Pairing | Fault::Connection => Suite::Metric,
            Fault::IdentityN => Suite::Barfunctor,
            Fault::SymmetricWedge | Fault::FormStar => Suite::Calculus,
            Fault::HermitianScale => Suite::Hermitian,
        }
    }

    /// The model on which the fault is observable.
    pub fn model(&self) -> ModelSpec {
        match self {
            // N is the identity on the torus, where Vbar is trivial
            Fault::IdentityN => ModelSpec::FiniteBicharacter { n: 3, pairing: Pairing::Upper },
            _ => ModelSpec::NcTorus { p: 1, q: 3 },
        }
    }

    fn needs_geometry(&self) -> bool {
        matches!(
            self,
            Fault::Sigma | Fault::Pairing | Fault::SymmetricWedge | Fault::Connection | Fault::FormStar | Fault::HermitianScale
        )
    }
}

impl FromStr for Fault {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fault::ALL
            .iter()
            .find(|f| f.name() == s)
            .copied()
            .ok_or_else(|| ModelError::Params(format!("unknown fault '{s}'")))
    }
}

/// Untwisted torus geometry: flat Kähler structure on the lattice calculus.
pub struct Geometry {
    pub calc: Arc<BasisCalculus>,
    pub cref: CalcRef,
    pub cs: ComplexStructure,
    pub metric: Metric,
    pub lc: Connection,
    pub herm: Hermitian,
}

pub struct TwistedGeometry {
    pub alg: Arc<TwistedAlgebra>,
    pub tcalc: Arc<TwistedCalculus>,
    pub cs: ComplexStructure,
    pub metric: Metric,
    pub pair: TwistedPair,
    pub lc: Connection,
    pub herm: Hermitian,
}

/// Chern connections of both summands of `Omega^1`, untwisted and twisted.
pub struct ChernData {
    pub hol10: HoloModule,
    pub hol01: HoloModule,
    pub h1: Hermitian,
    pub h2: Hermitian,
    pub ch10: ChernSolution,
    pub ch01: ChernSolution,
    pub th10: TwistedHolo,
    pub th01: TwistedHolo,
    pub h1g: Hermitian,
    pub h2g: Hermitian,
    pub chg10: ChernSolution,
    pub chg01: ChernSolution,
}

/// Structures at one twisting level, for table output.
pub struct Level {
    pub alg: AlgRef,
    pub calc: Option<CalcRef>,
    pub metric: Option<Metric>,
    pub lc: Option<Connection>,
    pub herm: Option<Hermitian>,
}

/// Which structures [`ModelBundle::emit`] writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitLevel {
    Base,
    Twisted,
    /// Twisted by `gamma`, then by `gammabar`.
    RoundTrip,
}

impl FromStr for EmitLevel {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(EmitLevel::Base),
            "twisted" => Ok(EmitLevel::Twisted),
            "roundtrip" => Ok(EmitLevel::RoundTrip),
            _ => Err(ModelError::Params(format!("unknown level '{s}' (expected base, twisted or roundtrip)"))),
        }
    }
}

pub struct ModelBundle {
    pub model: ModelSpec,
    pub fault: Option<Fault>,
    pub sample: SampleSpec,
    pub hopf: HopfRef,
    /// Certified against `sample`.
    pub cocycle: CocycleData,
    pub certification: VerificationReport,
    pub alg: AlgRef,
    pub generators: Vec<(String, Label)>,
    pub twist: Result<Twist, String>,
    pub twisted_alg: Option<Arc<TwistedAlgebra>>,
    /// Modules used by the bar-functor suite.
    pub modules: Vec<(String, ModRef)>,
    pub geometry: Option<Geometry>,
    pub twisted: Option<TwistedGeometry>,
    chern: OnceLock<Result<ChernData, String>>,
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn u(m: &[i64]) -> Label {
    Label::new(m)
}

/// `C[Z_n x Z_n]` with bicharacter `exp(2 pi i m^T B n)`.
fn finite_cocycle(n: i64, pairing: Pairing) -> Result<CocycleData, ModelError> {
    let hopf: HopfRef = Arc::new(GroupAlgebra::new(AbelianGroup::finite(&[n, n])));
    let lower = match pairing {
        Pairing::Skew => q(-1, n),
        Pairing::Upper => q(0, 1),
    };
    let b = Bicharacter::new(vec![vec![q(0, 1), q(1, n)], vec![lower, q(0, 1)]], n as u32)
        .map_err(|e| ModelError::Params(e.to_string()))?;
    Ok(bicharacter_cocycle(hopf, b, "gamma"))
}

fn group_cocycle(group: &str) -> Result<CocycleData, ModelError> {
    let err = |e: crate::cocycle::CocycleError| ModelError::Params(e.to_string());
    match group {
        "d4" => {
            // Klein four-subgroup {e, r^2, s, r^2 s} with omega(s, t) = (-1)^(s_1 t_2)
            let fun = Arc::new(FunAlgebra::new(FiniteGroup::dihedral(4)));
            let gens = [fun.group.find("r2s0").unwrap(), fun.group.find("r0s1").unwrap()];
            let omega = Bicharacter::new(vec![vec![q(0, 1), q(1, 2)], vec![q(0, 1), q(0, 1)]], 2).map_err(err)?;
            subgroup_twist(fun, &gens, &omega).map_err(err)
        }
        "s3" => {
            let fun = Arc::new(FunAlgebra::new(FiniteGroup::symmetric(3)));
            let c = (0..6).find(|&g| fun.group.element_order(g) == 3).unwrap();
            let omega = Bicharacter::new(vec![vec![q(1, 3)]], 3).map_err(err)?;
            subgroup_twist(fun, &[c], &omega).map_err(err)
        }
        _ => Err(ModelError::Params(format!("unknown group '{group}'"))),
    }
}

fn torus_geometry(alg: AlgRef, fault: Option<Fault>) -> Result<Geometry, ModelError> {
    let faults = LatticeFaults {
        symmetric_wedge: fault == Some(Fault::SymmetricWedge),
        real_form_star: fault == Some(Fault::FormStar),
    };
    let calc = Arc::new(lattice_calculus(alg, 2, faults));
    let cref: CalcRef = calc.clone();
    let cs = torus_complex_structure(cref.clone()).map_err(|e| ModelError::Params(e.to_string()))?;
    let id = vec![vec![Cyc::one(), Cyc::zero()], vec![Cyc::zero(), Cyc::one()]];
    let mut metric = Metric::from_tables(cref.clone(), &id, &id);
    if fault == Some(Fault::Pairing) {
        metric = metric.with_pairing_entry(0, 1, Cyc::one());
    }
    let one = calc.alg.unit();
    let tens = crate::relhopf::tensor_module(cref.module(1), cref.module(1));
    let table = if fault == Some(Fault::Connection) {
        vec![embed(&one, tens.index(0, 1)), ModElem::zero()]
    } else {
        vec![ModElem::zero(); 2]
    };
    let mut sigma = flip_table(&cref);
    if fault == Some(Fault::Sigma) {
        let k = tens.index(1, 0);
        sigma[k] = sigma[k].scale(&Cyc::root(3, 1).unwrap());
    }
    let lc = Connection::from_table("LC", cref.clone(), cref.module(1), table).with_sigma_table(sigma);
    let mut herm = hermitian_from_real(&metric);
    if fault == Some(Fault::HermitianScale) {
        herm = herm.scaled(&Cyc::i());
    }
    Ok(Geometry { calc, cref, cs, metric, lc, herm })
}

fn twisted_geometry(g: &Geometry, talg: &Arc<TwistedAlgebra>) -> TwistedGeometry {
    let tcalc = twist_calculus(g.cref.clone(), talg);
    let cs = g.cs.on(tcalc.clone());
    let (metric, pair) = twist_metric(&g.metric, &tcalc);
    let lc = twist_connection(&g.lc, &tcalc);
    let herm = twist_hermitian(&g.herm, &tcalc);
    TwistedGeometry { alg: talg.clone(), tcalc, cs, metric, pair, lc, herm }
}

/// A rank-two module with weights `u(1,0)`, `u(-1,0)` and `e_0* = e_1`.
fn weighted_module(alg: &AlgRef, n: i64) -> ModRef {
    let one = alg.unit();
    Arc::new(FreeModule {
        name: "W".into(),
        alg: alg.clone(),
        names: vec!["e0".into(), "e1".into()],
        weights: vec![Elem::basis(u(&[1, 0])), Elem::basis(u(&[n - 1, 0]))],
        rho: None,
        stars: Some(vec![embed(&one, 1), embed(&one, 0)]),
    })
}

/// Rewrites `suite.rest` (or `rest`) as `suite.tag.rest`.
fn scoped(mut r: VerificationReport, suite: &str, tag: &str) -> VerificationReport {
    let pre = format!("{suite}.");
    for e in &mut r.entries {
        let rest = e.check_id.strip_prefix(&pre).unwrap_or(&e.check_id).to_string();
        e.check_id = format!("{suite}.{tag}.{rest}");
    }
    r
}

fn failed(r: &mut VerificationReport, id: &str, witness: &str) {
    r.check(id, "plumbing", "", || Err(witness.to_string()));
}

fn ensure(r: &mut VerificationReport, id: &str, anchor: &str, spec: &SampleSpec, f: impl FnOnce() -> Result<(), String>) {
    r.check(id, anchor, spec.to_string(), f);
}

impl ModelBundle {
    /// Builds the model and certifies its cocycle on `sample`; the remaining
    /// suites run on demand through [`ModelBundle::run`].
    pub fn assemble(model: &ModelSpec, fault: Option<Fault>, sample: &SampleSpec) -> Result<ModelBundle, ModelError> {
        model.validate()?;
        if let Some(f) = fault {
            if f.needs_geometry() && !model.is_torus() {
                return Err(ModelError::Params(format!("fault '{}' needs a torus model", f.name())));
            }
        }
        let (mut data, vars): (CocycleData, Vec<&str>) = match model {
            ModelSpec::ClassicalTorus => {
                let hopf: HopfRef = Arc::new(GroupAlgebra::new(AbelianGroup::lattice(2)));
                (CocycleData::trivial(hopf), vec!["x", "y"])
            }
            ModelSpec::NcTorus { p, q } => {
                let den = q / p.gcd(q);
                let d = theta_cocycle(theta_2d(*p, *q), den as u32).map_err(|e| ModelError::Params(e.to_string()))?;
                (d, vec!["x", "y"])
            }
            ModelSpec::FiniteBicharacter { n, pairing } => (finite_cocycle(*n, *pairing)?, vec!["a", "b"]),
            ModelSpec::FunGroup { group } => (group_cocycle(group)?, vec![]),
        };
        let gens: Vec<Label> = if vars.is_empty() { Vec::new() } else { vec![u(&[1, 0]), u(&[0, 1])] };
        match fault {
            Some(Fault::CocycleValue) if !gens.is_empty() => {
                data.gamma = data.gamma.scaled_at(&gens[0], &gens[1], Cyc::root(3, 1).unwrap());
            }
            Some(Fault::InverseValue) if !gens.is_empty() => {
                data.gamma_bar = data.gamma_bar.scaled_at(&gens[0], &gens[1], Cyc::root(3, 1).unwrap());
            }
            Some(Fault::Antipode) => {
                let first = gens.first().cloned().unwrap_or_else(|| data.hopf.box_labels(0)[1].clone());
                let mut patch = BTreeMap::new();
                patch.insert(first.clone(), data.hopf.antipode_basis(&first).scale(&Cyc::from_int(2)));
                data.hopf = Arc::new(PatchedAntipode { inner: data.hopf.clone(), patch });
            }
            Some(f @ (Fault::CocycleValue | Fault::InverseValue)) => {
                return Err(ModelError::Params(format!("fault '{}' needs a lattice or finite abelian model", f.name())));
            }
            _ => {}
        }
        let hopf = data.hopf.clone();
        let alg: AlgRef = if vars.is_empty() {
            Arc::new(Regular::new(hopf.clone()))
        } else {
            Arc::new(Regular::monomials(hopf.clone(), &vars))
        };
        let generators = if vars.is_empty() {
            hopf.box_labels(0).into_iter().map(|l| (hopf.label_name(&l), l)).collect()
        } else {
            vars.iter().map(|v| v.to_string()).zip(gens).collect()
        };
        let certification = data.certify(sample);
        let twist = if data.flags.cocycle_verified && !data.flags.unitary {
            Err("cocycle is not unitary on the sample box; twisted stars are unavailable".to_string())
        } else {
            Twist::new(&data).map_err(|e| format!("cocycle not certified: {e}"))
        };
        let twisted_alg = twist.as_ref().ok().map(|t| twist_comodule_algebra(alg.clone(), t));
        let mut modules: Vec<(String, ModRef)> = vec![("B".into(), Arc::new(FreeModule::algebra_itself(alg.clone())))];
        let (geometry, twisted) = if model.is_torus() {
            let g = torus_geometry(alg.clone(), fault)?;
            modules.push(("Omega1".into(), g.cref.module(1)));
            let t = twisted_alg.as_ref().map(|ta| twisted_geometry(&g, ta));
            (Some(g), t)
        } else {
            if let ModelSpec::FiniteBicharacter { n, .. } = model {
                modules.push(("W".into(), weighted_module(&alg, *n)));
            }
            (None, None)
        };
        Ok(ModelBundle {
            model: model.clone(),
            fault,
            sample: sample.clone(),
            hopf,
            cocycle: data,
            certification,
            alg,
            generators,
            twist,
            twisted_alg,
            modules,
            geometry,
            twisted,
            chern: OnceLock::new(),
        })
    }

    /// Assembles the model and runs every suite; any failure aborts with the report.
    pub fn build(model: &ModelSpec, sample: &SampleSpec) -> Result<ModelBundle, ModelError> {
        let b = ModelBundle::assemble(model, None, sample)?;
        let r = b.run(Suite::All, sample);
        if !r.all_pass() {
            return Err(ModelError::Verification { model: model.to_string(), failures: r.failures().len(), report: r });
        }
        Ok(b)
    }

    pub fn run(&self, suite: Suite, spec: &SampleSpec) -> VerificationReport {
        let r = match suite {
            Suite::All => {
                let mut r = VerificationReport::new();
                for s in Suite::PARTS {
                    r.extend(self.run(s, spec));
                }
                r
            }
            Suite::Hopf => self.suite_hopf(spec),
            Suite::Cocycle => self.suite_cocycle(spec),
            Suite::Barfunctor => self.suite_barfunctor(spec),
            Suite::Calculus => self.geometric(suite, |g, t| self.suite_calculus(g, t, spec)),
            Suite::Metric => self.geometric(suite, |g, t| self.suite_metric(g, t, spec)),
            Suite::Hermitian => self.geometric(suite, |g, t| self.suite_hermitian(g, t, spec)),
            Suite::Chern => self.geometric(suite, |g, t| self.suite_chern(g, t, spec)),
            Suite::Main => self.geometric(suite, |g, t| self.suite_main(g, t, spec)),
        };
        r.sorted()
    }

    fn geometric<F>(&self, suite: Suite, f: F) -> VerificationReport
    where
        F: FnOnce(&Geometry, &TwistedGeometry) -> VerificationReport,
    {
        let mut r = VerificationReport::new();
        let name = suite.name();
        match (&self.geometry, &self.twisted) {
            (None, _) => r.skip(&format!("{name}.model"), "plumbing", "no differential calculus on this model"),
            (Some(g), Some(t)) => r = f(g, t),
            (Some(_), None) => {
                let w = self.twist.as_ref().err().map(String::as_str).unwrap_or("twisted geometry missing");
                failed(&mut r, &format!("{name}.twist_available"), w);
            }
        }
        r
    }

    fn suite_hopf(&self, spec: &SampleSpec) -> VerificationReport {
        let mut r = scoped(verify_hopf_axioms(&*self.hopf, spec), "hopf", "base");
        match &self.twist {
            Ok(t) => {
                r.extend(scoped(verify_hopf_axioms(&*t.a_gamma, spec), "hopf", "twisted"));
                let labels = self.hopf.box_labels(spec.radius);
                let anchor = "cocommutative Hopf algebras are unchanged by twisting";
                if is_cocommutative_on(&*self.hopf, &labels) {
                    let desc = spec.describe(true, labels.len() * labels.len());
                    r.check("hopf.twisted.cocommutative_collapse", anchor, desc, || {
                        compare_hopf_tables(&*t.a_gamma, &*self.hopf, &labels, t.unitary())
                    });
                } else {
                    r.skip("hopf.twisted.cocommutative_collapse", anchor, "not cocommutative");
                }
            }
            Err(w) => failed(&mut r, "hopf.twisted.available", w),
        }
        r
    }

    fn suite_cocycle(&self, spec: &SampleSpec) -> VerificationReport {
        let mut r = if *spec == self.sample {
            self.certification.clone()
        } else {
            let mut d = self.cocycle.clone();
            d.certify(spec)
        };
        match &self.twist {
            Ok(t) => match t.reverse(spec) {
                Ok((_, rep)) => r.extend(scoped(rep, "cocycle", "reverse")),
                Err(e) => failed(&mut r, "cocycle.reverse.available", &e.to_string()),
            },
            Err(w) => failed(&mut r, "cocycle.twist_available", w),
        }
        r
    }

    fn suite_barfunctor(&self, spec: &SampleSpec) -> VerificationReport {
        let mut r = VerificationReport::new();
        let Some(bg) = &self.twisted_alg else {
            failed(&mut r, "barfunctor.twist_available", self.twist.as_ref().err().map(String::as_str).unwrap_or(""));
            return r;
        };
        r.extend(scoped(verify_comodule_algebra(&*self.alg, spec), "barfunctor", "base"));
        r.extend(scoped(verify_comodule_algebra(&**bg, spec), "barfunctor", "twisted"));
        let opts = BarOptions { identity_n: self.fault == Some(Fault::IdentityN) };
        let small = SampleSpec { samples: spec.samples.min(24), ..spec.clone() };
        for (i, (en, e)) in self.modules.iter().enumerate() {
            for (fname, f) in &self.modules[..=i] {
                let id = format!("barfunctor.{en}_{fname}");
                r.extend(verify_bar_functor(e.clone(), f.clone(), bg, &small, opts, &id));
            }
            let tw = twist_module(e.clone(), bg);
            r.extend(verify_module(&*tw, &small, &format!("barfunctor.{en}.twisted_module")));
            r.extend(verify_hom_coaction(e.clone(), &small, &format!("barfunctor.{en}.hom")));
            let h = HomTwist::new(e.clone(), bg);
            r.extend(verify_morphism(&h.frak_s(), &small, &format!("barfunctor.{en}.frak_s"), "Hom-space twist is a bimodule map"));
        }
        r
    }

    fn suite_calculus(&self, g: &Geometry, t: &TwistedGeometry, spec: &SampleSpec) -> VerificationReport {
        let mut r = scoped(verify_calculus(&*g.calc, spec, Some(&g.calc.generators)), "calculus", "base");
        r.extend(scoped(verify_complex_structure(&g.cs, spec), "calculus", "base"));
        r.extend(scoped(verify_calculus(&*t.tcalc, spec, None), "calculus", "twisted"));
        r.extend(scoped(verify_complex_structure(&t.cs, spec), "calculus", "twisted"));
        r.extend(scoped(verify_twisted_projections(&g.cs, &t.tcalc, spec), "calculus", "twisted"));
        for (tag, cs) in [("base", &g.cs), ("twisted", &t.cs)] {
            match factorization_inverse(cs) {
                Ok(f) => r.extend(scoped(verify_factorization(&f, spec), "calculus", tag)),
                Err(e) => failed(&mut r, &format!("calculus.{tag}.factorization.inverse"), &e.to_string()),
            }
        }
        for (name, cs) in [("holomorphic10", g.cs.clone()), ("holomorphic01", g.cs.opposite())] {
            match holomorphic_from_factorizable(&cs) {
                Ok((h, _)) => {
                    r.extend(scoped(verify_holomorphic(&h, spec, name), "calculus", "base"));
                    let th = twist_holomorphic(&h, &t.tcalc);
                    r.extend(scoped(verify_holomorphic(&th.holo, spec, name), "calculus", "twisted"));
                    r.extend(scoped(verify_curvature_transport(&h, &th, spec), "calculus", name));
                }
                Err(e) => failed(&mut r, &format!("calculus.base.{name}.construct"), &e.to_string()),
            }
        }
        let kappa = fundamental_form(&g.cs, &g.metric.g);
        r.extend(scoped(kahler_checks(&g.cs, &kappa, 1, spec, "kahler"), "calculus", "base"));
        let tkappa = t.tcalc.modules[2].from_inner(&kappa);
        r.extend(scoped(kahler_checks(&t.cs, &tkappa, 1, spec, "kahler"), "calculus", "twisted"));
        r
    }

    fn suite_metric(&self, g: &Geometry, t: &TwistedGeometry, spec: &SampleSpec) -> VerificationReport {
        let mut r = VerificationReport::new();
        r.extend(scoped(verify_metric(&g.metric, spec, "metric"), "metric", "base"));
        r.extend(scoped(verify_diamond(&g.metric, &g.cs, "metric"), "metric", "base"));
        r.extend(scoped(levi_civita_verify(&g.lc, &g.metric, spec, "lc"), "metric", "base"));
        r.extend(scoped(verify_metric(&t.metric, spec, "metric"), "metric", "twisted"));
        r.extend(scoped(verify_diamond(&t.metric, &t.cs, "metric"), "metric", "twisted"));
        r.extend(scoped(verify_dagger_transport(&g.metric, &t.pair, spec), "metric", "twisted"));
        r.extend(scoped(levi_civita_verify(&t.lc, &t.metric, spec, "lc"), "metric", "twisted"));
        r.extend(scoped(verify_conj_twist(&g.lc, &t.tcalc, spec), "metric", "twisted"));
        r
    }

    fn suite_hermitian(&self, g: &Geometry, t: &TwistedGeometry, spec: &SampleSpec) -> VerificationReport {
        let mut r = VerificationReport::new();
        r.extend(scoped(verify_hermitian(&g.herm, spec, "hermitian"), "hermitian", "base"));
        r.extend(scoped(verify_real_hermitian(&g.herm, &g.metric, spec, "hermitian"), "hermitian", "base"));
        match split_hermitian(&g.herm, &g.cs.summand(1, (1, 0)), &g.cs.summand(1, (0, 1))) {
            Ok((h1, h2)) => {
                r.extend(scoped(verify_hermitian(&h1, spec, "h10"), "hermitian", "base"));
                r.extend(scoped(verify_hermitian(&h2, spec, "h01"), "hermitian", "base"));
            }
            Err(e) => failed(&mut r, "hermitian.base.split", &e.to_string()),
        }
        r.extend(scoped(verify_hermitian(&t.herm, spec, "hermitian"), "hermitian", "twisted"));
        r.check("hermitian.twisted.coherence", "Hermitian metric of the twisted metric is the twisted Hermitian metric", "basis", || {
            compare_hermitian(&hermitian_from_real(&t.metric), &t.herm)
        });
        let pairs = spec.samples.max(1);
        r.extend(scoped(verify_pairing_relation(&g.herm, &t.herm, &t.tcalc, spec, pairs), "hermitian", "twisted"));
        r.extend(self.correspondence_roundtrips(spec));
        r
    }

    fn chern_data(&self) -> &Result<ChernData, String> {
        self.chern.get_or_init(|| {
            let (g, t) = match (&self.geometry, &self.twisted) {
                (Some(g), Some(t)) => (g, t),
                _ => return Err("no twisted geometry".into()),
            };
            let (hol10, _) = holomorphic_from_factorizable(&g.cs).map_err(|e| e.to_string())?;
            let (hol01, _) = holomorphic_from_factorizable(&g.cs.opposite()).map_err(|e| e.to_string())?;
            let (h1, h2) = split_hermitian(&g.herm, &hol10.s10, &hol01.s10).map_err(|e| e.to_string())?;
            let ch10 = chern_solve(&hol10, &h1, 1).map_err(|e| e.to_string())?;
            let ch01 = chern_solve(&hol01, &h2, 1).map_err(|e| e.to_string())?;
            let th10 = twist_holomorphic(&hol10, &t.tcalc);
            let th01 = twist_holomorphic(&hol01, &t.tcalc);
            let (h1g, h2g) = (twist_hermitian(&h1, &t.tcalc), twist_hermitian(&h2, &t.tcalc));
            let chg10 = chern_solve(&th10.holo, &h1g, 1).map_err(|e| format!("twisted (1,0): {e}"))?;
            let chg01 = chern_solve(&th01.holo, &h2g, 1).map_err(|e| format!("twisted (0,1): {e}"))?;
            Ok(ChernData { hol10, hol01, h1, h2, ch10, ch01, th10, th01, h1g, h2g, chg10, chg01 })
        })
    }

    fn suite_chern(&self, _g: &Geometry, t: &TwistedGeometry, spec: &SampleSpec) -> VerificationReport {
        let mut r = VerificationReport::new();
        let c = match self.chern_data() {
            Ok(c) => c,
            Err(e) => {
                failed(&mut r, "chern.solve", e);
                return r;
            }
        };
        r.check("chern.solve", "Chern connection: unique solution in the covariant search space", "box=1", || Ok(()));
        let parts = [
            ("chern10", &c.hol10, &c.h1, &c.ch10, &c.th10, &c.h1g, &c.chg10),
            ("chern01", &c.hol01, &c.h2, &c.ch01, &c.th01, &c.h2g, &c.chg01),
        ];
        for (name, hol, h, ch, th, hg, chg) in parts {
            r.extend(scoped(verify_chern(&ch.connection, hol, h, spec, name), "chern", "base"));
            r.extend(scoped(verify_chern(&chg.connection, &th.holo, hg, spec, name), "chern", "twisted"));
            ensure(&mut r, &format!("chern.base.{name}.box_independent"), "Chern connection independent of the coefficient box", spec, || {
                let wide = chern_solve(hol, h, 2).map_err(|e| e.to_string())?;
                compare_connections(&ch.connection, &wide.connection, spec)
            });
            ensure(&mut r, &format!("chern.twisted.{name}.is_twist"), "twisted Chern connection is the twist of the Chern connection", spec, || {
                compare_connections(&twist_connection(&ch.connection, &t.tcalc), &chg.connection, spec)
            });
        }
        r
    }

    fn suite_main(&self, g: &Geometry, t: &TwistedGeometry, spec: &SampleSpec) -> VerificationReport {
        let mut r = VerificationReport::new();
        let c = match self.chern_data() {
            Ok(c) => c,
            Err(e) => {
                failed(&mut r, "main.chern_available", e);
                return r;
            }
        };
        ensure(&mut r, "main.base.hypothesis", "Levi-Civita connection is the sum of the Chern connections", spec, || {
            let sum = direct_sum("Ch+Ch", g.cref.clone(), &[(&c.ch10.connection, &c.hol10.s10), (&c.ch01.connection, &c.hol01.s10)]);
            compare_connections(&g.lc, &sum, spec)
        });
        ensure(&mut r, "main.twisted.lc_is_twist", "twisted Levi-Civita connection is the twist of the Levi-Civita connection", spec, || {
            compare_connections(&twist_connection(&g.lc, &t.tcalc), &t.lc, spec)
        });
        ensure(&mut r, "main.twisted.decomposition", "twisted Levi-Civita connection is the sum of the twisted Chern connections", spec, || {
            let tc: CalcRef = t.tcalc.clone();
            let sum = direct_sum("Ch+Ch", tc, &[(&c.chg10.connection, &c.th10.holo.s10), (&c.chg01.connection, &c.th01.holo.s10)]);
            compare_connections(&t.lc, &sum, spec)
        });
        r
    }

    /// `gammabar` on the twisted algebra, and the calculus twisted back.
    fn untwist(&self, spec: &SampleSpec) -> Result<(Arc<TwistedAlgebra>, Option<Arc<TwistedCalculus>>), String> {
        let t = self.twist.as_ref().map_err(|e| e.clone())?;
        let bg = self.twisted_alg.clone().ok_or("no twisted algebra")?;
        let (back, rep) = t.reverse(spec).map_err(|e| e.to_string())?;
        if !rep.all_pass() {
            let w = rep.failures().first().map(|e| e.check_id.clone()).unwrap_or_default();
            return Err(format!("reverse cocycle not certified: {w}"));
        }
        let bgg = twist_comodule_algebra(bg, &back);
        let calc = self.twisted.as_ref().map(|tg| twist_calculus(tg.tcalc.clone(), &bgg));
        Ok((bgg, calc))
    }

    /// Real metric, Hermitian metric and their twists: four round trips, exact on tables.
    pub fn correspondence_roundtrips(&self, spec: &SampleSpec) -> VerificationReport {
        let mut r = VerificationReport::new();
        let (Some(g), Some(t)) = (&self.geometry, &self.twisted) else {
            r.skip("hermitian.roundtrip", "plumbing", "no metric on this model");
            return r;
        };
        let anchor = "real metrics, Hermitian metrics and their twists correspond";
        r.check("hermitian.roundtrip.real_hermitian_real", anchor, "basis", || {
            let h = hermitian_from_real(&g.metric);
            metric_from_hermitian(&h, &g.metric)
        });
        let back = self.untwist(spec);
        r.check("hermitian.roundtrip.metric_twist_untwist", anchor, "basis", || {
            let (_, calc) = back.as_ref().map_err(|e| e.clone())?;
            let calc = calc.as_ref().ok_or("no calculus")?;
            let (m2, _) = twist_metric(&t.metric, calc);
            if m2.g != g.metric.g {
                return Err(format!("g: {} vs {}", show_mod(&*m2.tens, &m2.g), show_mod(&*g.metric.tens, &g.metric.g)));
            }
            let (a, b) = (m2.pairing.basis_table(), g.metric.pairing.basis_table());
            if a != b {
                return Err("pairing tables differ".into());
            }
            Ok(())
        });
        r.check("hermitian.roundtrip.hermitian_twist_untwist", anchor, "basis", || {
            let (_, calc) = back.as_ref().map_err(|e| e.clone())?;
            let calc = calc.as_ref().ok_or("no calculus")?;
            compare_hermitian(&twist_hermitian(&t.herm, calc), &g.herm)
        });
        r.check("hermitian.roundtrip.square", anchor, "basis", || {
            compare_hermitian(&hermitian_from_real(&t.metric), &twist_hermitian(&hermitian_from_real(&g.metric), &t.tcalc))
        });
        r
    }

    pub fn level(&self, which: EmitLevel, spec: &SampleSpec) -> Result<Level, String> {
        match which {
            EmitLevel::Base => Ok(Level {
                alg: self.alg.clone(),
                calc: self.geometry.as_ref().map(|g| g.cref.clone()),
                metric: self.geometry.as_ref().map(|g| g.metric.clone()),
                lc: self.geometry.as_ref().map(|g| g.lc.clone()),
                herm: self.geometry.as_ref().map(|g| g.herm.clone()),
            }),
            EmitLevel::Twisted => {
                let bg = self.twisted_alg.clone().ok_or_else(|| self.twist.as_ref().err().cloned().unwrap_or_default())?;
                Ok(Level {
                    alg: bg,
                    calc: self.twisted.as_ref().map(|t| t.tcalc.clone() as CalcRef),
                    metric: self.twisted.as_ref().map(|t| t.metric.clone()),
                    lc: self.twisted.as_ref().map(|t| t.lc.clone()),
                    herm: self.twisted.as_ref().map(|t| t.herm.clone()),
                })
            }
            EmitLevel::RoundTrip => {
                let (bgg, calc) = self.untwist(spec)?;
                let t = self.twisted.as_ref();
                Ok(Level {
                    alg: bgg,
                    calc: calc.clone().map(|c| c as CalcRef),
                    metric: calc.as_ref().zip(t).map(|(c, t)| twist_metric(&t.metric, c).0),
                    lc: calc.as_ref().zip(t).map(|(c, t)| twist_connection(&t.lc, c)),
                    herm: calc.as_ref().zip(t).map(|(c, t)| twist_hermitian(&t.herm, c)),
                })
            }
        }
    }

    /// Structure tables at `which`, as a versioned JSON document with sorted keys.
    pub fn emit(&self, which: EmitLevel, spec: &SampleSpec) -> Result<Value, String> {
        let level = self.level(which, spec)?;
        Ok(json!({
            "schema_version": SCHEMA_VERSION,
            "model": { "name": self.model.name(), "params": self.model.params() },
            "field_order": self.model.field_order(),
            "tables": self.tables(&level),
        }))
    }

    fn coefficient_labels(&self) -> Vec<(String, Label)> {
        let mut out = vec![("1".to_string(), self.hopf.unit().keys().next().unwrap().clone())];
        out.extend(self.generators.iter().cloned());
        out
    }

    pub fn tables(&self, level: &Level) -> Value {
        let alg = &*level.alg;
        let mut t = Map::new();
        let show = |x: &Elem| show_elem(alg, x);
        // generators
        let mut pg = Map::new();
        for (an, a) in &self.generators {
            let mut row = Map::new();
            for (bn, b) in &self.generators {
                let p = alg.mul_basis(a, b);
                let (first, second) = if an <= bn { ((an, a), (bn, b)) } else { ((bn, b), (an, a)) };
                let normal = alg.mul_basis(first.1, second.1);
                let entry = match ratio(&p, &normal) {
                    Some(c) => json!({ "coeff": c.to_string(), "monomial": format!("{}*_g {}", first.0, second.0) }),
                    None => json!({ "value": show(&p) }),
                };
                row.insert(bn.clone(), entry);
            }
            pg.insert(an.clone(), Value::Object(row));
        }
        t.insert("product_gamma".into(), Value::Object(pg));
        let labels = alg.box_labels(1);
        let mut prod = Map::new();
        let mut star = Map::new();
        for a in &labels {
            let an = alg.label_name(a);
            let row: Map<String, Value> =
                labels.iter().map(|b| (alg.label_name(b), Value::String(show(&alg.mul_basis(a, b))))).collect();
            prod.insert(an.clone(), Value::Object(row));
            if alg.has_star() {
                star.insert(an, Value::String(show(&alg.star_basis(a))));
            }
        }
        t.insert("product".into(), Value::Object(prod));
        t.insert("star".into(), Value::Object(star));
        if let Some(c) = &level.calc {
            t.extend(calculus_tables(&**c, &self.coefficient_labels()));
        }
        if let Some(m) = &level.metric {
            let o = &*m.omega1;
            t.insert("g".into(), Value::String(show_mod(&*m.tens, &m.g)));
            let mut p = Map::new();
            for i in 0..o.rank() {
                for j in 0..o.rank() {
                    let key = format!("({}, {})", o.basis_name(i), o.basis_name(j));
                    p.insert(key, Value::String(show(&m.ev(&basis_elem(o, i), &basis_elem(o, j)))));
                }
            }
            t.insert("pairing".into(), Value::Object(p));
        }
        if let Some(c) = &level.lc {
            let e = &*c.e;
            let mut nab = Map::new();
            for (an, a) in self.coefficient_labels() {
                for i in 0..e.rank() {
                    let x = embed(&Elem::basis(a.clone()), i);
                    nab.insert(format!("{an}*{}", e.basis_name(i)), Value::String(show_mod(&*c.tens, &c.apply(&x))));
                }
            }
            t.insert("nabla".into(), Value::Object(nab));
            if let Some((tens, sigma)) = &c.sigma {
                let s: Map<String, Value> = sigma
                    .basis_table()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| (c.tens.basis_name(k), Value::String(show_mod(&**tens, v))))
                    .collect();
                t.insert("sigma".into(), Value::Object(s));
            }
        }
        if let Some(h) = &level.herm {
            let mut ht = Map::new();
            for (j, row) in h.table().iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    ht.insert(format!("<{}, bar {}>", h.e.basis_name(i), h.e.basis_name(j)), Value::String(show(v)));
                }
            }
            t.insert("hermitian".into(), Value::Object(ht));
        }
        Value::Object(t)
    }
}

fn ratio(p: &Elem, q: &Elem) -> Option<Cyc> {
    if p.len() != 1 || q.len() != 1 {
        return None;
    }
    let (kp, cp) = p.iter().next()?;
    let (kq, cq) = q.iter().next()?;
    if kp != kq {
        return None;
    }
    cp.div(cq).ok()
}

fn calculus_tables(c: &dyn Calc, coeffs: &[(String, Label)]) -> Map<String, Value> {
    let mut out = Map::new();
    let alg = c.alg();
    let o1 = c.module(1);
    let forms: Vec<(String, ModElem)> = coeffs
        .iter()
        .flat_map(|(an, a)| (0..o1.rank()).map(move |i| (an.clone(), a.clone(), i)))
        .map(|(an, a, i)| (format!("{an}*{}", o1.basis_name(i)), embed(&Elem::basis(a), i)))
        .collect();
    let mut wedge = Map::new();
    for (xn, x) in &forms {
        for (yn, y) in &forms {
            let w = c.wedge(1, x, 1, y);
            wedge.insert(format!("{xn} ^ {yn}"), Value::String(show_mod(&*c.module(2), &w)));
        }
    }
    out.insert("wedge".into(), Value::Object(wedge));
    let mut d = Map::new();
    for l in alg.box_labels(1) {
        let x = embed(&Elem::basis(l.clone()), 0);
        d.insert(alg.label_name(&l), Value::String(show_mod(&*o1, &c.d(0, &x))));
    }
    for (xn, x) in &forms {
        d.insert(xn.clone(), Value::String(show_mod(&*c.module(2), &c.d(1, x))));
    }
    out.insert("d".into(), Value::Object(d));
    let mut st = Map::new();
    for (xn, x) in &forms {
        let s = o1.star(x).map(|s| show_mod(&*o1, &s)).unwrap_or_else(|| "none".into());
        st.insert(xn.clone(), Value::String(s));
    }
    out.insert("form_star".into(), Value::Object(st));
    out
}

/// Recovers `( , )` from `H` through `(n, w) = <n, conj(w*)>`, and `g` as the inverse
/// matrix, and compares both with `m`.
fn metric_from_hermitian(h: &Hermitian, m: &Metric) -> Result<(), String> {
    let o = &*m.omega1;
    let n = o.rank();
    let alg = o.algebra();
    let mut p = vec![vec![Cyc::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let ws = o.star(&basis_elem(o, j)).ok_or("no star on Omega^1")?;
            let v = h.pair(&basis_elem(o, i), &h.conj.conj_in(&ws));
            p[i][j] = crate::calculus::as_scalar(&alg, &v).ok_or_else(|| format!("non-scalar pairing at ({i}, {j})"))?;
            let orig = crate::calculus::as_scalar(&alg, &m.ev(&basis_elem(o, i), &basis_elem(o, j))).ok_or("non-scalar pairing")?;
            if p[i][j] != orig {
                return Err(format!("({}, {}): {} vs {}", o.basis_name(i), o.basis_name(j), p[i][j], orig));
            }
        }
    }
    // g^(ij) solves sum_k p_ik g^(kj) = delta_ij
    let rows: Vec<Row> = (0..n)
        .map(|i| (0..n).filter(|&k| !p[i][k].is_zero()).map(|k| (k, p[i][k].clone())).collect())
        .collect();
    for j in 0..n {
        let rhs: Vec<Cyc> = (0..n).map(|i| if i == j { Cyc::one() } else { Cyc::zero() }).collect();
        let sol = linalg::solve(&rows, &rhs, n).map_err(|e| e.to_string())?;
        if !sol.is_unique() {
            return Err("recovered pairing is degenerate".into());
        }
        for k in 0..n {
            let idx = m.tens.index(k, j);
            let orig = crate::calculus::as_scalar(&alg, &crate::relhopf::coefficient(&m.g, idx)).ok_or("non-scalar metric")?;
            if sol.particular[k] != orig {
                return Err(format!("g coefficient of {}: {} vs {}", m.tens.basis_name(idx), sol.particular[k], orig));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SampleSpec {
        SampleSpec::new(2, 12, 42)
    }

    fn assemble(m: ModelSpec, f: Option<Fault>) -> ModelBundle {
        ModelBundle::assemble(&m, f, &spec()).unwrap()
    }

    #[test]
    fn nc_torus_commutation_table() {
        let b = assemble(ModelSpec::NcTorus { p: 1, q: 3 }, None);
        let v = b.emit(EmitLevel::Twisted, &spec()).unwrap();
        let e = &v["tables"]["product_gamma"]["y"]["x"];
        assert_eq!(e["coeff"], "zeta(3)^2");
        assert_eq!(e["monomial"], "x*_g y");
        assert_eq!(v["field_order"], 12);
    }

    #[test]
    fn params_are_validated() {
        assert!(ModelSpec::parse("nc_torus", Some(1), Some(0), None, None, None).is_err());
        assert!(ModelSpec::parse("mystery", None, None, None, None, None).is_err());
        assert!(ModelSpec::parse("fun_group", None, None, None, None, Some("a5")).is_err());
        assert!(ModelBundle::assemble(&ModelSpec::FunGroup { group: "d4".into() }, Some(Fault::Sigma), &spec()).is_err());
    }

    #[test]
    fn torus_without_twist_matches_classical() {
        let a = assemble(ModelSpec::ClassicalTorus, None);
        let b = assemble(ModelSpec::NcTorus { p: 0, q: 5 }, None);
        let ta = a.emit(EmitLevel::Twisted, &spec()).unwrap();
        let tb = b.emit(EmitLevel::Twisted, &spec()).unwrap();
        assert_eq!(ta["tables"], tb["tables"]);
        // trivial cocycle: twisted tables are the untwisted ones
        assert_eq!(ta["tables"], a.emit(EmitLevel::Base, &spec()).unwrap()["tables"]);
    }

    #[test]
    fn roundtrips_on_torus_and_pairing_fault() {
        let b = assemble(ModelSpec::NcTorus { p: 1, q: 3 }, None);
        let r = b.correspondence_roundtrips(&spec());
        assert!(r.all_pass(), "{}", r.to_text());
        let bad = assemble(ModelSpec::NcTorus { p: 1, q: 3 }, Some(Fault::Pairing));
        let r = bad.correspondence_roundtrips(&spec());
        let e = r.get("hermitian.roundtrip.real_hermitian_real").unwrap();
        assert!(e.witness.is_some() && r.failed(&e.check_id), "{}", r.to_text());
    }

    #[test]
    fn finite_models_run_their_suites() {
        for m in [
            ModelSpec::FiniteBicharacter { n: 3, pairing: Pairing::Upper },
            ModelSpec::FunGroup { group: "d4".into() },
        ] {
            let b = assemble(m, None);
            for s in [Suite::Hopf, Suite::Cocycle, Suite::Barfunctor, Suite::Chern] {
                let r = b.run(s, &spec());
                assert!(r.all_pass(), "{}", r.to_text());
            }
        }
    }

    #[test]
    fn check_ids_are_unique_and_scoped() {
        let b = assemble(ModelSpec::NcTorus { p: 1, q: 3 }, None);
        let r = b.run(Suite::All, &spec());
        let mut seen = std::collections::BTreeSet::new();
        for e in &r.entries {
            assert!(seen.insert(e.check_id.clone()), "duplicate {}", e.check_id);
        }
        for s in Suite::PARTS {
            let part = b.run(s, &spec());
            assert!(part.entries.iter().all(|e| e.check_id.starts_with(&format!("{}.", s.name()))), "{}", part.to_text());
        }
        assert!(r.all_pass(), "{}", r.to_text());
    }
}
