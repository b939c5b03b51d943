//! Named verification suites, JSON reports and the command helpers behind
//! the `rlct` binary.
//!
//! Every check draws from its own stream, seeded by the suite seed and a
//! hash of the check id, so checks can run on separate threads and the
//! report does not depend on scheduling.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cartan::{annihilator_of_form, build_family, divergence_kernel, Family};
use crate::contact::Contact;
use crate::embeddings::{phi, phi_h, sigma};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::forms::{cartan_form, FormKind};
use crate::invariants::{dickson_report, hamiltonian_charpoly_shape, restriction_identity_check, RestrictionReport};
use crate::linalg::{add_vec, is_zero, Echelon, Matrix};
use crate::poisson::{realize_l_in_poisson, CenterKind, Poisson};
use crate::restricted::RestrictedAlgebra;
use crate::tori::{
    agt2_torus, cartan_nilpotency_check, frame_report, h_torus_via_embedding, weyl_exhaustive, weyl_substitution,
    Torus,
};
use crate::truncpoly::TruncPoly;
use crate::witt::{witt_dim, Derivation};

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub const SUITES: &[&str] = &["embeddings", "forms", "cartan", "poisson", "contact", "tori", "weights", "weyl", "invariants"];

/// Carrier of a weight computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ModuleKind {
    #[default]
    #[serde(rename = "adjoint")]
    Adjoint,
    #[serde(rename = "A_n")]
    Natural,
}

impl FromStr for ModuleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjoint" => Ok(ModuleKind::Adjoint),
            "A_n" | "natural" => Ok(ModuleKind::Natural),
            other => Err(Error::UnsupportedKind(format!("module {other}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub p: u32,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub family: Option<Family>,
    pub seed: u64,
    pub samples: usize,
    pub force: bool,
    pub exhaustive: bool,
    pub center: CenterKind,
    pub module: ModuleKind,
}

impl SuiteConfig {
    pub fn new(suite: impl Into<String>, p: u32) -> Self {
        SuiteConfig {
            suite: suite.into(),
            p,
            n: None,
            r: None,
            family: None,
            seed: 0,
            samples: 100,
            force: false,
            exhaustive: false,
            center: CenterKind::Toral,
            module: ModuleKind::Adjoint,
        }
    }

    pub fn field(&self) -> Result<PrimeField> {
        if self.p < 3 {
            return Err(Error::InvalidModulus(self.p));
        }
        PrimeField::new(self.p)
    }

    /// Rejects parameters outside the tested range unless `force` is set.
    pub fn check_envelope(&self) -> Result<()> {
        self.field()?;
        if self.force {
            return Ok(());
        }
        let (max_n, max_r) = match self.p {
            3 => (if self.family == Some(Family::H) { 4 } else { 3 }, 2),
            5 => (if self.family == Some(Family::K) || self.family == Some(Family::Kpp) { 3 } else { 2 }, 1),
            p => return Err(Error::EnvelopeError(format!("p = {p} is outside the tested primes 3 and 5 (use --force)"))),
        };
        if let Some(n) = self.n {
            if n == 0 || n > max_n {
                return Err(Error::EnvelopeError(format!("n = {n} is outside 1..={max_n} at p = {} (use --force)", self.p)));
            }
        }
        if let Some(r) = self.r {
            if r == 0 || r > max_r {
                return Err(Error::EnvelopeError(format!("r = {r} is outside 1..={max_r} at p = {} (use --force)", self.p)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub reference: String,
    pub status: Status,
    /// Seed of the stream the check drew from.
    pub seed: u64,
    pub detail: Value,
}

struct Outcome {
    status: Status,
    detail: Value,
}

impl Outcome {
    fn check(ok: bool, detail: Value) -> Result<Outcome> {
        Ok(Outcome { status: if ok { Status::Pass } else { Status::Fail }, detail })
    }

    fn skip(reason: &str) -> Result<Outcome> {
        Ok(Outcome { status: Status::Skip, detail: json!({ "reason": reason }) })
    }
}

type CheckFn = Box<dyn FnOnce(&mut ChaCha8Rng) -> Result<Outcome> + Send>;

struct Pending {
    id: String,
    reference: &'static str,
    run: CheckFn,
}

fn pending(id: String, reference: &'static str, run: impl FnOnce(&mut ChaCha8Rng) -> Result<Outcome> + Send + 'static) -> Pending {
    Pending { id, reference, run: Box::new(run) }
}

/// FNV-1a, used to split the suite seed per check.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn check_seed(seed: u64, id: &str) -> u64 {
    seed ^ fnv1a(id)
}

/// Runs a suite. Unknown suites and envelope violations are errors; failed
/// checks are reported, not raised.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    cfg.check_envelope()?;
    let field = cfg.field()?;
    let mut checks = Vec::new();
    let names: Vec<&str> = if cfg.suite == "all" { SUITES.to_vec() } else { vec![cfg.suite.as_str()] };
    for name in names {
        match name {
            "embeddings" => embeddings_checks(cfg, field, &mut checks),
            "forms" => forms_checks(cfg, field, &mut checks),
            "cartan" => cartan_checks(cfg, field, &mut checks),
            "poisson" => poisson_checks(cfg, field, &mut checks),
            "contact" => contact_checks(cfg, field, &mut checks),
            "tori" => tori_checks(cfg, field, &mut checks),
            "weights" => weights_checks(cfg, field, &mut checks)?,
            "weyl" => weyl_checks(cfg, field, &mut checks),
            "invariants" => invariants_checks(cfg, field, &mut checks)?,
            other => return Err(Error::UnsupportedKind(format!("suite {other}"))),
        }
    }
    let seed = cfg.seed;
    let mut reports: Vec<CheckReport> = std::thread::scope(|s| {
        let handles: Vec<_> = checks
            .into_iter()
            .map(|c| {
                s.spawn(move || {
                    let cs = check_seed(seed, &c.id);
                    let mut rng = ChaCha8Rng::seed_from_u64(cs);
                    let outcome = (c.run)(&mut rng)
                        .unwrap_or_else(|e| Outcome { status: Status::Fail, detail: json!({ "error": e.to_string() }) });
                    CheckReport { id: c.id, reference: c.reference.to_string(), status: outcome.status, seed: cs, detail: outcome.detail }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(reports)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

pub fn summarize(checks: &[CheckReport]) -> Summary {
    let mut s = Summary::default();
    for c in checks {
        match c.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Skip => s.skip += 1,
        }
    }
    s
}

/// The report as a JSON value; object keys come out sorted.
pub fn report_value(cfg: &SuiteConfig, checks: &[CheckReport]) -> Value {
    json!({
        "tool": "rlct",
        "params": cfg,
        "checks": checks,
        "summary": summarize(checks),
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// 0 when every non-skipped check passed, 1 otherwise.
pub fn exit_code(checks: &[CheckReport]) -> i32 {
    if summarize(checks).fail == 0 {
        0
    } else {
        1
    }
}

fn list(given: Option<usize>, default: &[usize]) -> Vec<usize> {
    given.map(|v| vec![v]).unwrap_or_else(|| default.to_vec())
}

fn by_prime<'a>(field: PrimeField, at3: &'a [usize], other: &'a [usize]) -> &'a [usize] {
    if field.p() == 3 {
        at3
    } else {
        other
    }
}

fn embeddings_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) {
    for n in list(cfg.n, by_prime(field, &[2, 3], &[2])) {
        out.push(pending(format!("embeddings.sigma.n{n}"), "embedding of W(n-1) into S(n)", move |_| {
            let (m, _) = sigma(field, n)?;
            Outcome::check(
                m.is_injective(),
                json!({ "source": m.source, "target": m.target, "pairs": m.pairs_checked, "powers": m.powers_checked, "rank": m.rank() }),
            )
        }));
    }
    for r in list(cfg.r, by_prime(field, &[1, 2], &[1])) {
        out.push(pending(format!("embeddings.phi.r{r}"), "embedding of W(r) into P(2r)", move |_| {
            let (m, _) = phi(field, r)?;
            Outcome::check(
                m.is_injective(),
                json!({ "source": m.source, "target": m.target, "pairs": m.pairs_checked, "powers": m.powers_checked, "rank": m.rank() }),
            )
        }));
        out.push(pending(format!("embeddings.phi_h.r{r}"), "embedding of W(r) into H(2r)", move |_| {
            let (m, _) = phi_h(field, r)?;
            Outcome::check(
                m.is_injective(),
                json!({ "source": m.source, "target": m.target, "pairs": m.pairs_checked, "powers": m.powers_checked, "rank": m.rank() }),
            )
        }));
    }
}

fn forms_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) {
    for n in list(cfg.n, by_prime(field, &[1, 2, 3], &[1, 2])) {
        out.push(pending(format!("forms.divergence_identity.n{n}"), "volume form and divergence", move |_| {
            let omega = cartan_form(field, FormKind::S, n)?;
            let basis = Derivation::basis(field, n);
            let bad = basis.iter().filter(|d| omega.lie_derivative(d) != omega.mul_poly(&d.divergence())).count();
            Outcome::check(bad == 0, json!({ "basis": basis.len(), "violations": bad }))
        }));
        out.push(pending(format!("forms.s_from_form.n{n}"), "volume form and divergence", move |_| {
            let from_form = annihilator_of_form(field, FormKind::S, n)?;
            let kernel = divergence_kernel(field, n);
            let equal = from_form.is_subspace_of(&kernel) && kernel.is_subspace_of(&from_form);
            Outcome::check(equal, json!({ "dim_from_form": from_form.dim(), "dim_kernel": kernel.dim() }))
        }));
    }
}

/// Dimension formulas for the constructed families.
pub fn expected_dim(p: usize, family: Family, n: usize) -> usize {
    let pn = p.pow(n as u32);
    match family {
        Family::W => n * pn,
        Family::S => (n - 1) * (pn - 1),
        Family::H => pn - 2,
        Family::Kpp | Family::P => pn,
        Family::K => {
            if (n + 3) % p == 0 {
                pn - 1
            } else {
                pn
            }
        }
    }
}

fn cartan_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) {
    let p = field.p() as usize;
    let defaults: Vec<(Family, Vec<usize>)> = if p == 3 {
        vec![(Family::W, vec![1, 2, 3]), (Family::S, vec![2, 3]), (Family::H, vec![2, 4]), (Family::Kpp, vec![3]), (Family::K, vec![3])]
    } else {
        vec![(Family::W, vec![1, 2]), (Family::S, vec![2]), (Family::H, vec![2]), (Family::Kpp, vec![3]), (Family::K, vec![3])]
    };
    for (family, ns) in defaults {
        if cfg.family.is_some_and(|f| f != family) {
            continue;
        }
        for n in list(cfg.n, &ns) {
            if family == Family::H && n % 2 != 0 || matches!(family, Family::K | Family::Kpp) && n % 2 == 0 {
                continue;
            }
            out.push(pending(format!("cartan.dim.{family}{n}"), "dimensions of the Cartan type algebras", move |_| {
                let b = build_family(field, family, n)?;
                let expected = expected_dim(p, family, n);
                let closed = b.basis.is_bracket_closed() && b.basis.is_p_closed();
                Outcome::check(
                    b.basis.dim() == expected && closed,
                    json!({ "dim": b.basis.dim(), "expected": expected, "restricted_subalgebra": closed, "warning": b.warning }),
                )
            }));
        }
    }
    if cfg.family.is_none() {
        let samples = cfg.samples;
        out.push(pending("cartan.jacobson.W2".into(), "Jacobson formula", move |rng| {
            let alg = RestrictedAlgebra::witt(field, 2)?;
            jacobson_outcome(&alg, rng, samples)
        }));
        out.push(pending("cartan.jacobson.P2".into(), "Jacobson formula", move |rng| {
            let pa = Poisson::new(field, 1, CenterKind::Toral)?;
            jacobson_outcome(pa.algebra(), rng, samples)
        }));
        out.push(pending("cartan.jordan_chevalley.W2".into(), "Jordan-Chevalley decomposition", move |rng| {
            let alg = RestrictedAlgebra::witt(field, 2)?;
            jordan_chevalley_outcome(&alg, rng, samples)
        }));
        out.push(pending("cartan.jordan_chevalley.P2".into(), "Jordan-Chevalley decomposition", move |rng| {
            let pa = Poisson::new(field, 1, CenterKind::Toral)?;
            jordan_chevalley_outcome(pa.algebra(), rng, samples)
        }));
    }
}

fn jacobson_outcome(alg: &RestrictedAlgebra, rng: &mut ChaCha8Rng, samples: usize) -> Result<Outcome> {
    let f = alg.field();
    let mut bad = Vec::new();
    for k in 0..samples {
        let x = alg.random_element(rng);
        let y = alg.random_element(rng);
        let mut rhs = add_vec(f, &alg.p_power(&x), &alg.p_power(&y));
        for s in alg.jacobson_s_terms(&x, &y) {
            rhs = add_vec(f, &rhs, &s);
        }
        if alg.p_power(&add_vec(f, &x, &y)) != rhs && bad.len() < 3 {
            bad.push(json!({ "sample": k, "x": x, "y": y }));
        }
    }
    Outcome::check(bad.is_empty(), json!({ "samples": samples, "counterexamples": bad }))
}

/// The five properties of `x = x_s + x_n`.
pub fn jordan_chevalley_contract(alg: &RestrictedAlgebra, x: &[u32]) -> std::result::Result<(), String> {
    let f = alg.field();
    let cl = alg.p_closure(x);
    let (xs, xn) = (cl.x_s.clone(), cl.x_n.clone());
    if add_vec(f, &xs, &xn) != x {
        return Err("x != x_s + x_n".into());
    }
    let span = Echelon::from_vectors(f, alg.dim(), &cl.powers);
    if !span.contains(&xs) || !span.contains(&xn) {
        return Err("x_s or x_n outside (kx)_p".into());
    }
    if !is_zero(&alg.bracket(&xs, &xn)) {
        return Err("[x_s, x_n] != 0".into());
    }
    let xs_cl = alg.p_closure(&xs);
    let image = Echelon::from_vectors(f, alg.dim(), &xs_cl.powers.iter().map(|v| alg.p_power(v)).collect::<Vec<_>>());
    if !image.contains(&xs) {
        return Err("x_s is not semisimple".into());
    }
    let mut cur = xn;
    for _ in 0..=alg.dim() {
        if is_zero(&cur) {
            return Ok(());
        }
        cur = alg.p_power(&cur);
    }
    Err("x_n is not p-nilpotent".into())
}

fn jordan_chevalley_outcome(alg: &RestrictedAlgebra, rng: &mut ChaCha8Rng, samples: usize) -> Result<Outcome> {
    let mut bad = Vec::new();
    for k in 0..samples {
        let x = alg.random_element(rng);
        if let Err(e) = jordan_chevalley_contract(alg, &x) {
            if bad.len() < 3 {
                bad.push(json!({ "sample": k, "x": x, "error": e }));
            }
        }
    }
    Outcome::check(bad.is_empty(), json!({ "samples": samples, "counterexamples": bad }))
}

fn poisson_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) {
    let center = cfg.center;
    let samples = cfg.samples;
    for r in list(cfg.r, by_prime(field, &[1, 2], &[1])) {
        out.push(pending(format!("poisson.l_realization.r{r}"), "the subalgebra l of P(2r)", move |_| {
            if center != CenterKind::Toral {
                return Outcome::skip("l is realized with a toral center");
            }
            let pa = Poisson::new(field, r, center)?;
            let (span, images) = realize_l_in_poisson(&pa)?;
            let xi = pa.p_power(&images[1])?;
            let toral = images[2..].iter().all(|t| pa.p_power(t).map(|v| &v == t).unwrap_or(false));
            Outcome::check(
                span.rank() == r + 2 && xi == TruncPoly::one(field, 2 * r) && toral,
                json!({ "dim": span.rank(), "xi_p": xi.to_string(), "t_toral": toral }),
            )
        }));
        out.push(pending(format!("poisson.phi_lambda.r{r}"), "automorphisms f + lambda(f)", move |rng| {
            let pa = Poisson::new(field, r, center)?;
            let dim = pa.dim();
            let derived = pa.derived_subalgebra();
            let dm = Matrix::from_rows(field, derived.basis(), dim);
            let kernel = dm.kernel();
            let mut lambda = vec![0u32; dim];
            for v in &kernel {
                let c = rand::Rng::gen_range(rng, 1..field.p());
                lambda = add_vec(field, &lambda, &v.iter().map(|&x| field.mul(x, c)).collect::<Vec<_>>());
            }
            let phi = pa.phi_lambda(&lambda)?;
            let fixes = derived.basis().iter().all(|b| {
                let f = pa.from_coords(b);
                phi.apply(&f) == f
            });
            let invertible = phi.matrix().det() != 0;
            let basis: Vec<TruncPoly> = (0..dim).map(|i| pa.from_coords(&pa.algebra().unit(i))).collect();
            let mut brackets = true;
            for i in 0..dim {
                for j in i + 1..dim {
                    let lhs = phi.apply(&pa.bracket(&basis[i], &basis[j])?);
                    let rhs = pa.bracket(&phi.apply(&basis[i]), &phi.apply(&basis[j]))?;
                    brackets &= lhs == rhs;
                }
            }
            // Only a Lie automorphism is claimed; compatibility with the p-map is reported.
            let mut powers = true;
            let mut tested: Vec<TruncPoly> = basis.clone();
            for _ in 0..samples {
                tested.push(pa.from_coords(&pa.algebra().random_element(rng)));
            }
            for f in &tested {
                powers &= phi.apply(&pa.p_power(f)?) == pa.p_power(&phi.apply(f))?;
            }
            Outcome::check(
                fixes && invertible && brackets && kernel.len() == 1,
                json!({ "codim_derived": kernel.len(), "fixes_derived": fixes, "invertible": invertible, "brackets": brackets, "commutes_with_p_map": powers, "p_map_tests": tested.len() }),
            )
        }));
    }
}

fn contact_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) {
    for r in list(cfg.r, &[1]) {
        let n = 2 * r + 1;
        out.push(pending(format!("contact.theta_bijective.r{r}"), "contact algebra on A_n", move |_| {
            let c = Contact::build(field, r)?;
            let m = TruncPoly::dim(field, n);
            let ok = crate::truncpoly::monomial_basis(field, n).iter().all(|a| {
                let f = TruncPoly::monomial(field, &a.0, 1).expect("in range");
                let d = c.theta0_inv(&f);
                c.kpp().contains(&d) && c.theta0(&d) == f
            });
            Outcome::check(ok && c.kpp().dim() == m, json!({ "dim_kpp": c.kpp().dim(), "dim_carrier": m, "scale": c.scale() }))
        }));
        out.push(pending(format!("contact.bracket_values.r{r}"), "contact bracket and p-map values", move |_| {
            let c = Contact::build(field, r)?;
            let xi_n = TruncPoly::xi(field, n, n - 1);
            let mut e = vec![0u32; n];
            e[r - 1] = 1;
            e[2 * r - 1] = 1;
            let u = TruncPoly::monomial(field, &e, 1)?;
            let b = u.mul(&xi_n);
            let v1 = c.bracket(&u, &xi_n);
            let v2 = c.bracket(&xi_n, &b);
            let v3 = c.p_power(&xi_n);
            let v4 = c.p_power(&b);
            Outcome::check(
                v1.is_zero() && v2 == b.scale(2) && v3 == xi_n && v4 == u,
                json!({ "bracket_u_xi": v1.to_string(), "bracket_xi_uxi": v2.to_string(), "xi_p": v3.to_string(), "uxi_p": v4.to_string() }),
            )
        }));
        out.push(pending(format!("contact.kpp_mod_k_unipotent.r{r}"), "contact algebra on A_n", move |_| {
            let c = Contact::build(field, r)?;
            let alg = c.algebra();
            let derived = c.derived();
            let units: Vec<Vec<u32>> = (0..alg.dim()).map(|i| alg.unit(i)).collect();
            let ok = alg.is_p_unipotent_mod(&units, &derived);
            Outcome::check(ok, json!({ "dim_kpp": alg.dim(), "dim_k": derived.rank() }))
        }));
    }
}

fn torus_dim_expected(family: Family, n: usize) -> usize {
    match family {
        Family::W => n,
        Family::S => n - 1,
        Family::H => n / 2,
        Family::K | Family::Kpp => (n - 1) / 2 + 1,
        Family::P => 0,
    }
}

fn tori_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) {
    let targets: Vec<(Family, usize)> = match (cfg.family, cfg.n) {
        (Some(f), Some(n)) => vec![(f, n)],
        _ if field.p() == 3 => vec![(Family::W, 1), (Family::W, 2), (Family::W, 3), (Family::S, 3), (Family::H, 2), (Family::H, 4), (Family::K, 3)],
        _ => vec![(Family::W, 1), (Family::W, 2), (Family::S, 2), (Family::H, 2), (Family::K, 3)],
    };
    for (family, n) in targets.clone() {
        out.push(pending(format!("tori.standard.{family}{n}"), "standard tori of maximal dimension", move |_| {
            let t = agt2_torus(field, family, n)?;
            let expected = torus_dim_expected(family, n);
            Outcome::check(t.dim() == expected && t.f0() == 0, json!({ "torus": t.to_json(), "expected_dim": expected }))
        }));
    }
    if cfg.family.is_some() {
        return;
    }
    let samples = cfg.samples;
    for r in by_prime(field, &[1, 2], &[1]).to_vec() {
        out.push(pending(format!("tori.hamiltonian_image.r{r}"), "standard tori of maximal dimension", move |_| {
            let t = h_torus_via_embedding(field, r)?;
            Outcome::check(t.dim() == r && t.f0() == 0, json!({ "torus": t.to_json() }))
        }));
    }
    if field.p() == 3 {
        for n in [2usize, 3] {
            out.push(pending(format!("tori.frame.n{n}"), "the theta frame and its constants", move |rng| {
                let rep = frame_report(field, n, rng, samples)?;
                let p = field.p() as usize;
                let ok = rep.weight_identities == n * p.pow(n as u32)
                    && rep.constants_dim == p
                    && rep.constants_equal_zeta_algebra
                    && rep.centralizer_matches
                    && rep.centralizer_dim == n * p
                    && rep.inclusion_ok == rep.inclusion_samples;
                Outcome::check(ok, to_json(&rep))
            }));
        }
    }
    for (family, n) in targets {
        if !matches!(family, Family::S | Family::H) || n < 3 {
            continue;
        }
        out.push(pending(format!("tori.cartan_subalgebra.{family}{n}"), "Cartan subalgebras of the standard tori", move |rng| {
            let t = agt2_torus(field, family, n)?;
            let rep = cartan_nilpotency_check(&t, rng, samples.min(20));
            Outcome::check(rep.nilpotent, to_json(&rep))
        }));
    }
}

/// The weight decomposition of the standard torus on the chosen carrier.
pub fn weights_of(torus: &Torus, module: ModuleKind) -> Result<crate::tori::WeightDecomposition> {
    match module {
        ModuleKind::Adjoint => torus.adjoint_weights(),
        ModuleKind::Natural => torus.module_weights(),
    }
}

fn weights_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) -> Result<()> {
    let targets: Vec<(Family, usize)> = match (cfg.family, cfg.n) {
        (Some(f), Some(n)) => vec![(f, n)],
        (Some(_), None) | (None, Some(_)) => {
            return Err(Error::UnsupportedKind("weights needs both --family and --n, or neither".into()))
        }
        _ if field.p() == 3 => vec![(Family::W, 2), (Family::S, 3), (Family::H, 4)],
        _ => vec![(Family::W, 1), (Family::W, 2), (Family::S, 2), (Family::H, 2)],
    };
    let module = cfg.module;
    let tag = match module {
        ModuleKind::Adjoint => "adjoint",
        ModuleKind::Natural => "natural",
    };
    for (family, n) in targets {
        out.push(pending(format!("weights.{tag}.{family}{n}"), "weight space decompositions", move |_| {
            let t = agt2_torus(field, family, n)?;
            let w = weights_of(&t, module)?;
            let full = w.spaces().len() == (field.p() as usize).pow(t.dim() as u32);
            let total: usize = w.entries().iter().map(|e| e.dim).sum();
            let uniform = match module {
                ModuleKind::Adjoint => w.uniform_root_dims(),
                ModuleKind::Natural => w.entries().windows(2).all(|e| e[0].dim == e[1].dim),
            };
            Outcome::check(
                full && uniform && total == w.carrier_dim(),
                json!({ "weights": w.entries(), "count": w.spaces().len(), "carrier_dim": w.carrier_dim(), "uniform": uniform }),
            )
        }));
    }
    Ok(())
}

fn weyl_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) {
    let n = cfg.n.unwrap_or(2);
    out.push(pending(format!("weyl.exhaustive.n{n}"), "substitution automorphisms and the Weyl group", move |_| {
        let rep = weyl_exhaustive(field, n)?;
        let order = gl_order(field.p() as usize, n);
        let ok = rep.group_order == order
            && rep.distinct_induced == order
            && rep.normalizes
            && rep.homomorphism
            && rep.onto
            && rep.orbit_constant;
        Outcome::check(ok, to_json(&rep))
    }));
}

/// `|GL_n(F_p)| = prod_{i<n} (p^n - p^i)`.
pub fn gl_order(p: usize, n: usize) -> usize {
    (0..n).map(|i| p.pow(n as u32) - p.pow(i as u32)).product()
}

fn restriction_ok(r: &RestrictionReport) -> bool {
    r.torus_points_ok == r.torus_points
        && r.q_samples_ok == r.q_samples
        && r.p_polynomial_shape_ok == r.semisimple_samples
        && r.semisimple_q_ok == r.semisimple_regular
}

fn invariants_checks(cfg: &SuiteConfig, field: PrimeField, out: &mut Vec<Pending>) -> Result<()> {
    let samples = cfg.samples;
    let p3 = field.p() == 3;
    let families: Vec<(Family, usize)> = match (cfg.family, cfg.n) {
        (Some(f), Some(n)) => vec![(f, n)],
        (Some(f), None) => vec![(f, if f == Family::H { 4 } else { 3 })],
        _ if p3 => vec![(Family::W, 2), (Family::S, 3), (Family::H, 4)],
        _ => vec![(Family::W, 2), (Family::S, 2)],
    };
    if cfg.family.is_none() {
        for m in by_prime(field, &[1, 2], &[1, 2]).to_vec() {
            out.push(pending(format!("invariants.dickson.m{m}"), "Dickson invariants", move |_| {
                let rep = dickson_report(field, m)?;
                Outcome::check(rep.invariant && rep.vanish_off_p_powers && rep.degrees_ok, to_json(&rep))
            }));
        }
    }
    for (family, n) in families {
        match family {
            Family::W | Family::S => {}
            Family::H => {
                if n % 2 != 0 {
                    return Err(Error::ParityError(format!("H(n) needs even n, got {n}")));
                }
                out.push(pending(format!("invariants.hamiltonian_shape.H{n}"), "characteristic polynomials on A_n", move |rng| {
                    let rep = hamiltonian_charpoly_shape(field, n / 2, rng, samples)?;
                    Outcome::check(rep.ok == rep.samples, to_json(&rep))
                }));
                continue;
            }
            other => return Err(Error::UnsupportedKind(format!("invariants for {other}"))),
        }
        // The S(n) run also serves as the witness for d(g); it uses a hundredfold sample count.
        let count = if family == Family::S { samples * 100 } else { samples };
        out.push(pending(format!("invariants.restriction.{family}{n}"), "restriction of invariants to a torus", move |rng| {
            let rep = restriction_identity_check(field, family, n, rng, count)?;
            let beta_ok = rep.beta_agree == rep.beta_samples
                && rep.beta_samples > 0
                && rep.beta_semisimple_agree == rep.beta_semisimple_samples;
            let torus_q_ok = rep.q_torus_points_ok == rep.torus_points;
            let ell_expected = if family == Family::S { 1 } else { 0 };
            Outcome::check(
                restriction_ok(&rep) && beta_ok && torus_q_ok && rep.ell_d == ell_expected,
                to_json(&rep),
            )
        }));
    }
    Ok(())
}

/// `rlct construct`.
pub fn construct_cmd(field: PrimeField, family: Family, n: usize, center: CenterKind) -> Result<Value> {
    if family == Family::P {
        if n % 2 != 0 {
            return Err(Error::ParityError(format!("P(n) needs even n, got {n}")));
        }
        let pa = Poisson::new(field, n / 2, center)?;
        let basis: Vec<Value> = (0..pa.dim()).map(|i| pa.element_json(&pa.from_coords(&pa.algebra().unit(i)))).collect();
        return Ok(json!({ "family": "P", "p": field.p(), "n": n, "dim": pa.dim(), "center": center, "basis": basis }));
    }
    let b = build_family(field, family, n)?;
    let mut basis: Vec<Derivation> = b.basis.basis();
    basis.sort_by_key(|d| d.to_coords().iter().rev().copied().collect::<Vec<u32>>());
    Ok(json!({
        "family": family.to_string(),
        "p": field.p(),
        "n": n,
        "dim": b.basis.dim(),
        "ambient_dim": witt_dim(field, n),
        "mu": b.mu,
        "graded": b.graded,
        "warning": b.warning,
        "basis": basis,
    }))
}

/// `rlct weights`.
pub fn weights_cmd(field: PrimeField, family: Family, n: usize, module: ModuleKind) -> Result<Value> {
    let t = agt2_torus(field, family, n)?;
    let w = weights_of(&t, module)?;
    Ok(json!({
        "family": family.to_string(),
        "p": field.p(),
        "n": n,
        "module": module,
        "carrier_dim": w.carrier_dim(),
        "weights": w.entries(),
        "torus": t.to_json(),
    }))
}

/// `rlct weyl`: the whole group with `exhaustive`, otherwise a generating set.
pub fn weyl_cmd(field: PrimeField, n: usize, exhaustive: bool) -> Result<Value> {
    if exhaustive {
        return Ok(to_json(&weyl_exhaustive(field, n)?));
    }
    let mut gens = Vec::new();
    for g in crate::invariants::gl_generators(field, n) {
        let e = weyl_substitution(field, &g)?;
        let rows = |m: &Matrix| (0..m.rows()).map(|i| m.row(i).to_vec()).collect::<Vec<_>>();
        gens.push(json!({ "matrix": rows(e.matrix()), "induced": rows(e.induced()) }));
    }
    Ok(json!({ "n": n, "p": field.p(), "group_order": gl_order(field.p() as usize, n), "generators": gens }))
}

/// `rlct dickson`.
pub fn dickson_cmd(field: PrimeField, m: usize) -> Result<Value> {
    let rep = dickson_report(field, m)?;
    Ok(to_json(&rep.coefficients))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        let cfg = SuiteConfig::new("nope", 3);
        assert!(matches!(run_suite(&cfg), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn envelope() {
        let mut cfg = SuiteConfig::new("forms", 7);
        assert!(matches!(cfg.check_envelope(), Err(Error::EnvelopeError(_))));
        cfg.force = true;
        assert!(cfg.check_envelope().is_ok());
        let mut cfg = SuiteConfig::new("forms", 3);
        cfg.n = Some(5);
        assert!(matches!(cfg.check_envelope(), Err(Error::EnvelopeError(_))));
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(3, 2), 48);
        assert_eq!(gl_order(5, 1), 4);
    }

    #[test]
    fn seeds_differ_per_check() {
        assert_ne!(check_seed(1, "a"), check_seed(1, "b"));
    }
}
