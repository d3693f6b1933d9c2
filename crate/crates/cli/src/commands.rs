use std::path::Path;

use anyhow::{bail, Context, Result};
use rankpres::constructions::{
    make_congruence, make_constant, make_e2km, make_hn_to_big, make_lk, make_pq, make_rho,
    make_tau_rotation, make_tensor, make_vector_eval, RealLinearMatMap, RealSpace,
};
use rankpres::grassmann::{
    gap, hol_combination, hol_existence, hol_sample, hol_t_values, principal_angles,
    two_proj_canonical, HolChoices, Subspace,
};
use rankpres::herm_space::{decode, encode, HermBasis, HermMap, HermVec};
use rankpres::linalg::{projection_defect, ComplexMatrix};
use rankpres::preserver::{
    classify_c2m, classify_dim2, classify_h0u, classify_iho, classify_phkk, verify_preserves,
    PreserverClass, Recovery,
};
use rankpres::sampling::rng;
use rankpres::selftest::run_selftest;
use rankpres::tolerance::{tol_canon, tol_eig, CLUSTER_TOL};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{
    BasisCommand, ClassifyArgs, ClassifyCommand, Cli, Command, ConstructCommand, EvalDomain, HolArgs,
    HolCommand, PairArgs,
};

pub struct Outcome {
    pub command: String,
    pub verdict: bool,
    pub result: serde_json::Value,
    pub tol_override: Option<f64>,
    /// Human-readable rendering used by `--format pretty` where one exists.
    pub text: Option<String>,
}

impl Outcome {
    fn new(command: &str, verdict: bool, result: impl Serialize) -> Result<Self> {
        Ok(Outcome {
            command: command.into(),
            verdict,
            result: serde_json::to_value(result)?,
            tol_override: None,
            text: None,
        })
    }

    fn ok(command: &str, result: impl Serialize) -> Result<Self> {
        Self::new(command, true, result)
    }

    fn with_tol(mut self, tol: Option<f64>) -> Self {
        self.tol_override = tol;
        self
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HolExistsResult {
    pub exists: bool,
    pub gap: f64,
    pub bound: f64,
    pub slack: f64,
    /// Verdict from the block parameters of the canonical form.
    pub by_blocks: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HolMemberResult {
    pub member: bool,
    pub defect: f64,
    pub threshold: f64,
}

/// Reads a JSON file holding either the bare object or an output envelope.
fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(obj) = value.as_object_mut() {
        if obj.contains_key("tool") && obj.contains_key("result") {
            value = obj.remove("result").expect("checked above");
        }
    }
    serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))
}

fn read_pair(p: &PairArgs) -> Result<(Subspace, Subspace)> {
    Ok((read(&p.x)?, read(&p.y)?))
}

fn check_tol(tol: Option<f64>) -> Result<()> {
    if let Some(t) = tol {
        if !(t.is_finite() && t >= 0.0) {
            bail!("--tol must be a finite nonnegative number, got {t}");
        }
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let seed = cli.common.seed;
    match &cli.command {
        Command::Angles(p) => {
            let (x, y) = read_pair(p)?;
            Outcome::ok("angles", principal_angles(&x, &y)?)
        }
        Command::Gap(p) => {
            let (x, y) = read_pair(p)?;
            Outcome::ok("gap", gap(&x, &y)?)
        }
        Command::Canon { pair, tol } => {
            check_tol(*tol)?;
            let (x, y) = read_pair(pair)?;
            Ok(Outcome::ok("canon", two_proj_canonical(&x, &y, tol.unwrap_or(CLUSTER_TOL))?)?.with_tol(*tol))
        }
        Command::Hol(h) => hol(h, seed),
        Command::Construct(c) => construct(c, seed),
        Command::Classify(c) => classify(c, seed),
        Command::Verify { input, k, samples } => {
            let f: HermMap = read(input)?;
            let report = verify_preserves(&f, *k, *samples, seed)?;
            Outcome::new("verify", report.ok, report)
        }
        Command::Basis(BasisCommand::Encode { input, traceless }) => {
            let a: ComplexMatrix = read(input)?;
            let basis = HermBasis::new(a.rows(), *traceless)?;
            Outcome::ok("basis encode", encode(&a, basis)?)
        }
        Command::Basis(BasisCommand::Decode { input }) => {
            let v: HermVec = read(input)?;
            Outcome::ok("basis decode", decode(&v)?)
        }
        Command::Selftest { inject_fault } => {
            let report = run_selftest(seed, *inject_fault);
            let mut out = Outcome::new("selftest", report.all_passed(), &report)?;
            out.text = Some(report.render());
            Ok(out)
        }
    }
}

fn hol(cmd: &HolCommand, seed: u64) -> Result<Outcome> {
    let load = |h: &HolArgs| -> Result<(Subspace, Subspace, f64)> {
        let (x, y) = read_pair(&h.pair)?;
        Ok((x, y, h.a))
    };
    match cmd {
        HolCommand::Exists { hol, tol } => {
            check_tol(*tol)?;
            let (x, y, a) = load(hol)?;
            let e = hol_existence(&x, &y, a)?;
            let slack = tol.unwrap_or_else(|| tol_eig(x.ambient().max(1)));
            let exists = e.gap <= e.bound + slack;
            let r = HolExistsResult { exists, gap: e.gap, bound: e.bound, slack, by_blocks: e.by_blocks };
            Ok(Outcome::new("hol exists", exists, r)?.with_tol(*tol))
        }
        HolCommand::Member { hol, z, tol } => {
            check_tol(*tol)?;
            let (x, y, a) = load(hol)?;
            if !a.is_finite() {
                bail!("--a must be finite");
            }
            let z: Subspace = read(z)?;
            let defect = projection_defect(&hol_combination(&x, &y, &z, a)?);
            let threshold = tol.unwrap_or_else(|| tol_canon(x.ambient().max(1)));
            let member = defect <= threshold;
            Ok(Outcome::new("hol member", member, HolMemberResult { member, defect, threshold })?.with_tol(*tol))
        }
        HolCommand::Sample { hol, random } => {
            let (x, y, a) = load(hol)?;
            let form = two_proj_canonical(&x, &y, CLUSTER_TOL)?;
            let choices =
                if *random { HolChoices::random(&form, &mut rng(seed)) } else { HolChoices::canonical(&form) };
            Outcome::ok("hol sample", hol_sample(&x, &y, a, &choices)?)
        }
        HolCommand::Tvalues { hol } => {
            let (x, y, a) = load(hol)?;
            let desc = hol_t_values(&two_proj_canonical(&x, &y, CLUSTER_TOL)?, a)?;
            Outcome::new("hol tvalues", desc.admissible, desc)
        }
    }
}

fn construct(cmd: &ConstructCommand, seed: u64) -> Result<Outcome> {
    let herm = |name: &str, f: HermMap| Outcome::ok(name, f);
    let real = |name: &str, f: RealLinearMatMap| Outcome::ok(name, f);
    match cmd {
        ConstructCommand::Lk { k, m } => herm("construct lk", make_lk(*k, *m)?),
        ConstructCommand::Rho { k } => real("construct rho", make_rho(*k)?),
        ConstructCommand::Congruence { u, conj } => {
            let u: ComplexMatrix = read(u)?;
            let n = u.cols();
            herm("construct congruence", make_congruence(&u, *conj, n)?)
        }
        ConstructCommand::Tensor { p0, n } => herm("construct tensor", make_tensor(&read(p0)?, *n)?),
        ConstructCommand::Pq { p0, q0, n, k } => herm("construct pq", make_pq(&read(p0)?, &read(q0)?, *n, *k)?),
        ConstructCommand::Constant { p0, n, k } => herm("construct constant", make_constant(&read(p0)?, *n, *k)?),
        ConstructCommand::E2km { k, t, tau, phi } => {
            let tau = match tau {
                Some(path) => read(path)?,
                None => make_tau_rotation(*k, *phi)?,
            };
            herm("construct e2km", make_e2km(*k, *t, &tau, seed)?)
        }
        ConstructCommand::Hn2big { n, k } => herm("construct hn2big", make_hn_to_big(*n, *k)?),
        ConstructCommand::VectorEval { v0, domain } => {
            let v: ComplexMatrix = read(v0)?;
            if v.cols() != 1 {
                bail!("v0 must be a column vector, got {}x{}", v.rows(), v.cols());
            }
            let m = v.rows();
            let space = match domain {
                EvalDomain::Herm => RealSpace::Herm { n: m, traceless: false },
                EvalDomain::Traceless => RealSpace::Herm { n: m, traceless: true },
                EvalDomain::Mat => RealSpace::square(m),
            };
            real("construct vector-eval", make_vector_eval(&v.col(0), space)?)
        }
    }
}

/// Rejects a recovered class whose residual exceeds `--tol`.
fn bound_class(c: PreserverClass, tol: Option<f64>) -> PreserverClass {
    match tol {
        Some(t) if c.is_preserver() && (c.residual.is_nan() || c.residual > t) => {
            PreserverClass::not_a_preserver(format!("residual above --tol {t:e}"), c.residual)
        }
        _ => c,
    }
}

fn bound_recovery<T>(r: Recovery<T>, residual: impl Fn(&T) -> f64, tol: Option<f64>) -> Recovery<T> {
    match (r, tol) {
        (Recovery::Found(x), Some(t)) if residual(&x).is_nan() || residual(&x) > t => {
            Recovery::NotAPreserver { reason: format!("residual above --tol {t:e}"), residual: residual(&x) }
        }
        (r, _) => r,
    }
}

fn class_outcome(name: &str, c: PreserverClass, a: &ClassifyArgs) -> Result<Outcome> {
    let c = bound_class(c, a.tol);
    Ok(Outcome::new(name, c.is_preserver(), &c)?.with_tol(a.tol))
}

fn classify(cmd: &ClassifyCommand, seed: u64) -> Result<Outcome> {
    match cmd {
        ClassifyCommand::Iho(a) => {
            check_tol(a.tol)?;
            let f: HermMap = read(&a.input)?;
            class_outcome("classify iho", classify_iho(&f, seed)?, a)
        }
        ClassifyCommand::Dim2(a) => {
            check_tol(a.tol)?;
            let f: HermMap = read(&a.input)?;
            class_outcome("classify dim2", classify_dim2(&f, seed)?, a)
        }
        ClassifyCommand::Phkk { args, k, m } => {
            check_tol(args.tol)?;
            let f: HermMap = read(&args.input)?;
            class_outcome("classify phkk", classify_phkk(&f, *k, *m, seed)?, args)
        }
        ClassifyCommand::H0u(a) => {
            check_tol(a.tol)?;
            let f: RealLinearMatMap = read(&a.input)?;
            let r = bound_recovery(classify_h0u(&f)?, |x| x.residual, a.tol);
            let found = matches!(r, Recovery::Found(_));
            Ok(Outcome::new("classify h0u", found, r)?.with_tol(a.tol))
        }
        ClassifyCommand::C2m(a) => {
            check_tol(a.tol)?;
            let f: HermMap = read(&a.input)?;
            let r = bound_recovery(classify_c2m(&f)?, |x| x.residual, a.tol);
            let found = matches!(r, Recovery::Found(_));
            Ok(Outcome::new("classify c2m", found, r)?.with_tol(a.tol))
        }
    }
}
