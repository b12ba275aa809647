//! Scenario registry, reports, baselines and sweeps.
//!
//! Every scenario is a function of `(params, seed)`. Trial `t` draws its
//! randomness from a ChaCha stream seeded by `sha256(seed || id || t)`, so a
//! report does not depend on how rayon schedules the trials.

mod analysis;
mod baseline;
mod energy;
mod geometry;
mod table;

use std::fmt;
use std::path::Path;
use std::time::Instant;

use base64::Engine;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::combinatorics::PointSet;
use crate::error::{Error, Result};
use crate::field::{FFunction, PrimeField};
use crate::surfaces::SurfaceFunction;

pub use baseline::{BaselineEntry, BaselineStore, SLACK};
pub use table::{exponent_table, ExponentRow, ExponentTable, MeasuredRow};

pub const SCHEMA: &str = "fflab-report/1";
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ExactIdentity,
    ConstantTracked,
    ExponentArith,
}

impl ScenarioKind {
    fn metric_name(self) -> &'static str {
        match self {
            ScenarioKind::ExactIdentity => "max_deviation",
            ScenarioKind::ConstantTracked => "measured_constant",
            ScenarioKind::ExponentArith => "max_error",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::ExactIdentity => "exact_identity",
            ScenarioKind::ConstantTracked => "constant_tracked",
            ScenarioKind::ExponentArith => "exponent_arith",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ReportOnly => "report_only",
        })
    }
}

/// Field size, dimension and number of random trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub prime: u32,
    pub dim: usize,
    pub trials: usize,
}

/// The run that produced a committed baseline.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub name: &'static str,
    pub params: Params,
    pub seed: u64,
    /// Bumped whenever the scenario's measurement changes.
    pub revision: u32,
}

impl Oracle {
    pub fn descriptor(&self, id: &str) -> String {
        format!(
            "{id}|{}|p={}|d={}|trials={}|seed={}|rev={}|slack={SLACK}",
            self.name, self.params.prime, self.params.dim, self.params.trials, self.seed, self.revision
        )
    }

    pub fn hash(&self, id: &str) -> String {
        hex(&Sha256::digest(self.descriptor(id).as_bytes()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Scenario {
    pub id: &'static str,
    /// What the scenario checks, in words.
    pub anchor: &'static str,
    pub kind: ScenarioKind,
    pub primes: &'static [u32],
    pub dims: &'static [usize],
    pub trials: usize,
    pub tolerance: f64,
    pub oracle: Option<Oracle>,
    run: fn(&Ctx) -> Result<Outcome>,
}

impl Scenario {
    pub fn default_params(&self) -> Params {
        Params {
            prime: self.primes[0],
            dim: self.dims[0],
            trials: self.trials,
        }
    }
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

const fn oracle(name: &'static str, prime: u32, dim: usize, trials: usize) -> Option<Oracle> {
    Some(Oracle {
        name,
        params: Params { prime, dim, trials },
        seed: 0,
        revision: 1,
    })
}

macro_rules! scenario {
    ($id:literal, $anchor:literal, $kind:ident, $primes:expr, $dims:expr, $trials:literal, $run:path) => {
        scenario!($id, $anchor, $kind, $primes, $dims, $trials, $run, None, EXACT_TOLERANCE)
    };
    ($id:literal, $anchor:literal, $kind:ident, $primes:expr, $dims:expr, $trials:literal, $run:path, $oracle:expr) => {
        scenario!($id, $anchor, $kind, $primes, $dims, $trials, $run, $oracle, EXACT_TOLERANCE)
    };
    ($id:literal, $anchor:literal, $kind:ident, $primes:expr, $dims:expr, $trials:literal, $run:path, $oracle:expr, $tol:expr) => {
        Scenario {
            id: $id,
            anchor: $anchor,
            kind: ScenarioKind::$kind,
            primes: &$primes,
            dims: &$dims,
            trials: $trials,
            tolerance: $tol,
            oracle: $oracle,
            run: $run,
        }
    };
}

static REGISTRY: [Scenario; 38] = [
    scenario!("FT-1", "closed form of the inverse transform of the hyperbolic paraboloid measure", ExactIdentity, [3, 5, 7], [3, 5], 1, analysis::ft1),
    scenario!("FT-2", "closed form of the inverse transform of the paraboloid measure", ExactIdentity, [3, 5, 7], [3, 5], 1, analysis::ft2),
    scenario!("FT-3", "Plancherel and inversion for the transform on F_p^d", ExactIdentity, [3, 5, 7], [3], 20, analysis::ft3),
    scenario!("ST-1", "L^2 restriction bound for functions bounded below on their support", ConstantTracked, [3, 5, 7], [3], 60, analysis::st1, oracle("random suite at the smallest field", 3, 3, 400)),
    scenario!("ST-2", "L^2 restriction bound for functions bounded above", ConstantTracked, [3, 5, 7], [3], 60, analysis::st2, oracle("random suite at the smallest field", 3, 3, 400)),
    scenario!("ST-3", "R*(2 -> 2) = (p^d / |S|)^{1/2} against power iteration, and the L^2 bound it gives", ExactIdentity, [3, 5], [3], 3, analysis::st3, None, 1e-6),
    scenario!("ST-4", "interpolating an L^2 bound against kernel decay, exponent arithmetic", ExponentArith, [3, 5], [3], 1, analysis::st4),
    scenario!("ST-5", "L^2 restriction bound from kernel decay for functions of constant size", ConstantTracked, [3, 5, 7], [3], 60, analysis::st5, oracle("random suite at the smallest field", 3, 3, 400)),
    scenario!("ST-6", "restriction bound from a power bound on R*(2 -> 2)", ConstantTracked, [3, 5, 7], [3], 60, analysis::st6, oracle("random suite at the smallest field", 3, 3, 400)),
    scenario!("EQ-1", "extension norms agree on surfaces of congruent forms", ExactIdentity, [3, 5, 7], [3, 4], 20, analysis::eq1),
    scenario!("BR-1", "convolution kernel maps a modulated line to a modulated tube", ExactIdentity, [5, 3, 7], [3], 1, analysis::br1),
    scenario!("BR-2", "L^2 bound for the kernel on line-supported inputs", ConstantTracked, [3, 5, 7], [3], 40, analysis::br2, oracle("random suite at the smallest field", 3, 3, 300)),
    scenario!("BR-3", "restriction bound for unions of axis-parallel segments", ConstantTracked, [3, 5, 7], [3], 40, analysis::br3, oracle("random suite at the smallest field", 3, 3, 300)),
    scenario!("EN-1", "Fourier-side energy equals the quadruple count", ExactIdentity, [3, 5, 7], [3], 200, energy::en1),
    scenario!("EN-2", "energy against |E|^{5/2} plus cubed line counts on the hyperbolic paraboloid", ConstantTracked, [3, 5, 7], [3], 100, energy::en2, oracle("exhaustive over all subsets of the surface", 3, 3, 0)),
    scenario!("EN-3", "off-diagonal energy against |E|^{5/2} on points with nonzero coordinates", ConstantTracked, [3, 5, 7], [3], 100, energy::en3, oracle("exhaustive over all subsets of the surface", 3, 3, 0)),
    scenario!("EN-4", "L^4 extension bound for sets with small line intersections", ConstantTracked, [3, 5, 7], [3], 60, energy::en4, oracle("random suite at the smallest field", 3, 3, 400)),
    scenario!("IN-1", "energy bounded by hyperplane incidences after a Galilean shift", ConstantTracked, [3, 5, 7], [3, 5], 40, energy::in1, oracle("random suite at the smallest field", 3, 3, 300)),
    scenario!("IN-2", "incidence bound from pairwise intersections and multiplicities", ConstantTracked, [3, 5, 7], [3, 4], 40, energy::in2, oracle("random suite at the smallest field", 3, 3, 300)),
    scenario!("MT-1", "slice convolution equals a rescaled extension (modulus)", ExactIdentity, [5, 3, 7], [3, 5], 100, analysis::mt1),
    scenario!("MT-2", "L^2 restriction bound from slice-wise L^4 extension bounds", ConstantTracked, [3, 5], [3, 5], 40, analysis::mt2, oracle("random suite at the smallest field", 3, 3, 300)),
    scenario!("PL-1", "transform of a function embedded in a plane", ExactIdentity, [5, 3, 7], [3], 100, analysis::pl1),
    scenario!("PL-2", "restriction bound for sets covered by few axis planes", ConstantTracked, [3, 5, 7], [3], 40, analysis::pl2, oracle("random suite at the smallest field", 3, 3, 300)),
    scenario!("PL-3", "sharp restriction estimate on level sets of low planar entropy", ConstantTracked, [3, 5, 7], [3], 40, analysis::pl3, oracle("random suite at the smallest field", 3, 3, 300)),
    scenario!("QF-1", "Witt index formula against exhaustive isotropic search", ExactIdentity, [3, 5, 7], [2, 4], 1, geometry::qf1),
    scenario!("QF-2", "complementary isotropic subspace pairs dually", ExactIdentity, [3, 5, 7], [2, 4], 100, geometry::qf2),
    scenario!("QF-3", "character-sum indicator of an orthogonal complement", ExactIdentity, [3, 5], [4, 2, 3], 20, geometry::qf3),
    scenario!("QF-4", "restricted forms fall in the allowed tables", ExactIdentity, [3, 5], [5, 4, 6, 7], 100, geometry::qf4),
    scenario!("KK-1", "maximal function L^m ratio", ConstantTracked, [3, 5, 7, 11, 13], [2, 3], 60, geometry::kk1, oracle("exhaustive over all indicator functions", 3, 2, 0)),
    scenario!("KK-2", "primal and dual lower bounds for the maximal operator agree", ExactIdentity, [3, 5, 7], [2, 3], 10, geometry::kk2, None, 1e-6),
    scenario!("KK-3", "extension of a modulated Kakeya configuration", ExactIdentity, [3, 5], [1, 2], 100, geometry::kk3),
    scenario!("KK-4", "Kakeya sets have density bounded below", ConstantTracked, [3, 5, 7, 11, 13], [2, 3], 20, geometry::kk4, oracle("exhaustive over all line configurations", 3, 2, 0)),
    scenario!("MX-1", "coset form of the extension operator", ExactIdentity, [5, 3, 7], [3, 5], 20, geometry::mx1),
    scenario!("MX-2", "mixed-norm extension ratio over isotropic cosets", ConstantTracked, [3, 5, 7], [3, 5], 20, geometry::mx2, oracle("random suite at the smallest field", 3, 3, 100)),
    scenario!("MX-3", "restriction bound for slice-structured sets", ConstantTracked, [5, 3], [3, 5], 20, geometry::mx3, oracle("random suite at the smallest field", 3, 5, 60)),
    scenario!("EX-1", "closed-form energy exponents", ExponentArith, [3], [3], 1, energy::ex1),
    scenario!("EX-2", "recursive energy exponent", ExponentArith, [3], [3], 1, energy::ex2),
    scenario!("EX-3", "measured energy exponents sit below the curves", ExponentArith, [3, 5, 7], [3, 4, 5], 40, energy::ex3),
];

// MAIN-1 is kept out of the array so the macro stays uniform.
static MAIN: Scenario = scenario!("MAIN-1", "exponent landscape rendered against the stated values", ExponentArith, [3], [3], 1, table::main1);

/// All scenarios in registry order.
pub fn registry() -> Vec<&'static Scenario> {
    REGISTRY.iter().chain(std::iter::once(&MAIN)).collect()
}

pub fn find(id: &str) -> Result<&'static Scenario> {
    registry()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownScenario(id.to_string()))
}

/// Seed for trial `t` of scenario `id`: the first eight bytes of
/// `sha256(seed_le || id || t_le)`.
pub fn trial_seed(seed: u64, id: &str, t: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(id.as_bytes());
    h.update(t.to_le_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// A counterexample or worst case, serialised for diffing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// Dense values on `F_p^dim` as base64 of interleaved little-endian
    /// `f64` pairs.
    Function { prime: u32, dim: usize, data: String },
    PointSet { prime: u32, dim: usize, points: Vec<Vec<u32>> },
    /// Raw numbers, same encoding as `Function`.
    Values { data: String },
}

fn encode_complex(values: &[Complex64]) -> String {
    let mut bytes = Vec::with_capacity(values.len() * 16);
    for z in values {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

/// Inverse of the witness encoding.
pub fn decode_complex(data: &str) -> Option<Vec<Complex64>> {
    let bytes = base64::engine::general_purpose::STANDARD.decode(data).ok()?;
    if bytes.len() % 16 != 0 {
        return None;
    }
    Some(
        bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect(),
    )
}

impl Witness {
    pub fn function(f: &FFunction) -> Witness {
        Witness::Function {
            prime: f.p(),
            dim: f.dim,
            data: encode_complex(&f.data),
        }
    }

    /// A surface function as a function of its parameter in `F^{d-1}`.
    pub fn surface(g: &SurfaceFunction) -> Witness {
        Witness::Function {
            prime: g.surface.field().p(),
            dim: g.surface.dim() - 1,
            data: encode_complex(&g.values),
        }
    }

    pub fn points(e: &PointSet) -> Witness {
        Witness::PointSet {
            prime: e.field().p(),
            dim: e.dim(),
            points: e.points().to_vec(),
        }
    }

    pub fn values(v: &[f64]) -> Witness {
        let z: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Witness::Values {
            data: encode_complex(&z),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    /// `None` when the measurement is not a finite number.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema: String,
    pub scenario: String,
    pub kind: ScenarioKind,
    pub params: Params,
    pub seed: u64,
    pub status: Status,
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

/// What a scenario function hands back: the metric, details for the
/// report, the worst input seen, and any broken side conditions.
pub(crate) struct Outcome {
    pub value: f64,
    pub detail: Value,
    pub witness: Witness,
    pub violations: usize,
}

impl Outcome {
    pub fn new(value: f64, detail: Value, witness: Witness) -> Outcome {
        Outcome {
            value,
            detail,
            witness,
            violations: 0,
        }
    }

    pub fn with_violations(mut self, n: usize) -> Outcome {
        self.violations = n;
        self
    }
}

/// Per-run context handed to scenario functions.
pub(crate) struct Ctx {
    pub id: &'static str,
    pub params: Params,
    pub seed: u64,
}

impl Ctx {
    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.params.prime)
    }

    pub fn p(&self) -> u32 {
        self.params.prime
    }

    pub fn d(&self) -> usize {
        self.params.dim
    }

    pub fn rng(&self, t: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(trial_seed(self.seed, self.id, t as u64))
    }

    pub fn bad(&self, name: &'static str, value: impl fmt::Display, reason: &str) -> Error {
        Error::BadParameter {
            scenario: self.id.to_string(),
            name,
            value: value.to_string(),
            reason: reason.to_string(),
        }
    }

    pub fn require(&self, ok: bool, name: &'static str, value: impl fmt::Display, reason: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(self.bad(name, value, reason))
        }
    }

    pub fn require_dims(&self, allowed: &[usize]) -> Result<()> {
        self.require(
            allowed.contains(&self.d()),
            "dim",
            self.d(),
            &format!("supported dimensions are {allowed:?}"),
        )
    }

    pub fn require_primes(&self, max: u32) -> Result<()> {
        self.require(self.p() <= max, "prime", self.p(), &format!("limited to p <= {max}"))
    }

    /// Runs `f` on trials `0..n` in parallel; results come back in trial
    /// order.
    pub fn trials<T: Send>(&self, n: usize, f: impl Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync) -> Result<Vec<T>> {
        (0..n)
            .into_par_iter()
            .map(|t| {
                let mut rng = self.rng(t);
                f(t, &mut rng)
            })
            .collect()
    }
}

/// The first item with the largest value; NaN counts as largest.
pub(crate) fn worst<T>(items: impl IntoIterator<Item = (f64, T)>) -> Option<(f64, T)> {
    let mut best: Option<(f64, T)> = None;
    for (v, w) in items {
        let better = match &best {
            None => true,
            Some((b, _)) => !b.is_nan() && (v.is_nan() || v > *b),
        };
        if better {
            best = Some((v, w));
        }
    }
    best
}

pub(crate) fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
}

pub(crate) fn random_phase(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
}

pub(crate) fn log_p(p: u32, x: f64) -> f64 {
    x.ln() / f64::from(p).ln()
}

/// Runs scenarios against a baseline store.
#[derive(Clone, Debug)]
pub struct Runner {
    baselines: BaselineStore,
    /// Record wall-clock time in reports.
    pub timing: bool,
}

impl Runner {
    /// Checks every stored oracle hash against the registry first.
    pub fn new(baselines: BaselineStore) -> Result<Runner> {
        baselines.verify()?;
        Ok(Runner {
            baselines,
            timing: true,
        })
    }

    pub fn with_embedded() -> Result<Runner> {
        Runner::new(BaselineStore::embedded()?)
    }

    pub fn baselines(&self) -> &BaselineStore {
        &self.baselines
    }

    fn check_baseline(&self, sc: &Scenario) -> Result<Option<f64>> {
        if sc.kind != ScenarioKind::ConstantTracked {
            return Ok(None);
        }
        self.baselines
            .get(sc.id)
            .map(|e| Some(e.constant))
            .ok_or_else(|| Error::MissingBaseline(sc.id.to_string()))
    }

    pub fn run(&self, id: &str, params: Params, seed: u64) -> Result<ScenarioReport> {
        let sc = find(id)?;
        let baseline = self.check_baseline(sc)?;
        let start = Instant::now();
        let out = execute(sc, params, seed)?;
        let elapsed = start.elapsed().as_millis() as u64;
        let mut report = judge(sc, params, seed, out, baseline);
        if self.timing {
            report.runtime_ms = Some(elapsed);
        }
        Ok(report)
    }

    /// Cross product of ids, primes and dims. Missing prime or dim lists
    /// fall back to each scenario's defaults; combinations a scenario does
    /// not support are listed as skipped.
    pub fn sweep(&self, spec: &SweepSpec) -> Result<Sweep> {
        let scenarios: Vec<&Scenario> = spec.ids.iter().map(|id| find(id)).collect::<Result<_>>()?;
        for sc in &scenarios {
            self.check_baseline(sc)?;
        }
        let mut jobs = Vec::new();
        for sc in &scenarios {
            let primes = spec.primes.clone().unwrap_or_else(|| sc.primes.to_vec());
            let dims = spec.dims.clone().unwrap_or_else(|| sc.dims.to_vec());
            for &prime in &primes {
                for &dim in &dims {
                    let trials = spec.trials.unwrap_or(sc.trials);
                    jobs.push((sc.id, Params { prime, dim, trials }));
                }
            }
        }
        let results: Vec<Result<ScenarioReport>> = jobs
            .par_iter()
            .map(|(id, params)| self.run(id, *params, spec.seed))
            .collect();
        let mut sweep = Sweep::default();
        for ((id, params), r) in jobs.into_iter().zip(results) {
            match r {
                Ok(rep) => sweep.reports.push(rep),
                Err(Error::BadParameter { reason, .. }) => sweep.skipped.push(Skipped {
                    scenario: id.to_string(),
                    params,
                    reason,
                }),
                Err(e) => return Err(e),
            }
        }
        Ok(sweep)
    }
}

fn execute(sc: &Scenario, params: Params, seed: u64) -> Result<Outcome> {
    let ctx = Ctx {
        id: sc.id,
        params,
        seed,
    };
    ctx.field()?;
    (sc.run)(&ctx)
}

fn judge(sc: &Scenario, params: Params, seed: u64, out: Outcome, baseline: Option<f64>) -> ScenarioReport {
    let value = out.value;
    let (status, limit) = match sc.kind {
        ScenarioKind::ExactIdentity | ScenarioKind::ExponentArith => {
            (pass_if(value < sc.tolerance && out.violations == 0), Some(sc.tolerance))
        }
        ScenarioKind::ConstantTracked => match baseline {
            Some(b) => {
                let limit = SLACK * b;
                (pass_if(value <= limit * (1.0 + 1e-12) && out.violations == 0), Some(limit))
            }
            None => (Status::ReportOnly, None),
        },
    };
    let mut detail = out.detail;
    if out.violations > 0 {
        if let Value::Object(m) = &mut detail {
            m.insert("violations".into(), Value::from(out.violations));
        }
    }
    ScenarioReport {
        schema: SCHEMA.to_string(),
        scenario: sc.id.to_string(),
        kind: sc.kind,
        params,
        seed,
        status,
        metric: Metric {
            name: sc.kind.metric_name().to_string(),
            value: value.is_finite().then_some(value),
        },
        baseline,
        limit,
        detail,
        witness: (status == Status::Fail).then_some(out.witness),
        runtime_ms: None,
    }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Runs a scenario against the committed baselines.
pub fn run_scenario(id: &str, params: Params, seed: u64) -> Result<ScenarioReport> {
    Runner::with_embedded()?.run(id, params, seed)
}

/// Measures a constant-tracked scenario at its oracle parameters.
pub fn oracle_constant(id: &str) -> Result<BaselineEntry> {
    let sc = find(id)?;
    let o = sc.oracle.ok_or_else(|| Error::BadParameter {
        scenario: id.to_string(),
        name: "id",
        value: id.to_string(),
        reason: "scenario has no oracle".into(),
    })?;
    let out = execute(sc, o.params, o.seed)?;
    Ok(BaselineEntry {
        constant: out.value,
        oracle: o.name.to_string(),
        params: o.params,
        seed: o.seed,
        oracle_hash: o.hash(id),
    })
}

#[derive(Clone, Debug, Default)]
pub struct SweepSpec {
    pub ids: Vec<String>,
    pub primes: Option<Vec<u32>>,
    pub dims: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub scenario: String,
    pub params: Params,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub reports: Vec<ScenarioReport>,
    pub skipped: Vec<Skipped>,
}

#[derive(Serialize)]
struct SweepFile<'a> {
    schema: &'static str,
    summary: Summary,
    reports: &'a [ScenarioReport],
    skipped: &'a [Skipped],
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub report_only: usize,
    pub skipped: usize,
}

impl Sweep {
    pub fn summary(&self) -> Summary {
        let count = |s| self.reports.iter().filter(|r| r.status == s).count();
        Summary {
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            report_only: count(Status::ReportOnly),
            skipped: self.skipped.len(),
        }
    }

    pub fn failed(&self) -> bool {
        self.summary().fail > 0
    }

    pub fn to_json(&self) -> String {
        let file = SweepFile {
            schema: SCHEMA,
            summary: self.summary(),
            reports: &self.reports,
            skipped: &self.skipped,
        };
        serde_json::to_string_pretty(&file).expect("reports serialise")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scenario,prime,dim,trials,seed,status,metric,runtime_ms\n");
        for r in &self.reports {
            let metric = r.metric.value.map_or_else(|| "nan".to_string(), |v| v.to_string());
            let rt = r.runtime_ms.map_or_else(String::new, |v| v.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.scenario, r.params.prime, r.params.dim, r.params.trials, r.seed, r.status, metric, rt
            ));
        }
        out
    }

    /// Writes `report.json` and `summary.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let json = dir.join("report.json");
        std::fs::write(&json, self.to_json() + "\n").map_err(io(&json))?;
        let csv = dir.join("summary.csv");
        std::fs::write(&csv, self.to_csv()).map_err(io(&csv))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique() {
        let mut ids: Vec<&str> = registry().iter().map(|s| s.id).collect();
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n);
        for sc in registry() {
            assert_eq!(sc.kind == ScenarioKind::ConstantTracked, sc.oracle.is_some(), "{}", sc.id);
        }
    }

    #[test]
    fn witness_round_trip() {
        let z = vec![Complex64::new(1.5, -2.0), Complex64::new(0.0, 1e-300)];
        assert_eq!(decode_complex(&encode_complex(&z)).unwrap(), z);
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(7, "FT-1", 0), trial_seed(7, "FT-1", 1));
        assert_ne!(trial_seed(7, "FT-1", 0), trial_seed(7, "FT-2", 0));
        assert_eq!(trial_seed(7, "FT-1", 3), trial_seed(7, "FT-1", 3));
    }
}
