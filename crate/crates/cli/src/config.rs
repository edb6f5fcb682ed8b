//! TOML problem configuration and its translation into core objects.

use std::path::{Path, PathBuf};

use hardy_core::hardy::{classical_hardy_data, hardy_poincare_data, sharp_case_measures};
use hardy_core::model::{make_hp_weights, TalentiProfile};
use hardy_core::radial::Grading;
use hardy_core::rayleigh::{Boundary, Init};
use hardy_core::{
    Coefficient, DomainKind, HardyData, PdiProblem, PsiGPair, QuadratureGrid, RadialDomain, RadialProfile, ScalarFn,
    WeightFunction,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub seed: u64,
    pub domain: Option<DomainConfig>,
    pub weights: Option<WeightsConfig>,
    pub nonlinearity: Option<NonlinearityConfig>,
    pub pair: Option<PairConfig>,
    pub solution: Option<SolutionConfig>,
    #[serde(default)]
    pub run: RunConfig,
    pub hardy: Option<HardyConfig>,
    pub minimize: Option<MinimizeConfig>,
    pub probe: Option<ProbeConfig>,
    pub transform: Option<TransformConfig>,
    /// Directory that relative CSV paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindConfig {
    Ball,
    Annulus,
    FullSpace,
    Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub n: u32,
    #[serde(default)]
    pub r_min: f64,
    pub r_max: f64,
    pub kind: KindConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    /// Exponent of the operator.
    pub p: f64,
    pub a: WeightSpec,
    pub b: WeightSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    Power { exponent: f64, #[serde(default = "one")] coeff: f64 },
    Talenti { gamma: f64, p: f64 },
    HpV1 { gamma: f64, p: f64, r_param: f64 },
    ExpPower { coeff: f64, exponent: f64 },
    Product { factors: Vec<WeightSpec> },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearityConfig {
    Identity,
    Power { q: f64, #[serde(default = "one")] coeff: f64 },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PairFamily {
    Power { alpha: f64 },
    LogProduct { a: f64 },
    Exponential { c: f64 },
    ExpOverT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairConfig {
    #[serde(flatten)]
    pub family: PairFamily,
    /// Declared compatibility constant; defaults to the family's own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolutionConfig {
    Talenti { n: u32, p: f64, beta: f64, gamma: f64 },
    EigenSin { #[serde(default = "one")] frequency: f64 },
    Constant { value: f64 },
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaChoice {
    Explicit(f64),
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradingConfig {
    Log,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid_size: usize,
    /// Log for spherical domains, uniform for intervals when absent.
    pub grading: Option<GradingConfig>,
    /// Innermost node for domains closing the origin.
    pub inner: Option<f64>,
    /// Relative tolerance of the pointwise supersolution check.
    pub tol: f64,
    /// Relative tolerance of the weak-form margins.
    pub weak_tol: f64,
    pub sigma: SigmaChoice,
    pub test_functions: usize,
    pub weak_test_functions: usize,
    /// Build Hardy measures even when the hypothesis checks fail.
    pub waive_assumptions: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid_size: hardy_core::radial::DEFAULT_NODES,
            grading: None,
            inner: None,
            tol: hardy_core::supersolution::STRONG_REL_TOL,
            weak_tol: 1e-5,
            sigma: SigmaChoice::Named("sigma0".into()),
            test_functions: 20,
            weak_test_functions: 5,
            waive_assumptions: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HardyConfig {
    HardyPoincare { n: u32, p: f64, gamma: f64, #[serde(default = "one")] r_param: f64 },
    Classical { n: u32, p: f64 },
    /// Weights `a`, `b` and `p` taken from the `weights` block.
    SharpCase,
    /// Measures manufactured from the `solution`, `pair` and `run.sigma`.
    Supersolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryConfig {
    DirichletBoth,
    DirichletOuter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitConfig {
    Auto,
    Tent,
    TalentiLike { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeConfig {
    pub boundary: BoundaryConfig,
    pub max_iterations: usize,
    pub init: InitConfig,
    /// Overrides the constant implied by the Hardy data.
    pub claimed: Option<f64>,
    /// Largest accepted relative gap between achieved and claimed values.
    pub max_gap: f64,
    /// Repeat the minimization for each outer radius.
    pub r_max_sweep: Option<Vec<f64>>,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            boundary: BoundaryConfig::DirichletBoth,
            max_iterations: 2000,
            init: InitConfig::Auto,
            claimed: None,
            max_gap: 0.1,
            r_max_sweep: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// The cutoff of the power family equals 1 below `cutoff_inner` and 0 above `cutoff_outer`.
    pub cutoff_inner: f64,
    pub cutoff_outer: f64,
    pub params: ParamSpec,
    pub claimed: Option<f64>,
    #[serde(default = "default_gap")]
    pub max_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub n: u32,
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(default = "default_t_rmin")]
    pub r_min: f64,
    #[serde(default = "default_t_rmax")]
    pub r_max: f64,
    #[serde(default = "default_t_nodes")]
    pub nodes: Vec<usize>,
    #[serde(default = "default_t_tol")]
    pub tol: f64,
}

fn one() -> f64 {
    1.0
}
fn default_gap() -> f64 {
    0.1
}
fn default_t_rmin() -> f64 {
    1e-6
}
fn default_t_rmax() -> f64 {
    1e3
}
fn default_t_nodes() -> Vec<usize> {
    vec![2000, 4000]
}
fn default_t_tol() -> f64 {
    1e-4
}

fn cfg_err(path: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config { path: path.to_string(), message: message.to_string() }
}

fn require<'a, T>(block: &'a Option<T>, path: &str) -> Result<&'a T, CliError> {
    block.as_ref().ok_or_else(|| cfg_err(path, "block is required for this command"))
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_size: Option<usize>,
    pub tol: Option<f64>,
}

impl ProblemConfig {
    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let mut cfg: ProblemConfig = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| locate(text, s.start)).unwrap_or_default();
            cfg_err(&path, e.message())
        })?;
        cfg.base_dir = base_dir.into();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, dir)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(n) = o.grid_size {
            self.run.grid_size = n;
        }
        if let Some(t) = o.tol {
            self.run.tol = t;
        }
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    pub fn domain(&self) -> Result<RadialDomain, CliError> {
        let d = require(&self.domain, "domain")?;
        let kind = match d.kind {
            KindConfig::Ball => DomainKind::Ball,
            KindConfig::Annulus => DomainKind::Annulus,
            KindConfig::FullSpace => DomainKind::FullSpaceTruncated,
            KindConfig::Interval => DomainKind::Interval,
        };
        RadialDomain::new(d.n, d.r_min, d.r_max, kind).map_err(|e| cfg_err("domain", e))
    }

    pub fn grading(&self, domain: &RadialDomain) -> Grading {
        match self.run.grading {
            Some(GradingConfig::Log) => Grading::Log,
            Some(GradingConfig::Uniform) => Grading::Uniform,
            None if domain.kind() == DomainKind::Interval => Grading::Uniform,
            None => Grading::Log,
        }
    }

    pub fn grid_for(&self, domain: &RadialDomain) -> Result<QuadratureGrid, CliError> {
        let grading = self.grading(domain);
        let g = match self.run.inner {
            Some(inner) => QuadratureGrid::with_inner(domain, self.run.grid_size, grading, inner),
            None => QuadratureGrid::new(domain, self.run.grid_size, grading),
        };
        g.map_err(|e| cfg_err("run.grid_size", e))
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    fn read_table(&self, path: &Path, field: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let full = self.resolve(path);
        if !full.exists() {
            return Err(cfg_err(field, format!("file {} does not exist", full.display())));
        }
        let mut rdr = csv::Reader::from_path(&full).map_err(|e| cfg_err(field, e))?;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| cfg_err(field, e))?;
            let parse = |i: usize| -> Result<f64, CliError> {
                rec.get(i)
                    .ok_or_else(|| cfg_err(field, "expected two columns"))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| cfg_err(field, e))
            };
            x.push(parse(0)?);
            y.push(parse(1)?);
        }
        Ok((x, y))
    }

    fn weight(&self, spec: &WeightSpec, field: &str, n: u32) -> Result<WeightFunction, CliError> {
        let w = match spec {
            WeightSpec::Constant { value } => WeightFunction::constant(*value).map_err(|e| cfg_err(field, e))?,
            WeightSpec::Power { exponent, coeff } => {
                let base = WeightFunction::Power { exponent: *exponent };
                if *coeff == 1.0 {
                    base
                } else {
                    WeightFunction::constant(*coeff).map_err(|e| cfg_err(field, e))?.times(base)
                }
            }
            WeightSpec::Talenti { gamma, p } => WeightFunction::Talenti { gamma: *gamma, p: *p },
            WeightSpec::HpV1 { gamma, p, r_param } => make_hp_weights(n, *p, *gamma, *r_param).map_err(|e| cfg_err(field, e))?.0,
            WeightSpec::ExpPower { coeff, exponent } => WeightFunction::ExpPower { coeff: *coeff, exponent: *exponent },
            WeightSpec::Product { factors } => {
                let mut out = Vec::with_capacity(factors.len());
                for (i, f) in factors.iter().enumerate() {
                    out.push(self.weight(f, &format!("{field}.factors[{i}]"), n)?);
                }
                WeightFunction::Product(out)
            }
            WeightSpec::Csv { path } => {
                let (r, v) = self.read_table(path, &format!("{field}.path"))?;
                let prof = RadialProfile::new(r, v).map_err(|e| cfg_err(field, e))?;
                WeightFunction::tabulated(prof).map_err(|e| cfg_err(field, e))?
            }
        };
        Ok(w)
    }

    fn coefficient(&self, spec: &WeightSpec, field: &str, n: u32) -> Result<Coefficient, CliError> {
        if let WeightSpec::Csv { path } = spec {
            let (r, v) = self.read_table(path, &format!("{field}.path"))?;
            if v.iter().any(|&x| x < 0.0) {
                return Ok(Coefficient::Signed(RadialProfile::new(r, v).map_err(|e| cfg_err(field, e))?));
            }
        }
        Ok(Coefficient::Weight(self.weight(spec, field, n)?))
    }

    pub fn weights(&self) -> Result<(f64, WeightFunction, WeightFunction), CliError> {
        let w = require(&self.weights, "weights")?;
        let n = self.domain.as_ref().map_or(1, |d| d.n);
        Ok((w.p, self.weight(&w.a, "weights.a", n)?, self.weight(&w.b, "weights.b", n)?))
    }

    pub fn phi(&self) -> Result<ScalarFn, CliError> {
        Ok(match require(&self.nonlinearity, "nonlinearity")? {
            NonlinearityConfig::Identity => ScalarFn::identity(),
            NonlinearityConfig::Power { q, coeff } => ScalarFn::scaled_power(*coeff, *q),
            NonlinearityConfig::Csv { path } => {
                let (t, values) = self.read_table(path, "nonlinearity.path")?;
                ScalarFn::Table { t, values }
            }
        })
    }

    pub fn problem(&self) -> Result<PdiProblem, CliError> {
        let domain = self.domain()?;
        let w = require(&self.weights, "weights")?;
        let (p, a, _) = self.weights()?;
        let b = self.coefficient(&w.b, "weights.b", domain.n())?;
        PdiProblem::new(domain, p, a, b, self.phi()?).map_err(|e| cfg_err("weights", e))
    }

    pub fn pair(&self) -> Result<PsiGPair, CliError> {
        let pc = require(&self.pair, "pair")?;
        let mut pair = match pc.family {
            PairFamily::Power { alpha } => PsiGPair::power(alpha),
            PairFamily::LogProduct { a } => PsiGPair::log_product(a).map_err(|e| cfg_err("pair.a", e))?,
            PairFamily::Exponential { c } => PsiGPair::exponential(c).map_err(|e| cfg_err("pair.c", e))?,
            PairFamily::ExpOverT => PsiGPair::exp_over_t(),
        };
        if let Some(c) = pc.constant {
            pair.c = c;
        }
        Ok(pair)
    }

    pub fn solution(&self, grid: &QuadratureGrid) -> Result<RadialProfile, CliError> {
        let nodes = grid.nodes();
        match require(&self.solution, "solution")? {
            SolutionConfig::Talenti { n, p, beta, gamma } => {
                if let Some(d) = &self.domain {
                    if d.n != *n {
                        return Err(cfg_err("solution.n", format!("dimension {n} differs from domain.n = {}", d.n)));
                    }
                }
                if let Some(w) = &self.weights {
                    if w.p != *p {
                        return Err(cfg_err("solution.p", format!("exponent {p} differs from weights.p = {}", w.p)));
                    }
                }
                let t = TalentiProfile::new(*n, *p, *beta, *gamma).map_err(|e| cfg_err("solution", e))?;
                t.sample(nodes).map_err(|e| cfg_err("solution", e))
            }
            SolutionConfig::EigenSin { frequency } => {
                let k = *frequency;
                RadialProfile::from_fn_with_derivative(nodes, |r| (k * r).sin(), |r| k * (k * r).cos())
                    .map_err(|e| cfg_err("solution", e))
            }
            SolutionConfig::Constant { value } => RadialProfile::constant(nodes, *value).map_err(|e| cfg_err("solution", e)),
            SolutionConfig::Csv { path } => {
                let (r, v) = self.read_table(path, "solution.path")?;
                let prof = RadialProfile::new(r, v).map_err(|e| cfg_err("solution", e))?;
                prof.resample(nodes).map_err(|e| cfg_err("solution", e))
            }
        }
    }

    /// The explicit shift, validated against the pair constant; `None` selects σ₀.
    pub fn explicit_sigma(&self, pair: &PsiGPair) -> Result<Option<f64>, CliError> {
        match &self.run.sigma {
            SigmaChoice::Named(s) if s == "sigma0" => Ok(None),
            SigmaChoice::Named(s) => Err(cfg_err("run.sigma", format!("expected a number or \"sigma0\", got \"{s}\""))),
            SigmaChoice::Explicit(s) if s.partial_cmp(&pair.c) != Some(std::cmp::Ordering::Less) => Err(cfg_err(
                "run.sigma",
                format!("shift sigma = {s} must lie strictly below the pair constant C = {}", pair.c),
            )),
            SigmaChoice::Explicit(s) => Ok(Some(*s)),
        }
    }

    pub fn boundary(&self) -> Boundary {
        match self.minimize.as_ref().map_or(BoundaryConfig::DirichletBoth, |m| m.boundary) {
            BoundaryConfig::DirichletBoth => Boundary::DirichletBoth,
            BoundaryConfig::DirichletOuter => Boundary::DirichletOuter,
        }
    }

    pub fn init(&self) -> Init {
        match self.minimize.as_ref().map(|m| &m.init) {
            None | Some(InitConfig::Auto) => Init::Auto,
            Some(InitConfig::Tent) => Init::Tent,
            Some(InitConfig::TalentiLike { exponent }) => Init::TalentiLike { exponent: *exponent },
        }
    }

    /// Hardy data for `minimize` and `probe`; a supersolution source also
    /// needs the shift, which is resolved by the caller.
    pub fn hardy_data(&self, grid: &QuadratureGrid, sigma: Option<f64>) -> Result<HardyData, CliError> {
        match require(&self.hardy, "hardy")? {
            HardyConfig::HardyPoincare { n, p, gamma, r_param } => {
                hardy_poincare_data(*n, *p, *gamma, *r_param).map_err(|e| cfg_err("hardy", e))
            }
            HardyConfig::Classical { n, p } => classical_hardy_data(*n, *p).map_err(|e| cfg_err("hardy", e)),
            HardyConfig::SharpCase => {
                let (p, a, b) = self.weights()?;
                let d = self.domain()?;
                let eigen = match &self.solution {
                    Some(_) => Some(self.solution(grid)?),
                    None => None,
                };
                sharp_case_measures(&a, &b, p, &d, grid, eigen.as_ref()).map_err(|e| cfg_err("hardy", e))
            }
            HardyConfig::Supersolution => {
                let problem = self.problem()?;
                let pair = self.pair()?;
                let u = self.solution(grid)?;
                let sigma = sigma.ok_or_else(|| cfg_err("run.sigma", "an explicit shift is required here"))?;
                hardy_core::hardy::construct_hardy_measures(
                    &problem,
                    &u,
                    &pair,
                    sigma,
                    hardy_core::compatibility::Gate::Waived,
                    grid,
                )
                .map_err(|e| cfg_err("hardy", e))
            }
        }
    }

    pub fn probe_params(&self) -> Result<Vec<f64>, CliError> {
        let pc = require(&self.probe, "probe")?;
        match &pc.params {
            ParamSpec::List(v) if v.is_empty() => Err(cfg_err("probe.params", "no parameters given")),
            ParamSpec::List(v) => Ok(v.clone()),
            ParamSpec::Range { count, .. } if *count < 1 => Err(cfg_err("probe.params.count", "must be at least 1")),
            ParamSpec::Range { start, stop, count } => Ok(if *count == 1 {
                vec![*start]
            } else {
                hardy_core::radial::linspace(*start, *stop, *count)
            }),
        }
    }

    pub fn minimize_block(&self) -> MinimizeConfig {
        self.minimize.clone().unwrap_or_default()
    }

    pub fn probe_block(&self) -> Result<&ProbeConfig, CliError> {
        require(&self.probe, "probe")
    }

    pub fn transform_block(&self) -> Result<&TransformConfig, CliError> {
        require(&self.transform, "transform")
    }
}

// dotted key path of the table entry enclosing a byte offset
fn locate(text: &str, offset: usize) -> String {
    let offset = offset.min(text.len());
    let line_start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    let header = |l: &str| {
        let t = l.trim();
        (t.starts_with('[') && t.ends_with(']')).then(|| t.trim_matches(|c| c == '[' || c == ']').trim().to_string())
    };
    let line = text[line_start..].lines().next().unwrap_or("");
    if let Some(h) = header(line) {
        return h;
    }
    let table = text[..line_start].lines().rev().find_map(header).unwrap_or_default();
    let key = line.split('=').next().unwrap_or("").trim();
    match (table.is_empty(), key.is_empty()) {
        (_, true) => table,
        (true, false) => key.to_string(),
        (false, false) => format!("{table}.{key}"),
    }
}
