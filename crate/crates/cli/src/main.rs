mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use radlab::cache;
use radlab::convolution::{self, BumpSpec};
use radlab::density::{default_window, verify_conditions};
use radlab::dynamics::{self, Symbol, SymbolKind, WitnessGrid};
use radlab::export;
use radlab::radial::{RadialGridFunction, SpectralBasis, Tolerances};
use radlab::report::to_json_string;
use radlab::{DensityProfile, Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use config::RunConfig;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "radlab", version, about = "Radial harmonic analysis and multiplier dynamics on harmonic manifolds")]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// key = value file; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// hyperbolic | damek-ricci | custom
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Dimension of hyperbolic space H^n
    #[arg(long, global = true)]
    n: Option<i64>,
    /// Damek-Ricci parameter m
    #[arg(long, global = true)]
    m: Option<i64>,
    /// Damek-Ricci parameter k
    #[arg(long, global = true)]
    k: Option<i64>,
    /// two-column CSV `r,logA` for custom profiles
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Custom profile: index alpha of A(r) ~ r^{2 alpha + 1} at 0
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Custom profile: growth rate rho, if known
    #[arg(long, global = true)]
    rho_hint: Option<f64>,
    /// Radial cut-off (default 25/rho)
    #[arg(long, global = true)]
    r_max: Option<f64>,
    /// Radial nodes, rounded up to 16-point panels
    #[arg(long, global = true)]
    r_nodes: Option<usize>,
    #[arg(long, global = true)]
    lambda_min: Option<f64>,
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    #[arg(long, global = true)]
    lambda_nodes: Option<usize>,
    #[arg(long, global = true)]
    rk_tol: Option<f64>,
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true)]
    tail_tol: Option<f64>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Compute and store eigen-tables when the cache has none
    #[arg(long, global = true)]
    build_cache: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output prefix: writes PREFIX.json and PREFIX-*.csv (with JSON sidecars)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn flag_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("kind", self.kind.clone());
        put("n", self.n.map(|v| v.to_string()));
        put("m", self.m.map(|v| v.to_string()));
        put("k", self.k.map(|v| v.to_string()));
        put("table_path", self.table.as_ref().map(|p| p.display().to_string()));
        put("alpha", self.alpha.map(|v| v.to_string()));
        put("rho_hint", self.rho_hint.map(|v| v.to_string()));
        put("r_max", self.r_max.map(|v| v.to_string()));
        put("r_nodes", self.r_nodes.map(|v| v.to_string()));
        put("lambda_min", self.lambda_min.map(|v| v.to_string()));
        put("lambda_max", self.lambda_max.map(|v| v.to_string()));
        put("lambda_nodes", self.lambda_nodes.map(|v| v.to_string()));
        put("rk_tol", self.rk_tol.map(|v| v.to_string()));
        put("quad_tol", self.quad_tol.map(|v| v.to_string()));
        put("tail_tol", self.tail_tol.map(|v| v.to_string()));
        put("cache_dir", self.cache_dir.as_ref().map(|p| p.display().to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        m
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify C1-C4 for the configured profile
    ProfileCheck {
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        r1: Option<f64>,
        #[arg(long)]
        big_r: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Radial Fourier transform of a function
    Transform {
        /// `r,re,im` CSV sampled on the working grid
        #[arg(long)]
        input: Option<PathBuf>,
        /// Gaussian ring `centre,width,amplitude` (repeatable)
        #[arg(long, allow_hyphen_values = true)]
        bump: Vec<String>,
        /// Extra spectral parameters `re[,im]` to evaluate at
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<String>,
        #[arg(long)]
        roundtrip: bool,
    },
    /// Compare spatial and spectral inner products
    Plancherel {
        #[arg(long, allow_hyphen_values = true)]
        bump: Vec<String>,
        /// Rings of the second function (defaults to the first)
        #[arg(long, allow_hyphen_values = true)]
        other: Vec<String>,
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
    },
    /// Convolve two radial functions
    Convolve {
        #[arg(long, allow_hyphen_values = true)]
        f: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        g: Vec<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
        method: MethodArg,
        #[arg(long, default_value_t = 1e-2)]
        threshold: f64,
    },
    /// Young's inequality on seeded random pairs
    Young {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 1e-6)]
        slack: f64,
    },
    /// Heat kernel and its checks
    Heat {
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum)]
        check: Vec<HeatCheck>,
    },
    /// Resolvent symbol, pole region (p <= 2) or chaos (p > 2)
    Resolvent {
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Search for a z giving a chaotic resolvent (p > 2)
        #[arg(long)]
        search: bool,
    },
    /// Chaos classification of a multiplier
    Chaos {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        witness: WitnessArgs,
    },
    /// Orbit norms of a multiplier on seeded bumps
    Orbit {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long)]
        p: f64,
        /// Orbit length (`--n` is the manifold dimension)
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Number of seeded random starting functions
        #[arg(long, default_value_t = 1)]
        functions: usize,
        /// Start from this function instead (`centre,width,amplitude`, repeatable)
        #[arg(long, allow_hyphen_values = true)]
        bump: Vec<String>,
        #[command(flatten)]
        witness: WitnessArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Spectral,
    Spatial,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum HeatCheck {
    Mass,
    Symbol,
    Positivity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SymbolName {
    Heat,
    ShiftedHeat,
    Resolvent,
    Constant,
    Step,
}

#[derive(Args)]
struct SymbolArgs {
    #[arg(long, value_enum)]
    symbol: SymbolName,
    /// Shift `re[,im]` for shifted-heat
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Resolvent parameter `re[,im]`
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Constant symbol value `re[,im]`
    #[arg(long, allow_hyphen_values = true)]
    value: Option<String>,
    /// Step edge: -1 on |λ| < edge, +1 elsewhere
    #[arg(long, default_value_t = 1.0)]
    edge: f64,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long, default_value_t = 200)]
    n_re: usize,
    #[arg(long, default_value_t = 50)]
    n_im: usize,
    #[arg(long, default_value_t = 8.0)]
    witness_lambda_max: f64,
}

impl WitnessArgs {
    fn grid(&self) -> WitnessGrid {
        WitnessGrid { n_re: self.n_re, n_im: self.n_im, lambda_max: self.witness_lambda_max }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Ok,
    CheckFailed,
    NumericalFlag,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => EXIT_CHECK_FAILED,
            Status::NumericalFlag => EXIT_NUMERICAL,
        }
    }
}

#[derive(Serialize)]
struct GridSpec {
    r_max: f64,
    r_nodes: usize,
    lambda_min: f64,
    lambda_max: f64,
    lambda_nodes: usize,
    cache_key: String,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    operation: &'a str,
    profile: Value,
    grid: Option<GridSpec>,
    tolerances: Tolerances,
    seed: u64,
    status: Status,
    flags: Vec<String>,
    result: Value,
}

struct Outcome {
    operation: &'static str,
    basis: Option<Arc<SpectralBasis>>,
    status: Status,
    flags: Vec<String>,
    result: Value,
    files: Vec<(String, FileOut)>,
}

enum FileOut {
    Radial(RadialGridFunction),
    Spectral(radlab::radial::SpectralGridFunction),
    Series(&'static str, Vec<f64>),
}

impl Outcome {
    fn new(operation: &'static str, result: Value) -> Self {
        Outcome { operation, basis: None, status: Status::Ok, flags: vec![], result, files: vec![] }
    }

    fn check(mut self, passed: bool, what: &str) -> Self {
        if !passed {
            self.flags.push(format!("check failed: {what}"));
            if self.status == Status::Ok {
                self.status = Status::CheckFailed;
            }
        }
        self
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Usage(format!("bad complex number `{s}` (use re or re,im)")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Usage(format!("bad complex number `{s}` (use re or re,im)"))),
    }
}

fn parse_bumps(rings: &[String], default: (f64, f64, f64)) -> Result<BumpSpec> {
    if rings.is_empty() {
        return Ok(BumpSpec { rings: vec![default] });
    }
    let rings = rings
        .iter()
        .map(|s| {
            let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| Error::Usage(format!("bad ring `{s}`")))?;
            match v.as_slice() {
                [c, w, a] => Ok((*c, *w, *a)),
                _ => Err(Error::Usage(format!("ring `{s}` must be centre,width,amplitude"))),
            }
        })
        .collect::<Result<_>>()?;
    Ok(BumpSpec { rings })
}

fn symbol(args: &SymbolArgs, rho: f64) -> Result<Symbol> {
    let need = |v: &Option<String>, name: &str| v.as_deref().ok_or_else(|| Error::Usage(format!("--{name} is required for this symbol"))).and_then(parse_complex);
    match args.symbol {
        SymbolName::Heat => Symbol::heat(rho, args.t),
        SymbolName::ShiftedHeat => Symbol::shifted_heat(rho, need(&args.c, "c")?, args.t),
        SymbolName::Resolvent => Ok(Symbol::resolvent(rho, need(&args.z, "z")?)),
        SymbolName::Constant => Ok(Symbol::constant(rho, need(&args.value, "value")?)),
        SymbolName::Step => Ok(Symbol::step(rho, args.edge)),
    }
}

struct Ctx {
    cfg: RunConfig,
    build_cache: bool,
}

impl Ctx {
    fn profile(&self) -> Result<DensityProfile> {
        self.cfg.profile()
    }

    fn basis(&self) -> Result<Arc<SpectralBasis>> {
        let space = self.cfg.space(self.profile()?)?;
        let spectral = self.cfg.spectral_grid()?;
        let tol = self.cfg.tolerances;
        let dir = self.cfg.cache_dir.as_path();
        if let Some(b) = cache::load(dir, &space, &spectral, &tol)? {
            eprintln!("radlab: using cached tables {}", cache::cache_key(&space, &spectral, &tol));
            return Ok(b);
        }
        if !self.build_cache {
            return Err(Error::Cache(format!(
                "no cached tables for key {} in {}; rerun with --build-cache",
                cache::cache_key(&space, &spectral, &tol),
                dir.display()
            )));
        }
        let (b, _) = cache::load_or_build(Some(dir), &space, &spectral, &tol, true)?;
        eprintln!("radlab: stored tables {}", cache::cache_key(&space, &spectral, &tol));
        Ok(b)
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn cmd_profile_check(ctx: &Ctx, r0: Option<f64>, r1: Option<f64>, big_r: Option<f64>, tol: f64) -> Result<Outcome> {
    let p = ctx.profile()?;
    let (d0, d1, dr) = default_window(&p);
    let report = verify_conditions(&p, r0.unwrap_or(d0), r1.unwrap_or(d1), big_r.unwrap_or(dr), tol)?;
    let ok = report.all_ok();
    let mut value = to_value(&report)?;
    value["rho"] = json!(p.rho());
    Ok(Outcome::new("density::verify_conditions", value).check(ok, "conditions C1-C4"))
}

fn cmd_transform(ctx: &Ctx, input: Option<&Path>, bump: &[String], at: &[String], roundtrip: bool) -> Result<Outcome> {
    let basis = ctx.basis()?;
    let f = match input {
        Some(path) => export::read_radial(path, basis.space())?,
        None => parse_bumps(bump, (0.0, 0.5, 1.0))?.build(basis.space())?,
    };
    let big_f = basis.forward(&f)?;
    let mut values = Vec::new();
    for s in at {
        let l = parse_complex(s)?;
        values.push(json!({"lambda": l, "value": basis.fourier(&f, l)?}));
    }
    let mut result = json!({
        "total_integral": f.integral(),
        "tail_deficit": basis.tail_deficit(&big_f),
        "at": values,
    });
    if roundtrip {
        let back = basis.inverse_with_support(&big_f, f.support())?;
        result["roundtrip_rel_l2"] = json!(back.rel_l2_distance(&f)?);
    }
    let mut out = Outcome::new("radial::fourier", result);
    out.files.push(("spectrum".into(), FileOut::Spectral(big_f)));
    out.basis = Some(basis);
    Ok(out)
}

fn cmd_plancherel(ctx: &Ctx, bump: &[String], other: &[String], threshold: f64) -> Result<Outcome> {
    let basis = ctx.basis()?;
    let f = parse_bumps(bump, (0.0, 0.7, 1.0))?.build(basis.space())?;
    let g = if other.is_empty() { f.clone() } else { parse_bumps(other, (0.0, 0.7, 1.0))?.build(basis.space())? };
    let report = basis.plancherel_check(&f, &g)?;
    let back = basis.inverse_with_support(&basis.forward(&f)?, f.support())?;
    let roundtrip = back.rel_l2_distance(&f)?;
    let mut value = to_value(&report)?;
    value["roundtrip_rel_l2"] = json!(roundtrip);
    let mut out = Outcome::new("radial::plancherel_check", value)
        .check(report.residual < threshold, "Plancherel residual")
        .check(roundtrip < 1e-3, "inverse-forward round trip");
    out.basis = Some(basis);
    Ok(out)
}

fn cmd_convolve(ctx: &Ctx, f: &[String], g: &[String], method: MethodArg, threshold: f64) -> Result<Outcome> {
    let basis = ctx.basis()?;
    let f = parse_bumps(f, (0.5, 0.6, 1.0))?.build(basis.space())?;
    let g = parse_bumps(g, (0.0, 0.5, 1.0))?.build(basis.space())?;
    let n = match basis.space().profile().kind() {
        radlab::density::ProfileKind::Hyperbolic { n } => Some(*n as i64),
        _ => None,
    };
    let spatial = |op: &str| -> Result<RadialGridFunction> {
        let n = n.ok_or_else(|| Error::Usage(format!("{op} needs a hyperbolic profile")))?;
        convolution::convolve_spatial_hyperbolic(&f, &g, n)
    };
    let mut out;
    match method {
        MethodArg::Spectral => {
            let c = convolution::convolve_spectral(&basis, &f, &g)?;
            out = Outcome::new("convolution::convolve_spectral", json!({"l2_norm": c.lp_norm(2.0)?}));
            out.files.push(("conv".into(), FileOut::Radial(c)));
        }
        MethodArg::Spatial => {
            let c = spatial("spatial convolution")?;
            out = Outcome::new("convolution::convolve_spatial_hyperbolic", json!({"l2_norm": c.lp_norm(2.0)?}));
            out.files.push(("conv".into(), FileOut::Radial(c)));
        }
        MethodArg::Both => {
            let a = convolution::convolve_spectral(&basis, &f, &g)?;
            let b = spatial("two-route comparison")?;
            let rel = b.rel_l2_distance(&a)?;
            out = Outcome::new("convolution::convolve_spectral+convolve_spatial_hyperbolic", json!({"l2_norm": a.lp_norm(2.0)?, "rel_l2_difference": rel}))
                .check(rel < threshold, "spectral/spatial agreement");
            out.files.push(("conv-spectral".into(), FileOut::Radial(a)));
            out.files.push(("conv-spatial".into(), FileOut::Radial(b)));
        }
    }
    out.basis = Some(basis);
    Ok(out)
}

fn cmd_young(ctx: &Ctx, p: f64, q: f64, pairs: usize, slack: f64) -> Result<Outcome> {
    convolution::young_exponent(p, q)?;
    let basis = ctx.basis()?;
    let corpus = convolution::random_bumps(ctx.cfg.seed, 2 * pairs);
    let mut reports = Vec::with_capacity(pairs);
    for pair in corpus.chunks(2) {
        let f = pair[0].build(basis.space())?;
        let g = pair[1].build(basis.space())?;
        reports.push(convolution::young_check(&basis, &f, &g, p, q)?);
    }
    let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    let value = json!({
        "p": p, "q": q, "r": reports.first().map(|r| r.r),
        "pairs": pairs, "max_ratio": max_ratio, "ratios": ratios,
        "grid_meta": reports.first().map(|r| &r.grid_meta),
    });
    let mut out = Outcome::new("convolution::young_check", value).check(max_ratio <= 1.0 + slack, "Young ratio");
    out.basis = Some(basis);
    Ok(out)
}

fn cmd_heat(ctx: &Ctx, t: f64, checks: &[HeatCheck]) -> Result<Outcome> {
    let basis = ctx.basis()?;
    let rho = basis.space().profile().rho();
    let h = dynamics::heat_kernel(&basis, t)?;
    let mass = h.integral().re;
    let min_value = h.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let top = basis.spectral().lambda_max().min(6.0);
    let mut symbol_error = 0.0f64;
    for i in 0..60 {
        let l = 0.1 + (top - 0.1) * i as f64 / 59.0;
        let v = basis.fourier(&h, Complex64::new(l, 0.0))?;
        symbol_error = symbol_error.max((v - (-t * (l * l + rho * rho)).exp()).norm());
    }
    let checks: Vec<HeatCheck> = if checks.is_empty() { vec![HeatCheck::Mass, HeatCheck::Symbol, HeatCheck::Positivity] } else { checks.to_vec() };
    let value = json!({
        "t": t,
        "mass": mass,
        "min_value": min_value,
        "positive": min_value > -1e-8,
        "symbol_max_error": symbol_error,
        "lambda_max_needed": dynamics::heat_lambda_max(t, ctx.cfg.tolerances.tail_tol),
        "checks": checks,
    });
    let mut out = Outcome::new("dynamics::heat_kernel", value);
    for c in checks {
        out = match c {
            HeatCheck::Mass => out.check((mass - 1.0).abs() < 1e-3, "mass"),
            HeatCheck::Symbol => out.check(symbol_error < 1e-4, "heat symbol"),
            HeatCheck::Positivity => out.check(min_value > -1e-8, "positivity"),
        };
    }
    out.files.push(("kernel".into(), FileOut::Radial(h)));
    out.basis = Some(basis);
    Ok(out)
}

fn cmd_resolvent(ctx: &Ctx, z: Option<&str>, p: f64, search: bool) -> Result<Outcome> {
    let rho = ctx.profile()?.rho();
    if search {
        let found = dynamics::resolvent_chaotic_z(rho, p, &WitnessGrid::default())?;
        let ok = found.found;
        return Ok(Outcome::new("dynamics::resolvent_chaotic_z", to_value(&found)?).check(ok, "resolvent search"));
    }
    let z = parse_complex(z.ok_or_else(|| Error::Usage("--z is required unless --search is given".into()))?)?;
    let m = Symbol::resolvent(rho, z);
    let mut identity = 0.0f64;
    for i in 0..64 {
        let l = Complex64::new(0.125 * i as f64, 0.0);
        let v = (-(l * l + rho * rho) - z) * m.eval(l);
        identity = identity.max((v - 1.0).norm());
    }
    if p <= 2.0 {
        let region = dynamics::resolvent_pole_region(rho, p, z)?;
        let mut value = to_value(&region)?;
        value["symbol_identity_error"] = json!(identity);
        let mut out = Outcome::new("dynamics::resolvent_pole_region", value);
        if !region.forms_agree {
            out.flags.push("stated τ-form and derived τ²-form of the region disagree at this z".into());
        }
        if region.degenerate {
            out.flags.push("degenerate region (a = 0)".into());
        }
        Ok(out)
    } else {
        let verdict = dynamics::classify_chaos(&m, p, rho, &WitnessGrid::default())?;
        let mut value = to_value(&verdict)?;
        value["symbol_identity_error"] = json!(identity);
        Ok(Outcome::new("dynamics::classify_chaos", value))
    }
}

fn cmd_chaos(ctx: &Ctx, args: &SymbolArgs, p: f64, witness: &WitnessArgs) -> Result<Outcome> {
    let rho = ctx.profile()?.rho();
    let m = symbol(args, rho)?;
    let verdict = dynamics::classify_chaos(&m, p, rho, &witness.grid())?;
    Ok(Outcome::new("dynamics::classify_chaos", to_value(&verdict)?))
}

fn cmd_orbit(ctx: &Ctx, args: &SymbolArgs, p: f64, n: usize, functions: usize, bump: &[String], witness: &WitnessArgs) -> Result<Outcome> {
    let basis = ctx.basis()?;
    let rho = basis.space().profile().rho();
    let m = symbol(args, rho)?;
    let verdict = match dynamics::classify_chaos(&m, p, rho, &witness.grid()) {
        Ok(v) => to_value(&v)?,
        Err(e) => json!({"error": e.kind(), "message": e.to_string()}),
    };
    // contraction bound e^{(Re c − c_p)t} for the heat family
    let bound = match m.kind() {
        SymbolKind::Heat { t } => Some((-dynamics::c_threshold(rho, p)?.value * t).exp()),
        SymbolKind::ShiftedHeat { c, t } => Some(((c.re - dynamics::c_threshold(rho, p)?.value) * t).exp()),
        _ => None,
    };
    let mut traces = Vec::new();
    let mut out = Outcome::new("dynamics::orbit_simulate", Value::Null);
    let mut worst_growth = 0.0f64;
    let starts = if bump.is_empty() { convolution::random_bumps(ctx.cfg.seed, functions.max(1)) } else { vec![parse_bumps(bump, (0.0, 0.0, 0.0))?] };
    for (i, spec) in starts.iter().enumerate() {
        let f = spec.build(basis.space())?;
        let trace = dynamics::orbit_simulate(&basis, &m, &f, p, n)?;
        if let Some(flag) = &trace.flag {
            out.flags.push(format!("function {i}: {flag}"));
            out.status = Status::NumericalFlag;
        }
        worst_growth = trace.growth.iter().copied().fold(worst_growth, f64::max);
        out.files.push((format!("orbit-{i}"), FileOut::Series("norm", trace.norms.clone())));
        traces.push(trace);
    }
    let orbit: Vec<&Vec<f64>> = traces.iter().map(|t| &t.norms).collect();
    out.result = json!({
        "symbol": m.describe(),
        "p": p,
        "steps": n,
        "verdict": verdict,
        "orbit": orbit,
        "traces": traces,
        "max_growth": worst_growth,
        "contraction_bound": bound,
    });
    if let Some(b) = bound.filter(|b| *b <= 1.0) {
        out = out.check(worst_growth <= b + 1e-6, "per-step growth within the contraction bound");
    }
    out.basis = Some(basis);
    Ok(out)
}

fn run(cli: &Cli) -> Result<u8> {
    let cfg = RunConfig::from_file_and_flags(cli.run.config.as_deref(), &cli.run.flag_map())?;
    let ctx = Ctx { cfg, build_cache: cli.run.build_cache };
    let (name, outcome) = match &cli.command {
        Command::ProfileCheck { r0, r1, big_r, tol } => ("profile-check", cmd_profile_check(&ctx, *r0, *r1, *big_r, *tol)?),
        Command::Transform { input, bump, at, roundtrip } => ("transform", cmd_transform(&ctx, input.as_deref(), bump, at, *roundtrip)?),
        Command::Plancherel { bump, other, threshold } => ("plancherel", cmd_plancherel(&ctx, bump, other, *threshold)?),
        Command::Convolve { f, g, method, threshold } => ("convolve", cmd_convolve(&ctx, f, g, *method, *threshold)?),
        Command::Young { p, q, pairs, slack } => ("young", cmd_young(&ctx, *p, *q, *pairs, *slack)?),
        Command::Heat { t, check } => ("heat", cmd_heat(&ctx, *t, check)?),
        Command::Resolvent { z, p, search } => ("resolvent", cmd_resolvent(&ctx, z.as_deref(), *p, *search)?),
        Command::Chaos { symbol, p, witness } => ("chaos", cmd_chaos(&ctx, symbol, *p, witness)?),
        Command::Orbit { symbol, p, steps, functions, bump, witness } => ("orbit", cmd_orbit(&ctx, symbol, *p, *steps, *functions, bump, witness)?),
    };
    let profile = ctx.profile()?;
    let grid = outcome.basis.as_ref().map(|b| GridSpec {
        r_max: b.space().r_max(),
        r_nodes: b.space().nodes().len(),
        lambda_min: b.spectral().lower(),
        lambda_max: b.spectral().lambda_max(),
        lambda_nodes: b.spectral().len(),
        cache_key: cache::cache_key(b.space(), b.spectral(), b.tolerances()),
    });
    let envelope = Envelope {
        command: name,
        operation: outcome.operation,
        profile: json!({"spec": profile.spec_string(), "hash": profile.hash(), "rho": profile.rho()}),
        grid,
        tolerances: ctx.cfg.tolerances,
        seed: ctx.cfg.seed,
        status: outcome.status,
        flags: outcome.flags.clone(),
        result: outcome.result,
    };
    let text = to_json_string(&envelope)?;
    print!("{text}");
    if let Some(prefix) = &cli.run.out {
        if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(prefix.with_extension("json"), &text)?;
        let stem = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "radlab".into());
        for (suffix, file) in outcome.files {
            let path = prefix.with_file_name(format!("{stem}-{suffix}.csv"));
            match file {
                FileOut::Radial(f) => export::write_radial(&path, &f, outcome.flags.clone())?,
                FileOut::Spectral(s) => export::write_spectral(&path, &s, &profile.hash(), outcome.flags.clone())?,
                FileOut::Series(col, v) => export::write_series(&path, col, &v, outcome.flags.clone())?,
            }
        }
    }
    Ok(outcome.status.code())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() || matches!(e, Error::NonPositiveRho(_)) {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code(&e);
            let report = json!({"error": e.kind(), "message": e.to_string(), "exit_code": code});
            eprint!("{}", to_json_string(&report).unwrap_or_else(|_| format!("{e}\n")));
            ExitCode::from(code)
        }
    }
}
