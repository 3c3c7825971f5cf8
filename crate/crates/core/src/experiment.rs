//! Scenarios, built-in presets, and the runner that turns a scenario into
//! CSV time series and a text report.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use crate::dark::{nonlinear_lambda_dark_state, DarkManifold};
use crate::error::{Error, Result};
use crate::model::{System, Variant};
use crate::ode::IntegrationOptions;
use crate::pulse::{Geometry, PulseSchedule};
use crate::reduction::{reduction_chain_run, ChainOptions, ChainRun, ReductionLevel};
use crate::series::{compare, ChannelDifference, TimeSeries};
use crate::spectral::{eigen_trace, stage_boundaries, DarkStateMode, StageBoundaries};

/// Gaussian pulse parameters. Lambda scenarios ignore `t_dump2` and `k2`
/// and use `k1` as the dump amplitude factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseParams {
    pub omega0: f64,
    pub width: f64,
    pub t_pump: f64,
    pub t_dump1: f64,
    pub t_dump2: f64,
    pub k1: f64,
    pub k2: f64,
}

impl PulseParams {
    pub fn schedule(&self, geometry: Geometry) -> Result<PulseSchedule> {
        match geometry {
            Geometry::Lambda => {
                let s = PulseSchedule::gaussian_lambda(self.omega0, self.t_pump, self.t_dump1, self.width)?;
                if self.k1 == 1.0 {
                    Ok(s)
                } else {
                    let mut d = s.dump1;
                    d.amplitude *= self.k1;
                    PulseSchedule::lambda(
                        s.pump,
                        crate::pulse::GaussianPulse::new(d.amplitude, d.center, d.width)?,
                    )
                }
            }
            Geometry::Tripod => PulseSchedule::gaussian_tripod(
                self.omega0,
                self.k1,
                self.k2,
                self.t_pump,
                self.t_dump1,
                self.t_dump2,
                self.width,
            ),
        }
    }
}

const LAMBDA_PULSES: PulseParams = PulseParams {
    omega0: 10.0,
    width: 1.0,
    t_pump: 3.8,
    t_dump1: 3.0,
    t_dump2: 0.0,
    k1: 1.0,
    k2: 0.0,
};
const TRIPOD_PULSES: PulseParams = PulseParams {
    omega0: 60.0,
    width: 1.0,
    t_pump: 10.7,
    t_dump1: 10.0,
    t_dump2: 8.5,
    k1: 0.75,
    k2: 5.0,
};

/// Everything needed to run one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub variant: Variant,
    pub pulses: PulseParams,
    pub gamma: f64,
    pub detuning: f64,
    pub window: (f64, f64),
    /// Bare amplitudes at the window start.
    pub initial: Vec<C64>,
    pub levels: Vec<ReductionLevel>,
    pub darkstate_mode: DarkStateMode,
    pub step: f64,
    /// Output samples per unit time.
    pub stride: f64,
    pub leading_order: bool,
    pub full_window: bool,
    /// Population channels compared between levels in the report.
    pub channels: Vec<String>,
    /// Largest allowed level difference when asserting.
    pub tolerance: Option<f64>,
}

impl ScenarioConfig {
    /// Canonical parameters for a variant: all population in `a`, zero
    /// detuning, `gamma = 2`, step `T / 2000` (`T / 8000` for the nonlinear
    /// lambda).
    pub fn for_variant(variant: Variant) -> Self {
        let (pulses, window) = match variant {
            Variant::LinearLambda => (LAMBDA_PULSES, (0.0, 8.0)),
            Variant::NonlinearLambda => (
                PulseParams {
                    omega0: 300.0,
                    ..LAMBDA_PULSES
                },
                (0.0, 8.0),
            ),
            Variant::LinearTripod | Variant::NonlinearTripod => (TRIPOD_PULSES, (0.0, 20.0)),
        };
        // Omega0 = 300 needs a finer step to keep halving changes below 1e-8
        let divisions = if variant == Variant::NonlinearLambda {
            8000.0
        } else {
            2000.0
        };
        let mut initial = vec![C64::from(0.0); variant.dim()];
        initial[0] = C64::from(1.0);
        Self {
            name: variant.as_str().to_string(),
            variant,
            pulses,
            gamma: 2.0,
            detuning: 0.0,
            window,
            initial,
            levels: vec![ReductionLevel::Full],
            darkstate_mode: DarkStateMode::Manifold,
            step: pulses.width / divisions,
            stride: 100.0,
            leading_order: false,
            full_window: false,
            channels: default_channels(variant),
            tolerance: None,
        }
    }

    pub fn system(&self) -> Result<System> {
        System::new(self.variant, self.gamma, self.detuning)
    }

    pub fn schedule(&self) -> Result<PulseSchedule> {
        self.pulses.schedule(self.variant.geometry())
    }

    /// Checks everything that can be checked before integrating.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        self.system().map_err(|e| Error::Config(e.to_string()))?;
        self.schedule().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.window.1 > self.window.0) || !self.window.0.is_finite() || !self.window.1.is_finite() {
            return cfg(format!("window [{}, {}] is empty", self.window.0, self.window.1));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return cfg(format!("step must be positive, got {}", self.step));
        }
        if !(self.stride > 0.0) {
            return cfg(format!("stride must be positive, got {}", self.stride));
        }
        if self.initial.len() != self.variant.dim() {
            return cfg(format!(
                "initial state needs {} amplitudes, got {}",
                self.variant.dim(),
                self.initial.len()
            ));
        }
        let norm = self.system()?.total_norm(&self.initial)?;
        if (norm - 1.0).abs() > 1e-12 {
            return cfg(format!("initial state has norm {norm}, expected 1"));
        }
        if self.levels.is_empty() {
            return cfg("no reduction levels requested".into());
        }
        for l in &self.levels {
            if !l.supports(self.variant) {
                return cfg(format!("level `{l}` is only defined for linear systems"));
            }
            if *l != ReductionLevel::Full && self.gamma == 0.0 && self.detuning == 0.0 {
                return cfg(format!("level `{l}` needs gamma > 0 or a nonzero detuning"));
            }
        }
        let known = population_channel_names(self.variant);
        if let Some(c) = self.channels.iter().find(|c| !known.contains(c)) {
            return cfg(format!("unknown channel `{c}` for {}", self.variant));
        }
        Ok(())
    }

    /// Parses `key = value` lines. A `preset` key, when present, must come
    /// first and supplies the starting point; otherwise `variant` must.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_string(),
            line,
            msg,
        };
        let mut cfg: Option<ScenarioConfig> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr(line_no, format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match (key, cfg.as_mut()) {
                ("preset", None) => cfg = Some(preset(value).map_err(|e| perr(line_no, e.to_string()))?),
                ("variant", None) => {
                    let v: Variant = value.parse().map_err(|e: Error| perr(line_no, e.to_string()))?;
                    cfg = Some(ScenarioConfig::for_variant(v));
                }
                ("preset" | "variant", Some(_)) => {
                    return Err(perr(line_no, format!("`{key}` must be the first setting")));
                }
                (_, None) => return Err(perr(line_no, "the first setting must be `preset` or `variant`".into())),
                (_, Some(c)) => c.set(key, value).map_err(|e| perr(line_no, e))?,
            }
        }
        let mut cfg = cfg.ok_or_else(|| perr(0, "no `preset` or `variant` given".into()))?;
        if cfg.name.is_empty() {
            cfg.name = "custom".into();
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = |v: &str| v.parse::<f64>().map_err(|e| format!("`{key}`: {e}"));
        let flag = |v: &str| v.parse::<bool>().map_err(|e| format!("`{key}`: {e}"));
        match key {
            "name" => self.name = value.to_string(),
            "omega0" => self.pulses.omega0 = num(value)?,
            "width" => self.pulses.width = num(value)?,
            "t_pump" => self.pulses.t_pump = num(value)?,
            "t_dump" | "t_dump1" => self.pulses.t_dump1 = num(value)?,
            "t_dump2" => self.pulses.t_dump2 = num(value)?,
            "k1" => self.pulses.k1 = num(value)?,
            "k2" => self.pulses.k2 = num(value)?,
            "gamma" => self.gamma = num(value)?,
            "detuning" => self.detuning = num(value)?,
            "t0" => self.window.0 = num(value)?,
            "t_end" => self.window.1 = num(value)?,
            "window" => self.window = parse_window(value)?,
            "step" => self.step = num(value)?,
            "stride" => self.stride = num(value)?,
            "levels" => self.levels = parse_levels(value)?,
            "darkstate_mode" => self.darkstate_mode = value.parse().map_err(|e: Error| e.to_string())?,
            "leading_order" => self.leading_order = flag(value)?,
            "full_window" => self.full_window = flag(value)?,
            "channels" => self.channels = split_list(value),
            "tolerance" => self.tolerance = Some(num(value)?),
            "initial" => {
                self.initial = split_list(value)
                    .iter()
                    .map(|v| v.parse::<C64>().map_err(|e| format!("`initial`: `{v}`: {e}")))
                    .collect::<std::result::Result<_, _>>()?
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// A preset name or the path of a config file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        match preset(name_or_path) {
            Ok(c) => Ok(c),
            Err(Error::UnknownPreset(_)) if Path::new(name_or_path).exists() => {
                Self::from_file(Path::new(name_or_path))
            }
            Err(e) => Err(e),
        }
    }

    /// Settings in the order `parse` accepts them.
    pub fn to_config_text(&self) -> String {
        let p = &self.pulses;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        kv("variant", self.variant.to_string());
        kv("name", self.name.clone());
        kv("omega0", p.omega0.to_string());
        kv("width", p.width.to_string());
        kv("t_pump", p.t_pump.to_string());
        kv("t_dump1", p.t_dump1.to_string());
        kv("t_dump2", p.t_dump2.to_string());
        kv("k1", p.k1.to_string());
        kv("k2", p.k2.to_string());
        kv("gamma", self.gamma.to_string());
        kv("detuning", self.detuning.to_string());
        kv("window", format!("{}:{}", self.window.0, self.window.1));
        kv("step", self.step.to_string());
        kv("stride", self.stride.to_string());
        kv(
            "levels",
            self.levels.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(","),
        );
        kv("darkstate_mode", self.darkstate_mode.as_str().to_string());
        kv("leading_order", self.leading_order.to_string());
        kv("full_window", self.full_window.to_string());
        kv("channels", self.channels.join(","));
        if let Some(t) = self.tolerance {
            kv("tolerance", t.to_string());
        }
        kv(
            "initial",
            self.initial.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
        );
        s
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn parse_window(v: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = v
        .split_once(':')
        .ok_or_else(|| format!("window `{v}` must look like t0:t1"))?;
    let a = a.trim().parse::<f64>().map_err(|e| format!("window start: {e}"))?;
    let b = b.trim().parse::<f64>().map_err(|e| format!("window end: {e}"))?;
    Ok((a, b))
}

pub fn parse_levels(v: &str) -> std::result::Result<Vec<ReductionLevel>, String> {
    split_list(v)
        .iter()
        .map(|l| l.parse::<ReductionLevel>().map_err(|e| e.to_string()))
        .collect()
}

fn population_channel_names(variant: Variant) -> Vec<String> {
    crate::reduction::population_channels(variant)
}

fn default_channels(variant: Variant) -> Vec<String> {
    variant.components().iter().map(|c| format!("P{c}")).collect()
}

/// Names accepted by [`preset`], with a one-line description.
pub const PRESETS: [(&str, &str); 10] = [
    ("fig2", "linear lambda, eigenvalue trace and stage boundaries"),
    ("fig4", "linear tripod, eigenvalue trace and stage boundaries"),
    (
        "fig5",
        "linear tripod, full vs excited- and bright-eliminated populations",
    ),
    ("fig6", "nonlinear lambda (omega0 = 300), eigenvalue trace"),
    ("fig7", "nonlinear lambda, full vs excited-eliminated populations"),
    ("fig8", "nonlinear lambda, deviation from the dark state"),
    ("fig9", "nonlinear tripod (t_pump = 10.7), eigenvalue trace"),
    (
        "fig10",
        "nonlinear tripod (t_pump = 10.7), full vs excited-eliminated populations",
    ),
    (
        "fig11",
        "nonlinear tripod (t_pump = 10.7), deviation from the dark-state manifold",
    ),
    (
        "fig12",
        "nonlinear tripod (t_pump = 11.5), full vs excited-eliminated populations",
    ),
];

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    use ReductionLevel::*;
    let (variant, levels, t_pump) = match name {
        "fig2" => (Variant::LinearLambda, vec![Full], None),
        "fig4" => (Variant::LinearTripod, vec![Full], None),
        "fig5" => (
            Variant::LinearTripod,
            vec![Full, MinusExcited, MinusExcitedAndBright],
            None,
        ),
        "fig6" | "fig8" => (Variant::NonlinearLambda, vec![Full], None),
        "fig7" => (Variant::NonlinearLambda, vec![Full, MinusExcited], None),
        "fig9" | "fig11" => (Variant::NonlinearTripod, vec![Full], None),
        "fig10" => (Variant::NonlinearTripod, vec![Full, MinusExcited], None),
        "fig12" => (Variant::NonlinearTripod, vec![Full, MinusExcited], Some(11.5)),
        _ => return Err(Error::UnknownPreset(name.to_string())),
    };
    let mut c = ScenarioConfig::for_variant(variant);
    c.name = name.to_string();
    c.levels = levels;
    if let Some(tp) = t_pump {
        c.pulses.t_pump = tp;
    }
    Ok(c)
}

/// Summary of a run or of a file comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub name: String,
    /// Per reduced level, the largest population differences from the full
    /// solution.
    pub differences: Vec<(String, Vec<ChannelDifference>)>,
    /// `1 - norm` at the end of the full run.
    pub norm_loss: Option<f64>,
    pub boundaries: Option<StageBoundaries>,
    /// Why no boundaries were found, when they were not.
    pub boundary_note: Option<String>,
    /// Norm dropped by projection at the start of each reduced level.
    pub discarded: Vec<(String, f64)>,
    /// Channel maxima of the full run, e.g. `Pe`.
    pub maxima: Vec<(String, f64, f64)>,
    pub deviations: Vec<(String, f64, f64)>,
    pub tolerance: Option<f64>,
}

impl ComparisonReport {
    fn empty(name: &str) -> Self {
        Self {
            name: name.to_string(),
            differences: Vec::new(),
            norm_loss: None,
            boundaries: None,
            boundary_note: None,
            discarded: Vec::new(),
            maxima: Vec::new(),
            deviations: Vec::new(),
            tolerance: None,
        }
    }

    pub fn max_difference(&self) -> f64 {
        self.differences
            .iter()
            .flat_map(|(_, d)| d.iter().map(|c| c.max_abs))
            .fold(0.0, f64::max)
    }

    /// True when no tolerance was declared or every difference is within it.
    pub fn passed(&self) -> bool {
        self.tolerance.is_none_or(|tol| self.max_difference() <= tol)
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario = {}", self.name)?;
        match (&self.boundaries, &self.boundary_note) {
            (Some(b), _) => writeln!(f, "t1 = {}\nt2 = {}", fmt_num(b.t1), fmt_num(b.t2))?,
            (None, Some(n)) => writeln!(f, "boundaries = none ({n})")?,
            _ => {}
        }
        if let Some(l) = self.norm_loss {
            writeln!(f, "norm_loss = {}", fmt_num(l))?;
        }
        for (ch, v, t) in &self.maxima {
            writeln!(f, "max {ch} = {} at t = {}", fmt_num(*v), fmt_num(*t))?;
        }
        for (ch, v, t) in &self.deviations {
            writeln!(f, "max |{ch}| = {} at t = {}", fmt_num(*v), fmt_num(*t))?;
        }
        for (level, v) in &self.discarded {
            writeln!(f, "discarded_norm {level} = {}", fmt_num(*v))?;
        }
        for (level, diffs) in &self.differences {
            for d in diffs {
                writeln!(
                    f,
                    "diff {level} {} = {} at t = {}",
                    d.channel,
                    fmt_num(d.max_abs),
                    fmt_num(d.at)
                )?;
            }
        }
        if let Some(tol) = self.tolerance {
            writeln!(f, "tolerance = {}", fmt_num(tol))?;
            writeln!(f, "result = {}", if self.passed() { "pass" } else { "fail" })?;
        }
        Ok(())
    }
}

/// All products of one scenario, in memory.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub chain: ChainRun,
    pub eigen: TimeSeries,
    pub deviation: Option<TimeSeries>,
    pub report: ComparisonReport,
}

impl RunOutput {
    pub fn level(&self, level: ReductionLevel) -> Option<&TimeSeries> {
        self.chain.level(level).map(|r| &r.series)
    }

    /// Writes `<level>.csv`, `eigen.csv`, `deviation.csv` (nonlinear only),
    /// `report.txt` and `scenario.cfg` into `dir`, returning the paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        let mut files: Vec<(String, String)> = self
            .chain
            .runs
            .iter()
            .map(|r| (format!("{}.csv", r.level.as_str()), r.series.to_csv()))
            .collect();
        files.push(("eigen.csv".into(), self.eigen.to_csv()));
        if let Some(d) = &self.deviation {
            files.push(("deviation.csv".into(), d.to_csv()));
        }
        files.push(("report.txt".into(), self.report.to_string()));
        files.push(("scenario.cfg".into(), self.config.to_config_text()));
        let mut out = Vec::new();
        for (name, body) in files {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::Io {
                path: p.display().to_string(),
                source: e,
            })?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Eigenvalue trace on the output grid as `ReL*`, `ImL*`, `D_re`, `D_im`.
pub fn eigen_series(config: &ScenarioConfig) -> Result<TimeSeries> {
    let system = config.system()?;
    let schedule = config.schedule()?;
    let n = ((config.window.1 - config.window.0) * config.stride).round() as usize + 1;
    let trace = eigen_trace(
        &system,
        &schedule,
        config.window,
        n.max(2),
        config.darkstate_mode,
        config.step,
    )?;
    let dim = system.dim();
    let mut channels: Vec<String> = (1..=dim).map(|k| format!("ReL{k}")).collect();
    channels.extend((1..=dim).map(|k| format!("ImL{k}")));
    channels.extend(["D_re".to_string(), "D_im".to_string()]);
    let mut ts = TimeSeries::new(channels);
    for s in trace {
        let mut row: Vec<f64> = s.eigenvalues.iter().map(|l| l.re).collect();
        row.extend(s.eigenvalues.iter().map(|l| l.im));
        row.push(s.discriminant.re);
        row.push(s.discriminant.im);
        ts.push(s.t, row)?;
    }
    Ok(ts)
}

/// Population deviations of a nonlinear solution from the dark state at the
/// same time: `dPa = |a|^2 - |a0|^2`, `dPe = 2|e|^2`,
/// `dPg* = 2|g*|^2 - 2|g*0|^2`.
pub fn deviation_series(config: &ScenarioConfig, full: &[Vec<C64>], times: &[f64]) -> Result<TimeSeries> {
    let schedule = config.schedule()?;
    let comps = config.variant.components();
    let mut ts = TimeSeries::new(comps.iter().map(|c| format!("dP{c}")));
    let manifold = match config.variant {
        Variant::NonlinearTripod => Some(DarkManifold::new(&schedule)?.solve(&IntegrationOptions::new(
            config.window.0,
            config.window.1,
            config.step,
        ))?),
        Variant::NonlinearLambda => None,
        _ => return Err(Error::NonlinearVariant),
    };
    for (t, psi) in times.iter().zip(full) {
        let dark = match &manifold {
            Some(m) => m.sample(*t)?,
            None => nonlinear_lambda_dark_state(&schedule, *t)?,
        };
        let row = psi
            .iter()
            .zip(&dark.psi)
            .enumerate()
            .map(|(k, (p, d))| {
                let w = if k == 0 { 1.0 } else { 2.0 };
                w * (p.norm_sqr() - d.norm_sqr())
            })
            .collect();
        ts.push(*t, row)?;
    }
    Ok(ts)
}

/// Runs a scenario in memory.
pub fn simulate(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let system = config.system()?;
    let schedule = config.schedule()?;
    let mut opts = ChainOptions::new(config.window, config.step);
    opts.stride = config.stride;
    opts.leading_order = config.leading_order;
    opts.full_window = config.full_window;

    let mut levels = config.levels.clone();
    if !levels.contains(&ReductionLevel::Full) {
        levels.insert(0, ReductionLevel::Full);
    }
    let chain = reduction_chain_run(&system, &schedule, &config.initial, &levels, &opts)?;
    let eigen = eigen_series(config)?;

    let mut report = ComparisonReport::empty(&config.name);
    report.tolerance = config.tolerance;
    match stage_boundaries(&system, &schedule, config.window, config.darkstate_mode, config.step) {
        Ok(b) => report.boundaries = Some(b),
        Err(e @ (Error::NoCrossing { .. } | Error::TooManyCrossings { .. })) => {
            report.boundary_note = Some(e.to_string())
        }
        Err(e) => return Err(e),
    }

    let full = chain.level(ReductionLevel::Full).expect("full level is always run");
    let norm = full.series.column("norm")?;
    report.norm_loss = norm.last().map(|n| 1.0 - n);
    let mut max_channels = vec!["Pe".to_string()];
    if system.variant.is_linear() {
        max_channels.push("PB".to_string());
    }
    for ch in max_channels {
        let (v, t) = full.series.max_of(&ch)?;
        report.maxima.push((ch, v, t));
    }
    let names: Vec<&str> = config.channels.iter().map(String::as_str).collect();
    for run in chain.runs.iter().filter(|r| r.level != ReductionLevel::Full) {
        report.discarded.push((run.level.to_string(), run.discarded_norm));
        report
            .differences
            .push((run.level.to_string(), compare(&full.series, &run.series, &names)?));
    }

    let deviation = if system.variant.is_linear() {
        None
    } else {
        let d = deviation_series(config, &full.states, &full.series.times)?;
        for ch in d.channels.clone() {
            let k = d.channel_index(&ch)?;
            let (v, t) = d
                .times
                .iter()
                .zip(&d.rows)
                .map(|(t, r)| (r[k].abs(), *t))
                .fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
            report.deviations.push((ch, v, t));
        }
        Some(d)
    };

    Ok(RunOutput {
        config: config.clone(),
        chain,
        eigen,
        deviation,
        report,
    })
}

/// Runs a scenario and writes its artifacts into `out`.
pub fn run(config: &ScenarioConfig, out: &Path) -> Result<RunOutput> {
    let output = simulate(config)?;
    output.write(out)?;
    Ok(output)
}

/// Compares two CSV files on the given channels.
pub fn compare_files(a: &Path, b: &Path, channels: &[&str], tolerance: Option<f64>) -> Result<ComparisonReport> {
    let read = |p: &Path| -> Result<TimeSeries> {
        let f = fs::File::open(p).map_err(|e| Error::Io {
            path: p.display().to_string(),
            source: e,
        })?;
        TimeSeries::read_csv(std::io::BufReader::new(f), &p.display().to_string())
    };
    let (sa, sb) = (read(a)?, read(b)?);
    let mut report = ComparisonReport::empty(&format!("{} vs {}", a.display(), b.display()));
    report.tolerance = tolerance;
    report
        .differences
        .push(("compare".into(), compare(&sa, &sb, channels)?));
    Ok(report)
}
