//! Convergence studies driven by a flat `key = value` configuration, and
//! their CSV / markdown reports.
//!
//! Recognized keys:
//!
//! | key          | values                               | default                       |
//! |--------------|--------------------------------------|-------------------------------|
//! | `example`    | `polynomial`, `trig`                 | `polynomial`                  |
//! | `k`          | `1`, `2`                             | `1`                           |
//! | `mode`       | `spatial`, `temporal`, `single`      | `spatial`                     |
//! | `pattern`    | `diagonal-ne`, `diagonal-nw`, `crisscross` | `diagonal-ne`           |
//! | `meshes`     | increasing list of `M`               | `2,4,8,16,32`                 |
//! | `dts`        | decreasing list of time steps        | `0.5,0.25,...,0.015625`       |
//! | `dt`         | fixed time step (spatial, single)    | `5e-4` (k=1), `5e-5` (k=2)    |
//! | `mesh`       | fixed `M` (temporal, single)         | `32` (temporal), `8` (single) |
//! | `T`          | final time                           | `1`                           |
//! | `fast`       | `true` / `false`                     | `false`                       |
//! | `out`        | output directory                     | none                          |
//! | `format`     | `csv`, `markdown`                    | `csv`                         |
//! | `vtk_stride` | snapshot every n steps, 0 disables   | `0`                           |
//!
//! `fast` only affects `k = 2` spatial studies: the default time step becomes
//! `2e-4` and the default mesh list stops at `M = 16`.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::evolve::{check_energy_identity, initial_state, step_count, Forcing, Simulation, SolverStats};
use crate::mesh::{build_uniform_mesh, Pattern};
use crate::mms::{error_norms, observed_order, ErrorReport, Example, ManufacturedCase};
use crate::system::assemble_blocks;
use crate::vtk::write_vtk;
use crate::wgops::WgSpace;
use crate::{Error, Result};

/// Environment variable holding the number of worker threads for a study.
pub const THREADS_ENV: &str = "WGMAXWELL_THREADS";

pub const CSV_HEADER: &str = "resolution,err_stress_rel,order_stress,err_strain_scaled_rel,order_strain,err_velocity_rel,order_velocity";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    #[default]
    Spatial,
    Temporal,
    Single,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Spatial => "spatial",
            Mode::Temporal => "temporal",
            Mode::Single => "single",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spatial" => Ok(Mode::Spatial),
            "temporal" => Ok(Mode::Temporal),
            "single" => Ok(Mode::Single),
            other => Err(Error::InvalidConfig(format!("unknown mode '{other}' (expected spatial, temporal or single)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "markdown",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidConfig(format!("unknown format '{other}' (expected csv or markdown)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub example: Example,
    pub k: usize,
    pub mode: Mode,
    pub pattern: Pattern,
    /// Spatial sweep; empty selects the default list.
    pub meshes: Vec<usize>,
    /// Temporal sweep; empty selects the default list.
    pub dts: Vec<f64>,
    pub dt: Option<f64>,
    pub mesh: Option<usize>,
    pub t_final: f64,
    pub fast: bool,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
    pub vtk_stride: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            example: Example::Polynomial,
            k: 1,
            mode: Mode::Spatial,
            pattern: Pattern::DiagonalNe,
            meshes: Vec::new(),
            dts: Vec::new(),
            dt: None,
            mesh: None,
            t_final: 1.0,
            fast: false,
            out: None,
            format: ReportFormat::Csv,
            vtk_stride: 0,
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::InvalidConfig(format!("invalid value '{value}' for key '{key}'"))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| bad(key, value))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_num(key, s)).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

impl StudyConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value, got '{line}'", n + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key; also used for command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "example" => self.example = value.parse()?,
            "k" => self.k = parse_num(key, value)?,
            "mode" => self.mode = value.parse()?,
            "pattern" => self.pattern = value.parse()?,
            "meshes" => self.meshes = parse_list(key, value)?,
            "dts" => self.dts = parse_list(key, value)?,
            "dt" => self.dt = Some(parse_num(key, value)?),
            "mesh" => self.mesh = Some(parse_num(key, value)?),
            "T" | "t_final" => self.t_final = parse_num(key, value)?,
            "fast" => self.fast = parse_bool(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "vtk_stride" => self.vtk_stride = parse_num(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    fn fast_k2(&self) -> bool {
        self.fast && self.k == 2 && self.mode == Mode::Spatial
    }

    pub fn fixed_dt(&self) -> f64 {
        self.dt.unwrap_or(match (self.k, self.mode) {
            (_, Mode::Single) => 0.01,
            (1, _) => 5e-4,
            _ if self.fast_k2() => 2e-4,
            _ => 5e-5,
        })
    }

    pub fn fixed_mesh(&self) -> usize {
        self.mesh.unwrap_or(if self.mode == Mode::Single { 8 } else { 32 })
    }

    pub fn mesh_list(&self) -> Vec<usize> {
        if !self.meshes.is_empty() {
            return self.meshes.clone();
        }
        let cap = if self.fast_k2() { 16 } else { 32 };
        [2, 4, 8, 16, 32].into_iter().filter(|m| *m <= cap).collect()
    }

    pub fn dt_list(&self) -> Vec<f64> {
        if !self.dts.is_empty() {
            return self.dts.clone();
        }
        vec![0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625]
    }

    /// The `(M, dt)` pairs to run, after validation.
    pub fn plan(&self) -> Result<Vec<(usize, f64)>> {
        if !(1..=2).contains(&self.k) {
            return Err(Error::InvalidConfig(format!("k must be 1 or 2, got {}", self.k)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidConfig(format!("T must be positive, got {}", self.t_final)));
        }
        let plan: Vec<(usize, f64)> = match self.mode {
            Mode::Spatial => {
                let meshes = self.mesh_list();
                if meshes.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidConfig("meshes must be strictly increasing".into()));
                }
                meshes.into_iter().map(|m| (m, self.fixed_dt())).collect()
            }
            Mode::Temporal => {
                let dts = self.dt_list();
                if dts.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::InvalidConfig("dts must be strictly decreasing".into()));
                }
                dts.into_iter().map(|dt| (self.fixed_mesh(), dt)).collect()
            }
            Mode::Single => vec![(self.fixed_mesh(), self.fixed_dt())],
        };
        if plan.is_empty() {
            return Err(Error::InvalidConfig("empty resolution list".into()));
        }
        for &(m, dt) in &plan {
            if m == 0 {
                return Err(Error::InvalidConfig("mesh size M must be positive".into()));
            }
            step_count(self.t_final, dt)?;
        }
        Ok(plan)
    }

    /// `key = value` lines that reproduce this run.
    pub fn echo(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "example = {}", self.example);
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "mode = {}", self.mode);
        let _ = writeln!(s, "pattern = {}", self.pattern);
        match self.mode {
            Mode::Spatial => {
                let _ = writeln!(s, "meshes = {}", join(self.mesh_list().iter().map(|m| m.to_string()).collect()));
                let _ = writeln!(s, "dt = {}", self.fixed_dt());
            }
            Mode::Temporal => {
                let _ = writeln!(s, "dts = {}", join(self.dt_list().iter().map(|d| d.to_string()).collect()));
                let _ = writeln!(s, "mesh = {}", self.fixed_mesh());
            }
            Mode::Single => {
                let _ = writeln!(s, "mesh = {}", self.fixed_mesh());
                let _ = writeln!(s, "dt = {}", self.fixed_dt());
            }
        }
        let _ = writeln!(s, "T = {}", self.t_final);
        let _ = writeln!(s, "fast = {}", self.fast);
        let _ = writeln!(s, "format = {}", self.format.as_str());
        let _ = writeln!(s, "vtk_stride = {}", self.vtk_stride);
        s
    }

    /// File stem of reports, e.g. `polynomial_k1_spatial`.
    pub fn report_stem(&self) -> String {
        format!("{}_k{}_{}", self.example, self.k, self.mode)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orders {
    pub stress: f64,
    pub strain: f64,
    pub velocity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub m: usize,
    pub dt: f64,
    pub errors: ErrorReport,
    /// Observed orders against the previous row; `None` on the first row.
    pub orders: Option<Orders>,
    pub energy_residual: f64,
    pub stats: SolverStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
    pub wall_seconds: Option<f64>,
}

impl ConvergenceTable {
    pub fn label(&self, row: &StudyRow) -> String {
        match self.config.mode {
            Mode::Temporal => row.dt.to_string(),
            _ => format!("{0}x{0}", row.m),
        }
    }

    /// Fills the order columns from consecutive rows.
    pub fn fill_orders(&mut self) {
        let mode = self.config.mode;
        for i in 1..self.rows.len() {
            let (a, b) = (&self.rows[i - 1], &self.rows[i]);
            let ratio = match mode {
                Mode::Temporal => a.dt / b.dt,
                _ => b.m as f64 / a.m as f64,
            };
            let order = |x: f64, y: f64| observed_order(x, y, ratio).unwrap_or(f64::NAN);
            let orders = Orders {
                stress: order(a.errors.stress, b.errors.stress),
                strain: order(a.errors.strain_scaled, b.errors.strain_scaled),
                velocity: order(a.errors.velocity, b.errors.velocity),
            };
            self.rows[i].orders = Some(orders);
        }
    }
}

/// Runs one `(M, dt)` pair to the final time.
pub fn run_resolution(config: &StudyConfig, m: usize, dt: f64) -> Result<StudyRow> {
    let case = ManufacturedCase::from(config.example);
    let space = WgSpace::new(build_uniform_mesh(m, config.pattern)?, config.k)?;
    let blocks = assemble_blocks(&space, &case.law);
    let forcing = Forcing::separable(&space, |x| case.forcing_profile(x), ManufacturedCase::stress_time_factor);
    let initial = initial_state(&space, |x| case.initial_stress(x));
    let steps = step_count(config.t_final, dt)?;

    let snapshots = match (&config.out, config.vtk_stride) {
        (Some(out), stride) if stride > 0 => {
            let dir = out.join("vtk");
            fs::create_dir_all(&dir)?;
            Some((dir, stride))
        }
        _ => None,
    };
    let snapshot = |state: &crate::evolve::State| -> Result<()> {
        if let Some((dir, stride)) = &snapshots {
            if state.step.is_multiple_of(*stride) || state.step == steps {
                let name = format!("{}_k{}_{m}x{m}_dt{dt}_{:06}.vtk", config.example, config.k, state.step);
                let file = fs::File::create(dir.join(name))?;
                write_vtk(std::io::BufWriter::new(file), &space, state)?;
            }
        }
        Ok(())
    };

    snapshot(&initial)?;
    let mut sim = Simulation::new(&space, &blocks, dt, forcing, initial)?;
    sim.run(steps, snapshot)?;
    let errors = error_norms(&space, &sim.state.eta, &sim.state.beta, &case, sim.state.time, dt);
    Ok(StudyRow { m, dt, errors, orders: None, energy_residual: check_energy_identity(&sim.ledger), stats: sim.stats() })
}

/// Thread count from [`THREADS_ENV`]; serial when unset or invalid.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|n| *n > 0).unwrap_or(1)
}

pub fn run_study(config: &StudyConfig) -> Result<ConvergenceTable> {
    run_study_with_threads(config, threads_from_env())
}

/// Runs every resolution, up to `threads` at a time. Rows come back in plan
/// order whatever the thread count.
pub fn run_study_with_threads(config: &StudyConfig, threads: usize) -> Result<ConvergenceTable> {
    let plan = config.plan()?;
    let clock = Stopwatch::start();
    let rows = if threads <= 1 || plan.len() == 1 {
        plan.iter().map(|&(m, dt)| run_resolution(config, m, dt)).collect::<Result<Vec<_>>>()?
    } else {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<StudyRow>>>> = plan.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|s| {
            for _ in 0..threads.min(plan.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&(m, dt)) = plan.get(i) else { break };
                    let row = run_resolution(config, m, dt);
                    *slots[i].lock().unwrap() = Some(row);
                });
            }
        });
        slots.into_iter().map(|s| s.into_inner().unwrap().expect("every slot is filled")).collect::<Result<Vec<_>>>()?
    };
    let mut table = ConvergenceTable { config: config.clone(), rows, wall_seconds: clock.elapsed() };
    table.fill_orders();
    Ok(table)
}

struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Option<f64> {
        #[cfg(not(target_arch = "wasm32"))]
        return Some(self.start.elapsed().as_secs_f64());
        #[cfg(target_arch = "wasm32")]
        None
    }
}

/// Five significant digits with a two-digit signed exponent, e.g. `1.2181e-01`.
pub fn format_error(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub fn format_order(order: Option<f64>) -> String {
    match order {
        Some(o) if o.is_finite() => format!("{o:.2}"),
        _ => "--".into(),
    }
}

fn row_cells(table: &ConvergenceTable, row: &StudyRow) -> [String; 7] {
    let o = row.orders;
    [
        table.label(row),
        format_error(row.errors.stress),
        format_order(o.map(|o| o.stress)),
        format_error(row.errors.strain_scaled),
        format_order(o.map(|o| o.strain)),
        format_error(row.errors.velocity),
        format_order(o.map(|o| o.velocity)),
    ]
}

pub fn render_csv(table: &ConvergenceTable) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for row in &table.rows {
        s.push_str(&row_cells(table, row).join(","));
        s.push('\n');
    }
    s
}

pub fn render_markdown(table: &ConvergenceTable) -> String {
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let mut s = format!("| {} |\n", header.join(" | "));
    s.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for row in &table.rows {
        s.push_str(&format!("| {} |\n", row_cells(table, row).join(" | ")));
    }
    s
}

pub fn render(table: &ConvergenceTable, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_csv(table),
        ReportFormat::Markdown => render_markdown(table),
    }
}

/// Writes the report to `path`.
pub fn emit_report(table: &ConvergenceTable, format: ReportFormat, path: &Path) -> Result<()> {
    fs::write(path, render(table, format))?;
    Ok(())
}

/// Config echo followed by run metadata as comments, so the file can be fed
/// back through `--config`.
pub fn render_metadata(table: &ConvergenceTable) -> String {
    let mut s = table.config.echo();
    if let Some(w) = table.wall_seconds {
        let _ = writeln!(s, "# wall_seconds = {w:.3}");
    }
    for row in &table.rows {
        let _ = writeln!(
            s,
            "# {}: unknowns = {}, nonzeros = {}, steps = {}, energy_residual = {:.3e}, strain_raw = {}, absolute = {}",
            table.label(row),
            row.stats.unknowns,
            row.stats.nonzeros,
            row.stats.steps,
            row.energy_residual,
            format_error(row.errors.strain),
            row.errors.absolute,
        );
    }
    s
}

/// Writes `<stem>.<ext>` and `<stem>.meta` into `dir`; returns the report path.
pub fn write_outputs(table: &ConvergenceTable, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let stem = table.config.report_stem();
    let report = dir.join(format!("{stem}.{}", table.config.format.extension()));
    emit_report(table, table.config.format, &report)?;
    fs::write(dir.join(format!("{stem}.meta")), render_metadata(table))?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(m: usize, dt: f64, e: f64) -> StudyRow {
        StudyRow {
            m,
            dt,
            errors: ErrorReport { stress: e, strain: e, strain_scaled: e, velocity: e, absolute: false },
            orders: None,
            energy_residual: 0.0,
            stats: SolverStats::default(),
        }
    }

    #[test]
    fn error_formatting() {
        assert_eq!(format_error(1.2181e-01), "1.2181e-01");
        assert_eq!(format_error(5.5614e-4), "5.5614e-04");
        assert_eq!(format_error(0.35128), "3.5128e-01");
        assert_eq!(format_error(12.5), "1.2500e+01");
        assert_eq!(format_error(0.0), "0.0000e+00");
        assert_eq!(format_order(Some(1.949)), "1.95");
        assert_eq!(format_order(None), "--");
    }

    #[test]
    fn reports() {
        let mut table = ConvergenceTable { config: StudyConfig::default(), rows: vec![], wall_seconds: None };
        assert_eq!(render_csv(&table), format!("{CSV_HEADER}\n"));

        table.rows.push(row(2, 5e-4, 4e-2));
        table.fill_orders();
        let csv = render_csv(&table);
        assert_eq!(csv.lines().nth(1).unwrap(), "2x2,4.0000e-02,--,4.0000e-02,--,4.0000e-02,--");

        table.rows.push(row(4, 5e-4, 1e-2));
        table.fill_orders();
        let csv = render_csv(&table);
        assert_eq!(csv.lines().nth(2).unwrap(), "4x4,1.0000e-02,2.00,1.0000e-02,2.00,1.0000e-02,2.00");

        let md = render_markdown(&table);
        assert_eq!(md.lines().count(), 4);
        assert!(md.lines().nth(3).unwrap().starts_with("| 4x4 | 1.0000e-02 | 2.00 |"));
    }

    #[test]
    fn temporal_orders_use_time_step_ratio() {
        let config = StudyConfig { mode: Mode::Temporal, ..Default::default() };
        let mut table = ConvergenceTable { config, rows: vec![row(32, 0.5, 0.4), row(32, 0.25, 0.2)], wall_seconds: None };
        table.fill_orders();
        assert!((table.rows[1].orders.unwrap().velocity - 1.0).abs() < 1e-14);
        assert_eq!(table.label(&table.rows[1]), "0.25");
    }

    #[test]
    fn config_parsing_and_defaults() {
        let c = StudyConfig::parse("# comment\nexample = trig\nk=2\nmode = spatial\nfast = true\n\nformat = md # inline\n").unwrap();
        assert_eq!(c.example, Example::Trig);
        assert_eq!(c.format, ReportFormat::Markdown);
        assert_eq!(c.fixed_dt(), 2e-4);
        assert_eq!(c.mesh_list(), vec![2, 4, 8, 16]);
        let slow = StudyConfig { fast: false, ..c.clone() };
        assert_eq!(slow.fixed_dt(), 5e-5);
        assert_eq!(slow.mesh_list(), vec![2, 4, 8, 16, 32]);

        let t = StudyConfig::parse("mode = temporal").unwrap();
        assert_eq!(t.plan().unwrap(), vec![(32, 0.5), (32, 0.25), (32, 0.125), (32, 0.0625), (32, 0.03125), (32, 0.015625)]);

        assert!(StudyConfig::parse("colour = red").is_err());
        assert!(StudyConfig::parse("k").is_err());
        assert!(StudyConfig::parse("k = two").is_err());
        assert!(StudyConfig::parse("k = 3").unwrap().plan().is_err());
        assert!(StudyConfig::parse("meshes = 4,2").unwrap().plan().is_err());
        assert!(StudyConfig::parse("mode = temporal\ndts = 0.1,0.2").unwrap().plan().is_err());
        assert!(StudyConfig::parse("mode = single\ndt = 0.3").unwrap().plan().is_err());
    }

    #[test]
    fn echo_round_trips() {
        let c = StudyConfig::parse("example = trig\nmode = temporal\nmesh = 4\ndts = 0.5,0.25\npattern = crisscross").unwrap();
        let again = StudyConfig::parse(&c.echo()).unwrap();
        assert_eq!(again.plan().unwrap(), c.plan().unwrap());
        assert_eq!(again.echo(), c.echo());
    }

    #[test]
    fn small_study_runs_serial_and_threaded_identically() {
        let c = StudyConfig::parse("meshes = 2,4\ndt = 0.05").unwrap();
        let a = run_study_with_threads(&c, 1).unwrap();
        let b = run_study_with_threads(&c, 2).unwrap();
        assert_eq!(render_csv(&a), render_csv(&b));
        assert_eq!(a.rows.len(), 2);
        assert!(a.rows[1].orders.is_some());
        assert!(a.rows.iter().all(|r| r.energy_residual <= 1e-10));
    }
}
