use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use toml::{Table, Value};
use twophoton::analytic::{longpulse_dip_delay, rect_one_photon_out, rect_two_photon_out};
use twophoton::correlations::{correlation_slice, find_dip_zeros, Normalization};
use twophoton::io::{self, read_table, read_wavefunction1, read_wavefunction2};
use twophoton::oracle::{
    evolve_one_photon_traced, evolve_two_photon_traced, excitation_trace, relative_l2, OracleSetup,
};
use twophoton::propagate::{
    apply_one_photon, apply_two_photon, apply_two_photon_linear, decompose_processes, default_output_grid, Warning,
};
use twophoton::{norm1, norm2, Grid, LabState1, LabState2, Params, Psi1, Psi2};

use crate::config::{G2Norm, OracleMode, PulseKind, RunConfig};
use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Ctx {
    cfg: RunConfig,
    params: Params,
    linear_only: bool,
    check: bool,
}

impl Ctx {
    pub fn new(cfg: RunConfig, linear_only: bool, check: bool) -> Result<Self, CliError> {
        let params = Params::new(cfg.gamma, cfg.c)?;
        Ok(Self { cfg, params, linear_only, check })
    }

    fn meta(&self, command: &str) -> Vec<(String, String)> {
        let mut m = vec![
            ("twophoton".to_string(), VERSION.to_string()),
            ("command".to_string(), command.to_string()),
            ("linear_only".to_string(), self.linear_only.to_string()),
        ];
        m.extend(self.cfg.flat.iter().map(|(k, v)| (k.clone(), v.to_string())));
        m
    }

    fn out_path(&self, name: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.cfg.out_dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", self.cfg.out_dir.display())))?;
        Ok(self.cfg.out_dir.join(name))
    }

    fn write_manifest(&self, command: &str, mut results: Table) -> Result<PathBuf, CliError> {
        let mut params = Table::new();
        for (k, v) in &self.cfg.flat {
            params.insert(k.clone(), v.clone());
        }
        let mut root = Table::new();
        root.insert("version".into(), Value::String(VERSION.into()));
        root.insert("command".into(), Value::String(command.into()));
        root.insert("linear_only".into(), Value::Boolean(self.linear_only));
        root.insert("params".into(), Value::Table(params));
        results.retain(|_, v| !matches!(v, Value::Float(f) if !f.is_finite()));
        root.insert("results".into(), Value::Table(results));
        let text = toml::to_string(&root).map_err(|e| CliError::Io(e.to_string()))?;
        let path = self.out_path(&format!("manifest-{command}.toml"))?;
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

enum Input {
    One(Psi1),
    Two(Psi2),
}

impl Input {
    fn two(&self) -> Psi2 {
        match self {
            Input::One(p) => Psi2::product(p),
            Input::Two(p) => p.clone(),
        }
    }
}

fn rect_length(cfg: &RunConfig) -> Option<f64> {
    match cfg.pulse {
        PulseKind::Rectangular { length } => Some(length),
        _ => None,
    }
}

fn load_file_pulse(path: &Path) -> Result<Input, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header = read_table(text.as_bytes())?.header;
    let renorm = |n: f64| -> Result<f64, CliError> {
        if !(n > 0.0) {
            return Err(CliError::Config(format!("{} holds a zero pulse", path.display())));
        }
        if (n - 1.0).abs() > 1e-6 {
            eprintln!("warning: {} had norm {n:.9}, renormalized to 1", path.display());
        }
        Ok(1.0 / n.sqrt())
    };
    if header.len() == 3 {
        let psi: Psi1 = read_wavefunction1(text.as_bytes())?;
        let s = renorm(norm1(&psi))?;
        Ok(Input::One(psi.scaled(Complex64::new(s, 0.0))))
    } else {
        let raw: Psi2 = read_wavefunction2(text.as_bytes())?;
        let sym = Psi2::symmetrized(raw.grid().clone(), raw.amp().to_vec())?;
        let s = renorm(norm2(&sym))?;
        Ok(Input::Two(sym.scaled(Complex64::new(s, 0.0))))
    }
}

/// Pulse support in the moving frame, `None` for the zero pulse.
fn support(cfg: &RunConfig, file: Option<&Input>) -> Option<(f64, f64)> {
    match &cfg.pulse {
        PulseKind::Rectangular { length } => Some((0.0, *length)),
        PulseKind::Gaussian { center, width } => Some((center - 8.0 * width, center + 8.0 * width)),
        PulseKind::Zero => None,
        PulseKind::File { .. } => match file? {
            Input::One(p) => p.support(),
            Input::Two(p) => Some((p.grid().x_min(), p.grid().x_max())),
        },
    }
}

fn breakpoints_inside(cfg: &RunConfig, lo: f64, hi: f64) -> Vec<f64> {
    rect_length(cfg)
        .map(|l| [0.0, l].into_iter().filter(|&b| b >= lo && b <= hi).collect())
        .unwrap_or_default()
}

fn configured_grid(ctx: &Ctx, supp: Option<(f64, f64)>) -> Result<Grid, CliError> {
    let cfg = &ctx.cfg;
    match (&cfg.grid, supp) {
        (Some(g), _) => Ok(Grid::aligned(g.x_min, g.x_max, g.n, &breakpoints_inside(cfg, g.x_min, g.x_max))?),
        (None, Some(s)) => Ok(default_output_grid(s, &breakpoints_inside(cfg, s.0, s.1), &ctx.params)?),
        (None, None) => Ok(Grid::uniform(-10.0 * ctx.params.relaxation_length(), 0.0, 1001)?),
    }
}

fn build_input(ctx: &Ctx, grid: &Grid, file: Option<Input>) -> Result<Input, CliError> {
    Ok(match &ctx.cfg.pulse {
        PulseKind::Rectangular { length } => Input::One(Psi1::rectangular(*length, grid.clone())?),
        PulseKind::Gaussian { center, width } => Input::One(Psi1::gaussian(*center, *width, grid.clone())?),
        PulseKind::Zero => Input::One(Psi1::zeros(grid.clone())),
        PulseKind::File { .. } => file.expect("file pulses are loaded before the grid is built"),
    })
}

fn load_pulse_file(cfg: &RunConfig) -> Result<Option<Input>, CliError> {
    match &cfg.pulse {
        PulseKind::File { path } => Ok(Some(load_file_pulse(path)?)),
        _ => Ok(None),
    }
}

/// Input on the configured grid, refusing grids that miss part of the pulse.
fn covered_input(ctx: &Ctx) -> Result<(Grid, Input), CliError> {
    let file = load_pulse_file(&ctx.cfg)?;
    let supp = support(&ctx.cfg, file.as_ref());
    let grid = configured_grid(ctx, supp)?;
    if let Some((lo, hi)) = supp {
        let slack = 1e-9 * grid.dx();
        if lo < grid.x_min() - slack || hi > grid.x_max() + slack {
            return Err(CliError::Config(format!(
                "grid [{}, {}] does not cover the pulse support [{lo}, {hi}]",
                grid.x_min(),
                grid.x_max()
            )));
        }
    }
    let input = build_input(ctx, &grid, file)?;
    Ok((grid, input))
}

fn warnings_value(ws: &[Warning]) -> Value {
    Value::Array(ws.iter().map(|w| Value::String(format!("{w:?}"))).collect())
}

fn max_abs_diff(a: &Psi2, f: impl Fn(f64, f64) -> Complex64) -> f64 {
    let g = a.grid();
    let n = g.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a.get(i, j) - f(g.x(i), g.x(j))).norm());
        }
    }
    worst
}

pub fn simulate(ctx: &Ctx) -> Result<(), CliError> {
    let start = Instant::now();
    let (grid, input) = covered_input(ctx)?;
    let input2 = input.two();
    let out = apply_two_photon(&input2, &grid, &ctx.params)?;
    let secs = start.elapsed().as_secs_f64();
    let meta = ctx.meta("simulate");
    let main = if ctx.linear_only { &out.linear } else { &out.total };
    for (name, psi) in [("psi_out.csv", main), ("psi_lin.csv", &out.linear), ("psi_nonlin.csv", &out.nonlinear)] {
        io::to_file(ctx.out_path(name)?, |w| io::write_wavefunction2(w, psi, &meta))?;
    }
    for w in &out.warnings {
        eprintln!("warning: {w:?}");
    }

    let mut res = Table::new();
    res.insert("grid_points".into(), Value::Integer(grid.len() as i64));
    res.insert("grid_x_min".into(), Value::Float(grid.x_min()));
    res.insert("grid_x_max".into(), Value::Float(grid.x_max()));
    let n_in = norm2(&input2);
    let n_out = norm2(main);
    res.insert("norm_input".into(), Value::Float(n_in));
    res.insert("norm_output".into(), Value::Float(n_out));
    res.insert("norm_linear".into(), Value::Float(norm2(&out.linear)));
    res.insert("norm_nonlinear".into(), Value::Float(norm2(&out.nonlinear)));
    res.insert("seconds".into(), Value::Float(secs));
    res.insert("warnings".into(), warnings_value(&out.warnings));

    let verdict = if let Some(l) = rect_length(&ctx.cfg) {
        let p = ctx.params;
        let diff = if ctx.linear_only {
            max_abs_diff(main, |a, b| rect_one_photon_out(a, l, &p).unwrap() * rect_one_photon_out(b, l, &p).unwrap())
        } else {
            max_abs_diff(main, |a, b| rect_two_photon_out(a, b, l, &p).unwrap())
        };
        res.insert("max_abs_diff_closed_form".into(), Value::Float(diff));
        println!("max |output - closed form| = {diff:.3e}");
        (diff <= 1e-10).then_some(()).ok_or(format!("closed-form deviation {diff:e} exceeds 1e-10"))
    } else {
        let d = (n_out - n_in).abs();
        (d <= 1e-4).then_some(()).ok_or(format!("norm changed by {d:e}, more than 1e-4"))
    };
    println!("norm in {n_in:.9}, out {n_out:.9}, {secs:.2} s");
    let path = ctx.write_manifest("simulate", res)?;
    println!("wrote {}", path.display());
    finish_check(ctx, verdict)
}

fn finish_check(ctx: &Ctx, verdict: Result<(), String>) -> Result<(), CliError> {
    match (ctx.check, verdict) {
        (true, Err(msg)) => Err(CliError::Check(msg)),
        (true, Ok(())) => {
            println!("check passed");
            Ok(())
        }
        _ => Ok(()),
    }
}

fn default_anchor(cfg: &RunConfig, supp: Option<(f64, f64)>) -> f64 {
    cfg.anchor_x.unwrap_or_else(|| match &cfg.pulse {
        PulseKind::Gaussian { center, .. } => *center,
        _ => supp.map_or(0.0, |(lo, hi)| 0.5 * (lo + hi)),
    })
}

pub fn g2(ctx: &Ctx) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &ctx.cfg;
    let (tmin, tmax, tn) = cfg.tau;
    let c = ctx.params.c();
    let (psi, anchor) = if let Some(path) = &cfg.g2_from {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let raw: Psi2 = read_wavefunction2(text.as_bytes())?;
        let psi = Psi2::symmetrized(raw.grid().clone(), raw.amp().to_vec())?;
        let anchor = default_anchor(cfg, Some((psi.grid().x_min(), psi.grid().x_max())));
        (psi, anchor)
    } else {
        let file = load_pulse_file(cfg)?;
        let supp = support(cfg, file.as_ref());
        let anchor = default_anchor(cfg, supp);
        let grid = match &cfg.grid {
            Some(_) => configured_grid(ctx, supp)?,
            None => {
                // A window just wide enough for the requested delays, spaced so
                // that delay samples land on nodes. Sampled pulses also need
                // their trailing edge inside.
                let step = c * (tmax - tmin) / (tn - 1) as f64;
                let lo = (anchor + c * tmin).min(anchor);
                let mut hi = (anchor + c * tmax).max(anchor);
                if !matches!(cfg.pulse, PulseKind::Rectangular { .. }) {
                    if let Some((_, s_hi)) = supp {
                        hi = hi.max(s_hi);
                    }
                }
                let n = ((hi - lo) / step).round() as usize + 1;
                Grid::aligned(lo, hi, n.max(2), &breakpoints_inside(cfg, lo, hi))?
            }
        };
        let input = build_input(ctx, &grid, file)?.two();
        let psi = if ctx.linear_only {
            apply_two_photon_linear(&input, &grid, &ctx.params)?.psi
        } else {
            apply_two_photon(&input, &grid, &ctx.params)?.total
        };
        (psi, anchor)
    };
    let norm = match cfg.g2_norm {
        G2Norm::Local => Normalization::LocalDensity,
        G2Norm::LongPulse => {
            let length = cfg.g2_length.or(rect_length(cfg)).ok_or_else(|| {
                CliError::Config("long-pulse normalization needs `g2.length` for non-rectangular pulses".into())
            })?;
            Normalization::LongPulse { length }
        }
    };
    let curve = correlation_slice(&psi, anchor, (tmin, tmax), tn, Some(norm), &ctx.params)?;
    let zeros = find_dip_zeros(&curve)?;
    let secs = start.elapsed().as_secs_f64();
    let meta = ctx.meta("g2");
    io::to_file(ctx.out_path("g2.csv")?, |w| io::write_curve(w, &curve, &meta))?;

    let max = curve.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = curve.values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut res = Table::new();
    res.insert("anchor_x".into(), Value::Float(anchor));
    res.insert("zeros".into(), Value::Array(zeros.iter().map(|&z| Value::Float(z)).collect()));
    res.insert("max".into(), Value::Float(max));
    res.insert("min".into(), Value::Float(min));
    res.insert("seconds".into(), Value::Float(secs));
    println!("anchor x = {anchor}, {} zero(s) at {zeros:.6?}, range [{min:.6}, {max:.6}]", zeros.len());
    let path = ctx.write_manifest("g2", res)?;
    println!("wrote {}", path.display());

    let d = longpulse_dip_delay(&ctx.params);
    let verdict = if ctx.linear_only {
        zeros.is_empty().then_some(()).ok_or(format!("linear-only curve has zeros at {zeros:?}"))
    } else {
        let ok = zeros.len() == 2 && zeros.iter().all(|z| (z.abs() - d).abs() <= 1e-3);
        ok.then_some(()).ok_or(format!("expected zeros at +/-{d:.6}, found {zeros:?}"))
    };
    finish_check(ctx, verdict)
}

/// Moving-frame pulse as a function, cut to its support.
fn pulse_fn<'a>(cfg: &'a RunConfig, file: Option<&'a Input>) -> Box<dyn Fn(f64, f64) -> Complex64 + 'a> {
    let zero = Complex64::new(0.0, 0.0);
    match &cfg.pulse {
        PulseKind::Rectangular { length } => {
            let (l, a) = (*length, 1.0 / length.sqrt());
            let one = move |x: f64| if (0.0..=l).contains(&x) { a } else { 0.0 };
            Box::new(move |x1, x2| Complex64::new(one(x1) * one(x2), 0.0))
        }
        PulseKind::Gaussian { center, width } => {
            let (m, w) = (*center, *width);
            let pre = (2.0 * std::f64::consts::PI * w * w).powf(-0.25);
            let one = move |x: f64| {
                let d = (x - m) / w;
                if d.abs() <= 8.0 { pre * (-d * d / 4.0).exp() } else { 0.0 }
            };
            Box::new(move |x1, x2| Complex64::new(one(x1) * one(x2), 0.0))
        }
        PulseKind::Zero => Box::new(move |_, _| zero),
        PulseKind::File { .. } => match file {
            Some(Input::One(p)) => Box::new(move |x1, x2| p.value_at(x1) * p.value_at(x2)),
            Some(Input::Two(p)) => Box::new(move |x1, x2| p.interpolate(x1, x2).unwrap_or(zero)),
            None => Box::new(move |_, _| zero),
        },
    }
}

/// `‖a - b‖/‖b‖`, or `‖a‖` when the reference vanishes.
fn deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let den: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    if den > 0.0 {
        relative_l2(a, b)
    } else {
        a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

struct OracleResult {
    deviation: f64,
    drift: f64,
    steps: usize,
    out: Input,
    trace: Vec<(f64, f64)>,
}

fn run_oracle(ctx: &Ctx, file: Option<&Input>, dx: f64) -> Result<OracleResult, CliError> {
    let cfg = &ctx.cfg;
    let p = &ctx.params;
    let (lo, hi) = support(cfg, file).unwrap_or((0.0, p.relaxation_length()));
    let setup = OracleSetup::for_support(lo, hi, dx, p)?;
    let f = pulse_fn(cfg, file);
    match cfg.oracle_mode {
        OracleMode::One => {
            let g1 = |x: f64| match (&cfg.pulse, file) {
                (PulseKind::File { .. }, Some(Input::One(psi))) => psi.value_at(x),
                (PulseKind::File { .. }, _) => Complex64::new(0.0, 0.0),
                _ => {
                    // Single-photon amplitude from the symmetric product form.
                    let v = f(x, x);
                    Complex64::new(v.re.max(0.0).sqrt(), 0.0)
                }
            };
            let st = LabState1::from_moving_frame(setup.grid, setup.t_initial, p, g1);
            let run = evolve_one_photon_traced(&st, dx, setup.t_final, p)?;
            let out = run.state.to_moving_frame(p)?;
            let reference: Vec<Complex64> = match rect_length(cfg) {
                Some(l) => out.grid().points().iter().map(|&x| rect_one_photon_out(x, l, p)).collect::<Result<_, _>>()?,
                None => {
                    let input = Psi1::from_fn(out.grid().clone(), g1)?;
                    apply_one_photon(&input, out.grid(), p)?.psi.amp().to_vec()
                }
            };
            Ok(OracleResult {
                deviation: deviation(out.amp(), &reference),
                drift: run.norm_drift,
                steps: run.steps,
                trace: excitation_trace(&run)?.to_vec(),
                out: Input::One(out),
            })
        }
        OracleMode::Two => {
            let st = LabState2::from_moving_frame(setup.grid, setup.t_initial, p, &f);
            let run = evolve_two_photon_traced(&st, dx, setup.t_final, p)?;
            let out = run.state.to_moving_frame(p)?;
            let out = Psi2::symmetrized(out.grid().clone(), out.amp().to_vec())?;
            let g = out.grid().clone();
            let deviation = match rect_length(cfg) {
                Some(l) => {
                    let (mut num, mut den) = (0.0, 0.0);
                    for (k, v) in out.amp().iter().enumerate() {
                        let want = rect_two_photon_out(g.x(k / g.len()), g.x(k % g.len()), l, p)?;
                        num += (v - want).norm_sqr();
                        den += want.norm_sqr();
                    }
                    (num / den).sqrt()
                }
                None => {
                    let input = Psi2::from_fn(g.clone(), &f)?;
                    let reference = apply_two_photon(&input, &g, p)?.total;
                    deviation(out.amp(), reference.amp())
                }
            };
            Ok(OracleResult {
                deviation,
                drift: run.norm_drift,
                steps: run.steps,
                trace: excitation_trace(&run)?.to_vec(),
                out: Input::Two(out),
            })
        }
    }
}

pub fn oracle(ctx: &Ctx) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = &ctx.cfg;
    let file = load_pulse_file(cfg)?;
    if let (OracleMode::One, Some(Input::Two(_))) = (cfg.oracle_mode, file.as_ref()) {
        return Err(CliError::Config("one-photon oracle needs a one-photon pulse file".into()));
    }
    let dx = cfg.oracle_dx;
    let main = run_oracle(ctx, file.as_ref(), dx)?;
    let half = if cfg.oracle_ratio { Some(run_oracle(ctx, file.as_ref(), 0.5 * dx)?) } else { None };
    let secs = start.elapsed().as_secs_f64();

    let meta = ctx.meta("oracle");
    match &main.out {
        Input::One(p) => io::to_file(ctx.out_path("oracle_out.csv")?, |w| io::write_wavefunction1(w, p, &meta))?,
        Input::Two(p) => io::to_file(ctx.out_path("oracle_out.csv")?, |w| io::write_wavefunction2(w, p, &meta))?,
    }
    io::to_file(ctx.out_path("trace.csv")?, |w| io::write_trace(w, &main.trace, &meta))?;

    let mut res = Table::new();
    res.insert("dx".into(), Value::Float(dx));
    res.insert("steps".into(), Value::Integer(main.steps as i64));
    res.insert("rel_l2".into(), Value::Float(main.deviation));
    res.insert("norm_drift".into(), Value::Float(main.drift));
    let ratio = half.as_ref().map(|h| main.deviation / h.deviation);
    if let Some(h) = &half {
        res.insert("rel_l2_half_dx".into(), Value::Float(h.deviation));
        res.insert("norm_drift_half_dx".into(), Value::Float(h.drift));
    }
    if let Some(r) = ratio {
        res.insert("ratio".into(), Value::Float(r));
    }
    res.insert("seconds".into(), Value::Float(secs));
    println!("rel-L2 deviation {:.4e} at dx = {dx}, norm drift {:.3e}", main.deviation, main.drift);
    if let (Some(h), Some(r)) = (&half, ratio) {
        println!("rel-L2 deviation {:.4e} at dx = {}, ratio {r:.3}", h.deviation, 0.5 * dx);
    }
    let path = ctx.write_manifest("oracle", res)?;
    println!("wrote {}", path.display());

    let tol = cfg.oracle_tol.unwrap_or(match cfg.oracle_mode {
        OracleMode::One => 2e-2,
        OracleMode::Two => 5e-2,
    });
    let verdict = if main.deviation > tol {
        Err(format!("rel-L2 {:.4e} exceeds {tol:e}", main.deviation))
    } else {
        match ratio {
            Some(r) if r.is_finite() && (r - 2.0).abs() > 0.3 => Err(format!("convergence ratio {r:.3} outside 2 +/- 0.3")),
            _ => Ok(()),
        }
    };
    finish_check(ctx, verdict)
}

pub fn decompose(ctx: &Ctx) -> Result<(), CliError> {
    let start = Instant::now();
    let (grid, input) = covered_input(ctx)?;
    let input2 = input.two();
    let pr = decompose_processes(&input2, &grid, &ctx.params)?;
    let total = apply_two_photon(&input2, &grid, &ctx.params)?.total;
    let secs = start.elapsed().as_secs_f64();
    let meta = ctx.meta("decompose");
    for (name, psi) in [("p_i.csv", &pr.p_i), ("p_ii.csv", &pr.p_ii), ("p_iii.csv", &pr.p_iii), ("nonlinear.csv", &pr.nonlinear)] {
        io::to_file(ctx.out_path(name)?, |w| io::write_wavefunction2(w, psi, &meta))?;
    }
    let residual = total
        .amp()
        .iter()
        .enumerate()
        .map(|(k, t)| (pr.p_i.amp()[k] + pr.p_ii.amp()[k] + pr.p_iii.amp()[k] - t).norm())
        .fold(0.0, f64::max);
    let mut res = Table::new();
    res.insert("grid_points".into(), Value::Integer(grid.len() as i64));
    res.insert("sum_residual".into(), Value::Float(residual));
    for (k, psi) in [("norm_p_i", &pr.p_i), ("norm_p_ii", &pr.p_ii), ("norm_p_iii", &pr.p_iii)] {
        res.insert(k.into(), Value::Float(norm2(psi)));
    }
    res.insert("seconds".into(), Value::Float(secs));
    println!("max |p_i + p_ii + p_iii - total| = {residual:.3e}");
    let path = ctx.write_manifest("decompose", res)?;
    println!("wrote {}", path.display());
    let verdict = (residual <= 1e-12).then_some(()).ok_or(format!("process sum residual {residual:e} exceeds 1e-12"));
    finish_check(ctx, verdict)
}

pub fn compare(ctx: &Ctx, a: &Path, b: &Path) -> Result<(), CliError> {
    let read = |p: &Path| -> Result<io::Table, CliError> {
        let f = fs::File::open(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        Ok(read_table(f)?)
    };
    let (ta, tb) = (read(a)?, read(b)?);
    if ta.header != tb.header {
        return Err(CliError::Config(format!(
            "column mismatch: {} has {}, {} has {}",
            a.display(),
            ta.header.join(","),
            b.display(),
            tb.header.join(",")
        )));
    }
    if ta.rows.len() != tb.rows.len() {
        return Err(CliError::Config(format!(
            "shape mismatch: {} has {} rows, {} has {}",
            a.display(),
            ta.rows.len(),
            b.display(),
            tb.rows.len()
        )));
    }
    let complex = ta.header.ends_with(&["re".to_string(), "im".to_string()]);
    let n_coord = ta.header.len() - if complex { 2 } else { 1 };
    let (mut worst, mut num, mut den) = (0.0f64, 0.0, 0.0);
    for (k, (ra, rb)) in ta.rows.iter().zip(&tb.rows).enumerate() {
        for c in 0..n_coord {
            if (ra[c] - rb[c]).abs() > 1e-9 * ra[c].abs().max(1.0) {
                return Err(CliError::Config(format!(
                    "grid mismatch at row {k}: {} = {} vs {}",
                    ta.header[c], ra[c], rb[c]
                )));
            }
        }
        let d = if complex {
            Complex64::new(ra[n_coord] - rb[n_coord], ra[n_coord + 1] - rb[n_coord + 1]).norm_sqr()
        } else {
            (ra[n_coord] - rb[n_coord]).powi(2)
        };
        let r: f64 = rb[n_coord..].iter().map(|v| v * v).sum();
        worst = worst.max(d.sqrt());
        num += d;
        den += r;
    }
    let rel = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    println!("rows {}", ta.rows.len());
    println!("max_abs_diff {worst:.6e}");
    println!("rel_l2 {rel:.6e}");
    let tol = ctx.cfg.compare_tol;
    let verdict = (worst <= tol).then_some(()).ok_or(format!("max abs diff {worst:e} exceeds {tol:e}"));
    finish_check(ctx, verdict)
}
