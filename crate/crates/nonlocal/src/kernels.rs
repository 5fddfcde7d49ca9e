//! Per-subcommand parameters, output columns and row evaluation.

use std::f64::consts::PI;

use indexmap::IndexMap;
use num_complex::Complex64;

use nonlocal_core::bell::{
    chained_i, lhv_minimum_i, pr_box_model, quantum_i_closed_form, suppressed_nonlocality_model, QuantumModel,
};
use nonlocal_core::entangle::{
    check_entanglement_conditions, downconverted_frequencies, ideal_joint_distribution, physical_joint_distribution,
    Condition, FransonConfig,
};
use nonlocal_core::extensions::{colbeck_renner_bound, find_falsifying_n, leggett_inconsistency_demo};
use nonlocal_core::interferometer::{
    classify_interference, local_detection_distribution, quantum_distribution, sample_events_stream,
    wavepacket_distribution, DetectionDistribution, Regime,
};
use nonlocal_core::measurement::{interference_excess, is_valid_quantum_measurement, outcome_distribution};
use nonlocal_core::{
    ChainedConfig, Classification, InterferometerConfig, MeasurementMatrix, Outcome, PathAmplitudes, Shape, Spectrum,
};

use crate::spec::{OptionValue, Subcommand};

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    /// `None` makes the parameter required.
    pub default: Option<f64>,
    pub integer: bool,
}

const fn req(name: &'static str) -> Param {
    Param { name, default: None, integer: false }
}

const fn opt(name: &'static str, default: f64) -> Param {
    Param { name, default: Some(default), integer: false }
}

const fn int(name: &'static str, default: Option<f64>) -> Param {
    Param { name, default, integer: true }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Monochromatic,
    Wavepacket,
    LocalDetectors,
    Preset(Preset),
    Custom,
    Physical { post_selection: bool, window: Option<f64> },
    Ideal,
    Quantum,
    PrBox,
    Suppressed,
    Lhv,
    Falsify,
    Bound,
    Leggett,
    SampleQuantum,
    SampleLocal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Preset {
    Symmetric,
    Hadamard,
    PiQuarter,
    Identity,
}

/// Parameters, columns and evaluation rule for one scan.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub params: Vec<Param>,
    pub outputs: Vec<&'static str>,
    mode: Mode,
    shape: Shape,
}

/// Per-row context.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub tolerance: f64,
    pub seed: u64,
    pub row: u64,
}

type OptionError = (String, String);

fn text_option<'a>(
    options: &'a IndexMap<String, OptionValue>,
    key: &str,
    allowed: &[&'a str],
) -> Result<&'a str, OptionError> {
    match options.get(key) {
        None => Ok(allowed[0]),
        Some(OptionValue::Text(t)) if allowed.contains(&t.as_str()) => Ok(t.as_str()),
        Some(v) => Err((key.to_string(), format!("expected one of {}, got `{v}`", allowed.join(", ")))),
    }
}

fn bool_option(options: &IndexMap<String, OptionValue>, key: &str, default: bool) -> Result<bool, OptionError> {
    match options.get(key) {
        None => Ok(default),
        Some(OptionValue::Bool(b)) => Ok(*b),
        Some(v) => Err((key.to_string(), format!("expected true or false, got `{v}`"))),
    }
}

fn number_option(options: &IndexMap<String, OptionValue>, key: &str) -> Result<Option<f64>, OptionError> {
    match options.get(key) {
        None => Ok(None),
        Some(OptionValue::Number(x)) if *x >= 0.0 && x.is_finite() => Ok(Some(*x)),
        Some(v) => Err((key.to_string(), format!("expected a non-negative number, got `{v}`"))),
    }
}

/// Builds the kernel for `sub`, rejecting unknown or malformed options.
pub fn kernel(sub: Subcommand, options: &IndexMap<String, OptionValue>) -> Result<Kernel, OptionError> {
    let known: &[&str] = match sub {
        Subcommand::Interf => &["model", "shape"],
        Subcommand::Unitarity => &["matrix"],
        Subcommand::Franson => &["model", "shape", "post_selection", "window"],
        Subcommand::Chained | Subcommand::Sample => &["model"],
        Subcommand::Extensions => &["mode"],
    };
    if let Some(k) = options.keys().find(|k| !known.contains(&k.as_str())) {
        return Err((k.clone(), format!("unknown option for `{sub}`; expected one of: {}", known.join(", "))));
    }
    let shape = match text_option(options, "shape", &["rectangular", "gaussian"])? {
        "gaussian" => Shape::Gaussian,
        _ => Shape::Rectangular,
    };
    let distribution = vec!["p_plus", "p_minus", "p_double", "p_null", "total"];
    let joint = ["p_pp", "p_pm", "p_mp", "p_mm", "concordance", "marginal_a", "marginal_b"];

    let (mode, params, outputs) = match sub {
        Subcommand::Interf => match text_option(options, "model", &["monochromatic", "wavepacket", "local"])? {
            "wavepacket" => {
                let mut out = vec!["center_phase"];
                out.extend(distribution);
                out.push("regime");
                (
                    Mode::Wavepacket,
                    vec![req("tau"), opt("omega0", 1.0), opt("bandwidth", 0.1), opt("ratio_threshold", 100.0)],
                    out,
                )
            }
            "local" => (Mode::LocalDetectors, vec![req("phi")], distribution),
            _ => (Mode::Monochromatic, vec![req("phi")], distribution),
        },
        Subcommand::Unitarity => {
            let matrix =
                text_option(options, "matrix", &["symmetric", "hadamard", "pi_quarter", "identity", "custom"])?;
            let mut params = vec![req("phi"), opt("long_weight", 0.5)];
            let mode = match matrix {
                "custom" => {
                    params.extend([
                        opt("a11_re", 1.0),
                        opt("a11_im", 0.0),
                        opt("a12_re", 0.0),
                        opt("a12_im", 0.0),
                        opt("a21_re", 0.0),
                        opt("a21_im", 0.0),
                        opt("a22_re", 1.0),
                        opt("a22_im", 0.0),
                    ]);
                    Mode::Custom
                }
                "hadamard" => Mode::Preset(Preset::Hadamard),
                "pi_quarter" => Mode::Preset(Preset::PiQuarter),
                "identity" => Mode::Preset(Preset::Identity),
                _ => Mode::Preset(Preset::Symmetric),
            };
            (mode, params, vec!["p_plus", "p_minus", "total", "excess", "residual", "norm_long", "norm_short", "valid"])
        }
        Subcommand::Franson => match text_option(options, "model", &["physical", "ideal"])? {
            "ideal" => {
                let mut out = joint.to_vec();
                out.insert(5, "discordance");
                (Mode::Ideal, vec![req("phi"), opt("visibility", 1.0)], out)
            }
            _ => {
                let mut out = vec!["omega_a", "omega_b", "phase", "visibility"];
                out.extend(joint);
                out.extend([
                    "acceptance",
                    "pump_ratio",
                    "separation_ratio",
                    "alignment_ratio",
                    "conditions_satisfied",
                    "failing_condition",
                ]);
                (
                    Mode::Physical {
                        post_selection: bool_option(options, "post_selection", true)?,
                        window: number_option(options, "window")?,
                    },
                    vec![
                        req("pump_center"),
                        req("pump_bandwidth"),
                        req("offset_center"),
                        req("offset_bandwidth"),
                        req("tau_a"),
                        req("tau_b"),
                        opt("ratio_threshold", 100.0),
                    ],
                    out,
                )
            }
        },
        Subcommand::Chained => {
            let mode = match text_option(options, "model", &["quantum", "pr_box", "suppressed", "lhv"])? {
                "pr_box" => Mode::PrBox,
                "suppressed" => Mode::Suppressed,
                "lhv" => Mode::Lhv,
                _ => Mode::Quantum,
            };
            let mut params = vec![int("n", None), opt("theta", PI)];
            if mode == Mode::Quantum {
                params.push(opt("visibility", 1.0));
            }
            (mode, params, vec!["i_value", "closed_form", "classification", "strategy"])
        }
        Subcommand::Extensions => match text_option(options, "mode", &["falsify", "bound", "leggett"])? {
            "bound" => {
                (Mode::Bound, vec![int("n", None), req("d"), opt("theta", PI)], vec!["i_value", "bound", "violated"])
            }
            "leggett" => (
                Mode::Leggett,
                vec![req("bias"), int("n_cap", Some(100_000.0))],
                vec!["d", "n", "bound", "bound_before", "min_subensemble_probability", "contradiction"],
            ),
            _ => (
                Mode::Falsify,
                vec![req("d"), opt("theta", PI), int("n_cap", Some(100_000.0))],
                vec!["n", "i_at_n", "bound", "i_before", "bound_before"],
            ),
        },
        Subcommand::Sample => {
            let mode = match text_option(options, "model", &["quantum", "local"])? {
                "local" => Mode::SampleLocal,
                _ => Mode::SampleQuantum,
            };
            (
                mode,
                vec![opt("phi", 0.0), int("runs", Some(1_000_000.0))],
                vec!["plus", "minus", "double", "null", "double_fraction", "null_fraction"],
            )
        }
    };
    Ok(Kernel { params, outputs, mode, shape })
}

fn float(x: f64) -> Cell {
    Cell::Float(x)
}

fn distribution_cells(d: &DetectionDistribution) -> Vec<Cell> {
    vec![float(d.p_plus), float(d.p_minus), float(d.p_double), float(d.p_null), float(d.total())]
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::LocalCompatible => "local_compatible",
        Classification::BoundedNonlocal => "bounded_nonlocal",
        Classification::MaximalNonlocal => "maximal_nonlocal",
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Interfering => "interfering",
        Regime::ParticleLike => "particle_like",
        Regime::Intermediate => "intermediate",
    }
}

fn condition_name(c: Condition) -> &'static str {
    match c {
        Condition::PumpCoherence => "pump_coherence",
        Condition::PathSeparation => "path_separation",
        Condition::PathAlignment => "path_alignment",
    }
}

fn spectrum(shape: Shape, center: f64, bandwidth: f64) -> Result<Spectrum, String> {
    Spectrum::new(shape, center, bandwidth).map_err(|e| e.to_string())
}

fn optional(x: Option<f64>) -> Cell {
    x.map_or(Cell::Empty, Cell::Float)
}

impl Kernel {
    /// Evaluates one row. `values` follows `self.params`.
    pub fn eval(&self, values: &[f64], ctx: &Context) -> Result<Vec<Cell>, String> {
        let get = |name: &str| -> f64 {
            let i = self.params.iter().position(|p| p.name == name).expect("parameter declared by the kernel");
            values[i]
        };
        let err = |e: &dyn std::fmt::Display| e.to_string();
        let tol = ctx.tolerance;
        match self.mode {
            Mode::Monochromatic => Ok(distribution_cells(&quantum_distribution(get("phi")))),
            Mode::LocalDetectors => Ok(distribution_cells(&local_detection_distribution(get("phi")))),
            Mode::Wavepacket => {
                let s = spectrum(self.shape, get("omega0"), get("bandwidth"))?;
                let cfg = InterferometerConfig::new(get("tau"), s).map_err(|e| err(&e))?;
                let threshold = get("ratio_threshold");
                if !(threshold > 1.0) {
                    return Err(format!("ratio_threshold must exceed 1, got {threshold}"));
                }
                let d = wavepacket_distribution(&cfg, tol).map_err(|e| err(&e))?;
                let mut cells = vec![float(cfg.center_phase())];
                cells.extend(distribution_cells(&d));
                cells.push(Cell::Text(regime_name(classify_interference(&cfg, threshold)).into()));
                Ok(cells)
            }
            Mode::Preset(_) | Mode::Custom => {
                let m = match self.mode {
                    Mode::Preset(Preset::Symmetric) => MeasurementMatrix::symmetric_splitter(),
                    Mode::Preset(Preset::Hadamard) => MeasurementMatrix::hadamard(),
                    Mode::Preset(Preset::PiQuarter) => MeasurementMatrix::pi_quarter_counterexample(),
                    Mode::Preset(Preset::Identity) => MeasurementMatrix::identity(),
                    _ => {
                        let c = |n: &str| Complex64::new(get(&format!("{n}_re")), get(&format!("{n}_im")));
                        MeasurementMatrix::new(c("a11"), c("a12"), c("a21"), c("a22"))
                    }
                };
                let w = get("long_weight");
                if !(0.0..=1.0).contains(&w) {
                    return Err(format!("long_weight must lie in [0, 1], got {w}"));
                }
                let amps = PathAmplitudes::new(Complex64::new(w.sqrt(), 0.0), Complex64::new((1.0 - w).sqrt(), 0.0))
                    .map_err(|e| err(&e))?;
                let phi = get("phi");
                let d = outcome_distribution(&m, &amps, phi);
                let v = is_valid_quantum_measurement(&m, tol);
                let [n0, n1] = m.row_norms();
                Ok(vec![
                    float(d.p_plus),
                    float(d.p_minus),
                    float(d.total()),
                    float(interference_excess(&m, &amps, phi)),
                    float(v.orthogonality),
                    float(n0),
                    float(n1),
                    Cell::Bool(v.valid),
                ])
            }
            Mode::Ideal => {
                let v = get("visibility");
                if !(0.0..=1.0).contains(&v) {
                    return Err(format!("visibility must lie in [0, 1], got {v}"));
                }
                let d = ideal_joint_distribution(get("phi"), v);
                Ok(vec![
                    float(d.p[0][0]),
                    float(d.p[0][1]),
                    float(d.p[1][0]),
                    float(d.p[1][1]),
                    float(d.concordance()),
                    float(d.discordance()),
                    float(d.marginal_a()),
                    float(d.marginal_b()),
                ])
            }
            Mode::Physical { post_selection, window } => {
                let pump = spectrum(self.shape, get("pump_center"), get("pump_bandwidth"))?;
                let offset = spectrum(self.shape, get("offset_center"), get("offset_bandwidth"))?;
                let (ta, tb) = (get("tau_a"), get("tau_b"));
                // Default window sits halfway between the delay mismatch and
                // the shorter delay.
                let window = post_selection.then(|| window.unwrap_or(0.5 * ((ta - tb).abs() + ta.min(tb))));
                let cfg = FransonConfig::new(pump, offset, ta, tb, window).map_err(|e| err(&e))?;
                let threshold = get("ratio_threshold");
                if !(threshold > 1.0) {
                    return Err(format!("ratio_threshold must exceed 1, got {threshold}"));
                }
                let report = check_entanglement_conditions(&cfg, threshold);
                let r = physical_joint_distribution(&cfg, tol).map_err(|e| err(&e))?;
                let (wa, wb) = downconverted_frequencies(&cfg);
                let d = r.distribution;
                Ok(vec![
                    float(wa),
                    float(wb),
                    float(r.phase),
                    float(r.visibility),
                    float(d.p[0][0]),
                    float(d.p[0][1]),
                    float(d.p[1][0]),
                    float(d.p[1][1]),
                    float(d.concordance()),
                    float(d.marginal_a()),
                    float(d.marginal_b()),
                    float(r.acceptance),
                    float(report.pump_ratio),
                    float(report.separation_ratio),
                    float(report.alignment_ratio),
                    Cell::Bool(report.satisfied),
                    report.failing.map_or(Cell::Empty, |c| Cell::Text(condition_name(c).into())),
                ])
            }
            Mode::Quantum | Mode::PrBox | Mode::Suppressed | Mode::Lhv => {
                let n = get("n") as usize;
                let theta = get("theta");
                let cfg = ChainedConfig::new(n, theta).map_err(|e| err(&e))?;
                match self.mode {
                    Mode::Lhv => {
                        let best = lhv_minimum_i(n, theta).map_err(|e| err(&e))?;
                        let strategy: String =
                            best.strategy.iter().map(|o| if *o == Outcome::Plus { '+' } else { '-' }).collect();
                        let i = f64::from(best.min_i);
                        Ok(vec![
                            float(i),
                            Cell::Empty,
                            Cell::Text(classification_name(nonlocal_core::bell::classify(i)).into()),
                            Cell::Text(strategy),
                        ])
                    }
                    _ => {
                        let (result, closed) = match self.mode {
                            Mode::Quantum => {
                                let v = get("visibility");
                                if !(0.0..=1.0).contains(&v) {
                                    return Err(format!("visibility must lie in [0, 1], got {v}"));
                                }
                                let closed = if v == 1.0 {
                                    Some(quantum_i_closed_form(n, theta).map_err(|e| err(&e))?)
                                } else {
                                    None
                                };
                                (chained_i(&QuantumModel { visibility: v }, &cfg), closed)
                            }
                            Mode::PrBox => (chained_i(&pr_box_model(), &cfg), None),
                            _ => (chained_i(&suppressed_nonlocality_model(), &cfg), None),
                        };
                        let result = result.map_err(|e| err(&e))?;
                        Ok(vec![
                            float(result.i_value),
                            optional(closed),
                            Cell::Text(classification_name(result.classification).into()),
                            Cell::Empty,
                        ])
                    }
                }
            }
            Mode::Falsify => {
                let f = find_falsifying_n(get("d"), get("theta"), get("n_cap") as usize).map_err(|e| err(&e))?;
                Ok(vec![
                    Cell::Int(f.n as i64),
                    float(f.i_at_n),
                    float(f.bound()),
                    optional(f.i_before),
                    optional(f.bound_before()),
                ])
            }
            Mode::Bound => {
                let r = colbeck_renner_bound(get("n") as usize, get("theta"), &QuantumModel::maximal(), get("d"))
                    .map_err(|e| err(&e))?;
                Ok(vec![float(r.i_value), float(r.bound), Cell::Bool(r.violated)])
            }
            Mode::Leggett => {
                let r = leggett_inconsistency_demo(get("bias"), get("n_cap") as usize).map_err(|e| err(&e))?;
                Ok(vec![
                    float(r.d),
                    Cell::Int(r.witness.n as i64),
                    float(r.bound),
                    optional(r.witness.bound_before()),
                    float(r.min_subensemble_probability),
                    Cell::Bool(r.contradiction),
                ])
            }
            Mode::SampleQuantum | Mode::SampleLocal => {
                let phi = get("phi");
                let dist = if self.mode == Mode::SampleQuantum {
                    quantum_distribution(phi)
                } else {
                    local_detection_distribution(phi)
                };
                let runs = get("runs") as u64;
                let c = sample_events_stream(&dist, runs, ctx.seed, ctx.row).map_err(|e| err(&e))?;
                let frac = |k: u64| if runs == 0 { Cell::Empty } else { float(k as f64 / runs as f64) };
                Ok(vec![
                    Cell::Int(c.plus as i64),
                    Cell::Int(c.minus as i64),
                    Cell::Int(c.double as i64),
                    Cell::Int(c.null as i64),
                    frac(c.double),
                    frac(c.null),
                ])
            }
        }
    }
}
