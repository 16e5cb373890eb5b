//! Job execution for the `convlab` command-line tool.

use std::fs;
use std::path::Path;

use convlab::berkdisc::{BerkDisc, DiscPoint};
use convlab::diffmod::{DiffModule, Interval};
use convlab::expo::{self, ExponentMultiset, LiouvilleStatus};
use convlab::formats::json::{self, pretty};
use convlab::formats::{self, Command, JobSpec, OutputFormat};
use convlab::radii::{self, ProfileOptions, RadiiOptions, RadiiProfile};
use convlab::valcore::{fmt_q, Derivation, FieldMode, Scalar, Val, Q};
use convlab::{Error, Result};
use serde_json::{json, Value};

/// Rendered output of a job, plus the flags that make it partial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub flags: Vec<String>,
}

impl Outcome {
    pub fn certified(&self) -> bool {
        self.flags.is_empty()
    }

    /// 0 when certified, 1 when flagged.
    pub fn exit_code(&self) -> i32 {
        if self.certified() {
            0
        } else {
            1
        }
    }
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(Path::new(path)).map_err(|e| Error::Io(format!("{path}: {e}")))
}

pub fn load_module(path: &str) -> Result<DiffModule> {
    formats::parse_module(&read(path)?)
}

fn radii_options(job: &JobSpec) -> Result<RadiiOptions> {
    let mut o = RadiiOptions::default();
    if let Some(d) = job.count("depth")? {
        o.depth = d as u32;
    }
    Ok(o)
}

fn required(job: &JobSpec, key: &str) -> Result<Q> {
    job.rational(key)?.ok_or_else(|| Error::Parameter(format!("missing parameter {key}")))
}

fn matrix_value(m: &[Vec<convlab::valcore::LaurentPoly>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(json::laurent_to_value).collect())).collect())
}

fn val_value(v: &Val) -> Value {
    match v {
        Val::Fin(x) => json!(fmt_q(x)),
        Val::Inf => json!("inf"),
    }
}

/// Runs a job; errors map to exit status 2 in the binary.
pub fn run(job: &JobSpec) -> Result<Outcome> {
    match job.command {
        Command::Radii => {
            let m = load_module(&job.input)?;
            let r = required(job, "r")?;
            let ms = radii::module_radii_with(&m, &r, &radii_options(job)?)?;
            let mut flags = ms.flags.clone();
            if !ms.is_exact() {
                flags.push(format!("{} radii known only as lower bounds", ms.lower_bound_mult()));
            }
            Ok(Outcome { output: formats::emit_radii(&ms), flags })
        }
        Command::Newton => {
            let m = load_module(&job.input)?.with_derivation(Derivation::Ddt);
            let r = required(job, "r")?;
            m.require_interior(&r)?;
            let cd = m.cyclic_vector(&r, RadiiOptions::default().attempt_budget)?;
            let np = cd.newton_polygon(&r, &m.mode)?;
            let ms = radii::christol_dwork(&np, &r, &m.mode);
            let out = json!({
                "derivation": "ddt",
                "vector": cd.vector.iter().map(json::laurent_to_value).collect::<Vec<_>>(),
                "coefficient_vals": cd.coefficient_vals(&r, &m.mode)?.iter().map(val_value).collect::<Vec<_>>(),
                "root_valuations": np.segments.iter().map(|(v, k)| json!([val_value(v), k])).collect::<Vec<_>>(),
                "radii": json::radii_to_value(&ms),
            });
            Ok(Outcome { output: pretty(&out), flags: ms.flags.clone() })
        }
        Command::Descend => {
            let m = load_module(&job.input)?;
            let p = m.mode.require_padic("descend")?;
            let r = required(job, "r")?;
            let opts = radii_options(job)?;
            let ms = radii::module_radii_with(&m, &r, &opts)?;
            let law = radii::forward_descendant_law(&ms, p);
            let d = m.restrict(&Interval::point(r.clone()))?.frobenius_descendant()?;
            let pr = &r * Q::from_integer(p.into());
            let desc = radii::module_radii_with(&d, &pr, &opts)?;
            let mut flags: Vec<String> = ms.flags.iter().chain(&desc.flags).cloned().collect();
            if !ms.is_exact() || !desc.is_exact() {
                flags.push("radii known only as lower bounds".into());
            }
            let agrees = ms.is_exact() && desc.is_exact() && law.exact_pairs() == desc.exact_pairs();
            if ms.is_exact() && desc.is_exact() && !agrees {
                flags.push("descendant radii differ from the forward law".into());
            }
            let inverted = match radii::invert_descendant_multiset(&desc, p) {
                Ok(x) => json::radii_to_value(&x),
                Err(e) => json!({"error": e.to_string()}),
            };
            let out = json!({
                "r": fmt_q(&r),
                "radii": json::radii_to_value(&ms),
                "forward_law": json::radii_to_value(&law),
                "descendant_r": fmt_q(&pr),
                "descendant": json::radii_to_value(&desc),
                "agrees": agrees,
                "inverted": inverted,
            });
            Ok(Outcome { output: pretty(&out), flags })
        }
        Command::Oracle => {
            let m = load_module(&job.input)?;
            let r = required(job, "r")?;
            let rep = radii::spectral_radius_oracle(&m, &r, job.count("k_max")?.unwrap_or(64))?;
            let out = json!({
                "r": fmt_q(&r),
                "lower": fmt_q(&rep.lower),
                "upper": fmt_q(&rep.upper),
                "gap": fmt_q(&rep.gap()),
                "schedule": rep.schedule.iter().map(|s| json!({"k": s.k, "lower": fmt_q(&s.lower), "upper": fmt_q(&s.upper)})).collect::<Vec<_>>(),
            });
            Ok(Outcome { output: pretty(&out), flags: Vec::new() })
        }
        Command::Profile => {
            let m = load_module(&job.input)?;
            let (r1, r2) = (required(job, "r1")?, required(job, "r2")?);
            let p = radii::radii_profile_with(&m, &r1, &r2, &profile_options(job)?)?;
            Ok(Outcome { output: render_profile(&p, job.output), flags: p.flags.clone() })
        }
        Command::Graph => graph(job),
        Command::Exponents => exponents(job),
        Command::Fuchs => {
            let m = load_module(&job.input)?;
            let order = job.count("order")?.unwrap_or(8) as i64;
            let f = expo::fuchs_basis(&m, order, job.count("budget")?.unwrap_or(1_000_000))?;
            let mut flags = Vec::new();
            if !f.is_integral(&m.mode) {
                flags.push("matrix on the new basis is not integral".into());
            }
            let out = json!({
                "order": order,
                "steps": f.steps,
                "constant": f.is_constant(),
                "integral": f.is_integral(&m.mode),
                "basis": matrix_value(&f.basis),
                "matrix": matrix_value(&f.matrix),
            });
            Ok(Outcome { output: pretty(&out), flags })
        }
        Command::ConstantBasis => {
            let m = load_module(&job.input)?;
            let c = expo::constant_basis(&m, job.count("iterations")?.unwrap_or(3) as u32)?;
            let out = json!({
                "gap": fmt_q(&c.gap),
                "cap": fmt_q(&c.cap),
                "residuals": c.residuals.iter().map(val_value).collect::<Vec<_>>(),
                "basis": matrix_value(&c.basis),
                "matrix": matrix_value(&c.matrix),
            });
            Ok(Outcome { output: pretty(&out), flags: Vec::new() })
        }
    }
}

fn profile_options(job: &JobSpec) -> Result<ProfileOptions> {
    let mut o = ProfileOptions::default();
    if let Some(g) = job.count("grid")? {
        o.grid = g;
    }
    if let Some(k) = job.count("rounds")? {
        o.refinement_rounds = k;
    }
    o.radii = radii_options(job)?;
    Ok(o)
}

fn render_profile(p: &RadiiProfile, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => formats::profile_csv(p),
        OutputFormat::Svg => formats::profile_svg(p),
        _ => formats::emit_profile_json(p),
    }
}

fn graph(job: &JobSpec) -> Result<Outcome> {
    let m = load_module(&job.input)?;
    let r0 = m
        .interval
        .r_min
        .clone()
        .filter(|_| m.interval.contains_origin())
        .ok_or_else(|| Error::Parameter("graph needs a module on a closed disc".into()))?;
    let r_end = required(job, "r_end")?;
    let disc = BerkDisc::new(m.mode, r0);
    let centers = job.rationals("centers")?.unwrap_or_else(|| vec![Q::from_integer(0.into())]);
    let gens: Vec<DiscPoint> = centers.iter().map(|c| disc.point(Scalar::Rat(c.clone()), r_end.clone())).collect::<Result<_>>()?;
    let skel = disc.skeleton(&gens)?;
    let opts = profile_options(job)?;
    let mut fs = Vec::new();
    let mut flags = Vec::new();
    for (k, e) in skel.edges.iter().enumerate() {
        let end = match &e.r_end {
            Val::Fin(x) => x.clone(),
            Val::Inf => r_end.clone(),
        };
        if end <= e.r_start {
            continue;
        }
        let c = e.center.as_rational().ok_or_else(|| Error::Parameter("edge center is not rational".into()))?;
        let local = if c == Q::from_integer(0.into()) { m.clone() } else { m.translate(&c)? };
        let p = radii::radii_profile_with(&local, &e.r_start, &end, &opts)?;
        flags.extend(p.flags.iter().map(|f| format!("edge {k}: {f}")));
        fs.extend(p.functions.into_iter().map(|f| (k, f)));
    }
    let sub = disc.controlling_subdivision(&skel, &fs)?;
    if !sub.is_strict() {
        flags.push("controlling subdivision has a vertex of type 3 or 4".into());
    }
    let output = match job.output {
        OutputFormat::Dot => formats::skeleton_dot(&skel, Some(&sub)),
        _ => pretty(&json::skeleton_to_value(&skel, Some(&sub))),
    };
    Ok(Outcome { output, flags })
}

fn exponents(job: &JobSpec) -> Result<Outcome> {
    let (mode, a) = formats::parse_exponents(&read(&job.input)?)?;
    let c = job.rational("c")?.unwrap_or_else(|| Q::from_integer(1.into()));
    let m_max = job.count("m_max")?.unwrap_or(12) as u32;
    let mut flags = Vec::new();
    let mut out = serde_json::Map::new();
    out.insert("entries".into(), json::exponents_to_value(&mode, &a)["entries"].clone());
    let part = match mode {
        FieldMode::PAdic { p } => {
            out.insert("p".into(), json!(p));
            let mut verdicts = Vec::new();
            for e in &a.entries {
                let v = expo::liouville_profile(e, p, m_max)?;
                if let LiouvilleStatus::UndecidedToDepth(d) = v.status {
                    flags.push(format!("{e} undecided beyond depth {d}"));
                }
                verdicts.push(json::verdict_to_value(&v));
            }
            out.insert("verdicts".into(), Value::Array(verdicts));
            out.insert("c".into(), json!(fmt_q(&c)));
            out.insert("m_max".into(), json!(m_max));
            expo::liouville_partition(&a, p, &c, m_max)?
        }
        FieldMode::EqualChar0 { .. } => expo::integer_partition(&a)?,
    };
    if !part.exact {
        flags.push("partition rests on finite-depth evidence".into());
    }
    out.insert("partition".into(), json::partition_to_value(&a, &part));
    let prep_mode = FieldMode::EqualChar0 { prec: 1 };
    let exact: Vec<Q> = a.entries.iter().filter_map(|e| e.as_exact().cloned()).collect();
    out.insert("prepared".into(), json!(expo::prepared(&ExponentMultiset::exact(&exact, &prep_mode)?, &prep_mode)));
    Ok(Outcome { output: pretty(&Value::Object(out)), flags })
}
