//! JSON encodings of modules, radii, profiles, skeleta and exponent data.
//!
//! All numbers are exact: rationals are strings such as `"-3/4"`; plain JSON
//! integers are also accepted on input. Errors carry JSON-pointer paths.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::berkdisc::{DiscPoint, Skeleton, Subdivision};
use crate::diffmod::{DiffModule, Interval};
use crate::error::{Error, Result};
use crate::expo::{Exponent, ExponentMultiset, LiouvilleStatus, LiouvilleVerdict, Partition};
use crate::radii::{Certainty, PAFunction, Piece, RadiiEntry, RadiiMultiset, RadiiProfile};
use crate::valcore::{fmt_q, parse_q, Derivation, FieldMode, LaurentPoly, Scalar, USeries, Val, Q};

fn child(ptr: &str, key: &str) -> String {
    format!("{ptr}/{}", key.replace('~', "~0").replace('/', "~1"))
}

fn index(ptr: &str, i: usize) -> String {
    format!("{ptr}/{i}")
}

fn object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(ptr, "expected an object"))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(ptr, "expected an array"))
}

fn only_keys(m: &Map<String, Value>, ptr: &str, allowed: &[&str]) -> Result<()> {
    match m.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::schema(&child(ptr, k), "unknown key")),
        None => Ok(()),
    }
}

fn field<'a>(m: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| Error::schema(&child(ptr, key), "missing key"))
}

fn string<'a>(v: &'a Value, ptr: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::schema(ptr, "expected a string"))
}

fn uint(v: &Value, ptr: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| Error::schema(ptr, "expected a nonnegative integer"))
}

fn boolean(v: &Value, ptr: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| Error::schema(ptr, "expected a boolean"))
}

fn int_key(k: &str, ptr: &str) -> Result<i64> {
    k.parse::<i64>().map_err(|_| Error::schema(ptr, format!("exponent key {k:?} is not an integer")))
}

pub fn rational(v: &Value, ptr: &str) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s).map_err(|e| Error::schema(ptr, e.to_string())),
        Value::Number(n) => match n.as_i64() {
            Some(k) => Ok(Q::from_integer(BigInt::from(k))),
            None => Err(Error::schema(ptr, "non-integer JSON numbers are not exact; use a \"num/den\" string")),
        },
        _ => Err(Error::schema(ptr, "expected a rational string")),
    }
}

fn q_str(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

fn strings(v: &Value, ptr: &str) -> Result<Vec<String>> {
    array(v, ptr)?.iter().enumerate().map(|(i, x)| string(x, &index(ptr, i)).map(str::to_string)).collect()
}

// ---- field modes, scalars, Laurent polynomials ----

pub fn mode_from_value(v: &Value, ptr: &str) -> Result<FieldMode> {
    let m = object(v, ptr)?;
    let kind = string(field(m, ptr, "mode")?, &child(ptr, "mode"))?;
    match kind {
        "padic" => {
            only_keys(m, ptr, &["mode", "p"])?;
            let p = uint(field(m, ptr, "p")?, &child(ptr, "p"))?;
            FieldMode::padic(p)
        }
        "eqchar0" => {
            only_keys(m, ptr, &["mode", "prec"])?;
            let prec = uint(field(m, ptr, "prec")?, &child(ptr, "prec"))?;
            let prec = u32::try_from(prec).map_err(|_| Error::schema(&child(ptr, "prec"), "precision too large"))?;
            FieldMode::eqchar0(prec).map_err(|e| Error::schema(&child(ptr, "prec"), e.to_string()))
        }
        other => Err(Error::schema(&child(ptr, "mode"), format!("unknown mode {other:?}"))),
    }
}

pub fn mode_to_value(mode: &FieldMode) -> Value {
    match mode {
        FieldMode::PAdic { p } => json!({"mode": "padic", "p": p}),
        FieldMode::EqualChar0 { prec } => json!({"mode": "eqchar0", "prec": prec}),
    }
}

/// A rational string, or a u-series object `{"<u-exp>": rational, …, "O": prec}`.
pub fn scalar_from_value(v: &Value, ptr: &str, mode: &FieldMode) -> Result<Scalar> {
    match v {
        Value::Object(m) => {
            if matches!(mode, FieldMode::PAdic { .. }) {
                return Err(Error::schema(ptr, "u-series coefficients need an eqchar0 field"));
            }
            let mut terms = BTreeMap::new();
            let mut prec = None;
            for (k, x) in m {
                let p = child(ptr, k);
                if k == "O" {
                    let n = x.as_i64().ok_or_else(|| Error::schema(&p, "expected an integer precision"))?;
                    prec = Some(n);
                } else {
                    terms.insert(int_key(k, &p)?, rational(x, &p)?);
                }
            }
            if let Some(n) = prec {
                if let Some(k) = terms.keys().find(|k| **k >= n) {
                    return Err(Error::schema(&child(ptr, &k.to_string()), format!("term at or beyond O(u^{n})")));
                }
            }
            Ok(Scalar::Ser(USeries::new(terms, prec)))
        }
        _ => Ok(Scalar::Rat(rational(v, ptr)?)),
    }
}

pub fn scalar_to_value(c: &Scalar) -> Value {
    match c {
        Scalar::Rat(x) => q_str(x),
        Scalar::Ser(s) => {
            let mut m = Map::new();
            for (k, x) in s.terms() {
                m.insert(k.to_string(), q_str(x));
            }
            if let Some(n) = s.prec() {
                m.insert("O".into(), json!(n));
            }
            Value::Object(m)
        }
    }
}

pub fn laurent_from_value(v: &Value, ptr: &str, mode: &FieldMode) -> Result<LaurentPoly> {
    let m = object(v, ptr)?;
    let mut terms = BTreeMap::new();
    for (k, x) in m {
        let p = child(ptr, k);
        let c = scalar_from_value(x, &p, mode)?;
        if !c.is_exact_zero() {
            terms.insert(int_key(k, &p)?, c);
        }
    }
    Ok(LaurentPoly::new(terms))
}

pub fn laurent_to_value(f: &LaurentPoly) -> Value {
    let mut m = Map::new();
    for (k, c) in f.terms() {
        m.insert(k.to_string(), scalar_to_value(c));
    }
    Value::Object(m)
}

// ---- intervals and modules ----

fn bound(v: &Value, ptr: &str, inf: &str) -> Result<Option<Q>> {
    match v {
        Value::String(s) if s == inf => Ok(None),
        _ => rational(v, ptr).map(Some),
    }
}

pub fn interval_from_value(v: &Value, ptr: &str) -> Result<Interval> {
    let m = object(v, ptr)?;
    only_keys(m, ptr, &["r_min", "r_max"])?;
    let lo = bound(field(m, ptr, "r_min")?, &child(ptr, "r_min"), "-inf")?;
    let hi = bound(field(m, ptr, "r_max")?, &child(ptr, "r_max"), "inf")?;
    Interval::new(lo, hi).map_err(|e| Error::schema(ptr, e.to_string()))
}

pub fn interval_to_value(i: &Interval) -> Value {
    json!({
        "r_min": i.r_min.as_ref().map_or(json!("-inf"), q_str),
        "r_max": i.r_max.as_ref().map_or(json!("inf"), q_str),
    })
}

pub fn module_from_value(v: &Value) -> Result<DiffModule> {
    let m = object(v, "")?;
    only_keys(m, "", &["mode", "derivation", "interval", "matrix"])?;
    let mode = mode_from_value(field(m, "", "mode")?, "/mode")?;
    let derivation = match string(field(m, "", "derivation")?, "/derivation")? {
        "ddt" => Derivation::Ddt,
        "t_ddt" => Derivation::TDdt,
        other => return Err(Error::schema("/derivation", format!("unknown derivation {other:?}"))),
    };
    let interval = interval_from_value(field(m, "", "interval")?, "/interval")?;
    let rows = array(field(m, "", "matrix")?, "/matrix")?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::schema("/matrix", "matrix is empty"));
    }
    let mut matrix = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let ptr = index("/matrix", i);
        let cells = array(row, &ptr)?;
        if cells.len() != n {
            return Err(Error::schema(&ptr, format!("row has {} entries, expected {n}", cells.len())));
        }
        matrix.push(cells.iter().enumerate().map(|(j, c)| laurent_from_value(c, &index(&ptr, j), &mode)).collect::<Result<Vec<_>>>()?);
    }
    let module = DiffModule::new(mode, derivation, interval, matrix)?;
    module.validate_poles()?;
    Ok(module)
}

pub fn module_to_value(m: &DiffModule) -> Value {
    json!({
        "mode": mode_to_value(&m.mode),
        "derivation": m.derivation.name(),
        "interval": interval_to_value(&m.interval),
        "matrix": m.matrix.iter().map(|row| row.iter().map(laurent_to_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema("", format!("invalid JSON: {e}")))
}

/// Parses and validates a module file.
pub fn parse_module(text: &str) -> Result<DiffModule> {
    module_from_value(&parse_text(text)?)
}

pub fn emit_module(m: &DiffModule) -> String {
    pretty(&module_to_value(m))
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

// ---- radii ----

fn pairs_to_value(entries: &[&RadiiEntry]) -> Value {
    Value::Array(entries.iter().map(|e| json!([fmt_q(&e.irlog), e.mult])).collect())
}

/// `{"irlog": [["3", 1]], "lower_bound": [...], "flags": [...], "certificates": [...]}`;
/// the last three keys are omitted when empty.
pub fn radii_to_value(ms: &RadiiMultiset) -> Value {
    let exact: Vec<&RadiiEntry> = ms.entries().iter().filter(|e| e.certainty == Certainty::Exact).collect();
    let lb: Vec<&RadiiEntry> = ms.entries().iter().filter(|e| e.certainty == Certainty::LowerBoundOnly).collect();
    let mut m = Map::new();
    m.insert("irlog".into(), pairs_to_value(&exact));
    if !lb.is_empty() {
        m.insert("lower_bound".into(), pairs_to_value(&lb));
    }
    if !ms.flags.is_empty() {
        m.insert("flags".into(), json!(ms.flags));
    }
    if !ms.certificates.is_empty() {
        m.insert("certificates".into(), json!(ms.certificates));
    }
    Value::Object(m)
}

fn pairs_from_value(v: &Value, ptr: &str, certainty: Certainty) -> Result<Vec<RadiiEntry>> {
    array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            let p = index(ptr, i);
            let a = array(pair, &p)?;
            if a.len() != 2 {
                return Err(Error::schema(&p, "expected [irlog, multiplicity]"));
            }
            let irlog = rational(&a[0], &index(&p, 0))?;
            let mult = uint(&a[1], &index(&p, 1))? as usize;
            if mult == 0 {
                return Err(Error::schema(&index(&p, 1), "multiplicity must be positive"));
            }
            Ok(RadiiEntry { irlog, mult, certainty })
        })
        .collect()
}

pub fn radii_from_value(v: &Value) -> Result<RadiiMultiset> {
    let m = object(v, "")?;
    only_keys(m, "", &["irlog", "lower_bound", "flags", "certificates"])?;
    let mut entries = pairs_from_value(field(m, "", "irlog")?, "/irlog", Certainty::Exact)?;
    if let Some(lb) = m.get("lower_bound") {
        entries.extend(pairs_from_value(lb, "/lower_bound", Certainty::LowerBoundOnly)?);
    }
    let mut ms = RadiiMultiset::new(entries);
    if let Some(f) = m.get("flags") {
        ms.flags = strings(f, "/flags")?;
    }
    if let Some(c) = m.get("certificates") {
        ms.certificates = strings(c, "/certificates")?;
    }
    Ok(ms)
}

pub fn parse_radii(text: &str) -> Result<RadiiMultiset> {
    radii_from_value(&parse_text(text)?)
}

pub fn emit_radii(ms: &RadiiMultiset) -> String {
    pretty(&radii_to_value(ms))
}

// ---- piecewise-affine functions and profiles ----

pub fn pafunction_to_value(f: &PAFunction) -> Value {
    json!({
        "breakpoints": f.breakpoints.iter().map(q_str).collect::<Vec<_>>(),
        "pieces": f.pieces.iter().map(|p| json!({
            "slope": fmt_q(&p.slope),
            "intercept": fmt_q(&p.intercept),
            "certified": p.certified,
        })).collect::<Vec<_>>(),
    })
}

pub fn pafunction_from_value(v: &Value, ptr: &str) -> Result<PAFunction> {
    let m = object(v, ptr)?;
    only_keys(m, ptr, &["breakpoints", "pieces"])?;
    let bp_ptr = child(ptr, "breakpoints");
    let breakpoints: Vec<Q> =
        array(field(m, ptr, "breakpoints")?, &bp_ptr)?.iter().enumerate().map(|(i, x)| rational(x, &index(&bp_ptr, i))).collect::<Result<_>>()?;
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::schema(&bp_ptr, "breakpoints must increase strictly"));
    }
    let pc_ptr = child(ptr, "pieces");
    let pieces: Vec<Piece> = array(field(m, ptr, "pieces")?, &pc_ptr)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = index(&pc_ptr, i);
            let o = object(x, &p)?;
            only_keys(o, &p, &["slope", "intercept", "certified"])?;
            Ok(Piece {
                slope: rational(field(o, &p, "slope")?, &child(&p, "slope"))?,
                intercept: rational(field(o, &p, "intercept")?, &child(&p, "intercept"))?,
                certified: boolean(field(o, &p, "certified")?, &child(&p, "certified"))?,
            })
        })
        .collect::<Result<_>>()?;
    if breakpoints.len() < 2 || pieces.len() + 1 != breakpoints.len() {
        return Err(Error::schema(&pc_ptr, "need one piece per gap between breakpoints"));
    }
    Ok(PAFunction { breakpoints, pieces })
}

pub fn profile_to_value(p: &RadiiProfile) -> Value {
    json!({
        "functions": p.functions.iter().map(pafunction_to_value).collect::<Vec<_>>(),
        "certified_fraction": fmt_q(&p.certified_fraction()),
        "refinement_rounds": p.refinement_rounds,
        "samples": p.samples,
        "flags": p.flags,
    })
}

pub fn profile_from_value(v: &Value) -> Result<RadiiProfile> {
    let m = object(v, "")?;
    only_keys(m, "", &["functions", "certified_fraction", "refinement_rounds", "samples", "flags"])?;
    let functions = array(field(m, "", "functions")?, "/functions")?
        .iter()
        .enumerate()
        .map(|(i, f)| pafunction_from_value(f, &index("/functions", i)))
        .collect::<Result<_>>()?;
    let profile = RadiiProfile {
        functions,
        flags: match m.get("flags") {
            Some(f) => strings(f, "/flags")?,
            None => Vec::new(),
        },
        refinement_rounds: m.get("refinement_rounds").map_or(Ok(0), |x| uint(x, "/refinement_rounds"))? as usize,
        samples: m.get("samples").map_or(Ok(0), |x| uint(x, "/samples"))? as usize,
    };
    if let Some(cf) = m.get("certified_fraction") {
        if rational(cf, "/certified_fraction")? != profile.certified_fraction() {
            return Err(Error::schema("/certified_fraction", "does not match the pieces"));
        }
    }
    Ok(profile)
}

pub fn parse_profile(text: &str) -> Result<RadiiProfile> {
    profile_from_value(&parse_text(text)?)
}

pub fn emit_profile_json(p: &RadiiProfile) -> String {
    pretty(&profile_to_value(p))
}

// ---- skeleta ----

fn val_to_value(v: &Val) -> Value {
    match v {
        Val::Fin(x) => q_str(x),
        Val::Inf => json!("inf"),
    }
}

pub fn point_to_value(x: &DiscPoint) -> Value {
    match x {
        DiscPoint::Classical { center } => json!({"type": 1, "center": scalar_to_value(center)}),
        DiscPoint::Disc { center, r } => json!({"type": 2, "center": scalar_to_value(center), "r": fmt_q(r)}),
        DiscPoint::Irrational { center, lo, hi } => {
            json!({"type": 3, "center": scalar_to_value(center), "r_lo": fmt_q(lo), "r_hi": fmt_q(hi)})
        }
        DiscPoint::Nested { chain, limit } => json!({
            "type": 4,
            "chain": chain.iter().map(|(c, r)| json!([scalar_to_value(c), fmt_q(r)])).collect::<Vec<_>>(),
            "limit": fmt_q(limit),
        }),
    }
}

pub fn skeleton_to_value(s: &Skeleton, sub: Option<&Subdivision>) -> Value {
    let mut m = Map::new();
    m.insert("generators".into(), Value::Array(s.generators.iter().map(point_to_value).collect()));
    m.insert("vertices".into(), Value::Array(s.vertices.iter().map(point_to_value).collect()));
    m.insert(
        "edges".into(),
        Value::Array(
            s.edges
                .iter()
                .map(|e| {
                    json!({
                        "parent": e.parent,
                        "child": e.child,
                        "center": scalar_to_value(&e.center),
                        "r_start": fmt_q(&e.r_start),
                        "r_end": val_to_value(&e.r_end),
                    })
                })
                .collect(),
        ),
    );
    if let Some(sub) = sub {
        m.insert(
            "subdivision".into(),
            json!({
                "strict": sub.is_strict(),
                "vertices": sub.vertices.iter().map(|v| json!({
                    "edge": v.edge,
                    "r": fmt_q(&v.r),
                    "point": point_to_value(&v.point),
                    "slopes": v.slopes.iter().map(|(i, a, b)| json!([i, fmt_q(a), fmt_q(b)])).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "flags": sub.flags,
            }),
        );
    }
    Value::Object(m)
}

// ---- exponents ----

/// Input file: `{"p": 2, "entries": ["3", "1/3", {"residue": "5", "depth": 8}]}`; without
/// `"p"` the entries live in residue characteristic 0.
pub fn exponents_from_value(v: &Value) -> Result<(FieldMode, ExponentMultiset)> {
    let m = object(v, "")?;
    only_keys(m, "", &["p", "entries"])?;
    let mode = match m.get("p") {
        Some(p) => FieldMode::padic(uint(p, "/p")?)?,
        None => FieldMode::EqualChar0 { prec: 1 },
    };
    let mut entries = Vec::new();
    for (i, e) in array(field(m, "", "entries")?, "/entries")?.iter().enumerate() {
        let p = index("/entries", i);
        entries.push(match e {
            Value::Object(o) => {
                only_keys(o, &p, &["residue", "depth"])?;
                let r = rational(field(o, &p, "residue")?, &child(&p, "residue"))?;
                if !r.is_integer() {
                    return Err(Error::schema(&child(&p, "residue"), "residue must be an integer"));
                }
                let depth = uint(field(o, &p, "depth")?, &child(&p, "depth"))?;
                let depth = u32::try_from(depth).map_err(|_| Error::schema(&child(&p, "depth"), "depth too large"))?;
                Exponent::Approx { residue: r.to_integer(), depth }
            }
            _ => Exponent::Exact(rational(e, &p)?),
        });
    }
    let set = ExponentMultiset::new(entries, &mode).map_err(|e| match e {
        Error::NotInZp(s) => Error::NotInZp(s),
        other => Error::schema("/entries", other.to_string()),
    })?;
    Ok((mode, set))
}

pub fn exponent_to_value(e: &Exponent) -> Value {
    match e {
        Exponent::Exact(x) => q_str(x),
        Exponent::Approx { residue, depth } => json!({"residue": residue.to_string(), "depth": depth}),
    }
}

pub fn exponents_to_value(mode: &FieldMode, a: &ExponentMultiset) -> Value {
    let mut m = Map::new();
    if let Some(p) = mode.p() {
        m.insert("p".into(), json!(p));
    }
    m.insert("entries".into(), Value::Array(a.entries.iter().map(exponent_to_value).collect()));
    Value::Object(m)
}

pub fn parse_exponents(text: &str) -> Result<(FieldMode, ExponentMultiset)> {
    exponents_from_value(&parse_text(text)?)
}

pub fn verdict_to_value(v: &LiouvilleVerdict) -> Value {
    let mut m = Map::new();
    match &v.status {
        LiouvilleStatus::Integer => {
            m.insert("status".into(), json!("integer"));
        }
        LiouvilleStatus::RationalNonLiouville { note } => {
            m.insert("status".into(), json!("rational_non_liouville"));
            m.insert("note".into(), json!(note));
        }
        LiouvilleStatus::UndecidedToDepth(d) => {
            m.insert("status".into(), json!("undecided"));
            m.insert("depth".into(), json!(d));
        }
    }
    m.insert("profile".into(), Value::Array(v.profile.iter().map(|(k, d)| json!([k, d.to_string()])).collect()));
    Value::Object(m)
}

pub fn partition_to_value(a: &ExponentMultiset, part: &Partition) -> Value {
    json!({
        "components": part.components.iter().map(|c| c.iter().map(|&i| exponent_to_value(&a.entries[i])).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "indices": part.components,
        "exact": part.exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valcore::rational::{q, qf};

    const RANK_ONE: &str = r#"{"mode":{"mode":"padic","p":2},"derivation":"t_ddt",
        "interval":{"r_min":"0","r_max":"inf"},"matrix":[[{"0":"1/4"}]]}"#;

    #[test]
    fn minimal_module() {
        let m = parse_module(RANK_ONE).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.matrix[0][0], LaurentPoly::from_q(qf(1, 4)));
        assert_eq!(parse_module(&emit_module(&m)).unwrap(), m);
    }

    #[test]
    fn schema_errors_point_at_the_problem() {
        let bad = RANK_ONE.replace("\"p\":2", "\"p\":4");
        assert!(matches!(parse_module(&bad), Err(Error::NotPrime(4))));
        let bad = RANK_ONE.replace("\"1/4\"", "\"1/0\"");
        match parse_module(&bad) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/matrix/0/0/0"),
            other => panic!("{other:?}"),
        }
        let bad = RANK_ONE.replace("\"derivation\"", "\"extra\":1,\"derivation\"");
        match parse_module(&bad) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/extra"),
            other => panic!("{other:?}"),
        }
        let pole = RANK_ONE.replace("\"0\":\"1/4\"", "\"-1\":\"1\"");
        assert!(matches!(parse_module(&pole), Err(Error::PoleConflict(_))));
        assert!(matches!(parse_module("[1"), Err(Error::Schema { .. })));
    }

    #[test]
    fn series_coefficients() {
        let text = r#"{"mode":{"mode":"eqchar0","prec":8},"derivation":"ddt",
            "interval":{"r_min":"-1","r_max":"1"},"matrix":[[{"-2":{"1":"2","3":"-1/2","O":6}}]]}"#;
        let m = parse_module(text).unwrap();
        assert_eq!(parse_module(&emit_module(&m)).unwrap(), m);
        let padic = text.replace("\"mode\":\"eqchar0\",\"prec\":8", "\"mode\":\"padic\",\"p\":3");
        assert!(matches!(parse_module(&padic), Err(Error::Schema { .. })));
    }

    #[test]
    fn radii_round_trip() {
        let mut ms = RadiiMultiset::new([RadiiEntry::exact(q(3), 1), RadiiEntry::lower_bound(qf(1, 2), 2)]);
        ms.flags.push("depth exhausted".into());
        let text = emit_radii(&ms);
        assert_eq!(parse_radii(&text).unwrap(), ms);
        assert_eq!(emit_radii(&RadiiMultiset::exact(&[(q(3), 1)])).replace([' ', '\n'], ""), r#"{"irlog":[["3",1]]}"#);
    }

    #[test]
    fn exponent_files() {
        let (mode, a) = parse_exponents(r#"{"p":2,"entries":["3","1/3",{"residue":"5","depth":8}]}"#).unwrap();
        assert_eq!(mode, FieldMode::PAdic { p: 2 });
        assert_eq!(a.len(), 3);
        assert_eq!(exponents_from_value(&exponents_to_value(&mode, &a)).unwrap(), (mode, a));
        assert!(matches!(parse_exponents(r#"{"p":2,"entries":["1/2"]}"#), Err(Error::NotInZp(_))));
    }
}
