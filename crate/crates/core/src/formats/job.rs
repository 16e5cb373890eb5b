//! Batch job descriptions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::valcore::{parse_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Radii,
    Profile,
    Graph,
    Newton,
    Exponents,
    Descend,
    Oracle,
    Fuchs,
    ConstantBasis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Rational,
    Count,
    RationalList,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Radii,
        Command::Profile,
        Command::Graph,
        Command::Newton,
        Command::Exponents,
        Command::Descend,
        Command::Oracle,
        Command::Fuchs,
        Command::ConstantBasis,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Radii => "radii",
            Command::Profile => "profile",
            Command::Graph => "graph",
            Command::Newton => "newton",
            Command::Exponents => "exponents",
            Command::Descend => "descend",
            Command::Oracle => "oracle",
            Command::Fuchs => "fuchs",
            Command::ConstantBasis => "constant-basis",
        }
    }

    fn params(&self) -> &'static [(&'static str, Kind, bool)] {
        use Kind::*;
        match self {
            Command::Radii | Command::Descend => &[("r", Rational, true), ("depth", Count, false)],
            Command::Newton => &[("r", Rational, true)],
            Command::Oracle => &[("r", Rational, true), ("k_max", Count, false)],
            Command::Profile => &[("r1", Rational, true), ("r2", Rational, true), ("grid", Count, false), ("rounds", Count, false), ("depth", Count, false)],
            Command::Graph => &[("centers", RationalList, false), ("r_end", Rational, true), ("grid", Count, false), ("rounds", Count, false)],
            Command::Exponents => &[("c", Rational, false), ("m_max", Count, false)],
            Command::Fuchs => &[("order", Count, false), ("budget", Count, false)],
            Command::ConstantBasis => &[("iterations", Count, false)],
        }
    }

    pub fn formats(&self) -> &'static [OutputFormat] {
        match self {
            Command::Profile => &[OutputFormat::Json, OutputFormat::Csv, OutputFormat::Svg],
            Command::Graph => &[OutputFormat::Json, OutputFormat::Dot],
            _ => &[OutputFormat::Json],
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::Parameter(format!("unknown command {s:?}")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
            OutputFormat::Dot => "dot",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [OutputFormat::Json, OutputFormat::Csv, OutputFormat::Svg, OutputFormat::Dot]
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown output format {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub input: String,
    pub params: BTreeMap<String, String>,
    pub output: OutputFormat,
}

fn parse_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_q(x.trim())).collect()
}

impl JobSpec {
    /// Checks parameter names, required keys, value syntax and the output format.
    pub fn new(command: Command, input: String, params: BTreeMap<String, String>, output: OutputFormat) -> Result<Self> {
        let table = command.params();
        for (k, v) in &params {
            let (_, kind, _) = table
                .iter()
                .find(|(name, _, _)| name == k)
                .ok_or_else(|| Error::schema(&format!("/params/{k}"), format!("unknown parameter for {command}")))?;
            let ok = match kind {
                Kind::Rational => parse_q(v).map(|_| ()),
                Kind::Count => v.parse::<usize>().map(|_| ()).map_err(|e| Error::Parameter(e.to_string())),
                Kind::RationalList => parse_list(v).map(|_| ()),
            };
            ok.map_err(|e| Error::schema(&format!("/params/{k}"), e.to_string()))?;
        }
        if let Some((name, _, _)) = table.iter().find(|(name, _, req)| *req && !params.contains_key(*name)) {
            return Err(Error::schema(&format!("/params/{name}"), "missing required parameter"));
        }
        if !command.formats().contains(&output) {
            return Err(Error::schema("/output", format!("{command} cannot write {}", output.name())));
        }
        Ok(JobSpec { command, input, params, output })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let m = v.as_object().ok_or_else(|| Error::schema("", "expected an object"))?;
        if let Some(k) = m.keys().find(|k| !["command", "input", "params", "output"].contains(&k.as_str())) {
            return Err(Error::schema(&format!("/{k}"), "unknown key"));
        }
        let text = |key: &str| -> Result<&str> {
            m.get(key)
                .ok_or_else(|| Error::schema(&format!("/{key}"), "missing key"))?
                .as_str()
                .ok_or_else(|| Error::schema(&format!("/{key}"), "expected a string"))
        };
        let command: Command = text("command")?.parse().map_err(|e: Error| Error::schema("/command", e.to_string()))?;
        let input = text("input")?.to_string();
        let output = match m.get("output") {
            None => OutputFormat::Json,
            Some(_) => text("output")?.parse().map_err(|e: Error| Error::schema("/output", e.to_string()))?,
        };
        let mut params = BTreeMap::new();
        if let Some(p) = m.get("params") {
            let obj = p.as_object().ok_or_else(|| Error::schema("/params", "expected an object"))?;
            for (k, v) in obj {
                let s = v.as_str().ok_or_else(|| Error::schema(&format!("/params/{k}"), "expected a string"))?;
                params.insert(k.clone(), s.to_string());
            }
        }
        JobSpec::new(command, input, params, output)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::schema("", format!("invalid JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command.name(),
            "input": self.input,
            "params": self.params,
            "output": self.output.name(),
        })
    }

    pub fn rational(&self, key: &str) -> Result<Option<Q>> {
        self.params.get(key).map(|s| parse_q(s)).transpose()
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>> {
        self.params.get(key).map(|s| s.parse::<usize>().map_err(|e| Error::Parameter(format!("{key}: {e}")))).transpose()
    }

    pub fn rationals(&self, key: &str) -> Result<Option<Vec<Q>>> {
        self.params.get(key).map(|s| parse_list(s)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jobs() {
        let j = JobSpec::parse(r#"{"command":"radii","input":"m.json","params":{"r":"0"}}"#).unwrap();
        assert_eq!(j.command, Command::Radii);
        assert_eq!(j.output, OutputFormat::Json);
        assert_eq!(JobSpec::from_value(&j.to_value()).unwrap(), j);
        for bad in [
            r#"{"command":"radii","input":"m.json","params":{"r":"0"},"x":1}"#,
            r#"{"command":"radii","input":"m.json","params":{"r":"0.5"}}"#,
            r#"{"command":"radii","input":"m.json","params":{}}"#,
            r#"{"command":"radii","input":"m.json","params":{"r":"0","grid":"3"}}"#,
            r#"{"command":"radii","input":"m.json","params":{"r":"0"},"output":"csv"}"#,
        ] {
            assert!(matches!(JobSpec::parse(bad), Err(Error::Schema { .. })), "{bad}");
        }
    }
}
