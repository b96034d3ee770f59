use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{Format, Loaded};
use crate::engine::VarId;
use crate::measures::Value;
use crate::oracle::{AxiomReport, Verdict};
use crate::values::Measure;

pub const SCHEMA: &str = "impvals.output/v1";

#[derive(Clone, Debug, Serialize)]
pub struct VarValue {
    pub var: String,
    /// 1-based position in the input
    pub index: usize,
    pub exact: String,
    pub decimal: String,
}

/// One command's result. Everything except `wall_ms` depends only on the input
/// and the flags, so two runs print the same bytes unless `--timing` is given.
#[derive(Clone, Debug, Serialize)]
pub struct OutputRecord {
    pub schema: &'static str,
    pub tool: String,
    pub command: String,
    pub input_format: &'static str,
    pub input_sha256: String,
    pub measure: String,
    pub certified: bool,
    pub universe: usize,
    pub values: Vec<VarValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl OutputRecord {
    pub fn new(command: &str, input: &Loaded, measure: &Measure, entries: &[(VarId, Value)]) -> Self {
        let digest = Sha256::digest(&input.raw);
        Self {
            schema: SCHEMA,
            tool: format!("impvals {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            input_format: match input.format {
                Format::Dimacs => "dimacs",
                Format::Formula => "formula",
            },
            input_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            measure: measure.to_string(),
            certified: measure.is_certified(),
            universe: input.universe(),
            values: entries
                .iter()
                .map(|(x, v)| VarValue {
                    var: input.names.name(*x),
                    index: x.index() + 1,
                    exact: v.exact_string(),
                    decimal: v.decimal(),
                })
                .collect(),
            wall_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("var,index,exact,decimal\n");
        for v in &self.values {
            s += &format!("{},{},{},{}\n", v.var, v.index, v.exact, v.decimal);
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = format!("# {}", self.measure);
        if !self.certified {
            s += " (uncertified constancy measure)";
        }
        s.push('\n');
        let width = self.values.iter().map(|v| v.var.len()).max().unwrap_or(0);
        for v in &self.values {
            let shown = if v.exact.contains('/') {
                format!("{} = {}", v.exact, v.decimal)
            } else if v.exact.contains('.') || v.exact.contains('e') {
                v.decimal.clone()
            } else {
                v.exact.clone()
            };
            s += &format!("{:<width$}  {shown}\n", v.var);
        }
        if let Some(ms) = self.wall_ms {
            s += &format!("# wall {ms:.3} ms\n");
        }
        s
    }
}

#[derive(Serialize)]
struct VerdictJson {
    name: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct ReportJson {
    schema: &'static str,
    measure: String,
    n: usize,
    mode: String,
    all_hold: bool,
    verdicts: Vec<VerdictJson>,
}

pub fn axioms_json(reports: &[AxiomReport]) -> String {
    let rs: Vec<ReportJson> = reports
        .iter()
        .map(|r| ReportJson {
            schema: "impvals.axioms/v1",
            measure: r.measure.clone(),
            n: r.n,
            mode: r.mode.to_string(),
            all_hold: r.all_hold(),
            verdicts: r
                .verdicts
                .iter()
                .map(|(name, v)| {
                    let (status, checked, detail) = match v {
                        Verdict::Holds { checked } => ("holds", Some(*checked), None),
                        Verdict::Violated(c) => ("violated", None, Some(c.summary())),
                        Verdict::Skipped(why) => ("skipped", None, Some(why.clone())),
                    };
                    VerdictJson {
                        name: name.clone(),
                        status,
                        checked,
                        detail,
                    }
                })
                .collect(),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rs).expect("report serializes");
    s.push('\n');
    s
}
