//! Text forms of a [`QuadratureRule`]: JSON (all numerics as decimal strings),
//! CSV and a fixed-point table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{format_fixed, format_sci, PrecisionContext};
use crate::quadrature::{QuadratureRule, Residuals};
use crate::systems::SystemDescriptor;

/// Significant digits used for residual certificates.
const RESIDUAL_DIGITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualsDocument {
    pub right: Vec<String>,
    pub left: Vec<String>,
    pub newton: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDocument {
    pub system: SystemDescriptor,
    #[serde(rename = "N")]
    pub n: usize,
    pub digits: u32,
    pub nodes: Vec<String>,
    pub weights1: Vec<String>,
    pub weights2: Vec<String>,
    pub residuals: ResidualsDocument,
}

impl RuleDocument {
    pub fn from_rule(rule: &QuadratureRule) -> Self {
        let d = rule.digits as usize;
        let fmt = |v: &[rug::Float], sig: usize| v.iter().map(|x| format_sci(x, sig)).collect();
        Self {
            system: rule.system.clone(),
            n: rule.n,
            digits: rule.digits,
            nodes: fmt(&rule.nodes, d),
            weights1: fmt(&rule.weights1, d),
            weights2: fmt(&rule.weights2, d),
            residuals: ResidualsDocument {
                right: fmt(&rule.residuals.right, RESIDUAL_DIGITS),
                left: fmt(&rule.residuals.left, RESIDUAL_DIGITS),
                newton: fmt(&rule.residuals.newton, RESIDUAL_DIGITS),
            },
        }
    }

    /// Converts back to numbers at `digits` plus the default guard.
    pub fn to_rule(&self) -> Result<QuadratureRule> {
        let ctx = PrecisionContext::new(self.digits)?;
        let n = self.n;
        let parse = |name: &str, v: &[String]| -> Result<Vec<rug::Float>> {
            if v.len() != n {
                return Err(Error::Parse(format!(
                    "{name} has {} entries, expected {n}",
                    v.len()
                )));
            }
            v.iter().map(|s| ctx.parse(s)).collect()
        };
        let nodes = parse("nodes", &self.nodes)?;
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("nodes must be strictly ascending".into()));
        }
        Ok(QuadratureRule {
            system: self.system.clone(),
            n,
            digits: self.digits,
            nodes,
            weights1: parse("weights1", &self.weights1)?,
            weights2: parse("weights2", &self.weights2)?,
            residuals: Residuals {
                right: parse("residuals.right", &self.residuals.right)?,
                left: parse("residuals.left", &self.residuals.left)?,
                newton: parse("residuals.newton", &self.residuals.newton)?,
            },
        })
    }
}

pub fn rule_to_json(rule: &QuadratureRule) -> String {
    serde_json::to_string_pretty(&RuleDocument::from_rule(rule)).expect("rule document serializes")
}

pub fn rule_from_json(text: &str) -> Result<QuadratureRule> {
    let doc: RuleDocument = serde_json::from_str(text)?;
    doc.to_rule()
}

/// `j,node,weight1,weight2` with one row per node, `j` starting at 1.
pub fn rule_to_csv(rule: &QuadratureRule) -> String {
    let d = rule.digits as usize;
    let mut out = String::from("j,node,weight1,weight2\n");
    for (j, ((x, w1), w2)) in rule
        .nodes
        .iter()
        .zip(&rule.weights1)
        .zip(&rule.weights2)
        .enumerate()
    {
        out.push_str(&format!(
            "{},{},{},{}\n",
            j + 1,
            format_sci(x, d),
            format_sci(w1, d),
            format_sci(w2, d)
        ));
    }
    out
}

/// Fixed-point table with `min(digits, 20)` fractional digits, columns right-aligned.
pub fn rule_to_table(rule: &QuadratureRule) -> String {
    let frac = (rule.digits as usize).min(20);
    let rows: Vec<[String; 4]> = rule
        .nodes
        .iter()
        .zip(&rule.weights1)
        .zip(&rule.weights2)
        .enumerate()
        .map(|(j, ((x, w1), w2))| {
            [
                (j + 1).to_string(),
                format_fixed(x, frac),
                format_fixed(w1, frac),
                format_fixed(w2, frac),
            ]
        })
        .collect();
    let header = ["j", "node", "weight1", "weight2"];
    let mut width = header.map(str::len);
    for r in &rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: [&str; 4]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        parts.join("  ")
    };
    let mut out = line(header);
    out.push('\n');
    for r in &rows {
        out.push_str(&line([&r[0], &r[1], &r[2], &r[3]]));
        out.push('\n');
    }
    out
}
