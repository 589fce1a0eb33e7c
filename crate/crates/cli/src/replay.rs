//! Re-running single recorded trials.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::campaign::{evaluate, Instance, Property, Tolerances, Verdict};
use crate::error::{CliError, Result};
use crate::json::SCHEMA;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub schema: String,
    pub property: Property,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub relaxed: bool,
    pub governing_tolerance: String,
    pub governing_value: f64,
    pub tolerances: Tolerances,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidInput(msg.into())
}

fn parse<T: serde::de::DeserializeOwned>(value: Value, what: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|source| CliError::Json {
        context: what.to_string(),
        source,
    })
}

/// Pulls an instance (and any recorded tolerances) out of a bare instance,
/// a `{"instance": ...}` wrapper or failure record, or a whole campaign report
/// (its `index`-th failure, with the campaign's tolerances).
pub fn load_instance(doc: Value, index: usize) -> Result<(Instance, Option<Tolerances>)> {
    let Value::Object(map) = &doc else {
        return Err(invalid("replay input must be a JSON object"));
    };
    if let Some(schema) = map.get("schema") {
        if schema.as_str() != Some(SCHEMA) {
            return Err(invalid(format!("unsupported schema {schema}, expected {SCHEMA:?}")));
        }
    }
    if let Some(failures) = map.get("failures") {
        let record = failures
            .get(index)
            .cloned()
            .ok_or_else(|| invalid(format!("report has no failure record {index}")))?;
        let tolerances = match map.get("config").and_then(|c| c.get("tolerances")) {
            Some(t) => Some(parse(t.clone(), "campaign tolerances")?),
            None => None,
        };
        let (instance, _) = load_instance(record, 0)?;
        return Ok((instance, tolerances));
    }
    if let Some(instance) = map.get("instance") {
        let tolerances = match map.get("tolerances") {
            Some(t) => Some(parse(t.clone(), "tolerances")?),
            None => None,
        };
        return Ok((parse(instance.clone(), "instance")?, tolerances));
    }
    let mut bare = map.clone();
    bare.remove("schema");
    Ok((parse(Value::Object(bare), "instance")?, None))
}

/// Re-runs one instance. `expected`, when given, must name the instance's property.
pub fn replay(instance: &Instance, expected: Option<Property>, tolerances: Tolerances) -> Result<ReplayOutcome> {
    let property = instance.property();
    if let Some(p) = expected {
        if p != property {
            return Err(invalid(format!(
                "instance is for property {property:?}, not {p:?}"
            )));
        }
    }
    let eval = evaluate(instance, &tolerances);
    let governing = property.governing_tolerance();
    let governing_value = tolerance_value(&tolerances, governing).expect("known tolerance name");
    Ok(ReplayOutcome {
        schema: SCHEMA.to_string(),
        property,
        verdict: eval.verdict,
        diagnostic: eval.diagnostic,
        warning: eval.warning,
        relaxed: eval.relaxed,
        governing_tolerance: governing.to_string(),
        governing_value,
        tolerances,
    })
}

pub fn tolerance_value(t: &Tolerances, name: &str) -> Option<f64> {
    serde_json::to_value(t).ok()?.get(name)?.as_f64()
}

/// Applies a `name=value` override, e.g. `membership_tol=1e-6`.
pub fn apply_override(t: &mut Tolerances, spec: &str) -> Result<()> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| invalid(format!("tolerance override {spec:?} is not name=value")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("tolerance override {spec:?} has a non-numeric value")))?;
    let mut map = serde_json::to_value(*t).expect("plain struct");
    let slot = map
        .get_mut(name.trim())
        .ok_or_else(|| invalid(format!("unknown tolerance {name:?}")))?;
    *slot = if name.trim() == "max_iter" {
        if value < 1.0 || value.fract() != 0.0 {
            return Err(invalid("max_iter must be a positive integer"));
        }
        Value::from(value as u64)
    } else {
        Value::from(value)
    };
    *t = parse(map, "tolerances")?;
    Ok(())
}
