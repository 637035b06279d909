use std::path::Path;

use anyhow::Context as _;
use serde_json::json;

use probmetric::io::read_space;
use probmetric::PMSpace;

use super::{build_options, validation_records, Outcome};
use crate::Context;

pub fn validate(ctx: &Context, path: &Path) -> anyhow::Result<Outcome> {
    let raw = read_space(path).with_context(|| format!("reading space {}", path.display()))?;
    let tau = ctx.tau.unwrap_or(raw.tau);
    let v = PMSpace::validate(&raw.points, &raw.dist, tau, &build_options(ctx))
        .with_context(|| format!("space {}", path.display()))?;
    let artifacts = json!({
        "points": raw.points,
        "tau": tau,
        "sampled_triples": v.sampled_triples,
        "violation": v.violation.as_ref().map(|e| e.to_string()),
    });
    Ok((validation_records(&v), artifacts))
}
