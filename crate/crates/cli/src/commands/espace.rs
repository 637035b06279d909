use std::path::Path;

use anyhow::Context as _;
use serde_json::{json, Value};

use probmetric::io::{read_samples_csv, space_to_json};
use probmetric::{PMSpace, TriangleFn};

use super::{build_options, validation_records, write_artifact, Outcome};
use crate::Context;

pub fn espace(ctx: &Context, path: &Path) -> anyhow::Result<Outcome> {
    let samples = read_samples_csv(path).with_context(|| format!("reading samples {}", path.display()))?;
    let tau = ctx.tau.unwrap_or(TriangleFn::ConvMin);
    let dist = PMSpace::sample_matrix(&samples.samples).with_context(|| format!("samples {}", path.display()))?;
    let opts = build_options(ctx);
    let v = PMSpace::validate(&samples.labels, &dist, tau, &opts)?;
    let records = validation_records(&v);
    if v.violation.is_some() {
        let artifacts = json!({ "violation": v.violation.as_ref().map(|e| e.to_string()), "written": Value::Null });
        return Ok((records, artifacts));
    }
    let space = PMSpace::build_with(samples.labels, dist, tau, &opts)?;
    let text = space_to_json(&space);
    let written = write_artifact(ctx, &text)?;
    let artifacts = json!({
        "samples_per_label": samples.samples[0].len(),
        "dimension": samples.samples[0][0].len(),
        "written": written,
        "space": serde_json::from_str::<Value>(&text)?,
    });
    Ok((records, artifacts))
}
