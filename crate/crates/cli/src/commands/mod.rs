mod axioms;
mod espace;
mod hausdorff;
mod limit;
mod validate;

use std::path::Path;

use anyhow::Context as _;
use serde_json::Value;

use probmetric::io::read_space;
use probmetric::pmspace::Validation;
use probmetric::{BuildOptions, PMSpace, TriangleFn};

use crate::report::Record;
use crate::Context;

pub use axioms::axioms;
pub use espace::espace;
pub use hausdorff::hausdorff;
pub use limit::limit;
pub use validate::validate;

pub type Outcome = (Vec<Record>, Value);

fn build_options(ctx: &Context) -> BuildOptions {
    BuildOptions { max_triples: ctx.max_triples, seed: ctx.seed }
}

fn validation_records(v: &Validation) -> Vec<Record> {
    v.report.checks.iter().map(Record::from_check).collect()
}

/// A space that passed validation, or the failing validation records.
enum Loaded {
    Valid(PMSpace),
    Invalid(Vec<Record>),
}

fn load_space(ctx: &Context, path: &Path) -> anyhow::Result<Loaded> {
    let raw = read_space(path).with_context(|| format!("reading space {}", path.display()))?;
    let tau: TriangleFn = ctx.tau.unwrap_or(raw.tau);
    let opts = build_options(ctx);
    let v = PMSpace::validate(&raw.points, &raw.dist, tau, &opts).with_context(|| format!("space {}", path.display()))?;
    if v.violation.is_some() {
        return Ok(Loaded::Invalid(validation_records(&v)));
    }
    let space = PMSpace::build_with(raw.points, raw.dist, tau, &opts)?;
    Ok(Loaded::Valid(space))
}

fn write_artifact(ctx: &Context, text: &str) -> anyhow::Result<Option<String>> {
    let Some(path) = &ctx.out else {
        return Ok(None);
    };
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(Some(path.display().to_string()))
}

fn labels(space: &PMSpace, members: impl IntoIterator<Item = usize>) -> Vec<String> {
    members.into_iter().map(|p| space.label(p).to_string()).collect()
}
