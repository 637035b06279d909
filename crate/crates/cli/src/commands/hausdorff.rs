use std::path::Path;

use serde_json::json;

use probmetric::hausdorff::{check_prop43, excess, hausdorff_distance, PointSet};

use super::{load_space, write_artifact, Loaded, Outcome};
use crate::plot;
use crate::report::Record;
use crate::Context;

pub fn hausdorff(ctx: &Context, path: &Path, a: &[String], b: &[String]) -> anyhow::Result<Outcome> {
    let space = match load_space(ctx, path)? {
        Loaded::Valid(space) => space,
        Loaded::Invalid(records) => return Ok((records, json!(null))),
    };
    let (set_a, set_b) = match (PointSet::from_labels(&space, a), PointSet::from_labels(&space, b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return Ok((vec![Record::new("labels", false, Some(e.to_string()))], json!(null))),
    };
    let forward = excess(&set_a, &set_b)?;
    let backward = excess(&set_b, &set_a)?;
    let h = hausdorff_distance(&set_a, &set_b)?;
    let h_rev = hausdorff_distance(&set_b, &set_a)?;

    let mut checks = vec![Record::new("labels", true, None)];
    checks.push(Record::new("symmetry", h.pointwise_eq(&h_rev), (!h.pointwise_eq(&h_rev)).then(|| format!("{h} vs {h_rev}"))));
    let identity = h.is_eps_zero() == (set_a == set_b);
    checks.push(Record::new("identity", identity, (!identity).then(|| format!("H = {h}"))));
    let regular = forward.gamma_raw.is_left_continuous() && backward.gamma_raw.is_left_continuous();
    checks.push(Record::new("regularization-no-op", regular, None));
    let mut chain = Record::new("excess-chain", true, None);
    for p in set_a.members() {
        let report = check_prop43(*p, &set_a, &set_b)?;
        let bad = report.failures().next().map(|c| c.name.clone());
        if let Some(bad) = bad {
            chain = Record::new("excess-chain", false, Some(format!("p = {}: {bad}", space.label(*p))));
            break;
        }
    }
    checks.push(chain);

    let title = |name: &str| format!("{name} (A = {set_a}, B = {set_b})");
    let text = plot::render(&[
        (title("F*_AB"), &forward.regularized),
        (title("F*_BA"), &backward.regularized),
        (title("F_AB"), &h),
    ]);
    let written = write_artifact(ctx, &text)?;
    let artifacts = json!({
        "a": set_a.labels(),
        "b": set_b.labels(),
        "excess_ab": forward.regularized,
        "excess_ba": backward.regularized,
        "hausdorff": h,
        "plot": written,
    });
    Ok((checks, artifacts))
}
