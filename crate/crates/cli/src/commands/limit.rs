use std::path::Path;

use anyhow::Context as _;
use serde_json::json;

use probmetric::hausdorff::{diameter, extract_chain, hausdorff_series, is_cauchy_sets, limit_set, PointSet};
use probmetric::io::read_sets;

use super::{labels, load_space, Loaded, Outcome};
use crate::report::Record;
use crate::Context;

const DEFAULT_T_GRID: [f64; 3] = [0.25, 0.125, 0.0625];

pub fn limit(ctx: &Context, space_path: &Path, sets_path: &Path) -> anyhow::Result<Outcome> {
    let space = match load_space(ctx, space_path)? {
        Loaded::Valid(space) => space,
        Loaded::Invalid(records) => return Ok((records, json!(null))),
    };
    let raw = read_sets(sets_path).with_context(|| format!("reading sets {}", sets_path.display()))?;
    if raw.is_empty() {
        anyhow::bail!("{}: the set sequence is empty", sets_path.display());
    }
    let mut sets = Vec::with_capacity(raw.len());
    for (n, names) in raw.iter().enumerate() {
        match PointSet::from_labels(&space, names) {
            Ok(s) => sets.push(s),
            Err(e) => return Ok((vec![Record::new("labels", false, Some(format!("set {}: {e}", n + 1)))], json!(null))),
        }
    }
    let t_grid = ctx.t_grid.clone().unwrap_or_else(|| DEFAULT_T_GRID.to_vec());
    let eps_grid = ctx.eps_grid.clone().unwrap_or_else(|| space.default_eps_grid());
    let mut checks = vec![Record::new("labels", true, None)];

    let cauchy = if sets.len() >= 2 {
        let report = is_cauchy_sets(&sets, &t_grid)?;
        let failing = report.levels.iter().find(|l| !l.satisfied);
        checks.push(Record::new(
            "cauchy",
            report.passed,
            failing.map(|l| format!("level t = {}: pairs fail from n0 = {} on", l.t, l.n0)),
        ));
        json!(report)
    } else {
        let mut record = Record::new("cauchy", true, None);
        record.note = Some("a single term is trivially Cauchy".into());
        checks.push(record);
        json!(null)
    };

    let report = limit_set(&sets, &eps_grid)?;
    checks.push(Record::new(
        "limit-agreement",
        report.agree,
        (!report.agree).then(|| {
            format!(
                "tail-union closure {:?} vs dilation form {:?}",
                labels(&space, report.tail_union_closure.iter().copied()),
                labels(&space, report.dilation_form.iter().copied())
            )
        }),
    ));

    let t = t_grid[0];
    let chain = match extract_chain(&sets, t, 0) {
        Ok(chain) => {
            let ok = chain.levels.iter().all(|l| l.value > 1.0 - l.threshold);
            checks.push(Record::new("chain", ok, None));
            json!({
                "t": t,
                "positions": chain.indices.iter().map(|n| n + 1).collect::<Vec<_>>(),
                "points": labels(&space, chain.points.iter().copied()),
                "levels": chain.levels,
                "stop": chain.stop,
            })
        }
        Err(e) => {
            checks.push(Record::new("chain", false, Some(e.to_string())));
            json!(null)
        }
    };

    let limit = report.limit(&space);
    let series = match &limit {
        Some(target) => {
            let series = hausdorff_series(&sets, target, ctx.tol)?;
            let reached = series.last().is_some_and(|d| *d == 0.0);
            checks.push(Record::new("series-reaches-zero", reached, (!reached).then(|| format!("{series:?}"))));
            let bounded = diameter(target)?.bounded;
            checks.push(Record::new("limit-bounded", bounded, None));
            Some(series)
        }
        None => {
            for name in ["series-reaches-zero", "limit-bounded"] {
                checks.push(Record::new(name, false, Some("no limit: the two forms disagree or are empty".into())));
            }
            None
        }
    };

    let artifacts = json!({
        "terms": sets.len(),
        "t_grid": t_grid,
        "eps_grid": eps_grid,
        "cauchy": cauchy,
        "tail_union_closure": labels(&space, report.tail_union_closure.iter().copied()),
        "dilation_form": labels(&space, report.dilation_form.iter().copied()),
        "agree": report.agree,
        "limit": limit.as_ref().map(|s| s.labels()),
        "chain": chain,
        "series": series,
    });
    Ok((checks, artifacts))
}
