//! Two-column staircase text for step functions.

use std::fmt::Write as _;

use probmetric::DistributionFn;

/// `(x, value)` rows tracing the graph, with both sides of every jump.
pub fn staircase(f: &DistributionFn) -> Vec<(f64, f64)> {
    let b = f.breakpoints();
    let (Some(first), Some(last)) = (b.first(), b.last()) else {
        return vec![(-1.0, f.base_value()), (1.0, f.base_value())];
    };
    let mut rows = vec![(first - 1.0, f.base_value())];
    let mut left = f.base_value();
    for (x, v) in b.iter().zip(f.values()) {
        rows.push((*x, left));
        rows.push((*x, *v));
        left = *v;
    }
    rows.push((last + 1.0, f.last_value()));
    rows
}

/// Curves separated by blank lines, each introduced by a `#` header.
pub fn render(curves: &[(String, &DistributionFn)]) -> String {
    let mut out = String::new();
    for (i, (title, f)) in curves.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# {title}");
        out.push_str("# x value\n");
        for (x, v) in staircase(f) {
            let _ = writeln!(out, "{x} {v}");
        }
    }
    out
}
