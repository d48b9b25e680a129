//! Generated matplotlib script for a sweep CSV.

use nomaec_core::sweep::Axis;

/// CSV column holding the values of `axis`.
pub fn column(axis: Axis) -> &'static str {
    match axis {
        Axis::AlphaPair => "alpha1",
        other => other.as_str(),
    }
}

/// A script that reads `csv_name` from its own directory and writes a PNG
/// beside it: one line per (user, method[, series value]).
pub fn script(csv_name: &str, x: Axis, series: Option<Axis>) -> String {
    let logx = if x == Axis::Theta { "True" } else { "False" };
    let series = match series {
        Some(a) => format!("{:?}", column(a)),
        None => "None".to_string(),
    };
    format!(
        r#"#!/usr/bin/env python3
# Plots {csv_name}. Needs matplotlib; reads nothing but the CSV.
import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV = os.path.join(HERE, {csv:?})
X = {x:?}
SERIES = {series}
LOGX = {logx}

lines = defaultdict(list)
with open(CSV, newline="") as f:
    for row in csv.DictReader(f):
        if row["ec"].lower() == "nan":
            continue
        key = (row["user"], row["method"])
        if SERIES:
            key += ("%s=%s" % (SERIES, row[SERIES]),)
        lines[key].append((float(row[X]), float(row["ec"]), float(row["std_err"])))

fig, ax = plt.subplots(figsize=(7, 4.5))
for key, pts in sorted(lines.items()):
    pts.sort()
    xs, ys, es = zip(*pts)
    if any(es):
        ax.errorbar(xs, ys, yerr=es, marker="o", ms=3, capsize=2, label=" ".join(key))
    else:
        ax.plot(xs, ys, marker="o", ms=3, label=" ".join(key))
if LOGX:
    ax.set_xscale("log")
ax.set_xlabel(X)
ax.set_ylabel("effective capacity [b/s/Hz]")
ax.grid(True, alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
png = os.path.splitext(CSV)[0] + ".png"
fig.savefig(png, dpi=150)
print(png)
"#,
        csv = csv_name,
        x = column(x),
    )
}
