//! Matplotlib script generation for sweep output.

use crate::error::CliError;
use crate::output::CsvRow;
use std::fmt::Write;
use std::path::Path;

fn py_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

fn py_str(s: &str) -> String {
    format!("{s:?}")
}

/// Builds a standalone script drawing one series per process. The figure is
/// saved next to the script as `<image>` unless a path is given on its
/// command line.
pub fn plot_script(rows: &[CsvRow], image: &str) -> Result<String, CliError> {
    let first = rows
        .first()
        .ok_or_else(|| CliError::Input("no rows to plot".into()))?;
    if let Some(r) = rows.iter().find(|r| r.figure != first.figure) {
        return Err(CliError::Input(format!(
            "rows mix figures `{}` and `{}`",
            first.figure, r.figure
        )));
    }
    let (xlabel, ylabel, use_delta) = match first.figure.as_str() {
        "free_energy" => ("$r$", "average free energy", false),
        "ergotropy" => (r"population imbalance $\delta\rho$", "daemonic ergotropy", true),
        other => return Err(CliError::Input(format!("unknown figure `{other}`"))),
    };

    let mut series: Vec<(&str, Vec<f64>, Vec<f64>)> = Vec::new();
    for row in rows {
        let x = if use_delta {
            row.delta_rho.unwrap_or(1.0 - 2.0 * row.r)
        } else {
            row.r
        };
        match series.iter_mut().find(|s| s.0 == row.process) {
            Some(s) => {
                s.1.push(x);
                s.2.push(row.value);
            }
            None => series.push((&row.process, vec![x], vec![row.value])),
        }
    }

    let mut s = String::new();
    s.push_str("#!/usr/bin/env python3\n");
    s.push_str("import os\nimport sys\n\nimport matplotlib\n\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n");
    s.push_str("SERIES = [\n");
    for (name, xs, ys) in &series {
        writeln!(s, "    ({}, {}, {}),", py_str(name), py_list(xs), py_list(ys)).unwrap();
    }
    s.push_str("]\n\n");
    writeln!(s, "XLABEL = {}", py_str(xlabel)).unwrap();
    writeln!(s, "YLABEL = {}", py_str(ylabel)).unwrap();
    writeln!(s, "IMAGE = {}", py_str(image)).unwrap();
    s.push_str(
        r#"

def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(os.path.abspath(__file__)), IMAGE)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name, xs, ys in SERIES:
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.2, label=name)
    ax.set_xlabel(XLABEL)
    ax.set_ylabel(YLABEL)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
"#,
    );
    Ok(s)
}

pub fn write_plot_script(rows: &[CsvRow], path: &Path) -> Result<(), CliError> {
    let image = path
        .with_extension("png")
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plot.png".into());
    let script = plot_script(rows, &image)?;
    std::fs::write(path, script).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(process: &str, r: f64, figure: &str) -> CsvRow {
        CsvRow {
            process: process.into(),
            r,
            delta_rho: (figure == "ergotropy").then_some(1.0 - 2.0 * r),
            figure: figure.into(),
            value: r * 0.1,
            prob_0: 0.5,
            prob_1: 0.5,
            m: None,
            phi: None,
            x: None,
            chi: None,
        }
    }

    #[test]
    fn one_series_per_process() {
        let mut rows = Vec::new();
        for p in ["composition", "switch2", "ising2"] {
            for r in [0.0, 0.5, 1.0] {
                rows.push(row(p, r, "free_energy"));
            }
        }
        let s = plot_script(&rows, "x.png").unwrap();
        let block = s.split("SERIES = [").nth(1).unwrap().split(']').next().unwrap();
        assert!(block.contains("\"composition\""));
        assert_eq!(s.matches("    (\"").count(), 3);
        assert!(s.contains("XLABEL = \"$r$\""));
        assert!(s.contains("YLABEL = \"average free energy\""));
    }

    #[test]
    fn ergotropy_axis_is_delta_rho() {
        let rows = vec![row("switch2", 0.25, "ergotropy")];
        let s = plot_script(&rows, "x.png").unwrap();
        assert!(s.contains("delta"));
        assert!(s.contains("[0.5]"));
        assert!(s.contains("daemonic ergotropy"));
    }

    #[test]
    fn empty_and_mixed_rows_fail() {
        assert!(plot_script(&[], "x.png").is_err());
        let rows = vec![row("a", 0.0, "ergotropy"), row("a", 0.0, "free_energy")];
        assert!(plot_script(&rows, "x.png").is_err());
    }
}
