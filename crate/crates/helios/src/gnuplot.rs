//! Ready-to-run gnuplot scripts that read the CSV outputs.
//!
//! Scripts use paths relative to their own directory, so run them with
//! `cd <dir> && gnuplot <script>`.

use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::rundir::{RunManifest, TRACE_FILE};

const PREAMBLE: &str = "set datafile separator ','\nset key autotitle columnhead\n";

fn write(path: &Path, body: String) -> Result<()> {
    fs::write(path, format!("{PREAMBLE}{body}")).map_err(|e| CliError::io(path, e))
}

/// `plot.gp` for a run directory: radius envelope, Lipschitz norm, Taylor
/// residual, and the saved interfaces in polar form.
pub fn run_script(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 1200,900\nset output 'run.png'\n");
    s.push_str("set multiplot layout 2,2\n");
    s.push_str(&format!(
        "set xlabel 't'\nplot '{TRACE_FILE}' using 1:2 with lines title 'min h', \\\n     '' using 1:3 with lines title 'max h'\n"
    ));
    s.push_str(&format!("plot '{TRACE_FILE}' using 1:4 with lines title 'Lipschitz norm'\n"));
    s.push_str(&format!("plot '{TRACE_FILE}' using 1:6 with lines title 'max(G(h) eta - 1)'\n"));
    s.push_str("unset xlabel\nset size ratio -1\n");
    let curves: Vec<String> = manifest
        .snapshots
        .iter()
        .map(|e| format!("'{}' using ($3*cos($1)):($3*sin($1)) with lines title 't = {}'", e.file, e.time))
        .collect();
    s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    s.push_str("unset multiplot\n");
    write(&dir.join("plot.gp"), s)
}

/// `sweep.gp`: consecutive gaps against viscosity on log axes.
pub fn sweep_script(dir: &Path) -> Result<()> {
    let s = "set terminal pngcairo size 800,600\nset output 'sweep.png'\n\
             set logscale xy\nset xlabel 'epsilon'\nset ylabel 'L2 gap to next level'\n\
             plot 'sweep.csv' using 1:2 with linespoints notitle\n";
    write(&dir.join("sweep.gp"), s.to_string())
}

/// Script for a `dtn` output file: `G` (and the oracle, when present) against alpha.
pub fn dtn_script(path: &Path, csv_name: &str, with_oracle: bool) -> Result<()> {
    let mut s = format!(
        "set terminal pngcairo size 800,600\nset output '{csv_name}.png'\nset xlabel 'alpha'\n\
         plot '{csv_name}' using 1:3 with lines"
    );
    if with_oracle {
        s.push_str(", \\\n     '' using 1:4 with points");
    }
    s.push('\n');
    write(path, s)
}

/// Script for a pressure file: surface of `p` over the polar grid.
pub fn pressure_script(path: &Path, csv_name: &str) -> Result<()> {
    let s = format!(
        "set terminal pngcairo size 800,600\nset output '{csv_name}.png'\nset size ratio -1\n\
         set view map\nplot '{csv_name}' using ($1*cos($2)):($1*sin($2)):4 with points pt 7 ps 0.5 palette notitle\n"
    );
    write(path, s)
}
