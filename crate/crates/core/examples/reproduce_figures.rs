//! Writes the data behind the rate and shift figures as CSV and JSON.
//!
//! ```text
//! cargo run --example reproduce_figures -- out/
//! ```

use std::fs::File;
use std::path::PathBuf;

use mirror_dce::io::{sweep_table, Format};
use mirror_dce::sweeps::{run_sweep, SweepKind, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("mirror-dce-figures"));
    std::fs::create_dir_all(&dir)?;
    for kind in [SweepKind::Figure1, SweepKind::Figure1Insert, SweepKind::Figure2, SweepKind::Convergence] {
        let mut spec = SweepSpec::default_for(kind, 78.0, 0.03)?;
        if kind == SweepKind::Figure2 {
            spec.numeric_order = Some(3);
        }
        let result = run_sweep(&spec)?;
        let table = sweep_table(&result);
        for format in [Format::Csv, Format::Json] {
            let path = dir.join(format!("{}.{format}", kind.name()));
            table.write(File::create(&path)?, format, 17)?;
            println!("{} rows -> {}", result.rows.len(), path.display());
        }
    }
    Ok(())
}
