//! CSV output of a [`RunRecord`].

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::harness::config::Tier;
use crate::harness::run::RunRecord;

pub const CSV_HEADER: &str = "t,x0_pde,x0_ode_full,x0_ode_taylor,x0_eom,x0_eom_a,aux_pde,aux_ode,conserved,delta_ode_full,delta_eom,delta_eom_a";

fn cell(out: &mut String, series: Option<&[f64]>, k: usize) {
    out.push(',');
    if let Some(v) = series {
        out.push_str(&format!("{:.11e}", v[k]));
    }
}

/// Renders the record; absent tiers leave their cells empty.
pub fn render_csv(record: &RunRecord) -> String {
    let pde = record.pde.as_ref();
    let deltas = [Tier::OdeFull, Tier::Eom, Tier::EomA].map(|t| record.delta(t));
    let mut out = String::with_capacity(200 * (record.times.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (k, t) in record.times.iter().enumerate() {
        out.push_str(&format!("{t:.11e}"));
        for tier in Tier::ALL {
            cell(&mut out, record.center(tier), k);
        }
        cell(&mut out, pde.map(|p| p.aux.as_slice()), k);
        cell(&mut out, record.aux_ode(), k);
        cell(&mut out, pde.map(|p| p.norm.as_slice()), k);
        for d in &deltas {
            cell(&mut out, d.as_deref(), k);
        }
        out.push('\n');
    }
    out
}

/// Writes the CSV, creating parent directories as needed.
pub fn write_csv(record: &RunRecord, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(render_csv(record).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::parse_config;
    use crate::harness::run::run_experiment;

    #[test]
    fn rows_and_empty_cells() {
        let c = parse_config("mode=dark\nC=1\nD=-200\nA0=0.25\nx0_0=0\nt_max=1\ntiers=ode-full,eom\n").unwrap();
        let text = render_csv(&run_experiment(&c).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 11);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 12);
        assert_eq!(cells[0], "0.00000000000e0");
        assert_eq!(cells[1], "");
        assert_eq!(cells[2], "0.00000000000e0");
        assert_eq!(cells[3], "");
        assert_eq!(cells[4], "0.00000000000e0");
        assert_eq!(cells[7], "2.50000000000e-1");
        assert!(cells[8..].iter().all(|c| c.is_empty()));
    }
}
