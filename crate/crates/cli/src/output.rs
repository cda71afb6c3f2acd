//! CSV time series. Every file starts with a `# memsync <kind> v1` line,
//! then a header row. Column sets are fixed per kind.

use std::io::Write;

use memsync::diagnostics::Snapshot;

pub const NORMS_VERSION: &str = "# memsync norms v1";
pub const DIFFS_VERSION: &str = "# memsync diffs v1";
pub const PROBE_VERSION: &str = "# memsync probe v1";

fn num(v: f64) -> String {
    // shortest round-trip form
    format!("{v}")
}

/// `t`, then per neuron `u_i_l2`, `z_i_c_l2`…, `rho_i_l2`, then `energy_sq`.
pub fn norms_header(m: usize, ell: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..m {
        h.push(format!("u_{i}_l2"));
        for c in 0..ell {
            h.push(format!("z_{i}_{c}_l2"));
        }
        h.push(format!("rho_{i}_l2"));
    }
    h.push("energy_sq".into());
    h
}

/// `t`, then per pair `i < j`: `U_i_j`, `Z_i_j`, `R_i_j`, `total_i_j`.
pub fn diffs_header(m: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..m {
        for j in i + 1..m {
            h.push(format!("U_{i}_{j}"));
            h.push(format!("Z_{i}_{j}"));
            h.push(format!("R_{i}_{j}"));
            h.push(format!("total_{i}_{j}"));
        }
    }
    h
}

/// `t`, then per neuron the point values `u_i`, `z_i_c`…, `rho_i`.
pub fn probe_header(m: usize, ell: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..m {
        h.push(format!("u_{i}"));
        for c in 0..ell {
            h.push(format!("z_{i}_{c}"));
        }
        h.push(format!("rho_{i}"));
    }
    h
}

fn shape_of(records: &[Snapshot]) -> (usize, usize) {
    let first = records.first();
    let m = first.map_or(0, |r| r.neurons.len());
    let ell = first.and_then(|r| r.neurons.first()).map_or(0, |n| n.z.len());
    (m, ell)
}

fn write_table<W: Write>(
    mut out: W,
    version: &str,
    header: Vec<String>,
    rows: impl Iterator<Item = Vec<f64>>,
) -> std::io::Result<()> {
    writeln!(out, "{version}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    for row in rows {
        w.write_record(row.into_iter().map(num))?;
    }
    w.flush()
}

pub fn write_norms<W: Write>(out: W, records: &[Snapshot]) -> std::io::Result<()> {
    let (m, ell) = shape_of(records);
    let rows = records.iter().map(|r| {
        let mut row = vec![r.t];
        for n in &r.neurons {
            row.push(n.u);
            row.extend(&n.z);
            row.push(n.rho);
        }
        row.push(r.energy_sq);
        row
    });
    write_table(out, NORMS_VERSION, norms_header(m, ell), rows)
}

pub fn write_diffs<W: Write>(out: W, records: &[Snapshot]) -> std::io::Result<()> {
    let (m, _) = shape_of(records);
    let rows = records.iter().map(|r| {
        let mut row = vec![r.t];
        for d in &r.diffs {
            row.extend([d.u, d.z, d.rho, d.total]);
        }
        row
    });
    write_table(out, DIFFS_VERSION, diffs_header(m), rows)
}

/// Records without probe samples are skipped.
pub fn write_probe<W: Write>(out: W, records: &[Snapshot]) -> std::io::Result<()> {
    let (m, ell) = shape_of(records);
    let rows = records.iter().filter_map(|r| {
        let samples = r.probe.as_ref()?;
        let mut row = vec![r.t];
        for s in samples {
            row.push(s.u);
            row.extend(&s.z);
            row.push(s.rho);
        }
        Some(row)
    });
    write_table(out, PROBE_VERSION, probe_header(m, ell), rows)
}
