use std::path::Path;

use crate::error::{Error, Result};
use crate::ipoc::IpocReport;
use crate::sizing::{ModelKind, SizingResult};

/// A small string table written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    /// Column-aligned plain text.
    pub fn to_text(&self) -> String {
        let n = self.header.len();
        let mut width = vec![0; n];
        for row in std::iter::once(&self.header).chain(&self.rows) {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row
                .iter()
                .zip(&width)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

pub(crate) const ABSENT: &str = "-";

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Fixed number of decimals, without a sign on a rounded zero.
pub(crate) fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{:.*}", decimals, clean(x));
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// Six significant digits. Used for $M cells, where anything below a
/// thousandth of a dollar is round-off.
pub(crate) fn sig6(x: f64) -> String {
    let x = clean(x);
    if x.abs() < 1e-9 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn header(results: &[SizingResult]) -> Vec<String> {
    let mut h = vec!["attribute".to_string(), "unit".to_string()];
    h.extend(results.iter().map(|r| r.kind.label().to_string()));
    h
}

fn row<F>(results: &[SizingResult], attribute: &str, unit: &str, cell: F) -> Vec<String>
where
    F: Fn(&SizingResult) -> Option<String>,
{
    let mut r = vec![attribute.to_string(), unit.to_string()];
    r.extend(results.iter().map(|x| cell(x).unwrap_or_else(|| ABSENT.into())));
    r
}

/// Currency rows come in pairs: raw dollars and $M.
fn money_rows<F>(t: &mut Table, results: &[SizingResult], attribute: &str, value: F)
where
    F: Fn(&SizingResult) -> Option<f64>,
{
    t.push(row(results, attribute, "$", |r| value(r).map(|v| fixed(v, 2))));
    t.push(row(results, attribute, "$M", |r| value(r).map(|v| sig6(v / 1e6))));
}

/// Objective and cost terms, all recomputed from dispatch.
pub fn cost_table(results: &[SizingResult]) -> Table {
    let mut t = Table::new(header(results));
    t.push(row(results, "Solution", "", |r| Some(r.status.label().into())));
    money_rows(&mut t, results, "Objective cost", |r| Some(r.costs.total()));
    money_rows(&mut t, results, "DG capital cost", |r| Some(r.costs.dg_capital));
    money_rows(&mut t, results, "PV capital cost", |r| Some(r.costs.pv_capital));
    money_rows(&mut t, results, "BESS capital cost", |r| {
        r.has_storage().then_some(r.costs.bess_capital)
    });
    money_rows(&mut t, results, "DG OP+NL cost", |r| Some(r.costs.dg_op_noload));
    money_rows(&mut t, results, "PV degradation cost", |r| Some(r.costs.pv_deg));
    money_rows(&mut t, results, "BESS degradation cost", |r| {
        (r.kind == ModelKind::MgsNib).then_some(r.costs.bess_deg)
    });
    t
}

pub fn size_table(results: &[SizingResult]) -> Table {
    let mut t = Table::new(header(results));
    t.push(row(results, "DG size", "MW", |r| Some(fixed(r.sizes.dg, 6))));
    t.push(row(results, "PV size", "MW", |r| Some(fixed(r.sizes.pv, 6))));
    t.push(row(results, "BESS size", "MWh", |r| {
        r.has_storage().then(|| fixed(r.sizes.bess, 6))
    }));
    t
}

/// Energy totals over the planning horizon (annual figures × `years`).
pub fn energy_table(results: &[SizingResult], years: f64) -> Table {
    let unit = format!("MWh over {years} y");
    let mut t = Table::new(header(results));
    let mut add = |name: &str, storage_only: bool, f: &dyn Fn(&SizingResult) -> f64| {
        t.push(row(results, name, &unit, |r| {
            (!storage_only || r.has_storage()).then(|| fixed(f(r) * years, 4))
        }));
    };
    add("Total load", false, &|r| r.energy.total_load);
    add("DG energy", false, &|r| r.energy.dg_energy);
    add("PV energy available", false, &|r| r.energy.pv_available);
    add("PV energy used", false, &|r| r.energy.pv_energy_used);
    add("PV curtailed", false, &|r| r.energy.pv_curtailed);
    add("BESS charge", true, &|r| r.energy.bess_charge);
    add("BESS discharge", true, &|r| r.energy.bess_discharge);
    t
}

pub const IPOC_HEADER: [&str; 14] = [
    "iteration",
    "penalty_dod",
    "deg_factor",
    "bess_size",
    "objective",
    "modeled_deg_cost",
    "average_dod",
    "actual_deg_cost",
    "cost_correction",
    "new_objective",
    "actual_deg_cost_musd",
    "cost_correction_musd",
    "new_objective_musd",
    "selected",
];

/// One row per iteration.
pub fn ipoc_table(report: &IpocReport) -> Table {
    let mut t = Table::new(IPOC_HEADER);
    for (i, it) in report.iterations.iter().enumerate() {
        t.push(vec![
            it.index.to_string(),
            fixed(it.dod_used, 2),
            fixed(it.deg_factor_used, 6),
            fixed(it.sizing.sizes.bess, 6),
            fixed(it.sizing.objective, 2),
            fixed(it.modeled_deg_cost, 2),
            it.average_dod.map_or_else(|| ABSENT.into(), |d| fixed(d, 2)),
            fixed(it.actual_deg_cost, 2),
            fixed(it.correction, 2),
            fixed(it.corrected_objective, 2),
            sig6(it.actual_deg_cost / 1e6),
            sig6(it.correction / 1e6),
            sig6(it.corrected_objective / 1e6),
            if i == report.selected { "yes" } else { "no" }.into(),
        ]);
    }
    t
}
