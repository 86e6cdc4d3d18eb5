//! Re-derivation of a written report from its own files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::milp::{SolveStatus, FEASIBILITY_TOL};
use crate::scenario::{CycleLifeCurve, Profiles, ResolutionMode, Scenario, HOURS};
use crate::sizing::{replay, CostBreakdown, DispatchRow, EnergySummary, ModelKind, Sizes, SizingResult};

use super::files::{parse_mode, read_dispatch, read_soc, Manifest, ManifestModel};
use super::tables::{cost_table, energy_table, size_table, Table, IPOC_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub models: Vec<ModelKind>,
    /// Largest constraint residual over all models.
    pub max_residual: f64,
    /// Largest relative gap between recomputed and reported objectives.
    pub max_objective_gap: f64,
    pub tables_checked: usize,
    pub ipoc_rows: usize,
}

fn fail(msg: impl Into<String>) -> Error {
    Error::Verify(msg.into())
}

fn parse_status(s: &str) -> Result<SolveStatus> {
    [SolveStatus::Optimal, SolveStatus::FeasibleGapLimited]
        .into_iter()
        .find(|st| st.label() == s)
        .ok_or_else(|| fail(format!("unexpected solution status `{s}`")))
}

fn profiles_from(dispatch: &[DispatchRow], days: usize, hours: usize) -> Result<Profiles> {
    if dispatch.len() != days * hours {
        return Err(fail(format!(
            "dispatch has {} rows, expected {}",
            dispatch.len(),
            days * hours
        )));
    }
    for (i, r) in dispatch.iter().enumerate() {
        if r.day != i / hours + 1 || r.hour != i % hours + 1 {
            return Err(fail(format!("dispatch row {} is out of order", i + 1)));
        }
    }
    let load: Vec<f64> = dispatch.iter().map(|r| r.load).collect();
    let pv: Vec<f64> = dispatch.iter().map(|r| r.pv_unit).collect();
    if hours == HOURS {
        let day = |s: &[f64]| -> [f64; HOURS] { s.try_into().expect("chunk of 24") };
        Profiles::new(
            load.chunks(HOURS).map(day).collect(),
            pv.chunks(HOURS).map(day).collect(),
        )
    } else if days == 1 {
        Profiles::short_day(load, pv)
    } else {
        Err(fail(format!("{days} days of {hours} hours")))
    }
}

fn rebuild(dir: &Path, manifest: &Manifest, entry: &ManifestModel, sc: &Scenario) -> Result<SizingResult> {
    let kind = ModelKind::parse(&entry.kind).ok_or_else(|| fail(format!("unknown model `{}`", entry.kind)))?;
    let dispatch = read_dispatch(&dir.join(format!("dispatch_{}.csv", kind.slug())))?;
    if dispatch.len() != manifest.days * manifest.hours {
        return Err(fail(format!("{}: dispatch length {}", kind.label(), dispatch.len())));
    }
    let (e_init, soc) = if kind.has_storage() {
        let (e0, levels) = read_soc(&dir.join(format!("soc_{}.csv", kind.slug())))?;
        if levels.len() != dispatch.len() {
            return Err(fail(format!(
                "{}: {} SOC rows for {} periods",
                kind.label(),
                levels.len(),
                dispatch.len()
            )));
        }
        if (e0 - entry.e_init).abs() > 1e-9 * entry.e_init.abs().max(1.0) {
            return Err(fail(format!(
                "{}: initial SOC {e0} differs from manifest {}",
                kind.label(),
                entry.e_init
            )));
        }
        (e0, levels)
    } else {
        (0.0, Vec::new())
    };
    let sizes = Sizes {
        dg: entry.dg_size,
        pv: entry.pv_size,
        bess: entry.bess_size,
    };
    let alpha = sc.alpha();
    Ok(SizingResult {
        kind,
        status: parse_status(&entry.status)?,
        mip_gap: entry.mip_gap,
        solve_seconds: 0.0,
        objective: entry.objective,
        sizes,
        deg_factor: entry.deg_factor,
        costs: CostBreakdown::from_dispatch(&sc.params, alpha, sizes, &dispatch, entry.deg_factor),
        energy: EnergySummary::from_dispatch(alpha, sizes.pv, &dispatch),
        e_init,
        soc,
        dispatch,
        alpha,
        days: manifest.days,
    })
}

/// Numeric cells may differ by the rounding of their written form.
fn cells_match(written: &str, fresh: &str) -> bool {
    if written == fresh {
        return true;
    }
    match (written.parse::<f64>(), fresh.parse::<f64>()) {
        (Ok(a), Ok(b)) => {
            let decimals = written.split_once('.').map_or(0, |(_, f)| f.len());
            let half_ulp = 0.5 * 10f64.powi(-(decimals as i32));
            (a - b).abs() <= 1e-6 * b.abs() + half_ulp
        }
        _ => false,
    }
}

fn compare_table(name: &str, written: &Table, fresh: &Table) -> Result<()> {
    if written.header != fresh.header {
        return Err(fail(format!(
            "{name}: header {:?}, expected {:?}",
            written.header, fresh.header
        )));
    }
    if written.rows.len() != fresh.rows.len() {
        return Err(fail(format!(
            "{name}: {} rows, expected {}",
            written.rows.len(),
            fresh.rows.len()
        )));
    }
    for (i, (w, f)) in written.rows.iter().zip(&fresh.rows).enumerate() {
        if w.len() != f.len() {
            return Err(fail(format!("{name}: row {} has {} cells", i + 1, w.len())));
        }
        for (j, (a, b)) in w.iter().zip(f).enumerate() {
            if !cells_match(a, b) {
                return Err(fail(format!(
                    "{name}: row {} column `{}` is {a}, recomputed {b}",
                    i + 1,
                    fresh.header[j]
                )));
            }
        }
    }
    Ok(())
}

fn number(cell: &str, what: &str) -> Result<f64> {
    cell.parse()
        .map_err(|_| fail(format!("ipoc.csv: `{cell}` is not a number ({what})")))
}

/// Row-wise identity `new = objective - modeled + actual`, to the written
/// precision.
fn check_ipoc(t: &Table) -> Result<usize> {
    if t.header != IPOC_HEADER {
        return Err(fail(format!("ipoc.csv: header {:?}", t.header)));
    }
    let col = |name: &str| IPOC_HEADER.iter().position(|h| *h == name).unwrap_or_default();
    let (obj, modeled, actual, corr, new) = (
        col("objective"),
        col("modeled_deg_cost"),
        col("actual_deg_cost"),
        col("cost_correction"),
        col("new_objective"),
    );
    let mut selected = 0;
    for (i, row) in t.rows.iter().enumerate() {
        let o = number(&row[obj], "objective")?;
        let m = number(&row[modeled], "modeled")?;
        let a = number(&row[actual], "actual")?;
        let c = number(&row[corr], "correction")?;
        let n = number(&row[new], "new objective")?;
        // four values rounded to cents
        let tol = 0.02 + 1e-9 * o.abs();
        if (n - (o - m + a)).abs() > tol || (c - (m - a)).abs() > tol {
            return Err(fail(format!(
                "ipoc.csv: iteration {} breaks the correction identity",
                i + 1
            )));
        }
        if row[IPOC_HEADER.len() - 1] == "yes" {
            selected += 1;
        }
    }
    if !t.rows.is_empty() && selected != 1 {
        return Err(fail(format!("ipoc.csv: {selected} rows marked selected")));
    }
    Ok(t.rows.len())
}

/// Check a report directory against itself: replay every dispatch against
/// the constraints, recompute the objectives, and regenerate the tables.
pub fn verify(dir: &Path) -> Result<VerifySummary> {
    let manifest = Manifest::read(&dir.join("manifest.toml"))?;
    let resolution = ResolutionMode::parse(&manifest.resolution)
        .ok_or_else(|| fail(format!("unknown resolution `{}`", manifest.resolution)))?;
    if resolution.days() != manifest.days {
        return Err(fail(format!("{} days at {}", manifest.days, manifest.resolution)));
    }
    let mode = parse_mode(&manifest.dg_min_mode)
        .ok_or_else(|| fail(format!("unknown DG floor mode `{}`", manifest.dg_min_mode)))?;
    let first = manifest
        .models
        .first()
        .ok_or_else(|| fail("manifest lists no models"))?;
    let first_kind = ModelKind::parse(&first.kind).ok_or_else(|| fail(format!("unknown model `{}`", first.kind)))?;
    let dispatch = read_dispatch(&dir.join(format!("dispatch_{}.csv", first_kind.slug())))?;

    let mut params = manifest.params.clone();
    params.big_m = Some(manifest.big_m);
    let sc = Scenario::assemble(
        params,
        profiles_from(&dispatch, manifest.days, manifest.hours)?,
        CycleLifeCurve::default(),
    )?
    .with_dg_min_mode(mode);
    if (sc.alpha() - manifest.alpha).abs() > 1e-12 {
        return Err(fail(format!(
            "alpha {} does not match {}",
            manifest.alpha, manifest.resolution
        )));
    }

    let mut results = Vec::with_capacity(manifest.models.len());
    let mut max_residual = 0.0f64;
    let mut max_objective_gap = 0.0f64;
    for entry in &manifest.models {
        let r = rebuild(dir, &manifest, entry, &sc)?;
        if r.dispatch
            .iter()
            .zip(&dispatch)
            .any(|(a, b)| a.load != b.load || a.pv_unit != b.pv_unit)
        {
            return Err(fail(format!(
                "{}: profiles differ between dispatch files",
                r.kind.label()
            )));
        }
        let res = replay(&r, &sc);
        if res.max() > FEASIBILITY_TOL {
            return Err(fail(format!("{}: constraint residuals {res:?}", r.kind.label())));
        }
        let gap = (r.costs.total() - r.objective).abs() / r.objective.abs().max(1.0);
        if gap > 1e-6 {
            return Err(fail(format!(
                "{}: recomputed objective {} against reported {}",
                r.kind.label(),
                r.costs.total(),
                r.objective
            )));
        }
        max_residual = max_residual.max(res.max());
        max_objective_gap = max_objective_gap.max(gap);
        results.push(r);
    }

    let years = sc.params.planning_years;
    let checks = [
        ("costs.csv", cost_table(&results)),
        ("sizes.csv", size_table(&results)),
        ("energy.csv", energy_table(&results, years)),
    ];
    for (name, fresh) in &checks {
        compare_table(name, &Table::read_csv(&dir.join(name))?, fresh)?;
    }

    let ipoc_path = dir.join("ipoc.csv");
    let ipoc_rows = match (&manifest.ipoc, ipoc_path.exists()) {
        (Some(m), true) => {
            let n = check_ipoc(&Table::read_csv(&ipoc_path)?)?;
            if n != m.iterations {
                return Err(fail(format!("ipoc.csv has {n} rows, manifest says {}", m.iterations)));
            }
            n
        }
        (None, false) => 0,
        (Some(_), false) => return Err(fail("manifest records a correction loop but ipoc.csv is missing")),
        (None, true) => return Err(fail("ipoc.csv present without a manifest entry")),
    };

    Ok(VerifySummary {
        models: results.iter().map(|r| r.kind).collect(),
        max_residual,
        max_objective_gap,
        tables_checked: checks.len(),
        ipoc_rows,
    })
}
