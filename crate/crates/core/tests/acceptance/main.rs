//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Solver backend follows `GRIDSIZER_SOLVER`, except for the tiny oracle
//! instance, which is solved with both backends.

mod enumerate;
mod rainflow;
mod residual;

use std::cell::OnceCell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gridsizer_core::degradation::{self, count_cycles, rainflow_cycles};
use gridsizer_core::exec::Execution;
use gridsizer_core::ipoc::{run_ipoc, IpocOptions, IpocStart, Termination};
use gridsizer_core::milp::{
    write_lp, Backend, HighsSolver, LpFileSolver, MilpModel, MilpSolver, Solution, SolveOptions, SolveStatus,
};
use gridsizer_core::report::{self, ComparisonReport};
use gridsizer_core::scenario::{
    load_profiles, CycleLifeCurve, Profiles, ResolutionMode, Scenario, ScenarioParams, HOURS,
};
use gridsizer_core::sizing::{build, solve_sizing, ModelKind, SizingResult};

use enumerate::Tiny;
use simplex::{Lp, Rel};

/// Per-solve limits for the coarser resolutions. The 1-day runs are solved
/// to optimality.
const TYPICAL_TIME_LIMIT: f64 = 20.0;
const FULL_TIME_LIMIT: f64 = 30.0;
const WALKS: usize = 1000;

type Outcome = Result<String, String>;
type Check = (&'static str, fn(&Ctx) -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

struct Run {
    report: ComparisonReport,
    seconds: f64,
}

impl Run {
    fn get(&self, kind: ModelKind) -> &SizingResult {
        self.report.result(kind).expect("all three models are solved")
    }
}

struct Ctx {
    data: PathBuf,
    solver: Box<dyn MilpSolver>,
    year: OnceCell<Profiles>,
    params: OnceCell<ScenarioParams>,
    single: OnceCell<Result<Run, String>>,
    typical: OnceCell<Result<Run, String>>,
    full: OnceCell<Result<Run, String>>,
    tiny: OnceCell<Result<Vec<(Scenario, SizingResult)>, String>>,
}

impl Ctx {
    fn new() -> Result<Self, String> {
        let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        let solver = Backend::from_env().map_err(|e| e.to_string())?.solver();
        Ok(Self {
            data,
            solver,
            year: OnceCell::new(),
            params: OnceCell::new(),
            single: OnceCell::new(),
            typical: OnceCell::new(),
            full: OnceCell::new(),
            tiny: OnceCell::new(),
        })
    }

    fn scenario(&self, mode: ResolutionMode) -> Result<Scenario, String> {
        let year = self.year.get_or_init(|| {
            load_profiles(&self.data.join("load.csv"), &self.data.join("pv.csv")).expect("bundled profiles load")
        });
        let params = self
            .params
            .get_or_init(|| ScenarioParams::load(&self.data.join("params.toml")).expect("bundled parameters load"));
        let prof = year.resample(mode, Execution::default()).map_err(|e| e.to_string())?;
        Scenario::assemble(params.clone(), prof, CycleLifeCurve::default()).map_err(|e| e.to_string())
    }

    fn solve(&self, mode: ResolutionMode, time_limit: f64, ipoc: bool) -> Result<Run, String> {
        let sc = self.scenario(mode)?;
        let opts = SolveOptions {
            mip_gap: 0.0,
            time_limit,
        };
        let ipoc = ipoc.then(IpocOptions::default);
        let began = Instant::now();
        let report = report::solve_models(&sc, &ModelKind::ALL, self.solver.as_ref(), &opts, ipoc.as_ref())
            .map_err(|e| format!("{}: {e}", mode.label()))?;
        Ok(Run {
            report,
            seconds: began.elapsed().as_secs_f64(),
        })
    }

    fn single(&self) -> Result<&Run, String> {
        self.single
            .get_or_init(|| self.solve(ResolutionMode::Single1, SolveOptions::default().time_limit, true))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn typical(&self) -> Result<&Run, String> {
        self.typical
            .get_or_init(|| self.solve(ResolutionMode::Typical12, TYPICAL_TIME_LIMIT, false))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn full(&self) -> Result<&Run, String> {
        self.full
            .get_or_init(|| self.solve(ResolutionMode::Full365, FULL_TIME_LIMIT, false))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Tiny instance solved by both backends, three models each.
    fn tiny(&self) -> Result<&Vec<(Scenario, SizingResult)>, String> {
        self.tiny.get_or_init(solve_tiny).as_ref().map_err(Clone::clone)
    }
}

fn tiny_instance() -> Tiny {
    Tiny {
        params: ScenarioParams {
            dg_capital: 400_000.0,
            pv_capital: 250_000.0,
            bess_capital: 120_000.0,
            big_m: Some(1.0),
            ..ScenarioParams::default()
        },
        load: vec![0.40, 0.30, 0.35, 0.70],
        pv: vec![0.0, 0.90, 1.0, 0.10],
        big_m: 1.0,
    }
}

fn tiny_scenario(t: &Tiny) -> Result<Scenario, String> {
    let prof = Profiles::short_day(t.load.clone(), t.pv.clone()).map_err(|e| e.to_string())?;
    Scenario::assemble(t.params.clone(), prof, CycleLifeCurve::default()).map_err(|e| e.to_string())
}

fn solve_tiny() -> Result<Vec<(Scenario, SizingResult)>, String> {
    let sc = tiny_scenario(&tiny_instance())?;
    let backends: [&dyn MilpSolver; 2] = [&HighsSolver, &LpFileSolver];
    let mut out = Vec::new();
    for solver in backends {
        for kind in ModelKind::ALL {
            let sm = build(kind, &sc).map_err(|e| e.to_string())?;
            let (r, _) = solve_sizing(&sm, &sc, solver, &SolveOptions::default(), None)
                .map_err(|e| format!("{} via {}: {e}", kind.label(), solver.name()))?;
            out.push((sc.clone(), r));
        }
    }
    Ok(out)
}

fn c1_deg_factor(_: &Ctx) -> Outcome {
    let p = ScenarioParams::default();
    let got = degradation::deg_factor(&p, &CycleLifeCurve::default(), 0.8).map_err(|e| e.to_string())?;
    let oracle = 469_000.0 * 0.79 / 3000.0;
    ensure(rel_gap(got, oracle) <= 1e-9, || format!("{got} vs oracle {oracle}"))?;
    ensure((got - 123.503).abs() < 5e-4, || {
        format!("{got} does not round to 123.503")
    })?;
    Ok(format!("delta(0.8) = {got:.6} per MWh"))
}

fn c2_pv_degradation(_: &Ctx) -> Outcome {
    let p = ScenarioParams::default();
    let cost = |s: f64| 25.0 * degradation::pv_deg_cost(&p, s);
    let got = cost(0.33);
    let oracle = 0.41 * 1_450_000.0 * 0.33 * 0.01 * 25.0;
    ensure(rel_gap(got, oracle) <= 1e-9, || format!("{got} vs oracle {oracle}"))?;
    ensure((got - 49_046.25).abs() < 1e-6, || format!("{got} is not $49,046.25"))?;
    // the reported 0.33 MW is itself rounded; any size that rounds to it
    // is consistent with the reported cost
    let reported: f64 = 50_000.0;
    let (lo, hi) = (cost(0.325), cost(0.335));
    let nearest = reported.clamp(lo, hi);
    ensure((nearest - reported).abs() <= 500.0, || {
        format!("sizes rounding to 0.33 MW cost {lo:.0}..{hi:.0}, none within $500 of $50,000")
    })?;
    Ok(format!(
        "25-year cost at 0.33 MW = ${got:.2} (${:.2} from $0.050M); 0.325..0.335 MW spans ${lo:.0}..${hi:.0}",
        reported - got
    ))
}

fn ordering(name: &str, run: &Run) -> Result<String, String> {
    let (mgs, ib, nib) = (
        run.get(ModelKind::Mgs).objective,
        run.get(ModelKind::MgsIb).objective,
        run.get(ModelKind::MgsNib).objective,
    );
    let slack = 1e-6 * mgs.abs();
    ensure(ib <= nib + slack && nib <= mgs + slack, || {
        format!("{name}: IB {ib:.0}, NIB {nib:.0}, MGS {mgs:.0} out of order")
    })?;
    ensure(ib < mgs - slack, || {
        format!("{name}: IB {ib:.0} not strictly below MGS {mgs:.0}")
    })?;
    let status: Vec<&str> = ModelKind::ALL.iter().map(|&k| run.get(k).status.label()).collect();
    Ok(format!(
        "{name} IB {:.4} <= NIB {:.4} <= MGS {:.4} $M [{}] in {:.1} s",
        ib / 1e6,
        nib / 1e6,
        mgs / 1e6,
        status.join("/"),
        run.seconds
    ))
}

fn c3_ordering(ctx: &Ctx) -> Outcome {
    let single = ctx.single()?;
    let typical = ctx.typical()?;
    let full = ctx.full()?;
    let mut parts = Vec::new();
    for (name, run) in [("1-day", single), ("12-day", typical), ("365-day", full)] {
        parts.push(ordering(name, run)?);
    }
    for (name, run) in [("1-day", single), ("12-day", typical)] {
        ensure(run.seconds < 60.0, || format!("{name} took {:.1} s", run.seconds))?;
    }
    Ok(parts.join("; "))
}

fn c4_curtailment(ctx: &Ctx) -> Outcome {
    let mut parts = Vec::new();
    for (name, run) in [("1-day", ctx.single()?), ("12-day", ctx.typical()?)] {
        let base = run.get(ModelKind::Mgs).energy.pv_curtailed;
        ensure(base > 0.0, || format!("{name}: MGS curtails nothing"))?;
        for kind in [ModelKind::MgsIb, ModelKind::MgsNib] {
            let cut = 1.0 - run.get(kind).energy.pv_curtailed / base;
            ensure(cut >= 0.2, || {
                format!("{name} {}: curtailment down only {:.1} %", kind.label(), 100.0 * cut)
            })?;
            parts.push(format!("{name} {} -{:.0} %", kind.label(), 100.0 * cut));
        }
    }
    Ok(parts.join(", "))
}

fn c5_tiny_oracle(ctx: &Ctx) -> Outcome {
    let began = Instant::now();
    // textbook check of the oracle itself: optimum at (1.6, 1.2)
    let mut lp = Lp::default();
    let (x, y) = (lp.var(-1.0), lp.var(-1.0));
    lp.row(&[(x, 1.0), (y, 2.0)], Rel::Le, 4.0);
    lp.row(&[(x, 3.0), (y, 1.0)], Rel::Le, 6.0);
    let v = lp.minimize().ok_or("oracle self-check infeasible")?;
    ensure((v + 2.8).abs() < 1e-12, || format!("oracle self-check gives {v}"))?;

    let tiny = tiny_instance();
    let solved = ctx.tiny()?;
    let mut parts = Vec::new();
    for kind in ModelKind::ALL {
        let (best, tried) = tiny.optimum(kind);
        let best = best.ok_or_else(|| format!("{}: oracle finds no feasible pattern", kind.label()))?;
        for (_, r) in solved.iter().filter(|(_, r)| r.kind == kind) {
            ensure(r.status == SolveStatus::Optimal, || {
                format!("{}: status {}", kind.label(), r.status.label())
            })?;
            ensure(rel_gap(r.objective, best) <= 1e-5, || {
                format!(
                    "{}: solver {} vs oracle {best} over {tried} patterns",
                    kind.label(),
                    r.objective
                )
            })?;
        }
        let r = &solved.iter().find(|(_, r)| r.kind == kind).expect("solved").1;
        parts.push(format!(
            "{} {best:.2} ({tried} patterns, S_pv {:.3}, S_bess {:.3})",
            kind.label(),
            r.sizes.pv,
            r.sizes.bess
        ));
    }
    let secs = began.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{}; both backends; {secs:.2} s", parts.join(", ")))
}

fn c6_replay(ctx: &Ctx) -> Outcome {
    let mut checked: Vec<(String, &Scenario, &SizingResult)> = Vec::new();
    for (sc, r) in ctx.tiny()? {
        checked.push((format!("4-period {}", r.kind.label()), sc, r));
    }
    for (name, run) in [
        ("1-day", ctx.single()?),
        ("12-day", ctx.typical()?),
        ("365-day", ctx.full()?),
    ] {
        let sc = &run.report.scenario;
        for r in &run.report.results {
            checked.push((format!("{name} {}", r.kind.label()), sc, r));
        }
        for it in run.report.ipoc.iter().flat_map(|i| &i.iterations) {
            checked.push((format!("{name} correction iteration {}", it.index), sc, &it.sizing));
        }
    }
    let mut worst = 0.0f64;
    let mut worst_obj = 0.0f64;
    for (name, sc, r) in &checked {
        let c = residual::residual(sc, r);
        ensure(c.worst <= 1e-6, || {
            format!("{name}: residual {:.3e} ({})", c.worst, c.at)
        })?;
        let gap = rel_gap(residual::objective(sc, r), r.objective);
        ensure(gap <= 1e-6, || format!("{name}: recomputed objective off by {gap:.2e}"))?;
        worst = worst.max(c.worst);
        worst_obj = worst_obj.max(gap);
    }
    Ok(format!(
        "{} solved instances, max residual {worst:.2e}, max objective gap {worst_obj:.2e}",
        checked.len()
    ))
}

fn random_walk(rng: &mut ChaCha8Rng, grid: bool) -> Vec<f64> {
    let len = rng.gen_range(1..=200);
    let mut x: f64 = rng.gen();
    let step = rng.gen_range(0.02..0.4);
    (0..len)
        .map(|_| {
            x = (x + rng.gen_range(-step..=step)).clamp(0.0, 1.0);
            // grid values force ties between ranges and plateaus
            if grid {
                (x * 20.0).round() / 20.0
            } else {
                x
            }
        })
        .collect()
}

fn c7_rainflow(_: &Ctx) -> Outcome {
    let began = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut cycles = 0.0;
    for w in 0..WALKS {
        let walk = random_walk(&mut rng, w % 2 == 1);
        let n_bins = [10, 7, 20][w % 3];
        let got = count_cycles(&walk, n_bins).map_err(|e| e.to_string())?;
        let want = rainflow::binned(&walk, n_bins);
        ensure(got.counts() == want.as_slice(), || {
            format!(
                "walk {w} ({} points, {n_bins} bins): {:?} vs oracle {want:?}",
                walk.len(),
                got.counts()
            )
        })?;
        let variation: f64 = walk.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
        let extracted: f64 = rainflow_cycles(&walk).iter().map(|c| 2.0 * c.weight * c.range).sum();
        ensure((extracted - variation).abs() <= 1e-9, || {
            format!("walk {w}: cycle ranges sum to {extracted}, total variation {variation}")
        })?;
        cycles += got.total();
    }
    let secs = began.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "{WALKS} walks, {cycles} cycles binned identically, ranges conserved; {secs:.2} s"
    ))
}

/// Returns a fixed assignment looked up by variable name.
struct Forced(Vec<(String, f64)>);

impl MilpSolver for Forced {
    fn name(&self) -> &'static str {
        "forced"
    }

    fn solve(&self, model: &MilpModel, _: &SolveOptions, _: Option<&[f64]>) -> gridsizer_core::error::Result<Solution> {
        let values: Vec<f64> = model
            .vars()
            .iter()
            .map(|v| self.0.iter().find(|(n, _)| *n == v.name).map_or(0.0, |p| p.1))
            .collect();
        Ok(Solution {
            status: SolveStatus::Optimal,
            objective_value: model.objective_value(&values),
            values,
            mip_gap: 0.0,
            solve_seconds: 0.0,
        })
    }
}

/// One MWh battery cycled once from 90 % to 10 % and back, exactly the
/// nominal depth.
fn exact_cycle() -> Result<(Scenario, Forced), String> {
    let prof = Profiles::uniform(ResolutionMode::Single1, [1.0; HOURS], [0.0; HOURS]).map_err(|e| e.to_string())?;
    let sc =
        Scenario::assemble(ScenarioParams::default(), prof, CycleLifeCurve::default()).map_err(|e| e.to_string())?;
    let eta = sc.params.eta;
    let mut v = vec![
        ("p_dg_max".to_string(), 1.0 + 0.1 / eta),
        ("s_bess".to_string(), 1.0),
        ("e_init".to_string(), 0.9),
    ];
    let mut e: f64 = 0.9;
    for t in 1..=HOURS {
        let (chg, dchg) = match t {
            1..=8 => (0.0, 0.1),
            9..=16 => (0.1 / eta, 0.0),
            _ => (0.0, 0.0),
        };
        e = if t == HOURS { 0.9 } else { e + eta * chg - dchg };
        let k = format!("1_{t}");
        v.extend([
            (format!("p_dg_{k}"), 1.0 + chg - dchg),
            (format!("u_dg_{k}"), 1.0),
            (format!("p_chg_{k}"), chg),
            (format!("p_dchg_{k}"), dchg),
            (format!("u_chg_{k}"), f64::from(u8::from(chg > 0.0))),
            (format!("u_dchg_{k}"), f64::from(u8::from(dchg > 0.0))),
            (format!("e_bess_{k}"), e),
        ]);
    }
    Ok((sc, Forced(v)))
}

fn c8_ipoc(ctx: &Ctx) -> Outcome {
    let run = ctx.single()?;
    let ipoc = run.report.ipoc.as_ref().ok_or("no correction loop in the 1-day run")?;
    ensure(ipoc.iterations.len() <= 10, || {
        format!("{} iterations", ipoc.iterations.len())
    })?;
    ensure(
        matches!(ipoc.termination, Termination::Converged | Termination::DodRepeated),
        || format!("terminated by {}", ipoc.termination.label()),
    )?;
    for it in &ipoc.iterations {
        let want = it.sizing.objective - it.modeled_deg_cost + it.actual_deg_cost;
        ensure(rel_gap(it.corrected_objective, want) <= 1e-6, || {
            format!("iteration {}: corrected {} vs {want}", it.index, it.corrected_objective)
        })?;
    }

    let (sc, forced) = exact_cycle()?;
    let fixture = run_ipoc(&sc, &forced, &IpocOptions::default(), IpocStart::Cold).map_err(|e| e.to_string())?;
    let first = &fixture.iterations[0];
    ensure(first.modeled_deg_cost > 0.0, || "fixture has no modeled cost".into())?;
    let rel = first.correction.abs() / first.modeled_deg_cost;
    ensure(rel <= 1e-9, || {
        format!("fixture correction {} ({rel:.2e} relative)", first.correction)
    })?;

    let dods: Vec<String> = ipoc.iterations.iter().map(|i| format!("{:.2}", i.dod_used)).collect();
    Ok(format!(
        "{} after {} iteration(s), DOD {}; fixture correction {:.1e} relative",
        ipoc.termination.label(),
        ipoc.iterations.len(),
        dods.join(" -> "),
        rel
    ))
}

fn c9_timing(ctx: &Ctx) -> Outcome {
    let run = ctx.single()?;
    let mut solves: Vec<f64> = run.report.results.iter().map(|r| r.solve_seconds).collect();
    solves.extend(
        run.report
            .ipoc
            .iter()
            .flat_map(|i| &i.iterations)
            .map(|i| i.sizing.solve_seconds),
    );
    let slowest = solves.iter().copied().fold(0.0, f64::max);
    ensure(slowest < 10.0, || format!("1-day solve took {slowest:.2} s"))?;

    let full = ctx.full()?;
    let build = full.report.build_seconds.iter().map(|b| b.1).fold(0.0, f64::max);
    ensure(build < 5.0, || format!("365-day build took {build:.2} s"))?;
    Ok(format!(
        "slowest of {} 1-day solves {slowest:.2} s; slowest 365-day build {build:.2} s",
        solves.len()
    ))
}

fn files_of(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        // timings are the only run-dependent content
        if name == "summary.txt" {
            continue;
        }
        out.push((name, std::fs::read(&path).map_err(|e| e.to_string())?));
    }
    out.sort();
    Ok(out)
}

fn c10_determinism(ctx: &Ctx) -> Outcome {
    let first = ctx.single()?;
    let second = ctx.solve(ResolutionMode::Single1, SolveOptions::default().time_limit, true)?;
    let (a, b) = (
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    );
    report::write_report(&first.report, a.path()).map_err(|e| e.to_string())?;
    report::write_report(&second.report, b.path()).map_err(|e| e.to_string())?;
    let (fa, fb) = (files_of(a.path())?, files_of(b.path())?);
    let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
    ensure(names == fb.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(), || {
        "file sets differ".into()
    })?;
    for ((name, x), (_, y)) in fa.iter().zip(&fb) {
        ensure(x == y, || format!("{name} differs between runs"))?;
    }

    let sc = ctx.scenario(ResolutionMode::Full365)?;
    for kind in ModelKind::ALL {
        let lp = |_| {
            build(kind, &sc)
                .and_then(|sm| write_lp(&sm.model))
                .map_err(|e| e.to_string())
        };
        ensure(lp(0)? == lp(1)?, || {
            format!("365-day {} LP text differs between builds", kind.label())
        })?;
    }
    Ok(format!(
        "{} report files byte-identical across two 1-day runs; 365-day LP text stable",
        names.len()
    ))
}

fn main() -> ExitCode {
    let ctx = match Ctx::new() {
        Ok(c) => c,
        Err(e) => {
            println!("acceptance setup failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: [Check; 10] = [
        ("degradation factor at 80 % DOD", c1_deg_factor),
        ("PV degradation cost", c2_pv_degradation),
        ("objective ordering", c3_ordering),
        ("curtailment reduction", c4_curtailment),
        ("tiny-instance oracle", c5_tiny_oracle),
        ("feasibility replay", c6_replay),
        ("rainflow oracle", c7_rainflow),
        ("correction loop", c8_ipoc),
        ("solve and build time", c9_timing),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let began = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&ctx)))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = began.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
