use crate::config::Grid;
use crate::output::{Cell, PlotSpec, Table};
use anyhow::{bail, Context, Result};
use oatbell::lattice::{
    BHParams, Checkpoint, CrossModelReport, KrylovConfig, LatticeState, LatticeSystem, Propagator,
};
use oatbell::{
    bell_ln_correlator_oat, gaussian_correlator, lhv_max_bruteforce, make_css, tau_crit_approx,
    tau_crit_exact, tau_s, BellReport, RevivalSpec,
};
use rayon::prelude::*;
use std::f64::consts::LN_2;
use std::io::Write;
use std::path::{Path, PathBuf};

fn xi2_cell(r: oatbell::Result<f64>) -> Cell {
    r.map_or(Cell::Empty, Cell::Float)
}

fn oat_xi2(n: usize, tau: f64) -> Cell {
    match make_css(n, 0.0) {
        Ok(css) => xi2_cell(css.evolve_oat(tau).squeezing_xi2()),
        Err(_) => Cell::Empty,
    }
}

pub fn oat(n: usize, grid: &Grid) -> Result<(Table, PlotSpec)> {
    let rows: Vec<Vec<Cell>> = grid
        .values()
        .par_iter()
        .map(|&tau| -> Result<Vec<Cell>> {
            let ln_e = bell_ln_correlator_oat(n, tau)?;
            let report = BellReport::from_ln(ln_e.min(0.25f64.ln()), n)?;
            let revival = RevivalSpec::matching(n, tau, 1e-9);
            Ok(vec![
                tau.into(),
                ln_e.exp().into(),
                ln_e.into(),
                gaussian_correlator(n, tau).into(),
                revival.map(|r| r.q).into(),
                revival.map(|r| 1.0 / (r.q * r.q) as f64).into(),
                oat_xi2(n, tau),
                report.bell_depth.into(),
                report.entanglement_depth.into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        "oat",
        vec![
            "tau",
            "correlator_exact",
            "ln_correlator_exact",
            "correlator_gaussian",
            "revival_q",
            "revival_prediction",
            "xi2",
            "bell_depth",
            "entanglement_depth",
        ],
    )
    .meta("n", n);
    table.rows = rows;
    table.summary.push(("tau_crit_approx".into(), tau_crit_approx(n).into()));
    table.summary.push(("tau_crit_exact".into(), tau_crit_exact(n, None).ok().into()));
    table.summary.push(("tau_s".into(), tau_s(n).into()));
    let plot = PlotSpec {
        x: "tau",
        y: vec!["correlator_exact", "correlator_gaussian", "revival_prediction"],
        log_y: true,
        hlines: vec![(2f64.powi(-(n as i32)), "2^-N".into())],
    };
    Ok((table, plot))
}

/// Where the lattice trajectory is sampled.
pub enum TimeAxis {
    /// Effective OAT times; `t = tau / chi`.
    Tau(Grid),
    /// Raw times.
    Time(Grid),
}

pub struct LatticeRun<'a> {
    pub params: BHParams,
    pub krylov: KrylovConfig,
    pub max_dt: Option<f64>,
    pub axis: TimeAxis,
    pub checkpoint_every: Option<usize>,
    pub checkpoint_path: Option<PathBuf>,
    pub resume: Option<&'a Path>,
}

fn advance(prop: &Propagator, sys: &LatticeSystem, state: LatticeState, interval: f64, max_dt: Option<f64>) -> Result<LatticeState> {
    if interval == 0.0 {
        return Ok(state);
    }
    let pieces = max_dt.map_or(1, |d| (interval / d).ceil().max(1.0) as usize);
    let h = interval / pieces as f64;
    let mut amps = state.into_amplitudes();
    for _ in 0..pieces {
        amps = prop.advance(sys.hamiltonian(), &amps, h)?;
    }
    Ok(LatticeState::new(sys.basis().clone(), amps)?)
}

pub fn lattice(run: LatticeRun<'_>) -> Result<(Table, PlotSpec)> {
    let n = run.params.n_atoms;
    let chi = run.params.effective_chi();
    let times: Vec<f64> = match &run.axis {
        TimeAxis::Tau(g) => {
            if chi == 0.0 {
                bail!(crate::UsageError(
                    "effective twisting rate is zero; give a raw time grid with --t-start/--t-stop/--t-points".into()
                ));
            }
            g.values().iter().map(|tau| tau / chi).collect()
        }
        TimeAxis::Time(g) => g.values().to_vec(),
    };
    let sys = LatticeSystem::new(run.params).context("building the lattice system")?;
    let prop = Propagator::new(run.krylov);

    let (first, mut state) = match run.resume {
        Some(path) => {
            let cp = Checkpoint::load(path).with_context(|| format!("loading checkpoint {}", path.display()))?;
            let step = cp.step as usize;
            if step >= times.len() || times[step] != cp.time {
                bail!(crate::UsageError(format!(
                    "checkpoint at step {} (t = {}) does not lie on the requested grid",
                    cp.step, cp.time
                )));
            }
            (step, cp.restore(&sys)?)
        }
        None => {
            let init = sys.prepare_initial(run.krylov).context("preparing the initial state")?;
            (0, advance(&prop, &sys, init, times[0], run.max_dt)?)
        }
    };

    let mut table = Table::new(
        "lattice",
        vec![
            "t",
            "tau_eff",
            "correlator_lattice",
            "correlator_oat",
            "xi2_lattice",
            "xi2_oat",
            "bell_depth",
            "entanglement_depth",
            "energy",
            "norm",
        ],
    )
    .meta("n", n)
    .meta("m", run.params.n_sites)
    .meta("boundary", run.params.boundary)
    .meta("j", format!("{:e}", run.params.j_hop))
    .meta("u", format!("{:e}", run.params.u_aa))
    .meta("uab", format!("{:e}", run.params.u_ab))
    .meta("dim", sys.dim());
    if let Some(v0) = run.params.v0 {
        table = table.meta("v0", v0);
    }

    for i in first..times.len() {
        if i > first {
            state = advance(&prop, &sys, state, times[i] - times[i - 1], run.max_dt)
                .with_context(|| format!("propagating to t = {}", times[i]))?;
        }
        let tau = times[i] * chi;
        let e = sys.bell_correlator(&state, run.krylov)?;
        let report = BellReport::classify(e.min(0.25), n)?;
        let oat_ref = if n.is_multiple_of(2) { bell_ln_correlator_oat(n, tau).ok().map(f64::exp) } else { None };
        table.rows.push(vec![
            times[i].into(),
            tau.into(),
            e.into(),
            oat_ref.into(),
            xi2_cell(sys.spin_summary(&state).squeezing_xi2()),
            if n.is_multiple_of(2) { oat_xi2(n, tau) } else { Cell::Empty },
            report.bell_depth.into(),
            report.entanglement_depth.into(),
            sys.energy(&state).into(),
            state.norm_sqr().sqrt().into(),
        ]);
        if let (Some(every), Some(path)) = (run.checkpoint_every, &run.checkpoint_path) {
            if every > 0 && (i + 1) % every == 0 {
                Checkpoint::capture(&sys, &state, i as u64, times[i])
                    .save(path)
                    .with_context(|| format!("writing checkpoint {}", path.display()))?;
            }
        }
    }
    table.summary.push(("chi".into(), chi.into()));
    let plot = PlotSpec {
        x: "tau_eff",
        y: vec!["correlator_lattice", "correlator_oat"],
        log_y: true,
        hlines: vec![(2f64.powi(-(n as i32)), "2^-N".into())],
    };
    Ok((table, plot))
}

pub fn compare(params: BHParams, krylov: KrylovConfig, points: usize) -> Result<(Table, PlotSpec)> {
    if points < 3 {
        bail!(crate::UsageError(format!("compare needs at least 3 tau points, got {points}")));
    }
    let n = params.n_atoms;
    if !n.is_multiple_of(2) {
        bail!(crate::UsageError("compare needs an even number of atoms".into()));
    }
    let sys = LatticeSystem::new(params)?;
    let r = CrossModelReport::run(&sys, points - 1, krylov).map_err(|e| match e {
        oatbell::Error::InvalidArgument(m) => anyhow::Error::new(crate::UsageError(m)),
        other => other.into(),
    })?;
    let mut table = Table::new(
        "compare",
        vec!["t", "tau", "correlator_lattice", "correlator_oat", "xi2_lattice", "xi2_oat"],
    )
    .meta("n", n)
    .meta("m", params.n_sites)
    .meta("boundary", params.boundary);
    for s in &r.samples {
        let xi = |x: f64| if x.is_finite() { Cell::Float(x) } else { Cell::Empty };
        table.rows.push(vec![
            s.t.into(),
            s.tau.into(),
            s.lattice.into(),
            s.oat.into(),
            xi(s.lattice_xi2),
            xi(s.oat_xi2),
        ]);
    }
    table.summary.extend([
        ("chi".to_string(), r.chi.into()),
        ("threshold".to_string(), r.threshold.into()),
        ("lattice_crossing_tau".to_string(), r.lattice_crossing.into()),
        ("oat_crossing_tau".to_string(), r.oat_crossing.into()),
        ("crossing_rel_error".to_string(), r.crossing_rel_error().into()),
        ("lattice_at_half_pi".to_string(), r.lattice_at_half_pi.into()),
        ("oat_at_half_pi".to_string(), r.oat_at_half_pi.into()),
        ("half_pi_rel_error".to_string(), r.half_pi_rel_error().into()),
    ]);
    let plot = PlotSpec {
        x: "tau",
        y: vec!["correlator_lattice", "correlator_oat"],
        log_y: true,
        hlines: vec![(r.threshold, "2^-N".into()), (0.25, "1/4".into())],
    };
    Ok((table, plot))
}

pub fn classify(e: f64, n: usize) -> Result<(Table, BellReport)> {
    let report = BellReport::classify(e, n)?;
    let mut table = Table::new(
        "classify",
        vec![
            "correlator",
            "lhv_bound",
            "separable_bound",
            "bell_depth",
            "bell_depth_bound",
            "entanglement_depth",
            "entanglement_depth_bound",
        ],
    )
    .meta("n", n);
    table.rows.push(vec![
        e.into(),
        report.lhv_bound.into(),
        report.separable_bound.into(),
        report.bell_depth.into(),
        bell_depth_bound(&report).into(),
        report.entanglement_depth.into(),
        entanglement_depth_bound(&report).into(),
    ]);
    Ok((table, report))
}

fn bell_depth_bound(r: &BellReport) -> Option<f64> {
    (r.bell_depth >= 3).then(|| 2f64.powi(r.bell_depth as i32 - r.n_particles as i32 - 3))
}

fn entanglement_depth_bound(r: &BellReport) -> Option<f64> {
    (r.entanglement_depth >= 2).then(|| 4f64.powi(r.entanglement_depth as i32 - r.n_particles as i32) / 16.0)
}

fn show(x: f64) -> String {
    if x == 0.0 {
        "below double range".into()
    } else {
        format!("{x:e}")
    }
}

pub fn write_classify_text<W: Write>(mut w: W, r: &BellReport) -> Result<()> {
    let n = r.n_particles;
    let yes = |b: bool| if b { "yes" } else { "no" };
    writeln!(w, "correlator E = {:e}, N = {n}", r.correlator)?;
    writeln!(
        w,
        "LHV bound          2^-N = 2^{} = {}; E > bound: {} ({})",
        r.log2_lhv_bound,
        show(r.lhv_bound),
        yes(r.violates_local_realism()),
        if r.violates_local_realism() { "Bell correlated" } else { "no Bell correlation certified" }
    )?;
    writeln!(
        w,
        "separable bound    4^-N = 2^{} = {}; E > bound: {} ({})",
        r.log2_separable_bound,
        show(r.separable_bound),
        yes(r.is_entangled()),
        if r.is_entangled() { "entangled" } else { "no entanglement certified" }
    )?;
    match bell_depth_bound(r) {
        Some(b) => writeln!(
            w,
            "Bell depth         {} (E > 2^-(N-k)/8 = {} at k = {})",
            r.bell_depth,
            show(b),
            r.bell_depth
        )?,
        None => writeln!(w, "Bell depth         0 (E <= 2^-N)")?,
    }
    match entanglement_depth_bound(r) {
        Some(b) => writeln!(
            w,
            "entanglement depth {} (E > 4^-(N-k)/16 = {} at k = {})",
            r.entanglement_depth,
            show(b),
            r.entanglement_depth
        )?,
        None => writeln!(w, "entanglement depth 1 (E <= 4^-N)")?,
    }
    if r.bell_depth == n && n > 0 {
        writeln!(w, "Bell depth = N: all {n} qubits are Bell correlated (E > 1/8)")?;
    }
    Ok(())
}

pub struct LhvOutcome {
    pub table: Table,
    pub text: String,
    pub matches_bound: bool,
}

pub fn lhv(n: usize) -> Result<LhvOutcome> {
    let m = lhv_max_bruteforce(n)?;
    let bound = 2f64.powi(-(n as i32));
    let matches_bound = m.maximum == bound;
    let mut table = Table::new("lhv", vec!["n", "maximum", "bound", "attained_by", "strategies"]).meta("n", n);
    table.rows.push(vec![
        n.into(),
        m.maximum.into(),
        bound.into(),
        (m.attained_by as usize).into(),
        (m.strategies as usize).into(),
    ]);
    let text = format!(
        "N = {n}: maximum over {} deterministic local strategies = {:e} (log2 = {})\n\
         bound 2^-N = {:e}; equal: {}\nattained by {} strategies\n",
        m.strategies,
        m.maximum,
        m.maximum.ln() / LN_2,
        bound,
        if matches_bound { "yes" } else { "NO" },
        m.attained_by
    );
    Ok(LhvOutcome { table, text, matches_bound })
}
