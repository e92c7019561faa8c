//! Experiment commands behind the `drainage` binary. Each command turns a
//! [`RunConfig`] into a [`Table`]; the payload depends only on the config.

pub mod config;
pub mod output;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::process::Command as Process;

pub use config::{Format, RunConfig, TreeMode};
pub use output::{Cell, Table};

use crate::analytic;
use crate::env::{LatticePoint, Model};
use crate::error::{Error, Result};
use crate::replicate;
use crate::stats::collision::{coalescence_survival, triple_point};
use crate::stats::fit::log_grid;
use crate::stats::scaling::{estimate_scaling, eta_estimate, rescaled_endpoint_sample, ScalingParams};
use crate::stats::summary::{ks_standard_normal, Moments};
use crate::treescan::{component_count, pair_survival, BoxSpec, StartSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Trace,
    Regen,
    Coalesce,
    Triple,
    Scaling,
    Eta,
    Treescan,
    Exact,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Regen => "regen",
            Command::Coalesce => "coalesce",
            Command::Triple => "triple",
            Command::Scaling => "scaling",
            Command::Eta => "eta",
            Command::Treescan => "treescan",
            Command::Exact => "exact",
        }
    }
}

fn need_d2(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.d == 2 {
        Ok(())
    } else {
        Err(Error::invalid("d", format!("{what} needs d = 2")))
    }
}

pub fn cmd_trace(cfg: &RunConfig) -> Result<Table> {
    let m = Model::new(cfg.params()?);
    let path = m.trace(&LatticePoint::origin(cfg.d), cfg.height)?;
    let mut cols: Vec<String> = vec!["step".into()];
    cols.extend((1..cfg.d).map(|i| format!("c{i}")));
    cols.extend(["level".into(), "x_inc".into(), "y_inc".into()]);
    let mut t = Table { columns: cols, rows: Vec::new() };
    for (k, v) in path.vertices.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(v.spatial().iter().map(|&c| Cell::Int(c)));
        row.push(v.level().into());
        if k == 0 {
            row.extend([Cell::Empty, Cell::Empty]);
        } else {
            let prev = &path.vertices[k - 1];
            row.push((v.coords()[0] - prev.coords()[0]).into());
            row.push((v.level() - prev.level()).into());
        }
        t.push(row);
    }
    Ok(t)
}

pub fn cmd_regen(cfg: &RunConfig) -> Result<Table> {
    let params = cfg.params()?;
    let mut b = LatticePoint::origin(cfg.d);
    b.coords_mut()[0] = cfg.start_gap;
    let starts = [LatticePoint::origin(cfg.d), b];
    let runs = replicate::try_map(cfg.n_replicates, |i| {
        Model::new(params.replicate(i)).run_regenerations(&starts, cfg.renewals)
    })?;
    let mut cols: Vec<String> = ["replicate", "l", "tau", "sigma", "t"].iter().map(|s| s.to_string()).collect();
    cols.extend((1..cfg.d).map(|i| format!("z{i}")));
    let mut t = Table { columns: cols, rows: Vec::new() };
    for (i, run) in runs.iter().enumerate() {
        for r in run {
            let mut row: Vec<Cell> = vec![i.into(), r.l.into(), r.tau.into(), r.sigma.into(), r.t.into()];
            row.extend(r.z().iter().map(|&c| Cell::Int(c)));
            t.push(row);
        }
    }
    Ok(t)
}

pub fn cmd_coalesce(cfg: &RunConfig) -> Result<Table> {
    need_d2(cfg, "coalesce")?;
    let params = cfg.params()?;
    let hi = cfg.t_max.min(cfg.t_cap);
    let grid = log_grid(cfg.t_min as f64, hi as f64, cfg.t_points);
    let mut t = Table::new(&["x", "t", "n", "survivors", "censored", "survival", "ci_lo", "ci_hi"]);
    for &x in &cfg.x {
        let c = coalescence_survival(&params, x, cfg.n_replicates, cfg.t_cap, &grid)?;
        for p in &c.points {
            let s = p.survival;
            t.push(vec![x.into(), p.t.into(), c.n.into(), s.k.into(), c.censored.into(), s.value.into(), s.lo.into(), s.hi.into()]);
        }
    }
    Ok(t)
}

pub fn cmd_triple(cfg: &RunConfig) -> Result<Table> {
    need_d2(cfg, "triple")?;
    let params = cfg.params()?;
    let mut t = Table::new(&[
        "gap_a", "gap_b", "product", "n", "censored", "nu_mean", "nu_se", "renewals_mean", "renewals_se", "t1_mean",
        "t1_se",
    ]);
    for &(a, b) in &cfg.gaps {
        let p = triple_point(&params, a, b, cfg.n_replicates, cfg.t_cap)?;
        t.push(vec![
            a.into(),
            b.into(),
            p.product.into(),
            p.n.into(),
            p.censored.into(),
            p.nu.value.into(),
            p.nu.se.into(),
            p.renewals.value.into(),
            p.renewals.se.into(),
            p.first_renewal.value.into(),
            p.first_renewal.se.into(),
        ]);
    }
    Ok(t)
}

pub fn cmd_scaling(cfg: &RunConfig) -> Result<Table> {
    let params = cfg.params()?;
    let est = estimate_scaling(&params, cfg.n_replicates)?;
    let exact = |f: fn(f64) -> Result<f64>| -> Result<Cell> {
        if cfg.d == 2 {
            Ok(Cell::Float(f(cfg.p)?))
        } else {
            Ok(Cell::Empty)
        }
    };
    let mut t = Table::new(&["quantity", "estimate", "se", "ci_lo", "ci_hi", "exact", "n"]);
    let sigma_exact = |p: f64| analytic::sigma2_exact(p).map(f64::sqrt);
    for (name, e, x) in [
        ("gamma", est.gamma, exact(analytic::gamma_exact)?),
        ("sigma", est.sigma, exact(sigma_exact)?),
        ("sigma2", est.sigma2, exact(analytic::sigma2_exact)?),
    ] {
        t.push(vec![name.into(), e.value.into(), e.se.into(), e.lo.into(), e.hi.into(), x, e.n.into()]);
    }
    if cfg.n_scale > 0 {
        need_d2(cfg, "endpoint sample")?;
        let s = ScalingParams::exact(cfg.p, cfg.n_scale)?;
        let xs = rescaled_endpoint_sample(&params, &s, cfg.n_replicates, cfg.t)?;
        let m = Moments::from_iter(xs.iter().copied());
        let mean = m.mean_estimate(0.95);
        let var = m.variance_estimate(0.95);
        let (ks, pv) = ks_standard_normal(&xs);
        let n = xs.len();
        t.push(vec!["endpoint_mean".into(), mean.value.into(), mean.se.into(), mean.lo.into(), mean.hi.into(), 0.0.into(), n.into()]);
        t.push(vec!["endpoint_var".into(), var.value.into(), var.se.into(), var.lo.into(), var.hi.into(), cfg.t.into(), n.into()]);
        t.push(vec!["endpoint_ks".into(), ks.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, n.into()]);
        t.push(vec!["endpoint_ks_pvalue".into(), pv.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, n.into()]);
    }
    Ok(t)
}

pub fn cmd_eta(cfg: &RunConfig) -> Result<Table> {
    need_d2(cfg, "eta")?;
    let params = cfg.params()?;
    let n = if cfg.n_scale == 0 { 100 } else { cfg.n_scale };
    let s = ScalingParams::exact(cfg.p, n)?;
    let mut t = Table::new(&["epsilon", "width", "t", "n", "ge2", "ge2_lo", "ge2_hi", "ge3", "ge3_lo", "ge3_hi"]);
    for &eps in &cfg.epsilon {
        let e = eta_estimate(&params, &s, cfg.t, eps, cfg.n_replicates)?;
        t.push(vec![
            eps.into(),
            e.width.into(),
            cfg.t.into(),
            e.n.into(),
            e.prob_ge2.value.into(),
            e.prob_ge2.lo.into(),
            e.prob_ge2.hi.into(),
            e.prob_ge3.value.into(),
            e.prob_ge3.lo.into(),
            e.prob_ge3.hi.into(),
        ]);
    }
    Ok(t)
}

pub fn cmd_treescan(cfg: &RunConfig) -> Result<Table> {
    let params = cfg.params()?;
    match cfg.mode {
        TreeMode::Pairs => {
            let r = pair_survival(&params, cfg.spacing, cfg.height, cfg.n_replicates)?;
            let mut t = Table::new(&["d", "spacing", "height", "n", "survived", "fraction", "ci_lo", "ci_hi", "sign_changes"]);
            let s = r.survival;
            t.push(vec![
                r.d.into(),
                r.spacing.into(),
                r.height.into(),
                s.n.into(),
                s.k.into(),
                s.value.into(),
                s.lo.into(),
                s.hi.into(),
                r.sign_changes.into(),
            ]);
            Ok(t)
        }
        TreeMode::Box => {
            let starts = if cfg.all_open { StartSet::AllOpen } else { StartSet::BaseRow };
            let reports = replicate::try_map(cfg.n_replicates, |i| {
                component_count(&BoxSpec { params: params.replicate(i), half_width: cfg.half_width, height: cfg.height, starts })
            })?;
            let mut t = Table::new(&["replicate", "paths", "components_at_top"]);
            for (i, r) in reports.iter().enumerate() {
                t.push(vec![i.into(), r.paths.into(), r.components_at_top.into()]);
            }
            Ok(t)
        }
    }
}

pub fn cmd_exact(cfg: &RunConfig) -> Result<Table> {
    need_d2(cfg, "exact")?;
    let mut t = Table::new(&["quantity", "m", "value"]);
    for m in 0..=cfg.m_max {
        t.push(vec!["y_tail".into(), (m as i64).into(), analytic::y_tail(cfg.p, m).into()]);
    }
    t.push(vec!["gamma".into(), Cell::Empty, analytic::gamma_exact(cfg.p)?.into()]);
    let s2 = analytic::sigma2_exact(cfg.p)?;
    t.push(vec!["sigma2".into(), Cell::Empty, s2.into()]);
    t.push(vec!["sigma".into(), Cell::Empty, s2.sqrt().into()]);
    Ok(t)
}

/// Runs `cmd` on a pool of `cfg.threads` workers (all cores by default).
pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cfg.threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| Error::invalid("threads", e.to_string()))?;
    pool.install(|| match cmd {
        Command::Trace => cmd_trace(cfg),
        Command::Regen => cmd_regen(cfg),
        Command::Coalesce => cmd_coalesce(cfg),
        Command::Triple => cmd_triple(cfg),
        Command::Scaling => cmd_scaling(cfg),
        Command::Eta => cmd_eta(cfg),
        Command::Treescan => cmd_treescan(cfg),
        Command::Exact => cmd_exact(cfg),
    })
}

/// `git describe` of the working directory, or `unknown`.
pub fn git_describe() -> String {
    Process::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

pub fn metadata(cmd: Command, cfg: &RunConfig, wall_seconds: f64) -> Vec<(String, String)> {
    let mut meta = vec![
        ("program".to_string(), format!("drainage {}", env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), cmd.name().to_string()),
        ("git".to_string(), git_describe()),
        ("wall_time_s".to_string(), format!("{wall_seconds:.3}")),
    ];
    meta.extend(cfg.echo());
    meta
}

/// Writes the document to `path`, refusing to replace an existing file
/// unless `overwrite` is set.
pub fn write_document(path: &Path, doc: &str, overwrite: bool) -> Result<()> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if overwrite {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    let mut f = opts.open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AlreadyExists {
            Error::invalid("out", format!("{} exists; pass --overwrite to replace it", path.display()))
        } else {
            Error::Io(e)
        }
    })?;
    f.write_all(doc.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_table_at_half() {
        let cfg = RunConfig { m_max: 2, ..RunConfig::default() };
        let t = cmd_exact(&cfg).unwrap();
        assert_eq!(t.rows[1][2], Cell::Float(0.125));
        assert_eq!(t.rows.len(), 3 + 3);
    }

    #[test]
    fn refuses_to_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_document(&p, "a\n", false).unwrap();
        let err = write_document(&p, "b\n", false).unwrap_err();
        assert!(err.to_string().contains("invalid out"));
        write_document(&p, "b\n", true).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b\n");
    }
}
