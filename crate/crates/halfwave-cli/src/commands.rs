use crate::{BuildKind, CliError};
use halfwave::flow::{conservation_report, trajectory};
use halfwave::hardy_ops::{build_h1, lax_spectrum};
use halfwave::io::{convergence_csv, map_from_json, map_to_json, resolution_to_json, trajectory_csv, JsonMap};
use halfwave::linalg::{c, loglog_slope};
use halfwave::poly::Poly;
use halfwave::random::{random_map, rng};
use halfwave::rational_maps::{from_stereographic, validate, validation_grid, GrassmannTarget, RationalMap};
use halfwave::solitons::{multi_soliton_with, resolution_error, resolve as resolve_map, single_soliton, ADMISSION_FACTOR};
use halfwave::DEFAULT_TOL;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

type Result<T> = std::result::Result<T, CliError>;

pub fn load(path: &Path) -> Result<RationalMap> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(map_from_json(&text)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => crate::print_out(text),
    }
    Ok(())
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

pub fn build_map(kind: &BuildKind) -> Result<RationalMap> {
    let map = match kind {
        BuildKind::Constant { d, k } => RationalMap::constant(GrassmannTarget::standard(*d, *k)?),
        BuildKind::Single { v, y, delta } => single_soliton(*v, *y, *delta)?.profile,
        BuildKind::Multi { v, y, admission } => {
            let zs: Vec<_> = y.iter().map(|&y| c(y, -1.0)).collect();
            let m = multi_soliton_with(v, &zs, admission.unwrap_or(ADMISSION_FACTOR))?;
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            m.map
        }
        BuildKind::Stereographic { p, q } => from_stereographic(&Poly::from_real(p), &Poly::from_real(q))?.0.map,
        BuildKind::Random { seed, d, n } => random_map(&mut rng(*seed), *d, *n)?,
    };
    let rep = validate(&map, DEFAULT_TOL);
    if !rep.pass {
        return Err(CliError::Validation(serde_json::to_value(&rep).unwrap()));
    }
    Ok(map)
}

pub fn build(kind: &BuildKind, out: Option<&Path>) -> Result<()> {
    emit(&map_to_json(&build_map(kind)?), out)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Io(format!("grid must be lo:hi:n, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n < 2 || !(hi > lo) {
        return Err(bad());
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

#[derive(Serialize)]
struct SnapshotOut {
    t: f64,
    fallback: bool,
    cond: f64,
    map: JsonMap,
}

pub fn evolve(path: &Path, times: &[f64], grid: Option<&str>, out_dir: &Path) -> Result<()> {
    let map = load(path)?;
    let rep = validate(&map, DEFAULT_TOL);
    if !rep.pass {
        return Err(CliError::Validation(serde_json::to_value(&rep).unwrap()));
    }
    let grid = match grid {
        Some(g) => parse_grid(g)?,
        None => validation_grid(&map.poles()),
    };
    let traj = trajectory(&map, times)?;
    let snaps: Vec<SnapshotOut> = traj
        .snapshots
        .iter()
        .map(|s| SnapshotOut { t: s.t, fallback: s.fallback, cond: s.cond, map: JsonMap::from(&s.map) })
        .collect();
    let diag = serde_json::json!({
        "diagnostics": traj.diagnostics,
        "drift": conservation_report(&traj)?,
    });
    write(out_dir, "snapshots.json", &serde_json::to_string_pretty(&snaps).unwrap())?;
    write(out_dir, "samples.csv", &trajectory_csv(&traj, &grid))?;
    write(out_dir, "diagnostics.json", &serde_json::to_string_pretty(&diag).unwrap())?;
    Ok(())
}

pub fn spectrum(path: &Path, out: Option<&Path>) -> Result<()> {
    let rep = lax_spectrum(&build_h1(&load(path)?))?;
    emit(&serde_json::to_string_pretty(&rep).unwrap(), out)
}

pub fn resolve(path: &Path, t_list: &[f64], s_list: &[f64], out_dir: &Path) -> Result<()> {
    let basis = build_h1(&load(path)?);
    let mut rep = resolve_map(&basis)?;
    for &t in t_list {
        rep.convergence.push(resolution_error(&basis, &rep, t, s_list)?);
    }
    let rows: Vec<_> = rep.convergence.iter().filter(|r| r.t > 0.0 && r.sup > 0.0).collect();
    let slope = (rows.len() >= 2).then(|| {
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let mut out = BTreeMap::new();
        out.insert("sup".to_string(), loglog_slope(&ts, &rows.iter().map(|r| r.sup).collect::<Vec<_>>()));
        for key in rows[0].hs.keys() {
            let ys: Vec<f64> = rows.iter().map(|r| r.hs[key]).collect();
            out.insert(format!("H{key}"), loglog_slope(&ts, &ys));
        }
        out
    });
    let json = resolution_to_json(&rep, slope);
    write(out_dir, "resolution.json", &serde_json::to_string_pretty(&json).unwrap())?;
    write(out_dir, "convergence.csv", &convergence_csv(&rep))?;
    Ok(())
}
