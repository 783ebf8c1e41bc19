//! JSON and CSV artifacts. Complex numbers are `{"re", "im"}` objects and
//! matrices are row-major arrays of rows.

use crate::flow::Trajectory;
use crate::linalg::c;
use crate::rational_maps::{pauli_decode, GrassmannTarget, RationalMap, SphereMap};
use crate::solitons::ResolutionReport;
use crate::{CMat, HwmError, Result, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        c(z.re, z.im)
    }
}

pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| m[(r, k)].into()).collect()).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, d: usize) -> Result<CMat> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(HwmError::InvalidInput(format!("expected a {d}x{d} matrix")));
    }
    Ok(CMat::from_fn(d, d, |r, k| rows[r][k].into()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonPole {
    pub z: JsonComplex,
    #[serde(rename = "A")]
    pub a: JsonMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JsonMap {
    pub d: usize,
    pub k: usize,
    #[serde(rename = "U_inf")]
    pub u_inf: JsonMatrix,
    pub poles: Vec<JsonPole>,
}

impl From<&RationalMap> for JsonMap {
    fn from(map: &RationalMap) -> Self {
        JsonMap {
            d: map.d(),
            k: map.target.k,
            u_inf: matrix_to_json(&map.target.u_inf),
            poles: map
                .residues
                .iter()
                .map(|r| JsonPole { z: r.z.into(), a: matrix_to_json(&r.a) })
                .collect(),
        }
    }
}

impl TryFrom<&JsonMap> for RationalMap {
    type Error = HwmError;

    fn try_from(j: &JsonMap) -> Result<Self> {
        let target = GrassmannTarget::new(matrix_from_json(&j.u_inf, j.d)?)?;
        if target.k != j.k {
            return Err(HwmError::InvalidInput(format!(
                "declared k = {} but U_inf has {} eigenvalues equal to -1",
                j.k, target.k
            )));
        }
        let poles = j
            .poles
            .iter()
            .map(|p| Ok((p.z.into(), matrix_from_json(&p.a, j.d)?)))
            .collect::<Result<Vec<_>>>()?;
        RationalMap::from_poles(target, poles)
    }
}

pub fn map_to_json(map: &RationalMap) -> String {
    serde_json::to_string_pretty(&JsonMap::from(map)).expect("map serializes")
}

pub fn map_from_json(s: &str) -> Result<RationalMap> {
    let j: JsonMap = serde_json::from_str(s)?;
    RationalMap::try_from(&j)
}

#[derive(Clone, Debug, Serialize)]
pub struct JsonSoliton {
    pub v: f64,
    pub y: f64,
    pub delta: f64,
    #[serde(rename = "A")]
    pub a: JsonMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct JsonConvergence {
    pub t: f64,
    pub sup: f64,
    #[serde(rename = "Hs")]
    pub hs: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct JsonResolution {
    pub solitons: Vec<JsonSoliton>,
    pub w: Vec<JsonComplex>,
    pub iplus_defect: Vec<f64>,
    pub convergence: Vec<JsonConvergence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<BTreeMap<String, f64>>,
}

pub fn resolution_to_json(rep: &ResolutionReport, slope: Option<BTreeMap<String, f64>>) -> JsonResolution {
    JsonResolution {
        solitons: rep
            .solitons
            .iter()
            .map(|s| JsonSoliton { v: s.v, y: s.y, delta: s.delta, a: matrix_to_json(&s.a) })
            .collect(),
        w: rep.w.iter().map(|&w| w.into()).collect(),
        iplus_defect: rep.iplus_defect.clone(),
        convergence: rep
            .convergence
            .iter()
            .map(|r| JsonConvergence { t: r.t, sup: r.sup, hs: r.hs.clone() })
            .collect(),
        slope,
    }
}

/// `true` for maps into `Gr_1(C^2)` with traceless `U_inf`, i.e. Pauli-encoded sphere maps.
pub fn is_sphere(map: &RationalMap) -> bool {
    map.d() == 2 && map.target.k == 1
}

/// Grid samples of every snapshot: `t, x`, then `u<r><c>_re, u<r><c>_im`
/// row-major, then `u1, u2, u3` for sphere maps.
pub fn trajectory_csv(traj: &Trajectory, grid: &[f64]) -> String {
    let d = traj.initial.d();
    let sphere = is_sphere(&traj.initial);
    let mut out = String::from("t,x");
    for r in 0..d {
        for k in 0..d {
            write!(out, ",u{r}{k}_re,u{r}{k}_im").unwrap();
        }
    }
    if sphere {
        out.push_str(",u1,u2,u3");
    }
    out.push('\n');
    for snap in &traj.snapshots {
        let comps = if sphere { SphereMap::new(snap.map.clone()).ok().map(|s| pauli_decode(&s)) } else { None };
        for &x in grid {
            let u = snap.map.eval(x);
            write!(out, "{},{}", snap.t, x).unwrap();
            for r in 0..d {
                for k in 0..d {
                    write!(out, ",{},{}", u[(r, k)].re, u[(r, k)].im).unwrap();
                }
            }
            if let Some(sc) = &comps {
                let v = sc.eval(x);
                write!(out, ",{},{},{}", v[0], v[1], v[2]).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn convergence_csv(rep: &ResolutionReport) -> String {
    let keys: Vec<String> = rep.convergence.first().map(|r| r.hs.keys().cloned().collect()).unwrap_or_default();
    let mut out = String::from("t,sup");
    for k in &keys {
        write!(out, ",H{k}").unwrap();
    }
    out.push('\n');
    for r in &rep.convergence {
        write!(out, "{},{}", r.t, r.sup).unwrap();
        for k in &keys {
            write!(out, ",{}", r.hs[k]).unwrap();
        }
        out.push('\n');
    }
    out
}
