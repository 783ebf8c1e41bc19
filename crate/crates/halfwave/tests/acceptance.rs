//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are still run and reported as FAIL, but
//! do not make the process exit nonzero unless `HALFWAVE_ACCEPTANCE_STRICT` is
//! set. Any other failure always exits nonzero.

use halfwave::flow::{conservation_report, evolve, flow_matrix, pde_residual_order, time_reversal_defect, trajectory};
use halfwave::hardy_ops::{build_h1, commutator_defect, iplus};
use halfwave::linalg::{c, eig_general, frob, loglog_slope};
use halfwave::oracles::{cayley_toeplitz, quadrature_seminorm, CayleyConfig};
use halfwave::random::{random_map, random_stereographic_pair, random_valid_map, rng};
use halfwave::rational_maps::{energy, from_stereographic, sobolev_seminorm, validation_grid};
use halfwave::solitons::{
    admission_separation, check_solitary, multi_soliton, resolution_error, resolve, scattering_defect, single_soliton,
    ADMISSION_FACTOR,
};
use halfwave::{CVec, Result};
use rand::Rng;
use std::f64::consts::PI;
use std::time::Instant;

const KNOWN_FAILURES: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn traveling_waves() -> Result<Outcome> {
    let start = Instant::now();
    let (mut pole, mut res, mut sup) = (0.0f64, 0.0f64, 0.0f64);
    for v in [0.0, 0.5, -0.5, 0.9] {
        let s = single_soliton(v, 0.7, 1.0)?;
        let b = build_h1(&s.profile);
        for t in [-100.0, -10.0, 10.0, 100.0] {
            let got = evolve(&b, t)?.map;
            let want = s.profile.translate(v * t);
            pole = pole.max((got.residues[0].z - want.residues[0].z).norm());
            res = res.max(frob(&(&got.residues[0].a - &want.residues[0].a)));
            for x in validation_grid(&want.poles()) {
                sup = sup.max(frob(&(got.eval(x) - want.eval(x))));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pole <= 1e-10 && res <= 1e-10 && sup <= 1e-9 && secs < 1.0,
        format!("pole {pole:.1e}, residue {res:.1e}, sup {sup:.1e}, {secs:.2}s"),
    )
}

fn ground_state_energy() -> Result<Outcome> {
    let (mut closed, mut quad) = (0.0f64, 0.0f64);
    for k in 0..10 {
        let v = -0.9 + 0.2 * k as f64;
        let s = single_soliton(v, 0.0, 1.0)?;
        let e = energy(&s.profile);
        closed = closed.max((e - (1.0 - v * v) * PI).abs());
        let q = quadrature_seminorm(&s.profile.expansion(), 0.5)?.value;
        quad = quad.max((q * q / 2.0 - e).abs() / e);
    }
    outcome(closed <= 1e-8 && quad <= 1e-6, format!("closed form {closed:.1e}, quadrature rel {quad:.1e}"))
}

fn three_soliton() -> Result<halfwave::solitons::MultiSoliton> {
    multi_soliton(&[-0.6, 0.1, 0.7], &[c(-1000.0, -1.0), c(0.0, -1.0), c(1000.0, -1.0)])
}

fn lax_conservation() -> Result<Outcome> {
    let start = Instant::now();
    let m = three_soliton()?;
    let traj = trajectory(&m.map, &[1.0, 10.0, 100.0, 1000.0])?;
    let mut worst = [0.0f64; 3];
    for row in conservation_report(&traj)? {
        worst[0] = worst[0].max(row.spectrum);
        worst[1] = worst[1].max(row.i2.max(row.i4));
    }
    for d in &traj.diagnostics {
        worst[2] = worst[2].max(d.constraint_residual);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst.iter().all(|w| *w <= 1e-8) && secs < 30.0,
        format!("spectrum {:.1e}, I2/I4 {:.1e}, constraint {:.1e}, {secs:.2}s", worst[0], worst[1], worst[2]),
    )
}

fn pde_consistency() -> Result<Outcome> {
    let m = multi_soliton(&[-0.4, 0.6], &[c(-50.0, -1.0), c(50.0, -1.0)])?;
    let b = build_h1(&m.map);
    let (res, order) = pde_residual_order(&b, 1.0, &[1e-2, 1e-3, 1e-4], &validation_grid(&m.map.poles()))?;
    outcome(order >= 1.9, format!("order {order:.3}, residuals {:?}", res.iter().map(|v| format!("{v:.1e}")).collect::<Vec<_>>()))
}

fn no_real_eigenvalues() -> Result<Outcome> {
    let mut r = rng(5);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100 {
        let m = random_valid_map(&mut r, 2 + k % 2, 4)?;
        let b = build_h1(&m);
        for _ in 0..50 {
            let t: f64 = r.gen_range(-1e3..1e3);
            let (ev, _) = eig_general(&flow_matrix(&b, t))?;
            worst = ev.iter().map(|z| z.im).fold(worst, f64::max);
        }
    }
    outcome(worst <= -1e-10, format!("max Im {worst:.2e} over 5000 pencils"))
}

fn resolution_rate() -> Result<Outcome> {
    let start = Instant::now();
    let vs = [-0.5, 0.5];
    let m = multi_soliton(&vs, &[c(-500.0, -1.0), c(500.0, -1.0)])?;
    let b = build_h1(&m.map);
    let rep = resolve(&b)?;
    let ts = [1e2, 1e3, 1e4];
    let rows = ts.iter().map(|&t| resolution_error(&b, &rep, t, &[0.5])).collect::<Result<Vec<_>>>()?;
    let sup: Vec<f64> = rows.iter().map(|r| r.sup).collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.hs["0.5"]).collect();
    let (s_sup, s_hs) = (loglog_slope(&ts, &sup), loglog_slope(&ts, &hs));
    let iplus_defect = rep.iplus_defect.iter().copied().fold(0.0, f64::max);
    let solitary = rep
        .solitons
        .iter()
        .map(|s| check_solitary(&s.profile, s.v, &validation_grid(&s.profile.poles())))
        .fold(0.0, f64::max);

    // same construction at the closest admissible separation
    let sep = admission_separation(&vs, ADMISSION_FACTOR);
    let close = multi_soliton(&vs, &[c(-sep / 2.0, -1.0), c(sep / 2.0, -1.0)])?;
    let cb = build_h1(&close.map);
    let crep = resolve(&cb)?;
    let csup = ts
        .iter()
        .map(|&t| resolution_error(&cb, &crep, t, &[0.5]).map(|r| r.sup))
        .collect::<Result<Vec<_>>>()?;
    let t0 = (crep.solitons[1].y - crep.solitons[0].y) / (crep.solitons[1].v - crep.solitons[0].v);
    let shifted: Vec<f64> = ts.iter().map(|t| t + t0).collect();

    let secs = start.elapsed().as_secs_f64();
    let pass = (s_sup + 1.0).abs() <= 0.1
        && (s_hs + 1.0).abs() <= 0.1
        && iplus_defect <= 1e-10
        && solitary <= 1e-8
        && secs < 60.0;
    outcome(
        pass,
        format!(
            "slope sup {s_sup:.3}, H^1/2 {s_hs:.3} at separation 1000; separation {sep:.1}: slope {:.3}, \
             ratio e(1e3)/e(1e4) {:.2}, slope in t+t0 {:.3}; I+ defect {iplus_defect:.1e}, solitary {solitary:.1e}, {secs:.1}s",
            loglog_slope(&ts, &csup),
            csup[1] / csup[2],
            loglog_slope(&shifted, &csup),
        ),
    )
}

fn scattering_and_reversal() -> Result<Outcome> {
    let vs = [-0.5, 0.5];
    let sep = 70.0;
    let m = multi_soliton(&vs, &[c(-sep / 2.0, -1.0), c(sep / 2.0, -1.0)])?;
    let b = build_h1(&m.map);
    let rep = resolve(&b)?;
    let d3 = scattering_defect(&b, &rep, 1e3)?;
    let d4 = scattering_defect(&b, &rep, 1e4)?;
    let mut r = rng(7);
    let mut rev = 0.0f64;
    for _ in 0..5 {
        let g = random_map(&mut r, 2, 3)?;
        for t in [0.5, 10.0, 100.0] {
            rev = rev.max(time_reversal_defect(&g, t, &validation_grid(&g.poles()))?);
        }
    }
    let ratio = d3 / d4;
    outcome(
        d4 <= 1e-3 && (5.0..=20.0).contains(&ratio) && rev <= 1e-9,
        format!("profiles at +-1e4 differ by {d4:.1e}, ratio to 1e3 {ratio:.2}, reversal {rev:.1e}"),
    )
}

fn stereographic_rank() -> Result<Outcome> {
    let mut r = rng(8);
    let mut bad = vec![];
    for k in 0..20 {
        let n = 1 + k % 4;
        let (p, q) = random_stereographic_pair(&mut r, n)?;
        let (sphere, _) = from_stereographic(&p, &q)?;
        let rank = build_h1(&sphere.map).n;
        let cay = cayley_toeplitz(&sphere.map, &CayleyConfig::new(64))?;
        if rank != p.degree() || cay.rank != rank || cay.interior_eigenvalues.len() != rank {
            bad.push((k, p.degree(), rank, cay.rank));
        }
    }
    outcome(bad.is_empty(), format!("20 pairs, mismatches {bad:?}"))
}

fn algebraic_identities() -> Result<Outcome> {
    let mut r = rng(9);
    let (mut comm, mut gi) = (0.0f64, 0.0f64);
    for k in 0..30 {
        let m = random_map(&mut r, 2 + k % 3, 1 + k % 4)?;
        let b = build_h1(&m);
        let scale = b.t.iter().map(|v| v.norm()).fold(1.0, f64::max);
        comm = comm.max(commutator_defect(&b) / scale);
        for _ in 0..5 {
            let a = CVec::from_fn(b.n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
            let a = &a / c(b.g_norm(&a), 0.0);
            let lhs = b.g_inner(&(&b.zmat * &a), &a).im;
            let rhs = -iplus(&b, &a).norm_squared() / (4.0 * PI);
            gi = gi.max((lhs - rhs).abs());
        }
    }
    outcome(comm <= 1e-13 && gi <= 1e-10, format!("commutator {comm:.1e}, imaginary-part identity {gi:.1e}"))
}

fn non_turbulence() -> Result<Outcome> {
    let m = three_soliton()?;
    let b = build_h1(&m.map);
    let s_list = [0.5, 1.0, 2.0];
    let norms = |t: f64| -> Result<Vec<f64>> {
        let snap = evolve(&b, t)?.map;
        s_list.iter().map(|&s| sobolev_seminorm(&snap.expansion(), s)).collect()
    };
    let mut early = vec![0.0f64; 3];
    for k in 0..=20 {
        for (e, v) in early.iter_mut().zip(norms(0.5 * k as f64)?) {
            *e = e.max(v);
        }
    }
    let mut late = vec![0.0f64; 3];
    for k in 0..=400 {
        for (e, v) in late.iter_mut().zip(norms(25.0 * k as f64)?) {
            *e = e.max(v);
        }
    }
    let ratios: Vec<f64> = late.iter().zip(&early).map(|(l, e)| l / e).collect();
    outcome(ratios.iter().all(|r| *r <= 1.1), format!("sup ratio over [0,1e4] vs [0,10] for s=0.5,1,2: {:?}", ratios.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("traveling-wave exactness", traveling_waves),
        ("ground-state energy", ground_state_energy),
        ("Lax conservation", lax_conservation),
        ("PDE residual order", pde_consistency),
        ("no real eigenvalues", no_real_eigenvalues),
        ("soliton resolution rate", resolution_rate),
        ("scattering and time reversal", scattering_and_reversal),
        ("stereographic rank", stereographic_rank),
        ("algebraic identities", algebraic_identities),
        ("non-turbulence", non_turbulence),
    ];
    let strict = std::env::var_os("HALFWAVE_ACCEPTANCE_STRICT").is_some();
    let mut unexpected = 0;
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        let o = run().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let known = if !o.pass && KNOWN_FAILURES.contains(&id) { " (known)" } else { "" };
        println!("criterion {id:>2} {tag}{known}  {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
            if strict || !KNOWN_FAILURES.contains(&id) {
                unexpected += 1;
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if unexpected > 0 {
        std::process::exit(1);
    }
}
