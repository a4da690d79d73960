//! Frame-constant reconstruction.
//!
//! The base pivot K and the actuator base N are not part of the link-length
//! table, so a usable geometry has to be found by search. This module provides
//! the two building blocks: closed-form assembly of the mechanism at full
//! extension (which yields solver seeds) and shifting `l_act` so the stroke
//! stays inside its range over a workspace grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{composite_lengths, wrap_angle, DbAngle, Geometry, Link, MechanismState};
use crate::solver::{solve_grid, SolverSettings};

fn rot(q: f64) -> (f64, f64) {
    (q.cos(), q.sin())
}

struct Assembly {
    lk: (f64, f64),
    l_bk: f64,
    l_bi: f64,
    l_bd: f64,
    l_dj: f64,
    l_bg: f64,
    l_fd: f64,
    l_gf: f64,
    l_ml: f64,
    q1: f64,
    db_on_qb: bool,
}

struct Partial {
    c1: f64,
    c2: f64,
    q_b: f64,
    q_d: f64,
    q_g: f64,
    mismatch: f64,
}

impl Assembly {
    fn new(geom: &Geometry) -> Result<Assembly> {
        let d = composite_lengths(geom)?;
        Ok(Assembly {
            lk: (geom.l_lk * geom.q_lk.cos(), geom.l_lk * geom.q_lk.sin()),
            l_bk: geom.link(Link::KB),
            l_bi: geom.link(Link::BC) + geom.link(Link::CI),
            l_bd: d.l_bd,
            l_dj: geom.link(Link::ED) + geom.link(Link::EJ),
            l_bg: d.l_bh + d.l_hg,
            l_fd: d.l_fd,
            l_gf: geom.link(Link::GF),
            l_ml: geom.l_ml,
            q1: geom.q_o1_ref,
            db_on_qb: geom.db_angle == DbAngle::CorrectedQb,
        })
    }

    /// Loops 2 and 3 in closed form for a given `q_K`, then the fourth loop's
    /// length mismatch `|closing vector| − L_GF`.
    fn at(&self, q_k: f64, b_branch: bool, d_branch: bool) -> Option<Partial> {
        let u = rot(self.q1);
        let n = (-u.1, u.0);
        let dot = |a: (f64, f64), b: (f64, f64)| a.0 * b.0 + a.1 * b.1;
        let ek = rot(q_k);
        let b = (self.lk.0 + self.l_bk * ek.0, self.lk.1 + self.l_bk * ek.1);

        let s = -dot(b, n) / self.l_bi;
        if s.abs() > 1.0 {
            return None;
        }
        let rel = if b_branch { s.asin() } else { PI - s.asin() };
        let q_b = self.q1 + rel;
        let eb = rot(q_b);
        let c1 = -dot((b.0 + self.l_bi * eb.0, b.1 + self.l_bi * eb.1), u);

        let d = (
            b.0 + self.l_bd * eb.0 + self.l_ml * u.0,
            b.1 + self.l_bd * eb.1 + self.l_ml * u.1,
        );
        let s = -dot(d, n) / self.l_dj;
        if s.abs() > 1.0 {
            return None;
        }
        let rel = if d_branch { s.asin() } else { PI - s.asin() };
        let q_d = self.q1 + rel;
        let ed = rot(q_d);
        let c2 = -dot((d.0 + self.l_dj * ed.0, d.1 + self.l_dj * ed.1), u);

        let edb = if self.db_on_qb { eb } else { ek };
        let w = (
            -(self.l_bg * ek.0 + self.l_fd * ed.0 - self.l_bd * edb.0),
            -(self.l_bg * ek.1 + self.l_fd * ed.1 - self.l_bd * edb.1),
        );
        let norm = w.0.hypot(w.1);
        Some(Partial {
            c1,
            c2,
            q_b,
            q_d,
            q_g: w.1.atan2(w.0),
            mismatch: norm - self.l_gf,
        })
    }
}

/// All assemblies of the mechanism at full extension, found by scanning `q_K`
/// over a full turn for every branch of the two slider loops.
///
/// The stroke `l_x` and actuator angle `q_N` follow from the first loop with
/// the geometry's current `l_act`, `l_KN` and `q_KN`.
pub fn extension_states(geom: &Geometry) -> Result<Vec<MechanismState>> {
    let asm = Assembly::new(geom)?;
    let mut out = Vec::new();
    for b_branch in [true, false] {
        for d_branch in [true, false] {
            scan(geom, &asm, (b_branch, d_branch), (-PI, PI), 1440, &mut out);
        }
    }
    Ok(out)
}

/// Assemblies at full extension on the same slider-loop branches as
/// `reference`, with `q_K` within `window` rad of the reference value.
pub fn extension_states_near(geom: &Geometry, reference: &MechanismState, window: f64) -> Result<Vec<MechanismState>> {
    let asm = Assembly::new(geom)?;
    let branches = (
        (reference.q_b - geom.q_o1_ref).cos() >= 0.0,
        (reference.q_d - geom.q_o1_ref).cos() >= 0.0,
    );
    let samples = ((720.0 * window / PI).ceil() as usize).max(8);
    let mut out = Vec::new();
    scan(
        geom,
        &asm,
        branches,
        (reference.q_k - window, reference.q_k + window),
        samples,
        &mut out,
    );
    Ok(out)
}

fn scan(
    geom: &Geometry,
    asm: &Assembly,
    (b_branch, d_branch): (bool, bool),
    (lo, hi): (f64, f64),
    samples: usize,
    out: &mut Vec<MechanismState>,
) {
    let l_ab = geom.link(Link::AB);
    let kn = (geom.l_kn * geom.q_kn.cos(), geom.l_kn * geom.q_kn.sin());
    let f = |q: f64| asm.at(q, b_branch, d_branch).map(|p| p.mismatch);
    let mut push = |root: f64| {
        if let Some(p) = asm.at(root, b_branch, d_branch) {
            let (eb, ek) = (rot(p.q_b), rot(root));
            let w = (
                -(l_ab * eb.0 + asm.l_bk * ek.0 + kn.0),
                -(l_ab * eb.1 + asm.l_bk * ek.1 + kn.1),
            );
            out.push(MechanismState {
                l_x: w.0.hypot(w.1) - geom.l_act,
                c1: p.c1,
                c2: p.c2,
                q_b: wrap_angle(p.q_b),
                q_d: wrap_angle(p.q_d),
                q_g: p.q_g,
                q_k: root,
                q_n: w.1.atan2(w.0),
            });
        }
    };
    let step = (hi - lo) / samples as f64;
    let mut prev: Option<(f64, f64)> = None;
    let mut before: Option<f64> = None;
    for i in 0..=samples {
        let q = lo + step * i as f64;
        let m = f(q);
        if let (Some((qa, ma)), Some(mb)) = (prev, m) {
            if ma == 0.0 || ma.signum() != mb.signum() {
                push(bisect(&f, qa, q, ma));
            } else if let Some(m0) = before {
                // A double root where the loop closes only fully stretched
                // touches zero without a sign change.
                if ma.abs() <= m0.abs() && ma.abs() <= mb.abs() && m0.signum() == ma.signum() {
                    if let Some(root) = tangent_root(&f, qa - step, q) {
                        push(root);
                    }
                }
            }
        }
        before = prev.map(|p| p.1);
        prev = m.map(|v| (q, v));
        if m.is_none() {
            before = None;
        }
    }
}

fn tangent_root(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64) -> Option<f64> {
    let g = |q: f64| f(q).map_or(f64::INFINITY, f64::abs);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..100 {
        if g1 <= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - r * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + r * (b - a);
            g2 = g(x2);
        }
    }
    let q = 0.5 * (a + b);
    (g(q) < 1e-9).then_some(q)
}

fn bisect(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        match f(m) {
            Some(fm) if fm.signum() == fa.signum() && fm != 0.0 => {
                a = m;
                fa = fm;
            }
            Some(_) => b = m,
            None => break,
        }
    }
    a
}

/// Shift `l_act` so that the smallest stroke over the grid equals `floor`.
///
/// The seed is moved along with it, so the returned geometry solves to the
/// same configurations.
pub fn calibrate_stroke(
    geom: &Geometry,
    mcp_deg: &[f64],
    pip_deg: &[f64],
    floor: f64,
    settings: &SolverSettings,
) -> Result<Geometry> {
    let seed = geom
        .seed
        .ok_or_else(|| Error::InvalidGeometry("calibration needs a seed state".into()))?;
    let states = solve_grid(geom, mcp_deg, pip_deg, settings)?;
    let min_lx = states.iter().map(|s| s.l_x).fold(f64::INFINITY, f64::min);
    let shift = min_lx - floor;
    let mut out = geom.clone();
    out.l_act += shift;
    out.seed = Some(MechanismState {
        l_x: seed.l_x - shift,
        ..seed
    });
    Ok(out)
}
