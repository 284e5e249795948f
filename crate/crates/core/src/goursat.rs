//! The Goursat problem between the two characteristics through `(0, x0)`.
//!
//! Boundary data on the characteristics comes from the outer Cauchy
//! solutions shifted by the prescribed jumps. Inside, the solution is the
//! fixed point of the parallelogram relation
//!
//! ```text
//! u(C) = g1(t_B) + g2(t_D) - A + 1/(4a^2) int_xi^x0 dy int_x0^eta G(y, z) dz
//! ```
//!
//! where `B` and `D` are the parallelogram's corners on the left and right
//! characteristic and `G = F - f`. The work lattice is the full integer
//! lattice in characteristic coordinates with spacing `dx`; grid nodes of
//! the `(t, x)` grid are its even sublattice, the remaining points sit on
//! half time levels. The derivative fields come from differentiating the
//! relation (`u_xi`, `u_eta` are single integrals plus the trace slopes).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::BoundExpr;
use crate::field::{NodeValue, PicardReport, RegionField, Row};
use crate::geometry::Region;
use crate::picard::{self, StripMap};
use crate::problem::{resolve_lipschitz, strip_levels, Grid, GridParams, PicardParams, ProblemSpec};

/// Goursat boundary data sampled at the grid time levels.
///
/// `gamma1[n]` is the value prescribed at `(n dt, x0 - a n dt)` and
/// `gamma2[n]` at `(n dt, x0 + a n dt)`; `dgamma*` are their time
/// derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoursatTraces {
    pub dt: f64,
    pub value_at_x0: f64,
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub dgamma1: Vec<f64>,
    pub dgamma2: Vec<f64>,
}

/// Builds the boundary data from the two outer solutions.
///
/// Traces stop at the first level where the characteristic node is missing
/// from the corresponding field.
pub fn goursat_traces(spec: &ProblemSpec, left: &RegionField, right: &RegionField) -> Result<GoursatTraces> {
    let (phi1, phi2) = spec.one_sided_limits()?;
    let a_val = spec.value_at_x0;
    let a = spec.a;
    let grid = left.grid();
    let mut t = GoursatTraces {
        dt: grid.dt,
        value_at_x0: a_val,
        gamma1: Vec::new(),
        gamma2: Vec::new(),
        dgamma1: Vec::new(),
        dgamma2: Vec::new(),
    };
    for n in 0..=grid.nt {
        let Some(v) = left.get(n, -(n as i64)) else { break };
        t.gamma1.push(v.u + a_val - phi1);
        t.dgamma1.push(v.ut - a * v.ux);
    }
    for n in 0..=right.grid().nt {
        let Some(v) = right.get(n, n as i64) else { break };
        t.gamma2.push(v.u + a_val - phi2);
        t.dgamma2.push(v.ut + a * v.ux);
    }
    if t.gamma1.is_empty() || t.gamma2.is_empty() {
        return Err(Error::Coverage(
            "outer solutions do not contain the point (0, x0)".into(),
        ));
    }
    Ok(t)
}

/// Value of `samples` (given at integer levels) at half-level `s`, i.e. at
/// time `s dt / 2`. Odd `s` use four-point Lagrange interpolation; the half
/// level just past the last sample is extrapolated from the last four.
fn at_half_level(samples: &[f64], s: usize) -> Option<f64> {
    if s.is_multiple_of(2) {
        return samples.get(s / 2).copied();
    }
    let m = (s - 1) / 2;
    if m >= samples.len() || (m + 1 == samples.len() && samples.len() < 4) {
        return None;
    }
    let npts = samples.len().min(4);
    // stencil start, centred on [m, m+1] where possible
    let start = m.saturating_sub(1).min(samples.len() - npts);
    let x = m as f64 + 0.5;
    let mut acc = 0.0;
    for j in start..start + npts {
        let mut w = 1.0;
        for k in start..start + npts {
            if k != j {
                w *= (x - k as f64) / (j as f64 - k as f64);
            }
        }
        acc += w * samples[j];
    }
    Some(acc)
}

/// Trace values resampled on half levels `0..=len-1`.
#[derive(Debug, Clone)]
struct HalfTrace {
    value: Vec<f64>,
    slope: Vec<f64>,
}

impl HalfTrace {
    fn new(values: &[f64], slopes: &[f64], len: usize, name: &str) -> Result<HalfTrace> {
        let mut out = HalfTrace {
            value: Vec::with_capacity(len),
            slope: Vec::with_capacity(len),
        };
        for s in 0..len {
            match (at_half_level(values, s), at_half_level(slopes, s)) {
                (Some(v), Some(d)) => {
                    out.value.push(v);
                    out.slope.push(d);
                }
                _ => {
                    return Err(Error::Coverage(format!(
                        "{name} is needed up to t = {} levels but only {} are available",
                        (len - 1) as f64 / 2.0,
                        values.len()
                    )))
                }
            }
        }
        Ok(out)
    }
}

/// Dense storage over the lattice `(k, b)`, `k = -xi index`, `b = eta
/// index`, restricted to `k + b <= s_max`.
#[derive(Debug, Clone)]
struct Lattice {
    width: usize,
    data: Vec<f64>,
}

impl Lattice {
    fn zeros(k_max: usize, b_max: usize) -> Lattice {
        Lattice {
            width: b_max + 1,
            data: vec![0.0; (k_max + 1) * (b_max + 1)],
        }
    }

    #[inline]
    fn at(&self, k: usize, b: usize) -> f64 {
        self.data[k * self.width + b]
    }

    #[inline]
    fn set(&mut self, k: usize, b: usize, v: f64) {
        self.data[k * self.width + b] = v;
    }
}

struct GoursatMap {
    grid: Grid,
    k_max: usize,
    b_max: usize,
    s_max: usize,
    offset: f64,
    left: HalfTrace,
    right: HalfTrace,
    f: BoundExpr,
    source: Lattice,
    g: Lattice,
    /// int_x0^eta G(xi, z) dz
    along_eta: Lattice,
    /// int_xi^x0 G(y, eta) dy
    along_xi: Lattice,
    /// the double integral
    area: Lattice,
    u: Lattice,
    p: Lattice,
    q: Lattice,
}

impl GoursatMap {
    fn new(spec: &ProblemSpec, traces: &GoursatTraces, grid: Grid) -> Result<GoursatMap> {
        let nt = grid.nt;
        let k_max = (2 * nt).min((nt as i64 - grid.i_lo) as usize);
        let b_max = (2 * nt).min((nt as i64 + grid.i_hi) as usize);
        let s_max = (2 * nt).min(k_max + b_max);
        let left = HalfTrace::new(&traces.gamma1, &traces.dgamma1, k_max + 1, "left trace")?;
        let right = HalfTrace::new(&traces.gamma2, &traces.dgamma2, b_max + 1, "right trace")?;
        let src = spec.bound_source()?;
        let mut source = Lattice::zeros(k_max, b_max);
        let mut map_err = None;
        for_each_node(k_max, b_max, 0, s_max, |k, b| {
            if map_err.is_some() {
                return;
            }
            let (t, x) = position(&grid, k, b);
            match src.eval(&[t, x]) {
                Ok(v) => source.set(k, b, v),
                Err(e) => map_err = Some(Error::Expression { field: "F", source: e }),
            }
        });
        if let Some(e) = map_err {
            return Err(e);
        }
        let zeros = Lattice::zeros(k_max, b_max);
        Ok(GoursatMap {
            grid,
            k_max,
            b_max,
            s_max,
            offset: traces.value_at_x0,
            left,
            right,
            f: spec.bound_nonlinearity()?,
            source,
            g: zeros.clone(),
            along_eta: zeros.clone(),
            along_xi: zeros.clone(),
            area: zeros.clone(),
            u: zeros.clone(),
            p: zeros.clone(),
            q: zeros,
        })
    }

    fn refresh_sums(&mut self, lo: usize, hi: usize) {
        let h = 0.5 * self.grid.dx;
        for_each_node(self.k_max, self.b_max, lo, hi, |k, b| {
            let g = self.g.at(k, b);
            let e = if b == 0 {
                0.0
            } else {
                self.along_eta.at(k, b - 1) + h * (self.g.at(k, b - 1) + g)
            };
            self.along_eta.set(k, b, e);
            let (xi, ar) = if k == 0 {
                (0.0, 0.0)
            } else {
                (
                    self.along_xi.at(k - 1, b) + h * (self.g.at(k - 1, b) + g),
                    self.area.at(k - 1, b) + h * (self.along_eta.at(k - 1, b) + e),
                )
            };
            self.along_xi.set(k, b, xi);
            self.area.set(k, b, ar);
        });
    }

    fn map_node(&self, k: usize, b: usize) -> NodeValue {
        let a = self.grid.a;
        let inv4a2 = 0.25 / (a * a);
        let u = self.left.value[k] + self.right.value[b] - self.offset + inv4a2 * self.area.at(k, b);
        let d_xi = -self.left.slope[k] / (2.0 * a) - inv4a2 * self.along_eta.at(k, b);
        let d_eta = self.right.slope[b] / (2.0 * a) + inv4a2 * self.along_xi.at(k, b);
        NodeValue {
            u,
            ut: a * (d_eta - d_xi),
            ux: d_xi + d_eta,
        }
    }

    fn into_field(self, report: PicardReport) -> RegionField {
        let grid = self.grid;
        let rows = (0..=grid.nt)
            .map(|n| match grid.region_row(Region::Q3Star, n) {
                Some((lo, hi)) => Row {
                    lo,
                    vals: (lo..=hi)
                        .map(|i| {
                            let (k, b) = ((n as i64 - i) as usize, (n as i64 + i) as usize);
                            NodeValue {
                                u: self.u.at(k, b),
                                ut: self.p.at(k, b),
                                ux: self.q.at(k, b),
                            }
                        })
                        .collect(),
                },
                None => Row { lo: 0, vals: Vec::new() },
            })
            .collect();
        RegionField::new(Region::Q3Star, grid, rows, report)
    }
}

/// `(t, x)` of lattice point `(k, b)`.
fn position(grid: &Grid, k: usize, b: usize) -> (f64, f64) {
    let t = (k + b) as f64 * 0.5 * grid.dt;
    let x = grid.x0 + (b as f64 - k as f64) * 0.5 * grid.dx;
    (t, x)
}

/// Visits lattice points with `lo <= k + b <= hi` in an order where
/// `(k, b - 1)` and `(k - 1, b)` come first.
fn for_each_node(k_max: usize, b_max: usize, lo: usize, hi: usize, mut visit: impl FnMut(usize, usize)) {
    for k in 0..=k_max.min(hi) {
        let b_lo = lo.saturating_sub(k);
        let b_hi = (hi - k).min(b_max);
        for b in b_lo..=b_hi {
            visit(k, b);
        }
    }
}

impl StripMap for GoursatMap {
    fn seed_sources(&mut self, lo: usize, hi: usize) {
        let (src, g) = (&self.source, &mut self.g);
        for_each_node(self.k_max, self.b_max, lo, hi, |k, b| g.set(k, b, src.at(k, b)));
        self.refresh_sums(lo, hi);
    }

    fn refresh_sources(&mut self, lo: usize, hi: usize) -> Result<()> {
        let mut failure = None;
        let grid = self.grid;
        let (src, g, f) = (&self.source, &mut self.g, &self.f);
        let (u, p, q) = (&self.u, &self.p, &self.q);
        for_each_node(self.k_max, self.b_max, lo, hi, |k, b| {
            if failure.is_some() {
                return;
            }
            let (t, x) = position(&grid, k, b);
            match f.eval(&[t, x, u.at(k, b), p.at(k, b), q.at(k, b)]) {
                Ok(fv) => g.set(k, b, src.at(k, b) - fv),
                Err(e) => failure = Some(Error::Expression { field: "f", source: e }),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        self.refresh_sums(lo, hi);
        Ok(())
    }

    fn apply(&mut self, lo: usize, hi: usize) -> f64 {
        let mut change: f64 = 0.0;
        let mut nan = false;
        let mut updates = Vec::new();
        for_each_node(self.k_max, self.b_max, lo, hi, |k, b| updates.push((k, b)));
        for (k, b) in updates {
            let v = self.map_node(k, b);
            let d = (v.u - self.u.at(k, b))
                .abs()
                .max((v.ut - self.p.at(k, b)).abs())
                .max((v.ux - self.q.at(k, b)).abs());
            nan |= !v.u.is_finite() || !v.ut.is_finite() || !v.ux.is_finite();
            change = change.max(d);
            self.u.set(k, b, v.u);
            self.p.set(k, b, v.ut);
            self.q.set(k, b, v.ux);
        }
        if nan {
            f64::NAN
        } else {
            change
        }
    }
}

/// Solves the Goursat problem on the closed region between the
/// characteristics (within the domain of dependence of the window).
pub fn solve_goursat_region(
    spec: &ProblemSpec,
    traces: &GoursatTraces,
    grid: &GridParams,
    picard: &PicardParams,
) -> Result<RegionField> {
    picard.validate()?;
    let grid = Grid::new(spec, grid)?;
    let lipschitz = resolve_lipschitz(spec, &grid)?;
    let height = strip_levels(lipschitz, &grid, picard);
    let mut map = GoursatMap::new(spec, traces, grid)?;
    // the apex does not depend on the right-hand side
    map.apply(0, 0);
    map.refresh_sources(0, 0)?;
    let strips = picard::strips(1, map.s_max, 2 * height);
    let report = picard::march(&mut map, &strips, picard, Region::Q3Star)?;
    Ok(map.into_field(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::{solve_cauchy_region, Side};

    fn params(nt: usize) -> GridParams {
        GridParams { t_final: 1.0, x_lo: -2.0, x_hi: 2.0, nt }
    }

    fn solve(spec: &ProblemSpec, nt: usize) -> (GoursatTraces, GoursatMap, PicardReport) {
        let p = params(nt);
        let pic = PicardParams::default();
        let l = solve_cauchy_region(spec, Side::Left, &p, &pic).unwrap();
        let r = solve_cauchy_region(spec, Side::Right, &p, &pic).unwrap();
        let traces = goursat_traces(spec, &l, &r).unwrap();
        let grid = Grid::new(spec, &p).unwrap();
        let lip = resolve_lipschitz(spec, &grid).unwrap();
        let mut map = GoursatMap::new(spec, &traces, grid).unwrap();
        map.apply(0, 0);
        map.refresh_sources(0, 0).unwrap();
        let strips = picard::strips(1, map.s_max, 2 * strip_levels(lip, &grid, &pic));
        let rep = picard::march(&mut map, &strips, &pic, Region::Q3Star).unwrap();
        (traces, map, rep)
    }

    #[test]
    fn half_level_interpolation_is_cubic_exact() {
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t - 0.25 * t * t * t;
        let samples: Vec<f64> = (0..6).map(|n| f(n as f64)).collect();
        for s in 0..=11 {
            let v = at_half_level(&samples, s).unwrap();
            assert!((v - f(s as f64 / 2.0)).abs() < 1e-12, "s={s}");
        }
        assert!(at_half_level(&samples, 12).is_none());
        assert!(at_half_level(&samples, 13).is_none());
        assert_eq!(at_half_level(&[2.0, 4.0], 1), Some(3.0));
        assert!(at_half_level(&[2.0, 4.0], 3).is_none());
    }

    #[test]
    fn running_sums_match_direct_summation() {
        let spec = ProblemSpec::builder(1.3, 0.2, 0.0).build().unwrap();
        let grid = Grid::new(&spec, &params(10)).unwrap();
        let traces = GoursatTraces {
            dt: grid.dt,
            value_at_x0: 0.0,
            gamma1: vec![0.0; 11],
            gamma2: vec![0.0; 11],
            dgamma1: vec![0.0; 11],
            dgamma2: vec![0.0; 11],
        };
        let mut map = GoursatMap::new(&spec, &traces, grid).unwrap();
        let (km, bm, sm) = (map.k_max, map.b_max, map.s_max);
        for_each_node(km, bm, 0, sm, |k, b| {
            map.g.set(k, b, ((k * 31 + b * 17) as f64 * 0.37).sin());
        });
        map.refresh_sums(0, sm);
        let h = grid.dx;
        let w = |j: usize, n: usize| if n == 0 { 0.0 } else if j == 0 || j == n { 0.5 } else { 1.0 };
        for (k, b) in [(0, 0), (3, 0), (0, 5), (4, 7), (9, 11), (12, 8)] {
            if k + b > sm {
                continue;
            }
            let mut direct = 0.0;
            for kk in 0..=k {
                for bb in 0..=b {
                    direct += w(kk, k) * w(bb, b) * h * h * map.g.at(kk, bb);
                }
            }
            assert!((direct - map.area.at(k, b)).abs() <= 1e-13, "({k},{b})");
            let line: f64 = (0..=b).map(|bb| w(bb, b) * h * map.g.at(k, bb)).sum();
            assert!((line - map.along_eta.at(k, b)).abs() <= 1e-13);
            let line: f64 = (0..=k).map(|kk| w(kk, k) * h * map.g.at(kk, b)).sum();
            assert!((line - map.along_xi.at(k, b)).abs() <= 1e-13);
        }
    }

    #[test]
    fn step_data_gives_constant() {
        let spec = ProblemSpec::builder(1.0, 0.0, 1.0).phi2("1").build().unwrap();
        let (traces, map, _) = solve(&spec, 16);
        assert!(traces.gamma1.iter().chain(&traces.gamma2).all(|g| *g == 1.0));
        let field = map.into_field(PicardReport::default());
        for (_, _, v) in field.nodes() {
            assert_eq!((v.u, v.ut, v.ux), (1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn velocity_step_closed_form() {
        let spec = ProblemSpec::builder(1.0, 0.0, 0.0).psi2("1").build().unwrap();
        let (_, map, _) = solve(&spec, 16);
        let field = map.into_field(PicardReport::default());
        // u = (x + t) / 2 at t = 1, x = 0
        let v = field.get(16, 0).unwrap();
        assert!((v.u - 0.5).abs() < 1e-13);
        assert!((v.ut - 0.5).abs() < 1e-13 && (v.ux - 0.5).abs() < 1e-13);
        for (n, i, v) in field.nodes() {
            let (t, x) = (n as f64 / 16.0, i as f64 / 16.0);
            assert!((v.u - 0.5 * (x + t)).abs() < 1e-13);
        }
    }

    #[test]
    fn fixed_point_residual_and_boundary_reproduction() {
        let spec = ProblemSpec::builder(1.0, 0.0, 0.5)
            .phi1("cos(x)")
            .phi2("x + 0.2")
            .psi1("sin(x)")
            .psi2("1")
            .source("t*x")
            .nonlinearity("0.5*sin(u) + 0.2*ut*ux/(1 + ux^2)")
            .lipschitz(Some(1.0))
            .build()
            .unwrap();
        let tol = PicardParams::default().tol;
        let (traces, mut map, rep) = solve(&spec, 32);
        assert!(rep.max_iterations() <= 20);
        let sm = map.s_max;
        map.refresh_sources(0, sm).unwrap();
        let change = map.apply(0, sm);
        assert!(change <= 2.0 * tol, "{change}");
        let field = map.into_field(rep);
        let apex = field.get(0, 0).unwrap();
        assert!((apex.u - 0.5).abs() <= 1e-12);
        for n in 0..=32usize {
            let l = field.get(n, -(n as i64)).unwrap();
            let r = field.get(n, n as i64).unwrap();
            assert!((l.u - traces.gamma1[n]).abs() <= 2.0 * tol);
            assert!((r.u - traces.gamma2[n]).abs() <= 2.0 * tol);
        }
    }
}
