//! The global solution on the three regions, its evaluation and the
//! classification of the discontinuity.

use serde::Serialize;

use crate::cauchy::{solve_cauchy_region, Side};
use crate::error::{Error, Result};
use crate::field::{NodeValue, RegionField};
use crate::geometry::Region;
use crate::goursat::{goursat_traces, solve_goursat_region, GoursatTraces};
use crate::problem::{Grid, GridParams, PicardParams, ProblemSpec};

/// The three ways the initial displacement can meet the prescribed value at
/// the jump point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseKind {
    /// `phi1(x0) = phi2(x0) = A`.
    Continuous,
    /// `phi1(x0) != phi2(x0)` and `A` is their midpoint.
    MidpointJump,
    GeneralJump,
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseKind::Continuous => "Continuous",
            CaseKind::MidpointJump => "MidpointJump",
            CaseKind::GeneralJump => "GeneralJump",
        };
        f.write_str(s)
    }
}

/// Values at the jump point and the jumps they force across the
/// characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpData {
    pub phi1_at_x0: f64,
    pub phi2_at_x0: f64,
    pub value_at_x0: f64,
    /// `A - phi1(x0)`, the jump across `x = x0 - a t`.
    pub left: f64,
    /// `phi2(x0) - A`, the jump across `x = x0 + a t`.
    pub right: f64,
}

impl JumpData {
    pub fn of(spec: &ProblemSpec) -> Result<JumpData> {
        let (p1, p2) = spec.one_sided_limits()?;
        let a = spec.value_at_x0;
        Ok(JumpData {
            phi1_at_x0: p1,
            phi2_at_x0: p2,
            value_at_x0: a,
            left: a - p1,
            right: p2 - a,
        })
    }
}

/// Solution value, derivatives and region at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub u: f64,
    pub ut: f64,
    pub ux: f64,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    spec: ProblemSpec,
    params: GridParams,
    picard: PicardParams,
    grid: Grid,
    fields: [RegionField; 3],
    traces: GoursatTraces,
    case: CaseKind,
    jumps: JumpData,
}

/// Solves both Cauchy sub-problems, then the Goursat problem between the
/// characteristics.
pub fn solve(spec: &ProblemSpec, grid: &GridParams, picard: &PicardParams) -> Result<Solution> {
    let g = Grid::new(spec, grid)?;
    let case = classify_case(spec)?;
    let jumps = JumpData::of(spec)?;
    let left = solve_cauchy_region(spec, Side::Left, grid, picard)?;
    let right = solve_cauchy_region(spec, Side::Right, grid, picard)?;
    let traces = goursat_traces(spec, &left, &right)?;
    let middle = solve_goursat_region(spec, &traces, grid, picard)?;
    Ok(Solution {
        spec: spec.clone(),
        params: *grid,
        picard: *picard,
        grid: g,
        fields: [left, right, middle],
        traces,
        case,
        jumps,
    })
}

impl Solution {
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn grid_params(&self) -> &GridParams {
        &self.params
    }

    pub fn picard_params(&self) -> &PicardParams {
        &self.picard
    }

    pub fn case(&self) -> CaseKind {
        self.case
    }

    pub fn jumps(&self) -> &JumpData {
        &self.jumps
    }

    pub fn traces(&self) -> &GoursatTraces {
        &self.traces
    }

    pub fn field(&self, region: Region) -> &RegionField {
        &self.fields[region.index()]
    }

    /// Mutable access to one region's field, for fault injection.
    pub fn field_mut(&mut self, region: Region) -> &mut RegionField {
        &mut self.fields[region.index()]
    }

    /// Region and value of grid node `(n, i)` under the closure convention.
    pub fn node(&self, n: usize, i: i64) -> Option<(Region, NodeValue)> {
        let region = self.grid.node_region(n, i);
        self.field(region).get(n, i).map(|v| (region, v))
    }

    /// Window nodes in row-major order (time outer, space inner).
    pub fn window_nodes(&self) -> impl Iterator<Item = (usize, i64, Region, NodeValue)> + '_ {
        let g = self.grid;
        (0..=g.nt).flat_map(move |n| {
            (g.i_lo..=g.i_hi).map(move |i| {
                let (r, v) = self.node(n, i).expect("window nodes are always stored");
                (n, i, r, v)
            })
        })
    }
}

/// Snaps `v` to the nearest integer when within `1e-9` of it.
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 {
        r
    } else {
        v
    }
}

/// Evaluates the solution at `(t, x)` inside the window.
///
/// Between nodes the value is interpolated from nodes of the point's own
/// region only: bilinearly when the whole cell lies in the region, and
/// linearly on the half-cell triangle when a characteristic cuts the cell
/// along its diagonal.
pub fn evaluate(sol: &Solution, t: f64, x: f64) -> Result<Evaluation> {
    let g = &sol.grid;
    let ft = snap(t / g.dt);
    let fi = snap((x - g.x0) / g.dx);
    let nt = g.nt as f64;
    if !(ft >= 0.0 && ft <= nt && fi >= g.i_lo as f64 && fi <= g.i_hi as f64) {
        return Err(Error::OutOfWindow { t, x });
    }
    let region = Region::from_offsets(fi + ft, fi - ft);
    let field = sol.field(region);
    let n0 = (ft.floor() as usize).min(g.nt - 1);
    let i0 = (fi.floor() as i64).min(g.i_hi - 1);
    let s = ft - n0 as f64;
    let r = fi - i0 as f64;
    let corner = |dn: usize, di: i64| field.get(n0 + dn, i0 + di);
    let v = match (corner(0, 0), corner(0, 1), corner(1, 0), corner(1, 1)) {
        (Some(v00), Some(v01), Some(v10), Some(v11)) => combine(&[
            ((1.0 - s) * (1.0 - r), v00),
            ((1.0 - s) * r, v01),
            (s * (1.0 - r), v10),
            (s * r, v11),
        ]),
        (Some(v00), Some(v01), Some(v10), None) => {
            combine(&[(1.0 - s - r, v00), (r, v01), (s, v10)])
        }
        (None, Some(v01), Some(v10), Some(v11)) => {
            combine(&[(s + r - 1.0, v11), (1.0 - s, v01), (1.0 - r, v10)])
        }
        (Some(v00), None, Some(v10), Some(v11)) => {
            combine(&[(1.0 - s, v00), (s - r, v10), (r, v11)])
        }
        (Some(v00), Some(v01), None, Some(v11)) => {
            combine(&[(1.0 - r, v00), (r - s, v01), (s, v11)])
        }
        _ => {
            return Err(Error::Coverage(format!(
                "no interpolation stencil for (t={t}, x={x}) in region {region}"
            )))
        }
    };
    Ok(Evaluation {
        u: v.u,
        ut: v.ut,
        ux: v.ux,
        region,
    })
}

fn combine(terms: &[(f64, NodeValue)]) -> NodeValue {
    let mut out = NodeValue::default();
    for &(w, v) in terms {
        if w != 0.0 {
            out.u += w * v.u;
            out.ut += w * v.ut;
            out.ux += w * v.ux;
        }
    }
    out
}

/// Exact trichotomy on `phi1(x0)`, `phi2(x0)` and `A`.
pub fn classify_case(spec: &ProblemSpec) -> Result<CaseKind> {
    classify_case_eps(spec, 0.0)
}

/// Like [`classify_case`], treating values closer than `eps` as equal.
pub fn classify_case_eps(spec: &ProblemSpec, eps: f64) -> Result<CaseKind> {
    let (p1, p2) = spec.one_sided_limits()?;
    let a = spec.value_at_x0;
    let eq = |x: f64, y: f64| (x - y).abs() <= eps;
    Ok(if eq(p1, a) && eq(p2, a) {
        CaseKind::Continuous
    } else if !eq(p1, p2) && eq(a, 0.5 * (p1 + p2)) {
        CaseKind::MidpointJump
    } else {
        CaseKind::GeneralJump
    })
}

/// Whether the jump term of the unified representation vanishes, i.e.
/// `A = (phi1(x0) + phi2(x0)) / 2`.
pub fn generalized_dalembert_holds(spec: &ProblemSpec) -> Result<bool> {
    let (p1, p2) = spec.one_sided_limits()?;
    // the same expression classify_case compares against
    Ok(spec.value_at_x0 == 0.5 * (p1 + p2))
}

/// Jump `(u)+ - (u)-` of `u` across one characteristic at time `t`, `+`
/// being the side of larger `x`.
///
/// The outer region's one-sided value is extrapolated to the
/// characteristic node from the three nearest nodes of its own interior.
/// Between time levels the jumps at the neighbouring levels are
/// interpolated linearly.
pub fn characteristic_jump(sol: &Solution, t: f64, side: Side) -> Result<f64> {
    let g = &sol.grid;
    let ft = snap(t / g.dt);
    if !(ft > 0.0 && ft <= g.nt as f64) {
        return Err(Error::OutOfWindow { t, x: f64::NAN });
    }
    let n0 = ft.floor() as usize;
    let w = ft - n0 as f64;
    if w == 0.0 {
        return jump_at_level(sol, n0, side);
    }
    let lo = jump_at_level(sol, n0, side);
    let hi = jump_at_level(sol, n0 + 1, side)?;
    // level 0 holds no jump value of its own; the constant extends down
    let lo = if n0 == 0 { hi } else { lo? };
    Ok((1.0 - w) * lo + w * hi)
}

/// Jump at time level `n >= 1`.
///
/// The outer limit is extrapolated from the three outer nodes next to the
/// characteristic. Near the window edge, where those are not stored, the
/// outer field's own value on the characteristic is used instead.
pub fn jump_at_level(sol: &Solution, n: usize, side: Side) -> Result<f64> {
    Ok(node_jump_at_level(sol, n, side)?.u)
}

/// Jumps of `u`, `u_t` and `u_x` at time level `n >= 1`, measured like
/// [`jump_at_level`]. Only the `u` jump is prescribed; the derivative jumps
/// are diagnostics.
pub fn node_jump_at_level(sol: &Solution, n: usize, side: Side) -> Result<NodeValue> {
    let g = &sol.grid;
    let k = n as i64;
    let (edge, outward, outer) = match side {
        Side::Left => (-k, -1, Region::Q1Star),
        Side::Right => (k, 1, Region::Q2Star),
    };
    let missing = || Error::OutOfWindow { t: g.t(n), x: g.x(edge) };
    if n == 0 || edge < g.i_lo || edge > g.i_hi {
        return Err(missing());
    }
    let inner = sol.field(Region::Q3Star).get(n, edge).ok_or_else(missing)?;
    let f = sol.field(outer);
    let stencil: Option<Vec<NodeValue>> = (1..=3).map(|j| f.get(n, edge + outward * j)).collect();
    let outer = match stencil {
        Some(v) => {
            let ex = |c: fn(&NodeValue) -> f64| 3.0 * c(&v[0]) - 3.0 * c(&v[1]) + c(&v[2]);
            NodeValue { u: ex(|v| v.u), ut: ex(|v| v.ut), ux: ex(|v| v.ux) }
        }
        None => f.get(n, edge).ok_or_else(missing)?,
    };
    let (hi, lo) = match side {
        Side::Left => (inner, outer),
        Side::Right => (outer, inner),
    };
    Ok(NodeValue { u: hi.u - lo.u, ut: hi.ut - lo.ut, ux: hi.ux - lo.ux })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nt: usize) -> GridParams {
        GridParams { t_final: 1.0, x_lo: -3.0, x_hi: 3.0, nt }
    }

    fn step() -> ProblemSpec {
        ProblemSpec::builder(1.0, 0.0, 1.0).phi2("1").build().unwrap()
    }

    fn spec3(p1: &str, p2: &str, a: f64) -> ProblemSpec {
        ProblemSpec::builder(1.0, 0.0, a).phi1(p1).phi2(p2).build().unwrap()
    }

    #[test]
    fn trichotomy() {
        assert_eq!(classify_case(&spec3("2", "2+x", 2.0)).unwrap(), CaseKind::Continuous);
        assert_eq!(classify_case(&spec3("1", "3", 2.0)).unwrap(), CaseKind::MidpointJump);
        assert_eq!(classify_case(&spec3("0", "1", 1.0)).unwrap(), CaseKind::GeneralJump);
        assert_eq!(classify_case(&spec3("1", "1", 2.0)).unwrap(), CaseKind::GeneralJump);
        assert!(generalized_dalembert_holds(&spec3("1", "3", 2.0)).unwrap());
        assert!(!generalized_dalembert_holds(&spec3("0", "1", 1.0)).unwrap());
        let noisy = spec3("1", "3", 2.0 + 1e-12);
        assert_eq!(classify_case(&noisy).unwrap(), CaseKind::GeneralJump);
        assert_eq!(classify_case_eps(&noisy, 1e-9).unwrap(), CaseKind::MidpointJump);
    }

    #[test]
    fn step_problem_values_and_jumps() {
        let sol = solve(&step(), &params(32), &PicardParams::default()).unwrap();
        assert_eq!(sol.case(), CaseKind::GeneralJump);
        let e = evaluate(&sol, 1.0, -2.0).unwrap();
        assert_eq!((e.u, e.ut, e.ux, e.region), (0.0, 0.0, 0.0, Region::Q1Star));
        let e = evaluate(&sol, 1.0, 0.0).unwrap();
        assert_eq!((e.u, e.ut, e.ux, e.region), (1.0, 0.0, 0.0, Region::Q3Star));
        let e = evaluate(&sol, 0.37, 2.1).unwrap();
        assert_eq!((e.u, e.region), (1.0, Region::Q2Star));
        assert_eq!(evaluate(&sol, 0.0, 0.0).unwrap().u, 1.0);
        for n in 1..=32 {
            let t = n as f64 / 32.0;
            assert_eq!(characteristic_jump(&sol, t, Side::Left).unwrap(), 1.0);
            assert_eq!(characteristic_jump(&sol, t, Side::Right).unwrap(), 0.0);
        }
        assert_eq!(characteristic_jump(&sol, 0.01, Side::Left).unwrap(), 1.0);
    }

    #[test]
    fn closure_convention_on_characteristics() {
        let sol = solve(&step(), &params(16), &PicardParams::default()).unwrap();
        assert_eq!(evaluate(&sol, 0.5, -0.5).unwrap().region, Region::Q3Star);
        assert_eq!(evaluate(&sol, 0.5, 0.5).unwrap().region, Region::Q3Star);
        // off-node point just left of the left characteristic
        let e = evaluate(&sol, 0.51, -0.52).unwrap();
        assert_eq!((e.u, e.region), (0.0, Region::Q1Star));
        let e = evaluate(&sol, 0.51, -0.50).unwrap();
        assert_eq!((e.u, e.region), (1.0, Region::Q3Star));
    }

    #[test]
    fn out_of_window() {
        let sol = solve(&step(), &params(8), &PicardParams::default()).unwrap();
        assert!(matches!(evaluate(&sol, 1.1, 0.0), Err(Error::OutOfWindow { .. })));
        assert!(matches!(evaluate(&sol, 0.5, 3.5), Err(Error::OutOfWindow { .. })));
        assert!(matches!(evaluate(&sol, -0.1, 0.0), Err(Error::OutOfWindow { .. })));
        assert!(characteristic_jump(&sol, 0.0, Side::Left).is_err());
        assert!(evaluate(&sol, 1.0, 3.0).is_ok());
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        // u = x + 2t is linear in every region, so every stencil is exact
        let spec = ProblemSpec::builder(1.0, 0.0, 0.0)
            .phi1("x")
            .phi2("x")
            .psi1("2")
            .psi2("2")
            .build()
            .unwrap();
        let sol = solve(&spec, &params(10), &PicardParams::default()).unwrap();
        for &(t, x) in &[(0.33, 0.1), (0.05, 0.049), (0.81, -0.8), (0.25, 2.77), (0.999, -0.999)] {
            let e = evaluate(&sol, t, x).unwrap();
            assert!((e.u - (x + 2.0 * t)).abs() < 1e-12, "({t},{x}) {e:?}");
            assert!((e.ut - 2.0).abs() < 1e-12 && (e.ux - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_problem() {
        let spec = ProblemSpec::builder(2.0, 0.5, 0.0).build().unwrap();
        let sol = solve(&spec, &params(16), &PicardParams::default()).unwrap();
        assert!(sol.window_nodes().all(|(_, _, _, v)| v == NodeValue::default()));
        assert_eq!(sol.window_nodes().count(), 17 * (sol.grid().i_hi - sol.grid().i_lo + 1) as usize);
    }

    #[test]
    fn derivative_jumps_of_velocity_step() {
        // u is 0, (x + t)/2 and t in regions 1, 3 and 2
        let spec = ProblemSpec::builder(1.0, 0.0, 0.0).psi2("1").build().unwrap();
        let sol = solve(&spec, &params(16), &PicardParams::default()).unwrap();
        for n in [1, 8, 16] {
            let l = node_jump_at_level(&sol, n, Side::Left).unwrap();
            let r = node_jump_at_level(&sol, n, Side::Right).unwrap();
            for (got, want) in [(l.u, 0.0), (l.ut, 0.5), (l.ux, 0.5), (r.u, 0.0), (r.ut, 0.5), (r.ux, -0.5)] {
                assert!((got - want).abs() < 1e-12, "level {n}: {got} vs {want}");
            }
        }
    }
}
