//! Cauchy sub-problems on either side of the discontinuity.
//!
//! The solution on side `j` is the fixed point of the d'Alembert
//! representation with the nonlinearity moved to the right-hand side,
//!
//! ```text
//! u(t,x) = (phi(x-at) + phi(x+at))/2 + 1/(2a) int_{x-at}^{x+at} psi
//!        + 1/(2a) int_0^t int_{x-a(t-s)}^{x+a(t-s)} G(s, y) dy ds,
//! G = F - f(t, x, u, u_t, u_x),
//! ```
//!
//! together with the two companions obtained by differentiating under the
//! integral sign, which give `u_t` and `u_x` as line integrals of `G` along
//! the two characteristics through the node. With `dx = a dt` every
//! quadrature point is a grid node, so the integrals are composite
//! trapezoid sums. They are kept as running sums (along rows for the inner
//! integral, along both diagonals for the outer one), which makes one
//! application of the map linear in the number of nodes.

use crate::error::{Error, Result};
use crate::expr::{BoundExpr, Expr};
use crate::field::{NodeValue, PicardReport, RegionField, Row};
use crate::geometry::Region;
use crate::picard::{self, StripMap};
use crate::problem::{resolve_lipschitz, strip_levels, Grid, GridParams, PicardParams, ProblemSpec};

/// Which half-line of initial data a Cauchy sub-problem uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `phi1`, `psi1` on `x <= x0`; solved on the closure of Q1.
    Left,
    /// `phi2`, `psi2` on `x >= x0`; solved on the closure of Q2.
    Right,
}

impl Side {
    pub fn region(self) -> Region {
        match self {
            Side::Left => Region::Q1Star,
            Side::Right => Region::Q2Star,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    Side(Side),
    /// `phi2`, `psi2` on the whole line.
    Whole,
}

/// Per-level scalar storage over rows `lo[n]..=hi[n]`.
#[derive(Debug, Clone)]
struct Levels {
    lo: Vec<i64>,
    rows: Vec<Vec<f64>>,
}

impl Levels {
    fn zeros(rows: &[(i64, i64)]) -> Levels {
        Levels {
            lo: rows.iter().map(|r| r.0).collect(),
            rows: rows
                .iter()
                .map(|&(lo, hi)| vec![0.0; (hi - lo + 1).max(0) as usize])
                .collect(),
        }
    }

    #[inline]
    fn at(&self, n: usize, i: i64) -> f64 {
        self.rows[n][(i - self.lo[n]) as usize]
    }

    #[inline]
    fn set(&mut self, n: usize, i: i64, v: f64) {
        let lo = self.lo[n];
        self.rows[n][(i - lo) as usize] = v;
    }
}

struct CauchyMap {
    grid: Grid,
    domain: Domain,
    rows: Vec<(i64, i64)>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    psi: Vec<f64>,
    psi_cum: Vec<f64>,
    source: Levels,
    f: BoundExpr,
    g: Levels,
    cum_x: Levels,
    sum_a: Levels,
    sum_d: Levels,
    sum_ca: Levels,
    sum_cd: Levels,
    u: Levels,
    p: Levels,
    q: Levels,
}

fn domain_rows(grid: &Grid, domain: Domain) -> Vec<(i64, i64)> {
    (0..=grid.nt)
        .map(|n| match domain {
            Domain::Side(side) => grid.region_row(side.region(), n).unwrap_or((0, -1)),
            Domain::Whole => grid.hull_row(n),
        })
        .collect()
}

fn eval_data(e: &Expr, field: &'static str, x: f64) -> Result<f64> {
    e.eval_with(&|name| (name == "x").then_some(x)).map_err(Error::expr(field))
}

impl CauchyMap {
    fn new(spec: &ProblemSpec, grid: Grid, domain: Domain) -> Result<CauchyMap> {
        let (phi_e, psi_e, names) = match domain {
            Domain::Side(Side::Left) => (&spec.phi1, &spec.psi1, ["phi1", "psi1"]),
            Domain::Side(Side::Right) | Domain::Whole => (&spec.phi2, &spec.psi2, ["phi2", "psi2"]),
        };
        let dphi_e = phi_e.differentiate("x").map_err(Error::expr(names[0]))?;
        let rows = domain_rows(&grid, domain);
        let (lo0, hi0) = rows[0];
        if lo0 > hi0 {
            return Err(Error::Coverage("empty initial row".into()));
        }
        let mut phi = Vec::new();
        let mut dphi = Vec::new();
        let mut psi = Vec::new();
        for i in lo0..=hi0 {
            let x = grid.x(i);
            phi.push(eval_data(phi_e, names[0], x)?);
            dphi.push(eval_data(&dphi_e, names[0], x)?);
            psi.push(eval_data(psi_e, names[1], x)?);
        }
        let mut psi_cum = vec![0.0; psi.len()];
        for k in 1..psi.len() {
            psi_cum[k] = psi_cum[k - 1] + 0.5 * grid.dx * (psi[k - 1] + psi[k]);
        }
        let src = spec.bound_source()?;
        let mut source = Levels::zeros(&rows);
        for (n, &(lo, hi)) in rows.iter().enumerate() {
            let t = grid.t(n);
            for i in lo..=hi {
                let v = src.eval(&[t, grid.x(i)]).map_err(Error::expr("F"))?;
                source.set(n, i, v);
            }
        }
        let zeros = Levels::zeros(&rows);
        Ok(CauchyMap {
            grid,
            domain,
            phi,
            dphi,
            psi,
            psi_cum,
            source,
            f: spec.bound_nonlinearity()?,
            g: zeros.clone(),
            cum_x: zeros.clone(),
            sum_a: zeros.clone(),
            sum_d: zeros.clone(),
            sum_ca: zeros.clone(),
            sum_cd: zeros.clone(),
            u: zeros.clone(),
            p: zeros.clone(),
            q: zeros,
            rows,
        })
    }

    fn region(&self) -> Region {
        match self.domain {
            Domain::Side(s) => s.region(),
            Domain::Whole => Region::Q2Star,
        }
    }

    fn last_level(&self) -> usize {
        self.rows.iter().rposition(|r| r.0 <= r.1).unwrap_or(0)
    }

    /// Index into the level-0 arrays.
    #[inline]
    fn k0(&self, i: i64) -> usize {
        (i - self.rows[0].0) as usize
    }

    fn set_initial_level(&mut self) -> Result<()> {
        let (lo, hi) = self.rows[0];
        for i in lo..=hi {
            let k = self.k0(i);
            self.u.set(0, i, self.phi[k]);
            self.p.set(0, i, self.psi[k]);
            self.q.set(0, i, self.dphi[k]);
        }
        self.refresh_sources(0, 0)?;
        Ok(())
    }

    /// Running sums on levels `lo..=hi`; lower levels must be current.
    fn refresh_sums(&mut self, lo: usize, hi: usize) {
        let half_dx = 0.5 * self.grid.dx;
        for n in lo..=hi {
            let (a, b) = self.rows[n];
            let mut acc = 0.0;
            for i in a..=b {
                if i > a {
                    acc += half_dx * (self.g.at(n, i - 1) + self.g.at(n, i));
                }
                self.cum_x.set(n, i, acc);
                let g = self.g.at(n, i);
                let (pa, pd, pca, pcd) = if n == 0 {
                    (0.0, 0.0, 0.0, 0.0)
                } else {
                    (
                        self.sum_a.at(n - 1, i + 1),
                        self.sum_d.at(n - 1, i - 1),
                        self.sum_ca.at(n - 1, i + 1),
                        self.sum_cd.at(n - 1, i - 1),
                    )
                };
                self.sum_a.set(n, i, pa + g);
                self.sum_d.set(n, i, pd + g);
                self.sum_ca.set(n, i, pca + acc);
                self.sum_cd.set(n, i, pcd + acc);
            }
        }
    }

    /// Right-hand side of the representation and its two companions at
    /// node `(n, i)`.
    fn map_node(&self, n: usize, i: i64) -> NodeValue {
        let Grid { a, dt, .. } = self.grid;
        let ni = n as i64;
        let (kp, km) = (self.k0(i + ni), self.k0(i - ni));
        let (mp, mm) = (i + ni, i - ni);
        let g_here = self.g.at(n, i);
        // trapezoid over s in [0, t] of the inner row integrals
        let area = dt
            * (self.sum_ca.at(n, i)
                - self.sum_cd.at(n, i)
                - 0.5 * (self.cum_x.at(0, mp) - self.cum_x.at(0, mm)));
        // line integrals of G along the rays towards x + at and x - at
        let ray_p = dt * (self.sum_a.at(n, i) - 0.5 * self.g.at(0, mp) - 0.5 * g_here);
        let ray_m = dt * (self.sum_d.at(n, i) - 0.5 * self.g.at(0, mm) - 0.5 * g_here);
        let inv2a = 0.5 / a;
        NodeValue {
            u: 0.5 * (self.phi[km] + self.phi[kp])
                + inv2a * (self.psi_cum[kp] - self.psi_cum[km])
                + inv2a * area,
            ut: 0.5 * a * (self.dphi[kp] - self.dphi[km])
                + 0.5 * (self.psi[kp] + self.psi[km])
                + 0.5 * (ray_p + ray_m),
            ux: 0.5 * (self.dphi[km] + self.dphi[kp])
                + inv2a * (self.psi[kp] - self.psi[km])
                + inv2a * (ray_p - ray_m),
        }
    }

    fn into_field(self, report: PicardReport) -> RegionField {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(n, &(lo, hi))| Row {
                lo,
                vals: (lo..=hi)
                    .map(|i| NodeValue {
                        u: self.u.at(n, i),
                        ut: self.p.at(n, i),
                        ux: self.q.at(n, i),
                    })
                    .collect(),
            })
            .collect();
        RegionField::new(self.region(), self.grid, rows, report)
    }
}

impl StripMap for CauchyMap {
    fn seed_sources(&mut self, lo: usize, hi: usize) {
        for n in lo..=hi {
            self.g.rows[n].copy_from_slice(&self.source.rows[n]);
        }
        self.refresh_sums(lo, hi);
    }

    fn refresh_sources(&mut self, lo: usize, hi: usize) -> Result<()> {
        for n in lo..=hi {
            let t = self.grid.t(n);
            let (a, b) = self.rows[n];
            for i in a..=b {
                let args = [t, self.grid.x(i), self.u.at(n, i), self.p.at(n, i), self.q.at(n, i)];
                let fv = self.f.eval(&args).map_err(Error::expr("f"))?;
                self.g.set(n, i, self.source.at(n, i) - fv);
            }
        }
        self.refresh_sums(lo, hi);
        Ok(())
    }

    fn apply(&mut self, lo: usize, hi: usize) -> f64 {
        let mut change: f64 = 0.0;
        for n in lo..=hi {
            let (a, b) = self.rows[n];
            for i in a..=b {
                let v = self.map_node(n, i);
                let du = (v.u - self.u.at(n, i)).abs();
                let dp = (v.ut - self.p.at(n, i)).abs();
                let dq = (v.ux - self.q.at(n, i)).abs();
                // NaN must not be swallowed by max
                let d = if du.is_nan() || dp.is_nan() || dq.is_nan() {
                    f64::NAN
                } else {
                    du.max(dp).max(dq)
                };
                change = if d.is_nan() || change.is_nan() { f64::NAN } else { change.max(d) };
                self.u.set(n, i, v.u);
                self.p.set(n, i, v.ut);
                self.q.set(n, i, v.ux);
            }
        }
        change
    }
}

fn solve_domain(
    spec: &ProblemSpec,
    domain: Domain,
    params: &GridParams,
    picard: &PicardParams,
) -> Result<RegionField> {
    picard.validate()?;
    let grid = Grid::new(spec, params)?;
    let lipschitz = resolve_lipschitz(spec, &grid)?;
    let height = strip_levels(lipschitz, &grid, picard);
    let mut map = CauchyMap::new(spec, grid, domain)?;
    map.set_initial_level()?;
    let strips = picard::strips(1, map.last_level(), height);
    let region = map.region();
    let report = picard::march(&mut map, &strips, picard, region)?;
    Ok(map.into_field(report))
}

/// Solves the Cauchy sub-problem with the data of `side` on the closure of
/// its region (restricted to the domain of dependence of the window).
pub fn solve_cauchy_region(
    spec: &ProblemSpec,
    side: Side,
    grid: &GridParams,
    picard: &PicardParams,
) -> Result<RegionField> {
    solve_domain(spec, Domain::Side(side), grid, picard)
}

/// Solves the Cauchy problem with `phi2`, `psi2` taken as data on the whole
/// line. Useful as a reference when the data is globally smooth.
pub fn solve_cauchy_whole_line(
    spec: &ProblemSpec,
    grid: &GridParams,
    picard: &PicardParams,
) -> Result<RegionField> {
    solve_domain(spec, Domain::Whole, grid, picard)
}

/// One application of the fixed-point map to `iterate`, at every node of
/// the side's region, including the initial level.
pub fn picard_step_cauchy(
    spec: &ProblemSpec,
    side: Side,
    grid: &GridParams,
    iterate: &RegionField,
) -> Result<RegionField> {
    let grid = Grid::new(spec, grid)?;
    let mut map = CauchyMap::new(spec, grid, Domain::Side(side))?;
    let last = map.last_level();
    for n in 0..=last {
        let (lo, hi) = map.rows[n];
        for i in lo..=hi {
            let v = iterate
                .get(n, i)
                .ok_or_else(|| Error::Coverage(format!("iterate has no node ({n}, {i})")))?;
            map.u.set(n, i, v.u);
            map.p.set(n, i, v.ut);
            map.q.set(n, i, v.ux);
        }
    }
    map.refresh_sources(0, last)?;
    map.apply(0, last);
    Ok(map.into_field(PicardReport::default()))
}
