//! Problem data, discretization parameters and the aligned grid.

use crate::error::{Error, Result};
use crate::expr::{parse, BoundExpr, Expr};
use crate::geometry::Region;

/// Variables available to the initial data pieces.
pub const DATA_VARS: &[&str] = &["x"];
/// Variables available to the source term `F`.
pub const SOURCE_VARS: &[&str] = &["t", "x"];
/// Variables available to the nonlinearity `f`.
pub const NONLINEAR_VARS: &[&str] = &["t", "x", "u", "ut", "ux"];

/// The equation `u_tt - a^2 u_xx + f(t, x, u, u_t, u_x) = F(t, x)` with
/// initial data that may jump at `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub a: f64,
    pub x0: f64,
    /// Value of the initial displacement at `x0` itself.
    pub value_at_x0: f64,
    pub phi1: Expr,
    pub phi2: Expr,
    pub psi1: Expr,
    pub psi2: Expr,
    pub source: Expr,
    pub nonlinearity: Expr,
    /// Lipschitz constant of `f` in `(u, u_t, u_x)`, estimated when absent.
    pub lipschitz: Option<f64>,
}

/// Text form of a [`ProblemSpec`]; every expression defaults to `"0"`.
#[derive(Debug, Clone)]
pub struct ProblemBuilder {
    a: f64,
    x0: f64,
    value_at_x0: f64,
    exprs: [String; 6],
    lipschitz: Option<f64>,
}

const FIELD_NAMES: [&str; 6] = ["phi1", "phi2", "psi1", "psi2", "F", "f"];

impl ProblemBuilder {
    pub fn phi1(mut self, src: &str) -> Self {
        self.exprs[0] = src.into();
        self
    }
    pub fn phi2(mut self, src: &str) -> Self {
        self.exprs[1] = src.into();
        self
    }
    pub fn psi1(mut self, src: &str) -> Self {
        self.exprs[2] = src.into();
        self
    }
    pub fn psi2(mut self, src: &str) -> Self {
        self.exprs[3] = src.into();
        self
    }
    pub fn source(mut self, src: &str) -> Self {
        self.exprs[4] = src.into();
        self
    }
    pub fn nonlinearity(mut self, src: &str) -> Self {
        self.exprs[5] = src.into();
        self
    }
    pub fn lipschitz(mut self, l: Option<f64>) -> Self {
        self.lipschitz = l;
        self
    }

    pub fn build(self) -> Result<ProblemSpec> {
        let vars = |k: usize| match k {
            0..=3 => DATA_VARS,
            4 => SOURCE_VARS,
            _ => NONLINEAR_VARS,
        };
        let mut parsed = Vec::with_capacity(6);
        for (k, src) in self.exprs.iter().enumerate() {
            parsed.push(parse(src, vars(k)).map_err(Error::expr(FIELD_NAMES[k]))?);
        }
        let mut it = parsed.into_iter();
        let mut next = || it.next().unwrap();
        let spec = ProblemSpec {
            a: self.a,
            x0: self.x0,
            value_at_x0: self.value_at_x0,
            phi1: next(),
            phi2: next(),
            psi1: next(),
            psi2: next(),
            source: next(),
            nonlinearity: next(),
            lipschitz: self.lipschitz,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl ProblemSpec {
    pub fn builder(a: f64, x0: f64, value_at_x0: f64) -> ProblemBuilder {
        ProblemBuilder {
            a,
            x0,
            value_at_x0,
            exprs: Default::default(),
            lipschitz: None,
        }
        .phi1("0")
        .phi2("0")
        .psi1("0")
        .psi2("0")
        .source("0")
        .nonlinearity("0")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidSpec(format!("wave speed a = {} must be positive", self.a)));
        }
        if !self.x0.is_finite() || !self.value_at_x0.is_finite() {
            return Err(Error::InvalidSpec("x0 and A must be finite".into()));
        }
        if let Some(l) = self.lipschitz {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidSpec(format!("Lipschitz constant {l} must be >= 0")));
            }
        }
        let exprs = [
            (&self.phi1, DATA_VARS),
            (&self.phi2, DATA_VARS),
            (&self.psi1, DATA_VARS),
            (&self.psi2, DATA_VARS),
            (&self.source, SOURCE_VARS),
            (&self.nonlinearity, NONLINEAR_VARS),
        ];
        for (k, (e, allowed)) in exprs.into_iter().enumerate() {
            if let Some(bad) = e.free_vars().into_iter().find(|v| !allowed.contains(&v.as_str())) {
                return Err(Error::Expression {
                    field: FIELD_NAMES[k],
                    source: crate::expr::ExprError::UnknownVariable(bad),
                });
            }
        }
        Ok(())
    }

    fn eval_data(e: &Expr, field: &'static str, x: f64) -> Result<f64> {
        e.eval_with(&|name| (name == "x").then_some(x)).map_err(Error::expr(field))
    }

    pub fn phi1_at(&self, x: f64) -> Result<f64> {
        Self::eval_data(&self.phi1, "phi1", x)
    }

    pub fn phi2_at(&self, x: f64) -> Result<f64> {
        Self::eval_data(&self.phi2, "phi2", x)
    }

    pub fn psi1_at(&self, x: f64) -> Result<f64> {
        Self::eval_data(&self.psi1, "psi1", x)
    }

    pub fn psi2_at(&self, x: f64) -> Result<f64> {
        Self::eval_data(&self.psi2, "psi2", x)
    }

    /// The piecewise initial displacement, `A` at `x0`.
    pub fn phi_at(&self, x: f64) -> Result<f64> {
        if x < self.x0 {
            self.phi1_at(x)
        } else if x > self.x0 {
            self.phi2_at(x)
        } else {
            Ok(self.value_at_x0)
        }
    }

    /// The piecewise initial velocity. Undefined at `x0`; `None` there.
    pub fn psi_at(&self, x: f64) -> Result<Option<f64>> {
        if x < self.x0 {
            self.psi1_at(x).map(Some)
        } else if x > self.x0 {
            self.psi2_at(x).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn source_at(&self, t: f64, x: f64) -> Result<f64> {
        self.source
            .eval_with(&|name| match name {
                "t" => Some(t),
                "x" => Some(x),
                _ => None,
            })
            .map_err(Error::expr("F"))
    }

    pub fn nonlinearity_at(&self, t: f64, x: f64, u: f64, ut: f64, ux: f64) -> Result<f64> {
        self.nonlinearity
            .eval_with(&|name| match name {
                "t" => Some(t),
                "x" => Some(x),
                "u" => Some(u),
                "ut" => Some(ut),
                "ux" => Some(ux),
                _ => None,
            })
            .map_err(Error::expr("f"))
    }

    /// Left and right limits of the initial displacement at `x0`.
    pub fn one_sided_limits(&self) -> Result<(f64, f64)> {
        Ok((self.phi1_at(self.x0)?, self.phi2_at(self.x0)?))
    }

    pub(crate) fn bound_nonlinearity(&self) -> Result<BoundExpr> {
        self.nonlinearity.bind(NONLINEAR_VARS).map_err(Error::expr("f"))
    }

    pub(crate) fn bound_source(&self) -> Result<BoundExpr> {
        self.source.bind(SOURCE_VARS).map_err(Error::expr("F"))
    }
}

/// Time horizon, spatial window and resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub t_final: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub nt: usize,
}

/// Controls for the fixed-point iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardParams {
    pub tol: f64,
    pub max_iter: usize,
    /// Target contraction factor used to size the time strips.
    pub strip_safety: f64,
}

impl Default for PicardParams {
    fn default() -> Self {
        PicardParams {
            tol: 1e-10,
            max_iter: 64,
            strip_safety: 0.5,
        }
    }
}

impl PicardParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidPicard(format!("tol = {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidPicard("max_iter must be at least 1".into()));
        }
        if !(self.strip_safety > 0.0 && self.strip_safety < 1.0) {
            return Err(Error::InvalidPicard(format!(
                "strip_safety = {} must lie in (0, 1)",
                self.strip_safety
            )));
        }
        Ok(())
    }
}

/// Uniform grid with `dx = a dt` and `x0` on a node.
///
/// Node `(n, i)` sits at `t = n dt`, `x = x0 + i dx`. The output window covers
/// `i_lo..=i_hi`; the solvers also fill the domain of dependence of the
/// window, which at level `n` is `i_lo - (nt - n) ..= i_hi + (nt - n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub x0: f64,
    pub dt: f64,
    pub dx: f64,
    pub nt: usize,
    pub i_lo: i64,
    pub i_hi: i64,
}

impl Grid {
    pub fn new(spec: &ProblemSpec, params: &GridParams) -> Result<Grid> {
        spec.validate()?;
        let GridParams { t_final, x_lo, x_hi, nt } = *params;
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidGrid(format!("T = {t_final} must be positive")));
        }
        if nt < 2 {
            return Err(Error::InvalidGrid("nt must be at least 2".into()));
        }
        if !(x_lo < spec.x0 && spec.x0 < x_hi) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "window [{x_lo}, {x_hi}] must contain x0 = {} in its interior",
                spec.x0
            )));
        }
        let dt = t_final / nt as f64;
        let dx = spec.a * dt;
        // outward rounding, ignoring representation error at exact nodes
        let i_lo = ((x_lo - spec.x0) / dx + 1e-9).floor() as i64;
        let i_hi = ((x_hi - spec.x0) / dx - 1e-9).ceil() as i64;
        Ok(Grid {
            a: spec.a,
            x0: spec.x0,
            dt,
            dx,
            nt,
            i_lo: i_lo.min(-1),
            i_hi: i_hi.max(1),
        })
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn x(&self, i: i64) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn t_final(&self) -> f64 {
        self.t(self.nt)
    }

    /// Adjusted window `[x_lo, x_hi]`.
    pub fn window(&self) -> (f64, f64) {
        (self.x(self.i_lo), self.x(self.i_hi))
    }

    /// Index range of the domain of dependence at level `n`.
    pub fn hull_row(&self, n: usize) -> (i64, i64) {
        let spread = (self.nt - n) as i64;
        (self.i_lo - spread, self.i_hi + spread)
    }

    /// Nodes of the closed region at level `n` inside the domain of
    /// dependence, or `None` when the row is empty.
    pub fn region_row(&self, region: Region, n: usize) -> Option<(i64, i64)> {
        let (lo, hi) = self.hull_row(n);
        let n = n as i64;
        let (lo, hi) = match region {
            Region::Q1Star => (lo, hi.min(-n)),
            Region::Q2Star => (lo.max(n), hi),
            Region::Q3Star => (lo.max(-n), hi.min(n)),
        };
        (lo <= hi).then_some((lo, hi))
    }

    /// Region of node `(n, i)` under the closure convention.
    pub fn node_region(&self, n: usize, i: i64) -> Region {
        let n = n as i64;
        Region::from_offsets((i + n) as f64, (i - n) as f64)
    }
}

/// Number of time levels per Picard strip.
///
/// The strip height is `rho / (L (1 + 1/a + 1/(2a)))`, capped at `T` and
/// rounded down to whole levels (at least one).
pub fn strip_levels(lipschitz: f64, grid: &Grid, picard: &PicardParams) -> usize {
    if lipschitz <= 0.0 {
        return grid.nt;
    }
    let a = grid.a;
    let height = picard.strip_safety / (lipschitz * (1.0 + 1.0 / a + 1.0 / (2.0 * a)) + f64::MIN_POSITIVE);
    let height = height.min(grid.t_final());
    ((height / grid.dt + 1e-9).floor() as usize).clamp(1, grid.nt)
}

/// Resolves the Lipschitz constant: the declared value, or an estimate.
///
/// The estimate samples the gradient of `f` in `(u, u_t, u_x)` by central
/// differences on a coarse lattice over the grid's data range and the cube
/// `[-R, R]^3`, `R = 1 + 2 max |data|`, and returns 1.5 times the largest
/// l1 norm seen.
pub fn resolve_lipschitz(spec: &ProblemSpec, grid: &Grid) -> Result<f64> {
    if let Some(l) = spec.lipschitz {
        return Ok(l);
    }
    let f = &spec.nonlinearity;
    if !["u", "ut", "ux"].iter().any(|v| f.depends_on(v)) {
        return Ok(0.0);
    }
    let bound = spec.bound_nonlinearity()?;
    let (lo, hi) = grid.hull_row(0);
    let dphi1 = spec.phi1.differentiate("x").ok();
    let dphi2 = spec.phi2.differentiate("x").ok();
    let mut data_max: f64 = spec.value_at_x0.abs();
    let samples = 64;
    for k in 0..=samples {
        let i = lo + (hi - lo) * k / samples;
        let x = grid.x(i);
        let (phi, psi, dphi) = if i <= 0 {
            (&spec.phi1, &spec.psi1, &dphi1)
        } else {
            (&spec.phi2, &spec.psi2, &dphi2)
        };
        for e in [Some(phi), Some(psi), dphi.as_ref()].into_iter().flatten() {
            if let Ok(v) = ProblemSpec::eval_data(e, "data", x) {
                data_max = data_max.max(v.abs());
            }
        }
    }
    let radius = 1.0 + 2.0 * data_max;
    let pts = |lo: f64, hi: f64, m: usize| (0..m).map(move |k| lo + (hi - lo) * k as f64 / (m - 1) as f64);
    let h = 1e-6 * radius;
    let mut best: Option<f64> = None;
    let t_final = grid.t_final();
    for t in pts(0.0, t_final, 3) {
        for x in pts(grid.x(lo), grid.x(hi), 5) {
            for u in pts(-radius, radius, 5) {
                for ut in pts(-radius, radius, 5) {
                    for ux in pts(-radius, radius, 5) {
                        let base = [t, x, u, ut, ux];
                        let mut norm = 0.0;
                        let mut ok = true;
                        for slot in 2..5 {
                            let mut up = base;
                            let mut dn = base;
                            up[slot] += h;
                            dn[slot] -= h;
                            match (bound.eval(&up), bound.eval(&dn)) {
                                (Ok(a), Ok(b)) => norm += ((a - b) / (2.0 * h)).abs(),
                                _ => ok = false,
                            }
                        }
                        if ok {
                            best = Some(best.map_or(norm, |b: f64| b.max(norm)));
                        }
                    }
                }
            }
        }
    }
    best.map(|b| 1.5 * b).ok_or_else(|| {
        Error::InvalidSpec("could not estimate the Lipschitz constant of f: no evaluable sample".into())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ProblemSpec {
        ProblemSpec::builder(1.0, 0.0, 0.0).build().unwrap()
    }

    #[test]
    fn grid_alignment() {
        let g = Grid::new(
            &spec(),
            &GridParams { t_final: 1.0, x_lo: -3.0, x_hi: 3.0, nt: 128 },
        )
        .unwrap();
        assert_eq!(g.dx, g.a * g.dt);
        assert_eq!((g.i_lo, g.i_hi), (-384, 384));
        assert_eq!(g.hull_row(0), (-512, 512));
        assert_eq!(g.region_row(Region::Q3Star, 0), Some((0, 0)));
        assert_eq!(g.region_row(Region::Q1Star, 3), Some((-509, -3)));
    }

    #[test]
    fn window_is_widened_outward_to_nodes() {
        let s = ProblemSpec::builder(2.0, 0.3, 0.0).build().unwrap();
        let g = Grid::new(&s, &GridParams { t_final: 1.0, x_lo: -1.01, x_hi: 1.0, nt: 10 }).unwrap();
        let (lo, hi) = g.window();
        assert!(lo <= -1.01 && lo > -1.01 - g.dx);
        assert!(hi >= 1.0 && hi < 1.0 + g.dx);
    }

    #[test]
    fn grid_rejects_bad_window() {
        let p = GridParams { t_final: 1.0, x_lo: 0.5, x_hi: 3.0, nt: 8 };
        assert!(matches!(Grid::new(&spec(), &p), Err(Error::InvalidGrid(_))));
        let p = GridParams { t_final: 1.0, x_lo: -1.0, x_hi: 1.0, nt: 1 };
        assert!(matches!(Grid::new(&spec(), &p), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn builder_reports_field() {
        let err = ProblemSpec::builder(1.0, 0.0, 0.0).phi1("u + 1").build().unwrap_err();
        assert!(matches!(err, Error::Expression { field: "phi1", .. }));
        let err = ProblemSpec::builder(0.0, 0.0, 0.0).build().unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
    }

    #[test]
    fn strip_sizing() {
        let g = Grid::new(&spec(), &GridParams { t_final: 1.0, x_lo: -1.0, x_hi: 1.0, nt: 100 }).unwrap();
        let p = PicardParams::default();
        assert_eq!(strip_levels(0.0, &g, &p), 100);
        // 0.5 / 2.5 = 0.2
        assert_eq!(strip_levels(1.0, &g, &p), 20);
        assert_eq!(strip_levels(1e12, &g, &p), 1);
    }

    #[test]
    fn lipschitz_estimate() {
        let g = Grid::new(&spec(), &GridParams { t_final: 1.0, x_lo: -1.0, x_hi: 1.0, nt: 8 }).unwrap();
        let s = ProblemSpec::builder(1.0, 0.0, 0.0).nonlinearity("2*u - 0.5*ux + t").build().unwrap();
        assert!((resolve_lipschitz(&s, &g).unwrap() - 3.75).abs() < 1e-6);
        let s = ProblemSpec::builder(1.0, 0.0, 0.0).nonlinearity("sin(x) + t").build().unwrap();
        assert_eq!(resolve_lipschitz(&s, &g).unwrap(), 0.0);
        let s = ProblemSpec::builder(1.0, 0.0, 0.0).nonlinearity("u").lipschitz(Some(7.0)).build().unwrap();
        assert_eq!(resolve_lipschitz(&s, &g).unwrap(), 7.0);
    }
}
