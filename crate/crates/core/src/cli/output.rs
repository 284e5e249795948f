//! CSV grid dumps and the structured reports.

use std::io::{self, Write};

use serde::Serialize;

use crate::assembly::{CaseKind, JumpData, Solution};
use crate::field::PicardReport;
use crate::verify::{ConvergenceStudy, VerificationReport};

pub const CSV_HEADER: &str = "t,x,region,u,ut,ux";

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
fn num(v: f64) -> String {
    let m = v.abs();
    if v == 0.0 || (1e-4..1e7).contains(&m) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Writes every window node as `t,x,region,u,ut,ux`, time outer, space
/// inner, numbers with 17 significant digits.
pub fn write_csv(sol: &Solution, out: &mut dyn Write) -> io::Result<()> {
    let g = *sol.grid();
    let mut w = io::BufWriter::new(out);
    writeln!(w, "{CSV_HEADER}")?;
    for (n, i, region, v) in sol.window_nodes() {
        writeln!(
            w,
            "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e}",
            g.t(n),
            g.x(i),
            region,
            v.u,
            v.ut,
            v.ux
        )?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub case: String,
    pub phi1_at_x0: f64,
    pub phi2_at_x0: f64,
    #[serde(rename = "A")]
    pub value_at_x0: f64,
    pub left_jump: f64,
    pub right_jump: f64,
    pub generalized_dalembert: bool,
}

impl ClassifyReport {
    pub fn new(case: CaseKind, jumps: &JumpData, dalembert: bool) -> Self {
        ClassifyReport {
            case: case.to_string(),
            phi1_at_x0: jumps.phi1_at_x0,
            phi2_at_x0: jumps.phi2_at_x0,
            value_at_x0: jumps.value_at_x0,
            left_jump: jumps.left,
            right_jump: jumps.right,
            generalized_dalembert: dalembert,
        }
    }

    pub fn text(&self) -> String {
        format!(
            "case: {}\nphi1(x0): {}\nphi2(x0): {}\nA: {}\nleft jump (A - phi1(x0)): {}\nright jump (phi2(x0) - A): {}\ngeneralized d'Alembert: {}\n",
            self.case,
            num(self.phi1_at_x0),
            num(self.phi2_at_x0),
            num(self.value_at_x0),
            num(self.left_jump),
            num(self.right_jump),
            if self.generalized_dalembert { "yes" } else { "no" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripSummary {
    pub region: u8,
    pub strips: usize,
    pub max_iterations: usize,
    pub final_update: f64,
}

impl StripSummary {
    pub fn of(sol: &Solution) -> Vec<StripSummary> {
        crate::geometry::Region::ALL
            .iter()
            .map(|&r| {
                let rep: &PicardReport = sol.field(r).report();
                StripSummary {
                    region: r.number(),
                    strips: rep.strips.len(),
                    max_iterations: rep.max_iterations(),
                    final_update: rep.final_update(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub case: String,
    pub nt: usize,
    pub dt: f64,
    pub dx: f64,
    pub nodes: usize,
    pub picard: Vec<StripSummary>,
}

impl SolveReport {
    pub fn new(sol: &Solution) -> Self {
        let g = sol.grid();
        SolveReport {
            case: sol.case().to_string(),
            nt: g.nt,
            dt: g.dt,
            dx: g.dx,
            nodes: sol.window_nodes().count(),
            picard: StripSummary::of(sol),
        }
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "case: {}\ngrid: nt = {}, dt = {:e}, dx = {:e}, {} window nodes\n",
            self.case, self.nt, self.dt, self.dx, self.nodes
        );
        for p in &self.picard {
            s += &format!(
                "region {}: {} strips, at most {} iterations, final update {:.3e}\n",
                p.region, p.strips, p.max_iterations, p.final_update
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutput {
    pub case: String,
    pub report: VerificationReport,
    pub picard: Vec<StripSummary>,
}

impl VerifyOutput {
    pub fn text(&self) -> String {
        let mut s = format!("case: {}\n", self.case);
        s += &format!("{:<20} {:>12} {:>12}  result\n", "check", "measured", "tolerance");
        for c in &self.report.checks {
            s += &format!(
                "{:<20} {:>12.4e} {:>12.4e}  {}\n",
                c.name,
                c.measured,
                c.tolerance,
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        let r = &self.report;
        s += &format!(
            "left jump: {}  (ut, ux): ({}, {})\nright jump: {}  (ut, ux): ({}, {})\noverall: {}\n",
            num(r.left_jump),
            num(r.left_derivative_jump.0),
            num(r.left_derivative_jump.1),
            num(r.right_jump),
            num(r.right_derivative_jump.0),
            num(r.right_derivative_jump.1),
            if r.passed { "pass" } else { "FAIL" }
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeOutput {
    pub reference: String,
    pub study: ConvergenceStudy,
}

impl ConvergeOutput {
    pub fn text(&self) -> String {
        let mut s = format!("reference: {}\nprobes: {}\n", self.reference, self.study.probes);
        s += &format!("{:>8} {:>14} {:>14}\n", "nt", "h", "sup error");
        for l in &self.study.levels {
            s += &format!("{:>8} {:>14.6e} {:>14.6e}\n", l.nt, l.h, l.error);
        }
        s += &format!("order: {}\n", self.study.order);
        s
    }
}

/// Machine-readable form: the same TOML dialect as the configuration.
pub fn machine<T: Serialize>(command: &str, body: &T) -> String {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        command: &'a str,
        #[serde(flatten)]
        body: &'a T,
    }
    toml::to_string(&Wrapped { command, body }).expect("reports always serialize")
}
