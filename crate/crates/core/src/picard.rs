//! Strip-marching Picard driver shared by the Cauchy and Goursat solvers.

use crate::error::{Error, Result};
use crate::field::{PicardReport, StripReport};
use crate::geometry::Region;
use crate::problem::PicardParams;

/// A discrete fixed-point map marched in strips of "levels".
///
/// Within a strip the map may read anything at or below the strip's top
/// level; everything below the strip is frozen.
pub(crate) trait StripMap {
    /// Sets the right-hand side on levels `lo..=hi` to the source term only
    /// (the nonlinearity dropped).
    fn seed_sources(&mut self, lo: usize, hi: usize);

    /// Recomputes the right-hand side on levels `lo..=hi` from the current
    /// iterate.
    fn refresh_sources(&mut self, lo: usize, hi: usize) -> Result<()>;

    /// Applies the map on levels `lo..=hi`, storing the new iterate and
    /// returning the sup-norm of the change.
    fn apply(&mut self, lo: usize, hi: usize) -> f64;
}

/// Splits levels `first..=last` into consecutive strips of at most `height`
/// levels.
pub(crate) fn strips(first: usize, last: usize, height: usize) -> Vec<(usize, usize)> {
    let height = height.max(1);
    let mut out = Vec::new();
    let mut lo = first;
    while lo <= last {
        let hi = (lo + height - 1).min(last);
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

pub(crate) fn march(
    map: &mut impl StripMap,
    strips: &[(usize, usize)],
    params: &PicardParams,
    region: Region,
) -> Result<PicardReport> {
    let mut report = PicardReport::default();
    for (k, &(lo, hi)) in strips.iter().enumerate() {
        map.seed_sources(lo, hi);
        map.apply(lo, hi);
        let mut updates = Vec::new();
        let mut converged = false;
        for _ in 0..params.max_iter {
            map.refresh_sources(lo, hi)?;
            let change = map.apply(lo, hi);
            updates.push(change);
            if !change.is_finite() {
                break;
            }
            if change <= params.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                region,
                strip: k,
                iterations: updates.len(),
                last_update: updates.last().copied().unwrap_or(f64::NAN),
            });
        }
        map.refresh_sources(lo, hi)?;
        report.strips.push(StripReport {
            levels: (lo, hi),
            iterations: updates.len(),
            updates,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_partition() {
        assert_eq!(strips(1, 10, 4), vec![(1, 4), (5, 8), (9, 10)]);
        assert_eq!(strips(1, 3, 10), vec![(1, 3)]);
        assert_eq!(strips(2, 4, 0), vec![(2, 2), (3, 3), (4, 4)]);
        assert!(strips(5, 4, 2).is_empty());
    }

    /// x = 0.5 x + 1 on every level, contraction 1/2.
    struct Halving {
        x: Vec<f64>,
        rhs: Vec<f64>,
    }

    impl StripMap for Halving {
        fn seed_sources(&mut self, lo: usize, hi: usize) {
            for k in lo..=hi {
                self.rhs[k] = 1.0;
            }
        }
        fn refresh_sources(&mut self, lo: usize, hi: usize) -> Result<()> {
            for k in lo..=hi {
                self.rhs[k] = 0.5 * self.x[k] + 1.0;
            }
            Ok(())
        }
        fn apply(&mut self, lo: usize, hi: usize) -> f64 {
            let mut d: f64 = 0.0;
            for k in lo..=hi {
                d = d.max((self.rhs[k] - self.x[k]).abs());
                self.x[k] = self.rhs[k];
            }
            d
        }
    }

    #[test]
    fn converges_and_reports() {
        let mut m = Halving { x: vec![0.0; 4], rhs: vec![0.0; 4] };
        let params = PicardParams::default();
        let rep = march(&mut m, &strips(0, 3, 2), &params, Region::Q1Star).unwrap();
        assert_eq!(rep.strips.len(), 2);
        assert!(m.x.iter().all(|v| (v - 2.0).abs() < 1e-9));
        for s in &rep.strips {
            for w in s.updates.windows(2) {
                assert!((w[1] / w[0] - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn iteration_cap() {
        let mut m = Halving { x: vec![0.0; 2], rhs: vec![0.0; 2] };
        let params = PicardParams { max_iter: 3, ..PicardParams::default() };
        match march(&mut m, &strips(0, 1, 2), &params, Region::Q2Star) {
            Err(Error::NonConvergence { iterations: 3, last_update, .. }) => {
                assert!((last_update - 0.125).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
    }
}
