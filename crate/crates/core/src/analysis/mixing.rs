use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{tv_slices, DistVector, Kernel, DEFAULT_EPS};
use crate::error::{Error, Result};

pub const DEFAULT_T_MAX: usize = 1_000_000;

/// Largest space for which every row of `P^t` is held densely.
pub const DEFAULT_DENSE_CAP: usize = 2048;

/// Which starting distributions the mixing time quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    /// Maximum over all point masses.
    Worst,
    /// A single point mass.
    From(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingOptions {
    pub eps: f64,
    pub t_max: usize,
    pub start: Start,
    pub dense_cap: usize,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions { eps: DEFAULT_EPS, t_max: DEFAULT_T_MAX, start: Start::Worst, dense_cap: DEFAULT_DENSE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub t_mix: usize,
    pub eps: f64,
    /// Start attaining the largest distance at the last step above `eps`
    /// (at step 0 when `t_mix == 0`).
    pub worst_start: usize,
    /// `tv_curve[t]` for `t = 0..=t_mix`.
    pub tv_curve: Vec<f64>,
    pub conductance: Option<f64>,
    /// `1/φ` when the conductance is known.
    pub t_relax: Option<f64>,
}

impl MixingReport {
    pub fn with_conductance(mut self, phi: f64) -> Self {
        self.conductance = Some(phi);
        self.t_relax = Some(1.0 / phi);
        self
    }
}

/// All tracked rows of `P^t`, advanced in lockstep: one vector-kernel
/// product per row per step.
struct Lockstep<'a> {
    kernel: &'a Kernel,
    pi: &'a [f64],
    starts: Vec<usize>,
    rows: Vec<f64>,
    next: Vec<f64>,
}

impl<'a> Lockstep<'a> {
    fn new(kernel: &'a Kernel, stationary: &'a DistVector, start: Start, dense_cap: usize) -> Result<Self> {
        let n = kernel.len();
        if stationary.len() != n {
            return Err(Error::Param("stationary vector and kernel differ in size".into()));
        }
        let starts: Vec<usize> = match start {
            Start::Worst => {
                if n > dense_cap {
                    return Err(Error::Capacity { what: "worst-case mixing rows", cap: dense_cap, partial: n });
                }
                (0..n).collect()
            }
            Start::From(i) if i < n => vec![i],
            Start::From(i) => return Err(Error::Param(format!("start state {i} out of range"))),
        };
        let mut rows = vec![0.0; starts.len() * n];
        for (r, &s) in starts.iter().enumerate() {
            rows[r * n + s] = 1.0;
        }
        let next = vec![0.0; rows.len()];
        Ok(Lockstep { kernel, pi: &stationary.probs, starts, rows, next })
    }

    /// Largest distance over the tracked rows and the row attaining it
    /// (lowest row on ties).
    fn measure(&self) -> (f64, usize) {
        let n = self.kernel.len();
        self.rows.par_chunks(n).map(|row| tv_slices(row, self.pi)).enumerate().map(|(r, tv)| (tv, r)).reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        )
    }

    fn advance(&mut self) {
        let n = self.kernel.len();
        let kernel = self.kernel;
        self.rows.par_chunks(n).zip(self.next.par_chunks_mut(n)).for_each(|(row, out)| kernel.apply_into(row, out));
        std::mem::swap(&mut self.rows, &mut self.next);
    }
}

/// First `t` at which the distance to `stationary` after `t` steps is at most
/// `eps`, maximized over the starts selected by `opts.start`.
pub fn exact_mixing_time(kernel: &Kernel, stationary: &DistVector, opts: &MixingOptions) -> Result<MixingReport> {
    if !(opts.eps > 0.0 && opts.eps < 1.0) {
        return Err(Error::Param(format!("eps must lie in (0, 1), got {}", opts.eps)));
    }
    let mut walk = Lockstep::new(kernel, stationary, opts.start, opts.dense_cap)?;
    let (mut tv, mut arg) = walk.measure();
    let mut curve = vec![tv];
    let mut worst = arg;
    let mut t = 0;
    while tv > opts.eps {
        if t == opts.t_max {
            return Err(Error::Timeout { t_max: opts.t_max, tv });
        }
        worst = arg;
        walk.advance();
        t += 1;
        (tv, arg) = walk.measure();
        curve.push(tv);
    }
    if t == 0 {
        worst = arg;
    }
    Ok(MixingReport {
        t_mix: t,
        eps: opts.eps,
        worst_start: walk.starts[worst],
        tv_curve: curve,
        conductance: None,
        t_relax: None,
    })
}

/// Distance curve for `t = 0..=steps` regardless of any threshold; for
/// chains too slow for [`exact_mixing_time`] to finish.
pub fn tv_curve(
    kernel: &Kernel,
    stationary: &DistVector,
    start: Start,
    steps: usize,
    dense_cap: usize,
) -> Result<Vec<f64>> {
    let mut walk = Lockstep::new(kernel, stationary, start, dense_cap)?;
    let mut curve = Vec::with_capacity(steps + 1);
    curve.push(walk.measure().0);
    for _ in 0..steps {
        walk.advance();
        curve.push(walk.measure().0);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{build_kernel, gibbs, StateSpace};
    use crate::graph::{generate, Family};

    fn setup(f: Family, n: usize, x: f64) -> (Kernel, DistVector) {
        let s = StateSpace::build(&generate(f, n, 0).unwrap(), 1000).unwrap();
        (build_kernel(&s, x).unwrap(), gibbs(&s, x))
    }

    #[test]
    fn k2_mixes_in_one_step() {
        let (k, pi) = setup(Family::Path, 2, 0.0);
        let r = exact_mixing_time(&k, &pi, &MixingOptions::default()).unwrap();
        assert_eq!(r.t_mix, 1);
        assert_eq!(r.tv_curve, vec![0.5, 0.0]);
    }

    #[test]
    fn curve_brackets_threshold() {
        let (k, pi) = setup(Family::Path, 4, 3.0);
        let r = exact_mixing_time(&k, &pi, &MixingOptions::default()).unwrap();
        assert!(r.tv_curve[r.t_mix] <= r.eps);
        assert!(r.tv_curve[r.t_mix - 1] > r.eps);
        assert!(r.tv_curve.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn single_start_never_exceeds_worst_case() {
        let (k, pi) = setup(Family::Cycle, 5, 1.0);
        let worst = exact_mixing_time(&k, &pi, &MixingOptions::default()).unwrap();
        let from_empty =
            exact_mixing_time(&k, &pi, &MixingOptions { start: Start::From(0), ..Default::default() }).unwrap();
        assert!(from_empty.t_mix <= worst.t_mix);
    }

    #[test]
    fn fixed_horizon_curve_agrees() {
        let (k, pi) = setup(Family::Cycle, 4, 2.0);
        let r = exact_mixing_time(&k, &pi, &MixingOptions::default()).unwrap();
        let c = tv_curve(&k, &pi, Start::Worst, r.t_mix + 5, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(&c[..=r.t_mix], &r.tv_curve[..]);
        assert_eq!(c.len(), r.t_mix + 6);
    }

    #[test]
    fn timeout_and_caps() {
        let (k, pi) = setup(Family::Path, 4, 3.0);
        let err = exact_mixing_time(&k, &pi, &MixingOptions { t_max: 1, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::Timeout { t_max: 1, .. }));
        let err = exact_mixing_time(&k, &pi, &MixingOptions { dense_cap: 3, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        let err = exact_mixing_time(&k, &pi, &MixingOptions { eps: 0.0, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::Param(_)));
    }
}
