use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gap below which two flowing intervals are treated as touching.
pub const MERGE_TOLERANCE: f64 = 1e-13;

/// A finite union of disjoint closed intervals, sorted, with positive gaps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    total_length: f64,
}

impl TryFrom<Vec<(f64, f64)>> for IntervalUnion {
    type Error = Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        IntervalUnion::new(v)
    }
}

impl From<IntervalUnion> for Vec<(f64, f64)> {
    fn from(m: IntervalUnion) -> Self {
        m.intervals
    }
}

impl IntervalUnion {
    /// Validates that the intervals are finite, sorted and separated by positive gaps.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for (k, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Domain(format!("interval {k} = [{a}, {b}] is empty or not finite")));
            }
            if k > 0 && intervals[k - 1].1 >= a {
                return Err(Error::Domain(format!("intervals {} and {k} overlap or touch", k - 1)));
            }
        }
        Ok(Self::from_sorted(intervals))
    }

    /// Sorts the intervals and merges any that overlap or touch.
    pub fn normalized(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::Domain("intervals must be finite with a < b".into()));
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Ok(Self::from_sorted(out))
    }

    fn from_sorted(intervals: Vec<(f64, f64)>) -> Self {
        let total_length = intervals.iter().map(|(a, b)| b - a).sum();
        IntervalUnion { intervals, total_length }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Whether every interval of `self` lies inside some interval of `other`, up to `tol`.
    pub fn is_subset_of(&self, other: &IntervalUnion, tol: f64) -> bool {
        self.intervals.iter().all(|&(a, b)| other.intervals.iter().any(|&(c, d)| c - tol <= a && b <= d + tol))
    }

    /// Hausdorff distance between the two sets (infinite if exactly one is empty).
    pub fn hausdorff(&self, other: &IntervalUnion) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return f64::INFINITY,
            _ => {}
        }
        // On each interval of p the distance to q is piecewise linear, so its
        // maximum sits at an endpoint or at the midpoint of a gap of q.
        let one_sided = |p: &IntervalUnion, q: &IntervalUnion| {
            let gaps = q.intervals.windows(2).map(|w| 0.5 * (w[0].1 + w[1].0));
            p.intervals
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .chain(gaps.filter(|&x| p.contains(x)))
                .map(|x| q.distance_to(x))
                .fold(0.0, f64::max)
        };
        one_sided(self, other).max(one_sided(other, self))
    }

    fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| if x < a { a - x } else if x > b { x - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Event history of a flow: the state right after each merge.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct FlowTrace {
    pub events: Vec<(f64, Vec<(f64, f64)>)>,
}

/// Centred interval of the same total length.
pub fn symmetrize_set(m: &IntervalUnion) -> IntervalUnion {
    if m.is_empty() {
        return IntervalUnion::empty();
    }
    let half = 0.5 * m.total_length();
    IntervalUnion::from_sorted(vec![(-half, half)])
}

/// `T_t(M)` for a finite union of closed intervals; `t = f64::INFINITY` gives `M*`.
pub fn flow_set(m: &IntervalUnion, t: f64) -> Result<IntervalUnion> {
    Ok(flow_set_traced(m, t)?.0)
}

pub fn flow_set_traced(m: &IntervalUnion, t: f64) -> Result<(IntervalUnion, FlowTrace)> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("flow time {t} is negative")));
    }
    if t == f64::INFINITY {
        let s = symmetrize_set(m);
        let trace = FlowTrace { events: vec![(t, s.intervals.clone())] };
        return Ok((s, trace));
    }
    let mut trace = FlowTrace::default();
    let out = flow_pieces(m.intervals(), t, Some(&mut trace));
    Ok((IntervalUnion::from_sorted(out), trace))
}

/// Flow of sorted, disjoint, possibly degenerate closed intervals.
pub(crate) fn flow_pieces(pieces: &[(f64, f64)], t: f64, mut trace: Option<&mut FlowTrace>) -> Vec<(f64, f64)> {
    if t == f64::INFINITY {
        if pieces.is_empty() {
            return Vec::new();
        }
        let half = 0.5 * pieces.iter().map(|(a, b)| b - a).sum::<f64>();
        return vec![(-half, half)];
    }
    let mut c: Vec<f64> = pieces.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let mut r: Vec<f64> = pieces.iter().map(|(a, b)| 0.5 * (b - a)).collect();
    let mut now = 0.0;
    loop {
        let touching = (0..c.len().saturating_sub(1)).find(|&i| c[i + 1] - c[i] - r[i] - r[i + 1] <= MERGE_TOLERANCE);
        if let Some(i) = touching {
            let lo = c[i] - r[i];
            let hi = c[i + 1] + r[i + 1];
            let half = r[i] + r[i + 1];
            c[i] = 0.5 * (lo + hi);
            r[i] = half;
            c.remove(i + 1);
            r.remove(i + 1);
            if let Some(tr) = trace.as_deref_mut() {
                tr.events.push((now, c.iter().zip(&r).map(|(c, r)| (c - r, c + r)).collect()));
            }
            continue;
        }
        let mut next = f64::INFINITY;
        for i in 0..c.len().saturating_sub(1) {
            let reach = r[i] + r[i + 1];
            if reach > 0.0 {
                next = next.min(((c[i + 1] - c[i]) / reach).ln());
            }
        }
        let step = if now + next <= t { next } else { t - now };
        let decay = (-step).exp();
        for ci in c.iter_mut() {
            *ci *= decay;
        }
        now += step;
        if now >= t || next == f64::INFINITY {
            break;
        }
    }
    c.iter().zip(&r).map(|(c, r)| (c - r, c + r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iu(v: &[(f64, f64)]) -> IntervalUnion {
        IntervalUnion::new(v.to_vec()).unwrap()
    }

    #[test]
    fn symmetrization_examples() {
        assert_eq!(symmetrize_set(&iu(&[(2.0, 3.0)])).intervals(), &[(-0.5, 0.5)]);
        assert_eq!(symmetrize_set(&iu(&[(-1.0, 0.0), (2.0, 3.0)])).intervals(), &[(-1.0, 1.0)]);
        assert!(symmetrize_set(&IntervalUnion::empty()).is_empty());
    }

    #[test]
    fn single_interval_follows_its_centre() {
        let out = flow_set(&iu(&[(0.5, 1.5)]), 2f64.ln()).unwrap();
        let (a, b) = out.intervals()[0];
        assert!(a.abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        let centred = iu(&[(-0.3, 0.3)]);
        assert_eq!(flow_set(&centred, 1.7).unwrap(), centred);
    }

    #[test]
    fn symmetric_pair_merges_at_ln2() {
        let m = iu(&[(-3.0, -1.0), (1.0, 3.0)]);
        let (out, trace) = flow_set_traced(&m, 5.0).unwrap();
        assert_eq!(trace.events.len(), 1);
        assert!((trace.events[0].0 - 2f64.ln()).abs() < 1e-14);
        let (a, b) = out.intervals()[0];
        assert!((a + 2.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
        assert_eq!(flow_set(&m, f64::INFINITY).unwrap(), symmetrize_set(&m));
    }

    #[test]
    fn negative_time_is_rejected() {
        assert!(flow_set(&iu(&[(0.0, 1.0)]), -0.1).is_err());
    }

    #[test]
    fn validation() {
        assert!(IntervalUnion::new(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(IntervalUnion::new(vec![(1.0, 0.0)]).is_err());
        let m = IntervalUnion::normalized(vec![(1.0, 2.0), (0.0, 1.0), (3.0, 4.0)]).unwrap();
        assert_eq!(m.intervals(), &[(0.0, 2.0), (3.0, 4.0)]);
        assert_eq!(m.total_length(), 3.0);
    }

    #[test]
    fn point_pieces_are_absorbed() {
        let out = flow_pieces(&[(0.0, 1.0), (3.0, 3.0)], 10.0, None);
        assert_eq!(out.len(), 1);
        assert!((out[0].1 - out[0].0 - 1.0).abs() < 1e-15);
    }
}
