use std::cmp::Ordering;

/// A real interval with open or closed endpoints. Infinite endpoints are
/// always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi || (self.lo == self.hi && self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.total_cmp(&other.lo) {
            Ordering::Less => (other.lo, other.lo_closed),
            Ordering::Greater => (self.lo, self.lo_closed),
            Ordering::Equal => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.total_cmp(&other.hi) {
            Ordering::Less => (self.hi, self.hi_closed),
            Ordering::Greater => (other.hi, other.hi_closed),
            Ordering::Equal => (self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed)
    }
}

/// Finite union of intervals, kept sorted, disjoint and non-adjacent.
///
/// This is the part of the Borel σ-algebra needed to evaluate observables
/// with finite spectrum.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BorelSet {
    intervals: Vec<Interval>,
}

impl BorelSet {
    pub fn empty() -> Self {
        BorelSet::default()
    }

    pub fn real_line() -> Self {
        Self::from_intervals([Interval::new(f64::NEG_INFINITY, false, f64::INFINITY, false)])
    }

    pub fn point(t: f64) -> Self {
        Self::closed(t, t)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::from_intervals([Interval::new(lo, true, hi, true)])
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::from_intervals([Interval::new(lo, false, hi, false)])
    }

    /// `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        Self::closed(-r, r)
    }

    pub fn points(ts: impl IntoIterator<Item = f64>) -> Self {
        Self::from_intervals(ts.into_iter().map(|t| Interval::new(t, true, t, true)))
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut merged: Vec<Interval> = Vec::with_capacity(v.len());
        for next in v {
            if let Some(cur) = merged.last_mut() {
                let touches =
                    next.lo < cur.hi || (next.lo == cur.hi && (cur.hi_closed || next.lo_closed));
                if touches {
                    if next.lo == cur.lo {
                        cur.lo_closed |= next.lo_closed;
                    }
                    match next.hi.total_cmp(&cur.hi) {
                        Ordering::Greater => {
                            cur.hi = next.hi;
                            cur.hi_closed = next.hi_closed;
                        }
                        Ordering::Equal => cur.hi_closed |= next.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            merged.push(next);
        }
        BorelSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(t))
    }

    pub fn union(&self, other: &BorelSet) -> BorelSet {
        Self::from_intervals(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersection(&self, other: &BorelSet) -> BorelSet {
        Self::from_intervals(
            self.intervals
                .iter()
                .flat_map(|a| other.intervals.iter().map(move |b| a.intersect(b))),
        )
    }

    pub fn complement(&self) -> BorelSet {
        let mut gaps = Vec::with_capacity(self.intervals.len() + 1);
        let (mut lo, mut lo_closed) = (f64::NEG_INFINITY, false);
        for i in &self.intervals {
            gaps.push(Interval::new(lo, lo_closed, i.lo, !i.lo_closed));
            lo = i.hi;
            lo_closed = !i.hi_closed;
        }
        gaps.push(Interval::new(lo, lo_closed, f64::INFINITY, false));
        Self::from_intervals(gaps)
    }

    pub fn is_disjoint(&self, other: &BorelSet) -> bool {
        self.intersection(other).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_merges_touching_intervals() {
        let s = BorelSet::from_intervals([
            Interval::new(2.0, true, 3.0, false),
            Interval::new(0.0, true, 1.0, true),
            Interval::new(1.0, false, 2.0, false),
            Interval::new(5.0, false, 5.0, true),
        ]);
        assert_eq!(s.intervals().len(), 1);
        assert_eq!(s.intervals()[0], Interval::new(0.0, true, 3.0, false));

        let gap = BorelSet::from_intervals([
            Interval::new(0.0, true, 1.0, false),
            Interval::new(1.0, false, 2.0, true),
        ]);
        assert_eq!(gap.intervals().len(), 2);
        assert!(!gap.contains(1.0));
    }

    #[test]
    fn complement_and_membership() {
        let b = BorelSet::closed(-1.0, 1.0).union(&BorelSet::point(3.0));
        let c = b.complement();
        for t in [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0] {
            assert_ne!(b.contains(t), c.contains(t), "t = {t}");
        }
        assert_eq!(c.complement(), b);
        assert!(BorelSet::real_line().complement().is_empty());
        assert_eq!(BorelSet::empty().complement(), BorelSet::real_line());
        assert!(b.is_disjoint(&c));
        assert!(!b.is_disjoint(&BorelSet::open(0.5, 10.0)));
    }

    #[test]
    fn intersections() {
        let a = BorelSet::closed(0.0, 2.0);
        let b = BorelSet::open(1.0, 3.0);
        let i = a.intersection(&b);
        assert_eq!(i.intervals(), &[Interval::new(1.0, false, 2.0, true)]);
        assert!(BorelSet::point(1.0).is_disjoint(&BorelSet::open(1.0, 2.0)));
    }
}
