use alloc::collections::BinaryHeap;
use core::cmp::{Ordering, Reverse};

struct Entry<T> {
    time: u64,
    seq: u64,
    item: T,
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        (self.time, self.seq) == (other.time, other.seq)
    }
}

impl<T> Eq for Entry<T> {}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// Logical time in milliseconds and a queue of things due at given times.
/// Items due at the same time come out in the order they were scheduled.
pub struct Clock<T> {
    now: u64,
    seq: u64,
    pending: BinaryHeap<Reverse<Entry<T>>>,
}

impl<T> Default for Clock<T> {
    fn default() -> Self {
        Clock { now: 0, seq: 0, pending: BinaryHeap::new() }
    }
}

impl<T> Clock<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    /// Schedules `item` at `time`; times in the past are clamped to now.
    pub fn schedule(&mut self, time: u64, item: T) {
        let time = time.max(self.now);
        self.seq += 1;
        self.pending.push(Reverse(Entry { time, seq: self.seq, item }));
    }

    pub fn next_time(&self) -> Option<u64> {
        self.pending.peek().map(|Reverse(e)| e.time)
    }

    /// Pops the earliest item due no later than `deadline`, moving the
    /// clock to its time.
    pub fn pop_due(&mut self, deadline: u64) -> Option<(u64, T)> {
        if self.next_time()? > deadline {
            return None;
        }
        let Reverse(e) = self.pending.pop()?;
        self.now = e.time;
        Some((e.time, e.item))
    }

    /// Moves the clock forward to `time` without firing anything.
    pub fn advance_to(&mut self, time: u64) {
        debug_assert!(self.next_time().is_none_or(|t| t > time), "skipping due items");
        self.now = self.now.max(time);
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn equal_times_are_fifo() {
        let mut c = Clock::new();
        c.schedule(5, 'a');
        c.schedule(3, 'b');
        c.schedule(5, 'c');
        c.schedule(3, 'd');
        let order: Vec<_> = core::iter::from_fn(|| c.pop_due(u64::MAX)).collect();
        assert_eq!(order, [(3, 'b'), (3, 'd'), (5, 'a'), (5, 'c')]);
        assert_eq!(c.now(), 5);
    }

    #[test]
    fn deadline_is_inclusive() {
        let mut c = Clock::new();
        c.schedule(10, ());
        assert!(c.pop_due(9).is_none());
        assert_eq!(c.pop_due(10), Some((10, ())));
    }

    proptest! {
        #[test]
        fn pops_never_go_back_in_time(times in proptest::collection::vec(0u64..100, 0..40)) {
            let mut c = Clock::new();
            for (i, t) in times.iter().enumerate() {
                c.schedule(*t, i);
            }
            let mut last: Option<(u64, usize)> = None;
            while let Some(next) = c.pop_due(u64::MAX) {
                if let Some(prev) = last {
                    prop_assert!(next > prev, "{:?} popped after {:?}", next, prev);
                }
                last = Some(next);
            }
        }
    }
}
