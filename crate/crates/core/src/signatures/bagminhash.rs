//! BagMinHash: per element, the combined Poisson process over all weight
//! levels is generated in ascending order by recursive splitting, skipping
//! irrelevant index ranges and stopping as soon as its points exceed the
//! current signature maximum.
//!
//! Variant 2 first extracts only the smallest relevant point of every element
//! and defers the remaining subprocesses to a shared buffer, processed once
//! all elements have been seen. Every record owns its own generator, so the
//! set of generated points is a fixed function of the bag and both variants
//! return bit-identical signatures.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::bag::WeightedBag;
use crate::discretization::WeightDiscretization;
use crate::error::Result;
use crate::maxtracker::MaxTracker;
use crate::poisson::PoissonProcess;
use crate::rng::{namespace, RngConfig, SeedBuilder};

use super::{check_size, Algorithm, NoopObserver, Observer, RealSignature, SignatureHeader};

/// Storage for process records referenced by heap keys, so that heap
/// operations move small keys instead of whole records.
#[derive(Default)]
struct Pool {
    slots: Vec<Option<PoissonProcess>>,
    free: Vec<u32>,
}

impl Pool {
    #[inline]
    fn insert(&mut self, process: PoissonProcess) -> u32 {
        match self.free.pop() {
            Some(slot) => {
                self.slots[slot as usize] = Some(process);
                slot
            }
            None => {
                self.slots.push(Some(process));
                (self.slots.len() - 1) as u32
            }
        }
    }

    #[inline]
    fn take(&mut self, slot: u32) -> PoissonProcess {
        self.free.push(slot);
        self.slots[slot as usize].take().expect("slot is occupied")
    }

    #[inline]
    fn release(&mut self, slot: u32) {
        self.take(slot);
    }
}

/// Heap key ordered so that `BinaryHeap` pops the smallest point first.
/// Ties go to the earlier insertion.
#[derive(Clone, Copy)]
struct Key {
    point: f64,
    seq: u64,
    slot: u32,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        other.point.total_cmp(&self.point).then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Default)]
struct MinHeap {
    keys: BinaryHeap<Key>,
    pool: Pool,
    seq: u64,
}

impl MinHeap {
    #[inline]
    fn push(&mut self, process: PoissonProcess) {
        self.seq += 1;
        let point = process.point();
        let slot = self.pool.insert(process);
        self.keys.push(Key { point, seq: self.seq, slot });
    }

    #[inline]
    fn pop(&mut self) -> Option<PoissonProcess> {
        let key = self.keys.pop()?;
        Some(self.pool.take(key.slot))
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn clear(&mut self) {
        for key in self.keys.drain() {
            self.pool.release(key.slot);
        }
    }
}

/// Shared state of one signature computation.
struct Sketch<'a, O> {
    grid: &'a WeightDiscretization,
    m: usize,
    tracker: MaxTracker,
    observer: &'a mut O,
}

impl<O: Observer> Sketch<'_, O> {
    #[inline]
    fn max(&self) -> f64 {
        self.tracker.current_max()
    }

    /// Offers the current point of a fully relevant process to the signature.
    #[inline]
    fn offer(&mut self, process: &PoissonProcess) {
        let j = process.component().expect("process has a point");
        self.observer.relevant_point(process.point(), j);
        self.tracker.lower(j, process.point());
    }

    #[inline]
    fn next_point(&mut self, process: &mut PoissonProcess) {
        process.next_point(self.m);
        self.observer.point_generated();
    }

    fn root(&mut self, element: u64, weight: f64, weight_index: u64, config: RngConfig) -> PoissonProcess {
        let rng = config.generator(SeedBuilder::new(namespace::ELEMENT).u64(element));
        let mut process =
            PoissonProcess::with_weight_index(0.0, rng, 0, self.grid.max_index(), weight, weight_index, self.grid);
        self.next_point(&mut process);
        if process.fully_relevant() {
            self.offer(&process);
        }
        process
    }

    /// Splits `process` while it is splittable and partially relevant (and,
    /// for phase 1 of variant 2, not yet fully relevant). Relevant siblings
    /// get their first point and are pushed if it does not exceed the maximum.
    #[inline]
    fn descend(
        &mut self,
        process: &mut PoissonProcess,
        heap: &mut MinHeap,
        live_extra: usize,
        stop_when_fully_relevant: bool,
    ) {
        while process.splittable()
            && process.partially_relevant()
            && !(stop_when_fully_relevant && process.fully_relevant())
        {
            let sibling = process.split_relevant(self.grid);
            self.observer.split();
            if process.fully_relevant() {
                self.offer(process);
            }
            if let Some(mut sibling) = sibling {
                self.next_point(&mut sibling);
                if sibling.fully_relevant() {
                    self.offer(&sibling);
                }
                if sibling.point() <= self.max() {
                    heap.push(sibling);
                    self.observer.live_processes(heap.len() + live_extra);
                }
            }
        }
    }

    /// Advances an elementary relevant process and requeues it if its new
    /// point can still matter.
    #[inline]
    fn advance(&mut self, mut process: PoissonProcess, heap: &mut MinHeap, live_extra: usize) {
        self.next_point(&mut process);
        self.offer(&process);
        if process.point() <= self.max() {
            heap.push(process);
            self.observer.live_processes(heap.len() + live_extra);
        }
    }

    fn into_signature(self, algorithm: Algorithm, config: RngConfig) -> RealSignature {
        RealSignature {
            header: SignatureHeader::new(algorithm, self.m, Some(self.grid), config),
            components: self.tracker.into_leaves(),
        }
    }
}

pub fn bagminhash1(
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
) -> Result<RealSignature> {
    bagminhash1_observed(bag, grid, m, config, &mut NoopObserver)
}

pub fn bagminhash1_observed(
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
    observer: &mut impl Observer,
) -> Result<RealSignature> {
    check_size(m)?;
    let mut sketch = Sketch { grid, m, tracker: MaxTracker::new(m)?, observer };
    let mut heap = MinHeap::default();
    for &(element, weight) in bag.entries() {
        let weight_index = grid.index_of(weight)?;
        if weight_index == 0 {
            continue;
        }
        heap.clear();
        let mut process = sketch.root(element, weight, weight_index, config);
        sketch.observer.live_processes(1);
        let mut last_popped = 0.0;
        while process.point() <= sketch.max() {
            debug_assert!(process.point() >= last_popped, "heap order violated");
            last_popped = process.point();
            sketch.descend(&mut process, &mut heap, 1, false);
            if process.fully_relevant() {
                sketch.advance(process, &mut heap, 0);
            }
            match heap.pop() {
                Some(next) => process = next,
                None => break,
            }
        }
    }
    Ok(sketch.into_signature(Algorithm::Bmh1, config))
}

pub fn bagminhash2(
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
) -> Result<RealSignature> {
    bagminhash2_observed(bag, grid, m, config, &mut NoopObserver)
}

pub fn bagminhash2_observed(
    bag: &WeightedBag,
    grid: &WeightDiscretization,
    m: usize,
    config: RngConfig,
    observer: &mut impl Observer,
) -> Result<RealSignature> {
    check_size(m)?;
    let mut sketch = Sketch { grid, m, tracker: MaxTracker::new(m)?, observer };
    let mut heap = MinHeap::default();
    // Max-heap on points over records kept in the heap's pool, so entries
    // overtaken by the decreasing maximum can be evicted from the top.
    let mut buffer: BinaryHeap<Reverse<Key>> = BinaryHeap::new();
    let mut buffer_seq = 0u64;

    // Phase 1: smallest relevant point of every element.
    for &(element, weight) in bag.entries() {
        let weight_index = grid.index_of(weight)?;
        if weight_index == 0 {
            continue;
        }
        heap.clear();
        let mut process = sketch.root(element, weight, weight_index, config);
        sketch.observer.live_processes(buffer.len() + 1);
        while process.point() <= sketch.max() {
            sketch.descend(&mut process, &mut heap, buffer.len() + 1, true);
            if process.fully_relevant() {
                heap.push(process);
                break;
            }
            match heap.pop() {
                Some(next) => process = next,
                None => break,
            }
        }
        let max = sketch.max();
        for key in heap.keys.drain() {
            if key.point <= max {
                buffer_seq += 1;
                buffer.push(Reverse(Key { seq: buffer_seq, ..key }));
            } else {
                heap.pool.release(key.slot);
            }
        }
        while buffer.peek().is_some_and(|top| top.0.point > max) {
            let evicted = buffer.pop().expect("peeked");
            heap.pool.release(evicted.0.slot);
        }
        sketch.observer.live_processes(buffer.len());
    }

    // Phase 2: continue all buffered subprocesses in ascending point order.
    let max = sketch.max();
    let mut buffered: Vec<Key> = buffer.into_vec().into_iter().map(|r| r.0).collect();
    buffered.sort_by_key(|k| k.seq);
    for key in buffered {
        if key.point <= max {
            heap.seq += 1;
            heap.keys.push(Key { seq: heap.seq, ..key });
        } else {
            heap.pool.release(key.slot);
        }
    }
    let mut last_popped = 0.0;
    while let Some(mut process) = heap.pop() {
        if process.point() > sketch.max() {
            break;
        }
        debug_assert!(process.point() >= last_popped, "heap order violated");
        last_popped = process.point();
        sketch.descend(&mut process, &mut heap, 1, false);
        if process.fully_relevant() {
            sketch.advance(process, &mut heap, 0);
        }
    }
    Ok(sketch.into_signature(Algorithm::Bmh2, config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::{enhanced_signature, Stats};

    fn bag(n: u64, seed: u64) -> WeightedBag {
        let mut g = crate::rng::SeededGenerator::new(&seed.to_le_bytes()).unwrap();
        WeightedBag::new((0..n).map(|_| (g.next_u64(), g.sample_exponential(1.0).unwrap())).collect()).unwrap()
    }

    #[test]
    fn empty_bag_is_all_infinite() {
        let grid = WeightDiscretization::single_precision();
        for f in [bagminhash1, bagminhash2] {
            let sig = f(&WeightedBag::empty(), &grid, 16, RngConfig::default()).unwrap();
            assert!(sig.is_empty());
        }
    }

    #[test]
    fn variants_agree_on_small_bags() {
        let grid = WeightDiscretization::single_precision();
        for n in [1, 2, 5, 30] {
            for m in [1, 3, 4, 64] {
                let b = bag(n, n * 100 + m as u64);
                let s1 = bagminhash1(&b, &grid, m, RngConfig::default()).unwrap();
                let s2 = bagminhash2(&b, &grid, m, RngConfig::default()).unwrap();
                assert_eq!(s1.components, s2.components, "n={n} m={m}");
                assert!(s1.components.iter().all(|c| c.is_finite() && *c > 0.0));
            }
        }
    }

    #[test]
    fn identical_bags_identical_signatures() {
        let grid = WeightDiscretization::single_precision();
        let b = bag(20, 7);
        assert_eq!(
            bagminhash1(&b, &grid, 32, RngConfig::default()).unwrap(),
            bagminhash1(&b, &grid, 32, RngConfig::default()).unwrap()
        );
    }

    #[test]
    fn fully_relevant_root_updates_immediately() {
        // Weight v_K: the root process is fully relevant before any split.
        let grid = WeightDiscretization::explicit(vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        let b = WeightedBag::new(vec![(5, 4.0)]).unwrap();
        #[derive(Default)]
        struct FirstUpdate {
            splits: u64,
            splits_before_first: Option<u64>,
        }
        impl Observer for FirstUpdate {
            fn relevant_point(&mut self, _point: f64, _component: usize) {
                self.splits_before_first.get_or_insert(self.splits);
            }
            fn split(&mut self) {
                self.splits += 1;
            }
        }
        let mut probe = FirstUpdate::default();
        bagminhash1_observed(&b, &grid, 4, RngConfig::default(), &mut probe).unwrap();
        let splits_before = probe.splits_before_first.unwrap();
        assert_eq!(splits_before, 0);
    }

    #[test]
    fn weights_below_first_level_are_skipped() {
        let grid = WeightDiscretization::geometric(1.0, 0.5, 10).unwrap();
        let b = WeightedBag::new(vec![(1, 0.5), (2, 0.0)]).unwrap();
        assert!(bagminhash1(&b, &grid, 8, RngConfig::default()).unwrap().is_empty());
        assert!(bagminhash2(&b, &grid, 8, RngConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn binary_grid_single_element_matches_enhanced_distribution() {
        // On the binary grid the root process is elementary, so each element
        // is a single rate-1 process. Enhanced uses a different seed, so only
        // the distribution agrees: compare mean of the maximum component.
        let grid = WeightDiscretization::binary();
        let reps = 4000u64;
        let mean_max = |f: &dyn Fn(&WeightedBag) -> RealSignature| {
            (0..reps)
                .map(|d| {
                    let b = WeightedBag::new(vec![(d, 1.0)]).unwrap();
                    f(&b).components.iter().cloned().fold(0.0, f64::max)
                })
                .sum::<f64>()
                / reps as f64
        };
        let a = mean_max(&|b| bagminhash1(b, &grid, 8, RngConfig::default()).unwrap());
        let e = mean_max(&|b| enhanced_signature(b, &grid, 8, RngConfig::default()).unwrap());
        // Max of 8 Exp(1/8) variates: mean 8 H_8 = 21.74, sd about 8 * 1.25.
        let se = 8.0 * 1.25 / (reps as f64).sqrt();
        assert!((a - e).abs() < 5.0 * se * 2f64.sqrt(), "{a} vs {e}");
    }

    #[test]
    fn peak_processes_is_reported() {
        let grid = WeightDiscretization::single_precision();
        let b = bag(100, 3);
        let mut stats = Stats::default();
        bagminhash1_observed(&b, &grid, 64, RngConfig::default(), &mut stats).unwrap();
        assert!(stats.peak_processes > 1);
        assert!(stats.points >= 64);
        assert!(stats.splits > 0);
    }
}
