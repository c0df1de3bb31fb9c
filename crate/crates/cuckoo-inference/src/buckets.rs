//! Slot-occupancy index: for each table and slot, the items whose hash
//! vector on that table contains the slot.
//!
//! Two items are in conflict on a side exactly when they share a bucket on
//! that side, so this index is an implicit adjacency structure for the
//! inference graph and its residual subgraphs. Buckets are dense vectors
//! indexed by slot when `m` is comparable to the number of hash coordinates,
//! and a hash map keyed by slot otherwise (huge sparse tables).

use std::collections::HashMap;

use crate::instance::{Instance, Side};

enum Buckets {
    Dense(Vec<Vec<u32>>),
    Sparse(HashMap<u32, Vec<u32>>),
}

impl Buckets {
    fn push(&mut self, slot: u32, item: u32) {
        match self {
            Buckets::Dense(v) => v[slot as usize].push(item),
            Buckets::Sparse(map) => map.entry(slot).or_default().push(item),
        }
    }

    fn get(&self, slot: u32) -> &[u32] {
        match self {
            Buckets::Dense(v) => &v[slot as usize],
            Buckets::Sparse(map) => map.get(&slot).map_or(&[], |v| v.as_slice()),
        }
    }

    fn clear(&mut self) {
        match self {
            Buckets::Dense(v) => v.iter_mut().for_each(Vec::clear),
            Buckets::Sparse(map) => map.clear(),
        }
    }
}

pub(crate) struct SlotIndex {
    sides: [Buckets; 2],
}

impl SlotIndex {
    /// Indexes every item of the instance. Each item appears once per
    /// distinct coordinate value of its vector, in increasing item order.
    pub(crate) fn build(inst: &Instance) -> SlotIndex {
        let n = inst.n();
        let coords = 2 * n * inst.d();
        let make = || {
            if (inst.m() as usize) <= 4 * coords + 1024 {
                Buckets::Dense(vec![Vec::new(); inst.m() as usize])
            } else {
                Buckets::Sparse(HashMap::new())
            }
        };
        let mut index = SlotIndex {
            sides: [make(), make()],
        };
        index.fill(inst, (0..n as u32).collect::<Vec<_>>().as_slice());
        index
    }

    /// Re-indexes only the given items (increasing order expected).
    pub(crate) fn rebuild(&mut self, inst: &Instance, items: &[u32]) {
        self.sides[0].clear();
        self.sides[1].clear();
        self.fill(inst, items);
    }

    fn fill(&mut self, inst: &Instance, items: &[u32]) {
        for &item in items {
            for side in Side::BOTH {
                let v = inst.hash_vector(item as usize, side);
                for (i, &slot) in v.iter().enumerate() {
                    if !v[..i].contains(&slot) {
                        self.sides[side.index()].push(slot, item);
                    }
                }
            }
        }
    }

    /// Items whose vector on `side` contains `slot`, in increasing order.
    #[inline]
    pub(crate) fn bucket(&self, side: Side, slot: u32) -> &[u32] {
        self.sides[side.index()].get(slot)
    }

    /// Visits the inference-graph successors of node `(item, side)` in a
    /// deterministic order: the implied-side copy of every item sharing a
    /// slot of `hash_vector(item, side)`, plus the item's own opposite copy
    /// when the vector repeats a coordinate. The callback may be invoked
    /// more than once per successor (one call per shared slot); the `u32`
    /// argument is the witnessing slot.
    #[inline]
    pub(crate) fn for_each_successor(
        &self,
        inst: &Instance,
        item: u32,
        side: Side,
        mut f: impl FnMut(u32, u32),
    ) {
        let v = inst.hash_vector(item as usize, side);
        let mut dup = false;
        for (i, &slot) in v.iter().enumerate() {
            if v[..i].contains(&slot) {
                dup = true;
                continue;
            }
            for &other in self.bucket(side, slot) {
                if other != item {
                    f(other, slot);
                }
            }
        }
        if dup {
            // Duplicate coordinate: occupying `side` is self-conflicting, so
            // the item's own opposite-side copy is implied.
            f(item, inst.duplicate_coord(item as usize, side).unwrap());
        }
    }

    /// Buckets of one side in increasing slot order.
    pub(crate) fn for_each_bucket_in_slot_order(
        &self,
        side: Side,
        mut f: impl FnMut(u32, &[u32]),
    ) {
        match &self.sides[side.index()] {
            Buckets::Dense(v) => {
                for (slot, items) in v.iter().enumerate() {
                    if items.len() > 1 {
                        f(slot as u32, items);
                    }
                }
            }
            Buckets::Sparse(map) => {
                let mut slots: Vec<u32> = map
                    .iter()
                    .filter(|(_, v)| v.len() > 1)
                    .map(|(&s, _)| s)
                    .collect();
                slots.sort_unstable();
                for slot in slots {
                    f(slot, &map[&slot]);
                }
            }
        }
    }
}
