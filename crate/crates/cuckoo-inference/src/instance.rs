//! Problem instances and placements.
//!
//! An instance is `n` items, two tables of `m` slots each, and for every item
//! a `d`-dimensional slot vector per table. Items are abstract indices
//! `0..n`: restricting two uniformly random hash functions to `n` distinct
//! keys yields `2*n*d` independent uniform slot indices, so we sample those
//! directly instead of materializing functions over a key universe.

use std::collections::BTreeMap;
use std::fmt;

use crate::rng::{uniform, Seed};

/// Which of the two tables an item occupies.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Side {
    A0,
    A1,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::A0, Side::A1];

    #[inline]
    pub fn flip(self) -> Side {
        match self {
            Side::A0 => Side::A1,
            Side::A1 => Side::A0,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Side::A0 => 0,
            Side::A1 => 1,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Side {
        match i {
            0 => Side::A0,
            1 => Side::A1,
            _ => panic!("side index out of range: {i}"),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Errors from instance construction and sampling.
#[derive(thiserror::Error, Debug, PartialEq, Eq)]
pub enum ModelError {
    #[error("m must be positive")]
    ZeroTableSize,
    #[error("d must be positive")]
    ZeroDimension,
    #[error("slot index {index} ≥ m={m} (item {item}, side {side}, coord {coord})")]
    SlotOutOfRange {
        item: usize,
        side: usize,
        coord: usize,
        index: u32,
        m: u32,
    },
    #[error("slot data has length {got}, expected 2*n*d = {expected}")]
    BadLength { got: usize, expected: usize },
}

/// An immutable problem instance: table size, dimension, and the slot
/// vectors of every item on both sides.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    m: u32,
    d: usize,
    /// Layout: item-major, then side, then coordinate.
    slots: Vec<u32>,
}

impl Instance {
    /// Builds an instance from a flat slot array laid out
    /// `[item 0 side 0 coords.., item 0 side 1 coords.., item 1 ..]`.
    pub fn new(m: u32, d: usize, slots: Vec<u32>) -> Result<Instance, ModelError> {
        if m == 0 {
            return Err(ModelError::ZeroTableSize);
        }
        if d == 0 {
            return Err(ModelError::ZeroDimension);
        }
        if !slots.len().is_multiple_of(2 * d) {
            return Err(ModelError::BadLength {
                got: slots.len(),
                expected: slots.len() / (2 * d) * (2 * d),
            });
        }
        for (pos, &s) in slots.iter().enumerate() {
            if s >= m {
                let item = pos / (2 * d);
                let rem = pos % (2 * d);
                return Err(ModelError::SlotOutOfRange {
                    item,
                    side: rem / d,
                    coord: rem % d,
                    index: s,
                    m,
                });
            }
        }
        Ok(Instance { m, d, slots })
    }

    /// Convenience constructor from per-item `(h0, h1)` rows.
    pub fn from_rows(m: u32, d: usize, rows: &[(Vec<u32>, Vec<u32>)]) -> Result<Instance, ModelError> {
        let mut slots = Vec::with_capacity(rows.len() * 2 * d);
        for (h0, h1) in rows {
            if h0.len() != d || h1.len() != d {
                return Err(ModelError::BadLength {
                    got: h0.len().max(h1.len()),
                    expected: d,
                });
            }
            slots.extend_from_slice(h0);
            slots.extend_from_slice(h1);
        }
        Instance::new(m, d, slots)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.slots.len() / (2 * self.d)
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// The `d` slot indices of `item` on `side`.
    #[inline]
    pub fn hash_vector(&self, item: usize, side: Side) -> &[u32] {
        let base = (item * 2 + side.index()) * self.d;
        &self.slots[base..base + self.d]
    }

    /// True when the slot vector of `item` on `side` repeats a coordinate,
    /// which makes that side illegal for the item on its own (two copies of
    /// the item would claim one slot).
    pub fn has_duplicate_coord(&self, item: usize, side: Side) -> bool {
        self.duplicate_coord(item, side).is_some()
    }

    /// Smallest repeated coordinate value in `item`'s vector on `side`.
    pub fn duplicate_coord(&self, item: usize, side: Side) -> Option<u32> {
        let v = self.hash_vector(item, side);
        let mut dup: Option<u32> = None;
        for i in 0..v.len() {
            if v[..i].contains(&v[i]) {
                dup = Some(match dup {
                    Some(cur) => cur.min(v[i]),
                    None => v[i],
                });
            }
        }
        dup
    }

    /// True when the two items share at least one slot on `side`, so they
    /// cannot both occupy that table.
    pub fn collides_on(&self, side: Side, a: usize, b: usize) -> bool {
        let va = self.hash_vector(a, side);
        let vb = self.hash_vector(b, side);
        va.iter().any(|s| vb.contains(s))
    }

    /// Smallest slot shared by the two items on `side`.
    pub fn shared_slot(&self, side: Side, a: usize, b: usize) -> Option<u32> {
        let va = self.hash_vector(a, side);
        let vb = self.hash_vector(b, side);
        va.iter().filter(|s| vb.contains(s)).min().copied()
    }
}

/// Draws a fresh instance with all `2*n*d` slot indices independent and
/// uniform over `[0, m)`.
///
/// Every index is keyed by `(trial, item, side, coord)`, so the result is a
/// pure function of the arguments no matter how generation is scheduled.
pub fn sample_instance(
    n: usize,
    m: u32,
    d: usize,
    seed: Seed,
    trial: u64,
) -> Result<Instance, ModelError> {
    if m == 0 {
        return Err(ModelError::ZeroTableSize);
    }
    if d == 0 {
        return Err(ModelError::ZeroDimension);
    }
    let mut slots = Vec::with_capacity(n * 2 * d);
    for item in 0..n {
        for side in 0..2u64 {
            for coord in 0..d {
                let v = uniform(
                    seed,
                    &[trial, item as u64, side, coord as u64],
                    u64::from(m),
                );
                slots.push(v as u32);
            }
        }
    }
    Ok(Instance { m, d, slots })
}

/// A full assignment of every item to one of the two tables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Placement {
    sides: Vec<Side>,
}

impl Placement {
    pub fn new(sides: Vec<Side>) -> Placement {
        Placement { sides }
    }

    #[inline]
    pub fn side(&self, item: usize) -> Side {
        self.sides[item]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sides.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    /// The slot-occupancy map induced by this placement. Only meaningful for
    /// legal placements; on an illegal one, later items overwrite earlier
    /// claims to a contested slot.
    pub fn occupancy(&self, inst: &Instance) -> BTreeMap<(Side, u32), usize> {
        let mut occ = BTreeMap::new();
        for (item, &side) in self.sides.iter().enumerate() {
            for &slot in inst.hash_vector(item, side) {
                occ.insert((side, slot), item);
            }
        }
        occ
    }
}

/// An assignment covering only a subset of items, as produced by placing the
/// reachable set of a single node.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PartialPlacement {
    assigned: BTreeMap<usize, Side>,
}

impl PartialPlacement {
    pub fn new() -> PartialPlacement {
        PartialPlacement::default()
    }

    pub fn assign(&mut self, item: usize, side: Side) {
        self.assigned.insert(item, side);
    }

    pub fn side(&self, item: usize) -> Option<Side> {
        self.assigned.get(&item).copied()
    }

    pub fn len(&self) -> usize {
        self.assigned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assigned.is_empty()
    }

    /// Items and sides in increasing item order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Side)> + '_ {
        self.assigned.iter().map(|(&i, &s)| (i, s))
    }

    /// Legality restricted to the assigned items: no slot on either table is
    /// claimed twice by the item-copies of this partial assignment.
    pub fn is_legal_among(&self, inst: &Instance) -> bool {
        sides_disjoint(inst, self.iter())
    }
}

/// True iff the placement assigns every slot at most one item-copy: for each
/// table, the multiset union of the chosen items' slot vectors has no
/// duplicate. A vector that repeats a coordinate makes its own side illegal.
pub fn is_legal(inst: &Instance, p: &Placement) -> bool {
    assert_eq!(p.len(), inst.n(), "placement must cover all items");
    sides_disjoint(inst, p.sides.iter().copied().enumerate())
}

fn sides_disjoint(inst: &Instance, assignment: impl Iterator<Item = (usize, Side)>) -> bool {
    let mut claimed: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for (item, side) in assignment {
        claimed[side.index()].extend_from_slice(inst.hash_vector(item, side));
    }
    for side in &mut claimed {
        side.sort_unstable();
        if side.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
    }
    true
}

/// Errors from parsing the instance text format, each located by line.
#[derive(thiserror::Error, Debug, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed header at line 1: expected `n m d`, got {got:?}")]
    BadHeader { got: String },
    #[error("invalid integer {token:?} at line {line}")]
    BadInteger { line: usize, token: String },
    #[error("expected {expected} fields, got {got} at line {line}")]
    WrongFieldCount {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("index {index} ≥ m={m} at line {line}")]
    IndexOutOfRange { line: usize, index: u64, m: u32 },
    #[error("expected {expected} item lines, got {got}")]
    WrongLineCount { expected: usize, got: usize },
    #[error("m must be positive (line 1)")]
    ZeroTableSize,
    #[error("d must be positive (line 1)")]
    ZeroDimension,
}

/// Parses the canonical instance text: a `n m d` header line, then one line
/// per item holding the `d` coordinates of `h0` followed by the `d`
/// coordinates of `h1`, space-separated, LF line endings.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(ParseError::BadHeader {
            got: header.to_string(),
        });
    }
    let parse_u64 = |token: &str, line: usize| -> Result<u64, ParseError> {
        token.parse::<u64>().map_err(|_| ParseError::BadInteger {
            line,
            token: token.to_string(),
        })
    };
    let n = parse_u64(fields[0], 1)? as usize;
    let m64 = parse_u64(fields[1], 1)?;
    let d = parse_u64(fields[2], 1)? as usize;
    if m64 == 0 {
        return Err(ParseError::ZeroTableSize);
    }
    let m = u32::try_from(m64).map_err(|_| ParseError::IndexOutOfRange {
        line: 1,
        index: m64,
        m: u32::MAX,
    })?;
    if d == 0 {
        return Err(ParseError::ZeroDimension);
    }

    let mut slots = Vec::with_capacity(n * 2 * d);
    let mut item_lines = 0usize;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if item_lines == n {
            if line.trim().is_empty() {
                continue;
            }
            return Err(ParseError::WrongLineCount {
                expected: n,
                got: item_lines + 1,
            });
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 * d {
            return Err(ParseError::WrongFieldCount {
                line: lineno,
                expected: 2 * d,
                got: fields.len(),
            });
        }
        for token in fields {
            let v = parse_u64(token, lineno)?;
            if v >= u64::from(m) {
                return Err(ParseError::IndexOutOfRange {
                    line: lineno,
                    index: v,
                    m,
                });
            }
            slots.push(v as u32);
        }
        item_lines += 1;
    }
    if item_lines != n {
        return Err(ParseError::WrongLineCount {
            expected: n,
            got: item_lines,
        });
    }
    Ok(Instance { m, d, slots })
}

/// Renders an instance in the canonical text format parsed by
/// [`parse_instance`]; `emit ∘ parse` and `parse ∘ emit` are identities.
pub fn emit_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {} {}\n", inst.n(), inst.m(), inst.d()));
    for item in 0..inst.n() {
        let mut first = true;
        for side in Side::BOTH {
            for &slot in inst.hash_vector(item, side) {
                if !first {
                    out.push(' ');
                }
                out.push_str(&slot.to_string());
                first = false;
            }
        }
        out.push('\n');
    }
    out
}
