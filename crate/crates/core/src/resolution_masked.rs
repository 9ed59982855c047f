//! Bitmask fast path for the width-bounded resolution closure over at most
//! 64 variables. Split out of `resolution.rs` to keep both closure routes
//! readable; the only entry point is `closure_masked`, called by
//! `resolution::resolution_closure`.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::cnf::{Clause, CnfFormula, Literal};
use crate::resolution::{Closure, ClosureLimits, ClosureStats, ResolutionError};

/// A clause over at most 64 variables: bit `v-1` of `.0` is set when the
/// clause contains `+v`, bit `v-1` of `.1` when it contains `-v`. Canonical
/// clauses keep the two words disjoint.
type MaskClause = (u64, u64);

fn clause_to_mask(c: &Clause) -> MaskClause {
    let mut pos = 0u64;
    let mut neg = 0u64;
    for &l in c.literals() {
        let bit = 1u64 << (l.var() - 1);
        if l.positive() {
            pos |= bit;
        } else {
            neg |= bit;
        }
    }
    (pos, neg)
}

fn mask_to_clause(m: MaskClause) -> Clause {
    let mut lits = Vec::with_capacity((m.0.count_ones() + m.1.count_ones()) as usize);
    for v in 1..=64u32 {
        let bit = 1u64 << (v - 1);
        if m.0 & bit != 0 {
            lits.push(Literal::new(v, true).expect("valid var"));
        }
        if m.1 & bit != 0 {
            lits.push(Literal::new(v, false).expect("valid var"));
        }
    }
    Clause::new(lits).expect("mask words are disjoint")
}

fn mask_key(m: MaskClause) -> u128 {
    (u128::from(m.0) << 64) | u128::from(m.1)
}

/// Hashes the `u128` mask key with two rounds of the SplitMix64 finalizer;
/// cheaper than the default hasher and collision-resistant enough for a
/// dedup set. Only `write_u128` is on the hot path.
#[derive(Default)]
struct MaskKeyHasher(u64);

impl std::hash::Hasher for MaskKeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = crate::rng::mix64(self.0 ^ u64::from(b));
        }
    }

    fn write_u128(&mut self, x: u128) {
        let mixed_high = crate::rng::mix64((x >> 64) as u64);
        self.0 = crate::rng::mix64(mixed_high ^ x as u64);
    }
}

#[derive(Clone, Default)]
struct MaskKeyHash;

impl std::hash::BuildHasher for MaskKeyHash {
    type Hasher = MaskKeyHasher;

    fn build_hasher(&self) -> MaskKeyHasher {
        MaskKeyHasher::default()
    }
}

/// Perfect index over the canonical clauses of width ≤ `width_bound` on
/// `num_vars` variables, ordered by width, then variable set
/// (combinatorial number system), then sign pattern. Lets the dedup set
/// be a flat bitset — cache-resident even for dense width-4 closures,
/// where billions of derivations probe it.
struct ClauseRank {
    /// `choose[v][j] = C(v, j)`.
    choose: Vec<[u64; RANK_MAX_WIDTH + 1]>,
    /// `base[k]` = first index of the width-`k` block.
    base: Vec<u64>,
    /// Total number of indexable clauses.
    total: u64,
    /// Width bound the index covers.
    width_bound: usize,
}

/// Widest clause the ranker supports; beyond it the table cost and block
/// sizes defeat the point.
const RANK_MAX_WIDTH: usize = 8;

/// Largest bitset the dense route may allocate, in bits (32 MiB).
const RANK_MAX_TOTAL: u64 = 1 << 28;

impl ClauseRank {
    fn new(num_vars: usize, width_bound: usize) -> Option<ClauseRank> {
        if width_bound > RANK_MAX_WIDTH {
            return None;
        }
        let mut choose = vec![[0u64; RANK_MAX_WIDTH + 1]; num_vars.max(1) + 1];
        choose[0][0] = 1;
        for v in 1..=num_vars {
            choose[v][0] = 1;
            for j in 1..=RANK_MAX_WIDTH {
                // C(v, j) = C(v-1, j-1) + C(v-1, j); rows fill in order.
                let prev = choose[v - 1];
                choose[v][j] = prev[j - 1] + prev[j];
            }
        }
        let mut base = Vec::with_capacity(width_bound + 1);
        let mut total = 0u64;
        for k in 0..=width_bound {
            base.push(total);
            let block = choose[num_vars][k].checked_mul(1u64 << k)?;
            total = total.checked_add(block)?;
            if total > RANK_MAX_TOTAL {
                return None;
            }
        }
        Some(ClauseRank { choose, base, total, width_bound })
    }

    /// Whether a mask is within the indexed universe (width ≤ bound).
    #[inline]
    fn indexable(&self, m: MaskClause) -> bool {
        ((m.0 | m.1).count_ones() as usize) <= self.width_bound
    }

    /// Index of a canonical clause mask (monotone in nothing; just unique
    /// and dense).
    #[inline]
    fn rank(&self, m: MaskClause) -> u64 {
        let vars = m.0 | m.1;
        let k = vars.count_ones() as usize;
        let mut comb = 0u64;
        let mut signs = 0u64;
        let mut rest = vars;
        let mut i = 0usize;
        while rest != 0 {
            let low = rest & rest.wrapping_neg();
            rest ^= low;
            let v = low.trailing_zeros() as usize;
            comb += self.choose[v][i + 1];
            if m.0 & low != 0 {
                signs |= 1 << i;
            }
            i += 1;
        }
        self.base[k] + (comb << k) + signs
    }
}

/// Dedup set over clause masks: a perfect-rank bitset when the clause
/// universe is small enough, a hash set otherwise. Reads are lock-free
/// (`&self`), so frozen snapshots can be probed from parallel scans.
enum SeenSet {
    Dense {
        bits: Vec<u64>,
        rank: ClauseRank,
        len: usize,
        /// Members wider than the bound (source clauses only; resolvents
        /// are width-bounded). A handful at most, so a scan suffices.
        wide: Vec<u128>,
    },
    Sparse {
        set: std::collections::HashSet<u128, MaskKeyHash>,
    },
}

impl SeenSet {
    fn new(num_vars: usize, width_bound: usize) -> SeenSet {
        match ClauseRank::new(num_vars, width_bound) {
            Some(rank) => {
                let words = (rank.total as usize).div_ceil(64);
                SeenSet::Dense { bits: vec![0u64; words], rank, len: 0, wide: Vec::new() }
            }
            None => SeenSet::Sparse { set: std::collections::HashSet::default() },
        }
    }

    #[inline]
    fn contains(&self, m: MaskClause) -> bool {
        match self {
            SeenSet::Dense { bits, rank, wide, .. } => {
                if rank.indexable(m) {
                    let i = rank.rank(m);
                    bits[(i >> 6) as usize] & (1u64 << (i & 63)) != 0
                } else {
                    wide.contains(&mask_key(m))
                }
            }
            SeenSet::Sparse { set } => set.contains(&mask_key(m)),
        }
    }

    /// Inserts; returns whether the clause was new.
    fn insert(&mut self, m: MaskClause) -> bool {
        match self {
            SeenSet::Dense { bits, rank, len, wide } => {
                if rank.indexable(m) {
                    let i = rank.rank(m);
                    let word = &mut bits[(i >> 6) as usize];
                    let bit = 1u64 << (i & 63);
                    if *word & bit != 0 {
                        false
                    } else {
                        *word |= bit;
                        *len += 1;
                        true
                    }
                } else {
                    let key = mask_key(m);
                    if wide.contains(&key) {
                        false
                    } else {
                        wide.push(key);
                        *len += 1;
                        true
                    }
                }
            }
            SeenSet::Sparse { set } => set.insert(mask_key(m)),
        }
    }

    fn len(&self) -> usize {
        match self {
            SeenSet::Dense { len, .. } => *len,
            SeenSet::Sparse { set } => set.len(),
        }
    }
}

/// Clause masks holding one literal, split by the semi-naive boundary:
/// `new()` members joined in the round being scanned, `old()` members
/// predate it.
#[derive(Default)]
struct SlotArray {
    masks: Vec<MaskClause>,
    frontier_start: usize,
}

impl SlotArray {
    fn old(&self) -> &[MaskClause] {
        &self.masks[..self.frontier_start]
    }

    fn new(&self) -> &[MaskClause] {
        &self.masks[self.frontier_start..]
    }

    fn all(&self) -> &[MaskClause] {
        &self.masks
    }
}

/// Which participants a bucket lookup may pair with, mirroring the
/// semi-naive block split: the whole bucket (frontier clause versus
/// everything) or only its pre-frontier prefix (frontier versus older).
enum PartnerRange {
    All,
    OldOnly,
}

/// (pivot slot, unordered variable pair) buckets over width-4 clauses.
///
/// Under width bound 4, two width-4 parents resolve within the bound
/// exactly when they share two variables besides the pivot. Each width-4
/// clause is therefore filed — for every literal it holds and every pair
/// of its other variables — under (that literal's slot, that pair), and a
/// frontier clause only visits the buckets of its own variable pairs. A
/// clause pair is claimed by the lexicographically lowest variable pair it
/// shares, keeping the enumeration duplicate-free.
struct PairBuckets {
    buckets: Vec<Vec<MaskClause>>,
    frontier_starts: Vec<usize>,
    pair_count: usize,
}

impl PairBuckets {
    fn new(num_vars: usize) -> Self {
        let pair_count = num_vars * num_vars.saturating_sub(1) / 2;
        let len = num_vars * 2 * pair_count;
        PairBuckets {
            buckets: vec![Vec::new(); len],
            frontier_starts: vec![0; len],
            pair_count,
        }
    }

    /// 0-based variable bit positions `u < w` to a dense pair index.
    fn bucket_id(&self, slot: usize, u: usize, w: usize) -> usize {
        slot * self.pair_count + w * (w - 1) / 2 + u
    }

    /// Files a width-4 clause under all twelve (slot, pair) keys.
    fn insert(&mut self, m: MaskClause) {
        let (pos, neg) = m;
        let vars = pos | neg;
        let mut bits = [0usize; 4];
        let mut rest = vars;
        for b in &mut bits {
            let low = rest & rest.wrapping_neg();
            *b = low.trailing_zeros() as usize;
            rest ^= low;
        }
        for i in 0..4 {
            let v = bits[i];
            let slot = v * 2 + usize::from(pos & (1u64 << v) != 0);
            let mut others = [0usize; 3];
            let mut k = 0;
            for (j, &b) in bits.iter().enumerate() {
                if j != i {
                    others[k] = b;
                    k += 1;
                }
            }
            // `others` ascends because `bits` does.
            for (u, w) in [(others[0], others[1]), (others[0], others[2]), (others[1], others[2])]
            {
                let id = self.bucket_id(slot, u, w);
                self.buckets[id].push(m);
            }
        }
    }

    fn freeze_frontier(&mut self) {
        for (start, bucket) in self.frontier_starts.iter_mut().zip(&self.buckets) {
            *start = bucket.len();
        }
    }
}

/// (pivot slot, single variable) buckets over "mid" clauses (width 3 or
/// width ≥ 5 — anything that must share at least one non-pivot variable
/// with a width-4 partner to resolve within bound 4). A clause is filed
/// under (slot of each literal, each other variable); a width-4 frontier
/// clause visits the buckets of its three other variables and a pair is
/// claimed at the lowest variable it shares.
struct SingleBuckets {
    buckets: Vec<Vec<MaskClause>>,
    frontier_starts: Vec<usize>,
    num_vars: usize,
}

impl SingleBuckets {
    fn new(num_vars: usize) -> Self {
        let len = num_vars * 2 * num_vars;
        SingleBuckets {
            buckets: vec![Vec::new(); len],
            frontier_starts: vec![0; len],
            num_vars,
        }
    }

    fn bucket_id(&self, slot: usize, u: usize) -> usize {
        slot * self.num_vars + u
    }

    fn insert(&mut self, m: MaskClause) {
        let (pos, neg) = m;
        let vars = pos | neg;
        let mut rest = vars;
        while rest != 0 {
            let low = rest & rest.wrapping_neg();
            rest ^= low;
            let v = low.trailing_zeros() as usize;
            let slot = v * 2 + usize::from(pos & low != 0);
            let mut others = vars ^ low;
            while others != 0 {
                let ub = others & others.wrapping_neg();
                others ^= ub;
                let id = self.bucket_id(slot, ub.trailing_zeros() as usize);
                self.buckets[id].push(m);
            }
        }
    }

    fn freeze_frontier(&mut self) {
        for (start, bucket) in self.frontier_starts.iter_mut().zip(&self.buckets) {
            *start = bucket.len();
        }
    }
}

/// Resolvents that passed the width bound and the frozen `seen` filter, in
/// deterministic order, plus the count of width-passing derivations
/// (pre-dedup).
#[derive(Default)]
struct SlotYield {
    generated: u64,
    produced: Vec<MaskClause>,
}

impl SlotYield {
    /// Records the resolvent of a pair clashing exactly on `bit`, subject
    /// to the width bound.
    #[inline]
    fn emit(
        &mut self,
        a: MaskClause,
        b: MaskClause,
        bit: u64,
        width_bound: usize,
        seen: &SeenSet,
    ) {
        let rpos = (a.0 | b.0) & !bit;
        let rneg = (a.1 | b.1) & !bit;
        if (rpos.count_ones() + rneg.count_ones()) as usize <= width_bound {
            self.generated += 1;
            if !seen.contains((rpos, rneg)) {
                self.produced.push((rpos, rneg));
            }
        }
    }
}

/// Streams the block product `a_block × b_block` for one pivot bit, with
/// `a` holding the pivot positively and `b` negatively.
fn scan_block(
    a_block: &[MaskClause],
    b_block: &[MaskClause],
    bit: u64,
    width_bound: usize,
    seen: &SeenSet,
    out: &mut SlotYield,
) {
    for &a in a_block {
        for &b in b_block {
            let clash = (a.0 & b.1) | (a.1 & b.0);
            if clash == bit {
                out.emit(a, b, bit, width_bound, seen, );
            }
        }
    }
}

/// Visits the pair buckets matching one width-4 frontier clause. The
/// width bound is implicit: width-4 parents sharing two extra variables
/// always resolve within width 4.
fn scan_pair_buckets(
    clause: MaskClause,
    clause_is_positive: bool,
    bit: u64,
    buckets: &PairBuckets,
    range: PartnerRange,
    seen: &SeenSet,
    out: &mut SlotYield,
) {
    let (pa, na) = clause;
    let vars = (pa | na) & !bit;
    let mut others = [0usize; 3];
    let mut rest = vars;
    for o in &mut others {
        let low = rest & rest.wrapping_neg();
        *o = low.trailing_zeros() as usize;
        rest ^= low;
    }
    let pivot_var = bit.trailing_zeros() as usize;
    let partner_slot = pivot_var * 2 + usize::from(!clause_is_positive);
    for (u, w) in [(others[0], others[1]), (others[0], others[2]), (others[1], others[2])] {
        let id = buckets.bucket_id(partner_slot, u, w);
        let bucket = &buckets.buckets[id];
        let entries = match range {
            PartnerRange::All => &bucket[..],
            PartnerRange::OldOnly => &bucket[..buckets.frontier_starts[id]],
        };
        let pair_mask = (1u64 << u) | (1u64 << w);
        for &(pb, nb) in entries {
            // The pair claims this partner only at the lowest variable
            // pair they share.
            let shared = (pa | na) & (pb | nb) & !bit;
            let lowest = shared & shared.wrapping_neg();
            let second = {
                let s2 = shared ^ lowest;
                s2 & s2.wrapping_neg()
            };
            if lowest | second != pair_mask {
                continue;
            }
            let clash = (pa & nb) | (na & pb);
            if clash != bit {
                continue;
            }
            let rpos = (pa | pb) & !bit;
            let rneg = (na | nb) & !bit;
            out.generated += 1;
            if !seen.contains((rpos, rneg)) {
                out.produced.push((rpos, rneg));
            }
        }
    }
}

/// Visits the single-variable buckets matching one width-4 frontier
/// clause; partners are "mid" clauses. Pairs are claimed at the lowest
/// shared non-pivot variable; the width bound is enforced per pair (mid
/// partners can be wider than 4).
fn scan_single_buckets(
    clause: MaskClause,
    clause_is_positive: bool,
    bit: u64,
    buckets: &SingleBuckets,
    range: PartnerRange,
    width_bound: usize,
    seen: &SeenSet,
    out: &mut SlotYield,
) {
    let (pa, na) = clause;
    let vars = (pa | na) & !bit;
    let pivot_var = bit.trailing_zeros() as usize;
    let partner_slot = pivot_var * 2 + usize::from(!clause_is_positive);
    let mut rest = vars;
    while rest != 0 {
        let ub = rest & rest.wrapping_neg();
        rest ^= ub;
        let id = buckets.bucket_id(partner_slot, ub.trailing_zeros() as usize);
        let bucket = &buckets.buckets[id];
        let entries = match range {
            PartnerRange::All => &bucket[..],
            PartnerRange::OldOnly => &bucket[..buckets.frontier_starts[id]],
        };
        for &(pb, nb) in entries {
            let shared = (pa | na) & (pb | nb) & !bit;
            if shared & shared.wrapping_neg() != ub {
                continue;
            }
            let clash = (pa & nb) | (na & pb);
            if clash != bit {
                continue;
            }
            out.emit((pa, na), (pb, nb), bit, width_bound, seen);
        }
    }
}

/// Clause classes for the width-4 bucket scheme. Width-4 clauses pair
/// through [`PairBuckets`]; "mid" clauses (width 3 or ≥ 5) pair with
/// width-4 partners through [`SingleBuckets`]; "small" clauses (width ≤ 2)
/// resolve with a width-4 partner regardless of sharing, so their blocks
/// stream in full. Without the bucket scheme everything files under Mid.
#[derive(Clone, Copy, PartialEq)]
enum Class {
    Four = 0,
    Mid = 1,
    Small = 2,
}

fn classify(m: MaskClause, buckets_active: bool) -> Class {
    if !buckets_active {
        return Class::Mid;
    }
    match m.0.count_ones() + m.1.count_ones() {
        4 => Class::Four,
        0..=2 => Class::Small,
        _ => Class::Mid,
    }
}

/// The per-pivot state handed to one slot scan.
struct SlotView<'a> {
    bit: u64,
    pos: [&'a SlotArray; 3],
    neg: [&'a SlotArray; 3],
    pair_buckets: Option<&'a PairBuckets>,
    mid_buckets: Option<&'a SingleBuckets>,
}

fn scan_slot(view: &SlotView<'_>, width_bound: usize, seen: &SeenSet) -> SlotYield {
    let mut out = SlotYield::default();
    let bit = view.bit;
    let [pos_four, pos_mid, pos_small] = view.pos;
    let [neg_four, neg_mid, neg_small] = view.neg;
    if let (Some(pairs), Some(mids)) = (view.pair_buckets, view.mid_buckets) {
        // four × four through pair buckets.
        for &m in pos_four.new() {
            scan_pair_buckets(m, true, bit, pairs, PartnerRange::All, seen, &mut out);
        }
        for &m in neg_four.new() {
            scan_pair_buckets(m, false, bit, pairs, PartnerRange::OldOnly, seen, &mut out);
        }
        // four × mid: the frontier-four directions go through the single-
        // variable buckets; the frontier-mid directions are block products
        // against the (pre-frontier or full) four class.
        for &m in pos_four.new() {
            scan_single_buckets(m, true, bit, mids, PartnerRange::All, width_bound, seen, &mut out);
        }
        for &m in neg_four.new() {
            scan_single_buckets(
                m,
                false,
                bit,
                mids,
                PartnerRange::OldOnly,
                width_bound,
                seen,
                &mut out,
            );
        }
        scan_block(pos_four.old(), neg_mid.new(), bit, width_bound, seen, &mut out);
        scan_block(pos_mid.new(), neg_four.all(), bit, width_bound, seen, &mut out);
        // four × small and mid × small and small × small: full block
        // products; the small class is a handful of clauses.
        scan_block(pos_four.new(), neg_small.all(), bit, width_bound, seen, &mut out);
        scan_block(pos_four.old(), neg_small.new(), bit, width_bound, seen, &mut out);
        scan_block(pos_small.new(), neg_four.all(), bit, width_bound, seen, &mut out);
        scan_block(pos_small.old(), neg_four.new(), bit, width_bound, seen, &mut out);
        scan_block(pos_mid.new(), neg_small.all(), bit, width_bound, seen, &mut out);
        scan_block(pos_mid.old(), neg_small.new(), bit, width_bound, seen, &mut out);
        scan_block(pos_small.new(), neg_mid.all(), bit, width_bound, seen, &mut out);
        scan_block(pos_small.old(), neg_mid.new(), bit, width_bound, seen, &mut out);
        scan_block(pos_small.new(), neg_small.all(), bit, width_bound, seen, &mut out);
        scan_block(pos_small.old(), neg_small.new(), bit, width_bound, seen, &mut out);
        // mid × mid: no sharing requirement at width 3 × width 3, so the
        // blocks stream in full.
        scan_block(pos_mid.new(), neg_mid.all(), bit, width_bound, seen, &mut out);
        scan_block(pos_mid.old(), neg_mid.new(), bit, width_bound, seen, &mut out);
    } else {
        scan_block(pos_mid.new(), neg_mid.all(), bit, width_bound, seen, &mut out);
        scan_block(pos_mid.old(), neg_mid.new(), bit, width_bound, seen, &mut out);
    }
    out
}

/// Closure over bitmask clauses; requires `f.num_vars() <= 64`. Reaches
/// the same fixpoint as the generic route, organised for throughput:
///
/// * Clause masks are grouped per literal slot, so each round's new pairs
///   form contiguous block products (`frontier⁺ × all⁻` plus
///   `older⁺ × frontier⁻` per pivot variable) — streaming scans instead of
///   per-clause index chasing.
/// * Under width bound 4 the dominant block products are replaced by
///   bucket lookups keyed on shared variables ([`PairBuckets`],
///   [`SingleBuckets`]), since bounded resolvents force parents to share
///   variables beyond the pivot.
///
/// Each round scans pivot variables independently (in parallel) against
/// frozen state and merges their yields in pivot order, so results are
/// identical for every worker count.
pub(crate) fn closure_masked(
    f: &CnfFormula,
    width_bound: usize,
    limits: ClosureLimits,
) -> Result<Closure, ResolutionError> {
    let num_vars = f.num_vars() as usize;
    let mut stats = ClosureStats::default();
    let source: BTreeSet<Clause> = f.clauses().iter().cloned().collect();
    let mut seen = SeenSet::new(num_vars, width_bound);
    for c in &source {
        seen.insert(clause_to_mask(c));
    }
    stats.kept = seen.len();
    // Every mask accepted after the source, in insertion order; the final
    // clause set is rebuilt from this instead of iterating `seen`.
    let mut accepted: Vec<MaskClause> = Vec::new();

    let buckets_active = width_bound == 4 && num_vars >= 2;
    let mut slots: Vec<SlotArray> = Vec::with_capacity(num_vars * 6);
    for _ in 0..num_vars * 6 {
        slots.push(SlotArray::default());
    }
    // Slot layout: six arrays per variable — (positive, negative) × (four,
    // mid, small).
    let slot_index = |v: usize, positive: bool, class: Class| -> usize {
        v * 6 + usize::from(positive) * 3 + class as usize
    };
    let mut pair_buckets = buckets_active.then(|| PairBuckets::new(num_vars));
    let mut mid_buckets = buckets_active.then(|| SingleBuckets::new(num_vars));

    let mut fresh: Vec<MaskClause> = source.iter().map(clause_to_mask).collect();

    while !fresh.is_empty() {
        if stats.rounds >= limits.max_rounds {
            return Err(ResolutionError::LimitExceeded { what: "round", stats });
        }
        stats.rounds += 1;

        // Freeze the semi-naive boundary, then file the frontier.
        for slot in &mut slots {
            slot.frontier_start = slot.masks.len();
        }
        if let Some(b) = pair_buckets.as_mut() {
            b.freeze_frontier();
        }
        if let Some(b) = mid_buckets.as_mut() {
            b.freeze_frontier();
        }
        for &m in &fresh {
            let class = classify(m, buckets_active);
            let (pos, neg) = m;
            let mut rest = pos;
            while rest != 0 {
                let low = rest & rest.wrapping_neg();
                rest ^= low;
                slots[slot_index(low.trailing_zeros() as usize, true, class)].masks.push(m);
            }
            let mut rest = neg;
            while rest != 0 {
                let low = rest & rest.wrapping_neg();
                rest ^= low;
                slots[slot_index(low.trailing_zeros() as usize, false, class)].masks.push(m);
            }
            match class {
                Class::Four => pair_buckets.as_mut().expect("buckets active").insert(m),
                Class::Mid if buckets_active => {
                    mid_buckets.as_mut().expect("buckets active").insert(m)
                }
                _ => {}
            }
        }

        // Scan every pivot variable against the frozen state.
        let seen_ref = &seen;
        let slots_ref = &slots;
        let pair_ref = pair_buckets.as_ref();
        let mid_ref = mid_buckets.as_ref();
        let yields: Vec<SlotYield> = (0..num_vars)
            .into_par_iter()
            .map(|v| {
                let view = SlotView {
                    bit: 1u64 << v,
                    pos: [
                        &slots_ref[slot_index(v, true, Class::Four)],
                        &slots_ref[slot_index(v, true, Class::Mid)],
                        &slots_ref[slot_index(v, true, Class::Small)],
                    ],
                    neg: [
                        &slots_ref[slot_index(v, false, Class::Four)],
                        &slots_ref[slot_index(v, false, Class::Mid)],
                        &slots_ref[slot_index(v, false, Class::Small)],
                    ],
                    pair_buckets: pair_ref,
                    mid_buckets: mid_ref,
                };
                scan_slot(&view, width_bound, seen_ref)
            })
            .collect();

        let mut next: Vec<MaskClause> = Vec::new();
        for y in yields {
            stats.generated += y.generated;
            for m in y.produced {
                if seen.insert(m) {
                    next.push(m);
                    accepted.push(m);
                    stats.kept = seen.len();
                    if seen.len() > limits.max_clauses {
                        return Err(ResolutionError::LimitExceeded { what: "clause", stats });
                    }
                }
            }
        }
        fresh = next;
    }

    stats.kept = seen.len();
    let mut clauses = source.clone();
    clauses.extend(accepted.iter().map(|&m| mask_to_clause(m)));
    let pool: Vec<Clause> = clauses.difference(&source).cloned().collect();
    Ok(Closure { clauses, pool, stats })
}
