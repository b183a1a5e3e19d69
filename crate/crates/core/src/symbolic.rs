//! Multi-track binary coding of finite sets along wandering orbits, factor
//! sets of symbol windows, complexity functions and cylinder-join counts.
//!
//! A letter of the alphabet `{0,1}^k` is a `u64` whose bit `j` is track `j`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{domain, Result};
use crate::growth::{fit_rows, GrowthFit, GrowthMode, GrowthRow};
use crate::hyperspace::FinitePointSet;
use crate::maps::OrbitLattice;

/// Symbols at indices `lo..=hi` of a point of `({0,1}^k)^Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SymbolWindow {
    tracks: usize,
    lo: i64,
    columns: Vec<u64>,
}

impl SymbolWindow {
    pub fn new(tracks: usize, lo: i64, columns: Vec<u64>) -> Result<Self> {
        if tracks == 0 || tracks > 64 {
            return domain(format!("track count {tracks} must lie in 1..=64"));
        }
        if columns.is_empty() {
            return domain("a window needs at least one column");
        }
        let mask = letter_mask(tracks);
        if let Some(i) = columns.iter().position(|c| c & !mask != 0) {
            return domain(format!("column {i} uses tracks beyond {tracks}"));
        }
        Ok(Self { tracks, lo, columns })
    }

    pub fn zeros(tracks: usize, lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return domain(format!("empty index range {lo}..={hi}"));
        }
        Self::new(tracks, lo, vec![0; (hi - lo + 1) as usize])
    }

    /// One string of `0`/`1` per track, all of equal length, starting at `lo`.
    pub fn from_rows(lo: i64, rows: &[&str]) -> Result<Self> {
        let len = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != len) {
            return domain("rows have different lengths");
        }
        let mut columns = vec![0u64; len];
        for (j, row) in rows.iter().enumerate() {
            for (i, ch) in row.bytes().enumerate() {
                match ch {
                    b'1' => columns[i] |= 1 << j,
                    b'0' => {}
                    other => return domain(format!("unexpected symbol {:?}", other as char)),
                }
            }
        }
        Self::new(rows.len(), lo, columns)
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.columns.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[u64] {
        &self.columns
    }

    pub fn column(&self, n: i64) -> Option<u64> {
        if n < self.lo || n > self.hi() {
            return None;
        }
        Some(self.columns[(n - self.lo) as usize])
    }

    pub fn bit(&self, j: usize, n: i64) -> Option<bool> {
        self.column(n).map(|c| c >> j & 1 == 1)
    }

    pub fn set(&mut self, j: usize, n: i64) {
        assert!(j < self.tracks && n >= self.lo && n <= self.hi(), "({j}, {n}) outside the window");
        self.columns[(n - self.lo) as usize] |= 1 << j;
    }

    /// Restriction to `lo..=hi`, which must lie inside the window.
    pub fn truncate(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo < self.lo || hi > self.hi() || hi < lo {
            return domain(format!("{lo}..={hi} is not inside {}..={}", self.lo, self.hi()));
        }
        let a = (lo - self.lo) as usize;
        let b = (hi - self.lo) as usize;
        Self::new(self.tracks, lo, self.columns[a..=b].to_vec())
    }

    /// One row of `0`/`1` per track.
    pub fn rows(&self) -> Vec<String> {
        (0..self.tracks)
            .map(|j| self.columns.iter().map(|c| if c >> j & 1 == 1 { '1' } else { '0' }).collect())
            .collect()
    }
}

fn letter_mask(tracks: usize) -> u64 {
    if tracks == 64 {
        u64::MAX
    } else {
        (1u64 << tracks) - 1
    }
}

/// `sigma^l`: the symbol at index `n` of the result is the symbol at `n + l`
/// of `w`, so the index range moves by `-l`.
pub fn shift(w: &SymbolWindow, l: i64) -> SymbolWindow {
    SymbolWindow { tracks: w.tracks, lo: w.lo - l, columns: w.columns.clone() }
}

/// Bit `(j, n)` is set iff the orbit point `x^j_n` belongs to `k`, for
/// `|n| <= m`. Membership is exact equality of canonical points.
pub fn code_set(lattice: &OrbitLattice, k: &FinitePointSet, m: usize) -> Result<SymbolWindow> {
    if m > lattice.radius() {
        return domain(format!("window radius {m} exceeds lattice radius {}", lattice.radius()));
    }
    let m = m as i64;
    let mut w = SymbolWindow::zeros(lattice.tracks(), -m, m)?;
    for p in k.points() {
        if let Some((j, n)) = lattice.locate(p) {
            if n.abs() <= m {
                w.set(j, n);
            }
        }
    }
    Ok(w)
}

/// A word of `m` letters packed `tracks` bits per letter.
pub type PackedWord = SmallVec<[u64; 2]>;

fn pack(letters: &[u64], tracks: usize) -> PackedWord {
    let mut out: PackedWord = SmallVec::from_elem(0, (letters.len() * tracks).div_ceil(64).max(1));
    for (i, &c) in letters.iter().enumerate() {
        let bit = i * tracks;
        let (word, off) = (bit / 64, bit % 64);
        out[word] |= c << off;
        if off + tracks > 64 {
            out[word + 1] |= c >> (64 - off);
        }
    }
    out
}

/// The distinct length-`m` factors of a collection of windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSet {
    pub tracks: usize,
    pub m: usize,
    pub words: HashSet<PackedWord>,
    /// Windows shorter than `m` that contributed nothing.
    pub skipped: usize,
}

impl WordSet {
    pub fn count(&self) -> usize {
        self.words.len()
    }

    pub fn union(mut self, other: WordSet) -> Result<WordSet> {
        if self.tracks != other.tracks || self.m != other.m {
            return domain("word sets of different shape");
        }
        self.words.extend(other.words);
        self.skipped += other.skipped;
        Ok(self)
    }
}

pub fn words_sampled(windows: &[SymbolWindow], m: usize) -> Result<WordSet> {
    if m == 0 {
        return domain("word length must be positive");
    }
    let tracks = match windows.first() {
        Some(w) => w.tracks,
        None => return domain("no windows given"),
    };
    let mut set = WordSet { tracks, m, words: HashSet::new(), skipped: 0 };
    for w in windows {
        if w.tracks != tracks {
            return domain(format!("windows with {} and {} tracks mixed", tracks, w.tracks));
        }
        if w.len() < m {
            set.skipped += 1;
            continue;
        }
        for factor in w.columns.windows(m) {
            set.words.insert(pack(factor, tracks));
        }
    }
    Ok(set)
}

/// The two symbolic families met when coding hyperspace elements along
/// wandering orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SymbolicFamily {
    /// Every track carries at most one `1`.
    AtMostOnePerTrack(usize),
    /// All sequences over `{0,1}^k`.
    FullShift(usize),
}

impl SymbolicFamily {
    pub fn tracks(&self) -> usize {
        match *self {
            SymbolicFamily::AtMostOnePerTrack(k) | SymbolicFamily::FullShift(k) => k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SymbolicFamily::AtMostOnePerTrack(_) => "at_most_one_per_track",
            SymbolicFamily::FullShift(_) => "full_shift",
        }
    }

    fn check(&self) -> Result<()> {
        let k = self.tracks();
        if k == 0 || k > 16 {
            return domain(format!("track count {k} must lie in 1..=16"));
        }
        Ok(())
    }

    /// Automaton step: the state after reading `letter`, if admissible.
    /// For one `1` per track the state is the set of tracks already used.
    fn step(&self, state: u64, letter: u64) -> Option<u64> {
        match self {
            SymbolicFamily::AtMostOnePerTrack(_) => (state & letter == 0).then_some(state | letter),
            SymbolicFamily::FullShift(_) => Some(0),
        }
    }

    /// `(m+1)^k` or `2^(km)`.
    pub fn closed_form(&self, m: usize) -> BigUint {
        match *self {
            SymbolicFamily::AtMostOnePerTrack(k) => BigUint::from(m as u64 + 1).pow(k as u32),
            SymbolicFamily::FullShift(k) => BigUint::one() << (k * m),
        }
    }
}

/// Number of admissible words of length `m`, counted letter by letter
/// through the family's automaton.
pub fn complexity_enumerated(fam: SymbolicFamily, m: usize) -> Result<BigUint> {
    fam.check()?;
    if m == 0 {
        return domain("word length must be positive");
    }
    let letters = 1u64 << fam.tracks();
    let mut states: HashMap<u64, BigUint> = HashMap::from([(0, BigUint::one())]);
    for _ in 0..m {
        let mut next: HashMap<u64, BigUint> = HashMap::new();
        for (state, count) in &states {
            for a in 0..letters {
                if let Some(s) = fam.step(*state, a) {
                    *next.entry(s).or_insert_with(BigUint::zero) += count;
                }
            }
        }
        states = next;
    }
    Ok(states.into_values().sum())
}

/// Windows whose length-`m` factors are exactly the admissible words of
/// `fam`: for one `1` per track, every placement of at most one `1` per
/// track in a window of length `2m - 1`; for the full shift, every word of
/// length `m` (only for `k * m <= 24`).
pub fn covering_windows(fam: SymbolicFamily, m: usize) -> Result<Vec<SymbolWindow>> {
    fam.check()?;
    if m == 0 {
        return domain("word length must be positive");
    }
    let k = fam.tracks();
    match fam {
        SymbolicFamily::AtMostOnePerTrack(_) => {
            let len = 2 * m - 1;
            // per track: none, or the 1 at position 0..len
            let choices = len + 1;
            let total = choices.checked_pow(k as u32).filter(|t| *t <= 1 << 24);
            let Some(total) = total else {
                return domain("covering collection too large");
            };
            let mut out = Vec::with_capacity(total);
            for code in 0..total {
                let mut columns = vec![0u64; len];
                let mut c = code;
                for j in 0..k {
                    let pos = c % choices;
                    c /= choices;
                    if pos > 0 {
                        columns[pos - 1] |= 1 << j;
                    }
                }
                out.push(SymbolWindow::new(k, 0, columns)?);
            }
            Ok(out)
        }
        SymbolicFamily::FullShift(_) => {
            if k * m > 24 {
                return domain("covering collection too large");
            }
            let mask = letter_mask(k);
            Ok((0..1u64 << (k * m))
                .map(|code| {
                    let columns = (0..m).map(|i| (code >> (i * k)) & mask).collect();
                    SymbolWindow { tracks: k, lo: 0, columns }
                })
                .collect())
        }
    }
}

/// Largest cylinder cover the join count will hold in memory.
pub const MAX_COVER: u64 = 1 << 22;

/// Number of nonempty sets `C_0 ∩ σ^{-1} C_1 ∩ … ∩ σ^{-(l-1)} C_{l-1}` with
/// every `C_j` a cylinder on the coordinates `-n..=n`.
///
/// The cylinders of the cover are the admissible blocks of length `2n+1`.
/// Each join step intersects with the next shifted cover: a block survives
/// if it agrees with the current chain on the `2n` shared coordinates and
/// the whole chain stays realizable in the family.
pub fn cylinder_join_count(fam: SymbolicFamily, n: usize, l: usize) -> Result<BigUint> {
    fam.check()?;
    if l == 0 {
        return domain("join depth must be at least 1");
    }
    let k = fam.tracks();
    let b = 2 * n + 1;
    if k * b > 64 {
        return domain(format!("blocks of {b} letters over {k} tracks do not fit in 64 bits"));
    }
    if fam.closed_form(b) > BigUint::from(MAX_COVER) {
        return domain(format!("the cover by {b}-letter cylinders has more than {MAX_COVER} members"));
    }
    let letters = 1u64 << k;
    let block_mask = if k * b == 64 { u64::MAX } else { (1u64 << (k * b)) - 1 };

    // the cover: every admissible block, with the automaton state after it
    let mut cover: Vec<(u64, u64)> = Vec::new();
    let mut stack = vec![(0u64, 0u64, 0usize)];
    while let Some((bits, state, len)) = stack.pop() {
        if len == b {
            cover.push((bits, state));
            continue;
        }
        for a in 0..letters {
            if let Some(s) = fam.step(state, a) {
                stack.push((bits | a << (len * k), s, len + 1));
            }
        }
    }
    let blocks: HashSet<u64> = cover.iter().map(|&(bits, _)| bits).collect();

    // chain state: (last block, automaton state) -> number of chains
    let mut chains: HashMap<(u64, u64), u128> = HashMap::new();
    for (bits, state) in cover {
        *chains.entry((bits, state)).or_default() += 1;
    }
    for _ in 1..l {
        let mut next: HashMap<(u64, u64), u128> = HashMap::new();
        for (&(bits, state), &count) in &chains {
            let overlap = bits >> k;
            for a in 0..letters {
                let block = (overlap | a << ((b - 1) * k)) & block_mask;
                if !blocks.contains(&block) {
                    continue;
                }
                if let Some(s) = fam.step(state, a) {
                    *next.entry((block, s)).or_default() += count;
                }
            }
        }
        chains = next;
    }
    Ok(chains.values().map(|&c| BigUint::from(c)).sum())
}

/// The same join count over the points of a collection of windows: the
/// number of distinct chains of `l` consecutive `(2n+1)`-blocks observed.
pub fn cylinder_join_count_windows(windows: &[SymbolWindow], n: usize, l: usize) -> Result<usize> {
    if l == 0 {
        return domain("join depth must be at least 1");
    }
    let b = 2 * n + 1;
    let mut chains: HashSet<Vec<PackedWord>> = HashSet::new();
    for w in windows {
        if w.len() < b + l - 1 {
            continue;
        }
        for start in 0..=w.len() - (b + l - 1) {
            let chain = (0..l).map(|j| pack(&w.columns[start + j..start + j + b], w.tracks)).collect();
            chains.insert(chain);
        }
    }
    Ok(chains.len())
}

/// Entropy (rate or exponent) of a complexity function from `(m, p(m))`
/// samples, fitted over the upper half of the samples.
pub fn entropy_from_complexity(counts: &[(u64, BigUint)], mode: GrowthMode) -> Result<GrowthFit> {
    let mut sorted = counts.to_vec();
    sorted.sort_by_key(|(m, _)| *m);
    sorted.dedup_by_key(|(m, _)| *m);
    if sorted.len() != counts.len() {
        return domain("word lengths repeat");
    }
    if sorted.len() < 8 {
        return domain(format!("need at least 8 word lengths, got {}", sorted.len()));
    }
    if let Some(w) = sorted.windows(2).find(|w| w[1].1 < w[0].1) {
        return domain(format!("complexity decreases between m = {} and m = {}", w[0].0, w[1].0));
    }
    let rows = sorted.into_iter().map(|(n, count)| GrowthRow { n, epsilon: None, count }).collect();
    fit_rows(rows, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{wandering_lattice, EdgeMap, StarHomeo};
    use crate::spaces::{StarPoint, StarSpace};

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    /// Words admissible for `fam`, listed one by one.
    fn brute_words(fam: SymbolicFamily, m: usize) -> usize {
        let k = fam.tracks();
        let total = 1u64 << (k * m);
        (0..total)
            .filter(|code| {
                let mut state = 0;
                (0..m).all(|i| match fam.step(state, (code >> (i * k)) & letter_mask(k)) {
                    Some(s) => {
                        state = s;
                        true
                    }
                    None => false,
                })
            })
            .count()
    }

    fn power_lattice(k: usize, radius: usize) -> OrbitLattice {
        let x = StarSpace::uniform(k).unwrap();
        let h = StarHomeo::fixing_edges(x.clone(), vec![EdgeMap::power(2.0).unwrap(); k]).unwrap();
        let base: Vec<StarPoint> = (0..k).map(|j| x.point(j, 0.5).unwrap()).collect();
        wandering_lattice(&h, &base, radius).unwrap()
    }

    #[test]
    fn window_basics() {
        let w = SymbolWindow::from_rows(-1, &["100", "001"]).unwrap();
        assert_eq!((w.lo(), w.hi(), w.len()), (-1, 1, 3));
        assert_eq!(w.bit(0, -1), Some(true));
        assert_eq!(w.bit(1, 1), Some(true));
        assert_eq!(w.bit(1, 0), Some(false));
        assert_eq!(w.bit(0, 2), None);
        assert_eq!(w.rows(), vec!["100", "001"]);
        assert!(SymbolWindow::from_rows(0, &["10", "1"]).is_err());
        assert!(SymbolWindow::new(1, 0, vec![2]).is_err());
    }

    #[test]
    fn code_examples() {
        let lat = power_lattice(1, 3);
        let k = FinitePointSet::new(lat.homeo().space(), [lat.point(0, 2)]).unwrap();
        let w = code_set(&lat, &k, 3).unwrap();
        assert_eq!(w.rows(), vec!["0000010"]);
        assert_eq!(w.bit(0, 2), Some(true));

        let b = FinitePointSet::new(lat.homeo().space(), [StarPoint::BRANCH]).unwrap();
        assert_eq!(code_set(&lat, &b, 3).unwrap().rows(), vec!["0000000"]);

        let lat = power_lattice(2, 1);
        let k = FinitePointSet::new(lat.homeo().space(), [lat.point(0, -1), lat.point(1, 1)]).unwrap();
        let w = code_set(&lat, &k, 1).unwrap();
        assert_eq!((w.lo(), w.hi()), (-1, 1));
        assert_eq!(w.rows(), vec!["100", "001"]);
        assert!(code_set(&lat, &k, 2).is_err());
    }

    #[test]
    fn coding_conjugacy() {
        use crate::hyperspace::induced_apply;
        let lat = power_lattice(2, 6);
        let x = lat.homeo().space().clone();
        let k = FinitePointSet::new(&x, [lat.point(0, -3), lat.point(0, 4), lat.point(1, 0), x.point(1, 0.3).unwrap()]).unwrap();
        let image = induced_apply(lat.homeo(), &k);
        let lhs = code_set(&lat, &image, 4).unwrap();
        let rhs = shift(&code_set(&lat, &k, 5).unwrap(), -1).truncate(-4, 4).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_examples() {
        let w = SymbolWindow::from_rows(-3, &["0000010"]).unwrap();
        assert_eq!(shift(&w, 0), w);
        let s = shift(&w, 2);
        assert_eq!(s.bit(0, 0), Some(true));
        assert_eq!(shift(&shift(&w, 1), -1), w);
        assert_eq!(shift(&shift(&w, 3), -5), shift(&w, -2));
    }

    #[test]
    fn word_examples() {
        let w = SymbolWindow::from_rows(0, &["0100"]).unwrap();
        let ws = words_sampled(&[w], 2).unwrap();
        assert_eq!(ws.count(), 3);
        let z = SymbolWindow::zeros(2, 0, 9).unwrap();
        assert_eq!(words_sampled(&[z.clone()], 4).unwrap().count(), 1);
        let short = SymbolWindow::zeros(2, 0, 1).unwrap();
        let ws = words_sampled(&[z, short], 4).unwrap();
        assert_eq!((ws.count(), ws.skipped), (1, 1));
        let cover = covering_windows(SymbolicFamily::AtMostOnePerTrack(1), 3).unwrap();
        assert_eq!(words_sampled(&cover, 3).unwrap().count(), 4);
    }

    #[test]
    fn complexity_examples() {
        assert_eq!(complexity_enumerated(SymbolicFamily::FullShift(1), 3).unwrap(), big(8));
        assert_eq!(complexity_enumerated(SymbolicFamily::AtMostOnePerTrack(2), 3).unwrap(), big(16));
        assert_eq!(brute_words(SymbolicFamily::AtMostOnePerTrack(2), 3), 16);
        assert_eq!(complexity_enumerated(SymbolicFamily::FullShift(3), 2).unwrap(), big(64));
        assert!(complexity_enumerated(SymbolicFamily::FullShift(0), 2).is_err());
    }

    #[test]
    fn automaton_matches_brute_force() {
        for k in 1..=3 {
            for m in 1..=6 {
                for fam in [SymbolicFamily::AtMostOnePerTrack(k), SymbolicFamily::FullShift(k)] {
                    if k * m > 18 {
                        continue;
                    }
                    let want = brute_words(fam, m) as u64;
                    assert_eq!(complexity_enumerated(fam, m).unwrap(), big(want), "{fam:?} m={m}");
                    assert_eq!(fam.closed_form(m), big(want));
                }
            }
        }
    }

    #[test]
    fn sampler_matches_enumerator() {
        for k in 1..=3 {
            for m in 1..=6 {
                let fam = SymbolicFamily::AtMostOnePerTrack(k);
                let ws = words_sampled(&covering_windows(fam, m).unwrap(), m).unwrap();
                assert_eq!(BigUint::from(ws.count()), complexity_enumerated(fam, m).unwrap());
            }
        }
        let fam = SymbolicFamily::FullShift(2);
        let ws = words_sampled(&covering_windows(fam, 5).unwrap(), 5).unwrap();
        assert_eq!(ws.count(), 1024);
    }

    #[test]
    fn join_examples() {
        assert_eq!(cylinder_join_count(SymbolicFamily::FullShift(1), 1, 1).unwrap(), big(8));
        assert_eq!(cylinder_join_count(SymbolicFamily::AtMostOnePerTrack(1), 0, 2).unwrap(), big(3));
        for k in 1..=3 {
            assert_eq!(cylinder_join_count(SymbolicFamily::FullShift(k), 0, 1).unwrap(), big(1 << k));
        }
        assert!(cylinder_join_count(SymbolicFamily::FullShift(3), 4, 1).is_err());
        assert!(cylinder_join_count(SymbolicFamily::AtMostOnePerTrack(3), 4, 8).is_ok());
    }

    #[test]
    fn join_over_windows() {
        let fam = SymbolicFamily::AtMostOnePerTrack(2);
        for (n, l) in [(0, 1), (1, 2), (2, 3)] {
            let cover = covering_windows(fam, 2 * n + l).unwrap();
            let want = complexity_enumerated(fam, 2 * n + l).unwrap();
            assert_eq!(BigUint::from(cylinder_join_count_windows(&cover, n, l).unwrap()), want);
        }
    }

    #[test]
    fn entropy_examples() {
        let rows: Vec<(u64, BigUint)> = (1..=64).map(|m| (m, BigUint::one() << (3 * m as usize))).collect();
        let fit = entropy_from_complexity(&rows, GrowthMode::Exponential).unwrap();
        assert!((fit.slope - 3.0 * std::f64::consts::LN_2).abs() < 1e-9);

        let rows: Vec<(u64, BigUint)> = (16..=512).map(|m| (m, big((m + 1) * (m + 1)))).collect();
        let fit = entropy_from_complexity(&rows, GrowthMode::Polynomial).unwrap();
        assert!(fit.slope >= 1.95 && fit.slope <= 2.0, "{}", fit.slope);

        let rows: Vec<(u64, BigUint)> = (1..=40).map(|m| (m, big(m * m * m))).collect();
        let fit = entropy_from_complexity(&rows, GrowthMode::Polynomial).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-9);
    }

    #[test]
    fn entropy_input_checks() {
        let few: Vec<(u64, BigUint)> = (1..=5).map(|m| (m, big(m))).collect();
        assert!(entropy_from_complexity(&few, GrowthMode::Polynomial).is_err());
        let falling: Vec<(u64, BigUint)> = (1..=10).map(|m| (m, big(20 - m))).collect();
        assert!(entropy_from_complexity(&falling, GrowthMode::Polynomial).is_err());
        let zero: Vec<(u64, BigUint)> = (0..10).map(|m| (m + 1, big(m))).collect();
        assert!(entropy_from_complexity(&zero, GrowthMode::Polynomial).is_err());
    }
}
