//! Virtual-space partitions and the subset algebra of the expansion.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::reference::OccupiedSpace;
use crate::scalar::Real;
use crate::solvers::SubspaceSpec;

/// Most fragments a [`SubsetKey`] can address.
pub const MAX_FRAGMENTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("fragment count {requested} outside 1..={available}")]
    InvalidCount { requested: usize, available: usize },
    #[error("virtual orbitals without a fragment: {}", one_based(.0))]
    Unmapped(Vec<usize>),
    #[error("orbitals assigned more than once: {}", one_based(.0))]
    DoublyMapped(Vec<usize>),
    #[error("assigned orbitals are not virtual: {}", one_based(.0))]
    NotVirtual(Vec<usize>),
    #[error("orbital energies missing for: {}", one_based(.0))]
    MissingEnergies(Vec<usize>),
    #[error("no centroid for virtual orbitals: {}", one_based(.0))]
    MissingCentroids(Vec<usize>),
    #[error("atom group {0:?} has no atoms")]
    EmptyGroup(String),
    #[error("no atom groups declared")]
    NoGroups,
    #[error("non-finite coordinate for {0}")]
    NonFinite(String),
    #[error("partition invariant violated: {0}")]
    Invariant(String),
    #[error("subset key {key} references fragments beyond {n_fragments}")]
    KeyOutOfRange { key: SubsetKey, n_fragments: usize },
    #[error("centroid file line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn one_based(idx: &[usize]) -> String {
    idx.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// A set of fragment indices as a bitmask (bit `i` is fragment `i + 1`).
///
/// Ordered by size first, then by mask, so sorted key lists run through the
/// expansion order by order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetKey(pub u64);

impl SubsetKey {
    pub const EMPTY: SubsetKey = SubsetKey(0);

    pub fn singleton(i: usize) -> Self {
        SubsetKey(1 << i)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SubsetKey(u64::MAX)
        } else {
            SubsetKey((1u64 << n) - 1)
        }
    }

    /// 0-based fragment indices; order and repeats do not matter.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        SubsetKey(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn order(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1 << i) != 0
    }

    pub fn union(self, other: Self) -> Self {
        SubsetKey(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based fragment indices, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        crate::bits::ones(self.0)
    }

    /// Every subset of `self`, the empty key and `self` included.
    pub fn subsets(self) -> impl Iterator<Item = SubsetKey> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some(((cur | !full).wrapping_add(1)) & full)
            };
            Some(SubsetKey(cur))
        })
    }

    /// All keys over `n` fragments with order ≤ `max_order`, in key order.
    pub fn all_up_to(n: usize, max_order: usize) -> Vec<SubsetKey> {
        let mut keys: Vec<SubsetKey> = SubsetKey::full(n)
            .subsets()
            .filter(|k| k.order() <= max_order)
            .collect();
        keys.sort();
        keys
    }
}

impl Ord for SubsetKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.order(), self.0).cmp(&(other.order(), other.0))
    }
}

impl PartialOrd for SubsetKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl FromStr for SubsetKey {
    type Err = String;

    /// Parses the `{1,3}` display form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| format!("expected {{...}}, got {s:?}"))?;
        let mut key = 0u64;
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let i: usize = part
                .parse()
                .map_err(|_| format!("bad fragment index {part:?}"))?;
            if i == 0 || i > MAX_FRAGMENTS {
                return Err(format!("fragment index {i} outside 1..={MAX_FRAGMENTS}"));
            }
            key |= 1 << (i - 1);
        }
        Ok(SubsetKey(key))
    }
}

impl Serialize for SubsetKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionStrategy {
    Explicit,
    Blocks,
    Energy,
    Centroid,
}

impl PartitionStrategy {
    pub fn tag(self) -> &'static str {
        match self {
            PartitionStrategy::Explicit => "explicit",
            PartitionStrategy::Blocks => "blocks",
            PartitionStrategy::Energy => "energy",
            PartitionStrategy::Centroid => "centroid",
        }
    }
}

impl fmt::Display for PartitionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The occupied space plus disjoint, covering, non-empty virtual fragments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitalPartition {
    pub occupied: OccupiedSpace,
    fragments: Vec<Vec<usize>>,
    labels: Vec<String>,
    pub strategy: PartitionStrategy,
}

impl OrbitalPartition {
    /// Checks every invariant; fragment contents are sorted ascending.
    pub fn new(
        occupied: OccupiedSpace,
        fragments: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
        strategy: PartitionStrategy,
    ) -> Result<Self, PartitionError> {
        if fragments.is_empty() || fragments.len() > MAX_FRAGMENTS {
            return Err(PartitionError::InvalidCount {
                requested: fragments.len(),
                available: MAX_FRAGMENTS,
            });
        }
        let mut fragments = fragments;
        for (i, f) in fragments.iter_mut().enumerate() {
            if f.is_empty() {
                return Err(PartitionError::Invariant(format!(
                    "fragment {} is empty",
                    i + 1
                )));
            }
            f.sort_unstable();
        }
        let virtuals = occupied.virtuals();
        let mut seen = vec![0usize; occupied.n_orbitals()];
        let mut foreign = Vec::new();
        for &p in fragments.iter().flatten() {
            if p >= occupied.n_orbitals() || occupied.is_occupied(p) {
                foreign.push(p);
            } else {
                seen[p] += 1;
            }
        }
        if !foreign.is_empty() {
            return Err(PartitionError::NotVirtual(foreign));
        }
        let doubled: Vec<usize> = virtuals.iter().copied().filter(|&p| seen[p] > 1).collect();
        if !doubled.is_empty() {
            return Err(PartitionError::DoublyMapped(doubled));
        }
        let missing: Vec<usize> = virtuals.iter().copied().filter(|&p| seen[p] == 0).collect();
        if !missing.is_empty() {
            return Err(PartitionError::Unmapped(missing));
        }
        let labels = match labels {
            Some(l) if l.len() == fragments.len() => l,
            Some(l) => {
                return Err(PartitionError::Invariant(format!(
                    "{} labels for {} fragments",
                    l.len(),
                    fragments.len()
                )))
            }
            None => (1..=fragments.len()).map(|i| format!("V{i}")).collect(),
        };
        Ok(Self {
            occupied,
            fragments,
            labels,
            strategy,
        })
    }

    pub fn n_fragments(&self) -> usize {
        self.fragments.len()
    }

    pub fn fragments(&self) -> &[Vec<usize>] {
        &self.fragments
    }

    pub fn fragment(&self, i: usize) -> &[usize] {
        &self.fragments[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_virtuals(&self) -> usize {
        self.fragments.iter().map(Vec::len).sum()
    }

    /// Renumbers fragments: new fragment `i` is old fragment `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, PartitionError> {
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..self.n_fragments()).collect::<Vec<_>>() {
            return Err(PartitionError::Invariant(
                "not a permutation of fragments".into(),
            ));
        }
        Ok(Self {
            occupied: self.occupied.clone(),
            fragments: order.iter().map(|&i| self.fragments[i].clone()).collect(),
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            strategy: self.strategy,
        })
    }
}

/// Roughly a third of the virtual space per fragment.
pub fn default_fragment_count(n_virtuals: usize) -> usize {
    n_virtuals.min(3)
}

/// Fragments from an orbital → label assignment; fragments follow sorted
/// label order.
pub fn partition_explicit<L: AsRef<str>>(
    occupied: OccupiedSpace,
    assignment: impl IntoIterator<Item = (usize, L)>,
) -> Result<OrbitalPartition, PartitionError> {
    let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut count = vec![0usize; occupied.n_orbitals()];
    let mut foreign = Vec::new();
    for (p, label) in assignment {
        if p >= occupied.n_orbitals() || occupied.is_occupied(p) {
            foreign.push(p);
            continue;
        }
        count[p] += 1;
        by_label
            .entry(label.as_ref().to_string())
            .or_default()
            .push(p);
    }
    if !foreign.is_empty() {
        foreign.sort_unstable();
        return Err(PartitionError::NotVirtual(foreign));
    }
    let virtuals = occupied.virtuals();
    let doubled: Vec<usize> = virtuals.iter().copied().filter(|&p| count[p] > 1).collect();
    if !doubled.is_empty() {
        return Err(PartitionError::DoublyMapped(doubled));
    }
    let missing: Vec<usize> = virtuals
        .iter()
        .copied()
        .filter(|&p| count[p] == 0)
        .collect();
    if !missing.is_empty() {
        return Err(PartitionError::Unmapped(missing));
    }
    let (labels, fragments): (Vec<String>, Vec<Vec<usize>>) = by_label.into_iter().unzip();
    OrbitalPartition::new(
        occupied,
        fragments,
        Some(labels),
        PartitionStrategy::Explicit,
    )
}

fn split_blocks(order: &[usize], n_fragments: usize) -> Result<Vec<Vec<usize>>, PartitionError> {
    if n_fragments == 0 || n_fragments > order.len() || n_fragments > MAX_FRAGMENTS {
        return Err(PartitionError::InvalidCount {
            requested: n_fragments,
            available: order.len().min(MAX_FRAGMENTS),
        });
    }
    let base = order.len() / n_fragments;
    let extra = order.len() % n_fragments;
    let mut out = Vec::with_capacity(n_fragments);
    let mut start = 0;
    for i in 0..n_fragments {
        let size = base + usize::from(i < extra);
        out.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(out)
}

/// Contiguous index blocks; sizes differ by at most one, larger first.
pub fn partition_blocks(
    occupied: OccupiedSpace,
    n_fragments: usize,
) -> Result<OrbitalPartition, PartitionError> {
    let fragments = split_blocks(&occupied.virtuals(), n_fragments)?;
    OrbitalPartition::new(occupied, fragments, None, PartitionStrategy::Blocks)
}

/// Virtuals sorted by orbital energy (ties by index), then block-split.
/// `energies` is indexed by orbital over the whole basis.
pub fn partition_by_energy<T: Real>(
    occupied: OccupiedSpace,
    energies: &[T],
    n_fragments: usize,
) -> Result<OrbitalPartition, PartitionError> {
    let virtuals = occupied.virtuals();
    let missing: Vec<usize> = virtuals
        .iter()
        .copied()
        .filter(|&p| energies.get(p).is_none_or(|e| !e.is_finite()))
        .collect();
    if !missing.is_empty() {
        return Err(PartitionError::MissingEnergies(missing));
    }
    let mut order = virtuals;
    order.sort_by(|&a, &b| {
        energies[a]
            .partial_cmp(&energies[b])
            .expect("finite energies")
            .then(a.cmp(&b))
    });
    let fragments = split_blocks(&order, n_fragments)?;
    OrbitalPartition::new(occupied, fragments, None, PartitionStrategy::Energy)
}

/// A named set of atomic positions (bohr).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomGroup {
    pub name: String,
    pub atoms: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitalRecord {
    pub position: [f64; 3],
    pub label: Option<String>,
}

/// Orbital centroids and atom groups, usually read from a sidecar file.
///
/// ```text
/// # comment
/// [group water_1]
/// 0.000  0.000  0.000
/// 1.430  1.108  0.000
/// [orbitals]
/// 6   0.52 0.40 0.00  sigma
/// 7  -0.21 0.93 0.00
/// ```
///
/// Orbital indices are 1-based; the trailing label is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OrbitalCentroids {
    pub groups: Vec<AtomGroup>,
    pub orbitals: BTreeMap<usize, OrbitalRecord>,
}

fn finite(v: [f64; 3]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn distance_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum()
}

impl OrbitalCentroids {
    pub fn parse(text: &str) -> Result<Self, PartitionError> {
        enum Section {
            None,
            Group,
            Orbitals,
        }
        let mut out = OrbitalCentroids::default();
        let mut section = Section::None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| PartitionError::Parse {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let mut parts = header.split_whitespace();
                match (parts.next(), parts.next(), parts.next()) {
                    (Some("group"), Some(name), None) => {
                        if out.groups.iter().any(|g| g.name == name) {
                            return Err(err(format!("group {name:?} declared twice")));
                        }
                        out.groups.push(AtomGroup {
                            name: name.to_string(),
                            atoms: Vec::new(),
                        });
                        section = Section::Group;
                    }
                    (Some("orbitals"), None, None) => section = Section::Orbitals,
                    _ => return Err(err(format!("unknown section [{header}]"))),
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let coords = |slice: &[&str]| -> Result<[f64; 3], PartitionError> {
                let mut v = [0.0; 3];
                for (k, s) in slice.iter().enumerate() {
                    v[k] = s
                        .parse()
                        .map_err(|_| err(format!("bad coordinate {s:?}")))?;
                }
                if finite(v) {
                    Ok(v)
                } else {
                    Err(err("non-finite coordinate".into()))
                }
            };
            match section {
                Section::None => return Err(err("data before any section header".into())),
                Section::Group => {
                    if fields.len() != 3 {
                        return Err(err(format!("expected x y z, got {} fields", fields.len())));
                    }
                    let v = coords(&fields)?;
                    out.groups.last_mut().expect("inside a group").atoms.push(v);
                }
                Section::Orbitals => {
                    if !(4..=5).contains(&fields.len()) {
                        return Err(err(format!(
                            "expected index x y z [label], got {} fields",
                            fields.len()
                        )));
                    }
                    let idx: usize = fields[0]
                        .parse()
                        .ok()
                        .filter(|&i| i >= 1)
                        .ok_or_else(|| err(format!("bad orbital index {:?}", fields[0])))?;
                    let position = coords(&fields[1..4])?;
                    let record = OrbitalRecord {
                        position,
                        label: fields.get(4).map(|s| s.to_string()),
                    };
                    if out.orbitals.insert(idx - 1, record).is_some() {
                        return Err(err(format!("orbital {idx} listed twice")));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Orbital → label pairs for [`partition_explicit`].
    pub fn labels(&self) -> Vec<(usize, String)> {
        self.orbitals
            .iter()
            .filter_map(|(&p, r)| r.label.clone().map(|l| (p, l)))
            .collect()
    }

    /// Rigidly shifts every coordinate.
    pub fn translated(&self, d: [f64; 3]) -> Self {
        let shift = |v: [f64; 3]| [v[0] + d[0], v[1] + d[1], v[2] + d[2]];
        Self {
            groups: self
                .groups
                .iter()
                .map(|g| AtomGroup {
                    name: g.name.clone(),
                    atoms: g.atoms.iter().map(|&a| shift(a)).collect(),
                })
                .collect(),
            orbitals: self
                .orbitals
                .iter()
                .map(|(&p, r)| {
                    (
                        p,
                        OrbitalRecord {
                            position: shift(r.position),
                            label: r.label.clone(),
                        },
                    )
                })
                .collect(),
        }
    }

    /// Index of the group whose nearest atom is closest to `point`; ties go
    /// to the earlier group.
    pub fn nearest_group(&self, point: [f64; 3]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (g, group) in self.groups.iter().enumerate() {
            let d = group
                .atoms
                .iter()
                .map(|&a| distance_sq(a, point))
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((g, d));
            }
        }
        best.map(|(g, _)| g)
    }
}

/// Each virtual goes to the atom group nearest its centroid (distance to the
/// closest atom of the group). Groups that receive no orbital are omitted.
pub fn partition_by_centroid(
    occupied: OccupiedSpace,
    centroids: &OrbitalCentroids,
) -> Result<OrbitalPartition, PartitionError> {
    if centroids.groups.is_empty() {
        return Err(PartitionError::NoGroups);
    }
    for g in &centroids.groups {
        if g.atoms.is_empty() {
            return Err(PartitionError::EmptyGroup(g.name.clone()));
        }
        if !g.atoms.iter().all(|&a| finite(a)) {
            return Err(PartitionError::NonFinite(format!("group {}", g.name)));
        }
    }
    let virtuals = occupied.virtuals();
    let missing: Vec<usize> = virtuals
        .iter()
        .copied()
        .filter(|p| !centroids.orbitals.contains_key(p))
        .collect();
    if !missing.is_empty() {
        return Err(PartitionError::MissingCentroids(missing));
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); centroids.groups.len()];
    for &p in &virtuals {
        let pos = centroids.orbitals[&p].position;
        if !finite(pos) {
            return Err(PartitionError::NonFinite(format!("orbital {}", p + 1)));
        }
        let g = centroids.nearest_group(pos).expect("at least one group");
        buckets[g].push(p);
    }
    let (labels, fragments): (Vec<String>, Vec<Vec<usize>>) = centroids
        .groups
        .iter()
        .zip(buckets)
        .filter(|(_, b)| !b.is_empty())
        .map(|(g, b)| (g.name.clone(), b))
        .unzip();
    OrbitalPartition::new(
        occupied,
        fragments,
        Some(labels),
        PartitionStrategy::Centroid,
    )
}

/// The subspace `O ∪ ⋃_{i∈key} V_i`.
pub fn subset_union(
    partition: &OrbitalPartition,
    key: SubsetKey,
) -> Result<SubspaceSpec, PartitionError> {
    if !key.is_subset_of(SubsetKey::full(partition.n_fragments())) {
        return Err(PartitionError::KeyOutOfRange {
            key,
            n_fragments: partition.n_fragments(),
        });
    }
    let virtuals = key
        .indices()
        .flat_map(|i| partition.fragment(i).iter().copied());
    Ok(SubspaceSpec::new(partition.occupied.clone(), virtuals)
        .expect("partition fragments are valid virtuals"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::MoIntegrals;

    /// `n_occ` occupied orbitals followed by `n_virt` virtuals.
    fn occ(n_occ: usize, n_virt: usize) -> OccupiedSpace {
        let ints = MoIntegrals::<f64>::new(n_occ + n_virt, 2 * n_occ).unwrap();
        OccupiedSpace::closed_shell(&ints)
    }

    #[test]
    fn key_order_and_display() {
        let mut keys = SubsetKey::all_up_to(3, 3);
        assert_eq!(keys.len(), 8);
        assert_eq!(keys[0], SubsetKey::EMPTY);
        let shown: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
        assert_eq!(
            shown,
            ["{}", "{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]
        );
        keys.reverse();
        keys.sort();
        assert_eq!(keys[7].to_string(), "{1,2,3}");
        assert_eq!("{3,1}".parse::<SubsetKey>().unwrap(), SubsetKey(0b101));
        assert!("{0}".parse::<SubsetKey>().is_err());
        assert_eq!(SubsetKey::from_indices([2, 0, 2]), SubsetKey(0b101));
    }

    #[test]
    fn subsets_enumerates_all_submasks() {
        let k = SubsetKey(0b1011);
        let subs: Vec<u64> = k.subsets().map(|s| s.0).collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|&s| s & !k.0 == 0));
        assert_eq!(SubsetKey::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn explicit_assignment() {
        // 0-based virtuals 1..=4 with labels A, A, B, B
        let o = occ(1, 4);
        let p = partition_explicit(o.clone(), [(1, "A"), (2, "A"), (3, "B"), (4, "B")]).unwrap();
        assert_eq!(p.fragments(), &[vec![1, 2], vec![3, 4]]);
        assert_eq!(p.labels(), &["A".to_string(), "B".to_string()]);

        let err = partition_explicit(o.clone(), [(1, "A"), (3, "B"), (4, "B")]).unwrap_err();
        assert_eq!(err, PartitionError::Unmapped(vec![2]));
        assert!(err.to_string().contains('3'));

        let err =
            partition_explicit(o, [(1, "A"), (2, "A"), (2, "B"), (3, "B"), (4, "B")]).unwrap_err();
        assert_eq!(err, PartitionError::DoublyMapped(vec![2]));
    }

    #[test]
    fn blocks() {
        let p = partition_blocks(occ(2, 7), 3).unwrap();
        let sizes: Vec<usize> = p.fragments().iter().map(Vec::len).collect();
        assert_eq!(sizes, [3, 2, 2]);
        assert_eq!(p.fragment(0), &[2, 3, 4]);
        assert_eq!(partition_blocks(occ(2, 7), 1).unwrap().fragment(0).len(), 7);
        assert!(partition_blocks(occ(2, 7), 7)
            .unwrap()
            .fragments()
            .iter()
            .all(|f| f.len() == 1));
        assert!(partition_blocks(occ(2, 7), 0).is_err());
        assert!(partition_blocks(occ(2, 7), 8).is_err());
    }

    #[test]
    fn energy_ordering() {
        let o = occ(1, 4);
        let sorted = [-1.0, 0.1, 0.2, 0.3, 0.4];
        assert_eq!(
            partition_by_energy(o.clone(), &sorted, 2)
                .unwrap()
                .fragments(),
            partition_blocks(o.clone(), 2).unwrap().fragments()
        );
        let reversed = [-1.0, 0.4, 0.3, 0.2, 0.1];
        let p = partition_by_energy(o.clone(), &reversed, 2).unwrap();
        assert_eq!(p.fragments(), &[vec![3, 4], vec![1, 2]]);
        let ties = [-1.0, 0.2, 0.1, 0.2, 0.1];
        let p = partition_by_energy(o.clone(), &ties, 2).unwrap();
        assert_eq!(p.fragments(), &[vec![2, 4], vec![1, 3]]);
        assert_eq!(
            partition_by_energy(o, &[-1.0, 0.1], 2).unwrap_err(),
            PartitionError::MissingEnergies(vec![2, 3, 4])
        );
    }

    fn two_groups() -> OrbitalCentroids {
        OrbitalCentroids::parse(
            "[group left]\n0 0 0\n[group right]\n10 0 0\n[orbitals]\n2 1 0 0\n3 5 0 0\n4 9 0 0\n",
        )
        .unwrap()
    }

    #[test]
    fn centroid_nearest_and_tie() {
        let c = two_groups();
        assert_eq!(c.nearest_group([1.0, 0.0, 0.0]), Some(0));
        assert_eq!(c.nearest_group([5.0, 0.0, 0.0]), Some(0));
        assert_eq!(c.nearest_group([9.0, 0.0, 0.0]), Some(1));
        let p = partition_by_centroid(occ(1, 3), &c).unwrap();
        assert_eq!(p.fragments(), &[vec![1, 2], vec![3]]);
        assert_eq!(p.labels(), &["left".to_string(), "right".to_string()]);
    }

    #[test]
    fn centroid_errors() {
        let c =
            OrbitalCentroids::parse("[group a]\n[group b]\n0 0 0\n[orbitals]\n2 0 0 0\n").unwrap();
        assert_eq!(
            partition_by_centroid(occ(1, 1), &c).unwrap_err(),
            PartitionError::EmptyGroup("a".into())
        );
        let c = two_groups();
        assert_eq!(
            partition_by_centroid(occ(1, 4), &c).unwrap_err(),
            PartitionError::MissingCentroids(vec![4])
        );
        assert!(matches!(
            OrbitalCentroids::parse("1 2 3\n"),
            Err(PartitionError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            OrbitalCentroids::parse("[orbitals]\n2 0 0\n"),
            Err(PartitionError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn unused_groups_are_dropped() {
        let c = OrbitalCentroids::parse(
            "[group a]\n0 0 0\n[group far]\n100 0 0\n[group b]\n10 0 0\n[orbitals]\n2 1 0 0\n3 9 0 0\n",
        )
        .unwrap();
        let p = partition_by_centroid(occ(1, 2), &c).unwrap();
        assert_eq!(p.labels(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn sidecar_labels_feed_explicit() {
        let c = OrbitalCentroids::parse(
            "[group g]\n0 0 0\n[orbitals]\n2 0 0 0 sigma\n3 0 0 1 pi\n4 0 0 2 sigma # note\n",
        )
        .unwrap();
        let p = partition_explicit(occ(1, 3), c.labels()).unwrap();
        assert_eq!(p.fragments(), &[vec![2], vec![1, 3]]);
        assert_eq!(p.labels(), &["pi".to_string(), "sigma".to_string()]);
    }

    #[test]
    fn union_of_keys() {
        let o = occ(1, 5);
        let p = OrbitalPartition::new(
            o,
            vec![vec![1, 2], vec![3], vec![4, 5]],
            None,
            PartitionStrategy::Explicit,
        )
        .unwrap();
        assert!(subset_union(&p, SubsetKey::EMPTY)
            .unwrap()
            .virtuals()
            .is_empty());
        assert_eq!(
            subset_union(&p, SubsetKey::full(3)).unwrap().virtuals(),
            &[1, 2, 3, 4, 5]
        );
        assert_eq!(
            subset_union(&p, SubsetKey::from_indices([0, 2]))
                .unwrap()
                .virtuals(),
            &[1, 2, 4, 5]
        );
        assert!(subset_union(&p, SubsetKey(0b1000)).is_err());
    }

    #[test]
    fn invariant_violations() {
        let o = occ(1, 3);
        assert!(matches!(
            OrbitalPartition::new(
                o.clone(),
                vec![vec![1], vec![]],
                None,
                PartitionStrategy::Blocks
            ),
            Err(PartitionError::Invariant(_))
        ));
        assert_eq!(
            OrbitalPartition::new(
                o.clone(),
                vec![vec![0, 1, 2, 3]],
                None,
                PartitionStrategy::Blocks
            )
            .unwrap_err(),
            PartitionError::NotVirtual(vec![0])
        );
        assert_eq!(
            OrbitalPartition::new(o, vec![vec![1, 2]], None, PartitionStrategy::Blocks)
                .unwrap_err(),
            PartitionError::Unmapped(vec![3])
        );
    }

    #[test]
    fn default_count() {
        assert_eq!(default_fragment_count(10), 3);
        assert_eq!(default_fragment_count(2), 2);
    }
}
