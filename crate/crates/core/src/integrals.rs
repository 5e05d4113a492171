//! Molecular-orbital integral store and FCIDUMP reader/writer.
//!
//! FCIDUMP body lines are `value i j k l` with 1-based orbital indices:
//!
//! | indices        | meaning                         |
//! |----------------|---------------------------------|
//! | `i j k l` > 0  | two-electron integral `(ij|kl)` |
//! | `i j 0 0`      | one-electron integral `h_ij`    |
//! | `i 0 0 0`      | orbital energy `ε_i`            |
//! | `0 0 0 0`      | nuclear repulsion               |
//!
//! Two-electron integrals are stored once under their canonical index
//! (`p ≥ q`, `r ≥ s`, `(p,q) ≥ (r,s)`), so every one of the eight
//! permutations of an index tuple reads back the same value.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::scalar::{cast, Real};

/// Values read for the same canonical index may differ by at most this much.
const DUPLICATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum IntegralsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("orbital index {index} out of range 0..{n_orbitals}")]
    IndexOutOfRange { index: usize, n_orbitals: usize },
    #[error("only closed-shell systems are supported (NELEC={n_electrons}, MS2={ms2})")]
    OpenShell { n_electrons: usize, ms2: i32 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_error(line: usize, message: impl Into<String>) -> IntegralsError {
    IntegralsError::Parse {
        line,
        message: message.into(),
    }
}

/// Canonical 2-index key, `p ≥ q`.
#[inline]
pub fn pair_key(p: usize, q: usize) -> (usize, usize) {
    if p >= q {
        (p, q)
    } else {
        (q, p)
    }
}

/// Canonical 4-index key under the 8-fold permutation group.
#[inline]
pub fn eri_key(p: usize, q: usize, r: usize, s: usize) -> [usize; 4] {
    let pq = pair_key(p, q);
    let rs = pair_key(r, s);
    if pq >= rs {
        [pq.0, pq.1, rs.0, rs.1]
    } else {
        [rs.0, rs.1, pq.0, pq.1]
    }
}

/// One- and two-electron integrals over spatial molecular orbitals.
///
/// Indices are 0-based. The store is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MoIntegrals<T> {
    n_orbitals: usize,
    n_electrons: usize,
    ms2: i32,
    h_core: BTreeMap<(usize, usize), T>,
    eri: BTreeMap<[usize; 4], T>,
    e_nuclear: T,
    orbital_energies: Option<Vec<T>>,
}

impl<T: Real> MoIntegrals<T> {
    /// An empty closed-shell store; every integral reads as zero.
    pub fn new(n_orbitals: usize, n_electrons: usize) -> Result<Self, IntegralsError> {
        if !n_electrons.is_multiple_of(2) || n_electrons / 2 > n_orbitals {
            return Err(IntegralsError::OpenShell {
                n_electrons,
                ms2: (n_electrons % 2) as i32,
            });
        }
        Ok(Self {
            n_orbitals,
            n_electrons,
            ms2: 0,
            h_core: BTreeMap::new(),
            eri: BTreeMap::new(),
            e_nuclear: T::zero(),
            orbital_energies: None,
        })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn ms2(&self) -> i32 {
        self.ms2
    }

    /// Doubly occupied spatial orbitals of the closed-shell reference.
    pub fn n_occupied(&self) -> usize {
        self.n_electrons / 2
    }

    pub fn e_nuclear(&self) -> T {
        self.e_nuclear
    }

    pub fn orbital_energies(&self) -> Option<&[T]> {
        self.orbital_energies.as_deref()
    }

    fn check(&self, index: usize) -> Result<(), IntegralsError> {
        if index < self.n_orbitals {
            Ok(())
        } else {
            Err(IntegralsError::IndexOutOfRange {
                index,
                n_orbitals: self.n_orbitals,
            })
        }
    }

    /// `h_pq`, zero when never set.
    pub fn get_h(&self, p: usize, q: usize) -> Result<T, IntegralsError> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.h(p, q))
    }

    /// `(pq|rs)` in chemists' notation, zero when never set.
    pub fn get_eri(&self, p: usize, q: usize, r: usize, s: usize) -> Result<T, IntegralsError> {
        for i in [p, q, r, s] {
            self.check(i)?;
        }
        Ok(self.eri(p, q, r, s))
    }

    /// Unchecked variant of [`get_h`](Self::get_h) for inner loops.
    #[inline]
    pub fn h(&self, p: usize, q: usize) -> T {
        self.h_core
            .get(&pair_key(p, q))
            .copied()
            .unwrap_or_else(T::zero)
    }

    /// Unchecked variant of [`get_eri`](Self::get_eri) for inner loops.
    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> T {
        self.eri
            .get(&eri_key(p, q, r, s))
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn set_h(&mut self, p: usize, q: usize, value: T) -> Result<(), IntegralsError> {
        self.check(p)?;
        self.check(q)?;
        self.h_core.insert(pair_key(p, q), value);
        Ok(())
    }

    pub fn set_eri(
        &mut self,
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        value: T,
    ) -> Result<(), IntegralsError> {
        for i in [p, q, r, s] {
            self.check(i)?;
        }
        self.eri.insert(eri_key(p, q, r, s), value);
        Ok(())
    }

    pub fn set_e_nuclear(&mut self, value: T) {
        self.e_nuclear = value;
    }

    pub fn set_orbital_energies(&mut self, energies: Option<Vec<T>>) {
        if let Some(e) = &energies {
            assert_eq!(e.len(), self.n_orbitals, "one orbital energy per orbital");
        }
        self.orbital_energies = energies;
    }

    /// Stored canonical one-electron entries.
    pub fn h_entries(&self) -> impl Iterator<Item = ((usize, usize), T)> + '_ {
        self.h_core.iter().map(|(k, v)| (*k, *v))
    }

    /// Stored canonical two-electron entries.
    pub fn eri_entries(&self) -> impl Iterator<Item = ([usize; 4], T)> + '_ {
        self.eri.iter().map(|(k, v)| (*k, *v))
    }

    /// Reads an FCIDUMP stream.
    pub fn from_fcidump<R: BufRead>(reader: R) -> Result<Self, IntegralsError> {
        parse_fcidump(reader)
    }

    /// Writes the store as FCIDUMP. Values use the shortest representation
    /// that reads back to the identical scalar.
    pub fn write_fcidump<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            " &FCI NORB={},NELEC={},MS2={},",
            self.n_orbitals, self.n_electrons, self.ms2
        )?;
        let orbsym = vec!["1"; self.n_orbitals].join(",");
        writeln!(w, "  ORBSYM={orbsym},")?;
        writeln!(w, "  ISYM=1,")?;
        writeln!(w, " &END")?;
        for ([p, q, r, s], v) in &self.eri {
            writeln!(w, "{:e} {} {} {} {}", v, p + 1, q + 1, r + 1, s + 1)?;
        }
        for ((p, q), v) in &self.h_core {
            writeln!(w, "{:e} {} {} 0 0", v, p + 1, q + 1)?;
        }
        if let Some(eps) = &self.orbital_energies {
            for (p, v) in eps.iter().enumerate() {
                writeln!(w, "{:e} {} 0 0 0", v, p + 1)?;
            }
        }
        writeln!(w, "{:e} 0 0 0 0", self.e_nuclear)
    }

    pub fn to_fcidump_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_fcidump(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Block-diagonal union of two closed-shell systems with no interaction
    /// between them. Orbitals are reordered occupied-first:
    /// `[occ(a), occ(b), virt(a), virt(b)]`, so the combined reference
    /// determinant is again the lowest `n_occupied` orbitals.
    ///
    /// Returns the store together with the new index of every orbital of
    /// `a` and of `b`.
    pub fn direct_sum(a: &Self, b: &Self) -> (Self, Vec<usize>, Vec<usize>) {
        let (oa, ob) = (a.n_occupied(), b.n_occupied());
        let (va, vb) = (a.n_orbitals - oa, b.n_orbitals - ob);
        let map_a: Vec<usize> = (0..a.n_orbitals)
            .map(|p| if p < oa { p } else { oa + ob + (p - oa) })
            .collect();
        let map_b: Vec<usize> = (0..b.n_orbitals)
            .map(|p| {
                if p < ob {
                    oa + p
                } else {
                    oa + ob + va + (p - ob)
                }
            })
            .collect();
        let n = oa + ob + va + vb;
        let mut out = Self::new(n, a.n_electrons + b.n_electrons)
            .expect("sum of closed-shell systems is closed-shell");
        for (src, map) in [(a, &map_a), (b, &map_b)] {
            for ((p, q), v) in src.h_entries() {
                out.h_core.insert(pair_key(map[p], map[q]), v);
            }
            for ([p, q, r, s], v) in src.eri_entries() {
                out.eri.insert(eri_key(map[p], map[q], map[r], map[s]), v);
            }
        }
        out.e_nuclear = a.e_nuclear + b.e_nuclear;
        if let (Some(ea), Some(eb)) = (&a.orbital_energies, &b.orbital_energies) {
            let mut eps = vec![T::zero(); n];
            for (p, &e) in ea.iter().enumerate() {
                eps[map_a[p]] = e;
            }
            for (p, &e) in eb.iter().enumerate() {
                eps[map_b[p]] = e;
            }
            out.orbital_energies = Some(eps);
        }
        (out, map_a, map_b)
    }
}

/// Namelist header fields we act on.
struct Header {
    norb: usize,
    nelec: usize,
    ms2: i32,
}

fn parse_header(text: &str, end_line: usize) -> Result<Header, IntegralsError> {
    // Items are `KEY=v1,v2,...` separated by commas and/or whitespace; a
    // token followed by '=' starts a new item.
    let upper = text.to_ascii_uppercase();
    let body = upper
        .replacen("&FCI", " ", 1)
        .replace("&END", " ")
        .replace('/', " ")
        .replace('=', " = ");
    let tokens: Vec<&str> = body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    let mut fields: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut current: Option<&str> = None;
    let mut i = 0;
    while i < tokens.len() {
        if tokens.get(i + 1) == Some(&"=") {
            current = Some(tokens[i]);
            fields.entry(tokens[i]).or_default();
            i += 2;
            continue;
        }
        if let Some(key) = current {
            fields.entry(key).or_default().push(tokens[i]);
        }
        i += 1;
    }

    let first_int = |key: &str| -> Result<Option<i64>, IntegralsError> {
        match fields.get(key) {
            None => Ok(None),
            Some(values) => {
                let item = values
                    .first()
                    .ok_or_else(|| parse_error(end_line, format!("{key} has no value")))?;
                item.parse::<i64>()
                    .map(Some)
                    .map_err(|_| parse_error(end_line, format!("{key}: invalid integer {item:?}")))
            }
        }
    };
    let norb = first_int("NORB")?.ok_or_else(|| parse_error(end_line, "header is missing NORB"))?;
    let nelec =
        first_int("NELEC")?.ok_or_else(|| parse_error(end_line, "header is missing NELEC"))?;
    let ms2 = first_int("MS2")?.unwrap_or(0);
    if norb < 0 || nelec < 0 {
        return Err(parse_error(end_line, "NORB and NELEC must be non-negative"));
    }
    Ok(Header {
        norb: norb as usize,
        nelec: nelec as usize,
        ms2: ms2 as i32,
    })
}

/// Parses a floating value, accepting Fortran `D` exponents.
fn parse_value<T: Real>(token: &str, line: usize) -> Result<T, IntegralsError> {
    let normalized = token.replace(['D', 'd'], "E");
    normalized
        .parse::<f64>()
        .map(cast)
        .map_err(|_| parse_error(line, format!("invalid number {token:?}")))
}

fn insert_checked<K: Ord + Copy + std::fmt::Debug, T: Real>(
    map: &mut BTreeMap<K, T>,
    key: K,
    value: T,
    line: usize,
) -> Result<(), IntegralsError> {
    if let Some(&old) = map.get(&key) {
        if (old - value).abs() > cast(DUPLICATE_TOLERANCE) {
            return Err(parse_error(
                line,
                format!("inconsistent duplicate entry for {key:?}: {old} vs {value}"),
            ));
        }
    }
    map.insert(key, value);
    Ok(())
}

/// Parses an FCIDUMP stream into a symmetric integral store.
pub fn parse_fcidump<T: Real, R: BufRead>(reader: R) -> Result<MoIntegrals<T>, IntegralsError> {
    let mut lines = reader.lines().enumerate();
    let mut header_text = String::new();
    let mut header_end = 0;
    let mut started = false;
    for (idx, line) in lines.by_ref() {
        let line = line?;
        let lineno = idx + 1;
        let upper = line.trim().to_ascii_uppercase();
        if !started {
            if upper.is_empty() {
                continue;
            }
            if !upper.starts_with("&FCI") {
                return Err(parse_error(lineno, "expected '&FCI' namelist header"));
            }
            started = true;
        }
        header_text.push_str(&line);
        header_text.push('\n');
        header_end = lineno;
        if upper.contains("&END") || upper == "/" || upper.ends_with('/') {
            break;
        }
    }
    if !started {
        return Err(parse_error(1, "empty input"));
    }
    let header = parse_header(&header_text, header_end)?;
    if header.ms2 != 0 || header.nelec % 2 != 0 {
        return Err(IntegralsError::OpenShell {
            n_electrons: header.nelec,
            ms2: header.ms2,
        });
    }
    let mut ints = MoIntegrals::<T>::new(header.norb, header.nelec)?;
    let n = header.norb;
    let mut eps: BTreeMap<usize, T> = BTreeMap::new();
    let mut e_nuc: Option<T> = None;

    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let value: T = parse_value(parts.next().expect("non-empty line"), lineno)?;
        let mut idxs = [0usize; 4];
        for slot in idxs.iter_mut() {
            let tok = parts
                .next()
                .ok_or_else(|| parse_error(lineno, "expected `value i j k l`"))?;
            let raw: i64 = tok
                .parse()
                .map_err(|_| parse_error(lineno, format!("invalid index {tok:?}")))?;
            if raw < 0 || raw as usize > n {
                return Err(parse_error(
                    lineno,
                    format!("orbital index {raw} out of range 1..={n}"),
                ));
            }
            *slot = raw as usize;
        }
        if parts.next().is_some() {
            return Err(parse_error(lineno, "trailing tokens after `value i j k l`"));
        }
        match idxs {
            [0, 0, 0, 0] => {
                if let Some(old) = e_nuc {
                    if (old - value).abs() > cast(DUPLICATE_TOLERANCE) {
                        return Err(parse_error(lineno, "inconsistent nuclear repulsion"));
                    }
                }
                e_nuc = Some(value);
            }
            [i, 0, 0, 0] => insert_checked(&mut eps, i - 1, value, lineno)?,
            [i, j, 0, 0] if j > 0 => {
                insert_checked(&mut ints.h_core, pair_key(i - 1, j - 1), value, lineno)?
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => insert_checked(
                &mut ints.eri,
                eri_key(i - 1, j - 1, k - 1, l - 1),
                value,
                lineno,
            )?,
            _ => {
                return Err(parse_error(
                    lineno,
                    format!("unrecognised index pattern {idxs:?}"),
                ))
            }
        }
    }
    ints.e_nuclear = e_nuc.unwrap_or_else(T::zero);
    if !eps.is_empty() {
        if eps.len() != n {
            return Err(parse_error(
                header_end,
                format!("orbital energies given for {} of {n} orbitals", eps.len()),
            ));
        }
        ints.orbital_energies = Some(eps.into_values().collect());
    }
    Ok(ints)
}

/// Convenience wrapper over [`parse_fcidump`] for in-memory text.
pub fn parse_fcidump_str<T: Real>(text: &str) -> Result<MoIntegrals<T>, IntegralsError> {
    parse_fcidump(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    const H2_HEADER: &str = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n";

    #[test]
    fn nuclear_repulsion_line() {
        let text = format!("{H2_HEADER}0.7137 0 0 0 0\n");
        let ints: MoIntegrals<f64> = parse_fcidump_str(&text).unwrap();
        assert_eq!(ints.e_nuclear(), 0.7137);
        assert_eq!(ints.n_orbitals(), 2);
        assert_eq!(ints.n_electrons(), 2);
        assert_eq!(ints.n_occupied(), 1);
    }

    #[test]
    fn eri_permutations_read_back() {
        let text = format!("{H2_HEADER}0.6746 1 1 1 1\n0.18 2 1 2 1\n0.66 2 2 1 1\n");
        let ints: MoIntegrals<f64> = parse_fcidump_str(&text).unwrap();
        assert_eq!(ints.get_eri(0, 0, 0, 0).unwrap(), 0.6746);
        for (p, q, r, s) in [(1, 0, 1, 0), (0, 1, 1, 0), (1, 0, 0, 1), (0, 1, 0, 1)] {
            assert_eq!(ints.get_eri(p, q, r, s).unwrap(), 0.18);
        }
        assert_eq!(ints.get_eri(0, 0, 1, 1).unwrap(), 0.66);
        assert_eq!(ints.get_eri(1, 1, 0, 0).unwrap(), 0.66);
    }

    #[test]
    fn unset_entry_is_zero() {
        let ints: MoIntegrals<f64> = parse_fcidump_str(H2_HEADER).unwrap();
        assert_eq!(ints.get_eri(0, 1, 1, 1).unwrap(), 0.0);
        assert_eq!(ints.get_h(0, 1).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_query_is_rejected() {
        let ints: MoIntegrals<f64> = parse_fcidump_str(H2_HEADER).unwrap();
        assert!(matches!(
            ints.get_eri(0, 0, 0, 2),
            Err(IntegralsError::IndexOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn missing_norb_reports_line() {
        let err = parse_fcidump_str::<f64>("&FCI NELEC=2,MS2=0\n&END\n").unwrap_err();
        match err {
            IntegralsError::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("NORB"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_nelec_is_rejected() {
        let err = parse_fcidump_str::<f64>("&FCI NORB=2\n&END\n").unwrap_err();
        assert!(err.to_string().contains("NELEC"));
    }

    #[test]
    fn index_out_of_range_reports_line() {
        let text = format!("{H2_HEADER}0.5 3 1 1 1\n");
        let err = parse_fcidump_str::<f64>(&text).unwrap_err();
        assert!(
            matches!(err, IntegralsError::Parse { line: 3, .. }),
            "{err}"
        );
    }

    #[test]
    fn inconsistent_duplicate_is_rejected() {
        let text = format!("{H2_HEADER}0.18 2 1 2 1\n0.19 1 2 1 2\n");
        let err = parse_fcidump_str::<f64>(&text).unwrap_err();
        assert!(
            matches!(err, IntegralsError::Parse { line: 4, .. }),
            "{err}"
        );
        // identical duplicates under another permutation are fine
        let text = format!("{H2_HEADER}0.18 2 1 2 1\n0.18 1 2 1 2\n");
        assert!(parse_fcidump_str::<f64>(&text).is_ok());
    }

    #[test]
    fn open_shell_is_rejected() {
        assert!(matches!(
            parse_fcidump_str::<f64>("&FCI NORB=2,NELEC=1,MS2=1\n&END\n"),
            Err(IntegralsError::OpenShell { .. })
        ));
        assert!(matches!(
            parse_fcidump_str::<f64>("&FCI NORB=2,NELEC=2,MS2=2\n&END\n"),
            Err(IntegralsError::OpenShell { .. })
        ));
    }

    #[test]
    fn tolerates_namelist_variants_and_fortran_exponents() {
        let text = "\
 &FCI NORB=  2 NELEC= 2 MS2= 0
  ORBSYM=1,1,
  ISYM=1
 /
 0.5D+00 1 1 1 1
 -1.25d0 1 1 0 0
";
        let ints: MoIntegrals<f64> = parse_fcidump_str(text).unwrap();
        assert_eq!(ints.n_orbitals(), 2);
        assert_eq!(ints.eri(0, 0, 0, 0), 0.5);
        assert_eq!(ints.h(0, 0), -1.25);
    }

    #[test]
    fn orbital_energy_lines() {
        let text = format!("{H2_HEADER}-0.5 1 0 0 0\n0.6 2 0 0 0\n");
        let ints: MoIntegrals<f64> = parse_fcidump_str(&text).unwrap();
        assert_eq!(ints.orbital_energies().unwrap(), &[-0.5, 0.6]);
        let partial = format!("{H2_HEADER}-0.5 1 0 0 0\n");
        assert!(parse_fcidump_str::<f64>(&partial).is_err());
    }

    #[test]
    fn direct_sum_orders_occupied_first() {
        let text = format!(
            "{H2_HEADER}0.6746 1 1 1 1\n0.18 2 1 2 1\n-1.25 1 1 0 0\n-0.47 2 2 0 0\n0.7 0 0 0 0\n"
        );
        let h2: MoIntegrals<f64> = parse_fcidump_str(&text).unwrap();
        let (dimer, ma, mb) = MoIntegrals::direct_sum(&h2, &h2);
        assert_eq!(ma, vec![0, 2]);
        assert_eq!(mb, vec![1, 3]);
        assert_eq!(dimer.n_electrons(), 4);
        assert_eq!(dimer.h(1, 1), -1.25);
        assert_eq!(dimer.h(3, 3), -0.47);
        assert_eq!(dimer.eri(3, 1, 3, 1), 0.18);
        assert_eq!(dimer.eri(0, 0, 1, 1), 0.0);
        assert_eq!(dimer.e_nuclear(), 1.4);
    }
}
