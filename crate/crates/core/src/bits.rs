//! Occupation-number bitstrings with the Jordan–Wigner sign convention:
//! a ladder operator on mode `p` picks up `(-1)^(number of occupied modes
//! below p)`.

#[inline]
fn parity_below(det: u64, p: usize) -> bool {
    (det & ((1u64 << p) - 1)).count_ones() % 2 == 1
}

/// `a_p |det⟩ = sign |det'⟩`, or `None` when mode `p` is empty.
#[inline]
pub fn annihilate(det: u64, p: usize) -> Option<(u64, bool)> {
    if det & (1u64 << p) == 0 {
        return None;
    }
    Some((det & !(1u64 << p), parity_below(det, p)))
}

/// `a†_p |det⟩ = sign |det'⟩`, or `None` when mode `p` is occupied.
#[inline]
pub fn create(det: u64, p: usize) -> Option<(u64, bool)> {
    if det & (1u64 << p) != 0 {
        return None;
    }
    Some((det | (1u64 << p), parity_below(det, p)))
}

/// Applies a product of ladder operators, rightmost first. Each entry is
/// `(mode, is_creation)`. The flag in the result is `true` for a minus sign.
pub fn apply_ladder(det: u64, ops: &[(usize, bool)]) -> Option<(u64, bool)> {
    let mut state = det;
    let mut negative = false;
    for &(mode, dagger) in ops.iter().rev() {
        let (next, flip) = if dagger {
            create(state, mode)?
        } else {
            annihilate(state, mode)?
        };
        state = next;
        negative ^= flip;
    }
    Some((state, negative))
}

/// Set bit positions, ascending.
pub fn ones(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let p = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(p)
        }
    })
}

/// All `k`-subsets of `0..n` as bitstrings, in lexicographic order of their
/// sorted index lists.
pub fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |acc, &i| acc | (1u64 << i)));
        // rightmost index that can still move right
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        idx[pos - 1] += 1;
        for j in pos..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
