//! Exact integer combinatorics: perfect fillings of margin tables, index and
//! dimension formulas for critical components, subset degree statistics, and
//! the mod-2 Betti numbers of SO(n), O(n) and Grassmannians.
//!
//! Everything here is exact: counts are big integers, enumeration orders are
//! deterministic (row-major lexicographic for fillings, lexicographic for
//! permutations).

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SignedPermutation;
use crate::polynomial::IntPolynomial;

pub(crate) mod biguint_serde {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Binomial coefficient C(n, 2) as u64.
pub fn choose2(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

// ---------------------------------------------------------------------------
// Margins and perfect fillings
// ---------------------------------------------------------------------------

/// Row margins m_1..m_s and column margins n_1..n_t with equal totals; the
/// common total is the ambient dimension n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MarginsRepr", into = "MarginsRepr")]
pub struct Margins {
    m: Vec<usize>,
    n: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MarginsRepr {
    m: Vec<usize>,
    n: Vec<usize>,
}

impl TryFrom<MarginsRepr> for Margins {
    type Error = Error;
    fn try_from(repr: MarginsRepr) -> Result<Margins> {
        Margins::new(repr.m, repr.n)
    }
}

impl From<Margins> for MarginsRepr {
    fn from(m: Margins) -> MarginsRepr {
        MarginsRepr { m: m.m, n: m.n }
    }
}

impl Margins {
    pub fn new(m: Vec<usize>, n: Vec<usize>) -> Result<Margins> {
        if m.is_empty() || n.is_empty() {
            return Err(Error::InvalidArgument("margins must be nonempty".into()));
        }
        if m.contains(&0) || n.contains(&0) {
            return Err(Error::InvalidArgument("margins must be positive".into()));
        }
        let (sm, sn) = (m.iter().sum::<usize>(), n.iter().sum::<usize>());
        if sm != sn {
            return Err(Error::InvalidArgument(format!(
                "margin sums differ: {sm} != {sn}"
            )));
        }
        Ok(Margins { m, n })
    }

    /// Margins of an n x n table with all entries 1 (distinct eigenvalues on
    /// both sides).
    pub fn all_ones(n: usize) -> Result<Margins> {
        Margins::new(vec![1; n], vec![1; n])
    }

    pub fn row_margins(&self) -> &[usize] {
        &self.m
    }

    pub fn col_margins(&self) -> &[usize] {
        &self.n
    }

    pub fn s(&self) -> usize {
        self.m.len()
    }

    pub fn t(&self) -> usize {
        self.n.len()
    }

    /// The common total of both margin vectors.
    pub fn total(&self) -> usize {
        self.m.iter().sum()
    }

    /// 0-based offsets of the row blocks in an n x n matrix.
    pub fn row_offsets(&self) -> Vec<usize> {
        offsets(&self.m)
    }

    /// 0-based offsets of the column blocks.
    pub fn col_offsets(&self) -> Vec<usize> {
        offsets(&self.n)
    }

    /// 0-based row-block index containing the 1-based position p.
    pub fn row_block_of(&self, p: usize) -> usize {
        block_of(&self.m, p)
    }

    /// 0-based column-block index containing the 1-based position p.
    pub fn col_block_of(&self, p: usize) -> usize {
        block_of(&self.n, p)
    }
}

fn offsets(mults: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(mults.len());
    let mut acc = 0;
    for &m in mults {
        out.push(acc);
        acc += m;
    }
    out
}

fn block_of(mults: &[usize], p: usize) -> usize {
    debug_assert!(p >= 1);
    let mut acc = 0;
    for (i, &m) in mults.iter().enumerate() {
        acc += m;
        if p <= acc {
            return i;
        }
    }
    panic!("position {p} beyond margin total {acc}");
}

/// An s x t table of nonnegative integers whose row sums are the row margins
/// and whose column sums are the column margins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FillingRepr")]
pub struct PerfectFilling {
    eps: Vec<Vec<usize>>,
    margins: Margins,
}

#[derive(Deserialize)]
struct FillingRepr {
    eps: Vec<Vec<usize>>,
    margins: Margins,
}

impl TryFrom<FillingRepr> for PerfectFilling {
    type Error = Error;
    fn try_from(repr: FillingRepr) -> Result<PerfectFilling> {
        PerfectFilling::new(repr.eps, repr.margins)
    }
}

impl PerfectFilling {
    pub fn new(eps: Vec<Vec<usize>>, margins: Margins) -> Result<PerfectFilling> {
        if eps.len() != margins.s() || eps.iter().any(|row| row.len() != margins.t()) {
            return Err(Error::DimensionMismatch(format!(
                "filling must be {}x{}",
                margins.s(),
                margins.t()
            )));
        }
        for (i, row) in eps.iter().enumerate() {
            if row.iter().sum::<usize>() != margins.row_margins()[i] {
                return Err(Error::InvalidArgument(format!(
                    "row {i} sums to {}, expected {}",
                    row.iter().sum::<usize>(),
                    margins.row_margins()[i]
                )));
            }
        }
        for j in 0..margins.t() {
            let col: usize = eps.iter().map(|row| row[j]).sum();
            if col != margins.col_margins()[j] {
                return Err(Error::InvalidArgument(format!(
                    "column {j} sums to {col}, expected {}",
                    margins.col_margins()[j]
                )));
            }
        }
        Ok(PerfectFilling { eps, margins })
    }

    /// Entry at 0-based block position (i, j).
    pub fn entry(&self, i: usize, j: usize) -> usize {
        self.eps[i][j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.eps
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    /// Entries flattened row-major; this is the ordering key used by
    /// [`enumerate_fillings`].
    pub fn flat(&self) -> Vec<usize> {
        self.eps.iter().flatten().copied().collect()
    }
}

/// All perfect fillings with the given margins, in row-major lexicographic
/// order of their entry vectors, without duplicates.
pub fn enumerate_fillings(margins: &Margins) -> Vec<PerfectFilling> {
    let (s, t) = (margins.s(), margins.t());
    let mut rem = margins.col_margins().to_vec();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(s);
    let mut out = Vec::new();

    fn fill_rows(
        i: usize,
        s: usize,
        t: usize,
        margins: &Margins,
        rem: &mut Vec<usize>,
        rows: &mut Vec<Vec<usize>>,
        out: &mut Vec<PerfectFilling>,
    ) {
        if i == s {
            out.push(PerfectFilling {
                eps: rows.clone(),
                margins: margins.clone(),
            });
            return;
        }
        let target = margins.row_margins()[i];
        let mut row = vec![0usize; t];
        fill_cells(0, target, i, s, t, margins, &mut row, rem, rows, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn fill_cells(
        j: usize,
        left: usize,
        i: usize,
        s: usize,
        t: usize,
        margins: &Margins,
        row: &mut Vec<usize>,
        rem: &mut Vec<usize>,
        rows: &mut Vec<Vec<usize>>,
        out: &mut Vec<PerfectFilling>,
    ) {
        if j == t {
            if left == 0 {
                rows.push(row.clone());
                fill_rows(i + 1, s, t, margins, rem, rows, out);
                rows.pop();
            }
            return;
        }
        // Capacity of the remaining cells must cover what is left to place.
        let tail: usize = rem[j + 1..].iter().sum();
        let lo = left.saturating_sub(tail);
        let hi = left.min(rem[j]);
        for v in lo..=hi {
            row[j] = v;
            rem[j] -= v;
            fill_cells(j + 1, left - v, i, s, t, margins, row, rem, rows, out);
            rem[j] += v;
        }
        row[j] = 0;
    }

    fill_rows(0, s, t, margins, &mut rem, &mut rows, &mut out);
    out
}

/// Hessian index of the critical component attached to a filling:
/// sum of eps_ij * eps_kl over cell pairs with i < k and j < l. Assumes the
/// paper's sortedness convention for the underlying spectra.
pub fn filling_index(f: &PerfectFilling) -> u64 {
    let (s, t) = (f.margins.s(), f.margins.t());
    let mut total = 0u64;
    for i in 0..s {
        for j in 0..t {
            if f.eps[i][j] == 0 {
                continue;
            }
            for k in (i + 1)..s {
                for l in (j + 1)..t {
                    total += (f.eps[i][j] * f.eps[k][l]) as u64;
                }
            }
        }
    }
    total
}

/// Manifold dimension of the critical component attached to a filling:
/// sum_i C(m_i,2) + sum_j C(n_j,2) - sum_{ij} C(eps_ij,2), the dimension of
/// the quotient of the margin orthogonal groups by the block isotropy group.
pub fn component_dimension(f: &PerfectFilling) -> u64 {
    let q: u64 = f.margins.row_margins().iter().map(|&m| choose2(m)).sum();
    let r: u64 = f.margins.col_margins().iter().map(|&n| choose2(n)).sum();
    let iso: u64 = f.eps.iter().flatten().map(|&e| choose2(e)).sum();
    debug_assert!(q + r >= iso);
    q + r - iso
}

/// The filling realized by a signed permutation matrix: eps_ij counts the
/// nonzero entries of S P_sigma inside the (i, j) margin block.
pub fn filling_of_spm(sp: &SignedPermutation, margins: &Margins) -> Result<PerfectFilling> {
    if margins.total() != sp.n() {
        return Err(Error::DimensionMismatch(format!(
            "margins total {} but the signed permutation has size {}",
            margins.total(),
            sp.n()
        )));
    }
    let mut eps = vec![vec![0usize; margins.t()]; margins.s()];
    for p in 1..=sp.n() {
        let i = margins.row_block_of(sp.sigma(p));
        let j = margins.col_block_of(p);
        eps[i][j] += 1;
    }
    PerfectFilling::new(eps, margins.clone())
}

/// The statistic |{(p, q) : 1 <= p < q <= n and sigma(q) > sigma(p)}|.
///
/// This counts order-preserving pairs, following the formula the index
/// theory produces for distinct eigenvalues (the literature names the
/// quantity an "inversion number"; the set counted is as written here).
pub fn inversion_stat(perm: &[usize], n: usize) -> Result<u64> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} permutation images, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v == 0 || v > n || seen[v - 1] {
            return Err(Error::InvalidArgument(
                "permutation images must form a bijection".into(),
            ));
        }
        seen[v - 1] = true;
    }
    let mut count = 0u64;
    for p in 0..n {
        for q in (p + 1)..n {
            if perm[q] > perm[p] {
                count += 1;
            }
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Subset degrees and Betti numbers
// ---------------------------------------------------------------------------

/// Degree statistics of a subset S of {1,...,n}:
/// deg S = |{(p,q) in ([n] \ S) x S : p < q}| and
/// sdeg S = C(|S|,2) + deg S = |{(p,q) in [n] x S : p < q}|.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetDegrees {
    pub n: usize,
    pub set: Vec<usize>,
    pub deg: u64,
    pub sdeg: u64,
}

pub fn subset_degrees(set: &[usize], n: usize) -> Result<SubsetDegrees> {
    let mut member = vec![false; n + 1];
    for &v in set {
        if v == 0 || v > n {
            return Err(Error::InvalidArgument(format!(
                "subset element {v} outside 1..={n}"
            )));
        }
        if member[v] {
            return Err(Error::InvalidArgument(format!("repeated element {v}")));
        }
        member[v] = true;
    }
    let mut deg = 0u64;
    let mut sdeg = 0u64;
    for q in 1..=n {
        if !member[q] {
            continue;
        }
        for p in 1..q {
            sdeg += 1;
            if !member[p] {
                deg += 1;
            }
        }
    }
    debug_assert_eq!(sdeg, choose2(set.len()) + deg);
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    Ok(SubsetDegrees {
        n,
        set: sorted,
        deg,
        sdeg,
    })
}

fn subsets_stats(n: usize) -> impl Iterator<Item = (usize, u64, u64)> {
    // (|S|, deg S, sdeg S) over all subsets of [n]; n is capped well below
    // the bitmask width by every caller.
    assert!(n < 26, "subset enumeration capped at n < 26");
    (0u32..(1u32 << n)).map(move |mask| {
        let mut size = 0usize;
        let mut deg = 0u64;
        let mut sdeg = 0u64;
        for q in 1..=n {
            if mask & (1 << (q - 1)) == 0 {
                continue;
            }
            size += 1;
            for p in 1..q {
                sdeg += 1;
                if mask & (1 << (p - 1)) == 0 {
                    deg += 1;
                }
            }
        }
        (size, deg, sdeg)
    })
}

/// c_i(k, n) = |{S subset of [n] : |S| = k, deg S = i}|, the i-th mod-2 Betti
/// number of the Grassmannian G(k, n). Out-of-range i returns 0.
pub fn grassmannian_betti(i: i64, k: usize, n: usize) -> BigUint {
    if i < 0 || k > n {
        return BigUint::ZERO;
    }
    let mut count = BigUint::ZERO;
    for (size, deg, _) in subsets_stats(n) {
        if size == k && deg == i as u64 {
            count += 1u32;
        }
    }
    count
}

/// c_i(n) = |{S subset of [n] : sdeg S = i}|, the i-th mod-2 Betti number of
/// O(n).
pub fn group_betti_c(i: i64, n: usize) -> BigUint {
    if i < 0 {
        return BigUint::ZERO;
    }
    let mut count = BigUint::ZERO;
    for (_, _, sdeg) in subsets_stats(n) {
        if sdeg == i as u64 {
            count += 1u32;
        }
    }
    count
}

/// b_i(n) = |{S subset of {1,...,n-1} : sum of S = i}|, the i-th mod-2 Betti
/// number of SO(n).
pub fn so_betti(i: i64, n: usize) -> BigUint {
    if i < 0 {
        return BigUint::ZERO;
    }
    poincare_so(n).coeff(i as usize)
}

/// Poincare polynomial of SO(n): p_n(t) = prod_{k=1}^{n-1} (1 + t^k),
/// computed by the recursion p_n = (1 + t^{n-1}) p_{n-1}, p_1 = 1.
pub fn poincare_so(n: usize) -> IntPolynomial {
    let mut p = IntPolynomial::one();
    for k in 2..=n {
        p = p.times_one_plus_tk(k - 1);
    }
    p
}

/// The two equivalent shift conventions for the Grassmannian degree offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IotaConvention {
    /// iota(k) = C(k, 2).
    KChoose2,
    /// iota(k) = C(n - k, 2).
    ComplementChoose2,
}

impl IotaConvention {
    pub fn shift(self, k: usize, n: usize) -> u64 {
        match self {
            IotaConvention::KChoose2 => choose2(k),
            IotaConvention::ComplementChoose2 => choose2(n - k),
        }
    }
}

/// One degree of an exact two-sided comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeComparison {
    pub degree: usize,
    #[serde(with = "biguint_serde")]
    pub lhs: BigUint,
    #[serde(with = "biguint_serde")]
    pub rhs: BigUint,
    pub equal: bool,
}

/// Per-degree check of the identity 2 b_i(n) = sum_k c_{i - iota(k)}(k, n)
/// relating SO(n) Betti numbers to those of all Grassmannians G(k, n).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrankelReport {
    pub n: usize,
    pub convention: IotaConvention,
    pub rows: Vec<DegreeComparison>,
    pub all_equal: bool,
}

pub fn frankel_report(n: usize, convention: IotaConvention) -> FrankelReport {
    let max_degree = choose2(n) as usize;
    let mut rows = Vec::with_capacity(max_degree + 1);
    let mut all_equal = true;
    for i in 0..=max_degree {
        let lhs = so_betti(i as i64, n) * 2u32;
        let mut rhs = BigUint::ZERO;
        for k in 0..=n {
            rhs += grassmannian_betti(i as i64 - convention.shift(k, n) as i64, k, n);
        }
        let equal = lhs == rhs;
        all_equal &= equal;
        rows.push(DegreeComparison {
            degree: i,
            lhs,
            rhs,
            equal,
        });
    }
    FrankelReport {
        n,
        convention,
        rows,
        all_equal,
    }
}

// ---------------------------------------------------------------------------
// Enumeration helpers
// ---------------------------------------------------------------------------

/// All compositions of n: ordered tuples of positive integers summing to n.
/// These are the possible multiplicity vectors of an n-dimensional spectrum.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// All permutations of {1,...,n} as image vectors, lexicographic.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n + 1];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                current.push(v);
                rec(n, current, used, out);
                current.pop();
                used[v] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

/// All 2^n sign vectors over {+1, -1}, in binary counting order.
pub fn all_sign_vectors(n: usize) -> Vec<Vec<i8>> {
    assert!(n < 26);
    (0u32..(1u32 << n))
        .map(|mask| {
            (0..n)
                .map(|u| if mask & (1 << u) != 0 { -1 } else { 1 })
                .collect()
        })
        .collect()
}

/// All signed permutation matrices of size n (outer loop permutations in
/// lexicographic order, inner loop sign vectors).
pub fn all_signed_permutations(n: usize) -> Vec<SignedPermutation> {
    let mut out = Vec::new();
    for perm in permutations(n) {
        for signs in all_sign_vectors(n) {
            out.push(SignedPermutation::new(signs, perm.clone()).unwrap());
        }
    }
    out
}

/// Morse counting polynomial of the quadratic trace function with distinct
/// eigenvalues on both sides: 2^n sum_sigma t^{index(sigma)}, one term per
/// signed permutation matrix.
pub fn morse_counting_polynomial(n: usize) -> IntPolynomial {
    let mut coeffs = vec![BigUint::ZERO; choose2(n) as usize + 1];
    for perm in permutations(n) {
        let idx = inversion_stat(&perm, n).unwrap() as usize;
        coeffs[idx] += 1u32;
    }
    let factor = BigUint::from(2u32).pow(n as u32);
    IntPolynomial::from_coeffs(coeffs.into_iter().map(|c| c * &factor).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins_validation() {
        assert!(Margins::new(vec![1, 2], vec![3]).is_ok());
        assert!(Margins::new(vec![1, 2], vec![2]).is_err());
        assert!(Margins::new(vec![0, 3], vec![3]).is_err());
        assert!(Margins::new(vec![], vec![]).is_err());
    }

    #[test]
    fn fillings_all_ones_are_permutation_matrices() {
        for n in 1..=5 {
            let margins = Margins::all_ones(n).unwrap();
            let fillings = enumerate_fillings(&margins);
            let factorial: usize = (1..=n).product();
            assert_eq!(fillings.len(), factorial);
            for f in &fillings {
                for row in f.rows() {
                    assert_eq!(row.iter().sum::<usize>(), 1);
                    assert!(row.iter().all(|&v| v <= 1));
                }
            }
        }
    }

    #[test]
    fn fillings_single_cell() {
        let margins = Margins::new(vec![4], vec![4]).unwrap();
        let fillings = enumerate_fillings(&margins);
        assert_eq!(fillings.len(), 1);
        assert_eq!(fillings[0].rows(), &[vec![4]]);
    }

    #[test]
    fn fillings_small_case_matches_brute_force() {
        // Margins m = (1,2), n = (2,1): brute force over all 2x2 tables
        // with entries <= 2 finds exactly two fillings; our enumeration must
        // produce them in row-major lexicographic order.
        let margins = Margins::new(vec![1, 2], vec![2, 1]).unwrap();
        let mut brute = Vec::new();
        for a in 0..=2usize {
            for b in 0..=2usize {
                for c in 0..=2usize {
                    for d in 0..=2usize {
                        if a + b == 1 && c + d == 2 && a + c == 2 && b + d == 1 {
                            brute.push(vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
        brute.sort();
        let listed: Vec<Vec<usize>> = enumerate_fillings(&margins)
            .iter()
            .map(|f| f.flat())
            .collect();
        assert_eq!(listed, brute);
        assert_eq!(listed, vec![vec![0, 1, 2, 0], vec![1, 0, 1, 1]]);
    }

    #[test]
    fn fillings_ordering_and_margins_hold() {
        let margins = Margins::new(vec![2, 3, 1], vec![1, 3, 2]).unwrap();
        let fillings = enumerate_fillings(&margins);
        assert!(!fillings.is_empty());
        let mut last: Option<Vec<usize>> = None;
        for f in &fillings {
            // Margin constraints hold exactly (PerfectFilling::new revalidates).
            PerfectFilling::new(f.rows().to_vec(), margins.clone()).unwrap();
            let key = f.flat();
            if let Some(prev) = &last {
                assert!(prev < &key, "lexicographic order violated");
            }
            last = Some(key);
        }
    }

    #[test]
    fn filling_index_examples() {
        let m2 = Margins::all_ones(2).unwrap();
        let id = PerfectFilling::new(vec![vec![1, 0], vec![0, 1]], m2.clone()).unwrap();
        assert_eq!(filling_index(&id), 1);
        let anti = PerfectFilling::new(vec![vec![0, 1], vec![1, 0]], m2).unwrap();
        assert_eq!(filling_index(&anti), 0);
        let single = PerfectFilling::new(
            vec![vec![3]],
            Margins::new(vec![3], vec![3]).unwrap(),
        )
        .unwrap();
        assert_eq!(filling_index(&single), 0);
    }

    #[test]
    fn component_dimension_examples() {
        for n in 1..=4 {
            let margins = Margins::all_ones(n).unwrap();
            for f in enumerate_fillings(&margins) {
                assert_eq!(component_dimension(&f), 0);
            }
        }
        let full = PerfectFilling::new(
            vec![vec![3]],
            Margins::new(vec![3], vec![3]).unwrap(),
        )
        .unwrap();
        assert_eq!(component_dimension(&full), 3);

        let column = PerfectFilling::new(
            vec![vec![1], vec![1]],
            Margins::new(vec![1, 1], vec![2]).unwrap(),
        )
        .unwrap();
        assert_eq!(component_dimension(&column), 1);
    }

    #[test]
    fn filling_of_spm_examples() {
        let n = 4;
        let margins = Margins::all_ones(n).unwrap();
        let sp = SignedPermutation::new(vec![1, -1, 1, -1], vec![1, 2, 3, 4]).unwrap();
        let f = filling_of_spm(&sp, &margins).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(f.entry(i, j), usize::from(i == j));
            }
        }

        let margins = Margins::new(vec![2, 1], vec![1, 2]).unwrap();
        let sp = SignedPermutation::identity(3);
        let f = filling_of_spm(&sp, &margins).unwrap();
        assert_eq!(f.rows(), &[vec![1, 1], vec![0, 1]]);

        assert!(filling_of_spm(&SignedPermutation::identity(2), &margins).is_err());
    }

    #[test]
    fn filling_of_spm_row_sums_always_match() {
        let margins = Margins::new(vec![2, 2], vec![1, 3]).unwrap();
        for sp in all_signed_permutations(4) {
            let f = filling_of_spm(&sp, &margins).unwrap();
            for (i, row) in f.rows().iter().enumerate() {
                assert_eq!(row.iter().sum::<usize>(), margins.row_margins()[i]);
            }
        }
    }

    #[test]
    fn inversion_stat_examples() {
        assert_eq!(inversion_stat(&[1, 2, 3], 3).unwrap(), 3);
        assert_eq!(inversion_stat(&[5, 4, 3, 2, 1], 5).unwrap(), 0);
        assert_eq!(inversion_stat(&[2, 1, 3], 3).unwrap(), 2);
        assert!(inversion_stat(&[1, 1, 3], 3).is_err());
    }

    #[test]
    fn filling_index_equals_inversion_stat_for_all_ones() {
        let n = 4;
        let margins = Margins::all_ones(n).unwrap();
        for perm in permutations(n) {
            let sp = SignedPermutation::new(vec![1; n], perm.clone()).unwrap();
            let f = filling_of_spm(&sp, &margins).unwrap();
            assert_eq!(filling_index(&f), inversion_stat(&perm, n).unwrap());
        }
    }

    #[test]
    fn subset_degree_examples() {
        let d = subset_degrees(&[], 4).unwrap();
        assert_eq!((d.deg, d.sdeg), (0, 0));

        let d = subset_degrees(&[2], 2).unwrap();
        assert_eq!((d.deg, d.sdeg), (1, 1));

        // sdeg_n(S + {n}) = n - 1 + sdeg_{n-1}(S).
        for n in 2..=8usize {
            for mask in 0u32..(1 << (n - 1)) {
                let s: Vec<usize> = (1..n).filter(|&v| mask & (1 << (v - 1)) != 0).collect();
                let small = subset_degrees(&s, n - 1).unwrap();
                let mut extended = s.clone();
                extended.push(n);
                let big = subset_degrees(&extended, n).unwrap();
                assert_eq!(big.sdeg, (n - 1) as u64 + small.sdeg);
            }
        }

        assert!(subset_degrees(&[3], 2).is_err());
    }

    #[test]
    fn grassmannian_betti_examples() {
        assert_eq!(grassmannian_betti(0, 1, 2), BigUint::from(1u32));
        assert_eq!(grassmannian_betti(1, 1, 2), BigUint::from(1u32));

        for i in 0..5i64 {
            let expected = u32::from(i == 0);
            assert_eq!(grassmannian_betti(i, 0, 4), BigUint::from(expected));
        }

        // G(2,3) is the projective plane.
        for i in 0..=2i64 {
            assert_eq!(grassmannian_betti(i, 2, 3), BigUint::from(1u32));
        }
        assert_eq!(grassmannian_betti(3, 2, 3), BigUint::ZERO);
        assert_eq!(grassmannian_betti(-1, 2, 3), BigUint::ZERO);

        // Total count over all degrees is C(n, k).
        for n in 1..=8usize {
            for k in 0..=n {
                let total: BigUint = (0..=choose2(n) as i64)
                    .map(|i| grassmannian_betti(i, k, n))
                    .sum();
                let nck = {
                    let mut v = BigUint::from(1u32);
                    for x in 0..k {
                        v = v * (n - x) / (x + 1);
                    }
                    v
                };
                assert_eq!(total, nck);
            }
        }
    }

    #[test]
    fn group_betti_examples() {
        assert_eq!(group_betti_c(0, 1), BigUint::from(2u32));
        assert_eq!(group_betti_c(1, 1), BigUint::ZERO);
        assert_eq!(group_betti_c(0, 2), BigUint::from(2u32));
        assert_eq!(group_betti_c(1, 2), BigUint::from(2u32));

        // c_i(n) = sum_k c_{i - C(k,2)}(k, n).
        for n in 1..=8usize {
            for i in 0..=choose2(n) as i64 {
                let direct = group_betti_c(i, n);
                let sum: BigUint = (0..=n)
                    .map(|k| grassmannian_betti(i - choose2(k) as i64, k, n))
                    .sum();
                assert_eq!(direct, sum);
            }
        }
    }

    #[test]
    fn so_betti_examples() {
        for i in 0..=3i64 {
            assert_eq!(so_betti(i, 3), BigUint::from(1u32));
        }
        assert_eq!(so_betti(4, 3), BigUint::ZERO);
        for n in 1..=10 {
            assert_eq!(so_betti(0, n), BigUint::from(1u32));
        }
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(poincare_so(1), IntPolynomial::one());
        assert_eq!(poincare_so(3), IntPolynomial::from_u64_coeffs(&[1, 1, 1, 1]));
        for n in 1..=10usize {
            assert_eq!(poincare_so(n).degree(), Some(choose2(n) as usize));
        }
    }

    #[test]
    fn frankel_examples() {
        for convention in [IotaConvention::KChoose2, IotaConvention::ComplementChoose2] {
            let report = frankel_report(3, convention);
            assert!(report.all_equal);
            for row in &report.rows {
                assert_eq!(row.lhs, BigUint::from(2u32));
                assert_eq!(row.rhs, BigUint::from(2u32));
            }

            let r1 = frankel_report(1, convention);
            assert_eq!(r1.rows.len(), 1);
            assert_eq!(r1.rows[0].lhs, BigUint::from(2u32));
            assert_eq!(r1.rows[0].rhs, BigUint::from(2u32));
        }
    }

    #[test]
    fn permutations_are_lexicographic_and_complete() {
        let p3 = permutations(3);
        assert_eq!(p3.len(), 6);
        assert_eq!(p3[0], vec![1, 2, 3]);
        assert_eq!(p3[5], vec![3, 2, 1]);
        for w in p3.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
