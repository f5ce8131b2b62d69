//! Congruence groups, collision witnesses and the simplicity decision.
//!
//! The congruence group `K_f` of a pure function is the group of pairs of
//! weight-preserving atom permutations `(S, T)` with `f(Sx, Ty) = f(x, y)`.
//! `D_f` is simple exactly when `K_f` of the pure factor is trivial.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;

use crate::distribution::{exact_corner_distribution, ValueMatrix};
use crate::error::{Error, Result};
use crate::function::{FiniteFunction, Value};
use crate::measure::FiniteMeasureSpace;
use crate::rng::{streams, CounterRng, DetRng};
use crate::sample::AtomSampler;

/// Largest compatibility class the permutation search accepts (10! orders).
pub const MAX_CLASS_SIZE: usize = 10;

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Enumerates pairs `(σ, τ)` with `a(i, j) = b(σ[i], τ[j])` for all cells,
/// where `σ[i]` must lie in the same row class as `i` and likewise for
/// columns. Classes are given as labels; equal labels are compatible.
///
/// Rows are assigned in order with pruning on row value multisets and on
/// the multiset of partial columns. The column map is forced once all rows
/// are placed (equal columns are interchangeable, the first match is taken).
pub(crate) fn value_isomorphisms<V: Value, C: Value>(
    a: &FiniteFunction<V>,
    b: &FiniteFunction<V>,
    row_class: (&[C], &[C]),
    col_class: (&[C], &[C]),
    mut visit: impl FnMut(&[usize], &[usize]) -> ControlFlow<()>,
) -> Result<()> {
    let (n, m) = (a.n_rows(), a.n_cols());
    if b.n_rows() != n || b.n_cols() != m {
        return Ok(());
    }
    for classes in [row_class.0, col_class.0] {
        let mut sizes: BTreeMap<&C, usize> = BTreeMap::new();
        for c in classes {
            *sizes.entry(c).or_default() += 1;
        }
        if let Some(&largest) = sizes.values().max() {
            if largest > MAX_CLASS_SIZE {
                return Err(Error::SearchLimit {
                    candidates: factorial(largest),
                    limit: factorial(MAX_CLASS_SIZE),
                });
            }
        }
    }
    fn signature<'s, V: Value, C: Value>(f: &'s FiniteFunction<V>, classes: &'s [C], i: usize) -> Vec<(&'s C, &'s V)> {
        let mut s: Vec<(&C, &V)> = classes.iter().zip(f.row(i)).collect();
        s.sort();
        s
    }
    let a_sig: Vec<_> = (0..n).map(|i| signature(a, col_class.0, i)).collect();
    let b_sig: Vec<_> = (0..n).map(|i| signature(b, col_class.1, i)).collect();
    let mut search = IsoSearch {
        a,
        b,
        row_class,
        col_class,
        a_sig,
        b_sig,
        sigma: Vec::with_capacity(n),
        used: vec![false; n],
    };
    let _ = search.extend(&mut visit);
    Ok(())
}

struct IsoSearch<'a, V, C> {
    a: &'a FiniteFunction<V>,
    b: &'a FiniteFunction<V>,
    row_class: (&'a [C], &'a [C]),
    col_class: (&'a [C], &'a [C]),
    a_sig: Vec<Vec<(&'a C, &'a V)>>,
    b_sig: Vec<Vec<(&'a C, &'a V)>>,
    sigma: Vec<usize>,
    used: Vec<bool>,
}

impl<'a, V: Value, C: Value> IsoSearch<'a, V, C> {
    fn extend(&mut self, visit: &mut impl FnMut(&[usize], &[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        let i = self.sigma.len();
        if i == self.a.n_rows() {
            return match self.column_map() {
                Some(tau) => visit(&self.sigma, &tau),
                None => ControlFlow::Continue(()),
            };
        }
        for t in 0..self.b.n_rows() {
            if self.used[t] || self.row_class.0[i] != self.row_class.1[t] || self.a_sig[i] != self.b_sig[t] {
                continue;
            }
            self.sigma.push(t);
            self.used[t] = true;
            if self.partial_columns_agree() {
                self.extend(visit)?;
            }
            self.used[t] = false;
            self.sigma.pop();
        }
        ControlFlow::Continue(())
    }

    fn partial_columns(&self, f: &FiniteFunction<V>, classes: &[C], rows: &[usize]) -> Vec<(C, Vec<V>)> {
        let mut cols: Vec<(C, Vec<V>)> = (0..f.n_cols())
            .map(|j| {
                (
                    classes[j].clone(),
                    rows.iter().map(|&r| f.value(r, j).clone()).collect(),
                )
            })
            .collect();
        cols.sort();
        cols
    }

    fn partial_columns_agree(&self) -> bool {
        let own: Vec<usize> = (0..self.sigma.len()).collect();
        self.partial_columns(self.a, self.col_class.0, &own)
            == self.partial_columns(self.b, self.col_class.1, &self.sigma)
    }

    fn column_map(&self) -> Option<Vec<usize>> {
        let m = self.a.n_cols();
        let mut taken = vec![false; m];
        let mut tau = Vec::with_capacity(m);
        for j in 0..m {
            let target = (0..m).find(|&l| {
                !taken[l]
                    && self.col_class.0[j] == self.col_class.1[l]
                    && self
                        .sigma
                        .iter()
                        .enumerate()
                        .all(|(i, &s)| self.a.value(i, j) == self.b.value(s, l))
            })?;
            taken[target] = true;
            tau.push(target);
        }
        Some(tau)
    }
}

/// Weight-preserving symmetries `(S, T)` of the pure factor, over purified
/// atom indices. `S[i]` is the image of atom `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceGroup {
    elements: Vec<(Vec<usize>, Vec<usize>)>,
}

impl CongruenceGroup {
    /// Elements in lexicographic order; the identity comes first.
    pub fn elements(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains(&self, s: &[usize], t: &[usize]) -> bool {
        self.elements
            .binary_search_by(|(a, b)| (a.as_slice(), b.as_slice()).cmp(&(s, t)))
            .is_ok()
    }

    /// Checks identity, closure and inverses exhaustively.
    pub fn is_group(&self) -> bool {
        let Some((s0, t0)) = self.elements.first() else {
            return false;
        };
        if !is_identity(s0) || !is_identity(t0) {
            return false;
        }
        let closed = self.elements.iter().all(|(s1, t1)| {
            self.elements
                .iter()
                .all(|(s2, t2)| self.contains(&compose(s1, s2), &compose(t1, t2)))
        });
        closed && self.elements.iter().all(|(s, t)| self.contains(&invert(s), &invert(t)))
    }
}

fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &v)| i == v)
}

/// `(p ∘ q)[i] = p[q[i]]`.
pub fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

pub fn invert(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        out[v] = i;
    }
    out
}

/// `true` iff `f(S x, T y) = f(x, y)` everywhere and both maps preserve weights.
pub fn is_congruence<V: Value>(f: &FiniteFunction<V>, s: &[usize], t: &[usize]) -> bool {
    let preserves = |space: &FiniteMeasureSpace, p: &[usize]| {
        p.len() == space.len()
            && crate::canonical::is_bijection(p, space.len())
            && p.iter().enumerate().all(|(i, &j)| space.weight(i) == space.weight(j))
    };
    preserves(f.x_space(), s)
        && preserves(f.y_space(), t)
        && (0..f.n_rows()).all(|x| (0..f.n_cols()).all(|y| f.value(s[x], t[y]) == f.value(x, y)))
}

/// `K_f`, computed on the pure factor of `f`.
///
/// Fails with [`Error::SearchLimit`] if some weight class has more than
/// [`MAX_CLASS_SIZE`] atoms.
pub fn congruence_group<V: Value>(f: &FiniteFunction<V>) -> Result<CongruenceGroup> {
    let (p, _) = f.purify();
    let rows = p.x_space().weights().to_vec();
    let cols = p.y_space().weights().to_vec();
    let mut elements = Vec::new();
    value_isomorphisms(&p, &p, (&rows, &rows), (&cols, &cols), |s, t| {
        debug_assert!(is_congruence(&p, s, t));
        elements.push((s.to_vec(), t.to_vec()));
        ControlFlow::Continue(())
    })?;
    elements.sort();
    Ok(CongruenceGroup { elements })
}

/// Pure with trivial congruence group.
pub fn is_completely_pure<V: Value>(f: &FiniteFunction<V>) -> Result<bool> {
    Ok(f.is_pure() && congruence_group(f)?.is_trivial())
}

/// Decides whether `D_f` is a simple measure.
pub fn simplicity_decision<V: Value>(f: &FiniteFunction<V>) -> Result<bool> {
    Ok(congruence_group(f)?.is_trivial())
}

/// Two distinct pairs of atom sequences of the pure factor with identical
/// value matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionWitness<V = String> {
    pub left: (Vec<usize>, Vec<usize>),
    pub right: (Vec<usize>, Vec<usize>),
    pub matrix: ValueMatrix<V>,
}

impl<V: Value> CollisionWitness<V> {
    /// Re-evaluates both sequence pairs on `p` (the pure factor).
    pub fn verify(&self, p: &FiniteFunction<V>) -> bool {
        let eval = |(xs, ys): &(Vec<usize>, Vec<usize>)| {
            xs.iter()
                .flat_map(|&x| ys.iter().map(move |&y| p.value(x, y).clone()))
                .collect::<Vec<V>>()
        };
        self.left != self.right
            && self.left.0.len() == self.right.0.len()
            && self.left.1.len() == self.right.1.len()
            && eval(&self.left) == eval(&self.right)
            && eval(&self.left) == self.matrix.cells()
    }
}

fn apply(p: &[usize], seq: &[usize]) -> Vec<usize> {
    seq.iter().map(|&a| p[a]).collect()
}

fn covers(seq: &[usize], atoms: usize) -> bool {
    seq.iter().collect::<HashSet<_>>().len() == atoms
}

fn random_weight_preserving(rng: &mut DetRng, space: &FiniteMeasureSpace) -> Vec<usize> {
    let mut classes: BTreeMap<&crate::ratio::Rational, Vec<usize>> = BTreeMap::new();
    for (i, w) in space.weights().iter().enumerate() {
        classes.entry(w).or_default().push(i);
    }
    let mut perm = vec![0; space.len()];
    for members in classes.values() {
        let mut image = members.clone();
        rng.shuffle(&mut image);
        for (&from, &to) in members.iter().zip(&image) {
            perm[from] = to;
        }
    }
    perm
}

/// Looks for a collision of the finite sample map on the pure factor.
///
/// With a non-trivial `K_f` a witness is built from a non-identity element
/// and always returned. Otherwise `trials` random weight-preserving
/// permutation pairs are applied to sampled sequences; a trial counts only
/// when the sequences visit every atom, which makes any hit a genuine
/// symmetry. `None` is evidence of injectivity, not a proof.
pub fn collision_witness<V: Value>(
    f: &FiniteFunction<V>,
    length: usize,
    trials: u64,
    seed: u64,
) -> Result<Option<CollisionWitness<V>>> {
    if length == 0 {
        return Err(Error::InvalidParameter("sequence length must be positive".into()));
    }
    let (p, _) = f.purify();
    let rng = CounterRng::new(seed);
    let x_sampler = AtomSampler::new(p.x_space());
    let y_sampler = AtomSampler::new(p.y_space());
    let draw = |trial: u64| {
        let base = trial * 2 * length as u64;
        let xs: Vec<usize> = (0..length as u64)
            .map(|i| x_sampler.draw(&rng, streams::COLLISION_SEARCH, base + i))
            .collect();
        let ys: Vec<usize> = (0..length as u64)
            .map(|i| y_sampler.draw(&rng, streams::COLLISION_SEARCH, base + length as u64 + i))
            .collect();
        (xs, ys)
    };
    let witness = |left: (Vec<usize>, Vec<usize>), right: (Vec<usize>, Vec<usize>)| {
        let cells = left
            .0
            .iter()
            .flat_map(|&x| left.1.iter().map(move |&y| (x, y)))
            .map(|(x, y)| p.value(x, y).clone())
            .collect();
        let matrix = ValueMatrix::new(length, length, cells).expect("square by construction");
        CollisionWitness { left, right, matrix }
    };

    let group = congruence_group(&p)?;
    if let Some((s, t)) = group.elements().get(1) {
        let (mut xs, mut ys) = draw(0);
        if apply(s, &xs) == xs && apply(t, &ys) == ys {
            // every sampled atom is fixed; move one
            match s.iter().enumerate().find(|(i, &v)| *i != v) {
                Some((moved, _)) => xs[0] = moved,
                None => ys[0] = t.iter().enumerate().find(|(i, &v)| *i != v).expect("non-identity").0,
            }
        }
        let right = (apply(s, &xs), apply(t, &ys));
        let w = witness((xs, ys), right);
        assert!(w.verify(&p), "congruence element failed to produce a collision");
        return Ok(Some(w));
    }

    let mut perms = rng.sequence(streams::COLLISION_SEARCH + 1);
    for trial in 0..trials {
        let (xs, ys) = draw(trial);
        let s = random_weight_preserving(&mut perms, p.x_space());
        let t = random_weight_preserving(&mut perms, p.y_space());
        if !covers(&xs, p.n_rows()) || !covers(&ys, p.n_cols()) {
            continue;
        }
        let right = (apply(&s, &xs), apply(&t, &ys));
        if right == (xs.clone(), ys.clone()) {
            continue;
        }
        let w = witness((xs, ys), right);
        if w.verify(&p) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Outcome of the finite-corner simplicity diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicityDiagnostic<V = String> {
    pub k: usize,
    pub groups: usize,
    /// Groups with equal row and column multisets that split into several
    /// permutation orbits; each lists one representative per orbit.
    pub violations: Vec<Vec<ValueMatrix<V>>>,
}

impl<V> SimplicityDiagnostic<V> {
    /// A violation certifies non-simplicity. No violation proves nothing:
    /// uniform XOR is not simple yet has none at `k = 2`.
    pub fn certifies_non_simple(&self) -> bool {
        !self.violations.is_empty()
    }

    pub const NOTE: &'static str = "a violation certifies that D_f is not simple; absence of violations at finite k \
         is inconclusive (uniform XOR is not simple and shows none)";
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    fn heap(n: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..n - 1 {
            heap(n - 1, p, out);
            let j = if n % 2 == 0 { i } else { 0 };
            p.swap(j, n - 1);
        }
        heap(n - 1, p, out);
    }
    heap(k, &mut p, &mut out);
    out
}

/// Groups the positive-probability `k × k` corners by their row and column
/// multisets and reports groups that are not a single permutation orbit.
pub fn empirical_simplicity_diagnostic<V: Value>(
    f: &FiniteFunction<V>,
    k: usize,
    budget: u64,
) -> Result<SimplicityDiagnostic<V>> {
    let d = exact_corner_distribution(f, k, budget)?;
    // keyed by (sorted rows, sorted columns)
    type Groups<'a, V> = BTreeMap<(Vec<Vec<V>>, Vec<Vec<V>>), Vec<&'a ValueMatrix<V>>>;
    let mut groups: Groups<V> = BTreeMap::new();
    for (m, _) in d.iter() {
        let mut rows = m.to_rows();
        rows.sort();
        let mut cols: Vec<Vec<V>> = (0..k).map(|j| (0..k).map(|i| m.get(i, j).clone()).collect()).collect();
        cols.sort();
        groups.entry((rows, cols)).or_default().push(m);
    }
    let perms = permutations(k);
    let mut violations = Vec::new();
    for members in groups.values() {
        let mut remaining: Vec<&ValueMatrix<V>> = members.clone();
        let mut representatives = Vec::new();
        while let Some(first) = remaining.first().copied() {
            let orbit: HashSet<ValueMatrix<V>> = perms
                .iter()
                .flat_map(|r| perms.iter().map(move |c| first.permuted(r, c)))
                .collect();
            representatives.push(first.clone());
            remaining.retain(|m| !orbit.contains(*m));
        }
        if representatives.len() > 1 {
            violations.push(representatives);
        }
    }
    Ok(SimplicityDiagnostic {
        k,
        groups: groups.len(),
        violations,
    })
}
