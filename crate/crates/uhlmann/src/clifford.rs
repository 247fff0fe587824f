//! Euclidean gamma matrices in 2N+1 dimensions and the spin generators.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Result, UhlError};
use crate::matcore::{kron, kron_all, ComplexMatrix, C64, I, ONE, ZERO};

pub const MAX_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    Recursive,
    JordanWigner,
}

impl std::str::FromStr for RepKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "recursive" | "rec" => Ok(Self::Recursive),
            "jordan_wigner" | "jordan-wigner" | "jw" => Ok(Self::JordanWigner),
            other => Err(format!("unknown representation '{other}'")),
        }
    }
}

/// `2N+1` anticommuting Hermitian matrices of dimension `2^N`.
#[derive(Clone, Debug)]
pub struct GammaRep {
    n: usize,
    kind: RepKind,
    gammas: Vec<ComplexMatrix>,
}

/// Pauli matrix `σ_k`, `k ∈ {0,1,2,3}` with `σ_0 = 1`.
pub fn pauli(k: usize) -> ComplexMatrix {
    let m = match k {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("pauli index {k} out of range"),
    };
    ComplexMatrix::from_vec(m.to_vec())
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(UhlError::NOutOfRange(n))
    }
}

/// `Γ_0 = σ1⊗1`, `Γ_j = σ2⊗Γ'_{j-1}`, `Γ_{2N} = σ3⊗1`.
pub fn gamma_recursive(n: usize) -> Result<GammaRep> {
    check_n(n)?;
    let mut gammas = vec![pauli(1), pauli(2), pauli(3)];
    for level in 2..=n {
        let id = ComplexMatrix::identity(1 << (level - 1));
        let mut next = Vec::with_capacity(2 * level + 1);
        next.push(kron(&pauli(1), &id));
        next.extend(gammas.iter().map(|g| kron(&pauli(2), g)));
        next.push(kron(&pauli(3), &id));
        gammas = next;
    }
    Ok(GammaRep { n, kind: RepKind::Recursive, gammas })
}

/// Jordan–Wigner strings: `Γ_{2I-2} = Z..Z X_I`, `Γ_{2I-1} = Z..Z Y_I`, `Γ_{2N} = Z..Z`.
pub fn gamma_jordan_wigner(n: usize) -> Result<GammaRep> {
    check_n(n)?;
    let (x, y, z, id) = (pauli(1), pauli(2), pauli(3), pauli(0));
    let mut gammas = Vec::with_capacity(2 * n + 1);
    for q in 0..n {
        for p in [&x, &y] {
            let factors: Vec<&ComplexMatrix> =
                (0..n).map(|k| if k < q { &z } else if k == q { p } else { &id }).collect();
            gammas.push(kron_all(&factors));
        }
    }
    gammas.push(kron_all(&vec![&z; n]));
    Ok(GammaRep { n, kind: RepKind::JordanWigner, gammas })
}

/// Shared, immutable representation for `(n, kind)`.
pub fn gamma_rep(n: usize, kind: RepKind) -> Result<Arc<GammaRep>> {
    type Cache = Mutex<HashMap<(usize, RepKind), Arc<GammaRep>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    check_n(n)?;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("gamma cache poisoned");
    if let Some(rep) = map.get(&(n, kind)) {
        return Ok(Arc::clone(rep));
    }
    let rep = Arc::new(match kind {
        RepKind::Recursive => gamma_recursive(n)?,
        RepKind::JordanWigner => gamma_jordan_wigner(n)?,
    });
    map.insert((n, kind), Arc::clone(&rep));
    Ok(rep)
}

impl GammaRep {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    /// Matrix dimension `2^N`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Number of gammas, `2N+1`.
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn gamma(&self, j: usize) -> &ComplexMatrix {
        &self.gammas[j]
    }

    pub fn gammas(&self) -> &[ComplexMatrix] {
        &self.gammas
    }

    pub fn identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.dim())
    }

    pub fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() == self.len() {
            Ok(())
        } else {
            Err(UhlError::LengthMismatch { expected: self.len(), got: u.len() })
        }
    }

    /// `u·Γ = Σ u_j Γ_j`
    pub fn slash(&self, u: &[f64]) -> Result<ComplexMatrix> {
        self.check_len(u)?;
        let mut out = ComplexMatrix::zeros(self.dim());
        for (g, &c) in self.gammas.iter().zip(u) {
            if c != 0.0 {
                out += &g.scale_real(c);
            }
        }
        Ok(out)
    }

    /// `c0 I + u·Γ`
    pub fn affine(&self, c0: C64, u: &[f64]) -> Result<ComplexMatrix> {
        let mut m = self.slash(u)?;
        m += &self.identity().scale(c0);
        Ok(m)
    }

    /// `Σ_{jk} = ¼[Γ_j, Γ_k]`
    pub fn sigma(&self, j: usize, k: usize) -> Result<ComplexMatrix> {
        let len = self.len();
        if j >= len {
            return Err(UhlError::IndexRange(j));
        }
        if k >= len {
            return Err(UhlError::IndexRange(k));
        }
        Ok(self.gammas[j].commutator(&self.gammas[k]).scale_real(0.25))
    }

    /// Max-abs deviation of `{Γ_j, Γ_k}` from `2δ_{jk} I`.
    pub fn anticommutator_residual(&self) -> f64 {
        let id2 = self.identity().scale_real(2.0);
        let mut worst: f64 = 0.0;
        for j in 0..self.len() {
            for k in j..self.len() {
                let ac = self.gammas[j].anticommutator(&self.gammas[k]);
                let r = if j == k { (&ac - &id2).max_abs() } else { ac.max_abs() };
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Scalar `c` with `Γ_0 Γ_1 ⋯ Γ_{2N} = c I`.
    pub fn volume_scalar(&self) -> C64 {
        let mut p = self.identity();
        for g in &self.gammas {
            p = p.matmul(g);
        }
        p[(0, 0)]
    }
}

/// All `Σ_{jk}` with `j < k`, in lexicographic order.
pub fn sigma_generators(rep: &GammaRep) -> Vec<((usize, usize), ComplexMatrix)> {
    let mut out = Vec::new();
    for j in 0..rep.len() {
        for k in j + 1..rep.len() {
            out.push(((j, k), rep.sigma(j, k).expect("indices in range")));
        }
    }
    out
}

/// Unitary `S` with `Γ^a_j S = S Γ^b_{π(j)}` for all `j`, if one exists for `perm`.
///
/// Built as the group average `Σ_A Γ^a_A E (Γ^b_{π(A)})^{-1}` over the monomials
/// of the first `2N` generators.
pub fn intertwiner(a: &GammaRep, b: &GammaRep, perm: &[usize]) -> Option<ComplexMatrix> {
    if a.n() != b.n() || perm.len() != a.len() {
        return None;
    }
    let dim = a.dim();
    let gens = 2 * a.n();
    for seed in 0..dim * dim {
        let e = ComplexMatrix::from_fn(dim, |i, j| if i * dim + j == seed { ONE } else { ZERO });
        let mut s = ComplexMatrix::zeros(dim);
        for mask in 0u32..(1 << gens) {
            let mut ga = a.identity();
            let mut gb = b.identity();
            for j in 0..gens {
                if mask >> j & 1 == 1 {
                    ga = ga.matmul(a.gamma(j));
                    gb = gb.matmul(b.gamma(perm[j]));
                }
            }
            s += &ga.matmul(&e).matmul(&gb.adjoint());
        }
        let norm = s.frobenius_norm();
        if norm < 1e-8 {
            continue;
        }
        let s = s.scale_real((dim as f64).sqrt() / norm);
        let ok = (0..a.len()).all(|j| a.gamma(j).matmul(&s).distance(&s.matmul(b.gamma(perm[j]))) < 1e-10);
        return if ok && s.is_unitary(1e-10) { Some(s) } else { None };
    }
    None
}

/// Label permutation relating two representations of equal `N`: identity on
/// all labels when the volume scalars agree, otherwise labels 0 and 1 swapped.
pub fn equivalence_permutation(a: &GammaRep, b: &GammaRep) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..a.len()).collect();
    if (a.volume_scalar() - b.volume_scalar()).norm() > 1e-9 {
        perm.swap(0, 1);
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
        a.distance(b) < 1e-13
    }

    #[test]
    fn n1_reps_are_pauli() {
        for rep in [gamma_recursive(1).unwrap(), gamma_jordan_wigner(1).unwrap()] {
            for k in 0..3 {
                assert!(close(rep.gamma(k), &pauli(k + 1)));
            }
        }
    }

    #[test]
    fn n2_recursive_entries() {
        let r = gamma_recursive(2).unwrap();
        let p = pauli;
        let want = [
            kron(&p(1), &p(0)),
            kron(&p(2), &p(1)),
            kron(&p(2), &p(2)),
            kron(&p(2), &p(3)),
            kron(&p(3), &p(0)),
        ];
        for (g, w) in r.gammas().iter().zip(&want) {
            assert!(close(g, w));
        }
    }

    #[test]
    fn n2_jordan_wigner_entries() {
        let r = gamma_jordan_wigner(2).unwrap();
        let p = pauli;
        let want = [
            kron(&p(1), &p(0)),
            kron(&p(2), &p(0)),
            kron(&p(3), &p(1)),
            kron(&p(3), &p(2)),
            kron(&p(3), &p(3)),
        ];
        for (g, w) in r.gammas().iter().zip(&want) {
            assert!(close(g, w));
        }
    }

    #[test]
    fn clifford_relations_hold() {
        for n in 1..=4 {
            for kind in [RepKind::Recursive, RepKind::JordanWigner] {
                let rep = gamma_rep(n, kind).unwrap();
                assert!(rep.anticommutator_residual() < 1e-12);
                for g in rep.gammas() {
                    assert!(g.hermiticity_residual() == 0.0);
                    assert!(g.trace().norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn jordan_wigner_parity_identity() {
        for n in 1..=3 {
            let rep = gamma_jordan_wigner(n).unwrap();
            let mut p = rep.identity();
            for g in &rep.gammas()[..2 * n] {
                p = p.matmul(g);
            }
            let phase = (0..n).fold(ONE, |acc, _| acc * (-I));
            assert!(p.scale(phase).distance(rep.gamma(2 * n)) < 1e-12);
        }
    }

    #[test]
    fn out_of_range_n() {
        assert!(matches!(gamma_recursive(0), Err(UhlError::NOutOfRange(0))));
        assert!(matches!(gamma_jordan_wigner(7), Err(UhlError::NOutOfRange(7))));
    }

    #[test]
    fn slash_squares_to_norm() {
        let rep = gamma_rep(3, RepKind::Recursive).unwrap();
        let u = [0.1, -0.2, 0.3, 0.05, -0.4, 0.2, 0.1];
        let s = rep.slash(&u).unwrap();
        let n2: f64 = u.iter().map(|x| x * x).sum();
        assert!(s.matmul(&s).distance(&rep.identity().scale_real(n2)) < 1e-12);
        assert_eq!(rep.slash(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), *rep.gamma(0));
        assert!(matches!(rep.slash(&[1.0]), Err(UhlError::LengthMismatch { .. })));
    }

    #[test]
    fn sigma_n1_example() {
        let rep = gamma_rep(1, RepKind::Recursive).unwrap();
        let s = rep.sigma(1, 2).unwrap();
        assert!(close(&s, &pauli(1).scale(I * 0.5)));
        assert_eq!(sigma_generators(&rep).len(), 3);
    }

    #[test]
    fn reps_are_unitarily_equivalent() {
        for n in 1..=3 {
            let a = gamma_recursive(n).unwrap();
            let b = gamma_jordan_wigner(n).unwrap();
            let perm = equivalence_permutation(&a, &b);
            assert!(intertwiner(&a, &b, &perm).is_some(), "N = {n}");
        }
    }
}
