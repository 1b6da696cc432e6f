//! The quasi-Hopf algebras A(n,s,q), generated by g_2 and x, on the
//! basis 1_a x^c of idempotents times powers of x.

use std::fmt;

use crate::cyclo::{Constants, CycloNum};
use crate::qha::{legs, QuasiHopfData, QuasiHopfParts};
use crate::tensor::{legwise_multiply, SparseTensor, Vector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("n must be positive")]
    ZeroN,
    #[error("s = {s} does not divide n = {n}")]
    NotDivisor { n: u32, s: u32 },
}

/// Parameters (n, s) with s | n; all arithmetic happens in Q(ζ_{2n²}).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsqParams {
    pub n: u32,
    pub s: u32,
}

impl fmt::Display for AnsqParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, s={})", self.n, self.s)
    }
}

impl AnsqParams {
    pub fn new(n: u32, s: u32) -> Result<AnsqParams, ParamError> {
        if n == 0 {
            return Err(ParamError::ZeroN);
        }
        if s == 0 || n % s != 0 {
            return Err(ParamError::NotDivisor { n, s });
        }
        Ok(AnsqParams { n, s })
    }

    pub fn constants(&self) -> Constants {
        Constants::new(self.n)
    }

    pub fn order(&self) -> u32 {
        2 * self.n * self.n
    }

    /// Nilpotency index n²/s of x.
    pub fn nil(&self) -> usize {
        (self.n * self.n / self.s) as usize
    }

    /// n³/s.
    pub fn dim(&self) -> usize {
        self.n as usize * self.nil()
    }

    /// Index of 1_a x^c, with a taken mod n.
    pub fn idx(&self, a: i64, c: usize) -> usize {
        let n = self.n as i64;
        (a.rem_euclid(n) as usize) * self.nil() + c
    }

    /// (a, c) of a basis index.
    pub fn unidx(&self, i: usize) -> (usize, usize) {
        (i / self.nil(), i % self.nil())
    }
}

/// 1_i as an element.
pub fn idempotent(p: &AnsqParams, i: i64) -> Vector {
    Vector::basis(p.idx(i, 0), p.order())
}

/// Σ_i c(i)·1_i.
pub fn diagonal(p: &AnsqParams, c: impl Fn(i64) -> CycloNum) -> Vector {
    Vector::from_pairs((0..p.n as i64).map(|i| (p.idx(i, 0), c(i))))
}

/// g_2^k = Σ ŏ^{ki} 1_i.
pub fn g2_pow(p: &AnsqParams, k: i64) -> Vector {
    let c = p.constants();
    diagonal(p, |i| c.o(k * i))
}

/// x = Σ_a 1_a x.
pub fn x_elem(p: &AnsqParams) -> Vector {
    if p.nil() < 2 {
        return Vector::zero();
    }
    Vector::from_pairs((0..p.n as i64).map(|a| (p.idx(a, 1), CycloNum::one(p.order()))))
}

/// The idempotents written in the group basis, (1/n)Σ_j ŏ^{-ij} g_2^j, as
/// elements of the built algebra.
pub fn idempotent_from_group(p: &AnsqParams, i: i64) -> Vector {
    let c = p.constants();
    let n = p.n as i64;
    let mut acc = Vector::zero();
    for j in 0..n {
        acc = acc.add(&g2_pow(p, j).scale(&(c.o((n - i) * j) * c.ratio(1, n))));
    }
    acc
}

/// The reassociator Σ ŏ^{s·i⌊(j+k)/n⌋} 1_i⊗1_j⊗1_k on an algebra whose
/// idempotent 1_i sits at basis index `at(i)`.
pub fn reassociator(p: &AnsqParams, dim: usize, at: impl Fn(i64) -> usize) -> SparseTensor {
    let c = p.constants();
    let (n, s) = (p.n as i64, p.s as i64);
    let mut phi = SparseTensor::new(&[dim as u32; 3]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                phi.add_at(&[at(i) as u32, at(j) as u32, at(k) as u32], c.o(s * i * ((j + k) / n)));
            }
        }
    }
    phi
}

fn labels(p: &AnsqParams) -> Vec<String> {
    (0..p.dim())
        .map(|i| {
            let (a, c) = p.unidx(i);
            format!("1_{a}x^{c}")
        })
        .collect()
}

fn mult_table(p: &AnsqParams) -> Vec<Vector> {
    let (d, nil, n) = (p.dim(), p.nil(), p.n as usize);
    let mut mult = Vec::with_capacity(d * d);
    for i in 0..d {
        let (a, c) = p.unidx(i);
        for j in 0..d {
            let (b, e) = p.unidx(j);
            // 1_a x^c 1_b x^e = δ_{a, b+c} 1_a x^{c+e}
            if (b + c) % n == a && c + e < nil {
                mult.push(Vector::basis(p.idx(a as i64, c + e), p.order()));
            } else {
                mult.push(Vector::zero());
            }
        }
    }
    mult
}

/// A(n,s,q) with φ_s, α = g_2^{-s}, β = 1.
pub fn build_ansq(p: &AnsqParams) -> QuasiHopfData {
    let c = p.constants();
    let (n, s) = (p.n as i64, p.s as i64);
    let (d, order) = (p.dim(), p.order());
    let dims = [d as u32, d as u32];
    let one = Vector::from_pairs((0..n).map(|i| (p.idx(i, 0), c.one())));

    // skeleton with the multiplication only, so products in A⊗A can be formed
    let skeleton = QuasiHopfData::new(QuasiHopfParts {
        name: String::new(),
        order,
        labels: labels(p),
        mult: mult_table(p),
        unit: one.clone(),
        comult: vec![SparseTensor::new(&dims); d],
        counit: vec![c.zero(); d],
        phi: SparseTensor::new(&[d as u32; 3]),
        antipode: vec![Vector::zero(); d],
        alpha: Vector::zero(),
        beta: Vector::zero(),
        generators: vec![],
        idempotents: None,
    });
    let l2 = legs(&skeleton, 2);

    // Δ(x) = 1⊗Σ_{i≥1}1_i x + g_2^s⊗1_0 x + x⊗Σ q^{-si}1_i
    let mut dx = SparseTensor::new(&dims);
    if p.nil() > 1 {
        for j in 0..n {
            for i in 1..n {
                dx.add_at(&[p.idx(j, 0) as u32, p.idx(i, 1) as u32], c.one());
            }
            dx.add_at(&[p.idx(j, 0) as u32, p.idx(0, 1) as u32], c.o(s * j));
            for i in 0..n {
                dx.add_at(&[p.idx(j, 1) as u32, p.idx(i, 0) as u32], c.q(-s * i));
            }
        }
    }
    let mut comult = vec![SparseTensor::new(&dims); d];
    for a in 0..n {
        let mut t = SparseTensor::new(&dims);
        for j in 0..n {
            t.add_at(&[p.idx(j, 0) as u32, p.idx(a - j, 0) as u32], c.one());
        }
        comult[p.idx(a, 0)] = t.clone();
        for e in 1..p.nil() {
            t = legwise_multiply(&t, &dx, &l2).expect("dims");
            comult[p.idx(a, e)] = t.clone();
        }
    }

    // S(1_a) = 1_{-a}, S(x) = -Σ_i q^{s(i-n)} 1_{i+1} x, S(1_a x^e) = S(x)^e S(1_a)
    let sx = Vector::from_pairs((0..n).map(|i| (p.idx(i + 1, 1), -c.q(s * (i - n)))));
    let mut antipode = vec![Vector::zero(); d];
    for a in 0..n {
        let mut v = idempotent(p, -a);
        antipode[p.idx(a, 0)] = v.clone();
        for e in 1..p.nil() {
            v = crate::tensor::mul_elements(&skeleton, &sx, &v);
            antipode[p.idx(a, e)] = v.clone();
        }
    }

    let counit = (0..d).map(|i| if i == p.idx(0, 0) { c.one() } else { c.zero() }).collect();
    let mut generators = vec![g2_pow(p, 1)];
    if p.nil() > 1 {
        generators.push(x_elem(p));
    }
    QuasiHopfData::new(QuasiHopfParts {
        name: format!("A({},{})", p.n, p.s),
        order,
        labels: labels(p),
        mult: mult_table(p),
        unit: one.clone(),
        comult,
        counit,
        phi: reassociator(p, d, |i| p.idx(i, 0)),
        antipode,
        alpha: g2_pow(p, -s),
        beta: one,
        generators,
        idempotents: Some((0..n).map(|i| p.idx(i, 0) as u32).collect()),
    })
}

/// The dual basis functionals (1_a x^c)*.
pub fn dual_basis_functionals(p: &AnsqParams) -> Vec<Vector> {
    (0..p.dim()).map(|i| Vector::basis(i, p.order())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qha::{check_antipode, check_quasi_bialgebra, counit_functional, evaluate, mul, QuasiHopf};
    use crate::report::{all_passed, first_failure, CheckOptions};
    use crate::tensor::{mul_elements, Algebra};

    #[test]
    fn rejects_non_divisor() {
        assert_eq!(AnsqParams::new(4, 3), Err(ParamError::NotDivisor { n: 4, s: 3 }));
        assert!(AnsqParams::new(0, 1).is_err());
        assert!(AnsqParams::new(6, 3).is_ok());
    }

    #[test]
    fn dimensions() {
        for (n, s, d) in [(2, 1, 8), (3, 1, 27), (4, 2, 32), (4, 1, 64), (6, 3, 72)] {
            assert_eq!(AnsqParams::new(n, s).unwrap().dim(), d);
        }
    }

    #[test]
    fn reassociator_of_2_1_has_one_sign() {
        let p = AnsqParams::new(2, 1).unwrap();
        let h = build_ansq(&p);
        let nontrivial: Vec<_> = h.phi().sorted_entries().into_iter().filter(|(_, c)| !c.is_one()).collect();
        assert_eq!(nontrivial.len(), 1);
        let (idx, c) = &nontrivial[0];
        let one1 = p.idx(1, 0) as u32;
        assert_eq!(idx, &vec![one1, one1, one1]);
        assert_eq!(*c, CycloNum::from_int(8, -1));
    }

    #[test]
    fn idempotents_match_group_formula() {
        for (n, s) in [(2, 1), (3, 1), (4, 2)] {
            let p = AnsqParams::new(n, s).unwrap();
            let h = build_ansq(&p);
            let c = p.constants();
            let mut total = Vector::zero();
            for i in 0..n as i64 {
                let e = idempotent_from_group(&p, i);
                assert_eq!(e, idempotent(&p, i));
                total = total.add(&e);
                assert_eq!(mul(&h, &g2_pow(&p, 1), &e), e.scale(&c.o(i)));
                for j in 0..n as i64 {
                    let prod = mul(&h, &e, &idempotent(&p, j));
                    assert_eq!(prod, if i == j { e.clone() } else { Vector::zero() });
                }
            }
            assert_eq!(total, h.unit().into_owned());
        }
    }

    #[test]
    fn defining_relations() {
        for (n, s) in [(2, 1), (3, 1), (4, 2)] {
            let p = AnsqParams::new(n, s).unwrap();
            let h = build_ansq(&p);
            let c = p.constants();
            let x = x_elem(&p);
            let g = g2_pow(&p, 1);
            let gi = g2_pow(&p, -1);
            assert_eq!(mul(&h, &mul(&h, &g, &x), &gi), x.scale(&c.o(1)));
            let mut pw = h.unit().into_owned();
            for k in 1..=p.nil() {
                pw = mul(&h, &pw, &x);
                assert_eq!(pw.is_zero(), k == p.nil(), "x^{k}");
            }
            let mut gp = h.unit().into_owned();
            for _ in 0..n {
                gp = mul(&h, &gp, &g);
            }
            assert_eq!(gp, h.unit().into_owned());
        }
    }

    #[test]
    fn small_instances_pass_axioms() {
        for (n, s) in [(1, 1), (2, 1), (2, 2), (3, 1), (4, 2)] {
            let p = AnsqParams::new(n, s).unwrap();
            let h = build_ansq(&p);
            let r = check_quasi_bialgebra(&h, &CheckOptions::default());
            assert!(all_passed(&r), "{p}: {:?}", first_failure(&r));
            let r = check_antipode(&h, &CheckOptions::default());
            assert!(all_passed(&r), "{p}: {:?}", first_failure(&r));
        }
    }

    #[test]
    fn trivial_reassociator_breaks_quasi_coassociativity() {
        let p = AnsqParams::new(2, 1).unwrap();
        let h = build_ansq(&p);
        let bad = h.with_phi(crate::tensor::unit_tensor(&legs(&h, 3)));
        let r = check_quasi_bialgebra(&bad, &CheckOptions::default());
        let rec = r.iter().find(|r| r.name == "quasi-coassociativity").unwrap();
        assert!(!rec.passed());
        assert!(rec.witness.as_ref().unwrap().contains("a = "));
    }

    #[test]
    fn trivial_alpha_breaks_antipode() {
        let p = AnsqParams::new(2, 1).unwrap();
        let h = build_ansq(&p);
        let bad = h.with_alpha(h.unit().into_owned());
        let r = check_antipode(&bad, &CheckOptions::default());
        assert!(!all_passed(&r));
        assert!(first_failure(&r).unwrap().witness.is_some());
    }

    #[test]
    fn counit_is_dual_of_1_0() {
        let p = AnsqParams::new(3, 1).unwrap();
        let h = build_ansq(&p);
        let eps = counit_functional(&h);
        assert_eq!(eps, Vector::basis(p.idx(0, 0), p.order()));
        let duals = dual_basis_functionals(&p);
        for (i, f) in duals.iter().enumerate() {
            for j in 0..p.dim() {
                let v = evaluate(f, &Vector::basis(j, p.order()));
                assert_eq!(v.is_one(), i == j);
                assert_eq!(v.is_zero(), i != j);
            }
        }
        // ε(g_2) = 1
        assert!(evaluate(&eps, &g2_pow(&p, 1)).is_one());
        let _ = mul_elements(&h, &x_elem(&p), &x_elem(&p));
        assert_eq!(h.dim(), 27);
    }
}
