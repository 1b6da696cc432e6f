//! The Drinfeld double D(H) = H ⊗ H* of a finite-dimensional quasi-Hopf
//! algebra, realized on the basis h ⋈ e^ψ. Products are evaluated lazily
//! from the ω-twisted multiplication rule and memoized; the coalgebra and
//! antipode are obtained on the basis (h ⋈ ε)T(e^ψ) and transported.

pub mod relations;

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use crate::cyclo::{CycloMatrix, CycloNum};
use crate::qha::{
    antipode_leg, delta_leg, legs, mul, terms, vec_tensor, Functional, QhaError, QuasiHopf, QuasiHopfData,
};
use crate::tensor::{
    apply_to_leg, invert_element, legwise_multiply, mul_elements, permute_legs, tensor_product, unit_tensor, Algebra,
    Echelon, SparseTensor, Vector,
};

/// Products are cached for every basis pair up to this dimension.
const PRODUCT_MEMO_LIMIT: usize = 1024;

/// The auxiliary elements γ, f, f⁻¹, χ, ω of H, together with φ⁻¹.
#[derive(Debug, Clone)]
pub struct DoubleElements {
    pub phi_inv: SparseTensor,
    pub gamma: SparseTensor,
    pub f: SparseTensor,
    pub f_inv: SparseTensor,
    pub chi: SparseTensor,
    pub omega: SparseTensor,
}

fn acc_add(acc: &mut FxHashMap<u32, CycloNum>, k: u32, c: CycloNum) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&k) {
        Some(x) => *x += &c,
        None => {
            acc.insert(k, c);
        }
    }
}

/// Compute γ, f, χ, ω from φ, S, α, β of H by the general formulas.
pub fn gamma_f_chi_omega(h: &QuasiHopfData) -> Result<DoubleElements, QhaError> {
    let d = h.dim() as u32;
    let order = h.order();
    let l2 = legs(h, 2);
    let l3 = legs(h, 3);
    let l4 = legs(h, 4);
    let l5 = legs(h, 5);
    let one = vec_tensor(h, &h.unit());
    let phi = h.phi();
    let phi_inv = invert_element(phi, &l3)?;

    // (1⊗φ⁻¹)(id⊗id⊗Δ)(φ) = Σ T⊗U⊗V⊗W
    let tuvw = legwise_multiply(&tensor_product(&one, &phi_inv), &delta_leg(h, phi, 2), &l4)?;
    let s_alpha: Vec<Vector> = (0..d as usize).map(|i| mul(h, &h.antipode(i), h.alpha())).collect();
    let mut gamma = SparseTensor::new(&[d, d]);
    for (ix, c) in terms(&tuvw) {
        let (t, u, v, w) = (ix[0] as usize, ix[1] as usize, ix[2] as usize, ix[3] as usize);
        let a = mul(h, &s_alpha[u], &Vector::basis(v, order));
        let b = mul(h, &s_alpha[t], &Vector::basis(w, order));
        add_outer(&mut gamma, &c, &a, &b);
    }

    // f = Σ (S⊗S)(Δ^op X̄) · γ · Δ(Ȳ β S(Z̄))
    let mut f = SparseTensor::new(&[d, d]);
    for (ix, c) in terms(&phi_inv) {
        let (x, y, z) = (ix[0] as usize, ix[1] as usize, ix[2] as usize);
        let dop = permute_legs(&h.comult(x), &[1, 0]);
        let ss = antipode_leg(h, &antipode_leg(h, &dop, 0), 1);
        let right = mul(h, &mul(h, &Vector::basis(y, order), h.beta()), &h.antipode(z));
        let dr = delta_leg(h, &vec_tensor(h, &right), 0);
        let term = legwise_multiply(&legwise_multiply(&ss, &gamma, &l2)?, &dr, &l2)?;
        f = f.add(&term.scale(&c))?;
    }
    let f_inv = invert_element(&f, &l2).map_err(|e| QhaError::Verification(format!("f is not invertible: {e}")))?;

    // χ = (φ⊗1)(Δ⊗id⊗id)(φ⁻¹)
    let chi = legwise_multiply(&tensor_product(phi, &one), &delta_leg(h, &phi_inv, 0), &l4)?;

    // ω = (1⊗1⊗1⊗τ(f⁻¹))(id⊗Δ⊗S⊗S)(χ)(φ⊗1⊗1)
    let mapped = delta_leg(h, &antipode_leg(h, &antipode_leg(h, &chi, 3), 2), 1);
    let left = tensor_product(&unit_tensor(&legs(h, 3)), &permute_legs(&f_inv, &[1, 0]));
    let right = tensor_product(phi, &unit_tensor(&l2));
    let omega = legwise_multiply(&legwise_multiply(&left, &mapped, &l5)?, &right, &l5)?;
    Ok(DoubleElements { phi_inv, gamma, f, f_inv, chi, omega })
}

fn add_outer(t: &mut SparseTensor, c: &CycloNum, a: &Vector, b: &Vector) {
    for (i, x) in a.iter() {
        let cx = c * x;
        for (j, y) in b.iter() {
            t.add_at(&[i as u32, j as u32], &cx * y);
        }
    }
}

type Core = Arc<Vec<Vector>>;

/// D(H) on the basis h ⋈ e^ψ, index h·dim H + ψ.
pub struct DoubleAlgebra {
    h: QuasiHopfData,
    d: usize,
    order: u32,
    elements: DoubleElements,
    eps: Functional,
    omega_terms: Vec<([u32; 5], CycloNum)>,
    /// co_left[y1] lists (y, y2, c) with c·y1⊗y2 a term of Δ(y).
    co_left: Vec<Vec<(u32, u32, CycloNum)>>,
    dd: Vec<OnceLock<Vec<([u32; 3], CycloNum)>>>,
    cores: Vec<OnceLock<Core>>,
    products: Option<Vec<OnceLock<Vector>>>,
    unit: Vector,
    phi_d: SparseTensor,
    alpha_d: Vector,
    beta_d: Vector,
    generators: Vec<Vector>,
    idempotents: Option<Vec<u32>>,
    t_basis: Vec<Vector>,
    sinv_dual: Vec<Functional>,
    eps_t: Vec<CycloNum>,
    theta: OnceLock<Echelon>,
    u_cache: Vec<OnceLock<Arc<SparseTensor>>>,
    v_cache: Vec<OnceLock<Arc<SparseTensor>>>,
    delta_t: Vec<OnceLock<Arc<SparseTensor>>>,
    s_t: Vec<OnceLock<Vector>>,
    expansions: Vec<OnceLock<Vec<(usize, usize, CycloNum)>>>,
    comult: Vec<OnceLock<Arc<SparseTensor>>>,
    counit: Vec<OnceLock<CycloNum>>,
    antipode: Vec<OnceLock<Vector>>,
}

impl DoubleAlgebra {
    /// Build D(H). `dual_generators` are functionals whose images under T,
    /// together with H, generate D(H) as an algebra.
    pub fn new(h: QuasiHopfData, dual_generators: &[Functional]) -> Result<DoubleAlgebra, QhaError> {
        let elements = gamma_f_chi_omega(&h)?;
        let d = h.dim();
        let order = h.order();
        let eps = Vector::from_pairs((0..d).map(|i| (i, h.counit(i))));
        let omega_terms = terms(&elements.omega)
            .into_iter()
            .map(|(ix, c)| ([ix[0], ix[1], ix[2], ix[3], ix[4]], c))
            .collect();
        let mut co_left = vec![Vec::new(); d];
        for y in 0..d {
            for (ix, c) in terms(&h.comult(y)) {
                co_left[ix[0] as usize].push((y as u32, ix[1], c));
            }
        }
        let dd2 = d * d;
        let products = (dd2 <= PRODUCT_MEMO_LIMIT).then(|| (0..dd2 * dd2).map(|_| OnceLock::new()).collect());

        let embed = |v: &Vector| embed_with(&eps, d, v);
        let unit = embed(&h.unit());
        let phi_d = embed_tensor(&eps, d, h.phi());
        let alpha_d = embed(h.alpha());
        let beta_d = embed(h.beta());
        let idempotents = match (h.idempotent_system(), eps.len()) {
            (Some(sys), 1) => {
                let e = eps.entries()[0].0;
                Some(sys.iter().map(|i| i * d as u32 + e).collect())
            }
            _ => None,
        };

        // S⁻¹ as a matrix, then ψ ↦ ψ∘S⁻¹ in the dual basis.
        let s_mat = CycloMatrix::from_fn(order, d, d, |i, j| h.antipode(j).get(i).cloned().unwrap_or(CycloNum::zero(order)));
        let s_inv = s_mat.invert().map_err(|e| QhaError::Verification(format!("antipode is not invertible: {e}")))?;
        let sinv_dual = (0..d).map(|psi| Vector::from_pairs((0..d).map(|y| (y, s_inv.get(psi, y).clone())))).collect();

        // ε_D(T(ψ)) = ψ(φ¹ S(φ²) α φ³)
        let mut m = FxHashMap::default();
        for (ix, c) in terms(h.phi()) {
            let (x, y, z) = (ix[0] as usize, ix[1] as usize, ix[2] as usize);
            let v = mul(&h, &mul(&h, &mul(&h, &Vector::basis(x, order), &h.antipode(y)), h.alpha()), &Vector::basis(z, order));
            v.add_into(&c, &mut m);
        }
        let m = Vector::from_map(m);
        let eps_t = (0..d).map(|psi| m.get(psi).cloned().unwrap_or(CycloNum::zero(order))).collect();

        let mut dbl = DoubleAlgebra {
            d,
            order,
            elements,
            eps,
            omega_terms,
            co_left,
            dd: (0..d).map(|_| OnceLock::new()).collect(),
            cores: (0..dd2).map(|_| OnceLock::new()).collect(),
            products,
            unit,
            phi_d,
            alpha_d,
            beta_d,
            generators: Vec::new(),
            idempotents,
            t_basis: Vec::new(),
            sinv_dual,
            eps_t,
            theta: OnceLock::new(),
            u_cache: (0..d).map(|_| OnceLock::new()).collect(),
            v_cache: (0..d).map(|_| OnceLock::new()).collect(),
            delta_t: (0..d).map(|_| OnceLock::new()).collect(),
            s_t: (0..d).map(|_| OnceLock::new()).collect(),
            expansions: (0..dd2).map(|_| OnceLock::new()).collect(),
            comult: (0..dd2).map(|_| OnceLock::new()).collect(),
            counit: (0..dd2).map(|_| OnceLock::new()).collect(),
            antipode: (0..dd2).map(|_| OnceLock::new()).collect(),
            h,
        };
        dbl.t_basis = (0..d).map(|psi| dbl.compute_t(&Vector::basis(psi, order))).collect();
        let mut gens: Vec<Vector> = dbl.h.generators().iter().map(|g| dbl.embed(g)).collect();
        gens.extend(dual_generators.iter().map(|f| dbl.t_map(f)));
        dbl.generators = gens;
        Ok(dbl)
    }

    pub fn base(&self) -> &QuasiHopfData {
        &self.h
    }

    pub fn elements(&self) -> &DoubleElements {
        &self.elements
    }

    pub fn base_dim(&self) -> usize {
        self.d
    }

    pub fn index(&self, h: usize, psi: usize) -> usize {
        h * self.d + psi
    }

    /// h ⋈ ε.
    pub fn embed(&self, v: &Vector) -> Vector {
        embed_with(&self.eps, self.d, v)
    }

    /// A tensor over H mapped legwise into D(H).
    pub fn embed_tensor(&self, t: &SparseTensor) -> SparseTensor {
        embed_tensor(&self.eps, self.d, t)
    }

    /// h ⋈ ψ for an element h and a functional ψ.
    pub fn pure(&self, h: &Vector, psi: &Functional) -> Vector {
        let mut acc = FxHashMap::default();
        for (i, a) in h.iter() {
            for (j, b) in psi.iter() {
                acc_add(&mut acc, (i * self.d + j) as u32, a * b);
            }
        }
        Vector::from_map(acc)
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        mul_elements(self, a, b)
    }

    pub fn counit_functional_of_base(&self) -> &Functional {
        &self.eps
    }

    fn base_dd(&self, h: usize) -> &Vec<([u32; 3], CycloNum)> {
        self.dd[h].get_or_init(|| {
            terms(&delta_leg(&self.h, &self.h.comult(h), 0))
                .into_iter()
                .map(|(ix, c)| ([ix[0], ix[1], ix[2]], c))
                .collect()
        })
    }

    /// y ↦ ψ(a y b) for basis elements a, b, as its nonzero values.
    fn sandwich(&self, psi: usize, a: usize, b: usize) -> Vec<(u32, CycloNum)> {
        let mut out = Vec::new();
        for y in 0..self.d {
            let ay = self.h.mul_basis(a, y);
            if ay.is_zero() {
                continue;
            }
            let v = mul_elements(&self.h, &ay, &Vector::basis(b, self.order));
            if let Some(c) = v.get(psi) {
                out.push((y as u32, c.clone()));
            }
        }
        out
    }

    /// (1 ⋈ e^φ)(h ⋈ e^ψ) for every φ at once:
    /// Σ h₁₂ω³ ⋈ (ω⁵ ⇀ e^ψ ↼ ω¹)(ω⁴S(h₂) ⇀ e^φ ↼ h₁₁ω²).
    fn compute_core(&self, h: usize, psi: usize) -> Vec<Vector> {
        let d = self.d;
        let order = self.order;
        let hq = &self.h;
        let mut acc: Vec<FxHashMap<u32, CycloNum>> = vec![FxHashMap::default(); d];
        let mut fcache: FxHashMap<(u32, u32), Vec<(u32, CycloNum)>> = FxHashMap::default();
        let mut rcache: FxHashMap<(u32, u32), Vector> = FxHashMap::default();
        let mut lycache: FxHashMap<(u32, u32, u32, u32), Vector> = FxHashMap::default();
        for (ix, c) in self.base_dd(h) {
            let (h11, h12, h2) = (ix[0] as usize, ix[1] as usize, ix[2]);
            for (o, w) in &self.omega_terms {
                let l = hq.mul_basis(h11, o[1] as usize);
                if l.is_zero() {
                    continue;
                }
                let r = rcache
                    .entry((o[3], h2))
                    .or_insert_with(|| mul_elements(hq, &Vector::basis(o[3] as usize, order), &hq.antipode(h2 as usize)));
                if r.is_zero() {
                    continue;
                }
                let hp = hq.mul_basis(h12, o[2] as usize);
                if hp.is_zero() {
                    continue;
                }
                let f = fcache.entry((o[0], o[4])).or_insert_with(|| self.sandwich(psi, o[0] as usize, o[4] as usize));
                if f.is_empty() {
                    continue;
                }
                let cw = c * w;
                for (y1, fy) in f.iter() {
                    let cf = &cw * fy;
                    for (y, y2, cc) in &self.co_left[*y1 as usize] {
                        let m = lycache
                            .entry((h11 as u32, o[1], *y2, o[3] * d as u32 + h2))
                            .or_insert_with(|| {
                                let ly = mul_elements(hq, &l, &Vector::basis(*y2 as usize, order));
                                if ly.is_zero() {
                                    ly
                                } else {
                                    mul_elements(hq, &ly, r)
                                }
                            });
                        if m.is_zero() {
                            continue;
                        }
                        let k = &cf * cc;
                        for (phi, lv) in m.iter() {
                            let kl = &k * lv;
                            for (u, hv) in hp.iter() {
                                acc_add(&mut acc[phi], (u * d) as u32 + y, &kl * hv);
                            }
                        }
                    }
                }
            }
        }
        acc.into_iter().map(Vector::from_map).collect()
    }

    fn core(&self, h: usize, psi: usize) -> &Core {
        self.cores[h * self.d + psi].get_or_init(|| Arc::new(self.compute_core(h, psi)))
    }

    fn compute_product(&self, i: usize, j: usize) -> Vector {
        let d = self.d;
        let (g, phi) = (i / d, i % d);
        let (h, psi) = (j / d, j % d);
        let v = &self.core(h, psi)[phi];
        let mut acc = FxHashMap::default();
        for (k, c) in v.iter() {
            let (u, y) = (k / d, k % d);
            for (m, x) in self.h.mul_basis(g, u).iter() {
                acc_add(&mut acc, (m * d + y) as u32, c * x);
            }
        }
        Vector::from_map(acc)
    }

    /// T(ψ) = φ¹₍₂₎ ⋈ (S(φ²)αφ³ ⇀ ψ ↼ φ¹₍₁₎).
    fn compute_t(&self, psi: &Functional) -> Vector {
        let d = self.d;
        let order = self.order;
        let hq = &self.h;
        let mut acc = FxHashMap::default();
        for (ix, w) in terms(hq.phi()) {
            let (x, y, z) = (ix[0] as usize, ix[1] as usize, ix[2] as usize);
            let m = mul(hq, &mul(hq, &hq.antipode(y), hq.alpha()), &Vector::basis(z, order));
            for (jx, c) in terms(&hq.comult(x)) {
                let (x1, x2) = (jx[0] as usize, jx[1] as usize);
                let cw = &w * &c;
                for t in 0..d {
                    let xt = hq.mul_basis(x1, t);
                    if xt.is_zero() {
                        continue;
                    }
                    let val = crate::qha::evaluate(psi, &mul(hq, &xt, &m));
                    acc_add(&mut acc, (x2 * d + t) as u32, &cw * &val);
                }
            }
        }
        Vector::from_map(acc)
    }

    /// T(ψ), by linearity from the dual basis.
    pub fn t_map(&self, psi: &Functional) -> Vector {
        let mut acc = FxHashMap::default();
        for (k, c) in psi.iter() {
            self.t_basis[k].add_into(c, &mut acc);
        }
        Vector::from_map(acc)
    }

    /// Echelon of the family (h ⋈ ε)T(e^ψ), inserted in index order.
    fn theta(&self) -> &Echelon {
        self.theta.get_or_init(|| {
            let mut ech = Echelon::new(true);
            for h in 0..self.d {
                let eh = self.embed(&Vector::basis(h, self.order));
                for psi in 0..self.d {
                    let v = self.mul(&eh, &self.t_basis[psi]);
                    ech.insert(v.iter().map(|(k, c)| (k as u64, c.clone())).collect());
                }
            }
            ech
        })
    }

    /// Rank of {(h ⋈ ε)T(e^ψ)}; equals dim D(H) exactly when D = H·T(H*).
    pub fn theta_rank(&self) -> usize {
        self.theta().rank()
    }

    /// Basis element k = Σ c (h ⋈ ε)T(e^ψ) as triples (h, ψ, c).
    fn expansion(&self, k: usize) -> &Vec<(usize, usize, CycloNum)> {
        self.expansions[k].get_or_init(|| {
            let target: BTreeMap<u64, CycloNum> = [(k as u64, CycloNum::one(self.order))].into_iter().collect();
            let comb = self.theta().express(&target).expect("(h ⋈ ε)T(H*) spans D(H)");
            comb.into_iter().map(|(id, c)| ((id as usize) / self.d, (id as usize) % self.d, c)).collect()
        })
    }

    fn d_legs(&self, k: usize) -> Vec<&dyn Algebra> {
        vec![self as &dyn Algebra; k]
    }

    fn dd_tensor(&self) -> SparseTensor {
        let dd = (self.d * self.d) as u32;
        SparseTensor::new(&[dd, dd])
    }

    /// Σ_φ̃ (φ̃² ⋈ ε)T(e^a ↼ φ̃¹) ⊗ (φ̃³ ⋈ ε).
    fn u_part(&self, a: usize) -> Arc<SparseTensor> {
        self.u_cache[a]
            .get_or_init(|| {
                let order = self.order;
                let mut acc = self.dd_tensor();
                for (ix, w) in terms(self.h.phi()) {
                    let (x, y, z) = (ix[0] as usize, ix[1] as usize, ix[2] as usize);
                    let f = Vector::from_pairs(
                        (0..self.d).filter_map(|b| self.h.mul_basis(x, b).get(a).map(|c| (b, c.clone()))),
                    );
                    if f.is_zero() {
                        continue;
                    }
                    let left = self.mul(&self.embed(&Vector::basis(y, order)), &self.t_map(&f));
                    let right = self.embed(&Vector::basis(z, order));
                    add_outer(&mut acc, &w, &left, &right);
                }
                Arc::new(acc)
            })
            .clone()
    }

    /// Σ (φ⁽⁻¹⁾φ¹ ⋈ ε) ⊗ (φ⁽⁻³⁾ ⋈ ε)T(φ³ ⇀ e^b ↼ φ⁽⁻²⁾)(φ² ⋈ ε).
    fn v_part(&self, b: usize) -> Arc<SparseTensor> {
        self.v_cache[b]
            .get_or_init(|| {
                let order = self.order;
                let hq = &self.h;
                let mut acc = self.dd_tensor();
                let phi = terms(hq.phi());
                let phi_inv = terms(&self.elements.phi_inv);
                let mut tcache: FxHashMap<(u32, u32), Vector> = FxHashMap::default();
                for (jx, wi) in &phi_inv {
                    for (ix, w) in &phi {
                        let t = tcache.entry((jx[1], ix[2])).or_insert_with(|| {
                            let f = Vector::from_pairs((0..self.d).filter_map(|t| {
                                let v = mul(
                                    hq,
                                    &hq.mul_basis(jx[1] as usize, t),
                                    &Vector::basis(ix[2] as usize, order),
                                );
                                v.get(b).map(|c| (t, c.clone()))
                            }));
                            self.t_map(&f)
                        });
                        if t.is_zero() {
                            continue;
                        }
                        let left = self.embed(&hq.mul_basis(jx[0] as usize, ix[0] as usize));
                        if left.is_zero() {
                            continue;
                        }
                        let right = self.mul(
                            &self.mul(&self.embed(&Vector::basis(jx[2] as usize, order)), t),
                            &self.embed(&Vector::basis(ix[1] as usize, order)),
                        );
                        add_outer(&mut acc, &(wi * w), &left, &right);
                    }
                }
                Arc::new(acc)
            })
            .clone()
    }

    /// Δ_D(T(e^ψ)) = Σ_{a,b} e^ψ(e_a e_b) U(e^a)·V(e^b).
    pub fn delta_t(&self, psi: usize) -> Arc<SparseTensor> {
        self.delta_t[psi]
            .get_or_init(|| {
                let l2 = self.d_legs(2);
                let mut acc = self.dd_tensor();
                for a in 0..self.d {
                    for b in 0..self.d {
                        if let Some(c) = self.h.mul_basis(a, b).get(psi) {
                            let term = legwise_multiply(&self.u_part(a), &self.v_part(b), &l2).expect("dims");
                            acc = acc.add(&term.scale(c)).expect("dims");
                        }
                    }
                }
                Arc::new(acc)
            })
            .clone()
    }

    /// S_D(T(e^ψ)) = f² T(f⁽⁻²⁾ ⇀ S⁻¹(e^ψ) ↼ f¹) f⁽⁻¹⁾.
    pub fn antipode_t(&self, psi: usize) -> &Vector {
        self.s_t[psi].get_or_init(|| {
            let order = self.order;
            let hq = &self.h;
            let sinv = &self.sinv_dual[psi];
            let mut acc = FxHashMap::default();
            let fi = terms(&self.elements.f_inv);
            for (ix, wf) in terms(&self.elements.f) {
                for (jx, wg) in &fi {
                    let fun = Vector::from_pairs((0..self.d).map(|t| {
                        let v = mul(hq, &hq.mul_basis(ix[0] as usize, t), &Vector::basis(jx[1] as usize, order));
                        (t, crate::qha::evaluate(sinv, &v))
                    }));
                    if fun.is_zero() {
                        continue;
                    }
                    let v = self.mul(
                        &self.mul(&self.embed(&Vector::basis(ix[1] as usize, order)), &self.t_map(&fun)),
                        &self.embed(&Vector::basis(jx[0] as usize, order)),
                    );
                    v.add_into(&(&wf * wg), &mut acc);
                }
            }
            Vector::from_map(acc)
        })
    }

    pub fn counit_t(&self, psi: usize) -> &CycloNum {
        &self.eps_t[psi]
    }

    /// Products memoized so far, sorted by pair.
    pub fn demanded_products(&self) -> Vec<(usize, usize, &Vector)> {
        let n = self.dim();
        match &self.products {
            Some(p) => p.iter().enumerate().filter_map(|(k, v)| v.get().map(|v| (k / n, k % n, v))).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        let labels: Vec<String> = (0..self.dim()).map(|i| self.label(i)).collect();
        let mult: Vec<Value> = self
            .demanded_products()
            .into_iter()
            .flat_map(|(i, j, v)| v.iter().map(move |(k, c)| json!([i, j, k, c.to_string()])).collect::<Vec<_>>())
            .collect();
        json!({
            "name": format!("D({})", self.h.name()),
            "dim": self.dim(),
            "order": self.order,
            "basis": labels,
            "mult": mult,
            "unit": self.unit.to_json(),
            "reassociator": self.phi_d.to_json(),
            "alpha": self.alpha_d.to_json(),
            "beta": self.beta_d.to_json(),
            "generators": self.generators.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
        })
    }
}

fn embed_with(eps: &Functional, d: usize, v: &Vector) -> Vector {
    let mut acc = FxHashMap::default();
    for (i, a) in v.iter() {
        for (j, b) in eps.iter() {
            acc_add(&mut acc, (i * d + j) as u32, a * b);
        }
    }
    Vector::from_map(acc)
}

fn embed_tensor(eps: &Functional, d: usize, t: &SparseTensor) -> SparseTensor {
    let dd = (d * d) as u32;
    let mut out = t.clone();
    for leg in 0..t.legs() {
        out = apply_to_leg(&out, leg, &[dd], |i| {
            Arc::new(SparseTensor::from_vector(&embed_with(eps, d, &Vector::basis(i, t_order(t))), d * d))
        })
        .expect("dims");
    }
    out
}

fn t_order(t: &SparseTensor) -> u32 {
    t.iter_packed().next().map(|(_, c)| c.order()).unwrap_or(1)
}

impl Algebra for DoubleAlgebra {
    fn dim(&self) -> usize {
        self.d * self.d
    }
    fn order(&self) -> u32 {
        self.order
    }
    fn mul_basis(&self, i: usize, j: usize) -> Cow<'_, Vector> {
        match &self.products {
            Some(p) => Cow::Borrowed(p[i * self.dim() + j].get_or_init(|| self.compute_product(i, j))),
            None => Cow::Owned(self.compute_product(i, j)),
        }
    }
    fn unit(&self) -> Cow<'_, Vector> {
        Cow::Borrowed(&self.unit)
    }
    fn idempotent_system(&self) -> Option<&[u32]> {
        self.idempotents.as_deref()
    }
}

impl QuasiHopf for DoubleAlgebra {
    fn label(&self, i: usize) -> String {
        let (h, psi) = (i / self.d, i % self.d);
        format!("{}⋈({})*", self.h.label(h), self.h.label(psi))
    }

    /// Δ_D(e) = Σ c Δ(h ⋈ ε)·Δ_D(T(e^ψ)) over the expansion of e.
    fn comult(&self, i: usize) -> Arc<SparseTensor> {
        self.comult[i]
            .get_or_init(|| {
                let l2 = self.d_legs(2);
                let mut acc = self.dd_tensor();
                for (h, psi, c) in self.expansion(i) {
                    let dh = self.embed_tensor(&self.h.comult(*h));
                    let term = legwise_multiply(&dh, &self.delta_t(*psi), &l2).expect("dims");
                    acc = acc.add(&term.scale(c)).expect("dims");
                }
                Arc::new(acc)
            })
            .clone()
    }

    fn counit(&self, i: usize) -> CycloNum {
        self.counit[i]
            .get_or_init(|| {
                let mut acc = CycloNum::zero(self.order);
                for (h, psi, c) in self.expansion(i) {
                    acc += &(c * &(&self.h.counit(*h) * &self.eps_t[*psi]));
                }
                acc
            })
            .clone()
    }

    /// S_D(e) = Σ c S_D(T(e^ψ))(S(h) ⋈ ε).
    fn antipode(&self, i: usize) -> Cow<'_, Vector> {
        Cow::Borrowed(self.antipode[i].get_or_init(|| {
            let mut acc = FxHashMap::default();
            for (h, psi, c) in self.expansion(i) {
                let v = self.mul(self.antipode_t(*psi), &self.embed(&self.h.antipode(*h)));
                v.add_into(c, &mut acc);
            }
            Vector::from_map(acc)
        }))
    }

    fn phi(&self) -> &SparseTensor {
        &self.phi_d
    }
    fn alpha(&self) -> &Vector {
        &self.alpha_d
    }
    fn beta(&self) -> &Vector {
        &self.beta_d
    }
    fn generators(&self) -> &[Vector] {
        &self.generators
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qha::tests::group_algebra;
    use crate::qha::{check_antipode, check_quasi_bialgebra};
    use crate::report::{first_failure, CheckOptions};

    fn all_pass(recs: &[crate::report::CheckRecord]) {
        if let Some(f) = first_failure(recs) {
            panic!("{} failed: {:?}", f.name, f.witness);
        }
    }

    fn dual_gens(n: usize, order: u32) -> Vec<Functional> {
        (0..n).map(|i| Vector::basis(i, order)).collect()
    }

    #[test]
    fn trivial_reassociator_double() {
        let h = group_algebra(3, 0);
        let order = h.order();
        let el = gamma_f_chi_omega(&h).unwrap();
        let one2 = unit_tensor(&legs(&h, 2));
        assert_eq!(el.gamma, one2);
        assert_eq!(el.f, one2);
        assert_eq!(el.omega, unit_tensor(&legs(&h, 5)));
        let dbl = DoubleAlgebra::new(h.clone(), &dual_gens(3, order)).unwrap();
        for psi in 0..3 {
            let one = h.unit().into_owned();
            assert_eq!(dbl.t_map(&Vector::basis(psi, order)), dbl.pure(&one, &Vector::basis(psi, order)));
        }
        assert_eq!(dbl.theta_rank(), 9);
        let opts = CheckOptions::default();
        all_pass(&check_quasi_bialgebra(&dbl, &opts));
        all_pass(&check_antipode(&dbl, &opts));
    }

    #[test]
    fn twisted_group_algebra_double() {
        for (n, a) in [(2, 1), (3, 1), (3, 2)] {
            let h = group_algebra(n, a);
            let order = h.order();
            let dbl = DoubleAlgebra::new(h, &dual_gens(n, order)).unwrap();
            assert_eq!(dbl.theta_rank(), n * n);
            let opts = CheckOptions::default();
            all_pass(&check_quasi_bialgebra(&dbl, &opts));
            all_pass(&check_antipode(&dbl, &opts));
        }
    }

    fn ansq_double(n: u32, s: u32) -> DoubleAlgebra {
        let p = crate::ansq::AnsqParams::new(n, s).unwrap();
        let h = crate::ansq::build_ansq(&p);
        let gens = vec![Vector::basis(p.idx(1, 0), p.order()), Vector::basis(p.idx(1, 1), p.order())];
        DoubleAlgebra::new(h, &gens).unwrap()
    }

    #[test]
    fn double_of_a21_axioms() {
        let t = std::time::Instant::now();
        let dbl = ansq_double(2, 1);
        assert_eq!(dbl.dim(), 64);
        assert_eq!(dbl.theta_rank(), 64);
        let opts = CheckOptions::default();
        all_pass(&check_quasi_bialgebra(&dbl, &opts));
        all_pass(&check_antipode(&dbl, &opts));
        eprintln!("D(2,1) axioms in {:?}", t.elapsed());
    }

    #[test]
    #[ignore]
    fn double_of_a31_timing() {
        let t = std::time::Instant::now();
        let dbl = ansq_double(3, 1);
        eprintln!("elements {:?}", t.elapsed());
        assert_eq!(dbl.theta_rank(), 729);
        eprintln!("theta {:?}", t.elapsed());
        for i in 0..729 {
            dbl.comult(i);
        }
        eprintln!("comult {:?}", t.elapsed());
        for i in 0..729 {
            dbl.antipode(i);
        }
        eprintln!("antipode {:?}", t.elapsed());
        let opts = CheckOptions::default();
        for r in check_quasi_bialgebra(&dbl, &opts).into_iter().chain(check_antipode(&dbl, &opts)) {
            eprintln!("{} {:?} {:?} {:?}", r.name, r.status, r.witness, t.elapsed());
        }
    }
}
