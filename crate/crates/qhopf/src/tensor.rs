//! Sparse exact elements of H^⊗k and the leg-wise operations on them.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde_json::{json, Value};

use crate::cyclo::CycloNum;

pub const MAX_LEGS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
}

pub(crate) fn acc_add<K: std::hash::Hash + Eq>(map: &mut FxHashMap<K, CycloNum>, k: K, v: CycloNum) {
    if v.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            let s = e.get() + &v;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(v);
        }
    }
}

/// A sparse vector, entries sorted by index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vector(Vec<(u32, CycloNum)>);

impl Vector {
    pub fn zero() -> Vector {
        Vector(Vec::new())
    }

    pub fn basis(i: usize, order: u32) -> Vector {
        Vector(vec![(i as u32, CycloNum::one(order))])
    }

    pub fn single(i: usize, c: CycloNum) -> Vector {
        if c.is_zero() {
            Vector::zero()
        } else {
            Vector(vec![(i as u32, c)])
        }
    }

    pub fn from_map(map: FxHashMap<u32, CycloNum>) -> Vector {
        let mut v: Vec<(u32, CycloNum)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        v.sort_unstable_by_key(|e| e.0);
        Vector(v)
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, CycloNum)>>(it: I) -> Vector {
        let mut map = FxHashMap::default();
        for (i, c) in it {
            acc_add(&mut map, i as u32, c);
        }
        Vector::from_map(map)
    }

    pub fn entries(&self) -> &[(u32, CycloNum)] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CycloNum)> {
        self.0.iter().map(|(i, c)| (*i as usize, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&CycloNum> {
        self.0.binary_search_by_key(&(i as u32), |e| e.0).ok().map(|k| &self.0[k].1)
    }

    pub fn scale(&self, c: &CycloNum) -> Vector {
        if c.is_zero() {
            return Vector::zero();
        }
        Vector(self.0.iter().map(|(i, v)| (*i, v * c)).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|(i, v)| (*i, -v)).collect())
    }

    fn merge(&self, other: &Vector, sign: bool) -> Vector {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() || b < other.0.len() {
            let ka = self.0.get(a).map(|e| e.0).unwrap_or(u32::MAX);
            let kb = other.0.get(b).map(|e| e.0).unwrap_or(u32::MAX);
            if ka < kb {
                out.push(self.0[a].clone());
                a += 1;
            } else if kb < ka {
                let v = if sign { -&other.0[b].1 } else { other.0[b].1.clone() };
                out.push((kb, v));
                b += 1;
            } else {
                let v = if sign { &self.0[a].1 - &other.0[b].1 } else { &self.0[a].1 + &other.0[b].1 };
                if !v.is_zero() {
                    out.push((ka, v));
                }
                a += 1;
                b += 1;
            }
        }
        Vector(out)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.merge(other, true)
    }

    pub fn add_into(&self, scale: &CycloNum, acc: &mut FxHashMap<u32, CycloNum>) {
        for (i, c) in &self.0 {
            acc_add(acc, *i, c * scale);
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|(i, c)| json!([i, c.to_string()])).collect())
    }
}

/// A finite-dimensional associative algebra given by basis products.
pub trait Algebra: Sync {
    fn dim(&self) -> usize;
    fn order(&self) -> u32;
    fn mul_basis(&self, i: usize, j: usize) -> Cow<'_, Vector>;
    fn unit(&self) -> Cow<'_, Vector>;
    /// Sorted indices j with e_i·e_j ≠ 0, when cheaply known.
    fn right_support(&self, _i: usize) -> Option<&[u32]> {
        None
    }
    /// Basis indices forming orthogonal idempotents that sum to the unit.
    fn idempotent_system(&self) -> Option<&[u32]> {
        None
    }
}

/// Product of two elements of one algebra.
pub fn mul_elements(alg: &dyn Algebra, a: &Vector, b: &Vector) -> Vector {
    let mut acc = FxHashMap::default();
    for (i, ca) in a.entries() {
        for (j, cb) in b.entries() {
            let p = alg.mul_basis(*i as usize, *j as usize);
            if p.is_zero() {
                continue;
            }
            let c = ca * cb;
            p.add_into(&c, &mut acc);
        }
    }
    Vector::from_map(acc)
}

type Idx = [u32; MAX_LEGS];

/// An element of V_1 ⊗ … ⊗ V_k stored sparsely.
#[derive(Clone, Debug)]
pub struct SparseTensor {
    dims: Vec<u32>,
    entries: FxHashMap<u64, CycloNum>,
}

impl PartialEq for SparseTensor {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.entries == other.entries
    }
}

impl SparseTensor {
    pub fn new(dims: &[u32]) -> SparseTensor {
        assert!(dims.len() <= MAX_LEGS, "too many legs");
        let mut total: u128 = 1;
        for d in dims {
            total *= *d as u128;
        }
        assert!(total <= u64::MAX as u128, "tensor index space exceeds 64 bits");
        SparseTensor { dims: dims.to_vec(), entries: FxHashMap::default() }
    }

    /// The 0-leg tensor holding a scalar.
    pub fn scalar(c: CycloNum) -> SparseTensor {
        let mut t = SparseTensor::new(&[]);
        t.add_at(&[], c);
        t
    }

    pub fn from_vector(v: &Vector, dim: usize) -> SparseTensor {
        let mut t = SparseTensor::new(&[dim as u32]);
        for (i, c) in v.entries() {
            t.entries.insert(*i as u64, c.clone());
        }
        t
    }

    pub fn to_vector(&self) -> Vector {
        assert_eq!(self.dims.len(), 1, "to_vector needs one leg");
        Vector::from_map(self.entries.iter().map(|(k, c)| (*k as u32, c.clone())).collect())
    }

    pub fn legs(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pack(&self, idx: &[u32]) -> u64 {
        pack(&self.dims, idx)
    }

    pub fn unpack(&self, key: u64) -> Vec<u32> {
        let a = unpack(&self.dims, key);
        a[..self.dims.len()].to_vec()
    }

    pub fn get(&self, idx: &[u32]) -> Option<&CycloNum> {
        self.entries.get(&self.pack(idx))
    }

    pub fn add_at(&mut self, idx: &[u32], c: CycloNum) {
        assert_eq!(idx.len(), self.dims.len(), "index arity");
        for (i, d) in idx.iter().zip(&self.dims) {
            assert!(i < d, "index {i} out of range {d}");
        }
        let k = self.pack(idx);
        acc_add(&mut self.entries, k, c);
    }

    pub(crate) fn add_packed(&mut self, key: u64, c: CycloNum) {
        acc_add(&mut self.entries, key, c);
    }

    pub fn iter_packed(&self) -> impl Iterator<Item = (u64, &CycloNum)> {
        self.entries.iter().map(|(k, c)| (*k, c))
    }

    /// Entries sorted by multi-index.
    pub fn sorted_entries(&self) -> Vec<(Vec<u32>, CycloNum)> {
        let mut keys: Vec<&u64> = self.entries.keys().collect();
        keys.sort_unstable();
        keys.into_iter().map(|k| (self.unpack(*k), self.entries[k].clone())).collect()
    }

    pub fn scale(&self, c: &CycloNum) -> SparseTensor {
        let mut out = SparseTensor::new(&self.dims);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.entries {
            out.entries.insert(*k, v * c);
        }
        out
    }

    pub fn add(&self, other: &SparseTensor) -> Result<SparseTensor, TensorError> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &SparseTensor) -> Result<SparseTensor, TensorError> {
        self.combine(other, true)
    }

    fn combine(&self, other: &SparseTensor, neg: bool) -> Result<SparseTensor, TensorError> {
        if self.dims != other.dims {
            return Err(TensorError::Dimension(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        let mut out = self.clone();
        for (k, v) in &other.entries {
            acc_add(&mut out.entries, *k, if neg { -v } else { v.clone() });
        }
        Ok(out)
    }

    /// Some entry where the two tensors differ, as (index, left, right).
    pub fn first_difference(&self, other: &SparseTensor) -> Option<(Vec<u32>, CycloNum, CycloNum)> {
        let mut keys: Vec<u64> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        for k in keys {
            let a = self.entries.get(&k);
            let b = other.entries.get(&k);
            if a != b {
                let zero = |o: Option<&CycloNum>, t: &SparseTensor| {
                    o.cloned().unwrap_or_else(|| {
                        let order = t.entries.values().next().map(|c| c.order()).unwrap_or(1);
                        CycloNum::zero(order)
                    })
                };
                return Some((unpack(&self.dims, k)[..self.dims.len()].to_vec(), zero(a, self), zero(b, other)));
            }
        }
        None
    }

    pub fn to_json(&self) -> Value {
        json!({
            "legs": self.dims.len(),
            "dims": self.dims,
            "entries": self.sorted_entries().into_iter()
                .map(|(idx, c)| json!({"idx": idx, "coeff": c.to_string()}))
                .collect::<Vec<_>>(),
        })
    }
}

fn pack(dims: &[u32], idx: &[u32]) -> u64 {
    let mut k = 0u64;
    for (i, d) in idx.iter().zip(dims) {
        k = k * (*d as u64) + *i as u64;
    }
    k
}

fn unpack(dims: &[u32], mut key: u64) -> Idx {
    let mut out = [0u32; MAX_LEGS];
    for l in (0..dims.len()).rev() {
        let d = dims[l] as u64;
        out[l] = (key % d) as u32;
        key /= d;
    }
    out
}

pub fn tensor_product(a: &SparseTensor, b: &SparseTensor) -> SparseTensor {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let mut out = SparseTensor::new(&dims);
    let bsize: u64 = b.dims.iter().map(|d| *d as u64).product();
    for (ka, ca) in &a.entries {
        for (kb, cb) in &b.entries {
            out.entries.insert(ka * bsize + kb, ca * cb);
        }
    }
    out
}

/// Tensor product of per-leg vectors.
pub fn tensor_of_vectors(vs: &[&Vector], dims: &[u32]) -> SparseTensor {
    let mut out = SparseTensor::scalar(CycloNum::one(order_of(vs)));
    for (v, d) in vs.iter().zip(dims) {
        out = tensor_product(&out, &SparseTensor::from_vector(v, *d as usize));
    }
    out
}

fn order_of(vs: &[&Vector]) -> u32 {
    vs.iter().find_map(|v| v.entries().first().map(|e| e.1.order())).unwrap_or(1)
}

/// The unit of A_1 ⊗ … ⊗ A_k.
pub fn unit_tensor(algs: &[&dyn Algebra]) -> SparseTensor {
    let units: Vec<Cow<'_, Vector>> = algs.iter().map(|a| a.unit()).collect();
    let refs: Vec<&Vector> = units.iter().map(|u| u.as_ref()).collect();
    let dims: Vec<u32> = algs.iter().map(|a| a.dim() as u32).collect();
    let mut t = tensor_of_vectors(&refs, &dims);
    if algs.is_empty() {
        t = SparseTensor::scalar(CycloNum::one(1));
    }
    t
}

/// Product in the tensor-product algebra A_1 ⊗ … ⊗ A_k.
pub fn legwise_multiply(a: &SparseTensor, b: &SparseTensor, algs: &[&dyn Algebra]) -> Result<SparseTensor, TensorError> {
    let k = a.dims.len();
    if b.dims != a.dims || algs.len() != k {
        return Err(TensorError::Dimension(format!("legwise {:?} * {:?} with {} algebras", a.dims, b.dims, algs.len())));
    }
    for (l, alg) in algs.iter().enumerate() {
        if alg.dim() as u32 != a.dims[l] {
            return Err(TensorError::Dimension(format!("leg {l}: algebra dim {} vs {}", alg.dim(), a.dims[l])));
        }
    }
    let mut out = SparseTensor::new(&a.dims);
    if a.is_zero() || b.is_zero() {
        return Ok(out);
    }
    if k == 0 {
        let c = &a.entries[&0] * &b.entries[&0];
        out.add_packed(0, c);
        return Ok(out);
    }
    let dims = a.dims.clone();
    let bl: Vec<(Idx, &CycloNum)> = b.entries.iter().map(|(kb, c)| (unpack(&dims, *kb), c)).collect();
    let supported = algs.iter().all(|al| al.right_support(0).is_some());
    let mut by_first: FxHashMap<u32, Vec<usize>> = FxHashMap::default();
    for (pos, (ib, _)) in bl.iter().enumerate() {
        by_first.entry(ib[0]).or_default().push(pos);
    }
    let mut per_leg: Vec<Cow<'_, Vector>> = Vec::with_capacity(k);
    for (ka, ca) in &a.entries {
        let ia = unpack(&dims, *ka);
        let mut candidates: Vec<usize> = Vec::new();
        if supported {
            let sup = algs[0].right_support(ia[0] as usize).expect("support");
            for j in sup {
                if let Some(list) = by_first.get(j) {
                    candidates.extend_from_slice(list);
                }
            }
        } else {
            candidates.extend(0..bl.len());
        }
        'pair: for pos in candidates {
            let (ib, cb) = &bl[pos];
            if supported {
                for l in 1..k {
                    let sup = algs[l].right_support(ia[l] as usize).expect("support");
                    if sup.binary_search(&ib[l]).is_err() {
                        continue 'pair;
                    }
                }
            }
            per_leg.clear();
            for l in 0..k {
                let p = algs[l].mul_basis(ia[l] as usize, ib[l] as usize);
                if p.is_zero() {
                    continue 'pair;
                }
                per_leg.push(p);
            }
            let c = ca * *cb;
            accumulate_product(&mut out, &dims, &per_leg, c);
        }
    }
    Ok(out)
}

/// Add c·(v_1 ⊗ … ⊗ v_k) into `out`.
fn accumulate_product(out: &mut SparseTensor, dims: &[u32], vs: &[Cow<'_, Vector>], c: CycloNum) {
    let k = vs.len();
    if vs.iter().all(|v| v.len() == 1) {
        let mut key = 0u64;
        let mut coeff = c;
        for (l, v) in vs.iter().enumerate() {
            let (i, cv) = &v.entries()[0];
            key = key * dims[l] as u64 + *i as u64;
            coeff = &coeff * cv;
        }
        out.add_packed(key, coeff);
        return;
    }
    let mut pos = vec![0usize; k];
    loop {
        let mut key = 0u64;
        let mut coeff = c.clone();
        for l in 0..k {
            let (i, cv) = &vs[l].entries()[pos[l]];
            key = key * dims[l] as u64 + *i as u64;
            coeff = &coeff * cv;
        }
        out.add_packed(key, coeff);
        let mut l = k;
        loop {
            if l == 0 {
                return;
            }
            l -= 1;
            pos[l] += 1;
            if pos[l] < vs[l].len() {
                break;
            }
            pos[l] = 0;
        }
    }
}

/// A linear map from a basis to tensors with fixed output dims.
/// Zero output legs is a functional, one is an endomorphism, two is Δ-like.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    src_dim: usize,
    out_dims: Vec<u32>,
    images: Vec<SparseTensor>,
}

impl LinearMap {
    pub fn new(out_dims: &[u32], images: Vec<SparseTensor>) -> LinearMap {
        for im in &images {
            assert_eq!(im.dims(), out_dims, "image dims");
        }
        LinearMap { src_dim: images.len(), out_dims: out_dims.to_vec(), images }
    }

    pub fn from_vectors(dim: usize, images: Vec<Vector>) -> LinearMap {
        let ims = images.iter().map(|v| SparseTensor::from_vector(v, dim)).collect();
        LinearMap::new(&[dim as u32], ims)
    }

    pub fn from_scalars(values: Vec<CycloNum>) -> LinearMap {
        LinearMap::new(&[], values.into_iter().map(SparseTensor::scalar).collect())
    }

    pub fn identity(dim: usize, order: u32) -> LinearMap {
        LinearMap::from_vectors(dim, (0..dim).map(|i| Vector::basis(i, order)).collect())
    }

    pub fn src_dim(&self) -> usize {
        self.src_dim
    }

    pub fn out_dims(&self) -> &[u32] {
        &self.out_dims
    }

    pub fn image(&self, i: usize) -> &SparseTensor {
        &self.images[i]
    }

    /// Image of a basis vector viewed as a 1-leg element.
    pub fn image_vector(&self, i: usize) -> Vector {
        self.images[i].to_vector()
    }

    pub fn apply_vector(&self, v: &Vector) -> SparseTensor {
        let mut out = SparseTensor::new(&self.out_dims);
        for (i, c) in v.iter() {
            for (k, x) in self.images[i].iter_packed() {
                out.add_packed(k, x * c);
            }
        }
        out
    }
}

/// Replace leg `leg` by the image tensor given by `image`.
pub fn apply_to_leg<F>(t: &SparseTensor, leg: usize, out_dims: &[u32], image: F) -> Result<SparseTensor, TensorError>
where
    F: Fn(usize) -> Arc<SparseTensor>,
{
    let k = t.legs();
    if leg >= k {
        return Err(TensorError::Dimension(format!("leg {leg} of {k}")));
    }
    let mut dims = t.dims[..leg].to_vec();
    dims.extend_from_slice(out_dims);
    dims.extend_from_slice(&t.dims[leg + 1..]);
    let mut out = SparseTensor::new(&dims);
    let tail: u64 = t.dims[leg + 1..].iter().map(|d| *d as u64).product();
    let mid: u64 = out_dims.iter().map(|d| *d as u64).product();
    let mut cache: FxHashMap<u32, Arc<SparseTensor>> = FxHashMap::default();
    for (key, c) in &t.entries {
        let ia = unpack(&t.dims, *key);
        let head = key / (tail * t.dims[leg] as u64);
        let rest = key % tail;
        let im = cache.entry(ia[leg]).or_insert_with(|| image(ia[leg] as usize)).clone();
        if im.dims() != out_dims {
            return Err(TensorError::Dimension("image dims".into()));
        }
        for (mk, mc) in im.iter_packed() {
            let nk = (head * mid + mk) * tail + rest;
            out.add_packed(nk, c * mc);
        }
    }
    Ok(out)
}

pub fn apply_map_to_leg(t: &SparseTensor, leg: usize, f: &LinearMap) -> Result<SparseTensor, TensorError> {
    if leg < t.legs() && f.src_dim() != t.dims[leg] as usize {
        return Err(TensorError::Dimension(format!("map source {} vs leg dim {}", f.src_dim(), t.dims[leg])));
    }
    apply_to_leg(t, leg, f.out_dims(), |i| Arc::new(f.image(i).clone()))
}

/// Output leg l is input leg perm[l].
pub fn permute_legs(t: &SparseTensor, perm: &[usize]) -> SparseTensor {
    let k = t.legs();
    assert_eq!(perm.len(), k, "permutation length");
    let dims: Vec<u32> = perm.iter().map(|&p| t.dims[p]).collect();
    let mut out = SparseTensor::new(&dims);
    for (key, c) in &t.entries {
        let ia = unpack(&t.dims, *key);
        let nb: Vec<u32> = perm.iter().map(|&p| ia[p]).collect();
        out.entries.insert(pack(&dims, &nb), c.clone());
    }
    out
}

/// Inverse in the tensor-product algebra, verified on both sides.
pub fn invert_element(t: &SparseTensor, algs: &[&dyn Algebra]) -> Result<SparseTensor, TensorError> {
    let unit = unit_tensor(algs);
    let candidate = invert_structural(t, algs).map(Ok).unwrap_or_else(|| invert_minpoly(t, algs, &unit))?;
    let left = legwise_multiply(&candidate, t, algs)?;
    let right = legwise_multiply(t, &candidate, algs)?;
    if left != unit || right != unit {
        let residual = left.sub(&unit)?.len() + right.sub(&unit)?.len();
        return Err(TensorError::NotInvertible(format!("inverse check failed, {residual} residual entries")));
    }
    Ok(candidate)
}

fn invert_structural(t: &SparseTensor, algs: &[&dyn Algebra]) -> Option<SparseTensor> {
    let mut total = 1usize;
    let mut systems = Vec::with_capacity(algs.len());
    for a in algs {
        let sys = a.idempotent_system()?;
        total *= sys.len();
        systems.push(sys);
    }
    if t.len() != total {
        return None;
    }
    for (key, _) in t.iter_packed() {
        let ia = unpack(t.dims(), key);
        for (l, sys) in systems.iter().enumerate() {
            if sys.binary_search(&ia[l]).is_err() {
                return None;
            }
        }
    }
    let mut out = SparseTensor::new(t.dims());
    for (key, c) in t.iter_packed() {
        out.entries.insert(key, c.inverse().ok()?);
    }
    Some(out)
}

/// Find the minimal polynomial of t from its powers; t^{-1} follows from it.
fn invert_minpoly(t: &SparseTensor, algs: &[&dyn Algebra], unit: &SparseTensor) -> Result<SparseTensor, TensorError> {
    const MAX_DEGREE: usize = 256;
    let mut ech = Echelon::new(true);
    let mut powers = vec![unit.clone()];
    ech.insert(to_map(unit));
    loop {
        let next = legwise_multiply(powers.last().expect("nonempty"), t, algs)?;
        if let Some(comb) = ech.express(&to_map(&next)) {
            // next = Σ comb_j t^j
            let order = comb.values().next().map(|c| c.order()).or_else(|| t.entries.values().next().map(|c| c.order())).unwrap_or(1);
            let zero = CycloNum::zero(order);
            let c0 = comb.get(&0).cloned().unwrap_or(zero);
            if c0.is_zero() {
                return Err(TensorError::NotInvertible("minimal polynomial has zero constant term".into()));
            }
            // t^d - Σ c_j t^j = 0  ⇒  t^{-1} = (t^{d-1} - Σ_{j≥1} c_j t^{j-1}) / c0
            let d = powers.len();
            let mut acc = powers[d - 1].clone();
            for (j, c) in &comb {
                if *j >= 1 {
                    acc = acc.sub(&powers[*j as usize - 1].scale(c))?;
                }
            }
            let inv_c0 = c0.inverse().expect("nonzero");
            return Ok(acc.scale(&inv_c0));
        }
        ech.insert(to_map(&next));
        powers.push(next);
        if powers.len() > MAX_DEGREE {
            return Err(TensorError::NotInvertible("minimal polynomial degree bound exceeded".into()));
        }
    }
}

fn to_map(t: &SparseTensor) -> BTreeMap<u64, CycloNum> {
    t.iter_packed().map(|(k, c)| (k, c.clone())).collect()
}

/// Incremental row echelon form over sparse rows, optionally tracking how
/// each stored row is combined from the inserted inputs.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    track: bool,
    rows: BTreeMap<u64, (BTreeMap<u64, CycloNum>, BTreeMap<u64, CycloNum>)>,
    inserted: u64,
}

fn axpy(dst: &mut BTreeMap<u64, CycloNum>, src: &BTreeMap<u64, CycloNum>, f: &CycloNum) {
    for (k, v) in src {
        let t = v * f;
        match dst.get_mut(k) {
            Some(x) => {
                *x = &*x - &t;
                if x.is_zero() {
                    dst.remove(k);
                }
            }
            None => {
                dst.insert(*k, -t);
            }
        }
    }
}

impl Echelon {
    pub fn new(track: bool) -> Echelon {
        Echelon { track, rows: BTreeMap::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce v against the stored rows; returns the remainder and the
    /// combination of inputs that was subtracted.
    fn reduce(&self, mut v: BTreeMap<u64, CycloNum>) -> (BTreeMap<u64, CycloNum>, BTreeMap<u64, CycloNum>) {
        let mut comb = BTreeMap::new();
        let mut floor = 0u64;
        loop {
            let next = v.range(floor..).find(|(k, _)| self.rows.contains_key(k)).map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            let (row, rc) = &self.rows[&k];
            axpy(&mut v, row, &c);
            if self.track {
                for (j, x) in rc {
                    let t = x * &c;
                    let e = comb.entry(*j).or_insert_with(|| CycloNum::zero(t.order()));
                    *e = &*e + &t;
                }
            }
            floor = k + 1;
        }
        comb.retain(|_, c: &mut CycloNum| !c.is_zero());
        (v, comb)
    }

    /// Insert the next input row; returns true if it raised the rank.
    pub fn insert(&mut self, v: BTreeMap<u64, CycloNum>) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (rem, comb) = self.reduce(v);
        let Some((&pivot, pc)) = rem.iter().next() else { return false };
        let inv = pc.inverse().expect("nonzero pivot");
        let row: BTreeMap<u64, CycloNum> = rem.iter().map(|(k, c)| (*k, c * &inv)).collect();
        let mut rc = BTreeMap::new();
        if self.track {
            // row = (input - Σ comb) / pivot
            rc.insert(id, inv.clone());
            for (j, c) in comb {
                rc.insert(j, -(&c * &inv));
            }
        }
        self.rows.insert(pivot, (row, rc));
        true
    }

    /// Coefficients (over input ids) expressing v, if v lies in the span.
    /// Requires tracking.
    pub fn express(&self, v: &BTreeMap<u64, CycloNum>) -> Option<BTreeMap<u64, CycloNum>> {
        assert!(self.track, "express needs tracking");
        let (rem, comb) = self.reduce(v.clone());
        if rem.is_empty() {
            Some(comb)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &BTreeMap<u64, CycloNum>) -> bool {
        self.reduce(v.clone()).0.is_empty()
    }
}

/// Rank of a family of sparse vectors.
pub fn rank_of(vs: &[Vector]) -> usize {
    let mut e = Echelon::new(false);
    for v in vs {
        e.insert(v.iter().map(|(i, c)| (i as u64, c.clone())).collect());
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::Constants;
    use proptest::prelude::*;

    /// The group algebra of Z_n in its idempotent basis.
    struct Diag {
        n: usize,
        order: u32,
        support: Vec<Vec<u32>>,
        all: Vec<u32>,
    }

    impl Diag {
        fn new(n: usize, order: u32) -> Diag {
            Diag { n, order, support: (0..n as u32).map(|i| vec![i]).collect(), all: (0..n as u32).collect() }
        }
    }

    impl Algebra for Diag {
        fn dim(&self) -> usize {
            self.n
        }
        fn order(&self) -> u32 {
            self.order
        }
        fn mul_basis(&self, i: usize, j: usize) -> Cow<'_, Vector> {
            Cow::Owned(if i == j { Vector::basis(i, self.order) } else { Vector::zero() })
        }
        fn unit(&self) -> Cow<'_, Vector> {
            Cow::Owned(Vector::from_pairs((0..self.n).map(|i| (i, CycloNum::one(self.order)))))
        }
        fn right_support(&self, i: usize) -> Option<&[u32]> {
            Some(&self.support[i])
        }
        fn idempotent_system(&self) -> Option<&[u32]> {
            Some(&self.all)
        }
    }

    /// k[x]/(x^m) in the monomial basis.
    struct Trunc {
        m: usize,
    }

    impl Algebra for Trunc {
        fn dim(&self) -> usize {
            self.m
        }
        fn order(&self) -> u32 {
            8
        }
        fn mul_basis(&self, i: usize, j: usize) -> Cow<'_, Vector> {
            Cow::Owned(if i + j < self.m { Vector::basis(i + j, 8) } else { Vector::zero() })
        }
        fn unit(&self) -> Cow<'_, Vector> {
            Cow::Owned(Vector::basis(0, 8))
        }
    }

    fn phi21() -> SparseTensor {
        let c = Constants::new(2);
        let mut t = SparseTensor::new(&[2, 2, 2]);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    t.add_at(&[i, j, k], c.o(i as i64 * ((j + k) / 2) as i64));
                }
            }
        }
        t
    }

    #[test]
    fn products_of_units_and_zero() {
        let d = Diag::new(2, 8);
        let u = unit_tensor(&[&d]);
        let uu = tensor_product(&u, &u);
        assert_eq!(uu, unit_tensor(&[&d, &d]));
        assert!(tensor_product(&u, &SparseTensor::new(&[2])).is_zero());
        let v = Vector::from_pairs([(0, CycloNum::one(8)), (1, CycloNum::one(8))]);
        let t = tensor_of_vectors(&[&v, &Vector::basis(0, 8)], &[2, 2]);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn idempotent_orthogonality() {
        let d = Diag::new(3, 18);
        for (i, j, k, l) in [(0, 1, 0, 1), (0, 1, 0, 2), (2, 2, 2, 2)] {
            let a = tensor_of_vectors(&[&Vector::basis(i, 18), &Vector::basis(j, 18)], &[3, 3]);
            let b = tensor_of_vectors(&[&Vector::basis(k, 18), &Vector::basis(l, 18)], &[3, 3]);
            let p = legwise_multiply(&a, &b, &[&d, &d]).unwrap();
            if i == k && j == l {
                assert_eq!(p, a);
            } else {
                assert!(p.is_zero());
            }
        }
    }

    #[test]
    fn structural_inverse_of_phi() {
        let d = Diag::new(2, 8);
        let phi = phi21();
        let inv = invert_element(&phi, &[&d, &d, &d]).unwrap();
        let c = Constants::new(2);
        for i in 0..2u32 {
            for j in 0..2u32 {
                for k in 0..2u32 {
                    let e = c.o(-(i as i64) * ((j + k) / 2) as i64);
                    assert_eq!(inv.get(&[i, j, k]), Some(&e));
                }
            }
        }
        let prod = legwise_multiply(&phi, &inv, &[&d, &d, &d]).unwrap();
        assert_eq!(prod, unit_tensor(&[&d, &d, &d]));
    }

    #[test]
    fn neumann_type_inverse() {
        let a = Trunc { m: 3 };
        let mut t = unit_tensor(&[&a, &a]);
        t.add_at(&[1, 1], CycloNum::one(8));
        let inv = invert_element(&t, &[&a, &a]).unwrap();
        let mut expect = unit_tensor(&[&a, &a]);
        expect.add_at(&[1, 1], CycloNum::from_int(8, -1));
        expect.add_at(&[2, 2], CycloNum::one(8));
        assert_eq!(inv, expect);
        let mut nil = SparseTensor::new(&[3, 3]);
        nil.add_at(&[1, 1], CycloNum::one(8));
        assert!(invert_element(&nil, &[&a, &a]).is_err());
    }

    #[test]
    fn counit_on_middle_leg_of_phi() {
        let phi = phi21();
        let eps = LinearMap::from_scalars(vec![CycloNum::one(8), CycloNum::zero(8)]);
        let r = apply_map_to_leg(&phi, 1, &eps).unwrap();
        let d = Diag::new(2, 8);
        assert_eq!(r, unit_tensor(&[&d, &d]));
        let id = LinearMap::identity(2, 8);
        assert_eq!(apply_map_to_leg(&phi, 2, &id).unwrap(), phi);
    }

    #[test]
    fn coproduct_of_grouplike() {
        // kZ_2 in the group basis {1, g}: Δ(g) = g⊗g
        let g = tensor_of_vectors(&[&Vector::basis(1, 8), &Vector::basis(1, 8)], &[2, 2]);
        let delta = LinearMap::new(
            &[2, 2],
            vec![tensor_of_vectors(&[&Vector::basis(0, 8), &Vector::basis(0, 8)], &[2, 2]), g.clone()],
        );
        let r = apply_map_to_leg(&SparseTensor::from_vector(&Vector::basis(1, 8), 2), 0, &delta).unwrap();
        assert_eq!(r, g);
    }

    #[test]
    fn permutations() {
        let a = tensor_of_vectors(&[&Vector::basis(0, 8), &Vector::basis(2, 8)], &[2, 3]);
        let t = permute_legs(&a, &[1, 0]);
        assert_eq!(t.dims(), &[3, 2]);
        assert_eq!(t.get(&[2, 0]), Some(&CycloNum::one(8)));
        assert_eq!(permute_legs(&t, &[1, 0]), a);
        assert_eq!(permute_legs(&a, &[0, 1]), a);
    }

    #[test]
    fn echelon_rank_and_express() {
        let vs = vec![
            Vector::from_pairs([(0, CycloNum::one(4)), (1, CycloNum::root(4, 1))]),
            Vector::from_pairs([(1, CycloNum::one(4))]),
            Vector::from_pairs([(0, CycloNum::one(4)), (1, CycloNum::one(4) + CycloNum::root(4, 1))]),
        ];
        assert_eq!(rank_of(&vs), 2);
        let mut e = Echelon::new(true);
        for v in &vs[..2] {
            e.insert(v.iter().map(|(i, c)| (i as u64, c.clone())).collect());
        }
        let target: BTreeMap<u64, CycloNum> = vs[2].iter().map(|(i, c)| (i as u64, c.clone())).collect();
        let comb = e.express(&target).unwrap();
        assert_eq!(comb.get(&0), Some(&CycloNum::one(4)));
        assert_eq!(comb.get(&1), Some(&CycloNum::one(4)));
    }

    fn arb_tensor(dims: Vec<u32>) -> impl Strategy<Value = SparseTensor> {
        let d2 = dims.clone();
        prop::collection::vec((prop::collection::vec(0u32..3, dims.len()), -3i64..4, 0i64..8), 0..12).prop_map(move |es| {
            let mut t = SparseTensor::new(&d2);
            for (idx, a, r) in es {
                let idx: Vec<u32> = idx.iter().zip(&d2).map(|(i, d)| i % d).collect();
                t.add_at(&idx, CycloNum::root(8, r).scale_int(a));
            }
            t
        })
    }

    proptest! {
        #[test]
        fn permutation_round_trip(t in arb_tensor(vec![2, 3, 3])) {
            let p = permute_legs(&t, &[2, 0, 1]);
            prop_assert_eq!(permute_legs(&p, &[1, 2, 0]), t);
        }

        #[test]
        fn legwise_associative(a in arb_tensor(vec![3, 3]), b in arb_tensor(vec![3, 3]), c in arb_tensor(vec![3, 3])) {
            let al = Trunc { m: 3 };
            let algs: [&dyn Algebra; 2] = [&al, &al];
            let l = legwise_multiply(&legwise_multiply(&a, &b, &algs).unwrap(), &c, &algs).unwrap();
            let r = legwise_multiply(&a, &legwise_multiply(&b, &c, &algs).unwrap(), &algs).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn disjoint_legs_commute(t in arb_tensor(vec![3, 2, 3])) {
            let f = LinearMap::from_vectors(3, vec![Vector::basis(1, 8), Vector::basis(2, 8).scale(&CycloNum::root(8, 3)), Vector::zero()]);
            let g = LinearMap::new(&[3, 3], (0..3).map(|i| tensor_of_vectors(&[&Vector::basis(i, 8), &Vector::basis(2 - i, 8)], &[3, 3])).collect());
            let a = apply_map_to_leg(&apply_map_to_leg(&t, 0, &f).unwrap(), 2, &g).unwrap();
            let b = apply_map_to_leg(&apply_map_to_leg(&t, 2, &g).unwrap(), 0, &f).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
