//! Enumeration of finite groups `G(O_r)`, congruence kernels, generators and
//! conjugacy classes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::mat::{Mat, MatAlgebra};
use super::spec::{Family, GroupSpec};
use crate::error::{budget_check, invalid, Result};
use crate::localring::unit_group_basis;
use crate::settings::Settings;

/// Dense index tables are used up to this many candidate matrices.
const DENSE_INDEX_LIMIT: u64 = 1 << 24;

enum Index {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

/// An explicit finite matrix group with constant-time element lookup.
pub struct FiniteGroup {
    pub alg: MatAlgebra,
    pub elements: Vec<Mat>,
    index: Index,
}

impl FiniteGroup {
    pub fn new(alg: MatAlgebra, elements: Vec<Mat>) -> Self {
        let index = match alg.count() {
            Some(c) if c <= DENSE_INDEX_LIMIT => {
                let mut t = vec![u32::MAX; c as usize];
                for (i, m) in elements.iter().enumerate() {
                    t[alg.key(m) as usize] = i as u32;
                }
                Index::Dense(t)
            }
            _ => Index::Sparse(
                elements
                    .iter()
                    .enumerate()
                    .map(|(i, m)| (alg.key(m), i as u32))
                    .collect(),
            ),
        };
        FiniteGroup {
            alg,
            elements,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        let k = self.alg.key(m);
        match &self.index {
            Index::Dense(t) => t
                .get(k as usize)
                .copied()
                .filter(|&i| i != u32::MAX)
                .map(|i| i as usize),
            Index::Sparse(h) => h.get(&k).map(|&i| i as usize),
        }
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.index_of(m).is_some()
    }
}

/// All elements of `G(O_s)` in lexicographic order, by filtering every matrix.
pub fn enumerate_group(spec: &GroupSpec, level: u32, st: &Settings) -> Result<FiniteGroup> {
    let alg = spec.algebra(level)?;
    let candidates = alg.count().map_or(u128::MAX, |c| c as u128);
    budget_check(&format!("{}(O_{level}) candidates", spec.name()), candidates, st.budget)?;
    let form_check = |g: &Mat| spec.is_member(&alg, g);
    let elements: Vec<Mat> = alg.all().filter(form_check).collect();
    Ok(FiniteGroup::new(alg, elements))
}

/// `|GL_n(O)|` for `O = GR(p^s, d)`.
pub fn gl_order(n: usize, p: u64, s: u32, d: u32) -> u128 {
    let q = (p as u128).pow(d);
    let mut ord: u128 = 1;
    for i in 0..n {
        ord *= q.pow(n as u32) - q.pow(i as u32);
    }
    ord * q.pow((n * n) as u32 * (s - 1))
}

/// Generators of `GL_n(O_s)`: elementary transvections `1 + omega^t E_ij`
/// and `diag(u, 1, ..., 1)` for a basis `u` of the unit group.
pub fn generators(spec: &GroupSpec, level: u32) -> Result<Vec<Mat>> {
    if spec.family != Family::GL {
        return invalid("explicit generators are only implemented for GL_n");
    }
    let alg = spec.algebra(level)?;
    let n = spec.n;
    let d = alg.ring.d() as usize;
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for t in 0..d {
                let mut c = vec![0; d];
                c[t] = 1;
                let w = alg.ring.from_coeffs(&c);
                gens.push(alg.add(&alg.identity(), &alg.unit(i, j, w)));
            }
        }
    }
    for (u, _) in unit_group_basis(&alg.ring)? {
        let mut g = alg.identity();
        g.set(0, 0, u);
        gens.push(g);
    }
    Ok(gens)
}

/// Size of the subgroup generated by `gens` inside `group`.
pub fn generated_order(group: &FiniteGroup, gens: &[Mat]) -> usize {
    let alg = &group.alg;
    let mut seen = vec![false; group.len()];
    let id = group.index_of(&alg.identity()).expect("identity in group");
    seen[id] = true;
    let mut queue = vec![id];
    let mut head = 0;
    while head < queue.len() {
        let x = group.elements[queue[head]].clone();
        head += 1;
        for g in gens {
            let i = group.index_of(&alg.mul(&x, g)).expect("group closed under products");
            if !seen[i] {
                seen[i] = true;
                queue.push(i);
            }
        }
    }
    queue.len()
}

/// A generating set of an enumerated `G(O_s)`: the explicit generators for
/// GL, otherwise random elements added until they generate the whole group.
pub fn generating_set(spec: &GroupSpec, group: &FiniteGroup, st: &Settings) -> Result<Vec<Mat>> {
    if spec.family == Family::GL {
        return generators(spec, group.alg.ring.r());
    }
    let mut rng = st.rng_for(11);
    let mut gens: Vec<Mat> = Vec::new();
    while generated_order(group, &gens) < group.len() {
        if gens.len() > 64 {
            return crate::error::check_failed("random elements failed to generate the group");
        }
        gens.push(group.elements[rand::Rng::random_range(&mut rng, 0..group.len())].clone());
    }
    Ok(gens)
}

/// `K_j(O_r)`: elements `1 + p^j Y` of `G(O_r)`.
pub fn congruence_kernel(spec: &GroupSpec, r: u32, j: u32, st: &Settings) -> Result<Vec<Mat>> {
    if j == 0 || j > r {
        return invalid(format!("kernel level {j} outside 1..={r}"));
    }
    let alg = spec.algebra(r)?;
    if j == r {
        return Ok(vec![alg.identity()]);
    }
    let y_alg = spec.algebra(r - j)?;
    let candidates = y_alg.count().map_or(u128::MAX, |c| c as u128);
    budget_check(&format!("K_{j}(O_{r}) candidates"), candidates, st.budget)?;
    Ok(y_alg
        .all()
        .map(|y| alg.add(&alg.identity(), &alg.scale_p(j, &alg.lift(&y, &y_alg))))
        .filter(|g| spec.is_member(&alg, g))
        .collect())
}

/// Conjugacy-class partition of a finite group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassData {
    /// Class id of each element (indexed like `FiniteGroup::elements`).
    pub class_of: Vec<u32>,
    /// Index of the lexicographically least element of each class.
    pub reps: Vec<usize>,
    pub sizes: Vec<u64>,
}

impl ClassData {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// Classes by closure under conjugation by a generating set.
pub fn conjugacy_classes(group: &FiniteGroup, gens: &[Mat]) -> ClassData {
    let alg = &group.alg;
    let gens_inv: Vec<(Mat, Mat)> = gens
        .iter()
        .map(|g| (g.clone(), alg.inv(g).expect("generators are invertible")))
        .collect();
    let n = group.len();
    let mut class_of = vec![u32::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for start in 0..n {
        if class_of[start] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        class_of[start] = c;
        reps.push(start);
        queue.clear();
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let x = &group.elements[queue[head]];
            head += 1;
            for (g, gi) in &gens_inv {
                let y = alg.conj(g, x, gi);
                let iy = group.index_of(&y).expect("group closed under conjugation");
                if class_of[iy] == u32::MAX {
                    class_of[iy] = c;
                    queue.push(iy);
                }
            }
        }
        sizes.push(queue.len() as u64);
    }
    ClassData {
        class_of,
        reps,
        sizes,
    }
}

/// Parses the matrix line format: one square matrix per line, row-major
/// integers separated by spaces or commas. Blank lines and `#` comments are
/// skipped. Returns `(line number, n, entries)` per matrix.
pub fn parse_matrix_lines(text: &str) -> Result<Vec<(usize, usize, Vec<i64>)>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut entries = Vec::new();
        for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            let v: i64 = tok.parse().map_err(|_| {
                crate::Error::InvalidParameter(format!("line {line_no}: bad integer {tok:?}"))
            })?;
            entries.push(v);
        }
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != entries.len() {
            return invalid(format!(
                "line {line_no}: {} entries is not a square matrix",
                entries.len()
            ));
        }
        out.push((line_no, n, entries));
    }
    Ok(out)
}
