use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{budget_check, invalid, Result};
use crate::groupscheme::{
    congruence_kernel, conjugacy_classes, enumerate_group, generating_set, ClassData, FiniteGroup,
    GroupSpec, Mat,
};
use crate::orbitchar::BetaDatum;
use crate::settings::Settings;
use crate::weilrep::SNAP_TOL;

/// Largest class count for which the oracle runs.
pub const ORACLE_CLASS_LIMIT: usize = 5_000;

/// `G(O_r)` with its conjugacy classes.
pub struct ClassifiedGroup {
    pub group: FiniteGroup,
    pub classes: ClassData,
}

impl ClassifiedGroup {
    pub fn new(spec: &GroupSpec, r: u32, st: &Settings) -> Result<Self> {
        let group = enumerate_group(spec, r, st)?;
        let gens = generating_set(spec, &group, st)?;
        let classes = conjugacy_classes(&group, &gens);
        Ok(ClassifiedGroup { group, classes })
    }

    pub fn order(&self) -> usize {
        self.group.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.count()
    }

    pub fn class_of(&self, m: &Mat) -> Option<usize> {
        self.group
            .index_of(m)
            .map(|i| self.classes.class_of[i] as usize)
    }

    /// `<a, b> = |G|^{-1} sum_C |C| a(C) conj(b(C))`.
    pub fn inner(&self, a: &ClassFunction, b: &ClassFunction) -> Complex64 {
        let s: Complex64 = a
            .values
            .iter()
            .zip(&b.values)
            .zip(&self.classes.sizes)
            .map(|((x, y), &n)| x * y.conj() * n as f64)
            .sum();
        s / self.order() as f64
    }
}

/// A class function of `G(O_r)`, one value per conjugacy class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassFunction {
    pub values: Vec<Complex64>,
}

impl ClassFunction {
    /// The value at the identity class.
    pub fn degree(&self, g: &ClassifiedGroup) -> Complex64 {
        let id = g.group.alg.identity();
        self.values[g.class_of(&id).expect("identity in G")]
    }
}

/// `Ind_H^G chi` from the values of `chi` on the elements of `H`:
/// `(Ind chi)(x) = |G| / (|H| |C_x|) sum_{h in H cap C_x} chi(h)`.
pub fn induce_character(
    g: &ClassifiedGroup,
    h_order: usize,
    values: impl IntoIterator<Item = (Mat, Complex64)>,
) -> Result<ClassFunction> {
    let mut sums = vec![Complex64::new(0.0, 0.0); g.class_count()];
    let mut seen = 0;
    for (h, v) in values {
        let c = g
            .class_of(&h)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("{h:?} is not in G")))?;
        sums[c] += v;
        seen += 1;
    }
    if seen != h_order {
        return invalid(format!("expected {h_order} values on H, got {seen}"));
    }
    Ok(scale_sums(g, h_order, sums))
}

/// The same with class ids of the `H` elements precomputed.
pub fn induce_from_classes(
    g: &ClassifiedGroup,
    h_order: usize,
    class_ids: &[usize],
    values: impl IntoIterator<Item = Complex64>,
) -> ClassFunction {
    let mut sums = vec![Complex64::new(0.0, 0.0); g.class_count()];
    for (&c, v) in class_ids.iter().zip(values) {
        sums[c] += v;
    }
    scale_sums(g, h_order, sums)
}

fn scale_sums(g: &ClassifiedGroup, h_order: usize, sums: Vec<Complex64>) -> ClassFunction {
    let values = sums
        .into_iter()
        .zip(&g.classes.sizes)
        .map(|(s, &n)| s * (g.order() as f64 / (h_order as f64 * n as f64)))
        .collect();
    ClassFunction { values }
}

/// Nearest integer and the distance to it.
fn snap(z: Complex64) -> (i64, f64) {
    let k = z.re.round();
    (k as i64, (z - Complex64::new(k, 0.0)).norm())
}

/// Character-theoretic certification of a list of induced characters.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub group_order: usize,
    pub class_count: usize,
    /// `[G : K_l]`.
    pub kernel_index: usize,
    pub characters: usize,
    pub degrees: Vec<i64>,
    /// Characters with `<chi, chi> = 1`.
    pub irreducible: usize,
    pub orthogonal: bool,
    /// `<Res_{K_l} chi, psi_beta>` for each `chi`, computed on `K_l`.
    pub restriction_multiplicities: Vec<i64>,
    /// The same through `<chi, Ind psi_beta>` on `G` (Frobenius reciprocity).
    pub reciprocity_agrees: bool,
    /// `sum <chi, Ind psi_beta> deg chi = [G : K_l]`.
    pub complete_by_degree: bool,
    /// `sum <chi, Ind psi_beta>^2 = <Ind psi_beta, Ind psi_beta>`.
    pub complete_by_norm: bool,
    pub sum_of_squared_degrees: i64,
    pub max_snap_distance: f64,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.irreducible == self.characters
            && self.orthogonal
            && self.restriction_multiplicities.iter().all(|&m| m > 0)
            && self.reciprocity_agrees
            && self.complete_by_degree
            && self.complete_by_norm
            && self.max_snap_distance <= SNAP_TOL
    }
}

/// `Ind_{K_l}^G psi_beta` as a class function.
pub fn induced_psi_beta(g: &ClassifiedGroup, datum: &BetaDatum, st: &Settings) -> Result<(ClassFunction, usize)> {
    let kernel = congruence_kernel(&datum.spec, datum.r, datum.l, st)?;
    let n = kernel.len();
    let values = kernel
        .into_iter()
        .map(|k| {
            let v = datum.psi(&k)?.to_complex();
            Ok((k, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((induce_character(g, n, values)?, n))
}

/// Irreducibility, orthogonality, restriction to `psi_beta` and completeness
/// of the characters against `Ind_{K_l}^G psi_beta`.
pub fn oracle_certify(
    g: &ClassifiedGroup,
    datum: &BetaDatum,
    chars: &[ClassFunction],
    st: &Settings,
) -> Result<OracleReport> {
    budget_check("oracle group", g.order() as u128, st.budget)?;
    budget_check("oracle classes", g.class_count() as u128, ORACLE_CLASS_LIMIT as u64)?;
    let mut max_snap: f64 = 0.0;
    let mut snapped = |z: Complex64| {
        let (k, d) = snap(z);
        max_snap = max_snap.max(d);
        k
    };
    let degrees: Vec<i64> = chars.iter().map(|c| snapped(c.degree(g))).collect();
    let mut irreducible = 0;
    let mut orthogonal = true;
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate().skip(i) {
            let v = snapped(g.inner(a, b));
            if i == j {
                irreducible += usize::from(v == 1);
            } else {
                orthogonal &= v == 0;
            }
        }
    }
    let (ind_psi, kernel_order) = induced_psi_beta(g, datum, st)?;
    let kernel = congruence_kernel(&datum.spec, datum.r, datum.l, st)?;
    let mut restriction_multiplicities = Vec::with_capacity(chars.len());
    let mut frobenius = Vec::with_capacity(chars.len());
    for c in chars {
        let mut s = Complex64::new(0.0, 0.0);
        for k in &kernel {
            let cls = g.class_of(k).expect("K_l inside G");
            s += c.values[cls] * datum.psi(k)?.to_complex().conj();
        }
        restriction_multiplicities.push(snapped(s / kernel_order as f64));
        frobenius.push(snapped(g.inner(c, &ind_psi)));
    }
    let kernel_index = g.order() / kernel_order;
    let by_degree: i64 = frobenius.iter().zip(&degrees).map(|(m, d)| m * d).sum();
    let by_norm: i64 = frobenius.iter().map(|m| m * m).sum();
    let ind_norm = snapped(g.inner(&ind_psi, &ind_psi));
    Ok(OracleReport {
        group_order: g.order(),
        class_count: g.class_count(),
        kernel_index,
        characters: chars.len(),
        sum_of_squared_degrees: degrees.iter().map(|d| d * d).sum(),
        degrees,
        irreducible,
        orthogonal,
        reciprocity_agrees: restriction_multiplicities == frobenius,
        restriction_multiplicities,
        complete_by_degree: by_degree == kernel_index as i64,
        complete_by_norm: by_norm == ind_norm,
        max_snap_distance: max_snap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inducing_the_trivial_character_of_g_gives_itself() {
        let st = Settings::default();
        let g = ClassifiedGroup::new(&GroupSpec::gl(2, 3).unwrap(), 1, &st).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let chi = induce_character(&g, g.order(), g.group.elements.iter().map(|m| (m.clone(), one))).unwrap();
        assert!(chi.values.iter().all(|v| (v - one).norm() < 1e-12));
        assert!((g.inner(&chi, &chi) - one).norm() < 1e-12);
    }

    #[test]
    fn gl2_f3_has_eight_classes_and_regular_character_norm() {
        let st = Settings::default();
        let g = ClassifiedGroup::new(&GroupSpec::gl(2, 3).unwrap(), 1, &st).unwrap();
        assert_eq!(g.order(), 48);
        assert_eq!(g.class_count(), 8);
        let id = g.group.alg.identity();
        let reg = induce_character(&g, 1, [(id, Complex64::new(1.0, 0.0))]).unwrap();
        // <reg, reg> = |G|.
        assert!((g.inner(&reg, &reg).re - 48.0).abs() < 1e-9);
    }
}
