use std::collections::HashSet;

use serde::Serialize;

use super::beta::BetaDatum;
use crate::error::{check_failed, Result};
use crate::groupscheme::{congruence_kernel, FiniteGroup, Mat};
use crate::settings::Settings;

/// Check that `G(O_r, beta) = G_beta(O_r) K_{l'}(O_r)`.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizerCertificate {
    pub centralizer_order: usize,
    pub kernel_order: usize,
    pub intersection_order: usize,
    /// `|C| |K| / |C cap K|`.
    pub product_order: usize,
    pub order: usize,
    /// Every stabilizer element reduces mod `p^{l'}` into the image of `G_beta(O_r)`.
    pub factorization_ok: bool,
}

#[derive(Clone, Debug)]
pub struct Stabilizer {
    /// Elements in lexicographic order.
    pub elements: Vec<Mat>,
    pub certificate: StabilizerCertificate,
}

impl BetaDatum {
    /// `Ad(g) beta = beta mod p^{l'}`, tested as `g beta = beta g` at level `l'`.
    pub fn stabilizes(&self, g: &Mat) -> bool {
        let (a, b) = self.beta_at(self.l_prime).expect("l' >= 1");
        let g = self.alg.reduce(g, &a);
        a.mul(&g, &b) == a.mul(&b, &g)
    }
}

/// `G(O_r, beta)` as the product `G_beta(O_r) K_{l'}(O_r)`, with the certificate
/// comparing against the stabilizer filter of the full group when supplied.
pub fn stabilizer(
    datum: &BetaDatum,
    group: Option<&FiniteGroup>,
    st: &Settings,
) -> Result<Stabilizer> {
    let alg = &datum.alg;
    let cent = datum.centralizer_group(datum.r, st)?;
    let kernel = congruence_kernel(&datum.spec, datum.r, datum.l_prime, st)?;
    let kernel_keys: HashSet<u64> = kernel.iter().map(|k| alg.key(k)).collect();
    let intersection = cent
        .elements
        .iter()
        .filter(|c| kernel_keys.contains(&alg.key(c)))
        .count();

    // Coset representatives of C / (C cap K), then the product set.
    let (low, _) = datum.beta_at(datum.l_prime)?;
    let mut residues = HashSet::new();
    let mut reps = Vec::new();
    for c in &cent.elements {
        if residues.insert(low.key(&alg.reduce(c, &low))) {
            reps.push(c);
        }
    }
    let mut elements: Vec<Mat> = Vec::with_capacity(reps.len() * kernel.len());
    for c in &reps {
        for k in &kernel {
            elements.push(alg.mul(c, k));
        }
    }
    elements.sort_by_key(|g| alg.key(g));
    elements.dedup();

    let mut factorization_ok = elements.iter().all(|g| datum.stabilizes(g));
    if let Some(group) = group {
        let mut count = 0;
        for g in &group.elements {
            if datum.stabilizes(g) {
                count += 1;
                factorization_ok &= residues.contains(&low.key(&alg.reduce(g, &low)));
            }
        }
        factorization_ok &= count == elements.len();
    }
    let product_order = cent.len() * kernel.len() / intersection;
    let certificate = StabilizerCertificate {
        centralizer_order: cent.len(),
        kernel_order: kernel.len(),
        intersection_order: intersection,
        product_order,
        order: elements.len(),
        factorization_ok: factorization_ok && product_order == elements.len(),
    };
    if !certificate.factorization_ok {
        return check_failed(format!(
            "stabilizer does not factor as G_beta K_l': {certificate:?}"
        ));
    }
    Ok(Stabilizer {
        elements,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::{enumerate_group, GroupSpec};

    #[test]
    fn irreducible_beta_stabilizer_has_648_elements() {
        let st = Settings::default();
        let spec = GroupSpec::gl(2, 3).unwrap();
        let g = enumerate_group(&spec, 2, &st).unwrap();
        let b = BetaDatum::from_ints(&spec, 2, &[&[0, 1], &[1, 1]]).unwrap();
        let s = stabilizer(&b, Some(&g), &st).unwrap();
        assert_eq!(s.elements.len(), 648);
        assert_eq!(s.certificate.intersection_order, 9);
    }

    #[test]
    fn central_beta_stabilizes_everything() {
        let st = Settings::default();
        let spec = GroupSpec::gl(2, 3).unwrap();
        let g = enumerate_group(&spec, 2, &st).unwrap();
        let b = BetaDatum::from_ints(&spec, 2, &[&[2, 0], &[0, 2]]).unwrap();
        assert!(g.elements.iter().all(|x| b.stabilizes(x)));
    }

    #[test]
    fn stabilizer_is_conjugation_covariant() {
        let st = Settings::default();
        let spec = GroupSpec::gl(2, 3).unwrap();
        let g = enumerate_group(&spec, 2, &st).unwrap();
        let alg = &g.alg;
        let b = BetaDatum::from_ints(&spec, 2, &[&[0, 1], &[1, 1]]).unwrap();
        let x = alg.from_ints(&[&[1, 2], &[1, 0]]);
        let xi = alg.inv(&x).unwrap();
        let b2 = BetaDatum::new(&spec, 2, alg, &alg.conj(&x, &b.beta, &xi)).unwrap();
        let s1 = stabilizer(&b, Some(&g), &st).unwrap();
        let s2 = stabilizer(&b2, Some(&g), &st).unwrap();
        let mut conj: Vec<u64> = s1.elements.iter().map(|s| alg.key(&alg.conj(&x, s, &xi))).collect();
        conj.sort();
        let keys: Vec<u64> = s2.elements.iter().map(|s| alg.key(s)).collect();
        assert_eq!(conj, keys);
    }

    #[test]
    fn psi_conjugation_rule_and_injectivity() {
        // psi_beta(g^-1 h g) = psi_{Ad(g) beta}(h) over all g and h in K_1(O_2);
        // distinct beta mod p give distinct characters.
        let st = Settings::default();
        let spec = GroupSpec::gl(2, 3).unwrap();
        let g = enumerate_group(&spec, 2, &st).unwrap();
        let alg = &g.alg;
        let k = congruence_kernel(&spec, 2, 1, &st).unwrap();
        let b = BetaDatum::from_ints(&spec, 2, &[&[0, 1], &[1, 1]]).unwrap();
        for x in g.elements.iter().step_by(7) {
            let xi = alg.inv(x).unwrap();
            let bx = BetaDatum::new(&spec, 2, alg, &alg.conj(x, &b.beta, &xi)).unwrap();
            for h in &k {
                assert_eq!(b.psi(&alg.conj(&xi, h, x)).unwrap(), bx.psi(h).unwrap());
            }
        }
        let res = spec.algebra(1).unwrap();
        let mut tables = HashSet::new();
        for beta in res.all() {
            let d = BetaDatum::new(&spec, 2, &res, &beta).unwrap();
            let t: Vec<_> = k.iter().map(|h| d.psi(h).unwrap()).collect();
            assert!(tables.insert(t));
        }
        assert_eq!(tables.len(), 81);
    }
}
