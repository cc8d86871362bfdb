//! Small matrix-group instances used by the synthetic verification
//! batteries and the property suites.

use crate::ff::FieldMatrix;
use crate::group::{AffineElement, ConcreteGroup, Subgroup};

fn perm_matrix(sigma: &[usize], p: u64) -> AffineElement {
    let n = sigma.len();
    let mut m = FieldMatrix::zero(n, p);
    for (i, &si) in sigma.iter().enumerate() {
        m.set(si, i, 1);
    }
    AffineElement::pure_matrix(&m)
}

/// Dihedral group of order 12 in GL_2(F_13): 4 is a primitive sixth root of
/// unity mod 13.
pub fn dihedral12() -> ConcreteGroup {
    let r = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[4, 0], &[0, 10]], 13));
    let s = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[0, 1], &[1, 0]], 13));
    ConcreteGroup::dense_from_generators(&[r, s], 100).expect("order 12")
}

/// The order-3 normal (rotation-square) subgroup of [`dihedral12`].
pub fn dihedral12_c3(d12: &ConcreteGroup) -> Subgroup {
    let r2 = d12
        .dense_set()
        .expect("dense")
        .iter()
        .find(|g| g.order() == 3)
        .expect("order-3 rotation")
        .clone();
    Subgroup::generate(&[r2], 100).expect("order 3")
}

/// Dihedral group of order 8 in GL_2(F_5).
pub fn dihedral8() -> ConcreteGroup {
    let r = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[0, -1], &[1, 0]], 5));
    let s = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[1, 0], &[0, -1]], 5));
    ConcreteGroup::dense_from_generators(&[r, s], 100).expect("order 8")
}

/// Quaternion group of order 8 in GL_2(F_13): i and j with i² = j² = -1,
/// ij = -ji (3² + 4² ≡ -1 mod 13).
pub fn quaternion8() -> ConcreteGroup {
    let i = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[0, -1], &[1, 0]], 13));
    let j = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[3, 4], &[4, -3]], 13));
    ConcreteGroup::dense_from_generators(&[i, j], 100).expect("order 8")
}

/// Center {±1} of a 2-dimensional matrix group containing -I.
pub fn center_of_order2(g: &ConcreteGroup) -> Subgroup {
    let p = g.modulus();
    let minus_id = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[-1, 0], &[0, -1]], p));
    assert!(g.contains(&minus_id));
    Subgroup::generate(&[minus_id], 10).expect("order 2")
}

/// Symmetric group on four points as permutation matrices over F_5.
pub fn symmetric4() -> ConcreteGroup {
    let t = perm_matrix(&[1, 0, 2, 3], 5); // (0 1)
    let c = perm_matrix(&[1, 2, 3, 0], 5); // (0 1 2 3)
    ConcreteGroup::dense_from_generators(&[t, c], 100).expect("order 24")
}

/// Alternating group on four points as permutation matrices over F_5.
pub fn alternating4() -> ConcreteGroup {
    let c3 = perm_matrix(&[1, 2, 0, 3], 5); // (0 1 2)
    let vv = perm_matrix(&[1, 0, 3, 2], 5); // (0 1)(2 3)
    ConcreteGroup::dense_from_generators(&[c3, vv], 100).expect("order 12")
}

/// The Klein four-group of double transpositions, normal in S4 and A4.
pub fn klein_in_symmetric4(g: &ConcreteGroup) -> Subgroup {
    let p = g.modulus();
    let a = perm_matrix(&[1, 0, 3, 2], p); // (0 1)(2 3)
    let b = perm_matrix(&[2, 3, 0, 1], p); // (0 2)(1 3)
    assert!(g.contains(&a) && g.contains(&b));
    Subgroup::generate(&[a, b], 10).expect("order 4")
}

/// `F_7² ⋊ D12` with the dihedral group acting linearly (3 has order 6
/// mod 7); a split group whose translation module is a π'-group for
/// π = {2, 3}.
pub fn split_dihedral_over_f7() -> ConcreteGroup {
    let r = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[3, 0], &[0, 5]], 7));
    let s = AffineElement::pure_matrix(&FieldMatrix::from_rows(&[&[0, 1], &[1, 0]], 7));
    ConcreteGroup::split_from_complement(&[r, s], 100).expect("order 588")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_orders() {
        assert_eq!(dihedral12().order(), 12);
        assert_eq!(dihedral8().order(), 8);
        assert_eq!(quaternion8().order(), 8);
        assert_eq!(symmetric4().order(), 24);
        assert_eq!(alternating4().order(), 12);
        assert_eq!(split_dihedral_over_f7().order(), 588);
    }

    #[test]
    fn quaternion_has_unique_involution() {
        let q8 = quaternion8();
        let involutions = q8
            .dense_set()
            .unwrap()
            .iter()
            .filter(|g| g.order() == 2)
            .count();
        assert_eq!(involutions, 1);
        assert_eq!(center_of_order2(&q8).order(), 2);
    }

    #[test]
    fn klein_is_normal_in_s4_and_a4() {
        let s4 = symmetric4();
        let v4 = klein_in_symmetric4(&s4);
        assert_eq!(v4.order(), 4);
        assert!(s4.is_normal(&v4));
        let a4 = alternating4();
        let v4a = klein_in_symmetric4(&a4);
        assert!(a4.is_normal(&v4a));
    }
}
