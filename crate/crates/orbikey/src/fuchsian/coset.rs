//! Coset representatives of the congruence subgroup inside the full modular
//! group, indexed by the projective line over the residue ring at the level.

use super::{ext_gcd, gcd, Gamma0, GroupElement};

/// Canonical label of a projective point (c : d) over Z/n: the
/// lexicographically smallest unit multiple.
fn canonical_class(n: i64, c: i64, d: i64) -> (i64, i64) {
    let mut best = (i64::MAX, i64::MAX);
    for lambda in 1..n.max(2) {
        if gcd(lambda, n) != 1 {
            continue;
        }
        let cc = (lambda * c).rem_euclid(n);
        let dd = (lambda * d).rem_euclid(n);
        if (cc, dd) < best {
            best = (cc, dd);
        }
    }
    if n == 1 {
        (0, 0)
    } else {
        best
    }
}

/// Right-coset representatives: the group decomposes as the disjoint union
/// of (subgroup) * rep over these matrices, one per projective point. The
/// list is deterministic, identity first.
pub fn coset_representatives(group: &Gamma0) -> Vec<GroupElement> {
    let n = group.level as i64;
    if n == 1 {
        return vec![GroupElement::IDENTITY];
    }
    let mut classes: Vec<(i64, i64)> = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if gcd(gcd(c, d), n) != 1 {
                continue;
            }
            let canon = canonical_class(n, c, d);
            if canon == (c, d) {
                classes.push((c, d));
            }
        }
    }
    classes.sort();
    let mut reps: Vec<GroupElement> = classes
        .iter()
        .map(|&(c, d)| lift_to_matrix(n, c, d))
        .collect();
    // Put the subgroup's own coset (bottom row (0, 1)) first.
    if let Some(pos) = reps.iter().position(|g| g.c.rem_euclid(n) == 0) {
        reps.swap(0, pos);
    }
    debug_assert_eq!(reps.len() as u32, group.index);
    reps
}

/// Lift a projective point to an integral unimodular matrix with congruent
/// bottom row.
fn lift_to_matrix(n: i64, c: i64, d: i64) -> GroupElement {
    for k in 0..=n {
        for (cc, dd) in [(c, d + k * n), (c + n, d + k * n)] {
            if cc == 0 && dd == 0 {
                continue;
            }
            if gcd(cc, dd) == 1 {
                let (g, x, y) = ext_gcd(dd, cc);
                debug_assert_eq!(g, 1);
                return GroupElement::new(x, -y, cc, dd);
            }
        }
    }
    unreachable!("every projective point lifts to a coprime pair");
}

/// Index of the coset containing an arbitrary group element: the unique i
/// with element * reps[i]^{-1} in the subgroup.
pub fn coset_index(group: &Gamma0, reps: &[GroupElement], g: &GroupElement) -> usize {
    for (i, rep) in reps.iter().enumerate() {
        if group.contains(&g.compose(&rep.inverse())) {
            return i;
        }
    }
    unreachable!("cosets cover the full group");
}
