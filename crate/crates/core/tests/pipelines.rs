use p1gw::arith::{EpsLaurent, Rat};
use p1gw::gw::{free_energy, invariant, n_point_invariant_in, GenusDegreeTable};
use p1gw::series::{miwa_to_symmetric, symmetric_to_miwa};
use p1gw::zmodel::{zmodel_expansion, zmodel_log_in_times};
use proptest::prelude::*;

#[test]
fn log_z_equals_free_energy_through_degree_four() {
    for d in 1..=4 {
        let z = zmodel_log_in_times(d as usize + 1, d).unwrap();
        let f = free_energy(d).unwrap();
        assert!(z.diff(&f).is_empty(), "D = {d}: {:?}", z.diff(&f));
    }
}

#[test]
fn larger_n_does_not_change_degree_two() {
    let base = zmodel_log_in_times(3, 2).unwrap();
    for n in 4..=5 {
        assert_eq!(zmodel_log_in_times(n, 2).unwrap(), base, "N = {n}");
    }
}

#[test]
fn quotient_is_symmetric_with_unit_constant() {
    for (n, d) in [(2, 1), (3, 2), (4, 2), (4, 3)] {
        let z = zmodel_expansion(n, d).unwrap();
        z.quotient().check_symmetric().unwrap();
        assert!(z.coeff(&[]).unwrap().is_one());
    }
}

#[test]
fn miwa_round_trip_of_log_z() {
    let m = zmodel_log_in_times(4, 3).unwrap();
    let sym = miwa_to_symmetric(&m, 4).unwrap();
    assert_eq!(symmetric_to_miwa(&sym, 4, 3, true).unwrap(), m);
}

#[test]
fn genus_zero_degree_one_points() {
    // <tau_0^n>_{0,1} = 1 for n >= 1 apart from the genus-one term of <tau_0>
    for n in 2..=5 {
        let ks = vec![0; n];
        let t = GenusDegreeTable::decode(&ks, &invariant(&ks).unwrap().value).unwrap();
        assert_eq!(t.get(0, 1), Some(&Rat::one()), "n = {n}");
        assert_eq!(t.entries.len(), 1);
    }
}

#[test]
fn regions_agree_for_three_points() {
    let ks = [0, 1, 3];
    let base = invariant(&ks).unwrap().value;
    for region in [[2, 0, 1], [1, 2, 0], [2, 1, 0]] {
        assert_eq!(n_point_invariant_in(&ks, &region).unwrap().value, base, "{region:?}");
    }
}

/// Divisor equation for the point class insertion `tau_0`:
/// `<tau_0 prod tau_{k_i}>_{g,d} = d <prod tau_{k_i}>_{g,d} + sum_i <... tau_{k_i - 1} ...>_{g,d}`.
fn divisor_rhs(ks: &[u32]) -> GenusDegreeTable {
    let mut out = GenusDegreeTable::default();
    let base = GenusDegreeTable::decode(ks, &invariant(ks).unwrap().value).unwrap();
    for (&(g, d), c) in &base.entries {
        let e = out.entries.entry((g, d)).or_insert_with(Rat::zero);
        *e += &(c.clone() * Rat::from_int(d));
    }
    for i in 0..ks.len() {
        if ks[i] == 0 {
            continue;
        }
        let mut lowered = ks.to_vec();
        lowered[i] -= 1;
        let t = GenusDegreeTable::decode(&lowered, &invariant(&lowered).unwrap().value).unwrap();
        for (&(g, _), c) in &t.entries {
            // same genus, and the degree is fixed by the total including the new tau_0
            let total: i64 = ks.iter().map(|&k| k as i64).sum();
            let d = total / 2 + 1 - g;
            let e = out.entries.entry((g, d)).or_insert_with(Rat::zero);
            *e += c;
        }
    }
    out.entries.retain(|_, c| !c.is_zero());
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn divisor_equation(ks in prop::collection::vec(0u32..=5, 1..=2).prop_filter("even total, small", |ks| {
        let s: u32 = ks.iter().sum();
        s.is_multiple_of(2) && s <= 6
    })) {
        let mut with = vec![0u32];
        with.extend(&ks);
        let lhs = GenusDegreeTable::decode(&with, &invariant(&with).unwrap().value).unwrap();
        prop_assert_eq!(lhs, divisor_rhs(&ks));
    }

    #[test]
    fn permuted_insertions_agree(ks in prop::collection::vec(0u32..=4, 2..=3)
        .prop_filter("sum k <= 5", |ks| ks.iter().sum::<u32>() <= 5)
        .prop_flat_map(|ks| (Just(ks.clone()), Just(ks).prop_shuffle())))
    {
        let (a, b) = ks;
        prop_assert_eq!(invariant(&a).unwrap().value, invariant(&b).unwrap().value);
    }

    #[test]
    fn eps_exponents_even_and_bounded(ks in prop::collection::vec(0u32..=6, 1..=3)
        .prop_filter("sum k <= 6", |ks| ks.iter().sum::<u32>() <= 6))
    {
        let total: u32 = ks.iter().sum();
        let v: EpsLaurent = invariant(&ks).unwrap().value;
        if total % 2 == 1 {
            prop_assert!(v.is_zero());
        }
        for (e, _) in v.terms() {
            prop_assert!(e % 2 == 0 && (-2..=total as i32).contains(&e));
        }
        let t = GenusDegreeTable::decode(&ks, &v).unwrap();
        prop_assert!(t.entries.keys().all(|&(g, d)| g >= 0 && d >= 0));
    }
}
