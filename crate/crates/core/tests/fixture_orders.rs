mod common;

use mealy::machine::cross_product_machine;
use mealy::semigroup::{element_of_state, element_order, enumerate_order, Budget, ElementOrder, Mode, Status};
use mealy::transform::{disjoint_union, dual, extend_ir, sum_components};
use mealy::{classify, is_isomorphic};

use common::{all_fixtures, fx, level_group_order};

fn order(name: &str, mode: Mode) -> Option<usize> {
    enumerate_order(&fx(name), mode, Budget::default()).unwrap().order
}

#[test]
fn fixture_orders() {
    assert_eq!(order("klein", Mode::Group), Some(4));
    assert_eq!(order("klein", Mode::Semigroup), Some(4));
    assert_eq!(order("order6", Mode::Semigroup), Some(6));
    assert_eq!(order("dihedral8", Mode::Group), Some(8));
    assert_eq!(order("g16", Mode::Group), Some(16));
    assert_eq!(order("grig_finite", Mode::Group), Some(16));
    assert_eq!(order("aleshin_finite", Mode::Group), Some(36));
    assert_eq!(order("msharp_2_2", Mode::Group), Some(4));
}

#[test]
fn extension_order_matches_level_actions() {
    // the group of a finite machine is already faithful on some level, and
    // level orders only grow with the level
    let ext = extend_ir(&fx("g16")).unwrap();
    let bfs = enumerate_order(&ext, Mode::Group, Budget::default()).unwrap().order.unwrap();
    let levels: Vec<usize> = (1..=3).map(|k| level_group_order(&ext, k)).collect();
    assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(levels[2], bfs);
    assert_eq!(bfs, 16);
}

#[test]
fn infinite_fixtures_exhaust_small_budgets() {
    for name in ["lamplighter", "adding_machine", "aleshin", "basilica", "grigorchuk", "s_i2"] {
        let r = enumerate_order(&fx(name), Mode::Semigroup, Budget::elements(2_000)).unwrap();
        assert_eq!(r.status, Status::BudgetExceeded, "{name}");
    }
}

#[test]
fn extension_of_small_finite_machines_stays_finite() {
    let finite_ir = all_fixtures().into_iter().filter(|(_, m)| {
        classify(m).ir
            && m.states() * m.letters() <= 16
            && enumerate_order(m, Mode::Group, Budget::elements(1_000)).unwrap().is_finite()
    });
    let mut seen = 0;
    for (name, m) in finite_ir {
        let ext = extend_ir(&m).unwrap();
        assert!(classify(&ext).ir);
        assert!(enumerate_order(&ext, Mode::Group, Budget::elements(100_000)).unwrap().is_finite(), "{name}");
        seen += 1;
    }
    assert!(seen >= 2);
}

#[test]
fn cross_products_realize_prescribed_groups() {
    let swap = vec![1, 0];
    let m = cross_product_machine(std::slice::from_ref(&swap), std::slice::from_ref(&swap)).unwrap();
    assert_eq!(enumerate_order(&m, Mode::Group, Budget::default()).unwrap().order, Some(2));

    // S3 on three letters, Z2 on two states
    let s3 = [vec![1, 0, 2], vec![1, 2, 0]];
    let m = cross_product_machine(&s3, &[swap]).unwrap();
    assert_eq!(enumerate_order(&m, Mode::Group, Budget::default()).unwrap().order, Some(6));
    assert_eq!(enumerate_order(&dual(&m), Mode::Group, Budget::default()).unwrap().order, Some(2));

    let trivial = cross_product_machine(&[vec![0]], &[vec![0]]).unwrap();
    assert!(trivial.is_trivial());
}

#[test]
fn disjoint_unions() {
    let (k, o) = (fx("klein"), fx("order6"));
    let u = disjoint_union(&k, &o).unwrap();
    let comps = sum_components(&u);
    assert_eq!(comps.len(), 2);
    assert!(is_isomorphic(&comps[0], &k) && is_isomorphic(&comps[1], &o));
    let uu = disjoint_union(&k, &k).unwrap();
    for x in 0..2 {
        assert_eq!(element_of_state(&uu, x), element_of_state(&uu, x + 2));
    }
    assert!(enumerate_order(&u, Mode::Semigroup, Budget::default()).unwrap().is_finite());
}

#[test]
fn element_orders() {
    let odometer = element_of_state(&fx("adding_machine"), 0);
    assert_eq!(element_order(&odometer, 500), ElementOrder::BudgetExceeded);
    let a = element_of_state(&fx("klein"), 0);
    assert_eq!(element_order(&a, 10).group_order(), Some(2));
}

#[test]
fn dual_of_klein_is_finite() {
    let d = dual(&fx("klein"));
    assert!(enumerate_order(&d, Mode::Semigroup, Budget::default()).unwrap().is_finite());
}
