mod common;

use mealy::semigroup::element_of_word;

use common::checks::{compose_chains_on_fixtures, keys_match_tables_on_fixtures};

#[test]
fn element_keys_agree_with_function_tables_on_fixtures() {
    keys_match_tables_on_fixtures().unwrap();
}

#[test]
fn compose_chains_agree_with_words_on_fixtures() {
    compose_chains_on_fixtures().unwrap();
}

#[test]
fn lamplighter_words() {
    let m = common::fx("lamplighter");
    let a = element_of_word(&m, &[0]).unwrap();
    assert!(!a.is_identity());
    assert_eq!(a.apply(&[0, 1]), vec![1, 1]);
    // ρ_a flips the first letter, but ρ_aa is not the identity: 00 ↦ 10 ↦ 01
    let aa = element_of_word(&m, &[0, 0]).unwrap();
    assert_eq!(aa.apply(&[0, 0]), vec![0, 1]);
    assert!(!aa.is_identity());
    let klein = common::fx("klein");
    assert_eq!(element_of_word(&klein, &[0, 1]).unwrap(), element_of_word(&klein, &[1, 0]).unwrap());
}
