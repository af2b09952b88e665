mod common;

use common::checks::determinism;
use common::fx;

#[test]
fn census_and_enumeration_do_not_depend_on_threads() {
    let machines = [fx("s13597"), fx("order6"), fx("aleshin_finite"), fx("lamplighter")];
    determinism(&[(2, 2), (3, 2)], &machines).unwrap();
}
