mod common;

use lazyrules::{parse_dataset, split_for_prediction, Value};
use proptest::prelude::*;

proptest! {
    #[test]
    fn csv_round_trip(seed in any::<u64>(), rows in 1usize..60, missing in 0.0..0.4f64) {
        let d = common::mixed_dataset(seed, rows, missing);
        let again = parse_dataset(&d.to_csv(), &d.schema().to_text()).unwrap();
        prop_assert_eq!(again, d);
    }

    #[test]
    fn split_keeps_order_and_rows(seed in any::<u64>(), rows in 2usize..40, pick in any::<prop::sample::Index>()) {
        let d = common::mixed_dataset(seed, rows, 0.0);
        let row = pick.index(rows);
        let (point, training) = split_for_prediction(&d, row).unwrap();
        let expected: Vec<usize> = (0..rows).filter(|&r| r != row).collect();
        prop_assert_eq!(training.indices(), &expected[..]);
        prop_assert_eq!(point.source_row(), Some(row));
        let class = d.schema().class_column();
        for c in 0..d.schema().len() {
            let want = if c == class { Value::Missing } else { d.value(row, c) };
            prop_assert_eq!(point.value(c), want);
        }
    }
}

#[test]
fn split_out_of_range() {
    let d = common::mixed_dataset(1, 5, 0.0);
    assert!(split_for_prediction(&d, 5).is_err());
    assert!(split_for_prediction(&d, 4).is_ok());
}
