#![allow(dead_code)]

use std::fmt::Write as _;

use lazyrules::{parse_dataset, Dataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random dataset with one column of each kind and a class that leans on
/// the first column. `missing` is the per-cell missing rate.
pub fn mixed_dataset(seed: u64, rows: usize, missing: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schema = "b: bool\nn: nominal {red,green,blue}\no: ordered {lo,mid,hi,top}\nx: continuous\nskip: ignore\nc: class {yes,no}\n";
    let mut csv = String::from("b,n,o,x,skip,c\n");
    for _ in 0..rows {
        let cell = |s: String, rng: &mut ChaCha8Rng| if rng.gen_bool(missing) { "?".into() } else { s };
        let o = rng.gen_range(0..4usize);
        let b = cell(if rng.gen_bool(0.5) { "T" } else { "F" }.into(), &mut rng);
        let n = cell(["red", "green", "blue"][rng.gen_range(0..3)].into(), &mut rng);
        let os = cell(["lo", "mid", "hi", "top"][o].into(), &mut rng);
        let x = cell(format!("{}", rng.gen_range(-50.0..50.0f64)), &mut rng);
        let class = (o >= 2) != rng.gen_bool(0.15);
        let _ = writeln!(csv, "{b},{n},{os},{x},whatever,{}", if class { "yes" } else { "no" });
    }
    parse_dataset(&csv, schema).expect("generated data parses")
}

/// One integer-valued ordered attribute `o` with `levels` values plus class.
pub fn ordered_dataset(seed: u64, rows: usize, levels: usize, missing: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..levels).map(|i| i.to_string()).collect();
    let schema = format!("o: ordered {{{}}}\nc: class {{p,q}}\n", names.join(","));
    let mut csv = String::from("o,c\n");
    for i in 0..rows {
        let v = if rng.gen_bool(missing) {
            "?".to_string()
        } else {
            rng.gen_range(0..levels).to_string()
        };
        // both classes always present
        let c = if i < 2 {
            ["p", "q"][i]
        } else {
            ["p", "q"][rng.gen_range(0..2)]
        };
        let _ = writeln!(csv, "{v},{c}");
    }
    parse_dataset(&csv, &schema).expect("generated data parses")
}
