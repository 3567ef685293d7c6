//! Sample one period of the noise field, check its quadratic variation and
//! round-trip it through the binary dump.
//!
//! cargo run --example noise_field

use std::f64::consts::PI;

use saccel::noise_field::{sample_base_field, FieldRealization, TimeGrid};

fn main() -> saccel::Result<()> {
    let grid = TimeGrid::periods(10_000, 1)?;
    let field = sample_base_field(grid, 42);

    let (qc, qs, qcs) = field.period_variations();
    println!("<C>_2pi = {qc:.3}  <S>_2pi = {qs:.3}  (expected {:.3})", 2.0 * PI * PI);
    println!("<C,S>_2pi = {qcs:.4}");
    let (c, s) = field.period_endpoint_values();
    println!("C_2pi = {c:.4}  S_2pi = {s:.4}");

    // the field repeats every period
    assert_eq!(field.field_increment(17), field.field_increment(17 + 3 * grid.steps_per_period()));

    let path = std::env::temp_dir().join("saccel_field.bin");
    field.save(&path)?;
    let back = FieldRealization::load(&path)?;
    println!("dump round trip exact: {}", back == field);
    std::fs::remove_file(path)?;
    Ok(())
}
