//! The experiments this crate can run, with their parameters and tolerances.
//!
//! cargo run --example registry

use saccel::experiments::ExperimentKind;

fn main() {
    for kind in ExperimentKind::ALL {
        let e = kind.entry();
        println!("{}{}", e.name, if e.exploratory { " (exploratory)" } else { "" });
        println!("  {}", e.claim);
        println!("  parameters: {}", e.parameters.join(", "));
        if !e.tolerances.is_empty() {
            println!("  tolerances: {}", e.tolerances.join(", "));
        }
    }
}
