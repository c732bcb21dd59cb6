// Compares per-run scores of two systems with the Mann-Whitney U test.

use epistact::metrics::mann_whitney_u;
use epistact::report::{emit_significance, ReportFormat};

fn main() {
    let concat = [23.0, 22.4, 23.9, 22.8, 23.3, 22.1, 23.6, 22.9, 23.1, 22.7];
    let separate = [21.2, 21.9, 20.8, 21.4, 22.0, 21.1, 20.9, 21.6, 21.3, 21.0];

    // three systems compared with each other: Bonferroni divisor 3
    let r = mann_whitney_u(&concat, &separate, 0.05, 3).unwrap();
    print!("{}", emit_significance(&r, ReportFormat::Text).unwrap());

    let small = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05, 1).unwrap();
    println!("\n[1,2,3] vs [4,5,6]: p = {}", small.p_value);
}
