//! The two eigenvalue families of the coupled wave/Schrodinger operator:
//! cubic roots, asymptotic residuals, and the match between the analytic
//! branches and the numeric spectrum of the truncation.
//!
//! Run with: cargo run --release --example schrodinger_branches

use stabkit::schrodinger::{
    cross_branch_gap, schro_branch_eigenvalue, schro_eigenvalues, verify_numeric_spectrum,
    Branch,
};

fn main() {
    let xi = 2f64.sqrt() - 1.0;
    println!(
        "{:>4} {:>16} {:>14} {:>12}",
        "k", "mu (branch 1)", "mu (branch 2)", "residuals"
    );
    for k in [5i64, 10, 20, 40] {
        let b1 = schro_branch_eigenvalue(k, Branch::One).unwrap();
        let b2 = schro_branch_eigenvalue(k, Branch::Two).unwrap();
        println!(
            "{k:>4} {:>16.8} {:>14.4} ({:.3}, {:.3})",
            b1.mu, b2.mu, b1.asymptotic_residual, b2.asymptotic_residual
        );
    }
    let spectrum = schro_eigenvalues(32, xi).unwrap();
    println!("\ncross-branch minimal gap (diagnostic): {:.6}", cross_branch_gap(&spectrum));
    let defect = verify_numeric_spectrum(32, xi).unwrap();
    println!("numeric truncation spectrum vs branch values: max defect {defect:.3e}");
}
