//! Enumerating valid products: exhaustively where the candidate space is
//! walkable, by uniform sampling where it is not.
//!
//! Width 3 has 2^9 candidates and 8 valid products; width 4 has 2^24 and
//! 106.  Width 5 has 2^50 candidates with only 8464 valid — far too sparse
//! to walk or rejection-sample, so draws go through an isomorphism-class
//! catalogue weighted by exact orbit sizes (still exactly uniform).
//!
//! Run with: `cargo run --example enumerate_products`

use hidden_sum::{EnumerationMode, Result};
use hidden_sum::ring::enumerate_products;

fn main() -> Result<()> {
    // Exhaustive walks, small widths.
    for width in [3u8, 4] {
        let count = enumerate_products(width, EnumerationMode::Exhaustive { force: false })?.count();
        println!("width {width}: {count} valid products (exhaustive walk)");
    }

    // All 8 width-3 products, in walk order.
    println!("\nthe eight width-3 products (nonzero entries only):");
    for product in enumerate_products(3, EnumerationMode::Exhaustive { force: false })? {
        let entries: Vec<String> = product
            .entries()
            .iter()
            .map(|(i, j, v)| format!("e{}*e{}={v}", i + 1, j + 1))
            .collect();
        let label = if entries.is_empty() { "zero product".to_string() } else { entries.join(", ") };
        println!("  dim U = {}: {label}", product.u_space().len());
    }

    // Width 5 must be sampled; the refusal is explicit.
    let refusal = enumerate_products(5, EnumerationMode::Exhaustive { force: false });
    println!("\nwidth 5 exhaustive: {}", refusal.err().expect("refused"));

    println!("five uniform width-5 draws (seed 7):");
    for product in enumerate_products(5, EnumerationMode::Sampled { seed: 7, limit: 5 })? {
        let entries: Vec<String> = product
            .entries()
            .iter()
            .map(|(i, j, v)| format!("e{}*e{}={v}", i + 1, j + 1))
            .collect();
        println!("  dim U = {}: {}", product.u_space().len(),
            if entries.is_empty() { "zero product".to_string() } else { entries.join(", ") });
    }
    Ok(())
}
