//! The exterior-algebra construction, and why annihilators cannot shrink
//! below `2^(⌊(n-1)/2⌋ + 1)`.
//!
//! On k generators the construction spans all nonzero wedge products,
//! giving a valid product of width `2^k - 1`.  At k = 3 (width 7) the
//! general annihilator lower bound says `|Ann(a)| ≥ 2^4`, and this product
//! attains it exactly — the bound is tight.
//!
//! Run with: `cargo run --example exterior_algebra`

use hidden_sum::{BitVector, Result, RingProduct};

fn main() -> Result<()> {
    let product = RingProduct::exterior_algebra(3);
    let width = product.width();
    println!("exterior algebra on 3 generators: width {width}");
    println!("{product}");

    // Annihilator sizes across all nonzero elements.
    let mut histogram = std::collections::BTreeMap::new();
    for a in BitVector::all(width).filter(|a| !a.is_zero()) {
        *histogram.entry(product.annihilator(a).len()).or_insert(0u32) += 1;
    }
    println!("annihilator dimension histogram (dim -> count of a):");
    for (dim, count) in &histogram {
        println!("  dim {dim}: {count} elements");
    }
    let min_dim = *histogram.keys().next().expect("nonempty");
    let floor_bound = (width as u32 - 1) / 2 + 1;
    println!(
        "min |Ann(a)| = 2^{min_dim}, general lower bound 2^{floor_bound} —{}",
        if min_dim as u32 == floor_bound { " tight here" } else { " not attained" }
    );

    // U and the standard-translation verdict.
    let u = product.u_space();
    println!(
        "dim U = {} (basis {:?})",
        u.len(),
        u.iter().map(BitVector::to_string).collect::<Vec<_>>()
    );
    println!(
        "standard translations affine over this product: {}",
        product.contains_std_translations()
    );
    Ok(())
}
