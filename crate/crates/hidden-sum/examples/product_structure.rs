//! Tour of the smallest interesting hidden sum: the width-3 product with
//! `e1 * e2 = e3` and every other generator pair zero.
//!
//! Shows the induced operation `x ∘ y = x + y + x*y`, the affine
//! translation maps `τ_a`, the coordinate involution that rewrites `∘` as
//! `+`, and the two subspaces that drive the differential bounds: `U`
//! (elements whose translation is pure XOR) and the annihilators.
//!
//! Run with: `cargo run --example product_structure`

use hidden_sum::ring::CoordinateTable;
use hidden_sum::{BitVector, RingProduct, Result};

fn main() -> Result<()> {
    let product = RingProduct::new(3, &[(0, 1, BitVector::unit(3, 2))])?;
    println!("product file form:\n{product}");

    // The hidden sum in full: x ∘ y = x + y + x*y.
    println!("operation table (rows x, columns y, entries x∘y as bitstrings):");
    for x in BitVector::all(3) {
        let row: Vec<String> = BitVector::all(3).map(|y| product.circ(x, y).to_string()).collect();
        println!("  {x} | {}", row.join(" "));
    }

    // Every translation x ↦ x ∘ a is affine over +: linear part κ_a,
    // constant part a.
    println!("\ntranslations τ_a = (κ_a, a):");
    for a in BitVector::all(3) {
        let tau = product.tau(a);
        let rows: Vec<String> =
            (0..3).map(|i| tau.linear().row(i).to_string()).collect();
        println!("  a = {a}: κ_a rows [{}]", rows.join(", "));
    }

    // In hidden coordinates the operation becomes plain XOR.
    let coords = CoordinateTable::standard(&product)?;
    println!("\ncoordinate map (x ↦ its ∘-coordinates over the standard basis):");
    for x in BitVector::all(3) {
        println!("  {x} ↦ {}", coords.coordinates(x));
    }
    for x in BitVector::all(3) {
        for y in BitVector::all(3) {
            assert_eq!(
                coords.coordinates(product.circ(x, y)),
                coords.coordinates(x) ^ coords.coordinates(y),
                "coordinates must turn ∘ into +"
            );
        }
    }
    println!("verified: coordinates(x ∘ y) = coordinates(x) + coordinates(y) everywhere");

    // U = elements translating by pure XOR; annihilator of a = vectors x
    // with x*a = 0.
    let u = product.u_space();
    println!("\nU basis: {:?} (dim {})", u.iter().map(BitVector::to_string).collect::<Vec<_>>(), u.len());
    for a in BitVector::all(3).filter(|a| !a.is_zero()) {
        let ann = product.annihilator(a);
        println!("  |Ann({a})| = 2^{}", ann.len());
    }
    Ok(())
}
