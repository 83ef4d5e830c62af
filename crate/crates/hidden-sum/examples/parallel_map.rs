//! Differential uniformity under parallel (brick) composition.
//!
//! Placing two maps side by side does *not* multiply their differential
//! uniformities.  An input difference may be zero on one brick, and on
//! that brick every input "matches": the brick contributes a factor of
//! its whole domain.  The exact rule is
//!
//! ```text
//! δ(f × g) = max( δ(f) · 2^{n_g},  2^{n_f} · δ(g) ) ,
//! ```
//!
//! so a `δ = 4` S-box on 3 bits yields a `δ = 4·2³ = 32` two-brick layer,
//! and a `δ = 4` map on 4 bits doubles to `δ = 4·2⁴ = 2⁶` on 8 bits.  The
//! brick layer alone is differentially terrible — the toy cipher leans on
//! its mixing matrix for diffusion.
//!
//! Run with: `cargo run --example parallel_map`

use hidden_sum::diff::search_permutation_with_delta;
use hidden_sum::{delta_uniformity, parallel_map, GroupOp, Result, ToyCipherSpec};

fn main() -> Result<()> {
    // The cipher's own brick layer: 4 · 2^3 = 32.
    let spec = ToyCipherSpec::standard();
    let sbox = spec.sbox();
    let bricks = parallel_map(sbox, sbox);
    let brick_delta = delta_uniformity(&bricks, &GroupOp::plus(6));
    println!(
        "toy S-box: delta = {}; two bricks side by side: delta = {brick_delta}",
        delta_uniformity(sbox, &GroupOp::plus(3)),
    );
    assert_eq!(brick_delta, 4 << 3);

    // A searched width-4 permutation with delta 4; doubled it hits exactly
    // 4 · 2^4 = 2^6.
    let f = search_permutation_with_delta(4, 4, 0, 1_000_000)?;
    println!("\nsearched width-4 permutation with delta 4: {:?}", f.images());
    let ff = parallel_map(&f, &f);
    let delta = delta_uniformity(&ff, &GroupOp::plus(8));
    println!("f × f on 8 bits: delta = {delta} (= 4 · 2^4)");
    assert_eq!(delta, 1 << 6);

    // Mixed widths: max(4 · 2^3, 2^4 · 4) = 64.
    let mixed = parallel_map(&f, sbox);
    let mixed_delta = delta_uniformity(&mixed, &GroupOp::plus(7));
    println!("f × sbox on 7 bits: delta = {mixed_delta} (= max(4·2³, 2⁴·4))");
    assert_eq!(mixed_delta, 64);
    Ok(())
}
