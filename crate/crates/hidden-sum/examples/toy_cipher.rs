//! Building the toy cipher and checking its trapdoor.
//!
//! The cipher description fixes an S-box polynomial over GF(8) and a 6×6
//! mixing matrix, but leaves the field-to-bits packing and the matrix
//! action ambiguous: twelve concrete readings.  The convention search tries
//! all of them and reports under which ones every round map is affine over
//! the designed hidden sum.
//!
//! Run with: `cargo run --example toy_cipher`

use hidden_sum::toy::{build_hidden_sum_6, convention_search, trapdoor_check, DEFAULT_ROUNDS};
use hidden_sum::{BitVector, Result, SessionKey, ToyCipherSpec};

fn main() -> Result<()> {
    let search = convention_search(DEFAULT_ROUNDS);
    println!("{search}\n");

    let spec = ToyCipherSpec::standard();
    println!("standard instance:\n{spec}");
    println!("{}\n", trapdoor_check(&spec));

    // The trapdoor product and its distinguished subspace.
    let hidden = build_hidden_sum_6();
    let u = hidden.u_space();
    println!(
        "hidden sum: dim U = {} (basis {:?})",
        u.len(),
        u.iter().map(BitVector::to_string).collect::<Vec<_>>()
    );

    // Ordinary use: encrypt and decrypt a few blocks.
    let key = SessionKey::from_hex("2A")?;
    println!("\nencrypting under key {key}:");
    for bits in [0x00u16, 0x01, 0x15, 0x3F] {
        let block = BitVector::new(6, bits);
        let cipher = spec.encrypt(block, &key);
        assert_eq!(spec.decrypt(cipher, &key), block);
        println!(
            "  {:02X} -> {:02X} -> {:02X}",
            block.bits(),
            cipher.bits(),
            spec.decrypt(cipher, &key).bits()
        );
    }
    Ok(())
}
