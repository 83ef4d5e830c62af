//! The same attack over TCP, and why the transcripts don't care.
//!
//! A server defends the cipher behind the line protocol (ENC/DEC/BUDGET/
//! QUIT) with per-session query budgets.  The attack code is oblivious to
//! the transport: transcripts record protocol-level facts only, so the
//! local and the networked run render byte-identically.
//!
//! Run with: `cargo run --example attack_networked`

use hidden_sum::attack::AttackVariant;
use hidden_sum::oracle::{serve, OracleClient, ServerConfig};
use hidden_sum::{
    recover_affine, AttackOptions, LocalOracle, Result, SessionKey, ToyCipherSpec,
};

fn main() -> Result<()> {
    let spec = ToyCipherSpec::standard();
    let key = SessionKey::from_hex("0B")?;

    // Ephemeral port, server in this process; the client only sees the
    // address.
    let handle = serve(ServerConfig::new(spec.clone(), key), "127.0.0.1:0")?;
    println!("oracle listening on {}", handle.local_addr());

    let mut remote = OracleClient::connect(handle.local_addr())?;
    let (enc_left, dec_left) = remote.budget()?;
    println!("session budget: {enc_left} encryptions, {dec_left} decryptions\n");

    let options = AttackOptions::default();
    let networked = recover_affine(&mut remote, AttackVariant::EncDec, &options)?;
    remote.quit()?;
    println!("{networked}\n");

    // The identical attack against an in-process oracle.
    let mut local = LocalOracle::new(spec, key);
    let locally = recover_affine(&mut local, AttackVariant::EncDec, &options)?;

    assert_eq!(
        networked.to_string(),
        locally.to_string(),
        "transcripts must not betray the transport"
    );
    println!("local and networked transcripts are byte-identical");

    handle.shutdown();
    Ok(())
}
