//! Key-recovery against the toy cipher through its hidden-sum trapdoor.
//!
//! Every encryption function of the toy cipher is affine over the hidden
//! sum of [`crate::toy::build_hidden_sum_6`].  In the coordinates of that
//! sum — computed per brick by [`brick_coordinates`], an involution that
//! fixes `0` and every unit vector — the cipher therefore becomes affine
//! over plain `+`:
//!
//! ```text
//! F(x) = φ(Enc_k(φ(x))) = x · M ⊕ t .
//! ```
//!
//! Seven chosen plaintexts (`0` and the six units) pin down `t` and the
//! rows of `M`, after which the attacker encrypts and decrypts arbitrary
//! blocks without the key.  Seven decryption queries optionally yield
//! `M⁻¹` directly instead of by matrix inversion.  That beats the 64-query
//! codebook baseline even under a query budget that forbids tabulation.
//!
//! [`recover_affine`] drives the attack against any [`EncryptionOracle`];
//! the same code runs against an in-process cipher ([`LocalOracle`]) or a
//! remote one over the wire protocol (`crate::oracle::OracleClient`), and
//! the resulting [`AttackTranscript`] renders identically for both.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, QueryKind, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::toy::{block_to_hex, SessionKey, ToyCipherSpec, BLOCK_WIDTH, BRICK_WIDTH};

/// Default per-direction query allowance: one short of the codebook, so
/// tabulating the cipher is never an option.
pub const DEFAULT_QUERY_BUDGET: u64 = 63;

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// A chosen-plaintext/chosen-ciphertext interface to the cipher under some
/// fixed, unknown key.
pub trait EncryptionOracle {
    fn encrypt(&mut self, plaintext: BitVector) -> Result<BitVector>;
    fn decrypt(&mut self, ciphertext: BitVector) -> Result<BitVector>;
    /// Queries answered so far, as `(encryptions, decryptions)`.
    fn counts(&self) -> (u64, u64);
}

/// An in-process oracle holding the key, with per-direction query budgets.
pub struct LocalOracle {
    spec: ToyCipherSpec,
    key: SessionKey,
    enc_budget: u64,
    dec_budget: u64,
    enc_used: u64,
    dec_used: u64,
}

impl LocalOracle {
    /// Oracle with the default budgets ([`DEFAULT_QUERY_BUDGET`] each way).
    pub fn new(spec: ToyCipherSpec, key: SessionKey) -> Self {
        Self::with_budgets(spec, key, DEFAULT_QUERY_BUDGET, DEFAULT_QUERY_BUDGET)
    }

    pub fn with_budgets(
        spec: ToyCipherSpec,
        key: SessionKey,
        enc_budget: u64,
        dec_budget: u64,
    ) -> Self {
        LocalOracle { spec, key, enc_budget, dec_budget, enc_used: 0, dec_used: 0 }
    }

    pub fn remaining(&self) -> (u64, u64) {
        (self.enc_budget - self.enc_used, self.dec_budget - self.dec_used)
    }

    fn charge(kind: QueryKind, used: &mut u64, budget: u64) -> Result<()> {
        if *used >= budget {
            return Err(Error::BudgetExhausted { kind, used: *used, budget });
        }
        *used += 1;
        Ok(())
    }
}

impl EncryptionOracle for LocalOracle {
    fn encrypt(&mut self, plaintext: BitVector) -> Result<BitVector> {
        Self::charge(QueryKind::Enc, &mut self.enc_used, self.enc_budget)?;
        Ok(self.spec.encrypt(plaintext, &self.key))
    }

    fn decrypt(&mut self, ciphertext: BitVector) -> Result<BitVector> {
        Self::charge(QueryKind::Dec, &mut self.dec_used, self.dec_budget)?;
        Ok(self.spec.decrypt(ciphertext, &self.key))
    }

    fn counts(&self) -> (u64, u64) {
        (self.enc_used, self.dec_used)
    }
}

// ---------------------------------------------------------------------------
// Hidden-sum coordinates
// ---------------------------------------------------------------------------

/// The coordinate involution of the per-brick hidden sum:
/// `(x₁, x₂, x₃) ↦ (x₁, x₂, x₃ + x₁x₂)`.
pub fn brick_coordinates(x: BitVector) -> BitVector {
    assert_eq!(x.width(), BRICK_WIDTH, "width mismatch");
    let carry = x.get(0) && x.get(1);
    x.with_bit(2, x.get(2) ^ carry)
}

/// [`brick_coordinates`] on both bricks of a block: the coordinate map of
/// the full hidden sum, turning maps affine over it into maps affine over
/// `+`.  An involution fixing `0` and every unit vector.
pub fn hidden_coordinates(x: BitVector) -> BitVector {
    assert_eq!(x.width(), BLOCK_WIDTH, "width mismatch");
    let (low, high) = x.split(BRICK_WIDTH);
    brick_coordinates(low).concat(&brick_coordinates(high))
}

// ---------------------------------------------------------------------------
// Attack plumbing
// ---------------------------------------------------------------------------

/// Which query mix the attack uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackVariant {
    /// Seven encryption queries; `M⁻¹` by Gaussian inversion.
    EncOnly,
    /// Seven encryption and seven decryption queries; `M⁻¹` read off the
    /// decryption responses and cross-checked against `M`.
    EncDec,
}

impl AttackVariant {
    pub fn number(self) -> u8 {
        match self {
            AttackVariant::EncOnly => 1,
            AttackVariant::EncDec => 2,
        }
    }
}

impl fmt::Display for AttackVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for AttackVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(AttackVariant::EncOnly),
            "2" => Ok(AttackVariant::EncDec),
            other => Err(Error::Parse(format!("unknown attack variant {other:?} (expected 1 or 2)"))),
        }
    }
}

/// Knobs for [`recover_affine`].
#[derive(Clone, Copy, Debug)]
pub struct AttackOptions {
    /// Spend extra encryption queries after recovery to spot-check the
    /// reconstruction against the oracle.
    pub strict: bool,
    /// How many spot points strict mode samples (distinct, seeded).
    pub spot_points: u16,
    pub seed: u64,
}

impl Default for AttackOptions {
    fn default() -> Self {
        AttackOptions { strict: false, spot_points: 4, seed: 0 }
    }
}

/// One oracle interaction, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub kind: QueryKind,
    pub input: BitVector,
    pub output: BitVector,
}

/// The recovered affine description `F(x) = x·M ⊕ t` of the cipher in
/// hidden-sum coordinates, with enough to run it both ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredAffine {
    pub m: BitMatrix,
    pub m_inv: BitMatrix,
    pub t: BitVector,
}

impl RecoveredAffine {
    /// Key-free encryption: `φ(φ(v)·M ⊕ t)`.
    pub fn encrypt_block(&self, v: BitVector) -> BitVector {
        hidden_coordinates(self.m.apply(hidden_coordinates(v)) ^ self.t)
    }

    /// Key-free decryption: `φ((φ(v) ⊕ t)·M⁻¹)`.
    pub fn decrypt_block(&self, v: BitVector) -> BitVector {
        hidden_coordinates(self.m_inv.apply(hidden_coordinates(v) ^ self.t))
    }

    pub fn reconstruct(&self, kind: QueryKind, v: BitVector) -> BitVector {
        match kind {
            QueryKind::Enc => self.encrypt_block(v),
            QueryKind::Dec => self.decrypt_block(v),
        }
    }
}

/// Why an attack run stopped short of a verified recovery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttackFailure {
    /// The oracle refused a query: the budget in that direction is gone.
    Budget { kind: QueryKind },
    /// The seven encryption responses did not span the space.
    SingularMatrix,
    /// The decryption responses contradicted the encryption responses
    /// (`M·M⁻¹ ≠ I`), so the oracle is not affine in hidden coordinates.
    InverseMismatch,
    /// A strict-mode spot check disagreed with the reconstruction.
    SpotCheckMismatch { point: BitVector, oracle: BitVector, reconstructed: BitVector },
}

impl fmt::Display for AttackFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackFailure::Budget { kind } => write!(f, "{kind} budget exhausted"),
            AttackFailure::SingularMatrix => write!(f, "response matrix is singular"),
            AttackFailure::InverseMismatch => write!(f, "decryption responses are inconsistent"),
            AttackFailure::SpotCheckMismatch { point, oracle, reconstructed } => write!(
                f,
                "spot check at {} disagrees: oracle {}, reconstruction {}",
                block_to_hex(*point),
                block_to_hex(*oracle),
                block_to_hex(*reconstructed)
            ),
        }
    }
}

/// Complete record of one attack run.
///
/// The rendering contains only protocol-level facts (queries and recovered
/// values) — no endpoints, timestamps or transport detail — so a local run
/// and a networked run over the same cipher and key print byte-identically.
pub struct AttackTranscript {
    pub variant: AttackVariant,
    pub strict: bool,
    pub queries: Vec<QueryRecord>,
    pub map: Option<RecoveredAffine>,
    pub failure: Option<AttackFailure>,
}

impl AttackTranscript {
    pub fn queries_enc(&self) -> u64 {
        self.queries.iter().filter(|q| q.kind == QueryKind::Enc).count() as u64
    }

    pub fn queries_dec(&self) -> u64 {
        self.queries.iter().filter(|q| q.kind == QueryKind::Dec).count() as u64
    }

    pub fn succeeded(&self) -> bool {
        self.map.is_some() && self.failure.is_none()
    }
}

impl fmt::Display for AttackTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "affine recovery, variant {}, strict {}",
            self.variant,
            if self.strict { "on" } else { "off" }
        )?;
        for q in &self.queries {
            let kind = match q.kind {
                QueryKind::Enc => "ENC",
                QueryKind::Dec => "DEC",
            };
            writeln!(f, "  {kind} {} -> {}", block_to_hex(q.input), block_to_hex(q.output))?;
        }
        if let Some(rec) = &self.map {
            writeln!(f, "recovered t = {}", block_to_hex(rec.t))?;
            writeln!(f, "recovered M =")?;
            for line in rec.m.to_string().lines().skip(1) {
                writeln!(f, "  {line}")?;
            }
            writeln!(f, "recovered M^-1 =")?;
            for line in rec.m_inv.to_string().lines().skip(1) {
                writeln!(f, "  {line}")?;
            }
        }
        match &self.failure {
            Some(failure) => write!(f, "outcome: failed ({failure})"),
            None => write!(f, "outcome: success"),
        }
    }
}

enum Stop {
    /// Recorded in the transcript; the run ends without a verified map.
    Soft(AttackFailure),
    /// Transport or programming error; surfaces as `Err` to the caller.
    Hard(Error),
}

struct Session<'a, O: ?Sized> {
    oracle: &'a mut O,
    queries: Vec<QueryRecord>,
}

impl<O: EncryptionOracle + ?Sized> Session<'_, O> {
    fn query(&mut self, kind: QueryKind, input: BitVector) -> std::result::Result<BitVector, Stop> {
        let answer = match kind {
            QueryKind::Enc => self.oracle.encrypt(input),
            QueryKind::Dec => self.oracle.decrypt(input),
        };
        match answer {
            Ok(output) => {
                self.queries.push(QueryRecord { kind, input, output });
                Ok(output)
            }
            Err(Error::BudgetExhausted { kind, .. }) => Err(Stop::Soft(AttackFailure::Budget { kind })),
            Err(e) => Err(Stop::Hard(e)),
        }
    }
}

/// Runs the trapdoor attack against an oracle.
///
/// In-protocol setbacks — an exhausted budget, a singular response matrix,
/// inconsistent decryption responses, a failed strict spot check — are
/// *results*, recorded in the returned transcript, not errors.  `Err` is
/// reserved for transport and protocol faults where no meaningful
/// transcript exists.
pub fn recover_affine<O: EncryptionOracle + ?Sized>(
    oracle: &mut O,
    variant: AttackVariant,
    options: &AttackOptions,
) -> Result<AttackTranscript> {
    let mut session = Session { oracle, queries: Vec::new() };
    let outcome = run_recovery(&mut session, variant, options);
    let (map, failure) = match outcome {
        Ok(rec) => (Some(rec), None),
        Err(Stop::Soft(failure)) => (None, Some(failure)),
        Err(Stop::Hard(e)) => return Err(e),
    };
    Ok(AttackTranscript {
        variant,
        strict: options.strict,
        queries: session.queries,
        map,
        failure,
    })
}

fn run_recovery<O: EncryptionOracle + ?Sized>(
    session: &mut Session<'_, O>,
    variant: AttackVariant,
    options: &AttackOptions,
) -> std::result::Result<RecoveredAffine, Stop> {
    let zero = BitVector::zero(BLOCK_WIDTH);
    // φ fixes 0 and the units, so the probe points need no pre-image
    // adjustment: F(0) = φ(Enc(0)) and F(e_i) = φ(Enc(e_i)).
    let t = hidden_coordinates(session.query(QueryKind::Enc, zero)?);
    let mut rows = Vec::with_capacity(BLOCK_WIDTH as usize);
    for i in 0..BLOCK_WIDTH as usize {
        let y = session.query(QueryKind::Enc, BitVector::unit(BLOCK_WIDTH, i))?;
        rows.push(hidden_coordinates(y) ^ t);
    }
    let m = BitMatrix::from_rows(&rows);
    let m_inv = match variant {
        AttackVariant::EncOnly => {
            m.inverse().map_err(|_| Stop::Soft(AttackFailure::SingularMatrix))?
        }
        AttackVariant::EncDec => {
            // G = F⁻¹ satisfies G(y) = (y ⊕ t)·M⁻¹, so G(e_i) ⊕ G(0) is the
            // i-th row of M⁻¹.
            let g0 = hidden_coordinates(session.query(QueryKind::Dec, zero)?);
            let mut inv_rows = Vec::with_capacity(BLOCK_WIDTH as usize);
            for i in 0..BLOCK_WIDTH as usize {
                let y = session.query(QueryKind::Dec, BitVector::unit(BLOCK_WIDTH, i))?;
                inv_rows.push(hidden_coordinates(y) ^ g0);
            }
            let m_inv = BitMatrix::from_rows(&inv_rows);
            if !m.mul(&m_inv).is_identity() {
                return Err(Stop::Soft(AttackFailure::InverseMismatch));
            }
            m_inv
        }
    };
    let recovered = RecoveredAffine { m, m_inv, t };
    if options.strict {
        let mut rng = ChaCha12Rng::seed_from_u64(options.seed);
        let mut points: Vec<u16> = (0..1u16 << BLOCK_WIDTH).collect();
        let spot = (options.spot_points as usize).min(points.len());
        for slot in 0..spot {
            let pick = slot + (rng.next_u64() as usize) % (points.len() - slot);
            points.swap(slot, pick);
            let point = BitVector::new(BLOCK_WIDTH, points[slot]);
            let oracle_says = session.query(QueryKind::Enc, point)?;
            let reconstructed = recovered.encrypt_block(point);
            if oracle_says != reconstructed {
                return Err(Stop::Soft(AttackFailure::SpotCheckMismatch {
                    point,
                    oracle: oracle_says,
                    reconstructed,
                }));
            }
        }
    }
    Ok(recovered)
}

// ---------------------------------------------------------------------------
// Cost accounting
// ---------------------------------------------------------------------------

/// Query cost of an attack run against the 64-query codebook baseline.
pub struct CostReport {
    pub variant: AttackVariant,
    pub queries_enc: u64,
    pub queries_dec: u64,
    /// Chosen plaintexts needed to tabulate the cipher outright.
    pub baseline: u64,
    pub succeeded: bool,
    pub failure: Option<String>,
}

impl CostReport {
    pub fn total(&self) -> u64 {
        self.queries_enc + self.queries_dec
    }
}

/// Summarizes a transcript's query spend.
pub fn cost_report(transcript: &AttackTranscript) -> CostReport {
    CostReport {
        variant: transcript.variant,
        queries_enc: transcript.queries_enc(),
        queries_dec: transcript.queries_dec(),
        baseline: 1 << BLOCK_WIDTH,
        succeeded: transcript.succeeded(),
        failure: transcript.failure.as_ref().map(AttackFailure::to_string),
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "attack cost, variant {}:", self.variant)?;
        writeln!(f, "  encryption queries: {}", self.queries_enc)?;
        writeln!(f, "  decryption queries: {}", self.queries_dec)?;
        writeln!(f, "  codebook baseline:  {} encryptions", self.baseline)?;
        match &self.failure {
            Some(failure) => write!(f, "  outcome: failed ({failure})"),
            None => write!(
                f,
                "  outcome: success with {} of {} baseline queries",
                self.total(),
                self.baseline
            ),
        }
    }
}
