//! Acceptance sweep: one test per headline capability, end to end.
//!
//! Each test prints a single `criterion N: PASS — <detail>` line (visible
//! with `--nocapture`); a failure panics with the matching FAIL line, so
//! the verdict table can be read straight off the test output.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use hidden_sum::attack::{recover_affine, AttackOptions, AttackVariant, LocalOracle};
use hidden_sum::diff::{
    bound_exponent, delta_uniformity, fact1_scan, parallel_map, search_permutation_with_delta,
    verify_theorem_bound, GroupOp, PermutationTable, ScanMode,
};
use hidden_sum::error::Error;
use hidden_sum::gf2::{BitMatrix, BitVector};
use hidden_sum::oracle::{serve, OracleClient, ServerConfig};
use hidden_sum::ring::{
    enumerate_products, valid_products, CoordinateTable, EnumerationMode, RingProduct,
};
use hidden_sum::toy::{
    convention_search, FieldConvention, SessionKey, ToyCipherSpec, DEFAULT_ROUNDS,
};

fn pass(n: u32, detail: &str) {
    println!("criterion {n}: PASS — {detail}");
}

/// The width-3 product with Γ(e1, e2) = e3 and all other basis products
/// zero; the running example throughout the crate.
fn demo_product() -> RingProduct {
    RingProduct::new(3, &[(0, 1, BitVector::unit(3, 2))])
        .expect("criterion 2: FAIL — the e1*e2=e3 product must validate")
}

// ---------------------------------------------------------------------------
// 1. Every field convention reads the same 4-uniform S-box.
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_sbox_is_4_uniform_in_every_convention() {
    let start = Instant::now();
    let conventions = FieldConvention::all();
    assert_eq!(
        conventions.len(),
        12,
        "criterion 1: FAIL — expected 12 conventions, found {}",
        conventions.len()
    );
    for convention in &conventions {
        let delta = delta_uniformity(&convention.sbox(), &GroupOp::plus(3));
        assert_eq!(
            delta,
            4,
            "criterion 1: FAIL — convention {} has S-box delta {delta}, want 4",
            convention.id()
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "criterion 1: FAIL — took {elapsed:?}, budget 1s"
    );
    pass(1, &format!("S-box delta is exactly 4 under all 12 conventions ({elapsed:?})"));
}

// ---------------------------------------------------------------------------
// 2. The e1*e2=e3 product: translation matrices, formulas, coordinates.
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_demo_product_translations_and_coordinates() {
    let start = Instant::now();
    let product = demo_product();

    // Row i of each matrix is the image of e_{i+1}; rows are packed with
    // x_1 in the low bit.
    let expected_linear = [[1u16, 6, 4], [5, 2, 4], [1, 2, 4]];
    for (i, rows) in expected_linear.iter().enumerate() {
        let tau = product.tau(BitVector::unit(3, i));
        assert_eq!(
            tau.linear(),
            &BitMatrix::from_row_bits(3, rows),
            "criterion 2: FAIL — linear part of tau(e{}) differs",
            i + 1
        );
        assert_eq!(
            tau.translation(),
            BitVector::unit(3, i),
            "criterion 2: FAIL — translation part of tau(e{}) differs",
            i + 1
        );
    }

    // The closed forms, checked point by point on all 8 inputs:
    //   tau_1(x) = (x1+1, x2, x2+x3)
    //   tau_2(x) = (x1, x2+1, x1+x3)
    //   tau_3(x) = (x1, x2, x3+1)
    type Formula = fn(bool, bool, bool) -> (bool, bool, bool);
    let formulas: [Formula; 3] = [
        |x1, x2, x3| (!x1, x2, x2 ^ x3),
        |x1, x2, x3| (x1, !x2, x1 ^ x3),
        |x1, x2, x3| (x1, x2, !x3),
    ];
    for (i, formula) in formulas.iter().enumerate() {
        let tau = product.tau(BitVector::unit(3, i));
        for x in BitVector::all(3) {
            let (y1, y2, y3) = formula(x.get(0), x.get(1), x.get(2));
            let expected =
                BitVector::zero(3).with_bit(0, y1).with_bit(1, y2).with_bit(2, y3);
            assert_eq!(
                tau.apply(x),
                expected,
                "criterion 2: FAIL — tau(e{}) formula mismatch at x={x}",
                i + 1
            );
        }
    }

    // Individual coordinates: x = (x1, x2, x3+x1x2) in the standard basis.
    let table = CoordinateTable::standard(&product)
        .expect("criterion 2: FAIL — standard basis must be a basis here");
    for x in BitVector::all(3) {
        let expected = BitVector::zero(3)
            .with_bit(0, x.get(0))
            .with_bit(1, x.get(1))
            .with_bit(2, x.get(2) ^ (x.get(0) & x.get(1)));
        assert_eq!(
            table.coordinates(x),
            expected,
            "criterion 2: FAIL — coordinates mismatch at x={x}"
        );
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "criterion 2: FAIL — took {elapsed:?}, budget 1s"
    );
    pass(2, &format!(
        "translation matrices, closed forms and coordinates all match on F_2^3 ({elapsed:?})"
    ));
}

// ---------------------------------------------------------------------------
// 3. Some convention closes the trapdoor.  This is the experiment, not an
//    assumption: if nothing passes, dump the verdict matrix and fail.
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_convention_search_closes_the_trapdoor() {
    let start = Instant::now();
    let report = convention_search(DEFAULT_ROUNDS);
    let Some(chosen) = report.chosen.clone() else {
        panic!("criterion 3: FAIL — no convention closes the trapdoor; verdicts:\n{report}");
    };
    let row = report
        .rows
        .iter()
        .find(|row| row.id == chosen)
        .expect("criterion 3: FAIL — chosen id missing from the verdict rows");
    assert!(
        row.report.translation_verdicts.iter().all(|&v| v),
        "criterion 3: FAIL — chosen convention {chosen} has a failing translation;\n{report}"
    );
    assert!(
        row.report.round_verdict,
        "criterion 3: FAIL — chosen convention {chosen} has a failing round map;\n{report}"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "criterion 3: FAIL — took {elapsed:?}, budget 10s"
    );
    let passing = report.rows.iter().filter(|row| row.report.passes()).count();
    pass(3, &format!(
        "{passing} of {} conventions close the trapdoor; chosen {chosen} ({elapsed:?})",
        report.rows.len()
    ));
}

// ---------------------------------------------------------------------------
// 4. Attack cost: 7 encryptions (variant 1) or 7+7 (variant 2) per key,
//    exact reconstruction, all inside the 63-query default budgets, and the
//    same result over a real socket.
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_attack_query_counts_and_reconstruction() {
    let start = Instant::now();
    let spec = ToyCipherSpec::standard();
    let options = AttackOptions::default();

    for key_bits in 0..64u16 {
        let key = SessionKey::new(BitVector::new(6, key_bits)).unwrap();

        let mut oracle = LocalOracle::new(spec.clone(), key);
        let transcript = recover_affine(&mut oracle, AttackVariant::EncOnly, &options)
            .unwrap_or_else(|e| panic!("criterion 4: FAIL — variant 1, key {key}: {e}"));
        assert!(
            transcript.succeeded(),
            "criterion 4: FAIL — variant 1 did not recover under key {key}"
        );
        assert_eq!(
            (transcript.queries_enc(), transcript.queries_dec()),
            (7, 0),
            "criterion 4: FAIL — variant 1 query count under key {key}"
        );
        let recovered = transcript.map.as_ref().unwrap();
        for block in BitVector::all(6) {
            let cipher = spec.encrypt(block, &key);
            assert_eq!(
                recovered.encrypt_block(block),
                cipher,
                "criterion 4: FAIL — encryption mismatch at key {key}, block {block}"
            );
            assert_eq!(
                recovered.decrypt_block(cipher),
                block,
                "criterion 4: FAIL — decryption mismatch at key {key}, block {block}"
            );
        }

        let mut oracle = LocalOracle::new(spec.clone(), key);
        let transcript = recover_affine(&mut oracle, AttackVariant::EncDec, &options)
            .unwrap_or_else(|e| panic!("criterion 4: FAIL — variant 2, key {key}: {e}"));
        assert!(
            transcript.succeeded(),
            "criterion 4: FAIL — variant 2 did not recover under key {key}"
        );
        assert_eq!(
            (transcript.queries_enc(), transcript.queries_dec()),
            (7, 7),
            "criterion 4: FAIL — variant 2 query count under key {key}"
        );
        let recovered = transcript.map.as_ref().unwrap();
        assert!(
            recovered.m.mul(&recovered.m_inv).is_identity(),
            "criterion 4: FAIL — variant 2 inverse check under key {key}"
        );
    }

    // The same attack through the TCP oracle, with the server's own
    // budget enforcement in the loop.
    for key_bits in [0u16, 0b101010, 0b111111] {
        let key = SessionKey::new(BitVector::new(6, key_bits)).unwrap();
        let handle = serve(
            ServerConfig {
                spec: spec.clone(),
                key,
                enc_budget: 63,
                dec_budget: 63,
            },
            "127.0.0.1:0",
        )
        .expect("criterion 4: FAIL — could not bind the oracle server");
        for variant in [AttackVariant::EncOnly, AttackVariant::EncDec] {
            let mut client = OracleClient::connect(handle.local_addr())
                .expect("criterion 4: FAIL — could not connect to the oracle server");
            let transcript = recover_affine(&mut client, variant, &options).unwrap_or_else(|e| {
                panic!("criterion 4: FAIL — networked variant {variant}, key {key}: {e}")
            });
            client.quit().ok();
            assert!(
                transcript.succeeded(),
                "criterion 4: FAIL — networked variant {variant} failed under key {key}"
            );
            let expected = match variant {
                AttackVariant::EncOnly => (7, 0),
                AttackVariant::EncDec => (7, 7),
            };
            assert_eq!(
                (transcript.queries_enc(), transcript.queries_dec()),
                expected,
                "criterion 4: FAIL — networked query count, variant {variant}, key {key}"
            );
            let recovered = transcript.map.as_ref().unwrap();
            for block in BitVector::all(6) {
                assert_eq!(
                    recovered.encrypt_block(block),
                    spec.encrypt(block, &key),
                    "criterion 4: FAIL — networked reconstruction, key {key}, block {block}"
                );
            }
        }
        handle.shutdown();
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "criterion 4: FAIL — took {elapsed:?}, budget 5s"
    );
    pass(4, &format!(
        "64 keys × two variants at exactly 7 / 7+7 queries, exact on all blocks, \
         plus networked runs for 3 keys ({elapsed:?})"
    ));
}

// ---------------------------------------------------------------------------
// 5. Lower bound for maps affine over a hidden sum, exhaustive at width 3.
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_bound_holds_for_every_width3_affine_group() {
    let start = Instant::now();
    let products = valid_products(3).unwrap();
    assert_eq!(
        products.len(),
        8,
        "criterion 5: FAIL — expected 8 valid width-3 products, found {}",
        products.len()
    );
    for product in products {
        let report = verify_theorem_bound(product, ScanMode::Exhaustive)
            .unwrap_or_else(|e| panic!("criterion 5: FAIL — {product}: {e}"));
        assert_eq!(
            report.scanned,
            1344,
            "criterion 5: FAIL — {product}: scanned {} maps, want 1344",
            report.scanned
        );
        let expected_bound = 1u32 << bound_exponent(3, product.u_space().len());
        assert_eq!(
            report.bound, expected_bound,
            "criterion 5: FAIL — {product}: bound {} != 2^max(2, dim U) = {expected_bound}",
            report.bound
        );
        assert!(
            report.min_delta >= report.bound,
            "criterion 5: FAIL — {product}: min delta {} below bound {}",
            report.min_delta,
            report.bound
        );
    }
    let elapsed = start.elapsed();
    pass(5, &format!(
        "all 8 width-3 products: 1344 affine maps each, delta never below 2^max(2, dim U) \
         ({elapsed:?})"
    ));
}

// ---------------------------------------------------------------------------
// 6. Two-sweep minimum-delta scan: exhaustive at width 3, seeded sampling
//    at widths 4 and 5 (the width-4 exhaustive walk is the ignored long
//    test below).
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_two_sweep_scan_is_clean() {
    let start = Instant::now();

    let w3 = fact1_scan(3, ScanMode::Exhaustive)
        .unwrap_or_else(|e| panic!("criterion 6: FAIL — width 3 exhaustive: {e}"));
    assert_eq!(
        (w3.sweep_a.pairs, w3.sweep_b.pairs),
        (10752, 1344),
        "criterion 6: FAIL — width 3 pair counts"
    );
    assert!(
        w3.min_delta() >= 4,
        "criterion 6: FAIL — width 3 min delta {} below 4",
        w3.min_delta()
    );

    let w4 = fact1_scan(4, ScanMode::Sampled { seed: 0x5EED, budget: 100_000 })
        .unwrap_or_else(|e| panic!("criterion 6: FAIL — width 4 sampled: {e}"));
    assert!(
        w4.sweep_a.pairs >= 100_000 && w4.sweep_b.pairs >= 100_000,
        "criterion 6: FAIL — width 4 sampled fewer than 1e5 pairs per sweep"
    );
    assert!(
        w4.min_delta() >= 8,
        "criterion 6: FAIL — width 4 min delta {} below 8",
        w4.min_delta()
    );

    let w5 = fact1_scan(5, ScanMode::Sampled { seed: 0x5EED, budget: 10_000 })
        .unwrap_or_else(|e| panic!("criterion 6: FAIL — width 5 sampled: {e}"));
    assert!(
        w5.sweep_a.pairs >= 10_000 && w5.sweep_b.pairs >= 10_000,
        "criterion 6: FAIL — width 5 sampled fewer than 1e4 pairs per sweep"
    );
    assert!(
        w5.min_delta() >= 16,
        "criterion 6: FAIL — width 5 min delta {} below 16",
        w5.min_delta()
    );

    let elapsed = start.elapsed();
    pass(6, &format!(
        "zero violations: width 3 exhaustive (10752 + 1344 pairs), width 4 sampled \
         (2×1e5), width 5 sampled (2×1e4) ({elapsed:?})"
    ));
}

/// The opt-in exhaustive width-4 walk (both sweeps over all 106 valid
/// products; sweep B alone is 106 × 20160 linear maps).  Run with
/// `cargo test --test acceptance -- --ignored criterion_06_long`.
#[test]
#[ignore = "exhaustive width-4 sweeps take minutes; opt in explicitly"]
fn criterion_06_long_width4_exhaustive() {
    let start = Instant::now();
    let report = fact1_scan(4, ScanMode::Exhaustive)
        .unwrap_or_else(|e| panic!("criterion 6 (long): FAIL — width 4 exhaustive: {e}"));
    assert_eq!(
        report.sweep_b.pairs,
        106 * 20160,
        "criterion 6 (long): FAIL — sweep B pair count"
    );
    assert!(
        report.min_delta() >= 8,
        "criterion 6 (long): FAIL — min delta {} below 8",
        report.min_delta()
    );
    let elapsed = start.elapsed();
    pass(6, &format!(
        "width 4 exhaustive clean: sweep A {} pairs, sweep B {} pairs ({elapsed:?})",
        report.sweep_a.pairs, report.sweep_b.pairs
    ));
}

// ---------------------------------------------------------------------------
// 7. Structure of every valid product: dim U ≥ 1 and the annihilator
//    floor 2^(⌊(n−1)/2⌋+1), with |Fix(κ_a)| = |Ann(a)| cross-checked.
// ---------------------------------------------------------------------------

fn check_product_structure(product: &RingProduct, criterion: u32) {
    let n = product.width();
    assert!(
        !product.u_space().is_empty(),
        "criterion {criterion}: FAIL — {product} has dim U = 0"
    );
    let floor = (u32::from(n) - 1) / 2 + 1;
    for a in BitVector::all(n).filter(|a| !a.is_zero()) {
        let ann_dim = product.annihilator(a).len() as u32;
        assert!(
            ann_dim >= floor,
            "criterion {criterion}: FAIL — {product}: |Ann({a})| = 2^{ann_dim} below 2^{floor}"
        );
        // Fix(κ_a) is the kernel of κ_a + I; it must be the annihilator.
        let fix_dim =
            product.kappa(a).add(&BitMatrix::identity(n)).kernel_basis().len() as u32;
        assert_eq!(
            fix_dim, ann_dim,
            "criterion {criterion}: FAIL — {product}: |Fix(kappa_{a})| != |Ann({a})|"
        );
    }
}

#[test]
fn criterion_07_u_space_and_annihilator_floors() {
    let start = Instant::now();
    let mut checked = 0usize;
    for width in [3u8, 4] {
        for product in valid_products(width).unwrap() {
            check_product_structure(product, 7);
            checked += 1;
        }
    }
    let mut sampled = 0usize;
    for product in
        enumerate_products(5, EnumerationMode::Sampled { seed: 0xA111, limit: 1_000 }).unwrap()
    {
        check_product_structure(&product, 7);
        sampled += 1;
    }
    assert_eq!(
        sampled, 1_000,
        "criterion 7: FAIL — width-5 sampler produced {sampled} products, want 1000"
    );
    let elapsed = start.elapsed();
    pass(7, &format!(
        "dim U ≥ 1 and annihilator floors hold for all {checked} products at widths 3–4 \
         and 1000 sampled at width 5 ({elapsed:?})"
    ));
}

// ---------------------------------------------------------------------------
// 8. The annihilator floor is tight on the exterior algebra with three
//    generators (width 7): the minimum is exactly 2^4.
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_exterior_algebra_meets_the_floor() {
    let product = RingProduct::exterior_algebra(3);
    assert_eq!(product.width(), 7, "criterion 8: FAIL — expected width 7");
    let min_dim = BitVector::all(7)
        .filter(|a| !a.is_zero())
        .map(|a| product.annihilator(a).len())
        .min()
        .unwrap();
    assert_eq!(
        min_dim, 4,
        "criterion 8: FAIL — min |Ann(a)| is 2^{min_dim}, want exactly 2^4"
    );
    pass(8, "exterior algebra on 3 generators: min |Ann(a)| = 2^4 = 2^(⌊6/2⌋+1) exactly");
}

// ---------------------------------------------------------------------------
// 9. Parallel composition of a 4-uniform width-4 permutation with itself
//    is exactly 2^6-uniform.
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_parallel_composition_delta() {
    let start = Instant::now();
    let f = search_permutation_with_delta(4, 4, 0xF00D, 1_000_000)
        .expect("criterion 9: FAIL — no 4-uniform width-4 permutation found");
    assert_eq!(
        delta_uniformity(&f, &GroupOp::plus(4)),
        4,
        "criterion 9: FAIL — searched permutation is not 4-uniform"
    );
    let h = parallel_map(&f, &f);
    let delta = delta_uniformity(&h, &GroupOp::plus(8));
    assert_eq!(
        delta, 64,
        "criterion 9: FAIL — delta of the parallel map is {delta}, want 2^6"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "criterion 9: FAIL — took {elapsed:?}, budget 1s"
    );
    pass(9, &format!("delta(f) = 4 on width 4 gives delta(f×f) = 2^6 on width 8 ({elapsed:?})"));
}

// ---------------------------------------------------------------------------
// 10. Oracle equivalence: the fast delta scan against a naive triple loop,
//     and coordinates against the brute-forced combination table.
// ---------------------------------------------------------------------------

/// Textbook three-loop differential uniformity, kept deliberately naive.
fn naive_delta(f: &PermutationTable, op: &GroupOp) -> u32 {
    let size = 1u16 << f.width();
    let mut best = 0u32;
    for a in 1..size {
        for b in 0..size {
            let mut count = 0u32;
            for x in 0..size {
                let xa = op.apply(BitVector::new(f.width(), x), BitVector::new(f.width(), a));
                let lhs = op.apply(
                    f.apply(xa),
                    f.apply(BitVector::new(f.width(), x)),
                );
                if lhs.bits() == b {
                    count += 1;
                }
            }
            best = best.max(count);
        }
    }
    best
}

/// Brute-forced combination map of `basis` under the product's circle
/// operation: λ ↦ the circle-sum of the basis vectors selected by λ,
/// accumulated in index order.
fn brute_force_combination(
    product: &RingProduct,
    basis: &[BitVector],
    lambda: BitVector,
) -> BitVector {
    let mut acc = BitVector::zero(product.width());
    for (i, b) in basis.iter().enumerate() {
        if lambda.get(i) {
            acc = product.circ(acc, *b);
        }
    }
    acc
}

#[test]
fn criterion_10_delta_scan_matches_naive_brute_force() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xDE17A);
    let plus = GroupOp::plus(4);
    for round in 0..100 {
        let mut images: Vec<u16> = (0..16).collect();
        images.shuffle(&mut rng);
        let f = PermutationTable::new(4, images).unwrap();
        let fast = delta_uniformity(&f, &plus);
        let slow = naive_delta(&f, &plus);
        assert_eq!(
            fast, slow,
            "criterion 10: FAIL — delta scan disagrees with brute force on sample {round}"
        );
    }
    pass(10, "fast delta scan equals the naive triple loop on 100 random width-4 permutations");
}

#[test]
fn criterion_10_coordinates_match_the_table_oracle() {
    let standard_basis: Vec<BitVector> = (0..3).map(|i| BitVector::unit(3, i)).collect();
    for product in valid_products(3).unwrap() {
        let table = match CoordinateTable::standard(product) {
            Ok(table) => table,
            Err(Error::NotABasis) => {
                // The brute force must agree that the standard basis fails:
                // its combination map cannot be a bijection.
                let mut images: Vec<u16> = BitVector::all(3)
                    .map(|l| brute_force_combination(product, &standard_basis, l).bits())
                    .collect();
                images.sort_unstable();
                images.dedup();
                assert!(
                    images.len() < 8,
                    "criterion 10: FAIL — {product}: standard basis rejected but its \
                     combination map is bijective"
                );
                CoordinateTable::auto(product)
            }
            Err(e) => panic!("criterion 10: FAIL — {product}: {e}"),
        };
        // Against the 2^n-entry oracle: combine agrees with the brute
        // force everywhere, and coordinates inverts it everywhere.
        for lambda in BitVector::all(3) {
            let oracle = brute_force_combination(product, table.basis(), lambda);
            assert_eq!(
                table.combine(lambda),
                oracle,
                "criterion 10: FAIL — {product}: combine({lambda}) disagrees with brute force"
            );
            assert_eq!(
                table.coordinates(oracle),
                lambda,
                "criterion 10: FAIL — {product}: coordinates does not invert the oracle at \
                 λ={lambda}"
            );
        }
    }
    pass(10, "coordinates invert the brute-forced combination map for all 8 width-3 products");
}
