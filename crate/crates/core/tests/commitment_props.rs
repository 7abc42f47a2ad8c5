mod common;

use bubblescope::commitment::{commit, sha256_hex, sha512_hex, verify, CommitmentRecord, MasterLedger, Verification};
use chrono::{Duration, NaiveDate};
use common::sha2_ref;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn day(n: i64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2011, 1, 1).unwrap() + Duration::days(n)
}

#[test]
fn published_vectors_agree_with_reference_oracle() {
    for (message, d256, d512) in sha2_ref::published_vectors() {
        assert_eq!(sha2_ref::sha256(&message), d256);
        assert_eq!(sha2_ref::sha512(&message), d512);
        assert_eq!(sha256_hex(&message), d256);
        assert_eq!(sha512_hex(&message), d512);
    }
}

#[test]
fn random_messages_agree_with_reference_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // Lengths around the padding boundaries of both block sizes.
    for len in [0, 1, 55, 56, 63, 64, 65, 111, 112, 119, 127, 128, 129, 1000] {
        let message: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        assert_eq!(sha256_hex(&message), sha2_ref::sha256(&message), "len {len}");
        assert_eq!(sha512_hex(&message), sha2_ref::sha512(&message), "len {len}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commit_then_verify_matches(message in prop::collection::vec(any::<u8>(), 0..4096)) {
        let record = commit(&message, "doc.txt", day(0), day(180)).unwrap();
        prop_assert_eq!(verify(&message, &record).unwrap(), Verification::Match);
    }

    #[test]
    fn any_byte_flip_is_detected(message in prop::collection::vec(any::<u8>(), 1..2048), pos in any::<prop::sample::Index>(), bit in 0u8..8) {
        let record = commit(&message, "doc.txt", day(0), day(180)).unwrap();
        let mut tampered = message.clone();
        let i = pos.index(tampered.len());
        tampered[i] ^= 1 << bit;
        prop_assert_ne!(verify(&tampered, &record).unwrap(), Verification::Match);
    }
}

#[test]
fn large_documents_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for len in [100_000usize, 1_000_000] {
        let message: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let record = commit(&message, "big.bin", day(0), day(1)).unwrap();
        assert_eq!(verify(&message, &record).unwrap(), Verification::Match);
    }
}

fn random_record(rng: &mut impl Rng, i: usize) -> CommitmentRecord {
    let doc: Vec<u8> = (0..rng.gen_range(0..64)).map(|_| rng.gen()).collect();
    commit(&doc, &format!("forecast-{i}.txt"), day(i as i64), day(i as i64 + 180)).unwrap()
}

#[test]
fn ledger_versions_are_monotone_under_random_appends() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let mut ledger = MasterLedger::new();
        let mut next = 0;
        let mut date = 0;
        for _ in 0..rng.gen_range(1..8) {
            let batch: Vec<_> = (0..rng.gen_range(1..4))
                .map(|_| {
                    next += 1;
                    random_record(&mut rng, next)
                })
                .collect();
            date += rng.gen_range(0..30);
            ledger = ledger.append_version(&batch, day(date)).unwrap();
        }
        ledger.validate().unwrap();
        let versions = ledger.versions();
        for i in 0..versions.len() {
            for j in i + 1..versions.len() {
                assert!(versions[i].records.iter().all(|r| versions[j].records.contains(r)));
            }
        }
        assert_eq!(MasterLedger::parse(&ledger.render()).unwrap(), ledger);
    }
}
