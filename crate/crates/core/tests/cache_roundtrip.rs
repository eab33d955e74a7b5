use spinlab_core::cache::{Cache, CacheEntry};
use spinlab_core::field::FieldParams;

const FIELDS: [(u64, u64, u64); 7] = [(3, 7, 1), (5, 11, 1), (7, 43, 3), (11, 23, 3), (13, 53, 5), (17, 103, 17), (19, 191, 27)];

#[test]
fn every_table_field_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    for (n, ell, m) in FIELDS {
        let p = FieldParams::new(n, ell, 1).unwrap();
        let stored = CacheEntry::derive(p).unwrap();
        cache.store(&stored).unwrap();
        let loaded = cache.load(&p).unwrap().expect("entry present");
        assert_eq!(loaded, stored);
        assert!(loaded.checksum_ok());
        assert_eq!(CacheEntry::new(loaded.payload.clone()).checksum, stored.checksum);
        assert!(loaded.matches_rederived().unwrap());
        assert_eq!(loaded.m_k().unwrap(), m);
        assert_eq!(loaded.star_table().unwrap().m_k, m);
    }
}

#[test]
fn integers_are_strings() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(dir.path());
    let p = FieldParams::new(5, 11, 1).unwrap();
    let path = cache.store(&CacheEntry::derive(p).unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(v["payload"]["m_k"].is_string());
    assert!(v["payload"]["minpoly"][0].is_string());
    assert!(v["payload"]["mult_table"][0][0][0].is_string());
    assert_eq!(v["payload"]["gram"]["provenance"], "oracle");
    assert_eq!(v["checksum"].as_str().unwrap().len(), 64);
}
