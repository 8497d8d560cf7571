//! Guards against accidental edits to the embedded phase tables: frozen
//! digests over a canonical rendering, plus literal spot checks of rows
//! transcribed independently when the tables were brought up.

use cpseq::tables;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[test]
fn universal_table_digest_is_frozen() {
    let mut s = String::new();
    for (label, phases) in tables::UNIVERSAL {
        s.push_str(label);
        for p in *phases {
            s.push_str(&format!(":{p:.15e}"));
        }
        s.push('\n');
    }
    assert_eq!(fnv1a(s.as_bytes()), 0xf503_0aab_6a44_81d4);
}

#[test]
fn theta_table_digests_are_frozen() {
    for (table, digest) in [
        (tables::THETA_BB, 0x5663_a95b_51e8_1834u64),
        (tables::THETA_NB, 0xb564_1a5e_88a8_5824),
    ] {
        let mut s = String::new();
        for (n, p, phases) in table {
            s.push_str(&format!("{n}:{p:.1}"));
            for f in *phases {
                s.push_str(&format!(":{f:.15e}"));
            }
            s.push('\n');
        }
        assert_eq!(fnv1a(s.as_bytes()), digest);
    }
}

#[test]
fn spot_rows_match_the_published_values() {
    // independent literal transcriptions, one row per table block
    assert_eq!(
        tables::universal_row("U5a").unwrap(),
        &[0.0, 5.0 / 6.0, 1.0 / 3.0, 5.0 / 6.0, 0.0]
    );
    assert_eq!(
        tables::universal_row("U9b").unwrap(),
        &[0.0, 0.634, 1.362, 0.565, 0.303, 0.565, 1.362, 0.634, 0.0]
    );
    assert_eq!(
        tables::theta_row(tables::THETA_BB, 3, 0.3).unwrap(),
        &[0.7778, 1.1866]
    );
    assert_eq!(
        tables::theta_row(tables::THETA_BB, 5, 0.5).unwrap(),
        &[0.375, 1.5, 1.375, 0.0]
    );
    assert_eq!(
        tables::theta_row(tables::THETA_BB, 6, 0.7).unwrap(),
        &[0.4, 1.6, 1.9689, 0.7689, 0.3689]
    );
    assert_eq!(
        tables::theta_row(tables::THETA_NB, 4, 0.6).unwrap(),
        &[0.2124, 1.0732, 1.2857]
    );
    assert_eq!(
        tables::theta_row(tables::THETA_NB, 8, 0.9).unwrap(),
        &[1.2906, 0.5965, 0.3508, 1.6240, 1.3784, 0.6843, 1.9749]
    );
}

#[test]
fn table_shapes_are_complete() {
    assert_eq!(tables::UNIVERSAL.len(), 13);
    for (label, phases) in tables::UNIVERSAL {
        // label encodes the pulse count; rows are phase-symmetric
        let n: usize = label[1..].trim_end_matches(['a', 'b']).parse().unwrap();
        assert_eq!(phases.len(), n);
        for i in 0..n {
            assert_eq!(phases[i], phases[n - 1 - i], "{label} not symmetric");
        }
    }
    for (lens, table) in [
        (&[2usize, 3, 4, 5, 6][..], tables::THETA_BB),
        (&[2, 4, 6, 8][..], tables::THETA_NB),
    ] {
        assert_eq!(table.len(), lens.len() * tables::THETA_TARGETS.len());
        for &n in lens {
            for &p in tables::THETA_TARGETS {
                let row = tables::theta_row(table, n, p).unwrap();
                assert_eq!(row.len(), n - 1);
            }
        }
    }
    // the two-pulse blocks coincide: one free phase serves both characters
    for &p in tables::THETA_TARGETS {
        assert_eq!(
            tables::theta_row(tables::THETA_BB, 2, p).unwrap(),
            tables::theta_row(tables::THETA_NB, 2, p).unwrap()
        );
    }
}
