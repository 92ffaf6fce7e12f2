use sdbc::model::{gen_synthetic, Assignment, SyntheticConfig};
use sdbc::uai::{read_uai, write_uai, TableMode};
use sdbc::Error;

const FIXTURE: &str = "MARKOV\n1\n2\n1\n1 0\n\n2\n 3 -1\n";

#[test]
fn fixture_parses_and_round_trips() {
    let m = read_uai(FIXTURE, TableMode::RawEnergy).unwrap();
    assert_eq!(m.unary(0), &[3.0, -1.0]);
    let back = write_uai(&m, TableMode::RawEnergy);
    assert_eq!(
        back.split_whitespace().collect::<Vec<_>>(),
        FIXTURE.split_whitespace().collect::<Vec<_>>()
    );
}

#[test]
fn synthetic_round_trip_keeps_every_table_entry() {
    let m = gen_synthetic(&SyntheticConfig {
        n: 6,
        h: 3,
        kappa: 3.0,
        omega: 0.4,
        seed: 11,
    })
    .unwrap();
    for mode in [TableMode::RawEnergy, TableMode::Potentials] {
        let r = read_uai(&write_uai(&m, mode), mode).unwrap();
        assert_eq!(r.edges(), m.edges());
        for p in 0..m.num_nodes() {
            for (a, b) in m.unary(p).iter().zip(r.unary(p)) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
        for e in 0..m.num_edges() {
            for (a, b) in m.pairwise_table(e).iter().zip(r.pairwise_table(e)) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
        let x = Assignment(vec![2, 0, 1, 1, 0, 2]);
        assert!((m.energy(&x).unwrap() - r.energy(&x).unwrap()).abs() <= 1e-11);
    }
}

#[test]
fn malformed_inputs() {
    let cases = [
        ("MARKOV\n2\n2 2\n2\n2 0 1\n2 0 1\n4\n0 0 0 0\n4\n0 0 0 0\n", 6),
        ("MARKOV\n1\n2\n1\n1 0\n2\n1 x\n", 7),
        ("MARKOV\n1\n2\n1\n1 3\n2\n1 1\n", 5),
        ("MARKOV\n1\n2\n1\n1 0\n2\n1 1\n7\n", 8),
        ("MARKOV\n1\n0\n0\n", 3),
    ];
    for (text, line) in cases {
        match read_uai(text, TableMode::RawEnergy) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?} gave {other:?}"),
        }
    }
    assert!(matches!(
        read_uai("MARKOV\n1\n2\n1\n1 0\n2\n-1 1\n", TableMode::Potentials),
        Err(Error::Parse { line: 7, .. })
    ));
}
