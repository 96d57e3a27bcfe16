mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmdd::qasm::{emit, parse, ParseErrorKind};
use qmdd::reorder::{reorder, ReorderMode};

#[test]
fn generator_grid_round_trips() {
    for (name, c) in common::family_grid(9) {
        for mode in ReorderMode::ALL_MODES {
            let (rewritten, _) = reorder(&c, mode);
            let text = emit(&rewritten);
            let back = parse(&text).unwrap_or_else(|e| panic!("{name}/{mode}: {e}\n{text}"));
            assert_eq!(back.circuit, rewritten, "{name}/{mode}");
            assert_eq!(emit(&back.circuit), text, "emit must be deterministic");
        }
    }
}

#[test]
fn reordered_qft3_carries_permutation() {
    let (c, _) = reorder(&qmdd::generators::qft(3, true).unwrap(), ReorderMode::Trailing);
    assert!(emit(&c).lines().any(|l| l == "// output_permutation: 2 1 0"));
}

#[test]
fn deleted_semicolons_are_syntax_errors() {
    let text = emit(&common::family_grid(4).pop().unwrap().1);
    let positions: Vec<usize> = text.match_indices(';').map(|(i, _)| i).collect();
    for &pos in &positions {
        let mut broken = text.clone();
        broken.remove(pos);
        // Dropping the last semicolon leaves a dangling statement; any other one
        // glues two statements together. Both must fail.
        let err = parse(&broken).expect_err(&broken);
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_) | ParseErrorKind::Unsupported(_)), "{err}");
    }
}

#[test]
fn unknown_identifiers_are_reported_with_lines() {
    let text = emit(&qmdd::generators::entangled_qft(4).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate().skip(3) {
        let Some((gate, rest)) = line.split_once(' ') else { continue };
        let mnemonic = gate.split('(').next().unwrap();
        let mutated = format!("{}zz{}", mnemonic, &gate[mnemonic.len()..]);
        let mut copy = lines.clone();
        let replaced = format!("{mutated} {rest}");
        copy[i] = &replaced;
        let err = parse(&copy.join("\n")).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownGate(format!("{mnemonic}zz")));
        assert_eq!(err.line, i + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_circuits_round_trip(seed in any::<u64>(), n in 1usize..=8, depth in 0usize..=40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::random_circuit(&mut rng, n, depth);
        let (rewritten, _) = reorder(&c, ReorderMode::All);
        for circuit in [&c, &rewritten] {
            prop_assert_eq!(&parse(&emit(circuit)).unwrap().circuit, circuit);
        }
    }

    #[test]
    fn mangled_input_never_panics(seed in any::<u64>(), cut in 0usize..400, junk in "[ -~\n]{0,8}") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = emit(&common::random_circuit(&mut rng, 4, 12));
        let cut = text.char_indices().map(|(i, _)| i).nth(cut).unwrap_or(text.len());
        let mangled = format!("{}{}{}", &text[..cut], junk, &text[cut..]);
        let _ = parse(&mangled);
    }
}
