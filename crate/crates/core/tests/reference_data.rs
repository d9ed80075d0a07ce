//! Published witnesses and table values.

use covering::asymcover::{classify_minimal_asym, lift_banded, puncture_to_banded, BandedDecomposition, KnownValues};
use covering::designfile::{emit_design, parse_design, Format};
use covering::isocanon::{are_isomorphic, automorphism_order, canonical_form};
use covering::repro::{d8_witness_file, run_repro, t4_value, Profile, ReproOptions, TableId, T4_OPEN};
use covering::search::SolveOptions;
use covering::setsys::{is_asym_cover, is_banded, is_cover_design, weight_counts, Mask, SetSystem};

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out
}

#[test]
fn length_eight_witness() {
    let d = parse_design(&d8_witness_file()).unwrap();
    assert_eq!(d.format, Format::Hex);
    let d = d.system;
    assert_eq!(d.len(), 58);
    assert!(is_asym_cover(&d, 1).unwrap());
    assert_eq!(weight_counts(&d).counts, vec![0, 1, 5, 8, 14, 14, 11, 4, 1]);

    // reading the hex least-significant-bit first is a relabeling, so it covers too
    let lsb = SetSystem::new(8, d.blocks().iter().map(|b| b.reverse_bits() >> 24)).unwrap();
    assert!(is_asym_cover(&lsb, 1).unwrap());

    // The group is not trivial: brute force over all 8! relabelings agrees
    // with the canonical labeling.
    let brute = all_perms(8).iter().filter(|p| d.permuted(p) == d).count() as u64;
    assert_eq!(automorphism_order(&d).unwrap(), brute);
    assert_eq!(brute, 4);
}

#[test]
fn hex_round_trip_of_witness() {
    let text = d8_witness_file();
    let d = parse_design(&text).unwrap().system;
    let again = parse_design(&emit_design(&d, None, Format::Hex)).unwrap().system;
    assert_eq!(again, d);
    let lower = parse_design(&text.to_lowercase()).unwrap().system;
    assert_eq!(lower, d);
}

fn four_point_covers() -> Vec<(SetSystem, bool)> {
    let rows: [[&str; 6]; 4] = [
        ["1111", "1110", "1001", "0101", "0011", "0000"],
        ["1111", "1110", "1101", "0011", "1100", "0001"],
        ["1111", "1110", "1101", "0011", "1000", "0100"],
        ["1111", "1110", "1101", "0011", "0101", "1000"],
    ];
    rows.iter()
        .zip([true, true, false, false])
        .map(|(r, b)| (SetSystem::from_bitstrings(4, r).unwrap(), b))
        .collect()
}

#[test]
fn listed_four_point_covers() {
    let listed = four_point_covers();
    for (d, banded) in &listed {
        assert!(is_asym_cover(d, 1).unwrap());
        assert_eq!(is_banded(d), *banded);
    }
    for i in 0..4 {
        for j in i + 1..4 {
            assert!(!are_isomorphic(&listed[i].0, &listed[j].0).unwrap());
        }
    }
    let c = classify_minimal_asym(4, 6, &SolveOptions::default()).unwrap();
    for (d, _) in &listed {
        let key = canonical_form(d).unwrap().canonical_blocks;
        assert!(c
            .classes
            .iter()
            .any(|(e, _)| canonical_form(e).unwrap().canonical_blocks == key));
    }
    // The listed banded pair is the two classes of lifted designs.
    assert_eq!(c.lifted_classes, 2);
}

/// Brute-force count of size-6 coverings of length 4 up to relabeling.
#[test]
fn four_point_classification_by_brute_force() {
    let perms = all_perms(4);
    let mut classes: Vec<(Vec<Mask>, bool)> = Vec::new();
    let mut pick = [0u32; 6];
    fn rec(start: u32, depth: usize, pick: &mut [u32; 6], out: &mut Vec<Vec<Mask>>) {
        if depth == 6 {
            out.push(pick.to_vec());
            return;
        }
        for v in start..16 {
            pick[depth] = v;
            rec(v + 1, depth + 1, pick, out);
        }
    }
    let mut all = Vec::new();
    rec(0, 0, &mut pick, &mut all);
    for blocks in all {
        let d = SetSystem::new(4, blocks).unwrap();
        if !is_asym_cover(&d, 1).unwrap() {
            continue;
        }
        let min = perms.iter().map(|p| d.permuted(p).blocks().to_vec()).min().unwrap();
        if !classes.iter().any(|c| c.0 == min) {
            classes.push((min, is_banded(&d)));
        }
    }
    let c = classify_minimal_asym(4, 6, &SolveOptions::default()).unwrap();
    assert_eq!(c.classes.len(), classes.len());
    assert_eq!(
        c.classes.iter().filter(|x| x.1).count(),
        classes.iter().filter(|x| x.1).count()
    );
    assert_eq!((classes.len(), classes.iter().filter(|x| x.1).count()), (8, 6));
}

/// The 31 vectors of length 8: all-ones, two weight-6 families, a Steiner
/// quadruple system and a perfect matching.
fn length_eight_union() -> SetSystem {
    let pair = |a: usize, b: usize| (1u32 << a) | (1 << b);
    let mut blocks = vec![0xFFu32];
    for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        blocks.push(0xFF & !pair(a, b));
        blocks.push(0xFF & !pair(a + 4, b + 4));
    }
    // planes of the affine 3-space over GF(2), points labeled 0..7
    for a in 0..8u32 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                let d = a ^ b ^ c;
                if d > c {
                    blocks.push((1 << a) | (1 << b) | (1 << c) | (1 << d));
                }
            }
        }
    }
    for i in 0..4 {
        blocks.push(pair(2 * i, 2 * i + 1));
    }
    SetSystem::new(8, blocks).unwrap()
}

#[test]
fn length_seven_from_punctured_union() {
    let u = length_eight_union();
    assert_eq!(u.len(), 31);
    for (k, size) in [(8, 1), (6, 12), (4, 14), (2, 4)] {
        let layer = u.layer(k);
        assert_eq!(layer.len(), size);
        assert!(is_cover_design(&layer, k as usize, k as usize - 1).unwrap());
    }
    let dec = BandedDecomposition::from_blocks(7, &u).unwrap();
    for coord in 1..=8 {
        let d = puncture_to_banded(&dec, coord).unwrap();
        assert_eq!(d.len(), 31);
        assert!(is_asym_cover(&d, 1).unwrap());
        assert!(is_banded(&d));
        if coord == 8 {
            assert_eq!(lift_banded(&d).unwrap().blocks(), u);
        }
    }
}

#[test]
fn bundled_known_values_agree_with_table_constants() {
    let kv = KnownValues::bundled();
    // the table has columns k = 2..11
    for n in 2..=13 {
        for k in 2..=n.min(11) {
            let e = kv.get(n, k).unwrap_or_else(|| panic!("missing ({n},{k})"));
            match t4_value(n, k) {
                Some(v) => assert_eq!(e.exact(), Some(v), "({n},{k})"),
                None => {
                    let open = T4_OPEN.iter().find(|o| o.0 == n && o.1 == k).unwrap();
                    assert_eq!((e.lo, e.hi), (open.2, open.3));
                }
            }
        }
    }
    assert_eq!(kv.get(14, 10).and_then(|e| e.exact()), Some(259));
}

#[test]
fn quick_tables_one_and_five() {
    for t in [TableId::T1, TableId::T5] {
        let r = run_repro(t, &ReproOptions::new(Profile::Quick)).unwrap();
        let totals = r.totals();
        assert_eq!(totals.mismatched, 0, "{}", r.render_text());
        assert_eq!(totals.skipped, 0, "{}", r.render_text());
        assert_eq!(r.exit_code(true), 0);
    }
}
