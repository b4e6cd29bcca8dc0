use proptest::prelude::*;
use waybell_core::io::{curve_table, fmt_sig, round_sig, CurveTable};
use waybell_core::StateKind;

proptest! {
    #[test]
    fn formatting_is_idempotent(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let once = round_sig(x);
        prop_assert_eq!(round_sig(once), once);
        prop_assert_eq!(fmt_sig(once), fmt_sig(x));
        if x != 0.0 {
            prop_assert!(((once - x) / x).abs() <= 5e-12);
        }
    }

    #[test]
    fn tables_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..20)) {
        let mut t = CurveTable::new(vec!["theta".into(), "a".into(), "b".into()]);
        for r in rows {
            t.push_row(r).unwrap();
        }
        let want = t.rounded();
        prop_assert_eq!(&CurveTable::from_csv(&t.to_csv()).unwrap(), &want);
        prop_assert_eq!(&CurveTable::from_json(&t.to_json().unwrap()).unwrap(), &want);
    }
}

#[test]
fn curve_rows_anchor() {
    let kinds = [StateKind::Singlet];
    let t = curve_table(&kinds, &[0.77], 17).unwrap();
    let reread = CurveTable::from_csv(&t.to_csv()).unwrap();
    let first = &reread.rows[0];
    assert_eq!(&first[1..], &[-1.0, -1.0, -1.0]);
    // θ = π/2 is row 4 of a 17-point grid over [0, 2π]
    for v in &reread.rows[4][1..] {
        assert!(v.abs() < 1e-12);
    }
    // θ = π/8 needs a 33-point grid
    let fine = curve_table(&kinds, &[0.77], 33).unwrap();
    let row = &fine.rows[2];
    assert!((row[1] + 0.923879532511).abs() < 1e-12);
    assert!((row[3] + 0.8909451).abs() < 1e-6);
    assert!(t.to_csv().ends_with('\n') && !t.to_csv().contains('\r'));
}
