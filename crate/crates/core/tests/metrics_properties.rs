use proptest::prelude::*;
use splforge_core::metrics::{
    compare, detect_duplicates, measure, minutes_to_days, package_cycles, package_graph, scan_text, MeasureOptions,
    MetricsReport, SourceText,
};

fn source_line() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "", "   ", "// note", "/* open", "end */", "x = 1;", "if (a && b) {", "}", "while (x) { x = x - 1; }",
        "function f(a) {", "s = \"// not a comment\";", "c = 'x' ? 1 : 2;", "/* one-liner */ y = 2;",
        "  // TODO later", "import a.b;", "package p.q;", "{", "case 1: break;",
    ])
    .prop_map(String::from)
}

fn source() -> impl Strategy<Value = String> {
    prop::collection::vec(source_line(), 0..40).prop_map(|l| l.join("\n"))
}

proptest! {
    #[test]
    fn lines_partition(text in source()) {
        let u = scan_text(&text, "p.gsrc");
        prop_assert_eq!(u.code_lines + u.comment_lines + u.blank_lines, u.physical_lines);
        prop_assert_eq!(u.physical_lines, text.lines().count());
        prop_assert!(u.complexity() >= u.functions.len());
        for f in &u.functions {
            prop_assert!(f.complexity >= 1);
            prop_assert!(f.effective_lines >= 1);
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,300}") {
        let u = scan_text(&text, "f.gsrc");
        prop_assert_eq!(u.code_lines + u.comment_lines + u.blank_lines, u.physical_lines);
    }

    #[test]
    fn copying_a_file_duplicates_all_its_code(text in source()) {
        let u = scan_text(&text, "a.gsrc");
        prop_assume!(u.code_lines >= 6);
        let files = [SourceText { path: "a.gsrc", text: &text }, SourceText { path: "b.gsrc", text: &text }];
        let r = detect_duplicates(&files, 6);
        prop_assert_eq!(r.duplicate_lines, 2 * u.code_lines);
        for b in &r.blocks {
            prop_assert!(b.line_count >= 6 && b.occurrences.len() >= 2);
        }
    }

    #[test]
    fn measuring_is_order_independent(a in source(), b in source(), c in source()) {
        let files = vec![
            ("a.gsrc".to_string(), a.into_bytes()),
            ("b.gsrc".to_string(), b.into_bytes()),
            ("c.gsrc".to_string(), c.into_bytes()),
        ];
        let mut reversed = files.clone();
        reversed.reverse();
        let opts = MeasureOptions::default();
        let r = measure(&files, &opts).unwrap();
        prop_assert_eq!(&r, &measure(&reversed, &opts).unwrap());
        prop_assert!(r.duplicate_lines <= r.total_code_lines);
        prop_assert_eq!(r.debt_days, minutes_to_days(r.debt_minutes));
    }

    #[test]
    fn cycles_iff_no_topological_order(edges in prop::collection::vec((0u8..5, 0u8..5), 0..10)) {
        let mut units = Vec::new();
        for p in 0..5u8 {
            let mut text = format!("package p{p};\n");
            for (a, b) in &edges {
                if *a == p {
                    text.push_str(&format!("import p{b}.T;\n"));
                }
            }
            units.push(scan_text(&text, &format!("p{p}.gsrc")));
        }
        let acyclic = package_cycles(&units).is_empty();
        prop_assert_eq!(acyclic, package_graph(&units).topological_order().is_some());
    }

    #[test]
    fn comparison_is_additive(v in prop::collection::vec(0u64..100_000, 15)) {
        let report = |o: usize| MetricsReport {
            total_complexity: v[o],
            total_code_lines: v[o + 1],
            duplicate_lines: v[o + 2].min(v[o + 1]),
            package_cycles: v[o + 3] % 7,
            debt_minutes: v[o + 4],
            debt_days: minutes_to_days(v[o + 4]),
            ..Default::default()
        };
        let c = compare(&report(0), &report(5), &report(10));
        prop_assert_eq!(c.rows.len(), 5);
        for r in &c.rows {
            prop_assert_eq!(r.saws, r.spl + r.dwa);
            prop_assert_eq!(r.delta, r.saws - r.cwa);
        }
    }
}
