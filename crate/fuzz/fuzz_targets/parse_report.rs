#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(report) = netmult::io::parse_report(text) else {
        return;
    };
    // rendering must be total on anything that parses
    let _ = netmult::io::render_text(&report);
    if let Ok(serialized) = netmult::io::serialize_report(&report) {
        let back = netmult::io::parse_report(&serialized).unwrap();
        assert_eq!(back, report);
    }
    if let (Some(monoid), Some(mult)) = (&report.monoid, &report.multipliers) {
        let small = monoid.elements.len() <= 16
            && mult.blocks.iter().all(|b| b.size <= 8)
            && monoid.elements.values().all(|map| map.len() <= 16);
        if small {
            let _ = netmult::io::multiplier_set_from_sections(monoid, mult);
        }
    }
});
