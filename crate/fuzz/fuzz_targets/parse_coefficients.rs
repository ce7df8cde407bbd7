#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = netmult::io::parse_coefficient_document(text) else {
        return;
    };
    let Ok(coeffs) = doc.to_coefficients() else {
        return;
    };
    let serialized = netmult::io::serialize_coefficients(&coeffs).unwrap();
    let back = netmult::io::parse_coefficients(&serialized).unwrap();
    assert_eq!(back, coeffs);
});
