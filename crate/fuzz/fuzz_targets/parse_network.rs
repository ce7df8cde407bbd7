#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = netmult::io::parse_network_document(text) else {
        return;
    };
    let Ok(net) = doc.to_network() else {
        return;
    };
    // valid parses must round-trip and survive the structural operations
    let serialized = netmult::io::serialize_network(&net, doc.monoid_labels).unwrap();
    let back = netmult::io::parse_network(&serialized).unwrap();
    assert_eq!(back, net);
    if net.node_count() <= 16 && net.arrows().len() <= 16 {
        if let Ok(comp) = netmult::network::completion_capped(&net, 128) {
            let fund = netmult::fundamental_network(&comp.monoid);
            assert!(netmult::is_constructible(&fund, &comp.monoid).unwrap());
        }
        for p in 0..net.node_count() {
            let _ = netmult::input_network(&net, p);
        }
        if net.node_count() <= 6 {
            for part in netmult::enumerate_balanced_partitions(&net, 6).unwrap() {
                let _ = netmult::quotient(&net, &part).unwrap();
            }
        }
    }
});
