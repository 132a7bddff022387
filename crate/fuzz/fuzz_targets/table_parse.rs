#![no_main]

use libfuzzer_sys::fuzz_target;
use relay_outage::sweep::{find_optimum, Objective, Table};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(table) = Table::parse(text) else {
        return;
    };
    for column in table.headers.clone() {
        for objective in [Objective::Minimize, Objective::Maximize] {
            if let Ok(opt) = find_optimum(&table, &column, objective) {
                assert!(opt.row < table.rows.len());
            }
        }
    }
    if let Ok(again) = table.to_csv_string().map(|s| Table::parse(&s)) {
        assert_eq!(again.ok().as_ref(), Some(&table));
    }
});
