#![no_main]

use libfuzzer_sys::fuzz_target;
use relay_outage::sweep::RunConfig;
use relay_outage::Error;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match RunConfig::parse(text) {
        Ok(cfg) => {
            let _ = cfg.validate();
        }
        Err(Error::ConfigParse { line, .. }) => {
            assert!(line <= text.lines().count() + 1);
        }
        Err(_) => {}
    }
});
