//! Regenerates include/epirelax.h from the extern "C" surface when
//! ERX_GEN_HEADER is set; ordinary builds use the committed header untouched.

fn main() {
    println!("cargo:rerun-if-env-changed=ERX_GEN_HEADER");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    if std::env::var_os("ERX_GEN_HEADER").is_none() {
        return;
    }
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    cbindgen::generate(&crate_dir)
        .expect("cbindgen parses the crate")
        .write_to_file(std::path::Path::new(&crate_dir).join("include/epirelax.h"));
}
