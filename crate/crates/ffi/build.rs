fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
    cbindgen::generate(&crate_dir)
        .expect("generating C header")
        .write_to_file(format!("{crate_dir}/include/herdshare.h"));
}
