fn main() {
    // Eigensolvers call LAPACK routines exported by the system OpenBLAS,
    // which bundles BLAS + LAPACK in a single shared object.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
