//! Singular scripts for checking results outside this crate.

use std::fmt::Write as _;

use crate::error::FileError;
use crate::model::Arrangement;
use crate::saito::SaitoCertificate;

/// Script that rebuilds the minors, the product `F`, the syzygies of the
/// Jacobian ideal and, given a certificate, the determinant identity.
pub fn singular_script(arr: &Arrangement, d_max: u32, cert: Option<&SaitoCertificate>) -> Result<String, FileError> {
    let vars = arr.vars().names().join(",");
    let mut s = String::new();
    let _ = writeln!(s, "// arrangement {} in the {} model", arr.label_string(), arr.shape());
    let _ = writeln!(s, "ring R = 0, ({vars}), dp;");
    for (label, f) in arr.labels().iter().zip(arr.factors()) {
        let _ = writeln!(s, "poly {label} = {f};");
    }
    let product: Vec<String> = arr.labels().iter().map(ToString::to_string).collect();
    let _ = writeln!(s, "poly F = {};", product.join("*"));
    let _ = writeln!(s, "ideal J = jacob(F), F;");
    let _ = writeln!(s, "module A = minbase(syz(J));");
    let _ = writeln!(s, "// a syzygy (a_1, ..., a_n, g) has degree deg(a_i)");
    let _ = writeln!(s, "intvec degs;");
    let _ = writeln!(s, "for (int i = 1; i <= ncols(A); i++) {{ degs[i] = deg(A[i]); }}");
    let _ = writeln!(s, "\"AR generator degrees:\"; degs;");
    let _ = writeln!(
        s,
        "// compare with the generator degrees reported through degree {d_max}"
    );
    let _ = writeln!(s, "resolution r = mres(J, 0);");
    let _ = writeln!(s, "// free iff the resolution of S/J has length 2");
    let _ = writeln!(s, "print(betti(r), \"betti\");");
    if let Some(cert) = cert {
        let n = arr.nvars();
        let _ = writeln!(s, "matrix M[{n}][{n}];");
        for (row, name) in arr.vars().names().iter().enumerate() {
            let _ = writeln!(s, "M[{}, 1] = {name};", row + 1);
        }
        for (col, d) in cert.derivations.iter().enumerate() {
            for (row, a) in d.coefficients().iter().enumerate() {
                if !a.is_zero() {
                    let _ = writeln!(s, "M[{}, {}] = {a};", row + 1, col + 2);
                }
            }
        }
        let _ = writeln!(s, "\"det(M) - c*F == 0:\"; det(M) - ({})*F == 0;", cert.constant);
    }
    Ok(s)
}
