//! FCIDUMP reader.
//!
//! Header is the `&FCI ... &END` namelist; every following line is
//! `value i j k l` with 1-based orbital indices:
//!
//! * `i j k l` all nonzero: chemist integral `(ij|kl)`
//! * `k = l = 0`: one-electron integral `h_ij`
//! * all zero: core energy (nuclear repulsion)
//! * `i 0 0 0`: orbital energy, ignored

use std::path::Path;

use nalgebra::DMatrix;

use super::{expand_to_spin_orbitals, MolecularTensors, SpatialIntegrals, Tensor4};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcidumpHeader {
    pub norb: usize,
    pub nelec: usize,
    pub ms2: i64,
}

pub fn load_fcidump(path: impl AsRef<Path>) -> Result<MolecularTensors> {
    let text = std::fs::read_to_string(path)?;
    let (_, spatial) = parse_fcidump(&text)?;
    expand_to_spin_orbitals(&spatial)
}

fn malformed(line: usize, msg: impl Into<String>) -> Error {
    Error::Malformed {
        line,
        msg: msg.into(),
    }
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.replace(['D', 'd'], "E")
        .parse::<f64>()
        .map_err(|_| malformed(line, format!("bad number `{tok}`")))
}

/// Parses FCIDUMP text into the spatial chemist integrals.
pub fn parse_fcidump(text: &str) -> Result<(FcidumpHeader, SpatialIntegrals)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    // Collect the namelist up to the terminator (`&END` or a lone `/`).
    let mut header = String::new();
    let mut started = false;
    let mut last_line = 0;
    for (no, raw) in lines.by_ref() {
        last_line = no;
        let l = raw.trim();
        if !started {
            if l.is_empty() {
                continue;
            }
            if !l.to_ascii_uppercase().starts_with("&FCI") {
                return Err(malformed(no, "expected `&FCI` namelist header"));
            }
            started = true;
            header.push_str(&l[4..]);
            header.push(',');
            if l.to_ascii_uppercase().contains("&END") {
                break;
            }
            continue;
        }
        let up = l.to_ascii_uppercase();
        if up.starts_with("&END") || up == "/" {
            break;
        }
        header.push_str(l);
        header.push(',');
    }
    if !started {
        return Err(malformed(last_line.max(1), "missing `&FCI` header"));
    }
    let header = header.to_ascii_uppercase().replace("&END", "");

    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = None;
    // KEY=v1,v2,...; tokens without '=' continue the previous key's list
    for part in header.split(',') {
        let part = part.trim();
        if let Some((k, v)) = part.split_once('=') {
            let k = k.trim();
            let v = v.trim();
            match k {
                "NORB" => norb = v.parse::<usize>().ok(),
                "NELEC" => nelec = v.parse::<usize>().ok(),
                "MS2" => ms2 = v.parse::<i64>().ok(),
                _ => {}
            }
        }
    }
    let (Some(norb), Some(nelec), Some(ms2)) = (norb, nelec, ms2) else {
        return Err(malformed(
            last_line,
            "header must declare NORB, NELEC and MS2",
        ));
    };

    let mut h = DMatrix::zeros(norb, norb);
    let mut eri = Tensor4::zeros(norb);
    let mut constant = 0.0;

    for (no, raw) in lines {
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(malformed(
                no,
                format!("expected `value i j k l`, got {} fields", toks.len()),
            ));
        }
        let v = parse_value(toks[0], no)?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let i: usize = tok
                .parse()
                .map_err(|_| malformed(no, format!("bad index `{tok}`")))?;
            if i > norb {
                return Err(Error::IndexOutOfBounds {
                    index: i,
                    declared: norb,
                    line: no,
                });
            }
            *slot = i;
        }
        match idx {
            [0, 0, 0, 0] => constant += v,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                h[(i - 1, j - 1)] = v;
                h[(j - 1, i - 1)] = v;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
                for [a, b, c, d] in [
                    [i, j, k, l],
                    [j, i, k, l],
                    [i, j, l, k],
                    [j, i, l, k],
                    [k, l, i, j],
                    [l, k, i, j],
                    [k, l, j, i],
                    [l, k, j, i],
                ] {
                    eri.set(a, b, c, d, v);
                }
            }
            [_, 0, 0, 0] => {}
            _ => return Err(malformed(no, "unrecognised index pattern")),
        }
    }

    Ok((
        FcidumpHeader { norb, nelec, ms2 },
        SpatialIntegrals {
            constant,
            h,
            eri,
            n_electrons: Some(nelec),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = " &FCI NORB=   2,NELEC= 2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n";

    #[test]
    fn header_fields() {
        let (hd, s) = parse_fcidump(HEAD).unwrap();
        assert_eq!(
            hd,
            FcidumpHeader {
                norb: 2,
                nelec: 2,
                ms2: 0
            }
        );
        assert_eq!(s.constant, 0.0);
    }

    #[test]
    fn empty_body_is_constant_only() {
        let text = format!("{HEAD} 0.75 0 0 0 0\n");
        let t =
            crate::hamiltonian::expand_to_spin_orbitals(&parse_fcidump(&text).unwrap().1).unwrap();
        assert_eq!(t.constant, 0.75);
        assert!(t.g.is_zero());
        assert!(t.h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn index_beyond_norb_is_bounds_error() {
        let text = format!("{HEAD} 0.5 1 1 3 1\n");
        match parse_fcidump(&text) {
            Err(Error::IndexOutOfBounds {
                index: 3,
                declared: 2,
                line: 5,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn garbage_reports_line() {
        let text = format!("{HEAD} 0.5 1 1\n");
        assert!(matches!(
            parse_fcidump(&text),
            Err(Error::Malformed { line: 5, .. })
        ));
        let text = format!("{HEAD} abc 1 1 1 1\n");
        assert!(matches!(
            parse_fcidump(&text),
            Err(Error::Malformed { line: 5, .. })
        ));
    }

    #[test]
    fn missing_header_key() {
        let text = " &FCI NORB=2,\n &END\n";
        assert!(matches!(parse_fcidump(text), Err(Error::Malformed { .. })));
    }

    #[test]
    fn fortran_exponents_and_slash_terminator() {
        let text = "&FCI NORB=1, NELEC=2, MS2=0\n/\n 1.5D-01 1 1 1 1\n -1.0d0 1 1 0 0\n";
        let (_, s) = parse_fcidump(text).unwrap();
        assert_eq!(s.eri.get(0, 0, 0, 0), 0.15);
        assert_eq!(s.h[(0, 0)], -1.0);
    }
}
