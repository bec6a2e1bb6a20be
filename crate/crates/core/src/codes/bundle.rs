//! Shipped code bundle and the `.code` stabilizer file format.
//!
//! ```text
//! # comment
//! name five_qubit
//! distance 3
//! stabilizer +XZZXI
//! logical_z +ZZZZZ
//! logical_x -YIZZI
//! ```
//!
//! Small codes are compiled into the binary. Larger or externally defined
//! codes are looked up on disk, first in `$ENTPUR_CODE_DIR`, then in the
//! crate's `data/codes` directory.

use super::lifted::{hypergraph_product, LiftSpec};
use super::{alist, CodeError, CssCode, StabilizerCode};
use crate::logical;
use crate::pauli::Pauli;
use std::path::{Path, PathBuf};

const FIVE_QUBIT: &str = include_str!("../../data/codes/five_qubit.code");
const YY3: &str = include_str!("../../data/codes/yy3.code");
const BITFLIP3: &str = include_str!("../../data/codes/bitflip3.code");
const HAMMING: &str = include_str!("../../data/codes/hamming_7_4.alist");
const TORIC3: &str = include_str!("../../data/codes/toric3.lift");
pub const MANIFEST: &str = include_str!("../../data/codes/MANIFEST");

/// Codes available without any files on disk.
pub const BUILTIN: &[&str] = &["bitflip3", "yy3", "five_qubit", "steane", "toric3", "hgp_hamming"];

/// Codes that need user-supplied files.
pub const EXTERNAL: &[&str] = &["lp118_544", "lp118_714", "lp118_1020"];

/// A loaded code; CSS codes keep their check matrices.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum Code {
    Stabilizer(StabilizerCode),
    Css(CssCode),
}

impl Code {
    pub fn stabilizer(&self) -> &StabilizerCode {
        match self {
            Code::Stabilizer(c) => c,
            Code::Css(c) => &c.code,
        }
    }

    pub fn css(&self) -> Option<&CssCode> {
        match self {
            Code::Css(c) => Some(c),
            Code::Stabilizer(_) => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.stabilizer().name
    }

    /// Converts to CSS form when every generator is purely X or Z.
    pub fn into_css(self) -> Result<CssCode, CodeError> {
        match self {
            Code::Css(c) => Ok(c),
            Code::Stabilizer(c) => CssCode::from_stabilizer(&c),
        }
    }
}

/// Parses a `.code` file. Logical operators, when listed, are validated.
pub fn parse_code_file(text: &str, origin: &str) -> Result<StabilizerCode, CodeError> {
    let err = |msg: String| CodeError::Parse {
        path: origin.to_string(),
        msg,
    };
    let mut name = None;
    let mut gens = Vec::new();
    let mut lz = Vec::new();
    let mut lx = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, val) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(format!("line {}: expected `key value`", ln + 1)))?;
        let val = val.trim();
        let pauli = || -> Result<Pauli, CodeError> {
            val.parse::<Pauli>()
                .map_err(|e| err(format!("line {}: {e}", ln + 1)))
        };
        match key {
            "name" => name = Some(val.to_string()),
            "distance" => {}
            "stabilizer" => gens.push(pauli()?),
            "logical_z" => lz.push(pauli()?),
            "logical_x" => lx.push(pauli()?),
            _ => return Err(err(format!("line {}: unknown key {key:?}", ln + 1))),
        }
    }
    let name = name.ok_or_else(|| err("missing `name`".into()))?;
    let code = StabilizerCode::new(&name, gens)?;
    if lz.is_empty() && lx.is_empty() {
        Ok(code)
    } else {
        code.with_logicals(lz, lx)
    }
}

/// Renders a code (with logicals, if present) in `.code` format.
pub fn render_code_file(code: &StabilizerCode) -> String {
    let mut s = format!("name {}\n", code.name);
    for g in &code.generators {
        s.push_str(&format!("stabilizer {g}\n"));
    }
    if let Ok((lz, lx)) = code.logicals() {
        for l in lz {
            s.push_str(&format!("logical_z {l}\n"));
        }
        for l in lx {
            s.push_str(&format!("logical_x {l}\n"));
        }
    }
    s
}

/// Directories searched for code files, in order.
pub fn search_dirs() -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Ok(d) = std::env::var("ENTPUR_CODE_DIR") {
        dirs.push(PathBuf::from(d));
    }
    dirs.push(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/codes"));
    dirs
}

fn find(file: &str) -> Option<PathBuf> {
    search_dirs().into_iter().map(|d| d.join(file)).find(|p| p.is_file())
}

/// Ensures logical operators are present, computing them if needed.
pub fn with_logicals(code: Code) -> Result<Code, CodeError> {
    if code.stabilizer().logicals().is_ok() {
        return Ok(code);
    }
    Ok(match code {
        Code::Stabilizer(c) => Code::Stabilizer(logical::with_logicals(c)?),
        Code::Css(mut c) => {
            c.code = logical::with_logicals(c.code)?;
            Code::Css(c)
        }
    })
}

/// Loads a code by bundle name, with logical operators attached.
pub fn load(name: &str) -> Result<Code, CodeError> {
    let code = match name {
        "five_qubit" => Code::Stabilizer(parse_code_file(FIVE_QUBIT, "five_qubit.code")?),
        "yy3" => Code::Stabilizer(parse_code_file(YY3, "yy3.code")?),
        "bitflip3" => Code::Stabilizer(parse_code_file(BITFLIP3, "bitflip3.code")?),
        "steane" => {
            let h = alist::parse(HAMMING, "hamming_7_4.alist")?;
            Code::Css(CssCode::new("steane", h.clone(), h)?)
        }
        "toric3" => Code::Css(LiftSpec::parse(TORIC3, "toric3.lift")?.build("toric3")?),
        "hgp_hamming" => {
            let h = alist::parse(HAMMING, "hamming_7_4.alist")?;
            Code::Css(hypergraph_product(&h, &h, "hgp_hamming")?)
        }
        _ if EXTERNAL.contains(&name) => load_external(name)?,
        _ => return Err(CodeError::Unknown(name.to_string())),
    };
    with_logicals(code)
}

fn load_external(name: &str) -> Result<Code, CodeError> {
    if let Some(p) = find(&format!("{name}.lift")) {
        return Ok(Code::Css(LiftSpec::read(&p)?.build(name)?));
    }
    match (find(&format!("{name}_hx.alist")), find(&format!("{name}_hz.alist"))) {
        (Some(hx), Some(hz)) => Ok(Code::Css(alist::load_alist_pair(&hx, &hz, name)?)),
        _ => Err(CodeError::Unknown(format!(
            "{name} (no {name}.lift or {name}_hx.alist/{name}_hz.alist in {:?})",
            search_dirs()
        ))),
    }
}

/// True when the external files for `name` can be found.
pub fn external_available(name: &str) -> bool {
    find(&format!("{name}.lift")).is_some()
        || (find(&format!("{name}_hx.alist")).is_some() && find(&format!("{name}_hz.alist")).is_some())
}

/// Loads `spec`: a bundle name, a `.code` or `.lift` path, or `hx,hz`
/// alist paths.
pub fn load_spec(spec: &str) -> Result<Code, CodeError> {
    if let Some((hx, hz)) = spec.split_once(',') {
        let name = Path::new(hx)
            .file_stem()
            .map_or("custom".into(), |s| s.to_string_lossy().into_owned());
        return with_logicals(Code::Css(alist::load_alist_pair(
            Path::new(hx),
            Path::new(hz),
            &name,
        )?));
    }
    let path = Path::new(spec);
    let stem = || {
        path.file_stem()
            .map_or("custom".into(), |s| s.to_string_lossy().into_owned())
    };
    match path.extension().and_then(|e| e.to_str()) {
        Some("code") => {
            let text = std::fs::read_to_string(path).map_err(|source| CodeError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            with_logicals(Code::Stabilizer(parse_code_file(&text, spec)?))
        }
        Some("lift") => with_logicals(Code::Css(LiftSpec::read(path)?.build(&stem())?)),
        _ => load(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load_and_validate() {
        let expect = [
            ("bitflip3", 3, 1),
            ("yy3", 3, 1),
            ("five_qubit", 5, 1),
            ("steane", 7, 1),
            ("toric3", 18, 2),
            ("hgp_hamming", 58, 16),
        ];
        for (name, n, k) in expect {
            let c = load(name).unwrap();
            let s = c.stabilizer();
            assert_eq!((s.n, s.k), (n, k), "{name}");
            assert!(s.validate().is_empty(), "{name}: {:?}", s.validate());
            assert!(s.logicals().is_ok());
        }
    }

    #[test]
    fn cached_logicals_match_algorithm() {
        for name in ["bitflip3", "yy3", "five_qubit"] {
            let c = load(name).unwrap();
            let s = c.stabilizer();
            let fresh = logical::logical_paulis(s).unwrap();
            assert_eq!(s.logical_z.as_ref().unwrap(), &fresh.z, "{name}");
            assert_eq!(s.logical_x.as_ref().unwrap(), &fresh.x, "{name}");
        }
    }

    #[test]
    fn code_file_roundtrip() {
        let c = load("five_qubit").unwrap();
        let text = render_code_file(c.stabilizer());
        let back = parse_code_file(&text, "rendered").unwrap();
        assert_eq!(back.generators, c.stabilizer().generators);
        assert_eq!(back.logical_x, c.stabilizer().logical_x);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(load("nope"), Err(CodeError::Unknown(_))));
    }
}
