//! `--config file.json`: each key becomes a long flag appended to argv unless
//! that flag is already present.

use std::ffi::OsString;

use serde_json::Value;

fn config_path(argv: &[OsString]) -> Option<Result<OsString, String>> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return Some(it.next().cloned().ok_or_else(|| "--config needs a file".to_string()));
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(Ok(rest.into()));
        }
    }
    None
}

fn has_flag(argv: &[OsString], flag: &str) -> bool {
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&format!("{flag}="))
    })
}

/// argv with the config file's keys merged in.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let path = match config_path(&argv) {
        None => return Ok(argv),
        Some(p) => p?,
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config is not JSON: {e}"))?;
    let Value::Object(map) = value else {
        return Err("config must be a JSON object".into());
    };
    let mut out = argv.clone();
    for (key, v) in map {
        if key == "config" {
            continue;
        }
        let flag = format!("--{key}");
        if has_flag(&argv, &flag) {
            continue;
        }
        match v {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => {
                out.push(flag.into());
                out.push(s.into());
            }
            Value::Number(x) => {
                out.push(flag.into());
                out.push(x.to_string().into());
            }
            _ => return Err(format!("config key {key:?} must be a string, number or boolean")),
        }
    }
    Ok(out)
}
