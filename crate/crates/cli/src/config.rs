//! Setting resolution: command line, then `STQP_*` environment variables, then
//! the `key = value` config file, then built-in defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use stqp::Error;

#[derive(Debug, Default, Clone)]
pub struct Settings {
    file: HashMap<String, String>,
}

/// `foo-bar` → `STQP_FOO_BAR`.
pub fn env_name(key: &str) -> String {
    format!("STQP_{}", key.to_ascii_uppercase().replace('-', "_"))
}

pub fn parse_config(text: &str) -> Result<HashMap<String, String>, Error> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            msg: format!("expected `key = value`, found `{line}`"),
        })?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: "empty key".into(),
            });
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, Error> {
        let path = path
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(env_name("config")).map(Into::into));
        let file = match path {
            Some(p) => parse_config(&std::fs::read_to_string(p)?)?,
            None => HashMap::new(),
        };
        Ok(Self { file })
    }

    fn raw(&self, key: &str) -> Option<(String, String)> {
        if let Ok(v) = std::env::var(env_name(key)) {
            return Some((env_name(key), v));
        }
        self.file.get(key).map(|v| (format!("config key `{key}`"), v.clone()))
    }

    /// Command-line value if given, otherwise environment, file, `default`.
    pub fn get<T: FromStr>(&self, key: &str, cli: Option<T>, default: T) -> Result<T, Error> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.raw(key) {
            Some((src, v)) => v
                .parse::<T>()
                .map_err(|_| Error::InvalidParameter(format!("{src}: cannot parse `{v}`"))),
            None => Ok(default),
        }
    }

    /// Flags: set on the command line wins; otherwise `true/false/1/0/yes/no`.
    pub fn flag(&self, key: &str, cli: bool) -> Result<bool, Error> {
        if cli {
            return Ok(true);
        }
        match self.raw(key) {
            None => Ok(false),
            Some((src, v)) => match v.to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" | "on" => Ok(true),
                "0" | "false" | "no" | "off" | "" => Ok(false),
                _ => Err(Error::InvalidParameter(format!("{src}: expected a boolean, got `{v}`"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# c\ngap = 1e-4\ntime_limit=5 # trailing\n\n").unwrap();
        assert_eq!(m["gap"], "1e-4");
        assert_eq!(m["time-limit"], "5");
        assert!(matches!(parse_config("oops\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn precedence() {
        let s = Settings {
            file: parse_config("threads = 3\nnode-selection = depth-first").unwrap(),
        };
        assert_eq!(s.get("threads", Some(5usize), 1).unwrap(), 5);
        assert_eq!(s.get("threads", None, 1usize).unwrap(), 3);
        assert_eq!(s.get("jobs", None, 2usize).unwrap(), 2);
        assert!(s.get::<usize>("node-selection", None, 0).is_err());
    }
}
