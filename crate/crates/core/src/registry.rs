//! Codecs by descriptor.
//!
//! A descriptor is `kind` or `kind:key=value,key=value,...`. A value that
//! itself contains `,` or `:` is wrapped in parentheses, which nest:
//!
//! ```text
//! gray:inner=(ccd:inner=(linear:rows=101/011,decoder=ml))
//! ```
//!
//! Descriptor files hold the same text; whitespace is ignored and `#` starts
//! a comment running to the end of the line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::codes::{
    BitRepetitionCode, ComplementCode, ConstantDistanceCode, GrayCode, RepetitionCode, SharedCodec,
    UnaryCode,
};
use crate::error::{Error, Result};
use crate::linear::{
    exact_distance, expander_build, DecoderOptions, DecoderRegistry, ExpanderConfig, FlipSchedule,
    GeneratorMatrix, LinearCodec, LinearGrayCode, RepeatCode,
};

/// A parsed descriptor: a kind and its ordered parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descriptor {
    pub kind: String,
    pub params: Vec<(String, String)>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (kind, rest) = match text.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (text, None),
        };
        if kind.is_empty()
            || !kind
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(parse_err(format!("bad codec kind `{kind}` in `{text}`")));
        }
        let mut params = Vec::new();
        if let Some(rest) = rest {
            for item in split_top_level(rest)? {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| parse_err(format!("expected key=value, got `{item}`")))?;
                if k.is_empty() {
                    return Err(parse_err(format!("empty key in `{item}`")));
                }
                if params.iter().any(|(seen, _): &(String, String)| seen == k) {
                    return Err(parse_err(format!("duplicate key `{k}`")));
                }
                params.push((k.to_string(), unwrap_parens(v)?.to_string()));
            }
        }
        Ok(Descriptor {
            kind: kind.to_string(),
            params,
        })
    }

    /// Descriptor file contents: comments and whitespace are dropped.
    pub fn parse_file_text(text: &str) -> Result<Self> {
        let joined: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.chars().filter(|c| !c.is_whitespace()))
            .collect();
        Self::parse(&joined)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| parse_err(format!("`{}` needs `{key}=`", self.kind)))
    }

    pub fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| parse_err(format!("`{key}={v}` is not a valid number")))
            })
            .transpose()
    }

    pub fn required_number<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.number(key)?
            .ok_or_else(|| parse_err(format!("`{}` needs `{key}=`", self.kind)))
    }

    /// Rejects keys outside `allowed`, catching typos early.
    pub fn only_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.params {
            if !allowed.contains(&k.as_str()) {
                return Err(parse_err(format!(
                    "`{}` does not take `{k}` (allowed: {})",
                    self.kind,
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            f.write_str(if i == 0 { ":" } else { "," })?;
            if v.contains([',', ':', '(']) {
                write!(f, "{k}=({v})")?;
            } else {
                write!(f, "{k}={v}")?;
            }
        }
        Ok(())
    }
}

fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(parse_err(format!("unbalanced `)` in `{s}`")));
                }
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(parse_err(format!("unbalanced `(` in `{s}`")));
    }
    out.push(&s[start..]);
    Ok(out)
}

fn unwrap_parens(v: &str) -> Result<&str> {
    match v.strip_prefix('(') {
        Some(inner) => inner
            .strip_suffix(')')
            .ok_or_else(|| parse_err(format!("unterminated `(` in `{v}`"))),
        None => Ok(v),
    }
}

pub type CodecFactory = fn(&Descriptor, &CodecRegistry) -> Result<SharedCodec>;

/// Codec constructors by kind. Composite kinds build their `inner` through
/// the same registry, so registering a new primitive makes it available as
/// an inner code everywhere.
#[derive(Clone)]
pub struct CodecRegistry {
    factories: BTreeMap<String, CodecFactory>,
}

impl CodecRegistry {
    pub fn empty() -> Self {
        CodecRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = CodecRegistry::empty();
        r.register("unary", |d, _| {
            d.only_keys(&["m"])?;
            Ok(Arc::new(UnaryCode::new(d.required_number("m")?)?))
        });
        r.register("repetition", |d, _| {
            d.only_keys(&["d"])?;
            Ok(Arc::new(RepetitionCode::new(d.required_number("d")?)?))
        });
        r.register("pairtriple", pair_triple);
        r.register("pair-triple", pair_triple);
        r.register("bitrep", |d, _| {
            d.only_keys(&["bits", "reps"])?;
            Ok(Arc::new(BitRepetitionCode::new(
                d.required_number("bits")?,
                d.required_number("reps")?,
            )?))
        });
        r.register("linear", |d, r| Ok(r.build_linear(d)?));
        r.register("expander", |d, r| Ok(r.build_linear(d)?));
        r.register("complement", |d, r| {
            Ok(Arc::new(ComplementCode::new(r.inner(d)?)))
        });
        r.register("ccd", |d, r| {
            Ok(Arc::new(ConstantDistanceCode::new(r.inner(d)?)))
        });
        r.register("gray", |d, r| Ok(Arc::new(GrayCode::new(r.inner(d)?)?)));
        r.register("repeat3", |d, r| Ok(Arc::new(RepeatCode::new(r.inner(d)?))));
        r.register("lgray", |d, r| {
            d.only_keys(&["inner"])?;
            let inner = Descriptor::parse(d.require("inner")?)?;
            Ok(Arc::new(LinearGrayCode::new(r.build_linear(&inner)?)?))
        });
        r
    }

    pub fn register(&mut self, kind: &str, factory: CodecFactory) {
        self.factories.insert(kind.to_string(), factory);
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> + '_ {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, text: &str) -> Result<SharedCodec> {
        self.build_descriptor(&Descriptor::parse(text)?)
    }

    pub fn build_descriptor(&self, d: &Descriptor) -> Result<SharedCodec> {
        let factory = self.factories.get(&d.kind).ok_or_else(|| {
            Error::UnknownCodec(format!(
                "`{}` (known: {})",
                d.kind,
                self.kinds().collect::<Vec<_>>().join(", ")
            ))
        })?;
        factory(d, self)
    }

    pub fn build_file(&self, path: &Path) -> Result<SharedCodec> {
        let text = std::fs::read_to_string(path)?;
        self.build_descriptor(&Descriptor::parse_file_text(&text)?)
    }

    /// An inline descriptor, or `@path` for a descriptor file.
    pub fn build_arg(&self, arg: &str) -> Result<SharedCodec> {
        match arg.strip_prefix('@') {
            Some(path) => self.build_file(Path::new(path)),
            None => self.build(arg),
        }
    }

    fn inner(&self, d: &Descriptor) -> Result<SharedCodec> {
        d.only_keys(&["inner"])?;
        self.build(d.require("inner")?)
    }

    /// `linear` and `expander` descriptors as concrete linear codecs.
    pub fn build_linear(&self, d: &Descriptor) -> Result<Arc<LinearCodec>> {
        match d.kind.as_str() {
            "linear" => linear(d).map(Arc::new),
            "expander" => Ok(Arc::new(expander_build(&expander_config(d)?)?.into_codec())),
            other => Err(Error::InvalidParameter(format!(
                "a linear inner code is required here, got `{other}`"
            ))),
        }
    }
}

impl Default for CodecRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl fmt::Debug for CodecRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.kinds()).finish()
    }
}

fn pair_triple(d: &Descriptor, _: &CodecRegistry) -> Result<SharedCodec> {
    d.only_keys(&[])?;
    Ok(Arc::new(BitRepetitionCode::pair_triple()))
}

fn linear(d: &Descriptor) -> Result<LinearCodec> {
    d.only_keys(&["rows", "file", "decoder", "iters", "distance", "msgbits"])?;
    let g = match (d.get("rows"), d.get("file")) {
        (Some(rows), None) => {
            GeneratorMatrix::from_rows_text(&rows.split('/').collect::<Vec<_>>())?
        }
        (None, Some(path)) => GeneratorMatrix::parse(&std::fs::read_to_string(path)?)?,
        _ => {
            return Err(parse_err(
                "`linear` needs exactly one of `rows=` or `file=`",
            ))
        }
    };
    let decoder_name = d.get("decoder").unwrap_or("ml");
    let opts = DecoderOptions {
        max_iters: d.number("iters")?,
        parity: None,
    };
    let decoder = DecoderRegistry::with_builtins().build(decoder_name, &g, &opts)?;
    let distance = match d.number("distance")? {
        Some(dist) => dist,
        None => exact_distance(&g)?,
    };
    let bits = d.number("msgbits")?.unwrap_or(g.message_bits().min(62));
    let mut codec = LinearCodec::with_decoder(g, decoder, distance)?.limit_message_bits(bits)?;
    codec.set_descriptor(d.to_string());
    Ok(codec)
}

fn expander_config(d: &Descriptor) -> Result<ExpanderConfig> {
    d.only_keys(&[
        "d", "dv", "dc", "alpha", "seed", "msgbits", "iters", "retries", "decoder",
    ])?;
    let mut cfg = ExpanderConfig::new(
        d.required_number("d")?,
        d.number("dv")?.unwrap_or(3),
        d.number("dc")?.unwrap_or(6),
        d.number("alpha")?.unwrap_or(0.2),
        d.number("seed")?.unwrap_or(0),
    );
    cfg.message_bits = d.number("msgbits")?;
    cfg.max_iters = d.number("iters")?;
    if let Some(r) = d.number("retries")? {
        cfg.max_retries = r;
    }
    cfg.schedule = match d.get("decoder") {
        None | Some("bitflip") => FlipSchedule::LowestIndex,
        Some("bitflip-greedy") => FlipSchedule::GreatestGain,
        Some(other) => {
            return Err(parse_err(format!(
                "expander decoder must be bitflip or bitflip-greedy, got `{other}`"
            )))
        }
    };
    Ok(cfg)
}
