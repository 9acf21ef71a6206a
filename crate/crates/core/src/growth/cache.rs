//! On-disk cache of enumerated balls.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic        4 bytes  "GGB1"
//! version_len  u32, then the crate version string
//! radius       u32
//! key_depth    u32
//! count        u64
//! count records:
//!   key_words  u32, then key_words × u64 portrait storage words
//!   length     u32
//!   witness    u32 byte count, then ASCII letters
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::portrait::Portrait;
use crate::word::Word;

use super::ball::{enumerate_ball, BallConfig, BallEntry, BallOutcome, BallTable};

pub const MAGIC: &[u8; 4] = b"GGB1";
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable overriding the default cache directory.
pub const CACHE_DIR_ENV: &str = "GRIGORCHUK_CACHE_DIR";

pub fn cache_id(radius: u32, key_depth: u32) -> String {
    format!("ball_r{radius}_d{key_depth}_v{CODE_VERSION}")
}

pub fn cache_path(dir: &Path, radius: u32, key_depth: u32) -> PathBuf {
    dir.join(format!("{}.ggb", cache_id(radius, key_depth)))
}

pub fn save_ball(table: &BallTable, path: &Path) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    put_u32(&mut buf, CODE_VERSION.len() as u32);
    buf.extend_from_slice(CODE_VERSION.as_bytes());
    put_u32(&mut buf, table.radius());
    put_u32(&mut buf, table.key_depth());
    buf.extend_from_slice(&(table.len() as u64).to_le_bytes());
    for (key, entry) in table.keys().iter().zip(table.entries()) {
        let words = key.raw_words();
        put_u32(&mut buf, words.len() as u32);
        for w in words {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        put_u32(&mut buf, entry.length);
        let text = entry.witness.to_string();
        put_u32(&mut buf, text.len() as u32);
        buf.extend_from_slice(text.as_bytes());
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tmp = path.with_extension("tmp");
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(&buf).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn load_ball(path: &Path) -> Result<BallTable> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let malformed = |reason: String| Error::CacheFormat {
        path: path.to_path_buf(),
        reason,
    };
    let mut r = io::Cursor::new(bytes.as_slice());
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| malformed(e.to_string()))?;
    if &magic != MAGIC {
        return Err(malformed("bad magic bytes".into()));
    }
    let read_err = |e: io::Error| malformed(e.to_string());
    let version_len = get_u32(&mut r).map_err(read_err)? as usize;
    let version = get_bytes(&mut r, version_len).map_err(read_err)?;
    if version != CODE_VERSION.as_bytes() {
        return Err(malformed(format!(
            "written by version {}",
            String::from_utf8_lossy(&version)
        )));
    }
    let radius = get_u32(&mut r).map_err(read_err)?;
    let key_depth = get_u32(&mut r).map_err(read_err)?;
    let mut count = [0u8; 8];
    r.read_exact(&mut count).map_err(read_err)?;
    let count = u64::from_le_bytes(count) as usize;
    let mut keys = Vec::with_capacity(count.min(1 << 24));
    let mut entries = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        let n_words = get_u32(&mut r).map_err(read_err)? as usize;
        let raw = get_bytes(&mut r, n_words * 8).map_err(read_err)?;
        let words = raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        let key =
            Portrait::from_raw_words(key_depth, words).map_err(|e| malformed(e.to_string()))?;
        let length = get_u32(&mut r).map_err(read_err)?;
        let text_len = get_u32(&mut r).map_err(read_err)? as usize;
        let text = get_bytes(&mut r, text_len).map_err(read_err)?;
        let witness: Word = std::str::from_utf8(&text)
            .map_err(|e| malformed(e.to_string()))?
            .parse()
            .map_err(|e: Error| malformed(e.to_string()))?;
        if witness.len() != length as usize || length > radius {
            return Err(malformed(format!("inconsistent record for {witness}")));
        }
        keys.push(key);
        entries.push(BallEntry { length, witness });
    }
    if (r.position() as usize) != bytes.len() {
        return Err(malformed("trailing bytes".into()));
    }
    BallTable::from_parts(radius, key_depth, keys, entries)
}

/// Loads the ball from `dir` when a matching cache file exists, otherwise
/// enumerates it and stores complete results.
pub fn cached_ball(config: &BallConfig, dir: Option<&Path>) -> Result<(BallOutcome, bool)> {
    let key_depth = config.resolved_key_depth();
    if let Some(dir) = dir {
        let path = cache_path(dir, config.radius, key_depth);
        if path.exists() {
            let started = std::time::Instant::now();
            let table = load_ball(&path)?;
            let mut series = crate::growth::GrowthSeries::new(
                table.growth_values(),
                crate::growth::SeriesMeta {
                    radius: table.radius(),
                    element_count: table.len() as u64,
                    wall_time_secs: started.elapsed().as_secs_f64(),
                    cache_id: None,
                    complete: true,
                    key_depth,
                },
            )?;
            series.meta_mut().cache_id = Some(cache_id(config.radius, key_depth));
            return Ok((
                BallOutcome {
                    table,
                    series,
                    complete: true,
                },
                true,
            ));
        }
    }
    let mut outcome = enumerate_ball(config)?;
    if let (Some(dir), true) = (dir, outcome.complete) {
        save_ball(&outcome.table, &cache_path(dir, config.radius, key_depth))?;
        outcome.series.meta_mut().cache_id = Some(cache_id(config.radius, key_depth));
    }
    Ok((outcome, false))
}

fn put_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn get_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_bytes(r: &mut io::Cursor<&[u8]>, n: usize) -> io::Result<Vec<u8>> {
    let remaining = r.get_ref().len() - r.position() as usize;
    if n > remaining {
        return Err(io::Error::new(
            io::ErrorKind::UnexpectedEof,
            "truncated record",
        ));
    }
    let mut out = vec![0u8; n];
    r.read_exact(&mut out)?;
    Ok(out)
}
