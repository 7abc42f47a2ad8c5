//! Sealed forecasts: SHA-256/SHA-512 fingerprints of a document, their
//! verification, and the append-only master ledger of all fingerprints.
//!
//! # Ledger file format
//!
//! UTF-8 text, LF line endings. Each version starts with a header line
//! `#version <N> <YYYY-MM-DD>` followed by one line per record known at that
//! version:
//!
//! ```text
//! <name>\t<sha256 hex>\t<sha512 hex>\t<committed_on>\t<reveal_on>
//! ```
//!
//! Hex digests are lowercase. Version numbers start at 1 and increase by
//! one; every version repeats all records of the previous one, in the same
//! order, before any new ones.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256, Sha512};

use crate::error::{Error, Result};

pub const SHA256_HEX_LEN: usize = 64;
pub const SHA512_HEX_LEN: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CommitmentRecord {
    pub document_name: String,
    pub sha256_hex: String,
    pub sha512_hex: String,
    pub committed_on: NaiveDate,
    pub reveal_on: NaiveDate,
}

impl CommitmentRecord {
    pub fn validate(&self) -> Result<()> {
        if self.document_name.is_empty() {
            return Err(Error::InvalidRecord("document name is empty".into()));
        }
        if self.document_name.contains(['\t', '\n', '\r']) || self.document_name.starts_with('#') {
            return Err(Error::InvalidRecord(format!(
                "document name `{}` contains a tab/newline or starts with `#`",
                self.document_name.escape_debug()
            )));
        }
        check_hex("sha256", &self.sha256_hex, SHA256_HEX_LEN)?;
        check_hex("sha512", &self.sha512_hex, SHA512_HEX_LEN)?;
        if self.committed_on > self.reveal_on {
            return Err(Error::InvalidRecord(format!(
                "committed on {} after reveal date {}",
                self.committed_on, self.reveal_on
            )));
        }
        Ok(())
    }

    /// The record's ledger line, without the newline.
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.document_name, self.sha256_hex, self.sha512_hex, self.committed_on, self.reveal_on
        )
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let cols: Vec<&str> = line.split('\t').collect();
        let [name, sha256, sha512, committed, reveal] = cols[..] else {
            return Err(Error::InvalidRecord(format!("expected 5 tab-separated fields, got `{line}`")));
        };
        let date = |s: &str| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| Error::InvalidRecord(format!("bad date `{s}`: {e}")))
        };
        let record = CommitmentRecord {
            document_name: name.to_string(),
            sha256_hex: sha256.to_string(),
            sha512_hex: sha512.to_string(),
            committed_on: date(committed)?,
            reveal_on: date(reveal)?,
        };
        record.validate()?;
        Ok(record)
    }
}

fn check_hex(which: &str, hex: &str, len: usize) -> Result<()> {
    if hex.len() != len {
        return Err(Error::InvalidRecord(format!("{which} digest has {} hex digits, expected {len}", hex.len())));
    }
    if !hex.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return Err(Error::InvalidRecord(format!("{which} digest is not lowercase hex")));
    }
    Ok(())
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    to_hex(&Sha256::digest(bytes))
}

pub fn sha512_hex(bytes: &[u8]) -> String {
    to_hex(&Sha512::digest(bytes))
}

/// Fingerprints `document` under both digests.
pub fn commit(document: &[u8], name: &str, committed_on: NaiveDate, reveal_on: NaiveDate) -> Result<CommitmentRecord> {
    let record = CommitmentRecord {
        document_name: name.to_string(),
        sha256_hex: sha256_hex(document),
        sha512_hex: sha512_hex(document),
        committed_on,
        reveal_on,
    };
    record.validate()?;
    Ok(record)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigestKind {
    Sha256,
    Sha512,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    Match,
    Mismatch(DigestKind),
}

/// Recomputes both digests and compares each in full.
pub fn verify(document: &[u8], record: &CommitmentRecord) -> Result<Verification> {
    check_hex("sha256", &record.sha256_hex, SHA256_HEX_LEN)?;
    check_hex("sha512", &record.sha512_hex, SHA512_HEX_LEN)?;
    let ok256 = full_eq(sha256_hex(document).as_bytes(), record.sha256_hex.as_bytes());
    let ok512 = full_eq(sha512_hex(document).as_bytes(), record.sha512_hex.as_bytes());
    Ok(match (ok256, ok512) {
        (true, true) => Verification::Match,
        (false, true) => Verification::Mismatch(DigestKind::Sha256),
        (true, false) => Verification::Mismatch(DigestKind::Sha512),
        (false, false) => Verification::Mismatch(DigestKind::Both),
    })
}

/// Equality that always inspects every byte.
fn full_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerVersion {
    pub number: u32,
    pub date: NaiveDate,
    pub records: Vec<CommitmentRecord>,
}

/// Every published version of the master list of fingerprints.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MasterLedger {
    versions: Vec<LedgerVersion>,
}

impl MasterLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn versions(&self) -> &[LedgerVersion] {
        &self.versions
    }

    pub fn latest(&self) -> Option<&LedgerVersion> {
        self.versions.last()
    }

    /// Adds a version holding every existing record plus `new_records`.
    /// Re-submitting an identical record is a no-op; a different record
    /// under an existing name is a violation.
    pub fn append_version(&self, new_records: &[CommitmentRecord], date: NaiveDate) -> Result<MasterLedger> {
        let mut records = self.latest().map(|v| v.records.clone()).unwrap_or_default();
        if let Some(last) = self.latest() {
            if date < last.date {
                return Err(Error::LedgerViolation(format!(
                    "version date {date} precedes previous version date {}",
                    last.date
                )));
            }
        }
        for record in new_records {
            record.validate()?;
            match records.iter().find(|r| r.document_name == record.document_name) {
                Some(existing) if existing == record => {}
                Some(existing) => {
                    return Err(Error::LedgerViolation(format!(
                        "record `{}` already committed as {} / {}",
                        existing.document_name, existing.sha256_hex, existing.sha512_hex
                    )))
                }
                None => records.push(record.clone()),
            }
        }
        let mut next = self.clone();
        next.versions.push(LedgerVersion { number: self.versions.len() as u32 + 1, date, records });
        Ok(next)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.versions.iter().enumerate() {
            if v.number != i as u32 + 1 {
                return Err(Error::LedgerViolation(format!("version {} found at position {}", v.number, i + 1)));
            }
            for r in &v.records {
                r.validate()?;
            }
            let mut names: Vec<&str> = v.records.iter().map(|r| r.document_name.as_str()).collect();
            names.sort_unstable();
            if names.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::LedgerViolation(format!("version {} repeats a document name", v.number)));
            }
            if i > 0 {
                let prev = &self.versions[i - 1];
                if v.date < prev.date {
                    return Err(Error::LedgerViolation(format!(
                        "version {} is dated before version {}",
                        v.number, prev.number
                    )));
                }
                if v.records.len() < prev.records.len() || v.records[..prev.records.len()] != prev.records[..] {
                    return Err(Error::LedgerViolation(format!(
                        "version {} drops or alters records of version {}",
                        v.number, prev.number
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        self.versions.iter().map(render_version).collect()
    }

    pub fn parse(text: &str) -> Result<MasterLedger> {
        let mut versions: Vec<LedgerVersion> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix("#version ") {
                let (number, date) = header
                    .split_once(' ')
                    .ok_or_else(|| Error::InvalidRecord(format!("line {}: bad version header", i + 1)))?;
                versions.push(LedgerVersion {
                    number: number
                        .parse()
                        .map_err(|e| Error::InvalidRecord(format!("line {}: bad version number: {e}", i + 1)))?,
                    date: NaiveDate::parse_from_str(date, "%Y-%m-%d")
                        .map_err(|e| Error::InvalidRecord(format!("line {}: bad version date: {e}", i + 1)))?,
                    records: Vec::new(),
                });
                continue;
            }
            let version = versions
                .last_mut()
                .ok_or_else(|| Error::InvalidRecord(format!("line {}: record before first version header", i + 1)))?;
            version.records.push(CommitmentRecord::from_line(line)?);
        }
        let ledger = MasterLedger { versions };
        ledger.validate()?;
        Ok(ledger)
    }

    pub fn load(path: &Path) -> Result<MasterLedger> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Appends one version to the ledger file at `path` under an exclusive
    /// lock, syncing before returning. Existing bytes are never rewritten.
    pub fn append_to_file(path: &Path, new_records: &[CommitmentRecord], date: NaiveDate) -> Result<MasterLedger> {
        let mut file = OpenOptions::new().create(true).read(true).append(true).open(path)?;
        file.lock()?;
        let text = std::fs::read_to_string(path)?;
        let ledger = Self::parse(&text)?;
        let next = ledger.append_version(new_records, date)?;
        let block = render_version(next.latest().expect("version just appended"));
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(Error::LedgerViolation("ledger file does not end with a newline".into()));
        }
        file.write_all(block.as_bytes())?;
        file.sync_all()?;
        file.unlock()?;
        Ok(next)
    }
}

fn render_version(v: &LedgerVersion) -> String {
    let mut out = format!("#version {} {}\n", v.number, v.date);
    for r in &v.records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}
