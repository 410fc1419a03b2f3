//! The two on-disk formats.
//!
//! ```text
//! tid,user,seq,items
//! 100,U1,1,P1;P2
//! ```
//!
//! ```text
//! user,item,value
//! U1,P1,5
//! ```

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{check_rating_value, check_transaction_items, ItemId, RatingRecord, Transaction, UserId};
use crate::error::{Error, Result};

pub const TRANSACTIONS_HEADER: [&str; 4] = ["tid", "user", "seq", "items"];
pub const RATINGS_HEADER: [&str; 3] = ["user", "item", "value"];

const ITEM_SEPARATOR: char = ';';

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(r)
}

/// Reads every row as `(line, record)`, checking and dropping the header.
fn records<R: Read>(r: R, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut rows = Vec::new();
    for (idx, rec) in reader(r).into_records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if idx == 0 {
            if rec.iter().ne(header.iter().copied()) {
                return Err(Error::parse(line, format!("expected header '{}'", header.join(","))));
            }
            continue;
        }
        rows.push((line, rec));
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(line, e.to_string())
}

pub fn load_transactions(path: &Path) -> Result<Vec<Transaction>> {
    read_transactions(open(path)?)
}

/// Parses transaction CSV. Either every row is accepted or nothing is.
pub fn read_transactions<R: Read>(r: R) -> Result<Vec<Transaction>> {
    let mut out = Vec::new();
    let mut seen_seq = BTreeSet::new();
    for (line, rec) in records(r, &TRANSACTIONS_HEADER)? {
        if rec.len() != 4 {
            return Err(Error::parse(line, format!("expected 4 fields, found {}", rec.len())));
        }
        let tid = rec[0].to_owned();
        let user = &rec[1];
        if tid.is_empty() || user.is_empty() {
            return Err(Error::parse(line, "empty tid or user"));
        }
        let seq: u64 = rec[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("seq '{}' is not a non-negative integer", &rec[2])))?;
        let items: Vec<ItemId> = if rec[3].is_empty() {
            Vec::new()
        } else {
            rec[3].split(ITEM_SEPARATOR).map(ItemId::from).collect()
        };
        let t = Transaction {
            tid,
            user: UserId::from(user),
            seq,
            items,
        };
        check_transaction_items(&t).map_err(|m| Error::parse(line, m))?;
        if !seen_seq.insert((t.user.clone(), seq)) {
            return Err(Error::Integrity(format!(
                "line {line}: user '{}' already has a transaction with seq {seq}",
                t.user
            )));
        }
        out.push(t);
    }
    Ok(out)
}

pub fn load_ratings(path: &Path) -> Result<Vec<RatingRecord>> {
    read_ratings(open(path)?)
}

pub fn read_ratings<R: Read>(r: R) -> Result<Vec<RatingRecord>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, rec) in records(r, &RATINGS_HEADER)? {
        if rec.len() != 3 {
            return Err(Error::parse(line, format!("expected 3 fields, found {}", rec.len())));
        }
        if rec[0].is_empty() || rec[1].is_empty() {
            return Err(Error::parse(line, "empty user or item"));
        }
        let value: f64 = rec[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(line, format!("value '{}' is not a number", &rec[2])))?;
        check_rating_value(value).map_err(|m| Error::Range(format!("line {line}: {m}")))?;
        let r = RatingRecord {
            user: UserId::from(&rec[0]),
            item: ItemId::from(&rec[1]),
            value,
        };
        if !seen.insert((r.user.clone(), r.item.clone())) {
            return Err(Error::Integrity(format!(
                "line {line}: duplicate rating for ({}, {})",
                r.user, r.item
            )));
        }
        out.push(r);
    }
    Ok(out)
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn write_error(e: csv::Error) -> Error {
    Error::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e.to_string()),
    }
}

pub fn write_transactions<W: Write>(w: W, transactions: &[Transaction]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(TRANSACTIONS_HEADER).map_err(write_error)?;
    for t in transactions {
        let items: Vec<&str> = t.items.iter().map(ItemId::as_str).collect();
        wtr.write_record([
            t.tid.as_str(),
            t.user.as_str(),
            &t.seq.to_string(),
            &items.join(";"),
        ])
        .map_err(write_error)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<csv>".into(),
        source,
    })
}

pub fn write_ratings<W: Write>(w: W, ratings: &[RatingRecord]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(RATINGS_HEADER).map_err(write_error)?;
    for r in ratings {
        wtr.write_record([r.user.as_str(), r.item.as_str(), &r.value.to_string()])
            .map_err(write_error)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<csv>".into(),
        source,
    })
}
