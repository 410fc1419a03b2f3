//! C ABI over the `prodrec` library.
//!
//! Every fallible function returns a [`ProdrecStatus`]; on failure the
//! message is available from [`prodrec_last_error_message`] on the same
//! thread. Handles are opaque and must be released with their `_free`
//! function. Strings returned by the library are owned by the caller and
//! released with [`prodrec_string_free`], except those borrowed from a
//! recommendation list, which live as long as the list.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use prodrec::recommender::{recommend_new_user, Recommender};
use prodrec::rules::{fp_growth, generate_rules};
use prodrec::{Dataset, Error, Mode, RecommenderConfig, Source, UserId};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProdrecStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidData = 5,
    Config = 6,
    NotFound = 7,
    Empty = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProdrecMode {
    Simple = 0,
    Method1 = 1,
    Method2 = 2,
    Implicit = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProdrecSource {
    Neighbor = 0,
    Rule = 1,
    Popularity = 2,
}

/// Recommender parameters. Start from [`prodrec_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ProdrecConfig {
    pub k_neighbors: usize,
    pub top_n: usize,
    pub mode: ProdrecMode,
    pub minsup_pct: f64,
    pub minconf_pct: f64,
    pub exclusion_threshold: f64,
    pub use_rules: bool,
}

/// Opaque handle to a loaded dataset.
pub struct ProdrecDataset(Dataset);

struct Entry {
    item: CString,
    score: f64,
    source: ProdrecSource,
    explain: CString,
}

/// Opaque handle to a ranked recommendation list.
pub struct ProdrecRecommendations(Vec<Entry>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ProdrecStatus {
    match e {
        Error::Io { .. } => ProdrecStatus::Io,
        Error::Parse { .. } => ProdrecStatus::Parse,
        Error::Integrity(_) | Error::Range(_) => ProdrecStatus::InvalidData,
        Error::Config(_) | Error::Experiment(_) => ProdrecStatus::Config,
        Error::NotFound { .. } | Error::NoProfile(_) => ProdrecStatus::NotFound,
        Error::NoOverlap | Error::EmptyDataset => ProdrecStatus::Empty,
    }
}

struct Failure(ProdrecStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ProdrecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ProdrecStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ProdrecStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(ProdrecStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ProdrecStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn c_string(s: &str) -> CString {
    CString::new(s.replace('\0', " ")).unwrap_or_default()
}

impl From<ProdrecMode> for Mode {
    fn from(m: ProdrecMode) -> Self {
        match m {
            ProdrecMode::Simple => Mode::Simple,
            ProdrecMode::Method1 => Mode::Method1,
            ProdrecMode::Method2 => Mode::Method2,
            ProdrecMode::Implicit => Mode::Implicit,
        }
    }
}

impl From<&ProdrecConfig> for RecommenderConfig {
    fn from(c: &ProdrecConfig) -> Self {
        RecommenderConfig {
            k_neighbors: c.k_neighbors,
            top_n: c.top_n,
            mode: c.mode.into(),
            minsup_pct: c.minsup_pct,
            minconf_pct: c.minconf_pct,
            exclusion_threshold: c.exclusion_threshold,
            use_rules: c.use_rules,
        }
    }
}

fn to_list(recs: Vec<prodrec::Recommendation>) -> Box<ProdrecRecommendations> {
    Box::new(ProdrecRecommendations(
        recs.into_iter()
            .map(|r| Entry {
                item: c_string(r.item.as_str()),
                score: r.score,
                source: match r.source {
                    Source::Neighbor => ProdrecSource::Neighbor,
                    Source::Rule => ProdrecSource::Rule,
                    Source::Popularity => ProdrecSource::Popularity,
                },
                explain: c_string(&r.explain),
            })
            .collect(),
    ))
}

#[no_mangle]
pub extern "C" fn prodrec_config_default() -> ProdrecConfig {
    let d = RecommenderConfig::default();
    ProdrecConfig {
        k_neighbors: d.k_neighbors,
        top_n: d.top_n,
        mode: ProdrecMode::Simple,
        minsup_pct: d.minsup_pct,
        minconf_pct: d.minconf_pct,
        exclusion_threshold: d.exclusion_threshold,
        use_rules: d.use_rules,
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library.
#[no_mangle]
pub extern "C" fn prodrec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a dataset. `ratings_path` may be null.
///
/// # Safety
/// Paths must be null or NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn prodrec_dataset_load(
    transactions_path: *const c_char,
    ratings_path: *const c_char,
    out: *mut *mut ProdrecDataset,
) -> ProdrecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let tx = str_arg(transactions_path, "transactions_path")?;
        let ratings = if ratings_path.is_null() {
            None
        } else {
            Some(str_arg(ratings_path, "ratings_path")?)
        };
        let ds = Dataset::load(Some(Path::new(tx)), ratings.map(Path::new))?;
        *out = Box::into_raw(Box::new(ProdrecDataset(ds)));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a handle from [`prodrec_dataset_load`], freed once.
#[no_mangle]
pub unsafe extern "C" fn prodrec_dataset_free(dataset: *mut ProdrecDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_dataset_num_users(dataset: *const ProdrecDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.num_users())
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_dataset_num_items(dataset: *const ProdrecDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.items().len())
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_dataset_num_transactions(dataset: *const ProdrecDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.transactions().len())
}

/// Recommends for a user of `dataset`. A null `config` means the defaults.
///
/// # Safety
/// `dataset` must be a live handle, `user` a NUL-terminated string, `config`
/// null or valid, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommend(
    dataset: *const ProdrecDataset,
    user: *const c_char,
    config: *const ProdrecConfig,
    out: *mut *mut ProdrecRecommendations,
) -> ProdrecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let ds = &dataset.as_ref().ok_or_else(|| null("dataset"))?.0;
        let user = UserId::from(str_arg(user, "user")?);
        let config = config.as_ref().map_or_else(RecommenderConfig::default, RecommenderConfig::from);
        let recs = Recommender::new(ds, config)?.recommend(&user)?;
        *out = Box::into_raw(to_list(recs));
        Ok(())
    })
}

/// Popularity ranking for a user with no history.
///
/// # Safety
/// As for [`prodrec_recommend`].
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommend_new(
    dataset: *const ProdrecDataset,
    config: *const ProdrecConfig,
    out: *mut *mut ProdrecRecommendations,
) -> ProdrecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let ds = &dataset.as_ref().ok_or_else(|| null("dataset"))?.0;
        let config = config.as_ref().map_or_else(RecommenderConfig::default, RecommenderConfig::from);
        *out = Box::into_raw(to_list(recommend_new_user(ds, &config)?));
        Ok(())
    })
}

/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommendations_len(list: *const ProdrecRecommendations) -> usize {
    list.as_ref().map_or(0, |l| l.0.len())
}

unsafe fn entry<'a>(list: *const ProdrecRecommendations, index: usize) -> Option<&'a Entry> {
    list.as_ref().and_then(|l| l.0.get(index))
}

/// Item id at `index`, or null when out of range. Borrowed from `list`.
///
/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommendations_item(
    list: *const ProdrecRecommendations,
    index: usize,
) -> *const c_char {
    entry(list, index).map_or(ptr::null(), |e| e.item.as_ptr())
}

/// Score at `index`, or NaN when out of range.
///
/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommendations_score(list: *const ProdrecRecommendations, index: usize) -> f64 {
    entry(list, index).map_or(f64::NAN, |e| e.score)
}

/// Origin of the entry at `index`; out-of-range indices report popularity.
///
/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommendations_source(
    list: *const ProdrecRecommendations,
    index: usize,
) -> ProdrecSource {
    entry(list, index).map_or(ProdrecSource::Popularity, |e| e.source)
}

/// Neighbor id, rule, or `cold-start` for the entry at `index`; null when out
/// of range. Borrowed from `list`.
///
/// # Safety
/// `list` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommendations_explain(
    list: *const ProdrecRecommendations,
    index: usize,
) -> *const c_char {
    entry(list, index).map_or(ptr::null(), |e| e.explain.as_ptr())
}

/// # Safety
/// `list` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn prodrec_recommendations_free(list: *mut ProdrecRecommendations) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Mines association rules and writes them as newline-terminated lines
/// `X => Y, support=σ%, confidence=τ%`. Release `*out` with
/// [`prodrec_string_free`].
///
/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn prodrec_mine_rules(
    dataset: *const ProdrecDataset,
    minsup_pct: f64,
    minconf_pct: f64,
    out: *mut *mut c_char,
) -> ProdrecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let ds = &dataset.as_ref().ok_or_else(|| null("dataset"))?.0;
        let frequents = fp_growth(ds.transactions(), minsup_pct)?;
        let rules = generate_rules(&frequents, minconf_pct, None)?;
        let text: String = rules.iter().map(|r| format!("{r}\n")).collect();
        *out = c_string(&text).into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn prodrec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
