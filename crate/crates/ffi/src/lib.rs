//! C ABI for the mutual-review simulator.
//!
//! Configurations and behavior profiles are opaque handles created and freed
//! by this library. Every fallible call returns an [`MrStatus`]; on failure a
//! description is kept per thread and can be fetched with
//! [`mr_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mutual_review::oracle::{self, UtilityParams};
use mutual_review::{
    Arm, BehaviorProfile, Condition, Controversy, Engine, GroupConfig, Merit, SimError, Strategy,
};

/// Result codes.
#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SamplingExhausted = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Which closed-form utility [`mr_utility`] evaluates.
#[repr(i32)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MrUtility {
    Truthful = 0,
    Evil = 1,
    EvilWithBonus = 2,
}

/// Opaque group configuration.
pub struct MrConfig(GroupConfig);

/// Opaque behavior profile.
pub struct MrProfile(BehaviorProfile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: MrStatus, msg: impl Into<String>) -> MrStatus {
    set_error(msg);
    status
}

fn from_sim(e: SimError) -> MrStatus {
    let status = match e {
        SimError::Config(_) => MrStatus::InvalidArgument,
        SimError::SamplingExhausted { .. } => MrStatus::SamplingExhausted,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> MrStatus) -> MrStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(MrStatus::Panic, "internal panic"))
}

macro_rules! deref {
    ($p:expr, $what:literal) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(MrStatus::NullPointer, concat!($what, " is null")),
        }
    };
    (mut $p:expr, $what:literal) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(MrStatus::NullPointer, concat!($what, " is null")),
        }
    };
}

fn engine(workers: usize) -> Engine {
    if workers == 0 {
        Engine::new()
    } else {
        Engine::with_workers(workers)
    }
}

/// Copies `src` into the caller's `len`-element buffer.
fn copy_out(src: &[f64], dst: *mut f64, len: usize, what: &str) -> MrStatus {
    if dst.is_null() {
        return fail(MrStatus::NullPointer, format!("{what} buffer is null"));
    }
    if len < src.len() {
        return fail(
            MrStatus::BufferTooSmall,
            format!("{what} buffer holds {len} values, {} needed", src.len()),
        );
    }
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len()) };
    MrStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (always
/// NUL-terminated when `len > 0`) and returns the length the full message
/// needs including the terminator; 0 if there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len) - 1;
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Creates a configuration of `n` proposals, `m` reviews per PI and
/// acceptance rate `rate`, with bonuses on and mutual review allowed. Returns
/// null (and records the reason) if the values are invalid.
#[no_mangle]
pub extern "C" fn mr_config_new(n: usize, m: usize, rate: f64) -> *mut MrConfig {
    let mut out = ptr::null_mut();
    guard(|| {
        let cfg = GroupConfig::new(n, m, rate);
        if let Err(e) = cfg.validate() {
            return fail(MrStatus::InvalidArgument, e.to_string());
        }
        out = Box::into_raw(Box::new(MrConfig(cfg)));
        MrStatus::Ok
    });
    out
}

/// # Safety
/// `cfg` must be null or a handle from [`mr_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mr_config_free(cfg: *mut MrConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_config_set_bonus(cfg: *mut MrConfig, enabled: bool) -> MrStatus {
    guard(|| {
        let c = deref!(mut cfg, "config");
        c.0.bonus_enabled = enabled;
        MrStatus::Ok
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_config_set_mutual_review(
    cfg: *mut MrConfig,
    allowed: bool,
) -> MrStatus {
    guard(|| {
        let c = deref!(mut cfg, "config");
        c.0.mutual_review_allowed = allowed;
        MrStatus::Ok
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_config_set_utility_exponent(cfg: *mut MrConfig, p: f64) -> MrStatus {
    guard(|| {
        let c = deref!(mut cfg, "config");
        let updated = c.0.clone().with_utility_exponent(p);
        if let Err(e) = updated.validate() {
            return fail(MrStatus::InvalidArgument, e.to_string());
        }
        c.0 = updated;
        MrStatus::Ok
    })
}

/// Number of funded proposals, or 0 for a null handle.
///
/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_config_funded_count(cfg: *const MrConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.0.funded_count())
}

/// Creates a profile in which every PI reviews honestly without noise.
#[no_mangle]
pub extern "C" fn mr_profile_new_honest() -> *mut MrProfile {
    Box::into_raw(Box::new(MrProfile(BehaviorProfile::honest())))
}

/// # Safety
/// `profile` must be null or a handle from [`mr_profile_new_honest`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn mr_profile_free(profile: *mut MrProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

unsafe fn edit_profile(
    profile: *mut MrProfile,
    f: impl FnOnce(BehaviorProfile) -> Result<BehaviorProfile, String>,
) -> MrStatus {
    guard(|| {
        let p = deref!(mut profile, "profile");
        match f(p.0.clone()) {
            Ok(updated) => {
                p.0 = updated;
                MrStatus::Ok
            }
            Err(msg) => fail(MrStatus::InvalidArgument, msg),
        }
    })
}

fn merit(k: usize) -> Result<Merit, String> {
    if k == 0 {
        Err("merits are numbered from 1".into())
    } else {
        Ok(Merit(k))
    }
}

/// Perception noise of every reviewer without an individual setting.
///
/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_profile_set_noise(profile: *mut MrProfile, sigma: f64) -> MrStatus {
    edit_profile(profile, |p| {
        if sigma >= 0.0 && sigma.is_finite() {
            Ok(p.with_noise(sigma))
        } else {
            Err(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            ))
        }
    })
}

/// The PI with merit `who` submits reversed rankings.
///
/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_profile_set_reverse(profile: *mut MrProfile, who: usize) -> MrStatus {
    edit_profile(profile, |p| {
        Ok(p.with_strategy(merit(who)?, Strategy::ReverseRanking))
    })
}

/// The PI with merit `who` reviews honestly with its own noise `sigma`.
///
/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_profile_set_noisy(
    profile: *mut MrProfile,
    who: usize,
    sigma: f64,
) -> MrStatus {
    edit_profile(profile, |p| {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            ));
        }
        Ok(p.with_strategy(merit(who)?, Strategy::Noisy { sigma }))
    })
}

/// `from` gives `to` the top score and reverse-scores the rest of its pile.
///
/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_profile_set_one_sided_favor(
    profile: *mut MrProfile,
    from: usize,
    to: usize,
) -> MrStatus {
    edit_profile(profile, |p| {
        if from == to {
            return Err(format!("PI {from} cannot be their own ally"));
        }
        Ok(p.with_strategy(merit(from)?, Strategy::OneSidedFavor { ally: merit(to)? }))
    })
}

/// `a` and `b` give each other the top score and review the rest honestly.
///
/// # Safety
/// `profile` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mr_profile_set_reciprocal_pair(
    profile: *mut MrProfile,
    a: usize,
    b: usize,
) -> MrStatus {
    edit_profile(profile, |p| {
        if a == b {
            return Err(format!("PI {a} cannot be their own ally"));
        }
        Ok(p.with_reciprocal_pair(merit(a)?, merit(b)?))
    })
}

/// Marks `len` proposals as controversial: each reviewer perceives them
/// `shift` above (with probability `plus_probability`) or below their merit.
///
/// # Safety
/// `profile` must be a live handle; `merits` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn mr_profile_set_controversy(
    profile: *mut MrProfile,
    merits: *const usize,
    len: usize,
    shift: f64,
    plus_probability: f64,
) -> MrStatus {
    if merits.is_null() && len > 0 {
        return fail(MrStatus::NullPointer, "merits is null");
    }
    let list: Vec<usize> = if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(merits, len).to_vec()
    };
    edit_profile(profile, |p| {
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(format!(
                "controversy shift must be finite and non-negative, got {shift}"
            ));
        }
        if !(0.0..=1.0).contains(&plus_probability) {
            return Err(format!(
                "probability must lie in [0, 1], got {plus_probability}"
            ));
        }
        let proposals = list.into_iter().map(merit).collect::<Result<Vec<_>, _>>()?;
        Ok(p.with_controversy(Controversy {
            proposals,
            shift,
            plus_probability,
        }))
    })
}

/// Estimates each proposal's funding probability over `replications` runs.
/// `probabilities` and `std_errors` must hold at least N values. `workers` of
/// 0 uses every core.
///
/// # Safety
/// Handles must be live; buffers must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn mr_run_experiment(
    cfg: *const MrConfig,
    profile: *const MrProfile,
    replications: u64,
    seed: u64,
    workers: usize,
    probabilities: *mut f64,
    std_errors: *mut f64,
    len: usize,
) -> MrStatus {
    guard(|| {
        let c = deref!(cfg, "config");
        let p = deref!(profile, "profile");
        let stats = match engine(workers).run_experiment(&c.0, &p.0, replications, seed) {
            Ok(s) => s,
            Err(e) => return from_sim(e),
        };
        match copy_out(
            &stats.funded_probability,
            probabilities,
            len,
            "probabilities",
        ) {
            MrStatus::Ok => copy_out(&stats.std_error, std_errors, len, "std_errors"),
            s => s,
        }
    })
}

/// Estimates the change in funding probability from `base` to `variant`.
/// Bonuses follow `base_bonus` / `variant_bonus` rather than the config. When
/// `condition_reviewer` and `condition_proposal` are both non-zero only
/// assignments in which that reviewer reviews that proposal are counted.
/// `paired` reuses the same random draws for both arms.
///
/// # Safety
/// Handles must be live; buffers must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn mr_delta_experiment(
    cfg: *const MrConfig,
    base: *const MrProfile,
    base_bonus: bool,
    variant: *const MrProfile,
    variant_bonus: bool,
    condition_reviewer: usize,
    condition_proposal: usize,
    replications: u64,
    seed: u64,
    paired: bool,
    workers: usize,
    delta: *mut f64,
    std_errors: *mut f64,
    len: usize,
) -> MrStatus {
    guard(|| {
        let c = deref!(cfg, "config");
        let b = deref!(base, "base profile");
        let v = deref!(variant, "variant profile");
        let condition = match (condition_reviewer, condition_proposal) {
            (0, 0) => Condition::Always,
            (0, _) | (_, 0) => {
                return fail(
                    MrStatus::InvalidArgument,
                    "condition needs both a reviewer and a proposal",
                )
            }
            (r, p) => Condition::Reviews {
                reviewer: Merit(r),
                proposal: Merit(p),
            },
        };
        let result = engine(workers).conditional_delta(
            &c.0,
            &Arm::new(b.0.clone(), base_bonus),
            &Arm::new(v.0.clone(), variant_bonus),
            condition,
            replications,
            seed,
            paired,
        );
        let stats = match result {
            Ok(s) => s,
            Err(e) => return from_sim(e),
        };
        match copy_out(&stats.delta, delta, len, "delta") {
            MrStatus::Ok => copy_out(&stats.delta_std_error, std_errors, len, "std_errors"),
            s => s,
        }
    })
}

fn check_merit(c: &GroupConfig, who: usize) -> Result<Merit, MrStatus> {
    if who >= 1 && who <= c.n_proposals {
        Ok(Merit(who))
    } else {
        Err(fail(
            MrStatus::InvalidArgument,
            format!("merit index {who} is outside 1..={}", c.n_proposals),
        ))
    }
}

/// Probability that an honest exact reviewer gives proposal `who` Borda
/// score `k`.
///
/// # Safety
/// `cfg` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_borda_pmf(
    cfg: *const MrConfig,
    who: usize,
    k: usize,
    out: *mut f64,
) -> MrStatus {
    guard(|| {
        let c = deref!(cfg, "config");
        let o = deref!(mut out, "out");
        match check_merit(&c.0, who) {
            Ok(i) => {
                *o = oracle::borda_pmf(i, k, &c.0);
                MrStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Expected MBC of proposal `who` when `reversed` of its reviewers reverse
/// their rankings.
///
/// # Safety
/// `cfg` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_expected_mbc(
    cfg: *const MrConfig,
    who: usize,
    reversed: usize,
    out: *mut f64,
) -> MrStatus {
    guard(|| {
        let c = deref!(cfg, "config");
        let o = deref!(mut out, "out");
        if reversed > c.0.reviews_per_pi {
            return fail(
                MrStatus::InvalidArgument,
                "more reversed reviewers than reviews per proposal",
            );
        }
        match check_merit(&c.0, who) {
            Ok(i) => {
                *o = oracle::expected_mbc(i, reversed, &c.0);
                MrStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Closed-form expected utility of PI `who` under the config's group size
/// and utility exponent.
///
/// # Safety
/// `cfg` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_utility(
    cfg: *const MrConfig,
    kind: MrUtility,
    who: usize,
    out: *mut f64,
) -> MrStatus {
    guard(|| {
        let c = deref!(cfg, "config");
        let o = deref!(mut out, "out");
        let i = match check_merit(&c.0, who) {
            Ok(i) => i,
            Err(s) => return s,
        };
        let params = UtilityParams::new(c.0.n_proposals, c.0.reviews_per_pi, c.0.utility_exponent);
        *o = match kind {
            MrUtility::Truthful => oracle::utility_truthful(i, &params),
            MrUtility::Evil => oracle::utility_evil(i, &params),
            MrUtility::EvilWithBonus => oracle::utility_evil_with_bonus(i, &params),
        };
        MrStatus::Ok
    })
}
