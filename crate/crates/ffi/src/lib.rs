//! C ABI for the herdshare secret sharing toolkit.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns an [`HsStatus`] and records a human-readable
//! message retrievable with [`hs_last_error_message`]. The public control
//! area crosses the boundary as JSON in the same format the CLI persists,
//! so files written by one side are readable by the other.
//!
//! The generated header lives at `include/herdshare.h` and is refreshed by
//! the build script via cbindgen.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;
use std::slice;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use herdshare::access::{AccessStructureBasis, ParticipantId, Subset};
use herdshare::hss::{
    commit_shares, recover, reduce_to_basis, setup, verify_share, DealerOutput, HashSpec,
    HssError, PublicControlArea, Share,
};
use herdshare::storage::{new_scheme_id, ControlAreaFile};

/// Result of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was malformed (bad UTF-8, bad sizes, bad indices).
    InvalidArgument = 2,
    /// The access structure is invalid.
    InvalidStructure = 3,
    /// A fixed secret does not have digest length.
    BadSecretLength = 4,
    /// The participants do not form an authorized subset.
    Unauthorized = 5,
    /// The control area carries no commitments.
    CommitmentsAbsent = 6,
    /// The share does not match its commitment.
    VerifyFailed = 7,
    /// JSON parsing or validation failed.
    Parse = 8,
    /// A caller-supplied buffer is too small.
    BufferTooSmall = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: HsStatus, message: impl Into<String>) -> HsStatus {
    let message = CString::new(message.into()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
    status
}

/// Opaque access structure basis.
pub struct HsBasis {
    inner: AccessStructureBasis,
}

/// Opaque dealer output: shares, secret and the public control area.
pub struct HsDealer {
    output: DealerOutput,
    public: PublicControlArea,
    scheme_id: String,
}

/// Opaque parsed public control area.
pub struct HsControlArea {
    public: PublicControlArea,
}

/// Message describing the most recent failure on this thread. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Frees a string returned by this library. Passing null is a no-op.
///
/// # Safety
/// `s` must have been returned by a herdshare FFI call and not freed yet.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the `(t+1, n)` threshold basis.
///
/// # Safety
/// `out` must be a valid pointer to an `HsBasis*` slot.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_threshold(
    t_plus_1: u16,
    n: u16,
    out: *mut *mut HsBasis,
) -> HsStatus {
    if out.is_null() {
        return fail(HsStatus::NullArgument, "out is null");
    }
    match AccessStructureBasis::threshold(t_plus_1, n) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(HsBasis { inner }));
            HsStatus::Ok
        }
        Err(e) => fail(HsStatus::InvalidStructure, e.to_string()),
    }
}

/// Builds a basis from JSON rows (`[[1,2],[1,3]]`) over participants
/// `1..=n`. The rows must already form an antichain.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_from_json(
    json: *const c_char,
    n: u16,
    out: *mut *mut HsBasis,
) -> HsStatus {
    if json.is_null() || out.is_null() {
        return fail(HsStatus::NullArgument, "json or out is null");
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(text) => text,
        Err(e) => return fail(HsStatus::InvalidArgument, format!("json is not UTF-8: {e}")),
    };
    let rows: Vec<Vec<u16>> = match serde_json::from_str(text) {
        Ok(rows) => rows,
        Err(e) => return fail(HsStatus::Parse, e.to_string()),
    };
    let subsets = match rows.into_iter().map(Subset::new).collect::<Result<Vec<_>, _>>() {
        Ok(subsets) => subsets,
        Err(e) => return fail(HsStatus::InvalidStructure, e.to_string()),
    };
    match AccessStructureBasis::new(n, subsets) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(HsBasis { inner }));
            HsStatus::Ok
        }
        Err(e) => fail(HsStatus::InvalidStructure, e.to_string()),
    }
}

/// Number of minimal authorized subsets in the basis.
///
/// # Safety
/// `basis` must be a live handle from `hs_basis_*`.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_len(basis: *const HsBasis) -> usize {
    if basis.is_null() {
        return 0;
    }
    (*basis).inner.len()
}

/// Frees a basis handle. Passing null is a no-op.
///
/// # Safety
/// `basis` must be a live handle from `hs_basis_*` (or null) and not freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn hs_basis_free(basis: *mut HsBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Deals a SHA-256 scheme over `basis`. `secret` may be null for a random
/// secret (then 32 bytes otherwise); `seed` may be null for system entropy.
/// Commitments are always published. The shares and the secret are zeroized
/// when the handle is freed.
///
/// # Safety
/// `basis` must be live; `secret`, when non-null, must point to
/// `secret_len` readable bytes; `seed`, when non-null, must be readable;
/// `out` must be a valid slot.
#[no_mangle]
pub unsafe extern "C" fn hs_setup(
    basis: *const HsBasis,
    secret: *const u8,
    secret_len: usize,
    seed: *const u64,
    out: *mut *mut HsDealer,
) -> HsStatus {
    if basis.is_null() || out.is_null() {
        return fail(HsStatus::NullArgument, "basis or out is null");
    }
    let fixed_secret = if secret.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(secret, secret_len))
    };
    let mut rng = if seed.is_null() {
        ChaCha20Rng::from_os_rng()
    } else {
        ChaCha20Rng::seed_from_u64(*seed)
    };
    let hash = HashSpec::sha256();
    let output = match setup(&(*basis).inner, &hash, fixed_secret, &mut rng) {
        Ok(output) => output,
        Err(e @ HssError::BadSecretLength { .. }) => {
            return fail(HsStatus::BadSecretLength, e.to_string())
        }
        Err(e) => return fail(HsStatus::InvalidStructure, e.to_string()),
    };
    let commitments = match commit_shares(output.shares(), &hash) {
        Ok(map) => map,
        Err(e) => return fail(HsStatus::InvalidStructure, e.to_string()),
    };
    // keep a commitment-carrying copy of the control area beside the output
    let mut public = output.public().clone();
    if let Err(e) = public.attach_commitments(commitments) {
        return fail(HsStatus::InvalidStructure, e.to_string());
    }
    let scheme_id = new_scheme_id(&mut rng);
    *out = Box::into_raw(Box::new(HsDealer {
        output,
        public,
        scheme_id,
    }));
    HsStatus::Ok
}

/// Digest length of the dealer's scheme (share and secret length).
///
/// # Safety
/// `dealer` must be a live handle from `hs_setup`.
#[no_mangle]
pub unsafe extern "C" fn hs_dealer_digest_len(dealer: *const HsDealer) -> usize {
    if dealer.is_null() {
        return 0;
    }
    (*dealer).public.digest_len()
}

/// Number of participants in the dealer's scheme.
///
/// # Safety
/// `dealer` must be a live handle from `hs_setup`.
#[no_mangle]
pub unsafe extern "C" fn hs_dealer_participants(dealer: *const HsDealer) -> u16 {
    if dealer.is_null() {
        return 0;
    }
    (*dealer).public.n()
}

/// Copies one participant's share into `buf` (which must hold at least
/// `hs_dealer_digest_len` bytes).
///
/// # Safety
/// `dealer` must be live and `buf` must point to `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hs_dealer_share(
    dealer: *const HsDealer,
    participant: u16,
    buf: *mut u8,
    buf_len: usize,
) -> HsStatus {
    if dealer.is_null() || buf.is_null() {
        return fail(HsStatus::NullArgument, "dealer or buf is null");
    }
    let dealer = &*dealer;
    let pid = match ParticipantId::new(participant) {
        Ok(pid) => pid,
        Err(e) => return fail(HsStatus::InvalidArgument, e.to_string()),
    };
    let share = match dealer.output.share_for(pid) {
        Some(share) => share,
        None => {
            return fail(
                HsStatus::InvalidArgument,
                format!("no participant {participant}"),
            )
        }
    };
    if buf_len < share.len() {
        return fail(
            HsStatus::BufferTooSmall,
            format!("need {} bytes, got {buf_len}", share.len()),
        );
    }
    ptr::copy_nonoverlapping(share.bytes().as_ptr(), buf, share.len());
    HsStatus::Ok
}

/// Copies the dealt secret into `buf` (at least `hs_dealer_digest_len`
/// bytes).
///
/// # Safety
/// `dealer` must be live and `buf` must point to `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hs_dealer_secret(
    dealer: *const HsDealer,
    buf: *mut u8,
    buf_len: usize,
) -> HsStatus {
    if dealer.is_null() || buf.is_null() {
        return fail(HsStatus::NullArgument, "dealer or buf is null");
    }
    let secret = (*dealer).output.secret();
    if buf_len < secret.len() {
        return fail(
            HsStatus::BufferTooSmall,
            format!("need {} bytes, got {buf_len}", secret.len()),
        );
    }
    ptr::copy_nonoverlapping(secret.as_bytes().as_ptr(), buf, secret.len());
    HsStatus::Ok
}

/// Serializes the dealer's public control area (with commitments) to JSON.
/// The returned string must be released with `hs_string_free`.
///
/// # Safety
/// `dealer` must be live and `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn hs_dealer_control_area_json(
    dealer: *const HsDealer,
    out: *mut *mut c_char,
) -> HsStatus {
    if dealer.is_null() || out.is_null() {
        return fail(HsStatus::NullArgument, "dealer or out is null");
    }
    let dealer = &*dealer;
    let file = ControlAreaFile::from_public(&dealer.public, &dealer.scheme_id);
    match CString::new(file.emit()) {
        Ok(text) => {
            *out = text.into_raw();
            HsStatus::Ok
        }
        Err(e) => fail(HsStatus::InvalidArgument, e.to_string()),
    }
}

/// Frees a dealer handle, zeroizing shares and secret. Null is a no-op.
///
/// # Safety
/// `dealer` must come from `hs_setup` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hs_dealer_free(dealer: *mut HsDealer) {
    if !dealer.is_null() {
        drop(Box::from_raw(dealer));
    }
}

/// Parses and validates a control area from JSON.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn hs_control_area_from_json(
    json: *const c_char,
    out: *mut *mut HsControlArea,
) -> HsStatus {
    if json.is_null() || out.is_null() {
        return fail(HsStatus::NullArgument, "json or out is null");
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(text) => text,
        Err(e) => return fail(HsStatus::InvalidArgument, format!("json is not UTF-8: {e}")),
    };
    let file = match ControlAreaFile::parse(text) {
        Ok(file) => file,
        Err(e) => return fail(HsStatus::Parse, e.to_string()),
    };
    match file.to_public() {
        Ok(public) => {
            *out = Box::into_raw(Box::new(HsControlArea { public }));
            HsStatus::Ok
        }
        Err(e) => fail(HsStatus::Parse, e.to_string()),
    }
}

/// Digest length recorded in the control area.
///
/// # Safety
/// `area` must be a live handle from `hs_control_area_from_json`.
#[no_mangle]
pub unsafe extern "C" fn hs_control_area_digest_len(area: *const HsControlArea) -> usize {
    if area.is_null() {
        return 0;
    }
    (*area).public.digest_len()
}

/// Version of the control area (starts at 1, bumped by refresh).
///
/// # Safety
/// `area` must be a live handle from `hs_control_area_from_json`.
#[no_mangle]
pub unsafe extern "C" fn hs_control_area_version(area: *const HsControlArea) -> u32 {
    if area.is_null() {
        return 0;
    }
    (*area).public.version()
}

/// Frees a control area handle. Null is a no-op.
///
/// # Safety
/// `area` must come from `hs_control_area_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hs_control_area_free(area: *mut HsControlArea) {
    if !area.is_null() {
        drop(Box::from_raw(area));
    }
}

/// Recovers the secret from `count` shares laid out as one concatenated
/// buffer of `count * digest_len` bytes, `participants[i]` owning the i-th
/// slice. Any authorized set works; supersets are reduced to a minimal
/// authorized subset internally. Writes exactly `digest_len` bytes.
///
/// # Safety
/// `area` must be live; `participants` must point to `count` readable
/// entries; `shares` to `shares_len` readable bytes; `secret_out` to
/// `secret_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hs_recover(
    area: *const HsControlArea,
    participants: *const u16,
    count: usize,
    shares: *const u8,
    shares_len: usize,
    secret_out: *mut u8,
    secret_len: usize,
) -> HsStatus {
    if area.is_null() || participants.is_null() || shares.is_null() || secret_out.is_null() {
        return fail(HsStatus::NullArgument, "null argument");
    }
    let public = &(*area).public;
    let digest_len = public.digest_len();
    if shares_len != count * digest_len {
        return fail(
            HsStatus::InvalidArgument,
            format!("shares buffer must be count * {digest_len} bytes"),
        );
    }
    if secret_len < digest_len {
        return fail(
            HsStatus::BufferTooSmall,
            format!("need {digest_len} bytes, got {secret_len}"),
        );
    }
    let ids = slice::from_raw_parts(participants, count);
    let bytes = slice::from_raw_parts(shares, shares_len);
    let supplied = match Subset::new(ids.iter().copied()) {
        Ok(subset) => subset,
        Err(e) => return fail(HsStatus::InvalidArgument, e.to_string()),
    };
    let target = match reduce_to_basis(&supplied, public.basis()) {
        Ok(target) => target,
        Err(_) => {
            return fail(
                HsStatus::Unauthorized,
                format!("subset {supplied} is not authorized"),
            )
        }
    };
    let share_objects: Vec<Share> = ids
        .iter()
        .enumerate()
        .filter(|(_, id)| target.contains(ParticipantId::new(**id).expect("validated")))
        .map(|(i, id)| {
            Share::new(
                ParticipantId::new(*id).expect("validated"),
                bytes[i * digest_len..(i + 1) * digest_len].to_vec(),
            )
        })
        .collect();
    match recover(&share_objects, &target, public) {
        Ok(secret) => {
            ptr::copy_nonoverlapping(secret.as_bytes().as_ptr(), secret_out, digest_len);
            HsStatus::Ok
        }
        Err(e) => fail(HsStatus::InvalidArgument, e.to_string()),
    }
}

/// Verifies one share against the control area's commitments. Returns
/// `Ok` when the share matches, `VerifyFailed` when it does not, and
/// `CommitmentsAbsent` when the area carries no commitments.
///
/// # Safety
/// `area` must be live and `share` must point to `share_len` readable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn hs_verify_share(
    area: *const HsControlArea,
    participant: u16,
    share: *const u8,
    share_len: usize,
) -> HsStatus {
    if area.is_null() || share.is_null() {
        return fail(HsStatus::NullArgument, "area or share is null");
    }
    let pid = match ParticipantId::new(participant) {
        Ok(pid) => pid,
        Err(e) => return fail(HsStatus::InvalidArgument, e.to_string()),
    };
    let bytes = slice::from_raw_parts(share, share_len).to_vec();
    let share = Share::new(pid, bytes);
    match verify_share(&share, &(*area).public) {
        Ok(true) => HsStatus::Ok,
        Ok(false) => fail(HsStatus::VerifyFailed, "share does not match commitment"),
        Err(HssError::CommitmentsAbsent) => {
            fail(HsStatus::CommitmentsAbsent, "no commitments published")
        }
        Err(e) => fail(HsStatus::InvalidArgument, e.to_string()),
    }
}
