//! C ABI over the vnskit toolkit. Handles are opaque; every fallible call
//! returns a [`VkStatus`] and deposits its result through an out pointer.
//! The detailed message of the most recent failure on the calling thread
//! is available via [`vk_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use vnskit::error::Error;
use vnskit::metrics;
use vnskit::raster::{ColorImage, Mask, SoftMap};
use vnskit::vns;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

/// Status codes for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VkStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Format = 4,
    Shape = 5,
    UndefinedMetric = 6,
    EmptyMask = 7,
    Config = 8,
    Other = 9,
}

fn status_for(err: &Error) -> VkStatus {
    match err {
        Error::Io { .. } => VkStatus::Io,
        Error::Format { .. } => VkStatus::Format,
        Error::Shape(_) => VkStatus::Shape,
        Error::UndefinedMetric(_) => VkStatus::UndefinedMetric,
        Error::EmptyMask(_) => VkStatus::EmptyMask,
        Error::Config(_) => VkStatus::Config,
        _ => VkStatus::Other,
    }
}

fn fail(err: &Error) -> VkStatus {
    set_last_error(&err.to_string());
    status_for(err)
}

fn null_arg(what: &str) -> VkStatus {
    set_last_error(&format!("null argument: {what}"));
    VkStatus::NullArgument
}

/// Opaque binary mask handle.
pub struct VkMask(Mask);

/// Opaque soft prediction map handle.
pub struct VkSoftMap(SoftMap);

/// Component breakdown of the non-saliency score.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VkVnsBreakdown {
    pub color_contrast: f64,
    pub texture_contrast: f64,
    pub c_fb: f64,
    pub boundary_clarity: f64,
    pub score: f64,
}

unsafe fn path_from(ptr_: *const c_char) -> Result<&'static Path, VkStatus> {
    if ptr_.is_null() {
        return Err(null_arg("path"));
    }
    let s = CStr::from_ptr(ptr_).to_str().map_err(|_| {
        set_last_error("path is not valid utf-8");
        VkStatus::InvalidUtf8
    })?;
    Ok(Path::new(s))
}

/// Loads a binary mask from an 8-bit grayscale PNG or PGM file; a pixel
/// is foreground iff its intensity >= threshold.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer; the
/// returned handle must be released with [`vk_mask_free`].
#[no_mangle]
pub unsafe extern "C" fn vk_mask_load(
    path: *const c_char,
    threshold: u8,
    out: *mut *mut VkMask,
) -> VkStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match vnskit::io::load_mask(path, threshold) {
        Ok(mask) => {
            *out = Box::into_raw(Box::new(VkMask(mask)));
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Builds a mask from a row-major byte raster (nonzero = foreground).
///
/// # Safety
/// `bits` must point to `width * height` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn vk_mask_from_bytes(
    width: usize,
    height: usize,
    bits: *const u8,
    out: *mut *mut VkMask,
) -> VkStatus {
    if out.is_null() || bits.is_null() {
        return null_arg("bits/out");
    }
    let slice = std::slice::from_raw_parts(bits, width.saturating_mul(height));
    match Mask::new(width, height, slice.iter().map(|&b| b != 0).collect()) {
        Ok(mask) => {
            *out = Box::into_raw(Box::new(VkMask(mask)));
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `mask` must be a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn vk_mask_free(mask: *mut VkMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// # Safety
/// `mask` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn vk_mask_fg_count(mask: *const VkMask) -> u64 {
    if mask.is_null() {
        return 0;
    }
    (*mask).0.fg_count() as u64
}

/// Loads a soft prediction map from an 8-bit grayscale file (values
/// scaled into [0, 1]).
///
/// # Safety
/// As [`vk_mask_load`]; release with [`vk_softmap_free`].
#[no_mangle]
pub unsafe extern "C" fn vk_softmap_load(path: *const c_char, out: *mut *mut VkSoftMap) -> VkStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let path = match path_from(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match vnskit::io::load_softmap(path) {
        Ok(map) => {
            *out = Box::into_raw(Box::new(VkSoftMap(map)));
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Builds a prediction map from row-major doubles, clamped into [0, 1].
///
/// # Safety
/// `values` must point to `width * height` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn vk_softmap_from_values(
    width: usize,
    height: usize,
    values: *const f64,
    out: *mut *mut VkSoftMap,
) -> VkStatus {
    if out.is_null() || values.is_null() {
        return null_arg("values/out");
    }
    let slice = std::slice::from_raw_parts(values, width.saturating_mul(height));
    match SoftMap::from_prediction(width, height, slice.to_vec()) {
        Ok(map) => {
            *out = Box::into_raw(Box::new(VkSoftMap(map)));
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `map` must be a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn vk_softmap_free(map: *mut VkSoftMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Intersection over union; 1.0 when both masks are empty.
///
/// # Safety
/// All handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vk_iou(
    pred: *const VkMask,
    gt: *const VkMask,
    out: *mut f64,
) -> VkStatus {
    if pred.is_null() || gt.is_null() || out.is_null() {
        return null_arg("pred/gt/out");
    }
    match metrics::iou(&(*pred).0, &(*gt).0) {
        Ok(v) => {
            *out = v;
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Boundary IoU at band distance `d` (pixels, >= 1).
///
/// # Safety
/// As [`vk_iou`].
#[no_mangle]
pub unsafe extern "C" fn vk_boundary_iou(
    pred: *const VkMask,
    gt: *const VkMask,
    d: usize,
    out: *mut f64,
) -> VkStatus {
    if pred.is_null() || gt.is_null() || out.is_null() {
        return null_arg("pred/gt/out");
    }
    if d == 0 {
        set_last_error("band distance must be >= 1");
        return VkStatus::Config;
    }
    match metrics::boundary_iou(&(*pred).0, &(*gt).0, d) {
        Ok(v) => {
            *out = v;
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Mean E-measure over the 256-threshold sweep.
///
/// # Safety
/// As [`vk_iou`].
#[no_mangle]
pub unsafe extern "C" fn vk_e_measure_mean(
    pred: *const VkSoftMap,
    gt: *const VkMask,
    out: *mut f64,
) -> VkStatus {
    if pred.is_null() || gt.is_null() || out.is_null() {
        return null_arg("pred/gt/out");
    }
    match metrics::e_measure_mean(&(*pred).0, &(*gt).0) {
        Ok(v) => {
            *out = v;
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Weighted F-measure (beta2 is the beta-squared weighting, 1.0 default).
///
/// # Safety
/// As [`vk_iou`].
#[no_mangle]
pub unsafe extern "C" fn vk_weighted_f_beta(
    pred: *const VkSoftMap,
    gt: *const VkMask,
    beta2: f64,
    out: *mut f64,
) -> VkStatus {
    if pred.is_null() || gt.is_null() || out.is_null() {
        return null_arg("pred/gt/out");
    }
    match metrics::weighted_f_beta(&(*pred).0, &(*gt).0, beta2) {
        Ok(v) => {
            *out = v;
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Non-saliency score of an interleaved 8-bit RGB image against a mask.
///
/// # Safety
/// `rgb` must point to `width * height * 3` readable bytes; `mask` must
/// be a live handle with matching dimensions.
#[no_mangle]
pub unsafe extern "C" fn vk_vns_score_rgb(
    width: usize,
    height: usize,
    rgb: *const u8,
    mask: *const VkMask,
    out: *mut VkVnsBreakdown,
) -> VkStatus {
    if rgb.is_null() || mask.is_null() || out.is_null() {
        return null_arg("rgb/mask/out");
    }
    let n = width.saturating_mul(height);
    let bytes = std::slice::from_raw_parts(rgb, n.saturating_mul(3));
    let pixels: Vec<[u8; 3]> = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    let img = match ColorImage::new(width, height, pixels) {
        Ok(i) => i,
        Err(e) => return fail(&e),
    };
    match vns::vns_score(&img, &(*mask).0) {
        Ok(b) => {
            *out = VkVnsBreakdown {
                color_contrast: b.color_contrast,
                texture_contrast: b.texture_contrast,
                c_fb: b.c_fb,
                boundary_clarity: b.boundary_clarity,
                score: b.score,
            };
            VkStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn vk_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Convenience NULL for language bindings that need an explicit sentinel.
#[no_mangle]
pub extern "C" fn vk_null_mask() -> *mut VkMask {
    ptr::null_mut()
}
