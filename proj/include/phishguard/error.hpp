#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phishguard {

enum class ErrorCode {
    bad_magic,
    unsupported_version,
    truncated_stream,
    duplicate_name,
    invalid_name,
    dim_overflow,
    invalid_dims,
    unknown_dtype,
    non_finite,
    overflow_to_infinity,
    missing_weight,
    shape_mismatch,
    invalid_argument,
    empty_crop,
    empty_roi,
    malformed_url,
    empty_dataset,
    length_mismatch,
    degenerate_labels,
    parse_error,
    io_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::bad_magic: return "bad-magic";
    case ErrorCode::unsupported_version: return "unsupported-version";
    case ErrorCode::truncated_stream: return "truncated-stream";
    case ErrorCode::duplicate_name: return "duplicate-name";
    case ErrorCode::invalid_name: return "invalid-name";
    case ErrorCode::dim_overflow: return "dim-overflow";
    case ErrorCode::invalid_dims: return "invalid-dims";
    case ErrorCode::unknown_dtype: return "unknown-dtype";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::overflow_to_infinity: return "overflow-to-infinity";
    case ErrorCode::missing_weight: return "missing-weight";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::empty_crop: return "empty-crop";
    case ErrorCode::empty_roi: return "empty-roi";
    case ErrorCode::malformed_url: return "malformed-url";
    case ErrorCode::empty_dataset: return "empty-dataset";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::degenerate_labels: return "degenerate-labels";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message names the tensor, offset, path or line involved.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the error-code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace phishguard
