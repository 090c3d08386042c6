#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phishguard/error.hpp"

namespace phishguard {

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved 8-bit RGB raster.
class Image {
public:
    Image() = default;

    Image(int width, int height, Rgb fill = {0, 0, 0}) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) throw Error(ErrorCode::invalid_argument, "image extents must be positive");
        pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
        for (std::size_t i = 0; i < pixels_.size(); i += 3) std::copy(fill.begin(), fill.end(), pixels_.begin() + i);
    }

    Image(int width, int height, std::vector<std::uint8_t> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        if (width <= 0 || height <= 0) throw Error(ErrorCode::invalid_argument, "image extents must be positive");
        if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
            throw Error(ErrorCode::shape_mismatch, "raster length does not match " + std::to_string(width) + "x" +
                                                       std::to_string(height) + "x3");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }
    const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

    std::uint8_t at(int x, int y, int c) const noexcept {
        return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
    }
    std::uint8_t& at(int x, int y, int c) noexcept { return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c]; }

    void fill_rect(int x0, int y0, int x1, int y1, Rgb color) {
        x0 = std::clamp(x0, 0, width_);
        x1 = std::clamp(x1, 0, width_);
        y0 = std::clamp(y0, 0, height_);
        y1 = std::clamp(y1, 0, height_);
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                for (int c = 0; c < 3; ++c) at(x, y, c) = color[c];
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Half-open pixel rectangle [left, right) x [top, bottom).
struct PixelRect {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    int width() const noexcept { return right - left; }
    int height() const noexcept { return bottom - top; }
    bool empty() const noexcept { return right <= left || bottom <= top; }

    PixelRect clamped(int w, int h) const noexcept {
        return {std::clamp(left, 0, w), std::clamp(top, 0, h), std::clamp(right, 0, w), std::clamp(bottom, 0, h)};
    }

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Copies `r` (already within bounds) out of `src`.
inline Image crop(const Image& src, const PixelRect& r) {
    const PixelRect c = r.clamped(src.width(), src.height());
    if (c.empty()) throw Error(ErrorCode::empty_crop, "crop rectangle is empty after clamping");
    std::vector<std::uint8_t> out(static_cast<std::size_t>(c.width()) * c.height() * 3);
    auto dst = out.begin();
    for (int y = c.top; y < c.bottom; ++y) {
        const auto row = src.pixels().begin() + (static_cast<std::ptrdiff_t>(y) * src.width() + c.left) * 3;
        dst = std::copy(row, row + c.width() * 3, dst);
    }
    return Image(c.width(), c.height(), std::move(out));
}

namespace detail {

struct Tap {
    int lo;
    int hi;
    float frac;
};

// Pixel-centre aligned sampling positions (align_corners = false), clamped at the edges.
inline std::vector<Tap> bilinear_taps(int src, int dst) {
    std::vector<Tap> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int i = 0; i < dst; ++i) {
        double s = (i + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int lo = static_cast<int>(std::floor(s));
        const int hi = std::min(lo + 1, src - 1);
        taps[static_cast<std::size_t>(i)] = {lo, hi, static_cast<float>(s - lo)};
    }
    return taps;
}

} // namespace detail

/// Bilinear resize. Same-size input is returned unchanged.
inline Image resize_bilinear(const Image& src, int out_width, int out_height) {
    if (out_width <= 0 || out_height <= 0) throw Error(ErrorCode::invalid_argument, "resize target must be positive");
    if (src.empty()) throw Error(ErrorCode::invalid_argument, "cannot resize an empty image");
    if (src.width() == out_width && src.height() == out_height) return src;

    const auto xs = detail::bilinear_taps(src.width(), out_width);
    const auto ys = detail::bilinear_taps(src.height(), out_height);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(out_width) * out_height * 3);
    const std::uint8_t* p = src.pixels().data();
    const std::size_t stride = static_cast<std::size_t>(src.width()) * 3;
    for (int y = 0; y < out_height; ++y) {
        const auto& ty = ys[static_cast<std::size_t>(y)];
        const std::uint8_t* r0 = p + static_cast<std::size_t>(ty.lo) * stride;
        const std::uint8_t* r1 = p + static_cast<std::size_t>(ty.hi) * stride;
        std::uint8_t* o = out.data() + static_cast<std::size_t>(y) * out_width * 3;
        for (int x = 0; x < out_width; ++x) {
            const auto& tx = xs[static_cast<std::size_t>(x)];
            const std::size_t a = static_cast<std::size_t>(tx.lo) * 3, b = static_cast<std::size_t>(tx.hi) * 3;
            for (int c = 0; c < 3; ++c) {
                const float top = r0[a + c] + (r0[b + c] - r0[a + c]) * tx.frac;
                const float bottom = r1[a + c] + (r1[b + c] - r1[a + c]) * tx.frac;
                const float v = top + (bottom - top) * ty.frac;
                *o++ = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return Image(out_width, out_height, std::move(out));
}

} // namespace phishguard
