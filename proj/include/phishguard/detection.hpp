#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishguard/error.hpp"
#include "phishguard/geometry.hpp"
#include "phishguard/image.hpp"
#include "phishguard/tensor.hpp"

namespace phishguard {

/// Detector input canvas. The default is the 768x432 (16:9) render all models
/// consume; 386x224 is the faster, less accurate alternative.
struct CanvasSize {
    int width = 768;
    int height = 432;

    friend bool operator==(const CanvasSize&, const CanvasSize&) = default;
};

inline constexpr CanvasSize kDefaultCanvas{768, 432};
inline constexpr CanvasSize kFastCanvas{386, 224};

/// Output slots (N) and hidden width per slot (H) of the layout detector.
struct DetectorCapacity {
    std::size_t slots = 100;
    std::size_t hidden = 256;

    std::size_t flat_size() const noexcept { return slots * hidden; }
    friend bool operator==(const DetectorCapacity&, const DetectorCapacity&) = default;
};

/// Object-level features of shape (B, N, H).
class FeatureTensor {
public:
    FeatureTensor(Tensor t, DetectorCapacity cap = {}) : tensor_(std::move(t)), capacity_(cap) {
        if (tensor_.rank() != 3 || tensor_.dim(1) != cap.slots || tensor_.dim(2) != cap.hidden)
            throw Error(ErrorCode::shape_mismatch, "features are " + tensor_.shape_string() + ", expected Bx" +
                                                       std::to_string(cap.slots) + "x" + std::to_string(cap.hidden));
    }

    /// Concatenates single-or-multi item feature tensors along the batch axis.
    static FeatureTensor stack(std::span<const FeatureTensor> items) {
        if (items.empty()) throw Error(ErrorCode::invalid_argument, "cannot stack zero feature tensors");
        const DetectorCapacity cap = items.front().capacity();
        std::vector<float> data;
        std::size_t batch = 0;
        for (const auto& f : items) {
            if (f.capacity() != cap) throw Error(ErrorCode::shape_mismatch, "stacked features differ in capacity");
            data.insert(data.end(), f.tensor().data().begin(), f.tensor().data().end());
            batch += f.batch();
        }
        return FeatureTensor(Tensor({batch, cap.slots, cap.hidden}, std::move(data)), cap);
    }

    std::size_t batch() const { return tensor_.dim(0); }
    DetectorCapacity capacity() const noexcept { return capacity_; }
    const Tensor& tensor() const noexcept { return tensor_; }

    /// Flattened (B, N*H) view used by classification heads.
    Tensor flattened() const {
        return Tensor({batch(), capacity_.flat_size()}, std::vector<float>(tensor_.data().begin(), tensor_.data().end()));
    }

private:
    Tensor tensor_;
    DetectorCapacity capacity_;
};

/// Box-head output: (B, N, 5) slots of [x_min, y_min, x_max, y_max, class
/// code] plus a parallel (B, N) confidence channel holding each slot's
/// maximum class probability. Class code 5 marks an empty slot.
class RawDetections {
public:
    static constexpr float kNoObjectCode = static_cast<float>(ElementClass::no_object);

    RawDetections(Tensor slots, Tensor confidence) : slots_(std::move(slots)), confidence_(std::move(confidence)) {
        if (slots_.rank() != 3 || slots_.dim(2) != 5)
            throw Error(ErrorCode::shape_mismatch, "raw detections are " + slots_.shape_string() + ", expected BxNx5");
        if (confidence_.dims() != std::vector<std::size_t>{slots_.dim(0), slots_.dim(1)})
            throw Error(ErrorCode::shape_mismatch, "confidence is " + confidence_.shape_string() + ", expected " +
                                                       std::to_string(slots_.dim(0)) + "x" + std::to_string(slots_.dim(1)));
    }

    std::size_t batch() const { return slots_.dim(0); }
    std::size_t slots() const { return slots_.dim(1); }
    const Tensor& slot_tensor() const noexcept { return slots_; }
    const Tensor& confidence() const noexcept { return confidence_; }

    friend bool operator==(const RawDetections&, const RawDetections&) = default;

private:
    Tensor slots_;
    Tensor confidence_;
};

/// Two-part layout detector: a feature extractor whose (B, N, H) output is
/// consumed both by the box head and by downstream classifiers.
/// Implementations must tolerate concurrent const calls.
class DetectorBackend {
public:
    virtual ~DetectorBackend() = default;

    virtual DetectorCapacity capacity() const = 0;
    virtual CanvasSize canvas() const { return kDefaultCanvas; }
    virtual FeatureTensor extract_features(const Image& canvas) const = 0;
    virtual RawDetections detect_objects(const FeatureTensor& features) const = 0;
};

/// Drops empty slots, clamps rects into the unit square and suppresses overlaps.
inline std::vector<std::vector<DetectionBox>> decode_detections(const RawDetections& raw, const NmsConfig& nms_cfg = {}) {
    const std::size_t batch = raw.batch(), slots = raw.slots();
    const auto s = raw.slot_tensor().data();
    const auto conf = raw.confidence().data();
    std::vector<std::vector<DetectionBox>> out(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        std::vector<DetectionBox> candidates;
        for (std::size_t n = 0; n < slots; ++n) {
            const float* slot = s.data() + (b * slots + n) * 5;
            const float code = slot[4];
            if (code != std::floor(code) || code < 0.0f || code > RawDetections::kNoObjectCode)
                throw Error(ErrorCode::shape_mismatch, "slot " + std::to_string(n) + " carries invalid class code " +
                                                           std::to_string(code));
            if (code == RawDetections::kNoObjectCode) continue;
            const double score = std::clamp(static_cast<double>(conf[b * slots + n]), 0.0, 1.0);
            candidates.push_back({Rect(slot[0], slot[1], slot[2], slot[3]), static_cast<ElementClass>(static_cast<int>(code)), score});
        }
        out[b] = nms(candidates, nms_cfg);
    }
    return out;
}

/// Highest-confidence logo box; earliest on ties, absent when there is no logo.
inline std::optional<DetectionBox> select_logo(std::span<const DetectionBox> boxes) {
    std::optional<DetectionBox> best;
    for (const auto& b : boxes)
        if (b.class_id == ElementClass::logo && (!best || b.score > best->score)) best = b;
    return best;
}

} // namespace phishguard
