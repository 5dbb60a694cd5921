#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hdrdist/error.hpp"
#include "hdrdist/image.hpp"
#include "support.hpp"

using namespace hdrdist;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception";
    return ErrorCode::IoFailure;
}

} // namespace

TEST(Linearize, FixedPointsAndPowerLaw) {
    LinearImage img(3, 1, 1);
    img.at(0, 0, 0) = 0.0;
    img.at(1, 0, 0) = 1.0;
    img.at(2, 0, 0) = 0.5;
    const LinearImage out = linearize(img, 2.2);
    EXPECT_EQ(out.at(0, 0, 0), 0.0);
    EXPECT_EQ(out.at(1, 0, 0), 1.0);
    EXPECT_NEAR(out.at(2, 0, 0), 0.21764, 1e-5);
}

TEST(Linearize, RejectsBadInput) {
    LinearImage img(1, 1, 1, 1.5);
    EXPECT_EQ(code_of([&] { linearize(img, 2.2); }), ErrorCode::OutOfRange);
    img.at(0, 0, 0) = std::nan("");
    EXPECT_EQ(code_of([&] { linearize(img, 2.2); }), ErrorCode::NonFiniteInput);
}

TEST(Linearize, MonotoneForAnyGamma) {
    for (double gamma : {0.3, 1.0, 2.2, 7.0}) {
        LinearImage ramp(101, 1, 1);
        for (std::size_t i = 0; i <= 100; ++i) ramp.at(i, 0, 0) = static_cast<double>(i) / 100.0;
        const LinearImage out = linearize(ramp, gamma);
        for (std::size_t i = 1; i <= 100; ++i) EXPECT_LE(out.at(i - 1, 0, 0), out.at(i, 0, 0));
    }
}

TEST(Quantize, DequantizeExamples) {
    EXPECT_EQ(dequantize_sample(0, 4095), 0.0);
    EXPECT_EQ(dequantize_sample(4095, 4095), 1.0);
    EXPECT_NEAR(dequantize_sample(2048, 4095), 2048.0 / 4095.0, 1e-7);
}

TEST(Quantize, RoundTripOnIntegers) {
    for (int bits : {8, 12, 16}) {
        const std::uint32_t top = max_value_for(bits);
        for (std::uint32_t k = 0; k <= top; ++k) ASSERT_EQ(quantize_sample(dequantize_sample(k, top), top), k);
    }
}

TEST(Quantize, ErrorBoundOnUnitInterval) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const double v = u(rng);
        const double back = dequantize_sample(quantize_sample(v, 4095), 4095);
        ASSERT_LE(std::abs(back - v), 0.5 / 4095.0 + 1e-7);
    }
}

TEST(Quantize, HalfAwayFromZero) {
    // 0.5 / 255 lies exactly halfway between codes 0 and 1.
    EXPECT_EQ(quantize_sample(0.5 / 255.0, 255), 1);
    EXPECT_EQ(quantize_sample(1.5 / 255.0, 255), 2);
}

TEST(Quantize, RejectsOutOfRange) {
    LinearImage img(2, 1, 1, 0.5);
    img.at(1, 0, 0) = -0.1;
    EXPECT_EQ(code_of([&] { quantize(img, 12); }), ErrorCode::OutOfRange);
    EXPECT_EQ(code_of([&] { quantize(LinearImage(2, 1, 1, 0.5), 17); }), ErrorCode::InvalidArgument);
}

TEST(Interleave, DefinitionUnrolled) {
    ExposurePair pair{LinearImage(2, 1, 1, std::vector<double>{1, 2}), LinearImage(2, 1, 1, std::vector<double>{9, 8})};
    const LinearImage m = interleave(pair);
    EXPECT_EQ(m, LinearImage(4, 1, 1, std::vector<double>{1, 9, 2, 8}));
}

TEST(Interleave, ConstantStaysConstant) {
    ExposurePair pair{LinearImage(3, 2, 3, 0.25), LinearImage(3, 2, 3, 0.25)};
    EXPECT_EQ(interleave(pair), LinearImage(6, 2, 3, 0.25));
}

TEST(Interleave, RoundTripAllLayouts) {
    std::mt19937_64 rng(11);
    for (InterleaveAxis axis : {InterleaveAxis::Column, InterleaveAxis::Row}) {
        for (bool even : {true, false}) {
            const ExposureLayout layout{axis, even};
            const LinearImage m = fixtures::random_image(8, 8, 3, rng);
            EXPECT_EQ(interleave(deinterleave(m, layout), layout), m);
            const std::size_t hw = axis == InterleaveAxis::Column ? 4 : 8;
            const std::size_t hh = axis == InterleaveAxis::Column ? 8 : 4;
            const ExposurePair q{fixtures::random_image(hw, hh, 1, rng), fixtures::random_image(hw, hh, 1, rng)};
            const ExposurePair back = deinterleave(interleave(q, layout), layout);
            EXPECT_EQ(back.low, q.low);
            EXPECT_EQ(back.high, q.high);
        }
    }
}

TEST(Interleave, OddLayoutPutsLowOnOddColumns) {
    ExposurePair pair{LinearImage(1, 1, 1, 1.0), LinearImage(1, 1, 1, 2.0)};
    const LinearImage m = interleave(pair, {InterleaveAxis::Column, false});
    EXPECT_EQ(m.at(0, 0, 0), 2.0);
    EXPECT_EQ(m.at(1, 0, 0), 1.0);
}

TEST(Interleave, Errors) {
    EXPECT_EQ(code_of([] { interleave({LinearImage(2, 1, 1), LinearImage(3, 1, 1)}); }), ErrorCode::SizeMismatch);
    EXPECT_EQ(code_of([] { deinterleave(LinearImage(3, 2, 1)); }), ErrorCode::OddWidth);
    EXPECT_EQ(code_of([] { deinterleave(LinearImage(2, 3, 1), {InterleaveAxis::Row, true}); }), ErrorCode::OddWidth);
}

TEST(SensorConfig, Validation) {
    SensorConfig c;
    EXPECT_NO_THROW(c.validate());
    c.exposure_ratio = 0.5;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
    c = {};
    c.burst_length = 0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
}

TEST(QuantizedReading, RejectsSamplesAboveMax) {
    EXPECT_THROW(QuantizedReading(1, 1, 1, 8, {}, std::vector<std::uint16_t>{256}), Error);
    EXPECT_THROW(QuantizedReading(1, 1, 2, 8, {}, std::vector<std::uint16_t>{1, 2}), Error);
}
