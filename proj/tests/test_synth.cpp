#include <doctest.h>

#include <cmath>

#include "bcg/packet.hpp"
#include "bcg/synth.hpp"

using namespace bcg;

TEST_CASE("determinism: identical params give bit-identical packet streams") {
  SynthParams params;
  params.heart_rate_bpm = 70;
  params.resp_rate_bpm = 15;
  params.seed = 1234;
  const auto a = generate_packets(params, 20.0);
  const auto b = generate_packets(params, 20.0);
  REQUIRE(a.packets.size() == b.packets.size());
  for (size_t i = 0; i < a.packets.size(); ++i) {
    CHECK(encode(a.packets[i]) == encode(b.packets[i]));
  }

  SynthParams other = params;
  other.seed = 1235;
  const auto c = generate_packets(other, 20.0);
  bool any_differ = false;
  for (size_t i = 0; i < a.packets.size() && !any_differ; ++i) {
    any_differ = !(a.packets[i] == c.packets[i]);
  }
  CHECK(any_differ);
}

TEST_CASE("ground-truth beat count matches round(HR/60 * duration) within 1") {
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    for (double hr : {55.0, 70.0, 90.0}) {
      SynthParams params;
      params.heart_rate_bpm = hr;
      params.seed = seed;
      const auto rec = generate_bcg(params, 120.0);
      const double expected = std::round(hr / 60.0 * 120.0);
      CHECK(std::abs(static_cast<double>(rec.truth.beat_times_s.size()) - expected) <= 1.0);
    }
  }
}

TEST_CASE("noise-free zero-jitter beats are exactly 60/HR apart") {
  SynthParams params;
  params.heart_rate_bpm = 60;
  params.noise_scale = 0.0;
  params.hr_jitter_pct = 0.0;
  const auto rec = generate_bcg(params, 30.0);
  for (size_t i = 1; i < rec.truth.beat_times_s.size(); ++i) {
    CHECK(rec.truth.beat_times_s[i] - rec.truth.beat_times_s[i - 1] ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pure-noise series matches the closed-form sigma") {
  SynthParams params;
  params.heart_amp_mg = 0.0;
  params.resp_amp_mg = 0.0;
  params.tilt_step_mg = 0.0;
  params.seed = 77;
  const auto rec = generate_bcg(params, 600.0);

  auto sample_sigma = [](const AccelSeries& s) {
    double mean = 0.0;
    for (double v : s.values_mg) mean += v;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s.values_mg) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(s.size()));
  };

  // sigma = density * sqrt(fs / 2): 45 ug/rtHz -> 0.3182 mg at 100 Hz
  const double lis = sample_sigma(rec.channel(SensorChannel::parse("lis3dhh", "z")));
  CHECK(lis == doctest::Approx(0.31819805).epsilon(0.05));
  const double sca = sample_sigma(rec.channel(SensorChannel::parse("sca61t", "y")));
  CHECK(sca == doctest::Approx(0.09899495).epsilon(0.05));
}

TEST_CASE("packet stream: counting, quantization, frame passthrough") {
  SynthParams params;
  params.heart_rate_bpm = 70;
  params.resp_rate_bpm = 15;
  params.seed = 9;
  const auto stream = generate_packets(params, 10.0);
  REQUIRE(stream.packets.size() == 10);
  for (size_t k = 0; k < stream.packets.size(); ++k) {
    const auto& f = stream.packets[k].sca10h;
    CHECK(f.seq == k);
    CHECK(f.timestamp_ms == 1000 * k);
    CHECK(f.heart_rate_bpm == 70);
    CHECK(f.respiration_rate_bpm == 15);
    CHECK(f.occupancy == 1);
  }
  CHECK_THROWS_AS(generate_packets(params, 9.5), Error);

  // quantize-then-dequantize error bounded by half an LSB
  const auto rec = generate_bcg(params, 10.0);
  const auto& lis_x = rec.channel(SensorChannel::parse("lis3dhh", "x"));
  const auto decoded = series_from_packets(stream.packets, lis_x.channel);
  REQUIRE(decoded.size() == lis_x.size());
  for (size_t i = 0; i < decoded.size(); ++i) {
    CHECK(std::abs(decoded.values_mg[i] - lis_x.values_mg[i]) <=
          0.5 * kLis3dhhSpec.sensitivity_mg_per_lsb + 1e-12);
  }
}

TEST_CASE("occupancy intervals drive the tilt step and the frame flag") {
  SynthParams params;
  params.seed = 4;
  params.occupied_s = {{5.0, 15.0}};
  const auto stream = generate_packets(params, 20.0);
  CHECK(stream.packets[2].sca10h.occupancy == 0);
  CHECK(stream.packets[10].sca10h.occupancy == 1);
  CHECK(stream.packets[18].sca10h.occupancy == 0);

  const auto rec = generate_bcg(params, 20.0);
  const auto& x = rec.channel(SensorChannel::parse("lis3dhh", "x"));
  auto mean_over = [&](double a, double b) {
    double acc = 0.0;
    size_t n = 0;
    for (size_t i = static_cast<size_t>(a * 100); i < static_cast<size_t>(b * 100); ++i, ++n) {
      acc += x.values_mg[i];
    }
    return acc / static_cast<double>(n);
  };
  CHECK(mean_over(0.0, 4.5) == doctest::Approx(0.0).epsilon(0.5));
  CHECK(mean_over(6.0, 14.0) == doctest::Approx(50.0).epsilon(0.02));
  // vitals events exist only while occupied
  for (double beat : rec.truth.beat_times_s) {
    CHECK(beat >= 5.0);
    CHECK(beat < 15.0);
  }
}

TEST_CASE("synth validates parameters") {
  SynthParams params;
  params.heart_amp_mg = -1.0;
  CHECK_THROWS_AS(generate_bcg(params, 10.0), Error);
  params = SynthParams{};
  params.heart_rate_bpm = 500.0;
  CHECK_THROWS_AS(generate_bcg(params, 10.0), Error);
  params = SynthParams{};
  CHECK_THROWS_AS(generate_bcg(params, 0.0), Error);
}
