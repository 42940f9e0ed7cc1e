#include "bcg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bcg/vitals.hpp"

namespace bcg {
namespace {

constexpr double kRespPedestalWeight = 0.5;
constexpr double kRespPedestalWidthS = 2.0;
constexpr double kBreathWanderCycle = 12.0;  // breaths per wander period
constexpr double kPulseSupportSigmas = 5.0;

/// Deterministic normal deviates: mt19937_64 + Box-Muller, independent of
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

double clamp3(double z) { return std::clamp(z, -3.0, 3.0); }

void add_pulse(std::vector<double>& x, double fs, double center_s, double amp, double sigma_s,
               double carrier_hz, double support_sigmas) {
  const double half = support_sigmas * sigma_s;
  const long lo = std::max(0L, static_cast<long>(std::ceil((center_s - half) * fs)));
  const long hi = std::min(static_cast<long>(x.size()) - 1,
                           static_cast<long>(std::floor((center_s + half) * fs)));
  for (long i = lo; i <= hi; ++i) {
    const double t = static_cast<double>(i) / fs - center_s;
    x[static_cast<size_t>(i)] +=
        amp * std::exp(-t * t / (2.0 * sigma_s * sigma_s)) *
        std::sin(2.0 * std::numbers::pi * carrier_hz * t);
  }
}

void add_breath_transient(std::vector<double>& x, double fs, double center_s,
                          const SynthParams& p) {
  const double half = kPulseSupportSigmas * kRespPedestalWidthS;
  const long lo = std::max(0L, static_cast<long>(std::ceil((center_s - half) * fs)));
  const long hi = std::min(static_cast<long>(x.size()) - 1,
                           static_cast<long>(std::floor((center_s + half) * fs)));
  const double s1 = p.resp_pulse_width_s;
  const double s2 = kRespPedestalWidthS;
  for (long i = lo; i <= hi; ++i) {
    const double t = static_cast<double>(i) / fs - center_s;
    const double env = std::exp(-t * t / (2.0 * s1 * s1)) +
                       kRespPedestalWeight * std::exp(-t * t / (2.0 * s2 * s2));
    x[static_cast<size_t>(i)] +=
        p.resp_amp_mg * env * std::sin(2.0 * std::numbers::pi * p.resp_pulse_carrier_hz * t);
  }
}

}  // namespace

void SynthParams::validate() const {
  if (heart_amp_mg < 0 || resp_amp_mg < 0 || tilt_step_mg < 0 || noise_scale < 0) {
    throw Error("synth amplitudes must be >= 0");
  }
  if (heart_rate_bpm < kHeartPlausibleLow || heart_rate_bpm > kHeartPlausibleHigh) {
    throw Error("heart_rate_bpm outside plausible range");
  }
  if (resp_rate_bpm < kRespPlausibleLow || resp_rate_bpm > kRespPlausibleHigh) {
    throw Error("resp_rate_bpm outside plausible range");
  }
  if (heart_pulse_width_s <= 0 || resp_pulse_width_s <= 0) {
    throw Error("pulse widths must be positive");
  }
  for (auto& [a, b] : occupied_s) {
    if (b <= a || a < 0) throw Error("invalid occupied interval");
  }
}

bool GroundTruth::occupied_at(double t_s) const {
  for (auto& [a, b] : occupied_s) {
    if (t_s >= a && t_s < b) return true;
  }
  return false;
}

const AccelSeries& SynthRecording::channel(SensorChannel ch) const {
  for (const AccelSeries& s : channels) {
    if (s.channel == ch) return s;
  }
  throw Error("no such channel: " + ch.str());
}

SynthRecording generate_bcg(const SynthParams& params, double duration_s) {
  params.validate();
  if (duration_s <= 0.0) throw Error("duration must be positive");

  const double fs = kSampleRateHz;
  const size_t n = static_cast<size_t>(std::llround(duration_s * fs));
  SynthRecording rec;
  rec.truth.occupied_s = params.occupied_s.empty()
                             ? std::vector<std::pair<double, double>>{{0.0, duration_s}}
                             : params.occupied_s;

  Rng rng(params.seed);

  // Event times first, then noise, in a fixed order: the stream is a pure
  // function of the params.
  for (auto& [start, end] : rec.truth.occupied_s) {
    const double beat_T = 60.0 / params.heart_rate_bpm;
    const double jitter = params.hr_jitter_pct / 100.0;
    for (double t = start + beat_T / 2.0; t < end && t < duration_s;) {
      rec.truth.beat_times_s.push_back(t);
      t += beat_T * (1.0 + jitter * clamp3(rng.gauss()));
    }
    const double breath_T = 60.0 / params.resp_rate_bpm;
    const double wander_phase = rng.uniform() * 2.0 * std::numbers::pi;
    long j = 0;
    for (double t = start + breath_T / 2.0; t < end && t < duration_s;) {
      rec.truth.breath_times_s.push_back(t);
      t += breath_T *
           (1.0 + jitter * std::sin(2.0 * std::numbers::pi * static_cast<double>(j) /
                                        kBreathWanderCycle +
                                    wander_phase));
      ++j;
    }
  }

  std::vector<double> base(n, 0.0);
  for (double beat : rec.truth.beat_times_s) {
    add_pulse(base, fs, beat, params.heart_amp_mg, params.heart_pulse_width_s,
              params.heart_pulse_carrier_hz, kPulseSupportSigmas);
  }
  for (double breath : rec.truth.breath_times_s) {
    add_breath_transient(base, fs, breath, params);
  }
  for (auto& [start, end] : rec.truth.occupied_s) {
    const size_t lo = static_cast<size_t>(std::ceil(start * fs));
    const size_t hi = std::min(n, static_cast<size_t>(std::ceil(end * fs)));
    const double w = 2.0 * std::numbers::pi * params.resp_rate_bpm / 60.0;
    for (size_t i = lo; i < hi; ++i) {
      base[i] += params.resp_amp_mg * std::sin(w * (static_cast<double>(i) / fs - start));
    }
  }

  const SensorChannel order[] = {
      SensorChannel::make(SensorKind::kSca61t, Axis::kX),
      SensorChannel::make(SensorKind::kSca61t, Axis::kY),
      SensorChannel::make(SensorKind::kLis3dhh, Axis::kX),
      SensorChannel::make(SensorKind::kLis3dhh, Axis::kY),
      SensorChannel::make(SensorKind::kLis3dhh, Axis::kZ),
  };
  for (const SensorChannel& ch : order) {
    AccelSeries series;
    series.channel = ch;
    series.sample_rate_hz = fs;
    series.t0_ms = params.t0_ms;
    series.values_mg = base;
    if (ch.axis == Axis::kX) {
      for (auto& [start, end] : rec.truth.occupied_s) {
        const size_t lo = static_cast<size_t>(std::ceil(start * fs));
        const size_t hi = std::min(n, static_cast<size_t>(std::ceil(end * fs)));
        for (size_t i = lo; i < hi; ++i) series.values_mg[i] += params.tilt_step_mg;
      }
    }
    const double sigma = params.noise_scale * spec_for(ch.sensor).noise_density_ug_per_rthz *
                         1e-3 * std::sqrt(fs / 2.0);
    if (sigma > 0.0) {
      for (double& v : series.values_mg) v += sigma * rng.gauss();
    }
    rec.channels.push_back(std::move(series));
  }
  return rec;
}

SynthPacketStream generate_packets(const SynthParams& params, double duration_s) {
  if (std::abs(duration_s - std::round(duration_s)) > 1e-9 || duration_s <= 0) {
    throw Error("packet generation needs a whole number of seconds");
  }
  SynthRecording rec = generate_bcg(params, duration_s);
  const size_t seconds = static_cast<size_t>(std::llround(duration_s));

  SynthPacketStream stream;
  stream.truth = rec.truth;
  stream.packets.reserve(seconds);

  const AccelSeries* sca[2] = {
      &rec.channel(SensorChannel::make(SensorKind::kSca61t, Axis::kX)),
      &rec.channel(SensorChannel::make(SensorKind::kSca61t, Axis::kY)),
  };
  const AccelSeries* lis[3] = {
      &rec.channel(SensorChannel::make(SensorKind::kLis3dhh, Axis::kX)),
      &rec.channel(SensorChannel::make(SensorKind::kLis3dhh, Axis::kY)),
      &rec.channel(SensorChannel::make(SensorKind::kLis3dhh, Axis::kZ)),
  };

  for (size_t k = 0; k < seconds; ++k) {
    SamplePacket packet;
    Sca10hFrame& f = packet.sca10h;
    f.seq = static_cast<uint32_t>(k);
    f.timestamp_ms = static_cast<uint64_t>(params.t0_ms + static_cast<int64_t>(k) * 1000);
    f.heart_rate_bpm = static_cast<uint16_t>(std::llround(params.heart_rate_bpm));
    f.respiration_rate_bpm = static_cast<uint16_t>(std::llround(params.resp_rate_bpm));
    const double t_end = static_cast<double>(k + 1);
    f.occupancy = rec.truth.occupied_at(t_end - 1e-3) ? 1 : 0;
    f.signal_strength = 100;
    // last up-to-3 beat-to-beat intervals before the end of this second
    const auto& beats = rec.truth.beat_times_s;
    size_t upto = 0;
    while (upto < beats.size() && beats[upto] <= t_end) ++upto;
    for (int b = 0; b < 3; ++b) {
      if (upto >= static_cast<size_t>(b) + 2) {
        const double dt = beats[upto - 1 - b] - beats[upto - 2 - b];
        f.b2b_time_ms[b] = static_cast<uint16_t>(std::llround(dt * 1000.0));
      }
    }

    for (size_t i = 0; i < kSamplesPerPacket; ++i) {
      const size_t s = k * kSamplesPerPacket + i;
      for (int a = 0; a < 2; ++a) {
        packet.sca61t[i][a] =
            static_cast<int16_t>(mg_to_raw(sca[a]->values_mg[s], kSca61tSpec));
      }
      for (int a = 0; a < 3; ++a) {
        packet.lis3dhh[i][a] =
            static_cast<int16_t>(mg_to_raw(lis[a]->values_mg[s], kLis3dhhSpec));
      }
    }
    stream.packets.push_back(packet);
  }
  return stream;
}

}  // namespace bcg
