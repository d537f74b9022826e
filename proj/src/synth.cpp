#include "sqe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sqe/numfmt.hpp"
#include "sqe/rng.hpp"
#include "sqe/stats.hpp"

namespace sqe::synth {

namespace {

constexpr std::uint64_t kMuStream = 0x30;
constexpr std::uint64_t kFeatureStream = 0xFEA7;
constexpr std::uint64_t kDropoutStream = 0xD20;
constexpr std::uint64_t kCorruptionStream = 0xFA15E;

FeatureVec draw_feature(std::mt19937_64& eng, const FeatureVec& mu,
                        const std::vector<double>& sigma) {
  std::normal_distribution<double> unit(0.0, 1.0);
  FeatureVec z(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) z[k] = mu[k] + sigma[k] * unit(eng);
  return z;
}

FeatureVec random_direction(std::mt19937_64& eng, std::size_t dim, double radius) {
  std::normal_distribution<double> unit(0.0, 1.0);
  FeatureVec v(dim);
  double ss = 0.0;
  for (double& x : v) {
    x = unit(eng);
    ss += x * x;
  }
  double scale = ss > 0.0 ? radius / std::sqrt(ss) : 0.0;
  for (double& x : v) x *= scale;
  return v;
}

}  // namespace

void Scenario::validate() const {
  if (feature_dim < 1) throw ValidationError("scenario feature_dim must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ValidationError("scenario dropout must lie in [0, 1)");
  }
  std::map<std::int64_t, const TargetModel*> by_id;
  for (const auto& t : targets) {
    if (t.id < 0) throw ValidationError("target id must be non-negative");
    if (!by_id.emplace(t.id, &t).second) {
      throw ValidationError("duplicate target id " + std::to_string(t.id));
    }
    if (t.first_frame < 0 || t.last_frame < t.first_frame) {
      throw ValidationError("target " + std::to_string(t.id) + " has an empty lifespan");
    }
    if (t.mu.size() != feature_dim || t.sigma.size() != feature_dim) {
      throw ValidationError("target " + std::to_string(t.id) +
                            " mu/sigma dimension does not match feature_dim");
    }
    for (double s : t.sigma) {
      if (!(s > 0.0)) throw ValidationError("target sigma entries must be positive");
    }
    if (!(t.start_box.width > 0.0 && t.start_box.height > 0.0)) {
      throw ValidationError("target start box must have positive size");
    }
  }
  for (const auto& c : corruptions) {
    switch (c.kind) {
      case Corruption::Kind::identity_switch: {
        if (c.track == c.to_target) {
          throw ValidationError("identity_switch requires two distinct targets");
        }
        const TargetModel* a = by_id.count(c.track) ? by_id.at(c.track) : nullptr;
        const TargetModel* b = by_id.count(c.to_target) ? by_id.at(c.to_target) : nullptr;
        if (!a || !b) throw ValidationError("identity_switch references an unknown target");
        std::int64_t lo = std::max(a->first_frame, b->first_frame);
        std::int64_t hi = std::min(a->last_frame, b->last_frame);
        if (!(lo < c.at_frame && c.at_frame <= hi)) {
          throw ValidationError(
              "identity_switch at frame " + std::to_string(c.at_frame) +
              " is inconsistent with the overlapping lifespan of targets " +
              std::to_string(c.track) + " and " + std::to_string(c.to_target));
        }
        break;
      }
      case Corruption::Kind::fragmentation: {
        const TargetModel* t = by_id.count(c.track) ? by_id.at(c.track) : nullptr;
        if (!t) throw ValidationError("fragmentation references an unknown target");
        if (!(t->first_frame < c.at_frame && c.at_frame <= t->last_frame)) {
          throw ValidationError("fragmentation split frame outside target lifespan");
        }
        break;
      }
      case Corruption::Kind::false_alarm: {
        if (c.length < 1) throw ValidationError("false_alarm length must be >= 1");
        if (!(c.sigma_scale > 0.0)) {
          throw ValidationError("false_alarm sigma_scale must be positive");
        }
        if (targets.empty()) {
          throw ValidationError("false_alarm needs at least one target for scale");
        }
        break;
      }
    }
  }
}

GeneratedScene generate(const Scenario& sc) {
  sc.validate();
  GeneratedScene scene;
  scene.truth.feature_dim.reset();
  scene.stream.feature_dim = sc.targets.empty() && sc.corruptions.empty()
                                 ? std::optional<std::size_t>{}
                                 : std::optional<std::size_t>{sc.feature_dim};

  std::int64_t frame_lo = 0, frame_hi = -1;
  for (const auto& t : sc.targets) {
    frame_lo = std::min(frame_lo, t.first_frame);
    frame_hi = std::max(frame_hi, t.last_frame);
  }

  auto feat_eng = make_engine(mix_seed(sc.seed, kFeatureStream));
  auto drop_eng = make_engine(mix_seed(sc.seed, kDropoutStream));
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::map<std::int64_t, std::vector<Detection>> stream_at;
  std::map<std::int64_t, Trajectory> hyp_by_id;

  // Draws run in (frame, target-declaration) order so every scenario with
  // the same seed reproduces the same features, corruptions or not.
  for (std::int64_t frame = frame_lo; frame <= frame_hi; ++frame) {
    for (const auto& t : sc.targets) {
      if (frame < t.first_frame || frame > t.last_frame) continue;
      bool dropped = sc.dropout > 0.0 && coin(drop_eng) < sc.dropout;
      if (dropped) {
        // Keep the feature stream aligned across dropout rates.
        (void)draw_feature(feat_eng, t.mu, t.sigma);
        continue;
      }
      Detection d;
      d.frame = frame;
      d.box = t.box_at(frame);
      d.confidence = 1.0;
      d.feature = draw_feature(feat_eng, t.mu, t.sigma);
      stream_at[frame].push_back(d);
      auto [it, inserted] = hyp_by_id.try_emplace(t.id);
      if (inserted) it->second.id = t.id;
      it->second.detections.push_back(d);
    }
  }

  for (const auto& t : sc.targets) {
    Trajectory gt_traj;
    gt_traj.id = t.id;
    for (std::int64_t frame = t.first_frame; frame <= t.last_frame; ++frame) {
      Detection d;
      d.frame = frame;
      d.box = t.box_at(frame);
      d.confidence = 1.0;
      gt_traj.detections.push_back(d);
    }
    scene.truth.trajectories.push_back(std::move(gt_traj));
  }

  // Corruptions; new trajectories get ids past the target range.
  std::int64_t next_id = 0;
  for (const auto& t : sc.targets) next_id = std::max(next_id, t.id + 1);
  auto corr_eng = make_engine(mix_seed(sc.seed, kCorruptionStream));
  std::size_t false_alarm_index = 0;

  for (const auto& c : sc.corruptions) {
    switch (c.kind) {
      case Corruption::Kind::identity_switch: {
        auto it_a = hyp_by_id.find(c.track);
        auto it_b = hyp_by_id.find(c.to_target);
        if (it_a == hyp_by_id.end() || it_b == hyp_by_id.end()) break;
        auto split = [&](Trajectory& t) {
          auto mid = std::partition_point(
              t.detections.begin(), t.detections.end(),
              [&](const Detection& d) { return d.frame < c.at_frame; });
          std::vector<Detection> tail(mid, t.detections.end());
          t.detections.erase(mid, t.detections.end());
          return tail;
        };
        auto tail_a = split(it_a->second);
        auto tail_b = split(it_b->second);
        auto& dets_a = it_a->second.detections;
        auto& dets_b = it_b->second.detections;
        dets_a.insert(dets_a.end(), tail_b.begin(), tail_b.end());
        dets_b.insert(dets_b.end(), tail_a.begin(), tail_a.end());
        break;
      }
      case Corruption::Kind::fragmentation: {
        auto it = hyp_by_id.find(c.track);
        if (it == hyp_by_id.end()) break;
        auto& dets = it->second.detections;
        auto mid = std::partition_point(
            dets.begin(), dets.end(),
            [&](const Detection& d) { return d.frame < c.at_frame; });
        if (mid == dets.begin() || mid == dets.end()) break;  // dropout ate a side
        Trajectory frag;
        frag.id = next_id++;
        frag.detections.assign(mid, dets.end());
        dets.erase(mid, dets.end());
        hyp_by_id.emplace(frag.id, std::move(frag));
        break;
      }
      case Corruption::Kind::false_alarm: {
        double base_sigma = 0.0;
        for (const auto& t : sc.targets) {
          double s = 0.0;
          for (double v : t.sigma) s += v;
          base_sigma += s / static_cast<double>(t.sigma.size());
        }
        base_sigma /= static_cast<double>(sc.targets.size());
        std::vector<double> fa_sigma(sc.feature_dim, c.sigma_scale * base_sigma);
        FeatureVec fa_mu = random_direction(corr_eng, sc.feature_dim, 0.7);
        std::int64_t span = frame_hi - frame_lo + 1;
        std::int64_t latest = std::max<std::int64_t>(frame_lo, frame_lo + span - c.length);
        std::uniform_int_distribution<std::int64_t> start_dist(frame_lo, latest);
        std::int64_t start = start_dist(corr_eng);
        Trajectory fa;
        fa.id = next_id++;
        double lane = 1000.0 + 70.0 * static_cast<double>(false_alarm_index++);
        for (std::int64_t k = 0; k < c.length; ++k) {
          Detection d;
          d.frame = start + k;
          d.box = Box{20.0 + 2.0 * static_cast<double>(k), lane, 30.0, 60.0};
          d.confidence = 1.0;
          d.feature = draw_feature(corr_eng, fa_mu, fa_sigma);
          stream_at[d.frame].push_back(d);
          fa.detections.push_back(std::move(d));
        }
        hyp_by_id.emplace(fa.id, std::move(fa));
        break;
      }
    }
  }

  for (auto& [frame, dets] : stream_at) {
    scene.stream.frames.push_back({frame, std::move(dets)});
  }
  scene.hypothesis.feature_dim = scene.stream.feature_dim;
  for (auto& [id, traj] : hyp_by_id) {
    if (traj.detections.empty()) continue;  // fully dropped out
    scene.hypothesis.trajectories.push_back(std::move(traj));
  }
  if (scene.hypothesis.trajectories.empty()) scene.hypothesis.feature_dim.reset();
  if (scene.stream.frames.empty()) scene.stream.feature_dim.reset();

  scene.truth.validate();
  scene.stream.validate();
  scene.hypothesis.validate();
  return scene;
}

namespace {

ChiCheckResult chi_check_pairs(const TargetModel& a, const TargetModel& b,
                               std::size_t samples, std::uint64_t seed,
                               const StandardizeOverride& override_, bool shift) {
  if (samples < 100) {
    throw ValidationError("chi checks need at least 100 samples for power");
  }
  if (a.mu.size() != b.mu.size()) {
    throw ValidationError("chi check targets must share the feature dimension");
  }
  const std::size_t dim = a.mu.size();
  auto eng = make_engine(mix_seed(seed, 0xC41));
  std::vector<double> standardized;
  standardized.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    FeatureVec za = draw_feature(eng, a.mu, a.sigma);
    FeatureVec zb = draw_feature(eng, b.mu, b.sigma);
    double ss = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      double d = za[k] - zb[k];
      if (shift && !override_.drop_mean_shift) d -= a.mu[k] - b.mu[k];
      double denom = override_.sigma_multiplier *
                     std::sqrt(a.sigma[k] * a.sigma[k] + b.sigma[k] * b.sigma[k]);
      double u = d / denom;
      ss += u * u;
    }
    standardized.push_back(std::sqrt(ss));
  }
  auto ks = ks_test_chi(standardized, static_cast<double>(dim));
  return ChiCheckResult{ks.statistic, ks.p_value, ks.sample_count, dim};
}

}  // namespace

ChiCheckResult chi_check_intra(const Scenario& sc, std::size_t samples,
                               const StandardizeOverride& override_) {
  sc.validate();
  if (sc.targets.size() != 1) {
    throw ValidationError("chi_check_intra requires a single-target scenario");
  }
  // Same-target pairs: the mean shift is zero and the combined variance is
  // 2 sigma_k^2, so this is exactly the Eq. 7 standardization.
  return chi_check_pairs(sc.targets.front(), sc.targets.front(), samples, sc.seed,
                         override_, /*shift=*/false);
}

ChiCheckResult chi_check_inter(const TargetModel& a, const TargetModel& b,
                               std::size_t samples, std::uint64_t seed,
                               const StandardizeOverride& override_) {
  return chi_check_pairs(a, b, samples, seed, override_, /*shift=*/true);
}

BimodalityDemo bimodality_demo(const BimodalitySpec& spec) {
  if (spec.separation < 0.0) throw ValidationError("separation must be >= 0");
  if (spec.length_a + spec.length_b < 2) {
    throw ValidationError("bimodality demo needs at least two detections");
  }
  auto eng = make_engine(mix_seed(spec.seed, 0xB1D0));
  FeatureVec mu_a(spec.feature_dim, 0.0);
  FeatureVec dir = random_direction(eng, spec.feature_dim, spec.separation);
  FeatureVec mu_b = mu_a;
  for (std::size_t k = 0; k < mu_b.size(); ++k) mu_b[k] += dir[k];
  std::vector<double> sigma(spec.feature_dim, spec.sigma);

  Trajectory t;
  t.id = 0;
  for (std::size_t i = 0; i < spec.length_a + spec.length_b; ++i) {
    Detection d;
    d.frame = static_cast<std::int64_t>(i);
    d.box = Box{0.0, 0.0, 30.0, 60.0};
    d.feature = draw_feature(eng, i < spec.length_a ? mu_a : mu_b, sigma);
    t.detections.push_back(std::move(d));
  }

  BimodalityDemo demo;
  demo.samples = intra_distances(t, PairSampling::unlimited(spec.seed));
  demo.fit = fit_gmm2(demo.samples);
  return demo;
}

Scenario random_scenario(const RandomScenarioSpec& spec) {
  Scenario sc;
  sc.seed = spec.seed;
  sc.feature_dim = spec.feature_dim;
  sc.dropout = spec.dropout;
  auto eng = make_engine(mix_seed(spec.seed, 0x5CE11E));
  std::uniform_real_distribution<double> sigma_dist(spec.sigma_lo, spec.sigma_hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < spec.targets; ++i) {
    TargetModel t;
    t.id = static_cast<std::int64_t>(i);
    t.mu = random_direction(eng, spec.feature_dim, spec.mean_radius);
    t.sigma.assign(spec.feature_dim, sigma_dist(eng));
    if (spec.stagger && spec.frames >= 40) {
      // Entry in the first third, exit in the last third of the sequence.
      std::int64_t third = spec.frames / 3;
      t.first_frame = static_cast<std::int64_t>(unit(eng) * static_cast<double>(third));
      t.last_frame = spec.frames - 1 -
                     static_cast<std::int64_t>(unit(eng) * static_cast<double>(third));
    } else {
      t.first_frame = 0;
      t.last_frame = spec.frames - 1;
    }
    t.start_box = Box{20.0, 50.0 + 70.0 * static_cast<double>(i), 30.0, 60.0};
    t.vx = 2.0;
    t.vy = 0.0;
    sc.targets.push_back(std::move(t));
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Scenario file parsing

namespace {

struct RawSection {
  std::string name;  // "", "target" or "corruption"
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
};

[[noreturn]] void scenario_fail(const std::string& origin, std::size_t line_no,
                                const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_vector(const std::string& origin, std::size_t line_no,
                                 const std::string& value) {
  std::vector<double> out;
  std::istringstream ss(value);
  std::string tok;
  while (ss >> tok) {
    double v;
    if (!parse_double(tok, v)) scenario_fail(origin, line_no, "bad number '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) scenario_fail(origin, line_no, "expected at least one number");
  return out;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  std::vector<RawSection> sections(1);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim_copy(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') scenario_fail(origin, line_no, "unterminated section header");
      std::string name = trim_copy(s.substr(1, s.size() - 2));
      if (name != "target" && name != "corruption") {
        scenario_fail(origin, line_no, "unknown section [" + name + "]");
      }
      sections.push_back(RawSection{name, {}, line_no});
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) scenario_fail(origin, line_no, "expected key = value");
    std::string key = trim_copy(s.substr(0, eq));
    std::string value = trim_copy(s.substr(eq + 1));
    if (key.empty() || value.empty()) scenario_fail(origin, line_no, "empty key or value");
    sections.back().entries.emplace_back(key, value);
  }

  Scenario sc;
  double mu_radius_default = 0.7;

  auto get_int = [&](const RawSection& sec, const std::string& key, std::int64_t& out) {
    for (const auto& [k, v] : sec.entries) {
      if (k != key) continue;
      if (!parse_int64(v, out)) scenario_fail(origin, sec.line_no, "bad integer for " + key);
      return true;
    }
    return false;
  };
  auto get_double = [&](const RawSection& sec, const std::string& key, double& out) {
    for (const auto& [k, v] : sec.entries) {
      if (k != key) continue;
      if (!parse_double(v, out)) scenario_fail(origin, sec.line_no, "bad number for " + key);
      return true;
    }
    return false;
  };
  auto get_string = [&](const RawSection& sec, const std::string& key, std::string& out) {
    for (const auto& [k, v] : sec.entries) {
      if (k == key) {
        out = v;
        return true;
      }
    }
    return false;
  };

  // Top-level keys.
  {
    const RawSection& top = sections.front();
    std::int64_t seed = 0;
    if (get_int(top, "seed", seed)) sc.seed = static_cast<std::uint64_t>(seed);
    std::int64_t dim = 0;
    if (get_int(top, "feature_dim", dim)) {
      if (dim < 1) scenario_fail(origin, top.line_no, "feature_dim must be >= 1");
      sc.feature_dim = static_cast<std::size_t>(dim);
    }
    get_double(top, "dropout", sc.dropout);
    get_double(top, "mu_radius", mu_radius_default);
  }

  auto mu_eng = make_engine(mix_seed(sc.seed, kMuStream));
  std::int64_t auto_id = 0;
  for (std::size_t si = 1; si < sections.size(); ++si) {
    const RawSection& sec = sections[si];
    if (sec.name == "target") {
      TargetModel t;
      t.id = auto_id;
      get_int(sec, "id", t.id);
      auto_id = std::max(auto_id, t.id + 1);
      if (!get_int(sec, "first", t.first_frame) || !get_int(sec, "last", t.last_frame)) {
        scenario_fail(origin, sec.line_no, "[target] needs first and last frames");
      }
      std::string mu_text = "random";
      get_string(sec, "mu", mu_text);
      double radius = mu_radius_default;
      get_double(sec, "mu_radius", radius);
      if (mu_text == "random") {
        t.mu = random_direction(mu_eng, sc.feature_dim, radius);
      } else {
        t.mu = parse_vector(origin, sec.line_no, mu_text);
      }
      std::string sigma_text;
      if (!get_string(sec, "sigma", sigma_text)) {
        scenario_fail(origin, sec.line_no, "[target] needs sigma");
      }
      auto sigma = parse_vector(origin, sec.line_no, sigma_text);
      t.sigma = sigma.size() == 1 ? std::vector<double>(sc.feature_dim, sigma[0])
                                  : std::move(sigma);
      std::string box_text;
      if (get_string(sec, "start_box", box_text)) {
        auto b = parse_vector(origin, sec.line_no, box_text);
        if (b.size() != 4) scenario_fail(origin, sec.line_no, "start_box needs 4 numbers");
        t.start_box = Box{b[0], b[1], b[2], b[3]};
      } else {
        t.start_box = Box{20.0, 50.0 + 70.0 * static_cast<double>(t.id), 30.0, 60.0};
      }
      std::string vel_text;
      if (get_string(sec, "velocity", vel_text)) {
        auto v = parse_vector(origin, sec.line_no, vel_text);
        if (v.size() != 2) scenario_fail(origin, sec.line_no, "velocity needs 2 numbers");
        t.vx = v[0];
        t.vy = v[1];
      }
      sc.targets.push_back(std::move(t));
    } else {
      Corruption c;
      std::string kind;
      if (!get_string(sec, "kind", kind)) {
        scenario_fail(origin, sec.line_no, "[corruption] needs kind");
      }
      if (kind == "identity_switch") {
        c.kind = Corruption::Kind::identity_switch;
        if (!get_int(sec, "track", c.track) || !get_int(sec, "at_frame", c.at_frame) ||
            !get_int(sec, "to_target", c.to_target)) {
          scenario_fail(origin, sec.line_no,
                        "identity_switch needs track, at_frame and to_target");
        }
      } else if (kind == "fragmentation") {
        c.kind = Corruption::Kind::fragmentation;
        if (!get_int(sec, "track", c.track) || !get_int(sec, "at_frame", c.at_frame)) {
          scenario_fail(origin, sec.line_no, "fragmentation needs track and at_frame");
        }
      } else if (kind == "false_alarm") {
        c.kind = Corruption::Kind::false_alarm;
        get_int(sec, "length", c.length);
        get_double(sec, "sigma_scale", c.sigma_scale);
      } else {
        scenario_fail(origin, sec.line_no, "unknown corruption kind '" + kind + "'");
      }
      sc.corruptions.push_back(c);
    }
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

}  // namespace sqe::synth
