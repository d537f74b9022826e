#include "sqe/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "sqe/numfmt.hpp"

namespace sqe {

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

bool parse_int64(std::string_view token, std::int64_t& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line_no,
                             const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

struct TrackRow {
  std::int64_t frame;
  std::int64_t id;
  Detection det;
};

std::vector<TrackRow> read_track_rows(const std::filesystem::path& path,
                                      bool allow_negative_id) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tracks file: " + path.string());
  std::vector<TrackRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    auto fields = split_csv(sv);
    if (fields.size() != 10) {
      parse_fail(path, line_no, "expected 10 comma-separated fields, got " +
                                    std::to_string(fields.size()));
    }
    TrackRow row{};
    if (!parse_int64(fields[0], row.frame)) parse_fail(path, line_no, "bad frame field");
    if (!parse_int64(fields[1], row.id)) parse_fail(path, line_no, "bad id field");
    double box[4];
    for (int i = 0; i < 4; ++i) {
      if (!parse_double(fields[2 + i], box[i])) {
        parse_fail(path, line_no, "bad box field " + std::to_string(i + 1));
      }
    }
    if (!parse_double(fields[6], row.det.confidence)) {
      parse_fail(path, line_no, "bad confidence field");
    }
    // fields 7..9 ignored
    row.det.frame = row.frame;
    row.det.box = Box{box[0], box[1], box[2], box[3]};
    if (row.frame < 0) parse_fail(path, line_no, "negative frame index");
    if (row.id < 0 && !allow_negative_id) {
      parse_fail(path, line_no, "negative trajectory id");
    }
    try {
      validate_detection(row.det);
    } catch (const ValidationError& e) {
      parse_fail(path, line_no, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct FeatureRow {
  std::int64_t frame;
  std::int64_t id;
  FeatureVec values;
};

std::vector<FeatureRow> read_feature_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open features file: " + path.string());
  std::vector<FeatureRow> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    auto fields = split_csv(sv);
    if (fields.size() < 3) parse_fail(path, line_no, "feature row needs frame, id and values");
    FeatureRow row{};
    if (!parse_int64(fields[0], row.frame)) parse_fail(path, line_no, "bad frame field");
    if (!parse_int64(fields[1], row.id)) parse_fail(path, line_no, "bad id field");
    row.values.reserve(fields.size() - 2);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i], v)) {
        parse_fail(path, line_no, "bad feature value in column " + std::to_string(i + 1));
      }
      if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite feature value");
      row.values.push_back(v);
    }
    if (dim == 0) {
      dim = row.values.size();
    } else if (row.values.size() != dim) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": feature dimension mismatch: expected " +
                            std::to_string(dim) + ", got " +
                            std::to_string(row.values.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void normalize(FeatureVec& v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  if (ss <= 0.0) return;
  double inv = 1.0 / std::sqrt(ss);
  for (double& x : v) x *= inv;
}

void append_track_row(std::string& out, std::int64_t id, const Detection& d) {
  out += std::to_string(d.frame);
  out += ',';
  out += std::to_string(id);
  for (double v : {d.box.left, d.box.top, d.box.width, d.box.height, d.confidence}) {
    out += ',';
    append_double(out, v);
  }
  out += ",-1,-1,-1\n";
}

void append_feature_row(std::string& out, std::int64_t id, const Detection& d) {
  out += std::to_string(d.frame);
  out += ',';
  out += std::to_string(id);
  for (double v : *d.feature) {
    out += ',';
    append_double(out, v);
  }
  out += '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

// Canonical row order shared by save_trackset and save_features.
std::vector<std::pair<std::int64_t, const Detection*>> canonical_rows(const TrackSet& ts) {
  std::vector<std::pair<std::int64_t, const Detection*>> rows;
  for (const auto& t : ts.trajectories) {
    for (const auto& d : t.detections) rows.emplace_back(t.id, &d);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second->frame != b.second->frame) return a.second->frame < b.second->frame;
    return a.first < b.first;
  });
  return rows;
}

}  // namespace

TrackSet load_trackset(const std::filesystem::path& tracks_path,
                       const std::optional<std::filesystem::path>& features_path,
                       const LoadOptions& opts) {
  auto rows = read_track_rows(tracks_path, /*allow_negative_id=*/false);

  std::map<std::int64_t, std::vector<TrackRow>> by_id;
  for (auto& row : rows) by_id[row.id].push_back(std::move(row));

  std::map<std::pair<std::int64_t, std::int64_t>, FeatureVec> feature_by_key;
  std::optional<std::size_t> dim;
  if (features_path) {
    for (auto& fr : read_feature_rows(*features_path)) {
      auto key = std::make_pair(fr.frame, fr.id);
      if (opts.normalize_features) normalize(fr.values);
      dim = fr.values.size();
      if (!feature_by_key.emplace(key, std::move(fr.values)).second) {
        throw ValidationError("duplicate feature row for frame " +
                              std::to_string(fr.frame) + ", id " +
                              std::to_string(fr.id));
      }
    }
  }

  TrackSet ts;
  ts.feature_dim = dim;
  std::size_t consumed_features = 0;
  for (auto& [id, dets] : by_id) {
    std::sort(dets.begin(), dets.end(),
              [](const TrackRow& a, const TrackRow& b) { return a.frame < b.frame; });
    Trajectory traj;
    traj.id = id;
    for (auto& row : dets) {
      if (!traj.detections.empty() && traj.detections.back().frame == row.frame) {
        throw ValidationError("duplicate detection for frame " +
                              std::to_string(row.frame) + ", id " + std::to_string(id));
      }
      Detection d = std::move(row.det);
      if (features_path) {
        auto it = feature_by_key.find({row.frame, id});
        if (it != feature_by_key.end()) {
          d.feature = std::move(it->second);
          ++consumed_features;
        } else {
          d.interpolated = true;  // no feature row: synthetic detection
        }
      }
      traj.detections.push_back(std::move(d));
    }
    ts.trajectories.push_back(std::move(traj));
  }
  if (features_path && consumed_features != feature_by_key.size()) {
    throw ValidationError("features file has rows with no matching track row");
  }
  ts.validate();
  return ts;
}

void save_trackset(const TrackSet& ts, const std::filesystem::path& tracks_path) {
  ts.validate();
  std::string out;
  for (const auto& [id, det] : canonical_rows(ts)) append_track_row(out, id, *det);
  write_file(tracks_path, out);
}

void save_features(const TrackSet& ts, const std::filesystem::path& features_path) {
  ts.validate();
  std::string out;
  for (const auto& [id, det] : canonical_rows(ts)) {
    if (det->has_feature()) append_feature_row(out, id, *det);
  }
  write_file(features_path, out);
}

DetectionStream load_detections(const std::filesystem::path& detections_path,
                                const std::optional<std::filesystem::path>& features_path,
                                const LoadOptions& opts) {
  auto rows = read_track_rows(detections_path, /*allow_negative_id=*/true);
  for (const auto& row : rows) {
    if (row.id != -1) {
      throw ValidationError(detections_path.string() +
                            ": detections file must use id -1, found id " +
                            std::to_string(row.id));
    }
  }

  std::optional<std::size_t> dim;
  if (features_path) {
    auto feats = read_feature_rows(*features_path);
    if (feats.size() != rows.size()) {
      throw ValidationError("features file must have one row per detection: " +
                            std::to_string(feats.size()) + " vs " +
                            std::to_string(rows.size()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (feats[i].frame != rows[i].frame) {
        throw ValidationError("feature row " + std::to_string(i + 1) +
                              " frame does not match its detection row");
      }
      if (opts.normalize_features) normalize(feats[i].values);
      dim = feats[i].values.size();
      rows[i].det.feature = std::move(feats[i].values);
    }
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const TrackRow& a, const TrackRow& b) { return a.frame < b.frame; });
  DetectionStream stream;
  stream.feature_dim = dim;
  for (auto& row : rows) {
    if (stream.frames.empty() || stream.frames.back().frame != row.frame) {
      stream.frames.push_back({row.frame, {}});
    }
    stream.frames.back().detections.push_back(std::move(row.det));
  }
  stream.validate();
  return stream;
}

void save_detections(const DetectionStream& stream,
                     const std::filesystem::path& detections_path,
                     const std::optional<std::filesystem::path>& features_path) {
  stream.validate();
  std::string tracks;
  std::string feats;
  for (const auto& fb : stream.frames) {
    for (const auto& d : fb.detections) {
      append_track_row(tracks, -1, d);
      if (features_path) {
        if (!d.has_feature()) {
          throw ValidationError("cannot save features: detection at frame " +
                                std::to_string(d.frame) + " has none");
        }
        append_feature_row(feats, -1, d);
      }
    }
  }
  write_file(detections_path, tracks);
  if (features_path) write_file(*features_path, feats);
}

}  // namespace sqe
