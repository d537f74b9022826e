// File ingestion and serialization in MOTChallenge-compatible layouts.
//
// Tracks file (no header), one detection per row:
//   frame,id,bb_left,bb_top,bb_width,bb_height,conf,-1,-1,-1
// The trailing three fields are ignored on read and written as -1.
// A detections file is a tracks file whose id column is -1.
//
// Features file (no header), one row per feature-bearing detection:
//   frame,id,f_1,...,f_N          with N constant across the file.
#pragma once

#include <filesystem>
#include <optional>

#include "sqe/types.hpp"

namespace sqe {

struct LoadOptions {
  // L2-normalize every feature vector on ingest.
  bool normalize_features = false;
};

/// Loads a track set, grouping rows by id and sorting by frame.
/// When features_path is given, feature rows are joined on (frame, id);
/// rows without a feature row load as synthetic (interpolated) detections.
/// Duplicate (frame, id) keys and orphan feature rows are rejected.
TrackSet load_trackset(const std::filesystem::path& tracks_path,
                       const std::optional<std::filesystem::path>& features_path = {},
                       const LoadOptions& opts = {});

/// Writes the tracks file in canonical order (frame, then id).
void save_trackset(const TrackSet& ts, const std::filesystem::path& tracks_path);

/// Writes one feature row per feature-bearing detection, same order as
/// save_trackset emits the corresponding track rows.
void save_features(const TrackSet& ts, const std::filesystem::path& features_path);

/// Loads a detections file (id column must be -1). Feature rows are joined
/// positionally: row i of the features file belongs to row i of the tracks
/// file, with frames cross-checked.
DetectionStream load_detections(const std::filesystem::path& detections_path,
                                const std::optional<std::filesystem::path>& features_path = {},
                                const LoadOptions& opts = {});

void save_detections(const DetectionStream& stream,
                     const std::filesystem::path& detections_path,
                     const std::optional<std::filesystem::path>& features_path = {});

}  // namespace sqe
