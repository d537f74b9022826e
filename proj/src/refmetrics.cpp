#include "sqe/refmetrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include "sqe/numfmt.hpp"

namespace sqe {

double box_iou(const Box& a, const Box& b) {
  double x1 = std::max(a.left, b.left);
  double y1 = std::max(a.top, b.top);
  double x2 = std::min(a.left + a.width, b.left + b.width);
  double y2 = std::min(a.top + a.height, b.top + b.height);
  double iw = std::max(0.0, x2 - x1);
  double ih = std::max(0.0, y2 - y1);
  double inter = iw * ih;
  double uni = a.width * a.height + b.width * b.height - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

struct FrameBox {
  std::int64_t traj_id;
  const Box* box;
};

// frame -> boxes in ascending trajectory-id order.
std::map<std::int64_t, std::vector<FrameBox>> index_by_frame(const TrackSet& ts) {
  std::map<std::int64_t, std::vector<FrameBox>> out;
  for (const auto& t : ts.trajectories) {
    for (const auto& d : t.detections) out[d.frame].push_back({t.id, &d.box});
  }
  for (auto& [frame, boxes] : out) {
    std::sort(boxes.begin(), boxes.end(),
              [](const FrameBox& a, const FrameBox& b) { return a.traj_id < b.traj_id; });
  }
  return out;
}

}  // namespace

ClearResult clear_mot(const GroundTruth& gt, const TrackSet& hyp, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("iou_threshold must lie in (0, 1)");
  }
  gt.validate();
  hyp.validate();

  auto gt_frames = index_by_frame(gt);
  auto hyp_frames = index_by_frame(hyp);

  ClearResult res;
  std::unordered_map<std::int64_t, std::int64_t> prev_match;  // gt id -> hyp id, last frame
  std::unordered_map<std::int64_t, std::int64_t> last_match;  // gt id -> hyp id, persistent

  std::vector<std::int64_t> frames;
  for (const auto& [f, _] : gt_frames) frames.push_back(f);
  for (const auto& [f, _] : hyp_frames) {
    if (!gt_frames.count(f)) frames.push_back(f);
  }
  std::sort(frames.begin(), frames.end());

  for (std::int64_t frame : frames) {
    static const std::vector<FrameBox> kEmpty;
    const auto& gts = gt_frames.count(frame) ? gt_frames.at(frame) : kEmpty;
    const auto& hyps = hyp_frames.count(frame) ? hyp_frames.at(frame) : kEmpty;
    res.counts.gt_total += static_cast<std::int64_t>(gts.size());

    std::vector<char> g_used(gts.size(), 0), h_used(hyps.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // (gt idx, hyp idx)

    // Carry over previous-frame matches still above the threshold.
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      auto it = prev_match.find(gts[gi].traj_id);
      if (it == prev_match.end()) continue;
      for (std::size_t hi = 0; hi < hyps.size(); ++hi) {
        if (h_used[hi] || hyps[hi].traj_id != it->second) continue;
        if (box_iou(*gts[gi].box, *hyps[hi].box) >= iou_threshold) {
          matches.emplace_back(gi, hi);
          g_used[gi] = 1;
          h_used[hi] = 1;
        }
        break;
      }
    }

    // Assign the rest by minimum total 1 - IOU.
    std::vector<std::size_t> free_g, free_h;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (!g_used[gi]) free_g.push_back(gi);
    }
    for (std::size_t hi = 0; hi < hyps.size(); ++hi) {
      if (!h_used[hi]) free_h.push_back(hi);
    }
    if (!free_g.empty() && !free_h.empty()) {
      AssignmentProblem prob;
      prob.rows = free_g.size();
      prob.cols = free_h.size();
      prob.cost.resize(prob.rows * prob.cols);
      prob.allowed.assign(prob.rows * prob.cols, 0);
      for (std::size_t r = 0; r < prob.rows; ++r) {
        for (std::size_t c = 0; c < prob.cols; ++c) {
          double iou = box_iou(*gts[free_g[r]].box, *hyps[free_h[c]].box);
          prob.cost[r * prob.cols + c] = 1.0 - iou;
          prob.allowed[r * prob.cols + c] = iou >= iou_threshold ? 1 : 0;
        }
      }
      for (const auto& [r, c] : solve_assignment(prob)) {
        matches.emplace_back(free_g[r], free_h[c]);
      }
    }

    prev_match.clear();
    for (const auto& [gi, hi] : matches) {
      std::int64_t g_id = gts[gi].traj_id;
      std::int64_t h_id = hyps[hi].traj_id;
      double iou = box_iou(*gts[gi].box, *hyps[hi].box);
      res.counts.matched_distance_sum += 1.0 - iou;
      ++res.counts.matched_count;
      auto it = last_match.find(g_id);
      if (it != last_match.end() && it->second != h_id) ++res.counts.ids_total;
      last_match[g_id] = h_id;
      prev_match[g_id] = h_id;
    }
    res.counts.fn_total += static_cast<std::int64_t>(gts.size() - matches.size());
    res.counts.fp_total += static_cast<std::int64_t>(hyps.size() - matches.size());
  }

  if (res.counts.gt_total == 0) {
    if (res.counts.fp_total > 0) {
      throw ValidationError("MOTA is undefined: empty ground truth with non-empty hypotheses");
    }
    res.mota = 1.0;
    res.motp = 0.0;
    return res;
  }
  res.mota = 1.0 - static_cast<double>(res.counts.fn_total + res.counts.fp_total +
                                       res.counts.ids_total) /
                       static_cast<double>(res.counts.gt_total);
  res.motp = res.counts.matched_count > 0
                 ? res.counts.matched_distance_sum /
                       static_cast<double>(res.counts.matched_count)
                 : 0.0;
  return res;
}

IdResult id_metrics(const GroundTruth& gt, const TrackSet& hyp, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("iou_threshold must lie in (0, 1)");
  }
  gt.validate();
  hyp.validate();

  const std::size_t G = gt.size();
  const std::size_t H = hyp.size();

  std::vector<const Trajectory*> gts, hyps;
  for (const auto& t : gt.trajectories) gts.push_back(&t);
  for (const auto& t : hyp.trajectories) hyps.push_back(&t);
  std::sort(gts.begin(), gts.end(),
            [](const Trajectory* a, const Trajectory* b) { return a->id < b->id; });
  std::sort(hyps.begin(), hyps.end(),
            [](const Trajectory* a, const Trajectory* b) { return a->id < b->id; });

  std::int64_t total_gt = 0, total_hyp = 0;
  for (const auto* t : gts) total_gt += static_cast<std::int64_t>(t->length());
  for (const auto* t : hyps) total_hyp += static_cast<std::int64_t>(t->length());

  // Matched-frame counts per (gt, hyp) pair at the IOU threshold.
  std::vector<std::int64_t> overlap(G * H, 0);
  {
    std::unordered_map<std::int64_t, std::vector<std::pair<std::size_t, const Box*>>> hyp_at;
    for (std::size_t h = 0; h < H; ++h) {
      for (const auto& d : hyps[h]->detections) hyp_at[d.frame].emplace_back(h, &d.box);
    }
    for (std::size_t g = 0; g < G; ++g) {
      for (const auto& d : gts[g]->detections) {
        auto it = hyp_at.find(d.frame);
        if (it == hyp_at.end()) continue;
        for (const auto& [h, hbox] : it->second) {
          if (box_iou(d.box, *hbox) >= iou_threshold) ++overlap[g * H + h];
        }
      }
    }
  }

  std::int64_t idtp = 0;
  if (G > 0 && H > 0) {
    // Ristani-style padded matching, with the unmatched-hypothesis dummy
    // rows folded into the cost: cell (g, h) carries len(g) - 2 * overlap
    // (its len(h) term cancels against h's dummy row), dummy columns carry
    // len(g). Minimizing the total maximizes the matched-frame sum.
    AssignmentProblem prob;
    prob.rows = G;
    prob.cols = H + G;
    prob.cost.resize(prob.rows * prob.cols, 0.0);
    prob.allowed.assign(prob.rows * prob.cols, 0);
    for (std::size_t g = 0; g < G; ++g) {
      double len_g = static_cast<double>(gts[g]->length());
      for (std::size_t h = 0; h < H; ++h) {
        std::int64_t ov = overlap[g * H + h];
        if (ov > 0) {
          prob.cost[g * prob.cols + h] = len_g - 2.0 * static_cast<double>(ov);
          prob.allowed[g * prob.cols + h] = 1;
        }
      }
      for (std::size_t k = 0; k < G; ++k) {
        prob.cost[g * prob.cols + H + k] = len_g;
        prob.allowed[g * prob.cols + H + k] = 1;
      }
    }
    for (const auto& [g, c] : solve_assignment(prob)) {
      if (c < H) idtp += overlap[g * H + c];
    }
  }

  IdResult res;
  res.counts.idtp = idtp;
  res.counts.idfp = total_hyp - idtp;
  res.counts.idfn = total_gt - idtp;
  auto ratio = [](std::int64_t num, std::int64_t den) {
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 1.0;
  };
  res.idp = ratio(idtp, idtp + res.counts.idfp);
  res.idr = ratio(idtp, idtp + res.counts.idfn);
  res.idf1 = ratio(2 * idtp, 2 * idtp + res.counts.idfp + res.counts.idfn);
  return res;
}

void write_metrics_csv(const std::string& sequence, const IdResult& id,
                       const ClearResult& clear, const std::filesystem::path& path) {
  std::string out = "sequence,IDF1,IDP,IDR,MOTA,MOTP,FN,FP,IDS\n";
  out += sequence;
  for (double v : {id.idf1, id.idp, id.idr, clear.mota, clear.motp}) {
    out += ',';
    append_double(out, v);
  }
  out += ',' + std::to_string(clear.counts.fn_total);
  out += ',' + std::to_string(clear.counts.fp_total);
  out += ',' + std::to_string(clear.counts.ids_total);
  out += '\n';
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open metrics file: " + path.string());
  f << out;
}

}  // namespace sqe
