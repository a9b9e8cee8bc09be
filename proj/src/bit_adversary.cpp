#include "lowband/bit_adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lowband {

int bit_commit_threshold(int d) { return std::max(1, (d + 3) / 4); }

int bit_level_budget(int d) { return std::max(1, (d * d + 15) / 16); }

namespace {

/// Sub-box a descend into `label` would recurse to.
WitnessSet recursion_subbox(const Vec& anchor, double radius,
                            const std::vector<int>& label) {
  Vec center = anchor;
  for (std::size_t i = 0; i < label.size(); ++i)
    center[static_cast<Eigen::Index>(i)] += (2.0 * radius / 3.0) * label[i];
  return WitnessSet{0, {}, InfBall{center, radius / 3.0}};
}

bool record_survives(const BitLevelSnapshot::Rec& rec,
                     const BitLevelSnapshot::Orthant* home,
                     const WitnessSet& region, double tol,
                     bool respect_resolutions) {
  // Zero answers in an uncommitted orthant pin nothing: the map may still
  // choose any normal sign*e_i with i outside the queried set, so the
  // candidate survives when one of them separates the query point. Commit
  // answers (and face answers) are pinned and checked as realized.
  const bool pinned =
      rec.orthant.empty() || (home && home->commit) ||
      (respect_resolutions && rec.normal.has_value());
  if (pinned) {
    if (!rec.normal) return false;
    return separates_strictly(*rec.normal, rec.point, region, tol);
  }
  if (home == nullptr) return false;
  const int d = static_cast<int>(rec.point.size());
  for (int i = 0; i < d; ++i) {
    if (home->queried_coords.count(i)) continue;
    Vec a = Vec::Zero(d);
    a[i] = home->label[static_cast<std::size_t>(i)];
    if (separates_strictly(a, rec.point, region, tol)) return true;
  }
  return false;
}

bool orthant_survives_impl(const std::vector<int>& candidate,
                           const BitLevelSnapshot& level, double tol,
                           bool respect_resolutions) {
  const WitnessSet region = recursion_subbox(level.anchor, level.radius, candidate);
  for (const auto& rec : level.records) {
    const BitLevelSnapshot::Orthant* home = nullptr;
    for (const auto& o : level.orthants)
      if (o.label == rec.orthant) home = &o;
    if (!record_survives(rec, home, region, tol, respect_resolutions))
      return false;
  }
  return true;
}

}  // namespace

bool orthant_survives(const std::vector<int>& candidate,
                      const BitLevelSnapshot& level, double tol) {
  return orthant_survives_impl(candidate, level, tol, false);
}

long count_surviving_orthants(const BitLevelSnapshot& level, double tol) {
  const int d = static_cast<int>(level.anchor.size());
  if (d > 12)
    throw std::invalid_argument("orthant enumeration capped at d = 12");
  long survivors = 0;
  std::vector<int> label(static_cast<std::size_t>(d), -1);
  for (long mask = 0; mask < (1L << d); ++mask) {
    for (int i = 0; i < d; ++i)
      label[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? +1 : -1;
    if (orthant_survives(label, level, tol)) ++survivors;
  }
  return survivors;
}

BitAdversaryCore::BitAdversaryCore(int d, double R, double rho, double tol)
    : d_(d), R_(R), rho_(rho), tol_(tol), anchor_(Vec::Zero(d)), radius_(R) {
  if (d < 1) throw std::invalid_argument("bit adversary needs d >= 1");
  if (!(R > 0.0) || !(rho >= 0.0)) throw std::invalid_argument("need R > 0 and rho >= 0");
}

Vec BitAdversaryCore::unit(int i, int sign) const {
  Vec a = Vec::Zero(d_);
  a[i] = sign;
  return a;
}

void BitAdversaryCore::resolve_rec(std::size_t rec_id, const Vec& normal) {
  LevelRec& rec = recs_[rec_id];
  if (rec.normal) return;
  rec.normal = normal;
  resolution_queue_.emplace_back(rec.ticket, normal);
}

BitAdversaryCore::Outcome BitAdversaryCore::respond(const Vec& point,
                                                    std::optional<int> coord,
                                                    std::size_t transcript_index) {
  if (point.size() != d_) throw std::invalid_argument("query point dimension mismatch");
  if (coord && (*coord < 0 || *coord >= d_))
    throw std::out_of_range("queried coordinate out of range");

  Outcome out;
  out.level = level_index_;
  out.ticket = next_ticket_++;

  LevelRec rec;
  rec.point = point;
  rec.coord = coord;
  rec.ticket = out.ticket;
  rec.transcript_index = transcript_index;

  const BoxRegion box = universe();
  if (!box.contains(point)) {
    auto face = box_face_separator(point, box);
    out.realized = true;
    out.normal = face->normal;
    out.tag = "outside";
    rec.normal = out.normal;
    recs_.push_back(std::move(rec));
  } else {
    const std::vector<int> label = orthant_of(point, anchor_).signs;
    out.tag = orthant_string(label);
    rec.orthant = label;
    OrthantData& od = orthants_[label];
    const std::size_t rec_id = recs_.size();
    if (od.commit) {
      out.realized = true;
      out.normal = unit(od.commit->first, od.commit->second);
      rec.normal = out.normal;
    } else if (od.count < bit_commit_threshold(d_) - 1) {
      if (coord) od.queried_coords.insert(*coord);
      out.realized = false;
    } else {
      // Threshold query: commit to the smallest coordinate unused by this
      // orthant's zero answers and by earlier commits.
      int pick = -1;
      for (int i = 0; i < d_; ++i) {
        if (od.queried_coords.count(i) || used_coords_.count(i)) continue;
        pick = i;
        break;
      }
      if (pick < 0)
        throw std::runtime_error("budget exceeded: adversary guarantee void");
      const int sign = label[static_cast<std::size_t>(pick)];
      od.commit = {pick, sign};
      used_coords_.insert(pick);
      commits_.push_back({label, pick, sign, level_index_});
      out.realized = true;
      out.normal = unit(pick, sign);
      rec.normal = out.normal;
      for (std::size_t id : od.rec_ids) resolve_rec(id, out.normal);
    }
    od.count += 1;
    od.rec_ids.push_back(rec_id);
    recs_.push_back(std::move(rec));
  }

  ++level_queries_;
  ++total_queries_;
  if (level_queries_ >= bit_level_budget(d_) && can_descend()) descend();
  return out;
}

std::vector<std::pair<std::uint64_t, Vec>> BitAdversaryCore::drain_resolutions() {
  auto out = std::move(resolution_queue_);
  resolution_queue_.clear();
  return out;
}

BitLevelSnapshot BitAdversaryCore::level_snapshot() const {
  BitLevelSnapshot snap;
  snap.index = level_index_;
  snap.anchor = anchor_;
  snap.radius = radius_;
  snap.queries = level_queries_;
  snap.used_coords = used_coords_;
  for (const auto& [label, od] : orthants_) {
    BitLevelSnapshot::Orthant o;
    o.label = label;
    o.queried_coords = od.queried_coords;
    o.commit = od.commit;
    o.count = od.count;
    snap.orthants.push_back(std::move(o));
  }
  for (const auto& rec : recs_) {
    BitLevelSnapshot::Rec r;
    r.point = rec.point;
    r.coord = rec.coord;
    r.normal = rec.normal;
    r.orthant = rec.orthant;
    r.transcript_index = rec.transcript_index;
    snap.records.push_back(std::move(r));
  }
  return snap;
}

std::vector<int> BitAdversaryCore::surviving_orthant() const {
  const BitLevelSnapshot snap = level_snapshot();
  if (d_ <= 12) {
    std::vector<int> label(static_cast<std::size_t>(d_), -1);
    // Lexicographic enumeration under -1 < +1: treat -1 as the low digit,
    // coordinate 0 most significant.
    for (long mask = 0; mask < (1L << d_); ++mask) {
      for (int i = 0; i < d_; ++i)
        label[static_cast<std::size_t>(i)] = (mask >> (d_ - 1 - i)) & 1 ? +1 : -1;
      if (orthant_survives_impl(label, snap, tol_, true)) return label;
    }
    throw std::logic_error("no surviving orthant within budget");
  }
  // Beyond the enumeration cap: flip away from every commit, then repair
  // against uncommitted queried orthants using fresh coordinates.
  std::vector<int> label(static_cast<std::size_t>(d_), -1);
  std::set<int> fixed;
  for (const auto& [olabel, od] : orthants_) {
    if (!od.commit) continue;
    label[static_cast<std::size_t>(od.commit->first)] = -od.commit->second;
    fixed.insert(od.commit->first);
  }
  for (const auto& [olabel, od] : orthants_) {
    if (od.commit || od.rec_ids.empty()) continue;
    bool ok = false;
    for (int i = 0; i < d_ && !ok; ++i)
      if (!od.queried_coords.count(i) &&
          label[static_cast<std::size_t>(i)] == -olabel[static_cast<std::size_t>(i)])
        ok = true;
    if (ok) continue;
    int pick = -1;
    for (int i = 0; i < d_; ++i) {
      if (od.queried_coords.count(i) || fixed.count(i)) continue;
      pick = i;
      break;
    }
    if (pick < 0) throw std::logic_error("no surviving orthant within budget");
    label[static_cast<std::size_t>(pick)] = -olabel[static_cast<std::size_t>(pick)];
    fixed.insert(pick);
  }
  if (!orthant_survives_impl(label, snap, tol_, true))
    throw std::logic_error("no surviving orthant within budget");
  return label;
}

void BitAdversaryCore::resolve_pendings_toward(const std::vector<int>& survivor) {
  for (auto& [label, od] : orthants_) {
    if (od.commit) continue;
    bool any_pending = false;
    for (std::size_t id : od.rec_ids)
      if (!recs_[id].normal) any_pending = true;
    if (!any_pending) continue;
    int pick = -1;
    for (int i = 0; i < d_; ++i) {
      if (od.queried_coords.count(i)) continue;
      if (survivor[static_cast<std::size_t>(i)] == -label[static_cast<std::size_t>(i)]) {
        pick = i;
        break;
      }
    }
    if (pick < 0) throw std::logic_error("pending orthant inconsistent with survivor");
    const Vec a = unit(pick, label[static_cast<std::size_t>(pick)]);
    for (std::size_t id : od.rec_ids) resolve_rec(id, a);
  }
}

void BitAdversaryCore::finalize() {
  bool any_pending = false;
  for (const auto& rec : recs_)
    if (!rec.normal) any_pending = true;
  if (!any_pending) return;
  resolve_pendings_toward(surviving_orthant());
}

void BitAdversaryCore::descend() {
  const std::vector<int> survivor = surviving_orthant();
  // Keep the level's closing snapshot pre-resolution: the elimination count
  // is about which maps exist, not the one this descent happens to pick.
  history_.push_back(level_snapshot());
  resolve_pendings_toward(survivor);
  for (std::size_t i = 0; i < survivor.size(); ++i)
    anchor_[static_cast<Eigen::Index>(i)] += (2.0 * radius_ / 3.0) * survivor[i];
  radius_ /= 3.0;
  ++level_index_;
  level_queries_ = 0;
  orthants_.clear();
  used_coords_.clear();
  recs_.clear();
}

std::pair<InfBall, InfBall> BitAdversaryCore::witness_balls(double rho) {
  const bool fresh = level_queries_ == 0;
  const auto pair_around = [&rho](const Vec& base, double spread) {
    std::pair<InfBall, InfBall> out;
    out.first.center = base;
    out.first.center[0] -= spread;
    out.first.radius = rho;
    out.second.center = base;
    out.second.center[0] += spread;
    out.second.radius = rho;
    return out;
  };
  if (rho < radius_ / 6.0) {
    const std::vector<int> survivor = surviving_orthant();
    resolve_pendings_toward(survivor);
    Vec center = anchor_;
    for (std::size_t i = 0; i < survivor.size(); ++i)
      center[static_cast<Eigen::Index>(i)] += (2.0 * radius_ / 3.0) * survivor[i];
    return pair_around(center, radius_ / 6.0);
  }
  if (fresh && rho < radius_ / 2.0) return pair_around(anchor_, radius_ / 2.0);
  throw std::invalid_argument("fatness too large for current level");
}

BitAdversary::BitAdversary(int d, double R, double rho, std::uint64_t seed, double tol)
    : core_(d, R, rho, tol),
      transcript_(TranscriptHeader{0, d, R, rho, "bit", seed}) {}

OracleAnswer BitAdversary::ask(const Vec& point, const Query& q) {
  std::optional<int> coord;
  switch (q.kind) {
    case QueryKind::kCoord:
    case QueryKind::kBit:
      coord = q.coord;
      break;
    default:
      throw std::invalid_argument("bit oracle answers coordinate/bit queries only");
  }
  auto out = core_.respond(point, coord, transcript_.size());
  OracleAnswer ans;
  if (out.realized) {
    ans = evaluate_query(q, out.normal);
  } else {
    ans = q.kind == QueryKind::kCoord ? OracleAnswer::Value(0.0)
                                      : OracleAnswer::BitVal(0);
  }
  TranscriptRecord rec;
  rec.point = point;
  rec.query = q;
  rec.answer = ans;
  if (out.realized) rec.realized_normal = out.normal;
  rec.level = out.level;
  rec.tag = out.tag;
  const std::size_t idx = transcript_.append(std::move(rec));
  if (!out.realized) pending_[out.ticket] = idx;
  drain();
  return ans;
}

void BitAdversary::drain() {
  for (const auto& [ticket, normal] : core_.drain_resolutions()) {
    auto it = pending_.find(ticket);
    if (it == pending_.end()) continue;
    transcript_.resolve_normal(it->second, normal);
    pending_.erase(it);
  }
}

std::pair<WitnessSet, WitnessSet> BitAdversary::witnesses(double rho) {
  auto balls = core_.witness_balls(rho);
  drain();
  return {WitnessSet{0, {}, balls.first}, WitnessSet{0, {}, balls.second}};
}

void BitAdversary::finalize() {
  core_.finalize();
  drain();
}

}  // namespace lowband
