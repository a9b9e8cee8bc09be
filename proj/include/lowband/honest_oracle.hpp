#pragma once

#include "lowband/oracle.hpp"

namespace lowband {

/// Ground-truth oracle for a planted l-inf ball (continuous instance). The
/// first-order map returns z minus its componentwise projection onto the
/// ball, which strictly separates with margin ||g||_2^2.
class HonestBallOracle final : public SeparationOracle {
 public:
  HonestBallOracle(InfBall planted, double R, std::uint64_t seed = 0,
                   bool store_records = true);

  OracleAnswer ask(const Vec& point, const Query& q) override;
  const Transcript& transcript() const override { return transcript_; }
  const InfBall& planted() const { return planted_; }

 private:
  InfBall planted_;
  Transcript transcript_;
};

/// Ground-truth oracle for a planted ball on one integral fiber.
class HonestMixedOracle final : public SeparationOracle {
 public:
  HonestMixedOracle(Vec fiber, InfBall planted_y, double R,
                    std::uint64_t seed = 0, bool store_records = true);

  OracleAnswer ask(const Vec& point, const Query& q) override;
  const Transcript& transcript() const override { return transcript_; }

  bool contains(const Vec& point) const;

 private:
  Vec fiber_;
  InfBall planted_y_;
  Transcript transcript_;
};

}  // namespace lowband
