#pragma once

namespace lowband {

enum class AdversaryKind { kBit, kDir };

/// Largest k >= 0 with 2*rho*scale^k < R: how many times the recursion can
/// shrink the region by `scale` and still hold two disjoint rho-balls.
long recursion_depth(double R, double rho, double scale);

/// Certified query floors for the continuous problem (n = 0); the mixed
/// floors multiply these by 2^n.
long bit_certified_floor(int d, double R, double rho);
long dir_certified_floor(int d, double R, double rho);
long certified_floor(AdversaryKind kind, int n, int d, double R, double rho);

}  // namespace lowband
