#pragma once

#include <span>
#include <vector>

namespace sparsenet {

/// Euclidean projection onto the l1 ball {w : ||w||_1 <= radius}.
///
/// Sort-based soft thresholding: magnitudes are sorted in decreasing
/// order (ties broken by index), the threshold tau is read off the
/// largest prefix with u_j > (sum_{i<=j} u_i - radius) / j, and
/// w_i = sign(v_i) max(|v_i| - tau, 0). Inputs already inside the ball
/// are returned unchanged. The result always satisfies
/// l1_norm(w) <= radius when summed sequentially, which makes the
/// projection exactly idempotent.
///
/// Throws DomainError if radius <= 0 or v has non-finite entries.
std::vector<double> project_l1(std::span<const double> v, double radius);

}  // namespace sparsenet
