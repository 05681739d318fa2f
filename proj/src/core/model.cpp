#include "core/model.hpp"

#include "util/logsumexp.hpp"

namespace dpvi {

std::vector<double> DiscreteModel::proposal_log_probs(const Particle& p,
                                                      int n) const {
  std::vector<double> incr = prefix_log_scores(p, n);
  for (double& v : incr) v -= p.log_score;
  double z = logsumexp(incr);
  if (z == kNegInf) throw Error("no viable continuation to propose");
  for (double& v : incr) v -= z;
  return incr;
}

Assignment relabel_by_first_appearance(const Assignment& x) {
  Assignment out(x.size(), kUnassigned);
  std::vector<std::int32_t> map;  // old label -> new label, -1 = unseen
  std::int32_t next = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == kUnassigned) continue;
    auto old = static_cast<std::size_t>(x[i]);
    if (old >= map.size()) map.resize(old + 1, kUnassigned);
    if (map[old] == kUnassigned) map[old] = next++;
    out[i] = map[old];
  }
  return out;
}

}  // namespace dpvi
