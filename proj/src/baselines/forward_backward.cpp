#include "baselines/forward_backward.hpp"

#include <cmath>

#include "util/logsumexp.hpp"

namespace dpvi {

HmmMatrices hmm_matrices(const BinaryHmmParams& params) {
  params.validate();
  HmmMatrices m;
  auto t = params.transition();
  auto e = params.emission();
  m.log_init = {std::log(1.0 - params.init1), std::log(params.init1)};
  m.log_trans.assign(2, std::vector<double>(2));
  m.log_emit.assign(2, std::vector<double>(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      m.log_trans[i][j] = std::log(t[i][j]);
      m.log_emit[i][j] = std::log(e[i][j]);
    }
  return m;
}

namespace {

std::vector<std::vector<double>> alpha_pass(const HmmMatrices& hmm,
                                            const std::vector<int>& obs) {
  std::size_t s_count = hmm.log_init.size();
  std::vector<std::vector<double>> alpha(obs.size(),
                                         std::vector<double>(s_count));
  std::vector<double> terms(s_count);
  for (std::size_t n = 0; n < obs.size(); ++n) {
    for (std::size_t s = 0; s < s_count; ++s) {
      double trans_in;
      if (n == 0) {
        trans_in = hmm.log_init[s];
      } else {
        for (std::size_t r = 0; r < s_count; ++r)
          terms[r] = alpha[n - 1][r] + hmm.log_trans[r][s];
        trans_in = logsumexp(terms);
      }
      alpha[n][s] = trans_in + hmm.log_emit[s][static_cast<std::size_t>(obs[n])];
    }
  }
  return alpha;
}

}  // namespace

double forward_log_likelihood(const HmmMatrices& hmm,
                              const std::vector<int>& obs) {
  if (obs.empty()) throw Error("empty observation sequence");
  auto alpha = alpha_pass(hmm, obs);
  return logsumexp(alpha.back());
}

std::vector<int> sample_posterior_path(const HmmMatrices& hmm,
                                       const std::vector<int>& obs, Rng& rng) {
  if (obs.empty()) throw Error("empty observation sequence");
  std::size_t s_count = hmm.log_init.size();
  auto alpha = alpha_pass(hmm, obs);

  std::vector<int> path(obs.size());
  auto draw = [&](const std::vector<double>& log_probs) {
    double z = logsumexp(log_probs);
    std::vector<double> probs(log_probs.size());
    for (std::size_t s = 0; s < probs.size(); ++s)
      probs[s] = std::exp(log_probs[s] - z);
    return rng.categorical(probs);
  };

  path.back() = draw(alpha.back());
  std::vector<double> terms(s_count);
  for (std::size_t n = obs.size() - 1; n-- > 0;) {
    auto next = static_cast<std::size_t>(path[n + 1]);
    for (std::size_t s = 0; s < s_count; ++s)
      terms[s] = alpha[n][s] + hmm.log_trans[s][next];
    path[n] = draw(terms);
  }
  return path;
}

SmoothingResult forward_backward(const HmmMatrices& hmm,
                                 const std::vector<int>& obs) {
  if (obs.empty()) throw Error("empty observation sequence");
  std::size_t s_count = hmm.log_init.size();
  auto alpha = alpha_pass(hmm, obs);

  std::vector<std::vector<double>> beta(obs.size(),
                                        std::vector<double>(s_count, 0.0));
  std::vector<double> terms(s_count);
  for (std::size_t n = obs.size() - 1; n-- > 0;) {
    for (std::size_t s = 0; s < s_count; ++s) {
      for (std::size_t r = 0; r < s_count; ++r)
        terms[r] = hmm.log_trans[s][r] +
                   hmm.log_emit[r][static_cast<std::size_t>(obs[n + 1])] +
                   beta[n + 1][r];
      beta[n][s] = logsumexp(terms);
    }
  }

  SmoothingResult res;
  res.log_likelihood = logsumexp(alpha.back());
  res.marginals.assign(obs.size(), std::vector<double>(s_count));
  for (std::size_t n = 0; n < obs.size(); ++n) {
    for (std::size_t s = 0; s < s_count; ++s)
      terms[s] = alpha[n][s] + beta[n][s];
    double z = logsumexp(terms);
    for (std::size_t s = 0; s < s_count; ++s)
      res.marginals[n][s] = std::exp(terms[s] - z);
  }
  return res;
}

}  // namespace dpvi
