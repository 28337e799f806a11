#include "core/observables.hpp"

#include <algorithm>
#include <cmath>

namespace rfim {

OverlapSample overlap(std::span<const std::int8_t> sigma_l,
                      std::span<const std::int8_t> sigma_s,
                      std::span<const double> weights, int l, int s) {
  if (sigma_l.size() != sigma_s.size() || sigma_l.size() != weights.size())
    fail(ErrorKind::invalid_argument, "overlap: size mismatch");
  OverlapSample out;
  out.l = l;
  out.s = s;
  if (l == s) {
    out.value = 1.0;  // R_{l,l} = 1 by convention
    return out;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma_l.size(); ++i)
    acc += weights[i] * sigma_l[i] * sigma_s[i];
  out.value = acc / static_cast<double>(sigma_l.size());
  return out;
}

double delta_n(std::span<const std::int8_t> sigma,
               const DisorderRealization& disorder) {
  if (static_cast<std::int64_t>(sigma.size()) != disorder.volume())
    fail(ErrorKind::invalid_argument, "delta_n: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) acc += disorder.g[i] * sigma[i];
  return acc / static_cast<double>(sigma.size());
}

double magnetization(std::span<const std::int8_t> sigma) {
  double acc = 0.0;
  for (auto s : sigma) acc += s;
  return sigma.empty() ? 0.0 : acc / static_cast<double>(sigma.size());
}

void QuenchedStats::add(std::uint64_t seed, double value) {
  auto it = std::lower_bound(
      records_.begin(), records_.end(), seed,
      [](const auto& rec, std::uint64_t key) { return rec.first < key; });
  records_.insert(it, {seed, value});
}

QuenchedStats QuenchedStats::merge(const QuenchedStats& a, const QuenchedStats& b) {
  QuenchedStats out;
  out.records_.resize(a.records_.size() + b.records_.size());
  std::merge(a.records_.begin(), a.records_.end(), b.records_.begin(),
             b.records_.end(), out.records_.begin(),
             [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

double QuenchedStats::mean() const {
  if (records_.empty()) fail(ErrorKind::invalid_argument, "stats: empty");
  double acc = 0.0;
  for (const auto& r : records_) acc += r.second;
  return acc / static_cast<double>(records_.size());
}

double QuenchedStats::population_variance() const {
  const double m = mean();
  double acc = 0.0;
  for (const auto& r : records_) acc += (r.second - m) * (r.second - m);
  return acc / static_cast<double>(records_.size());
}

double QuenchedStats::variance() const {
  if (records_.size() < 2) return 0.0;
  return population_variance() * static_cast<double>(records_.size()) /
         static_cast<double>(records_.size() - 1);
}

double QuenchedStats::standard_error() const {
  if (records_.empty()) return 0.0;
  return std::sqrt(variance() / static_cast<double>(records_.size()));
}

JackknifeResult jackknife(
    const std::vector<std::vector<double>>& rows,
    const std::function<double(const std::vector<double>&)>& statistic) {
  const std::size_t k = rows.size();
  if (k == 0) fail(ErrorKind::invalid_argument, "jackknife: no rows");
  const std::size_t t = rows[0].size();
  std::vector<double> totals(t, 0.0);
  for (const auto& row : rows) {
    if (row.size() != t) fail(ErrorKind::invalid_argument, "jackknife: ragged rows");
    for (std::size_t j = 0; j < t; ++j) totals[j] += row[j];
  }
  std::vector<double> means(t);
  for (std::size_t j = 0; j < t; ++j) means[j] = totals[j] / static_cast<double>(k);
  JackknifeResult out;
  out.estimate = statistic(means);
  if (k < 2) return out;
  std::vector<double> loo(t);
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < t; ++j)
      loo[j] = (totals[j] - rows[i][j]) / static_cast<double>(k - 1);
    const double v = statistic(loo);
    acc += v;
    acc2 += v * v;
  }
  const double mean_loo = acc / static_cast<double>(k);
  const double ss = std::max(0.0, acc2 / static_cast<double>(k) - mean_loo * mean_loo);
  out.se = std::sqrt(static_cast<double>(k - 1) * ss);
  return out;
}

OverlapFunctionSpec parse_overlap_function(const std::string& name) {
  OverlapFunctionSpec f;
  f.name = name;
  if (name == "one" || name == "1") {
    f.name = "one";
    return f;
  }
  // grammar: R<l><s> optionally joined by '*', e.g. "R12", "R12*R13"
  std::size_t pos = 0;
  while (pos < name.size()) {
    if (name[pos] == '*') {
      ++pos;
      continue;
    }
    if (name[pos] != 'R' || pos + 2 >= name.size() + 0 ||
        !std::isdigit(static_cast<unsigned char>(name[pos + 1])) ||
        !std::isdigit(static_cast<unsigned char>(name[pos + 2])))
      fail(ErrorKind::invalid_argument,
           "overlap function: expected 'one' or products like 'R12*R13', got '" +
               name + "'");
    const int l = name[pos + 1] - '0';
    const int s = name[pos + 2] - '0';
    if (l < 1 || s < 1)
      fail(ErrorKind::invalid_argument, "overlap function: replica labels start at 1");
    f.factors.emplace_back(l, s);
    pos += 3;
  }
  if (f.factors.empty())
    fail(ErrorKind::invalid_argument, "overlap function: empty product");
  if (f.factors.size() > 2)
    fail(ErrorKind::invalid_argument,
         "overlap function: at most two overlap factors are supported");
  return f;
}

int replicas_needed(const OverlapFunctionSpec& f) {
  int top = 0;
  for (const auto& [l, s] : f.factors) top = std::max({top, l, s});
  return top;
}

double eval_overlap_function(const OverlapFunctionSpec& f,
                             const std::vector<double>& overlap_matrix, int m) {
  double prod = 1.0;
  for (const auto& [l, s] : f.factors) {
    if (l > m || s > m)
      fail(ErrorKind::invalid_argument, "overlap function: replica label out of range");
    prod *= overlap_matrix[static_cast<std::size_t>(l - 1) * m + (s - 1)];
  }
  return std::clamp(prod, -1.0, 1.0);
}

double overlap_product_mean(const ExactGibbs& state,
                            const std::vector<std::pair<int, int>>& factors_in,
                            const std::vector<double>& weights) {
  const std::int64_t v = state.spec().volume;
  if (static_cast<std::int64_t>(weights.size()) != v)
    fail(ErrorKind::invalid_argument, "overlap_product_mean: weight size mismatch");

  // drop same-replica factors (R_{l,l} = 1)
  std::vector<std::pair<int, int>> factors;
  for (const auto& p : factors_in)
    if (p.first != p.second) factors.push_back(p);
  const std::size_t k = factors.size();
  if (k == 0) return 1.0;
  if (k > 3)
    fail(ErrorKind::capacity, "overlap_product_mean: at most three factors");

  // Per site tuple, each replica picks up the sites of the factors it
  // appears in; duplicates cancel (s^2 = 1) and the rest factorizes into
  // one-, two-, or three-point marginals.
  std::vector<int> replicas;
  for (const auto& [l, s] : factors) {
    replicas.push_back(l);
    replicas.push_back(s);
  }
  std::sort(replicas.begin(), replicas.end());
  replicas.erase(std::unique(replicas.begin(), replicas.end()), replicas.end());

  auto replica_moment = [&](std::vector<std::int64_t>& sites) -> double {
    // parity reduction
    std::sort(sites.begin(), sites.end());
    std::vector<std::int64_t> odd;
    for (std::size_t i = 0; i < sites.size();) {
      std::size_t j = i;
      while (j < sites.size() && sites[j] == sites[i]) ++j;
      if ((j - i) % 2 == 1) odd.push_back(sites[i]);
      i = j;
    }
    switch (odd.size()) {
      case 0: return 1.0;
      case 1: return state.site_mean(odd[0]);
      case 2: return state.pair_mean(odd[0], odd[1]);
      case 3: return state.triple_mean(odd[0], odd[1], odd[2]);
      default:
        fail(ErrorKind::capacity, "overlap_product_mean: moment order too high");
    }
  };

  std::vector<std::int64_t> tuple(k, 0);
  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t i = 0; i < k; ++i) w *= weights[static_cast<std::size_t>(tuple[i])];
    double prod = 1.0;
    for (int r : replicas) {
      std::vector<std::int64_t> sites;
      for (std::size_t i = 0; i < k; ++i)
        if (factors[i].first == r || factors[i].second == r)
          sites.push_back(tuple[i]);
      prod *= replica_moment(sites);
      if (prod == 0.0) break;
    }
    acc += w * prod;
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++tuple[pos] < v) break;
      tuple[pos] = 0;
      if (pos == 0) {
        pos = k + 1;
        break;
      }
    }
    if (pos == k + 1) break;
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < k; ++i) scale *= static_cast<double>(v);
  return acc / scale;
}

GgTerms gg_terms_exact(const ExactGibbs& state, int m,
                       const OverlapFunctionSpec& f,
                       const std::vector<double>& weights) {
  if (m < 2) fail(ErrorKind::invalid_argument, "gg: m must be >= 2");
  if (replicas_needed(f) > m)
    fail(ErrorKind::invalid_argument, "gg: f reads more replicas than m");
  GgTerms out;
  auto with_extra = [&](int l, int s) {
    std::vector<std::pair<int, int>> factors = f.factors;
    factors.emplace_back(l, s);
    return overlap_product_mean(state, factors, weights);
  };
  out.f_r_top = with_extra(1, m + 1);
  out.f_alone = overlap_product_mean(state, f.factors, weights);
  out.r12 = overlap_product_mean(state, {{1, 2}}, weights);
  for (int s = 2; s <= m; ++s) out.f_r_s.push_back(with_extra(1, s));
  return out;
}

JackknifeResult gg_residual(const std::vector<GgTerms>& per_seed, int m) {
  if (per_seed.empty()) fail(ErrorKind::invalid_argument, "gg: empty ensemble");
  std::vector<std::vector<double>> rows;
  rows.reserve(per_seed.size());
  for (const auto& t : per_seed) {
    std::vector<double> row = {t.f_r_top, t.f_alone, t.r12};
    row.insert(row.end(), t.f_r_s.begin(), t.f_r_s.end());
    rows.push_back(std::move(row));
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  return jackknife(rows, [inv_m](const std::vector<double>& nu) {
    double res = nu[0] - inv_m * nu[1] * nu[2];
    for (std::size_t s = 3; s < nu.size(); ++s) res -= inv_m * nu[s];
    return res;
  });
}

}  // namespace rfim
