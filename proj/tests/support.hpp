#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "popweave/bayes_net.hpp"
#include "popweave/rng.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(POPWEAVE_FIXTURE_DIR) / name;
}

inline std::filesystem::path kenya_scenario() {
  return std::filesystem::path(POPWEAVE_DATA_DIR) / "kenya" / "kenya.scenario.json";
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("popweave_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    auto file = path_ / name;
    std::ofstream(file, std::ios::binary) << text;
    return file;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> values) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()),
                    static_cast<Eigen::Index>(values.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : values) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

// A: {0,1} prior [0.6, 0.4]; B | A: A=0 -> [0.7, 0.3], A=1 -> [0.2, 0.8].
inline popweave::BayesianNetwork tiny_bn() {
  return popweave::BayesianNetwork({
      {"A", {"0", "1"}, {}, rows({{0.6, 0.4}})},
      {"B", {"0", "1"}, {"A"}, rows({{0.7, 0.3}, {0.2, 0.8}})},
  });
}

// Joint by direct CPT lookup; rows indexed with the last parent fastest.
// Written independently of the library's row_of / enumerate_joint.
struct BruteJoint {
  std::vector<std::vector<int>> states;
  std::vector<double> probability;
};

inline BruteJoint brute_joint(const popweave::BayesianNetwork& bn) {
  const auto& vars = bn.variables();
  std::vector<int> cards;
  for (const auto& v : vars) cards.push_back(static_cast<int>(v.domain.size()));
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].name == name) return i;
    }
    throw std::runtime_error("unknown " + name);
  };
  BruteJoint out;
  std::vector<int> s(vars.size(), 0);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      long row = 0;
      for (const auto& parent : vars[i].parents) {
        std::size_t j = index_of(parent);
        row = row * cards[j] + s[j];
      }
      p *= vars[i].cpt(row, s[i]);
    }
    out.states.push_back(s);
    out.probability.push_back(p);
    std::size_t k = vars.size();
    while (k > 0) {
      --k;
      if (++s[k] < cards[k]) break;
      s[k] = 0;
      if (k == 0) return out;
    }
    if (vars.empty()) return out;
  }
}

inline bool agrees(const std::vector<int>& states, const std::vector<int>& evidence) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (evidence[i] >= 0 && evidence[i] != states[i]) return false;
  }
  return true;
}

inline double brute_evidence(const BruteJoint& joint, const std::vector<int>& evidence) {
  double total = 0.0;
  for (std::size_t k = 0; k < joint.states.size(); ++k) {
    if (agrees(joint.states[k], evidence)) total += joint.probability[k];
  }
  return total;
}

inline std::vector<double> brute_marginal(const BruteJoint& joint, const std::vector<int>& evidence,
                                          std::size_t target, int card) {
  std::vector<double> m(static_cast<std::size_t>(card), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < joint.states.size(); ++k) {
    if (!agrees(joint.states[k], evidence)) continue;
    m[static_cast<std::size_t>(joint.states[k][target])] += joint.probability[k];
    total += joint.probability[k];
  }
  for (auto& x : m) x /= total;
  return m;
}

// Random valid network: up to `max_vars` variables, domains of 1..max_card,
// at most two parents each, declared in shuffled order. Entries are bounded
// away from zero except for occasional exact zeros.
inline popweave::BayesianNetwork random_bn(popweave::Rng& rng, std::size_t max_vars = 8,
                                           int max_card = 3) {
  using popweave::uniform_index;
  using popweave::uniform_unit;
  const std::size_t n = 1 + uniform_index(rng, max_vars);
  std::vector<int> cards(n);
  for (auto& c : cards) c = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(max_card)));
  std::vector<std::vector<std::size_t>> parents(n);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = uniform_index(rng, std::min<std::size_t>(i, 2) + 1);
    std::vector<std::size_t> pool(i);
    for (std::size_t j = 0; j < i; ++j) pool[j] = j;
    popweave::shuffle(std::span<std::size_t>(pool), rng);
    parents[i].assign(pool.begin(), pool.begin() + static_cast<long>(k));
  }
  std::vector<popweave::Variable> vars(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& v = vars[i];
    v.name = "V" + std::to_string(i);
    for (int s = 0; s < cards[i]; ++s) v.domain.push_back("s" + std::to_string(s));
    long row_count = 1;
    for (auto p : parents[i]) {
      v.parents.push_back("V" + std::to_string(p));
      row_count *= cards[p];
    }
    v.cpt.resize(row_count, cards[i]);
    for (long r = 0; r < row_count; ++r) {
      double sum = 0.0;
      for (int c = 0; c < cards[i]; ++c) {
        double x = uniform_unit(rng) < 0.15 ? 0.0 : 0.05 + uniform_unit(rng);
        v.cpt(r, c) = x;
        sum += x;
      }
      if (sum == 0.0) {
        v.cpt(r, static_cast<long>(uniform_index(rng, static_cast<std::size_t>(cards[i])))) = 1.0;
        sum = 1.0;
      }
      v.cpt.row(r) /= sum;
    }
  }
  popweave::shuffle(std::span<popweave::Variable>(vars), rng);
  return popweave::BayesianNetwork(std::move(vars));
}

}  // namespace testing_support
