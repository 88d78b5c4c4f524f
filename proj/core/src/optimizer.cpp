#include "scratchkit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scratchkit/rng.hpp"

namespace scratchkit {

void SearchSpace::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw std::invalid_argument("search space: bound vectors empty or mismatched");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) ||
        !std::isfinite(upper[i])) {
      throw std::invalid_argument("search space: need finite lower < upper");
    }
  }
}

std::vector<double> SearchSpace::clamp(std::vector<double> v) const {
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::clamp(v[i], lower[i], upper[i]);
  }
  return v;
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::RandomSearch: return "rs";
    case Strategy::DifferentialEvolution: return "de";
    case Strategy::ParticleSwarm: return "pso";
    case Strategy::NgoLike: return "ngo";
  }
  throw std::invalid_argument("unknown strategy");
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "rs") return Strategy::RandomSearch;
  if (name == "de") return Strategy::DifferentialEvolution;
  if (name == "pso") return Strategy::ParticleSwarm;
  if (name == "ngo") return Strategy::NgoLike;
  throw std::invalid_argument("unknown optimizer strategy: " + name);
}

Optimizer::Optimizer(SearchSpace space) : space_(std::move(space)) {
  space_.validate();
}

std::vector<double> Optimizer::ask() {
  std::vector<double> candidate = space_.clamp(do_ask());
  outstanding_.push_back(candidate);
  return candidate;
}

void Optimizer::tell(const std::vector<double>& candidate, double loss) {
  if (outstanding_.empty() || outstanding_.front() != candidate) {
    throw std::logic_error("tell: candidate was not produced by ask");
  }
  outstanding_.pop_front();
  if (!has_best_ || loss < best_loss_) {
    has_best_ = true;
    best_loss_ = loss;
    best_ = candidate;
  }
  do_tell(candidate, loss);
}

namespace {

std::vector<double> uniform_point(Rng& rng, const SearchSpace& space) {
  std::vector<double> v(space.dim());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = rng.uniform(space.lower[i], space.upper[i]);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Random search with step-size scheduling. Greedy: proposals perturb the
// incumbent best on a random coordinate subset with radius alpha * range.
// The alpha breakpoints are fixed fractions of the 10000-query reference
// budget, so ask sequences do not depend on the configured budget and a
// longer run extends a shorter one.
class RandomSearchOptimizer final : public Optimizer {
 public:
  RandomSearchOptimizer(SearchSpace space, std::uint64_t seed)
      : Optimizer(std::move(space)), rng_(seed) {}

 private:
  static constexpr int kReferenceBudget = 10000;

  double alpha() const {
    static constexpr double fractions[] = {0.01, 0.05, 0.10, 0.25, 0.50, 0.75};
    int level = 0;
    for (double f : fractions) {
      if (static_cast<double>(iteration_) >= f * kReferenceBudget) ++level;
    }
    return std::max(0.5 / static_cast<double>(1 << level), 0.03125);
  }

  std::vector<double> do_ask() override {
    ++iteration_;
    if (!has_best()) {
      return uniform_point(rng_, space());
    }
    const std::size_t dim = space().dim();
    const double a = alpha();
    const std::size_t subset = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(a * static_cast<double>(dim))));
    std::vector<double> candidate = best();
    // Sample `subset` distinct coordinates by partial shuffle.
    std::vector<std::size_t> order(dim);
    for (std::size_t i = 0; i < dim; ++i) order[i] = i;
    for (std::size_t i = 0; i < subset; ++i) {
      const std::size_t j = static_cast<std::size_t>(
          rng_.uniform_int(static_cast<std::int64_t>(i),
                           static_cast<std::int64_t>(dim - 1)));
      std::swap(order[i], order[j]);
      const std::size_t coord = order[i];
      candidate[coord] += a * space().range(coord) * rng_.uniform(-1.0, 1.0);
    }
    return candidate;
  }

  void do_tell(const std::vector<double>&, double) override {}

  Rng rng_;
  long iteration_ = 0;
};

// ---------------------------------------------------------------------------
// Differential evolution, rand/1/bin, F = 0.5, CR = 0.9, population 20.
// Population members are served one per ask. The population reinitializes
// every 200 completed generations, preserving the reported best.
class DifferentialEvolutionOptimizer final : public Optimizer {
 public:
  DifferentialEvolutionOptimizer(SearchSpace space, std::uint64_t seed)
      : Optimizer(std::move(space)), rng_(seed) {
    population_.resize(kPopulation);
    fitness_.assign(kPopulation, 0.0);
  }

  static constexpr int kPopulation = 20;
  static constexpr double kWeight = 0.5;       // F
  static constexpr double kCrossover = 0.9;    // CR
  static constexpr int kRestartPeriod = 200;   // generations

 private:
  std::vector<double> do_ask() override {
    if (initializing_) {
      return uniform_point(rng_, space());
    }
    // rand/1/bin trial for the current member, built against the parent
    // generation (replacements apply at the generation boundary).
    const std::size_t dim = space().dim();
    const int i = member_;
    int r1 = pick_other(i, -1, -1);
    int r2 = pick_other(i, r1, -1);
    int r3 = pick_other(i, r1, r2);
    const std::size_t jrand =
        static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(dim) - 1));
    std::vector<double> trial = population_[i];
    for (std::size_t j = 0; j < dim; ++j) {
      const double u = rng_.uniform01();  // drawn for every coordinate
      if (u < kCrossover || j == jrand) {
        trial[j] = population_[r1][j] +
                   kWeight * (population_[r2][j] - population_[r3][j]);
      }
    }
    return trial;
  }

  void do_tell(const std::vector<double>& candidate, double loss) override {
    if (initializing_) {
      population_[member_] = candidate;
      fitness_[member_] = loss;
      ++member_;
      if (member_ == kPopulation) {
        initializing_ = false;
        member_ = 0;
      }
      return;
    }
    if (loss <= fitness_[member_]) {
      pending_.push_back({member_, candidate, loss});
    }
    ++member_;
    if (member_ == kPopulation) {
      for (const Replacement& r : pending_) {
        population_[r.index] = r.candidate;
        fitness_[r.index] = r.loss;
      }
      pending_.clear();
      member_ = 0;
      ++generation_;
      if (generation_ % kRestartPeriod == 0) {
        initializing_ = true;  // next asks repopulate uniformly
      }
    }
  }

  struct Replacement {
    int index;
    std::vector<double> candidate;
    double loss;
  };

  int pick_other(int self, int a, int b) {
    while (true) {
      const int r = static_cast<int>(rng_.uniform_int(0, kPopulation - 1));
      if (r != self && r != a && r != b) return r;
    }
  }

  Rng rng_;
  std::vector<std::vector<double>> population_;
  std::vector<double> fitness_;
  std::vector<Replacement> pending_;
  bool initializing_ = true;
  int member_ = 0;
  long generation_ = 0;
};

// ---------------------------------------------------------------------------
// Particle swarm, constriction constants in inertia form: w = 0.7298,
// c1 = c2 = 1.49618, swarm 40, velocity clamped to half the range.
class ParticleSwarmOptimizer final : public Optimizer {
 public:
  ParticleSwarmOptimizer(SearchSpace space, std::uint64_t seed)
      : Optimizer(std::move(space)), rng_(seed) {
    particles_.resize(kSwarm);
  }

  static constexpr int kSwarm = 40;
  static constexpr double kInertia = 0.7298;
  static constexpr double kCognitive = 1.49618;
  static constexpr double kSocial = 1.49618;

 private:
  struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> best_position;
    double best_loss = 0.0;
    bool evaluated = false;
  };

  std::vector<double> do_ask() override {
    Particle& p = particles_[member_];
    const std::size_t dim = space().dim();
    if (!p.evaluated && p.position.empty()) {
      p.position = uniform_point(rng_, space());
      p.velocity.resize(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        // Spread start velocities toward a random point, SPSO style.
        p.velocity[j] = 0.5 * (rng_.uniform(space().lower[j], space().upper[j]) -
                               p.position[j]);
      }
      return p.position;
    }
    for (std::size_t j = 0; j < dim; ++j) {
      const double r1 = rng_.uniform01();
      const double r2 = rng_.uniform01();
      double v = kInertia * p.velocity[j] +
                 kCognitive * r1 * (p.best_position[j] - p.position[j]) +
                 kSocial * r2 * (gbest_position_[j] - p.position[j]);
      const double vmax = 0.5 * space().range(j);
      v = std::clamp(v, -vmax, vmax);
      p.velocity[j] = v;
      p.position[j] = std::clamp(p.position[j] + v, space().lower[j],
                                 space().upper[j]);
    }
    return p.position;
  }

  void do_tell(const std::vector<double>& candidate, double loss) override {
    Particle& p = particles_[member_];
    p.position = candidate;
    if (!p.evaluated || loss < p.best_loss) {
      p.evaluated = true;
      p.best_loss = loss;
      p.best_position = candidate;
    }
    if (gbest_position_.empty() || loss < gbest_loss_) {
      gbest_loss_ = loss;
      gbest_position_ = candidate;
    }
    member_ = (member_ + 1) % kSwarm;
  }

  Rng rng_;
  std::vector<Particle> particles_;
  std::vector<double> gbest_position_;
  double gbest_loss_ = 0.0;
  int member_ = 0;
};

// ---------------------------------------------------------------------------
// (mu + lambda) evolution strategy with per-coordinate mutation scale
// adapted by the 1/5 success rule: mu = 8 parents, lambda = 16 offspring per
// generation, sigma expanded when more than a fifth of the offspring beat
// their parent and contracted otherwise. Stands in for the external
// neuro-genetic optimizer, whose internals are unpublished.
class NgoLikeOptimizer final : public Optimizer {
 public:
  NgoLikeOptimizer(SearchSpace space, std::uint64_t seed)
      : Optimizer(std::move(space)), rng_(seed) {
    sigma_.resize(this->space().dim());
    for (std::size_t j = 0; j < sigma_.size(); ++j) {
      sigma_[j] = kInitialScale * this->space().range(j);
    }
  }

  static constexpr int kParents = 8;     // mu
  static constexpr int kOffspring = 16;  // lambda
  static constexpr double kInitialScale = 0.2;
  static constexpr double kAdapt = 1.22;

 private:
  struct Member {
    std::vector<double> position;
    double loss = 0.0;
  };

  std::vector<double> do_ask() override {
    if (parents_.empty()) {
      return uniform_point(rng_, space());  // seeding generation
    }
    const std::size_t dim = space().dim();
    const int parent_index =
        static_cast<int>(rng_.uniform_int(0, kParents - 1));
    pending_parent_loss_ = parents_[parent_index].loss;
    std::vector<double> child = parents_[parent_index].position;
    for (std::size_t j = 0; j < dim; ++j) {
      child[j] += sigma_[j] * rng_.normal();
    }
    return child;
  }

  void do_tell(const std::vector<double>& candidate, double loss) override {
    generation_.push_back({candidate, loss});
    if (!parents_.empty() && loss < pending_parent_loss_) {
      ++generation_successes_;
    }
    if (static_cast<int>(generation_.size()) < kOffspring) return;

    if (parents_.empty()) {
      select_parents(generation_);
    } else {
      const double ratio = static_cast<double>(generation_successes_) /
                           static_cast<double>(kOffspring);
      const double factor = ratio > 0.2 ? kAdapt : (ratio < 0.2 ? 1.0 / kAdapt : 1.0);
      for (std::size_t j = 0; j < sigma_.size(); ++j) {
        const double range = space().range(j);
        sigma_[j] = std::clamp(sigma_[j] * factor, 1e-12 * range, 0.5 * range);
      }
      std::vector<Member> pool = parents_;
      pool.insert(pool.end(), generation_.begin(), generation_.end());
      select_parents(pool);
    }
    generation_.clear();
    generation_successes_ = 0;
  }

  void select_parents(std::vector<Member> pool) {
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Member& a, const Member& b) { return a.loss < b.loss; });
    pool.resize(std::min<std::size_t>(pool.size(), kParents));
    parents_ = std::move(pool);
  }

  Rng rng_;
  std::vector<double> sigma_;
  std::vector<Member> parents_;
  std::vector<Member> generation_;
  int generation_successes_ = 0;
  double pending_parent_loss_ = 0.0;
};

}  // namespace

std::unique_ptr<Optimizer> make_optimizer(Strategy strategy,
                                          const SearchSpace& space,
                                          std::uint64_t seed) {
  switch (strategy) {
    case Strategy::RandomSearch:
      return std::make_unique<RandomSearchOptimizer>(space, seed);
    case Strategy::DifferentialEvolution:
      return std::make_unique<DifferentialEvolutionOptimizer>(space, seed);
    case Strategy::ParticleSwarm:
      return std::make_unique<ParticleSwarmOptimizer>(space, seed);
    case Strategy::NgoLike:
      return std::make_unique<NgoLikeOptimizer>(space, seed);
  }
  throw std::invalid_argument("unknown strategy");
}

MinimizeResult minimize(Strategy strategy, const SearchSpace& space,
                        const std::function<double(const std::vector<double>&)>& objective,
                        int budget, std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("minimize: budget must be >= 1");
  auto optimizer = make_optimizer(strategy, space, seed);
  MinimizeResult result;
  for (int i = 0; i < budget; ++i) {
    const std::vector<double> candidate = optimizer->ask();
    double loss;
    try {
      loss = objective(candidate);
    } catch (const std::exception& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      break;
    }
    optimizer->tell(candidate, loss);
    ++result.evals_used;
  }
  if (optimizer->has_best()) {
    result.best = optimizer->best();
    result.best_loss = optimizer->best_loss();
  }
  return result;
}

}  // namespace scratchkit
