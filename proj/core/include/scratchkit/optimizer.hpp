#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace scratchkit {

// Box-bounded continuous search domain.
struct SearchSpace {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  double range(std::size_t i) const { return upper[i] - lower[i]; }

  // Throws std::invalid_argument unless lower[i] < upper[i] for all i.
  void validate() const;

  std::vector<double> clamp(std::vector<double> v) const;
};

enum class Strategy {
  RandomSearch,
  DifferentialEvolution,
  ParticleSwarm,
  NgoLike,
};

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Gradient-free minimizer behind an ask/tell interface. Candidates are
// produced one at a time (population strategies expose members singly, so
// one ask corresponds to one model query). Every asked candidate lies inside
// the search box. Asks and tells alternate per candidate: tell() accepts the
// oldest asked-but-untold vector and throws std::logic_error for anything
// else. A candidate may be abandoned (asked but never told), e.g. when the
// attack loop stops on success.
//
// One instance is single-owner; ask/tell calls on it are sequential.
// Distinct instances may run on distinct threads.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  std::vector<double> ask();
  void tell(const std::vector<double>& candidate, double loss);

  bool has_best() const { return has_best_; }
  double best_loss() const { return best_loss_; }
  const std::vector<double>& best() const { return best_; }

  const SearchSpace& space() const { return space_; }

 protected:
  explicit Optimizer(SearchSpace space);

  virtual std::vector<double> do_ask() = 0;
  virtual void do_tell(const std::vector<double>& candidate, double loss) = 0;

 private:
  SearchSpace space_;
  std::deque<std::vector<double>> outstanding_;
  std::vector<double> best_;
  double best_loss_ = 0.0;
  bool has_best_ = false;
};

std::unique_ptr<Optimizer> make_optimizer(Strategy strategy,
                                          const SearchSpace& space,
                                          std::uint64_t seed);

struct MinimizeResult {
  std::vector<double> best;
  double best_loss = 0.0;
  int evals_used = 0;
  // True when the objective threw before the budget was spent; best/evals
  // then describe the completed prefix.
  bool aborted = false;
  std::string abort_reason;
};

// Convenience loop over ask/tell. Runs exactly `budget` evaluations unless
// the objective throws.
MinimizeResult minimize(Strategy strategy, const SearchSpace& space,
                        const std::function<double(const std::vector<double>&)>& objective,
                        int budget, std::uint64_t seed);

}  // namespace scratchkit
