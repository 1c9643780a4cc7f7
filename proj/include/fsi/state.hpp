#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "fsi/types.hpp"

namespace fsi {

/// One time level of the discrete unknowns.
struct State {
  Real t = 0;
  Vector u;       // fluid velocity
  Vector p;       // pressure (P1 part then P0 part)
  Vector dX;      // solid velocity
  Vector X;       // solid position
  Vector lambda;  // multiplier

  bool all_finite() const
  {
    return u.allFinite() && p.allFinite() && dX.allFinite() && X.allFinite() && lambda.allFinite();
  }
};

/// Levels n and n-1.
class History {
 public:
  History() = default;
  explicit History(State initial) : current_(std::move(initial)) {}

  void push(State s)
  {
    previous_ = std::move(current_);
    current_ = std::move(s);
  }
  const State& current() const { return current_; }
  const State& previous() const
  {
    if (!previous_) throw std::logic_error("history holds a single level");
    return *previous_;
  }
  bool has_previous() const { return previous_.has_value(); }
  int levels() const { return previous_ ? 2 : 1; }

 private:
  State current_;
  std::optional<State> previous_;
};

enum class Scheme { be, bdf2, cnm, cnt };
enum class Startup { cn_step, be_step };

struct NonlinearMode {
  enum class Kind { picard, semi_implicit };
  Kind kind = Kind::picard;
  Real tolerance = 1e-6;
  int max_iterations = 50;

  static NonlinearMode picard(Real tol = 1e-6, int max_it = 50) { return {Kind::picard, tol, max_it}; }
  static NonlinearMode semi_implicit() { return {Kind::semi_implicit, 1e-6, 1}; }
  void validate() const
  {
    if (!(tolerance > 0)) throw std::invalid_argument("Picard tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("Picard needs at least one iteration");
  }
};

struct SchemeConfig {
  Scheme scheme = Scheme::bdf2;
  Real dt = 0.05;
  Real T = 0.2;
  NonlinearMode mode;
  Startup startup = Startup::be_step;
  bool zero_initial_multiplier = false;  // CNT only: start from lambda = 0 instead of the elastic balance

  /// Number of steps; throws unless T/dt is an integer within rounding.
  int steps() const;
};

std::string to_string(Scheme s);
std::string to_string(NonlinearMode::Kind k);
std::string to_string(Startup s);
Scheme scheme_from_string(const std::string& s);
NonlinearMode::Kind mode_from_string(const std::string& s);
Startup startup_from_string(const std::string& s);

}  // namespace fsi
