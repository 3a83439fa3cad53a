#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qrdft::ad {

// Minimal reverse-mode tape for scalar programs. Every node has at most two
// parents; constants never touch the tape.

struct Node {
  std::int32_t a = -1;
  std::int32_t b = -1;
  double da = 0.0;
  double db = 0.0;
};

class Tape {
 public:
  std::int32_t push(std::int32_t a, double da, std::int32_t b, double db) {
    nodes_.push_back({a, b, da, db});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::int32_t leaf() { return push(-1, 0.0, -1, 0.0); }
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

  /// Adjoints of every node for a unit seed on `output`.
  void backward(std::int32_t output, std::vector<double>& adjoint) const {
    adjoint.assign(nodes_.size(), 0.0);
    if (output < 0) return;
    adjoint[output] = 1.0;
    for (std::int32_t i = output; i >= 0; --i) {
      const double g = adjoint[i];
      if (g == 0.0) continue;
      const Node& n = nodes_[i];
      if (n.a >= 0) adjoint[n.a] += g * n.da;
      if (n.b >= 0) adjoint[n.b] += g * n.db;
    }
  }

  static Tape*& active() {
    thread_local Tape* tape = nullptr;
    return tape;
  }

 private:
  std::vector<Node> nodes_;
};

/// Installs a tape for the current thread for the lifetime of the guard.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape) : previous_(Tape::active()) { Tape::active() = &tape; }
  ~TapeScope() { Tape::active() = previous_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

class Var {
 public:
  Var() = default;
  Var(double v) : value_(v) {}  // NOLINT: implicit constants are intended

  static Var make_leaf(double v) {
    Var x(v);
    x.id_ = tape().leaf();
    return x;
  }

  double value() const { return value_; }
  std::int32_t id() const { return id_; }
  bool is_constant() const { return id_ < 0; }

  static Var unary(const Var& x, double value, double dx) {
    Var r(value);
    if (!x.is_constant()) r.id_ = tape().push(x.id_, dx, -1, 0.0);
    return r;
  }
  static Var binary(const Var& x, double dx, const Var& y, double dy, double value) {
    Var r(value);
    if (!x.is_constant() || !y.is_constant()) r.id_ = tape().push(x.id_, dx, y.id_, dy);
    return r;
  }

 private:
  static Tape& tape() {
    Tape* t = Tape::active();
    if (!t) throw std::logic_error("ad::Var used without an active tape");
    return *t;
  }

  double value_ = 0.0;
  std::int32_t id_ = -1;
};

inline Var operator+(const Var& x, const Var& y) { return Var::binary(x, 1.0, y, 1.0, x.value() + y.value()); }
inline Var operator-(const Var& x, const Var& y) { return Var::binary(x, 1.0, y, -1.0, x.value() - y.value()); }
inline Var operator*(const Var& x, const Var& y) {
  return Var::binary(x, y.value(), y, x.value(), x.value() * y.value());
}
inline Var operator/(const Var& x, const Var& y) {
  const double inv = 1.0 / y.value();
  const double q = x.value() * inv;
  return Var::binary(x, inv, y, -q * inv, q);
}
inline Var operator-(const Var& x) { return Var::unary(x, -x.value(), -1.0); }

inline Var operator+(const Var& x, double c) { return Var::unary(x, x.value() + c, 1.0); }
inline Var operator+(double c, const Var& x) { return Var::unary(x, c + x.value(), 1.0); }
inline Var operator-(const Var& x, double c) { return Var::unary(x, x.value() - c, 1.0); }
inline Var operator-(double c, const Var& x) { return Var::unary(x, c - x.value(), -1.0); }
inline Var operator*(const Var& x, double c) { return Var::unary(x, x.value() * c, c); }
inline Var operator*(double c, const Var& x) { return Var::unary(x, c * x.value(), c); }
inline Var operator/(const Var& x, double c) { return Var::unary(x, x.value() / c, 1.0 / c); }
inline Var operator/(double c, const Var& x) {
  const double q = c / x.value();
  return Var::unary(x, q, -q / x.value());
}

inline bool operator<(const Var& x, double c) { return x.value() < c; }
inline bool operator>(const Var& x, double c) { return x.value() > c; }

inline Var exp(const Var& x) {
  const double e = std::exp(x.value());
  return Var::unary(x, e, e);
}
inline Var sqrt(const Var& x) {
  const double s = std::sqrt(x.value());
  return Var::unary(x, s, 0.5 / s);
}
inline Var tanh(const Var& x) {
  const double t = std::tanh(x.value());
  return Var::unary(x, t, 1.0 - t * t);
}

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

}  // namespace qrdft::ad
