#pragma once

#include "symcap/core.hpp"
#include "symcap/smooth_step.hpp"

#include <random>

namespace symcap {

/// Unitary U with U R^n = {w : w_{n+1-j} = conj(w_j)}.
inline CMat build_unitary(int n) {
  if (n < 2) throw std::invalid_argument("build_unitary needs n >= 2");
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  CMat u = CMat::Zero(n, n);
  for (int j = 0; j < n / 2; ++j) {
    const int k = n - 1 - j;
    u(j, j) = s;
    u(k, j) = s;
    u(j, k) = i * s;
    u(k, k) = -i * s;
  }
  if (n % 2 == 1) u(n / 2, n / 2) = 1.0;
  return u;
}

/// The set scale * rotation * {e^{i phi} q : q in S^{n-1}}.
struct APLagrangian {
  int n = 2;
  double scale = 1.0;
  CMat rotation;

  static APLagrangian plain(int n) {
    if (n < 2) throw std::invalid_argument("the Lagrangian needs n >= 2");
    return {n, 1.0, CMat::Identity(n, n)};
  }
  /// sqrt(2) U L, the variant that sits in the polydisc.
  static APLagrangian rotated(int n) { return {n, std::sqrt(2.0), build_unitary(n)}; }

  bool is_unitary(double tol = 1e-12) const {
    return (rotation.adjoint() * rotation - CMat::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
  }

  /// rotation^{-1}(x / scale) as a complex vector.
  CVec to_model_frame(const PhasePoint& x) const {
    if (x.n() != n) throw DimensionError("point and Lagrangian dimensions differ");
    return rotation.adjoint() * x.complex() / scale;
  }
  PhasePoint from_model_frame(const CVec& w) const {
    return PhasePoint::from_complex(scale * (rotation * w));
  }
};

inline PhasePoint sample(const APLagrangian& model, double phi, const Vec& q) {
  if (q.size() != model.n) throw DimensionError("q must have n entries");
  if (std::abs(q.norm() - 1.0) > 1e-10) throw std::invalid_argument("q must be a unit vector");
  return model.from_model_frame(std::exp(cplx(0.0, phi)) * q.cast<cplx>());
}

/// |z|^2 = 1 and |sum z_j^2| = 1 in the model frame.
inline bool membership(const APLagrangian& model, const PhasePoint& x, double tol = 1e-9) {
  const CVec w = model.to_model_frame(x);
  const cplx sq = (w.array() * w.array()).sum();
  return std::abs(w.squaredNorm() - 1.0) <= tol && std::abs(std::abs(sq) - 1.0) <= tol;
}

/// Moves complex slot k+1 of n = 2k+1 to the last position.
inline PhasePoint permute_psi(const PhasePoint& x) {
  const int n = x.n();
  if (n % 2 == 0) throw std::invalid_argument("permute_psi needs odd n");
  const CVec w = x.complex();
  CVec out(n);
  const int mid = n / 2;
  int o = 0;
  for (int j = 0; j < n; ++j)
    if (j != mid) out[o++] = w[j];
  out[n - 1] = w[mid];
  return PhasePoint::from_complex(out);
}

inline PhasePoint permute_psi_inverse(const PhasePoint& x) {
  const int n = x.n();
  if (n % 2 == 0) throw std::invalid_argument("permute_psi needs odd n");
  const CVec w = x.complex();
  CVec out(n);
  const int mid = n / 2;
  int o = 0;
  for (int j = 0; j < n; ++j)
    if (j != mid) out[j] = w[o++];
  out[mid] = w[n - 1];
  return PhasePoint::from_complex(out);
}

/// Angle and sphere paths of a loop on the model, with derivatives.
struct LiftedPath {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<Vec(double)> q;
  std::function<Vec(double)> dq;
};

/// t -> scale * rotation * e^{i phi(t)} q(t), with the analytic tangent.
inline Loop loop_from_path(const APLagrangian& model, LiftedPath path, int samples = 2048) {
  auto eval = [model, path](double t) {
    return model.from_model_frame(std::exp(cplx(0.0, path.phi(t))) * path.q(t).cast<cplx>());
  };
  auto deriv = [model, path](double t) {
    const cplx e = std::exp(cplx(0.0, path.phi(t)));
    const CVec w = e * (cplx(0.0, path.dphi(t)) * path.q(t).cast<cplx>() + path.dq(t).cast<cplx>());
    return PhasePoint::from_complex(model.scale * (model.rotation * w)).coords();
  };
  return Loop(model.n, eval, deriv, samples);
}

enum class Generator { half, fiber, full };

/// Loop on the model based at sample(0, e_1). `half` winds once, `fiber`
/// is a great circle at phi = 0, `full` is the phase circle.
inline Loop generator_loop(const APLagrangian& model, Generator kind, int samples = 2048,
                           double delta = 0.1) {
  const int n = model.n;
  const Vec e1 = Vec::Unit(n, 0), e2 = Vec::Unit(n, 1);
  LiftedPath path;
  switch (kind) {
    case Generator::half: {
      const SmoothStep step(delta);
      path.phi = [](double t) { return pi * t; };
      path.dphi = [](double) { return pi; };
      path.q = [=](double t) {
        const double a = pi * step(t);
        return Vec(std::cos(a) * e1 + std::sin(a) * e2);
      };
      path.dq = [=](double t) {
        const double a = pi * step(t), da = pi * step.derivative(t);
        return Vec(da * (-std::sin(a) * e1 + std::cos(a) * e2));
      };
      break;
    }
    case Generator::fiber:
      path.phi = [](double) { return 0.0; };
      path.dphi = [](double) { return 0.0; };
      path.q = [=](double t) { return Vec(std::cos(2 * pi * t) * e1 + std::sin(2 * pi * t) * e2); };
      path.dq = [=](double t) {
        return Vec(2 * pi * (-std::sin(2 * pi * t) * e1 + std::cos(2 * pi * t) * e2));
      };
      break;
    case Generator::full:
      path.phi = [](double t) { return 2 * pi * t; };
      path.dphi = [](double) { return 2 * pi; };
      path.q = [=](double) { return e1; };
      path.dq = [=](double) { return Vec(Vec::Zero(n)); };
      break;
  }
  return loop_from_path(model, path, samples);
}

/// All three generator loops: half, fiber, full.
inline std::vector<Loop> generator_loops(const APLagrangian& model, int samples = 2048) {
  if (model.n < 2) throw std::invalid_argument("generator loops need n >= 2");
  return {generator_loop(model, Generator::half, samples), generator_loop(model, Generator::fiber, samples),
          generator_loop(model, Generator::full, samples)};
}

/// Loops whose cones are glued in to build X.
inline std::vector<Loop> cone_generators(const APLagrangian& model, int samples = 2048) {
  std::vector<Loop> g{generator_loop(model, Generator::half, samples)};
  if (model.n == 2) g.push_back(generator_loop(model, Generator::fiber, samples));
  return g;
}

struct LoopLift {
  std::vector<double> grid_phi;
  std::vector<Vec> grid_q;
  int winding = 0;
  std::function<double(double)> phi;
  std::function<Vec(double)> q;

  double delta_phi() const { return grid_phi.back() - grid_phi.front(); }
};

struct LiftError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Continuous (phi, q) with x(t) = scale * rotation * e^{i phi} q, phi tracked
/// through the phase of sum z_j^2.
inline LoopLift lift(const APLagrangian& model, const Loop& x) {
  const int m = x.size();
  LoopLift out;
  out.grid_phi.resize(m + 1);
  out.grid_q.resize(m + 1);
  double prev_arg = 0.0;
  for (int i = 0; i <= m; ++i) {
    const PhasePoint xi = x.sample(i);
    if (!membership(model, xi, 1e-6))
      throw LiftError("sample " + std::to_string(i) + " is off the Lagrangian");
    const CVec w = model.to_model_frame(xi);
    double a = std::arg((w.array() * w.array()).sum());
    if (i > 0) {
      double d = std::remainder(a - prev_arg, 2 * pi);
      if (std::abs(d) >= 0.9 * pi) throw LiftError("grid too coarse to unwrap the phase");
      a = prev_arg + d;
    }
    prev_arg = a;
    out.grid_phi[i] = 0.5 * a;
    out.grid_q[i] = (std::exp(cplx(0.0, -out.grid_phi[i])) * w).real();
    if (i > 0 && (out.grid_q[i] - out.grid_q[i - 1]).norm() > 1.0)
      throw LiftError("grid too coarse to unwrap the phase");
  }
  const double k = out.delta_phi() / pi;
  out.winding = static_cast<int>(std::lround(k));
  if (std::abs(k - out.winding) > 1e-6) throw LiftError("lift does not close up");

  const std::vector<double> grid = out.grid_phi;
  auto phi_at = [model, x, grid, m](double t) {
    const double u = std::clamp(t, 0.0, 1.0) * m;
    const int i = std::min(m - 1, static_cast<int>(u));
    const double guess = grid[i] + (u - i) * (grid[i + 1] - grid[i]);
    const CVec w = model.to_model_frame(x(t));
    const double half = 0.5 * std::arg((w.array() * w.array()).sum());
    return half + pi * std::round((guess - half) / pi);
  };
  out.phi = phi_at;
  out.q = [model, x, phi_at](double t) {
    const CVec w = model.to_model_frame(x(t));
    return Vec((std::exp(cplx(0.0, -phi_at(t))) * w).real());
  };
  return out;
}

/// Random smooth loop on the model with phi(1) - phi(0) = k pi.
template <class Rng>
Loop random_lifted_loop(const APLagrangian& model, int k, Rng& rng, int samples = 2048) {
  const int n = model.n;
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  Mat basis(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) basis(r, c) = gauss(rng);
  const Mat orth = Eigen::HouseholderQR<Mat>(basis).householderQ();
  const Vec a = orth.col(0), b = orth.col(1);

  const int parity = ((k % 2) + 2) % 2;
  const int extra = 2 * static_cast<int>(std::floor(1.5 * (unif(rng) + 1.0)));
  const double freq = pi * (parity + extra);
  constexpr int modes = 3;
  std::vector<double> amp_phi(modes);
  std::vector<Vec> amp_q(modes);
  for (int m = 0; m < modes; ++m) {
    amp_phi[m] = 0.4 * unif(rng);
    amp_q[m] = Vec(n);
    for (int r = 0; r < n; ++r) amp_q[m][r] = 0.1 * unif(rng);
  }
  const double phi0 = pi * unif(rng);

  LiftedPath path;
  path.phi = [=](double t) {
    double s = phi0 + k * pi * t;
    for (int m = 0; m < modes; ++m) s += amp_phi[m] * std::sin(2 * pi * (m + 1) * t);
    return s;
  };
  path.dphi = [=](double t) {
    double s = k * pi;
    for (int m = 0; m < modes; ++m) s += amp_phi[m] * 2 * pi * (m + 1) * std::cos(2 * pi * (m + 1) * t);
    return s;
  };
  auto raw = [=](double t) {
    Vec v = std::cos(freq * t) * a + std::sin(freq * t) * b;
    for (int m = 0; m < modes; ++m) v += amp_q[m] * std::sin(pi * (parity + 2 * (m + 1)) * t);
    return v;
  };
  auto draw = [=](double t) {
    Vec v = freq * (-std::sin(freq * t) * a + std::cos(freq * t) * b);
    for (int m = 0; m < modes; ++m) {
      const double w = pi * (parity + 2 * (m + 1));
      v += amp_q[m] * w * std::cos(w * t);
    }
    return v;
  };
  path.q = [=](double t) { return Vec(raw(t).normalized()); };
  path.dq = [=](double t) {
    const Vec v = raw(t), dv = draw(t);
    const double r = v.norm();
    const Vec q = v / r;
    return Vec((dv - q * q.dot(dv)) / r);
  };
  return loop_from_path(model, path, samples);
}

}  // namespace symcap
