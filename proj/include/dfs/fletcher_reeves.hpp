#pragma once

// Fletcher-Reeves nonlinear conjugate gradients with an Armijo line search.
//
// Directions: d_{k+1} = -g_{k+1} + beta d_k, beta = |g_{k+1}|^2 / |g_k|^2.
// The direction is reset to steepest descent every `restart_every` iterations
// and whenever it fails to be a descent direction. The line search tries the
// minimizer of the quadratic through phi(0), phi'(0), phi(trial) and falls back
// to halving the trial step until phi(a) <= phi(0) + c1 a phi'(0).

#include <algorithm>
#include <cmath>
#include <limits>

#include "dfs/core.hpp"

namespace dfs {

enum class FrStatus { Converged, MaxIterations, Stalled, NonFinite };

struct FrOptions {
  double tau = 1e-6;          // stop when |grad|^2 < tau
  long max_iter = 100000;
  long restart_every = 0;     // 0: use the dimension
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct FrResult {
  RVector x;
  double value = 0.0;
  double grad_norm_sq = 0.0;
  long iterations = 0;
  FrStatus status = FrStatus::MaxIterations;
};

// value(x) -> double; value_and_gradient(x, g) -> double, writes g.
template <class Value, class ValueAndGradient>
FrResult fletcher_reeves(Value&& value, ValueAndGradient&& value_and_gradient, RVector x0,
                         const FrOptions& opt) {
  FrResult res;
  res.x = std::move(x0);
  const Eigen::Index n = res.x.size();
  const long restart = opt.restart_every > 0 ? opt.restart_every : static_cast<long>(n);

  RVector g(n), g_new(n), d(n), trial(n);
  double f = value_and_gradient(res.x, g);
  if (!std::isfinite(f)) {
    res.value = f;
    res.status = FrStatus::NonFinite;
    return res;
  }
  double gg = g.squaredNorm();
  d = -g;
  double step = 1.0 / std::max(1.0, std::sqrt(gg));
  double prev_slope = 0.0;
  long since_restart = 0;

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    if (gg < opt.tau) {
      res.status = FrStatus::Converged;
      break;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      slope = -gg;
      since_restart = 0;
    }
    if (res.iterations > 0 && prev_slope < 0.0) {
      step = std::min(step * prev_slope / slope, 1e6 * step);
    }

    auto phi = [&](double a) {
      trial = res.x + a * d;
      return value(trial);
    };
    auto armijo = [&](double a, double fa) {
      return std::isfinite(fa) && fa <= f + opt.armijo_c1 * a * slope;
    };

    double accepted = 0.0;
    const double f_t = phi(step);
    if (!std::isfinite(f_t) && std::isnan(f_t)) {
      res.status = FrStatus::NonFinite;
      break;
    }
    const double curvature = (f_t - f - slope * step) / (step * step);
    if (std::isfinite(f_t) && curvature > 0.0) {
      const double a_q = std::clamp(-slope / (2.0 * curvature), 1e-3 * step, 10.0 * step);
      const double f_q = phi(a_q);
      if (armijo(a_q, f_q) && (!armijo(step, f_t) || f_q <= f_t)) {
        accepted = a_q;
      }
    }
    if (accepted == 0.0 && armijo(step, f_t)) {
      accepted = step;
    }
    if (accepted == 0.0) {
      double a = step;
      for (int k = 0; k < opt.max_backtracks; ++k) {
        a *= opt.backtrack;
        const double fa = phi(a);
        if (armijo(a, fa)) {
          accepted = a;
          break;
        }
      }
    }
    if (accepted == 0.0) {
      if (since_restart == 0) {
        res.status = FrStatus::Stalled;
        break;
      }
      d = -g;  // retry from steepest descent
      since_restart = 0;
      prev_slope = 0.0;
      continue;
    }

    res.x += accepted * d;
    const double f_new = value_and_gradient(res.x, g_new);
    if (!std::isfinite(f_new)) {
      res.status = FrStatus::NonFinite;
      f = f_new;
      break;
    }
    f = f_new;
    const double gg_new = g_new.squaredNorm();
    const double beta = gg_new / gg;
    g.swap(g_new);
    gg = gg_new;
    step = accepted;
    prev_slope = slope;
    if (++since_restart >= restart) {
      d = -g;
      since_restart = 0;
    } else {
      d = -g + beta * d;
    }
  }
  if (res.iterations >= opt.max_iter && gg < opt.tau) res.status = FrStatus::Converged;
  res.value = f;
  res.grad_norm_sq = gg;
  return res;
}

}  // namespace dfs
