// Straight-line reference engine and random generators for the tests.
// Written against the model equations, not against the engine sources: dense
// loops, no helpers shared with src/. Only the random stream layout is common,
// since both sides must consume the same uniforms in the same order.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ppsim/types.hpp"

namespace oracle {

using ppsim::Matrix;
using ppsim::Vector;

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Uniforms {
  explicit Uniforms(std::uint64_t seed) : eng(splitmix(seed)) {}
  double next() { return static_cast<double>(eng() >> 11) / 9007199254740992.0; }
  std::mt19937_64 eng;
};

struct Config {
  Vector I0, T;
  Matrix A;  // A(j, i): influence of j on i
  double B = 1.0, gamma = 0.1;
  std::size_t rol = 0, coc = 1, max_periods = 200;
};

struct Trace {
  double L = 0.0;
  std::size_t ell = 0;
  bool converged = false;
  std::vector<Vector> P, C, I;
  std::vector<std::vector<int>> theta;
};

inline double fmap(double x) { return x / std::exp(1.0 - x); }

inline int sgn(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// strict: allocation is the profile in every period; otherwise only at t = 0.
// An empty profile means "draw a Dirichlet(1) profile from the run's stream".
inline Trace simulate(const Config& c, bool strict, Vector profile, std::uint64_t seed, double tol = 1e-4) {
  const std::size_t n = c.I0.size();
  Trace tr;
  bool done = true;
  for (std::size_t i = 0; i < n; ++i) done = done && c.I0[i] >= c.T[i] - tol;
  if (done) {
    tr.converged = true;
    return tr;
  }

  Uniforms u(seed);
  if (profile.empty()) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      profile.push_back(-std::log1p(-u.next()));
      s += profile.back();
    }
    for (auto& x : profile) x = c.B * x / s;
  }

  std::vector<std::size_t> K(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (c.A(i, j) != 0) K[i]++;

  Vector I = c.I0;
  Vector C2(n), C1(n), F2(n), F1(n);
  std::vector<int> th(n, 0);
  for (int lag = 0; lag < 2; ++lag) {
    Vector C(n);
    for (std::size_t i = 0; i < n; ++i) C[i] = u.next() * profile[i];
    double fc = fmap(I[c.coc]), fr = fmap(I[c.rol]);
    double D = 0;
    for (std::size_t i = 0; i < n; ++i) D += profile[i] - C[i];
    Vector F(n);
    for (std::size_t i = 0; i < n; ++i) {
      double pr = D == 0 ? 0.0 : fc * (profile[i] - C[i]) / D;
      th[i] = u.next() < pr ? 1 : 0;
      F[i] = (I[i] + profile[i] - C[i]) * (1 - th[i] * fr);
    }
    if (lag == 0) {
      C2 = C;
      F2 = F;
    } else {
      C1 = C;
      F1 = F;
    }
  }

  Vector per_issue(n, 0.0);
  std::size_t t = 0;
  while (t < c.max_periods) {
    double fr = fmap(I[c.rol]), fc = fmap(I[c.coc]);
    Vector P(n);
    if (strict || t == 0) {
      P = profile;
    } else {
      Vector q(n);
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double gap = c.T[i] - I[i];
        if (gap < 0) gap = 0;
        q[i] = gap * (K[i] + 1) * (1 - th[i] * fr);
        s += q[i];
      }
      for (std::size_t i = 0; i < n; ++i) P[i] = s > 0 ? c.B * q[i] / s : c.B / n;
    }
    Vector C(n);
    for (std::size_t i = 0; i < n; ++i) {
      double dF = F1[i] - F2[i], dC = C1[i] - C2[i];
      double raw = C1[i] + sgn(dF) * sgn(dC) * std::fabs(dF) * (C1[i] + C2[i]) / 2;
      C[i] = std::min(P[i], std::max(0.0, raw));
    }
    double D = 0;
    for (std::size_t i = 0; i < n; ++i) D += P[i] - C[i];
    std::vector<int> th_new(n);
    Vector F(n);
    for (std::size_t i = 0; i < n; ++i) {
      double pr = D == 0 ? 0.0 : fc * (P[i] - C[i]) / D;
      th_new[i] = u.next() < pr ? 1 : 0;
      F[i] = (I[i] + P[i] - C[i]) * (1 - th_new[i] * fr);
    }
    Vector In(n);
    for (std::size_t i = 0; i < n; ++i) {
      double spill = 0;
      for (std::size_t j = 0; j < n; ++j) spill += C[j] * c.A(j, i);
      double gap = c.T[i] - I[i];
      if (gap < 0) gap = 0;
      In[i] = std::clamp(I[i] + c.gamma * gap * (C[i] + spill), 0.0, 1.0);
    }
    for (std::size_t i = 0; i < n; ++i) per_issue[i] += (P[i] - C[i]) / c.B;
    tr.P.push_back(P);
    tr.C.push_back(C);
    tr.I.push_back(In);
    tr.theta.push_back(th_new);
    C2 = C1;
    C1 = C;
    F2 = F1;
    F1 = F;
    I = In;
    th = th_new;
    ++t;
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) all = all && I[i] >= c.T[i] - tol;
    if (all) {
      tr.converged = true;
      break;
    }
  }
  for (double d : per_issue) tr.L += d;
  tr.ell = t;
  return tr;
}

// Random configuration generator shared by the property tests.
struct ConfigGen {
  std::mt19937_64 eng;
  explicit ConfigGen(std::uint64_t seed) : eng(seed) {}

  double unif(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(eng); }

  Config config(std::size_t n, std::size_t max_periods) {
    Config c;
    c.I0.resize(n);
    c.T.resize(n);
    c.A = Matrix::square(n);
    for (std::size_t i = 0; i < n; ++i) {
      c.I0[i] = unif(0.0, 0.8);
      c.T[i] = std::clamp(c.I0[i] + unif(-0.05, 0.3), 0.0, 1.0);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && unif(0, 1) < 0.4) c.A(i, j) = unif(0.0, 0.8);
    c.B = unif(0.05, 1.5);
    c.gamma = unif(0.05, 5.0);
    c.rol = pick(0, n - 1);
    c.coc = pick(0, n - 1);
    c.max_periods = max_periods;
    return c;
  }

  Vector profile(std::size_t n, double B) {
    Vector p(n);
    double s = 0;
    for (auto& x : p) s += (x = unif(0.01, 1.0));
    for (auto& x : p) x = B * x / s;
    return p;
  }
};

inline ppsim::CountryConfig to_engine(const Config& c) {
  ppsim::ConfigData d;
  d.initial_indicators = c.I0;
  d.targets = c.T;
  d.adjacency = c.A;
  d.budget = c.B;
  d.gamma = c.gamma;
  d.rule_of_law_idx = c.rol;
  d.control_of_corruption_idx = c.coc;
  d.max_periods = c.max_periods;
  return ppsim::CountryConfig::create(d);
}

}  // namespace oracle
