#include "mareq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "mareq/objective.hpp"

namespace mareq {

namespace {

struct ArmijoOut {
  double t = 1.0;
  double df = 0;
  bool ok = false;
};

// Exact smallest-power search for a quadratic ray model
// delta(t) = slope t + quad t^2, tested in slope form (cancellation-free).
ArmijoOut armijo_quadratic(double slope, double quad, double phi,
                           const SolverConfig& cfg) {
  const double target = -cfg.beta * phi;
  auto accepts = [&](double t) { return slope + quad * t <= target; };
  if (accepts(1.0)) return {1.0, slope + quad, true};
  double bound = (target - slope) / quad;
  if (!(bound > 0)) return {1.0, 0, false};
  int j;
  double t;
  if (cfg.theta == 0.5) {
    // bound < 1 here, so ceil(-log2(bound)) == -ilogb(bound).
    j = std::max(-std::ilogb(bound), 1);
    if (j >= cfg.max_armijo_trials) return {0, 0, false};
    t = std::ldexp(1.0, -j);
  } else {
    double jd = std::ceil(std::log(bound) / std::log(cfg.theta));
    if (!(jd < cfg.max_armijo_trials)) return {0, 0, false};
    j = std::max(static_cast<int>(jd), 1);
    t = std::pow(cfg.theta, j);
  }
  while (!accepts(t)) {
    ++j;
    t *= cfg.theta;
    if (j >= cfg.max_armijo_trials) return {t, 0, false};
  }
  while (j > 1 && accepts(t / cfg.theta)) {
    t /= cfg.theta;
    --j;
  }
  return {t, slope * t + quad * t * t, true};
}

template <class DeltaFn>
ArmijoOut armijo_trials(DeltaFn&& delta, double phi, const SolverConfig& cfg) {
  double t = 1.0;
  for (int j = 0; j < cfg.max_armijo_trials; ++j) {
    double d = delta(t);
    if (d <= -cfg.beta * phi * t) return {t, d, true};
    t *= cfg.theta;
  }
  return {t, 0, false};
}

// Ray model of the objective along w + t * (v - w) over the active blocks.
struct LineModel {
  double slope = 0;  // smooth-part directional derivative
  double quad = 0;   // smooth-part curvature coefficient
  bool quadratic = true;
};

// ---------------------------------------------------------------------------
// Network adapter: keeps arc loads and the objective value incrementally.

struct NetAdapter {
  const NetworkProblem& prob;
  std::size_t nb;
  std::vector<std::size_t> pbase, jbase, psize, jsize;
  bool affine = true;

  std::vector<double> xs, ys, fa;
  double fval = 0;

  std::vector<double> price;  // flat path-cost scratch, filled per block
  std::vector<double> dxs, dys, dfa;
  std::vector<int> touched;
  std::vector<char> intouch;

  explicit NetAdapter(const NetworkProblem& p) : prob(p) {
    nb = p.pairs.size();
    pbase.resize(nb);
    jbase.resize(nb);
    psize.resize(nb);
    jsize.resize(nb);
    std::size_t pb = 0, jb = 0;
    for (std::size_t s = 0; s < nb; ++s) {
      pbase[s] = pb;
      jbase[s] = jb;
      psize[s] = p.pairs[s].paths.size();
      jsize[s] = p.pairs[s].buyers.size();
      pb += psize[s];
      jb += jsize[s];
      for (const auto& b : p.pairs[s].buyers) affine &= b.disutility.is_affine();
    }
    for (const auto& a : p.arcs) affine &= a.cost.is_affine();
    xs.assign(pb, 0.0);
    ys.assign(jb, 0.0);
    fa.assign(p.arcs.size(), 0.0);
    price.assign(pb, 0.0);
    dxs.assign(pb, 0.0);
    dys.assign(jb, 0.0);
    dfa.assign(p.arcs.size(), 0.0);
    intouch.assign(p.arcs.size(), 0);
  }

  std::size_t blocks() const { return nb; }

  void solve_block(std::size_t s, BlockDirection& out) {
    const auto& pr = prob.pairs[s];
    for (std::size_t p = 0; p < psize[s]; ++p) {
      double c = 0;
      for (int aid : pr.paths[p]) c += prob.arcs[aid].cost(fa[aid]);
      price[pbase[s] + p] = c;
    }
    solve_block_into(price.data() + pbase[s], psize[s], xs.data() + pbase[s],
                     ys.data() + jbase[s], pr.buyers, out);
  }

  template <class Active>
  LineModel build_line(const std::vector<BlockDirection>& dirs, const Active& active) {
    LineModel lm;
    lm.quadratic = affine;
    for (int aid : touched) {
      dfa[aid] = 0;
      intouch[aid] = 0;
    }
    touched.clear();
    for (std::size_t s : active) {
      const auto& d = dirs[s];
      const auto& pr = prob.pairs[s];
      for (std::size_t p = 0; p < psize[s]; ++p) {
        double dx = d.x[p] - xs[pbase[s] + p];
        dxs[pbase[s] + p] = dx;
        lm.slope += price[pbase[s] + p] * dx;
        if (dx != 0)
          for (int aid : pr.paths[p]) {
            if (!intouch[aid]) {
              intouch[aid] = 1;
              touched.push_back(aid);
            }
            dfa[aid] += dx;
          }
      }
      for (std::size_t j = 0; j < jsize[s]; ++j) {
        double dy = d.y[j] - ys[jbase[s] + j];
        dys[jbase[s] + j] = dy;
        lm.slope -= pr.buyers[j].disutility(ys[jbase[s] + j]) * dy;
      }
    }
    if (lm.quadratic) {
      double q = 0;
      for (int aid : touched) q += prob.arcs[aid].cost.c1() * dfa[aid] * dfa[aid];
      for (std::size_t s : active)
        for (std::size_t j = 0; j < jsize[s]; ++j) {
          double dy = dys[jbase[s] + j];
          // h = c0 + c1 y with c1 < 0; the demand term integrates -h.
          q -= prob.pairs[s].buyers[j].disutility.c1() * dy * dy;
        }
      lm.quad = 0.5 * q;
    }
    return lm;
  }

  template <class Active>
  double delta_at(const Active& active, double t) const {
    double d = 0;
    for (int aid : touched)
      d += prob.arcs[aid].cost.integral_between(fa[aid], fa[aid] + t * dfa[aid]);
    for (std::size_t s : active)
      for (std::size_t j = 0; j < jsize[s]; ++j) {
        double y = ys[jbase[s] + j];
        d -= prob.pairs[s].buyers[j].disutility.integral_between(
            y, y + t * dys[jbase[s] + j]);
      }
    return d;
  }

  template <class Active>
  void apply(const Active& active, double t, double df) {
    for (int aid : touched) fa[aid] += t * dfa[aid];
    for (std::size_t s : active) {
      double bal = 0;
      std::size_t top = pbase[s];
      for (std::size_t p = 0; p < psize[s]; ++p) {
        std::size_t i = pbase[s] + p;
        xs[i] += t * dxs[i];
        bal += xs[i];
        if (xs[i] > xs[top]) top = i;
      }
      for (std::size_t j = 0; j < jsize[s]; ++j) {
        std::size_t i = jbase[s] + j;
        ys[i] += t * dys[i];
        bal -= ys[i];
      }
      // Fold the rounding residual into the largest flow so the block
      // balance stays exact; mirror the correction on that path's arcs.
      if (bal != 0 && xs[top] >= bal) {
        xs[top] -= bal;
        for (int aid : prob.pairs[s].paths[top - pbase[s]]) fa[aid] -= bal;
      }
    }
    fval += df;
  }

  void refresh() {
    std::fill(fa.begin(), fa.end(), 0.0);
    std::size_t p = 0;
    for (const auto& pr : prob.pairs)
      for (const auto& path : pr.paths) {
        double x = xs[p++];
        for (int aid : path) fa[aid] += x;
      }
  }

  double fresh_objective() const {
    return objective(prob, FlowPoint{xs, ys}).total();
  }

  void export_point(FlowPoint& out) const {
    out.path_flow = xs;
    out.demand = ys;
  }
};

// ---------------------------------------------------------------------------
// Wireless adapter: one block; optional exterior cap penalty at level tau.

struct WirelessAdapter {
  const WirelessProblem& prob;
  double tau = 0;
  bool affine = true;
  bool has_caps = false;

  std::vector<double> xs, ys;
  double xsum = 0;
  double fval = 0;

  std::vector<double> price, dxs, dys;
  double dsum = 0;

  explicit WirelessAdapter(const WirelessProblem& p) : prob(p) {
    for (const auto& b : p.base_price) affine &= b.is_affine();
    for (const auto& c : p.classes) affine &= c.disutility.is_affine();
    for (double a : p.cap) has_caps |= a != kInf;
    xs.assign(p.providers(), 0.0);
    ys.assign(p.classes.size(), 0.0);
    price.resize(p.providers());
    dxs.resize(p.providers());
    dys.resize(p.classes.size());
  }

  std::size_t blocks() const { return 1; }
  bool penalty_active() const { return tau > 0 && has_caps; }

  void solve_block(std::size_t, BlockDirection& out) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      price[i] = prob.base_price[i](xs[i]) + prob.congestion * xsum;
      if (penalty_active() && prob.cap[i] != kInf)
        price[i] += tau * std::max(xs[i] - prob.cap[i], 0.0);
    }
    solve_block_into(price.data(), xs.size(), xs.data(), ys.data(), prob.classes, out);
  }

  template <class Active>
  LineModel build_line(const std::vector<BlockDirection>& dirs, const Active&) {
    const auto& d = dirs[0];
    LineModel lm;
    lm.quadratic = affine && !penalty_active();
    dsum = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      dxs[i] = d.x[i] - xs[i];
      dsum += dxs[i];
      // Smooth-part slope only: the penalty piece is evaluated exactly,
      // case by case, inside delta_at.
      lm.slope += (prob.base_price[i](xs[i]) + prob.congestion * xsum) * dxs[i];
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
      dys[j] = d.y[j] - ys[j];
      lm.slope -= prob.classes[j].disutility(ys[j]) * dys[j];
    }
    if (lm.quadratic) {
      double q = prob.congestion * dsum * dsum;
      for (std::size_t i = 0; i < xs.size(); ++i)
        q += prob.base_price[i].c1() * dxs[i] * dxs[i];
      for (std::size_t j = 0; j < ys.size(); ++j)
        q -= prob.classes[j].disutility.c1() * dys[j] * dys[j];
      lm.quad = 0.5 * q;
    }
    return lm;
  }

  template <class Active>
  double delta_at(const Active&, double t) const {
    double d = prob.congestion * (xsum * (t * dsum) + 0.5 * (t * dsum) * (t * dsum));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      d += prob.base_price[i].integral_between(xs[i], xs[i] + t * dxs[i]);
      if (penalty_active() && prob.cap[i] != kInf) {
        // Difference of squared cap excesses without cancellation.
        double u = xs[i] - prob.cap[i];
        double v = u + t * dxs[i];
        double term;
        if (u <= 0 && v <= 0) term = 0;
        else if (u >= 0 && v >= 0) term = (v - u) * (u + v);
        else if (v > 0) term = v * v;
        else term = -u * u;
        d += 0.5 * tau * term;
      }
    }
    for (std::size_t j = 0; j < ys.size(); ++j)
      d -= prob.classes[j].disutility.integral_between(ys[j], ys[j] + t * dys[j]);
    return d;
  }

  template <class Active>
  void apply(const Active&, double t, double df) {
    double bal = 0;
    std::size_t top = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] += t * dxs[i];
      bal += xs[i];
      if (xs[i] > xs[top]) top = i;
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
      ys[j] += t * dys[j];
      bal -= ys[j];
    }
    if (bal != 0 && xs[top] >= bal) xs[top] -= bal;
    xsum = 0;
    for (double v : xs) xsum += v;
    fval += df;
  }

  void refresh() {
    xsum = 0;
    for (double v : xs) xsum += v;
  }

  double fresh_objective() const { return objective(prob, xs, ys, tau).total(); }

  void export_point(FlowPoint& out) const {
    out.path_flow = xs;
    out.demand = ys;
  }

  double cap_violation() const {
    double v = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (prob.cap[i] != kInf) v = std::max(v, xs[i] - prob.cap[i]);
    return v;
  }
};

// ---------------------------------------------------------------------------
// Engine.

struct AllBlocks {
  std::size_t n;
  struct It {
    std::size_t i;
    std::size_t operator*() const { return i; }
    It& operator++() {
      ++i;
      return *this;
    }
    bool operator!=(const It& o) const { return i != o.i; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
};

struct OneBlock {
  std::size_t s;
  const std::size_t* begin() const { return &s; }
  const std::size_t* end() const { return &s + 1; }
};

constexpr long long kRefreshEvery = 1 << 20;

struct Emitter {
  const SolverConfig& cfg;
  SolveResult& res;
  void operator()(const TraceRow& r) const {
    if (cfg.sink) cfg.sink->row(r);
    if (cfg.keep_trace) res.trace.push_back(r);
  }
};

template <class A>
double exact_delta(A& ad, std::vector<BlockDirection>& dirs) {
  double delta = 0;
  for (std::size_t s = 0; s < ad.blocks(); ++s) {
    ad.solve_block(s, dirs[s]);
    delta += dirs[s].gap;
  }
  return delta;
}

template <class A>
void finish(A& ad, SolveResult& res, long long count, const Emitter& emit) {
  res.block_iters = count;
  res.objective = ad.fresh_objective();
  ad.export_point(res.point);
  TraceRow r;
  r.event = TraceRow::Event::done;
  r.block_iters = count;
  r.objective = res.objective;
  r.delta = res.delta;
  emit(r);
}

template <class A>
SolveResult run_pl(A& ad, const SolverConfig& cfg, long long count0 = 0) {
  SolveResult res;
  Emitter emit{cfg, res};
  const std::size_t n = ad.blocks();
  const long long nl = static_cast<long long>(n);
  std::vector<BlockDirection> dirs(n);
  AllBlocks all{n};
  long long count = count0, since_refresh = 0;
  while (true) {
    double delta = exact_delta(ad, dirs);
    TraceRow mr;
    mr.event = TraceRow::Event::measure;
    mr.block_iters = count;
    mr.objective = ad.fval;
    mr.delta = delta;
    emit(mr);
    res.delta = delta;
    if (delta <= cfg.accuracy) {
      res.status = SolveStatus::converged;
      break;
    }
    if (cfg.max_block_iters >= 0 && count + nl > cfg.max_block_iters) {
      res.status = SolveStatus::budget_exhausted;
      break;
    }
    LineModel lm = ad.build_line(dirs, all);
    ArmijoOut ar =
        lm.quadratic
            ? armijo_quadratic(lm.slope, lm.quad, delta, cfg)
            : armijo_trials([&](double t) { return ad.delta_at(all, t); }, delta, cfg);
    if (!ar.ok) {
      res.status = SolveStatus::line_search_failed;
      break;
    }
    ad.apply(all, ar.t, ar.df);
    count += nl;
    TraceRow sr;
    sr.event = TraceRow::Event::step;
    sr.block_iters = count;
    sr.gap = delta;
    sr.step = ar.t;
    sr.objective = ad.fval;
    sr.delta = delta;
    emit(sr);
    if ((since_refresh += nl) >= kRefreshEvery) {
      ad.refresh();
      since_refresh = 0;
    }
  }
  finish(ad, res, count, emit);
  return res;
}

template <class A>
SolveResult run_cpl(A& ad, const SolverConfig& cfg) {
  SolveResult res;
  Emitter emit{cfg, res};
  const std::size_t n = ad.blocks();
  std::vector<BlockDirection> dirs(n);
  std::vector<double> lastphi(n);

  double delta = exact_delta(ad, dirs);
  for (std::size_t s = 0; s < n; ++s) lastphi[s] = dirs[s].gap;
  TraceRow mr;
  mr.event = TraceRow::Event::measure;
  mr.objective = ad.fval;
  mr.delta = delta;
  emit(mr);
  res.delta = delta;
  long long count = 0, since_refresh = 0;
  if (delta <= cfg.accuracy) {
    res.status = SolveStatus::converged;
    finish(ad, res, count, emit);
    return res;
  }

  double stale = delta;
  int stage = 1;
  double dl = cfg.delta0;
  std::size_t s = 0, skips = 0;
  while (true) {
    if (skips == n) {
      // A full sweep without a step: every lastphi is fresh at this iterate.
      double fresh = 0;
      for (double g : lastphi) fresh += g;
      TraceRow rr;
      rr.event = TraceRow::Event::restart;
      rr.block_iters = count;
      rr.objective = ad.fval;
      rr.delta = fresh;
      rr.stage = stage;
      rr.delta_l = dl;
      emit(rr);
      res.delta = fresh;
      if (fresh <= cfg.accuracy) {
        res.status = SolveStatus::converged;
        break;
      }
      ++stage;
      dl = cfg.delta_rule == DeltaRule::halve ? cfg.delta0 / std::exp2(stage - 1)
                                              : cfg.delta0 / stage;
      skips = 0;
      s = 0;
      stale = fresh;
      continue;
    }
    ad.solve_block(s, dirs[s]);
    stale += dirs[s].gap - lastphi[s];
    lastphi[s] = dirs[s].gap;
    if (dirs[s].gap >= dl) {
      if (cfg.max_block_iters >= 0 && count + 1 > cfg.max_block_iters) {
        res.status = SolveStatus::budget_exhausted;
        res.delta = exact_delta(ad, dirs);
        break;
      }
      OneBlock active{s};
      LineModel lm = ad.build_line(dirs, active);
      double phi = dirs[s].gap;
      ArmijoOut ar = lm.quadratic
                         ? armijo_quadratic(lm.slope, lm.quad, phi, cfg)
                         : armijo_trials(
                               [&](double t) { return ad.delta_at(active, t); },
                               phi, cfg);
      if (!ar.ok) {
        res.status = SolveStatus::line_search_failed;
        res.delta = exact_delta(ad, dirs);
        break;
      }
      ad.apply(active, ar.t, ar.df);
      count += 1;
      skips = 0;
      TraceRow sr;
      sr.event = TraceRow::Event::step;
      sr.block_iters = count;
      sr.block = static_cast<int>(s);
      sr.gap = phi;
      sr.step = ar.t;
      sr.objective = ad.fval;
      sr.delta = stale;
      sr.exact = false;
      emit(sr);
      if (++since_refresh >= kRefreshEvery) {
        ad.refresh();
        since_refresh = 0;
      }
    } else {
      ++skips;
    }
    s = (s + 1) % n;
  }
  finish(ad, res, count, emit);
  return res;
}

// The descent theory needs a compact feasible set and a convex objective:
// every demand cap finite, costs nondecreasing and disutilities
// nonincreasing over the reachable range.  Violations are construction
// errors, caught here before any iteration runs.
void check_solvable(const NetworkProblem& prob) {
  double total_cap = 0;
  for (const auto& pr : prob.pairs)
    for (const auto& b : pr.buyers) {
      if (b.cap == kInf)
        throw std::invalid_argument("solver requires finite demand caps");
      total_cap += b.cap;
    }
  for (const auto& a : prob.arcs)
    require_monotone(a.cost, +1, 0.0, total_cap, "arc cost");
  for (const auto& pr : prob.pairs)
    for (const auto& b : pr.buyers)
      require_monotone(b.disutility, -1, 0.0, b.cap, "buyer disutility");
}

void check_solvable(const WirelessProblem& prob) {
  double total_cap = 0;
  for (const auto& c : prob.classes) total_cap += c.cap;
  for (const auto& b : prob.base_price)
    require_monotone(b, +1, 0.0, total_cap, "provider base price");
  for (const auto& c : prob.classes)
    require_monotone(c.disutility, -1, 0.0, c.cap, "class disutility");
}

}  // namespace

double armijo_step(const std::function<double(double)>& delta_f, double phi,
                   const SolverConfig& cfg, int* trials) {
  double t = 1.0;
  for (int j = 0; j < cfg.max_armijo_trials; ++j) {
    double d = delta_f(t);
    if (d <= -cfg.beta * phi * t) {
      if (trials) *trials = j + 1;
      return t;
    }
    t *= cfg.theta;
  }
  throw SolveError("line search exhausted its trial budget");
}

SolveResult solve_pl(const NetworkProblem& prob, const SolverConfig& cfg) {
  prob.validate();
  check_solvable(prob);
  NetAdapter ad(prob);
  return run_pl(ad, cfg);
}

SolveResult solve_cpl(const NetworkProblem& prob, const SolverConfig& cfg) {
  prob.validate();
  check_solvable(prob);
  NetAdapter ad(prob);
  return run_cpl(ad, cfg);
}

SolveResult solve_pl(const WirelessProblem& prob, const SolverConfig& cfg) {
  prob.validate();
  check_solvable(prob);
  WirelessAdapter ad(prob);
  return run_pl(ad, cfg);
}

SolveResult solve_cpl(const WirelessProblem& prob, const SolverConfig& cfg) {
  prob.validate();
  check_solvable(prob);
  WirelessAdapter ad(prob);
  return run_cpl(ad, cfg);
}

SolveResult solve_penalized(const WirelessProblem& prob, const SolverConfig& cfg,
                            const PenaltyConfig& pen) {
  prob.validate();
  check_solvable(prob);
  for (double a : prob.cap)
    if (a == kInf)
      throw std::invalid_argument("penalty schedule requires finite provider caps");
  WirelessAdapter ad(prob);
  SolveResult res;
  res.status = SolveStatus::converged;
  long long used = 0;
  double tau = pen.tau0;
  for (int t = 0; t < pen.stages; ++t) {
    ad.tau = tau;
    SolverConfig inner = cfg;
    inner.accuracy = pen.inner_gap_factor / tau;
    // Counts accumulate across stages.  The stage cap bounds this stage's
    // effort; the global budget ends the whole loop.
    inner.max_block_iters = cfg.max_block_iters;
    if (pen.stage_block_iters >= 0) {
      long long cap = used + pen.stage_block_iters;
      if (inner.max_block_iters < 0 || cap < inner.max_block_iters)
        inner.max_block_iters = cap;
    }
    SolveResult stage = run_pl(ad, inner, used);
    res.delta = stage.delta;
    res.trace.insert(res.trace.end(), stage.trace.begin(), stage.trace.end());
    res.stages.push_back(
        {tau, stage.block_iters - used, stage.delta, ad.cap_violation()});
    used = stage.block_iters;
    if (stage.status != SolveStatus::converged) res.status = stage.status;
    if (stage.status == SolveStatus::line_search_failed) break;
    if (cfg.max_block_iters >= 0 && used >= cfg.max_block_iters) break;
    if (ad.cap_violation() <= pen.violation_stop) break;
    tau *= pen.tau_factor;
  }
  res.block_iters = used;
  ad.export_point(res.point);
  // Report the uncapped-model objective at the returned point; the penalty
  // term vanishes as tau grows and is bookkeeping, not model.
  res.objective = objective(prob, ad.xs, ad.ys, 0.0).total();
  return res;
}

}  // namespace mareq
