// Copyright 2026 The MSDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msdp/purify.h"

#include <algorithm>

namespace msdp {

namespace {

// Dense exact-rational tableau simplex. Columns: structural vars, then
// slack/surplus, then artificials, then the rhs. Bland's rule on both the
// entering and leaving choices prevents cycling.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) {
    std::size_t m = lp.rows.size();
    n_struct_ = lp.num_vars;
    // Count slack columns.
    std::size_t n_slack = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!lp.is_equality[i]) ++n_slack;
    }
    n_total_ = n_struct_ + n_slack + m;  // worst case: artificial per row
    tableau_.assign(m, std::vector<Rat>(n_total_ + 1, Rat(0)));
    basis_.assign(m, -1);

    std::size_t slack_at = n_struct_;
    std::size_t art_at = n_struct_ + n_slack;
    artificial_start_ = art_at;
    for (std::size_t i = 0; i < m; ++i) {
      bool negate = lp.rhs[i] < 0;
      Rat sign = negate ? Rat(-1) : Rat(1);
      for (std::size_t j = 0; j < n_struct_; ++j) {
        tableau_[i][j] = sign * lp.rows[i][j];
      }
      tableau_[i][n_total_] = sign * lp.rhs[i];
      if (!lp.is_equality[i]) {
        // a.x <= b becomes a.x + s = b; negated it is -a.x - s = -b, i.e.
        // the slack enters with coefficient -1 and an artificial is needed.
        tableau_[i][slack_at] = negate ? Rat(-1) : Rat(1);
        if (!negate) basis_[i] = static_cast<int>(slack_at);
        ++slack_at;
      }
      if (basis_[i] < 0) {
        tableau_[i][art_at] = 1;
        basis_[i] = static_cast<int>(art_at);
        ++art_at;
      }
    }
    n_used_ = art_at;
  }

  LpSolution solve() {
    // Phase 1: minimize the sum of artificials.
    std::vector<Rat> phase1(n_total_, Rat(0));
    for (std::size_t j = artificial_start_; j < n_used_; ++j) phase1[j] = 1;
    set_objective(phase1);
    run();
    LpSolution out;
    if (objective_value_ != 0) {
      out.feasible = false;
      return out;
    }
    drive_out_artificials();
    // Phase 2: the real objective over structural variables.
    std::vector<Rat> phase2(n_total_, Rat(0));
    for (std::size_t j = 0; j < n_struct_ && j < lp_.objective.size(); ++j) {
      phase2[j] = lp_.objective[j];
    }
    set_objective(phase2);
    run();
    out.feasible = true;
    out.x.assign(n_struct_, Rat(0));
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_struct_) {
        out.x[basis_[i]] = tableau_[i][n_total_];
      }
    }
    out.objective = objective_value_;
    return out;
  }

 private:
  void set_objective(const std::vector<Rat>& cost) {
    cost_ = cost;
    obj_row_.assign(n_total_, Rat(0));
    objective_value_ = 0;
    for (std::size_t j = 0; j < n_total_; ++j) obj_row_[j] = cost[j];
    // Price out the current basis.
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      int b = basis_[i];
      if (b < 0) continue;
      Rat cb = cost[b];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < n_total_; ++j) {
        obj_row_[j] -= cb * tableau_[i][j];
      }
      objective_value_ += cb * tableau_[i][n_total_];
    }
  }

  void run() {
    // Artificial columns may not re-enter once their cost is zero (phase 2).
    bool exclude_artificials = true;
    for (std::size_t j = artificial_start_; j < n_used_; ++j) {
      if (cost_[j] != 0) {
        exclude_artificials = false;
        break;
      }
    }
    while (true) {
      // Bland: smallest-index column with negative reduced cost.
      std::size_t enter = n_total_;
      for (std::size_t j = 0; j < n_used_; ++j) {
        if (exclude_artificials && j >= artificial_start_) break;
        if (obj_row_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter == n_total_) return;  // optimal
      // Leaving row: min ratio, ties by smallest basis variable.
      std::size_t leave = tableau_.size();
      Rat best_ratio;
      for (std::size_t i = 0; i < tableau_.size(); ++i) {
        if (tableau_[i][enter] > 0) {
          Rat ratio = tableau_[i][n_total_] / tableau_[i][enter];
          if (leave == tableau_.size() || ratio < best_ratio ||
              (ratio == best_ratio && basis_[i] < basis_[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave == tableau_.size()) {
        throw InternalError("LP unbounded; purification objective is bounded");
      }
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    Rat pivot_val = tableau_[row][col];
    for (std::size_t j = 0; j <= n_total_; ++j) tableau_[row][j] /= pivot_val;
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (i == row) continue;
      Rat f = tableau_[i][col];
      if (f == 0) continue;
      for (std::size_t j = 0; j <= n_total_; ++j) {
        tableau_[i][j] -= f * tableau_[row][j];
      }
    }
    Rat f = obj_row_[col];
    if (f != 0) {
      for (std::size_t j = 0; j < n_total_; ++j) {
        obj_row_[j] -= f * tableau_[row][j];
      }
      objective_value_ += f * tableau_[row][n_total_];
    }
    basis_[row] = static_cast<int>(col);
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (basis_[i] < 0 ||
          static_cast<std::size_t>(basis_[i]) < artificial_start_) {
        continue;
      }
      // Basic artificial at value zero: pivot in any usable column.
      std::size_t col = n_total_;
      for (std::size_t j = 0; j < artificial_start_; ++j) {
        if (tableau_[i][j] != 0) {
          col = j;
          break;
        }
      }
      if (col == n_total_) {
        // Redundant row; leave the artificial basic at zero.
        continue;
      }
      pivot(i, col);
    }
  }

  const LinearProgram& lp_;
  std::vector<std::vector<Rat>> tableau_;
  std::vector<int> basis_;
  std::vector<Rat> obj_row_;
  std::vector<Rat> cost_;
  Rat objective_value_;
  std::size_t n_struct_ = 0;
  std::size_t n_total_ = 0;
  std::size_t n_used_ = 0;
  std::size_t artificial_start_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.rows.size() != lp.rhs.size() ||
      lp.rows.size() != lp.is_equality.size()) {
    throw ConfigError("inconsistent LP shape");
  }
  for (const auto& row : lp.rows) {
    if (row.size() != lp.num_vars) throw ConfigError("LP row width mismatch");
  }
  return Simplex(lp).solve();
}

std::optional<Rat> pure_dp_ratio(const std::vector<FiniteDist>& channel) {
  if (channel.empty()) throw ConfigError("empty channel");
  std::size_t ny = channel.front().size();
  Rat worst(1);
  for (std::size_t y = 0; y < ny; ++y) {
    Rat mx(0), mn(-1);
    for (const FiniteDist& row : channel) {
      const Rat& w = row.weight(y);
      if (w > mx) mx = w;
      if (mn < 0 || w < mn) mn = w;
    }
    if (mx == 0) continue;
    if (mn == 0) return std::nullopt;
    Rat r = mx / mn;
    if (r > worst) worst = r;
  }
  return worst;
}

namespace {

PurifiedChannel solve_purification(const DomainPtr& X,
                                   const std::vector<FiniteDist>& channel,
                                   const Rat& factor2, const Rat& delta) {
  const DomainPtr& Y = channel.front().domain();
  std::size_t nx = channel.size();
  std::size_t ny = Y->size();
  // Variables: w[x][y] then s[x][y] (|w - r| bounds).
  auto wvar = [&](std::size_t x, std::size_t y) { return x * ny + y; };
  auto svar = [&](std::size_t x, std::size_t y) { return nx * ny + x * ny + y; };
  LinearProgram lp;
  lp.num_vars = 2 * nx * ny;
  lp.objective.assign(lp.num_vars, Rat(0));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) lp.objective[svar(x, y)] = 1;
  }
  auto add_row = [&](std::vector<Rat> row, const Rat& rhs, bool eq) {
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(rhs);
    lp.is_equality.push_back(eq);
  };
  // Normalization.
  for (std::size_t x = 0; x < nx; ++x) {
    std::vector<Rat> row(lp.num_vars, Rat(0));
    for (std::size_t y = 0; y < ny; ++y) row[wvar(x, y)] = 1;
    add_row(std::move(row), Rat(1), /*eq=*/true);
  }
  // Pure-DP ratio: w[x][y] - factor2 * w[x'][y] <= 0 for all ordered pairs.
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t x2 = 0; x2 < nx; ++x2) {
        if (x == x2) continue;
        std::vector<Rat> row(lp.num_vars, Rat(0));
        row[wvar(x, y)] = 1;
        row[wvar(x2, y)] -= factor2;
        add_row(std::move(row), Rat(0), /*eq=*/false);
      }
    }
  }
  // |w - r| <= s, per entry.
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      const Rat& r = channel[x].weight(y);
      std::vector<Rat> row1(lp.num_vars, Rat(0));
      row1[wvar(x, y)] = 1;
      row1[svar(x, y)] = -1;
      add_row(std::move(row1), r, /*eq=*/false);
      std::vector<Rat> row2(lp.num_vars, Rat(0));
      row2[wvar(x, y)] = -1;
      row2[svar(x, y)] = -1;
      add_row(std::move(row2), -r, /*eq=*/false);
    }
  }
  // Per-input L1 distance <= 2 delta.
  for (std::size_t x = 0; x < nx; ++x) {
    std::vector<Rat> row(lp.num_vars, Rat(0));
    for (std::size_t y = 0; y < ny; ++y) row[svar(x, y)] = 1;
    add_row(std::move(row), 2 * delta, /*eq=*/false);
  }

  LpSolution sol = solve_lp(lp);
  PurifiedChannel out;
  out.input_domain = X;
  out.output_domain = Y;
  if (!sol.feasible) {
    out.changed = false;
    out.table.clear();
    return out;
  }
  for (std::size_t x = 0; x < nx; ++x) {
    std::vector<Rat> w(ny);
    for (std::size_t y = 0; y < ny; ++y) w[y] = sol.x[wvar(x, y)];
    out.table.emplace_back(Y, std::move(w));
    out.distance_to_original.push_back(
        statistical_distance(out.table.back(), channel[x]));
  }
  out.changed = true;
  return out;
}

}  // namespace

namespace {

// Rounds down to 64 fractional bits. A slightly stricter ratio bound keeps
// the certification sound while keeping LP coefficients small.
Rat floor_dyadic(const Rat& r) {
  mpz_class scaled = (r.get_num() << 64) / r.get_den();
  Rat out(scaled, mpz_class(1) << 64);
  out.canonicalize();
  return out;
}

}  // namespace

PurifiedChannel purify(const DomainPtr& input_domain,
                       const std::vector<FiniteDist>& channel, const Eps& eps,
                       const Rat& delta) {
  if (channel.size() != input_domain->size()) {
    throw ConfigError("purify: channel must cover the input domain");
  }
  for (const FiniteDist& row : channel) {
    if (!same_domain(row.domain(), channel.front().domain())) {
      throw DomainMismatchError("purify: conditionals over different domains");
    }
  }
  Rat factor2_lo = eps.factor_lower() * eps.factor_lower();
  if (!eps.exact()) factor2_lo = floor_dyadic(factor2_lo);
  if (factor2_lo < 1) factor2_lo = 1;
  std::optional<Rat> rho = pure_dp_ratio(channel);
  if (rho && *rho <= factor2_lo) {
    // Already pure at 2 eps; the skip path for delta = 0 inputs.
    PurifiedChannel out;
    out.input_domain = input_domain;
    out.output_domain = channel.front().domain();
    out.table = channel;
    out.distance_to_original.assign(channel.size(), Rat(0));
    out.ratio_bound = *rho;
    out.changed = false;
    return out;
  }

  PurifiedChannel out =
      solve_purification(input_domain, channel, factor2_lo, delta);
  if (out.table.empty() && !eps.exact()) {
    // Hairline infeasibility can only come from the directed rounding of
    // e^{2 eps}; retry against the upper bound and record the relaxation.
    Rat factor2_hi = eps.factor_upper() * eps.factor_upper();
    out = solve_purification(input_domain, channel, factor2_hi, delta);
    out.used_upper_factor = true;
  }
  if (out.table.empty()) {
    throw InternalError(
        "purification infeasible; the input channel does not satisfy the "
        "claimed (eps, delta) privacy");
  }
  auto measured = pure_dp_ratio(out.table);
  if (!measured) {
    throw InternalError("purified channel has an unbounded ratio");
  }
  out.ratio_bound = *measured;
  for (std::size_t x = 0; x < channel.size(); ++x) {
    if (out.distance_to_original[x] > delta) {
      throw InternalError("purified channel moved more than delta at input " +
                          input_domain->at(x).to_string());
    }
  }
  return out;
}

}  // namespace msdp
