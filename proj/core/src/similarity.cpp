#include "powerloc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace powerloc {
namespace {

// Partial solution ending at a DP cell. Ordered by cost, then start offset,
// then longer path first.
struct Cell {
    double cost = 0.0;
    std::size_t start = 0;
    std::size_t len = 0;
};

inline bool better(const Cell& a, const Cell& b) {
    if (a.cost != b.cost) {
        return a.cost < b.cost;
    }
    if (a.start != b.start) {
        return a.start < b.start;
    }
    return a.len > b.len;
}

// Final selection also breaks ties on the end offset.
inline bool better_final(const Cell& a, std::size_t end_a, const Cell& b, std::size_t end_b) {
    if (a.cost != b.cost) {
        return a.cost < b.cost;
    }
    if (a.start != b.start) {
        return a.start < b.start;
    }
    if (end_a != end_b) {
        return end_a < end_b;
    }
    return a.len > b.len;
}

enum Move : std::uint8_t { kStart = 0, kDiag = 1, kUp = 2, kLeft = 3 };

void require_non_empty(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument(std::string(what) + ": empty input");
    }
}

struct DtwOutcome {
    Cell cell;
    std::size_t end = 0;
    std::vector<std::uint8_t> moves;  // row-major n x m, only when requested
};

// Shared DTW kernel. In subsequence mode every cell of the first query row may
// open a fresh alignment; otherwise only (0, 0) does.
template <bool kWithPath>
DtwOutcome dtw_kernel(std::span<const double> a, std::span<const double> b, bool subsequence) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<Cell> prev(m);
    std::vector<Cell> cur(m);
    DtwOutcome out;
    if constexpr (kWithPath) {
        out.moves.resize(n * m);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = a[i];
        for (std::size_t j = 0; j < m; ++j) {
            Cell best;
            Move move = kStart;
            if (i == 0) {
                if (subsequence || j == 0) {
                    best = Cell{0.0, j, 0};
                    move = kStart;
                    if (j > 0 && better(cur[j - 1], best)) {
                        best = cur[j - 1];
                        move = kLeft;
                    }
                } else {
                    best = cur[j - 1];
                    move = kLeft;
                }
            } else if (j == 0) {
                best = prev[0];
                move = kUp;
            } else {
                best = prev[j - 1];
                move = kDiag;
                if (better(prev[j], best)) {
                    best = prev[j];
                    move = kUp;
                }
                if (better(cur[j - 1], best)) {
                    best = cur[j - 1];
                    move = kLeft;
                }
            }
            cur[j] = Cell{best.cost + std::abs(ai - b[j]), best.start, best.len + 1};
            if constexpr (kWithPath) {
                out.moves[i * m + j] = move;
            }
        }
        std::swap(prev, cur);
    }
    // prev now holds the last query row.
    if (subsequence) {
        std::size_t best_end = 0;
        for (std::size_t j = 1; j < m; ++j) {
            if (better_final(prev[j], j, prev[best_end], best_end)) {
                best_end = j;
            }
        }
        out.cell = prev[best_end];
        out.end = best_end;
    } else {
        out.cell = prev[m - 1];
        out.end = m - 1;
    }
    return out;
}

Alignment dtw_alignment(std::span<const double> a, std::span<const double> b, bool subsequence) {
    auto outcome = dtw_kernel<true>(a, b, subsequence);
    const std::size_t m = b.size();
    Alignment al;
    al.distance = outcome.cell.cost;
    al.start_offset = outcome.cell.start;
    al.end_offset = outcome.end;
    std::size_t i = a.size() - 1;
    std::size_t j = outcome.end;
    while (true) {
        al.path.push_back({i, j});
        const auto move = outcome.moves[i * m + j];
        if (move == kStart) {
            break;
        }
        if (move == kDiag) {
            --i;
            --j;
        } else if (move == kUp) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(al.path.begin(), al.path.end());
    return al;
}

}  // namespace

Alignment dtw_distance(std::span<const double> a, std::span<const double> b) {
    require_non_empty(a, b, "dtw_distance");
    return dtw_alignment(a, b, false);
}

MatchSummary dtw_summary(std::span<const double> a, std::span<const double> b) {
    require_non_empty(a, b, "dtw_summary");
    auto outcome = dtw_kernel<false>(a, b, false);
    return {outcome.cell.cost, 0, b.size() - 1, outcome.cell.len};
}

double normalized_dtw(std::span<const double> a, std::span<const double> b) {
    return dtw_summary(a, b).normalized_distance();
}

Alignment subsequence_dtw(std::span<const double> query, std::span<const double> target) {
    require_non_empty(query, target, "subsequence_dtw");
    return dtw_alignment(query, target, true);
}

MatchSummary subsequence_dtw_summary(std::span<const double> query,
                                     std::span<const double> target) {
    require_non_empty(query, target, "subsequence_dtw");
    auto outcome = dtw_kernel<false>(query, target, true);
    return {outcome.cell.cost, outcome.cell.start, outcome.end, outcome.cell.len};
}

// OSB with a linear skip penalty.
//
//   match(i, j) = d(i, j) + min(open(i, j), reach(i - 1, j - 1))
//   reach(i, j) = min(match(i, j), reach(i - 1, j) + jc, reach(i, j - 1) + jc)
//
// match(i, j) is the best matching whose last matched pair is (i, j); reach
// carries the best last match at or before (i, j) with the skipped elements in
// between already charged. open(i, j) charges everything before the first
// match, and the closing term charges everything after the last one.
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct OsbOutcome {
    Cell cell;
    std::size_t end_i = 0;
    std::size_t end_j = 0;
    std::vector<std::size_t> match_pred;  // reach source of the predecessor match, or kNone
    std::vector<std::size_t> reach_src;   // match cell feeding reach(i, j)
};

template <bool kWithPath>
OsbOutcome osb_kernel(std::span<const double> q, std::span<const double> t, double jc, OsbMode mode) {
    const std::size_t n = q.size();
    const std::size_t m = t.size();
    const bool full = mode == OsbMode::full;
    std::vector<Cell> reach_prev(m);
    std::vector<Cell> reach_cur(m);
    OsbOutcome out;
    if constexpr (kWithPath) {
        out.match_pred.assign(n * m, kNone);
        out.reach_src.assign(n * m, kNone);
    }
    bool have_best = false;
    Cell best_total;
    for (std::size_t i = 0; i < n; ++i) {
        const double qi = q[i];
        for (std::size_t j = 0; j < m; ++j) {
            const double skipped_before =
                static_cast<double>(i) + (full ? static_cast<double>(j) : 0.0);
            Cell pred{jc * skipped_before, j, i + (full ? j : 0)};
            std::size_t pred_src = kNone;
            if (i > 0 && j > 0 && better(reach_prev[j - 1], pred)) {
                pred = reach_prev[j - 1];
                if constexpr (kWithPath) {
                    pred_src = out.reach_src[(i - 1) * m + (j - 1)];
                }
            }
            const Cell match{pred.cost + std::abs(qi - t[j]), pred.start, pred.len + 1};
            if constexpr (kWithPath) {
                out.match_pred[i * m + j] = pred_src;
            }

            Cell reach = match;
            std::size_t src = i * m + j;
            if (i > 0) {
                const Cell up{reach_prev[j].cost + jc, reach_prev[j].start, reach_prev[j].len + 1};
                if (better(up, reach)) {
                    reach = up;
                    if constexpr (kWithPath) {
                        src = out.reach_src[(i - 1) * m + j];
                    }
                }
            }
            if (j > 0) {
                const Cell left{reach_cur[j - 1].cost + jc, reach_cur[j - 1].start,
                                reach_cur[j - 1].len + 1};
                if (better(left, reach)) {
                    reach = left;
                    if constexpr (kWithPath) {
                        src = out.reach_src[i * m + (j - 1)];
                    }
                }
            }
            reach_cur[j] = reach;
            if constexpr (kWithPath) {
                out.reach_src[i * m + j] = src;
            }

            const std::size_t skipped_after = (n - 1 - i) + (full ? (m - 1 - j) : 0);
            const Cell total{match.cost + jc * static_cast<double>(skipped_after), match.start,
                             match.len + skipped_after};
            if (!have_best || better_final(total, j, best_total, out.end_j)) {
                have_best = true;
                best_total = total;
                out.end_i = i;
                out.end_j = j;
            }
        }
        std::swap(reach_prev, reach_cur);
    }
    out.cell = best_total;
    return out;
}

void check_jump_cost(double jc) {
    if (!(jc >= 0.0) || !std::isfinite(jc)) {
        throw std::invalid_argument("osb: jump_cost must be finite and >= 0");
    }
}

}  // namespace

Alignment osb(std::span<const double> query, std::span<const double> target, double jump_cost,
              OsbMode mode) {
    require_non_empty(query, target, "osb");
    check_jump_cost(jump_cost);
    auto outcome = osb_kernel<true>(query, target, jump_cost, mode);
    const std::size_t m = target.size();
    Alignment al;
    al.distance = outcome.cell.cost;
    al.jump_cost = jump_cost;
    std::size_t cell = outcome.end_i * m + outcome.end_j;
    while (cell != kNone) {
        al.path.push_back({cell / m, cell % m});
        cell = outcome.match_pred[cell];
    }
    std::reverse(al.path.begin(), al.path.end());
    al.start_offset = al.path.front().target;
    al.end_offset = al.path.back().target;

    std::vector<bool> q_used(query.size(), false);
    std::vector<bool> t_used(target.size(), false);
    for (const auto& p : al.path) {
        q_used[p.query] = true;
        t_used[p.target] = true;
    }
    for (std::size_t i = 0; i < query.size(); ++i) {
        if (!q_used[i]) {
            al.skipped_query.push_back(i);
        }
    }
    const std::size_t t_lo = mode == OsbMode::full ? 0 : al.start_offset;
    const std::size_t t_hi = mode == OsbMode::full ? target.size() - 1 : al.end_offset;
    for (std::size_t j = t_lo; j <= t_hi; ++j) {
        if (!t_used[j]) {
            al.skipped_target.push_back(j);
        }
    }
    return al;
}

MatchSummary osb_summary(std::span<const double> query, std::span<const double> target,
                         double jump_cost, OsbMode mode) {
    require_non_empty(query, target, "osb");
    check_jump_cost(jump_cost);
    auto outcome = osb_kernel<false>(query, target, jump_cost, mode);
    return {outcome.cell.cost, outcome.cell.start, outcome.end_j, outcome.cell.len};
}

double default_jump_cost(std::span<const double> a, std::span<const double> b) {
    require_non_empty(a, b, "default_jump_cost");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : a) {
        for (double y : b) {
            const double d = std::abs(x - y);
            sum += d;
            sum_sq += d * d;
        }
    }
    const double count = static_cast<double>(a.size()) * static_cast<double>(b.size());
    const double mean = sum / count;
    const double var = std::max(0.0, sum_sq / count - mean * mean);
    return mean + std::sqrt(var);
}

double replay_cost(const Alignment& alignment, std::span<const double> query,
                   std::span<const double> target) {
    double total = 0.0;
    for (const auto& p : alignment.path) {
        total += std::abs(query[p.query] - target[p.target]);
    }
    total += alignment.jump_cost *
             static_cast<double>(alignment.skipped_query.size() + alignment.skipped_target.size());
    return total;
}

}  // namespace powerloc
