#include "credible/prune.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "credible/errors.hpp"

namespace credible {

namespace {

constexpr std::int64_t kMaxStateSpace = std::int64_t{1} << 62;

void check_epsilon(double epsilon) {
    if (!(epsilon >= 0.0)) throw contract_error("epsilon must be non-negative");
}

// Product of arities over the mask, saturated: anything at the cap already exceeds
// every threshold the pruning rules compare against.
std::int64_t joint_states(const Dataset& ds, Mask m) {
    std::int64_t r = 1;
    for (Mask rest = m; rest; rest &= rest - 1) {
        const std::int64_t a = ds.arities[std::countr_zero(rest)];
        if (a == 0 || r > kMaxStateSpace / a) return kMaxStateSpace;
        r *= a;
    }
    return r;
}

std::int64_t choose(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

bool epsilon_subset_prune(double score_subset, double score_superset, double epsilon) {
    check_epsilon(epsilon);
    return score_superset > score_subset + epsilon + kScoreSlack;
}

bool bic_penalty_prune(double score_subset, double penalty_superset, double epsilon) {
    check_epsilon(epsilon);
    return score_subset - penalty_superset + epsilon < -kScoreSlack;
}

bool instantiation_count_prune(const Dataset& ds, const ScoringConfig& cfg, int target,
                               Mask parents, double epsilon) {
    check_epsilon(epsilon);
    if (cfg.family != Family::bic)
        throw contract_error("instantiation_count_prune applies to BIC only");
    if (target < 0 || target >= ds.n()) throw contract_error("target index out of range");
    if (parents & bit(target)) throw contract_error("target cannot be its own parent");
    const std::int64_t r_i = ds.arities[target];
    if (r_i < 2) return false;  // penalty-free target: larger parent sets never pay rent
    const double w = bic_weight(ds);
    if (!(w > 0.0)) return false;  // single-row data: every score is 0
    const double threshold = (static_cast<double>(ds.N()) / w) *
                             std::log(static_cast<double>(r_i)) /
                             static_cast<double>(r_i - 1);
    return static_cast<double>(joint_states(ds, parents)) > threshold + epsilon + kScoreSlack;
}

int parent_size_limit(std::int64_t N, double epsilon) {
    if (N < 1) throw contract_error("sample count must be positive");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw contract_error("epsilon must be finite and non-negative");
    // The nudge keeps exact powers of two from rounding up on fp slop.
    return static_cast<int>(std::ceil(std::log2(static_cast<double>(N) + epsilon) - 1e-12));
}

bool entropy_prune(const Dataset& ds, int target, Mask parents, int candidate,
                   double epsilon) {
    check_epsilon(epsilon);
    if (target < 0 || target >= ds.n() || candidate < 0 || candidate >= ds.n())
        throw contract_error("variable index out of range");
    if (candidate == target || (parents & bit(candidate)) || (parents & bit(target)))
        throw contract_error("candidate must lie outside the target and its parents");
    const std::int64_t r_j = ds.arities[candidate];
    if (r_j < 2) return false;  // a constant parent never grows the penalty
    const double tw = static_cast<double>(joint_states(ds, parents)) *
                      static_cast<double>(ds.arities[target] - 1) * bic_weight(ds);
    const double hi = conditional_entropy(ds, bit(target), parents);
    const double hj = conditional_entropy(ds, bit(candidate), parents);
    const double lhs = static_cast<double>(ds.N()) * std::min(hi, hj);
    return lhs < static_cast<double>(r_j - 1) * tw - epsilon - kScoreSlack;
}

bool bdeu_count_prune(double score_subset, std::int64_t positive_cells,
                      std::int64_t r_target, double epsilon) {
    check_epsilon(epsilon);
    if (positive_cells < 0) throw contract_error("positive cell count cannot be negative");
    if (r_target < 1) throw contract_error("target must have at least one state");
    return score_subset + epsilon <
           static_cast<double>(positive_cells) * std::log(static_cast<double>(r_target)) -
               kScoreSlack;
}

namespace {

// Priority order for attributing a suppressed candidate when several blocks cover it.
enum class BlockRule { instantiation, entropy, penalty, sparse };

struct Block {
    Mask m;
    BlockRule rule;
    std::int64_t r;        // joint parent states of m (instantiation blocks only)
    bool require_r_growth;  // suppress only supersets with a strictly larger state space
    bool require_proper;    // suppress only proper supersets
};

struct VarGen {
    std::vector<TableEntry> kept;
    PruneStats stats;
};

VarGen generate_for_variable(const Dataset& ds, const ScoringConfig& cfg, double epsilon,
                             const GenOptions& options, bool theorem_active,
                             int theorem_limit, int v) {
    VarGen out;
    const int n = ds.n();
    const std::int64_t N = ds.N();
    const bool is_bic = cfg.family == Family::bic;
    const double w = is_bic ? bic_weight(ds) : 0.0;
    const std::int64_t r_v = ds.arities[v];
    const double window = options.fault_subset_prune_at_zero ? 0.0 : epsilon;
    const bool finite_eps = std::isfinite(epsilon);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<int> cand;
    for (int u = 0; u < n; ++u)
        if (u != v) cand.push_back(u);
    const int ncand = static_cast<int>(cand.size());

    Mask multi_mask = 0;  // candidates with >= 2 states: the only ones the derived cap counts
    for (int u : cand)
        if (ds.arities[u] >= 2) multi_mask |= bit(u);
    const int n_single = ncand - popcount(multi_mask);

    int rawcap = ncand;
    if (theorem_active) rawcap = std::min(rawcap, theorem_limit + n_single);
    if (options.palim_override) rawcap = std::min(rawcap, *options.palim_override);
    for (int ell = rawcap + 1; ell <= ncand; ++ell)
        out.stats.pruned_size += choose(ncand, ell);

    // Superset blocking: when the instantiation rule fires it also holds for every
    // extension that actually multiplies the parent state space, provided the premise
    // bounds the score gap past epsilon. That needs (r_v - 1) * w >= 1 plus
    // N ln r_v >= eps + max(0, 1 - 2 eps) (r_v - 1) w with margin (witness: the empty
    // parent set, whose score is at most N ln r_v + (r_v - 1) w).
    const bool instantiation_active =
        is_bic && finite_eps && r_v >= 2 && static_cast<double>(r_v - 1) * w >= 1.0 &&
        static_cast<double>(N) * std::log(static_cast<double>(r_v)) >=
            epsilon + std::max(0.0, 1.0 - 2.0 * epsilon) * static_cast<double>(r_v - 1) * w +
                1.0;

    std::unordered_map<Mask, double> best_down;  // min scored value over mask and subsets
    best_down.reserve(1024);
    std::unordered_map<Mask, double> joint_h;  // memoized joint entropies (entropy rule)
    const auto ent = [&](Mask m) {
        if (m == 0) return 0.0;
        auto it = joint_h.find(m);
        if (it != joint_h.end()) return it->second;
        const double h = entropy(ds, m);
        joint_h.emplace(m, h);
        return h;
    };

    std::vector<Block> blocks;

    const auto process = [&](Mask m) {
        if (theorem_active && popcount(m & multi_mask) > theorem_limit) {
            ++out.stats.pruned_size;
            return;
        }

        const Block* hit = nullptr;
        std::int64_t r_m = -1;
        for (const auto& b : blocks) {
            if ((b.m & m) != b.m) continue;
            if (b.require_proper && b.m == m) continue;
            if (b.require_r_growth) {
                if (r_m < 0) r_m = joint_states(ds, m);
                if (b.r >= r_m) continue;
            }
            if (!hit || static_cast<int>(b.rule) < static_cast<int>(hit->rule)) hit = &b;
        }

        double msub = kInf;
        for (Mask rest = m; rest; rest &= rest - 1)
            msub = std::min(msub, best_down.at(m & ~(rest & -rest)));

        if (hit) {
            switch (hit->rule) {
                case BlockRule::instantiation: ++out.stats.pruned_instantiation; break;
                case BlockRule::entropy: ++out.stats.pruned_entropy; break;
                case BlockRule::penalty: ++out.stats.pruned_penalty; break;
                case BlockRule::sparse: ++out.stats.pruned_sparse; break;
            }
            best_down.emplace(m, msub);
            return;
        }

        if (out.stats.generated >= options.candidate_limit)
            throw resource_error("variable '" + ds.names[v] + "' exceeds the limit of " +
                                 std::to_string(options.candidate_limit) +
                                 " scored parent sets; narrow the window or cap the "
                                 "parent-set size");

        const auto ct = count(ds, v, m);
        ++out.stats.generated;
        double t = 0.0;
        const double sigma = is_bic ? bic_value_from_counts(ct, r_v, w, &t)
                                    : bdeu_value_from_counts(ct, r_v, cfg.ess);
        best_down.emplace(m, std::min(sigma, msub));

        if (std::isfinite(msub) && epsilon_subset_prune(msub, sigma, window)) {
            ++out.stats.pruned_dominated;
        } else {
            ++out.stats.survivors;
            out.kept.push_back(TableEntry{m, sigma, is_bic ? t : 0.0});
        }

        if (!finite_eps) return;  // an unbounded window disables every window rule

        if (is_bic) {
            if (instantiation_active && instantiation_count_prune(ds, cfg, v, m, epsilon))
                blocks.push_back(
                    Block{m, BlockRule::instantiation, joint_states(ds, m), true, true});
            const double tw = t * w;
            const double hv = std::max(0.0, ent(m | bit(v)) - ent(m));
            for (int j = 0; j < n; ++j) {
                if (j == v || (m & bit(j))) continue;
                const std::int64_t r_j = ds.arities[j];
                if (r_j < 2) continue;
                const double hj = std::max(0.0, ent(m | bit(j)) - ent(m));
                if (static_cast<double>(N) * std::min(hv, hj) <
                    static_cast<double>(r_j - 1) * tw - epsilon - kScoreSlack)
                    blocks.push_back(Block{m | bit(j), BlockRule::entropy, 0, false, false});
            }
            if (std::isfinite(msub) && bic_penalty_prune(msub, tw, epsilon))
                blocks.push_back(Block{m, BlockRule::penalty, 0, false, true});
        } else {
            const auto rplus = static_cast<std::int64_t>(ct.cells.size());
            if (std::isfinite(msub) && bdeu_count_prune(msub, rplus, r_v, epsilon))
                blocks.push_back(Block{m, BlockRule::sparse, 0, false, true});
            else if (bdeu_count_prune(sigma, rplus, r_v, epsilon))
                blocks.push_back(Block{m, BlockRule::sparse, 0, false, true});
        }
    };

    for (int ell = 0; ell <= rawcap; ++ell) {
        if (ell == 0) {
            process(0);
            continue;
        }
        std::vector<int> idx(ell);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            Mask m = 0;
            for (int i : idx) m |= bit(cand[i]);
            process(m);
            int i = ell - 1;
            while (i >= 0 && idx[i] == ncand - ell + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int k = i + 1; k < ell; ++k) idx[k] = idx[k - 1] + 1;
        }
    }

    std::sort(out.kept.begin(), out.kept.end(), [](const TableEntry& a, const TableEntry& b) {
        return a.value != b.value ? a.value < b.value : a.parents < b.parents;
    });
    return out;
}

}  // namespace

std::pair<ScoreTable, PruneStats> generate_score_table(const Dataset& ds,
                                                       const ScoringConfig& cfg,
                                                       double epsilon,
                                                       const GenOptions& options) {
    check_epsilon(epsilon);
    if (cfg.family == Family::bdeu && !(cfg.ess > 0.0))
        throw contract_error("equivalent sample size must be positive");
    if (options.candidate_limit < 1) throw contract_error("candidate limit must be positive");
    if (options.palim_override && *options.palim_override < 0)
        throw contract_error("parent-set size cap cannot be negative");

    const int n = ds.n();
    const std::int64_t N = ds.N();
    const bool theorem_active =
        cfg.family == Family::bic && N >= 5 && std::isfinite(epsilon);
    const int theorem_limit = theorem_active ? parent_size_limit(N, epsilon) : n - 1;

    std::vector<VarGen> per(n);
    std::vector<std::exception_ptr> errs(n);
    const int workers = std::min(std::max(1, options.workers), n);
    const auto run_one = [&](int v) {
        try {
            per[v] = generate_for_variable(ds, cfg, epsilon, options, theorem_active,
                                           theorem_limit, v);
        } catch (...) {
            errs[v] = std::current_exception();
        }
    };
    if (workers == 1) {
        for (int v = 0; v < n; ++v) run_one(v);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i)
            pool.emplace_back([&] {
                for (int v = next.fetch_add(1); v < n; v = next.fetch_add(1)) run_one(v);
            });
        for (auto& th : pool) th.join();
    }
    for (int v = 0; v < n; ++v)
        if (errs[v]) std::rethrow_exception(errs[v]);

    ScoreTable table;
    table.names = ds.names;
    table.family = cfg.family;
    table.ess = cfg.ess;
    table.epsilon = epsilon;
    table.palim = std::min(options.palim_override.value_or(n - 1),
                           std::min(n - 1, theorem_active ? theorem_limit : n - 1));
    table.entries.resize(n);
    PruneStats total;
    for (int v = 0; v < n; ++v) {
        table.entries[v] = std::move(per[v].kept);
        const PruneStats& s = per[v].stats;
        total.generated += s.generated;
        total.survivors += s.survivors;
        total.pruned_dominated += s.pruned_dominated;
        total.pruned_penalty += s.pruned_penalty;
        total.pruned_instantiation += s.pruned_instantiation;
        total.pruned_size += s.pruned_size;
        total.pruned_entropy += s.pruned_entropy;
        total.pruned_sparse += s.pruned_sparse;
    }
    return {std::move(table), total};
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(std::move(tok));
    return out;
}

double parse_double_tok(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw parse_error("expected a number, got '" + s + "'", line);
}

long long parse_int_tok(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw parse_error("expected an integer, got '" + s + "'", line);
}

}  // namespace

void write_score_file(const ScoreTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw contract_error("cannot open '" + path + "' for writing");
    char buf[64];
    out << "# parent-set scores, maximization convention (negate for minimization)\n";
    out << "# family " << (table.family == Family::bic ? "bic" : "bdeu") << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", table.ess);
    out << "# ess " << buf << "\n";
    if (std::isinf(table.epsilon)) {
        out << "# epsilon inf\n";
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", table.epsilon);
        out << "# epsilon " << buf << "\n";
    }
    out << "# palim " << table.palim << "\n";
    out << table.n() << "\n";
    for (int v = 0; v < table.n(); ++v) {
        out << table.names[v] << " " << table.entries[v].size() << "\n";
        for (const auto& e : table.entries[v]) {
            std::snprintf(buf, sizeof buf, "%.8f", e.value == 0.0 ? 0.0 : -e.value);
            out << buf << " " << popcount(e.parents);
            for (int u : mask_to_indices(e.parents)) out << " " << table.names[u];
            out << "\n";
        }
    }
    out.flush();
    if (!out) throw contract_error("failed while writing '" + path + "'");
}

ScoreTable read_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");

    ScoreTable t;
    t.family = Family::bic;
    t.ess = 1.0;
    t.epsilon = std::numeric_limits<double>::infinity();
    t.palim = -1;

    struct RawEntry {
        int target;
        int line;
        double value;
        std::vector<std::string> parents;
    };
    std::vector<RawEntry> raw;
    std::vector<int> header_line;

    std::string line;
    int lineno = 0;
    int n = -1;
    int var = -1;
    long long remaining = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tok = tokens_of(line);
        if (tok.empty()) continue;
        if (tok[0][0] == '#') {
            std::string key;
            std::size_t vi = 0;
            if (tok[0] == "#") {
                if (tok.size() >= 3) key = tok[1], vi = 2;
            } else if (tok.size() >= 2) {
                key = tok[0].substr(1), vi = 1;
            }
            if (key == "family") {
                if (tok[vi] == "bic") t.family = Family::bic;
                else if (tok[vi] == "bdeu") t.family = Family::bdeu;
                else throw parse_error("unknown score family '" + tok[vi] + "'", lineno);
            } else if (key == "ess") {
                t.ess = parse_double_tok(tok[vi], lineno);
                if (!(t.ess > 0.0))
                    throw parse_error("equivalent sample size must be positive", lineno);
            } else if (key == "epsilon") {
                t.epsilon = tok[vi] == "inf" ? std::numeric_limits<double>::infinity()
                                             : parse_double_tok(tok[vi], lineno);
                if (!(t.epsilon >= 0.0))
                    throw parse_error("epsilon must be non-negative", lineno);
            } else if (key == "palim") {
                const long long p = parse_int_tok(tok[vi], lineno);
                if (p < 0) throw parse_error("palim must be non-negative", lineno);
                t.palim = static_cast<int>(std::min<long long>(p, kMaxVars));
            }
            continue;  // any other comment is freeform
        }
        if (n < 0) {
            const long long declared = parse_int_tok(tok[0], lineno);
            if (tok.size() != 1 || declared < 1)
                throw parse_error("expected the variable count on the first data line",
                                  lineno);
            if (declared > kMaxVars)
                throw resource_error("score file declares " + std::to_string(declared) +
                                     " variables; at most " + std::to_string(kMaxVars) +
                                     " are supported");
            n = static_cast<int>(declared);
            t.entries.resize(n);
            continue;
        }
        if (remaining == 0) {
            if (var + 1 == n)
                throw parse_error("unexpected content after the last variable block", lineno);
            if (tok.size() != 2)
                throw parse_error("expected a 'NAME COUNT' variable header", lineno);
            const long long k = parse_int_tok(tok[1], lineno);
            if (k < 0) throw parse_error("negative parent-set count", lineno);
            ++var;
            t.names.push_back(tok[0]);
            header_line.push_back(lineno);
            remaining = k;
            continue;
        }
        if (tok.size() < 2)
            throw parse_error("malformed score entry (expected 'SCORE COUNT parents...')",
                              lineno);
        const double maxval = parse_double_tok(tok[0], lineno);
        const long long p = parse_int_tok(tok[1], lineno);
        if (p < 0 || tok.size() != static_cast<std::size_t>(p) + 2)
            throw parse_error("score entry lists " + std::to_string(tok.size() - 2) +
                                  " parents but declares " + std::to_string(p),
                              lineno);
        raw.push_back(RawEntry{var, lineno, maxval == 0.0 ? 0.0 : -maxval,
                               {tok.begin() + 2, tok.end()}});
        --remaining;
    }
    if (n < 0) throw parse_error("missing variable count", lineno > 0 ? lineno : 1);
    if (remaining > 0)
        throw parse_error("unexpected end of file: variable '" + t.names[var] + "' declares " +
                              std::to_string(remaining) + " more parent sets",
                          lineno + 1);
    if (var + 1 < n)
        throw parse_error("unexpected end of file: expected " + std::to_string(n) +
                              " variable blocks, found " + std::to_string(var + 1),
                          lineno + 1);

    std::unordered_map<std::string, int> index;
    for (int v = 0; v < n; ++v)
        if (!index.emplace(t.names[v], v).second)
            throw parse_error("duplicate variable name '" + t.names[v] + "'", header_line[v]);

    std::vector<std::unordered_set<Mask>> seen(n);
    for (const auto& re : raw) {
        Mask m = 0;
        for (const auto& name : re.parents) {
            const auto it = index.find(name);
            if (it == index.end())
                throw parse_error("unknown parent '" + name + "'", re.line);
            if (it->second == re.target)
                throw parse_error("variable cannot be its own parent", re.line);
            if (m & bit(it->second))
                throw parse_error("duplicate parent '" + name + "'", re.line);
            m |= bit(it->second);
        }
        if (!seen[re.target].insert(m).second)
            throw parse_error("duplicate parent set for variable '" + t.names[re.target] + "'",
                              re.line);
        t.entries[re.target].push_back(TableEntry{m, re.value, 0.0});
    }
    for (auto& es : t.entries)
        std::sort(es.begin(), es.end(), [](const TableEntry& a, const TableEntry& b) {
            return a.value != b.value ? a.value < b.value : a.parents < b.parents;
        });
    if (t.palim < 0) t.palim = n - 1;
    return t;
}

}  // namespace credible
