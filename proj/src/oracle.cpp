#include "credible/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "credible/errors.hpp"

namespace credible {

namespace {

std::string dag_str(const Dag& g) {
    std::string s;
    for (int v = 0; v < g.n(); ++v) {
        if (v) s += "; ";
        s += std::to_string(v) + "<-{";
        bool first = true;
        for (int u : mask_to_indices(g.parents[v])) {
            if (!first) s += ",";
            s += std::to_string(u);
            first = false;
        }
        s += "}";
    }
    return s;
}

std::string instance_str(const Dataset& ds, const ScoringConfig& cfg, double eps) {
    std::ostringstream os;
    os << "family=" << (cfg.family == Family::bic ? "bic" : "bdeu");
    if (cfg.family == Family::bdeu) os << " ess=" << cfg.ess;
    os << " epsilon=" << eps << " n=" << ds.n() << " N=" << ds.N() << " arities=[";
    for (int v = 0; v < ds.n(); ++v) os << (v ? "," : "") << ds.arities[v];
    os << "]";
    return os.str();
}

}  // namespace

Dataset uniform8_dataset() {
    std::vector<std::vector<std::uint32_t>> rows;
    for (std::uint32_t a = 0; a < 2; ++a)
        for (std::uint32_t b = 0; b < 2; ++b)
            for (std::uint32_t c = 0; c < 2; ++c) rows.push_back({a, b, c});
    return make_dataset({"A", "B", "C"}, {2, 2, 2}, std::move(rows));
}

Dataset random_dataset(std::mt19937_64& rng, int n, std::int64_t N) {
    if (n < 1 || n > kMaxVars) throw contract_error("variable count out of range");
    if (N < 1) throw contract_error("sample count must be positive");
    std::vector<std::string> names;
    std::vector<std::int64_t> arities;
    names.reserve(n);
    for (int v = 0; v < n; ++v) {
        names.push_back("V" + std::to_string(v));
        // Raw modulo keeps draws identical across standard libraries.
        arities.push_back(2 + static_cast<std::int64_t>(rng() % 2));
    }
    std::vector<std::vector<std::uint32_t>> rows(
        static_cast<std::size_t>(N), std::vector<std::uint32_t>(static_cast<std::size_t>(n)));

    const bool structured = (rng() % 2) == 0;
    if (!structured) {
        for (auto& row : rows)
            for (int v = 0; v < n; ++v)
                row[v] = static_cast<std::uint32_t>(rng() % arities[v]);
        return make_dataset(std::move(names), std::move(arities), std::move(rows));
    }

    // Ground-truth network over the natural order with peaked conditionals.
    std::vector<std::vector<int>> par(n);
    std::vector<std::vector<std::uint32_t>> pref(n);
    for (int v = 0; v < n; ++v) {
        const int k = std::min<int>(v, static_cast<int>(rng() % 3));
        std::vector<int> pool(v);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < k; ++i)
            std::swap(pool[i], pool[i + static_cast<int>(rng() % (v - i))]);
        par[v].assign(pool.begin(), pool.begin() + k);
        std::sort(par[v].begin(), par[v].end());
        std::size_t states = 1;
        for (int p : par[v]) states *= static_cast<std::size_t>(arities[p]);
        pref[v].resize(states);
        for (auto& s : pref[v]) s = static_cast<std::uint32_t>(rng() % arities[v]);
    }
    for (auto& row : rows) {
        for (int v = 0; v < n; ++v) {
            std::size_t j = 0, mult = 1;
            for (int p : par[v]) {
                j += row[p] * mult;
                mult *= static_cast<std::size_t>(arities[p]);
            }
            const std::uint32_t peak = pref[v][j];
            const auto r = static_cast<std::uint32_t>(arities[v]);
            row[v] = (rng() % 100 < 80)
                         ? peak
                         : (peak + 1 + static_cast<std::uint32_t>(rng() % (r - 1))) % r;
        }
    }
    return make_dataset(std::move(names), std::move(arities), std::move(rows));
}

std::optional<OracleMismatch> check_instance(const Dataset& ds, const ScoringConfig& cfg,
                                             const OracleOptions& options) {
    std::vector<double> eps = options.epsilons;
    if (eps.empty()) eps = {0.0, std::log(3.0), std::log(20.0), std::log(150.0)};
    std::sort(eps.begin(), eps.end());

    GenOptions gen;
    gen.fault_subset_prune_at_zero = options.fault_subset_prune_at_zero;

    std::vector<std::vector<Dag>> windows;  // per epsilon, sorted by canonical order
    for (const double e : eps) {
        const std::string where = instance_str(ds, cfg, e);
        auto [table, stats] = generate_score_table(ds, cfg, e, gen);
        EnumStats est;
        const CredibleSet pipe = enumerate_credible(table, e, options.limit, 24, &est);
        const CredibleSet ref = brute_force_credible(ds, cfg, e);

        if (pipe.truncated)
            return OracleMismatch{where + ": enumeration truncated at limit " +
                                  std::to_string(options.limit)};
        if (est.duplicates != 0)
            return OracleMismatch{where + ": enumeration emitted " +
                                  std::to_string(est.duplicates) + " duplicate networks"};
        if (std::abs(pipe.opt - ref.opt) > 1e-9) {
            std::ostringstream os;
            os << where << ": optimum mismatch, pipeline " << pipe.opt << " vs reference "
               << ref.opt;
            return OracleMismatch{os.str()};
        }
        const std::size_t common = std::min(pipe.dags.size(), ref.dags.size());
        for (std::size_t i = 0; i < common; ++i) {
            if (!(pipe.dags[i].dag == ref.dags[i].dag)) {
                return OracleMismatch{where + ": network sets differ at rank " +
                                      std::to_string(i) + ": pipeline " +
                                      dag_str(pipe.dags[i].dag) + " vs reference " +
                                      dag_str(ref.dags[i].dag)};
            }
            if (std::abs(pipe.dags[i].score - ref.dags[i].score) > 1e-9) {
                std::ostringstream os;
                os << where << ": score mismatch at rank " << i << " ("
                   << dag_str(pipe.dags[i].dag) << "): pipeline " << pipe.dags[i].score
                   << " vs reference " << ref.dags[i].score;
                return OracleMismatch{os.str()};
            }
        }
        if (pipe.dags.size() != ref.dags.size()) {
            const bool extra = pipe.dags.size() > ref.dags.size();
            const auto& longer = extra ? pipe.dags : ref.dags;
            return OracleMismatch{
                where + ": pipeline collected " + std::to_string(pipe.dags.size()) +
                " networks, reference " + std::to_string(ref.dags.size()) + "; first " +
                (extra ? "spurious" : "missing") + " network " + dag_str(longer[common].dag)};
        }

        std::vector<Dag> sorted;
        sorted.reserve(pipe.dags.size());
        for (const auto& cd : pipe.dags) sorted.push_back(cd.dag);
        std::sort(sorted.begin(), sorted.end());
        windows.push_back(std::move(sorted));
    }

    for (std::size_t k = 0; k + 1 < windows.size(); ++k) {
        if (!std::includes(windows[k + 1].begin(), windows[k + 1].end(), windows[k].begin(),
                           windows[k].end())) {
            std::ostringstream os;
            os << instance_str(ds, cfg, eps[k]) << ": window is not contained in the window at "
               << eps[k + 1];
            return OracleMismatch{os.str()};
        }
    }
    return std::nullopt;
}

OracleRunResult run_oracle_suite(const OracleRunConfig& cfg) {
    if (cfg.instances < 1) throw contract_error("instance count must be positive");
    if (cfg.fixed_n) {
        if (*cfg.fixed_n < 1) throw contract_error("variable count must be positive");
        if (*cfg.fixed_n > 5)
            throw resource_error("reference enumeration supports at most 5 variables");
    }
    std::mt19937_64 rng(cfg.seed);
    OracleRunResult res;
    for (int inst = 0; inst < cfg.instances; ++inst) {
        Dataset ds = [&] {
            if (inst == 0) return uniform8_dataset();
            const int n = cfg.fixed_n ? *cfg.fixed_n : 3 + static_cast<int>(rng() % 3);
            const auto N = static_cast<std::int64_t>(8 + rng() % 193);
            return random_dataset(rng, n, N);
        }();
        for (const Family fam : {Family::bic, Family::bdeu}) {
            ScoringConfig sc;
            sc.family = fam;
            sc.ess = 1.0;
            auto fail = check_instance(ds, sc, cfg.options);
            ++res.checks_run;
            if (fail) {
                fail->description = "instance " + std::to_string(inst) + " (seed " +
                                    std::to_string(cfg.seed) + "): " + fail->description;
                res.first_failure = std::move(fail);
                ++res.instances_run;
                return res;
            }
        }
        ++res.instances_run;
    }
    return res;
}

}  // namespace credible
