#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "credible/analyze.hpp"
#include "credible/errors.hpp"
#include "credible/oracle.hpp"
#include "credible/prune.hpp"
#include "credible/report.hpp"
#include "credible/search.hpp"

namespace credible::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;
constexpr int kExitResource = 4;

int default_workers() {
    if (const char* s = std::getenv("CREDIBLE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v >= 1 && v <= 256) return static_cast<int>(v);
    }
    return 1;
}

// Flags shared by every command that consumes data or scores.
struct InputOpts {
    std::string data;
    std::string schema;
    std::string scores;
    std::string family = "bic";
    double ess = 1.0;
    double bf = 0.0;
    double epsilon = 0.0;
    int palim = -1;
    std::int64_t candidate_limit = 5'000'000;
    int workers = default_workers();
    int n_cap = 24;

    CLI::Option* bf_opt = nullptr;
    CLI::Option* eps_opt = nullptr;
};

void add_input_flags(CLI::App* cmd, InputOpts& in, bool allow_scores) {
    auto* data = cmd->add_option("--data", in.data, "CSV dataset (header row of names)");
    cmd->add_option("--schema", in.schema, "JSON sidecar {column: declared state count}")
        ->needs(data);
    if (allow_scores) {
        cmd->add_option("--scores", in.scores,
                        "pre-generated parent-set score file (alternative to --data)")
            ->excludes(data);
    } else {
        data->required();
    }
    cmd->add_option("--family", in.family, "scoring family")
        ->check(CLI::IsMember({"bic", "bdeu"}))
        ->capture_default_str();
    cmd->add_option("--ess", in.ess, "equivalent sample size (BDeu)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    in.bf_opt = cmd->add_option("--bf", in.bf, "Bayes factor defining the window (default 20)");
    in.eps_opt =
        cmd->add_option("--epsilon", in.epsilon, "window width in nats (alternative to --bf)")
            ->check(CLI::NonNegativeNumber);
    in.bf_opt->excludes(in.eps_opt);
    cmd->add_option("--palim", in.palim, "hard cap on parent-set size")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--candidate-limit", in.candidate_limit,
                    "max scored parent sets per variable")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", in.workers, "threads for table generation")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-cap", in.n_cap, "refuse exact search beyond this many variables")
        ->check(CLI::PositiveNumber);
}

struct Window {
    double epsilon;
    double bf;  // exp(epsilon) when the window was given directly; may overflow to inf
};

Window resolve_window(const InputOpts& in) {
    if (in.bf_opt->count() > 0) return {epsilon_from_bf(in.bf), in.bf};
    if (in.eps_opt->count() > 0) return {in.epsilon, std::exp(in.epsilon)};
    return {epsilon_from_bf(20.0), 20.0};
}

struct TablePack {
    ScoreTable table;
    PruneStats stats;
    bool generated = false;
    std::vector<std::string> warnings;
};

TablePack acquire_table(const InputOpts& in, double epsilon) {
    if (!in.scores.empty()) {
        TablePack pack;
        pack.table = read_score_file(in.scores);
        return pack;
    }
    CsvOptions co;
    co.schema_path = in.schema;
    const Dataset ds = load_csv(in.data, co);
    ScoringConfig cfg;
    cfg.family = in.family == "bdeu" ? Family::bdeu : Family::bic;
    cfg.ess = in.ess;
    GenOptions gen;
    if (in.palim >= 0) gen.palim_override = in.palim;
    gen.candidate_limit = in.candidate_limit;
    gen.workers = in.workers;
    TablePack pack;
    auto [table, stats] = generate_score_table(ds, cfg, epsilon, gen);
    pack.table = std::move(table);
    pack.stats = stats;
    pack.generated = true;
    pack.warnings = ds.warnings;
    return pack;
}

void report_warnings(const TablePack& pack, std::ostream& err) {
    for (const auto& w : pack.warnings) err << "warning: " << w << "\n";
}

nlohmann::json stats_json(const PruneStats& s) {
    nlohmann::json j;
    j["generated"] = s.generated;
    j["survivors"] = s.survivors;
    j["pruned"] = {{"dominated", s.pruned_dominated},
                   {"penalty", s.pruned_penalty},
                   {"instantiation", s.pruned_instantiation},
                   {"size", s.pruned_size},
                   {"entropy", s.pruned_entropy},
                   {"sparse", s.pruned_sparse}};
    return j;
}

void emit_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(path);
    if (!f) throw contract_error("cannot open '" + path + "' for writing");
    f << j.dump(2) << "\n";
    if (!f) throw contract_error("failed while writing '" + path + "'");
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"credible: enumerate all Bayesian networks within a Bayes-factor window "
                 "of optimal and average over them"};
    app.require_subcommand(1);

    // --- score ---------------------------------------------------------------
    auto* score_cmd =
        app.add_subcommand("score", "generate a pruned parent-set score file from data");
    InputOpts score_in;
    add_input_flags(score_cmd, score_in, /*allow_scores=*/false);
    std::string score_out;
    score_cmd->add_option("-o,--output", score_out, "score file destination")->required();

    // --- solve ---------------------------------------------------------------
    auto* solve_cmd = app.add_subcommand("solve", "find one optimal network");
    InputOpts solve_in;
    add_input_flags(solve_cmd, solve_in, /*allow_scores=*/true);
    std::string solve_out;
    solve_cmd->add_option("-o,--output", solve_out, "JSON destination (default stdout)");

    // --- enumerate -------------------------------------------------------------
    auto* enum_cmd = app.add_subcommand(
        "enumerate", "collect every network within the window; optionally group and average");
    InputOpts enum_in;
    add_input_flags(enum_cmd, enum_in, /*allow_scores=*/true);
    std::int64_t enum_limit = kDefaultDagLimit;
    enum_cmd->add_option("--limit", enum_limit, "max networks to collect")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bool want_mec = false;
    bool want_avg = false;
    bool uniform = false;
    std::string edge_csv;
    enum_cmd->add_flag("--mec", want_mec, "group networks into Markov equivalence classes");
    enum_cmd->add_flag("--average", want_avg,
                       "add posterior-weighted edge probabilities (implies --mec)");
    auto* avg_opt = enum_cmd->get_option("--average");
    enum_cmd->add_flag("--uniform", uniform, "weight collected networks uniformly")
        ->needs(avg_opt);
    enum_cmd->add_option("--edge-csv", edge_csv, "write the edge-probability matrix as CSV")
        ->needs(avg_opt);
    std::string enum_out;
    enum_cmd->add_option("-o,--output", enum_out, "JSON destination (default stdout)");

    // --- oracle-check ------------------------------------------------------------
    auto* oracle_cmd = app.add_subcommand(
        "oracle-check", "compare the pipeline against brute-force reference enumeration");
    OracleRunConfig oracle_cfg;
    oracle_cmd->add_option("--seed", oracle_cfg.seed, "instance generator seed")
        ->capture_default_str();
    oracle_cmd->add_option("--instances", oracle_cfg.instances, "instances to run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    int oracle_n = 0;
    auto* oracle_n_opt =
        oracle_cmd->add_option("--n", oracle_n, "fix the variable count (default mixes 3..5)");
    bool inject_fault = false;
    oracle_cmd->add_flag("--inject-fault", inject_fault,
                         "deliberately misprune to demonstrate the checker catches it");
    std::string oracle_out;
    oracle_cmd->add_option("-o,--output", oracle_out, "JSON destination (default stdout)");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    // One input source is mandatory: --data (generate) or --scores (reuse).
    const InputOpts* active_in = solve_cmd->parsed()  ? &solve_in
                                 : enum_cmd->parsed() ? &enum_in
                                                      : nullptr;
    if (active_in && active_in->data.empty() && active_in->scores.empty()) {
        err << "error: provide --data or --scores\n";
        return kExitUsage;
    }

    try {
        if (score_cmd->parsed()) {
            const Window win = resolve_window(score_in);
            const TablePack pack = acquire_table(score_in, win.epsilon);
            report_warnings(pack, err);
            write_score_file(pack.table, score_out);
            nlohmann::json j;
            j["epsilon"] = win.epsilon;
            j["family"] = score_in.family;
            j["ess"] = score_in.ess;
            j["palim"] = pack.table.palim;
            j["variables"] = pack.table.n();
            j["output"] = score_out;
            j["stats"] = stats_json(pack.stats);
            out << j.dump(2) << "\n";
            return kExitOk;
        }

        if (solve_cmd->parsed()) {
            const Window win = resolve_window(solve_in);
            const TablePack pack = acquire_table(solve_in, win.epsilon);
            report_warnings(pack, err);
            const OptResult res = solve_opt(pack.table, solve_in.n_cap);
            nlohmann::json j;
            j["opt"] = res.opt;
            j["names"] = pack.table.names;
            auto parents = nlohmann::json::array();
            for (const Mask m : res.witness.parents) parents.push_back(mask_to_indices(m));
            j["parents"] = std::move(parents);
            emit_json(j, solve_out, out);
            return kExitOk;
        }

        if (enum_cmd->parsed()) {
            const Window win = resolve_window(enum_in);
            const TablePack pack = acquire_table(enum_in, win.epsilon);
            report_warnings(pack, err);
            const CredibleSet cs =
                enumerate_credible(pack.table, win.epsilon, enum_limit, enum_in.n_cap);
            if (cs.truncated)
                err << "warning: collection truncated at " << enum_limit
                    << " networks; results are conditional on the collected set\n";
            std::optional<std::vector<MecGroup>> groups;
            std::optional<AveragingReport> avg;
            if (want_mec || want_avg) groups = group_mecs(cs);
            if (want_avg) avg = average(cs, uniform);
            const nlohmann::json j = credible_report(cs, win.bf, groups ? &*groups : nullptr,
                                                     avg ? &*avg : nullptr);
            emit_json(j, enum_out, out);
            if (!edge_csv.empty()) {
                std::ofstream f(edge_csv);
                if (!f) throw contract_error("cannot open '" + edge_csv + "' for writing");
                f << edge_prob_csv(*avg, pack.table.names);
                if (!f) throw contract_error("failed while writing '" + edge_csv + "'");
            }
            return kExitOk;
        }

        // oracle-check
        if (oracle_n_opt->count() > 0) oracle_cfg.fixed_n = oracle_n;
        oracle_cfg.options.fault_subset_prune_at_zero = inject_fault;
        const OracleRunResult res = run_oracle_suite(oracle_cfg);
        nlohmann::json j;
        j["instances"] = res.instances_run;
        j["checks"] = res.checks_run;
        j["ok"] = !res.first_failure.has_value();
        if (res.first_failure)
            j["failure"] = res.first_failure->description;
        else
            j["failure"] = nullptr;
        emit_json(j, oracle_out, out);
        if (res.first_failure) {
            err << "counterexample: " << res.first_failure->description << "\n";
            return kExitCheckFailed;
        }
        return kExitOk;
    } catch (const parse_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitContract;
    } catch (const contract_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitContract;
    } catch (const resource_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return kExitContract;
    }
}

}  // namespace credible::cli
