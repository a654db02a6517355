#include "credible/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace credible {

namespace {

constexpr std::uint64_t kMaxStateSpace = std::uint64_t{1} << 62;
constexpr std::int64_t kMaxTargetStates = 1 << 20;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

// Mixed-radix strides over an ascending variable list; throws on index overflow.
std::vector<std::uint64_t> make_strides(const Dataset& ds, const std::vector<int>& vars) {
    std::vector<std::uint64_t> strides(vars.size());
    std::uint64_t stride = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        strides[i] = stride;
        const auto r = static_cast<std::uint64_t>(ds.arities[vars[i]]);
        if (r == 0 || stride > kMaxStateSpace / r)
            throw resource_error("joint state space of the queried variable set overflows the index range");
        stride *= r;
    }
    return strides;
}

// sum over groups of c * ln(c), grouping rows by their joint state over `vars`.
double sum_c_ln_c(const Dataset& ds, const std::vector<int>& vars) {
    if (vars.empty()) {
        const double N = static_cast<double>(ds.N());
        return N * std::log(N);
    }
    const auto strides = make_strides(ds, vars);
    std::unordered_map<std::uint64_t, std::int64_t> counts;
    counts.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            key += strides[i] * row[vars[i]];
        ++counts[key];
    }
    double s = 0.0;
    for (const auto& [key, c] : counts) {
        (void)key;
        const double cd = static_cast<double>(c);
        s += cd * std::log(cd);
    }
    return s;
}

void check_vars(const Dataset& ds, const std::vector<int>& vars) {
    for (int v : vars)
        if (v < 0 || v >= ds.n()) throw contract_error("variable index out of range");
}

}  // namespace

std::vector<int> mask_to_indices(Mask m) {
    std::vector<int> out;
    for (int v = 0; m != 0; ++v, m >>= 1)
        if (m & 1u) out.push_back(v);
    return out;
}

Mask mask_of(const std::vector<int>& indices) {
    Mask m = 0;
    for (int v : indices) {
        if (v < 0 || v > kMaxVars) throw contract_error("variable index out of mask range");
        m |= bit(v);
    }
    return m;
}

Dataset make_dataset(std::vector<std::string> names, std::vector<std::int64_t> arities,
                     std::vector<std::vector<std::uint32_t>> rows) {
    if (names.empty()) throw contract_error("dataset needs at least one variable");
    if (names.size() != arities.size())
        throw contract_error("names and arities disagree on the variable count");
    if (rows.empty()) throw contract_error("dataset needs at least one row");
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) throw contract_error("empty variable name");
        if (!seen.insert(name).second) throw contract_error("duplicate variable name: " + name);
    }
    for (std::size_t i = 0; i < arities.size(); ++i)
        if (arities[i] < 1) throw contract_error("arity must be >= 1 for variable " + names[i]);
    for (const auto& row : rows) {
        if (row.size() != names.size())
            throw contract_error("row width disagrees with the variable count");
        for (std::size_t i = 0; i < row.size(); ++i)
            if (static_cast<std::int64_t>(row[i]) >= arities[i])
                throw contract_error("state index out of declared range for variable " + names[i]);
    }
    Dataset ds;
    ds.names = std::move(names);
    ds.arities = std::move(arities);
    ds.rows = std::move(rows);
    return ds;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty file: " + path, 1);
    line = strip_cr(line);
    auto names = split_csv_line(line);
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) throw parse_error("empty column name in header", 1);
        if (!seen.insert(name).second) throw parse_error("duplicate column name: " + name, 1);
    }
    const std::size_t n = names.size();

    std::vector<std::unordered_map<std::string, std::uint32_t>> state_index(n);
    std::vector<std::vector<std::uint32_t>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;  // tolerate blank lines (e.g. trailing newline)
        auto fields = split_csv_line(line);
        if (fields.size() != n)
            throw parse_error("expected " + std::to_string(n) + " fields, got " +
                                  std::to_string(fields.size()),
                              lineno);
        std::vector<std::uint32_t> row(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (fields[i] == options.missing_token)
                throw parse_error("missing value for column '" + names[i] +
                                      "' (complete rows are required)",
                                  lineno);
            auto [it, inserted] = state_index[i].try_emplace(
                fields[i], static_cast<std::uint32_t>(state_index[i].size()));
            (void)inserted;
            row[i] = it->second;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error("no data rows in " + path, lineno);

    std::vector<std::int64_t> arities(n);
    for (std::size_t i = 0; i < n; ++i)
        arities[i] = static_cast<std::int64_t>(state_index[i].size());

    if (!options.schema_path.empty()) {
        std::ifstream schema_in(options.schema_path);
        if (!schema_in) throw parse_error("cannot open schema file: " + options.schema_path);
        nlohmann::json schema;
        try {
            schema_in >> schema;
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("bad schema JSON: ") + e.what());
        }
        if (!schema.is_object()) throw parse_error("schema must be a JSON object of name -> arity");
        for (const auto& [name, value] : schema.items()) {
            auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end())
                throw contract_error("schema names unknown column: " + name);
            const auto col = static_cast<std::size_t>(it - names.begin());
            if (!value.is_number_integer() || value.get<std::int64_t>() < 1)
                throw contract_error("schema arity for " + name + " must be a positive integer");
            const auto declared = value.get<std::int64_t>();
            if (declared < arities[col])
                throw contract_error("schema declares " + std::to_string(declared) +
                                     " states for " + name + " but " +
                                     std::to_string(arities[col]) + " were observed");
            arities[col] = declared;
        }
    }

    auto ds = make_dataset(std::move(names), std::move(arities), std::move(rows));
    for (int i = 0; i < ds.n(); ++i)
        if (ds.arities[i] == 1)
            ds.warnings.push_back("column '" + ds.names[i] +
                                  "' has a single value; state count 1 retained");
    return ds;
}

CountTable count(const Dataset& ds, int target, Mask parents) {
    return count(ds, target, mask_to_indices(parents));
}

CountTable count(const Dataset& ds, int target, const std::vector<int>& parents_in) {
    if (target < 0 || target >= ds.n()) throw contract_error("target index out of range");
    std::vector<int> parents = parents_in;
    std::sort(parents.begin(), parents.end());
    check_vars(ds, parents);
    for (int p : parents)
        if (p == target) throw contract_error("target cannot be its own parent");

    const auto r_target = ds.arities[target];
    if (r_target > kMaxTargetStates)
        throw resource_error("target state space too large to tabulate");

    CountTable ct;
    ct.target = target;
    ct.parents = parents;
    const auto strides = make_strides(ds, parents);
    ct.r_parents = 1;
    for (int p : parents) ct.r_parents *= static_cast<std::uint64_t>(ds.arities[p]);

    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        std::uint64_t j = 0;
        for (std::size_t i = 0; i < parents.size(); ++i)
            j += strides[i] * row[parents[i]];
        auto [it, inserted] = index.try_emplace(j, ct.cells.size());
        if (inserted) {
            CountCell cell;
            cell.j = j;
            cell.n_ij = 0;
            cell.n_ijk.assign(static_cast<std::size_t>(r_target), 0);
            ct.cells.push_back(std::move(cell));
        }
        auto& cell = ct.cells[it->second];
        ++cell.n_ij;
        ++cell.n_ijk[row[target]];
    }
    std::sort(ct.cells.begin(), ct.cells.end(),
              [](const CountCell& a, const CountCell& b) { return a.j < b.j; });
    return ct;
}

double entropy(const Dataset& ds, Mask vars) { return entropy(ds, mask_to_indices(vars)); }

double entropy(const Dataset& ds, const std::vector<int>& vars_in) {
    if (vars_in.empty()) throw contract_error("entropy requires a nonempty variable set");
    std::vector<int> vars = vars_in;
    std::sort(vars.begin(), vars.end());
    check_vars(ds, vars);
    const double N = static_cast<double>(ds.N());
    // H = ln N - (1/N) * sum c ln c; exact 0 for a constant column.
    return std::log(N) - sum_c_ln_c(ds, vars) / N;
}

double conditional_entropy(const Dataset& ds, Mask x, Mask given) {
    if ((x & given) != 0) throw contract_error("conditioning set overlaps the query set");
    if (x == 0) throw contract_error("conditional entropy requires a nonempty query set");
    const auto xv = mask_to_indices(x);
    const auto gv = mask_to_indices(given);
    check_vars(ds, xv);
    check_vars(ds, gv);
    std::vector<int> joint = xv;
    joint.insert(joint.end(), gv.begin(), gv.end());
    std::sort(joint.begin(), joint.end());
    // H(x|g) = H(x ∪ g) − H(g) = (S_g − S_joint)/N with S_m = sum c ln c; the shared
    // ln N cancels, which keeps functional dependence at exactly zero.
    const double N = static_cast<double>(ds.N());
    return (sum_c_ln_c(ds, gv) - sum_c_ln_c(ds, joint)) / N;
}

double conditional_entropy(const Dataset& ds, const std::vector<int>& x,
                           const std::vector<int>& given) {
    return conditional_entropy(ds, mask_of(x), mask_of(given));
}

}  // namespace credible
