#include "lwo/cli.hpp"

#include "lwo/error.hpp"
#include "lwo/json_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace lwo::cli {

namespace {

using io::json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Options {
    std::string input;
    std::string values;
    std::string cert;
    std::string config;
    std::string output;
    std::string format;
    std::string mu = "1";
    std::string eps = "1";
    std::string C = "1";
    std::string r0;
    std::string s;
    std::string fixed_rows;
    std::int64_t d = 0;
    std::int64_t k = 0;
    std::int64_t K = 8;
    std::int64_t k0 = 8;
    std::int64_t b = 2;
    std::int64_t ladder_span = 12;
    std::size_t n = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    double B = 1.0;
    unsigned threads = 1;
    bool timing = false;
};

struct Artifact {
    std::string text;
    int code = ok;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw UsageError("cannot write '" + tmp.string() + "'");
        }
        f << text;
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw ResourceError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw ResourceError("rename to '" + path + "' failed: " + ec.message());
    }
}

std::string fmt(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Rational rational_flag(const std::string& text, const char* name) {
    try {
        return Rational::parse(text);
    } catch (const std::invalid_argument&) {
        throw UsageError(std::string("--") + name + ": not a rational: '" + text + "'");
    }
}

BigInt bigint_flag(const std::string& text, const char* name) {
    try {
        return parse_bigint(text);
    } catch (const std::invalid_argument&) {
        throw UsageError(std::string("--") + name + ": not an integer: '" + text + "'");
    }
}

Multiset read_multiset(const Options& o) {
    if (o.input.empty() == o.values.empty()) {
        throw UsageError("exactly one of --input and --values is required");
    }
    if (!o.values.empty()) {
        std::string text = o.values;
        std::replace(text.begin(), text.end(), ',', '\n');
        return parse_multiset(text);
    }
    const std::string text = read_file(o.input);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        return io::decode_multiset(io::parse(text));
    }
    return parse_multiset(text);
}

std::vector<std::vector<std::int64_t>> parse_rows(const std::string& text) {
    std::vector<std::vector<std::int64_t>> rows;
    if (text.empty()) {
        return rows;
    }
    std::stringstream all(text);
    std::string row;
    while (std::getline(all, row, ';')) {
        std::vector<std::int64_t> r;
        std::stringstream cells(row);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            const auto v = to_i64(bigint_flag(cell, "fixed-rows"));
            if (!v) {
                throw UsageError("--fixed-rows: entry out of range");
            }
            r.push_back(*v);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

unsigned thread_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

WalkParams walk_params(const std::string& mu) { return WalkParams(rational_flag(mu, "mu")); }

json budget_json(const Options& o, bool with_walk) {
    json b = {{"d", o.d}};
    if (with_walk) {
        b["k"] = o.k;
        b["eps"] = o.eps;
        b["mu"] = rational_flag(o.mu, "mu").str();
        b["C"] = rational_flag(o.C, "C").str();
    }
    return b;
}

Budget decode_budget(const json& j) {
    Budget b;
    b.d = j.at("d").get<std::int64_t>();
    if (j.contains("k")) {
        b.k = j.at("k").get<std::int64_t>();
        b.eps = io::decode_rational(j.at("eps"));
        b.params = WalkParams(io::decode_rational(j.at("mu")));
        b.C = io::decode_rational(j.at("C"));
    }
    return b;
}

// Structural clauses must always hold; conditional ones only count when the
// theorem's hypothesis was confirmed exactly.
int verdict(const VerificationReport& r) {
    if (!r.structural_passed()) {
        return verification;
    }
    if (r.hypothesis_holds.value_or(false) && !r.passed()) {
        return verification;
    }
    return ok;
}

Artifact emit(json j, int code = ok) { return {io::dump(j), code}; }

Artifact cmd_concentration(const Options& o) {
    const Multiset v = read_multiset(o);
    const WalkParams p = walk_params(o.mu);
    const auto c = concentration(v, p);
    return emit({{"command", "concentration"},
                 {"input", io::encode(v)},
                 {"mu", p.mu().str()},
                 {"a", c.best_atom},
                 {"p", c.probability.str()}});
}

Artifact cmd_inverse0(const Options& o) {
    const Multiset v = read_multiset(o);
    const auto cert = zeroth_inverse(v);
    const Budget budget{.d = o.d};
    const auto rep = verify_certificate(cert, v, budget);
    return emit({{"command", "inverse0"},
                 {"input", io::encode(v)},
                 {"budget", budget_json(o, false)},
                 {"certificate", io::encode(cert)},
                 {"report", io::encode(rep)}},
                verdict(rep));
}

Budget full_budget(const Options& o) {
    return Budget{.d = o.d,
                  .k = o.k,
                  .eps = rational_flag(o.eps, "eps"),
                  .params = walk_params(o.mu),
                  .C = rational_flag(o.C, "C")};
}

Artifact cmd_inverse1(const Options& o) {
    const Multiset v = read_multiset(o);
    const Budget budget = full_budget(o);
    json j = {{"command", "inverse1"}, {"input", io::encode(v)}, {"budget", budget_json(o, true)}};
    try {
        const auto cert = first_inverse(v, *budget.params, o.d, o.k);
        const auto rep = verify_certificate(cert, v, budget);
        j["certificate"] = io::encode(cert);
        j["report"] = io::encode(rep);
        return emit(j, verdict(rep));
    } catch (const RankOverflowError& e) {
        json w = json::array();
        for (const auto& x : e.w()) {
            w.push_back(io::encode(x));
        }
        j["failure"] = {{"kind", "rank_overflow"}, {"reason", e.what()}, {"w", w}, {"extending", e.extending()}};
        return emit(j, verification);
    }
}

Artifact cmd_inverse2(const Options& o) {
    const Multiset v = read_multiset(o);
    const Budget budget = full_budget(o);
    const InverseConstants constants{.C = budget.C, .k0 = o.k0, .K = o.K};
    json j = {{"command", "inverse2"},
              {"input", io::encode(v)},
              {"budget", budget_json(o, true)},
              {"constants", {{"K", o.K}, {"k0", o.k0}}}};
    try {
        const auto outcome = second_inverse(v, *budget.params, o.d, o.k, budget.eps, constants);
        if (const auto* f = std::get_if<SecondInverseFailure>(&outcome)) {
            j["failure"] = io::encode(*f);
            return emit(j, verification);
        }
        const auto& cert = std::get<GapCertificate>(outcome);
        const auto rep = verify_certificate(cert, v, budget);
        j["certificate"] = io::encode(cert);
        j["report"] = io::encode(rep);
        return emit(j, verdict(rep));
    } catch (const RankOverflowError& e) {
        j["failure"] = {{"kind", "rank_overflow"}, {"reason", e.what()}, {"extending", e.extending()}};
        return emit(j, verification);
    }
}

DiscretizeOptions discretize_options(std::int64_t ladder_span) {
    if (ladder_span < 0) {
        throw UsageError("--ladder-span must be non-negative");
    }
    DiscretizeOptions opts;
    opts.ladder_span = ladder_span;
    return opts;
}

Artifact cmd_discretize(const Options& o) {
    if (o.input.empty()) {
        throw UsageError("--input is required");
    }
    const Gap p = io::decode_gap(io::parse(read_file(o.input)));
    const BigInt r0 = bigint_flag(o.r0, "r0");
    const BigInt s = bigint_flag(o.s, "s");
    const auto opts = discretize_options(o.ladder_span);
    json j = {{"command", "discretize"},
              {"input", io::encode(p)},
              {"r0", io::encode(r0)},
              {"s", io::encode(s)},
              {"b", o.b},
              {"ladder_span", o.ladder_span}};
    const auto outcome = discretize(p, r0, s, o.b, opts);
    if (const auto* f = std::get_if<DiscretizationFailure>(&outcome)) {
        j["failure"] = io::encode(*f);
        return emit(j, verification);
    }
    const auto& res = std::get<DiscretizationResult>(outcome);
    const auto rep = verify_discretization(res, p, s, opts);
    j["result"] = io::encode(res);
    j["report"] = io::encode(rep);
    return emit(j, rep.passed() ? ok : verification);
}

Artifact cmd_verify(const Options& o) {
    const json a = io::parse(read_file(o.cert));
    if (!a.is_object() || !a.contains("command")) {
        throw ParseError("not an artifact: missing 'command'");
    }
    const std::string command = a.at("command").get<std::string>();
    json out = {{"command", "verify"}, {"artifact", command}};
    try {
        if (command == "discretize") {
            const Gap p = io::decode_gap(a.at("input"));
            const BigInt s = io::decode_bigint(a.at("s"));
            const auto rep = verify_discretization(io::decode_discretization(a.at("result")), p, s,
                                                   discretize_options(a.at("ladder_span").get<std::int64_t>()));
            out["report"] = io::encode(rep);
            return emit(out, rep.passed() ? ok : verification);
        }
        if (command != "inverse0" && command != "inverse1" && command != "inverse2") {
            throw ParseError("no certificate in a '" + command + "' artifact");
        }
        if (!a.contains("certificate")) {
            throw ParseError("artifact records a failure, not a certificate");
        }
        const Multiset v = io::decode_multiset(a.at("input"));
        const Budget budget = decode_budget(a.at("budget"));
        const json& c = a.at("certificate");
        const std::string kind = c.at("kind").get<std::string>();
        VerificationReport rep;
        if (kind == "cube") {
            rep = verify_certificate(io::decode_cube(c), v, budget);
        } else if (kind == "dilate_cover") {
            rep = verify_certificate(io::decode_dilate(c), v, budget);
        } else if (kind == "gap") {
            rep = verify_certificate(io::decode_gap_certificate(c), v, budget);
        } else {
            throw ParseError("unknown certificate kind '" + kind + "'");
        }
        out["report"] = io::encode(rep);
        return emit(out, verdict(rep));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed artifact: ") + e.what());
    }
}

// One sweep/CSV row.
struct Row {
    std::size_t n = 0;
    std::string mu;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string quantity;
    double estimate = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::optional<double> comparator;
    std::optional<double> runtime_ms;
};

const char* const csv_header = "n,mu,trials,seed,quantity,estimate,ci_low,ci_high,comparator_value,runtime_ms\n";

std::string csv_line(const Row& r) {
    return std::to_string(r.n) + "," + r.mu + "," + std::to_string(r.trials) + "," + std::to_string(r.seed) + "," +
           r.quantity + "," + fmt(r.estimate) + "," + fmt(r.ci_low) + "," + fmt(r.ci_high) + "," +
           (r.comparator ? fmt(*r.comparator) : "") + "," + (r.runtime_ms ? fmt(*r.runtime_ms) : "") + "\n";
}

json row_json(const Row& r) {
    json j = {{"n", r.n},
              {"mu", r.mu},
              {"trials", r.trials},
              {"seed", r.seed},
              {"quantity", r.quantity},
              {"estimate", fmt(r.estimate)},
              {"ci_low", fmt(r.ci_low)},
              {"ci_high", fmt(r.ci_high)}};
    j["comparator_value"] = r.comparator ? json(fmt(*r.comparator)) : json(nullptr);
    j["runtime_ms"] = r.runtime_ms ? json(fmt(*r.runtime_ms)) : json(nullptr);
    return j;
}

template <class F>
Row timed(bool timing, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Row r = f();
    if (timing) {
        r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    return r;
}

Row fill(Row r, const McEstimate& e) {
    r.trials = e.trials;
    r.seed = e.seed;
    r.estimate = e.estimate;
    r.ci_low = e.ci_low;
    r.ci_high = e.ci_high;
    return r;
}

// Exact oracle where it is affordable, delta(mu)^n beyond.
double singularity_comparator(std::size_t n, const WalkParams& p) {
    if (n <= 3) {
        return brute_force_singularity(n, p).to_double();
    }
    return std::pow(delta_mu(p), static_cast<double>(n));
}

Row singularity_row(std::size_t n, const WalkParams& p, std::uint64_t trials, std::uint64_t seed,
                    const std::vector<std::vector<std::int64_t>>& fixed, unsigned threads) {
    Row r{.n = n, .mu = p.mu().str(), .quantity = "singularity"};
    r = fill(r, mc_singularity(n, p, trials, seed, fixed, threads));
    r.comparator = singularity_comparator(n, p);
    return r;
}

Row tail_row(std::size_t n, const WalkParams& p, double B, std::uint64_t trials, std::uint64_t seed,
             unsigned threads) {
    Row r{.n = n, .mu = p.mu().str(), .quantity = "sigma_tail:B=" + fmt(B)};
    const auto e = mc_sigma_tail(n, p, B, trials, seed, threads);
    r = fill(r, e);
    r.comparator = e.comparators.empty() ? std::optional<double>() : e.comparators.front().value;
    return r;
}

Row concentration_row(std::size_t n, const WalkParams& p, std::uint64_t seed) {
    Multiset v;
    for (std::size_t i = 1; i <= n; ++i) {
        v.add(from_i64(static_cast<std::int64_t>(i)));
    }
    Multiset ones;
    if (n > 0) {
        ones.add(BigInt(1), n);
    }
    const double x = concentration(v, p).probability.to_double();
    return Row{.n = n,
               .mu = p.mu().str(),
               .trials = 0,
               .seed = seed,
               .quantity = "concentration",
               .estimate = x,
               .ci_low = x,
               .ci_high = x,
               .comparator = concentration(ones, p).probability.to_double()};
}

std::string table(const std::vector<Row>& rows, const std::string& format) {
    if (format == "json") {
        json a = json::array();
        for (const auto& r : rows) {
            a.push_back(row_json(r));
        }
        return io::dump(a);
    }
    std::string s = csv_header;
    for (const auto& r : rows) {
        s += csv_line(r);
    }
    return s;
}

void require_positive(std::uint64_t x, const char* name) {
    if (x == 0) {
        throw UsageError(std::string("--") + name + " must be positive");
    }
}

Artifact cmd_mc_sing(const Options& o) {
    require_positive(o.n, "n");
    require_positive(o.trials, "trials");
    const WalkParams p = walk_params(o.mu);
    const auto fixed = parse_rows(o.fixed_rows);
    const unsigned threads = thread_count(o.threads);
    if (o.format == "json") {
        const auto e = mc_singularity(o.n, p, o.trials, o.seed, fixed, threads);
        json j = {{"command", "mc-sing"},
                  {"n", o.n},
                  {"mu", p.mu().str()},
                  {"seed", o.seed},
                  {"fixed_rows", fixed},
                  {"estimate", io::encode(e)}};
        j["exact"] = o.n <= 3 ? json(brute_force_singularity(o.n, p).str()) : json(nullptr);
        return emit(j);
    }
    return {table({timed(o.timing, [&] { return singularity_row(o.n, p, o.trials, o.seed, fixed, threads); })}, "csv")};
}

Artifact cmd_mc_tail(const Options& o) {
    require_positive(o.n, "n");
    require_positive(o.trials, "trials");
    const WalkParams p = walk_params(o.mu);
    const unsigned threads = thread_count(o.threads);
    if (o.format == "json") {
        return emit({{"command", "mc-tail"},
                     {"n", o.n},
                     {"mu", p.mu().str()},
                     {"B", fmt(o.B)},
                     {"seed", o.seed},
                     {"estimate", io::encode(mc_sigma_tail(o.n, p, o.B, o.trials, o.seed, threads))}});
    }
    return {table({timed(o.timing, [&] { return tail_row(o.n, p, o.B, o.trials, o.seed, threads); })}, "csv")};
}

template <class T>
std::vector<T> range_of(const json& cfg, const char* key, std::vector<T> fallback) {
    if (!cfg.contains(key)) {
        if (fallback.empty()) {
            throw UsageError(std::string("sweep config: '") + key + "' is required");
        }
        return fallback;
    }
    const json& v = cfg.at(key);
    std::vector<T> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            out.push_back(x.get<T>());
        }
    } else {
        out.push_back(v.get<T>());
    }
    if (out.empty()) {
        throw UsageError(std::string("sweep config: '") + key + "' is an empty range");
    }
    return out;
}

Artifact cmd_sweep(const Options& o) {
    if (o.config.empty()) {
        throw UsageError("--config is required");
    }
    const json cfg = io::parse(read_file(o.config));
    if (!cfg.is_object()) {
        throw UsageError("sweep config must be a JSON object");
    }
    std::vector<Row> rows;
    try {
        const std::string quantity = cfg.value("quantity", std::string("concentration"));
        const auto ns = range_of<std::size_t>(cfg, "n", {});
        std::vector<WalkParams> mus;
        for (const auto& m : range_of<json>(cfg, "mu", {json("1")})) {
            mus.push_back(walk_params(m.is_string() ? m.get<std::string>() : m.dump()));
        }
        const std::uint64_t seed = cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>() : o.seed;
        const std::uint64_t trials = cfg.value("trials", o.trials);
        const unsigned threads = thread_count(cfg.value("threads", o.threads));
        std::vector<std::function<Row()>> jobs;
        for (const auto n : ns) {
            for (const auto& p : mus) {
                if (quantity == "concentration") {
                    jobs.push_back([=] { return concentration_row(n, p, seed); });
                } else if (quantity == "singularity") {
                    require_positive(n, "n");
                    require_positive(trials, "trials");
                    jobs.push_back([=] { return singularity_row(n, p, trials, seed, {}, threads); });
                } else if (quantity == "sigma_tail") {
                    require_positive(n, "n");
                    require_positive(trials, "trials");
                    for (const double B : range_of<double>(cfg, "B", {o.B})) {
                        jobs.push_back([=] { return tail_row(n, p, B, trials, seed, threads); });
                    }
                } else {
                    throw UsageError("sweep config: unknown quantity '" + quantity + "'");
                }
            }
        }
        for (const auto& job : jobs) {
            rows.push_back(timed(o.timing, job));
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("sweep config: ") + e.what());
    }
    return {table(rows, o.format.empty() ? "csv" : o.format)};
}

std::uint64_t default_seed() {
    const char* env = std::getenv("LWO_SEED");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || *env == '-') {
        throw UsageError(std::string("LWO_SEED is not an unsigned integer: '") + env + "'");
    }
    return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    try {
        o.seed = default_seed();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }

    CLI::App app{"Littlewood-Offord toolkit: exact concentration, inverse certificates, discretization, random matrices",
                 "lwo"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    auto common = [&](CLI::App* sub) {
        sub->add_option("--output", o.output, "Write the artifact here (atomically) instead of stdout");
        sub->add_flag("--timing", o.timing, "Fill runtime_ms in CSV rows (makes output time dependent)");
    };
    auto multiset_input = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "Multiset file: one integer per line, 'vxm' for multiplicity, or JSON");
        sub->add_option("--values", o.values, "Inline multiset, comma separated");
    };
    auto mu = [&](CLI::App* sub) { sub->add_option("--mu", o.mu, "Laziness parameter in (0, 1]")->capture_default_str(); };
    auto dk = [&](CLI::App* sub) {
        sub->add_option("--d", o.d, "Rank budget")->required()->check(CLI::PositiveNumber);
        sub->add_option("--k", o.k, "Scale parameter k")->required()->check(CLI::PositiveNumber);
        sub->add_option("--eps", o.eps, "Exponent slack epsilon")->capture_default_str();
        sub->add_option("--C", o.C, "Hypothesis constant C in P >= C k^-d")->capture_default_str();
    };

    std::vector<std::pair<CLI::App*, std::function<Artifact(const Options&)>>> commands;

    auto* conc = app.add_subcommand("concentration", "Exact concentration probability P_mu(v) and its argmax");
    multiset_input(conc);
    mu(conc);
    common(conc);
    commands.emplace_back(conc, cmd_concentration);

    auto* inv0 = app.add_subcommand("inverse0", "Cube certificate (zeroth inverse)");
    multiset_input(inv0);
    inv0->add_option("--d", o.d, "Size budget for the verifier")->required()->check(CLI::PositiveNumber);
    common(inv0);
    commands.emplace_back(inv0, cmd_inverse0);

    auto* inv1 = app.add_subcommand("inverse1", "Dilate-cover certificate (first inverse)");
    multiset_input(inv1);
    mu(inv1);
    dk(inv1);
    common(inv1);
    commands.emplace_back(inv1, cmd_inverse1);

    auto* inv2 = app.add_subcommand("inverse2", "GAP certificate (second inverse)");
    multiset_input(inv2);
    mu(inv2);
    dk(inv2);
    inv2->add_option("--K", o.K, "Torsion threshold K >= 2")->capture_default_str();
    inv2->add_option("--k0", o.k0, "Smallest admissible k")->capture_default_str();
    common(inv2);
    commands.emplace_back(inv2, cmd_inverse2);

    auto* ver = app.add_subcommand("verify", "Re-verify an artifact written by inverse0/1/2 or discretize");
    ver->add_option("--cert", o.cert, "Artifact JSON file")->required();
    common(ver);
    commands.emplace_back(ver, cmd_verify);

    auto* disc = app.add_subcommand("discretize", "Split a symmetric GAP into small and sparse parts");
    disc->add_option("--input", o.input, "Gap JSON file")->required();
    disc->add_option("--r0", o.r0, "Target scale r0")->required();
    disc->add_option("--s", o.s, "Sparseness multiplier S")->required();
    disc->add_option("--b", o.b, "Escalation base b >= 2")->capture_default_str();
    disc->add_option("--ladder-span", o.ladder_span, "Scale ladder rungs on each side of r0")->capture_default_str();
    common(disc);
    commands.emplace_back(disc, cmd_discretize);

    auto mc = [&](CLI::App* sub) {
        sub->add_option("--n", o.n, "Matrix size")->required();
        mu(sub);
        sub->add_option("--trials", o.trials, "Monte Carlo trials")->required();
        sub->add_option("--seed", o.seed, "Seed (default: $LWO_SEED, else 0)");
        sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        common(sub);
    };
    auto* sing = app.add_subcommand("mc-sing", "Monte Carlo P(M singular)");
    mc(sing);
    sing->add_option("--fixed-rows", o.fixed_rows, "Fixed last rows, e.g. '1,1,1;0,1,0'");
    commands.emplace_back(sing, cmd_mc_sing);

    auto* tail = app.add_subcommand("mc-tail", "Monte Carlo P(sigma_n <= n^-B)");
    mc(tail);
    tail->add_option("--B", o.B, "Tail exponent B")->capture_default_str();
    commands.emplace_back(tail, cmd_mc_tail);

    auto* sweep = app.add_subcommand("sweep", "Cross-product sweep from a JSON config");
    sweep->add_option("--config", o.config, "Sweep config JSON")->required();
    sweep->add_option("--seed", o.seed, "Seed when the config has none");
    sweep->add_option("--trials", o.trials, "Trials when the config has none");
    sweep->add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
    sweep->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    common(sweep);
    commands.emplace_back(sweep, cmd_sweep);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto active = app.get_subcommands();
        err << (active.empty() ? app.help() : active.front()->help());
        return usage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const auto it = std::find_if(commands.begin(), commands.end(), [&](const auto& c) { return c.first == chosen; });
    const bool is_table = chosen == sing || chosen == tail || chosen == sweep;
    if (!is_table && !o.format.empty() && o.format != "json") {
        err << "error: --format csv is only available for mc-sing, mc-tail and sweep\n";
        return usage;
    }

    try {
        const Artifact a = it->second(o);
        if (o.output.empty()) {
            out << a.text;
        } else {
            write_atomic(o.output, a.text);
        }
        if (a.code == verification) {
            err << "verification failed; see the artifact's report\n";
        }
        return a.code;
    } catch (const RankOverflowError& e) {
        err << "error: " << e.what() << "\n";
        return verification;
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << " (bracket [" << fmt(e.low()) << ", " << fmt(e.high()) << "])\n";
        return resource;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << "\n";
        return resource;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return resource;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
}

}  // namespace lwo::cli
