#include "lwo/json_io.hpp"

#include "lwo/error.hpp"

namespace lwo::io {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

template <class T>
T number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer() && !(std::is_same_v<T, bool> && v.is_boolean())) {
        throw ParseError(std::string("field '") + key + "' must be an integer");
    }
    return v.get<T>();
}

std::vector<std::int64_t> ints(const json& j) {
    if (!j.is_array()) {
        throw ParseError("expected an integer array");
    }
    std::vector<std::int64_t> out;
    for (const auto& x : j) {
        if (!x.is_number_integer()) {
            throw ParseError("expected an integer array");
        }
        out.push_back(x.get<std::int64_t>());
    }
    return out;
}

std::vector<BigInt> bigints(const json& j) {
    if (!j.is_array()) {
        throw ParseError("expected an array of integers");
    }
    std::vector<BigInt> out;
    for (const auto& x : j) {
        out.push_back(decode_bigint(x));
    }
    return out;
}

json encode_all(const std::vector<BigInt>& xs) {
    json a = json::array();
    for (const auto& x : xs) {
        a.push_back(encode(x));
    }
    return a;
}

json encode_clauses(const std::vector<Clause>& clauses) {
    json a = json::array();
    for (const auto& c : clauses) {
        a.push_back({{"name", c.name}, {"passed", c.passed}, {"conditional", c.conditional}, {"detail", c.detail}});
    }
    return a;
}

json optional_tau(const std::optional<std::uint64_t>& t) { return t ? json(*t) : json(nullptr); }

}  // namespace

json encode(const Rational& x) { return x.str(); }
json encode(const BigInt& x) { return to_string(x); }

json encode(const Multiset& v) {
    json a = json::array();
    for (const auto& [value, mult] : v.entries()) {
        a.push_back({{"value", to_string(value)}, {"multiplicity", mult}});
    }
    return a;
}

json encode(const Distribution& d) {
    json a = json::array();
    for (const auto& atom : d.atoms()) {
        a.push_back({{"value", std::to_string(atom.value)}, {"prob", atom.prob.str()}});
    }
    return {{"atoms", a}};
}

json encode(const Gap& g) {
    json gens = json::array();
    for (const auto& x : g.generators()) {
        gens.push_back(x.str());
    }
    return {{"offset", g.offset().str()}, {"generators", gens}, {"lower", g.lower()}, {"upper", g.upper()}};
}

json encode(const CoverageReport& c) {
    json entries = json::array();
    for (const auto& e : c.entries) {
        entries.push_back({{"value", encode(e.value)},
                           {"multiplicity", e.multiplicity},
                           {"tau", optional_tau(e.tau)},
                           {"witness", e.witness ? json(e.witness->coefficients) : json(nullptr)}});
    }
    return {{"entries", entries}, {"covered", c.covered}, {"exceptional", c.exceptional}};
}

json encode(const CubeCertificate& c) {
    json wit = json::array();
    for (const auto& w : c.witnesses) {
        wit.push_back({{"value", encode(w.value)},
                       {"multiplicity", w.multiplicity},
                       {"signs", w.signs},
                       {"full_cube", w.full_cube}});
    }
    return {{"kind", "cube"}, {"w", encode_all(c.w)}, {"witnesses", wit}, {"zeros", c.zeros}};
}

json encode(const DilateCoverCertificate& c) {
    return {{"kind", "dilate_cover"}, {"w", encode_all(c.w)},          {"k", c.k},
            {"d", c.d},               {"exceptional", encode(c.exceptional)}, {"coverage", encode(c.coverage)}};
}

namespace {

json encode_trace(const std::vector<RefinementStage>& trace) {
    json a = json::array();
    for (const auto& st : trace) {
        a.push_back({{"W", encode(st.W)},
                     {"tau", st.tau},
                     {"eligible", st.eligible},
                     {"L", encode(st.L)},
                     {"L_rep", encode(st.L_rep)},
                     {"representation", encode_all(st.representation)}});
    }
    return a;
}

std::vector<RefinementStage> decode_trace(const json& j) {
    if (!j.is_array()) {
        throw ParseError("trace must be an array");
    }
    std::vector<RefinementStage> out;
    for (const auto& x : j) {
        RefinementStage st;
        st.W = decode_bigint(field(x, "W"));
        st.tau = number<std::uint64_t>(x, "tau");
        st.eligible = number<std::uint64_t>(x, "eligible");
        st.L = decode_bigint(field(x, "L"));
        st.L_rep = decode_bigint(field(x, "L_rep"));
        st.representation = bigints(field(x, "representation"));
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace

json encode(const GapCertificate& c) {
    json members = json::array();
    for (const auto& m : c.members) {
        members.push_back(
            {{"value", encode(m.value)}, {"multiplicity", m.multiplicity}, {"witness", m.witness.coefficients}});
    }
    return {{"kind", "gap"},
            {"q", encode(c.q)},
            {"s", encode(c.s)},
            {"w", encode_all(c.w)},
            {"k", c.k},
            {"d", c.d},
            {"K", c.K},
            {"exceptional", encode(c.exceptional)},
            {"members", members},
            {"trace", encode_trace(c.trace)}};
}

json encode(const SecondInverseFailure& f) {
    return {{"kind", "gap_failure"}, {"reason", f.reason}, {"w", encode_all(f.w)}, {"trace", encode_trace(f.trace)}};
}

json encode(const VerificationReport& r) {
    json j = {{"kind", r.kind},
              {"passed", r.passed()},
              {"structural_passed", r.structural_passed()},
              {"clauses", encode_clauses(r.clauses)}};
    j["concentration"] = r.concentration ? encode(*r.concentration) : json(nullptr);
    j["threshold"] = r.threshold ? encode(*r.threshold) : json(nullptr);
    j["hypothesis_holds"] = r.hypothesis_holds ? json(*r.hypothesis_holds) : json(nullptr);
    return j;
}

json encode(const DiscretizationResult& r) {
    json split = json::array();
    for (const auto& s : r.decomposition) {
        split.push_back({{"small", encode(s.small)}, {"sparse", encode(s.sparse)}});
    }
    const auto& p = r.params;
    return {{"kind", "discretization"},
            {"r_scale", encode(r.r_scale)},
            {"p_small", encode(r.p_small)},
            {"p_sparse", encode(r.p_sparse)},
            {"decomposition", split},
            {"params",
             {{"b", p.b},
              {"s", encode(p.s)},
              {"r0", encode(p.r0)},
              {"ratio", encode(p.ratio)},
              {"rung", p.rung},
              {"threshold", encode(p.threshold)},
              {"level", p.level},
              {"cap_hit", p.cap_hit},
              // the proof's scale constants are replaced by this ladder
              {"ladder", "geometric ladder r0 * ratio^rung (engineering substitute for the unquantified B_d)"}}},
            {"kernel_rank", r.kernel_rank},
            {"kernel_basis", r.kernel_basis},
            {"graph_coordinates", r.graph_coordinates}};
}

json encode(const DiscretizationReport& r) {
    return {{"passed", r.passed()},
            {"clauses", encode_clauses(r.clauses)},
            {"exhaustive", r.exhaustive},
            {"coverage_fraction", r.coverage_fraction},
            {"scale_ratio", encode(r.scale_ratio)}};
}

json encode(const DiscretizationFailure& f) {
    return {{"kind", "discretization_failure"}, {"reason", f.reason}, {"diagnostics", f.diagnostics}};
}

json encode(const McEstimate& e) {
    json cmp = json::array();
    for (const auto& c : e.comparators) {
        cmp.push_back({{"name", c.name}, {"value", c.value}});
    }
    return {{"trials", e.trials},     {"successes", e.successes}, {"estimate", e.estimate},
            {"ci_low", e.ci_low},     {"ci_high", e.ci_high},     {"seed", e.seed},
            {"delta_mu", e.delta_mu}, {"comparators", cmp}};
}

Rational decode_rational(const json& j) {
    if (j.is_number_integer()) {
        return Rational(from_i64(j.get<std::int64_t>()));
    }
    if (!j.is_string()) {
        throw ParseError("expected a rational string");
    }
    try {
        return Rational::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

BigInt decode_bigint(const json& j) {
    if (j.is_number_integer()) {
        return from_i64(j.get<std::int64_t>());
    }
    if (!j.is_string()) {
        throw ParseError("expected an integer string");
    }
    try {
        return parse_bigint(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

Multiset decode_multiset(const json& j) {
    if (!j.is_array()) {
        throw ParseError("multiset must be an array");
    }
    Multiset m;
    for (const auto& x : j) {
        m.add(decode_bigint(field(x, "value")), number<std::uint64_t>(x, "multiplicity"));
    }
    return m;
}

Distribution decode_distribution(const json& j) {
    std::vector<Atom> atoms;
    for (const auto& a : field(j, "atoms")) {
        const auto v = to_i64(decode_bigint(field(a, "value")));
        if (!v) {
            throw ParseError("distribution value out of range");
        }
        atoms.push_back({*v, decode_rational(field(a, "prob"))});
    }
    try {
        return Distribution(std::move(atoms));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

Gap decode_gap(const json& j) {
    std::vector<Rational> gens;
    const json& g = field(j, "generators");
    if (!g.is_array()) {
        throw ParseError("generators must be an array");
    }
    for (const auto& x : g) {
        gens.push_back(decode_rational(x));
    }
    const Rational offset = j.contains("offset") ? decode_rational(j.at("offset")) : Rational(0);
    try {
        return Gap(offset, std::move(gens), ints(field(j, "lower")), ints(field(j, "upper")));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid gap: ") + e.what());
    }
}

namespace {

void expect_kind(const json& j, const char* kind) {
    const json& k = field(j, "kind");
    if (!k.is_string() || k.get<std::string>() != kind) {
        throw ParseError(std::string("expected a '") + kind + "' certificate");
    }
}

}  // namespace

CubeCertificate decode_cube(const json& j) {
    expect_kind(j, "cube");
    CubeCertificate c;
    c.w = bigints(field(j, "w"));
    c.zeros = number<std::uint64_t>(j, "zeros");
    for (const auto& x : field(j, "witnesses")) {
        CubeWitness w;
        w.value = decode_bigint(field(x, "value"));
        w.multiplicity = number<std::uint64_t>(x, "multiplicity");
        for (auto s : ints(field(x, "signs"))) {
            w.signs.push_back(static_cast<int>(s));
        }
        w.full_cube = field(x, "full_cube").get<bool>();
        c.witnesses.push_back(std::move(w));
    }
    return c;
}

DilateCoverCertificate decode_dilate(const json& j) {
    expect_kind(j, "dilate_cover");
    DilateCoverCertificate c;
    c.w = bigints(field(j, "w"));
    c.k = number<std::int64_t>(j, "k");
    c.d = number<std::int64_t>(j, "d");
    c.exceptional = decode_multiset(field(j, "exceptional"));
    const json& cov = field(j, "coverage");
    for (const auto& x : field(cov, "entries")) {
        CoverageEntry e;
        e.value = decode_bigint(field(x, "value"));
        e.multiplicity = number<std::uint64_t>(x, "multiplicity");
        if (!field(x, "tau").is_null()) {
            e.tau = number<std::uint64_t>(x, "tau");
        }
        if (!field(x, "witness").is_null()) {
            e.witness = MembershipWitness{ints(x.at("witness"))};
        }
        c.coverage.entries.push_back(std::move(e));
    }
    c.coverage.covered = number<std::uint64_t>(cov, "covered");
    c.coverage.exceptional = number<std::uint64_t>(cov, "exceptional");
    return c;
}

GapCertificate decode_gap_certificate(const json& j) {
    expect_kind(j, "gap");
    GapCertificate c;
    c.q = decode_gap(field(j, "q"));
    c.s = decode_bigint(field(j, "s"));
    c.w = bigints(field(j, "w"));
    c.k = number<std::int64_t>(j, "k");
    c.d = number<std::int64_t>(j, "d");
    c.K = number<std::int64_t>(j, "K");
    c.exceptional = decode_multiset(field(j, "exceptional"));
    for (const auto& x : field(j, "members")) {
        c.members.push_back({decode_bigint(field(x, "value")), number<std::uint64_t>(x, "multiplicity"),
                             MembershipWitness{ints(field(x, "witness"))}});
    }
    c.trace = decode_trace(field(j, "trace"));
    return c;
}

DiscretizationResult decode_discretization(const json& j) {
    expect_kind(j, "discretization");
    DiscretizationResult r;
    r.r_scale = decode_bigint(field(j, "r_scale"));
    r.p_small = decode_gap(field(j, "p_small"));
    r.p_sparse = decode_gap(field(j, "p_sparse"));
    for (const auto& x : field(j, "decomposition")) {
        r.decomposition.push_back({decode_rational(field(x, "small")), decode_rational(field(x, "sparse"))});
    }
    const json& p = field(j, "params");
    r.params.b = number<std::int64_t>(p, "b");
    r.params.s = decode_bigint(field(p, "s"));
    r.params.r0 = decode_bigint(field(p, "r0"));
    r.params.ratio = decode_bigint(field(p, "ratio"));
    r.params.rung = number<std::int64_t>(p, "rung");
    r.params.threshold = decode_rational(field(p, "threshold"));
    r.params.level = number<std::int64_t>(p, "level");
    r.params.cap_hit = field(p, "cap_hit").get<bool>();
    r.kernel_rank = number<std::size_t>(j, "kernel_rank");
    for (const auto& row : field(j, "kernel_basis")) {
        r.kernel_basis.push_back(ints(row));
    }
    for (const auto& c : field(j, "graph_coordinates")) {
        r.graph_coordinates.push_back(c.get<std::size_t>());
    }
    return r;
}

json parse(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace lwo::io
