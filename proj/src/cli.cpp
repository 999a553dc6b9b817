#include "sympen/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sympen/errors.hpp"
#include "sympen/metrics.hpp"
#include "sympen/mmio.hpp"
#include "sympen/operators.hpp"
#include "sympen/oracle.hpp"
#include "sympen/solver.hpp"
#include "sympen/testgen.hpp"

namespace sympen::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// Thrown when a solve finishes without meeting its tolerance; carries the
// exit code only, the result files have already been written.
struct NotConverged {
    std::string message;
};

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) {
            parts.push_back(item);
        }
    }
    return parts;
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::logic_error&) {
        throw ArgumentError("'" + key + "' expects a number, got '" + text + "'");
    }
}

long parse_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return v;
    } catch (const std::logic_error&) {
        throw ArgumentError("'" + key + "' expects an integer, got '" + text + "'");
    }
}

// ---------------------------------------------------------------------------
// Option table

struct OptionDef {
    const char* name; // flag spelling, dashes
    const char* help;
    bool is_flag;
    std::set<std::string> verbs;
};

const std::vector<OptionDef>& option_table() {
    static const std::vector<OptionDef> table = {
        {"matrix", "Matrix Market file (for gen: output path)", false,
         {"gen", "solve", "oracle", "check"}},
        {"family", "generator family: dense, sparse, slr, prescribed (bench: comma list)", false,
         {"gen", "solve", "oracle", "check", "bench"}},
        {"n", "half dimension of the generated matrix (bench: comma list)", false,
         {"gen", "solve", "oracle", "check", "bench"}},
        {"density", "sparse density sigma (default 10/n)", false,
         {"gen", "solve", "oracle", "check", "bench"}},
        {"rank", "low-rank width m (default 10)", false, {"gen", "solve", "oracle", "check", "bench"}},
        {"spectrum", "prescribed symplectic eigenvalues, comma list (default 1..n)", false,
         {"gen", "solve", "oracle", "check"}},
        {"p", "number of symplectic eigenvalues (bench: comma list)", false,
         {"solve", "oracle", "bench"}},
        {"beta", "initial penalty parameter (default tr(A)/(n-p+1))", false, {"solve"}},
        {"betas", "bench beta labels: 1.001dp,best,sug,2sug,5sug,10sug,100sug", false, {"bench"}},
        {"seed", "random seed", false, {"gen", "solve", "oracle", "check", "bench"}},
        {"seeds", "number of consecutive seeds per bench instance", false, {"bench"}},
        {"tol", "target tolerance (enhanced: residue, basic: gradient norm; check: defect)", false,
         {"solve", "bench", "check"}},
        {"variant", "solver variant: basic or enhanced (bench: comma list)", false,
         {"solve", "bench"}},
        {"k-max", "inner iteration limit", false, {"solve", "bench"}},
        {"gamma0", "initial step", false, {"solve", "bench"}},
        {"gamma-lo", "lower step bound", false, {"solve", "bench"}},
        {"gamma-hi", "upper step bound", false, {"solve", "bench"}},
        {"xi-lo", "lower step randomization factor", false, {"solve", "bench"}},
        {"xi-hi", "upper step randomization factor", false, {"solve", "bench"}},
        {"eps0", "initial inner tolerance", false, {"solve", "bench"}},
        {"eps-decay", "inner tolerance reduction factor", false, {"solve", "bench"}},
        {"delta", "backtracking factor", false, {"solve", "bench"}},
        {"lambda", "sufficient decrease constant", false, {"solve", "bench"}},
        {"memory", "nonmonotone window length", false, {"solve", "bench"}},
        {"eta", "penalty update factor", false, {"solve", "bench"}},
        {"outer-max", "outer iteration limit", false, {"solve", "bench"}},
        {"rank-safeguard", "cap steps to keep the iterate full rank", true, {"solve", "bench"}},
        {"reference", "compute the dense reference for error metrics", true, {"solve"}},
        {"write-basis", "also write the computed basis as Matrix Market", true,
         {"solve", "oracle"}},
        {"basis", "basis file to validate for symplecticity", false, {"check"}},
        {"jobs", "bench worker threads (default: hardware concurrency)", false, {"bench"}},
        {"out", "output directory (default $SYMPEIG_OUT or .)", false,
         {"gen", "solve", "oracle", "check", "bench"}},
        {"config", "flat key=value config file; flags override it", false,
         {"gen", "solve", "oracle", "check", "bench"}},
    };
    return table;
}

bool key_allowed(const std::string& verb, const std::string& key) {
    for (const auto& def : option_table()) {
        if (normalize_key(def.name) == key) {
            return def.verbs.count(verb) > 0;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Resolution helpers

GeneratorSpec generator_spec(const RunConfig& c, const std::string& family, Index n,
                             std::uint64_t seed) {
    GeneratorSpec g;
    g.family = parse_family(family);
    g.n = n;
    g.seed = seed;
    if (c.has("density")) {
        g.density = c.real("density", 0.0);
    }
    g.rank = c.integer("rank", 10);
    if (c.has("spectrum")) {
        const auto parts = c.list("spectrum", "");
        Eigen::VectorXd d(static_cast<Index>(parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i) {
            d(static_cast<Index>(i)) = parse_real("spectrum", parts[i]);
        }
        g.spectrum = d;
    }
    g.validate();
    return g;
}

std::uint64_t seed_of(const RunConfig& c) {
    const long s = c.integer("seed", 0);
    if (s < 0) {
        throw ArgumentError("'seed' must be non-negative");
    }
    return static_cast<std::uint64_t>(s);
}

SolverParams solver_params(const RunConfig& c, Variant variant) {
    SolverParams sp;
    sp.variant = variant;
    if (c.has("beta")) {
        sp.beta0 = c.real("beta", 0.0);
    }
    sp.gamma0 = c.real("gamma0", sp.gamma0);
    sp.gamma_lo = c.real("gamma_lo", sp.gamma_lo);
    sp.gamma_hi = c.real("gamma_hi", sp.gamma_hi);
    sp.xi_lo = c.real("xi_lo", sp.xi_lo);
    sp.xi_hi = c.real("xi_hi", sp.xi_hi);
    sp.k_max = c.integer("k_max", sp.k_max);
    sp.eps0 = c.real("eps0", sp.eps0);
    sp.eps_decay = c.real("eps_decay", sp.eps_decay);
    sp.delta = c.real("delta", sp.delta);
    sp.lambda = c.real("lambda", sp.lambda);
    sp.memory = static_cast<int>(c.integer("memory", sp.memory));
    sp.eta = c.real("eta", sp.eta);
    sp.outer_max = static_cast<int>(c.integer("outer_max", sp.outer_max));
    sp.rank_safeguard = c.flag("rank_safeguard");
    sp.seed = seed_of(c);
    if (c.has("tol")) {
        const double tol = c.real("tol", 0.0);
        if (variant == Variant::Basic) {
            sp.basic_grad_tol = tol;
        } else {
            sp.target_tol = tol;
        }
    }
    sp.validate();
    return sp;
}

json params_json(const SolverParams& sp) {
    json j;
    j["variant"] = to_string(sp.variant);
    j["beta0"] = sp.beta0 ? json(*sp.beta0) : json("auto");
    j["gamma0"] = sp.gamma0;
    j["gamma_lo"] = sp.gamma_lo;
    j["gamma_hi"] = sp.gamma_hi;
    j["xi_lo"] = sp.xi_lo;
    j["xi_hi"] = sp.xi_hi;
    j["k_max"] = sp.k_max;
    j["eps0"] = sp.eps0;
    j["eps_decay"] = sp.eps_decay;
    j["delta"] = sp.delta;
    j["lambda"] = sp.lambda;
    j["memory"] = sp.memory;
    j["eta"] = sp.eta;
    j["outer_max"] = sp.outer_max;
    j["target_tol"] = sp.target_tol;
    j["basic_grad_tol"] = sp.basic_grad_tol;
    j["rank_safeguard"] = sp.rank_safeguard;
    j["seed"] = sp.seed;
    return j;
}

json vector_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        arr.push_back(v(i));
    }
    return arr;
}

json config_json(const RunConfig& c) {
    json j;
    j["verb"] = c.verb;
    for (const auto& [k, v] : c.values) {
        j[k] = v;
    }
    return j;
}

// One-line rendering of the resolved config for CSV and Matrix Market headers.
std::string config_line(const RunConfig& c) {
    std::string line = "verb=" + c.verb;
    for (const auto& [k, v] : c.values) {
        line += " " + k + "=" + v;
    }
    return line;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream f(path);
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
    f << std::setw(2) << j << '\n';
    if (!f) {
        throw IoError("write failed: " + path.string());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

struct Instance {
    SpdOperator op;
    std::optional<ReferenceSpectrum> reference;
    json source;
};

json operator_json(const SpdOperator& op) {
    json j;
    j["kind"] = to_string(op.kind());
    j["n"] = op.half_dim();
    j["dim"] = op.dim();
    j["nnz"] = op.nnz();
    return j;
}

Instance load_instance(const RunConfig& c) {
    if (c.has("matrix")) {
        const fs::path path = c.str("matrix");
        Instance inst{load_matrix(path), std::nullopt, json::object()};
        inst.source["matrix"] = path.string();
        return inst;
    }
    if (!c.has("family") || !c.has("n")) {
        throw ArgumentError("give --matrix, or --family and --n to generate an instance");
    }
    const GeneratorSpec g = generator_spec(c, c.str("family"), c.integer("n", 0), seed_of(c));
    GeneratedInstance gen = generate(g);
    Instance inst{std::move(gen.op), std::move(gen.reference), json::object()};
    inst.source["family"] = to_string(g.family);
    inst.source["n"] = g.n;
    inst.source["seed"] = g.seed;
    inst.source["density"] = g.resolved_density();
    inst.source["rank"] = g.rank;
    return inst;
}

Index p_of(const RunConfig& c) {
    if (!c.has("p")) {
        throw ArgumentError("--p is required");
    }
    return c.integer("p", 0);
}

// ---------------------------------------------------------------------------
// Verbs

int cmd_gen(const RunConfig& c, std::ostream& out) {
    if (!c.has("family") || !c.has("n")) {
        throw ArgumentError("gen needs --family and --n");
    }
    const GeneratorSpec g = generator_spec(c, c.str("family"), c.integer("n", 0), seed_of(c));
    const GeneratedInstance gen = generate(g);

    fs::path path;
    if (c.has("matrix")) {
        path = c.str("matrix");
    } else {
        path = c.out_dir() / (std::string(to_string(g.family)) + "_n" + std::to_string(g.n) +
                              "_s" + std::to_string(g.seed) + ".mtx");
    }
    if (path.has_parent_path()) {
        ensure_dir(path.parent_path());
    }
    store_matrix(gen.op, path);

    json side;
    side["generator"] = {{"family", to_string(g.family)},
                         {"n", g.n},
                         {"density", g.resolved_density()},
                         {"rank", g.rank},
                         {"seed", g.seed}};
    side["operator"] = operator_json(gen.op);
    if (gen.reference) {
        side["symplectic_eigenvalues"] = vector_json(gen.reference->d);
    }
    side["seed"] = g.seed;
    side["config"] = config_json(c);
    fs::path sidecar = path;
    sidecar.replace_extension(".json");
    write_json(side, sidecar);
    out << "wrote " << path.string() << " and " << sidecar.string() << '\n';
    return kOk;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
    const Instance inst = load_instance(c);
    const Index p = p_of(c);
    const Variant variant = parse_variant(c.str("variant", "enhanced"));
    const SolverParams sp = solver_params(c, variant);

    const SympEigResult r = solve(inst.op, p, sp);

    std::optional<ReferenceSpectrum> ref = inst.reference;
    if (!ref && c.flag("reference")) {
        ref = reference(inst.op, p);
    }
    const fs::path dir = c.out_dir();
    ensure_dir(dir);

    json res;
    res["verb"] = "solve";
    res["status"] = to_string(r.status);
    res["converged"] = r.status == SolveStatus::Converged;
    res["message"] = r.message;
    res["eigenvalues"] = vector_json(r.eigenvalues);
    res["iterations"] = r.iterations;
    res["outer_iterations"] = r.trace.stages.size();
    res["seconds"] = r.seconds;
    res["final_beta"] = r.beta;
    json metrics;
    if (r.eigenvalues.size() == p) {
        const MetricsReport m =
            report(inst.op, r.eigenbasis, r.eigenvalues, r.x, r.beta, ref ? &*ref : nullptr);
        metrics["residue"] = m.residue;
        metrics["feasibility"] = m.feasibility;
        metrics["objective"] = m.objective;
        if (ref) {
            metrics["golub_werman"] = m.golub_werman;
            metrics["max_rel_error"] = m.rel_error.maxCoeff();
            metrics["reference_eigenvalues"] = vector_json(ref->d.head(p));
        }
    }
    res["metrics"] = metrics;
    json stages = json::array();
    for (const auto& s : r.trace.stages) {
        stages.push_back({{"stage", s.stage},
                          {"beta", s.beta},
                          {"eps", s.eps},
                          {"iterations", s.iterations},
                          {"reached_tol", s.reached_tol},
                          {"residue", s.residue},
                          {"ritz", vector_json(s.ritz)}});
    }
    res["stages"] = stages;
    res["instance"] = inst.source;
    res["operator"] = operator_json(inst.op);
    res["params"] = params_json(sp);
    res["seed"] = sp.seed;
    res["config"] = config_json(c);
    write_json(res, dir / "result.json");

    {
        std::ofstream f(dir / "trace.csv");
        if (!f) {
            throw IoError("cannot write " + (dir / "trace.csv").string());
        }
        f << "# " << config_line(c) << '\n';
        f << "# seed=" << sp.seed << '\n';
        f << "k,i,f,gnorm,gamma,t,beta\n";
        f << std::setprecision(17);
        for (const auto& rec : r.trace.inner) {
            f << rec.k << ',' << rec.stage << ',' << rec.f << ',' << rec.gnorm << ','
              << rec.gamma << ',' << rec.backtracks << ',' << rec.beta << '\n';
        }
    }
    if (c.flag("write_basis") && r.eigenbasis.size() > 0) {
        write_market_array(r.eigenbasis, dir / "basis.mtx", config_line(c));
    }

    out << to_string(r.status) << " after " << r.iterations << " iterations ("
        << r.trace.stages.size() << " outer), residue " << std::scientific << std::setprecision(3)
        << r.residue << '\n'
        << std::defaultfloat << std::setprecision(10) << "eigenvalues:";
    for (Index i = 0; i < r.eigenvalues.size(); ++i) {
        out << ' ' << r.eigenvalues(i);
    }
    out << '\n';

    if (r.status == SolveStatus::NumericalFailure) {
        throw NumericalError(r.message);
    }
    if (r.status != SolveStatus::Converged) {
        throw NotConverged{r.message};
    }
    return kOk;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
    const Instance inst = load_instance(c);
    const Index p = c.has("p") ? p_of(c) : inst.op.half_dim();
    const ReferenceSpectrum ref = inst.reference ? *inst.reference : reference(inst.op, p);
    const fs::path dir = c.out_dir();
    ensure_dir(dir);

    json res;
    res["verb"] = "oracle";
    res["symplectic_eigenvalues"] = vector_json(ref.d);
    res["smallest"] = vector_json(ref.d.head(p));
    res["instance"] = inst.source;
    res["operator"] = operator_json(inst.op);
    res["seed"] = seed_of(c);
    res["config"] = config_json(c);
    write_json(res, dir / "oracle.json");
    if (c.flag("write_basis")) {
        write_market_array(leading_pairs(ref.s_full, p), dir / "oracle_basis.mtx",
                           config_line(c));
    }
    out << std::setprecision(10) << "smallest " << p << " symplectic eigenvalues:";
    for (Index i = 0; i < p; ++i) {
        out << ' ' << ref.d(i);
    }
    out << '\n';
    return kOk;
}

int cmd_check(const RunConfig& c, std::ostream& out) {
    const double tol = c.real("tol", 1e-8);
    json res;
    res["verb"] = "check";
    bool ok = true;
    if (c.has("matrix") || c.has("family")) {
        const Instance inst = load_instance(c);
        const double asym = symmetry_defect(inst.op, seed_of(c), 8);
        bool spd = false;
        std::string method;
        if (inst.op.dim() <= kDenseBudget) {
            spd = check_spd_dense(inst.op);
            method = "cholesky";
        } else {
            spd = spd_probe(inst.op, seed_of(c), 16);
            method = "probe";
        }
        const bool sym_ok = asym <= tol;
        res["matrix"] = {{"symmetry_defect", asym},
                         {"symmetric", sym_ok},
                         {"spd", spd},
                         {"spd_method", method},
                         {"operator", operator_json(inst.op)},
                         {"instance", inst.source}};
        ok = ok && spd && sym_ok;
        out << "matrix: symmetry defect " << asym << ", spd " << (spd ? "yes" : "no") << " ("
            << method << ")\n";
    }
    if (c.has("basis")) {
        const MarketMatrix m = read_market(c.str("basis"));
        const Basis x = m.layout == MarketMatrix::Layout::Array
                            ? m.dense
                            : Eigen::MatrixXd(Eigen::MatrixXd(m.sparse));
        if (x.rows() % 2 != 0 || x.cols() % 2 != 0 || x.cols() > x.rows()) {
            throw ArgumentError("basis must be 2n x 2p with p <= n");
        }
        Eigen::MatrixXd defect = symplectic_gram(x);
        const Index p = x.cols() / 2;
        for (Index j = 0; j < p; ++j) {
            defect(j, p + j) -= 1.0;
            defect(p + j, j) += 1.0;
        }
        const double d = defect.norm();
        res["basis"] = {{"path", c.str("basis")}, {"symplectic_defect", d}, {"symplectic", d <= tol}};
        ok = ok && d <= tol;
        out << "basis: symplectic defect " << d << '\n';
    }
    if (!res.contains("matrix") && !res.contains("basis")) {
        throw ArgumentError("check needs --matrix, --family/--n or --basis");
    }
    res["ok"] = ok;
    res["tolerance"] = tol;
    res["seed"] = seed_of(c);
    res["config"] = config_json(c);
    const fs::path dir = c.out_dir();
    ensure_dir(dir);
    write_json(res, dir / "check.json");
    if (!ok) {
        throw NumericalError("validation failed (see check.json)");
    }
    return kOk;
}

// ---- bench ----------------------------------------------------------------

const std::vector<std::string> kBetaLabels = {"1.001dp", "best", "sug", "2sug",
                                              "5sug",    "10sug", "100sug"};

struct BenchInstance {
    std::string family;
    Index n = 0;
    std::uint64_t seed = 0;
    std::optional<SpdOperator> op;
    std::optional<ReferenceSpectrum> reference;
    std::string error;
};

struct BenchCell {
    std::size_t instance = 0;
    Index p = 0;
    Variant variant = Variant::Enhanced;
    std::string beta_label;
};

struct BenchRow {
    std::string metric;
    double value = 0.0;
};

struct BenchOutcome {
    double beta = std::numeric_limits<double>::quiet_NaN();
    std::string status;
    std::vector<BenchRow> rows;
    std::string message;
};

template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            fn(i);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
}

double resolve_beta(const std::string& label, const SpdOperator& op, Index p,
                    const std::optional<ReferenceSpectrum>& ref) {
    const auto need_ref = [&]() -> double {
        if (!ref) {
            throw ArgumentError("beta '" + label + "' needs the reference spectrum (2n <= " +
                                std::to_string(kDenseBudget) + ")");
        }
        return ref->d(p - 1);
    };
    if (label == "1.001dp") {
        return 1.001 * need_ref();
    }
    if (label == "best") {
        return beta_best(need_ref());
    }
    const double sug = beta_suggest(op, p);
    if (label == "sug") {
        return sug;
    }
    for (const char* mult : {"2", "5", "10", "100"}) {
        if (label == std::string(mult) + "sug") {
            return std::stod(mult) * sug;
        }
    }
    throw ArgumentError("unknown beta label '" + label + "'");
}

BenchOutcome run_cell(const BenchInstance& inst, const BenchCell& cell, const RunConfig& c) {
    BenchOutcome o;
    try {
        if (!inst.op) {
            throw NumericalError("instance generation failed: " + inst.error);
        }
        SolverParams sp = solver_params(c, cell.variant);
        sp.seed = inst.seed;
        o.beta = resolve_beta(cell.beta_label, *inst.op, cell.p, inst.reference);
        sp.beta0 = o.beta;
        const auto t0 = std::chrono::steady_clock::now();
        const SympEigResult r = solve(*inst.op, cell.p, sp);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.status = std::string(to_string(r.status));
        o.message = r.message;
        o.rows.push_back({"iterations", static_cast<double>(r.iterations)});
        o.rows.push_back({"outer_iterations", static_cast<double>(r.trace.stages.size())});
        o.rows.push_back({"seconds", seconds});
        if (r.eigenvalues.size() == cell.p) {
            const ReferenceSpectrum* ref = inst.reference ? &*inst.reference : nullptr;
            const MetricsReport m = report(*inst.op, r.eigenbasis, r.eigenvalues, r.x, r.beta, ref);
            o.rows.push_back({"residue", m.residue});
            o.rows.push_back({"feasibility", m.feasibility});
            if (ref) {
                o.rows.push_back({"golub_werman", m.golub_werman});
                o.rows.push_back({"max_rel_error", m.rel_error.maxCoeff()});
            }
        }
    } catch (const std::exception& e) {
        o.status = "error";
        o.message = e.what();
        o.rows = {{"error", std::numeric_limits<double>::quiet_NaN()}};
    }
    return o;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') {
            q += '"';
        }
        q += ch == '\n' ? ' ' : ch;
    }
    return q + "\"";
}

int cmd_bench(const RunConfig& c, std::ostream& out) {
    const auto families = c.list("family", "dense");
    std::vector<Index> ns;
    for (const auto& s : c.list("n", "200")) {
        ns.push_back(parse_integer("n", s));
    }
    std::vector<Index> ps;
    for (const auto& s : c.list("p", "10")) {
        ps.push_back(parse_integer("p", s));
    }
    std::vector<Variant> variants;
    for (const auto& s : c.list("variant", "basic")) {
        variants.push_back(parse_variant(s));
    }
    const auto betas = c.list("betas", "1.001dp,best,sug,2sug,5sug,10sug,100sug");
    for (const auto& b : betas) {
        if (std::find(kBetaLabels.begin(), kBetaLabels.end(), b) == kBetaLabels.end()) {
            throw ArgumentError("unknown beta label '" + b + "'");
        }
    }
    for (const auto& f : families) {
        parse_family(f);
    }
    for (Index n : ns) {
        for (Index p : ps) {
            if (p < 1 || p >= n) {
                throw ArgumentError("bench: need 1 <= p < n, got p=" + std::to_string(p) +
                                    " n=" + std::to_string(n));
            }
        }
    }
    const long seeds = c.integer("seeds", 1);
    if (seeds < 1) {
        throw ArgumentError("'seeds' must be >= 1");
    }
    const std::uint64_t base_seed = seed_of(c);
    const long jobs_flag = c.integer("jobs", 0);
    const unsigned jobs = jobs_flag > 0 ? static_cast<unsigned>(jobs_flag)
                                        : std::max(1u, std::thread::hardware_concurrency());
    // Parameters are checked once up front so a bad value is a usage error,
    // not a column of per-row failures.
    for (Variant v : variants) {
        solver_params(c, v);
    }

    std::vector<BenchInstance> instances;
    for (const auto& f : families) {
        for (Index n : ns) {
            for (long s = 0; s < seeds; ++s) {
                BenchInstance bi;
                bi.family = f;
                bi.n = n;
                bi.seed = base_seed + static_cast<std::uint64_t>(s);
                instances.push_back(std::move(bi));
            }
        }
    }
    const Index p_max = *std::max_element(ps.begin(), ps.end());
    parallel_for(instances.size(), jobs, [&](std::size_t i) {
        BenchInstance& bi = instances[i];
        try {
            GeneratedInstance gen = generate(generator_spec(c, bi.family, bi.n, bi.seed));
            bi.reference = std::move(gen.reference);
            if (!bi.reference && gen.op.dim() <= kDenseBudget) {
                bi.reference = reference(gen.op, p_max);
            }
            bi.op = std::move(gen.op);
        } catch (const std::exception& e) {
            bi.error = e.what();
        }
    });

    std::vector<BenchCell> cells;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (Index p : ps) {
            for (Variant v : variants) {
                for (const auto& b : betas) {
                    cells.push_back({i, p, v, b});
                }
            }
        }
    }
    std::vector<BenchOutcome> outcomes(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        outcomes[i] = run_cell(instances[cells[i].instance], cells[i], c);
    });

    const fs::path dir = c.out_dir();
    ensure_dir(dir);
    const fs::path csv = dir / "bench.csv";
    std::ofstream f(csv);
    if (!f) {
        throw IoError("cannot write " + csv.string());
    }
    f << "# " << config_line(c) << '\n';
    f << "# seed=" << base_seed << " seeds=" << seeds << '\n';
    f << "family,n,p,seed,variant,beta_label,beta,status,metric,value,message\n";
    f << std::setprecision(10);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const BenchCell& cell = cells[i];
        const BenchInstance& bi = instances[cell.instance];
        const BenchOutcome& o = outcomes[i];
        if (o.status == "error") {
            ++failures;
        }
        for (const auto& row : o.rows) {
            f << bi.family << ',' << bi.n << ',' << cell.p << ',' << bi.seed << ','
              << to_string(cell.variant) << ',' << cell.beta_label << ',' << o.beta << ','
              << o.status << ',' << row.metric << ',' << row.value << ','
              << csv_quote(o.message) << '\n';
        }
    }
    if (!f) {
        throw IoError("write failed: " + csv.string());
    }
    out << "bench: " << cells.size() << " cells, " << failures << " failed; wrote "
        << csv.string() << '\n';
    return kOk;
}

std::string error_kind(int code) {
    switch (code) {
    case kNotConverged:
        return "not_converged";
    case kUsage:
        return "usage";
    case kIo:
        return "io";
    case kNumerical:
        return "numerical";
    default:
        return "internal";
    }
}

int report_error(std::ostream& err, int code, const std::string& message) {
    json j;
    j["error"] = {{"kind", error_kind(code)}, {"message", message}, {"exit_code", code}};
    err << j.dump() << '\n';
    return code;
}

} // namespace

// ---------------------------------------------------------------------------

bool RunConfig::has(const std::string& key) const {
    return values.count(key) > 0;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double RunConfig::real(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : parse_real(key, it->second);
}

long RunConfig::integer(const std::string& key, long fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : parse_integer(key, it->second);
}

bool RunConfig::flag(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) {
        return false;
    }
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw ArgumentError("'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> RunConfig::list(const std::string& key,
                                         const std::string& fallback) const {
    return split(str(key, fallback), ',');
}

fs::path RunConfig::out_dir() const {
    if (has("out")) {
        return str("out");
    }
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open config file " + path.string());
    }
    std::map<std::string, std::string> values;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError(path.string() + ":" + std::to_string(lineno) +
                                ": expected key = value");
        }
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        if (key.empty()) {
            throw ArgumentError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        }
        values[key] = trim(line.substr(eq + 1));
    }
    return values;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Smallest symplectic eigenvalues of SPD matrices by trace-penalty minimization",
                 "sympeig"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> verbs = {
        {"gen", "generate a seeded test matrix (.mtx plus JSON sidecar)"},
        {"solve", "compute the p smallest symplectic eigenvalues"},
        {"oracle", "dense reference symplectic spectrum"},
        {"check", "validate SPD-ness of a matrix and symplecticity of a basis"},
        {"bench", "beta / size sweep to a long-format CSV"},
    };
    // Storage for raw option strings; std::map nodes stay put.
    std::map<std::string, std::string> raw;
    std::map<std::string, bool> raw_flags;
    std::map<std::string, CLI::App*> subs;
    std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> opts;
    for (const auto& [verb, help] : verbs) {
        CLI::App* sub = app.add_subcommand(verb, help);
        subs[verb] = sub;
        for (const auto& def : option_table()) {
            if (def.verbs.count(verb) == 0) {
                continue;
            }
            const std::string key = normalize_key(def.name);
            const std::string slot = verb + "." + key;
            CLI::Option* opt = nullptr;
            if (def.is_flag) {
                opt = sub->add_flag(std::string("--") + def.name, raw_flags[slot], def.help);
            } else {
                opt = sub->add_option(std::string("--") + def.name, raw[slot], def.help);
            }
            opts[verb].emplace_back(key, opt);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report_error(err, kUsage, e.what());
    }

    RunConfig config;
    for (const auto& [verb, sub] : subs) {
        if (sub->parsed()) {
            config.verb = verb;
        }
    }
    try {
        const std::string config_slot = config.verb + ".config";
        if (!raw[config_slot].empty()) {
            for (const auto& [k, v] : read_config_file(raw[config_slot])) {
                if (!key_allowed(config.verb, k) || k == "config") {
                    throw ArgumentError("config key '" + k + "' is not valid for '" +
                                        config.verb + "'");
                }
                config.values[k] = v;
            }
            config.values["config"] = raw[config_slot];
        }
        for (const auto& [key, opt] : opts[config.verb]) {
            if (opt->count() == 0 || key == "config") {
                continue;
            }
            const std::string slot = config.verb + "." + key;
            config.values[key] = raw_flags.count(slot) ? "true" : raw[slot];
        }

        if (config.verb == "gen") {
            return cmd_gen(config, out);
        }
        if (config.verb == "solve") {
            return cmd_solve(config, out);
        }
        if (config.verb == "oracle") {
            return cmd_oracle(config, out);
        }
        if (config.verb == "check") {
            return cmd_check(config, out);
        }
        return cmd_bench(config, out);
    } catch (const NotConverged& e) {
        return report_error(err, kNotConverged, e.message);
    } catch (const ArgumentError& e) {
        return report_error(err, kUsage, e.what());
    } catch (const IoError& e) {
        return report_error(err, kIo, e.what());
    } catch (const NumericalError& e) {
        return report_error(err, kNumerical, e.what());
    } catch (const std::exception& e) {
        return report_error(err, kNumerical, e.what());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("sympeig");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace sympen::cli
