#include "limitnls/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace limitnls {

namespace {

using njson = nlohmann::json;  // std::map-backed: object keys always sorted

static_assert(std::endian::native == std::endian::little,
              "binary snapshot format is little-endian");

template <typename T>
void put_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get_raw(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error(std::string(what) + ": truncated stream");
    return v;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON documents stay strictly conformant: non-finite doubles are encoded as
// the strings "inf" / "-inf" / "nan" in place of a number.
njson enc_d(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double dec_d(const njson& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::runtime_error(std::string(what) + ": expected a number");
}

const njson& expect(const njson& obj, const char* key, const char* doc) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw std::runtime_error(std::string(doc) + ": missing key '" + key + "'");
    return *it;
}

void reject_unknown(const njson& obj, std::initializer_list<const char*> keys, const char* doc) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known)
            throw std::runtime_error(std::string(doc) + ": unknown key '" + key + "'");
    }
}

njson generator_fields(const GeneratorSpec& g) {
    njson j;
    j["C"] = enc_d(g.C);
    j["epsilon"] = enc_d(g.epsilon);
    j["k"] = g.k;
    j["mode"] = flow_name(g.mode);
    j["omega"] = enc_d(g.omega);
    j["per_block_modes"] = g.per_block_modes;
    j["profile"] = g.profile;
    j["seed"] = g.seed;
    return j;
}

GeneratorSpec generator_fields_from(const njson& j) {
    reject_unknown(j, {"C", "epsilon", "k", "mode", "omega", "per_block_modes", "profile", "seed"},
                   "generator");
    GeneratorSpec g;
    g.C = dec_d(expect(j, "C", "generator"), "generator.C");
    g.epsilon = dec_d(expect(j, "epsilon", "generator"), "generator.epsilon");
    g.k = expect(j, "k", "generator").get<int>();
    g.mode = flow_from_name(expect(j, "mode", "generator").get<std::string>());
    g.omega = dec_d(expect(j, "omega", "generator"), "generator.omega");
    g.per_block_modes = expect(j, "per_block_modes", "generator").get<std::vector<int>>();
    g.profile = expect(j, "profile", "generator").get<std::string>();
    g.seed = expect(j, "seed", "generator").get<std::uint64_t>();
    return g;
}

njson cond_report_fields(const ConditionReport& r) {
    njson rows = njson::array();
    for (const auto& row : r.rows) {
        njson o;
        o["j"] = row.j;
        o["L"] = enc_d(row.L);
        o["log_lhs"] = enc_d(row.log_lhs);
        o["log_rhs"] = enc_d(row.log_rhs);
        o["margin"] = enc_d(row.margin);
        o["pass"] = row.pass;
        o["value"] = enc_d(row.value);
        rows.push_back(std::move(o));
    }
    njson j;
    j["check"] = r.check;
    j["pass"] = r.pass;
    j["rows"] = std::move(rows);
    return j;
}

void check_stream(const std::ostream& out, const std::string& path) {
    if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace

// ---------------------------------------------------------------------------
// Binary snapshots and trajectories
// ---------------------------------------------------------------------------

void write_snapshot(std::ostream& out, const SpectralField& F, double t, const SnapshotMeta& m) {
    out.write("LNLS", 4);
    put_raw(out, m.version);
    put_raw(out, F.lambda());
    put_raw(out, static_cast<std::uint32_t>(F.modes()));
    put_raw(out, m.k);
    put_raw(out, m.sign);
    put_raw(out, t);
    static_assert(sizeof(Complex) == 2 * sizeof(double));
    out.write(reinterpret_cast<const char*>(F.data().data()),
              static_cast<std::streamsize>(F.modes() * sizeof(Complex)));
    if (!out) throw std::runtime_error("snapshot: write failed");
}

SpectralField read_snapshot(std::istream& in, double* t_out, SnapshotMeta* m_out) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LNLS", 4) != 0)
        throw std::runtime_error("snapshot: bad magic");
    SnapshotMeta m;
    m.version = get_raw<std::uint32_t>(in, "snapshot");
    if (m.version != 1)
        throw std::runtime_error("snapshot: unsupported version " + std::to_string(m.version));
    const double lambda = get_raw<double>(in, "snapshot");
    const auto n = get_raw<std::uint32_t>(in, "snapshot");
    m.k = get_raw<std::uint32_t>(in, "snapshot");
    m.sign = get_raw<std::int8_t>(in, "snapshot");
    const double t = get_raw<double>(in, "snapshot");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::runtime_error("snapshot: bad circumference");
    if (n < 2 || n > (1u << 26) || (n & (n - 1)) != 0)
        throw std::runtime_error("snapshot: bad mode count " + std::to_string(n));
    if (m.sign != 1 && m.sign != -1) throw std::runtime_error("snapshot: bad sign byte");
    SpectralField F(lambda, n);
    in.read(reinterpret_cast<char*>(F.data().data()),
            static_cast<std::streamsize>(F.modes() * sizeof(Complex)));
    if (!in) throw std::runtime_error("snapshot: truncated payload");
    if (t_out) *t_out = t;
    if (m_out) *m_out = m;
    return F;
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    SnapshotMeta meta;
    meta.k = static_cast<std::uint32_t>(traj.config.k);
    meta.sign = static_cast<std::int8_t>(flow_sign(traj.config.mode));
    std::vector<std::uint64_t> offsets;
    offsets.reserve(traj.snapshots.size());
    for (const auto& p : traj.snapshots) {
        offsets.push_back(static_cast<std::uint64_t>(out.tellp()));
        write_snapshot(out, p.u, p.t, meta);
    }
    for (std::uint64_t off : offsets) put_raw(out, off);
    put_raw(out, static_cast<std::uint64_t>(offsets.size()));
    out.write("LNLSIDX\0", 8);
    check_stream(out, path);
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    in.seekg(0, std::ios::end);
    const std::int64_t size = in.tellg();
    if (size < 16) throw std::runtime_error(path + ": no trajectory index");
    in.seekg(size - 16);
    const auto count = get_raw<std::uint64_t>(in, "trajectory index");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "LNLSIDX\0", 8) != 0)
        throw std::runtime_error(path + ": bad index magic");
    const std::int64_t table = size - 16 - static_cast<std::int64_t>(count) * 8;
    if (count == 0 || table < 0) throw std::runtime_error(path + ": corrupt index");
    in.seekg(table);
    std::vector<std::uint64_t> offsets(count);
    for (auto& off : offsets) off = get_raw<std::uint64_t>(in, "trajectory index");

    Trajectory traj;
    SnapshotMeta meta;
    for (std::uint64_t off : offsets) {
        in.clear();
        in.seekg(static_cast<std::streamoff>(off));
        double t = 0;
        SpectralField u = read_snapshot(in, &t, &meta);
        if (!traj.snapshots.empty() && !(t > traj.snapshots.back().t))
            throw std::runtime_error(path + ": snapshot times not increasing");
        traj.snapshots.push_back(TrajectoryPoint{t, std::move(u)});
    }
    traj.lambda = traj.snapshots.front().u.lambda();
    traj.config.k = static_cast<int>(meta.k);
    traj.config.mode = meta.sign < 0 ? FlowMode::focusing : FlowMode::defocusing;
    // Diagnostics are not stored in the binary file; recompute them so a
    // loaded trajectory is as usable as a freshly computed one.
    traj.diagnostics.reserve(traj.snapshots.size());
    for (const auto& p : traj.snapshots) {
        DiagnosticsRow row;
        row.t = p.t;
        row.mass = mass(p.u);
        row.hamiltonian = hamiltonian(p.u, traj.config.k, traj.config.mode);
        row.h1 = sobolev_norm(p.u, 1.0, false);
        row.linf = linf_norm(p.u);
        traj.diagnostics.push_back(row);
    }
    return traj;
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,mass,hamiltonian,h1,linf\n";
    for (const auto& r : rows)
        out << fmt17(r.t) << ',' << fmt17(r.mass) << ',' << fmt17(r.hamiltonian) << ','
            << fmt17(r.h1) << ',' << fmt17(r.linf) << '\n';
    check_stream(out, path);
}

std::vector<DiagnosticsRow> read_diagnostics_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,mass,hamiltonian,h1,linf")
        throw std::runtime_error(path + ": bad diagnostics header");
    std::vector<DiagnosticsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        DiagnosticsRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r.t, &r.mass, &r.hamiltonian, &r.h1,
                        &r.linf) != 5)
            throw std::runtime_error(path + ": bad diagnostics row: " + line);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

RunConfig default_run_config() {
    RunConfig c;
    c.generator.omega = 12.0;
    c.generator.profile = "exp_block";
    c.generator.C = 1.0;
    c.generator.epsilon = 0.5;
    c.generator.k = 1;
    c.generator.mode = FlowMode::defocusing;
    c.generator.per_block_modes = {0, 0, 4, 4, 4, 4};
    c.generator.seed = 20260822;
    c.resolution.explicit_levels = {{3, 16}, {4, 256}, {5, 1024}};
    c.leakage.proxies = {Rational(47321, 33461), Rational(114243, 80782)};
    c.leakage.ns = {64, 128, 256, 512, 1024};
    c.leakage.t = 0.1;
    return c;
}

void RunConfig::validate() const {
    SeriesGenerator probe(generator);  // throws on malformed generator fields
    if (static_cast<int>(generator.per_block_modes.size()) < depth)
        throw std::invalid_argument(
            "config: generator must define mode budgets through the truncation depth");
    if (j_min < 1 || j_min > j_max) throw std::invalid_argument("config: need 1 <= j_min <= j_max");
    if (depth <= j_max || depth > 20)
        throw std::invalid_argument("config: need j_max < depth <= 20");
    if (!(T >= 0.0) || !std::isfinite(T))
        throw std::invalid_argument("config: horizon T must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("config: dt must be > 0");
    const long long steps = std::llround(T / dt);
    if (std::abs(static_cast<double>(steps) * dt - T) > 1e-9 * std::max(1.0, T))
        throw std::invalid_argument("config: T must be an integer multiple of dt");
    if (snapshot_stride < 1) throw std::invalid_argument("config: snapshot_stride must be >= 1");
    if (!(B > 0.0) || !(C > 0.0) || !(C_nec > 0.0))
        throw std::invalid_argument("config: budgets B, C, C_nec must be > 0");
    if (resolution.min_modes < 2 || resolution.max_modes < resolution.min_modes)
        throw std::invalid_argument("config: resolution mode bounds are inconsistent");
    if (resolution.oversample < 1) throw std::invalid_argument("config: oversample must be >= 1");
    for (const auto& [lvl, n] : resolution.explicit_levels)
        if (n < 2 || (n & (n - 1)) != 0)
            throw std::invalid_argument("config: explicit mode counts must be powers of two >= 2");
    for (const auto& p : leakage.proxies)
        if (!(p.value() > 0.0))
            throw std::invalid_argument("config: leakage proxies must be positive");
    for (int n : leakage.ns)
        if (n < 1) throw std::invalid_argument("config: leakage shift counts must be >= 1");
    if (std::abs(leakage.t) > T && !(T == 0.0 && leakage.t == 0.0))
        throw std::invalid_argument("config: leakage time outside the horizon");
    if (continuity.enabled) {
        if (!(continuity.delta0 > 0.0))
            throw std::invalid_argument("config: continuity delta0 must be > 0");
        if (continuity.halvings < 0)
            throw std::invalid_argument("config: continuity halvings must be >= 0");
        if (std::abs(continuity.t) > T)
            throw std::invalid_argument("config: continuity time outside the horizon");
        if (continuity.mode_n == 0)
            throw std::invalid_argument("config: continuity mode must be nonzero");
        if (continuity.block < 0)
            throw std::invalid_argument("config: continuity block must be >= 0");
    }
    if (!(picard.c0 > 0.0)) throw std::invalid_argument("config: picard c0 must be > 0");
    if (picard.nodes < 2) throw std::invalid_argument("config: picard nodes must be >= 2");
    if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
    if (out_dir.empty()) throw std::invalid_argument("config: out_dir must be nonempty");
    condition_params().validate();
    solver_config().validate();
    (void)probe;
}

ConditionParams RunConfig::condition_params() const {
    ConditionParams p;
    p.k = generator.k;
    p.epsilon = generator.epsilon;
    p.B = B;
    p.C = C;
    p.C_nec = C_nec;
    p.j_min = j_min;
    p.j_max = j_max;
    p.depth = depth;
    p.mode = generator.mode == FlowMode::focusing ? CheckMode::focusing_k1 : CheckMode::defocusing;
    return p;
}

SolverConfig RunConfig::solver_config() const {
    SolverConfig s;
    s.k = generator.k;
    s.mode = generator.mode;
    s.dt = dt;
    s.snapshot_stride = snapshot_stride;
    return s;
}

std::string canonical_json(const RunConfig& c) {
    njson j;
    j["B"] = enc_d(c.B);
    j["C"] = enc_d(c.C);
    j["C_nec"] = enc_d(c.C_nec);
    j["T"] = enc_d(c.T);
    {
        njson cont;
        cont["block"] = c.continuity.block;
        cont["delta0"] = enc_d(c.continuity.delta0);
        cont["enabled"] = c.continuity.enabled;
        cont["halvings"] = c.continuity.halvings;
        cont["mode_n"] = c.continuity.mode_n;
        cont["t"] = enc_d(c.continuity.t);
        j["continuity"] = std::move(cont);
    }
    j["depth"] = c.depth;
    j["dt"] = enc_d(c.dt);
    j["generator"] = generator_fields(c.generator);
    j["j_max"] = c.j_max;
    j["j_min"] = c.j_min;
    {
        njson lk;
        njson proxies = njson::array();
        for (const auto& p : c.leakage.proxies) proxies.push_back({p.num, p.den});
        lk["ns"] = c.leakage.ns;
        lk["proxies"] = std::move(proxies);
        lk["t"] = enc_d(c.leakage.t);
        j["leakage"] = std::move(lk);
    }
    j["out_dir"] = c.out_dir;
    {
        njson pc;
        pc["c0"] = enc_d(c.picard.c0);
        pc["nodes"] = c.picard.nodes;
        j["picard"] = std::move(pc);
    }
    {
        njson res;
        njson lv = njson::array();
        for (const auto& [jl, n] : c.resolution.explicit_levels)
            lv.push_back({jl, static_cast<std::uint64_t>(n)});
        res["explicit_levels"] = std::move(lv);
        res["max_modes"] = static_cast<std::uint64_t>(c.resolution.max_modes);
        res["min_modes"] = static_cast<std::uint64_t>(c.resolution.min_modes);
        res["oversample"] = c.resolution.oversample;
        j["resolution"] = std::move(res);
    }
    j["snapshot_stride"] = c.snapshot_stride;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    reject_unknown(j,
                   {"B", "C", "C_nec", "T", "continuity", "depth", "dt", "generator", "j_max",
                    "j_min", "leakage", "out_dir", "picard", "resolution", "snapshot_stride",
                    "threads"},
                   "config");
    RunConfig c;
    c.B = dec_d(expect(j, "B", "config"), "config.B");
    c.C = dec_d(expect(j, "C", "config"), "config.C");
    c.C_nec = dec_d(expect(j, "C_nec", "config"), "config.C_nec");
    c.T = dec_d(expect(j, "T", "config"), "config.T");
    {
        const njson& cont = expect(j, "continuity", "config");
        reject_unknown(cont, {"block", "delta0", "enabled", "halvings", "mode_n", "t"},
                       "config.continuity");
        c.continuity.block = expect(cont, "block", "config.continuity").get<int>();
        c.continuity.delta0 = dec_d(expect(cont, "delta0", "config.continuity"), "delta0");
        c.continuity.enabled = expect(cont, "enabled", "config.continuity").get<bool>();
        c.continuity.halvings = expect(cont, "halvings", "config.continuity").get<int>();
        c.continuity.mode_n = expect(cont, "mode_n", "config.continuity").get<int>();
        c.continuity.t = dec_d(expect(cont, "t", "config.continuity"), "t");
    }
    c.depth = expect(j, "depth", "config").get<int>();
    c.dt = dec_d(expect(j, "dt", "config"), "config.dt");
    c.generator = generator_fields_from(expect(j, "generator", "config"));
    c.j_max = expect(j, "j_max", "config").get<int>();
    c.j_min = expect(j, "j_min", "config").get<int>();
    {
        const njson& lk = expect(j, "leakage", "config");
        reject_unknown(lk, {"ns", "proxies", "t"}, "config.leakage");
        c.leakage.ns = expect(lk, "ns", "config.leakage").get<std::vector<int>>();
        c.leakage.proxies.clear();
        for (const auto& pj : expect(lk, "proxies", "config.leakage")) {
            if (!pj.is_array() || pj.size() != 2)
                throw std::runtime_error("config.leakage: proxies must be [num, den] pairs");
            c.leakage.proxies.emplace_back(pj[0].get<std::int64_t>(), pj[1].get<std::int64_t>());
        }
        c.leakage.t = dec_d(expect(lk, "t", "config.leakage"), "t");
    }
    c.out_dir = expect(j, "out_dir", "config").get<std::string>();
    {
        const njson& pc = expect(j, "picard", "config");
        reject_unknown(pc, {"c0", "nodes"}, "config.picard");
        c.picard.c0 = dec_d(expect(pc, "c0", "config.picard"), "c0");
        c.picard.nodes = expect(pc, "nodes", "config.picard").get<int>();
    }
    {
        const njson& res = expect(j, "resolution", "config");
        reject_unknown(res, {"explicit_levels", "max_modes", "min_modes", "oversample"},
                       "config.resolution");
        c.resolution.explicit_levels.clear();
        for (const auto& ej : expect(res, "explicit_levels", "config.resolution")) {
            if (!ej.is_array() || ej.size() != 2)
                throw std::runtime_error(
                    "config.resolution: explicit_levels must be [level, modes] pairs");
            c.resolution.explicit_levels.emplace_back(
                ej[0].get<int>(), static_cast<std::size_t>(ej[1].get<std::uint64_t>()));
        }
        c.resolution.max_modes =
            static_cast<std::size_t>(expect(res, "max_modes", "config.resolution").get<std::uint64_t>());
        c.resolution.min_modes =
            static_cast<std::size_t>(expect(res, "min_modes", "config.resolution").get<std::uint64_t>());
        c.resolution.oversample = expect(res, "oversample", "config.resolution").get<int>();
    }
    c.snapshot_stride = expect(j, "snapshot_stride", "config").get<int>();
    c.threads = expect(j, "threads", "config").get<int>();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    return run_config_from_json(read_text_file(path));
}

void save_run_config(const std::string& path, const RunConfig& c) {
    write_text_file(path, canonical_json(c));
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const RunConfig& c) { return fnv1a_hex(canonical_json(c)); }

// ---------------------------------------------------------------------------
// Generator, verdict, manifest, report documents
// ---------------------------------------------------------------------------

std::string generator_to_json(const GeneratorSpec& g, const std::string& cfg_hash) {
    njson j;
    j["cfg_hash"] = cfg_hash;
    j["generator"] = generator_fields(g);
    j["tool_version"] = kToolVersion;
    return j.dump(2) + "\n";
}

GeneratorSpec generator_from_json(const std::string& text, std::string* cfg_hash_out) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw std::runtime_error(std::string("generator: ") + e.what());
    }
    reject_unknown(j, {"cfg_hash", "generator", "tool_version"}, "generator");
    if (cfg_hash_out) *cfg_hash_out = expect(j, "cfg_hash", "generator").get<std::string>();
    return generator_fields_from(expect(j, "generator", "generator"));
}

void save_generator(const std::string& path, const GeneratorSpec& g, const std::string& cfg_hash) {
    write_text_file(path, generator_to_json(g, cfg_hash));
}

GeneratorSpec load_generator(const std::string& path, std::string* cfg_hash_out) {
    return generator_from_json(read_text_file(path), cfg_hash_out);
}

std::string verdict_to_json(const ConditionReport& tail, const BlockEnvelopeReport& env,
                            const ConditionReport& nec, const std::string& cfg_hash) {
    njson envj;
    envj["pass_line"] = env.pass_line;
    envj["pass_torus"] = env.pass_torus;
    njson rows = njson::array();
    for (const auto& row : env.rows) {
        njson o;
        o["L"] = enc_d(row.L);
        o["j"] = row.j;
        o["line_norm"] = enc_d(row.line_norm);
        o["log_rhs"] = enc_d(row.log_rhs);
        o["margin_line"] = enc_d(row.margin_line);
        o["margin_torus"] = enc_d(row.margin_torus);
        o["pass_line"] = row.pass_line;
        o["pass_torus"] = row.pass_torus;
        o["torus_norm"] = enc_d(row.torus_norm);
        rows.push_back(std::move(o));
    }
    envj["rows"] = std::move(rows);

    njson j;
    j["block_envelope"] = std::move(envj);
    j["cfg_hash"] = cfg_hash;
    j["gate"] = "tail_budget";
    j["necessary"] = cond_report_fields(nec);
    j["tail_budget"] = cond_report_fields(tail);
    j["tool_version"] = kToolVersion;
    return j.dump(2) + "\n";
}

std::string manifest_to_json(const Manifest& m) {
    njson levels = njson::array();
    for (const auto& l : m.levels) {
        njson o;
        o["diagnostics"] = l.diagnostics;
        o["j"] = l.j;
        o["lambda"] = enc_d(l.lambda);
        o["n_modes"] = static_cast<std::uint64_t>(l.n_modes);
        o["trajectory"] = l.trajectory;
        levels.push_back(std::move(o));
    }
    njson j;
    j["cfg_hash"] = m.cfg_hash;
    j["levels"] = std::move(levels);
    j["tool_version"] = m.tool_version;
    return j.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw std::runtime_error(std::string("manifest: ") + e.what());
    }
    reject_unknown(j, {"cfg_hash", "levels", "tool_version"}, "manifest");
    Manifest m;
    m.cfg_hash = expect(j, "cfg_hash", "manifest").get<std::string>();
    m.tool_version = expect(j, "tool_version", "manifest").get<std::string>();
    for (const auto& lj : expect(j, "levels", "manifest")) {
        ManifestLevel l;
        l.diagnostics = expect(lj, "diagnostics", "manifest.level").get<std::string>();
        l.j = expect(lj, "j", "manifest.level").get<int>();
        l.lambda = dec_d(expect(lj, "lambda", "manifest.level"), "lambda");
        l.n_modes =
            static_cast<std::size_t>(expect(lj, "n_modes", "manifest.level").get<std::uint64_t>());
        l.trajectory = expect(lj, "trajectory", "manifest.level").get<std::string>();
        m.levels.push_back(std::move(l));
    }
    return m;
}

void save_manifest(const std::string& path, const Manifest& m) {
    write_text_file(path, manifest_to_json(m));
}

Manifest load_manifest(const std::string& path) { return manifest_from_json(read_text_file(path)); }

std::string report_to_json(const ConvergenceReport& r, const std::string& cfg_hash) {
    njson j;
    {
        njson cj;
        njson pairs = njson::array();
        for (const auto& p : r.cauchy.pairs) {
            njson o;
            o["L_next"] = enc_d(p.L_next);
            o["d_line"] = enc_d(p.d_line);
            o["d_linf"] = enc_d(p.d_linf);
            o["j"] = p.j;
            o["snapshots"] = p.snapshots;
            pairs.push_back(std::move(o));
        }
        cj["fit_residuals"] = njson::array();
        for (double v : r.cauchy.fit_residuals) cj["fit_residuals"].push_back(enc_d(v));
        cj["fitted_c"] = enc_d(r.cauchy.fitted_c);
        cj["monotone_line"] = r.cauchy.monotone_line;
        cj["monotone_linf"] = r.cauchy.monotone_linf;
        cj["pairs"] = std::move(pairs);
        j["cauchy"] = std::move(cj);
    }
    {
        njson aj;
        aj["C_data"] = enc_d(r.apriori.C_data);
        aj["C_flow"] = enc_d(r.apriori.C_flow);
        njson rows = njson::array();
        for (const auto& row : r.apriori.rows) {
            njson o;
            o["L_next"] = enc_d(row.L_next);
            o["data_next_norm"] = enc_d(row.data_next_norm);
            o["data_norm"] = enc_d(row.data_norm);
            o["envelope"] = enc_d(row.envelope);
            o["flow_next_sup"] = enc_d(row.flow_next_sup);
            o["flow_sup"] = enc_d(row.flow_sup);
            o["j"] = row.j;
            o["ratio"] = enc_d(row.ratio);
            rows.push_back(std::move(o));
        }
        aj["rows"] = std::move(rows);
        j["apriori"] = std::move(aj);
    }
    {
        njson lj;
        lj["t"] = enc_d(r.leakage.t);
        njson rows = njson::array();
        for (const auto& row : r.leakage.rows) {
            njson o;
            o["den"] = row.den;
            o["kind"] = row.kind;
            o["level"] = row.level;
            o["n"] = row.n;
            o["num"] = row.num;
            o["sup"] = enc_d(row.sup);
            rows.push_back(std::move(o));
        }
        lj["rows"] = std::move(rows);
        j["leakage"] = std::move(lj);
    }
    {
        njson bj;
        bj["decaying"] = r.block_sums.decaying;
        bj["off_lattice"] = enc_d(r.block_sums.off_lattice);
        njson rows = njson::array();
        for (const auto& row : r.block_sums.rows) {
            njson o;
            o["L"] = enc_d(row.L);
            o["j"] = row.j;
            o["log_envelope"] = enc_d(row.log_envelope);
            o["sum"] = enc_d(row.sum);
            rows.push_back(std::move(o));
        }
        bj["rows"] = std::move(rows);
        bj["t"] = enc_d(r.block_sums.t);
        bj["total"] = enc_d(r.block_sums.total);
        j["block_sums"] = std::move(bj);
    }
    if (r.continuity) {
        njson cj;
        cj["block"] = r.continuity->block;
        cj["mode_n"] = r.continuity->mode_n;
        cj["monotone"] = r.continuity->monotone;
        njson rows = njson::array();
        for (const auto& row : r.continuity->rows) {
            njson o;
            o["delta"] = enc_d(row.delta);
            o["ratio"] = enc_d(row.ratio);
            o["response"] = enc_d(row.response);
            rows.push_back(std::move(o));
        }
        cj["rows"] = std::move(rows);
        cj["t"] = enc_d(r.continuity->t);
        j["continuity"] = std::move(cj);
    } else {
        j["continuity"] = nullptr;
    }
    j["cfg_hash"] = cfg_hash;
    j["tool_version"] = kToolVersion;
    return j.dump(2) + "\n";
}

ConvergenceReport report_from_json(const std::string& text, std::string* cfg_hash_out) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw std::runtime_error(std::string("report: ") + e.what());
    }
    reject_unknown(
        j, {"apriori", "block_sums", "cauchy", "cfg_hash", "continuity", "leakage", "tool_version"},
        "report");
    if (cfg_hash_out) *cfg_hash_out = expect(j, "cfg_hash", "report").get<std::string>();
    ConvergenceReport r;
    {
        const njson& cj = expect(j, "cauchy", "report");
        for (const auto& pj : expect(cj, "pairs", "report.cauchy")) {
            CauchyPair p;
            p.j = expect(pj, "j", "cauchy pair").get<int>();
            p.L_next = dec_d(expect(pj, "L_next", "cauchy pair"), "L_next");
            p.d_linf = dec_d(expect(pj, "d_linf", "cauchy pair"), "d_linf");
            p.d_line = dec_d(expect(pj, "d_line", "cauchy pair"), "d_line");
            p.snapshots = expect(pj, "snapshots", "cauchy pair").get<int>();
            r.cauchy.pairs.push_back(p);
        }
        r.cauchy.monotone_linf = expect(cj, "monotone_linf", "report.cauchy").get<bool>();
        r.cauchy.monotone_line = expect(cj, "monotone_line", "report.cauchy").get<bool>();
        r.cauchy.fitted_c = dec_d(expect(cj, "fitted_c", "report.cauchy"), "fitted_c");
        for (const auto& vj : expect(cj, "fit_residuals", "report.cauchy"))
            r.cauchy.fit_residuals.push_back(dec_d(vj, "fit_residuals"));
    }
    {
        const njson& aj = expect(j, "apriori", "report");
        for (const auto& rj : expect(aj, "rows", "report.apriori")) {
            AprioriRow row;
            row.j = expect(rj, "j", "apriori row").get<int>();
            row.L_next = dec_d(expect(rj, "L_next", "apriori row"), "L_next");
            row.envelope = dec_d(expect(rj, "envelope", "apriori row"), "envelope");
            row.data_norm = dec_d(expect(rj, "data_norm", "apriori row"), "data_norm");
            row.data_next_norm = dec_d(expect(rj, "data_next_norm", "apriori row"), "data_next");
            row.flow_sup = dec_d(expect(rj, "flow_sup", "apriori row"), "flow_sup");
            row.flow_next_sup = dec_d(expect(rj, "flow_next_sup", "apriori row"), "flow_next");
            row.ratio = dec_d(expect(rj, "ratio", "apriori row"), "ratio");
            r.apriori.rows.push_back(row);
        }
        r.apriori.C_data = dec_d(expect(aj, "C_data", "report.apriori"), "C_data");
        r.apriori.C_flow = dec_d(expect(aj, "C_flow", "report.apriori"), "C_flow");
    }
    {
        const njson& lj = expect(j, "leakage", "report");
        r.leakage.t = dec_d(expect(lj, "t", "report.leakage"), "t");
        for (const auto& rj : expect(lj, "rows", "report.leakage")) {
            LeakageRow row;
            row.kind = expect(rj, "kind", "leakage row").get<std::string>();
            row.num = expect(rj, "num", "leakage row").get<std::int64_t>();
            row.den = expect(rj, "den", "leakage row").get<std::int64_t>();
            row.level = expect(rj, "level", "leakage row").get<int>();
            row.n = expect(rj, "n", "leakage row").get<int>();
            row.sup = dec_d(expect(rj, "sup", "leakage row"), "sup");
            r.leakage.rows.push_back(std::move(row));
        }
    }
    {
        const njson& bj = expect(j, "block_sums", "report");
        r.block_sums.t = dec_d(expect(bj, "t", "report.block_sums"), "t");
        r.block_sums.total = dec_d(expect(bj, "total", "report.block_sums"), "total");
        r.block_sums.off_lattice =
            dec_d(expect(bj, "off_lattice", "report.block_sums"), "off_lattice");
        r.block_sums.decaying = expect(bj, "decaying", "report.block_sums").get<bool>();
        for (const auto& rj : expect(bj, "rows", "report.block_sums")) {
            BlockSumRow row;
            row.j = expect(rj, "j", "block sum row").get<int>();
            row.L = dec_d(expect(rj, "L", "block sum row"), "L");
            row.sum = dec_d(expect(rj, "sum", "block sum row"), "sum");
            row.log_envelope = dec_d(expect(rj, "log_envelope", "block sum row"), "log_envelope");
            r.block_sums.rows.push_back(row);
        }
    }
    {
        const njson& cj = expect(j, "continuity", "report");
        if (!cj.is_null()) {
            ContinuityReport c;
            c.t = dec_d(expect(cj, "t", "report.continuity"), "t");
            c.block = expect(cj, "block", "report.continuity").get<int>();
            c.mode_n = expect(cj, "mode_n", "report.continuity").get<int>();
            c.monotone = expect(cj, "monotone", "report.continuity").get<bool>();
            for (const auto& rj : expect(cj, "rows", "report.continuity")) {
                ContinuityRow row;
                row.delta = dec_d(expect(rj, "delta", "continuity row"), "delta");
                row.response = dec_d(expect(rj, "response", "continuity row"), "response");
                row.ratio = dec_d(expect(rj, "ratio", "continuity row"), "ratio");
                c.rows.push_back(row);
            }
            r.continuity = std::move(c);
        }
    }
    return r;
}

void write_report_csvs(const std::string& dir, const ConvergenceReport& r) {
    {
        std::ofstream out(dir + "/cauchy.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + dir + "/cauchy.csv");
        out << "j,L_next,d_linf,d_line,snapshots\n";
        for (const auto& p : r.cauchy.pairs)
            out << p.j << ',' << fmt17(p.L_next) << ',' << fmt17(p.d_linf) << ','
                << fmt17(p.d_line) << ',' << p.snapshots << '\n';
        check_stream(out, dir + "/cauchy.csv");
    }
    {
        std::ofstream out(dir + "/norms.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + dir + "/norms.csv");
        out << "j,L_next,envelope,data_norm,data_next_norm,flow_sup,flow_next_sup,ratio\n";
        for (const auto& row : r.apriori.rows)
            out << row.j << ',' << fmt17(row.L_next) << ',' << fmt17(row.envelope) << ','
                << fmt17(row.data_norm) << ',' << fmt17(row.data_next_norm) << ','
                << fmt17(row.flow_sup) << ',' << fmt17(row.flow_next_sup) << ','
                << fmt17(row.ratio) << '\n';
        check_stream(out, dir + "/norms.csv");
    }
    {
        std::ofstream out(dir + "/leakage.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + dir + "/leakage.csv");
        out << "kind,num,den,level,n,sup\n";
        for (const auto& row : r.leakage.rows)
            out << row.kind << ',' << row.num << ',' << row.den << ',' << row.level << ','
                << row.n << ',' << fmt17(row.sup) << '\n';
        check_stream(out, dir + "/leakage.csv");
    }
    {
        std::ofstream out(dir + "/block_sums.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + dir + "/block_sums.csv");
        out << "j,L,sum,log_envelope\n";
        for (const auto& row : r.block_sums.rows)
            out << row.j << ',' << fmt17(row.L) << ',' << fmt17(row.sum) << ','
                << fmt17(row.log_envelope) << '\n';
        check_stream(out, dir + "/block_sums.csv");
    }
    if (r.continuity) {
        std::ofstream out(dir + "/continuity.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + dir + "/continuity.csv");
        out << "delta,response,ratio\n";
        for (const auto& row : r.continuity->rows)
            out << fmt17(row.delta) << ',' << fmt17(row.response) << ',' << fmt17(row.ratio)
                << '\n';
        check_stream(out, dir + "/continuity.csv");
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    out.flush();
    check_stream(out, path);
}

}  // namespace limitnls
