#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "limitnls/conditions.hpp"
#include "limitnls/hierarchy.hpp"
#include "limitnls/series.hpp"
#include "limitnls/solver.hpp"

namespace limitnls {

// Embedded in every artifact next to the config hash.
inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Binary snapshot format (little-endian):
//   magic   "LNLS" (4 bytes)
//   version u32    (currently 1)
//   lambda  f64
//   N       u32    number of modes
//   k       u32    nonlinearity degree of the producing run
//   sign    i8     +1 defocusing, -1 focusing
//   time    f64
//   payload N complex<f64> pairs (re, im) in FFT storage order
//            (n = 0 .. N/2-1, then n = -N/2 .. -1)
//
// A trajectory file is a sequence of snapshot blocks followed by an index
// footer: u64 offsets (one per snapshot), u64 count, 8-byte magic "LNLSIDX\0".
// ---------------------------------------------------------------------------

struct SnapshotMeta {
    std::uint32_t version = 1;
    std::uint32_t k = 1;
    std::int8_t sign = +1;
};

void write_snapshot(std::ostream& out, const SpectralField& F, double t, const SnapshotMeta& m);
SpectralField read_snapshot(std::istream& in, double* t_out, SnapshotMeta* m_out);

void write_trajectory(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory(const std::string& path);

// Diagnostics CSV, header "t,mass,hamiltonian,h1,linf", values %.17g.
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRow>& rows);
std::vector<DiagnosticsRow> read_diagnostics_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Structured-text (JSON) documents.  Serialization is canonical: object keys
// sorted, stable float rendering — rerunning a stage reproduces files byte
// for byte.
// ---------------------------------------------------------------------------

struct LeakageConfig {
    std::vector<Rational> proxies;  // incommensurate window lengths
    std::vector<int> ns;            // shift counts
    double t = 0.1;
};

struct ContinuityConfig {
    bool enabled = true;
    double delta0 = 1e-3;
    int halvings = 2;
    double t = 0.1;
    int block = 0;   // 0 -> j_min
    int mode_n = 1;
};

struct PicardConfig {
    double c0 = 0.1;
    int nodes = 32;
};

struct RunConfig {
    GeneratorSpec generator;
    int j_min = 3;
    int j_max = 5;
    int depth = 6;
    double T = 0.25;
    double dt = 1e-3;
    int snapshot_stride = 10;
    double B = 1.0;
    double C = 1.0;
    double C_nec = 1.0;
    ResolutionPolicy resolution;
    LeakageConfig leakage;
    ContinuityConfig continuity;
    PicardConfig picard;
    int threads = 0;  // 0 -> library default (env cap / hardware)
    std::string out_dir = "out";

    void validate() const;
    ConditionParams condition_params() const;
    SolverConfig solver_config() const;
};

// The desk-scale defaults: omega = 12, blocks 3..5 populated, levels pinned
// to {3:16, 4:256, 5:1024} modes, sqrt(2)-convergent averaging proxies.
RunConfig default_run_config();

std::string canonical_json(const RunConfig& c);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& c);

// FNV-1a 64 over the canonical serialization, as 16 hex digits.  Every
// artifact embeds it; downstream stages refuse inputs whose hash differs.
std::string config_hash(const RunConfig& c);
std::string fnv1a_hex(const std::string& bytes);

std::string generator_to_json(const GeneratorSpec& g, const std::string& cfg_hash);
GeneratorSpec generator_from_json(const std::string& text, std::string* cfg_hash_out = nullptr);
void save_generator(const std::string& path, const GeneratorSpec& g, const std::string& cfg_hash);
GeneratorSpec load_generator(const std::string& path, std::string* cfg_hash_out = nullptr);

// Verdict document of the check stage: the three tables plus the gate flag.
std::string verdict_to_json(const ConditionReport& tail, const BlockEnvelopeReport& env,
                            const ConditionReport& nec, const std::string& cfg_hash);

// Manifest of the evolve stage: level table with artifact paths.
struct ManifestLevel {
    int j = 0;
    double lambda = 0;
    std::size_t n_modes = 0;
    std::string trajectory;   // relative path
    std::string diagnostics;  // relative path
};

struct Manifest {
    std::string cfg_hash;
    std::string tool_version;
    std::vector<ManifestLevel> levels;
};

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& text);
void save_manifest(const std::string& path, const Manifest& m);
Manifest load_manifest(const std::string& path);

std::string report_to_json(const ConvergenceReport& r, const std::string& cfg_hash);
// Reads back only what the CSV rendering needs; returns the embedded hash.
ConvergenceReport report_from_json(const std::string& text, std::string* cfg_hash_out = nullptr);

// CSV renderings of a ConvergenceReport (the report stage).
void write_report_csvs(const std::string& dir, const ConvergenceReport& r);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace limitnls
