#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gbmlap/pipeline.hpp"

namespace gbmlap::bench {

namespace fs = std::filesystem;

const char* tool_version();

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& p);

// "%.17g", with nan/inf spelled the way strtod reads them back.
std::string fmt17(double x);

// Measured-vs-reference numbers shipped with the repository. Values are
// reference-only: they are never overwritten by a run.
struct ReferenceTable {
    std::string version;
    std::map<std::string, double> lgbm;  // potential id -> rel L2
    std::map<std::string, double> lsq;
    json raw;
};
ReferenceTable load_reference_table(const fs::path& p);
fs::path default_data_dir();

struct RunArtifacts {
    fs::path dir;
    std::map<std::string, std::string> checksums;  // file name -> sha256
    json manifest;
};

// Writes every CSV/SVG for one pipeline result into `dir`, then the manifest.
RunArtifacts write_run(const PipelineResult& res, const fs::path& dir, const ReferenceTable* reference);

struct SuiteRow {
    std::string potential;
    bool ok = false;
    std::string error;
    double rel_l2_v = 0.0;
    double lsq_rel_l2 = 0.0;
    bool lsq_ran = false;
    double reference_lgbm = 0.0;
    double reference_lsq = 0.0;
    int consumed_count = 0;
    double elapsed = 0.0;
    fs::path run_dir;
};

struct SuiteOutcome {
    fs::path root;  // empty when the suite had no members
    std::vector<SuiteRow> rows;
    std::vector<PipelineResult> results;
    std::vector<RunArtifacts> artifacts;
};

// Runs the configs concurrently, one directory per potential under
// <out_root>/<timestamp>-<suite_name>/, and writes summary.csv/json last.
SuiteOutcome run_suite(const std::vector<PipelineConfig>& configs, const fs::path& out_root, const std::string& suite_name,
                       const ReferenceTable* reference);

// Canonical per-potential configs with the requested mode.
std::vector<PipelineConfig> canonical_suite_configs(PipelineMode mode);

struct ReplayReport {
    bool identical = false;
    std::vector<std::string> mismatched;  // files whose checksum differs or is missing
    fs::path replay_dir;
};

// Re-runs the pipeline from a manifest's recorded configuration into
// `out_dir` and compares every recorded checksum.
ReplayReport replay_manifest(const fs::path& manifest_path, const fs::path& out_dir);

// RFC 6902 patch taking the golden config to the given one.
json config_diff(const json& golden, const json& actual);

}  // namespace gbmlap::bench
