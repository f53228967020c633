#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gbmlap/forward.hpp"
#include "gbmlap/gbm.hpp"
#include "gbmlap/laplace.hpp"
#include "gbmlap/lsq.hpp"
#include "gbmlap/moments.hpp"
#include "gbmlap/pade.hpp"
#include "gbmlap/recovery.hpp"

namespace gbmlap {

using json = nlohmann::ordered_json;

// Which approximation layers are active: oracle evens and odds, GBM evens
// with oracle odds, or the full method (GBM evens, completed odds).
enum class PipelineMode { ExactMoments, GbmEvenExactOdd, GbmEvenInterpOdd };
const char* to_string(PipelineMode m);
PipelineMode pipeline_mode_from_string(const std::string& s);  // also accepts "full"

enum class InversionMethod { Residues, Numeric };
const char* to_string(InversionMethod m);
InversionMethod inversion_method_from_string(const std::string& s);

struct PadeSettings {
    std::vector<std::pair<int, int>> candidates;  // empty: default set for the available order
    pade::FilterConfig filter;
};

struct InversionSettings {
    InversionMethod method = InversionMethod::Residues;
    laplace::InversionConfig numeric;
};

struct RecoverySettings {
    double r_max = 40.0;  // recovery grid is the solver grid truncated here
    recovery::RecoveryConfig config;
};

struct MetricSettings {
    std::optional<std::pair<double, double>> window;  // empty: density-based default
    std::vector<double> lq_grid;                      // q samples for the L(q) panel
};

struct LsqSettings {
    bool enabled = true;
    double r_max = 12.0;
    int intervals = 200;
    int core_steps = 2;
    lsq::LSQConfig config;
};

struct PipelineConfig {
    forward::PotentialSpec potential;
    PipelineMode mode = PipelineMode::GbmEvenInterpOdd;
    forward::SolverConfig solver;
    gbm::GBMConfig gbm;
    bool gbm_path_auto = true;  // Coulomb family -> coulomb-degenerate, else yrast-s-channel
    moments::OddFamily odd;
    PadeSettings pade;
    InversionSettings inversion;
    RecoverySettings recovery;
    MetricSettings metric;
    LsqSettings lsq;

    void validate() const;
    gbm::LadderPath resolved_path() const;
};

// Canonical per-potential settings shared by the benchmark suite.
PipelineConfig canonical_config(const std::string& potential_id);
// The same settings for an arbitrary potential; the Coulomb family gets the
// shorter ladder.
PipelineConfig config_for(const forward::PotentialSpec& spec);

json to_json(const forward::PotentialSpec& p);
forward::PotentialSpec potential_from_json(const json& j);

json to_json(const PipelineConfig& c);
// Keys that are absent keep the values already in `base`; unknown keys are
// rejected with a config error.
PipelineConfig config_from_json(const json& j, PipelineConfig base);

// [{"order": n, "value": mu_n, "provenance": "..."}, ...]; values survive
// the round trip bit for bit.
json to_json(const MomentTable& t);
MomentTable moment_table_from_json(const json& j);

// Every leaf path ("/solver/r_max", ...) present in a serialised config.
std::vector<std::string> config_leaf_paths(const json& j);

}  // namespace gbmlap
