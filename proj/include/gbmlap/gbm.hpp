#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gbmlap/core.hpp"
#include "gbmlap/forward.hpp"

namespace gbmlap::gbm {

enum class LadderMode { RawBound, Saturated };
enum class LadderPath { CoulombDegenerate, YrastSChannel };

const char* to_string(LadderMode m);
const char* to_string(LadderPath p);
LadderMode ladder_mode_from_string(const std::string& s);
LadderPath ladder_path_from_string(const std::string& s);

struct GBMConfig {
    int ell_max = 6;
    LadderMode mode = LadderMode::Saturated;
    LadderPath path = LadderPath::CoulombDegenerate;
    int moment_max_order = 12;
    // The yrast-s-channel path reads one s-channel level beyond E_{ell_max,0}
    // as an ordering check; this is its radial index.
    int extra_s_level = 11;

    void validate() const;
};

struct GBMAccounting {
    std::vector<int> ell_used;
    std::set<std::pair<int, int>> consumed_levels;  // (n_r, ell)
    int consumed_count = 0;
    int truncated_at = -1;  // ell at which the ladder stopped, -1 when complete
    std::string truncation_reason;
};

struct LadderResult {
    MomentTable evens;
    GBMAccounting accounting;
    std::vector<double> saturation_factors;  // index ell-1
};

// f(ell) = 1 - ell/(2(ell+1)) * [(E_l0 + E_00 - 2 E_0l)/(E_l0 - E_00)]^2
double saturation_factor(double E_ell0, double E_00, double E_0ell, int ell);

LadderResult gbm_even_ladder(const SpectralDataset& ds, const GBMConfig& cfg);

// Levels a ladder with this configuration reads, per channel (for solving
// only what is needed).
std::vector<int> required_levels_per_channel(const GBMConfig& cfg);

struct GapCheck {
    bool pass = false;
    double gap = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // bound - gap
};

GapCheck gap_upper_bound_check(const SpectralDataset& ds, const MomentTable& oracle, int ell,
                               double tolerance = 1e-8);

// Relative slack of the raw ladder step against oracle moments:
// (l(2l+1)/gap * mu_{2l-2} - mu_{2l}) / mu_{2l}; never negative in exact
// arithmetic.
double raw_bound_slack(const SpectralDataset& ds, const MomentTable& oracle, int ell);

double accounting_report(const GBMAccounting& acct, int lsq_constraints = 120);

enum class CheckStatus { Pass, Fail, Skipped };
const char* to_string(CheckStatus s);

struct ValidationItem {
    std::string name;
    CheckStatus status = CheckStatus::Skipped;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string note;
};

struct ValidationReport {
    std::string potential_id;
    std::vector<ValidationItem> items;
    bool condition_a = false;
    bool condition_b = false;
    bool condition_c = false;

    const ValidationItem* find(const std::string& name) const;
    bool all_pass(const std::vector<std::string>& names) const;
};

struct ValidateConfig {
    double rel_tol = 1e-7;      // slack allowed on inequalities that saturate
    double sample_r_min = 0.05;  // condition sampling range
    double sample_r_max = 10.0;
    int samples = 400;
};

// Channel solutions keyed by ell; each must carry its eigenfunctions.
using ChannelSolutions = std::map<int, forward::ChannelSolution>;

ValidationReport validate_ground_state(const forward::PotentialSpec& spec,
                                       const ChannelSolutions& solutions,
                                       const ValidateConfig& cfg = {});

}  // namespace gbmlap::gbm
