#pragma once

#include <string>

#include "ark/lang.hpp"

namespace ark::experiments {

/// Device-mismatch study on the 53-node t-line: per-seed transients for the
/// C_int (Vm/Im node mismatch) and Gm (Em edge-weight mismatch) variants,
/// plus the time-averaged output spread of each. When `out_dir` is non-empty
/// the envelope CSVs and a manifest JSON are written there.
struct TlnMismatchSummary {
    int seeds = 0;
    double std_cint = 0;  // time-averaged OUT std over the observation window
    double std_gm = 0;
    double ratio = 0;  // std_gm / std_cint
};
TlnMismatchSummary tln_mismatch(const LanguageRegistry& reg, const std::string& out_dir,
                                int seeds = 100);

/// CNN edge detection: ideal-cnn agreement with the combinatorial oracle over
/// random images, and the hw-cnn pixel error rate over mismatch seeds on the
/// first image.
struct CnnEdgeSummary {
    int images = 0;
    int hw_seeds = 0;
    double ideal_agreement_min = 0;  // worst per-image agreement fraction
    double ideal_error_rate = 0;     // mean pixel error, ideal
    double hw_error_rate = 0;        // mean pixel error, hw-cnn
};
CnnEdgeSummary cnn_edge(const LanguageRegistry& reg, const std::string& out_dir, int images = 20,
                        int hw_seeds = 20, int rows = 16, int cols = 16);

/// Max-cut success statistics over random connected 4-vertex graphs for the
/// ideal and offset-coupler variants at two phase-classification tolerances.
struct ObcMaxcutSummary {
    int graphs = 0;
    double ofs_s1 = 0;  // calibrated offset spread recorded in the manifest
    // [variant][tolerance]: variant 0 = ideal, 1 = offset; tol 0 = d1, 1 = d2
    double d1 = 0, d2 = 0;
    double sync[2][2] = {{0, 0}, {0, 0}};
    double solved[2][2] = {{0, 0}, {0, 0}};
};
ObcMaxcutSummary obc_maxcut(const LanguageRegistry& reg, const std::string& out_dir,
                            int graphs = 200);

}  // namespace ark::experiments
