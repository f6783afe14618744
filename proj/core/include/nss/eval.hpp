#pragma once

#include "nss/types.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace nss {

inline constexpr int kUnassigned = -1;

struct SpikeTrain {
    int unit_id = 0;
    std::vector<double> times;  ///< strictly increasing, seconds
};

/// One sorted event: detection time plus the label the sorter gave it.
struct LabeledEvent {
    double time_s = 0.0;
    int label = kUnassigned;
};

/// Groups labeled events into one train per label, ordered by label.
/// UNASSIGNED events are dropped unless `keep_unassigned`.
std::vector<SpikeTrain> trains_from_labels(std::span<const LabeledEvent> events, bool keep_unassigned = false);

/// Keeps events with t0 <= t < t1.
std::vector<SpikeTrain> restrict_trains(const std::vector<SpikeTrain>& trains, double t0, double t1);
std::vector<LabeledEvent> restrict_events(std::span<const LabeledEvent> events, double t0, double t1);

/// Greedy nearest-first one-to-one pairing of events closer than `tol_s`.
/// Returns the matched pairs as (index in a, index in b).
std::vector<std::pair<std::size_t, std::size_t>> match_events(std::span<const double> a,
                                                              std::span<const double> b, double tol_s);
std::size_t count_coincidences(std::span<const double> a, std::span<const double> b, double tol_s);

/// matched / (|a| + |b| - matched); 0 when both trains are empty.
double agreement_score(const SpikeTrain& a, const SpikeTrain& b, double tol_ms = 1.0);

/// 2 TP / (2 TP + FN + FP); 0 when the denominator is 0.
double f1_score(long tp, long fn, long fp);

struct UnitMatch {
    int gt_unit = 0;
    int inferred_unit = kUnassigned;  ///< kUnassigned when no inferred unit exists
    double agreement = 0.0;
    long tp = 0, fp = 0, fn = 0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

enum class MatchMode {
    BestPerUnit,  ///< each GT unit independently takes its best inferred unit
    Exclusive,    ///< one-to-one assignment maximizing total agreement
};

struct MatchOptions {
    double tol_ms = 1.0;
    MatchMode mode = MatchMode::BestPerUnit;
};

/// Rows: GT units then a final "noise" row; columns: inferred labels then a
/// final UNASSIGNED column.
struct ConfusionMatrix {
    std::vector<int> gt_units;
    std::vector<int> labels;
    std::vector<std::vector<long>> counts;
};

struct MatchReport {
    std::vector<UnitMatch> pairs;
    double detection_precision = std::numeric_limits<double>::quiet_NaN();
    double detection_fp_rate = std::numeric_limits<double>::quiet_NaN();
    ConfusionMatrix confusion;

    double mean_f1() const;
};

MatchReport match_units(const std::vector<SpikeTrain>& gt, const std::vector<SpikeTrain>& inferred,
                        const MatchOptions& opts = {});

struct DetectionMetrics {
    double precision = std::numeric_limits<double>::quiet_NaN();
    double fp_rate = std::numeric_limits<double>::quiet_NaN();
    long matched = 0;
    long detections = 0;
    long ground_truth = 0;
};

/// precision = matched / detections, fp_rate = unmatched / ground truth;
/// NaN when the respective denominator is zero.
DetectionMetrics detection_metrics(std::span<const double> gt_times, std::span<const double> detected,
                                   double tol_ms = 1.0);

ConfusionMatrix confusion_matrix(const std::vector<SpikeTrain>& gt, std::span<const LabeledEvent> events,
                                 double tol_ms = 1.0);

/// Unit matching, detection metrics and confusion matrix in one report.
MatchReport evaluate_sorting(const std::vector<SpikeTrain>& gt, std::span<const LabeledEvent> events,
                             const MatchOptions& opts = {});

/// Emission summary of one waveform presentation over one or more layers.
struct PresentationStats {
    int neurons = 0;
    int steps = 0;
    long nonzero_emissions = 0;
    int active_neurons = 0;  ///< neurons that emitted at least once
};

struct SparsityMetrics {
    double temporal = 1.0;  ///< mean fraction of silent neuron-steps
    double spatial = 0.0;   ///< mean count of active neurons per presentation
};

SparsityMetrics sparsity_metrics(std::span<const PresentationStats> log);

double template_cosine_similarity(std::span<const double> t1, std::span<const double> t2);

std::string report_to_json(const MatchReport& report);
std::string pairs_to_csv(const MatchReport& report);
std::string confusion_to_csv(const ConfusionMatrix& cm);

}  // namespace nss
