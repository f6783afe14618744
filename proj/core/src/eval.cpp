#include "nss/eval.hpp"

#include "nss/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

namespace nss {

std::vector<SpikeTrain> trains_from_labels(std::span<const LabeledEvent> events, bool keep_unassigned) {
    std::map<int, std::vector<double>> by_label;
    for (const auto& e : events) {
        if (e.label == kUnassigned && !keep_unassigned) continue;
        by_label[e.label].push_back(e.time_s);
    }
    std::vector<SpikeTrain> out;
    for (auto& [label, times] : by_label) {
        std::sort(times.begin(), times.end());
        out.push_back({label, std::move(times)});
    }
    return out;
}

std::vector<SpikeTrain> restrict_trains(const std::vector<SpikeTrain>& trains, double t0, double t1) {
    std::vector<SpikeTrain> out;
    for (const auto& tr : trains) {
        SpikeTrain r{tr.unit_id, {}};
        for (double t : tr.times) {
            if (t >= t0 && t < t1) r.times.push_back(t);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<LabeledEvent> restrict_events(std::span<const LabeledEvent> events, double t0, double t1) {
    std::vector<LabeledEvent> out;
    for (const auto& e : events) {
        if (e.time_s >= t0 && e.time_s < t1) out.push_back(e);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> match_events(std::span<const double> a,
                                                              std::span<const double> b, double tol_s) {
    // Candidate pairs via a sliding window over b, then nearest-first. The
    // ordering key is symmetric in (a, b) so the count does not depend on
    // argument order.
    struct Candidate {
        double dist, lo, hi;
        std::size_t i, j;
    };
    std::vector<Candidate> cand;
    std::size_t start = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        while (start < b.size() && b[start] < a[i] - tol_s) ++start;
        for (std::size_t j = start; j < b.size() && b[j] <= a[i] + tol_s; ++j) {
            const double d = std::abs(a[i] - b[j]);
            if (d <= tol_s) cand.push_back({d, std::min(a[i], b[j]), std::max(a[i], b[j]), i, j});
        }
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
        return std::tie(x.dist, x.lo, x.hi) < std::tie(y.dist, y.lo, y.hi);
    });
    std::vector<char> used_a(a.size(), 0), used_b(b.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& c : cand) {
        if (used_a[c.i] || used_b[c.j]) continue;
        used_a[c.i] = used_b[c.j] = 1;
        out.emplace_back(c.i, c.j);
    }
    return out;
}

std::size_t count_coincidences(std::span<const double> a, std::span<const double> b, double tol_s) {
    return match_events(a, b, tol_s).size();
}

double agreement_score(const SpikeTrain& a, const SpikeTrain& b, double tol_ms) {
    const double matched = static_cast<double>(count_coincidences(a.times, b.times, tol_ms / 1000.0));
    const double denom = static_cast<double>(a.times.size() + b.times.size()) - matched;
    return denom > 0.0 ? matched / denom : 0.0;
}

double f1_score(long tp, long fn, long fp) {
    const long denom = 2 * tp + fn + fp;
    return denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
}

double MatchReport::mean_f1() const {
    if (pairs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : pairs) s += p.f1;
    return s / static_cast<double>(pairs.size());
}

namespace {

/// Rectangular assignment (rows <= cols) minimizing total cost; returns the
/// column for each row. Classic potentials-based Hungarian method.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

UnitMatch score_pair(const SpikeTrain& gt, const SpikeTrain* inf, double tol_ms) {
    UnitMatch m;
    m.gt_unit = gt.unit_id;
    m.fn = static_cast<long>(gt.times.size());
    if (inf == nullptr) return m;
    m.inferred_unit = inf->unit_id;
    m.agreement = agreement_score(gt, *inf, tol_ms);
    m.tp = static_cast<long>(count_coincidences(gt.times, inf->times, tol_ms / 1000.0));
    m.fn = static_cast<long>(gt.times.size()) - m.tp;
    m.fp = static_cast<long>(inf->times.size()) - m.tp;
    m.f1 = f1_score(m.tp, m.fn, m.fp);
    m.precision = (m.tp + m.fp) > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    m.recall = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
    return m;
}

}  // namespace

MatchReport match_units(const std::vector<SpikeTrain>& gt, const std::vector<SpikeTrain>& inferred,
                        const MatchOptions& opts) {
    MatchReport report;
    if (inferred.empty()) {
        for (const auto& g : gt) report.pairs.push_back(score_pair(g, nullptr, opts.tol_ms));
        return report;
    }
    std::vector<std::vector<double>> agreement(gt.size(), std::vector<double>(inferred.size(), 0.0));
    for (std::size_t i = 0; i < gt.size(); ++i) {
        for (std::size_t j = 0; j < inferred.size(); ++j) {
            agreement[i][j] = agreement_score(gt[i], inferred[j], opts.tol_ms);
        }
    }

    std::vector<int> choice(gt.size(), -1);
    if (opts.mode == MatchMode::BestPerUnit) {
        for (std::size_t i = 0; i < gt.size(); ++i) {
            int best = 0;
            for (std::size_t j = 1; j < inferred.size(); ++j) {
                if (agreement[i][j] > agreement[i][static_cast<std::size_t>(best)]) best = static_cast<int>(j);
            }
            choice[i] = best;
        }
    } else {
        // Pad columns so every GT row can be assigned; padded columns mean
        // "no inferred unit".
        const std::size_t cols = std::max(gt.size(), inferred.size());
        std::vector<std::vector<double>> cost(gt.size(), std::vector<double>(cols, 1.0));
        for (std::size_t i = 0; i < gt.size(); ++i) {
            for (std::size_t j = 0; j < inferred.size(); ++j) cost[i][j] = 1.0 - agreement[i][j];
        }
        const auto assign = hungarian(cost);
        for (std::size_t i = 0; i < gt.size(); ++i) {
            choice[i] = assign[i] < static_cast<int>(inferred.size()) ? assign[i] : -1;
        }
    }

    for (std::size_t i = 0; i < gt.size(); ++i) {
        const SpikeTrain* inf = choice[i] >= 0 ? &inferred[static_cast<std::size_t>(choice[i])] : nullptr;
        report.pairs.push_back(score_pair(gt[i], inf, opts.tol_ms));
    }
    return report;
}

DetectionMetrics detection_metrics(std::span<const double> gt_times, std::span<const double> detected,
                                   double tol_ms) {
    DetectionMetrics m;
    m.detections = static_cast<long>(detected.size());
    m.ground_truth = static_cast<long>(gt_times.size());
    m.matched = static_cast<long>(count_coincidences(gt_times, detected, tol_ms / 1000.0));
    if (m.detections > 0) m.precision = static_cast<double>(m.matched) / static_cast<double>(m.detections);
    if (m.ground_truth > 0) {
        m.fp_rate = static_cast<double>(m.detections - m.matched) / static_cast<double>(m.ground_truth);
    }
    return m;
}

namespace {

struct GtEvent {
    double time;
    int unit;
};

std::vector<GtEvent> pooled_events(const std::vector<SpikeTrain>& gt) {
    std::vector<GtEvent> all;
    for (const auto& tr : gt) {
        for (double t : tr.times) all.push_back({t, tr.unit_id});
    }
    std::sort(all.begin(), all.end(), [](const GtEvent& x, const GtEvent& y) {
        return std::tie(x.time, x.unit) < std::tie(y.time, y.unit);
    });
    return all;
}

}  // namespace

ConfusionMatrix confusion_matrix(const std::vector<SpikeTrain>& gt, std::span<const LabeledEvent> events,
                                 double tol_ms) {
    ConfusionMatrix cm;
    for (const auto& tr : gt) cm.gt_units.push_back(tr.unit_id);
    std::vector<int> labels;
    for (const auto& e : events) {
        if (e.label != kUnassigned) labels.push_back(e.label);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    cm.labels = labels;
    cm.counts.assign(gt.size() + 1, std::vector<long>(labels.size() + 1, 0));

    std::vector<LabeledEvent> sorted(events.begin(), events.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const LabeledEvent& x, const LabeledEvent& y) { return x.time_s < y.time_s; });
    const auto pooled = pooled_events(gt);
    std::vector<double> gt_times, det_times;
    for (const auto& g : pooled) gt_times.push_back(g.time);
    for (const auto& e : sorted) det_times.push_back(e.time_s);

    std::vector<int> det_row(sorted.size(), static_cast<int>(gt.size()));
    for (const auto& [gi, di] : match_events(gt_times, det_times, tol_ms / 1000.0)) {
        const auto it = std::find(cm.gt_units.begin(), cm.gt_units.end(), pooled[gi].unit);
        det_row[di] = static_cast<int>(it - cm.gt_units.begin());
    }
    for (std::size_t d = 0; d < sorted.size(); ++d) {
        std::size_t col = labels.size();
        if (sorted[d].label != kUnassigned) {
            col = static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), sorted[d].label) -
                                           labels.begin());
        }
        ++cm.counts[static_cast<std::size_t>(det_row[d])][col];
    }
    return cm;
}

MatchReport evaluate_sorting(const std::vector<SpikeTrain>& gt, std::span<const LabeledEvent> events,
                             const MatchOptions& opts) {
    MatchReport report = match_units(gt, trains_from_labels(events), opts);
    std::vector<double> gt_times, det_times;
    for (const auto& g : pooled_events(gt)) gt_times.push_back(g.time);
    for (const auto& e : events) det_times.push_back(e.time_s);
    std::sort(det_times.begin(), det_times.end());
    const auto dm = detection_metrics(gt_times, det_times, opts.tol_ms);
    report.detection_precision = dm.precision;
    report.detection_fp_rate = dm.fp_rate;
    report.confusion = confusion_matrix(gt, events, opts.tol_ms);
    return report;
}

SparsityMetrics sparsity_metrics(std::span<const PresentationStats> log) {
    SparsityMetrics out;
    if (log.empty()) return out;
    double temporal = 0.0, spatial = 0.0;
    for (const auto& p : log) {
        const double cells = static_cast<double>(p.neurons) * static_cast<double>(p.steps);
        temporal += cells > 0.0 ? 1.0 - static_cast<double>(p.nonzero_emissions) / cells : 1.0;
        spatial += p.active_neurons;
    }
    out.temporal = temporal / static_cast<double>(log.size());
    out.spatial = spatial / static_cast<double>(log.size());
    return out;
}

double template_cosine_similarity(std::span<const double> t1, std::span<const double> t2) {
    if (t1.size() != t2.size()) throw DimensionError("templates must have equal length");
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < t1.size(); ++i) {
        dot += t1[i] * t2[i];
        n1 += t1[i] * t1[i];
        n2 += t2[i] * t2[i];
    }
    if (!(n1 > 0.0) || !(n2 > 0.0)) throw PreconditionError("cosine similarity of a zero-norm template");
    return dot / (std::sqrt(n1) * std::sqrt(n2));
}

namespace {

nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

std::string report_to_json(const MatchReport& report) {
    nlohmann::ordered_json j;
    j["mean_f1"] = report.mean_f1();
    j["detection_precision"] = number_or_null(report.detection_precision);
    j["detection_fp_rate"] = number_or_null(report.detection_fp_rate);
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : report.pairs) {
        nlohmann::ordered_json e;
        e["gt_unit"] = p.gt_unit;
        e["inferred_unit"] = p.inferred_unit;
        e["agreement"] = p.agreement;
        e["tp"] = p.tp;
        e["fp"] = p.fp;
        e["fn"] = p.fn;
        e["precision"] = p.precision;
        e["recall"] = p.recall;
        e["f1"] = p.f1;
        pairs.push_back(std::move(e));
    }
    j["pairs"] = std::move(pairs);
    nlohmann::ordered_json cm;
    cm["gt_units"] = report.confusion.gt_units;
    cm["labels"] = report.confusion.labels;
    cm["counts"] = report.confusion.counts;
    j["confusion"] = std::move(cm);
    return j.dump(2) + "\n";
}

std::string pairs_to_csv(const MatchReport& report) {
    std::ostringstream os;
    os << "gt_unit,inferred_unit,agreement,tp,fp,fn,precision,recall,f1\n";
    for (const auto& p : report.pairs) {
        os << p.gt_unit << ',' << p.inferred_unit << ',' << format_double(p.agreement) << ',' << p.tp << ','
           << p.fp << ',' << p.fn << ',' << format_double(p.precision) << ',' << format_double(p.recall) << ','
           << format_double(p.f1) << '\n';
    }
    return os.str();
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
    std::ostringstream os;
    os << "gt_unit";
    for (int l : cm.labels) os << ",label_" << l;
    os << ",unassigned\n";
    for (std::size_t r = 0; r < cm.counts.size(); ++r) {
        if (r < cm.gt_units.size()) {
            os << cm.gt_units[r];
        } else {
            os << "noise";
        }
        for (long c : cm.counts[r]) os << ',' << c;
        os << '\n';
    }
    return os.str();
}

}  // namespace nss
